//! Multiuser detection: CRC-aided successive cancellation list decoding of
//! the superposed codeword, and the two-phase Top-L bifurcated
//! minimum-distance decoder built on flip-set enumeration.

mod bmd;
mod scl;
mod topl;

pub use bmd::{bmd_phase2, candidate_cfsp, topl_bmd_decode, DistanceMetric};
pub use scl::{scl_decode, SclDecoder};
pub use topl::{path_metric_exact, path_metric_shifted, top_l, FlipSet, TopLError};

use crate::code::EpCodeSpec;

/// Outcome of a frame detection: the information block, its per-user
/// split, CRC flags, and the winning candidate's score (path metric for
/// list decoding, distance for minimum-distance decoding).
#[derive(Clone, Debug)]
pub struct DecodeResult {
    pub w_hat: Vec<u8>,
    pub per_user_bits: Vec<Vec<u8>>,
    pub per_user_crc_ok: Vec<bool>,
    pub metric: f64,
}

impl DecodeResult {
    /// Splits a detected information block into the per-user view.
    pub fn from_w(spec: &EpCodeSpec, w_hat: Vec<u8>, metric: f64) -> DecodeResult {
        assert_eq!(w_hat.len(), spec.ep_count());
        let per_user_bits = spec.unpack_w(&w_hat);
        let per_user_crc_ok = (0..spec.users())
            .map(|j| spec.crc_ok(&w_hat[spec.owned_rows(j)]))
            .collect();
        DecodeResult {
            w_hat,
            per_user_bits,
            per_user_crc_ok,
            metric,
        }
    }

    /// Bit errors against the true per-user data bits (CRC bits excluded).
    pub fn bit_errors(&self, true_bits: &[Vec<u8>]) -> usize {
        self.per_user_bits
            .iter()
            .zip(true_bits)
            .map(|(got, want)| {
                got.iter()
                    .zip(want.iter())
                    .filter(|(a, b)| a != b)
                    .count()
            })
            .sum()
    }
}
