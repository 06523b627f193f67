//! Monte Carlo construction of the EP index set.
//!
//! Random frames are pushed through the full transmit chain, the received
//! LLRs are fed to a genie-aided successive cancellation pass (decisions
//! forced to the true transform input), and each bit channel accumulates
//! the equivalent-BSC capacity of its decision LLR. The M highest-capacity
//! bit channels form the index set.
//!
//! The template code supplies the operating shape (section sizes, power
//! profile, transmit permutation); construction then re-selects the rows.

use crate::channel::{Frame, PowerProfile};
use crate::code::{ffsp_sum, EpCodeSpec};
use crate::numeric::binary_entropy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Fewer samples than this give capacity estimates too noisy to rank
/// adjacent bit channels.
pub const MIN_CONSTRUCTION_SAMPLES: usize = 1000;

const CONSTRUCTION_BATCH: usize = 64;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("need at least {MIN_CONSTRUCTION_SAMPLES} Monte Carlo samples, got {got}")]
    TooFewSamples { got: usize },
}

/// Estimated polarized bit-channel capacities, natural order.
#[derive(Clone, Debug)]
pub struct BitChannelProfile {
    capacities: Vec<f64>,
    samples: usize,
}

impl BitChannelProfile {
    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Indices of the `count` most reliable bit channels, sorted ascending;
    /// capacity ties break toward the lower index.
    pub fn best_indices(&self, count: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.capacities.len()).collect();
        order.sort_by(|&a, &b| {
            self.capacities[b]
                .partial_cmp(&self.capacities[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut chosen: Vec<usize> = order[..count].to_vec();
        chosen.sort_unstable();
        chosen
    }

    /// How many channels sit above / below the given capacity thresholds —
    /// the polarization extremity measure.
    pub fn extremes(&self, hi: f64, lo: f64) -> (usize, usize) {
        let high = self.capacities.iter().filter(|&&c| c > hi).count();
        let low = self.capacities.iter().filter(|&&c| c < lo).count();
        (high, low)
    }
}

/// In-place transform `bits = bits * G` for the block-recursive Kronecker
/// matrix; the transform is an involution, so it also inverts itself.
pub fn polar_transform_bits(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut step = 1;
    while step < n {
        let mut i = 0;
        while i < n {
            for j in i..i + step {
                bits[j] ^= bits[j + step];
            }
            i += 2 * step;
        }
        step *= 2;
    }
}

#[inline]
fn f_min_sum(a: f64, b: f64) -> f64 {
    a.signum() * b.signum() * a.abs().min(b.abs())
}

#[inline]
fn g_combine(a: f64, b: f64, bit: u8) -> f64 {
    let v = if bit == 1 { b - a } else { b + a };
    v.clamp(-crate::numeric::LLR_MAX, crate::numeric::LLR_MAX)
}

/// How the successive cancellation pass settles each bit.
enum Decisions<'a> {
    /// Forced to the true transform input (construction genie).
    Genie(&'a [u8]),
    /// Frozen bits to zero, the rest by LLR sign (plain SC decoding).
    Decode(&'a [bool]),
}

impl Decisions<'_> {
    fn settle(&self, index: usize, llr: f64) -> u8 {
        match self {
            Decisions::Genie(truth) => truth[index],
            Decisions::Decode(frozen) => {
                if frozen[index] {
                    0
                } else {
                    (llr < 0.0) as u8
                }
            }
        }
    }
}

/// Recursive SC pass over one node; returns the node's re-encoded
/// codeword and records the decision LLR of every bit index it covers.
fn sc_node(
    llr: &[f64],
    offset: usize,
    decisions: &Decisions<'_>,
    decision_llrs: &mut [f64],
    d_out: &mut [u8],
) -> Vec<u8> {
    let n = llr.len();
    if n == 1 {
        decision_llrs[offset] = llr[0];
        let bit = decisions.settle(offset, llr[0]);
        d_out[offset] = bit;
        return vec![bit];
    }
    let h = n / 2;
    let f_llrs: Vec<f64> = (0..h).map(|i| f_min_sum(llr[i], llr[i + h])).collect();
    let left = sc_node(&f_llrs, offset, decisions, decision_llrs, d_out);
    let g_llrs: Vec<f64> = (0..h)
        .map(|i| g_combine(llr[i], llr[i + h], left[i]))
        .collect();
    let right = sc_node(&g_llrs, offset + h, decisions, decision_llrs, d_out);
    let mut out = Vec::with_capacity(n);
    out.extend((0..h).map(|i| left[i] ^ right[i]));
    out.extend_from_slice(&right);
    out
}

/// Genie-aided SC pass: feeds natural-order channel LLRs through the
/// decoder with every decision replaced by the true input bit, returning
/// the per-bit decision LLRs.
pub fn genie_sc_llrs(llr_natural: &[f64], d_true: &[u8]) -> Vec<f64> {
    assert_eq!(llr_natural.len(), d_true.len());
    let mut decision_llrs = vec![0.0; llr_natural.len()];
    let mut d_scratch = vec![0u8; llr_natural.len()];
    sc_node(
        llr_natural,
        0,
        &Decisions::Genie(d_true),
        &mut decision_llrs,
        &mut d_scratch,
    );
    decision_llrs
}

/// Plain successive cancellation decoding in natural order. Returns the
/// decided transform input and the re-encoded codeword.
pub fn sc_decode(llr_natural: &[f64], frozen: &[bool]) -> (Vec<u8>, Vec<u8>) {
    assert_eq!(llr_natural.len(), frozen.len());
    let mut decision_llrs = vec![0.0; llr_natural.len()];
    let mut d = vec![0u8; llr_natural.len()];
    let codeword = sc_node(
        llr_natural,
        0,
        &Decisions::Decode(frozen),
        &mut decision_llrs,
        &mut d,
    );
    (d, codeword)
}

/// Equivalent-BSC capacity of a decision LLR oriented by the true bit:
/// lambda = exp(l * (1 - 2d)).
fn c_bsc_oriented(llr: f64, true_bit: u8) -> f64 {
    let oriented = llr * (1.0 - 2.0 * true_bit as f64);
    let p = 1.0 / (1.0 + oriented.abs().exp());
    1.0 - binary_entropy(p)
}

/// Monte Carlo estimate of every polarized bit-channel capacity at the
/// template's operating point. Deterministic in `seed` and independent of
/// the worker count: frames are batched by index and partial sums merge in
/// batch order.
pub fn estimate_bit_channels(
    template: &EpCodeSpec,
    p: &PowerProfile,
    n_samples: usize,
    seed: u64,
) -> BitChannelProfile {
    let m = template.dof();
    let batches = n_samples.div_ceil(CONSTRUCTION_BATCH);
    let partials: Vec<Vec<f64>> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch as u64 + 1);
            let lo = batch * CONSTRUCTION_BATCH;
            let hi = ((batch + 1) * CONSTRUCTION_BATCH).min(n_samples);
            let mut sums = vec![0.0; m];
            for _ in lo..hi {
                let frame = Frame::random(template, p, &mut rng);
                let v = ffsp_sum(&frame.elements);
                let mut d = template.to_natural_order(v.bits());
                polar_transform_bits(&mut d);
                let llr_nat = template.to_natural_order(&frame.received.llr);
                let decision_llrs = genie_sc_llrs(&llr_nat, &d);
                for (i, sum) in sums.iter_mut().enumerate() {
                    *sum += c_bsc_oriented(decision_llrs[i], d[i]);
                }
            }
            sums
        })
        .collect();
    let mut capacities = vec![0.0; m];
    for partial in partials {
        for (acc, v) in capacities.iter_mut().zip(partial) {
            *acc += v;
        }
    }
    for c in &mut capacities {
        *c /= n_samples as f64;
    }
    BitChannelProfile {
        capacities,
        samples: n_samples,
    }
}

/// Runs the Monte Carlo construction and returns the M best bit-channel
/// indices together with the full profile.
pub fn construct_index_set(
    template: &EpCodeSpec,
    p: &PowerProfile,
    n_samples: usize,
    seed: u64,
) -> Result<(Vec<usize>, BitChannelProfile), ConstructError> {
    if n_samples < MIN_CONSTRUCTION_SAMPLES {
        return Err(ConstructError::TooFewSamples { got: n_samples });
    }
    let profile = estimate_bit_channels(template, p, n_samples, seed);
    Ok((profile.best_indices(template.ep_count()), profile))
}

/// A template whose index set is the top block of rows — a neutral
/// starting point for construction runs.
pub fn template_spec(
    kappa: usize,
    users: usize,
    info_bits: usize,
    crc_len: usize,
    crc_poly: u64,
) -> Result<EpCodeSpec, crate::code::CodeError> {
    let m = 1usize << kappa;
    let ep_count = users * (info_bits + crc_len);
    let index_set: Vec<usize> = (m - ep_count..m).collect();
    EpCodeSpec::new(kappa, users, info_bits, crc_len, crc_poly, index_set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::kronecker;

    #[test]
    fn transform_matches_matrix_product() {
        let g = kronecker(3);
        for input in 0..256u16 {
            let d: Vec<u8> = (0..8).map(|i| ((input >> i) & 1) as u8).collect();
            let mut v = d.clone();
            polar_transform_bits(&mut v);
            assert_eq!(v, g.mul_vec_left(&d), "input {input}");
            // Involution: applying twice recovers the input.
            polar_transform_bits(&mut v);
            assert_eq!(v, d);
        }
    }

    #[test]
    fn sc_decodes_noiseless_codewords_exactly() {
        let spec = template_spec(4, 2, 3, 0, 0).unwrap();
        let frozen = spec.frozen_mask();
        for msg in 0..64u8 {
            let bits: Vec<Vec<u8>> = vec![
                (0..3).map(|k| (msg >> k) & 1).collect(),
                (0..3).map(|k| (msg >> (3 + k)) & 1).collect(),
            ];
            let elements: Vec<_> = (0..2).map(|u| spec.encode_user(u, &bits[u])).collect();
            let v = ffsp_sum(&elements);
            let v_nat = spec.to_natural_order(v.bits());
            let llr: Vec<f64> = v_nat.iter().map(|&b| if b == 0 { 20.0 } else { -20.0 }).collect();
            let (_, codeword) = sc_decode(&llr, &frozen);
            assert_eq!(codeword, v_nat, "msg {msg}");
        }
    }

    #[test]
    fn noiseless_construction_reports_full_capacity() {
        let template = template_spec(4, 2, 4, 0, 0).unwrap();
        let p = PowerProfile::raw(1.0, 1e-12, 1.0, 1.0);
        let profile = estimate_bit_channels(&template, &p, 64, 123);
        for (i, &c) in profile.capacities().iter().enumerate() {
            assert!(c >= 1.0 - 1e-6, "channel {i}: {c}");
        }
    }

    #[test]
    fn single_user_ordering_respects_partial_order_extremes() {
        // m = 8, J = 1, uniform power: the last bit channel dominates all,
        // the first is dominated by all.
        let template = template_spec(3, 1, 4, 0, 0).unwrap();
        let p = PowerProfile::from_snr_db(&template, 1.0, 0.0);
        let profile = estimate_bit_channels(&template, &p, 20_000, 7);
        let caps = profile.capacities();
        for i in 0..7 {
            assert!(caps[7] >= caps[i] - 1e-3, "I(W^7) must dominate, got {caps:?}");
            assert!(caps[0] <= caps[i + 1] + 1e-3, "I(W^0) must be dominated");
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let template = template_spec(4, 2, 3, 0, 0).unwrap();
        let p = PowerProfile::from_snr_db(&template, 2.0, 1.0);
        let (a1, prof1) = construct_index_set(&template, &p, 1000, 99).unwrap();
        let (a2, prof2) = construct_index_set(&template, &p, 1000, 99).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(prof1.capacities(), prof2.capacities());
        assert_eq!(a1.len(), template.ep_count());
    }

    #[test]
    fn too_few_samples_rejected() {
        let template = template_spec(3, 1, 2, 0, 0).unwrap();
        let p = PowerProfile::from_snr_db(&template, 1.0, 0.0);
        assert!(matches!(
            construct_index_set(&template, &p, 999, 1),
            Err(ConstructError::TooFewSamples { got: 999 })
        ));
    }

    #[test]
    fn best_indices_break_ties_toward_lower_index() {
        let profile = BitChannelProfile {
            capacities: vec![0.5, 0.9, 0.5, 0.9],
            samples: 1,
        };
        assert_eq!(profile.best_indices(3), vec![0, 1, 3]);
    }
}
