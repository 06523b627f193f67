//! Placeholder.
use crate::channel::PowerProfile;
use crate::code::EpCodeSpec;
use crate::decode::{DecodeResult, FlipSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMetric {
    SquaredEuclidean,
    L1,
}

pub fn candidate_cfsp(
    _spec: &EpCodeSpec,
    _p: &PowerProfile,
    _base_w: &[u8],
    _flips: &[usize],
) -> Vec<f64> {
    unimplemented!()
}

pub fn bmd_phase2(
    _y: &[f64],
    _spec: &EpCodeSpec,
    _p: &PowerProfile,
    _flip_sets: &[FlipSet],
    _metric: DistanceMetric,
) -> DecodeResult {
    unimplemented!()
}

pub fn topl_bmd_decode(
    _y: &[f64],
    _spec: &EpCodeSpec,
    _p: &PowerProfile,
    _list_size: usize,
    _metric: DistanceMetric,
) -> DecodeResult {
    unimplemented!()
}
