//! Top-L smallest-sum subset enumeration and path metrics.
//!
//! Flipping bit i of a hard decision raises the path metric by the LLR
//! magnitude l_i, so the L most likely candidates are the L subsets of
//! indices with the smallest element sums. A min-heap grows candidate sets
//! along a binary tree — append the next sorted element, or swap the
//! current maximum for it — which visits subsets in nondecreasing sum
//! order and reaches every subset exactly once, without enumerating all
//! 2^n possibilities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TopLError {
    #[error("requested {requested} sets but only {available} subsets exist")]
    ListTooLong { requested: usize, available: usize },
    #[error("weights must be nonnegative and finite, got {value} at index {index}")]
    BadWeight { index: usize, value: f64 },
}

/// A set of flip positions with its accumulated path-metric sum.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipSet {
    /// Flip positions in the caller's original index space, ascending.
    pub indices: Vec<usize>,
    /// Sum of the flipped weights.
    pub sum: f64,
}

/// Heap entry over positions in the sorted-weight order. The heap is a
/// max-heap, so the ordering is reversed; sum ties break toward the
/// lexicographically smaller index set for determinism.
struct Entry {
    sum: f64,
    set: Vec<u32>,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.sum == other.sum && self.set == other.set
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .sum
            .partial_cmp(&self.sum)
            .expect("sums are finite")
            .then_with(|| other.set.cmp(&self.set))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Returns the `list_size` index subsets with the smallest weight sums, in
/// nondecreasing sum order, starting with the empty set.
pub fn top_l(weights: &[f64], list_size: usize) -> Result<Vec<FlipSet>, TopLError> {
    assert!(list_size >= 1, "list size must be positive");
    for (index, &value) in weights.iter().enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(TopLError::BadWeight { index, value });
        }
    }
    let n = weights.len();
    if n < usize::BITS as usize && list_size > 1usize << n {
        return Err(TopLError::ListTooLong {
            requested: list_size,
            available: 1 << n,
        });
    }

    // Sort positions by weight; ties keep the lower original index.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[a].partial_cmp(&weights[b]).unwrap().then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| weights[i]).collect();

    let mut heap = BinaryHeap::new();
    heap.push(Entry {
        sum: 0.0,
        set: Vec::new(),
    });
    let mut out = Vec::with_capacity(list_size);
    while out.len() < list_size {
        let entry = heap.pop().expect("tree expansion cannot exhaust early");
        let next = entry.set.last().map_or(0, |&mx| mx as usize + 1);
        if next < n {
            let mut appended = entry.set.clone();
            appended.push(next as u32);
            heap.push(Entry {
                sum: entry.sum + sorted[next],
                set: appended,
            });
            if !entry.set.is_empty() {
                let mut swapped = entry.set.clone();
                *swapped.last_mut().unwrap() = next as u32;
                heap.push(Entry {
                    sum: entry.sum + sorted[next] - sorted[next - 1],
                    set: swapped,
                });
            }
        }
        let mut indices: Vec<usize> = entry.set.iter().map(|&k| order[k as usize]).collect();
        indices.sort_unstable();
        out.push(FlipSet {
            indices,
            sum: entry.sum,
        });
    }
    Ok(out)
}

/// Exact path metric of a candidate bit assignment against its LLRs:
/// the negative log posterior, summed position-wise.
pub fn path_metric_exact(bits: &[u8], llrs: &[f64]) -> f64 {
    assert_eq!(bits.len(), llrs.len());
    bits.iter()
        .zip(llrs)
        .map(|(&b, &l)| crate::numeric::ln_1p_exp(-(1.0 - 2.0 * b as f64) * l))
        .sum()
}

/// Shifted path metric: zero for the hard decision, each flipped bit adds
/// its LLR magnitude. Orders candidates identically to the exact metric.
pub fn path_metric_shifted(bits: &[u8], llrs: &[f64]) -> f64 {
    assert_eq!(bits.len(), llrs.len());
    bits.iter()
        .zip(llrs)
        .filter(|&(&b, &l)| b != (l < 0.0) as u8)
        .map(|(_, &l)| l.abs())
        .sum()
}
