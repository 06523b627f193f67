//! LLR-domain successive cancellation list decoding.
//!
//! The decoder runs the standard iterative formulation over per-level LLR
//! and partial-sum banks with lazy copying: forked paths share banks by
//! reference count and split only when written. LLR banks are overwritten
//! whole on every visit, so their copy-on-write allocates without copying;
//! partial-sum banks carry live branch slots and copy on split.
//!
//! The transform here is the block-recursive Kronecker matrix (no
//! bit-reversal), while the iterative schedule pairs adjacent positions;
//! feeding the channel LLRs in bit-reversed order reconciles the two, so
//! decisions happen in natural transform order (matching the construction)
//! and the surviving codewords are un-reversed on the way out before the
//! systematic information positions are read off.

use crate::channel::{init_llrs, PowerProfile};
use crate::code::EpCodeSpec;
use crate::decode::DecodeResult;

const NO_BANK: usize = usize::MAX;

fn bit_reverse(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
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

/// Reusable list decoder for one frame length and list size. A single
/// instance decodes one frame at a time; scratch state is recycled across
/// frames.
pub struct SclDecoder {
    m: usize,
    n: u32,
    list_size: usize,
    llr_pool: Vec<Vec<Vec<f64>>>,
    llr_ref: Vec<Vec<u32>>,
    llr_free: Vec<Vec<usize>>,
    bit_pool: Vec<Vec<Vec<u8>>>,
    bit_ref: Vec<Vec<u32>>,
    bit_free: Vec<Vec<usize>>,
    path_llr: Vec<Vec<usize>>,
    path_bit: Vec<Vec<usize>>,
    active: Vec<bool>,
    metrics: Vec<f64>,
    frozen_phase: Vec<bool>,
    scratch_paths: Vec<usize>,
    candidates: Vec<(f64, usize, u8)>,
}

impl SclDecoder {
    /// # Panics
    ///
    /// Panics unless `m` is a power of two matching the code and
    /// `list_size` is a power of two (the doubling/pruning schedule).
    pub fn new(m: usize, list_size: usize) -> Self {
        assert!(m.is_power_of_two() && m >= 2, "frame length must be a power of two");
        assert!(
            list_size.is_power_of_two() && list_size >= 1,
            "list size must be a power of two"
        );
        let n = m.trailing_zeros();
        let levels = n as usize + 1;
        SclDecoder {
            m,
            n,
            list_size,
            llr_pool: vec![Vec::new(); levels],
            llr_ref: vec![Vec::new(); levels],
            llr_free: vec![Vec::new(); levels],
            bit_pool: vec![Vec::new(); levels],
            bit_ref: vec![Vec::new(); levels],
            bit_free: vec![Vec::new(); levels],
            path_llr: vec![vec![NO_BANK; list_size]; levels],
            path_bit: vec![vec![NO_BANK; list_size]; levels],
            active: vec![false; list_size],
            metrics: vec![0.0; list_size],
            frozen_phase: vec![false; m],
            scratch_paths: Vec::with_capacity(list_size),
            candidates: Vec::with_capacity(2 * list_size),
        }
    }

    /// Decodes one frame from transmit-order LLRs. Returns the best path
    /// whose per-user CRCs all pass, falling back to the best path metric.
    pub fn decode(&mut self, llr_transmit: &[f64], spec: &EpCodeSpec) -> DecodeResult {
        assert_eq!(llr_transmit.len(), self.m);
        assert_eq!(spec.dof(), self.m, "decoder sized for a different code");
        let llr_natural = spec.to_natural_order(llr_transmit);
        let llr_reversed: Vec<f64> = (0..self.m)
            .map(|i| llr_natural[bit_reverse(i, self.n)])
            .collect();
        self.frozen_phase.copy_from_slice(&spec.frozen_mask());
        self.reset(&llr_reversed);

        for phase in 0..self.m {
            self.calc_llrs(self.n as usize, phase);
            if self.frozen_phase[phase] {
                self.settle_frozen(phase);
            } else {
                self.fork_paths(phase);
            }
            if phase % 2 == 1 {
                self.update_bits(self.n as usize, phase);
            }
        }
        self.select_result(spec)
    }

    fn reset(&mut self, channel_llrs: &[f64]) {
        for level in 0..self.llr_pool.len() {
            self.llr_free[level].clear();
            for bank in 0..self.llr_pool[level].len() {
                self.llr_ref[level][bank] = 0;
                self.llr_free[level].push(bank);
            }
            self.bit_free[level].clear();
            for bank in 0..self.bit_pool[level].len() {
                self.bit_ref[level][bank] = 0;
                self.bit_free[level].push(bank);
            }
            for path in 0..self.list_size {
                self.path_llr[level][path] = NO_BANK;
                self.path_bit[level][path] = NO_BANK;
            }
        }
        self.active.fill(false);
        self.metrics.fill(0.0);

        self.active[0] = true;
        for level in 0..=self.n as usize {
            let lb = self.alloc_llr(level);
            self.llr_ref[level][lb] = 1;
            self.path_llr[level][0] = lb;
            let bb = self.alloc_bit(level);
            self.bit_ref[level][bb] = 1;
            self.path_bit[level][0] = bb;
        }
        self.llr_pool[0][self.path_llr[0][0]].copy_from_slice(channel_llrs);
    }

    fn alloc_llr(&mut self, level: usize) -> usize {
        if let Some(bank) = self.llr_free[level].pop() {
            bank
        } else {
            self.llr_pool[level].push(vec![0.0; self.m >> level]);
            self.llr_ref[level].push(0);
            self.llr_pool[level].len() - 1
        }
    }

    fn alloc_bit(&mut self, level: usize) -> usize {
        if let Some(bank) = self.bit_free[level].pop() {
            bank
        } else {
            self.bit_pool[level].push(vec![0; 2 * (self.m >> level)]);
            self.bit_ref[level].push(0);
            self.bit_pool[level].len() - 1
        }
    }

    /// Write access to a path's LLR bank at `level`. The caller overwrites
    /// every entry, so a shared bank is replaced without copying.
    fn llr_bank_for_write(&mut self, level: usize, path: usize) -> usize {
        let bank = self.path_llr[level][path];
        if self.llr_ref[level][bank] == 1 {
            return bank;
        }
        self.llr_ref[level][bank] -= 1;
        let fresh = self.alloc_llr(level);
        self.llr_ref[level][fresh] = 1;
        self.path_llr[level][path] = fresh;
        fresh
    }

    /// Write access to a path's bit bank at `level`, copying shared
    /// content since branch slots are written one at a time.
    fn bit_bank_for_write(&mut self, level: usize, path: usize) -> usize {
        let bank = self.path_bit[level][path];
        if self.bit_ref[level][bank] == 1 {
            return bank;
        }
        self.bit_ref[level][bank] -= 1;
        let fresh = self.alloc_bit(level);
        let (src, dst) = {
            let pool = &mut self.bit_pool[level];
            if bank < fresh {
                let (a, b) = pool.split_at_mut(fresh);
                (&a[bank], &mut b[0])
            } else {
                let (a, b) = pool.split_at_mut(bank);
                (&b[0], &mut a[fresh])
            }
        };
        dst.copy_from_slice(src);
        self.bit_ref[level][fresh] = 1;
        self.path_bit[level][path] = fresh;
        fresh
    }

    fn clone_path(&mut self, src: usize) -> usize {
        let dst = self
            .active
            .iter()
            .position(|&a| !a)
            .expect("a free path slot exists under the pruning budget");
        self.active[dst] = true;
        self.metrics[dst] = self.metrics[src];
        for level in 0..=self.n as usize {
            let lb = self.path_llr[level][src];
            self.path_llr[level][dst] = lb;
            self.llr_ref[level][lb] += 1;
            let bb = self.path_bit[level][src];
            self.path_bit[level][dst] = bb;
            self.bit_ref[level][bb] += 1;
        }
        dst
    }

    fn kill_path(&mut self, path: usize) {
        self.active[path] = false;
        for level in 0..=self.n as usize {
            let lb = self.path_llr[level][path];
            self.llr_ref[level][lb] -= 1;
            if self.llr_ref[level][lb] == 0 {
                self.llr_free[level].push(lb);
            }
            self.path_llr[level][path] = NO_BANK;
            let bb = self.path_bit[level][path];
            self.bit_ref[level][bb] -= 1;
            if self.bit_ref[level][bb] == 0 {
                self.bit_free[level].push(bb);
            }
            self.path_bit[level][path] = NO_BANK;
        }
    }

    fn collect_active(&mut self) {
        self.scratch_paths.clear();
        for path in 0..self.list_size {
            if self.active[path] {
                self.scratch_paths.push(path);
            }
        }
    }

    /// Recomputes the LLR arrays at `level` for phase `phase`, recursing
    /// toward the channel on even phases.
    fn calc_llrs(&mut self, level: usize, phase: usize) {
        if level == 0 {
            return;
        }
        if phase % 2 == 0 {
            self.calc_llrs(level - 1, phase >> 1);
        }
        self.collect_active();
        let paths = std::mem::take(&mut self.scratch_paths);
        let half = self.m >> level;
        for &path in &paths {
            let write_bank = self.llr_bank_for_write(level, path);
            let read_bank = self.path_llr[level - 1][path];
            let (lower, upper) = self.llr_pool.split_at_mut(level);
            let src = &lower[level - 1][read_bank];
            let dst = &mut upper[0][write_bank];
            if phase % 2 == 0 {
                for beta in 0..half {
                    dst[beta] = f_min_sum(src[2 * beta], src[2 * beta + 1]);
                }
            } else {
                let bits = &self.bit_pool[level][self.path_bit[level][path]];
                for beta in 0..half {
                    dst[beta] = g_combine(src[2 * beta], src[2 * beta + 1], bits[2 * beta]);
                }
            }
        }
        self.scratch_paths = paths;
    }

    /// Propagates settled branch bits toward the channel after each odd
    /// phase.
    fn update_bits(&mut self, level: usize, phase: usize) {
        debug_assert!(phase % 2 == 1 && level >= 1);
        let parent_phase = phase >> 1;
        let slot = parent_phase % 2;
        self.collect_active();
        let paths = std::mem::take(&mut self.scratch_paths);
        let half = self.m >> level;
        for &path in &paths {
            let write_bank = self.bit_bank_for_write(level - 1, path);
            let read_bank = self.path_bit[level][path];
            let (lower, upper) = self.bit_pool.split_at_mut(level);
            let src = &upper[0][read_bank];
            let dst = &mut lower[level - 1][write_bank];
            for beta in 0..half {
                dst[4 * beta + slot] = src[2 * beta] ^ src[2 * beta + 1];
                dst[4 * beta + 2 + slot] = src[2 * beta + 1];
            }
        }
        self.scratch_paths = paths;
        if parent_phase % 2 == 1 {
            self.update_bits(level - 1, parent_phase);
        }
    }

    fn decision_llr(&self, path: usize) -> f64 {
        self.llr_pool[self.n as usize][self.path_llr[self.n as usize][path]][0]
    }

    fn write_decision(&mut self, path: usize, phase: usize, bit: u8) {
        let level = self.n as usize;
        let bank = self.bit_bank_for_write(level, path);
        self.bit_pool[level][bank][phase % 2] = bit;
    }

    fn settle_frozen(&mut self, phase: usize) {
        self.collect_active();
        let paths = std::mem::take(&mut self.scratch_paths);
        for &path in &paths {
            let llr = self.decision_llr(path);
            if llr < 0.0 {
                self.metrics[path] -= llr;
            }
            self.write_decision(path, phase, 0);
        }
        self.scratch_paths = paths;
    }

    /// Forks every surviving path on an information bit and keeps the
    /// `list_size` smallest path metrics; ties break by path index then
    /// bit value.
    fn fork_paths(&mut self, phase: usize) {
        self.collect_active();
        let paths = std::mem::take(&mut self.scratch_paths);
        self.candidates.clear();
        for &path in &paths {
            let llr = self.decision_llr(path);
            self.candidates.push((self.metrics[path] + (-llr).max(0.0), path, 0));
            self.candidates.push((self.metrics[path] + llr.max(0.0), path, 1));
        }
        if self.candidates.len() > self.list_size {
            self.candidates.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite metrics")
                    .then(a.1.cmp(&b.1))
                    .then(a.2.cmp(&b.2))
            });
            self.candidates.truncate(self.list_size);
        }

        let mut pm_zero = vec![None; self.list_size];
        let mut pm_one = vec![None; self.list_size];
        for &(pm, path, bit) in &self.candidates {
            if bit == 0 {
                pm_zero[path] = Some(pm);
            } else {
                pm_one[path] = Some(pm);
            }
        }

        // Free abandoned paths first so clone slots are available.
        for &path in &paths {
            if pm_zero[path].is_none() && pm_one[path].is_none() {
                self.kill_path(path);
            }
        }
        for &path in &paths {
            match (pm_zero[path], pm_one[path]) {
                (Some(pm), None) => {
                    self.metrics[path] = pm;
                    self.write_decision(path, phase, 0);
                }
                (None, Some(pm)) => {
                    self.metrics[path] = pm;
                    self.write_decision(path, phase, 1);
                }
                (Some(pm0), Some(pm1)) => {
                    let twin = self.clone_path(path);
                    self.metrics[path] = pm0;
                    self.write_decision(path, phase, 0);
                    self.metrics[twin] = pm1;
                    self.write_decision(twin, phase, 1);
                }
                (None, None) => {}
            }
        }
        self.scratch_paths = paths;
    }

    /// Reads a surviving path's codeword estimate off the channel-level
    /// partial sums, undoing the bit-reversed feed order.
    fn path_codeword(&self, path: usize) -> Vec<u8> {
        let bank = &self.bit_pool[0][self.path_bit[0][path]];
        (0..self.m)
            .map(|i| bank[2 * bit_reverse(i, self.n)])
            .collect()
    }

    fn select_result(&mut self, spec: &EpCodeSpec) -> DecodeResult {
        let mut best_any: Option<(f64, Vec<u8>)> = None;
        let mut best_crc: Option<(f64, Vec<u8>)> = None;
        for path in 0..self.list_size {
            if !self.active[path] {
                continue;
            }
            let codeword = self.path_codeword(path);
            let w: Vec<u8> = spec.index_set().iter().map(|&i| codeword[i]).collect();
            let pm = self.metrics[path];
            let crc_all = (0..spec.users()).all(|j| spec.crc_ok(&w[spec.owned_rows(j)]));
            if best_any.as_ref().is_none_or(|(b, _)| pm < *b) {
                best_any = Some((pm, w.clone()));
            }
            if crc_all && best_crc.as_ref().is_none_or(|(b, _)| pm < *b) {
                best_crc = Some((pm, w));
            }
        }
        let (pm, w) = best_crc.or(best_any).expect("at least one surviving path");
        DecodeResult::from_w(spec, w, pm)
    }

    /// Best surviving path metric of the last decode (for diagnostics).
    pub fn best_metric(&self) -> f64 {
        (0..self.list_size)
            .filter(|&p| self.active[p])
            .map(|p| self.metrics[p])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Decodes one received frame with a fresh list decoder: LLR
/// initialization, natural-order permutation, list decoding, CRC-aided
/// selection.
pub fn scl_decode(
    y: &[f64],
    spec: &EpCodeSpec,
    p: &PowerProfile,
    list_size: usize,
) -> DecodeResult {
    let llr = init_llrs(y, spec, p);
    SclDecoder::new(spec.dof(), list_size).decode(&llr, spec)
}
