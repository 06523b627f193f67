//! Transmit chain and receive transform for the GMAC.
//!
//! Each user maps its output element to a real BPSK-style signal (0 on
//! permanently-zero positions, 1-2c elsewhere), scales the information and
//! parity sections by their polarization-adjusted power factors, and the
//! channel superposes all users plus white Gaussian noise of variance
//! N0/2. The receiver turns the superposed samples into bit LLRs: a plain
//! matched-filter LLR on information positions, a mixture-Gaussian
//! posterior ratio on parity positions.

use crate::code::{EpCodeSpec, OutputElement};
use crate::numeric::{ln_binomial, LLR_MAX};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Power allocation for one operating point.
///
/// `mu_inf` scales the information section, `mu_red` the parity section,
/// and profiles built by [`PowerProfile::for_code`] satisfy the per-user
/// power constraint `B*mu_inf + R*mu_red = m`, keeping the transmitted
/// frame energy at `m * p_avg` regardless of the split.
#[derive(Clone, Debug)]
pub struct PowerProfile {
    p_avg: f64,
    n0: f64,
    mu_inf: f64,
    mu_red: f64,
}

impl PowerProfile {
    /// Derives `(mu_inf, mu_red)` from the power-split ratio `mu_pas =
    /// mu_inf / mu_red` under the per-user power constraint.
    pub fn for_code(spec: &EpCodeSpec, mu_pas: f64, p_avg: f64, n0: f64) -> Self {
        assert!(mu_pas > 0.0 && p_avg > 0.0 && n0 >= 0.0);
        let b = spec.block_len() as f64;
        let r = spec.parity_len() as f64;
        let m = spec.dof() as f64;
        let (mu_inf, mu_red) = if r == 0.0 {
            // Degenerate: only the information section transmits.
            (m / b, m / b / mu_pas)
        } else if b == 0.0 {
            (mu_pas * m / r, m / r)
        } else {
            let mu_red = m / (b * mu_pas + r);
            (mu_pas * mu_red, mu_red)
        };
        let profile = PowerProfile {
            p_avg,
            n0,
            mu_inf,
            mu_red,
        };
        debug_assert!(profile.constraint_residual(spec) < 1e-9);
        profile
    }

    /// Profile at a per-symbol SNR `p_avg / sigma^2` given in dB, with
    /// N0 = 1.
    pub fn from_snr_db(spec: &EpCodeSpec, mu_pas: f64, snr_db: f64) -> Self {
        let n0 = 1.0;
        let p_avg = 10f64.powf(snr_db / 10.0) * n0 / 2.0;
        Self::for_code(spec, mu_pas, p_avg, n0)
    }

    /// Profile at an Eb/N0 given in dB, with N0 = 1 and Eb = m*P/K: the
    /// whole per-user frame energy counted against the K data bits.
    pub fn from_ebn0_db(spec: &EpCodeSpec, mu_pas: f64, ebn0_db: f64) -> Self {
        let n0 = 1.0;
        let k = spec.info_bits().max(1) as f64;
        let p_avg = 10f64.powf(ebn0_db / 10.0) * k * n0 / spec.dof() as f64;
        Self::for_code(spec, mu_pas, p_avg, n0)
    }

    /// Unconstrained profile for standalone capacity analysis.
    pub fn raw(p_avg: f64, n0: f64, mu_inf: f64, mu_red: f64) -> Self {
        PowerProfile {
            p_avg,
            n0,
            mu_inf,
            mu_red,
        }
    }

    pub fn p_avg(&self) -> f64 {
        self.p_avg
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn sigma_sq(&self) -> f64 {
        self.n0 / 2.0
    }

    pub fn mu_inf(&self) -> f64 {
        self.mu_inf
    }

    pub fn mu_red(&self) -> f64 {
        self.mu_red
    }

    pub fn mu_pas(&self) -> f64 {
        self.mu_inf / self.mu_red
    }

    /// Amplitude on information positions.
    pub fn amp_info(&self) -> f64 {
        (self.mu_inf * self.p_avg).sqrt()
    }

    /// Amplitude on parity positions.
    pub fn amp_parity(&self) -> f64 {
        (self.mu_red * self.p_avg).sqrt()
    }

    /// Relative deviation from the per-user power constraint.
    pub fn constraint_residual(&self, spec: &EpCodeSpec) -> f64 {
        let b = spec.block_len() as f64;
        let r = spec.parity_len() as f64;
        let m = spec.dof() as f64;
        ((b * self.mu_inf + r * self.mu_red) - m).abs() / m
    }

    /// Per-position power factors seen by `user` in transmit order:
    /// `mu_inf` on the owned block, `mu_red` on parity, 0 elsewhere.
    pub fn mu_for_user(&self, spec: &EpCodeSpec, user: usize) -> Vec<f64> {
        (0..spec.dof())
            .map(|pos| {
                if pos >= spec.ep_count() {
                    self.mu_red
                } else if spec.permanently_zero(user, pos) {
                    0.0
                } else {
                    self.mu_inf
                }
            })
            .collect()
    }
}

/// Noiseless integer superposition of the users' sign values. Parity
/// positions take values in {-J, -J+2, ..., J}; information positions carry
/// a single user and stay in {-1, +1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfspBlock {
    values: Vec<i32>,
}

impl CfspBlock {
    pub fn values(&self) -> &[i32] {
        &self.values
    }

    /// Checks the alphabet congruence: parity positions must match the
    /// user count parity and magnitude, information positions are single
    /// user.
    pub fn validate(&self, spec: &EpCodeSpec) {
        let j = spec.users() as i32;
        for (i, &r) in self.values.iter().enumerate() {
            if i < spec.ep_count() {
                assert!(r == 1 || r == -1, "info position {i} out of alphabet");
            } else {
                assert!(r.abs() <= j && (r - j) % 2 == 0, "parity position {i} out of alphabet");
            }
        }
    }
}

/// Received frame: the superposed noisy samples and their bit LLRs.
#[derive(Clone, Debug)]
pub struct ReceivedBlock {
    pub y: Vec<f64>,
    pub llr: Vec<f64>,
}

/// Maps one user's output element to its power-allocated transmit signal:
/// zero on permanently-zero positions, otherwise (1-2c) scaled by the
/// section amplitude.
pub fn modulate(spec: &EpCodeSpec, c: &OutputElement, user: usize, p: &PowerProfile) -> Vec<f64> {
    assert_eq!(c.len(), spec.dof(), "element length mismatch");
    let amp_info = p.amp_info();
    let amp_parity = p.amp_parity();
    c.bits()
        .iter()
        .enumerate()
        .map(|(pos, &bit)| {
            if spec.permanently_zero(user, pos) {
                0.0
            } else {
                let amp = if pos < spec.ep_count() { amp_info } else { amp_parity };
                amp * (1.0 - 2.0 * bit as f64)
            }
        })
        .collect()
}

/// Integer CFSP block of a set of output elements (the sign superposition
/// before power scaling and noise).
pub fn cfsp_sum(spec: &EpCodeSpec, elements: &[OutputElement]) -> CfspBlock {
    let mut values = vec![0i32; spec.dof()];
    for (user, c) in elements.iter().enumerate() {
        for (pos, &bit) in c.bits().iter().enumerate() {
            if !spec.permanently_zero(user, pos) {
                values[pos] += 1 - 2 * bit as i32;
            }
        }
    }
    CfspBlock { values }
}

/// Superposes the users' power-allocated signals and adds white Gaussian
/// noise of variance N0/2 per sample.
pub fn gmac_transmit<R: Rng>(signals: &[Vec<f64>], p: &PowerProfile, rng: &mut R) -> Vec<f64> {
    let m = signals.first().map_or(0, |s| s.len());
    let mut y = vec![0.0; m];
    for s in signals {
        assert_eq!(s.len(), m, "signal length mismatch");
        for (acc, &x) in y.iter_mut().zip(s) {
            *acc += x;
        }
    }
    if p.n0 > 0.0 {
        let noise = Normal::new(0.0, p.sigma_sq().sqrt()).expect("valid noise sigma");
        for v in &mut y {
            *v += noise.sample(rng);
        }
    }
    y
}

/// Posterior probabilities (P(v=0|y), P(v=1|y)) of the FFSP bit on a parity
/// position, from the (J+1)-component Gaussian mixture over the CFSP
/// alphabet. `t` ones among the users put the symbol at J-2t with weight
/// C(J,t)/2^J and FFSP bit t mod 2.
pub fn parity_posteriors(y: f64, j_users: usize, p: &PowerProfile) -> (f64, f64) {
    assert!(y.is_finite(), "received sample must be finite");
    let (ln_even, ln_odd) = parity_log_masses(y, j_users, p);
    let max = ln_even.max(ln_odd);
    let se = (ln_even - max).exp();
    let so = (ln_odd - max).exp();
    (se / (se + so), so / (se + so))
}

/// Log of the unnormalized even-t and odd-t mixture masses at `y`.
fn parity_log_masses(y: f64, j_users: usize, p: &PowerProfile) -> (f64, f64) {
    assert!(j_users >= 1);
    let amp = p.amp_parity();
    let n0 = p.n0.max(f64::MIN_POSITIVE);
    let j = j_users as f64;
    let ln2 = std::f64::consts::LN_2;
    let mut even = f64::NEG_INFINITY;
    let mut odd = f64::NEG_INFINITY;
    for t in 0..=j_users {
        let mean = amp * (j - 2.0 * t as f64);
        let a = ln_binomial(j_users as u64, t as u64) - j * ln2 - (y - mean).powi(2) / n0;
        let slot = if t % 2 == 0 { &mut even } else { &mut odd };
        *slot = logaddexp(*slot, a);
    }
    (even, odd)
}

fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// LLR of the FFSP bit on a parity position, clamped to the shared LLR
/// range.
pub fn parity_llr(y: f64, j_users: usize, p: &PowerProfile) -> f64 {
    let (ln_even, ln_odd) = parity_log_masses(y, j_users, p);
    (ln_even - ln_odd).clamp(-LLR_MAX, LLR_MAX)
}

/// Initial LLR vector in transmit order: matched-filter LLRs on the first
/// M positions, mixture posterior ratios on the parity tail.
pub fn init_llrs(y: &[f64], spec: &EpCodeSpec, p: &PowerProfile) -> Vec<f64> {
    assert_eq!(y.len(), spec.dof(), "received length mismatch");
    let sigma_sq = p.sigma_sq().max(f64::MIN_POSITIVE);
    let info_scale = 2.0 * p.amp_info() / sigma_sq;
    y.iter()
        .enumerate()
        .map(|(pos, &sample)| {
            if pos < spec.ep_count() {
                (info_scale * sample).clamp(-LLR_MAX, LLR_MAX)
            } else {
                parity_llr(sample, spec.users(), p)
            }
        })
        .collect()
}

/// One full transmission round: user bits through encode, modulation,
/// superposition, noise, and LLR computation.
#[derive(Clone, Debug)]
pub struct Frame {
    pub user_bits: Vec<Vec<u8>>,
    pub elements: Vec<OutputElement>,
    pub cfsp: CfspBlock,
    pub received: ReceivedBlock,
}

impl Frame {
    /// Encodes and transmits the given per-user data bits.
    pub fn from_bits<R: Rng>(
        spec: &EpCodeSpec,
        p: &PowerProfile,
        user_bits: Vec<Vec<u8>>,
        rng: &mut R,
    ) -> Frame {
        let elements: Vec<OutputElement> = user_bits
            .iter()
            .enumerate()
            .map(|(u, bits)| spec.encode_user(u, bits))
            .collect();
        let signals: Vec<Vec<f64>> = elements
            .iter()
            .enumerate()
            .map(|(u, c)| modulate(spec, c, u, p))
            .collect();
        let cfsp = cfsp_sum(spec, &elements);
        let y = gmac_transmit(&signals, p, rng);
        let llr = init_llrs(&y, spec, p);
        Frame {
            user_bits,
            elements,
            cfsp,
            received: ReceivedBlock { y, llr },
        }
    }

    /// Encodes and transmits uniformly random data bits.
    pub fn random<R: Rng>(spec: &EpCodeSpec, p: &PowerProfile, rng: &mut R) -> Frame {
        let user_bits: Vec<Vec<u8>> = (0..spec.users())
            .map(|_| (0..spec.info_bits()).map(|_| rng.random_range(0..2u8)).collect())
            .collect();
        Frame::from_bits(spec, p, user_bits, rng)
    }

    /// The transmitted information block w.
    pub fn packed_w(&self, spec: &EpCodeSpec) -> Vec<u8> {
        spec.pack_w(&self.user_bits)
    }
}
