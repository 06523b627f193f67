//! Shared numeric helpers: Gaussian tail, binomial weights in log space,
//! adaptive Simpson quadrature, and numerically safe entropy terms.

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

/// LLR magnitudes are clamped to this value everywhere in the receive chain.
pub const LLR_MAX: f64 = 40.0;

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// log of the binomial coefficient C(n, k).
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// C(n, k) / 2^n, the probability that k of n fair bits are ones. Computed
/// in log space so it stays finite for hundreds of users.
pub fn binomial_weight(n: u64, k: u64) -> f64 {
    (ln_binomial(n, k) - n as f64 * std::f64::consts::LN_2).exp()
}

/// Binary entropy in bits; 0 at both endpoints.
pub fn binary_entropy(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// -p log2 p with the p -> 0 limit handled.
pub fn neg_p_log2_p(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// log(1 + e^x) without overflow for large |x|.
pub fn ln_1p_exp(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` with absolute tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    assert!(a.is_finite() && b.is_finite() && b >= a);
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn q_func_basics() {
        assert_abs_diff_eq!(q_func(0.0), 0.5, epsilon = 1e-15);
        assert!(q_func(10.0) < 1e-20);
        assert_abs_diff_eq!(q_func(-3.0) + q_func(3.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn binomial_weights_sum_to_one() {
        for &n in &[1u64, 5, 30, 300] {
            let sum: f64 = (0..=n).map(|k| binomial_weight(n, k)).sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn entropy_endpoints_and_peak() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.5), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn integrate_polynomial_exactly() {
        // Simpson is exact for cubics.
        let v = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12);
        assert_abs_diff_eq!(v, 16.0, epsilon = 1e-9);
    }

    #[test]
    fn integrate_gaussian_tail_matches_q() {
        for &x in &[0.0, 0.5, 1.0, 2.5] {
            let tail = integrate(
                |t| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt(),
                x,
                x + 12.0,
                1e-12,
            );
            assert_abs_diff_eq!(tail, q_func(x), epsilon = 1e-10);
        }
    }

    #[test]
    fn ln_1p_exp_stable() {
        assert_abs_diff_eq!(ln_1p_exp(0.0), std::f64::consts::LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(ln_1p_exp(100.0), 100.0, epsilon = 1e-12);
        assert!(ln_1p_exp(-100.0) > 0.0);
    }
}
