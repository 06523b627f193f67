//! Scratch probe: compare PAS objective variants (temporary).

use pa_ffma::capacity::{bpsk_capacity, capacity_bi, capacity_mi};
use pa_ffma::channel::PowerProfile;

fn main() {
    let m = 1024.0;
    let grid: Vec<f64> = vec![2.0, 6.0, 10.0, 14.0, 18.0, 22.0, 26.0, 30.0, 40.0, 60.0];
    for &(j, k) in &[(30usize, 32usize)] {
        let jk = (j * k) as f64;
        let r = m - jk;
        for &(label, ps2) in &[("P/s2=0.10541 (total-budget snr 5dB, J=30)", 0.10541)] {
            println!("J={j} R={r} {label}");
            println!("  mu_pas | info_cap  | mi_obj    | bi_obj");
            for &pas in &grid {
                let mu_red = m / (k as f64 * pas + r);
                let mu_inf = pas * mu_red;
                let s_inf = mu_inf * ps2;
                let g_red = mu_red * ps2;
                let cb = bpsk_capacity(s_inf);
                let p = PowerProfile::raw(ps2 / 2.0 * 1.0, 1.0, mu_inf, mu_red);
                let cmi = capacity_mi(j, mu_red, &p);
                let (cbi, _) = capacity_bi(j, g_red);
                println!(
                    "  {:6} | {:.4} | {:9.1} | {:9.1}",
                    pas,
                    cb,
                    jk * cb + r * cmi,
                    jk * cb + r * cbi
                );
            }
        }
    }
}
