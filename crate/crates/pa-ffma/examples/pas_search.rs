//! Grid search for the power-split ratio that maximizes capacity.
//!
//! Sweeps `mu_pas = mu_inf / mu_red` over a grid at a fixed operating
//! point and prints the finite-alphabet capacity objective per candidate,
//! marking the argmax. Run with:
//!
//! ```sh
//! cargo run --release --example pas_search
//! ```

use pa_ffma::capacity::{optimize_pas, PasObjective};
use pa_ffma::channel::PowerProfile;
use pa_ffma::code::EpCodeSpec;

fn main() {
    let kappa = 10;
    let users = 30;
    let info_bits = 32;
    let m = 1usize << kappa;
    let ep_count = users * info_bits;
    // Any index set of the right size works here: the capacity objective
    // only depends on the section sizes, not on which rows are selected.
    let index_set: Vec<usize> = (m - ep_count..m).collect();
    let spec = EpCodeSpec::new(kappa, users, info_bits, 0, 0, index_set).unwrap();

    let grid: Vec<f64> = (1..=8).map(|i| 2.0 + 4.0 * (i as f64 - 1.0)).collect();

    for &(label, snr_db, as_ebn0) in &[("snr", 5.0, false), ("ebn0", 5.0, true)] {
        let probe = if as_ebn0 {
            PowerProfile::from_ebn0_db(&spec, 1.0, snr_db)
        } else {
            PowerProfile::from_snr_db(&spec, 1.0, snr_db)
        };
        let result = optimize_pas(
            &spec,
            &grid,
            probe.p_avg(),
            probe.n0(),
            PasObjective::FiniteAlphabet { mc_samples: None },
            42,
        );
        println!("# operating point: {label} = {snr_db} dB (P/sigma^2 = {:.4})",
            probe.p_avg() / probe.sigma_sq());
        println!("mu_pas,objective_bits,best");
        for pt in &result.curve {
            let mark = if pt.mu_pas == result.best_mu_pas { "*" } else { "" };
            println!("{},{:.3},{}", pt.mu_pas, pt.value, mark);
        }
        println!();
    }
}
