//! Scratch diagnostic for list-decoder path metrics (temporary).

use pa_ffma::channel::{Frame, PowerProfile};
use pa_ffma::code::EpCodeSpec;
use pa_ffma::construct::genie_sc_llrs;
use pa_ffma::construct::polar_transform_bits;
use pa_ffma::decode::SclDecoder;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Path metric of a forced input d: replay SC with all decisions forced,
/// summing |l| wherever the decision disagrees with the LLR sign.
fn forced_pm(llr_nat: &[f64], d: &[u8]) -> f64 {
    let dec = genie_sc_llrs(llr_nat, d);
    dec.iter()
        .zip(d)
        .filter(|(&l, &b)| b != (l < 0.0) as u8)
        .map(|(&l, _)| l.abs())
        .sum()
}

fn main() {
    let spec = EpCodeSpec::new(4, 2, 3, 0, 0, vec![7, 9, 10, 11, 13, 14]).unwrap();
    let p = PowerProfile::from_ebn0_db(&spec, 1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..50 {
        let frame = Frame::random(&spec, &p, &mut rng);
        let llr_nat = spec.to_natural_order(&frame.received.llr);

        // Exhaustive minimum forced PM over all information blocks.
        let m = spec.ep_count();
        let mut best_pm = f64::INFINITY;
        for msg in 0..1u32 << m {
            let w: Vec<u8> = (0..m).map(|k| ((msg >> k) & 1) as u8).collect();
            // d = v * G (transform is involutive), v natural from w.
            let elements: Vec<_> = (0..spec.users())
                .map(|u| spec.encode_block(u, &w[spec.owned_rows(u)]))
                .collect();
            let v = pa_ffma::code::ffsp_sum(&elements);
            let mut d = spec.to_natural_order(v.bits());
            polar_transform_bits(&mut d);
            let pm = forced_pm(&llr_nat, &d);
            if pm < best_pm {
                best_pm = pm;
            }
        }

        let mut line = format!("trial {trial:2}: ml_pm {best_pm:8.4} |");
        for list_size in [1usize, 2, 4, 8, 64] {
            let mut dec = SclDecoder::new(spec.dof(), list_size);
            dec.decode(&frame.received.llr, &spec);
            line.push_str(&format!(" L{list_size}:{:8.4}", dec.best_metric()));
        }
        println!("{line}");
    }
}
