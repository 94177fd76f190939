//! Two-user closed form vs bisection: solve the same seeded scenarios both
//! ways and report the KKT case and the gap between the two optima.
//!
//! ```bash
//! cargo run --example closed_form_vs_bss
//! ```

use noma_mec::{generate, solve_bss, solve_two_user, FeasibilityConfig, GenParams};

fn main() {
    let cfg = FeasibilityConfig::default();
    let epsilon = 1e-4;

    println!(" seed  case   closed-form alpha      bisection alpha          gap");
    for seed in 0..12u64 {
        // vary the energy budget so different KKT active sets show up
        let e_max = [0.2, 0.02, 0.005][seed as usize % 3];
        let params = GenParams { e_max_j: e_max, ..GenParams::default() };
        let scenario = generate(seed, &params).expect("scenario");

        let bss = solve_bss(&scenario, epsilon, &cfg).expect("bss");
        match solve_two_user(&scenario) {
            Ok(sol) => {
                let gap = (sol.alpha - bss.alpha_star).abs();
                println!(
                    "{seed:5}  {:4}  {:>18.9}  {:>18.9}  {:>11.3e}",
                    sol.case.id(),
                    sol.alpha,
                    bss.alpha_star,
                    gap
                );
                assert!(gap <= f64::max(1e-4, 1e-3 * sol.alpha));
            }
            Err(e) => println!("{seed:5}  closed form unavailable: {e}"),
        }
    }
}
