//! Compare NOMA partial offloading against the baseline schemes
//! (local-only, NOMA full offload, OFDMA partial) for several user counts.
//!
//! ```bash
//! cargo run --example baseline_comparison
//! ```

use noma_mec::baselines::{local_only, noma_full_offload, ofdma_partial};
use noma_mec::{generate, solve_bss, FeasibilityConfig, GenParams};

fn main() {
    let cfg = FeasibilityConfig::default();
    let epsilon = 1e-4;

    println!("    M        bss      ofdma       full      local");
    for m in [2usize, 3, 8] {
        let params = GenParams { num_users: m, ..GenParams::default() };
        // average over a few seeds so one lucky draw doesn't dominate
        let seeds: Vec<u64> = (0..5).collect();
        let mut avg = [0.0f64; 4];
        for &seed in &seeds {
            let s = generate(seed, &params).expect("scenario");
            avg[0] += solve_bss(&s, epsilon, &cfg).expect("bss").alpha_star;
            avg[1] += ofdma_partial(&s, epsilon, &cfg).expect("ofdma").alpha_star;
            avg[2] += noma_full_offload(&s, epsilon, &cfg).expect("full").alpha_star;
            avg[3] += local_only(&s).alpha_star;
        }
        for v in &mut avg {
            *v /= seeds.len() as f64;
        }
        println!("{m:5}  {:>9.4}  {:>9.4}  {:>9.4}  {:>9.4}", avg[0], avg[1], avg[2], avg[3]);
        // partial NOMA dominates every baseline (up to solver tolerance)
        assert!(avg[0] <= avg[1] + 2.0 * epsilon);
        assert!(avg[0] <= avg[2] + 2.0 * epsilon);
        assert!(avg[0] <= avg[3] + 2.0 * epsilon);
    }
}
