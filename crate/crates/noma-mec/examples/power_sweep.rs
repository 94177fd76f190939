//! Sweep the transmit power cap and watch the optimal completion time fall
//! monotonically while the local-only baseline stays flat.
//!
//! ```bash
//! cargo run --example power_sweep
//! ```

use noma_mec::baselines::local_only;
use noma_mec::{generate, solve_bss, FeasibilityConfig, GenParams};

fn main() {
    let cfg = FeasibilityConfig::default();
    let epsilon = 1e-4;
    let seed = 11;

    println!("  p_max (W)        bss      local");
    let mut previous = f64::INFINITY;
    for p_max in [0.002, 0.005, 0.01, 0.02] {
        let params = GenParams { p_max_w: p_max, ..GenParams::default() };
        let s = generate(seed, &params).expect("scenario");
        let bss = solve_bss(&s, epsilon, &cfg).expect("bss").alpha_star;
        let local = local_only(&s).alpha_star;
        println!("{p_max:11.3}  {bss:>9.4}  {local:>9.4}");
        assert!(bss <= previous + 2.0 * epsilon, "more power should never hurt");
        previous = bss;
    }
}
