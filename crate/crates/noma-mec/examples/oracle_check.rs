//! Validate the bisection solver against the brute-force grid oracle on a
//! seeded two-user scenario at increasing grid resolutions.
//!
//! ```bash
//! cargo run --example oracle_check
//! ```

use noma_mec::{generate, grid_search, solve_bss, FeasibilityConfig, GenParams};

fn main() {
    let params = GenParams::default();
    let scenario = generate(3, &params).expect("scenario");
    let bss = solve_bss(&scenario, 1e-4, &FeasibilityConfig::default()).expect("bss");
    println!("bisection alpha* = {:.9}", bss.alpha_star);

    for resolution in [21usize, 51, 101] {
        let grid = grid_search(&scenario, resolution).expect("grid");
        println!(
            "grid {resolution:4} points/axis: alpha = {:.9}  (excess {:+.3e})",
            grid.alpha_star,
            grid.alpha_star - bss.alpha_star
        );
        // discretization can only overshoot the continuous optimum
        assert!(grid.alpha_star >= bss.alpha_star - 1e-4);
    }
}
