//! Solve a random two-user scenario with the bisection solver and print the
//! full iteration trace: bracket, midpoint, feasibility verdict.
//!
//! ```bash
//! cargo run --example convergence_trace
//! ```

use noma_mec::{generate, initial_bounds, solve_bss, FeasibilityConfig, GenParams};

fn main() {
    let params = GenParams::default();
    let scenario = generate(7, &params).expect("scenario");
    for (i, u) in scenario.users().iter().enumerate() {
        println!("user {i}: h2 = {:.3e}, L = {:.2e} bits", u.channel_gain, u.task_bits);
    }
    let (lo, hi) = initial_bounds(&scenario);
    println!("bracket: [{lo}, {hi:.6}] (fully-local upper bound)");

    let epsilon = 1e-4;
    let result = solve_bss(&scenario, epsilon, &FeasibilityConfig::default()).expect("solve");

    println!("\n iter          lo          hi         mid  feasible");
    for row in &result.trace {
        println!(
            "{:5}  {:>10.6}  {:>10.6}  {:>10.6}  {}",
            row.iteration, row.lo, row.hi, row.mid, row.feasible
        );
    }
    println!("\nalpha* = {:.6} s after {} iterations", result.alpha_star, result.trace.len());
    println!("beta   = {:?}", result.allocation.beta);
    println!("p      = {:?}", result.allocation.power);
}
