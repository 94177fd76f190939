//! Comparison schemes: fully local computing, NOMA full offloading, and
//! OFDMA partial offloading with an equal bandwidth split.

use crate::bisection::{bisect, initial_bounds, solve_bss, SolveResult, SolverTag};
use crate::error::{Error, Result};
use crate::feasibility::FeasibilityConfig;
use crate::model::{Allocation, Scenario, UserProfile};

/// Everything computed on-device: beta = 0, p = 0.
pub fn local_only(scenario: &Scenario) -> SolveResult {
    let (_, hi) = initial_bounds(scenario);
    SolveResult {
        alpha_star: hi,
        allocation: Allocation::zeros(scenario.num_users()),
        trace: Vec::new(),
        solver: SolverTag::BaselineLocal,
    }
}

/// Every task fully offloaded (beta = 1): minimize the common transmit time
/// subject to the power box and energy budgets.
///
/// With beta fixed the energy budget caps each power at `E_max / alpha`
/// independently and every prefix rate is nondecreasing in every power, so
/// the capped-power point decides feasibility exactly. Scenarios that cannot
/// offload at all yield an infinite completion time.
pub fn noma_full_offload(
    scenario: &Scenario,
    epsilon: f64,
    _config: &FeasibilityConfig,
) -> Result<SolveResult> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {epsilon}")));
    }
    let m = scenario.num_users();
    let infinite = |witness: Allocation| SolveResult {
        alpha_star: f64::INFINITY,
        allocation: witness,
        trace: Vec::new(),
        solver: SolverTag::BaselineFullOffload,
    };
    let full = Allocation::new(vec![1.0; m], vec![scenario.p_max; m]);
    if scenario.p_max == 0.0 {
        return Ok(infinite(full));
    }

    let probe = |alpha: f64| -> Option<Allocation> {
        let cap = (scenario.e_max / alpha).min(scenario.p_max);
        let power = vec![cap; m];
        let alloc = Allocation::new(vec![1.0; m], power);
        let mut bits = 0.0;
        for i in 0..m {
            bits += scenario.users()[i].task_bits;
            let rate = scenario.sum_rate(&alloc, i).ok()?;
            if bits > alpha * rate {
                return None;
            }
        }
        Some(alloc)
    };

    // geometric search for a feasible upper bound; the energy-unconstrained
    // corner time is a natural starting point
    let corner_rate = scenario.sum_rate(&full, m - 1)?;
    if corner_rate == 0.0 {
        return Ok(infinite(full));
    }
    let total_bits: f64 = scenario.users().iter().map(|u| u.task_bits).sum();
    let mut hi = total_bits / corner_rate;
    let mut found = probe(hi);
    for _ in 0..64 {
        if found.is_some() {
            break;
        }
        hi *= 2.0;
        found = probe(hi);
    }
    let Some(witness) = found else {
        return Ok(infinite(full));
    };
    let (alpha_star, allocation, trace) =
        bisect(0.0, hi, epsilon, witness, |alpha| Ok(probe(alpha)))?;
    Ok(SolveResult { alpha_star, allocation, trace, solver: SolverTag::BaselineFullOffload })
}

/// Each user offloads on its own band of width B/M. Per-band noise shrinks by
/// M, so with noise-normalized gains the per-user gain scales by M. Every
/// user's problem is then an independent single-user instance.
pub fn ofdma_partial(
    scenario: &Scenario,
    epsilon: f64,
    config: &FeasibilityConfig,
) -> Result<SolveResult> {
    let m = scenario.num_users();
    let mut beta = Vec::with_capacity(m);
    let mut power = Vec::with_capacity(m);
    let mut worst = 0.0f64;
    for u in scenario.users() {
        let solo = UserProfile { channel_gain: u.channel_gain * m as f64, ..u.clone() };
        let sub = Scenario::new(
            vec![solo],
            scenario.bandwidth / m as f64,
            scenario.p_max,
            scenario.e_max,
        )?;
        let r = solve_bss(&sub, epsilon, config)?;
        worst = worst.max(r.alpha_star);
        beta.push(r.allocation.beta[0]);
        power.push(r.allocation.power[0]);
    }
    Ok(SolveResult {
        alpha_star: worst,
        allocation: Allocation::new(beta, power),
        trace: Vec::new(),
        solver: SolverTag::BaselineOfdma,
    })
}

/// Total OFDMA offload rate at the given powers:
/// `sum_m (B/M) log2(1 + M h2[m] p[m])`.
pub fn ofdma_sum_rate(scenario: &Scenario, powers: &[f64]) -> Result<f64> {
    let m = scenario.num_users();
    if powers.len() != m {
        return Err(Error::InvalidParameter("powers length mismatch".into()));
    }
    let band = scenario.bandwidth / m as f64;
    Ok(scenario
        .users()
        .iter()
        .zip(powers)
        .map(|(u, p)| band * (1.0 + m as f64 * u.channel_gain * p).log2())
        .sum())
}
