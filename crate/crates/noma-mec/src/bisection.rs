//! Bisection search on the candidate completion time. The min-max objective
//! is quasi-convex, so branching on feasibility of the convex subproblem at
//! each midpoint converges to the global optimum.

use crate::error::{Error, Result};
use crate::feasibility::{check_feasible, FeasibilityConfig};
use crate::model::{Allocation, Scenario};

/// Which solver produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverTag {
    Bss,
    ClosedForm,
    Oracle,
    BaselineLocal,
    BaselineFullOffload,
    BaselineOfdma,
}

impl SolverTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverTag::Bss => "bss",
            SolverTag::ClosedForm => "closed2",
            SolverTag::Oracle => "oracle",
            SolverTag::BaselineLocal => "local",
            SolverTag::BaselineFullOffload => "full",
            SolverTag::BaselineOfdma => "ofdma",
        }
    }
}

/// One bisection step: the bracket at entry, the midpoint probed, and the
/// feasibility verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub lo: f64,
    pub hi: f64,
    pub mid: f64,
    pub feasible: bool,
}

/// Solver output: the optimal completion time, a witness allocation and the
/// full iteration trace.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub alpha_star: f64,
    pub allocation: Allocation,
    pub trace: Vec<TraceRow>,
    pub solver: SolverTag,
}

/// Initial bisection bracket: `(0, max_m L C / f)`. The upper bound is the
/// fully-local completion time, always achievable with zero power.
pub fn initial_bounds(scenario: &Scenario) -> (f64, f64) {
    let hi = scenario.users().iter().map(|u| u.full_local_time()).fold(0.0, f64::max);
    (0.0, hi)
}

/// Number of bisection steps needed to shrink `range` below `epsilon`.
pub fn iteration_count(range: f64, epsilon: f64) -> usize {
    if range <= epsilon {
        return 0;
    }
    (range / epsilon).log2().ceil() as usize
}

/// Minimize the worst completion time by bisection over feasibility checks.
pub fn solve_bss(
    scenario: &Scenario,
    epsilon: f64,
    config: &FeasibilityConfig,
) -> Result<SolveResult> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {epsilon}")));
    }
    let (lo, hi) = initial_bounds(scenario);
    // The fully-local point is always a witness at the upper bound unless the
    // pure-local energy already exceeds the budget.
    let top = check_feasible(scenario, hi, config)?;
    let witness = top.witness().cloned().ok_or(Error::InfeasibleScenario)?;
    let (alpha_star, allocation, trace) = bisect(lo, hi, epsilon, witness, |alpha| {
        Ok(check_feasible(scenario, alpha, config)?.witness().cloned())
    })?;
    Ok(SolveResult { alpha_star, allocation, trace, solver: SolverTag::Bss })
}

/// Generic bisection driver shared with the baselines: `probe` returns a
/// witness when the midpoint deadline is feasible.
pub(crate) fn bisect<F>(
    mut lo: f64,
    mut hi: f64,
    epsilon: f64,
    mut witness: Allocation,
    mut probe: F,
) -> Result<(f64, Allocation, Vec<TraceRow>)>
where
    F: FnMut(f64) -> Result<Option<Allocation>>,
{
    let mut trace = Vec::new();
    let mut iteration = 0;
    while hi - lo > epsilon {
        iteration += 1;
        let mid = 0.5 * (lo + hi);
        let found = probe(mid)?;
        let feasible = found.is_some();
        trace.push(TraceRow { iteration, lo, hi, mid, feasible });
        if let Some(w) = found {
            witness = w;
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((0.5 * (lo + hi), witness, trace))
}
