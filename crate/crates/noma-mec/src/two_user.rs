//! Closed-form optimum for the two-user case.
//!
//! At the optimum every user's local computing time and the shared offload
//! window all equal the completion time, which collapses the problem to a
//! convex program in the two powers alone. Its KKT system splits into four
//! active-set cases; power levels where an energy budget binds are roots of
//! `A + B p = log2(k + h p)` and are expressed through the Lambert W
//! function. Every Lambert evaluation is cross-checked against a bisection
//! root-finder on the underlying energy equality; a mismatch is an error,
//! never a silently wrong power.
//!
//! The collapse is only valid where the weak user's own-channel capacity can
//! carry its share of the offload bits within the window; solutions outside
//! that region are rejected with [`Error::ClosedFormInvalid`] so the caller
//! can fall back to the bisection solver.

use crate::bisection::{SolveResult, SolverTag};
use crate::error::{Error, Result};
use crate::lambert::{lambert_w0, lambert_wm1, BRANCH_POINT};
use crate::model::{Allocation, Scenario};

/// Which KKT active set produced the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KktCase {
    /// Both powers at the cap, both energy budgets slack.
    Case1,
    /// User 1 at the cap, user 2's energy budget binding.
    Case2,
    /// User 2 at the cap, user 1's energy budget binding.
    Case3,
    /// Both energy budgets binding.
    Case4,
}

impl KktCase {
    pub fn id(&self) -> u8 {
        match self {
            KktCase::Case1 => 1,
            KktCase::Case2 => 2,
            KktCase::Case3 => 3,
            KktCase::Case4 => 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClosedFormSolution {
    pub case: KktCase,
    pub p1: f64,
    pub p2: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Optimal completion time (the transformed objective value).
    pub alpha: f64,
}

impl ClosedFormSolution {
    pub fn allocation(&self) -> Allocation {
        Allocation::new(vec![self.beta1, self.beta2], vec![self.p1, self.p2])
    }

    pub fn to_solve_result(&self) -> SolveResult {
        SolveResult {
            alpha_star: self.alpha,
            allocation: self.allocation(),
            trace: Vec::new(),
            solver: SolverTag::ClosedForm,
        }
    }
}

/// Where an energy budget pins a user's power, given the other user's power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerBoundary {
    /// Largest power for which the energy budget still holds.
    Binding(f64),
    /// The budget holds for every power in the box.
    Slack,
}

impl PowerBoundary {
    /// Value used in the case conditions: +inf when slack.
    fn cap(&self) -> f64 {
        match self {
            PowerBoundary::Binding(p) => *p,
            PowerBoundary::Slack => f64::INFINITY,
        }
    }
}

/// Shared constants of the transformed two-user problem.
struct Consts {
    a1: f64,
    b1: f64,
    bw: f64,
    e_max: f64,
    p_max: f64,
    h: [f64; 2],
    /// Per-user kappa * f^3 (watts).
    kf3: [f64; 2],
    /// A_m = kappa_m a1 f_m^3 / (E_max B) - b1 / B.
    cap_a: [f64; 2],
    /// B_m = a1 / (E_max B), identical for both users.
    cap_b: f64,
}

impl Consts {
    fn new(scenario: &Scenario) -> Result<Self> {
        if scenario.num_users() != 2 {
            return Err(Error::TwoUserOnly(scenario.num_users()));
        }
        let u = scenario.users();
        let a1 = u[0].task_bits + u[1].task_bits;
        let b1 = u[0].cpu_freq / u[0].cycles_per_bit + u[1].cpu_freq / u[1].cycles_per_bit;
        let bw = scenario.bandwidth;
        let e_max = scenario.e_max;
        let kf3 = [
            u[0].cap_coeff * u[0].cpu_freq.powi(3),
            u[1].cap_coeff * u[1].cpu_freq.powi(3),
        ];
        let cap_b = a1 / (e_max * bw);
        let cap_a = [
            a1 * kf3[0] / (e_max * bw) - b1 / bw,
            a1 * kf3[1] / (e_max * bw) - b1 / bw,
        ];
        Ok(Self {
            a1,
            b1,
            bw,
            e_max,
            p_max: scenario.p_max,
            h: [u[0].channel_gain, u[1].channel_gain],
            kf3,
            cap_a,
            cap_b,
        })
    }

    /// Energy residual of user `m` at powers (p1, p2), in joules-per-second
    /// terms of the transformed problem:
    /// `kappa_m a1 f_m^3 + a1 p_m - E_max (b1 + B log2(1 + h1 p1 + h2 p2))`.
    fn energy_gap(&self, m: usize, p1: f64, p2: f64) -> f64 {
        let p_own = if m == 0 { p1 } else { p2 };
        let rate = self.bw * (1.0 + self.h[0] * p1 + self.h[1] * p2).log2();
        self.kf3[m] * self.a1 + self.a1 * p_own - self.e_max * (self.b1 + rate)
    }
}

/// Completion time of the equal-time transformed problem at powers (p1, p2):
/// `(L1 + L2) / (f1/C1 + f2/C2 + B log2(1 + h1 p1 + h2 p2))`.
pub fn transformed_objective(scenario: &Scenario, p1: f64, p2: f64) -> Result<f64> {
    let c = Consts::new(scenario)?;
    Ok(c.a1 / (c.b1 + c.bw * (1.0 + c.h[0] * p1 + c.h[1] * p2).log2()))
}

/// Power at which user 1's energy budget binds, given user 2's power.
pub fn p1_boundary(scenario: &Scenario, p2: f64) -> Result<PowerBoundary> {
    let c = Consts::new(scenario)?;
    energy_boundary(&c, 0, c.h[0], 1.0 + c.h[1] * p2, |p| c.energy_gap(0, p, p2))
}

/// Power at which user 2's energy budget binds, given user 1's power.
pub fn p2_boundary(scenario: &Scenario, p1: f64) -> Result<PowerBoundary> {
    let c = Consts::new(scenario)?;
    energy_boundary(&c, 1, c.h[1], 1.0 + c.h[0] * p1, |p| c.energy_gap(1, p1, p))
}

/// Solve `cap_a[m] + cap_b p = log2(k + h_eff p)` for the binding power: the
/// larger root, where the budget transitions from satisfied back to violated.
///
/// The Lambert route: with `gamma = cap_b ln2 / h_eff` and
/// `delta = ln2 (cap_a - cap_b k / h_eff)`, the roots are
/// `u = -W(-gamma e^delta) / gamma` for the two real branches, `u = k + h p`.
/// The binding (upper) root lies past the turning point `u = 1/gamma` and so
/// comes from the secondary branch; the principal branch gives the lower
/// root, the minimum power the budget needs at all.
fn energy_boundary<F>(
    c: &Consts,
    m: usize,
    h_eff: f64,
    k: f64,
    gap: F,
) -> Result<PowerBoundary>
where
    F: Fn(f64) -> f64,
{
    let ln2 = std::f64::consts::LN_2;
    let gamma = c.cap_b * ln2 / h_eff;
    let delta = ln2 * (c.cap_a[m] - c.cap_b * k / h_eff);
    let z = -gamma * delta.exp();

    if z < BRANCH_POINT * (1.0 + 1e-12) {
        // no real root: the energy gap is positive for every power
        return Err(Error::EnergyInfeasible(m));
    }
    let (u_lo, u_hi) = if z == 0.0 {
        // exponent underflow: the upper root is far beyond any physical power
        (0.0, f64::INFINITY)
    } else {
        (-lambert_w0(z)? / gamma, -lambert_wm1(z)? / gamma)
    };
    if u_hi < k {
        // budget violated for every nonnegative power
        return Err(Error::EnergyInfeasible(m));
    }
    let p_lo = ((u_lo - k) / h_eff).max(0.0);
    if p_lo > 0.0 {
        // a strictly positive minimum power: verify it against the root-finder
        // on the decreasing side of the gap
        let turn = ((1.0 / gamma - k) / h_eff).max(0.0);
        if gap(0.0) > 0.0 && gap(turn) < 0.0 {
            let root = bisect_root(&gap, 0.0, turn);
            check_root(p_lo, root)?;
        }
    }
    if !u_hi.is_finite() {
        return Ok(PowerBoundary::Slack);
    }
    let p_hi = (u_hi - k) / h_eff;
    // cross-check the Lambert value against a bisection root-finder on the
    // increasing side of the energy gap
    let mut lo = ((1.0 / gamma - k) / h_eff).max(0.0);
    if gap(lo) > 0.0 {
        // degenerate: both roots below p = 0
        return Ok(PowerBoundary::Binding(p_hi));
    }
    let mut hi = (2.0 * p_hi).max(lo + 1.0);
    for _ in 0..200 {
        if gap(hi) > 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    let root = bisect_root(&gap, lo, hi);
    check_root(p_hi, root)?;
    Ok(PowerBoundary::Binding(p_hi))
}

fn check_root(lambert: f64, root: f64) -> Result<()> {
    if (lambert - root).abs() > 1e-10 + 1e-8 * root.abs() {
        return Err(Error::ClosedFormMismatch { lambert, root });
    }
    Ok(())
}

fn bisect_root<F: Fn(f64) -> f64>(gap: &F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let sign_mid = gap(mid) > 0.0;
        let sign_lo = gap(lo) > 0.0;
        if sign_mid == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Joint solve of both energy equalities (Case 4). Subtracting them pins the
/// power offset `p1 - p2 = kappa2 f2^3 - kappa1 f1^3`; substituting back
/// leaves one equality with effective gain `h1 + h2`.
fn case4_powers(c: &Consts) -> Result<(f64, f64)> {
    let offset = c.kf3[1] - c.kf3[0];
    let h_eff = c.h[0] + c.h[1];
    let k = 1.0 + c.h[0] * offset;
    if k <= 0.0 {
        return Err(Error::EnergyInfeasible(0));
    }
    let boundary = energy_boundary(c, 1, h_eff, k, |p2| c.energy_gap(1, p2 + offset, p2))?;
    match boundary {
        PowerBoundary::Binding(p2) => Ok((p2 + offset, p2)),
        PowerBoundary::Slack => Err(Error::EnergyInfeasible(1)),
    }
}

const CASE_TOL: f64 = 1e-9;

/// Closed-form optimum for a two-user scenario.
///
/// Walks the four KKT cases in order, recovers the task splits from the
/// equal-time structure, and verifies every constraint of the transformed
/// problem at the result. Scenarios whose equal-time solution requires a
/// task split outside [0,1] are reported as [`Error::BetaOutOfRange`]; the
/// caller should fall back to the bisection solver.
pub fn solve_two_user(scenario: &Scenario) -> Result<ClosedFormSolution> {
    let c = Consts::new(scenario)?;
    let p_max = c.p_max;
    if !(p_max > 0.0) {
        return Err(Error::InvalidParameter("closed form requires p_max > 0".into()));
    }

    let b1_at_corner = p1_boundary(scenario, p_max)?.cap();
    let b2_at_corner = p2_boundary(scenario, p_max)?.cap();

    // ties (boundary exactly at the cap) resolve to the corner
    let candidates: Vec<(KktCase, f64, f64)> = if b1_at_corner >= p_max && b2_at_corner >= p_max {
        vec![(KktCase::Case1, p_max, p_max)]
    } else if b1_at_corner >= p_max {
        let mut v = vec![(KktCase::Case2, p_max, b2_at_corner)];
        if let Ok(p) = case4_powers(&c) {
            v.push((KktCase::Case4, p.0, p.1));
        }
        v
    } else {
        let b2_at_b1 = p2_boundary(scenario, b1_at_corner)?.cap();
        let mut v = Vec::new();
        if b2_at_b1 >= p_max {
            v.push((KktCase::Case3, b1_at_corner, p_max));
        }
        if let Ok(p) = case4_powers(&c) {
            v.push((KktCase::Case4, p.0, p.1));
        }
        v
    };

    let mut last_err = Error::EnergyInfeasible(0);
    for (case, p1, p2) in candidates {
        match build_solution(scenario, &c, case, p1, p2) {
            Ok(sol) => return Ok(sol),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

fn build_solution(
    scenario: &Scenario,
    c: &Consts,
    case: KktCase,
    p1: f64,
    p2: f64,
) -> Result<ClosedFormSolution> {
    let box_tol = CASE_TOL * c.p_max.max(1.0);
    if !(p1 >= -box_tol && p1 <= c.p_max + box_tol && p2 >= -box_tol && p2 <= c.p_max + box_tol) {
        return Err(Error::InvalidParameter(format!(
            "case {} powers ({p1}, {p2}) outside the box",
            case.id()
        )));
    }
    let p1 = p1.clamp(0.0, c.p_max);
    let p2 = p2.clamp(0.0, c.p_max);

    // energy budgets must hold (binding cases sit on the boundary)
    for m in 0..2 {
        if c.energy_gap(m, p1, p2) > CASE_TOL * c.e_max * c.bw.max(1.0) {
            return Err(Error::EnergyInfeasible(m));
        }
    }

    let alpha = c.a1 / (c.b1 + c.bw * (1.0 + c.h[0] * p1 + c.h[1] * p2).log2());

    // task splits from the local-time equalities (1 - beta_m) L_m C_m / f_m
    // = alpha; the offload-sum equality then holds by construction
    let u = scenario.users();
    let beta1 = 1.0 - alpha * u[0].cpu_freq / (u[0].task_bits * u[0].cycles_per_bit);
    let beta2 = 1.0 - alpha * u[1].cpu_freq / (u[1].task_bits * u[1].cycles_per_bit);
    for (idx, b) in [(0usize, beta1), (1usize, beta2)] {
        if !(-CASE_TOL..=1.0 + CASE_TOL).contains(&b) {
            return Err(Error::BetaOutOfRange { user: idx, value: b });
        }
    }
    let beta1 = beta1.clamp(0.0, 1.0);
    let beta2 = beta2.clamp(0.0, 1.0);

    let alloc = Allocation::new(vec![beta1, beta2], vec![p1, p2]);
    let sol = ClosedFormSolution { case, p1, p2, beta1, beta2, alpha };
    let tol = 1e-9 * alpha;

    // equal-time structure: both local times and the shared offload window
    // must line up with alpha
    let window = scenario.common_offload_time(&alloc, 1)?;
    for m in 0..2 {
        let t_loc = scenario.local_time(&alloc, m)?;
        if (t_loc - alpha).abs() > tol {
            return Err(Error::ClosedFormInvalid(format!(
                "local time {t_loc} of user {m} misses the window {alpha}"
            )));
        }
    }
    if (window - alpha).abs() > tol {
        return Err(Error::ClosedFormInvalid(format!(
            "offload window {window} does not close at {alpha}"
        )));
    }
    // the weak user's share must fit its own-channel capacity within the
    // window (the nested offload constraint); outside this region the
    // equal-time collapse is invalid and bisection is the only route
    let t1 = scenario.common_offload_time(&alloc, 0)?;
    if t1 > alpha * (1.0 + 1e-9) {
        return Err(Error::ClosedFormInvalid(format!(
            "user 1 needs {t1} on its own channel, exceeding the window {alpha}"
        )));
    }
    // energy over the shared window
    for m in 0..2 {
        let total = scenario.local_energy(&alloc, m)? + alpha * alloc.power[m];
        if total > scenario.e_max * (1.0 + 1e-6) {
            return Err(Error::EnergyInfeasible(m));
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UserProfile;

    fn user(bits: f64, f: f64, kappa: f64, h2: f64) -> UserProfile {
        UserProfile {
            task_bits: bits,
            cycles_per_bit: 1000.0,
            cpu_freq: f,
            cap_coeff: kappa,
            channel_gain: h2,
        }
    }

    fn fig1_scenario(h: [f64; 2], e_max: f64) -> Scenario {
        // gains in the noise-normalized range a mid-cell user actually sees
        Scenario::new(
            vec![
                user(1.6e6, 1e8, 1e-27, h[0]),
                user(1.6e6, 1e8, 1e-28, h[1]),
            ],
            1e6,
            0.01,
            e_max,
        )
        .unwrap()
    }

    #[test]
    fn transformed_objective_zero_power() {
        let s = fig1_scenario([100.0, 500.0], 0.2);
        let a1 = 3.2e6;
        let b1 = 2e5;
        let got = transformed_objective(&s, 0.0, 0.0).unwrap();
        assert!((got - a1 / b1).abs() <= 1e-12 * (a1 / b1));
    }

    #[test]
    fn transformed_objective_equal_users_doubling() {
        // symmetric users with B log2(...) tuned to b1 halve the zero-power value
        let s = Scenario::new(
            vec![user(1.6e6, 1e8, 1e-27, 1.0), user(1.6e6, 1e8, 1e-27, 1.0)],
            2e5,
            1.0,
            10.0,
        )
        .unwrap();
        // b1 = 2e5; choose powers with log2(1 + p1 + p2) = 1 -> B log2 = 2e5 = b1
        let got = transformed_objective(&s, 0.5, 0.5).unwrap();
        let a1 = 3.2e6;
        let b1 = 2e5;
        assert!((got - a1 / (2.0 * b1)).abs() <= 1e-12 * got);
    }

    #[test]
    fn boundary_satisfies_energy_equality() {
        // small budget so the energy budget actually binds inside the box
        let s = fig1_scenario([4e4, 4e5], 0.002);
        if let PowerBoundary::Binding(r) = p1_boundary(&s, 0.002).unwrap() {
            let c = Consts::new(&s).unwrap();
            let gap = c.energy_gap(0, r, 0.002);
            assert!(gap.abs() <= 1e-6 * s.e_max * s.bandwidth, "gap {gap}");
        } else {
            panic!("expected a binding boundary");
        }
    }

    #[test]
    fn boundary_slack_when_budget_generous() {
        let mut s = fig1_scenario([100.0, 500.0], 1e6);
        s.e_max = 1e6;
        // kappa -> 0 removes the local term entirely
        let users: Vec<UserProfile> = s
            .users()
            .iter()
            .map(|u| UserProfile { cap_coeff: 0.0, ..u.clone() })
            .collect();
        let s = Scenario::new(users, s.bandwidth, s.p_max, s.e_max).unwrap();
        let b = p1_boundary(&s, s.p_max).unwrap();
        assert!(b.cap() > s.p_max);
    }

    #[test]
    fn boundaries_mirror_for_symmetric_users() {
        let s = Scenario::new(
            vec![user(1.6e6, 1e8, 1e-28, 30.0), user(1.6e6, 1e8, 1e-28, 30.0)],
            1e6,
            0.01,
            0.004,
        )
        .unwrap();
        let b1 = p1_boundary(&s, 0.003).unwrap();
        let b2 = p2_boundary(&s, 0.003).unwrap();
        match (b1, b2) {
            (PowerBoundary::Binding(x), PowerBoundary::Binding(y)) => {
                assert!((x - y).abs() <= 1e-9 * x.abs().max(1e-9));
            }
            (a, b) => assert_eq!(a, b),
        }
    }

    #[test]
    fn generous_budget_selects_corner() {
        let s = fig1_scenario([4e4, 4e5], 0.2);
        let sol = solve_two_user(&s).unwrap();
        assert_eq!(sol.case, KktCase::Case1);
        assert_eq!(sol.p1, s.p_max);
        assert_eq!(sol.p2, s.p_max);
        // alpha = (L1+L2) / (f1/C1 + f2/C2 + B log2(1 + h1 p1 + h2 p2))
        let expect = 3.2e6 / (2e5 + 1e6 * (1.0 + 400.0 + 4000.0f64).log2());
        assert!((sol.alpha - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn recovered_betas_reproduce_shared_window_objective() {
        let s = fig1_scenario([4e4, 4e5], 0.2);
        let sol = solve_two_user(&s).unwrap();
        let alloc = sol.allocation();
        let value = s.common_objective(&alloc).unwrap();
        assert!(
            (value - sol.alpha).abs() <= 1e-9 * sol.alpha,
            "transformed {} vs model {value}",
            sol.alpha
        );
    }

    #[test]
    fn equal_time_structure_holds() {
        let s = fig1_scenario([4e4, 4e5], 0.2);
        let sol = solve_two_user(&s).unwrap();
        let alloc = sol.allocation();
        let window = s.common_offload_time(&alloc, 1).unwrap();
        let l1 = s.local_time(&alloc, 0).unwrap();
        let l2 = s.local_time(&alloc, 1).unwrap();
        let tol = 1e-9 * sol.alpha;
        assert!((window - sol.alpha).abs() <= tol);
        assert!((l1 - sol.alpha).abs() <= tol);
        assert!((l2 - sol.alpha).abs() <= tol);
        // the weak user's own-channel window never exceeds the shared one
        let t1 = s.common_offload_time(&alloc, 0).unwrap();
        assert!(t1 <= sol.alpha * (1.0 + 1e-9));
    }

    #[test]
    fn agrees_with_bisection() {
        for e_max in [0.2, 0.05, 0.02] {
            let s = fig1_scenario([4e4, 4e5], e_max);
            let sol = solve_two_user(&s).unwrap();
            let bss =
                crate::bisection::solve_bss(&s, 1e-6, &crate::feasibility::FeasibilityConfig::default())
                    .unwrap();
            assert!(
                (sol.alpha - bss.alpha_star).abs() <= (1e-5f64).max(1e-3 * sol.alpha),
                "e_max {e_max}: closed {} vs bss {} (case {})",
                sol.alpha,
                bss.alpha_star,
                sol.case.id()
            );
        }
    }

    #[test]
    fn rejects_wrong_user_count() {
        let s = Scenario::new(vec![user(1.6e6, 1e8, 1e-27, 1.0)], 1e6, 0.01, 0.2).unwrap();
        assert!(matches!(solve_two_user(&s), Err(Error::TwoUserOnly(1))));
    }
}
