//! Feasibility oracle for a fixed candidate completion time `alpha`: decides
//! whether the convex constraint set (prefix offload deadlines, local-compute
//! deadlines, energy budgets, box bounds) is nonempty.
//!
//! Two phases: an analytic seed (minimum task splits allowed by the local
//! deadline, maximum powers allowed by the energy budget), then projected
//! gradient descent on a log-sum-exp smoothing of the maximum residual, with
//! Barzilai-Borwein step sizes, Armijo backtracking and temperature
//! continuation. For fixed `alpha` every constraint is convex, so descent
//! reaches the global minimum of the max-residual.

use crate::error::{Error, Result};
use crate::model::{Allocation, Scenario};

/// Tuning knobs for [`check_feasible`].
#[derive(Debug, Clone)]
pub struct FeasibilityConfig {
    /// Normalized residual below which a point counts as feasible.
    pub tolerance: f64,
    /// Total projected-gradient iteration budget.
    pub max_iters: usize,
    /// Initial log-sum-exp smoothing temperature; annealed downward
    /// internally so boundary decisions are not limited by the smoothing gap.
    pub temperature: f64,
}

impl Default for FeasibilityConfig {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_iters: 5000, temperature: 1e-3 }
    }
}

/// Result of one feasibility check.
#[derive(Debug, Clone)]
pub enum FeasibilityOutcome {
    Feasible { witness: Allocation, max_violation: f64, iterations_used: usize },
    Infeasible { max_violation: f64, iterations_used: usize },
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityOutcome::Feasible { .. })
    }

    pub fn witness(&self) -> Option<&Allocation> {
        match self {
            FeasibilityOutcome::Feasible { witness, .. } => Some(witness),
            FeasibilityOutcome::Infeasible { .. } => None,
        }
    }

    pub fn max_violation(&self) -> f64 {
        match self {
            FeasibilityOutcome::Feasible { max_violation, .. }
            | FeasibilityOutcome::Infeasible { max_violation, .. } => *max_violation,
        }
    }

    pub fn iterations_used(&self) -> usize {
        match self {
            FeasibilityOutcome::Feasible { iterations_used, .. }
            | FeasibilityOutcome::Infeasible { iterations_used, .. } => *iterations_used,
        }
    }
}

/// Normalized residual of every constraint at `alloc` for deadline `alpha`;
/// positive means violated.
///
/// Layout, `M = num_users`: prefix-offload residuals `0..M`, local-deadline
/// residuals `M..2M`, energy residuals `2M..3M`, then box residuals
/// (beta lower, beta upper, power lower, power upper), `M` of each. Power box
/// residuals are expressed in units of `p_max`.
pub fn constraint_residuals(
    scenario: &Scenario,
    alpha: f64,
    alloc: &Allocation,
) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    let m = scenario.num_users();
    if alloc.beta.len() != m || alloc.power.len() != m {
        return Err(Error::InvalidParameter("allocation size mismatch".into()));
    }
    let mut out = smooth_residuals(scenario, alpha, &alloc.beta, &alloc.power);
    let p_scale = if scenario.p_max > 0.0 { scenario.p_max } else { 1.0 };
    for &b in &alloc.beta {
        out.push(-b);
    }
    for &b in &alloc.beta {
        out.push(b - 1.0);
    }
    for &p in &alloc.power {
        out.push(-p / p_scale);
    }
    for &p in &alloc.power {
        out.push((p - scenario.p_max) / p_scale);
    }
    Ok(out)
}

/// The 3M smooth (non-box) residuals: prefix offload, local deadline, energy.
fn smooth_residuals(scenario: &Scenario, alpha: f64, beta: &[f64], power: &[f64]) -> Vec<f64> {
    let m = scenario.num_users();
    let users = scenario.users();
    let mut out = Vec::with_capacity(3 * m);
    let mut bits_prefix = 0.0;
    let mut gain_prefix = 0.0;
    for i in 0..m {
        bits_prefix += beta[i] * users[i].task_bits;
        gain_prefix += users[i].channel_gain * power[i];
        let scale: f64 = users[..=i].iter().map(|u| u.task_bits).sum();
        let rate = scenario.bandwidth * (1.0 + gain_prefix).log2();
        out.push((bits_prefix - alpha * rate) / scale);
    }
    for i in 0..m {
        let u = &users[i];
        out.push(((1.0 - beta[i]) * u.task_bits * u.cycles_per_bit / u.cpu_freq - alpha) / alpha);
    }
    for i in 0..m {
        let u = &users[i];
        let e_loc =
            u.cap_coeff * (1.0 - beta[i]) * u.task_bits * u.cycles_per_bit * u.cpu_freq * u.cpu_freq;
        out.push((e_loc + alpha * power[i] - scenario.e_max) / scenario.e_max);
    }
    out
}

/// Decide whether any allocation meets deadline `alpha`.
pub fn check_feasible(
    scenario: &Scenario,
    alpha: f64,
    config: &FeasibilityConfig,
) -> Result<FeasibilityOutcome> {
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    let m = scenario.num_users();
    let users = scenario.users();

    // Phase 1: analytic seed. The local deadline forces
    // beta >= 1 - alpha f / (L C), and the energy budget alone forces
    // beta >= 1 - E_max / (kappa L C f^2); the budget then caps the power at
    // (E_max - E_loc) / alpha. Both bounds hold at every feasible point, so
    // the seed never overshoots a feasible beta from above.
    let mut beta = Vec::with_capacity(m);
    let mut power = Vec::with_capacity(m);
    for u in users {
        let by_time = 1.0 - alpha * u.cpu_freq / (u.task_bits * u.cycles_per_bit);
        let e_local_full = u.cap_coeff * u.task_bits * u.cycles_per_bit * u.cpu_freq * u.cpu_freq;
        let by_energy = 1.0 - scenario.e_max / e_local_full;
        let b = by_time.max(by_energy).clamp(0.0, 1.0);
        let e_loc = u.cap_coeff * (1.0 - b) * u.task_bits * u.cycles_per_bit * u.cpu_freq * u.cpu_freq;
        let p = ((scenario.e_max - e_loc) / alpha).max(0.0).min(scenario.p_max);
        beta.push(b);
        power.push(p);
    }
    let seed_max = max_of(&smooth_residuals(scenario, alpha, &beta, &power));
    if seed_max <= config.tolerance {
        return Ok(FeasibilityOutcome::Feasible {
            witness: Allocation::new(beta, power),
            max_violation: seed_max,
            iterations_used: 0,
        });
    }

    // Phase 2: projected gradient on the smoothed max residual.
    let mut solver = MaxResidualDescent::new(scenario, alpha, beta, power);
    let (mut best_alloc, mut best_max, mut iters) = solver.run(config);
    if best_max > config.tolerance {
        // Retry from the full-offload corner: all local energy freed for
        // transmission. The analytic seed can start pinned at zero power when
        // the budget is spent on local computing, and descent stalls there.
        let beta2 = vec![1.0; m];
        let power2 = vec![(scenario.e_max / alpha).min(scenario.p_max); m];
        let mut retry = MaxResidualDescent::new(scenario, alpha, beta2, power2);
        let (alloc2, max2, iters2) = retry.run(config);
        iters += iters2;
        if max2 < best_max {
            best_alloc = alloc2;
            best_max = max2;
        }
    }
    if best_max <= config.tolerance {
        Ok(FeasibilityOutcome::Feasible {
            witness: best_alloc,
            max_violation: best_max,
            iterations_used: iters,
        })
    } else {
        Ok(FeasibilityOutcome::Infeasible { max_violation: best_max, iterations_used: iters })
    }
}

/// Projected spectral gradient descent on the log-sum-exp smoothed maximum of
/// the convex constraint residuals, over the unit box in scaled variables
/// (beta, power / p_max).
struct MaxResidualDescent<'a> {
    scenario: &'a Scenario,
    alpha: f64,
    x: Vec<f64>,
    power_frozen: bool,
}

const TEMP_FLOOR: f64 = 1e-7;
const ARMIJO_SLOPE: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const STALL_LIMIT: usize = 25;

impl<'a> MaxResidualDescent<'a> {
    fn new(scenario: &'a Scenario, alpha: f64, beta: Vec<f64>, power: Vec<f64>) -> Self {
        let m = scenario.num_users();
        let power_frozen = scenario.p_max == 0.0;
        let mut x = Vec::with_capacity(2 * m);
        x.extend_from_slice(&beta);
        if power_frozen {
            x.extend(std::iter::repeat(0.0).take(m));
        } else {
            x.extend(power.iter().map(|p| p / scenario.p_max));
        }
        Self { scenario, alpha, x, power_frozen }
    }

    fn unpack(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.scenario.num_users();
        let beta = x[..m].to_vec();
        let power: Vec<f64> = if self.power_frozen {
            vec![0.0; m]
        } else {
            x[m..].iter().map(|q| q * self.scenario.p_max).collect()
        };
        (beta, power)
    }

    /// Smoothed objective, true max residual, and gradient in scaled variables.
    fn eval(&self, x: &[f64], tau: f64) -> (f64, f64, Vec<f64>) {
        let m = self.scenario.num_users();
        let users = self.scenario.users();
        let (beta, power) = self.unpack(x);
        let g = smooth_residuals(self.scenario, self.alpha, &beta, &power);
        let g_max = max_of(&g);
        let mut weights = Vec::with_capacity(g.len());
        let mut z = 0.0;
        for &gi in &g {
            let w = ((gi - g_max) / tau).exp();
            weights.push(w);
            z += w;
        }
        let f = g_max + tau * z.ln();
        for w in &mut weights {
            *w /= z;
        }

        let mut grad = vec![0.0; 2 * m];
        let ln2 = std::f64::consts::LN_2;
        let mut gain_prefix = 0.0;
        // prefix offload constraints
        for i in 0..m {
            gain_prefix += users[i].channel_gain * power[i];
            let scale: f64 = users[..=i].iter().map(|u| u.task_bits).sum();
            let w = weights[i];
            if w == 0.0 {
                continue;
            }
            let rate_factor = self.alpha * self.scenario.bandwidth / ((1.0 + gain_prefix) * ln2);
            for j in 0..=i {
                grad[j] += w * users[j].task_bits / scale;
                grad[m + j] -= w * rate_factor * users[j].channel_gain / scale;
            }
        }
        // local deadlines
        for i in 0..m {
            let w = weights[m + i];
            if w == 0.0 {
                continue;
            }
            let u = &users[i];
            grad[i] -= w * u.task_bits * u.cycles_per_bit / (u.cpu_freq * self.alpha);
        }
        // energy budgets
        for i in 0..m {
            let w = weights[2 * m + i];
            if w == 0.0 {
                continue;
            }
            let u = &users[i];
            let de_dbeta =
                u.cap_coeff * u.task_bits * u.cycles_per_bit * u.cpu_freq * u.cpu_freq;
            grad[i] -= w * de_dbeta / self.scenario.e_max;
            grad[m + i] += w * self.alpha / self.scenario.e_max;
        }
        if !self.power_frozen {
            for gi in &mut grad[m..] {
                *gi *= self.scenario.p_max;
            }
        } else {
            for gi in &mut grad[m..] {
                *gi = 0.0;
            }
        }
        (f, g_max, grad)
    }

    fn project(&self, x: &mut [f64]) {
        for xi in x.iter_mut() {
            *xi = xi.clamp(0.0, 1.0);
        }
        if self.power_frozen {
            let m = self.scenario.num_users();
            for xi in &mut x[m..] {
                *xi = 0.0;
            }
        }
    }

    fn run(&mut self, config: &FeasibilityConfig) -> (Allocation, f64, usize) {
        let mut iters = 0usize;
        let mut best_x = self.x.clone();
        let mut best_max = f64::INFINITY;

        let mut tau = config.temperature.max(TEMP_FLOOR);
        'stages: loop {
            let (mut f, mut g_max, mut grad) = self.eval(&self.x, tau);
            if g_max < best_max {
                best_max = g_max;
                best_x.copy_from_slice(&self.x);
            }
            let norm = dot(&grad, &grad).sqrt();
            let mut step = if norm > 0.0 { 1.0 / norm } else { 1.0 };
            let mut stall = 0usize;

            while iters < config.max_iters {
                iters += 1;
                let mut trial = self.x.clone();
                for (t, g) in trial.iter_mut().zip(&grad) {
                    *t -= step * g;
                }
                self.project(&mut trial);
                let d: Vec<f64> =
                    trial.iter().zip(&self.x).map(|(t, x)| t - x).collect();
                let slope = dot(&grad, &d);
                if slope >= -1e-18 {
                    break; // stationary for this temperature
                }
                // Armijo backtracking along the projection arc
                let mut accepted = None;
                let mut t_step = 1.0;
                for _ in 0..40 {
                    let cand: Vec<f64> = self
                        .x
                        .iter()
                        .zip(&d)
                        .map(|(x, di)| x + t_step * di)
                        .collect();
                    let (fc, gc_max, gc) = self.eval(&cand, tau);
                    if fc <= f + ARMIJO_SLOPE * t_step * slope {
                        accepted = Some((cand, fc, gc_max, gc));
                        break;
                    }
                    t_step *= BACKTRACK;
                }
                let Some((cand, fc, gc_max, gc)) = accepted else {
                    break;
                };
                // Barzilai-Borwein step for the next iteration
                let s: Vec<f64> = cand.iter().zip(&self.x).map(|(c, x)| c - x).collect();
                let y: Vec<f64> = gc.iter().zip(&grad).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 0.0 {
                    step = (dot(&s, &s) / sy).clamp(1e-14, 1e12);
                }
                let improved = f - fc > 1e-16 * f.abs().max(1.0);
                self.x = cand;
                f = fc;
                g_max = gc_max;
                grad = gc;
                if g_max < best_max {
                    best_max = g_max;
                    best_x.copy_from_slice(&self.x);
                }
                if best_max <= config.tolerance {
                    break 'stages;
                }
                if improved {
                    stall = 0;
                } else {
                    stall += 1;
                    if stall >= STALL_LIMIT {
                        break;
                    }
                }
            }

            if iters >= config.max_iters || tau <= TEMP_FLOOR {
                break;
            }
            tau = (tau * 0.1).max(TEMP_FLOOR);
        }

        let (beta, power) = self.unpack(&best_x);
        (Allocation::new(beta, power), best_max, iters)
    }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UserProfile;

    fn scenario() -> Scenario {
        let mk = |h2: f64, kappa: f64| UserProfile {
            task_bits: 1.6e6,
            cycles_per_bit: 1000.0,
            cpu_freq: 1e8,
            cap_coeff: kappa,
            channel_gain: h2,
        };
        Scenario::new(vec![mk(50.0, 1e-27), mk(400.0, 1e-28)], 1e6, 0.01, 0.2).unwrap()
    }

    fn local_bound(s: &Scenario) -> f64 {
        s.users().iter().map(|u| u.full_local_time()).fold(0.0, f64::max)
    }

    #[test]
    fn all_local_meets_generous_deadline() {
        let s = scenario();
        let alpha = local_bound(&s);
        let r = constraint_residuals(&s, alpha, &Allocation::zeros(2)).unwrap();
        assert!(r.iter().all(|&g| g <= 1e-12), "{r:?}");
    }

    #[test]
    fn all_local_misses_tight_deadline() {
        let s = scenario();
        let alpha = 0.5 * s.users().iter().map(|u| u.full_local_time()).fold(f64::INFINITY, f64::min);
        let r = constraint_residuals(&s, alpha, &Allocation::zeros(2)).unwrap();
        let m = s.num_users();
        for i in 0..m {
            assert!(r[m + i] > 0.0, "local residual {i} should be violated");
        }
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        let s = scenario();
        assert!(matches!(
            constraint_residuals(&s, 0.0, &Allocation::zeros(2)),
            Err(Error::NonPositiveAlpha(_))
        ));
        assert!(matches!(
            check_feasible(&s, -1.0, &FeasibilityConfig::default()),
            Err(Error::NonPositiveAlpha(_))
        ));
    }

    #[test]
    fn upper_bound_always_feasible() {
        let s = scenario();
        let out = check_feasible(&s, local_bound(&s), &FeasibilityConfig::default()).unwrap();
        assert!(out.is_feasible());
    }

    #[test]
    fn near_zero_deadline_infeasible() {
        let s = scenario();
        let out = check_feasible(&s, 1e-12, &FeasibilityConfig::default()).unwrap();
        assert!(!out.is_feasible());
        assert!(out.max_violation() > 0.0);
    }

    #[test]
    fn witness_passes_reevaluation() {
        let s = scenario();
        let cfg = FeasibilityConfig::default();
        let alpha = 0.9 * local_bound(&s);
        let out = check_feasible(&s, alpha, &cfg).unwrap();
        let w = out.witness().expect("should be feasible with offloading available");
        let r = constraint_residuals(&s, alpha, w).unwrap();
        assert!(max_of(&r) <= cfg.tolerance, "residuals {r:?}");
    }

    #[test]
    fn feasibility_monotone_in_alpha() {
        let s = scenario();
        let cfg = FeasibilityConfig::default();
        let hi = local_bound(&s);
        let mut seen_feasible = false;
        for k in 0..10 {
            let alpha = hi * (k as f64 + 1.0) / 10.0;
            let feasible = check_feasible(&s, alpha, &cfg).unwrap().is_feasible();
            if seen_feasible {
                assert!(feasible, "feasibility lost at larger alpha {alpha}");
            }
            seen_feasible |= feasible;
        }
        assert!(seen_feasible);
    }
}
