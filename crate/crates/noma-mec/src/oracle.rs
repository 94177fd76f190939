//! Brute-force ground truth: exhaustive grid search over the decision box.
//!
//! Every grid point is scored directly from the model formulas — the worst
//! of the nested offload windows and local computing times, with transmit
//! energy charged over that deadline — with no descent, smoothing or
//! bisection involved. Agreement with the bisection solver therefore
//! validates the solver machinery end to end.

use rayon::prelude::*;

use crate::bisection::{SolveResult, SolverTag};
use crate::error::{Error, Result};
use crate::model::{Allocation, Scenario};

pub const MAX_USERS: usize = 3;
pub const MIN_RESOLUTION: usize = 11;

/// Exhaustive search over `resolution` points per axis in (beta, power):
/// `resolution^(2M)` evaluations. Ties resolve to the lexicographically
/// smallest (power combo, beta combo) grid index.
pub fn grid_search(scenario: &Scenario, resolution: usize) -> Result<SolveResult> {
    let m = scenario.num_users();
    if m > MAX_USERS {
        return Err(Error::InvalidParameter(format!(
            "grid search supports at most {MAX_USERS} users, got {m}"
        )));
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "resolution must be >= {MIN_RESOLUTION}, got {resolution}"
        )));
    }

    let tables = Tables::new(scenario, resolution);
    let combos = resolution.pow(m as u32);
    let best = (0..combos)
        .into_par_iter()
        .filter_map(|pc| {
            tables.best_beta_for_powers(pc).map(|(value, bc)| (value, pc, bc))
        })
        .reduce_with(|x, y| {
            // deterministic: strictly better value wins, ties to lower index
            if (y.0, y.1, y.2) < (x.0, x.1, x.2) {
                y
            } else {
                x
            }
        });

    let Some((alpha, power_combo, beta_combo)) = best else {
        return Err(Error::InfeasibleScenario);
    };
    Ok(SolveResult {
        alpha_star: alpha,
        allocation: Allocation::new(
            tables.decode(beta_combo).iter().map(|&k| tables.beta_step * k as f64).collect(),
            tables.powers(power_combo),
        ),
        trace: Vec::new(),
        solver: SolverTag::Oracle,
    })
}

/// Precomputed per-axis values shared by every grid point.
struct Tables {
    num_users: usize,
    resolution: usize,
    beta_step: f64,
    power_step: f64,
    bandwidth: f64,
    gains: Vec<f64>,
    task_bits: Vec<f64>,
    /// local_time[m * resolution + k] for beta index k
    local_time: Vec<f64>,
    local_energy: Vec<f64>,
    e_cap: f64,
}

impl Tables {
    fn new(scenario: &Scenario, resolution: usize) -> Self {
        let m = scenario.num_users();
        let beta_step = 1.0 / (resolution - 1) as f64;
        let mut local_time = Vec::with_capacity(m * resolution);
        let mut local_energy = Vec::with_capacity(m * resolution);
        for u in scenario.users() {
            let t_full = u.task_bits * u.cycles_per_bit / u.cpu_freq;
            let e_full = u.cap_coeff * u.task_bits * u.cycles_per_bit * u.cpu_freq * u.cpu_freq;
            for k in 0..resolution {
                let remain = 1.0 - beta_step * k as f64;
                local_time.push(remain * t_full);
                local_energy.push(remain * e_full);
            }
        }
        Self {
            num_users: m,
            resolution,
            beta_step,
            power_step: scenario.p_max / (resolution - 1) as f64,
            bandwidth: scenario.bandwidth,
            gains: scenario.users().iter().map(|u| u.channel_gain).collect(),
            task_bits: scenario.users().iter().map(|u| u.task_bits).collect(),
            local_time,
            local_energy,
            // small relative slack so exact boundary points survive rounding
            e_cap: scenario.e_max * (1.0 + 1e-12),
        }
    }

    fn decode(&self, mut combo: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.num_users];
        for d in digits.iter_mut().rev() {
            *d = combo % self.resolution;
            combo /= self.resolution;
        }
        digits
    }

    fn powers(&self, power_combo: usize) -> Vec<f64> {
        self.decode(power_combo).iter().map(|&k| self.power_step * k as f64).collect()
    }

    /// Best beta combo at this power combo: minimal deadline and its index,
    /// or `None` when every beta choice is infeasible.
    fn best_beta_for_powers(&self, power_combo: usize) -> Option<(f64, usize)> {
        let m = self.num_users;
        let res = self.resolution;
        let power = self.powers(power_combo);
        // nested offload window denominators B log2(1 + sum_{i<=j} h_i p_i)
        let mut window_rate = Vec::with_capacity(m);
        let mut acc = 0.0;
        for j in 0..m {
            acc += self.gains[j] * power[j];
            window_rate.push(self.bandwidth * (1.0 + acc).log2());
        }

        let mut best: Option<(f64, usize)> = None;
        let combos = res.pow(m as u32);
        let mut digits = vec![0usize; m];
        for bc in 0..combos {
            // incrementally advance the mixed-radix beta index
            if bc > 0 {
                let mut j = m - 1;
                loop {
                    digits[j] += 1;
                    if digits[j] < res {
                        break;
                    }
                    digits[j] = 0;
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                }
            }

            let mut deadline = 0.0f64;
            let mut bits = 0.0;
            let mut feasible = true;
            for j in 0..m {
                let k = digits[j];
                bits += self.beta_step * k as f64 * self.task_bits[j];
                let t_off = if bits == 0.0 {
                    0.0
                } else if window_rate[j] == 0.0 {
                    feasible = false;
                    break;
                } else {
                    bits / window_rate[j]
                };
                deadline = deadline.max(t_off).max(self.local_time[j * res + k]);
            }
            if !feasible {
                continue;
            }
            for j in 0..m {
                if self.local_energy[j * res + digits[j]] + deadline * power[j] > self.e_cap {
                    feasible = false;
                    break;
                }
            }
            if feasible && best.map_or(true, |(b, _)| deadline < b) {
                best = Some((deadline, bc));
            }
        }
        best
    }
}
