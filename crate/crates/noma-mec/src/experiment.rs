//! Experiment driver behind the CLI: flat key-value configs, solver dispatch
//! by name, and versioned CSV / flat-record output. All output is
//! deterministic: same config + seed gives byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::baselines;
use crate::bisection::{solve_bss, SolveResult};
use crate::error::Error;
use crate::feasibility::FeasibilityConfig;
use crate::model::Scenario;
use crate::oracle;
use crate::scenario::{generate, DistanceModel, GenParams};
use crate::two_user::solve_two_user;

pub const SOLVE_SCHEMA: &str = "solve-v1";
pub const SWEEP_SCHEMA: &str = "sweep-v1";
pub const TRACE_SCHEMA: &str = "trace-v1";

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// A failure carrying the process exit code the CLI should use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliFailure {
    pub exit_code: i32,
    pub message: String,
}

impl CliFailure {
    fn config(message: impl Into<String>) -> Self {
        Self { exit_code: EXIT_CONFIG, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self { exit_code: EXIT_RUNTIME, message: message.into() }
    }
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::TwoUserOnly(_) => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        };
        Self { exit_code: code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliFailure {
    fn from(e: std::io::Error) -> Self {
        Self::runtime(format!("i/o error: {e}"))
    }
}

/// Experiment configuration, read from a flat `key = value` text file.
/// Unknown keys are rejected. List-valued keys take comma-separated numbers
/// and broadcast (the last element repeats) when shorter than `M`.
#[derive(Debug, Clone)]
pub struct Config {
    pub num_users: usize,
    pub seed: u64,
    pub bandwidth_hz: f64,
    pub p_max_w: f64,
    pub e_max_j: f64,
    pub n0_dbm_hz: f64,
    pub radius_m: f64,
    pub min_distance_m: f64,
    pub pathloss: f64,
    pub l_bits: Vec<f64>,
    pub c_cycles_per_bit: Vec<f64>,
    pub f_loc: Vec<f64>,
    pub kappa: Vec<f64>,
    pub epsilon: f64,
    pub distance_model: DistanceModel,
    pub feasibility: FeasibilityConfig,
    pub oracle_resolution: usize,
}

impl Default for Config {
    fn default() -> Self {
        let g = GenParams::default();
        Self {
            num_users: g.num_users,
            seed: 1,
            bandwidth_hz: g.bandwidth_hz,
            p_max_w: g.p_max_w,
            e_max_j: g.e_max_j,
            n0_dbm_hz: g.noise_dbm_per_hz,
            radius_m: g.radius_m,
            min_distance_m: g.min_distance_m,
            pathloss: g.pathloss_exp,
            l_bits: g.task_bits,
            c_cycles_per_bit: g.cycles_per_bit,
            f_loc: g.cpu_freq,
            kappa: g.cap_coeff,
            epsilon: 1e-4,
            distance_model: g.distance_model,
            feasibility: FeasibilityConfig::default(),
            oracle_resolution: 101,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliFailure> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliFailure::config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                CliFailure::config(format!("line {}: {key}: {what}: {value:?}", lineno + 1))
            };
            match key {
                "M" => {
                    cfg.num_users = value.parse().map_err(|_| bad("expected positive integer"))?
                }
                "seed" => cfg.seed = value.parse().map_err(|_| bad("expected integer"))?,
                "B_hz" => cfg.bandwidth_hz = parse_f64(value).ok_or_else(|| bad("expected number"))?,
                "p_max_w" => cfg.p_max_w = parse_f64(value).ok_or_else(|| bad("expected number"))?,
                "e_max_j" => cfg.e_max_j = parse_f64(value).ok_or_else(|| bad("expected number"))?,
                "n0_dbm_hz" => {
                    cfg.n0_dbm_hz = parse_f64(value).ok_or_else(|| bad("expected number"))?
                }
                "radius_m" => cfg.radius_m = parse_f64(value).ok_or_else(|| bad("expected number"))?,
                "min_distance_m" => {
                    cfg.min_distance_m = parse_f64(value).ok_or_else(|| bad("expected number"))?
                }
                "pathloss" => cfg.pathloss = parse_f64(value).ok_or_else(|| bad("expected number"))?,
                "L_bits" => cfg.l_bits = parse_list(value).ok_or_else(|| bad("expected number list"))?,
                "C_cycles_per_bit" => {
                    cfg.c_cycles_per_bit =
                        parse_list(value).ok_or_else(|| bad("expected number list"))?
                }
                "f_loc" => cfg.f_loc = parse_list(value).ok_or_else(|| bad("expected number list"))?,
                "kappa" => cfg.kappa = parse_list(value).ok_or_else(|| bad("expected number list"))?,
                "epsilon" => cfg.epsilon = parse_f64(value).ok_or_else(|| bad("expected number"))?,
                "distance_model" => {
                    cfg.distance_model = match value {
                        "uniform-radius" => DistanceModel::UniformRadius,
                        "uniform-area" => DistanceModel::UniformArea,
                        _ => return Err(bad("expected uniform-radius or uniform-area")),
                    }
                }
                "feasibility_tolerance" => {
                    cfg.feasibility.tolerance =
                        parse_f64(value).ok_or_else(|| bad("expected number"))?
                }
                "feasibility_max_iters" => {
                    cfg.feasibility.max_iters =
                        value.parse().map_err(|_| bad("expected integer"))?
                }
                "feasibility_temperature" => {
                    cfg.feasibility.temperature =
                        parse_f64(value).ok_or_else(|| bad("expected number"))?
                }
                "oracle_resolution" => {
                    cfg.oracle_resolution = value.parse().map_err(|_| bad("expected integer"))?
                }
                _ => return Err(CliFailure::config(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        if cfg.num_users == 0 {
            return Err(CliFailure::config("M must be >= 1".to_string()));
        }
        if !(cfg.epsilon > 0.0) {
            return Err(CliFailure::config("epsilon must be > 0".to_string()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliFailure> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliFailure::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn gen_params(&self) -> GenParams {
        GenParams {
            num_users: self.num_users,
            radius_m: self.radius_m,
            min_distance_m: self.min_distance_m,
            pathloss_exp: self.pathloss,
            bandwidth_hz: self.bandwidth_hz,
            noise_dbm_per_hz: self.n0_dbm_hz,
            p_max_w: self.p_max_w,
            e_max_j: self.e_max_j,
            task_bits: self.l_bits.clone(),
            cycles_per_bit: self.c_cycles_per_bit.clone(),
            cpu_freq: self.f_loc.clone(),
            cap_coeff: self.kappa.clone(),
            distance_model: self.distance_model,
        }
    }

    pub fn make_scenario(&self, seed: u64) -> Result<Scenario, CliFailure> {
        Ok(generate(seed, &self.gen_params())?)
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

fn parse_list(s: &str) -> Option<Vec<f64>> {
    let items: Option<Vec<f64>> = s.split(',').map(|t| parse_f64(t.trim())).collect();
    items.filter(|v| !v.is_empty())
}

pub const SOLVER_NAMES: [&str; 6] = ["bss", "closed2", "oracle", "ofdma", "full", "local"];

/// Run the named solver on a generated scenario.
pub fn run_solver(name: &str, scenario: &Scenario, cfg: &Config) -> Result<SolveResult, CliFailure> {
    match name {
        "bss" => Ok(solve_bss(scenario, cfg.epsilon, &cfg.feasibility)?),
        "closed2" => {
            if scenario.num_users() != 2 {
                return Err(CliFailure::config(format!(
                    "closed2 requires M = 2, got {}",
                    scenario.num_users()
                )));
            }
            Ok(solve_two_user(scenario)?.to_solve_result())
        }
        "oracle" => Ok(oracle::grid_search(scenario, cfg.oracle_resolution)?),
        "ofdma" => Ok(baselines::ofdma_partial(scenario, cfg.epsilon, &cfg.feasibility)?),
        "full" => Ok(baselines::noma_full_offload(scenario, cfg.epsilon, &cfg.feasibility)?),
        "local" => Ok(baselines::local_only(scenario)),
        _ => Err(CliFailure::config(format!(
            "unknown solver {name:?}; expected one of {SOLVER_NAMES:?}"
        ))),
    }
}

/// Sum offload rate and total consumed energy at the result's allocation.
/// OFDMA results are measured on the split-band model they were solved under.
fn metrics(scenario: &Scenario, result: &SolveResult, solver: &str) -> Result<(f64, f64), CliFailure> {
    let m = scenario.num_users();
    let alloc = &result.allocation;
    if solver == "ofdma" {
        let rate = baselines::ofdma_sum_rate(scenario, &alloc.power)?;
        let band = scenario.bandwidth / m as f64;
        let mut energy = 0.0;
        for (i, u) in scenario.users().iter().enumerate() {
            let r = band * (1.0 + m as f64 * u.channel_gain * alloc.power[i]).log2();
            let t_off = if alloc.beta[i] == 0.0 { 0.0 } else { alloc.beta[i] * u.task_bits / r };
            energy += u.cap_coeff * (1.0 - alloc.beta[i]) * u.task_bits * u.cycles_per_bit
                * u.cpu_freq
                * u.cpu_freq
                + t_off * alloc.power[i];
        }
        return Ok((rate, energy));
    }
    let rate = scenario.sum_rate(alloc, m - 1)?;
    let mut energy = 0.0;
    for i in 0..m {
        // transmit for the whole deadline; guard 0 * inf when nothing offloads
        let tx = if alloc.power[i] == 0.0 { 0.0 } else { result.alpha_star * alloc.power[i] };
        energy += scenario.local_energy(alloc, i)? + tx;
    }
    Ok((rate, energy))
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// `solve` command body: generate, solve, write a flat record. On an
/// infeasible scenario a report file is still written and exit code 3 is
/// returned.
pub fn run_solve(
    cfg: &Config,
    solver: &str,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), CliFailure> {
    let seed = seed.unwrap_or(cfg.seed);
    let scenario = cfg.make_scenario(seed)?;
    match run_solver(solver, &scenario, cfg) {
        Ok(result) => {
            let (rate, energy) = metrics(&scenario, &result, solver)?;
            let mut text = String::new();
            let _ = writeln!(text, "format = {SOLVE_SCHEMA}");
            let _ = writeln!(text, "status = ok");
            let _ = writeln!(text, "solver = {solver}");
            let _ = writeln!(text, "seed = {seed}");
            let _ = writeln!(text, "num_users = {}", scenario.num_users());
            let _ = writeln!(text, "alpha_star = {}", result.alpha_star);
            let _ = writeln!(text, "beta = {}", fmt_list(&result.allocation.beta));
            let _ = writeln!(text, "p = {}", fmt_list(&result.allocation.power));
            let _ = writeln!(text, "sum_rate_at_opt = {rate}");
            let _ = writeln!(text, "total_energy = {energy}");
            let _ = writeln!(text, "iterations = {}", result.trace.len());
            for row in &result.trace {
                let _ = writeln!(
                    text,
                    "trace = {},{},{},{},{}",
                    row.iteration, row.lo, row.hi, row.mid, row.feasible
                );
            }
            fs::write(out, text)?;
            Ok(())
        }
        Err(failure) if failure.exit_code == EXIT_RUNTIME => {
            let mut text = String::new();
            let _ = writeln!(text, "format = {SOLVE_SCHEMA}");
            let _ = writeln!(text, "status = infeasible");
            let _ = writeln!(text, "solver = {solver}");
            let _ = writeln!(text, "seed = {seed}");
            let _ = writeln!(text, "message = {}", failure.message);
            fs::write(out, text)?;
            Err(failure)
        }
        Err(failure) => Err(failure),
    }
}

/// `sweep` command body: a CSV row per (value, solver, trial seed). Rows are
/// computed in parallel and written in deterministic order.
pub fn run_sweep(
    cfg: &Config,
    vary: &str,
    values: &[String],
    solvers: &[String],
    trials: usize,
    out: &Path,
) -> Result<(), CliFailure> {
    if values.is_empty() {
        return Err(CliFailure::config("sweep needs a non-empty --values list".to_string()));
    }
    if solvers.is_empty() {
        return Err(CliFailure::config("sweep needs a non-empty --solvers list".to_string()));
    }
    if trials == 0 {
        return Err(CliFailure::config("trials must be >= 1".to_string()));
    }
    if !["p_max", "e_max", "M", "L"].contains(&vary) {
        return Err(CliFailure::config(format!(
            "unknown sweep axis {vary:?}; expected p_max, e_max, M or L"
        )));
    }
    for s in solvers {
        if !SOLVER_NAMES.contains(&s.as_str()) {
            return Err(CliFailure::config(format!("unknown solver {s:?}")));
        }
    }

    // parse and apply each axis value up front so config errors surface
    // before any solving starts
    let mut jobs = Vec::new();
    for raw in values {
        let mut c = cfg.clone();
        match vary {
            "M" => {
                let m: usize = raw
                    .parse()
                    .map_err(|_| CliFailure::config(format!("bad M value {raw:?}")))?;
                if m == 0 {
                    return Err(CliFailure::config("M value must be >= 1".to_string()));
                }
                c.num_users = m;
            }
            "p_max" => {
                c.p_max_w = parse_f64(raw)
                    .ok_or_else(|| CliFailure::config(format!("bad p_max value {raw:?}")))?;
            }
            "e_max" => {
                c.e_max_j = parse_f64(raw)
                    .ok_or_else(|| CliFailure::config(format!("bad e_max value {raw:?}")))?;
            }
            "L" => {
                let l = parse_f64(raw)
                    .ok_or_else(|| CliFailure::config(format!("bad L value {raw:?}")))?;
                c.l_bits = vec![l];
            }
            _ => unreachable!(),
        }
        for solver in solvers {
            for t in 0..trials {
                jobs.push((raw.clone(), c.clone(), solver.clone(), cfg.seed + t as u64));
            }
        }
    }

    let rows: Result<Vec<String>, CliFailure> = jobs
        .par_iter()
        .map(|(label, c, solver, seed)| {
            let scenario = c.make_scenario(*seed)?;
            let result = run_solver(solver, &scenario, c)?;
            let (rate, energy) = metrics(&scenario, &result, solver)?;
            Ok(format!(
                "{label},{solver},{seed},{},{rate},{energy},{}",
                result.alpha_star,
                result.trace.len()
            ))
        })
        .collect();

    let mut text = String::new();
    let _ = writeln!(text, "# schema {SWEEP_SCHEMA}");
    let _ = writeln!(text, "value,solver,seed,alpha_star,sum_rate_at_opt,total_energy,iterations");
    for row in rows? {
        let _ = writeln!(text, "{row}");
    }
    fs::write(out, text)?;
    Ok(())
}

/// `trace` command body: bisection trace CSV for plotting convergence, with
/// the closed-form optimum appended as a reference comment when M = 2.
pub fn run_trace(cfg: &Config, seed: Option<u64>, out: &Path) -> Result<(), CliFailure> {
    let seed = seed.unwrap_or(cfg.seed);
    let scenario = cfg.make_scenario(seed)?;
    let result = solve_bss(&scenario, cfg.epsilon, &cfg.feasibility)?;
    let mut text = String::new();
    let _ = writeln!(text, "# schema {TRACE_SCHEMA}");
    let _ = writeln!(text, "iteration,lo,hi,mid,feasible");
    for row in &result.trace {
        let _ = writeln!(text, "{},{},{},{},{}", row.iteration, row.lo, row.hi, row.mid, row.feasible);
    }
    let _ = writeln!(text, "# bss alpha_star = {}", result.alpha_star);
    if scenario.num_users() == 2 {
        match solve_two_user(&scenario) {
            Ok(sol) => {
                let _ = writeln!(text, "# closed2 alpha_star = {}", sol.alpha);
            }
            Err(e) => {
                let _ = writeln!(text, "# closed2 unavailable: {e}");
            }
        }
    }
    fs::write(out, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_defaults_and_overrides() {
        let cfg = Config::parse("").unwrap();
        assert_eq!(cfg.num_users, 2);
        assert_eq!(cfg.oracle_resolution, 101);

        let text = "\
# two users, tight power
M = 2
seed = 9
p_max_w = 0.005
L_bits = 1.6e6, 2.4e6
distance_model = uniform-area
feasibility_max_iters = 900
";
        let cfg = Config::parse(text).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.p_max_w, 0.005);
        assert_eq!(cfg.l_bits, vec![1.6e6, 2.4e6]);
        assert_eq!(cfg.distance_model, DistanceModel::UniformArea);
        assert_eq!(cfg.feasibility.max_iters, 900);
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["wat = 1", "M 2", "M = zero", "epsilon = -1", "M = 0"] {
            let err = Config::parse(bad).unwrap_err();
            assert_eq!(err.exit_code, EXIT_CONFIG, "{bad}");
        }
    }

    #[test]
    fn closed2_rejects_three_users() {
        let cfg = Config::parse("M = 3").unwrap();
        let scenario = cfg.make_scenario(1).unwrap();
        let err = run_solver("closed2", &scenario, &cfg).unwrap_err();
        assert_eq!(err.exit_code, EXIT_CONFIG);
    }

    #[test]
    fn unknown_solver_is_config_error() {
        let cfg = Config::default();
        let scenario = cfg.make_scenario(1).unwrap();
        let err = run_solver("newton", &scenario, &cfg).unwrap_err();
        assert_eq!(err.exit_code, EXIT_CONFIG);
    }

    #[test]
    fn solve_output_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = Config::parse("M = 2\nseed = 4").unwrap();
        let a = dir.path().join("a.txt");
        let b = dir.path().join("b.txt");
        run_solve(&cfg, "bss", None, &a).unwrap();
        run_solve(&cfg, "bss", None, &b).unwrap();
        let (fa, fb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert!(!fa.is_empty());
        assert_eq!(fa, fb);
    }

    #[test]
    fn sweep_empty_values_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = Config::default();
        let err = run_sweep(&cfg, "p_max", &[], &["bss".into()], 1, &dir.path().join("s.csv"))
            .unwrap_err();
        assert_eq!(err.exit_code, EXIT_CONFIG);
    }

    #[test]
    fn sweep_rows_in_order_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("s.csv");
        let cfg = Config::default();
        run_sweep(
            &cfg,
            "p_max",
            &["0.005".into(), "0.01".into()],
            &["bss".into(), "local".into()],
            2,
            &out,
        )
        .unwrap();
        let text = fs::read_to_string(&out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# schema {SWEEP_SCHEMA}"));
        assert_eq!(lines[1], "value,solver,seed,alpha_star,sum_rate_at_opt,total_energy,iterations");
        assert_eq!(lines.len(), 2 + 2 * 2 * 2);
        assert!(lines[2].starts_with("0.005,bss,1,"));
        assert!(lines[3].starts_with("0.005,bss,2,"));
        assert!(lines[4].starts_with("0.005,local,1,"));
        assert!(lines[6].starts_with("0.01,bss,1,"));
    }

    #[test]
    fn trace_includes_closed_form_reference() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("t.csv");
        let cfg = Config::default();
        run_trace(&cfg, Some(3), &out).unwrap();
        let text = fs::read_to_string(&out).unwrap();
        assert!(text.starts_with(&format!("# schema {TRACE_SCHEMA}\niteration,lo,hi,mid,feasible\n")));
        assert!(text.contains("# bss alpha_star = "));
        assert!(text.contains("closed2"));
    }
}
