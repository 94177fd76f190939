//! Deterministic random scenario construction: Rayleigh fading over a
//! distance-dependent path loss, noise-normalized at generation time.
//!
//! PRNG contract: `ChaCha8Rng::seed_from_u64(seed)`, drawing per user in
//! order (distance, then the two Gaussian fading components). The same seed
//! yields the same scenario on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Scenario, UserProfile};

/// How user distances are drawn within the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceModel {
    /// Distance uniform on [min_distance, radius].
    UniformRadius,
    /// Position uniform on the annulus area (distance density ~ d).
    UniformArea,
}

/// Generator parameters. Per-user lists are broadcast: a shorter list repeats
/// its last element.
#[derive(Debug, Clone)]
pub struct GenParams {
    pub num_users: usize,
    pub radius_m: f64,
    pub min_distance_m: f64,
    pub pathloss_exp: f64,
    pub bandwidth_hz: f64,
    pub noise_dbm_per_hz: f64,
    pub p_max_w: f64,
    pub e_max_j: f64,
    pub task_bits: Vec<f64>,
    pub cycles_per_bit: Vec<f64>,
    pub cpu_freq: Vec<f64>,
    pub cap_coeff: Vec<f64>,
    pub distance_model: DistanceModel,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            num_users: 2,
            radius_m: 500.0,
            min_distance_m: 1.0,
            pathloss_exp: 3.76,
            bandwidth_hz: 1e6,
            noise_dbm_per_hz: -174.0,
            p_max_w: 0.01,
            e_max_j: 0.2,
            task_bits: vec![1.6e6],
            cycles_per_bit: vec![1e3],
            cpu_freq: vec![1e8],
            cap_coeff: vec![1e-27, 1e-28],
            distance_model: DistanceModel::UniformRadius,
        }
    }
}

impl GenParams {
    fn validate(&self) -> Result<()> {
        if self.num_users == 0 {
            return Err(Error::InvalidParameter("num_users must be >= 1".into()));
        }
        let pos = [
            ("radius_m", self.radius_m),
            ("min_distance_m", self.min_distance_m),
            ("pathloss_exp", self.pathloss_exp),
            ("bandwidth_hz", self.bandwidth_hz),
            ("e_max_j", self.e_max_j),
        ];
        for (name, v) in pos {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.min_distance_m > self.radius_m {
            return Err(Error::InvalidParameter("min_distance_m exceeds radius_m".into()));
        }
        if !(self.p_max_w >= 0.0) {
            return Err(Error::InvalidParameter("p_max_w must be >= 0".into()));
        }
        for (name, list) in [
            ("task_bits", &self.task_bits),
            ("cycles_per_bit", &self.cycles_per_bit),
            ("cpu_freq", &self.cpu_freq),
            ("cap_coeff", &self.cap_coeff),
        ] {
            if list.is_empty() {
                return Err(Error::InvalidParameter(format!("{name} list is empty")));
            }
        }
        Ok(())
    }

    fn broadcast(list: &[f64], i: usize) -> f64 {
        list[i.min(list.len() - 1)]
    }
}

/// Thermal noise power in watts for the given bandwidth and spectral density.
pub fn noise_power_w(bandwidth_hz: f64, n0_dbm_per_hz: f64) -> f64 {
    10f64.powf((n0_dbm_per_hz - 30.0) / 10.0) * bandwidth_hz
}

/// Deterministic scenario draw: `h = g (1 + d^a)^{-1/2}` with Rayleigh `g`,
/// gains noise-normalized and users sorted ascending.
pub fn generate(seed: u64, params: &GenParams) -> Result<Scenario> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma2 = noise_power_w(params.bandwidth_hz, params.noise_dbm_per_hz);
    let mut users = Vec::with_capacity(params.num_users);
    for i in 0..params.num_users {
        let u: f64 = rng.gen();
        let d = match params.distance_model {
            DistanceModel::UniformRadius => {
                params.min_distance_m + (params.radius_m - params.min_distance_m) * u
            }
            DistanceModel::UniformArea => {
                let d2min = params.min_distance_m * params.min_distance_m;
                let d2max = params.radius_m * params.radius_m;
                (d2min + (d2max - d2min) * u).sqrt()
            }
        };
        // complex circular Gaussian with unit variance: two N(0, 1/2) parts
        let (g_re, g_im) = gaussian_pair(&mut rng);
        let g2 = 0.5 * (g_re * g_re + g_im * g_im);
        let h2 = g2 / (1.0 + d.powf(params.pathloss_exp)) / sigma2;
        users.push(UserProfile {
            task_bits: GenParams::broadcast(&params.task_bits, i),
            cycles_per_bit: GenParams::broadcast(&params.cycles_per_bit, i),
            cpu_freq: GenParams::broadcast(&params.cpu_freq, i),
            cap_coeff: GenParams::broadcast(&params.cap_coeff, i),
            channel_gain: h2,
        });
    }
    users.sort_by(|a, b| a.channel_gain.total_cmp(&b.channel_gain));
    Scenario::new(users, params.bandwidth_hz, params.p_max_w, params.e_max_j)
}

/// Box-Muller pair of standard normals.
fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = loop {
        let v: f64 = rng.gen();
        if v > 0.0 {
            break v;
        }
    };
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}
