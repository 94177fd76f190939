//! Physical model of uplink NOMA task offloading: rates under successive
//! interference cancellation, offload/local times and energies, and the
//! per-user completion time.
//!
//! Channel gains are noise-normalized throughout: [`UserProfile::channel_gain`]
//! stores `|h|^2 / sigma^2`, so the noise term in every SINR denominator is 1.
//! The scenario generator performs the division once at construction.

use crate::error::{Error, Result};

/// One user's task, compute and channel parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct UserProfile {
    /// Task length in bits.
    pub task_bits: f64,
    /// CPU cycles required per bit.
    pub cycles_per_bit: f64,
    /// Local CPU frequency in cycles per second.
    pub cpu_freq: f64,
    /// Effective capacitance coefficient (J*s^2/cycle^3). May be zero.
    pub cap_coeff: f64,
    /// Noise-normalized power gain |h|^2 / sigma^2.
    pub channel_gain: f64,
}

impl UserProfile {
    fn validate(&self) -> Result<()> {
        let pos = [
            ("task_bits", self.task_bits),
            ("cycles_per_bit", self.cycles_per_bit),
            ("cpu_freq", self.cpu_freq),
            ("channel_gain", self.channel_gain),
        ];
        for (name, v) in pos {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.cap_coeff >= 0.0) || !self.cap_coeff.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cap_coeff must be >= 0, got {}",
                self.cap_coeff
            )));
        }
        Ok(())
    }

    /// Time to compute the whole task locally, L*C/f.
    pub fn full_local_time(&self) -> f64 {
        self.task_bits * self.cycles_per_bit / self.cpu_freq
    }
}

/// A sorted set of users plus the shared radio constants.
///
/// Users are ordered ascending by channel gain; the MEC receiver decodes in
/// the reverse order, so user `m` sees only users `0..m` as interference.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    users: Vec<UserProfile>,
    /// System bandwidth in Hz.
    pub bandwidth: f64,
    /// Per-user offload power cap in W.
    pub p_max: f64,
    /// Per-user energy budget in J.
    pub e_max: f64,
}

impl Scenario {
    pub fn new(users: Vec<UserProfile>, bandwidth: f64, p_max: f64, e_max: f64) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::InvalidParameter("at least one user required".into()));
        }
        for u in &users {
            u.validate()?;
        }
        if users.windows(2).any(|w| w[0].channel_gain > w[1].channel_gain) {
            return Err(Error::UnsortedUsers);
        }
        for (name, v) in [("bandwidth", bandwidth), ("e_max", e_max)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(p_max >= 0.0) || !p_max.is_finite() {
            return Err(Error::InvalidParameter(format!("p_max must be >= 0, got {p_max}")));
        }
        Ok(Self { users, bandwidth, p_max, e_max })
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn users(&self) -> &[UserProfile] {
        &self.users
    }

    pub fn user(&self, m: usize) -> Result<&UserProfile> {
        self.users.get(m).ok_or(Error::UserIndex { index: m, count: self.users.len() })
    }

    /// Received SINR of user `m` under SIC.
    ///
    /// With noise-normalized gains: `h2[m] p[m] / (sum_{j<m} h2[j] p[j] + 1)`.
    pub fn sinr(&self, alloc: &Allocation, m: usize) -> Result<f64> {
        let u = self.user(m)?;
        let interference: f64 = self.users[..m]
            .iter()
            .zip(&alloc.power[..m])
            .map(|(u, p)| u.channel_gain * p)
            .sum();
        Ok(u.channel_gain * alloc.power[m] / (interference + 1.0))
    }

    /// Achievable offload rate of user `m` in bits/s.
    pub fn rate(&self, alloc: &Allocation, m: usize) -> Result<f64> {
        Ok(self.bandwidth * (1.0 + self.sinr(alloc, m)?).log2())
    }

    /// Sum of the first `m + 1` user rates, `B log2(1 + sum_{i<=m} h2[i] p[i])`.
    ///
    /// Equals `sum_{i<=m} rate(i)` exactly (the telescoping identity).
    pub fn sum_rate(&self, alloc: &Allocation, m: usize) -> Result<f64> {
        self.user(m)?;
        let total: f64 = self.users[..=m]
            .iter()
            .zip(&alloc.power[..=m])
            .map(|(u, p)| u.channel_gain * p)
            .sum();
        Ok(self.bandwidth * (1.0 + total).log2())
    }

    /// Offload transmission time of user `m` in seconds.
    ///
    /// Zero when nothing is offloaded; +inf when bits are offloaded at zero
    /// rate, so the min-max objective stays well-defined on the whole box.
    pub fn offload_time(&self, alloc: &Allocation, m: usize) -> Result<f64> {
        let u = self.user(m)?;
        let beta = alloc.beta[m];
        if beta == 0.0 {
            return Ok(0.0);
        }
        let r = self.rate(alloc, m)?;
        if r == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(beta * u.task_bits / r)
    }

    /// Offload transmission energy of user `m` in joules.
    pub fn offload_energy(&self, alloc: &Allocation, m: usize) -> Result<f64> {
        let p = alloc.power[m];
        if p == 0.0 {
            return Ok(0.0);
        }
        Ok(self.offload_time(alloc, m)? * p)
    }

    /// Local computation time of user `m` in seconds.
    pub fn local_time(&self, alloc: &Allocation, m: usize) -> Result<f64> {
        let u = self.user(m)?;
        Ok((1.0 - alloc.beta[m]) * u.task_bits * u.cycles_per_bit / u.cpu_freq)
    }

    /// Local computation energy of user `m` in joules.
    pub fn local_energy(&self, alloc: &Allocation, m: usize) -> Result<f64> {
        let u = self.user(m)?;
        Ok(u.cap_coeff
            * (1.0 - alloc.beta[m])
            * u.task_bits
            * u.cycles_per_bit
            * u.cpu_freq
            * u.cpu_freq)
    }

    /// Task completion time of user `m`: max of offload and local time.
    pub fn completion_time(&self, alloc: &Allocation, m: usize) -> Result<f64> {
        Ok(self.offload_time(alloc, m)?.max(self.local_time(alloc, m)?))
    }

    /// Equal-transmit-time reformulation of the offload time:
    /// `sum_{i<=m} beta[i] L[i] / sum_rate(m)`.
    pub fn common_offload_time(&self, alloc: &Allocation, m: usize) -> Result<f64> {
        self.user(m)?;
        let bits: f64 = self.users[..=m]
            .iter()
            .zip(&alloc.beta[..=m])
            .map(|(u, b)| b * u.task_bits)
            .sum();
        if bits == 0.0 {
            return Ok(0.0);
        }
        let r = self.sum_rate(alloc, m)?;
        if r == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(bits / r)
    }

    /// Min-max objective: the worst per-user completion time.
    pub fn objective(&self, alloc: &Allocation) -> Result<f64> {
        let mut worst = 0.0f64;
        for m in 0..self.num_users() {
            worst = worst.max(self.completion_time(alloc, m)?);
        }
        Ok(worst)
    }

    /// Min-max objective under the shared-window reformulation: the worst of
    /// all nested offload windows and local computing times. This is the
    /// quantity the bisection solver minimizes.
    pub fn common_objective(&self, alloc: &Allocation) -> Result<f64> {
        let mut worst = 0.0f64;
        for m in 0..self.num_users() {
            worst = worst
                .max(self.common_offload_time(alloc, m)?)
                .max(self.local_time(alloc, m)?);
        }
        Ok(worst)
    }
}

/// Candidate decision vector: one task-partition ratio and one offload power
/// per user.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub beta: Vec<f64>,
    pub power: Vec<f64>,
}

impl Allocation {
    pub fn new(beta: Vec<f64>, power: Vec<f64>) -> Self {
        Self { beta, power }
    }

    /// All-zero allocation: nothing offloaded, no transmit power.
    pub fn zeros(num_users: usize) -> Self {
        Self { beta: vec![0.0; num_users], power: vec![0.0; num_users] }
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let m = scenario.num_users();
        if self.beta.len() != m || self.power.len() != m {
            return Err(Error::InvalidParameter(format!(
                "allocation sized for {} users, scenario has {m}",
                self.beta.len()
            )));
        }
        for (i, &b) in self.beta.iter().enumerate() {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::InvalidParameter(format!("beta[{i}] = {b} outside [0,1]")));
            }
        }
        for (i, &p) in self.power.iter().enumerate() {
            if !(0.0..=scenario.p_max).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "power[{i}] = {p} outside [0, {}]",
                    scenario.p_max
                )));
            }
        }
        Ok(())
    }
}
