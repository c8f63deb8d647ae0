use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parameters of a single retainer system. All rates are per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetainerParams {
    /// Task arrival rate (tasks/s).
    pub lambda: f64,
    /// Recruitment rate of a single outstanding worker request (workers/s).
    pub mu: f64,
    /// Retainer pool size.
    pub c: u64,
    /// Retainer wage (currency per idle worker per second).
    #[serde(default)]
    pub s: f64,
    /// Loss charged for every task that is not served in realtime.
    #[serde(default)]
    pub c_task: f64,
    /// Fraction of alerted workers that never respond.
    #[serde(default)]
    pub a: f64,
    /// Re-alert timeout as a multiple of `r_mean`.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Mean alert-response time (s).
    #[serde(default = "default_r_mean")]
    pub r_mean: f64,
}

fn default_alpha() -> f64 {
    2.0
}

fn default_r_mean() -> f64 {
    1.36
}

impl RetainerParams {
    pub fn new(lambda: f64, mu: f64, c: u64) -> Self {
        Self {
            lambda,
            mu,
            c,
            s: 0.0,
            c_task: 0.0,
            a: 0.0,
            alpha: default_alpha(),
            r_mean: default_r_mean(),
        }
    }

    pub fn with_costs(mut self, s: f64, c_task: f64) -> Self {
        self.s = s;
        self.c_task = c_task;
        self
    }

    /// Traffic intensity `lambda / mu`.
    pub fn rho(&self) -> f64 {
        self.lambda / self.mu
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::domain(format!("mu must be finite and > 0, got {}", self.mu)));
        }
        if !self.rho().is_finite() {
            return Err(Error::domain("lambda / mu is not finite"));
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::domain(format!("wage s must be >= 0, got {}", self.s)));
        }
        if !(self.c_task >= 0.0 && self.c_task.is_finite()) {
            return Err(Error::domain(format!("c_task must be >= 0, got {}", self.c_task)));
        }
        if !(0.0..=1.0).contains(&self.a) {
            return Err(Error::domain(format!("abandonment a must lie in [0, 1], got {}", self.a)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::domain(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.r_mean > 0.0 && self.r_mean.is_finite()) {
            return Err(Error::domain(format!("r_mean must be > 0, got {}", self.r_mean)));
        }
        Ok(())
    }
}

/// How the miss penalty is combined with the retainer wage in the total-cost objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostVariant {
    /// `c_task * pi(c) + s * idle`: penalty per task plus wage per second, added as-is.
    #[default]
    PerTask,
    /// `lambda * c_task * pi(c) + s * idle`: both terms in currency per second.
    PerUnitTime,
}

/// A wage rate stored in currency per worker per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Wage(pub f64);

impl Wage {
    pub fn per_second(rate: f64) -> Self {
        Wage(rate)
    }

    pub fn per_minute(rate: f64) -> Self {
        Wage(rate / 60.0)
    }

    pub fn per_hour(rate: f64) -> Self {
        Wage(rate / 3600.0)
    }

    pub fn as_per_second(self) -> f64 {
        self.0
    }

    pub fn as_per_minute(self) -> f64 {
        self.0 * 60.0
    }

    pub fn as_per_hour(self) -> f64 {
        self.0 * 3600.0
    }
}
