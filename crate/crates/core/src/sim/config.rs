use serde::{Deserialize, Serialize};

use crate::{Error, Result, RetainerParams};

const CONFIG_VERSION: u32 = 1;

/// Length of a run: simulated seconds, or a number of task arrivals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Seconds(f64),
    Tasks(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Baseline,
    Abandonment,
    Tiered,
    Precruitment,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::Abandonment => "abandonment",
            Mode::Tiered => "tiered",
            Mode::Precruitment => "precruitment",
        }
    }
}

/// Worker alert-response time, in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LatencyDist {
    PointMass { value: f64 },
    Exponential { mean: f64 },
    Empirical { samples: Vec<f64> },
}

impl LatencyDist {
    pub fn mean(&self) -> f64 {
        match self {
            LatencyDist::PointMass { value } => *value,
            LatencyDist::Exponential { mean } => *mean,
            LatencyDist::Empirical { samples } => samples.iter().sum::<f64>() / samples.len() as f64,
        }
    }

    /// Smallest `x` with `P(L <= x) >= q`, for `q` in `[0, 1]`.
    pub fn quantile(&self, q: f64) -> f64 {
        match self {
            LatencyDist::PointMass { value } => *value,
            LatencyDist::Exponential { mean } => {
                if q >= 1.0 {
                    f64::INFINITY
                } else {
                    -mean * (-q).ln_1p()
                }
            }
            LatencyDist::Empirical { samples } => {
                let mut sorted = samples.clone();
                sorted.sort_by(f64::total_cmp);
                let rank = (q * sorted.len() as f64).ceil() as usize;
                sorted[rank.clamp(1, sorted.len()) - 1]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            LatencyDist::PointMass { value } => *value >= 0.0 && value.is_finite(),
            LatencyDist::Exponential { mean } => *mean > 0.0 && mean.is_finite(),
            LatencyDist::Empirical { samples } => {
                !samples.is_empty() && samples.iter().all(|s| *s >= 0.0 && s.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid response latency {self:?}")))
        }
    }
}

/// Distribution of the time to fill one outstanding recruitment request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecruitmentDist {
    /// `Exp(mu)`
    #[default]
    Exponential,
    /// Always exactly `1 / mu`.
    Deterministic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub params: RetainerParams,
    pub horizon: Horizon,
    #[serde(default)]
    pub seed: u64,
    /// Leading fraction of the horizon excluded from statistics.
    #[serde(default = "default_warmup")]
    pub warmup: f64,
    #[serde(default)]
    pub mode: Mode,
    /// Pool size per tier, tier 1 first (tiered mode only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiers: Option<Vec<u64>>,
    /// Fraction of alerted workers that respond within the re-alert timeout.
    /// When set, `alpha` is recalibrated from the latency distribution to hit it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier_response_fraction: Option<f64>,
    /// Precruitment slack, in standard deviations of the arrival count.
    #[serde(default)]
    pub beta: f64,
    /// Defaults to exponential with mean `params.r_mean`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_latency: Option<LatencyDist>,
    #[serde(default)]
    pub recruitment: RecruitmentDist,
    /// Seconds a precruited worker holds before being paid off and dismissed.
    #[serde(default = "default_patience")]
    pub patience: f64,
    /// Re-alerts issued for one task before it is counted as missed.
    #[serde(default = "default_max_realerts")]
    pub max_realerts: u32,
    /// Batches used for batch-means standard errors.
    #[serde(default = "default_batches")]
    pub batches: u32,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}
fn default_warmup() -> f64 {
    0.1
}
fn default_patience() -> f64 {
    10.0
}
fn default_max_realerts() -> u32 {
    10
}
fn default_batches() -> u32 {
    32
}

pub const MIN_BATCHES: u32 = 20;

impl SimConfig {
    pub fn new(params: RetainerParams, horizon: Horizon, seed: u64) -> Self {
        Self {
            version: CONFIG_VERSION,
            params,
            horizon,
            seed,
            warmup: default_warmup(),
            mode: Mode::Baseline,
            tiers: None,
            tier_response_fraction: None,
            beta: 0.0,
            response_latency: None,
            recruitment: RecruitmentDist::Exponential,
            patience: default_patience(),
            max_realerts: default_max_realerts(),
            batches: default_batches(),
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn latency(&self) -> LatencyDist {
        self.response_latency.clone().unwrap_or(LatencyDist::Exponential {
            mean: self.params.r_mean,
        })
    }

    /// Re-alert timeout `alpha R` in seconds, after applying
    /// `tier_response_fraction` if set.
    pub fn realert_timeout(&self) -> f64 {
        match self.tier_response_fraction {
            Some(f) => {
                let respond = 1.0 - self.params.a;
                self.latency().quantile((f / respond).min(1.0))
            }
            None => self.params.alpha * self.params.r_mean,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::config(format!("unsupported sim config version {}", self.version)));
        }
        self.params.validate()?;
        match self.horizon {
            Horizon::Seconds(t) if !(t > 0.0 && t.is_finite()) => {
                return Err(Error::config(format!("horizon must be > 0 seconds, got {t}")));
            }
            Horizon::Tasks(0) => return Err(Error::config("task horizon must be >= 1")),
            Horizon::Tasks(_) if self.params.lambda == 0.0 => {
                return Err(Error::config("task-count horizon needs lambda > 0"));
            }
            _ => {}
        }
        if !(0.0..1.0).contains(&self.warmup) {
            return Err(Error::config(format!("warmup must lie in [0, 1), got {}", self.warmup)));
        }
        if self.batches < MIN_BATCHES {
            return Err(Error::config(format!("need at least {MIN_BATCHES} batches")));
        }
        if let Horizon::Tasks(n) = self.horizon {
            let measured = n - (self.warmup * n as f64).floor() as u64;
            if measured < self.batches as u64 {
                return Err(Error::config("fewer measured tasks than batches"));
            }
        }
        let has_tiers = self.tiers.as_ref().is_some_and(|t| !t.is_empty());
        if (self.mode == Mode::Tiered) != has_tiers {
            return Err(Error::config("tiers must be non-empty exactly when mode is tiered"));
        }
        if let Some(lat) = &self.response_latency {
            lat.validate()?;
            if (lat.mean() - self.params.r_mean).abs() > 1e-9 {
                return Err(Error::config(format!(
                    "response latency mean {} disagrees with r_mean {}",
                    lat.mean(),
                    self.params.r_mean
                )));
            }
        }
        if let Some(f) = self.tier_response_fraction {
            if !(f > 0.0 && f <= 1.0 - self.params.a) {
                return Err(Error::config(format!(
                    "tier_response_fraction must lie in (0, 1 - a], got {f}"
                )));
            }
        }
        match self.mode {
            Mode::Abandonment | Mode::Tiered => {
                if self.params.a >= 1.0 {
                    return Err(Error::config("a = 1 means no alerted worker ever responds"));
                }
                if self.mode == Mode::Abandonment && self.max_realerts < 1 {
                    return Err(Error::config("max_realerts must be >= 1"));
                }
            }
            Mode::Precruitment => {
                if !(self.beta >= 0.0 && self.beta.is_finite()) {
                    return Err(Error::config(format!("beta must be >= 0, got {}", self.beta)));
                }
                if !(self.patience > 0.0 && self.patience.is_finite()) {
                    return Err(Error::config(format!("patience must be > 0, got {}", self.patience)));
                }
            }
            Mode::Baseline => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SimConfig {
        SimConfig::new(RetainerParams::new(1.0, 0.5, 4), Horizon::Tasks(1000), 7)
    }

    #[test]
    fn defaults_validate() {
        base().validate().unwrap();
    }

    #[test]
    fn rejects_inconsistent_configs() {
        let mut c = base();
        c.warmup = 1.0;
        assert!(c.validate().is_err());

        let mut c = base();
        c.params.lambda = 0.0;
        assert!(c.validate().is_err());
        c.horizon = Horizon::Seconds(100.0);
        assert!(c.validate().is_ok());

        let c = base().with_mode(Mode::Tiered);
        assert!(c.validate().is_err());
        let mut c = base();
        c.tiers = Some(vec![3]);
        assert!(c.validate().is_err());

        let mut c = base().with_mode(Mode::Abandonment);
        c.params.a = 1.0;
        assert!(c.validate().is_err());

        let mut c = base().with_mode(Mode::Precruitment);
        c.patience = 0.0;
        assert!(c.validate().is_err());

        let mut c = base();
        c.response_latency = Some(LatencyDist::PointMass { value: 0.5 });
        assert!(c.validate().is_err());
        c.params.r_mean = 0.5;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn timeout_calibration() {
        let mut c = base().with_mode(Mode::Tiered);
        c.params.r_mean = 2.0;
        c.tier_response_fraction = Some(0.5);
        // exponential median
        assert!((c.realert_timeout() - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        c.tier_response_fraction = Some(1.0);
        assert!(c.realert_timeout().is_infinite());
        c.tier_response_fraction = None;
        c.params.alpha = 3.0;
        assert_eq!(c.realert_timeout(), 6.0);
    }

    #[test]
    fn empirical_quantiles() {
        let d = LatencyDist::Empirical {
            samples: vec![3.0, 1.0, 2.0, 4.0],
        };
        assert_eq!(d.mean(), 2.5);
        assert_eq!(d.quantile(0.5), 2.0);
        assert_eq!(d.quantile(1.0), 4.0);
        assert_eq!(d.quantile(0.0), 1.0);
    }

    #[test]
    fn parses_json_document() {
        let doc = r#"{
            "params": {"lambda": 1.0, "mu": 0.5, "c": 4},
            "horizon": {"tasks": 5000},
            "seed": 11,
            "mode": "abandonment",
            "response_latency": {"kind": "point_mass", "value": 1.36}
        }"#;
        let c: SimConfig = serde_json::from_str(doc).unwrap();
        assert_eq!(c.mode, Mode::Abandonment);
        assert_eq!(c.horizon, Horizon::Tasks(5000));
        c.validate().unwrap();
    }
}
