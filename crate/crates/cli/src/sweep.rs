//! Metric grids over one swept parameter, optionally repeated for a family of
//! curves.

use std::path::PathBuf;

use clap::Args;
use retainer_core::erlang;
use retainer_core::optimizer::{min_pool_for_miss_prob, precruit_rate, shared_pool_size};
use retainer_core::{CostVariant, RetainerParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::{num, render, Format, Grid, Render};
use crate::read_input;

const SPEC_VERSION: u32 = 1;
const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep spec (JSON).
    spec: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    #[serde(rename = "c")]
    C,
    #[serde(rename = "rho")]
    Rho,
    #[serde(rename = "k")]
    K,
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "C_task", alias = "c_task")]
    CTask,
}

impl Variable {
    fn name(self) -> &'static str {
        match self {
            Variable::C => "c",
            Variable::Rho => "rho",
            Variable::K => "k",
            Variable::Epsilon => "epsilon",
            Variable::Beta => "beta",
            Variable::CTask => "C_task",
        }
    }

    fn integral(self) -> bool {
        matches!(self, Variable::C | Variable::K)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub variable: Variable,
    pub values: Vec<f64>,
}

/// Parameters held constant over the grid. `mu` defaults to 1; if `lambda`
/// is given instead, `mu = lambda / rho` at every point.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixed {
    pub rho: Option<f64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub c: Option<f64>,
    pub k: Option<f64>,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    /// Retainer wage per idle worker-second.
    pub s: Option<f64>,
    #[serde(rename = "C_task", alias = "c_task")]
    pub c_task: Option<f64>,
    pub a: Option<f64>,
    pub p_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_version")]
    pub version: u32,
    pub variable: Variable,
    /// Evenly spaced grid; give this or `values`.
    #[serde(default)]
    pub range: Option<Range>,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    /// Repeat the sweep for each of these values of a second parameter.
    #[serde(default)]
    pub series: Option<Series>,
    #[serde(default)]
    pub fixed: Fixed,
    pub outputs: Vec<String>,
}

fn default_version() -> u32 {
    SPEC_VERSION
}

pub const METRICS: &[&str] = &[
    "loss_prob",
    "expected_wait",
    "expected_busy",
    "expected_idle",
    "cost_rate",
    "total_cost",
    "approx_loss",
    "approx_loss_corrected",
    "combined_loss",
    "combined_approx",
    "combined_approx_corrected",
    "chernoff",
    "chernoff_simplified",
    "min_pool",
    "shared_pool",
    "buffer_epsilon",
    "abandonment_loss",
    "precruit_rate",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.version != SPEC_VERSION {
            return Err(CliError::usage(format!("unsupported sweep spec version {}", self.version)));
        }
        if self.outputs.is_empty() {
            return Err(CliError::usage("outputs must list at least one metric"));
        }
        for m in &self.outputs {
            if !METRICS.contains(&m.as_str()) {
                return Err(CliError::usage(format!(
                    "unknown metric `{m}`; valid metrics: {}",
                    METRICS.join(", ")
                )));
            }
        }
        let mut swept = vec![self.variable];
        if let Some(s) = &self.series {
            if s.variable == self.variable {
                return Err(CliError::usage("series variable repeats the swept variable"));
            }
            check_values(s.variable, &s.values)?;
            swept.push(s.variable);
        }
        for v in swept {
            if self.fixed.get(v).is_some() {
                return Err(CliError::usage(format!("`{}` is swept and also fixed", v.name())));
            }
        }
        if self.fixed.lambda.is_some() && self.fixed.mu.is_some() && (self.fixed.rho.is_some() || self.sweeps(Variable::Rho)) {
            return Err(CliError::usage("fix at most two of rho, lambda and mu"));
        }
        check_values(self.variable, &self.grid()?)
    }

    fn sweeps(&self, v: Variable) -> bool {
        self.variable == v || self.series.as_ref().is_some_and(|s| s.variable == v)
    }

    /// Values of the swept variable in output order.
    pub fn grid(&self) -> CliResult<Vec<f64>> {
        match (&self.range, &self.values) {
            (Some(r), None) => {
                if !(r.step > 0.0 && r.step.is_finite() && r.start.is_finite() && r.end.is_finite()) {
                    return Err(CliError::usage("range step must be > 0 and bounds finite"));
                }
                if r.end < r.start {
                    return Err(CliError::usage("range is empty: end < start"));
                }
                // tolerate rounding in (end - start) / step
                let n = ((r.end - r.start) / r.step * (1.0 + 1e-12)).floor() as usize + 1;
                if n > MAX_POINTS {
                    return Err(CliError::usage(format!("range has more than {MAX_POINTS} points")));
                }
                Ok((0..n).map(|i| r.start + i as f64 * r.step).collect())
            }
            (None, Some(v)) => Ok(v.clone()),
            _ => Err(CliError::usage("give exactly one of `range` and `values`")),
        }
    }
}

fn check_values(v: Variable, values: &[f64]) -> CliResult<()> {
    if values.is_empty() {
        return Err(CliError::usage(format!("no values for `{}`", v.name())));
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(CliError::usage(format!("`{}` values must be finite", v.name())));
    }
    let up = values.windows(2).all(|w| w[0] < w[1]);
    let down = values.windows(2).all(|w| w[0] > w[1]);
    if !(up || down) {
        return Err(CliError::usage(format!("`{}` values must be strictly monotone", v.name())));
    }
    if v.integral() && values.iter().any(|x| *x < 0.0 || x.fract() != 0.0) {
        return Err(CliError::usage(format!("`{}` takes non-negative integers", v.name())));
    }
    Ok(())
}

impl Fixed {
    fn get(&self, v: Variable) -> Option<f64> {
        match v {
            Variable::C => self.c,
            Variable::Rho => self.rho,
            Variable::K => self.k,
            Variable::Epsilon => self.epsilon,
            Variable::Beta => self.beta,
            Variable::CTask => self.c_task,
        }
    }

    fn set(&mut self, v: Variable, x: f64) {
        let slot = match v {
            Variable::C => &mut self.c,
            Variable::Rho => &mut self.rho,
            Variable::K => &mut self.k,
            Variable::Epsilon => &mut self.epsilon,
            Variable::Beta => &mut self.beta,
            Variable::CTask => &mut self.c_task,
        };
        *slot = Some(x);
    }
}

/// All parameters at one grid point.
struct Point(Fixed);

impl Point {
    fn need(&self, name: &str, x: Option<f64>) -> CliResult<f64> {
        x.ok_or_else(|| CliError::usage(format!("a requested metric needs parameter `{name}`")))
    }

    fn rho(&self) -> CliResult<f64> {
        match (self.0.rho, self.0.lambda, self.0.mu) {
            (Some(r), _, _) => Ok(r),
            (None, Some(l), Some(m)) => Ok(l / m),
            _ => Err(CliError::usage("a requested metric needs `rho` (or `lambda` and `mu`)")),
        }
    }

    fn mu(&self) -> CliResult<f64> {
        match (self.0.mu, self.0.lambda) {
            (Some(m), _) => Ok(m),
            (None, Some(l)) => Ok(l / self.rho()?),
            (None, None) => Ok(1.0),
        }
    }

    fn lambda(&self) -> CliResult<f64> {
        Ok(self.rho()? * self.mu()?)
    }

    fn int(&self, name: &str, x: Option<f64>) -> CliResult<u64> {
        let v = self.need(name, x)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(CliError::usage(format!("`{name}` must be a non-negative integer, got {v}")));
        }
        Ok(v as u64)
    }

    fn c(&self) -> CliResult<u64> {
        self.int("c", self.0.c)
    }

    fn k(&self) -> CliResult<u64> {
        self.0.k.map_or(Ok(1), |_| self.int("k", self.0.k))
    }

    fn metric(&self, name: &str) -> CliResult<f64> {
        let f = &self.0;
        let value = match name {
            "loss_prob" => erlang::erlang_loss(self.rho()?, self.c()?)?,
            "expected_wait" => erlang::expected_wait(self.lambda()?, self.mu()?, self.c()?)?,
            "expected_busy" => erlang::expected_busy(self.rho()?, self.c()?)?,
            "expected_idle" => erlang::expected_idle(self.rho()?, self.c()?)?,
            "cost_rate" => erlang::retainer_cost_rate(self.need("s", f.s)?, self.rho()?, self.c()?)?,
            "total_cost" => {
                let params = RetainerParams::new(self.lambda()?, self.mu()?, self.c()?)
                    .with_costs(self.need("s", f.s)?, self.need("C_task", f.c_task)?);
                erlang::total_cost(&params, params.c, CostVariant::PerTask)?
            }
            "approx_loss" => erlang::approx_loss(self.rho()?, self.c()?)?,
            "approx_loss_corrected" => erlang::approx_loss_corrected(self.rho()?, self.c()?)?,
            "combined_loss" => erlang::combined_pool_loss(self.rho()?, self.c()?, self.k()?)?.exact,
            "combined_approx" => erlang::combined_pool_loss(self.rho()?, self.c()?, self.k()?)?.approx,
            "combined_approx_corrected" => {
                erlang::combined_pool_loss(self.rho()?, self.c()?, self.k()?)?.approx_corrected
            }
            "chernoff" | "chernoff_simplified" => {
                let load = self.rho()? * self.k()? as f64;
                let est = erlang::chernoff_loss_estimate(self.need("epsilon", f.epsilon)?, load)?;
                if name == "chernoff" {
                    est.chernoff
                } else {
                    est.simplified
                }
            }
            "min_pool" => min_pool_for_miss_prob(self.rho()?, self.need("p_max", f.p_max)?)?.c_star as f64,
            "shared_pool" => shared_pool_size(self.rho()?, self.k()?, self.need("p_max", f.p_max)?)?.c_star as f64,
            "buffer_epsilon" => {
                let (rho, k) = (self.rho()?, self.k()?);
                let c = shared_pool_size(rho, k, self.need("p_max", f.p_max)?)?.c_star;
                c as f64 / (k as f64 * rho) - 1.0
            }
            "abandonment_loss" => {
                erlang::abandonment_adjusted_loss(self.need("a", f.a)?, self.rho()?, self.c()?)?
            }
            "precruit_rate" => precruit_rate(self.lambda()?, self.need("beta", f.beta)?)?,
            other => unreachable!("metric {other} passed validation"),
        };
        Ok(value)
    }
}

pub fn evaluate(spec: &SweepSpec) -> CliResult<SweepOutput> {
    spec.validate()?;
    let grid = spec.grid()?;
    let mut columns = Vec::new();
    let series: Vec<Option<f64>> = match &spec.series {
        Some(s) => {
            columns.push(s.variable.name().to_string());
            s.values.iter().copied().map(Some).collect()
        }
        None => vec![None],
    };
    columns.push(spec.variable.name().to_string());
    columns.extend(spec.outputs.iter().cloned());

    let mut rows = Vec::with_capacity(series.len() * grid.len());
    for sv in &series {
        for &x in &grid {
            let mut fixed = spec.fixed.clone();
            let mut row = Vec::with_capacity(columns.len());
            if let (Some(v), Some(s)) = (sv, &spec.series) {
                fixed.set(s.variable, *v);
                row.push(*v);
            }
            fixed.set(spec.variable, x);
            row.push(x);
            let point = Point(fixed);
            for m in &spec.outputs {
                row.push(point.metric(m)?);
            }
            rows.push(row);
        }
    }
    Ok(SweepOutput { columns, rows })
}

pub fn run(args: &SweepArgs, format: Format) -> CliResult<String> {
    let spec: SweepSpec = serde_json::from_str(&read_input(&args.spec)?)?;
    render(&evaluate(&spec)?, format)
}

impl Render for SweepOutput {
    fn text(&self) -> String {
        self.grid().to_text()
    }

    fn grid(&self) -> Grid {
        let mut g = Grid::new(self.columns.iter().cloned());
        for row in &self.rows {
            g.push(row.iter().map(|x| num(*x)).collect());
        }
        g
    }
}
