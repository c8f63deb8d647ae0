use std::path::PathBuf;

use clap::Args;
use retainer_core::erlang::{erlang_loss, expected_idle};
use retainer_core::sim::{replicate, simulate, Mode, SimConfig, SimReport, Stat};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::{key_values, num, opt_num, render, Format, Grid, Render};
use crate::read_input;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulation config (JSON).
    config: PathBuf,
    /// Independent replications to run and aggregate (1 = a single run).
    #[arg(long, default_value_t = 1)]
    replications: u32,
    /// Add closed-form predictions and z-scores (baseline mode only).
    #[arg(long = "compare-analytic")]
    compare_analytic: bool,
}

/// Closed-form prediction for one simulated statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub analytic: f64,
    /// `(simulated - analytic) / se`; absent when the standard error is zero
    /// and the two values differ.
    pub z: Option<f64>,
}

impl Comparison {
    fn new(stat: Stat, analytic: f64) -> Self {
        let z = stat.z_score(analytic);
        Comparison {
            analytic,
            z: z.is_finite().then_some(z),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticComparison {
    pub empty_pool_fraction: Comparison,
    pub mean_wait: Comparison,
    pub mean_idle_workers: Comparison,
    pub cost_rate: Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutput {
    pub report: SimReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticComparison>,
}

pub fn run(args: &SimulateArgs, seed: Option<u64>, format: Format) -> CliResult<String> {
    let mut cfg: SimConfig = serde_json::from_str(&read_input(&args.config)?)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if args.compare_analytic && cfg.mode != Mode::Baseline {
        return Err(CliError::usage(format!(
            "--compare-analytic needs a baseline config, this one is {}",
            cfg.mode.name()
        )));
    }
    let report = match args.replications {
        0 => return Err(CliError::usage("--replications must be >= 1")),
        1 => simulate(&cfg)?,
        n => replicate(&cfg, n)?,
    };
    let analytic = if args.compare_analytic {
        let p = &cfg.params;
        let rho = p.rho();
        let loss = erlang_loss(rho, p.c)?;
        let idle = expected_idle(rho, p.c)?;
        Some(AnalyticComparison {
            empty_pool_fraction: Comparison::new(report.empty_pool_fraction, loss),
            mean_wait: Comparison::new(report.mean_wait, loss / p.mu),
            mean_idle_workers: Comparison::new(report.mean_idle_workers, idle),
            cost_rate: Comparison::new(report.cost_rate, p.s * idle),
        })
    } else {
        None
    };
    render(&SimulateOutput { report, analytic }, format)
}

fn stat_fields(out: &mut Vec<(String, String)>, name: &str, s: Stat) {
    out.push((name.to_string(), num(s.mean)));
    out.push((format!("{name}_se"), num(s.se)));
}

impl SimulateOutput {
    /// Column set depends only on the mode and on whether analytic columns
    /// were requested.
    fn fields(&self) -> Vec<(String, String)> {
        let r = &self.report;
        let mut f: Vec<(String, String)> = vec![
            ("mode".into(), r.mode.name().into()),
            ("seed".into(), r.seed.to_string()),
            ("replications".into(), r.replications.to_string()),
            ("pool_size".into(), r.pool_size.to_string()),
            ("measured_duration".into(), num(r.measured_duration)),
            ("tasks_arrived".into(), r.tasks_arrived.to_string()),
            ("served".into(), r.served.to_string()),
            ("diverted".into(), r.diverted.to_string()),
            ("missed".into(), r.missed.to_string()),
        ];
        stat_fields(&mut f, "empty_pool_fraction", r.empty_pool_fraction);
        stat_fields(&mut f, "mean_wait", r.mean_wait);
        f.push(("median_wait".into(), num(r.median_wait)));
        f.push(("p90_wait".into(), num(r.p90_wait)));
        stat_fields(&mut f, "mean_idle_workers", r.mean_idle_workers);
        stat_fields(&mut f, "cost_rate", r.cost_rate);
        let optional = [
            ("alerts_per_task", r.alerts_per_task),
            ("miss_fraction", r.miss_fraction),
            ("unmatched_fraction", r.unmatched_fraction),
            ("wasted_worker_fraction", r.wasted_worker_fraction),
        ];
        for (name, s) in optional {
            if let Some(s) = s {
                stat_fields(&mut f, name, s);
            }
        }
        if let (Some(p), Some(w)) = (r.precruited, r.wasted) {
            f.push(("precruited".into(), p.to_string()));
            f.push(("wasted".into(), w.to_string()));
        }
        for t in r.per_tier.iter().flatten() {
            let i = t.tier;
            f.push((format!("tier{i}_size"), t.size.to_string()));
            f.push((format!("tier{i}_arrivals"), t.arrivals.to_string()));
            f.push((format!("tier{i}_diverted"), t.diverted.to_string()));
            f.push((format!("tier{i}_served"), t.served.to_string()));
            f.push((format!("tier{i}_passed_on"), t.passed_on.to_string()));
            f.push((format!("tier{i}_mean_idle_workers"), num(t.mean_idle_workers.mean)));
            f.push((format!("tier{i}_cost_rate"), num(t.cost_rate.mean)));
        }
        if let Some(a) = &self.analytic {
            let rows = [
                ("empty_pool_fraction", a.empty_pool_fraction),
                ("mean_wait", a.mean_wait),
                ("mean_idle_workers", a.mean_idle_workers),
                ("cost_rate", a.cost_rate),
            ];
            for (name, c) in rows {
                f.push((format!("analytic_{name}"), num(c.analytic)));
                f.push((format!("z_{name}"), opt_num(c.z)));
            }
        }
        f
    }
}

impl Render for SimulateOutput {
    fn text(&self) -> String {
        let f = self.fields();
        let pairs: Vec<(&str, String)> = f.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        key_values(&pairs)
    }

    fn grid(&self) -> Grid {
        let f = self.fields();
        let mut g = Grid::new(f.iter().map(|(k, _)| k.clone()));
        g.push(f.into_iter().map(|(_, v)| v).collect());
        g
    }
}
