use clap::{ArgGroup, Args};
use retainer_core::optimizer::{
    buffer_scaling_report, min_pool_for_miss_prob, min_pool_for_wait, optimize_total_cost,
    shared_pool_size, BufferScalingReport, SizingResult,
};
use retainer_core::RetainerParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::{key_values, num, opt_num, render, Format, Grid, Render};
use crate::{VariantArg, WageArgs};

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["max_miss", "max_wait", "min_cost"])))]
#[command(group(ArgGroup::new("load").required(true).args(["rho", "lambda"])))]
pub struct OptimizeArgs {
    /// Traffic intensity lambda / mu.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "mu")]
    rho: Option<f64>,
    /// Task arrival rate (tasks per second); needs --mu.
    #[arg(long, allow_negative_numbers = true, requires = "mu")]
    lambda: Option<f64>,
    /// Recruitment rate (workers per second).
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Smallest pool whose miss probability is at most this.
    #[arg(long = "max-miss")]
    max_miss: Option<f64>,
    /// Smallest pool whose expected wait (seconds) is at most this; needs --lambda/--mu.
    #[arg(long = "max-wait")]
    max_wait: Option<f64>,
    /// Pool minimising the retainer bill plus the miss penalty.
    #[arg(long = "min-cost")]
    min_cost: bool,
    /// Size one pool shared by k requesters of intensity rho each (with --max-miss).
    #[arg(long, default_value_t = 1, requires = "max_miss")]
    k: u64,
    /// Also report the buffer fraction for each of these k (with --max-miss).
    #[arg(long = "buffer-k", value_delimiter = ',', requires = "max_miss")]
    buffer_k: Vec<u64>,
    #[command(flatten)]
    wage: WageArgs,
    /// Cost of a task that is not served in realtime.
    #[arg(long = "c-task", default_value_t = 0.0, allow_negative_numbers = true)]
    c_task: f64,
    #[arg(long = "cost-variant", value_enum, default_value = "per-task")]
    cost_variant: VariantArg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutput {
    pub rho: f64,
    /// Number of requesters sharing the pool.
    pub k: u64,
    pub result: SizingResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub buffer_scaling: Option<BufferScalingReport>,
}

pub fn run(args: &OptimizeArgs, format: Format) -> CliResult<String> {
    let (lambda, mu) = match (args.rho, args.lambda, args.mu) {
        (Some(rho), None, None) => (rho, 1.0),
        (None, Some(l), Some(m)) => (l, m),
        _ => return Err(CliError::usage("give either --rho or both --lambda and --mu")),
    };
    let rho = lambda / mu;
    let result = if let Some(p) = args.max_miss {
        if args.k > 1 {
            shared_pool_size(rho, args.k, p)?
        } else {
            min_pool_for_miss_prob(rho, p)?
        }
    } else if let Some(w) = args.max_wait {
        if args.rho.is_some() {
            return Err(CliError::usage("--max-wait needs --lambda and --mu"));
        }
        min_pool_for_wait(lambda, mu, w)?
    } else {
        let params = RetainerParams::new(lambda, mu, 0).with_costs(args.wage.per_second(), args.c_task);
        optimize_total_cost(&params, args.cost_variant.into())?
    };
    let buffer_scaling = match (args.max_miss, args.buffer_k.is_empty()) {
        (Some(p), false) => Some(buffer_scaling_report(rho, p, &args.buffer_k)?),
        _ => None,
    };
    render(
        &OptimizeOutput {
            rho,
            k: args.k,
            result,
            buffer_scaling,
        },
        format,
    )
}

impl OptimizeOutput {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let r = &self.result;
        let binding = serde_json::to_value(r.binding_constraint)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        vec![
            ("rho", num(self.rho)),
            ("k", self.k.to_string()),
            ("c_star", r.c_star.to_string()),
            ("achieved_loss", num(r.achieved_loss)),
            ("achieved_wait", opt_num(r.achieved_wait)),
            ("objective", opt_num(r.objective)),
            ("binding_constraint", binding),
            ("unbounded", r.unbounded.to_string()),
        ]
    }

    fn buffer_grid(report: &BufferScalingReport) -> Grid {
        let mut g = Grid::new(["k", "c_star", "epsilon", "buffer", "flagged"]);
        for row in &report.rows {
            g.push(vec![
                row.k.to_string(),
                row.c_star.to_string(),
                num(row.epsilon),
                num(row.buffer),
                row.flagged.to_string(),
            ]);
        }
        g
    }
}

impl Render for OptimizeOutput {
    fn text(&self) -> String {
        let mut s = key_values(&self.fields());
        if self.result.unbounded {
            s.push_str("\nnote: the wage is zero, so no finite pool is optimal; c_star drives the loss below machine precision\n");
        }
        if let Some(b) = &self.buffer_scaling {
            s.push('\n');
            s.push_str(&Self::buffer_grid(b).to_text());
            s.push_str(&format!("\nlog-log slope of epsilon vs k: {}\n", opt_num(b.slope)));
        }
        s
    }

    /// One row for the sizing result, or one row per k with `--buffer-k`.
    fn grid(&self) -> Grid {
        match &self.buffer_scaling {
            Some(b) => Self::buffer_grid(b),
            None => Grid::record(self.fields()),
        }
    }
}
