use clap::Args;
use retainer_core::erlang::{abandonment_adjusted_loss, PoolMetrics};
use retainer_core::RetainerParams;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::output::{key_values, num, opt_num, render, Format, Grid, Render};
use crate::{VariantArg, WageArgs};

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Task arrival rate (tasks per second).
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    /// Recruitment rate of one worker request (workers per second).
    #[arg(long, allow_negative_numbers = true)]
    mu: f64,
    /// Retainer pool size.
    #[arg(long)]
    c: u64,
    #[command(flatten)]
    wage: WageArgs,
    /// Cost of a task that is not served in realtime.
    #[arg(long = "c-task", default_value_t = 0.0, allow_negative_numbers = true)]
    c_task: f64,
    /// Probability that an alerted worker never responds.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long = "cost-variant", value_enum, default_value = "per-task")]
    cost_variant: VariantArg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub params: RetainerParams,
    pub metrics: PoolMetrics,
    /// `a + pi(c)` capped at 1, present when `a > 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abandonment_adjusted_loss: Option<f64>,
}

pub fn run(args: &AnalyzeArgs, format: Format) -> CliResult<String> {
    let mut params = RetainerParams::new(args.lambda, args.mu, args.c)
        .with_costs(args.wage.per_second(), args.c_task);
    params.a = args.a;
    let metrics = PoolMetrics::compute(&params, args.cost_variant.into())?;
    let adjusted = if args.a > 0.0 {
        Some(abandonment_adjusted_loss(args.a, metrics.rho, args.c)?)
    } else {
        None
    };
    render(
        &AnalyzeOutput {
            params,
            metrics,
            abandonment_adjusted_loss: adjusted,
        },
        format,
    )
}

impl AnalyzeOutput {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let m = &self.metrics;
        vec![
            ("lambda", num(self.params.lambda)),
            ("mu", num(self.params.mu)),
            ("rho", num(m.rho)),
            ("c", m.c.to_string()),
            ("loss_prob", num(m.loss_prob)),
            ("expected_wait", num(m.expected_wait)),
            ("expected_busy", num(m.expected_busy)),
            ("expected_idle", num(m.expected_idle)),
            ("wage_per_second", num(self.params.s)),
            ("retainer_cost_rate", num(m.retainer_cost_rate)),
            ("c_task", num(self.params.c_task)),
            ("total_cost", num(m.total_cost)),
            ("abandonment_adjusted_loss", opt_num(self.abandonment_adjusted_loss)),
        ]
    }
}

impl Render for AnalyzeOutput {
    fn text(&self) -> String {
        let mut s = key_values(&self.fields());
        if self.metrics.busy_dist.len() <= 21 {
            s.push_str("\nbusy  probability\n");
            for (i, p) in self.metrics.busy_dist.iter().enumerate() {
                s.push_str(&format!("{i:>4}  {}\n", num(*p)));
            }
        }
        s
    }

    fn grid(&self) -> Grid {
        Grid::record(self.fields())
    }
}
