use std::path::PathBuf;

use clap::{Args, ValueEnum};
use retainer_core::router::{min_max_intensity, random_assignment, RoutingInstance, RoutingPlan};
use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::output::{num, render, Format, Grid, Render};
use crate::read_input;

#[derive(Debug, Args)]
pub struct RouteArgs {
    /// Routing instance (JSON).
    instance: PathBuf,
    /// Also show a baseline plan for comparison.
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Baseline {
    /// Every group splits its workers evenly over the task types it can do.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteOutput {
    pub optimal: RoutingPlan,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<RoutingPlan>,
}

pub fn run(args: &RouteArgs, format: Format) -> CliResult<String> {
    let instance: RoutingInstance = serde_json::from_str(&read_input(&args.instance)?)?;
    let optimal = min_max_intensity(&instance)?;
    let baseline = match args.baseline {
        Some(Baseline::Random) => Some(random_assignment(&instance)?),
        None => None,
    };
    render(&RouteOutput { optimal, baseline }, format)
}

fn plans(out: &RouteOutput) -> Vec<(&'static str, &RoutingPlan)> {
    let mut v = vec![("optimal", &out.optimal)];
    if let Some(b) = &out.baseline {
        v.push(("random", b));
    }
    v
}

fn plan_text(name: &str, plan: &RoutingPlan) -> String {
    let mut s = format!("{name} plan: worst rho = {}\n\n", num(plan.worst_rho));
    let mut tasks = Grid::new(["task", "worker_inflow", "rho"]);
    for t in &plan.per_task_rho {
        tasks.push(vec![t.task.clone(), num(t.inflow), num(t.rho)]);
    }
    s.push_str(&tasks.to_text());

    // group x task matrix of assignment rates
    let mut groups: Vec<&str> = Vec::new();
    for a in &plan.assignments {
        if !groups.contains(&a.group.as_str()) {
            groups.push(&a.group);
        }
    }
    let task_ids: Vec<&str> = plan.per_task_rho.iter().map(|t| t.task.as_str()).collect();
    let mut matrix = Grid::new(std::iter::once("group").chain(task_ids.iter().copied()));
    for g in groups {
        let mut row = vec![g.to_string()];
        row.extend(task_ids.iter().map(|t| num(plan.rate(g, t))));
        matrix.push(row);
    }
    s.push('\n');
    s.push_str(&matrix.to_text());
    s
}

impl Render for RouteOutput {
    fn text(&self) -> String {
        plans(self)
            .into_iter()
            .map(|(name, p)| plan_text(name, p))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Long format: one row per assignment rate, per-task intensity and plan optimum.
    fn grid(&self) -> Grid {
        let mut g = Grid::new(["plan", "record", "group", "task", "value"]);
        for (name, plan) in plans(self) {
            g.push(vec![name.into(), "worst_rho".into(), String::new(), String::new(), num(plan.worst_rho)]);
            for t in &plan.per_task_rho {
                g.push(vec![name.into(), "task_rho".into(), String::new(), t.task.clone(), num(t.rho)]);
            }
            for a in &plan.assignments {
                g.push(vec![name.into(), "rate".into(), a.group.clone(), a.task.clone(), num(a.rate)]);
            }
        }
        g
    }
}
