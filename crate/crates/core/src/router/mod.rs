//! Routing worker-group arrivals to task types in a shared retainer pool.
//!
//! Each task type `j` has arrival rate `lambda_j`; each worker group `i` arrives
//! at rate `mu_i` and can serve a fixed set of task types. A plan assigns rates
//! `a_ij` with `sum_j a_ij <= mu_i`, giving each task a traffic intensity
//! `rho_j = lambda_j / sum_i a_ij`. [`min_max_intensity`] minimises the worst
//! `rho_j` by bisecting on the target intensity; feasibility of a target `rho`
//! is one maximum flow through
//!
//! ```text
//! source -(mu_i)-> group_i -(total supply)-> task_j -(lambda_j / rho)-> sink
//! ```
//!
//! and is certified when every sink edge saturates.

pub mod maxflow;

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::{Error, Result};
use maxflow::{EdgeId, FlowNetwork};

/// Relative shortfall in sink flow tolerated when certifying feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-12;

const INSTANCE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskType {
    pub id: String,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkerGroup {
    pub id: String,
    pub mu: f64,
    pub capabilities: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoutingInstance {
    #[serde(default = "default_version")]
    pub version: u32,
    pub tasks: Vec<TaskType>,
    pub groups: Vec<WorkerGroup>,
    /// Maximum number of task types a single group may subscribe to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subscription_cap: Option<usize>,
}

fn default_version() -> u32 {
    INSTANCE_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub group: String,
    pub task: String,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskIntensity {
    pub task: String,
    /// Total worker rate routed to this task, `sum_i a_ij`.
    pub inflow: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingPlan {
    /// Non-zero `a_ij` in group-major input order.
    pub assignments: Vec<Assignment>,
    pub worst_rho: f64,
    pub per_task_rho: Vec<TaskIntensity>,
}

impl RoutingPlan {
    pub fn rate(&self, group: &str, task: &str) -> f64 {
        self.assignments
            .iter()
            .find(|a| a.group == group && a.task == task)
            .map_or(0.0, |a| a.rate)
    }

    pub fn task_rho(&self, task: &str) -> Option<f64> {
        self.per_task_rho.iter().find(|t| t.task == task).map(|t| t.rho)
    }

    pub fn task_inflow(&self, task: &str) -> Option<f64> {
        self.per_task_rho.iter().find(|t| t.task == task).map(|t| t.inflow)
    }
}

/// Instance with capability lists resolved to task indices.
struct Resolved<'a> {
    inst: &'a RoutingInstance,
    caps: Vec<Vec<usize>>,
}

impl RoutingInstance {
    pub fn new(tasks: Vec<TaskType>, groups: Vec<WorkerGroup>) -> Self {
        Self {
            version: INSTANCE_VERSION,
            tasks,
            groups,
            subscription_cap: None,
        }
    }

    /// Checks the structural invariants and that every task can be served.
    pub fn validate(&self) -> Result<()> {
        self.resolve().map(|_| ())
    }

    fn resolve(&self) -> Result<Resolved<'_>> {
        if self.version != INSTANCE_VERSION {
            return Err(Error::config(format!(
                "unsupported routing instance version {}",
                self.version
            )));
        }
        if self.tasks.is_empty() {
            return Err(Error::config("instance has no task types"));
        }
        let mut index = HashMap::new();
        for (j, t) in self.tasks.iter().enumerate() {
            if !(t.lambda > 0.0 && t.lambda.is_finite()) {
                return Err(Error::config(format!("task `{}` needs lambda > 0", t.id)));
            }
            if index.insert(t.id.as_str(), j).is_some() {
                return Err(Error::config(format!("duplicate task id `{}`", t.id)));
            }
        }
        if let Some(0) = self.subscription_cap {
            return Err(Error::config("subscription_cap must be >= 1"));
        }
        let mut seen_groups = HashMap::new();
        let mut caps = Vec::with_capacity(self.groups.len());
        for g in &self.groups {
            if seen_groups.insert(g.id.as_str(), ()).is_some() {
                return Err(Error::config(format!("duplicate group id `{}`", g.id)));
            }
            if !(g.mu > 0.0 && g.mu.is_finite()) {
                return Err(Error::config(format!("group `{}` needs mu > 0", g.id)));
            }
            if g.capabilities.is_empty() {
                return Err(Error::config(format!("group `{}` has no capabilities", g.id)));
            }
            if let Some(cap) = self.subscription_cap {
                if g.capabilities.len() > cap {
                    return Err(Error::config(format!(
                        "group `{}` subscribes to {} task types, cap is {cap}",
                        g.id,
                        g.capabilities.len()
                    )));
                }
            }
            let mut list = Vec::with_capacity(g.capabilities.len());
            for id in &g.capabilities {
                let j = *index.get(id.as_str()).ok_or_else(|| {
                    Error::config(format!("group `{}` references unknown task `{id}`", g.id))
                })?;
                if list.contains(&j) {
                    return Err(Error::config(format!(
                        "group `{}` lists task `{id}` twice",
                        g.id
                    )));
                }
                list.push(j);
            }
            caps.push(list);
        }
        for (j, t) in self.tasks.iter().enumerate() {
            if !caps.iter().any(|c| c.contains(&j)) {
                return Err(Error::UncoveredTask { task: t.id.clone() });
            }
        }
        Ok(Resolved { inst: self, caps })
    }
}

/// Outcome of one feasibility flow on a sub-instance.
struct Level {
    rates: Vec<(usize, usize, f64)>,
    /// Tasks whose inflow can still grow, and the groups that could supply it.
    slack_tasks: Vec<usize>,
    slack_groups: Vec<usize>,
}

/// Residual capacity below this fraction of the largest edge counts as none
/// when looking for tasks that could still be given more workers.
const SLACK_TOL: f64 = 1e-9;

impl Resolved<'_> {
    fn all_tasks(&self) -> Vec<usize> {
        (0..self.inst.tasks.len()).collect()
    }

    fn all_groups(&self) -> Vec<usize> {
        (0..self.inst.groups.len()).collect()
    }

    /// Intensity no plan can beat on the sub-instance: each task alone, and
    /// all tasks together.
    fn lower_bound(&self, tasks: &[usize], groups: &[usize]) -> f64 {
        let supply: f64 = groups.iter().map(|&i| self.inst.groups[i].mu).sum();
        let demand: f64 = tasks.iter().map(|&j| self.inst.tasks[j].lambda).sum();
        let mut bound = demand / supply;
        for &j in tasks {
            let reach: f64 = groups
                .iter()
                .filter(|&&i| self.caps[i].contains(&j))
                .map(|&i| self.inst.groups[i].mu)
                .sum();
            bound = bound.max(self.inst.tasks[j].lambda / reach);
        }
        bound
    }

    /// Feasibility flow at target `rho` restricted to `tasks` and `groups`:
    /// source -> group (mu_i), group -> capable task (unbounded), task -> sink
    /// (lambda_j / rho). `None` unless every sink edge saturates.
    fn level_at(&self, rho: f64, tasks: &[usize], groups: &[usize]) -> Result<Option<Level>> {
        let inst = self.inst;
        let (m, n) = (groups.len(), tasks.len());
        let source = 0;
        let sink = m + n + 1;
        let task_node = |j: usize| tasks.iter().position(|&t| t == j).map(|p| 1 + m + p);
        let mut net = FlowNetwork::new(m + n + 2);
        let supply: f64 = groups.iter().map(|&i| inst.groups[i].mu).sum();
        let unbounded = 2.0 * supply;
        let mut pair_edges: Vec<(usize, usize, EdgeId)> = Vec::new();
        for (p, &i) in groups.iter().enumerate() {
            net.add_edge(source, 1 + p, inst.groups[i].mu)?;
            for &j in &self.caps[i] {
                if let Some(node) = task_node(j) {
                    let e = net.add_edge(1 + p, node, unbounded)?;
                    pair_edges.push((i, j, e));
                }
            }
        }
        let mut demand = 0.0;
        for (p, &j) in tasks.iter().enumerate() {
            let d = inst.tasks[j].lambda / rho;
            demand += d;
            net.add_edge(1 + m + p, sink, d)?;
        }
        let flow = net.max_flow(source, sink)?;
        if flow < demand * (1.0 - FEASIBILITY_TOL) {
            return Ok(None);
        }
        let reach = net.residual_reachable(source, SLACK_TOL);
        pair_edges.sort_by_key(|&(i, j, _)| (i, j));
        Ok(Some(Level {
            rates: pair_edges
                .into_iter()
                .map(|(i, j, e)| (i, j, net.flow(e).max(0.0)))
                .collect(),
            slack_tasks: tasks.iter().enumerate().filter(|(p, _)| reach[1 + m + p]).map(|(_, &j)| j).collect(),
            slack_groups: groups.iter().enumerate().filter(|(p, _)| reach[1 + p]).map(|(_, &i)| i).collect(),
        }))
    }

    /// Smallest common intensity for the sub-instance, by bisection.
    fn min_level(&self, tasks: &[usize], groups: &[usize]) -> Result<Level> {
        let lower = self.lower_bound(tasks, groups);
        if let Some(level) = self.level_at(lower, tasks, groups)? {
            return Ok(level);
        }
        let mut lo = lower;
        let mut hi = lower * 2.0;
        let mut best = loop {
            match self.level_at(hi, tasks, groups)? {
                Some(level) => break level,
                None => {
                    lo = hi;
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return Err(Error::Infeasible("no finite intensity is feasible".into()));
                    }
                }
            }
        };
        for _ in 0..200 {
            if hi - lo <= 1e-14 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            match self.level_at(mid, tasks, groups)? {
                Some(level) => {
                    hi = mid;
                    best = level;
                }
                None => lo = mid,
            }
        }
        Ok(best)
    }
}

fn plan_from_rates(inst: &RoutingInstance, rates: &[(usize, usize, f64)]) -> RoutingPlan {
    let mut inflow = vec![0.0; inst.tasks.len()];
    let mut assignments = Vec::new();
    for &(i, j, rate) in rates {
        if rate > 0.0 {
            inflow[j] += rate;
            assignments.push(Assignment {
                group: inst.groups[i].id.clone(),
                task: inst.tasks[j].id.clone(),
                rate,
            });
        }
    }
    let per_task_rho: Vec<TaskIntensity> = inst
        .tasks
        .iter()
        .zip(&inflow)
        .map(|(t, &f)| TaskIntensity {
            task: t.id.clone(),
            inflow: f,
            rho: t.lambda / f,
        })
        .collect();
    let worst_rho = per_task_rho.iter().map(|t| t.rho).fold(0.0, f64::max);
    RoutingPlan {
        assignments,
        worst_rho,
        per_task_rho,
    }
}

/// Plan meeting `rho_j <= rho` for every task, if one exists.
pub fn feasible_assignment(instance: &RoutingInstance, rho: f64) -> Result<Option<RoutingPlan>> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain(format!("target intensity must be > 0, got {rho}")));
    }
    let resolved = instance.resolve()?;
    let level = resolved.level_at(rho, &resolved.all_tasks(), &resolved.all_groups())?;
    Ok(level.map(|l| plan_from_rates(instance, &l.rates)))
}

/// Plan minimising the worst per-task traffic intensity.
///
/// Bisection finds the optimal worst case `rho*`. The tasks stuck at `rho*`
/// (no augmenting path can give them more workers) are fixed together with
/// the groups that feed them, and the remaining tasks are solved again with
/// the remaining groups. Repeating this spreads spare capacity over the
/// non-bottleneck tasks instead of leaving it idle.
pub fn min_max_intensity(instance: &RoutingInstance) -> Result<RoutingPlan> {
    let resolved = instance.resolve()?;
    let mut tasks = resolved.all_tasks();
    let mut groups = resolved.all_groups();
    let mut rates = Vec::new();
    while !tasks.is_empty() {
        let level = resolved.min_level(&tasks, &groups)?;
        let stuck: Vec<usize> = tasks.iter().copied().filter(|j| !level.slack_tasks.contains(j)).collect();
        if stuck.is_empty() {
            // rounding left every task looking improvable; stop here
            rates.extend(level.rates);
            break;
        }
        rates.extend(level.rates.into_iter().filter(|(_, j, _)| stuck.contains(j)));
        tasks = level.slack_tasks;
        groups = level.slack_groups;
    }
    rates.sort_by_key(|&(i, j, _)| (i, j));
    Ok(plan_from_rates(instance, &rates))
}

/// Baseline: every group splits its arrivals evenly over its capabilities.
pub fn random_assignment(instance: &RoutingInstance) -> Result<RoutingPlan> {
    let resolved = instance.resolve()?;
    let mut rates = Vec::new();
    for (i, caps) in resolved.caps.iter().enumerate() {
        let share = instance.groups[i].mu / caps.len() as f64;
        let mut sorted = caps.clone();
        sorted.sort_unstable();
        rates.extend(sorted.into_iter().map(|j| (i, j, share)));
    }
    Ok(plan_from_rates(instance, &rates))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn task(id: &str, lambda: f64) -> TaskType {
        TaskType {
            id: id.into(),
            lambda,
        }
    }

    pub(crate) fn group(id: &str, mu: f64, caps: &[&str]) -> WorkerGroup {
        WorkerGroup {
            id: id.into(),
            mu,
            capabilities: caps.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn two_task() -> RoutingInstance {
        RoutingInstance::new(
            vec![task("t1", 0.5), task("t2", 1.0)],
            vec![group("A", 1.0, &["t1"]), group("B", 1.0, &["t1", "t2"])],
        )
    }

    #[test]
    fn two_task_optimum() {
        let plan = min_max_intensity(&two_task()).unwrap();
        assert!((plan.worst_rho - 1.0).abs() < 1e-9);
        assert!((plan.rate("B", "t2") - 1.0).abs() < 1e-9);
        assert!(plan.rate("B", "t1").abs() < 1e-9);
    }

    #[test]
    fn single_pair_has_no_freedom() {
        let inst = RoutingInstance::new(vec![task("t", 2.0)], vec![group("g", 1.0, &["t"])]);
        let plan = min_max_intensity(&inst).unwrap();
        assert!((plan.worst_rho - 2.0).abs() < 1e-12);
        assert!((plan.rate("g", "t") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fully_connected_pools_all_supply() {
        let all = ["a", "b", "c"];
        let inst = RoutingInstance::new(
            vec![task("a", 0.3), task("b", 1.1), task("c", 2.0)],
            vec![group("x", 0.5, &all), group("y", 2.5, &all)],
        );
        let plan = min_max_intensity(&inst).unwrap();
        assert!((plan.worst_rho - 3.4 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn feasibility_cut() {
        let inst = two_task();
        assert!(feasible_assignment(&inst, 1.0).unwrap().is_some());
        assert!(feasible_assignment(&inst, 0.9).unwrap().is_none());
        assert!(feasible_assignment(&inst, 10.0).unwrap().is_some());
        assert!(feasible_assignment(&inst, 0.0).is_err());
    }

    #[test]
    fn feasibility_flow_value() {
        // at rho = 1 the sinks take 0.5 + 1.0
        let plan = feasible_assignment(&two_task(), 1.0).unwrap().unwrap();
        let total: f64 = plan.assignments.iter().map(|a| a.rate).sum();
        assert!((total - 1.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_split() {
        let inst = RoutingInstance::new(
            vec![task("t1", 1.0), task("t2", 1.0)],
            vec![group("g", 1.0, &["t2", "t1"])],
        );
        let plan = random_assignment(&inst).unwrap();
        assert_eq!(plan.rate("g", "t1"), 0.5);
        assert_eq!(plan.rate("g", "t2"), 0.5);
    }

    #[test]
    fn uncovered_task_is_named() {
        let inst = RoutingInstance::new(
            vec![task("t1", 1.0), task("lonely", 1.0)],
            vec![group("g", 1.0, &["t1"])],
        );
        assert_eq!(
            min_max_intensity(&inst).unwrap_err(),
            Error::UncoveredTask {
                task: "lonely".into()
            }
        );
    }

    #[test]
    fn validation_errors() {
        let mut inst = two_task();
        inst.groups[0].capabilities.push("nope".into());
        assert!(matches!(inst.validate(), Err(Error::InvalidConfig(_))));

        let mut inst = two_task();
        inst.subscription_cap = Some(1);
        assert!(inst.validate().is_err());
        inst.subscription_cap = Some(2);
        assert!(inst.validate().is_ok());

        let mut inst = two_task();
        inst.tasks[0].lambda = 0.0;
        assert!(inst.validate().is_err());

        let mut inst = two_task();
        inst.groups[1].id = "A".into();
        assert!(inst.validate().is_err());

        let mut inst = two_task();
        inst.version = 7;
        assert!(inst.validate().is_err());
    }
}
