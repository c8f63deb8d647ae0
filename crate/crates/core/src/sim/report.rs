use serde::{Deserialize, Serialize};

use super::config::{Horizon, Mode};
use super::stats::{ratio_stat, sorted_quantile, Stat};
use super::window::{LevelTracker, Window};

/// Statistics for one tier of a tiered run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierReport {
    pub tier: u32,
    pub size: u64,
    pub arrivals: u64,
    /// Tasks that found this tier's pool empty.
    pub diverted: u64,
    /// Alerted workers that responded in time.
    pub served: u64,
    /// Alerted workers that did not respond in time; the task moved on.
    pub passed_on: u64,
    pub mean_idle_workers: Stat,
    pub cost_rate: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub mode: Mode,
    pub seed: u64,
    /// 1 for a single run; the count behind an aggregated report otherwise.
    pub replications: u32,
    pub horizon: Horizon,
    /// Retainer pool size (sum over tiers in tiered mode, 0 in precruitment mode).
    pub pool_size: u64,
    /// Simulated seconds covered by the statistics.
    pub measured_duration: f64,
    pub tasks_arrived: u64,
    pub served: u64,
    pub diverted: u64,
    pub missed: u64,
    pub empty_pool_fraction: Stat,
    pub mean_wait: Stat,
    pub median_wait: f64,
    pub p90_wait: f64,
    pub mean_idle_workers: Stat,
    pub cost_rate: Stat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alerts_per_task: Option<Stat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub miss_fraction: Option<Stat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unmatched_fraction: Option<Stat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wasted_worker_fraction: Option<Stat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precruited: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wasted: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_tier: Option<Vec<TierReport>>,
}

/// Per-batch counters filled in by the event loops.
#[derive(Debug, Clone)]
pub(crate) struct Tally {
    pub tasks: Vec<f64>,
    pub diverted: Vec<f64>,
    pub missed: Vec<f64>,
    pub served: Vec<f64>,
    pub wait_sum: Vec<f64>,
    pub wait_n: Vec<f64>,
    pub alerts: Vec<f64>,
    pub alerted_tasks: Vec<f64>,
    pub unmatched: Vec<f64>,
    pub precruited: Vec<f64>,
    pub wasted: Vec<f64>,
    pub waits: Vec<f64>,
}

impl Tally {
    pub(crate) fn new(batches: usize) -> Self {
        let z = vec![0.0; batches];
        Self {
            tasks: z.clone(),
            diverted: z.clone(),
            missed: z.clone(),
            served: z.clone(),
            wait_sum: z.clone(),
            wait_n: z.clone(),
            alerts: z.clone(),
            alerted_tasks: z.clone(),
            unmatched: z.clone(),
            precruited: z.clone(),
            wasted: z,
            waits: Vec::new(),
        }
    }

    pub(crate) fn wait(&mut self, batch: usize, w: f64) {
        self.wait_sum[batch] += w;
        self.wait_n[batch] += 1.0;
        self.waits.push(w);
    }

    fn total(v: &[f64]) -> u64 {
        v.iter().sum::<f64>() as u64
    }
}

pub(crate) struct ReportInputs<'a> {
    pub mode: Mode,
    pub seed: u64,
    pub horizon: Horizon,
    pub pool_size: u64,
    pub wage: f64,
    pub window: &'a Window,
    pub idle: &'a [LevelTracker],
    pub tally: Tally,
}

pub(crate) fn build_report(inp: ReportInputs<'_>, tiers: Option<Vec<TierReport>>) -> SimReport {
    let ReportInputs {
        mode,
        seed,
        horizon,
        pool_size,
        wage,
        window,
        idle,
        mut tally,
    } = inp;
    let durations = window.durations();
    let mut idle_sum = vec![0.0; window.batches()];
    for tracker in idle {
        for (acc, v) in idle_sum.iter_mut().zip(&tracker.acc) {
            *acc += v;
        }
    }
    let mean_idle = ratio_stat(&idle_sum, &durations);
    tally.waits.sort_by(f64::total_cmp);

    let alerts = (mode == Mode::Abandonment).then(|| ratio_stat(&tally.alerts, &tally.alerted_tasks));
    let miss = matches!(mode, Mode::Abandonment | Mode::Tiered)
        .then(|| ratio_stat(&tally.missed, &tally.tasks));
    let precruit = mode == Mode::Precruitment;

    SimReport {
        mode,
        seed,
        replications: 1,
        horizon,
        pool_size,
        measured_duration: window.measured_duration(),
        tasks_arrived: Tally::total(&tally.tasks),
        served: Tally::total(&tally.served),
        diverted: Tally::total(&tally.diverted),
        missed: Tally::total(&tally.missed),
        empty_pool_fraction: ratio_stat(&tally.diverted, &tally.tasks),
        mean_wait: ratio_stat(&tally.wait_sum, &tally.wait_n),
        median_wait: sorted_quantile(&tally.waits, 0.5),
        p90_wait: sorted_quantile(&tally.waits, 0.9),
        mean_idle_workers: mean_idle,
        cost_rate: mean_idle.scaled(wage),
        alerts_per_task: alerts,
        miss_fraction: miss,
        unmatched_fraction: precruit.then(|| ratio_stat(&tally.unmatched, &tally.tasks)),
        wasted_worker_fraction: precruit.then(|| ratio_stat(&tally.wasted, &tally.precruited)),
        precruited: precruit.then(|| Tally::total(&tally.precruited)),
        wasted: precruit.then(|| Tally::total(&tally.wasted)),
        per_tier: tiers,
    }
}
