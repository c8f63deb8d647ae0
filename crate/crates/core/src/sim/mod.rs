//! Seeded discrete-event simulation of retainer pools.
//!
//! [`simulate`] runs one replication of a [`SimConfig`]; [`replicate`] runs
//! several independent replications and combines them with [`aggregate`].
//! Standard errors within one run come from batch means over the post-warmup
//! window.

mod abandonment;
mod baseline;
mod config;
mod precruit;
mod report;
mod rng;
mod stats;
mod tiered;
mod window;

pub use config::{Horizon, LatencyDist, Mode, RecruitmentDist, SimConfig, MIN_BATCHES};
pub use report::{SimReport, TierReport};
pub use stats::Stat;

use crate::error::{Error, Result};

/// Runs replication 0 of `cfg` in whatever mode it names.
pub fn simulate(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    Ok(run_replication(cfg, 0))
}

pub fn simulate_abandonment(cfg: &SimConfig) -> Result<SimReport> {
    expect_mode(cfg, Mode::Abandonment)?;
    simulate(cfg)
}

pub fn simulate_tiered(cfg: &SimConfig) -> Result<SimReport> {
    expect_mode(cfg, Mode::Tiered)?;
    simulate(cfg)
}

pub fn simulate_precruitment(cfg: &SimConfig) -> Result<SimReport> {
    expect_mode(cfg, Mode::Precruitment)?;
    simulate(cfg)
}

fn expect_mode(cfg: &SimConfig, mode: Mode) -> Result<()> {
    if cfg.mode == mode {
        Ok(())
    } else {
        Err(Error::config(format!(
            "expected mode {}, config says {}",
            mode.name(),
            cfg.mode.name()
        )))
    }
}

fn run_replication(cfg: &SimConfig, replication: u32) -> SimReport {
    match cfg.mode {
        Mode::Baseline => baseline::run(cfg, replication),
        Mode::Abandonment => abandonment::run(cfg, replication),
        Mode::Tiered => tiered::run(cfg, replication),
        Mode::Precruitment => precruit::run(cfg, replication),
    }
}

/// Runs `n >= 2` independent replications and aggregates them.
///
/// Replication `i` uses random streams keyed by the base seed and `i`, so the
/// result does not depend on thread count or scheduling.
pub fn replicate(cfg: &SimConfig, n: u32) -> Result<SimReport> {
    if n < 2 {
        return Err(Error::config("replicate needs at least 2 replications"));
    }
    cfg.validate()?;
    #[cfg(feature = "parallel")]
    let reports: Vec<SimReport> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(|i| run_replication(cfg, i)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let reports: Vec<SimReport> = (0..n).map(|i| run_replication(cfg, i)).collect();
    aggregate(&reports)
}

/// Combines independent reports of the same scenario.
///
/// Counts are summed. Every [`Stat`] becomes the mean of the per-report point
/// estimates with the across-report standard error. Quantiles are averaged.
/// The result does not depend on the order of `reports`.
pub fn aggregate(reports: &[SimReport]) -> Result<SimReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::config("nothing to aggregate"))?;
    if reports.len() < 2 {
        return Err(Error::config("aggregate needs at least 2 reports"));
    }
    for r in reports {
        if r.mode != first.mode || r.horizon != first.horizon || r.pool_size != first.pool_size {
            return Err(Error::config(
                "reports differ in mode, horizon or pool size and cannot be combined",
            ));
        }
        let tiers = |x: &SimReport| x.per_tier.as_ref().map(|t| t.iter().map(|t| t.size).collect::<Vec<_>>());
        if tiers(r) != tiers(first) {
            return Err(Error::config("reports have different tier layouts"));
        }
    }

    let stat = |f: &dyn Fn(&SimReport) -> Stat| across(reports.iter().map(|r| f(r).mean));
    let opt_stat = |f: &dyn Fn(&SimReport) -> Option<Stat>| -> Option<Stat> {
        let means: Option<Vec<f64>> = reports.iter().map(|r| f(r).map(|s| s.mean)).collect();
        means.map(across)
    };
    let count = |f: &dyn Fn(&SimReport) -> u64| reports.iter().map(f).sum::<u64>();
    let opt_count = |f: &dyn Fn(&SimReport) -> Option<u64>| -> Option<u64> {
        reports.iter().map(f).sum::<Option<u64>>()
    };
    let avg = |f: &dyn Fn(&SimReport) -> f64| across(reports.iter().map(f)).mean;

    let per_tier = first.per_tier.as_ref().map(|tiers| {
        (0..tiers.len())
            .map(|i| {
                let tier = |r: &SimReport| r.per_tier.as_ref().expect("checked layout")[i].clone();
                let all: Vec<TierReport> = reports.iter().map(tier).collect();
                TierReport {
                    tier: tiers[i].tier,
                    size: tiers[i].size,
                    arrivals: all.iter().map(|t| t.arrivals).sum(),
                    diverted: all.iter().map(|t| t.diverted).sum(),
                    served: all.iter().map(|t| t.served).sum(),
                    passed_on: all.iter().map(|t| t.passed_on).sum(),
                    mean_idle_workers: across(all.iter().map(|t| t.mean_idle_workers.mean)),
                    cost_rate: across(all.iter().map(|t| t.cost_rate.mean)),
                }
            })
            .collect()
    });

    Ok(SimReport {
        mode: first.mode,
        seed: reports.iter().map(|r| r.seed).min().expect("non-empty"),
        replications: reports.iter().map(|r| r.replications).sum(),
        horizon: first.horizon,
        pool_size: first.pool_size,
        measured_duration: avg(&|r| r.measured_duration),
        tasks_arrived: count(&|r| r.tasks_arrived),
        served: count(&|r| r.served),
        diverted: count(&|r| r.diverted),
        missed: count(&|r| r.missed),
        empty_pool_fraction: stat(&|r| r.empty_pool_fraction),
        mean_wait: stat(&|r| r.mean_wait),
        median_wait: avg(&|r| r.median_wait),
        p90_wait: avg(&|r| r.p90_wait),
        mean_idle_workers: stat(&|r| r.mean_idle_workers),
        cost_rate: stat(&|r| r.cost_rate),
        alerts_per_task: opt_stat(&|r| r.alerts_per_task),
        miss_fraction: opt_stat(&|r| r.miss_fraction),
        unmatched_fraction: opt_stat(&|r| r.unmatched_fraction),
        wasted_worker_fraction: opt_stat(&|r| r.wasted_worker_fraction),
        precruited: opt_count(&|r| r.precruited),
        wasted: opt_count(&|r| r.wasted),
        per_tier,
    })
}

/// Mean and standard error of per-replication values, summed in sorted order
/// so the result is independent of input order.
fn across(values: impl IntoIterator<Item = f64>) -> Stat {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    Stat::from_samples(&v)
}
