use retainer_core::erlang::{erlang_loss, expected_busy, expected_idle, expected_wait, retainer_cost_rate, total_cost};
use retainer_core::optimizer::optimize_total_cost;
use retainer_core::sim::{simulate, Horizon, SimConfig};
use retainer_core::{CostVariant, Error, Result, RetainerParams, Wage};
use serde::Serialize;

/// Largest pool a curve may span; keeps a stray input from freezing the page.
pub const MAX_POOL: u64 = 500;

/// Largest simulation the page may request.
pub const MAX_TASKS: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoolPoint {
    pub c: u64,
    pub loss: f64,
    pub wait: f64,
    pub idle: f64,
    /// Currency per second.
    pub cost_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoolCurves {
    pub rho: f64,
    pub points: Vec<PoolPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalCostCurve {
    pub c: Vec<u64>,
    pub total_cost: Vec<f64>,
    pub c_star: u64,
    pub min_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub simulated: f64,
    pub se: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    /// Tasks after the warmup period.
    pub tasks: u64,
    pub served: u64,
    pub diverted: u64,
    pub empty_pool_fraction: Estimate,
    pub mean_wait: Estimate,
    pub mean_idle_workers: Estimate,
}

fn check_pool(c_max: u64) -> Result<()> {
    if c_max > MAX_POOL {
        return Err(Error::Domain(format!("pool size is capped at {MAX_POOL}, got {c_max}")));
    }
    Ok(())
}

fn params(lambda: f64, mu: f64, wage_per_minute: f64, c_task: f64) -> Result<RetainerParams> {
    let p = RetainerParams::new(lambda, mu, 0).with_costs(Wage::per_minute(wage_per_minute).as_per_second(), c_task);
    p.validate()?;
    Ok(p)
}

pub fn pool_curves(lambda: f64, mu: f64, wage_per_minute: f64, c_max: u64) -> Result<PoolCurves> {
    check_pool(c_max)?;
    let p = params(lambda, mu, wage_per_minute, 0.0)?;
    let rho = p.rho();
    let points = (0..=c_max)
        .map(|c| {
            Ok(PoolPoint {
                c,
                loss: erlang_loss(rho, c)?,
                wait: expected_wait(lambda, mu, c)?,
                idle: expected_idle(rho, c)?,
                cost_rate: retainer_cost_rate(p.s, rho, c)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PoolCurves { rho, points })
}

pub fn total_cost_curve(lambda: f64, mu: f64, wage_per_minute: f64, c_task: f64, c_max: u64) -> Result<TotalCostCurve> {
    check_pool(c_max)?;
    let p = params(lambda, mu, wage_per_minute, c_task)?;
    let best = optimize_total_cost(&p, CostVariant::PerTask)?;
    let c: Vec<u64> = (0..=c_max).collect();
    let costs: Vec<f64> = c
        .iter()
        .map(|&c| total_cost(&p, c, CostVariant::PerTask))
        .collect::<Result<_>>()?;
    Ok(TotalCostCurve {
        c,
        total_cost: costs,
        c_star: best.c_star,
        min_cost: total_cost(&p, best.c_star, CostVariant::PerTask)?,
    })
}

pub fn simulate_pool(lambda: f64, mu: f64, c: u64, tasks: u64, seed: u64) -> Result<SimSummary> {
    check_pool(c)?;
    if tasks > MAX_TASKS {
        return Err(Error::Domain(format!("at most {MAX_TASKS} tasks per run, got {tasks}")));
    }
    let p = RetainerParams::new(lambda, mu, c);
    let r = simulate(&SimConfig::new(p, Horizon::Tasks(tasks), seed))?;
    let rho = p.rho();
    let estimate = |s: retainer_core::sim::Stat, analytic: f64| Estimate {
        simulated: s.mean,
        se: s.se,
        analytic,
    };
    Ok(SimSummary {
        tasks: r.tasks_arrived,
        served: r.served,
        diverted: r.diverted,
        empty_pool_fraction: estimate(r.empty_pool_fraction, erlang_loss(rho, c)?),
        mean_wait: estimate(r.mean_wait, expected_wait(lambda, mu, c)?),
        mean_idle_workers: estimate(r.mean_idle_workers, c as f64 - expected_busy(rho, c)?),
    })
}
