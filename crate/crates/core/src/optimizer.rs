//! Retainer pool sizing.
//!
//! Constraint modes (miss probability, expected wait, shared pools) rely on
//! `pi(c)` being strictly decreasing in `c`: bracket by doubling from
//! `ceil(rho)`, where the loss curve has its knee, then bisect on integers.
//! Cost minimisation scans upward from `c = 0` and stops once the wage term
//! alone, `s (c - rho)`, exceeds the best objective seen.

use serde::{Deserialize, Serialize};

use crate::erlang::{self, cost_from_terms, LossRecurrence};
use crate::{CostVariant, Error, Result, RetainerParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binding {
    MissProbability,
    WaitTime,
    Cost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingResult {
    pub c_star: u64,
    /// `erlang_loss(rho, c_star)`.
    pub achieved_loss: f64,
    /// Expected wait in seconds; `None` when only `rho` was supplied.
    pub achieved_wait: Option<f64>,
    /// Objective value in cost mode.
    pub objective: Option<f64>,
    pub binding_constraint: Binding,
    /// Set when the wage is zero but misses cost money, so no finite pool is
    /// optimal; `c_star` is then the smallest pool with loss below machine epsilon.
    #[serde(default)]
    pub unbounded: bool,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("traffic intensity must be finite and >= 0, got {rho}")))
    }
}

/// Smallest `c` with `pi(c) <= p_max`.
pub fn min_pool_for_miss_prob(rho: f64, p_max: f64) -> Result<SizingResult> {
    check_rho(rho)?;
    if !(p_max > 0.0 && p_max <= 1.0) {
        return Err(Error::domain(format!(
            "miss-probability target must lie in (0, 1], got {p_max}"
        )));
    }
    let c_star = smallest_pool_below(rho, p_max)?;
    Ok(SizingResult {
        c_star,
        achieved_loss: erlang::erlang_loss(rho, c_star)?,
        achieved_wait: None,
        objective: None,
        binding_constraint: Binding::MissProbability,
        unbounded: false,
    })
}

fn smallest_pool_below(rho: f64, p_max: f64) -> Result<u64> {
    let ok = |c: u64| erlang::erlang_loss(rho, c).map(|b| b <= p_max);
    if ok(0)? {
        return Ok(0);
    }
    // invariant: lo violates, hi satisfies
    let mut lo = 0u64;
    let mut hi = (rho.ceil() as u64).max(1);
    while !ok(hi)? {
        lo = hi;
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| Error::domain("pool size bracket overflowed"))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `c` whose expected wait `pi(c) / mu` is at most `w_max` seconds.
///
/// With `lambda = 0` no task ever waits, so the empty pool is returned with a
/// wait of zero.
pub fn min_pool_for_wait(lambda: f64, mu: f64, w_max: f64) -> Result<SizingResult> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!("mu must be > 0, got {mu}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("lambda must be >= 0, got {lambda}")));
    }
    if !(w_max > 0.0) {
        return Err(Error::domain(format!("maximum wait must be > 0, got {w_max}")));
    }
    let rho = lambda / mu;
    let (c_star, achieved_wait) = if lambda == 0.0 {
        (0, 0.0)
    } else {
        let p = mu * w_max;
        let c = if p >= 1.0 { 0 } else { smallest_pool_below(rho, p)? };
        (c, erlang::expected_wait(lambda, mu, c)?)
    };
    Ok(SizingResult {
        c_star,
        achieved_loss: erlang::erlang_loss(rho, c_star)?,
        achieved_wait: Some(achieved_wait),
        objective: None,
        binding_constraint: Binding::WaitTime,
        unbounded: false,
    })
}

/// Pool size minimising [`erlang::total_cost`]; ties go to the smaller pool.
pub fn optimize_total_cost(params: &RetainerParams, variant: CostVariant) -> Result<SizingResult> {
    params.validate()?;
    let rho = params.rho();
    let miss_weight = match variant {
        CostVariant::PerTask => params.c_task,
        CostVariant::PerUnitTime => params.lambda * params.c_task,
    };

    if params.s == 0.0 {
        let (c_star, unbounded) = if miss_weight == 0.0 || rho == 0.0 {
            (0, false)
        } else {
            (smallest_pool_below(rho, f64::EPSILON * 0.5)?, true)
        };
        let achieved_loss = erlang::erlang_loss(rho, c_star)?;
        return Ok(SizingResult {
            c_star,
            achieved_loss,
            achieved_wait: Some(achieved_loss / params.mu),
            objective: Some(erlang::total_cost(params, c_star, variant)?),
            binding_constraint: Binding::Cost,
            unbounded,
        });
    }

    let mut best = (0u64, f64::INFINITY, 1.0);
    for (c, loss, busy) in LossRecurrence::new(rho) {
        // every term beyond the wage is non-negative and idle >= c - rho
        if params.s * (c as f64 - rho) > best.1 {
            break;
        }
        let obj = cost_from_terms(params, c, loss, busy, variant);
        if obj < best.1 {
            best = (c, obj, loss);
        }
    }
    let (c_star, objective, achieved_loss) = best;
    Ok(SizingResult {
        c_star,
        achieved_loss,
        achieved_wait: Some(achieved_loss / params.mu),
        objective: Some(objective),
        binding_constraint: Binding::Cost,
        unbounded: false,
    })
}

/// Size of one merged pool serving `k` streams of intensity `rho` each.
pub fn shared_pool_size(rho: f64, k: u64, p_max: f64) -> Result<SizingResult> {
    if k == 0 {
        return Err(Error::domain("number of merged requesters k must be >= 1"));
    }
    check_rho(rho)?;
    min_pool_for_miss_prob(k as f64 * rho, p_max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BufferRow {
    pub k: u64,
    /// Minimal shared pool for intensity `k rho`.
    pub c_star: u64,
    /// Buffer fraction: `c_star = (1 + epsilon) k rho`.
    pub epsilon: f64,
    /// Extra workers above the mean load, `epsilon k rho`.
    pub buffer: f64,
    /// `epsilon` outside `(0, 1)`, where the square-root argument does not apply.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BufferScalingReport {
    pub rho: f64,
    pub p_max: f64,
    pub rows: Vec<BufferRow>,
    /// Least-squares slope of `ln epsilon` against `ln k` over unflagged rows.
    pub slope: Option<f64>,
}

/// Buffer fraction needed by a merged pool as the number of requesters grows.
///
/// For each `k` the pool is sized exactly; since pools are integers, the
/// smallest admissible `epsilon` is the one that lands `(1 + epsilon) k rho`
/// on the minimal integer pool.
pub fn buffer_scaling_report(rho: f64, p_max: f64, k_values: &[u64]) -> Result<BufferScalingReport> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain(format!("rho must be > 0, got {rho}")));
    }
    let mut rows = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let load = k as f64 * rho;
        let c_star = shared_pool_size(rho, k, p_max)?.c_star;
        let epsilon = c_star as f64 / load - 1.0;
        rows.push(BufferRow {
            k,
            c_star,
            epsilon,
            buffer: c_star as f64 - load,
            flagged: !(epsilon > 0.0 && epsilon < 1.0),
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| !r.flagged)
        .map(|r| ((r.k as f64).ln(), r.epsilon.ln()))
        .collect();
    Ok(BufferScalingReport {
        rho,
        p_max,
        slope: least_squares_slope(&points),
        rows,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Precruitment rate `lambda + beta sqrt(lambda)` in workers per second.
pub fn precruit_rate(lambda: f64, beta: f64) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("lambda must be >= 0, got {lambda}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!("beta must be >= 0, got {beta}")));
    }
    Ok(lambda + beta * lambda.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erlang::erlang_loss;

    fn linear_scan(rho: f64, p: f64) -> u64 {
        (0..).find(|&c| erlang_loss(rho, c).unwrap() <= p).unwrap()
    }

    #[test]
    fn miss_prob_examples() {
        assert_eq!(min_pool_for_miss_prob(0.5, 0.05).unwrap().c_star, 3);
        assert_eq!(min_pool_for_miss_prob(0.0, 0.5).unwrap().c_star, 1);
        let r = min_pool_for_miss_prob(1.0, 0.0625).unwrap();
        assert_eq!(r.c_star, 3);
        assert_eq!(r.achieved_loss, erlang_loss(1.0, 3).unwrap());
        assert_eq!(r.binding_constraint, Binding::MissProbability);
        assert_eq!(min_pool_for_miss_prob(3.0, 1.0).unwrap().c_star, 0);
    }

    #[test]
    fn miss_prob_rejects_bad_targets() {
        assert!(matches!(min_pool_for_miss_prob(1.0, 0.0), Err(Error::Domain(_))));
        assert!(min_pool_for_miss_prob(1.0, -0.1).is_err());
        assert!(min_pool_for_miss_prob(1.0, 1.5).is_err());
        assert!(min_pool_for_miss_prob(-1.0, 0.1).is_err());
    }

    #[test]
    fn miss_prob_minimality_on_grid() {
        for &rho in &[0.01, 0.3, 1.0, 4.5, 17.0, 250.0] {
            for &p in &[0.5, 0.1, 1e-3, 1e-9] {
                let c = min_pool_for_miss_prob(rho, p).unwrap().c_star;
                assert_eq!(c, linear_scan(rho, p), "rho={rho} p={p}");
                assert!(erlang_loss(rho, c).unwrap() <= p);
                if c > 0 {
                    assert!(erlang_loss(rho, c - 1).unwrap() > p);
                }
            }
        }
    }

    #[test]
    fn wait_examples() {
        let r = min_pool_for_wait(1.0, 1.0, 0.5).unwrap();
        assert_eq!(r.c_star, 1);
        assert_eq!(r.achieved_wait, Some(0.5));
        assert_eq!(r.binding_constraint, Binding::WaitTime);

        let r = min_pool_for_wait(0.0, 1.0, 0.01).unwrap();
        assert_eq!(r.c_star, 0);
        assert_eq!(r.achieved_wait, Some(0.0));

        // mean recruitment time already within budget
        assert_eq!(min_pool_for_wait(5.0, 1.0, 2.0).unwrap().c_star, 0);

        let a = min_pool_for_wait(1.0, 1.0 / 6.0, 0.3).unwrap().c_star;
        assert_eq!(a, min_pool_for_miss_prob(6.0, 0.05).unwrap().c_star);
        assert!(min_pool_for_wait(1.0, 1.0, 0.0).is_err());
        assert!(min_pool_for_wait(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn cost_examples() {
        let p = RetainerParams::new(1.0, 1.0, 0).with_costs(0.7, 0.0);
        assert_eq!(optimize_total_cost(&p, CostVariant::PerTask).unwrap().c_star, 0);

        let p = RetainerParams::new(1.0, 1.0, 0).with_costs(1.0, 10.0);
        let r = optimize_total_cost(&p, CostVariant::PerTask).unwrap();
        let brute = (0..=50)
            .map(|c| (c, crate::erlang::total_cost(&p, c, CostVariant::PerTask).unwrap()))
            .fold((0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
        assert_eq!(r.c_star, brute.0);
        assert_eq!(r.objective, Some(brute.1));
        assert_eq!(r.binding_constraint, Binding::Cost);
    }

    #[test]
    fn cost_minimiser_moves_right_with_penalty() {
        let mut last = 0;
        for c_task in [1.0, 5.0, 10.0, 20.0] {
            let p = RetainerParams::new(1.0, 1.0, 0).with_costs(1.0, c_task);
            let c = optimize_total_cost(&p, CostVariant::PerTask).unwrap().c_star;
            assert!(c >= last);
            last = c;
        }
        assert!(last > 0);
    }

    #[test]
    fn zero_wage_is_flagged_unbounded() {
        let p = RetainerParams::new(2.0, 1.0, 0).with_costs(0.0, 5.0);
        let r = optimize_total_cost(&p, CostVariant::PerTask).unwrap();
        assert!(r.unbounded);
        assert!(r.achieved_loss < f64::EPSILON);
        assert!(erlang_loss(2.0, r.c_star - 1).unwrap() >= f64::EPSILON * 0.5);

        let free = RetainerParams::new(2.0, 1.0, 0);
        let r = optimize_total_cost(&free, CostVariant::PerTask).unwrap();
        assert!(!r.unbounded);
        assert_eq!(r.c_star, 0);
    }

    #[test]
    fn shared_pool_examples() {
        assert_eq!(shared_pool_size(1.0, 1, 0.0625).unwrap().c_star, 3);
        let single = min_pool_for_miss_prob(10.0, 1e-3).unwrap().c_star;
        assert!(shared_pool_size(10.0, 4, 1e-3).unwrap().c_star < 4 * single);
        assert_eq!(shared_pool_size(0.0, 5, 0.5).unwrap().c_star, 1);
        assert!(shared_pool_size(1.0, 0, 0.5).is_err());
    }

    #[test]
    fn buffer_report_shrinks_with_k() {
        let rep = buffer_scaling_report(10.0, 1e-3, &[1, 4, 16, 64]).unwrap();
        let eps: Vec<f64> = rep.rows.iter().map(|r| r.epsilon).collect();
        assert!(eps.windows(2).all(|w| w[1] < w[0]), "{eps:?}");
        let slope = rep.slope.unwrap();
        assert!((slope + 0.5).abs() <= 0.15, "slope {slope}");

        let k1 = &rep.rows[0];
        let single = min_pool_for_miss_prob(10.0, 1e-3).unwrap().c_star;
        assert_eq!(k1.c_star, single);
        assert!((k1.epsilon - (single as f64 / 10.0 - 1.0)).abs() < 1e-15);
        assert!((k1.buffer - k1.epsilon * 10.0).abs() < 1e-12);
    }

    #[test]
    fn buffer_report_flags_large_epsilon() {
        let rep = buffer_scaling_report(0.5, 1e-6, &[1, 2]).unwrap();
        assert!(rep.rows[0].flagged);
        assert!(rep.rows[0].epsilon >= 1.0);
    }

    #[test]
    fn precruit_examples() {
        assert_eq!(precruit_rate(4.0, 2.0).unwrap(), 8.0);
        assert_eq!(precruit_rate(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(precruit_rate(9.0, 0.0).unwrap(), 9.0);
        assert!(precruit_rate(-1.0, 1.0).is_err());
        assert!(precruit_rate(1.0, -1.0).is_err());
    }
}
