//! Closed-form quantities of the M/M/c/c retainer pool.
//!
//! Pool slots that are waiting for a replacement worker play the role of busy
//! servers: a task takes a retained worker and the system issues a recruitment
//! request that completes at rate `mu`. With traffic intensity `rho = lambda / mu`
//! the probability of an empty pool is the Erlang loss formula
//!
//! ```text
//! pi(c) = (rho^c / c!) / sum_{i=0..c} rho^i / i!
//! ```
//!
//! Nothing here evaluates a factorial. The loss uses the forward recurrence
//! `B(0) = 1, B(j) = rho B(j-1) / (j + rho B(j-1))`, the busy-server distribution
//! is built from term ratios anchored at its mode, and the Stirling/Chernoff
//! approximations are evaluated as logarithms.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{CostVariant, Error, Result, RetainerParams};

fn check_rho(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("traffic intensity must be finite and >= 0, got {rho}")))
    }
}

/// Probability that all `c` retained workers are out, `pi(c)`.
///
/// `c = 0` always yields 1, including `rho = 0`. The result only underflows to
/// zero when the true value is below the smallest positive `f64`; use
/// [`ln_erlang_loss`] for those tails.
pub fn erlang_loss(rho: f64, c: u64) -> Result<f64> {
    check_rho(rho)?;
    let mut b = 1.0;
    for j in 1..=c {
        let rb = rho * b;
        b = rb / (j as f64 + rb);
    }
    Ok(b)
}

/// Natural log of [`erlang_loss`], finite for every `rho > 0`.
///
/// Runs the same recurrence on `ln(1 / B(j))`, which obeys
/// `ln(1/B(j)) = softplus(ln(j / rho) + ln(1/B(j-1)))`.
pub fn ln_erlang_loss(rho: f64, c: u64) -> Result<f64> {
    check_rho(rho)?;
    if c == 0 {
        return Ok(0.0);
    }
    if rho == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let ln_rho = rho.ln();
    let mut ln_inv = 0.0_f64;
    for j in 1..=c {
        ln_inv = softplus((j as f64).ln() - ln_rho + ln_inv);
    }
    Ok(-ln_inv)
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `pi(0), pi(1), ..., pi(c_max)` as pool sizes, one recurrence pass.
pub fn loss_by_pool_size(rho: f64, c_max: u64) -> Result<Vec<f64>> {
    check_rho(rho)?;
    let mut out = Vec::with_capacity(c_max as usize + 1);
    let mut b = 1.0;
    out.push(b);
    for j in 1..=c_max {
        let rb = rho * b;
        b = rb / (j as f64 + rb);
        out.push(b);
    }
    Ok(out)
}

/// Stationary distribution of the number of outstanding recruitments (busy
/// servers), entries `0..=c`.
pub fn busy_distribution(rho: f64, c: u64) -> Result<Vec<f64>> {
    check_rho(rho)?;
    let n = c as usize;
    let mut terms = vec![0.0; n + 1];
    // Unnormalised rho^i / i! relative to the largest term.
    let mode = (rho.floor() as u64).min(c) as usize;
    terms[mode] = 1.0;
    for i in mode + 1..=n {
        terms[i] = terms[i - 1] * rho / i as f64;
    }
    for i in (1..=mode).rev() {
        terms[i - 1] = terms[i] * i as f64 / rho;
    }
    let total: f64 = terms.iter().sum();
    for t in &mut terms {
        *t /= total;
    }
    Ok(terms)
}

/// Expected number of outstanding recruitments, `rho (1 - pi(c))`.
///
/// Uses `1 - B(c) = c / (c + rho B(c-1))` so heavy load does not cancel.
pub fn expected_busy(rho: f64, c: u64) -> Result<f64> {
    if c == 0 {
        check_rho(rho)?;
        return Ok(0.0);
    }
    let prev = erlang_loss(rho, c - 1)?;
    let cf = c as f64;
    Ok(rho * cf / (cf + rho * prev))
}

/// Expected number of workers waiting (paid) on retainer, `c - rho (1 - pi(c))`.
///
/// Summed as `sum (c - i) pi(i)` over the busy distribution, which stays
/// accurate when almost every slot is outstanding.
pub fn expected_idle(rho: f64, c: u64) -> Result<f64> {
    Ok(idle_from_distribution(&busy_distribution(rho, c)?))
}

fn idle_from_distribution(dist: &[f64]) -> f64 {
    let c = dist.len() - 1;
    dist.iter()
        .enumerate()
        .map(|(i, p)| (c - i) as f64 * p)
        .sum()
}

/// Expected wait of a task: `pi(c) / mu`.
pub fn expected_wait(lambda: f64, mu: f64, c: u64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!("recruitment rate mu must be > 0, got {mu}")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::domain(format!("arrival rate must be >= 0, got {lambda}")));
    }
    Ok(erlang_loss(lambda / mu, c)? / mu)
}

/// Wage paid per unit time for idle retained workers.
pub fn retainer_cost_rate(s: f64, rho: f64, c: u64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::domain(format!("wage must be >= 0, got {s}")));
    }
    Ok(s * expected_idle(rho, c)?)
}

/// Walks pool sizes `0, 1, 2, ...` yielding `(c, pi(c), expected busy)`.
///
/// Shared by [`total_cost`] and the optimizer scan so both see identical values.
#[derive(Debug, Clone)]
pub(crate) struct LossRecurrence {
    rho: f64,
    next_c: u64,
    prev: f64,
}

impl LossRecurrence {
    pub(crate) fn new(rho: f64) -> Self {
        Self {
            rho,
            next_c: 0,
            prev: 1.0,
        }
    }
}

impl Iterator for LossRecurrence {
    type Item = (u64, f64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let c = self.next_c;
        self.next_c += 1;
        if c == 0 {
            return Some((0, 1.0, 0.0));
        }
        let cf = c as f64;
        let rb = self.rho * self.prev;
        let loss = rb / (cf + rb);
        let busy = self.rho * cf / (cf + rb);
        self.prev = loss;
        Some((c, loss, busy))
    }
}

pub(crate) fn cost_from_terms(
    params: &RetainerParams,
    c: u64,
    loss: f64,
    busy: f64,
    variant: CostVariant,
) -> f64 {
    let miss = match variant {
        CostVariant::PerTask => params.c_task * loss,
        CostVariant::PerUnitTime => params.lambda * params.c_task * loss,
    };
    miss + params.s * (c as f64 - busy)
}

/// Requester total cost at pool size `c` (the `params.c` field is ignored).
///
/// [`CostVariant::PerTask`] adds the per-task miss penalty to the per-second
/// retainer wage verbatim; [`CostVariant::PerUnitTime`] first weights the
/// penalty by `lambda` so both terms are currency per second.
pub fn total_cost(params: &RetainerParams, c: u64, variant: CostVariant) -> Result<f64> {
    params.validate()?;
    let (_, loss, busy) = LossRecurrence::new(params.rho())
        .nth(c as usize)
        .expect("unbounded iterator");
    Ok(cost_from_terms(params, c, loss, busy, variant))
}

fn check_approx_args(rho: f64, c: u64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain(format!("approximation needs rho > 0, got {rho}")));
    }
    if c == 0 {
        return Err(Error::domain("approximation needs c >= 1"));
    }
    Ok(())
}

fn ln_stirling_core(rho: f64, c: f64) -> f64 {
    // ln( e^{-rho} (e rho / c)^c )
    -rho + c * (1.0 + rho.ln() - c.ln())
}

/// Stirling-style estimate of `pi(c)` in its published form,
/// `e^{-rho} sqrt(2 pi c) (e rho / c)^c`.
///
/// This is an estimate, not a probability; it is about `sqrt(2 pi rho)` at `c = rho`.
/// Stirling's formula puts `sqrt(2 pi c)` in the denominator, so this form
/// exceeds [`approx_loss_corrected`] by exactly `2 pi c`.
pub fn approx_loss(rho: f64, c: u64) -> Result<f64> {
    check_approx_args(rho, c)?;
    let c = c as f64;
    Ok((ln_stirling_core(rho, c) + 0.5 * (2.0 * PI * c).ln()).exp())
}

/// `e^{-rho} (e rho / c)^c / sqrt(2 pi c)`, i.e. `pi(0) ~ e^{-rho}` combined with
/// Stirling's `c! ~ sqrt(2 pi c) (c/e)^c`.
pub fn approx_loss_corrected(rho: f64, c: u64) -> Result<f64> {
    check_approx_args(rho, c)?;
    let c = c as f64;
    Ok((ln_stirling_core(rho, c) - 0.5 * (2.0 * PI * c).ln()).exp())
}

/// Loss of `k` merged pools, each with intensity `rho` and size `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedLoss {
    /// `erlang_loss(k rho, k c)`.
    pub exact: f64,
    /// `sqrt(2 pi k c) (e^{-rho} (e rho / c)^c)^k`.
    pub approx: f64,
    /// Same with the square-root factor divided out.
    pub approx_corrected: f64,
}

pub fn combined_pool_loss(rho: f64, c: u64, k: u64) -> Result<CombinedLoss> {
    check_rho(rho)?;
    if k == 0 {
        return Err(Error::domain("number of merged pools k must be >= 1"));
    }
    if c == 0 {
        return Err(Error::domain("per-requester pool size c must be >= 1"));
    }
    let kc = k
        .checked_mul(c)
        .ok_or_else(|| Error::domain("k * c overflows"))?;
    let exact = erlang_loss(k as f64 * rho, kc)?;
    // rho = 0 drives the log to -inf, so both estimates come out as 0
    let base = k as f64 * ln_stirling_core(rho, c as f64);
    let half_ln = 0.5 * (2.0 * PI * kc as f64).ln();
    Ok(CombinedLoss {
        exact,
        approx: (base + half_ln).exp(),
        approx_corrected: (base - half_ln).exp(),
    })
}

/// Empty-pool estimate with a buffer of `epsilon rho` workers above `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffEstimate {
    /// `(e^eps / (1 + eps)^(1 + eps))^rho`
    pub chernoff: f64,
    /// `e^{-eps^2 rho / 3}`
    pub simplified: f64,
}

pub fn chernoff_loss_estimate(epsilon: f64, rho: f64) -> Result<ChernoffEstimate> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain(format!("rho must be > 0, got {rho}")));
    }
    let ln_chernoff = rho * (epsilon - (1.0 + epsilon) * epsilon.ln_1p());
    Ok(ChernoffEstimate {
        chernoff: ln_chernoff.exp(),
        simplified: (-epsilon * epsilon * rho / 3.0).exp(),
    })
}

/// Conservative miss probability with abandonment: `min(1, a + pi(c))`.
pub fn abandonment_adjusted_loss(a: f64, rho: f64, c: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::domain(format!("abandonment fraction must lie in [0, 1], got {a}")));
    }
    Ok((a + erlang_loss(rho, c)?).min(1.0))
}

/// Everything the closed forms say about one pool configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolMetrics {
    pub rho: f64,
    pub c: u64,
    pub loss_prob: f64,
    pub busy_dist: Vec<f64>,
    pub expected_busy: f64,
    pub expected_idle: f64,
    pub expected_wait: f64,
    pub retainer_cost_rate: f64,
    pub total_cost: f64,
    pub cost_variant: CostVariant,
}

impl PoolMetrics {
    pub fn compute(params: &RetainerParams, variant: CostVariant) -> Result<Self> {
        params.validate()?;
        let rho = params.rho();
        let c = params.c;
        let loss_prob = erlang_loss(rho, c)?;
        let busy_dist = busy_distribution(rho, c)?;
        let expected_busy = expected_busy(rho, c)?;
        let expected_idle = idle_from_distribution(&busy_dist);
        Ok(Self {
            rho,
            c,
            loss_prob,
            busy_dist,
            expected_busy,
            expected_idle,
            expected_wait: loss_prob / params.mu,
            retainer_cost_rate: params.s * expected_idle,
            total_cost: total_cost(params, c, variant)?,
            cost_variant: variant,
        })
    }
}
