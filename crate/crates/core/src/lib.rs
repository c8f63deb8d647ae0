//! Analytic and simulation toolkit for the retainer model of realtime crowdsourcing.
//!
//! A requester keeps `c` workers on paid retainer. Each arriving task consumes one
//! retained worker and triggers a replacement request; a task that finds the pool
//! empty is diverted and handled out of band. The pool behaves as an M/M/c/c loss
//! system, so the Erlang loss formula gives the miss probability, expected wait and
//! idle (paid) worker count.
//!
//! * [`erlang`]: closed-form loss, busy-server distribution, cost and the
//!   Stirling/Chernoff approximations used for shared pools.
//! * [`optimizer`]: pool sizing under miss-probability, wait or total-cost objectives.
//! * [`router`]: min-max traffic-intensity routing of worker groups to task types via
//!   bisection over a maximum-flow feasibility test.
//! * [`sim`]: a seeded discrete-event simulator for baseline, abandonment, tiered
//!   and precruitment variants.

pub mod erlang;
mod error;
pub mod optimizer;
mod params;
pub mod router;
pub mod sim;

pub use error::{Error, Result};
pub use params::{CostVariant, RetainerParams, Wage};
