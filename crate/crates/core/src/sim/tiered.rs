//! Cascade of retainer pools.
//!
//! A task is first offered to tier 1. The alerted worker either responds
//! within the timeout `alpha R`, serving the task, or the task moves on to the
//! next tier when the timeout expires. A task that finds a tier's pool empty is
//! diverted there; one that gets no timely response in the last tier is
//! missed. Every tier refills its own pool at rate `mu` per open slot.

use super::config::SimConfig;
use super::report::{build_report, ReportInputs, SimReport, Tally, TierReport};
use super::rng::{stream_rng, PoissonClock, RecruitmentSampler, ResponseSampler, Stream};
use super::stats::ratio_stat;
use super::window::{ArrivalClass, EventQueue, LevelTracker, Window};

enum Event {
    Refill { tier: usize },
    Offer { tier: usize, arrival: f64, batch: Option<usize> },
}

#[derive(Clone)]
struct TierTally {
    arrivals: Vec<f64>,
    diverted: Vec<f64>,
    served: Vec<f64>,
    passed: Vec<f64>,
}

impl TierTally {
    fn new(batches: usize) -> Self {
        let z = vec![0.0; batches];
        Self {
            arrivals: z.clone(),
            diverted: z.clone(),
            served: z.clone(),
            passed: z,
        }
    }
}

pub(crate) fn run(cfg: &SimConfig, replication: u32) -> SimReport {
    let p = &cfg.params;
    let sizes = cfg.tiers.clone().expect("validated tiered config");
    let mut window = Window::new(cfg);
    let batches = window.batches();
    let mut tally = Tally::new(batches);
    let mut tiers = vec![TierTally::new(batches); sizes.len()];
    let mut idle: Vec<LevelTracker> = sizes
        .iter()
        .map(|&c| LevelTracker::new(c as f64, batches))
        .collect();
    let mut recruit = RecruitmentSampler::new(
        stream_rng(cfg.seed, replication, Stream::Recruitment),
        p.mu,
        cfg.recruitment,
    );
    let mut response = ResponseSampler::new(cfg.seed, replication, p.a, cfg.latency());
    let timeout = cfg.realert_timeout();
    let mut events: EventQueue<Event> = EventQueue::new();
    let mut arrivals = PoissonClock::new(stream_rng(cfg.seed, replication, Stream::Arrivals), p.lambda);
    let mut next_arrival = arrivals.next_gap();
    let mut index = 0u64;
    let mut unresolved = 0u64;

    loop {
        let arrival_first = match (next_arrival, events.peek_time()) {
            (None, None) => break,
            (Some(a), Some(e)) => a <= e,
            (Some(_), None) => true,
            (None, Some(_)) => false,
        };
        let (t, event) = if arrival_first {
            let t = next_arrival.expect("arrival chosen");
            let class = window.on_arrival(index, t);
            if class == ArrivalClass::End {
                next_arrival = None;
                if unresolved == 0 {
                    break;
                }
                continue;
            }
            index += 1;
            next_arrival = arrivals.next_gap().map(|g| t + g);
            let batch = match class {
                ArrivalClass::Measured(b) => Some(b),
                _ => None,
            };
            if let Some(b) = batch {
                tally.tasks[b] += 1.0;
                unresolved += 1;
            }
            (t, Event::Offer { tier: 0, arrival: t, batch })
        } else {
            events.pop().expect("peeked")
        };

        match event {
            Event::Refill { tier } => idle[tier].add(t, 1.0, &window),
            Event::Offer { tier, arrival, batch } => {
                if let Some(b) = batch {
                    tiers[tier].arrivals[b] += 1.0;
                }
                if idle[tier].level() == 0.0 {
                    let wait = t - arrival + recruit.sample();
                    if let Some(b) = batch {
                        tiers[tier].diverted[b] += 1.0;
                        tally.diverted[b] += 1.0;
                        tally.wait(b, wait);
                        unresolved -= 1;
                    }
                } else {
                    idle[tier].add(t, -1.0, &window);
                    events.schedule(t + recruit.sample(), Event::Refill { tier });
                    match response.draw().filter(|&l| l <= timeout) {
                        Some(latency) => {
                            if let Some(b) = batch {
                                tiers[tier].served[b] += 1.0;
                                tally.served[b] += 1.0;
                                tally.wait(b, t - arrival + latency);
                                unresolved -= 1;
                            }
                        }
                        None => {
                            if let Some(b) = batch {
                                tiers[tier].passed[b] += 1.0;
                            }
                            if tier + 1 < sizes.len() && timeout.is_finite() {
                                events.schedule(
                                    t + timeout,
                                    Event::Offer {
                                        tier: tier + 1,
                                        arrival,
                                        batch,
                                    },
                                );
                            } else if let Some(b) = batch {
                                tally.missed[b] += 1.0;
                                unresolved -= 1;
                            }
                        }
                    }
                }
            }
        }
        if next_arrival.is_none() && unresolved == 0 {
            break;
        }
    }
    if let Some(end) = window.end() {
        for tracker in &mut idle {
            tracker.advance(end, &window);
        }
    }

    let durations = window.durations();
    let sum = |v: &[f64]| v.iter().sum::<f64>() as u64;
    let per_tier = sizes
        .iter()
        .zip(&tiers)
        .zip(&idle)
        .enumerate()
        .map(|(i, ((&size, tt), tracker))| {
            let mean_idle = ratio_stat(&tracker.acc, &durations);
            TierReport {
                tier: i as u32 + 1,
                size,
                arrivals: sum(&tt.arrivals),
                diverted: sum(&tt.diverted),
                served: sum(&tt.served),
                passed_on: sum(&tt.passed),
                mean_idle_workers: mean_idle,
                cost_rate: mean_idle.scaled(p.s),
            }
        })
        .collect();

    build_report(
        ReportInputs {
            mode: cfg.mode,
            seed: cfg.seed,
            horizon: cfg.horizon,
            pool_size: sizes.iter().sum(),
            wage: p.s,
            window: &window,
            idle: &idle,
            tally,
        },
        Some(per_tier),
    )
}
