//! Precruitment pipeline.
//!
//! Workers are recalled ahead of demand at rate `lambda + beta sqrt(lambda)`.
//! A recalled worker shows up after a response-latency sample and then holds
//! for at most `patience` seconds. An arriving task takes the longest-holding
//! worker and starts at once; if nobody is holding it is counted unmatched and
//! waits, first come first served, for the next worker to show up. Workers
//! whose patience runs out are dismissed and count as wasted.

use std::collections::VecDeque;

use super::config::SimConfig;
use super::report::{build_report, ReportInputs, SimReport, Tally};
use super::rng::{stream_rng, PoissonClock, ResponseSampler, Stream};
use super::window::{ArrivalClass, EventQueue, LevelTracker, Window};
use crate::optimizer::precruit_rate;

enum Event {
    Precruit,
    Available { worker: u64, batch: Option<usize> },
    Dismiss { worker: u64 },
}

struct Holding {
    id: u64,
    batch: Option<usize>,
}

struct Waiting {
    arrival: f64,
    batch: Option<usize>,
}

pub(crate) fn run(cfg: &SimConfig, replication: u32) -> SimReport {
    let p = &cfg.params;
    let mut window = Window::new(cfg);
    let batches = window.batches();
    let mut tally = Tally::new(batches);
    let mut holding_level = LevelTracker::new(0.0, batches);
    let mut arrivals = PoissonClock::new(stream_rng(cfg.seed, replication, Stream::Arrivals), p.lambda);
    let rate = precruit_rate(p.lambda, cfg.beta).expect("validated rates");
    let mut recalls = PoissonClock::new(stream_rng(cfg.seed, replication, Stream::Precruitment), rate);
    // a = 0 here: the latency stream alone drives show-up times
    let mut latency = ResponseSampler::new(cfg.seed, replication, 0.0, cfg.latency());
    let mut events: EventQueue<Event> = EventQueue::new();
    let mut holding: VecDeque<Holding> = VecDeque::new();
    let mut waiting: VecDeque<Waiting> = VecDeque::new();

    if let Some(g) = recalls.next_gap() {
        events.schedule(g, Event::Precruit);
    }
    let mut next_arrival = arrivals.next_gap();
    let mut index = 0u64;
    let mut next_worker = 0u64;
    let mut ended = false;
    let mut unresolved_tasks = 0u64;
    let mut unresolved_workers = 0u64;

    loop {
        if ended && unresolved_tasks == 0 && unresolved_workers == 0 {
            break;
        }
        let arrival_first = match (next_arrival, events.peek_time()) {
            (None, None) => break,
            (Some(a), Some(e)) => a <= e,
            (Some(_), None) => true,
            (None, Some(_)) => false,
        };
        if arrival_first {
            let t = next_arrival.expect("arrival chosen");
            let class = window.on_arrival(index, t);
            if class == ArrivalClass::End {
                next_arrival = None;
                ended = true;
                holding_level.advance(t, &window);
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
            }
            match holding.pop_front() {
                Some(worker) => {
                    holding_level.add(t, -1.0, &window);
                    if let Some(b) = batch {
                        tally.served[b] += 1.0;
                        tally.wait(b, 0.0);
                    }
                    if worker.batch.is_some() {
                        unresolved_workers -= 1;
                    }
                }
                None => {
                    if let Some(b) = batch {
                        tally.unmatched[b] += 1.0;
                        unresolved_tasks += 1;
                    }
                    waiting.push_back(Waiting { arrival: t, batch });
                }
            }
            continue;
        }

        let (t, event) = events.pop().expect("peeked");
        match event {
            Event::Precruit => {
                let batch = window.batch_at(t);
                if let Some(b) = batch {
                    tally.precruited[b] += 1.0;
                    unresolved_workers += 1;
                }
                let worker = next_worker;
                next_worker += 1;
                events.schedule(t + latency.latency(), Event::Available { worker, batch });
                // after the horizon, keep recalling only while measured tasks still wait
                if !ended || unresolved_tasks > 0 {
                    if let Some(g) = recalls.next_gap() {
                        events.schedule(t + g, Event::Precruit);
                    }
                }
            }
            Event::Available { worker, batch } => match waiting.pop_front() {
                Some(task) => {
                    if let Some(b) = task.batch {
                        tally.served[b] += 1.0;
                        tally.wait(b, t - task.arrival);
                        unresolved_tasks -= 1;
                    }
                    if batch.is_some() {
                        unresolved_workers -= 1;
                    }
                }
                None => {
                    holding_level.add(t, 1.0, &window);
                    holding.push_back(Holding { id: worker, batch });
                    events.schedule(t + cfg.patience, Event::Dismiss { worker });
                }
            },
            Event::Dismiss { worker } => {
                // FIFO with a common patience: the dismissed worker, if still
                // holding, is at the front
                if let Some(h) = holding.pop_front_if(|h| h.id == worker) {
                    holding_level.add(t, -1.0, &window);
                    if let Some(b) = h.batch {
                        tally.wasted[b] += 1.0;
                        unresolved_workers -= 1;
                    }
                }
            }
        }
    }
    if let Some(end) = window.end() {
        holding_level.advance(end, &window);
    }

    build_report(
        ReportInputs {
            mode: cfg.mode,
            seed: cfg.seed,
            horizon: cfg.horizon,
            pool_size: 0,
            wage: p.s,
            window: &window,
            idle: std::slice::from_ref(&holding_level),
            tally,
        },
        None,
    )
}
