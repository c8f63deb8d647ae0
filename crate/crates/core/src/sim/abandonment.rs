//! Retainer pool whose alerted workers may never respond.
//!
//! A task takes a worker from the pool and alerts them. If nobody has responded
//! `alpha R` seconds after the latest alert, another pooled worker is alerted,
//! up to `max_realerts` times; after that the task is missed. Every alert pulls
//! a worker out of the pool and triggers a replacement request, so re-alerts
//! add load to the pool. The first response from any alerted worker serves the
//! task; the wait runs from arrival to that response.

use std::collections::HashMap;

use super::config::SimConfig;
use super::report::{build_report, ReportInputs, SimReport, Tally};
use super::rng::{stream_rng, PoissonClock, RecruitmentSampler, ResponseSampler, Stream};
use super::window::{ArrivalClass, EventQueue, LevelTracker, Window};

enum Event {
    Refill,
    Response { task: u64 },
    Timeout { task: u64, alert: u32 },
}

struct Active {
    arrival: f64,
    batch: Option<usize>,
    alerts: u32,
}

struct Engine<'a> {
    cfg: &'a SimConfig,
    window: Window,
    tally: Tally,
    idle: LevelTracker,
    events: EventQueue<Event>,
    recruit: RecruitmentSampler,
    response: ResponseSampler,
    timeout: f64,
    active: HashMap<u64, Active>,
    unresolved_measured: u64,
}

pub(crate) fn run(cfg: &SimConfig, replication: u32) -> SimReport {
    let p = &cfg.params;
    let window = Window::new(cfg);
    let batches = window.batches();
    let mut eng = Engine {
        cfg,
        tally: Tally::new(batches),
        idle: LevelTracker::new(p.c as f64, batches),
        window,
        events: EventQueue::new(),
        recruit: RecruitmentSampler::new(
            stream_rng(cfg.seed, replication, Stream::Recruitment),
            p.mu,
            cfg.recruitment,
        ),
        response: ResponseSampler::new(cfg.seed, replication, p.a, cfg.latency()),
        timeout: cfg.realert_timeout(),
        active: HashMap::new(),
        unresolved_measured: 0,
    };
    let mut arrivals = PoissonClock::new(stream_rng(cfg.seed, replication, Stream::Arrivals), p.lambda);
    let mut next_arrival = arrivals.next_gap();
    let mut index = 0u64;

    loop {
        let arrival_first = match (next_arrival, eng.events.peek_time()) {
            (None, None) => break,
            (Some(a), Some(e)) => a <= e,
            (Some(_), None) => true,
            (None, Some(_)) => false,
        };
        if arrival_first {
            let t = next_arrival.expect("arrival chosen");
            let class = eng.window.on_arrival(index, t);
            if class == ArrivalClass::End {
                next_arrival = None;
                eng.idle.advance(t, &eng.window);
                if eng.unresolved_measured == 0 {
                    break;
                }
                continue;
            }
            next_arrival = arrivals.next_gap().map(|g| t + g);
            let batch = match class {
                ArrivalClass::Measured(b) => Some(b),
                _ => None,
            };
            eng.arrive(index, t, batch);
            index += 1;
        } else {
            let (t, ev) = eng.events.pop().expect("peeked");
            eng.handle(t, ev);
            if next_arrival.is_none() && eng.unresolved_measured == 0 {
                break;
            }
        }
    }
    if let Some(end) = eng.window.end() {
        eng.idle.advance(end, &eng.window);
    }

    build_report(
        ReportInputs {
            mode: cfg.mode,
            seed: cfg.seed,
            horizon: cfg.horizon,
            pool_size: p.c,
            wage: p.s,
            window: &eng.window,
            idle: std::slice::from_ref(&eng.idle),
            tally: eng.tally,
        },
        None,
    )
}

impl Engine<'_> {
    fn arrive(&mut self, id: u64, t: f64, batch: Option<usize>) {
        if let Some(b) = batch {
            self.tally.tasks[b] += 1.0;
        }
        if self.idle.level() > 0.0 {
            if batch.is_some() {
                self.unresolved_measured += 1;
            }
            self.active.insert(
                id,
                Active {
                    arrival: t,
                    batch,
                    alerts: 0,
                },
            );
            self.alert(id, t);
        } else {
            let wait = self.recruit.sample();
            if let Some(b) = batch {
                self.tally.diverted[b] += 1.0;
                self.tally.wait(b, wait);
            }
        }
    }

    /// Pulls a worker from the pool for `task`; the pool must be non-empty.
    fn alert(&mut self, task: u64, t: f64) {
        self.idle.add(t, -1.0, &self.window);
        self.events.schedule(t + self.recruit.sample(), Event::Refill);
        let state = self.active.get_mut(&task).expect("active task");
        state.alerts += 1;
        let alert = state.alerts;
        let response = self.response.draw();
        if let Some(latency) = response {
            self.events.schedule(t + latency, Event::Response { task });
        }
        if self.timeout.is_finite() {
            self.events.schedule(t + self.timeout, Event::Timeout { task, alert });
        } else if response.is_none() {
            // nobody will ever respond and no re-alert is coming
            let state = self.active.remove(&task).expect("present");
            if let Some(b) = state.batch {
                self.tally.missed[b] += 1.0;
                self.finish(b, state.alerts);
            }
        }
    }

    fn handle(&mut self, t: f64, ev: Event) {
        match ev {
            Event::Refill => self.idle.add(t, 1.0, &self.window),
            Event::Response { task } => {
                if let Some(state) = self.active.remove(&task) {
                    if let Some(b) = state.batch {
                        self.tally.served[b] += 1.0;
                        self.tally.wait(b, t - state.arrival);
                        self.finish(b, state.alerts);
                    }
                }
            }
            Event::Timeout { task, alert } => {
                let Some(state) = self.active.get(&task) else { return };
                if state.alerts != alert {
                    return;
                }
                if alert > self.cfg.max_realerts {
                    let state = self.active.remove(&task).expect("present");
                    if let Some(b) = state.batch {
                        self.tally.missed[b] += 1.0;
                        self.finish(b, state.alerts);
                    }
                } else if self.idle.level() > 0.0 {
                    self.alert(task, t);
                } else {
                    let state = self.active.remove(&task).expect("present");
                    let wait = t - state.arrival + self.recruit.sample();
                    if let Some(b) = state.batch {
                        self.tally.diverted[b] += 1.0;
                        self.tally.wait(b, wait);
                        self.finish(b, state.alerts);
                    }
                }
            }
        }
    }

    fn finish(&mut self, batch: usize, alerts: u32) {
        self.tally.alerts[batch] += alerts as f64;
        self.tally.alerted_tasks[batch] += 1.0;
        self.unresolved_measured -= 1;
    }
}
