//! Plain retainer pool: M/M/c/c with diversion.

use super::config::SimConfig;
use super::report::{build_report, ReportInputs, SimReport, Tally};
use super::rng::{stream_rng, PoissonClock, RecruitmentSampler, Stream};
use super::window::{ArrivalClass, EventQueue, LevelTracker, Window};

/// The only scheduled event is a recruitment request being filled.
struct Refill;

pub(crate) fn run(cfg: &SimConfig, replication: u32) -> SimReport {
    let p = &cfg.params;
    let mut window = Window::new(cfg);
    let mut tally = Tally::new(window.batches());
    let mut idle = LevelTracker::new(p.c as f64, window.batches());
    let mut arrivals = PoissonClock::new(stream_rng(cfg.seed, replication, Stream::Arrivals), p.lambda);
    let mut recruit = RecruitmentSampler::new(
        stream_rng(cfg.seed, replication, Stream::Recruitment),
        p.mu,
        cfg.recruitment,
    );
    let mut refills: EventQueue<Refill> = EventQueue::new();

    let mut next_arrival = arrivals.next_gap();
    let mut index = 0u64;
    loop {
        let arrival_first = match (next_arrival, refills.peek_time()) {
            (None, None) => break,
            (Some(a), Some(r)) => a <= r,
            (Some(_), None) => true,
            (None, Some(_)) => false,
        };
        if !arrival_first {
            let (t, Refill) = refills.pop().expect("peeked");
            idle.add(t, 1.0, &window);
            continue;
        }

        let t = next_arrival.expect("arrival chosen");
        let class = window.on_arrival(index, t);
        if class == ArrivalClass::End {
            idle.advance(t, &window);
            break;
        }
        index += 1;
        next_arrival = arrivals.next_gap().map(|g| t + g);

        let measured = match class {
            ArrivalClass::Measured(b) => Some(b),
            _ => None,
        };
        if let Some(b) = measured {
            tally.tasks[b] += 1.0;
        }
        if idle.level() > 0.0 {
            idle.add(t, -1.0, &window);
            refills.schedule(t + recruit.sample(), Refill);
            if let Some(b) = measured {
                tally.served[b] += 1.0;
                tally.wait(b, 0.0);
            }
        } else {
            // out-of-band recruitment for this task only
            let wait = recruit.sample();
            if let Some(b) = measured {
                tally.diverted[b] += 1.0;
                tally.wait(b, wait);
            }
        }
    }
    if let Some(end) = window.end() {
        idle.advance(end, &window);
    }

    build_report(
        ReportInputs {
            mode: cfg.mode,
            seed: cfg.seed,
            horizon: cfg.horizon,
            pool_size: p.c,
            wage: p.s,
            window: &window,
            idle: std::slice::from_ref(&idle),
            tally,
        },
        None,
    )
}
