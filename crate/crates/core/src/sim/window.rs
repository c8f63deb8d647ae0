//! Measurement window, batch boundaries and the event queue shared by all modes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::config::{Horizon, SimConfig};

/// What an arrival means for the statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ArrivalClass {
    Warmup,
    Measured(usize),
    /// First arrival past the horizon; it is not a task.
    End,
}

/// Splits the post-warmup period into equal batches, by time for a seconds
/// horizon and by task count for a task horizon. In the latter case batch
/// start times are only known as arrivals happen.
#[derive(Debug, Clone)]
pub(crate) struct Window {
    batches: usize,
    starts: Vec<f64>,
    end: Option<f64>,
    tasks: Option<(u64, u64)>,
}

impl Window {
    pub(crate) fn new(cfg: &SimConfig) -> Self {
        let batches = cfg.batches as usize;
        match cfg.horizon {
            Horizon::Seconds(t) => {
                let start = cfg.warmup * t;
                let width = (t - start) / batches as f64;
                Self {
                    batches,
                    starts: (0..batches).map(|b| start + b as f64 * width).collect(),
                    end: Some(t),
                    tasks: None,
                }
            }
            Horizon::Tasks(n) => {
                let warm = (cfg.warmup * n as f64).floor() as u64;
                Self {
                    batches,
                    starts: Vec::with_capacity(batches),
                    end: None,
                    tasks: Some((warm, n)),
                }
            }
        }
    }

    pub(crate) fn batches(&self) -> usize {
        self.batches
    }

    pub(crate) fn end(&self) -> Option<f64> {
        self.end
    }

    /// Classifies the arrival with zero-based index `index` at time `t`.
    pub(crate) fn on_arrival(&mut self, index: u64, t: f64) -> ArrivalClass {
        match self.tasks {
            None => {
                let end = self.end.expect("time horizon has an end");
                if t > end {
                    ArrivalClass::End
                } else {
                    self.batch_at(t).map_or(ArrivalClass::Warmup, ArrivalClass::Measured)
                }
            }
            Some((warm, n)) => {
                if index < warm {
                    ArrivalClass::Warmup
                } else if index >= n {
                    if self.end.is_none() {
                        self.end = Some(t);
                    }
                    ArrivalClass::End
                } else {
                    let b = ((index - warm) as u128 * self.batches as u128 / (n - warm) as u128) as usize;
                    if b == self.starts.len() {
                        self.starts.push(t);
                    }
                    ArrivalClass::Measured(b)
                }
            }
        }
    }

    /// Batch containing time `t`, if `t` lies in the (known part of the) window.
    pub(crate) fn batch_at(&self, t: f64) -> Option<usize> {
        let first = *self.starts.first()?;
        if t < first || self.end.is_some_and(|e| t >= e) {
            return None;
        }
        Some(self.starts.partition_point(|&s| s <= t) - 1)
    }

    /// Adds `level * |[t0, t1] ∩ batch_k|` into `acc[k]` for every batch.
    pub(crate) fn integrate(&self, level: f64, t0: f64, t1: f64, acc: &mut [f64]) {
        if level == 0.0 || t1 <= t0 || self.starts.is_empty() {
            return;
        }
        let lo = t0.max(self.starts[0]);
        let hi = self.end.map_or(t1, |e| t1.min(e));
        if hi <= lo {
            return;
        }
        let mut k = self.starts.partition_point(|&s| s <= lo) - 1;
        let mut cursor = lo;
        while cursor < hi {
            let batch_end = self
                .starts
                .get(k + 1)
                .copied()
                .or(self.end)
                .unwrap_or(f64::INFINITY);
            let stop = hi.min(batch_end);
            acc[k] += level * (stop - cursor);
            cursor = stop;
            k += 1;
            if k >= self.starts.len() {
                break;
            }
        }
    }

    pub(crate) fn durations(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.batches];
        let Some(end) = self.end else { return out };
        for (k, &s) in self.starts.iter().enumerate() {
            let e = self.starts.get(k + 1).copied().unwrap_or(end);
            out[k] = e - s;
        }
        out
    }

    pub(crate) fn measured_duration(&self) -> f64 {
        match (self.starts.first(), self.end) {
            (Some(&s), Some(e)) => e - s,
            _ => 0.0,
        }
    }
}

/// A time-average of a piecewise-constant level, accumulated per batch.
#[derive(Debug, Clone)]
pub(crate) struct LevelTracker {
    level: f64,
    last: f64,
    pub(crate) acc: Vec<f64>,
}

impl LevelTracker {
    pub(crate) fn new(level: f64, batches: usize) -> Self {
        Self {
            level,
            last: 0.0,
            acc: vec![0.0; batches],
        }
    }

    pub(crate) fn level(&self) -> f64 {
        self.level
    }

    /// Integrates the current level up to `t`; earlier times are a no-op, so
    /// closing the window after post-horizon events is harmless.
    pub(crate) fn advance(&mut self, t: f64, window: &Window) {
        if t > self.last {
            window.integrate(self.level, self.last, t, &mut self.acc);
            self.last = t;
        }
    }

    pub(crate) fn add(&mut self, t: f64, delta: f64, window: &Window) {
        self.advance(t, window);
        self.level += delta;
    }
}

#[derive(Debug, Clone, Copy)]
struct Scheduled<E> {
    time: f64,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Scheduled<E> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<E> Eq for Scheduled<E> {}

impl<E> PartialOrd for Scheduled<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Scheduled<E> {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Future-event list ordered by time, ties broken by scheduling order.
#[derive(Debug)]
pub(crate) struct EventQueue<E> {
    heap: BinaryHeap<Scheduled<E>>,
    seq: u64,
}

impl<E> EventQueue<E> {
    pub(crate) fn new() -> Self {
        Self {
            heap: BinaryHeap::new(),
            seq: 0,
        }
    }

    pub(crate) fn schedule(&mut self, time: f64, event: E) {
        debug_assert!(!time.is_nan());
        self.heap.push(Scheduled {
            time,
            seq: self.seq,
            event,
        });
        self.seq += 1;
    }

    pub(crate) fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|s| s.time)
    }

    pub(crate) fn pop(&mut self) -> Option<(f64, E)> {
        self.heap.pop().map(|s| (s.time, s.event))
    }
}
