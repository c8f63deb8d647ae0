//! Independent random substreams.
//!
//! Every stochastic input of a run draws from its own ChaCha8 stream keyed by
//! the run seed; the stream id packs the replication index with the stream
//! kind. Runs are therefore reproducible bit-for-bit, and two modes that share
//! a seed see the same arrival and recruitment sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::config::{LatencyDist, RecruitmentDist};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stream {
    Arrivals = 1,
    Recruitment = 2,
    Abandonment = 3,
    Latency = 4,
    Precruitment = 5,
}

pub(crate) fn stream_rng(seed: u64, replication: u32, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((replication as u64) << 8) | stream as u64);
    rng
}

/// Inter-event gaps of a Poisson process; `None` when the rate is zero.
pub(crate) struct PoissonClock {
    rng: ChaCha8Rng,
    exp: Option<Exp<f64>>,
}

impl PoissonClock {
    pub(crate) fn new(rng: ChaCha8Rng, rate: f64) -> Self {
        let exp = (rate > 0.0).then(|| Exp::new(rate).expect("positive finite rate"));
        Self { rng, exp }
    }

    pub(crate) fn next_gap(&mut self) -> Option<f64> {
        self.exp.as_ref().map(|e| e.sample(&mut self.rng))
    }
}

pub(crate) struct RecruitmentSampler {
    rng: ChaCha8Rng,
    exp: Exp<f64>,
    kind: RecruitmentDist,
    mean: f64,
}

impl RecruitmentSampler {
    pub(crate) fn new(rng: ChaCha8Rng, mu: f64, kind: RecruitmentDist) -> Self {
        Self {
            rng,
            exp: Exp::new(mu).expect("mu > 0"),
            kind,
            mean: 1.0 / mu,
        }
    }

    pub(crate) fn sample(&mut self) -> f64 {
        match self.kind {
            RecruitmentDist::Exponential => self.exp.sample(&mut self.rng),
            RecruitmentDist::Deterministic => self.mean,
        }
    }
}

/// Alert outcome draws: abandonment coin and response latency, on separate streams.
pub(crate) struct ResponseSampler {
    abandon_rng: ChaCha8Rng,
    latency_rng: ChaCha8Rng,
    a: f64,
    latency: LatencyDist,
    exp: Option<Exp<f64>>,
}

impl ResponseSampler {
    pub(crate) fn new(seed: u64, replication: u32, a: f64, latency: LatencyDist) -> Self {
        let exp = match &latency {
            LatencyDist::Exponential { mean } => Some(Exp::new(1.0 / mean).expect("mean > 0")),
            _ => None,
        };
        Self {
            abandon_rng: stream_rng(seed, replication, Stream::Abandonment),
            latency_rng: stream_rng(seed, replication, Stream::Latency),
            a,
            latency,
            exp,
        }
    }

    /// `Some(latency)` if the alerted worker responds at all.
    pub(crate) fn draw(&mut self) -> Option<f64> {
        let abandons = self.abandon_rng.random::<f64>() < self.a;
        let latency = self.latency();
        (!abandons).then_some(latency)
    }

    pub(crate) fn latency(&mut self) -> f64 {
        match &self.latency {
            LatencyDist::PointMass { value } => *value,
            LatencyDist::Exponential { .. } => {
                self.exp.as_ref().expect("exp latency").sample(&mut self.latency_rng)
            }
            LatencyDist::Empirical { samples } => {
                samples[self.latency_rng.random_range(0..samples.len())]
            }
        }
    }
}
