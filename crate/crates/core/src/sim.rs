//! Event-driven Monte Carlo of the process with unit life-time rate.
//!
//! Only the population size is tracked: with `z` particles the next split
//! happens after an `Exp(z)` time, and a `Delta` draw ends the whole process.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::law::{LawKind, OffspringLaw};
use crate::profile::{profile, Regime};

pub const DEFAULT_MAX_POPULATION: u64 = 10_000_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    pub law: OffspringLaw,
    /// Sorted snapshot times.
    pub query_times: Vec<f64>,
    /// May be infinite when every run is known to stop.
    pub horizon: f64,
    pub max_population: u64,
    pub replicates: usize,
    pub seed: u64,
    /// Initial population.
    pub ancestors: u64,
    /// Record `Z_horizon e^{-(m1 - 1) horizon}`.
    pub record_w: bool,
}

impl SimConfig {
    pub fn new(law: OffspringLaw, replicates: usize, seed: u64) -> Self {
        Self {
            law,
            query_times: Vec::new(),
            horizon: f64::INFINITY,
            max_population: DEFAULT_MAX_POPULATION,
            replicates,
            seed,
            ancestors: 1,
            record_w: false,
        }
    }

    pub fn with_times(mut self, times: &[f64]) -> Self {
        self.query_times = times.to_vec();
        if self.horizon.is_infinite() {
            self.horizon = times.iter().copied().fold(0.0, f64::max);
        }
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.query_times.windows(2).any(|w| w[0] > w[1])
            || self
                .query_times
                .iter()
                .any(|t| !(t.is_finite() && *t >= 0.0))
        {
            return Err(Error::Spec(
                "query times must be sorted, finite and >= 0".into(),
            ));
        }
        let last = self.query_times.last().copied().unwrap_or(0.0);
        if self.horizon.is_nan() || self.horizon < last {
            return Err(Error::Spec(format!(
                "horizon {} is below the last query time {last}",
                self.horizon
            )));
        }
        if self.max_population == 0 || self.ancestors == 0 || self.replicates == 0 {
            return Err(Error::Spec(
                "max_population, ancestors and replicates must be positive".into(),
            ));
        }
        if self.record_w && !self.horizon.is_finite() {
            return Err(Error::Spec("W sampling needs a finite horizon".into()));
        }
        Ok(())
    }
}

/// Population at a query time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum State {
    Count(u64),
    /// Killed.
    Delta,
    /// Stopped at the population cap.
    Cap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub z_at: Vec<State>,
    /// Extinction time.
    pub t0: Option<f64>,
    /// Killing time.
    pub t1: Option<f64>,
    pub w_sample: Option<f64>,
    pub capped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Offspring {
    Count(u64),
    Delta,
}

/// Draws from an offspring law (with the `Delta` outcome for the defect).
#[derive(Clone, Debug)]
pub struct OffspringSampler {
    kind: SamplerKind,
}

#[derive(Clone, Debug)]
enum SamplerKind {
    /// Cumulative probabilities of `0, 1, ..`; the rest is `Delta`.
    Table(Vec<f64>),
    /// `P(X = 2 + k | 2 <= X < inf) = (1 - p) p^k`.
    Mlf {
        p0: f64,
        p01: f64,
        p_finite: f64,
        tail: Geometric,
    },
    /// Base draw `k` survives mutation with probability `(1 - mu)^k`.
    Mutation {
        base: Box<OffspringSampler>,
        keep: f64,
    },
}

/// Coefficients are tabulated until the remaining finite mass is below this.
const TABLE_TAIL: f64 = 1e-15;
const TABLE_MAX: usize = 1 << 20;

impl OffspringSampler {
    pub fn new(law: &OffspringLaw) -> Result<Self> {
        let kind = match law.kind() {
            LawKind::ModifiedLinearFractional { p0, p1, p_delta, p } => {
                let tail = Geometric::new(1.0 - p)
                    .map_err(|e| Error::InvalidLaw(format!("geometric tail: {e}")))?;
                SamplerKind::Mlf {
                    p0: *p0,
                    p01: p0 + p1,
                    p_finite: 1.0 - p_delta,
                    tail,
                }
            }
            LawKind::MutationStopped { base, mu } => SamplerKind::Mutation {
                base: Box::new(Self::new(base)?),
                keep: 1.0 - mu,
            },
            _ => SamplerKind::Table(Self::table(law)?),
        };
        Ok(Self { kind })
    }

    fn table(law: &OffspringLaw) -> Result<Vec<f64>> {
        let total = law.eval(1.0);
        let mut n = law.degree().map_or(64, |d| d + 1);
        loop {
            let p = law.coefficients(n);
            let mut acc = 0.0;
            let cdf: Vec<f64> = p
                .iter()
                .map(|v| {
                    acc += v;
                    acc
                })
                .collect();
            if law.degree().is_some() || total - acc <= TABLE_TAIL {
                return Ok(cdf);
            }
            if n >= TABLE_MAX {
                return Err(Error::InvalidLaw(format!(
                    "offspring table did not converge (missing mass {:e})",
                    total - acc
                )));
            }
            n *= 4;
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Offspring {
        match &self.kind {
            SamplerKind::Table(cdf) => {
                let u: f64 = rng.random();
                match cdf.iter().position(|&c| u < c) {
                    Some(k) => Offspring::Count(k as u64),
                    None => Offspring::Delta,
                }
            }
            SamplerKind::Mlf {
                p0,
                p01,
                p_finite,
                tail,
            } => {
                let u: f64 = rng.random();
                if u < *p0 {
                    Offspring::Count(0)
                } else if u < *p01 {
                    Offspring::Count(1)
                } else if u < *p_finite {
                    Offspring::Count(2 + tail.sample(rng))
                } else {
                    Offspring::Delta
                }
            }
            SamplerKind::Mutation { base, keep } => match base.sample(rng) {
                Offspring::Count(k) => {
                    let u: f64 = rng.random();
                    if u < keep.powf(k as f64) {
                        Offspring::Count(k)
                    } else {
                        Offspring::Delta
                    }
                }
                Offspring::Delta => Offspring::Delta,
            },
        }
    }
}

pub fn sample_offspring<R: Rng + ?Sized>(law: &OffspringLaw, rng: &mut R) -> Result<Offspring> {
    Ok(OffspringSampler::new(law)?.sample(rng))
}

/// Generator of replicate `index`: stream `index` of the seeded ChaCha8.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One run with a prepared sampler.
pub fn run_replicate<R: Rng + ?Sized>(
    config: &SimConfig,
    sampler: &OffspringSampler,
    rng: &mut R,
) -> ReplicateOutcome {
    let times = &config.query_times;
    let mut z_at = Vec::with_capacity(times.len());
    let mut z = config.ancestors;
    let mut t = 0.0;
    let mut out = ReplicateOutcome {
        z_at: Vec::new(),
        t0: None,
        t1: None,
        w_sample: None,
        capped: false,
    };
    let fill = |z_at: &mut Vec<State>, s: State| z_at.resize(times.len(), s);
    loop {
        if z == 0 {
            out.t0 = Some(t);
            fill(&mut z_at, State::Count(0));
            break;
        }
        let e: f64 = Exp1.sample(rng);
        let next = t + e / z as f64;
        while z_at.len() < times.len() && times[z_at.len()] < next {
            z_at.push(State::Count(z));
        }
        if next > config.horizon {
            break;
        }
        t = next;
        match sampler.sample(rng) {
            Offspring::Delta => {
                out.t1 = Some(t);
                fill(&mut z_at, State::Delta);
                break;
            }
            Offspring::Count(k) => {
                z = z - 1 + k;
                if z > config.max_population {
                    out.capped = true;
                    fill(&mut z_at, State::Cap);
                    break;
                }
            }
        }
    }
    if config.record_w && !out.capped {
        let beta = config.law.moments().0 - 1.0;
        out.w_sample = Some(if out.t1.is_some() {
            0.0
        } else {
            z as f64 * (-beta * config.horizon).exp()
        });
    }
    out.z_at = z_at;
    out
}

pub fn simulate_replicate(config: &SimConfig, index: u64) -> Result<ReplicateOutcome> {
    let sampler = OffspringSampler::new(&config.law)?;
    Ok(run_replicate(
        config,
        &sampler,
        &mut replicate_rng(config.seed, index),
    ))
}

/// All replicates, in replicate order; bit-identical for a given config.
pub fn simulate(config: &SimConfig) -> Result<Vec<ReplicateOutcome>> {
    config.validate()?;
    let sampler = OffspringSampler::new(&config.law)?;
    Ok((0..config.replicates as u64)
        .into_par_iter()
        .map(|i| run_replicate(config, &sampler, &mut replicate_rng(config.seed, i)))
        .collect())
}

/// Killing times `T_1 < horizon` from replicates `0, 1, ..` until `needed`
/// of them are found or `config.replicates` runs are used. Returns the times
/// and the number of runs.
pub fn sample_termination_times(config: &SimConfig, needed: usize) -> Result<(Vec<f64>, usize)> {
    config.validate()?;
    let sampler = OffspringSampler::new(&config.law)?;
    let light = SimConfig {
        query_times: Vec::new(),
        record_w: false,
        ..config.clone()
    };
    let mut times = Vec::with_capacity(needed);
    let mut start = 0u64;
    let total = config.replicates as u64;
    let batch = 1u64 << 18;
    while times.len() < needed && start < total {
        let end = (start + batch).min(total);
        let found: Vec<Option<f64>> = (start..end)
            .into_par_iter()
            .map(|i| run_replicate(&light, &sampler, &mut replicate_rng(light.seed, i)).t1)
            .collect();
        for (i, t1) in (start..end).zip(found) {
            if let Some(t) = t1 {
                times.push(t);
                if times.len() == needed {
                    return Ok((times, i as usize + 1));
                }
            }
        }
        start = end;
    }
    Ok((times, start as usize))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    /// Samples used.
    pub n: usize,
    /// Samples excluded for hitting the population cap.
    pub capped: usize,
}

fn mean_and_se(values: impl Iterator<Item = f64>) -> (f64, f64, usize) {
    let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
    for v in values {
        n += 1;
        let d = v - mean;
        mean += d / n as f64;
        m2 += d * (v - mean);
    }
    let se = if n > 1 {
        (m2 / (n - 1) as f64 / n as f64).sqrt()
    } else {
        f64::INFINITY
    };
    (mean, se, n)
}

/// Sample mean of `s^{Z_t}` (`0` on `Delta`) at the query time `t`.
pub fn estimate_pgf(
    config: &SimConfig,
    outcomes: &[ReplicateOutcome],
    t: f64,
    s: f64,
) -> Result<Estimate> {
    let idx = config
        .query_times
        .iter()
        .position(|&x| x == t)
        .ok_or_else(|| Error::Spec(format!("{t} is not a query time")))?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain {
            value: s,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let capped = outcomes
        .iter()
        .filter(|o| o.z_at[idx] == State::Cap)
        .count();
    let values = outcomes.iter().filter_map(|o| match o.z_at[idx] {
        State::Count(z) => Some(s.powf(z as f64)),
        State::Delta => Some(0.0),
        State::Cap => None,
    });
    let (mean, std_error, n) = mean_and_se(values);
    Ok(Estimate {
        mean,
        std_error,
        n,
        capped,
    })
}

/// Fraction of runs killed before the horizon.
pub fn estimate_killed(outcomes: &[ReplicateOutcome]) -> Estimate {
    let capped = outcomes.iter().filter(|o| o.capped).count();
    let values = outcomes
        .iter()
        .filter(|o| !o.capped)
        .map(|o| if o.t1.is_some() { 1.0 } else { 0.0 });
    let (mean, std_error, n) = mean_and_se(values);
    Estimate {
        mean,
        std_error,
        n,
        capped,
    }
}

/// Step CDF of a sample.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

pub const MIN_TERMINATION_EVENTS: usize = 100;

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        Self { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn median(&self) -> f64 {
        let n = self.sorted.len();
        if n % 2 == 1 {
            self.sorted[n / 2]
        } else {
            0.5 * (self.sorted[n / 2 - 1] + self.sorted[n / 2])
        }
    }

    /// `sup_x |F_n(x) - reference(x)|` for a continuous reference.
    pub fn ks_distance(&self, mut reference: impl FnMut(f64) -> f64) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = reference(x);
                (f - i as f64 / n).max((i + 1) as f64 / n - f)
            })
            .fold(0.0, f64::max)
    }

    /// The same sample with every point mapped by `f` (monotone).
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.sorted.iter().map(|&x| f(x)).collect())
    }
}

/// Empirical law of `T_1` given `T_1 < horizon`.
pub fn estimate_termination(outcomes: &[ReplicateOutcome]) -> Result<EmpiricalCdf> {
    termination_cdf(outcomes.iter().filter_map(|o| o.t1).collect())
}

pub fn termination_cdf(times: Vec<f64>) -> Result<EmpiricalCdf> {
    if times.len() < MIN_TERMINATION_EVENTS {
        return Err(Error::InsufficientEvents {
            found: times.len(),
            needed: MIN_TERMINATION_EVENTS,
        });
    }
    Ok(EmpiricalCdf::new(times))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WSummary {
    pub samples: Vec<f64>,
    pub mean: Estimate,
    pub second_moment: Estimate,
    pub zero_fraction: Estimate,
}

/// Samples of `W = Z_H e^{-beta H}` and their first two moments.
pub fn estimate_w(config: &SimConfig, outcomes: &[ReplicateOutcome]) -> Result<WSummary> {
    let prof = profile(&config.law)?;
    if prof.regime != Regime::Supercritical {
        return Err(Error::Regime(format!(
            "W needs q < 1 = r (regime {:?})",
            prof.regime
        )));
    }
    if !config.record_w {
        return Err(Error::Spec("run was made without W sampling".into()));
    }
    if prof.beta * config.horizon < 8.0 {
        return Err(Error::Spec(format!(
            "beta * horizon = {} is below 8",
            prof.beta * config.horizon
        )));
    }
    let capped = outcomes.iter().filter(|o| o.capped).count();
    let samples: Vec<f64> = outcomes.iter().filter_map(|o| o.w_sample).collect();
    let with = |e: (f64, f64, usize)| Estimate {
        mean: e.0,
        std_error: e.1,
        n: e.2,
        capped,
    };
    Ok(WSummary {
        mean: with(mean_and_se(samples.iter().copied())),
        second_moment: with(mean_and_se(samples.iter().map(|w| w * w))),
        zero_fraction: with(mean_and_se(samples.iter().map(|&w| {
            if w == 0.0 {
                1.0
            } else {
                0.0
            }
        }))),
        samples,
    })
}
