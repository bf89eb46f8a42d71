//! Trajectories of the waiting-time subordinator and of the primary walk.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{IncrementModel, RepetitionLaw, WaitingTimeModel};
use crate::error::{CtrwError, Result};
use crate::rng::stream;
use crate::scalar::Real;
pub use crate::series::{EventSeries, Session, SessionData};

/// How the first repetition block of a trajectory is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StartMode {
    /// Remaining length of the block straddling step 0 drawn from `ω₁`, so
    /// the waiting-time sequence is stationary from the first event.
    #[default]
    Stationary,
    /// A fresh block starts at the first event (ordinary renewal start).
    BlockBoundary,
}

#[derive(Debug, Clone)]
pub struct SimConfig<T: Real> {
    pub repetition: RepetitionLaw<T>,
    pub waiting: WaitingTimeModel<T>,
    pub increment: IncrementModel<T>,
    pub n_events: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    pub start: StartMode,
}

impl<T: Real> SimConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_events < 1 {
            return Err(CtrwError::InvalidParameter("n_events must be at least 1".into()));
        }
        if self.n_trajectories < 1 {
            return Err(CtrwError::InvalidParameter("n_trajectories must be at least 1".into()));
        }
        if let Some(rho) = self.repetition.rho() {
            if !(rho > T::lit(2.0)) {
                return Err(CtrwError::NonErgodic { rho: rho.as_f64() });
            }
        }
        Ok(())
    }
}

/// Endless stream of waiting times: block values `~ ψ` repeated `ν ~ ω` times.
pub struct WaitingProcess<'a, T: Real, R: Rng> {
    repetition: &'a RepetitionLaw<T>,
    waiting: &'a WaitingTimeModel<T>,
    rng: R,
    value: T,
    left: u64,
    first: bool,
    start: StartMode,
}

impl<'a, T: Real, R: Rng> WaitingProcess<'a, T, R> {
    pub fn new(
        repetition: &'a RepetitionLaw<T>,
        waiting: &'a WaitingTimeModel<T>,
        start: StartMode,
        rng: R,
    ) -> Self {
        Self {
            repetition,
            waiting,
            rng,
            value: T::zero(),
            left: 0,
            first: true,
            start,
        }
    }

    pub fn rng_mut(&mut self) -> &mut R {
        &mut self.rng
    }

    /// Next waiting time.
    #[inline]
    pub fn next_wait(&mut self) -> T {
        if self.left == 0 {
            self.left = if self.first && self.start == StartMode::Stationary {
                // rho > 2 is checked when the config is validated
                self.repetition.sample_residual(&mut self.rng).unwrap_or(1)
            } else {
                self.repetition.sample(&mut self.rng)
            };
            self.first = false;
            self.value = self.waiting.sample(&mut self.rng);
        }
        self.left -= 1;
        self.value
    }
}

impl<T: Real, R: Rng> Iterator for WaitingProcess<'_, T, R> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        Some(self.next_wait())
    }
}

/// `Δt₁ … Δt_N`, the last block cut at `N = n_events`.
pub fn generate_waiting_sequence<T: Real, R: Rng>(cfg: &SimConfig<T>, rng: &mut R) -> Result<Vec<T>> {
    cfg.validate()?;
    let mut process = WaitingProcess::new(&cfg.repetition, &cfg.waiting, cfg.start, rng);
    Ok((0..cfg.n_events).map(|_| process.next_wait()).collect())
}

fn trajectory_parts<T: Real, R: Rng>(cfg: &SimConfig<T>, rng: R, origin: T) -> SessionData<T> {
    let mut process = WaitingProcess::new(&cfg.repetition, &cfg.waiting, cfg.start, rng);
    let mut waits = Vec::with_capacity(cfg.n_events);
    let mut increments = Vec::with_capacity(cfg.n_events);
    for _ in 0..cfg.n_events {
        waits.push(process.next_wait());
        increments.push(cfg.increment.sample(process.rng_mut()));
    }
    SessionData {
        origin,
        open: origin,
        weekday: 0,
        waits,
        increments,
    }
}

/// One trajectory as a single-session series starting at `t = 0`. Jumps are
/// drawn independently of the waiting times.
pub fn generate_trajectory<T: Real, R: Rng>(cfg: &SimConfig<T>, rng: &mut R) -> Result<EventSeries<T>> {
    cfg.validate()?;
    EventSeries::from_waits(vec![trajectory_parts(cfg, rng, T::zero())])
}

/// `n_trajectories` independent trajectories (stream `i` of `cfg.seed` for
/// trajectory `i`), laid end to end as sessions of one series.
pub fn simulate_sessions<T: Real>(cfg: &SimConfig<T>) -> Result<EventSeries<T>> {
    cfg.validate()?;
    let mut parts: Vec<SessionData<T>> = (0..cfg.n_trajectories)
        .into_par_iter()
        .map(|i| trajectory_parts(cfg, stream(cfg.seed, i as u64), T::zero()))
        .collect();
    let mut origin = T::zero();
    for p in &mut parts {
        p.origin = origin;
        p.open = origin;
        origin += p.waits.iter().copied().sum::<T>();
    }
    EventSeries::from_waits(parts)
}

/// Ensemble statistics of `x(t)` at one sampling time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRow<T> {
    pub t: T,
    pub m1: T,
    pub m1_se: T,
    pub m2: T,
    pub m2_se: T,
    pub variance: T,
    pub variance_se: T,
}

/// Logarithmically spaced times, `per_decade` points per decade, both ends
/// included.
pub fn log_grid<T: Real>(lo: T, hi: T, per_decade: usize) -> Vec<T> {
    let decades = (hi / lo).log10();
    let n = (decades * T::of_usize(per_decade)).round().to_usize().unwrap_or(0).max(1);
    (0..=n)
        .map(|i| lo * T::lit(10.0).powf(decades * T::of_usize(i) / T::of_usize(n)))
        .collect()
}

/// Values of `x(t)` (right-continuous: the last jump at or before `t`
/// counts) for one trajectory at each sampling time.
fn trajectory_values<T: Real>(cfg: &SimConfig<T>, index: u64, times: &[T]) -> std::result::Result<Vec<T>, T> {
    let mut process = WaitingProcess::new(&cfg.repetition, &cfg.waiting, cfg.start, stream(cfg.seed, index));
    let mut out = Vec::with_capacity(times.len());
    let mut used = 0usize;
    let mut clock = T::zero();
    let mut x = T::zero();
    let mut next_time = T::zero();
    let mut next_jump = T::zero();
    let mut pending = false;
    for &t in times {
        loop {
            if !pending {
                if used == cfg.n_events {
                    return Err(clock);
                }
                let dt = process.next_wait();
                next_jump = cfg.increment.sample(process.rng_mut());
                next_time = clock + dt;
                used += 1;
                pending = true;
            }
            if next_time <= t {
                clock = next_time;
                x += next_jump;
                pending = false;
            } else {
                break;
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// Ensemble moments `m₁(t)`, `m₂(t)` and `σ²(t)` with standard errors.
///
/// Trajectories are generated only up to the last sampling time; each one
/// may use at most `n_events` events, and a sampling time beyond the reach of
/// any trajectory is an error reporting the shortest horizon.
pub fn ensemble_moments<T: Real>(cfg: &SimConfig<T>, sample_times: &[T]) -> Result<Vec<MomentRow<T>>> {
    cfg.validate()?;
    if sample_times.is_empty() {
        return Ok(Vec::new());
    }
    if sample_times.windows(2).any(|w| !(w[1] > w[0])) || !(sample_times[0] >= T::zero()) {
        return Err(CtrwError::InvalidParameter(
            "sample times must be non-negative and strictly increasing".into(),
        ));
    }
    let results: Vec<std::result::Result<Vec<T>, T>> = (0..cfg.n_trajectories as u64)
        .into_par_iter()
        .map(|i| trajectory_values(cfg, i, sample_times))
        .collect();
    let mut values = Vec::with_capacity(results.len());
    let mut horizon: Option<T> = None;
    for r in results {
        match r {
            Ok(v) => values.push(v),
            Err(h) => horizon = Some(horizon.map_or(h, |m: T| m.min(h))),
        }
    }
    if let Some(h) = horizon {
        return Err(CtrwError::BeyondHorizon {
            t: sample_times[sample_times.len() - 1].as_f64(),
            horizon: h.as_f64(),
        });
    }
    let n = T::of_usize(values.len());
    let rows = sample_times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let m1 = values.iter().map(|v| v[k]).sum::<T>() / n;
            let m2 = values.iter().map(|v| v[k] * v[k]).sum::<T>() / n;
            let (mut c2, mut c4, mut sq_dev) = (T::zero(), T::zero(), T::zero());
            for v in &values {
                let d = v[k] - m1;
                let d2 = d * d;
                c2 += d2;
                c4 += d2 * d2;
                let e = v[k] * v[k] - m2;
                sq_dev += e * e;
            }
            c2 /= n;
            c4 /= n;
            let variance = c2 * n / (n - T::one()).max(T::one());
            MomentRow {
                t,
                m1,
                m1_se: (c2 / n).sqrt(),
                m2,
                m2_se: (sq_dev / n / n).sqrt(),
                variance,
                variance_se: ((c4 - c2 * c2).max(T::zero()) / n).sqrt(),
            }
        })
        .collect();
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rep: RepetitionLaw<f64>, n_events: usize) -> SimConfig<f64> {
        SimConfig {
            repetition: rep,
            waiting: WaitingTimeModel::exponential(1.0).unwrap(),
            increment: IncrementModel::gaussian(0.0, 1.0).unwrap(),
            n_events,
            n_trajectories: 1,
            seed: 5,
            start: StartMode::Stationary,
        }
    }

    #[test]
    fn single_event_trajectory() {
        let c = cfg(RepetitionLaw::zeta(3.0).unwrap(), 1);
        let s = generate_trajectory(&c, &mut stream(1, 0)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.times()[0], s.waits()[0]);
    }

    #[test]
    fn zero_events_rejected() {
        let c = cfg(RepetitionLaw::Single, 0);
        assert!(generate_trajectory(&c, &mut stream(1, 0)).is_err());
    }

    #[test]
    fn non_ergodic_rho_rejected() {
        let mut c = cfg(RepetitionLaw::Single, 10);
        c.repetition = RepetitionLaw::Zeta(crate::dist::ZetaLaw::new(1.5).unwrap());
        assert!(matches!(c.validate(), Err(CtrwError::NonErgodic { .. })));
    }

    #[test]
    fn exact_length_and_positive() {
        let c = cfg(RepetitionLaw::zeta(2.2).unwrap(), 12_345);
        let w = generate_waiting_sequence(&c, &mut stream(3, 0)).unwrap();
        assert_eq!(w.len(), 12_345);
        assert!(w.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn reproducible() {
        let mut c = cfg(RepetitionLaw::zeta(2.5).unwrap(), 1000);
        c.n_trajectories = 4;
        let a = simulate_sessions(&c).unwrap();
        let b = simulate_sessions(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sessions().len(), 4);
    }

    #[test]
    fn horizon_error() {
        let mut c = cfg(RepetitionLaw::zeta(3.0).unwrap(), 10);
        c.n_trajectories = 3;
        let err = ensemble_moments(&c, &[1.0, 1e6]).unwrap_err();
        assert!(matches!(err, CtrwError::BeyondHorizon { .. }));
    }

    #[test]
    fn grid_is_logarithmic() {
        let g = log_grid(10.0_f64, 1e4, 3);
        assert_eq!(g.len(), 10);
        assert!((g[3] - 100.0).abs() < 1e-9);
        assert!((g[9] - 1e4).abs() < 1e-6);
    }
}
