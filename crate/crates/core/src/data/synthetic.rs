//! Synthetic sessions with a planted intraday profile.

use crate::error::{CtrwError, Result};
use crate::rng::stream;
use crate::scalar::Real;
use crate::series::{EventSeries, SessionData};
use crate::sim::{SimConfig, WaitingProcess};

const DAY: f64 = 86_400.0;

/// Waiting-time multiplier `1 + amplitude · sin(π u)` at session fraction
/// `u`: long waits mid-session, short near the open and the close.
pub fn lunch_profile<T: Real>(amplitude: T) -> impl Fn(T) -> T {
    move |u: T| T::one() + amplitude * (T::PI() * u).sin()
}

/// `n_sessions` sessions of `session_seconds` each, opening at 09:00 on
/// consecutive weekdays. Each session runs its own waiting process on
/// stream `k` of `cfg.seed`, started in `cfg.start` mode, so sessions are
/// independent; waits are scaled by `profile` at the moment the interval
/// starts and the interval crossing the close is dropped.
pub fn seasonal_sessions<T: Real, F: Fn(T) -> T>(
    cfg: &SimConfig<T>,
    n_sessions: usize,
    session_seconds: T,
    profile: F,
) -> Result<EventSeries<T>> {
    cfg.validate()?;
    if !(session_seconds > T::zero()) || n_sessions == 0 {
        return Err(CtrwError::InvalidParameter(
            "need at least one session of positive length".into(),
        ));
    }
    let mut parts = Vec::with_capacity(n_sessions);
    for k in 0..n_sessions {
        let mut process =
            WaitingProcess::new(&cfg.repetition, &cfg.waiting, cfg.start, stream(cfg.seed, k as u64));
        // skip weekends so that weekday k % 5 falls on day k + 2 (k / 5)
        let day = k + 2 * (k / 5);
        let open = T::lit(day as f64 * DAY + 9.0 * 3600.0);
        let (mut waits, mut increments) = (Vec::new(), Vec::new());
        let mut clock = T::zero();
        loop {
            let w = process.next_wait() * profile(clock / session_seconds);
            let x = cfg.increment.sample(process.rng_mut());
            if clock + w > session_seconds {
                break;
            }
            clock += w;
            waits.push(w);
            increments.push(x);
        }
        parts.push(SessionData {
            origin: open,
            open,
            weekday: (k % 5) as u8,
            waits,
            increments,
        });
    }
    EventSeries::from_waits(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::seasonal::build_seasonal_profile;
    use crate::dist::{IncrementModel, RepetitionLaw, WaitingTimeModel};
    use crate::sim::StartMode;

    #[test]
    fn planted_profile_is_recovered() {
        let cfg = SimConfig {
            repetition: RepetitionLaw::Single,
            waiting: WaitingTimeModel::exponential(1.0).unwrap(),
            increment: IncrementModel::gaussian(0.0, 1.0).unwrap(),
            n_events: 1,
            n_trajectories: 1,
            seed: 2,
            start: StartMode::Stationary,
        };
        let len = 30_000.0;
        let f = lunch_profile(1.5);
        let s = seasonal_sessions(&cfg, 100, len, &f).unwrap();
        let p = build_seasonal_profile(&s, 300.0).unwrap();
        for d in 0..5 {
            for b in 0..100 {
                // all five weekdays pooled would be tighter; each has 20 sessions
                let expect = f((b as f64 + 0.5) * 300.0 / len);
                let got = p.means[d][b].unwrap();
                assert!((got / expect - 1.0).abs() < 0.1, "day {d} bin {b}: {got} vs {expect}");
            }
        }
        let pooled: f64 = (0..5).map(|d| p.means[d][50].unwrap() * p.counts[d][50] as f64).sum::<f64>()
            / (0..5).map(|d| p.counts[d][50] as f64).sum::<f64>();
        assert!((pooled / f(50.5 * 300.0 / len) - 1.0).abs() < 0.02);
    }
}
