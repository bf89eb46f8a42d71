//! Within-session permutation surrogates.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CtrwError, Result};
use crate::rng::tagged_stream;
use crate::scalar::Real;
use crate::series::EventSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateKind {
    Original,
    ShuffleDt,
    ShuffleDx,
    ShuffleBoth,
}

impl SurrogateKind {
    pub const ALL: [SurrogateKind; 4] = [
        SurrogateKind::Original,
        SurrogateKind::ShuffleDt,
        SurrogateKind::ShuffleDx,
        SurrogateKind::ShuffleBoth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SurrogateKind::Original => "original",
            SurrogateKind::ShuffleDt => "shuffle_dt",
            SurrogateKind::ShuffleDx => "shuffle_dx",
            SurrogateKind::ShuffleBoth => "shuffle_both",
        }
    }

    fn shuffles_dt(self) -> bool {
        matches!(self, SurrogateKind::ShuffleDt | SurrogateKind::ShuffleBoth)
    }

    fn shuffles_dx(self) -> bool {
        matches!(self, SurrogateKind::ShuffleDx | SurrogateKind::ShuffleBoth)
    }
}

impl fmt::Display for SurrogateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurrogateKind {
    type Err = CtrwError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CtrwError::InvalidParameter(format!("unknown surrogate kind {s:?}")))
    }
}

const SHUFFLE_TAG: u64 = 0x5F;

/// Permutes waiting times and/or increments inside each session. Session
/// `k` draws from its own stream, so the result does not depend on the
/// number of worker threads.
pub fn make_surrogate<T: Real>(series: &EventSeries<T>, kind: SurrogateKind, seed: u64) -> Result<EventSeries<T>> {
    if kind == SurrogateKind::Original {
        return Ok(series.clone());
    }
    let parts = series
        .to_parts()
        .into_par_iter()
        .enumerate()
        .map(|(k, mut p)| {
            let mut rng = tagged_stream(seed, SHUFFLE_TAG, k as u64);
            if kind.shuffles_dt() {
                p.waits.shuffle(&mut rng);
            }
            if kind.shuffles_dx() {
                p.increments.shuffle(&mut rng);
            }
            p
        })
        .collect();
    Ok(EventSeries::from_waits(parts)?.with_stationarized(series.is_stationarized()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::SessionData;

    fn series() -> EventSeries<f64> {
        EventSeries::from_waits(
            (0..3)
                .map(|k| SessionData {
                    origin: 1000.0 * k as f64,
                    open: 1000.0 * k as f64,
                    weekday: k as u8,
                    waits: (1..=50).map(|i| i as f64 + k as f64 * 0.5).collect(),
                    increments: (1..=50).map(|i| -(i as f64) / 7.0).collect(),
                })
                .collect(),
        )
        .unwrap()
    }

    fn sorted(v: &[f64]) -> Vec<f64> {
        let mut v = v.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn original_is_identity() {
        let s = series();
        assert_eq!(make_surrogate(&s, SurrogateKind::Original, 3).unwrap(), s);
    }

    #[test]
    fn marginals_are_preserved_within_sessions() {
        let s = series();
        for kind in SurrogateKind::ALL {
            let t = make_surrogate(&s, kind, 3).unwrap();
            for (a, b) in s.sessions().iter().zip(t.sessions()) {
                assert_eq!(sorted(&s.waits()[a.range()]), sorted(&t.waits()[b.range()]));
                assert_eq!(sorted(&s.increments()[a.range()]), sorted(&t.increments()[b.range()]));
            }
            assert_eq!(t.waits() != s.waits(), kind.shuffles_dt(), "{kind}");
            assert_eq!(t.increments() != s.increments(), kind.shuffles_dx(), "{kind}");
        }
    }

    #[test]
    fn seeded_and_named() {
        let s = series();
        let a = make_surrogate(&s, SurrogateKind::ShuffleBoth, 9).unwrap();
        assert_eq!(a, make_surrogate(&s, SurrogateKind::ShuffleBoth, 9).unwrap());
        assert_ne!(a, make_surrogate(&s, SurrogateKind::ShuffleBoth, 10).unwrap());
        assert_eq!("shuffle_dx".parse::<SurrogateKind>().unwrap(), SurrogateKind::ShuffleDx);
        assert!("both".parse::<SurrogateKind>().is_err());
    }
}
