//! Time autocorrelation of event marks for irregularly spaced events.
//!
//! The marks `m_i` (here `|Δx_i|` or `Δx_i`) define the measure
//! `X(dt) = Σ m_i δ(t - t_i) dt`, whose stationary covariance density is
//! `C(τ) = E[X(dt) X(t+τ)] / dt² - (λ ⟨m⟩)²`. For each logarithmic lag bin
//! the estimator sums `m_i m_j` over ordered same-session pairs with
//! `t_j - t_i` in the bin and divides by the exposure
//! `∫_bin (W - τ)₊ dτ` of a session of length `W`. The curve is normalized
//! by `λ² Var(m)`.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{AcfCurve, AcfKind};
use super::units::{make_units, resample_counts, spread, BootstrapOptions, Unit};
use crate::error::{CtrwError, Result};
use crate::scalar::Real;
use crate::series::EventSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkKind {
    #[default]
    Absolute,
    Signed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeAcfOptions<T> {
    pub edges: Vec<T>,
    pub marks: MarkKind,
    pub bootstrap: Option<BootstrapOptions>,
}

pub const DEFAULT_BINS_PER_DECADE: usize = 12;

impl<T: Real> Default for TimeAcfOptions<T> {
    fn default() -> Self {
        Self {
            edges: log_edges(T::one(), T::lit(10f64.powf(3.25)), DEFAULT_BINS_PER_DECADE),
            marks: MarkKind::Absolute,
            bootstrap: None,
        }
    }
}

/// Logarithmic bin edges from `lo` to `hi` with `per_decade` bins per decade.
pub fn log_edges<T: Real>(lo: T, hi: T, per_decade: usize) -> Vec<T> {
    let decades = (hi / lo).log10();
    let n = (decades * T::of_usize(per_decade)).round().to_usize().unwrap_or(1).max(1);
    (0..=n)
        .map(|i| lo * T::lit(10.0).powf(decades * T::of_usize(i) / T::of_usize(n)))
        .collect()
}

struct UnitSums<T> {
    prod: Vec<T>,
    pairs: Vec<u64>,
    exposure: Vec<T>,
    mark_sum: T,
    mark_sq: T,
    events: usize,
    duration: T,
}

/// `∫_lo^hi |[a, min(b, w - τ))| dτ`, the time during which a pair starting
/// in `[a, b)` can still end inside a window of length `w`.
fn exposure<T: Real>(lo: T, hi: T, a: T, b: T, w: T) -> T {
    // g(τ) = b - a for τ < w - b, w - a - τ up to w - a, then 0
    let full_end = (w - b).max(lo).min(hi);
    let mut total = (full_end - lo).max(T::zero()) * (b - a);
    let ramp_lo = full_end.max(lo);
    let ramp_hi = (w - a).min(hi);
    if ramp_hi > ramp_lo {
        let two = T::lit(2.0);
        let g = |t: T| (w - a) * t - t * t / two;
        total += g(ramp_hi) - g(ramp_lo);
    }
    total
}

fn unit_sums<T: Real>(times: &[T], marks: &[T], unit: &Unit, edges: &[T]) -> UnitSums<T> {
    let bins = edges.len() - 1;
    let mut prod = vec![T::zero(); bins];
    let mut pairs = vec![0u64; bins];
    let (first, last) = (edges[0], edges[bins]);
    let session_end = unit.session.end;
    for i in unit.events.clone() {
        let (ti, mi) = (times[i], marks[i]);
        let mut k = 0usize;
        for j in i + 1..session_end {
            let tau = times[j] - ti;
            if tau >= last {
                break;
            }
            if tau < first {
                continue;
            }
            while tau >= edges[k + 1] {
                k += 1;
            }
            prod[k] += mi * marks[j];
            pairs[k] += 1;
        }
    }
    let t0 = times[unit.session.start];
    let w = times[unit.session.end - 1] - t0;
    let a = times[unit.events.start] - t0;
    let b = if unit.events.end == unit.session.end {
        w
    } else {
        times[unit.events.end] - t0
    };
    let exposure = edges.windows(2).map(|e| exposure(e[0], e[1], a, b, w)).collect();
    let slice = &marks[unit.events.clone()];
    UnitSums {
        prod,
        pairs,
        exposure,
        mark_sum: slice.iter().copied().sum(),
        mark_sq: slice.iter().map(|&m| m * m).sum(),
        events: slice.len(),
        duration: b - a,
    }
}

fn combine<T: Real>(sums: &[UnitSums<T>], weights: &[u32], bins: usize) -> Result<Vec<Option<T>>> {
    let (mut s1, mut s2, mut n, mut d) = (T::zero(), T::zero(), T::zero(), T::zero());
    for (u, &w) in sums.iter().zip(weights) {
        let w = T::of_u64(w as u64);
        s1 += w * u.mark_sum;
        s2 += w * u.mark_sq;
        n += w * T::of_usize(u.events);
        d += w * u.duration;
    }
    if !(d > T::zero()) || !(n > T::one()) {
        return Err(CtrwError::InvalidParameter("time ACF needs events spread over a positive duration".into()));
    }
    let mean = s1 / n;
    let var = s2 / n - mean * mean;
    let rate = n / d;
    let norm = rate * rate * var;
    if !(norm > T::zero()) {
        return Err(CtrwError::ZeroVariance("time ACF of constant marks".into()));
    }
    let density = s1 / d;
    Ok((0..bins)
        .map(|k| {
            let (mut p, mut e, mut c) = (T::zero(), T::zero(), 0u64);
            for (u, &w) in sums.iter().zip(weights) {
                let wt = T::of_u64(w as u64);
                p += wt * u.prod[k];
                e += wt * u.exposure[k];
                c += w as u64 * u.pairs[k];
            }
            (c > 0 && e > T::zero()).then(|| (p / e - density * density) / norm)
        })
        .collect())
}

/// Time ACF of the marks of `series` on the bins of `opts.edges`.
pub fn time_acf<T: Real>(series: &EventSeries<T>, opts: &TimeAcfOptions<T>) -> Result<AcfCurve<T>> {
    let edges = &opts.edges;
    if edges.len() < 2 || !(edges[0] > T::zero()) || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CtrwError::InvalidParameter(
            "time ACF bin edges must be positive and strictly increasing".into(),
        ));
    }
    if series.is_empty() {
        return Err(CtrwError::InvalidParameter("time ACF of an empty series".into()));
    }
    let bins = edges.len() - 1;
    let marks: Vec<T> = match opts.marks {
        MarkKind::Absolute => series.increments().iter().map(|x| x.abs()).collect(),
        MarkKind::Signed => series.increments().to_vec(),
    };
    let ranges: Vec<Range<usize>> = series.sessions().iter().map(|s| s.range()).collect();
    let min_units = opts.bootstrap.map_or(1, |b| b.min_units);
    let units = make_units(&ranges, min_units);
    let sums: Vec<UnitSums<T>> = units
        .par_iter()
        .map(|u| unit_sums(series.times(), &marks, u, edges))
        .collect();
    let ones = vec![1u32; sums.len()];
    let values = combine(&sums, &ones, bins)?;
    let pair_counts: Vec<u64> = (0..bins).map(|k| sums.iter().map(|u| u.pairs[k]).sum()).collect();
    let (stderr, replicates) = match opts.bootstrap {
        Some(b) if b.replicates > 1 => {
            let draws = resample_counts(sums.len(), &b);
            let reps: Vec<Vec<Option<T>>> = draws
                .par_iter()
                .map(|w| combine(&sums, w, bins).unwrap_or_else(|_| vec![None; bins]))
                .collect();
            (spread(&reps, bins), reps)
        }
        _ => (vec![None; bins], Vec::new()),
    };
    Ok(AcfCurve {
        kind: AcfKind::Time,
        lags: edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect(),
        values,
        pair_counts,
        stderr,
        normalized: true,
        edges: edges.clone(),
        replicates,
    })
}

/// Time ACF of `|Δx|`.
pub fn time_acf_abs<T: Real>(series: &EventSeries<T>, edges: &[T]) -> Result<AcfCurve<T>> {
    time_acf(
        series,
        &TimeAcfOptions {
            edges: edges.to_vec(),
            marks: MarkKind::Absolute,
            bootstrap: None,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::series::SessionData;
    use rand::Rng;

    fn brute_exposure(lo: f64, hi: f64, a: f64, b: f64, w: f64) -> f64 {
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        (0..n)
            .map(|k| {
                let t = lo + (k as f64 + 0.5) * h;
                ((b.min(w - t)) - a).max(0.0)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn exposure_matches_numeric_integral() {
        for &(lo, hi, a, b, w) in &[
            (1.0, 2.0, 0.0, 10.0, 10.0),
            (1.0, 50.0, 3.0, 7.0, 20.0),
            (15.0, 19.0, 3.0, 7.0, 20.0),
            (30.0, 40.0, 0.0, 20.0, 20.0),
        ] {
            let e = exposure(lo, hi, a, b, w);
            assert!((e - brute_exposure(lo, hi, a, b, w)).abs() < 1e-6, "{lo} {hi} {a} {b} {w}: {e}");
        }
    }

    fn poisson_series(n: usize, seed: u64) -> EventSeries<f64> {
        let mut rng = stream(seed, 0);
        let waits = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let increments = (0..n).map(|_| rng.random::<f64>()).collect();
        EventSeries::from_waits(vec![SessionData { origin: 0.0, open: 0.0, weekday: 0, waits, increments }]).unwrap()
    }

    #[test]
    fn poisson_marks_have_flat_zero_acf() {
        let s = poisson_series(100_000, 3);
        let c = time_acf_abs(&s, &log_edges(1.0, 100.0, 4)).unwrap();
        for (k, v) in c.values.iter().enumerate() {
            // level relative to λ²Var(m) with Var = 1/12, mean = 1/2
            assert!(v.unwrap().abs() < 0.1, "bin {k}: {v:?}");
        }
    }

    #[test]
    fn two_events_give_one_pair() {
        let s = EventSeries::from_waits(vec![SessionData {
            origin: 0.0,
            open: 0.0,
            weekday: 0,
            waits: vec![1.0, 4.0],
            increments: vec![1.0, 3.0],
        }])
        .unwrap();
        let c = time_acf_abs(&s, &[1.0, 2.0, 5.0, 10.0]).unwrap();
        assert_eq!(c.pair_counts, vec![0, 1, 0]);
        assert!(c.values[0].is_none() && c.values[2].is_none());
        assert!(c.values[1].is_some());
    }

    #[test]
    fn rejects_bad_edges() {
        let s = poisson_series(10, 1);
        assert!(time_acf_abs(&s, &[0.0, 1.0]).is_err());
        assert!(time_acf_abs(&s, &[2.0, 1.0]).is_err());
    }
}
