//! Step autocorrelation: correlation between values `n` events apart,
//! never pairing values from different sessions.

use std::ops::Range;

use rayon::prelude::*;

use super::curve::{AcfCurve, AcfKind};
use super::units::{make_units, resample_counts, spread, BootstrapOptions, Unit};
use crate::error::{CtrwError, Result};
use crate::scalar::Real;
use crate::series::EventSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepAcfOptions {
    pub max_lag: usize,
    /// Without a bootstrap the standard error is the white-noise `1/√pairs`.
    pub bootstrap: Option<BootstrapOptions>,
}

impl Default for StepAcfOptions {
    fn default() -> Self {
        Self {
            max_lag: 1000,
            bootstrap: None,
        }
    }
}

/// Pair sums of one unit, for values centred on the global mean:
/// `prod[n] = Σ y_i y_{i+n}`, `head[n] = Σ y_i`, `tail[n] = Σ y_{i+n}` over
/// the pairs starting in the unit.
struct UnitSums<T> {
    prod: Vec<T>,
    head: Vec<T>,
    tail: Vec<T>,
    pairs: Vec<u64>,
    total: T,
    len: usize,
}

#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut s = ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
    for (x, y) in ra.iter().zip(rb) {
        s += *x * *y;
    }
    s
}

fn unit_sums<T: Real>(y: &[T], prefix: &[T], unit: &Unit, max_lag: usize) -> UnitSums<T> {
    let mut out = UnitSums {
        prod: vec![T::zero(); max_lag + 1],
        head: vec![T::zero(); max_lag + 1],
        tail: vec![T::zero(); max_lag + 1],
        pairs: vec![0; max_lag + 1],
        total: prefix[unit.events.end] - prefix[unit.events.start],
        len: unit.events.len(),
    };
    let a = unit.events.start;
    for n in 0..=max_lag {
        let m = unit.events.end.min(unit.session.end.saturating_sub(n));
        if m <= a {
            break;
        }
        out.prod[n] = dot(&y[a..m], &y[a + n..m + n]);
        out.head[n] = prefix[m] - prefix[a];
        out.tail[n] = prefix[m + n] - prefix[a + n];
        out.pairs[n] = (m - a) as u64;
    }
    out
}

/// Correlation curve from weighted unit sums; the weights are bootstrap
/// multiplicities (all ones for the estimate itself).
fn combine<T: Real>(sums: &[UnitSums<T>], weights: &[u32], max_lag: usize) -> Result<Vec<Option<T>>> {
    let mut total = T::zero();
    let mut count = T::zero();
    for (u, &w) in sums.iter().zip(weights) {
        let w = T::of_u64(w as u64);
        total += w * u.total;
        count += w * T::of_usize(u.len);
    }
    let mu = total / count;
    let mut cov = Vec::with_capacity(max_lag + 1);
    for n in 0..=max_lag {
        let (mut acc, mut pairs) = (T::zero(), T::zero());
        for (u, &w) in sums.iter().zip(weights) {
            if w == 0 || u.pairs[n] == 0 {
                continue;
            }
            let w = T::of_u64(w as u64);
            let c = T::of_u64(u.pairs[n]);
            acc += w * (u.prod[n] - mu * (u.head[n] + u.tail[n]) + mu * mu * c);
            pairs += w * c;
        }
        cov.push((pairs > T::zero()).then(|| acc / pairs));
    }
    let var = cov[0].unwrap_or(T::zero());
    if !(var > T::zero()) {
        return Err(CtrwError::ZeroVariance("step ACF of a constant series".into()));
    }
    Ok(cov.into_iter().map(|c| c.map(|c| c / var)).collect())
}

/// Normalized step ACF of `values`; `sessions` are index ranges that pairs
/// may not straddle (pass the whole range for an unsegmented series).
pub fn step_acf<T: Real>(values: &[T], sessions: &[Range<usize>], opts: &StepAcfOptions) -> Result<AcfCurve<T>> {
    let max_lag = opts.max_lag;
    if values.len() <= max_lag + 10 {
        return Err(CtrwError::InvalidParameter(format!(
            "step ACF up to lag {max_lag} needs more than {} values, got {}",
            max_lag + 10,
            values.len()
        )));
    }
    if sessions.iter().any(|s| s.end > values.len() || s.start > s.end) {
        return Err(CtrwError::InvalidParameter("session range outside the series".into()));
    }
    let n = T::of_usize(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let y: Vec<T> = values.iter().map(|&v| v - mean).collect();
    let mut prefix = Vec::with_capacity(y.len() + 1);
    prefix.push(T::zero());
    let mut run = T::zero();
    for &v in &y {
        run += v;
        prefix.push(run);
    }
    let min_units = opts.bootstrap.map_or(1, |b| b.min_units);
    let units = make_units(sessions, min_units);
    let sums: Vec<UnitSums<T>> = units.par_iter().map(|u| unit_sums(&y, &prefix, u, max_lag)).collect();
    let ones = vec![1u32; sums.len()];
    let values = combine(&sums, &ones, max_lag)?;
    let pair_counts: Vec<u64> = (0..=max_lag).map(|n| sums.iter().map(|u| u.pairs[n]).sum()).collect();

    let (stderr, replicates) = match opts.bootstrap {
        Some(b) if b.replicates > 1 => {
            let draws = resample_counts(sums.len(), &b);
            let reps: Vec<Vec<Option<T>>> = draws
                .par_iter()
                .map(|w| combine(&sums, w, max_lag).unwrap_or_else(|_| vec![None; max_lag + 1]))
                .collect();
            (spread(&reps, max_lag + 1), reps)
        }
        _ => {
            let se = pair_counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (i > 0 && c > 0).then(|| T::one() / T::of_u64(c).sqrt()).or((i == 0).then(T::zero)))
                .collect();
            (se, Vec::new())
        }
    };
    Ok(AcfCurve {
        kind: AcfKind::Step,
        lags: (0..=max_lag).map(T::of_usize).collect(),
        values,
        pair_counts,
        stderr,
        normalized: true,
        edges: Vec::new(),
        replicates,
    })
}

/// Step ACF of the waiting times of a series, within its sessions.
pub fn step_acf_of_waits<T: Real>(series: &EventSeries<T>, opts: &StepAcfOptions) -> Result<AcfCurve<T>> {
    let ranges: Vec<Range<usize>> = series.sessions().iter().map(|s| s.range()).collect();
    step_acf(series.waits(), &ranges, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn lag_zero_is_one_and_white_noise_is_flat() {
        let mut rng = stream(1, 0);
        let x: Vec<f64> = (0..200_000).map(|_| -rng.random::<f64>().ln()).collect();
        let c = step_acf(&x, &[0..x.len()], &StepAcfOptions { max_lag: 50, bootstrap: None }).unwrap();
        assert_eq!(c.values[0], Some(1.0));
        for n in 1..=50 {
            let v = c.values[n].unwrap();
            assert!(v.abs() < 4.0 / (c.pair_counts[n] as f64).sqrt(), "lag {n}: {v}");
        }
    }

    #[test]
    fn matches_direct_computation() {
        let x: Vec<f64> = (0..300).map(|i| ((i * 37 % 101) as f64).sin() + (i as f64 * 0.01)).collect();
        let sessions = [0..120, 120..300];
        let c = step_acf(&x, &sessions, &StepAcfOptions { max_lag: 7, bootstrap: None }).unwrap();
        let mean = x.iter().sum::<f64>() / 300.0;
        let cov = |n: usize| {
            let (mut s, mut k) = (0.0, 0.0);
            for r in &sessions {
                for i in r.start..r.end.saturating_sub(n) {
                    s += (x[i] - mean) * (x[i + n] - mean);
                    k += 1.0;
                }
            }
            s / k
        };
        for n in 0..=7 {
            assert!((c.values[n].unwrap() - cov(n) / cov(0)).abs() < 1e-12);
        }
        assert_eq!(c.pair_counts[7], 113 + 173);
    }

    #[test]
    fn constant_series_is_rejected() {
        let x = vec![2.0_f64; 100];
        let err = step_acf(&x, &[0..100], &StepAcfOptions { max_lag: 5, bootstrap: None }).unwrap_err();
        assert!(matches!(err, CtrwError::ZeroVariance(_)));
    }

    #[test]
    fn short_series_is_rejected() {
        let x = vec![1.0_f64, 2.0, 3.0];
        assert!(step_acf(&x, &[0..3], &StepAcfOptions { max_lag: 5, bootstrap: None }).is_err());
    }

    #[test]
    fn bootstrap_gives_errors_and_is_reproducible() {
        let mut rng = stream(2, 0);
        let x: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let opts = StepAcfOptions {
            max_lag: 10,
            bootstrap: Some(BootstrapOptions { replicates: 50, seed: 4, min_units: 20 }),
        };
        let a = step_acf(&x, &[0..x.len()], &opts).unwrap();
        let b = step_acf(&x, &[0..x.len()], &opts).unwrap();
        assert_eq!(a, b);
        let se = a.stderr[3].unwrap();
        let white = 1.0 / (a.pair_counts[3] as f64).sqrt();
        assert!(se > 0.5 * white && se < 2.0 * white, "{se} vs {white}");
    }
}
