//! Log-log power-law fits of ACF curves.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::curve::{AcfCurve, AcfKind};
use crate::error::{CtrwError, Result};
use crate::scalar::Real;

pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    OlsLoglog,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Bootstrap error when replicates were available, else the OLS one.
    pub stderr: T,
    pub ols_stderr: T,
    pub bootstrap_stderr: Option<T>,
    pub fit_range: (T, T),
    pub r_squared: T,
    pub method: FitMethod,
    pub n_points: usize,
    /// Bins in range skipped because no pair fell in them.
    pub skipped: usize,
}

impl<T: Real> SlopeFit<T> {
    /// `|a - b| ≤ se_a + se_b`.
    pub fn agrees_with(&self, other: &SlopeFit<T>) -> bool {
        (self.slope - other.slope).abs() <= self.stderr + other.stderr
    }
}

struct Ols<T> {
    slope: T,
    intercept: T,
    stderr: T,
    r_squared: T,
    n: usize,
    skipped: usize,
}

fn ols_loglog<T: Real>(lags: &[T], values: &[Option<T>], lo: T, hi: T) -> Result<Ols<T>> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut skipped = 0;
    for (&l, &v) in lags.iter().zip(values) {
        if l < lo || l > hi {
            continue;
        }
        match v {
            None => skipped += 1,
            Some(v) if v > T::zero() && l > T::zero() => {
                xs.push(l.ln());
                ys.push(v.ln());
            }
            Some(v) => {
                return Err(CtrwError::Fit(format!(
                    "non-positive ACF value {v} at lag {l}; narrow the fit range [{lo}, {hi}] to where the curve is positive"
                )))
            }
        }
    }
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(CtrwError::Fit(format!(
            "only {n} usable points in [{lo}, {hi}], need at least {MIN_FIT_POINTS}"
        )));
    }
    let nf = T::of_usize(n);
    let mx = xs.iter().copied().sum::<T>() / nf;
    let my = ys.iter().copied().sum::<T>() / nf;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if !(sxx > T::zero()) {
        return Err(CtrwError::Fit("fit range holds a single lag".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = (syy - slope * sxy).max(T::zero());
    let stderr = if n > 2 { (rss / (nf - T::lit(2.0)) / sxx).sqrt() } else { T::zero() };
    let r_squared = if syy > T::zero() { T::one() - rss / syy } else { T::one() };
    Ok(Ols {
        slope,
        intercept,
        stderr,
        r_squared,
        n,
        skipped,
    })
}

/// Least-squares slope of `log value` against `log lag` over
/// `[lag_min, lag_max]`; bootstrap replicates stored on the curve supply a
/// second error estimate.
pub fn fit_slope<T: Real>(curve: &AcfCurve<T>, lag_min: T, lag_max: T) -> Result<SlopeFit<T>> {
    if !(lag_min < lag_max) {
        return Err(CtrwError::Fit(format!("empty fit range [{lag_min}, {lag_max}]")));
    }
    let main = ols_loglog(&curve.lags, &curve.values, lag_min, lag_max)?;
    let slopes: Vec<T> = curve
        .replicates
        .iter()
        .filter_map(|r| ols_loglog(&curve.lags, r, lag_min, lag_max).ok().map(|f| f.slope))
        .collect();
    let bootstrap_stderr = (slopes.len() >= 2 && 2 * slopes.len() >= curve.replicates.len()).then(|| {
        let n = T::of_usize(slopes.len());
        let m = slopes.iter().copied().sum::<T>() / n;
        (slopes.iter().map(|&s| (s - m) * (s - m)).sum::<T>() / (n - T::one())).sqrt()
    });
    Ok(SlopeFit {
        slope: main.slope,
        intercept: main.intercept,
        stderr: bootstrap_stderr.unwrap_or(main.stderr),
        ols_stderr: main.stderr,
        bootstrap_stderr,
        fit_range: (lag_min, lag_max),
        r_squared: main.r_squared,
        method: if bootstrap_stderr.is_some() {
            FitMethod::Bootstrap
        } else {
            FitMethod::OlsLoglog
        },
        n_points: main.n,
        skipped: main.skipped,
    })
}

/// Upper end of the leading run of bins from `lag_min` whose value exceeds
/// `k` bootstrap standard errors, capped at `lag_max`. Bins without an error
/// estimate count as resolved. `None` if the first bin in range fails.
pub fn resolvable_until<T: Real>(curve: &AcfCurve<T>, lag_min: T, lag_max: T, k: T) -> Option<T> {
    let mut last = None;
    for (i, &lag) in curve.lags.iter().enumerate() {
        if lag < lag_min {
            continue;
        }
        if lag > lag_max {
            break;
        }
        match (curve.values[i], curve.stderr[i]) {
            (Some(v), Some(se)) if v > k * se => last = Some(lag),
            (Some(_), None) => last = Some(lag),
            _ => break,
        }
    }
    last
}

/// Compact JSON-ready summary of a curve and its fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfReport<T> {
    pub kind: AcfKind,
    pub lags: Vec<T>,
    pub values: Vec<Option<T>>,
    pub counts: Vec<u64>,
    pub slope: Option<T>,
    pub stderr: Option<T>,
    pub range: Option<(T, T)>,
}

impl<T: Real + Serialize> AcfReport<T> {
    pub fn new(curve: &AcfCurve<T>, fit: Option<&SlopeFit<T>>) -> Self {
        Self {
            kind: curve.kind,
            lags: curve.lags.clone(),
            values: curve.values.clone(),
            counts: curve.pair_counts.clone(),
            slope: fit.map(|f| f.slope),
            stderr: fit.map(|f| f.stderr),
            range: fit.map(|f| f.fit_range),
        }
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(|e| CtrwError::Io(e.into()))
    }
}
