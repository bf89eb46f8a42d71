//! Laplace-domain moments of the walk started at a block boundary.
//!
//! With `j_n(s) = Σ ν^n ψ̃(sν) ω(ν)` and `J_n(s) = Σ ν^n ψ̃(sν) Ω(ν)`, where
//! `Ω(ν) = P(block > ν)`,
//!
//! ```text
//! m̃₁(s) = μ₁/s · (J₀ + j₀)/(1 - j₀)
//! m̃₂(s) = 2μ₁²/s · [j₁(J₀ + j₀) + (1 - j₀)(J₁ + j₁ - J₀ - j₀)]/(1 - j₀)²
//!         + μ₂/s · (J₀ + j₀)/(1 - j₀)
//! ```
//!
//! The denominator `1 - j₀` is accumulated directly as `Σ ω(ν)(1 - ψ̃(sν))`
//! so it keeps its relative precision as `s → 0`.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{IncrementModel, RepetitionLaw, WaitingTimeModel, ZetaLaw};
use crate::error::{CtrwError, Result};
use crate::quad::{integrate, QuadOptions};
use crate::scalar::Real;
use crate::special::hurwitz_unchecked;

/// Smallest `1 - j₀` accepted as a denominator.
pub const MIN_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailCorrection {
    /// Plain truncation; the analytic tail bound must fall below tolerance.
    None,
    /// Truncation plus an Euler–Maclaurin estimate of the remainder.
    #[default]
    PowerLaw,
}

#[derive(Debug, Clone, Copy)]
pub struct SumOptions {
    /// Absolute tolerance, scaled by `max(1, |value|)`.
    pub tolerance: f64,
    pub nu_start: u64,
    /// Largest truncation point tried before giving up.
    pub nu_max: u64,
    pub tail: TailCorrection,
}

impl Default for SumOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            nu_start: 64,
            nu_max: 1 << 22,
            tail: TailCorrection::PowerLaw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedSum<T> {
    pub value: T,
    pub error: T,
    pub nu_max: u64,
}

/// The five series needed by the moment formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    SmallJ0,
    SmallJ1,
    BigJ0,
    BigJ1,
    /// `1 - j₀`
    Gap,
}

impl Series {
    const ALL: [Series; 5] = [Series::SmallJ0, Series::SmallJ1, Series::BigJ0, Series::BigJ1, Series::Gap];

    fn index(self) -> usize {
        self as usize
    }

    fn uses_survival(self) -> bool {
        matches!(self, Series::BigJ0 | Series::BigJ1)
    }

    fn power(self) -> i32 {
        match self {
            Series::SmallJ1 | Series::BigJ1 => 1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceSums<T> {
    pub j0: TruncatedSum<T>,
    pub j1: TruncatedSum<T>,
    pub big_j0: TruncatedSum<T>,
    pub big_j1: TruncatedSum<T>,
    pub gap: TruncatedSum<T>,
}

struct Summand<'a, T: Real> {
    law: &'a ZetaLaw<T>,
    waiting: &'a WaitingTimeModel<T>,
    s: T,
    survival: bool,
}

impl<T: Real> Summand<'_, T> {
    /// All five summands at real `ν = x`.
    fn at(&self, x: T) -> Result<[T; 5]> {
        let (psi, comp) = self.waiting.laplace_pair(self.s * x)?;
        let zr = self.law.zeta_rho();
        let w = x.powf(-self.law.rho()) / zr;
        let big = if self.survival {
            self.law.survival_strict_continuous(x)
        } else {
            T::zero()
        };
        Ok([psi * w, x * psi * w, psi * big, x * psi * big, comp * w])
    }
}

fn scaled_tol<T: Real>(tol: f64, v: T) -> T {
    T::lit(tol) * v.abs().max(T::one())
}

/// `∫_N^∞ f(x) dx` through `x = N exp(u/(1-u))`.
fn tail_integral<T: Real>(f: &Summand<'_, T>, series: Series, n: T, tol: f64) -> Result<(T, T)> {
    let failure: RefCell<Option<CtrwError>> = RefCell::new(None);
    let one = T::one();
    let r = integrate(
        |u: T| {
            let w = one - u;
            if w <= T::zero() {
                return T::zero();
            }
            let y = u / w;
            if y > T::lit(600.0) {
                return T::zero();
            }
            let x = n * y.exp();
            match f.at(x) {
                Ok(v) => {
                    let g = v[series.index()] * x / (w * w);
                    if g.is_finite() {
                        g
                    } else {
                        T::zero()
                    }
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    T::zero()
                }
            }
        },
        T::zero(),
        one,
        QuadOptions {
            abs_tol: tol * 0.05,
            rel_tol: 1e-11,
            max_intervals: 1000,
        },
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((r.value, r.error))
}

fn analytic_bound<T: Real>(law: &ZetaLaw<T>, waiting: &WaitingTimeModel<T>, s: T, series: Series, n: u64) -> Result<T> {
    let rho = law.rho();
    let a = T::of_u64(n) + T::one();
    let zr = law.zeta_rho();
    if series == Series::Gap {
        return Ok(hurwitz_unchecked(rho, a) / zr);
    }
    let psi = waiting.laplace(s * T::of_u64(n))?;
    // P(block > ν) ≤ ν^{1-ρ}/((ρ-1)ζ(ρ))
    let (exponent, scale) = if series.uses_survival() {
        (rho - T::one() - T::from_i32(series.power()).unwrap(), rho - T::one())
    } else {
        (rho - T::from_i32(series.power()).unwrap(), T::one())
    };
    if !(exponent > T::one()) {
        return Err(CtrwError::InvalidParameter(format!(
            "no analytic tail bound for {series:?} at rho = {rho}; use the power-law tail correction"
        )));
    }
    Ok(psi * hurwitz_unchecked(exponent, a) / (scale * zr))
}

fn zeta_sums<T: Real>(
    law: &ZetaLaw<T>,
    waiting: &WaitingTimeModel<T>,
    s: T,
    wanted: &[Series],
    opts: &SumOptions,
) -> Result<[Option<TruncatedSum<T>>; 5]> {
    if !(s >= T::zero()) {
        return Err(CtrwError::Domain(format!("Laplace variable must be non-negative, got {s}")));
    }
    let f = Summand {
        law,
        waiting,
        s,
        survival: wanted.iter().any(|k| k.uses_survival()),
    };
    let mut partial = [T::zero(); 5];
    let mut upto = 0u64;
    let mut n = opts.nu_start.max(8);
    let mut previous: Option<[T; 5]> = None;
    loop {
        while upto < n {
            upto += 1;
            let v = f.at(T::of_u64(upto))?;
            for k in wanted {
                partial[k.index()] += v[k.index()];
            }
        }
        let mut out = [None; 5];
        match opts.tail {
            TailCorrection::None => {
                let mut worst = 0.0f64;
                for &k in wanted {
                    let bound = analytic_bound(law, waiting, s, k, n)?;
                    let value = partial[k.index()];
                    worst = worst.max(bound.as_f64() / scaled_tol(1.0, value).as_f64());
                    out[k.index()] = Some(TruncatedSum { value, error: bound, nu_max: n });
                }
                if worst <= opts.tolerance {
                    return Ok(out);
                }
                if n >= opts.nu_max {
                    let mut m = n;
                    while m < (1 << 62) {
                        m *= 2;
                        let ok = wanted.iter().try_fold(true, |acc, &k| {
                            let b = analytic_bound(law, waiting, s, k, m)?;
                            Ok::<_, CtrwError>(acc && b <= scaled_tol(opts.tolerance, partial[k.index()]))
                        })?;
                        if ok {
                            break;
                        }
                    }
                    return Err(CtrwError::Truncation {
                        bound: worst,
                        tolerance: opts.tolerance,
                        suggested_nu_max: m,
                    });
                }
            }
            TailCorrection::PowerLaw => {
                let nf = T::of_u64(n);
                let half = T::lit(0.5);
                let at_n = f.at(nf)?;
                let lo = f.at(nf - half)?;
                let hi = f.at(nf + half)?;
                let mut estimate = [T::zero(); 5];
                let mut quad_err = [T::zero(); 5];
                for &k in wanted {
                    let i = k.index();
                    let (integral, err) = tail_integral(&f, k, nf, opts.tolerance)?;
                    let slope = hi[i] - lo[i];
                    estimate[i] = partial[i] + integral - at_n[i] / T::lit(2.0) - slope / T::lit(12.0);
                    quad_err[i] = err;
                }
                if let Some(prev) = previous {
                    let mut converged = true;
                    let mut worst = T::zero();
                    for &k in wanted {
                        let i = k.index();
                        let diff = (estimate[i] - prev[i]).abs();
                        worst = worst.max(diff);
                        converged &= diff <= scaled_tol(opts.tolerance, estimate[i]);
                        out[i] = Some(TruncatedSum {
                            value: estimate[i],
                            error: diff + quad_err[i],
                            nu_max: n,
                        });
                    }
                    if converged {
                        return Ok(out);
                    }
                    if n >= opts.nu_max {
                        return Err(CtrwError::Truncation {
                            bound: worst.as_f64(),
                            tolerance: opts.tolerance,
                            suggested_nu_max: n.saturating_mul(4),
                        });
                    }
                }
                previous = Some(estimate);
            }
        }
        n = n.saturating_mul(2);
    }
}

fn single_sums<T: Real>(waiting: &WaitingTimeModel<T>, s: T) -> Result<[Option<TruncatedSum<T>>; 5]> {
    let (psi, comp) = waiting.laplace_pair(s)?;
    let exact = |value| Some(TruncatedSum { value, error: T::zero(), nu_max: 1 });
    Ok([exact(psi), exact(psi), exact(T::zero()), exact(T::zero()), exact(comp)])
}

fn sums<T: Real>(
    s: T,
    waiting: &WaitingTimeModel<T>,
    repetition: &RepetitionLaw<T>,
    wanted: &[Series],
    opts: &SumOptions,
) -> Result<[Option<TruncatedSum<T>>; 5]> {
    match repetition {
        RepetitionLaw::Zeta(z) => zeta_sums(z, waiting, s, wanted, opts),
        RepetitionLaw::Single => single_sums(waiting, s),
    }
}

fn one_series<T: Real>(
    series: Series,
    s: T,
    waiting: &WaitingTimeModel<T>,
    repetition: &RepetitionLaw<T>,
    opts: &SumOptions,
) -> Result<TruncatedSum<T>> {
    Ok(sums(s, waiting, repetition, &[series], opts)?[series.index()].expect("requested series"))
}

fn order_series(order: u8, small: bool) -> Result<Series> {
    match (order, small) {
        (0, true) => Ok(Series::SmallJ0),
        (1, true) => Ok(Series::SmallJ1),
        (0, false) => Ok(Series::BigJ0),
        (1, false) => Ok(Series::BigJ1),
        _ => Err(CtrwError::InvalidParameter(format!("order must be 0 or 1, got {order}"))),
    }
}

/// `j(n; s) = Σ ν^n ψ̃(sν) ω(ν)`.
pub fn laplace_j<T: Real>(
    order: u8,
    s: T,
    waiting: &WaitingTimeModel<T>,
    repetition: &RepetitionLaw<T>,
    opts: &SumOptions,
) -> Result<TruncatedSum<T>> {
    one_series(order_series(order, true)?, s, waiting, repetition, opts)
}

/// `J(n; s) = Σ ν^n ψ̃(sν) Ω(ν)` with `Ω(ν) = P(block > ν)`.
pub fn laplace_big_j<T: Real>(
    order: u8,
    s: T,
    waiting: &WaitingTimeModel<T>,
    repetition: &RepetitionLaw<T>,
    opts: &SumOptions,
) -> Result<TruncatedSum<T>> {
    one_series(order_series(order, false)?, s, waiting, repetition, opts)
}

/// `1 - j(0; s)`.
pub fn laplace_gap<T: Real>(
    s: T,
    waiting: &WaitingTimeModel<T>,
    repetition: &RepetitionLaw<T>,
    opts: &SumOptions,
) -> Result<TruncatedSum<T>> {
    one_series(Series::Gap, s, waiting, repetition, opts)
}

pub fn laplace_sums<T: Real>(
    s: T,
    waiting: &WaitingTimeModel<T>,
    repetition: &RepetitionLaw<T>,
    opts: &SumOptions,
) -> Result<LaplaceSums<T>> {
    let all = sums(s, waiting, repetition, &Series::ALL, opts)?;
    let get = |k: Series| all[k.index()].expect("all series requested");
    Ok(LaplaceSums {
        j0: get(Series::SmallJ0),
        j1: get(Series::SmallJ1),
        big_j0: get(Series::BigJ0),
        big_j1: get(Series::BigJ1),
        gap: get(Series::Gap),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplaceMoment<T> {
    pub s_grid: Vec<T>,
    pub m1_tilde: Vec<T>,
    pub m2_tilde: Vec<T>,
    pub m1_error: Vec<T>,
    pub m2_error: Vec<T>,
    /// Largest truncation point used on the grid.
    pub truncation_nu_max: u64,
    pub tail_correction: TailCorrection,
}

impl<T: Real> LaplaceMoment<T> {
    /// Index of `s` in the grid, matched to a relative 1e-12.
    pub fn position(&self, s: T) -> Option<usize> {
        let i = self.s_grid.partition_point(|&g| g < s);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.s_grid.len())
            .find(|&j| (self.s_grid[j] - s).abs() <= T::lit(1e-12) * s.abs())
    }
}

/// Moment transforms at one `s` as `(m̃₁, m̃₂, err₁, err₂, ν_max)`.
pub fn moments_at<T: Real>(
    s: T,
    waiting: &WaitingTimeModel<T>,
    increment: &IncrementModel<T>,
    repetition: &RepetitionLaw<T>,
    opts: &SumOptions,
) -> Result<(T, T, T, T, u64)> {
    if !(s > T::zero()) || !s.is_finite() {
        return Err(CtrwError::Domain(format!("Laplace variable must be positive, got {s}")));
    }
    let sums = laplace_sums(s, waiting, repetition, opts)?;
    let gap = sums.gap.value;
    if !(gap >= T::lit(MIN_GAP)) {
        let scale = (waiting.mean() * repetition.mean()?).as_f64();
        return Err(CtrwError::SingularDenominator {
            s: s.as_f64(),
            gap: gap.as_f64(),
            usable_min_s: 10.0 * MIN_GAP / scale,
        });
    }
    let (mu1, mu2) = (increment.mu1(), increment.mu2());
    let two = T::lit(2.0);
    let (j0, j1, bj0, bj1) = (sums.j0.value, sums.j1.value, sums.big_j0.value, sums.big_j1.value);
    let (ej0, ej1, ebj0, ebj1, egap) = (sums.j0.error, sums.j1.error, sums.big_j0.error, sums.big_j1.error, sums.gap.error);

    let a = bj0 + j0;
    let ea = ebj0 + ej0;
    let ratio = a / gap;
    let e_ratio = ea / gap + a.abs() * egap / (gap * gap);

    let b = bj1 + j1 - a;
    let num = j1 * a + gap * b;
    let e_num = ej1 * a.abs() + j1.abs() * ea + egap * b.abs() + gap * (ebj1 + ej1 + ea);

    let m1 = mu1 / s * ratio;
    let m2 = two * mu1 * mu1 / s * num / (gap * gap) + mu2 / s * ratio;
    let e1 = mu1.abs() / s * e_ratio;
    let e2 = two * mu1 * mu1 / s * (e_num / (gap * gap) + two * num.abs() * egap / (gap * gap * gap))
        + mu2.abs() / s * e_ratio;
    let nu = [sums.j0, sums.j1, sums.big_j0, sums.big_j1, sums.gap]
        .iter()
        .map(|x| x.nu_max)
        .max()
        .unwrap_or(1);
    Ok((m1, m2, e1, e2, nu))
}

/// Evaluates `m̃₁(s)`, `m̃₂(s)` on a grid; grid points are independent and
/// run in parallel.
pub fn laplace_moments<T: Real>(
    s_grid: &[T],
    waiting: &WaitingTimeModel<T>,
    increment: &IncrementModel<T>,
    repetition: &RepetitionLaw<T>,
    opts: &SumOptions,
) -> Result<LaplaceMoment<T>> {
    repetition.mean()?;
    let mut grid = s_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    grid.dedup();
    let rows = grid
        .par_iter()
        .map(|&s| moments_at(s, waiting, increment, repetition, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut out = LaplaceMoment {
        s_grid: grid,
        m1_tilde: Vec::with_capacity(rows.len()),
        m2_tilde: Vec::with_capacity(rows.len()),
        m1_error: Vec::with_capacity(rows.len()),
        m2_error: Vec::with_capacity(rows.len()),
        truncation_nu_max: 0,
        tail_correction: opts.tail,
    };
    for (m1, m2, e1, e2, nu) in rows {
        out.m1_tilde.push(m1);
        out.m2_tilde.push(m2);
        out.m1_error.push(e1);
        out.m2_error.push(e2);
        out.truncation_nu_max = out.truncation_nu_max.max(nu);
    }
    Ok(out)
}

/// Closed-form expansion constants of `j(n;s)` and `J(n;s)` at `s = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AppendixCoefficients<T> {
    pub rho: T,
    pub mean_dt: T,
    /// `J(0;0) = ζ(ρ-1)/ζ(ρ) - 1`
    pub d0_0: T,
    /// `J(1;0) = (ζ(ρ-2) - ζ(ρ-1))/(2ζ(ρ))`, finite for `ρ > 3`
    pub d1_0: Option<T>,
    /// `C₁⁰/C₀¹ = -1/⟨Δt⟩`
    pub ratio_c10_over_c01: T,
}

impl<T: Real> AppendixCoefficients<T> {
    pub fn new(rho: T, mean_dt: T) -> Result<Self> {
        if !(rho > T::lit(2.0)) {
            return Err(CtrwError::NonErgodic { rho: rho.as_f64() });
        }
        if !(mean_dt > T::zero()) {
            return Err(CtrwError::InvalidParameter(format!("mean waiting time must be positive, got {mean_dt}")));
        }
        let one = T::one();
        let z = |x: T| hurwitz_unchecked(x, one);
        let (z0, z1) = (z(rho), z(rho - one));
        let d1_0 = (rho > T::lit(3.0)).then(|| (z(rho - T::lit(2.0)) - z1) / (T::lit(2.0) * z0));
        Ok(Self {
            rho,
            mean_dt,
            d0_0: z1 / z0 - one,
            d1_0,
            ratio_c10_over_c01: -one / mean_dt,
        })
    }

    /// `C_n⁰ = ζ(ρ-n)/ζ(ρ)`, defined while `ρ - n > 1`.
    pub fn c0_of_n(&self, n: u32) -> Result<T> {
        let arg = self.rho - T::of_usize(n as usize);
        if !(arg > T::one()) {
            return Err(CtrwError::Domain(format!("C_{n}^0 diverges: rho - n = {arg} <= 1")));
        }
        Ok(hurwitz_unchecked(arg, T::one()) / hurwitz_unchecked(self.rho, T::one()))
    }
}

/// The same constants measured from the numeric sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasuredCoefficients<T> {
    pub c0_0: T,
    pub c1_0: T,
    /// forward difference `(j(0;h) - j(0;0))/h`
    pub c0_1: T,
    pub d0_0: T,
    pub d1_0: Option<T>,
}

impl<T: Real> MeasuredCoefficients<T> {
    pub fn ratio_c10_over_c01(&self) -> T {
        self.c1_0 / self.c0_1
    }
}

pub const DERIVATIVE_STEP: f64 = 1e-6;

pub fn measure_coefficients<T: Real>(
    waiting: &WaitingTimeModel<T>,
    repetition: &RepetitionLaw<T>,
    opts: &SumOptions,
) -> Result<MeasuredCoefficients<T>> {
    repetition.mean()?;
    let zero = T::zero();
    let h = T::lit(DERIVATIVE_STEP);
    let c0_0 = laplace_j(0, zero, waiting, repetition, opts)?.value;
    let c1_0 = laplace_j(1, zero, waiting, repetition, opts)?.value;
    let c0_1 = -laplace_gap(h, waiting, repetition, opts)?.value / h;
    let d0_0 = laplace_big_j(0, zero, waiting, repetition, opts)?.value;
    let d1_0 = match repetition.rho() {
        Some(rho) if rho > T::lit(3.0) => Some(laplace_big_j(1, zero, waiting, repetition, opts)?.value),
        Some(_) => None,
        None => Some(zero),
    };
    Ok(MeasuredCoefficients {
        c0_0,
        c1_0,
        c0_1,
        d0_0,
        d1_0,
    })
}
