//! Step autocorrelation of waiting times and the asymptotic exponents of the
//! walk's moments.

use serde::Serialize;

use crate::dist::RepetitionLaw;
use crate::error::{CtrwError, Result};
use crate::scalar::Real;

fn zeta_rho<T: Real>(law: &RepetitionLaw<T>) -> Result<T> {
    match law.rho() {
        Some(rho) if rho > T::lit(2.0) => Ok(rho),
        Some(rho) => Err(CtrwError::NonErgodic { rho: rho.as_f64() }),
        None => Err(CtrwError::InvalidParameter(
            "asymptotic laws need a zeta repetition law".into(),
        )),
    }
}

/// Exact normalized step ACF `corr(n) = cov(n)/σ²_Δt = Ω₁(n)`.
pub fn step_acf_exact<T: Real>(law: &RepetitionLaw<T>, n: u64) -> Result<T> {
    law.omega1(n)
}

/// Large-lag form `n^{-(ρ-2)} / (ζ(ρ-1)(ρ-2)(ρ-1))`.
pub fn step_acf_asymptote<T: Real>(law: &RepetitionLaw<T>, n: u64) -> Result<T> {
    let rho = zeta_rho(law)?;
    let z1 = match law {
        RepetitionLaw::Zeta(z) => z.zeta_rho_m1().expect("rho > 2"),
        RepetitionLaw::Single => unreachable!(),
    };
    let two = T::lit(2.0);
    Ok(T::of_u64(n).powf(two - rho) / (z1 * (rho - two) * (rho - T::one())))
}

/// Log-log slope of the step ACF at large lags, `-(ρ-2)`.
pub fn step_acf_asymptotic_slope<T: Real>(law: &RepetitionLaw<T>) -> Result<T> {
    Ok(T::lit(2.0) - zeta_rho(law)?)
}

/// Power-law exponents of the anomalous terms of the walk's moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentExponents<T> {
    /// exponent of the `t^{3-ρ}` correction to `m₁(t)`
    pub m1_powerlaw_exp: T,
    /// exponent of the `t^{4-ρ}` term of `σ²(t)`
    pub variance_powerlaw_exp: T,
    /// decay exponent of the increment ACF: `-(ρ-2)`, or `-(ρ-1)` when `μ₁ = 0`
    pub acf_exp: T,
}

impl<T: Real> MomentExponents<T> {
    /// Normal diffusion when the power-law variance term grows sub-linearly.
    pub fn is_normal_diffusion(&self) -> bool {
        self.variance_powerlaw_exp <= T::one()
    }
}

pub fn asymptotic_moment_exponents<T: Real>(rho: T, mu1_zero: bool) -> Result<MomentExponents<T>> {
    if !(rho > T::lit(2.0)) {
        return Err(CtrwError::NonErgodic { rho: rho.as_f64() });
    }
    let acf_exp = if mu1_zero { T::one() - rho } else { T::lit(2.0) - rho };
    Ok(MomentExponents {
        m1_powerlaw_exp: T::lit(3.0) - rho,
        variance_powerlaw_exp: T::lit(4.0) - rho,
        acf_exp,
    })
}

/// Amplitude `A` of the anomalous first-moment term, fitted by least squares
/// of `m₁(t) - (μ₁/⟨Δt⟩) t` against `A t^{3-ρ}`.
pub fn fit_anomalous_amplitude<T: Real>(times: &[T], m1: &[T], mu1: T, mean_dt: T, rho: T) -> Result<T> {
    if times.len() != m1.len() || times.is_empty() {
        return Err(CtrwError::InvalidParameter("need matching, non-empty t and m1".into()));
    }
    let exp = T::lit(3.0) - rho;
    let (mut num, mut den) = (T::zero(), T::zero());
    for (&t, &m) in times.iter().zip(m1) {
        let basis = t.powf(exp);
        num += basis * (m - mu1 / mean_dt * t);
        den += basis * basis;
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lag_is_one() {
        let law = RepetitionLaw::zeta(3.5_f64).unwrap();
        assert_eq!(step_acf_exact(&law, 0).unwrap(), 1.0);
    }

    #[test]
    fn exponents() {
        let e = asymptotic_moment_exponents(2.5_f64, false).unwrap();
        assert_eq!((e.m1_powerlaw_exp, e.variance_powerlaw_exp, e.acf_exp), (0.5, 1.5, -0.5));
        assert!(!e.is_normal_diffusion());
        assert_eq!(asymptotic_moment_exponents(2.5_f64, true).unwrap().acf_exp, -1.5);
        let e4 = asymptotic_moment_exponents(4.0_f64, false).unwrap();
        assert_eq!(e4.variance_powerlaw_exp, 0.0);
        assert!(e4.is_normal_diffusion());
        assert!(asymptotic_moment_exponents(2.0_f64, false).is_err());
    }

    #[test]
    fn slopes() {
        let l = RepetitionLaw::zeta(2.25_f64).unwrap();
        assert!((step_acf_asymptotic_slope(&l).unwrap() + 0.25).abs() < 1e-15);
        let l = RepetitionLaw::zeta(3.0_f64).unwrap();
        assert_eq!(step_acf_asymptotic_slope(&l).unwrap(), -1.0);
        assert!(step_acf_asymptotic_slope(&RepetitionLaw::<f64>::Single).is_err());
    }

    #[test]
    fn amplitude_fit_recovers_planted_value() {
        let t: Vec<f64> = (1..30).map(|i| 10.0 * i as f64).collect();
        let m1: Vec<f64> = t.iter().map(|&t| 2.0 * t - 0.7 * t.powf(0.5)).collect();
        let a = fit_anomalous_amplitude(&t, &m1, 1.0, 0.5, 2.5).unwrap();
        assert!((a + 0.7).abs() < 1e-12);
    }
}
