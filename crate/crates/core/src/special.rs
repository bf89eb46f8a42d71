//! Special functions: Riemann and Hurwitz zeta, error function wrappers.

use crate::error::{CtrwError, Result};
use crate::scalar::Real;

/// B_{2j} / (2j)! for j = 1..=7.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (k + a)^{-s}` for real `s > 1`, `a > 0`.
///
/// A short direct sum shifts the argument to `b ≥ max(12, 2s)`, after which
/// the Euler–Maclaurin remainder (integral, half term and seven Bernoulli
/// corrections) is accurate to roughly machine precision.
pub fn hurwitz_zeta<T: Real>(s: T, a: T) -> Result<T> {
    if !(s > T::one()) {
        return Err(CtrwError::Domain(format!("hurwitz zeta needs s > 1, got {s}")));
    }
    if !(a > T::zero()) {
        return Err(CtrwError::Domain(format!("hurwitz zeta needs a > 0, got {a}")));
    }
    Ok(hurwitz_unchecked(s, a))
}

pub(crate) fn hurwitz_unchecked<T: Real>(s: T, a: T) -> T {
    let threshold = T::lit(12.0).max(T::lit(2.0) * s);
    let shift = if a < threshold {
        (threshold - a).ceil().to_usize().unwrap_or(0)
    } else {
        0
    };
    let b = a + T::of_usize(shift);

    // tail first, then the direct terms from small to large
    let mut total = b.powf(T::one() - s) / (s - T::one()) + b.powf(-s) / T::lit(2.0);
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut power = b.powf(-s - T::one());
    let b2 = b * b;
    for (j, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        total += T::lit(*coef) * rising * power;
        let next = T::of_usize(2 * j + 1);
        rising = rising * (s + next) * (s + next + T::one());
        power = power / b2;
    }
    for k in (0..shift).rev() {
        total += (a + T::of_usize(k)).powf(-s);
    }
    total
}

/// Riemann zeta `ζ(s)` for real `s > 1`.
pub fn zeta<T: Real>(s: T) -> Result<T> {
    hurwitz_zeta(s, T::one())
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_two_is_pi_squared_over_six() {
        let z = zeta(2.0_f64).unwrap();
        assert!((z - PI * PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn zeta_known_values() {
        // Apéry's constant and ζ(4) = π⁴/90
        assert!((zeta(3.0_f64).unwrap() - 1.202_056_903_159_594_3).abs() < 1e-15);
        assert!((zeta(4.0_f64).unwrap() - PI.powi(4) / 90.0).abs() < 1e-15);
        // ζ(1.5)
        assert!((zeta(1.5_f64).unwrap() - 2.612_375_348_685_488).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_shift_identity() {
        for &s in &[1.2_f64, 2.5, 3.5, 7.0] {
            for &a in &[0.5_f64, 1.0, 3.7, 40.0, 1e6] {
                let whole = hurwitz_zeta(s, a).unwrap();
                let lhs = whole - hurwitz_zeta(s, a + 1.0).unwrap();
                let rhs = a.powf(-s);
                // the difference cancels down to a^-s; compare at the scale of ζ(s, a)
                assert!((lhs - rhs).abs() < 1e-14 * whole.max(1.0), "s={s} a={a}");
            }
        }
    }

    #[test]
    fn rejects_pole_and_bad_argument() {
        assert!(zeta(1.0_f64).is_err());
        assert!(hurwitz_zeta(2.0_f64, 0.0).is_err());
    }

    #[test]
    fn single_precision_is_usable() {
        let z = zeta(2.0_f32).unwrap();
        assert!((z - (PI * PI / 6.0) as f32).abs() < 1e-6);
    }

    #[test]
    fn normal_cdf_symmetry() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(1.3) + normal_cdf(-1.3) - 1.0).abs() < 1e-15);
    }
}
