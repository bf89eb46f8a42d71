//! Soft propagator of the waiting-time process,
//! `P(Δt; n | Δt₀) = δ(Δt - Δt₀) Ω₁(n) + [1 - Ω₁(n)] ψ(Δt)`.

use crate::dist::{RepetitionLaw, WaitingTimeModel};
use crate::error::{CtrwError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct TimePropagatorQuery<T: Real> {
    pub dt0: T,
    pub n: u64,
    pub waiting: WaitingTimeModel<T>,
    pub repetition: RepetitionLaw<T>,
}

/// Probability that the waiting time `n` steps after `Δt₀` falls in
/// `[dt, dt + bin)`: the atom at `Δt₀` (if inside) plus the continuous part
/// integrated over the bin.
pub fn time_propagator<T: Real>(q: &TimePropagatorQuery<T>, dt: T, bin: T) -> Result<T> {
    if !(bin > T::zero()) {
        return Err(CtrwError::InvalidParameter(format!("bin width must be positive, got {bin}")));
    }
    let stay = q.repetition.omega1(q.n)?;
    let hi = dt + bin;
    let atom = if q.dt0 >= dt && q.dt0 < hi { stay } else { T::zero() };
    Ok(atom + (T::one() - stay) * q.waiting.bin_mass(dt, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(n: u64) -> TimePropagatorQuery<f64> {
        TimePropagatorQuery {
            dt0: 0.8,
            n,
            waiting: WaitingTimeModel::exponential(1.0).unwrap(),
            repetition: RepetitionLaw::zeta(3.0).unwrap(),
        }
    }

    #[test]
    fn zero_steps_is_pure_atom() {
        let q = query(0);
        assert_eq!(time_propagator(&q, 0.75, 0.1).unwrap(), 1.0);
        assert_eq!(time_propagator(&q, 1.0, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn far_steps_approach_psi() {
        let q = query(10_000_000);
        let m = time_propagator(&q, 2.0, 0.5).unwrap();
        let psi = q.waiting.bin_mass(2.0, 2.5);
        assert!((m - psi).abs() < 1e-6);
    }

    #[test]
    fn rejects_empty_bin() {
        assert!(time_propagator(&query(1), 1.0, 0.0).is_err());
    }
}
