//! Gaver–Stehfest numerical inversion of real-axis Laplace transforms.
//!
//! The weights alternate in sign and grow quickly with the order, so they
//! are computed in exact rational arithmetic and rounded once at the end.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{CtrwError, Result};
use crate::scalar::Real;

pub const DEFAULT_ORDER: usize = 12;
pub const CHECK_ORDER: usize = 10;

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact Stehfest weights `V_1 … V_N` for even `N`.
pub fn stehfest_weights_exact(order: usize) -> Result<Vec<BigRational>> {
    if order < 2 || order % 2 != 0 || order > 40 {
        return Err(CtrwError::InvalidParameter(format!(
            "Stehfest order must be even and in [2, 40], got {order}"
        )));
    }
    let half = order / 2;
    let weights = (1..=order)
        .map(|k| {
            let mut acc = BigRational::zero();
            for j in (k + 1) / 2..=k.min(half) {
                let num = BigInt::from(j).pow(half as u32) * factorial(2 * j);
                let den = factorial(half - j) * factorial(j) * factorial(j - 1) * factorial(k - j) * factorial(2 * j - k);
                acc += BigRational::new(num, den);
            }
            if (k + half) % 2 == 1 {
                -acc
            } else {
                acc
            }
        })
        .collect();
    Ok(weights)
}

#[derive(Debug, Clone)]
pub struct GaverStehfest<T> {
    order: usize,
    weights: Vec<T>,
}

impl<T: Real> GaverStehfest<T> {
    pub fn new(order: usize) -> Result<Self> {
        let weights = stehfest_weights_exact(order)?
            .iter()
            .map(|w| T::lit(w.to_f64().unwrap_or(f64::NAN)))
            .collect();
        Ok(Self { order, weights })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Laplace variable of node `k` (1-based) for time `t`.
    #[inline]
    pub fn node(k: usize, t: T) -> T {
        T::of_usize(k) * T::LN_2() / t
    }

    pub fn nodes(&self, t: T) -> Vec<T> {
        (1..=self.order).map(|k| Self::node(k, t)).collect()
    }

    /// Combines transform values taken at [`GaverStehfest::nodes`].
    pub fn combine(&self, t: T, values: &[T]) -> T {
        let sum: T = self.weights.iter().zip(values).map(|(&w, &v)| w * v).sum();
        sum * T::LN_2() / t
    }

    pub fn invert<F: FnMut(T) -> Result<T>>(&self, mut f: F, t: T) -> Result<T> {
        if !(t > T::zero()) {
            return Err(CtrwError::Domain(format!("inversion time must be positive, got {t}")));
        }
        let values = self.nodes(t).into_iter().map(&mut f).collect::<Result<Vec<T>>>()?;
        Ok(self.combine(t, &values))
    }
}

/// Sorted distinct Laplace nodes needed to invert at every `t` with `order`
/// (lower even orders reuse a prefix of the same nodes).
pub fn stehfest_s_grid<T: Real>(t_grid: &[T], order: usize) -> Vec<T> {
    let mut s: Vec<T> = t_grid
        .iter()
        .flat_map(|&t| (1..=order).map(move |k| GaverStehfest::node(k, t)))
        .collect();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    s.dedup();
    s
}
