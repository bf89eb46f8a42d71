//! Time-domain moments from their Laplace transforms.

use serde::Serialize;

use super::laplace::{laplace_moments, LaplaceMoment, SumOptions};
use super::stehfest::{stehfest_s_grid, GaverStehfest, CHECK_ORDER, DEFAULT_ORDER};
use crate::dist::{IncrementModel, RepetitionLaw, WaitingTimeModel};
use crate::error::{CtrwError, Result};
use crate::scalar::Real;

/// Relative disagreement between the two inversion orders above which a row
/// is flagged.
pub const RELIABILITY_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvertedMoment<T> {
    pub t: T,
    pub m1: T,
    pub m2: T,
    pub variance: T,
    /// order sensitivity plus propagated truncation error
    pub m1_error: T,
    pub m2_error: T,
    pub reliable: bool,
}

fn gather<T: Real>(lm: &LaplaceMoment<T>, t: T, order: usize) -> Result<Vec<usize>> {
    (1..=order)
        .map(|k| {
            let s = GaverStehfest::node(k, t);
            lm.position(s).ok_or_else(|| {
                CtrwError::Domain(format!(
                    "Laplace grid has no node s = {s} needed to invert at t = {t}; build it with stehfest_s_grid"
                ))
            })
        })
        .collect()
}

/// Inverts `m̃₁`, `m̃₂` with the order-12 Gaver–Stehfest formula; the
/// order-10 result supplies the sensitivity estimate.
pub fn invert_laplace<T: Real>(lm: &LaplaceMoment<T>, t_grid: &[T]) -> Result<Vec<InvertedMoment<T>>> {
    let main = GaverStehfest::<T>::new(DEFAULT_ORDER)?;
    let check = GaverStehfest::<T>::new(CHECK_ORDER)?;
    t_grid
        .iter()
        .map(|&t| {
            if !(t > T::zero()) {
                return Err(CtrwError::Domain(format!("inversion time must be positive, got {t}")));
            }
            let idx = gather(lm, t, DEFAULT_ORDER)?;
            let pick = |v: &[T]| idx.iter().map(|&i| v[i]).collect::<Vec<T>>();
            let (f1, f2) = (pick(&lm.m1_tilde), pick(&lm.m2_tilde));
            let m1 = main.combine(t, &f1);
            let m2 = main.combine(t, &f2);
            let d1 = (m1 - check.combine(t, &f1[..CHECK_ORDER])).abs();
            let d2 = (m2 - check.combine(t, &f2[..CHECK_ORDER])).abs();
            let propagated = |errs: &[T]| {
                main.weights()
                    .iter()
                    .zip(idx.iter().map(|&i| errs[i]))
                    .map(|(&w, e)| w.abs() * e)
                    .sum::<T>()
                    * T::LN_2()
                    / t
            };
            let limit = T::lit(RELIABILITY_THRESHOLD);
            let reliable = d1 <= limit * m1.abs() && d2 <= limit * m2.abs();
            Ok(InvertedMoment {
                t,
                m1,
                m2,
                variance: m2 - m1 * m1,
                m1_error: d1 + propagated(&lm.m1_error),
                m2_error: d2 + propagated(&lm.m2_error),
                reliable,
            })
        })
        .collect()
}

/// Evaluates the transforms on exactly the nodes the inversion needs, then
/// inverts.
pub fn predict_moments<T: Real>(
    t_grid: &[T],
    waiting: &WaitingTimeModel<T>,
    increment: &IncrementModel<T>,
    repetition: &RepetitionLaw<T>,
    opts: &SumOptions,
) -> Result<Vec<InvertedMoment<T>>> {
    let s_grid = stehfest_s_grid(t_grid, DEFAULT_ORDER);
    let lm = laplace_moments(&s_grid, waiting, increment, repetition, opts)?;
    invert_laplace(&lm, t_grid)
}
