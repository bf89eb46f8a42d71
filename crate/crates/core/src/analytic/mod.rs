//! Closed-form and Laplace-domain predictions.

pub mod acf;
pub mod inversion;
pub mod laplace;
pub mod propagator;
pub mod stehfest;

pub use acf::{
    asymptotic_moment_exponents, fit_anomalous_amplitude, step_acf_asymptote, step_acf_asymptotic_slope,
    step_acf_exact, MomentExponents,
};
pub use inversion::{invert_laplace, predict_moments, InvertedMoment};
pub use laplace::{
    laplace_big_j, laplace_gap, laplace_j, laplace_moments, laplace_sums, measure_coefficients, AppendixCoefficients,
    LaplaceMoment, LaplaceSums, MeasuredCoefficients, SumOptions, TailCorrection, TruncatedSum,
};
pub use propagator::{time_propagator, TimePropagatorQuery};
pub use stehfest::{stehfest_s_grid, GaverStehfest};
