//! Estimators on event series: step and time autocorrelations and
//! power-law slope fits.

pub mod curve;
pub mod fit;
pub mod step;
pub mod time;
mod units;

pub use curve::{AcfCurve, AcfKind};
pub use fit::{fit_slope, resolvable_until, AcfReport, FitMethod, SlopeFit, MIN_FIT_POINTS};
pub use step::{step_acf, step_acf_of_waits, StepAcfOptions};
pub use time::{log_edges, time_acf, time_acf_abs, MarkKind, TimeAcfOptions, DEFAULT_BINS_PER_DECADE};
pub use units::BootstrapOptions;
