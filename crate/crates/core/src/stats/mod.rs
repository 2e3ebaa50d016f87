//! Statistics toolbox shared by calibration, validation and backtesting.

mod correlation;
mod describe;
mod divergence;
mod icc;
mod ols;
mod shapiro;
mod ttest;

pub use correlation::{pearson, Correlation};
pub use describe::{entropy, entropy_of, mean, moments, population_sd, Moments};
pub use divergence::{js_divergence, Histogram};
pub use icc::icc_consistency;
pub use ols::{ols, RegressionFit};
pub use shapiro::{shapiro_wilk, ShapiroWilk};
pub use ttest::{welch_t_one_tailed, TTest};

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Upper-tail probability `P(T > t)` for Student-t with `df` degrees of freedom.
pub(crate) fn student_t_sf(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    // sf via the symmetric lower tail keeps precision for large positive t.
    dist.cdf(-t)
}
