//! Twin-beam generation in a lossy nonlinear medium.
//!
//! Propagates the second-moment equations for spontaneous pair generation
//! into two modes `a` and `b` of a nonlinear medium with engineered loss,
//! alongside the corresponding classical field model. From the propagated
//! moments the library builds two-mode Gaussian covariance matrices and
//! evaluates entanglement measures (logarithmic negativity, entanglement
//! of formation), and it searches for the loss rate that maximizes the
//! brightness of mode `a` away from phase matching.
//!
//! Organization:
//! - [`dynamics`]: physical parameters and the moment equations of motion.
//! - [`propagation`]: stepwise and closed-form propagators, growth rates.
//! - [`classical`]: classical field/moment limit and the gauge-reduced
//!   non-Hermitian mode analysis (exceptional point, generalized PT).
//! - [`gaussian`]: covariance matrices, symplectic spectra, entanglement.
//! - [`sweep`]: parameter sweeps, optimal-loss search, thresholds.
//!
//! All computations are pure functions of their inputs. With the default
//! `parallel` feature, sweep grids and per-sample entanglement columns are
//! evaluated on a rayon pool; results are ordered and bitwise identical to
//! the sequential fallback (build with `--no-default-features` to force
//! sequential evaluation everywhere).

pub mod classical;
pub mod dynamics;
pub mod gaussian;
mod par;
pub mod propagation;
pub mod sweep;

pub use dynamics::{AffineGenerator, MediumParams, MomentState};
pub use gaussian::TwoModeCovariance;
pub use propagation::Trajectory;

use thiserror::Error;

/// Errors reported by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical parameter violates its invariant.
    #[error("invalid parameter `{field}`: {reason} (got {value})")]
    InvalidParam {
        field: &'static str,
        reason: &'static str,
        value: f64,
    },

    /// A moment-state component is NaN or infinite.
    #[error("non-finite moment component `{field}` (got {value})")]
    NonFiniteMoment { field: &'static str, value: f64 },

    /// Stepwise integration requires at least two steps.
    #[error("integration needs at least 2 steps (got {0})")]
    TooFewSteps(usize),

    /// The spectral density of mode `a` exceeded the configured cap.
    #[error("gain overflow: n_a = {n_a:.3e} exceeded cap {cap:.3e} at z = {z}")]
    GainOverflow { z: f64, n_a: f64, cap: f64 },

    /// A covariance matrix fails the physicality condition.
    #[error("covariance is not physical: min symplectic eigenvalue {nu_min} < 1")]
    NonPhysicalCovariance { nu_min: f64 },

    /// A sweep or search was given an empty or unordered grid.
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    /// A root search could not bracket a sign change.
    #[error("threshold search failed: {0}")]
    ThresholdSearch(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
