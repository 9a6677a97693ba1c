//! Two-mode Gaussian states built from the propagated moments.
//!
//! The covariance matrix is taken over the quadratures `(x_a, p_a, x_b, p_b)`
//! with the vacuum normalized to the identity, so thermal states have
//! symplectic eigenvalues `2n + 1` and every physical state has both
//! symplectic eigenvalues at least 1. Entanglement is measured by the
//! logarithmic negativity (a yes/no witness that is exact for one mode
//! against one mode) and by the Gaussian entanglement of formation,
//! minimized numerically over pure-state decompositions in [`eof`].

mod eof;

pub use eof::entanglement_of_formation;

use nalgebra::{Matrix2, Matrix4};

use crate::dynamics::MomentState;
use crate::propagation::Trajectory;
use crate::{par, Error, Result};

/// Physicality slack on the minimum symplectic eigenvalue.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Covariance matrix of a zero-mean two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCovariance {
    sigma: Matrix4<f64>,
}

impl TwoModeCovariance {
    /// Wraps a symmetric 4x4 matrix over `(x_a, p_a, x_b, p_b)`.
    pub fn new(sigma: Matrix4<f64>) -> Self {
        Self {
            sigma: 0.5 * (sigma + sigma.transpose()),
        }
    }

    pub fn vacuum() -> Self {
        Self::new(Matrix4::identity())
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.sigma
    }

    /// Minimum symplectic eigenvalue at least `1 - tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.symplectic_eigenvalues().0 >= 1.0 - tol
    }

    /// Moduli of the eigenvalues of `i Omega sigma`, one per mode,
    /// returned ascending.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        symplectic_eigenvalues(self)
    }
}

/// The 4x4 symplectic form, block diagonal `[[0, 1], [-1, 0]]` per mode.
pub fn symplectic_form() -> Matrix4<f64> {
    #[rustfmt::skip]
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
    );
    omega
}

/// Covariance matrix of the state with second moments `(n_a, n_b, m)`.
///
/// The propagated states have zero means and vanishing `<a^2>`, `<b^2>`,
/// `<a^dag b>`, so the diagonal blocks are thermal, `(2n + 1) I`, and the
/// cross block carries the pair correlation `m`.
pub fn covariance_from_moments(state: &MomentState) -> TwoModeCovariance {
    let mut sigma = Matrix4::zeros();
    let da = 2.0 * state.n_a + 1.0;
    let db = 2.0 * state.n_b + 1.0;
    sigma[(0, 0)] = da;
    sigma[(1, 1)] = da;
    sigma[(2, 2)] = db;
    sigma[(3, 3)] = db;
    let cross = 2.0 * Matrix2::new(state.m.re, state.m.im, state.m.im, -state.m.re);
    sigma.fixed_view_mut::<2, 2>(0, 2).copy_from(&cross);
    sigma.fixed_view_mut::<2, 2>(2, 0).copy_from(&cross.transpose());
    TwoModeCovariance::new(sigma)
}

fn symplectic_eigenvalues(cov: &TwoModeCovariance) -> (f64, f64) {
    // Moduli of the eigenvalues +-i nu of i Omega sigma, computed through
    // K = sigma^(1/2) Omega sigma^(1/2): K is antisymmetric and similar to
    // Omega sigma, so -K^2 is symmetric with eigenvalues nu^2, each twice.
    // Symmetric eigensolvers converge unconditionally (the nonsymmetric QR
    // iteration stalls on these rotation-like spectra) and the rounding
    // error stays linear in the covariance scale, which matters for
    // strongly squeezed states where the invariant-based formula cancels
    // catastrophically.
    let eig = nalgebra::SymmetricEigen::new(cov.sigma);
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let root =
        eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    let k = root * symplectic_form() * root;
    let mut nu_sq: Vec<f64> = (-k * k).symmetric_eigenvalues().iter().copied().collect();
    nu_sq.sort_by(f64::total_cmp);
    (
        (0.5 * (nu_sq[0] + nu_sq[1])).max(0.0).sqrt(),
        (0.5 * (nu_sq[2] + nu_sq[3])).max(0.0).sqrt(),
    )
}

/// Smallest symplectic eigenvalue after partial transposition of mode `b`
/// (`p_b -> -p_b`). Below 1 exactly when the state is entangled.
pub fn nu_tilde_min(cov: &TwoModeCovariance) -> f64 {
    let flip = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    let tilde = TwoModeCovariance::new(flip * cov.sigma * flip);
    tilde.symplectic_eigenvalues().0
}

/// Logarithmic negativity `max(0, -ln nu_tilde_min)` in natural log.
pub fn log_negativity(cov: &TwoModeCovariance) -> f64 {
    (-nu_tilde_min(cov).ln()).max(0.0)
}

/// Entropy of entanglement of a two-mode squeezed vacuum with squeezing
/// `r`, in nats: `(n+1) ln(n+1) - n ln n` with `n = sinh^2 r`.
pub fn entropy_of_entanglement(r: f64) -> f64 {
    let n = r.sinh().powi(2);
    if n <= 0.0 {
        return 0.0;
    }
    (n + 1.0) * (n + 1.0).ln() - n * n.ln()
}

/// Squeezing and thermal parameters of the single-beam reduced state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpectrumPoint {
    /// Squeezing parameter, `n = sinh^2 r`.
    pub r: f64,
    /// Mean photon number.
    pub n: f64,
    /// Thermal exponent `ln(1 / tanh^2 r)`; infinite at `n = 0`.
    pub alpha: f64,
}

/// Parameters of the pseudothermal reduced state with mean photon number `n`.
pub fn thermal_point_from_n(n: f64) -> ThermalSpectrumPoint {
    let r = n.sqrt().asinh();
    let alpha = if n > 0.0 {
        -2.0 * r.tanh().ln()
    } else {
        f64::INFINITY
    };
    ThermalSpectrumPoint { r, n, alpha }
}

/// Logarithmic negativity at every trajectory sample.
pub fn log_negativity_along(traj: &Trajectory) -> Vec<f64> {
    par::map_ordered(&traj.states, |s| {
        log_negativity(&covariance_from_moments(s))
    })
}

/// Entanglement of formation at every trajectory sample; the expensive
/// column, evaluated in parallel when the `parallel` feature is on.
pub fn eof_along(traj: &Trajectory, tol: f64) -> Result<Vec<f64>> {
    let results = par::map_ordered(&traj.states, |s| {
        entanglement_of_formation(&covariance_from_moments(s), tol)
    });
    results.into_iter().collect()
}

pub(crate) fn check_physical(cov: &TwoModeCovariance) -> Result<()> {
    let (nu_min, _) = cov.symplectic_eigenvalues();
    if nu_min < 1.0 - PHYSICALITY_TOL {
        return Err(Error::NonPhysicalCovariance { nu_min });
    }
    Ok(())
}
