//! Classical limit of the twin-beam process and its non-Hermitian mode
//! analysis.
//!
//! Classically one evolves the field amplitudes `(alpha, beta*)` under the
//! 2x2 non-Hermitian matrix `N`; factorizing the second moments gives the
//! same equations as the quantum model minus the vacuum drive. Starting
//! from zero fields, the classical system therefore stays dark forever,
//! while the quantum system does not.
//!
//! Removing the average damping by a gauge transformation reduces `N` to
//! `N' = [[eta, zeta], [-zeta, -eta]]` with `eta = (i d_gamma - dk)/2`,
//! whose eigenvalues `+-sqrt(eta^2 - zeta^2)` coalesce at the exceptional
//! point `eta = zeta` and satisfy a generalized parity-time condition when
//! the loss contrast vanishes.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::dynamics::{
    build_affine_generator, AffineGenerator, MediumParams, MomentDerivative, MomentState,
};
use crate::propagation::{
    integrate_generator, max_real_eigenvalue, propagate_generator_closed_form, Trajectory,
    DEFAULT_GAIN_CAP,
};
use crate::Result;

type CMatrix2 = Matrix2<Complex64>;
type CVector2 = Vector2<Complex64>;

/// Classical field amplitudes of the two modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPair {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl FieldPair {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    /// Zero fields: the classical vacuum.
    pub fn dark() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// Real seed amplitude in mode `a` with intensity `n_a`.
    pub fn seeded(n_a: f64) -> Self {
        Self::new(Complex64::new(n_a.sqrt(), 0.0), Complex64::new(0.0, 0.0))
    }

    /// The evolved vector `u = (alpha, beta*)`.
    fn to_u(self) -> CVector2 {
        CVector2::new(self.alpha, self.beta.conj())
    }

    fn from_u(u: &CVector2) -> Self {
        Self::new(u[0], u[1].conj())
    }
}

/// The mode matrix `N` of the classical equations `du/dz = i N u`.
///
/// Only the total mismatch enters any observable; it is split evenly
/// between the two modes (`dk_a = dk_b = dk/2`), a pure gauge choice on
/// the relative phases.
fn mode_matrix(params: &MediumParams) -> CMatrix2 {
    let i = Complex64::i();
    let half_dk = 0.5 * params.delta_k;
    let zeta = params.xi;
    CMatrix2::new(
        i * (0.5 * params.gamma_a) - half_dk,
        Complex64::new(zeta, 0.0),
        Complex64::new(-zeta, 0.0),
        i * (0.5 * params.gamma_b) + half_dk,
    )
}

/// Derivative of the classical field amplitudes: `du/dz = i N u`.
///
/// Zero fields are a fixed point, so the classical model never turns on
/// spontaneously.
pub fn classical_field_rhs(fields: &FieldPair, params: &MediumParams) -> FieldPair {
    let du = mode_matrix(params) * fields.to_u() * Complex64::i();
    FieldPair::from_u(&du)
}

/// Exact classical propagation by the closed-form 2x2 matrix exponential.
pub fn propagate_fields_closed_form(
    fields: &FieldPair,
    params: &MediumParams,
    z: f64,
) -> FieldPair {
    let exp = expm2(&(mode_matrix(params) * (Complex64::i() * z)));
    FieldPair::from_u(&(exp * fields.to_u()))
}

/// Closed-form exponential of a complex 2x2 matrix.
///
/// Splitting `X = mu I + Y` with `tr Y = 0` gives `Y^2 = delta^2 I`, so
/// `exp(X) = e^mu (cosh(delta) I + sinhc(delta) Y)`. The hyperbolics are
/// folded into `e^(mu +- delta)` so strongly damped directions cannot
/// overflow on the way to a finite result.
fn expm2(x: &CMatrix2) -> CMatrix2 {
    let mu = 0.5 * (x[(0, 0)] + x[(1, 1)]);
    let y = x - CMatrix2::identity() * mu;
    let delta_sq = y[(0, 0)] * y[(1, 1)] - y[(0, 1)] * y[(1, 0)];
    let delta = (-delta_sq).sqrt();
    if delta.norm() < 1e-8 {
        // cosh and sinhc are 1 to double precision here.
        return (CMatrix2::identity() + y) * mu.exp();
    }
    let e_plus = (mu + delta).exp();
    let e_minus = (mu - delta).exp();
    let cosh_term = 0.5 * (e_plus + e_minus);
    let sinhc_term = 0.5 * (e_plus - e_minus) / delta;
    CMatrix2::identity() * cosh_term + y * sinhc_term
}

/// Second moments induced by a classical field configuration.
///
/// The cross-correlation is taken as `-alpha beta`: the relative-phase
/// gauge `b -> -b`, under which the field products satisfy the drive-free
/// moment equations with the same sign conventions as the quantum system.
pub fn moments_from_fields(fields: &FieldPair) -> MomentState {
    MomentState::new(
        fields.alpha.norm_sqr(),
        fields.beta.norm_sqr(),
        -fields.alpha * fields.beta,
    )
}

/// Right-hand side of the classical moment equations: identical to the
/// quantum [`crate::dynamics::moment_rhs`] with the vacuum drive removed.
pub fn classical_moment_rhs(
    state: &MomentState,
    params: &MediumParams,
) -> Result<MomentDerivative> {
    state.check_finite()?;
    let quantum = crate::dynamics::moment_rhs(state, params)?;
    Ok(MomentState::new(
        quantum.n_a,
        quantum.n_b,
        quantum.m + Complex64::new(0.0, params.xi),
    ))
}

/// The classical moment system as an affine generator: the quantum matrix
/// with a zero drive.
pub fn build_classical_generator(params: &MediumParams) -> AffineGenerator {
    let mut generator = build_affine_generator(params);
    generator.drive.fill(0.0);
    generator
}

/// Stepwise integration of the classical moment equations, mirroring
/// [`crate::propagation::integrate`].
pub fn integrate_classical(
    state0: &MomentState,
    params: &MediumParams,
    steps: usize,
) -> Result<Trajectory> {
    integrate_classical_capped(state0, params, steps, DEFAULT_GAIN_CAP)
}

pub fn integrate_classical_capped(
    state0: &MomentState,
    params: &MediumParams,
    steps: usize,
    gain_cap: f64,
) -> Result<Trajectory> {
    params.validate()?;
    state0.check_finite()?;
    let generator = build_classical_generator(params);
    integrate_generator(&generator, state0, params.length, steps, gain_cap)
}

/// Exact classical moment propagation at distance `z`.
pub fn propagate_classical_closed_form(
    state0: &MomentState,
    params: &MediumParams,
    z: f64,
) -> MomentState {
    let generator = build_classical_generator(params);
    propagate_generator_closed_form(&generator, state0, z)
}

/// Growth rate of the classical moment system; the generator matrix is
/// shared with the quantum system, so the rates coincide.
pub fn classical_growth_rate(params: &MediumParams) -> f64 {
    max_real_eigenvalue(&build_classical_generator(params).matrix)
}

/// Gauge-reduced description of the classical mode matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeReducedParams {
    /// `eta = (i d_gamma - dk) / 2` with `d_gamma = (gamma_a - gamma_b)/2`.
    pub eta: Complex64,
    /// Coupling of the reduced matrix; equal to the nonlinear rate `xi`.
    pub zeta: f64,
    /// `(gamma_a + gamma_b)/4`, the uniform field damping removed by the gauge.
    pub avg_damping: f64,
}

impl GaugeReducedParams {
    pub fn from_medium(params: &MediumParams) -> Self {
        let d_gamma = 0.5 * (params.gamma_a - params.gamma_b);
        Self {
            eta: (Complex64::i() * d_gamma - params.delta_k) / 2.0,
            zeta: params.xi,
            avg_damping: 0.25 * (params.gamma_a + params.gamma_b),
        }
    }

    /// The reduced matrix `N' = [[eta, zeta], [-zeta, -eta]]`.
    fn reduced_matrix(&self) -> CMatrix2 {
        CMatrix2::new(
            self.eta,
            Complex64::new(self.zeta, 0.0),
            Complex64::new(-self.zeta, 0.0),
            -self.eta,
        )
    }
}

/// Eigenvalues `+-sqrt(eta^2 - zeta^2)` of the gauge-reduced mode matrix.
pub fn eigenvalues_gauge_reduced(params: &MediumParams) -> (Complex64, Complex64) {
    let g = GaugeReducedParams::from_medium(params);
    let root = (g.eta * g.eta - g.zeta * g.zeta).sqrt();
    (root, -root)
}

/// Physical intensity growth rate recovered from the gauge-reduced
/// eigenvalues: `2 (|Im sqrt(eta^2 - zeta^2)| - avg_damping)`.
pub fn gauge_reduced_growth_rate(params: &MediumParams) -> f64 {
    let g = GaugeReducedParams::from_medium(params);
    let (root, _) = eigenvalues_gauge_reduced(params);
    2.0 * (root.im.abs() - g.avg_damping)
}

/// Distance `|eta^2 - zeta^2|` from the exceptional point, where the two
/// reduced eigenvalues coalesce.
pub fn exceptional_point_gap(params: &MediumParams) -> f64 {
    let g = GaugeReducedParams::from_medium(params);
    (g.eta * g.eta - g.zeta * g.zeta).norm()
}

/// Violation of the generalized parity-time condition `[PT, S N' S^-1] = 0`.
///
/// `P` swaps the two basis elements and `T` conjugates, so with
/// `A = S N' S^-1` the commutator acting on conjugated vectors is the
/// linear map `P conj(A) - A P`; the returned defect is its largest entry
/// modulus. It vanishes exactly when the loss contrast `d_gamma` is zero.
pub fn generalized_pt_defect(params: &MediumParams) -> f64 {
    let g = GaugeReducedParams::from_medium(params);
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    // S_11 = S_21 = 1, S_12 = -S_22 = -i.
    let s = CMatrix2::new(one, -i, one, i);
    let s_inv = s.try_inverse().expect("S is invertible");
    let a = s * g.reduced_matrix() * s_inv;
    let p = CMatrix2::new(
        Complex64::new(0.0, 0.0),
        one,
        one,
        Complex64::new(0.0, 0.0),
    );
    let commutator = p * a.conjugate() - a * p;
    commutator.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
