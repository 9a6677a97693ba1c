//! Physical parameters and the quantum moment equations of motion.
//!
//! The state of one frequency slice of the twin-beam field is captured by
//! three second moments: the spectral densities `n_a`, `n_b` of the two
//! modes and the complex cross-correlation `m`. Under a cw pump and
//! per-mode linear loss they obey a closed affine system
//!
//! ```text
//! dn_a/dz     = -2 xi Im m - gamma_a n_a
//! dn_b/dz     = -2 xi Im m - gamma_b n_b
//! d(Re m)/dz  =  dk Im m  - (gamma_a + gamma_b)/2 Re m
//! d(Im m)/dz  = -dk Re m  - (gamma_a + gamma_b)/2 Im m - xi (n_a + n_b + 1)
//! ```
//!
//! The constant `-xi` in the last line is the vacuum-fluctuation drive: it
//! forces `m` (and through it the photon numbers) away from zero even when
//! the medium is seeded with vacuum. Dropping it yields the classical
//! moment equations (see [`crate::classical`]).

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::{Error, Result};

/// Physical configuration of the nonlinear medium.
///
/// Rates are per unit length; by convention sweeps are run in units where
/// `xi = 1`. The nonlinearity profile is the rectangular window `[0, length]`,
/// so the same coefficients apply at every `z` inside the medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// Nonlinear coupling rate (>= 0).
    pub xi: f64,
    /// Total phase mismatch, the sum of the per-mode mismatches.
    pub delta_k: f64,
    /// Loss rate of mode `a` (>= 0).
    pub gamma_a: f64,
    /// Loss rate of mode `b` (>= 0).
    pub gamma_b: f64,
    /// Medium length (> 0).
    pub length: f64,
}

impl MediumParams {
    pub fn new(xi: f64, delta_k: f64, gamma_a: f64, gamma_b: f64, length: f64) -> Result<Self> {
        let params = Self {
            xi,
            delta_k,
            gamma_a,
            gamma_b,
            length,
        };
        params.validate()?;
        Ok(params)
    }

    /// Lossless medium with `xi = 1` and the given mismatch and length.
    pub fn lossless(delta_k: f64, length: f64) -> Result<Self> {
        Self::new(1.0, delta_k, 0.0, 0.0, length)
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool); 5] = [
            ("xi", self.xi, self.xi >= 0.0),
            ("delta_k", self.delta_k, true),
            ("gamma_a", self.gamma_a, self.gamma_a >= 0.0),
            ("gamma_b", self.gamma_b, self.gamma_b >= 0.0),
            ("length", self.length, self.length > 0.0),
        ];
        for (field, value, in_range) in checks {
            if !value.is_finite() {
                return Err(Error::InvalidParam {
                    field,
                    reason: "must be finite",
                    value,
                });
            }
            if !in_range {
                return Err(Error::InvalidParam {
                    field,
                    reason: "out of range",
                    value,
                });
            }
        }
        Ok(())
    }

    /// Mean of the two loss rates, the damping felt by the cross-correlation.
    pub fn gamma_mean(&self) -> f64 {
        0.5 * (self.gamma_a + self.gamma_b)
    }

    /// With a different mismatch, everything else unchanged.
    pub fn with_delta_k(self, delta_k: f64) -> Self {
        Self { delta_k, ..self }
    }

    /// With a different mode-`b` loss rate, everything else unchanged.
    pub fn with_gamma_b(self, gamma_b: f64) -> Self {
        Self { gamma_b, ..self }
    }
}

/// Second moments of one frequency slice: photon numbers and cross-correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    /// Spectral density of mode `a`.
    pub n_a: f64,
    /// Spectral density of mode `b`.
    pub n_b: f64,
    /// Cross-correlation between the modes.
    pub m: Complex64,
}

/// Instantaneous `z`-derivative of a [`MomentState`], component by component.
pub type MomentDerivative = MomentState;

impl MomentState {
    pub fn new(n_a: f64, n_b: f64, m: Complex64) -> Self {
        Self { n_a, n_b, m }
    }

    /// The vacuum: all moments zero.
    pub fn vacuum() -> Self {
        Self::new(0.0, 0.0, Complex64::new(0.0, 0.0))
    }

    /// A seeded input: `n_a(0)` photons in mode `a`, nothing else.
    pub fn seeded(n_a: f64) -> Self {
        Self::new(n_a, 0.0, Complex64::new(0.0, 0.0))
    }

    /// Real 4-vector view `(n_a, n_b, Re m, Im m)`.
    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.n_a, self.n_b, self.m.re, self.m.im)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], Complex64::new(v[2], v[3]))
    }

    /// Errors with the offending field name if any component is NaN or infinite.
    pub fn check_finite(&self) -> Result<()> {
        let components = [
            ("n_a", self.n_a),
            ("n_b", self.n_b),
            ("re_m", self.m.re),
            ("im_m", self.m.im),
        ];
        for (field, value) in components {
            if !value.is_finite() {
                return Err(Error::NonFiniteMoment { field, value });
            }
        }
        Ok(())
    }
}

/// The moment equations as a linear map plus a constant drive.
///
/// Acting on the real vector `(n_a, n_b, Re m, Im m)`:
/// `d/dz s = matrix * s + drive`. The drive is `(0, 0, 0, -xi)` for the
/// quantum equations and zero for their classical limit.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineGenerator {
    pub matrix: Matrix4<f64>,
    pub drive: Vector4<f64>,
}

impl AffineGenerator {
    /// `matrix * s + drive`.
    pub fn apply(&self, s: &Vector4<f64>) -> Vector4<f64> {
        self.matrix * s + self.drive
    }
}

/// Right-hand side of the quantum moment equations.
///
/// Setting `gamma_a = 0` recovers the loss-on-`b`-only form; the vacuum
/// drive `-i xi` enters the `Im m` component.
pub fn moment_rhs(state: &MomentState, params: &MediumParams) -> Result<MomentDerivative> {
    state.check_finite()?;
    let MediumParams {
        xi,
        delta_k,
        gamma_a,
        gamma_b,
        ..
    } = *params;
    let gm = params.gamma_mean();
    let (x, y) = (state.m.re, state.m.im);
    Ok(MomentState::new(
        -2.0 * xi * y - gamma_a * state.n_a,
        -2.0 * xi * y - gamma_b * state.n_b,
        Complex64::new(
            delta_k * y - gm * x,
            -delta_k * x - gm * y - xi * (state.n_a + state.n_b + 1.0),
        ),
    ))
}

/// Rewrites the moment equations as an [`AffineGenerator`].
///
/// For every finite state `s`, `matrix * s + drive` equals
/// [`moment_rhs`] componentwise.
pub fn build_affine_generator(params: &MediumParams) -> AffineGenerator {
    let MediumParams {
        xi,
        delta_k,
        gamma_a,
        gamma_b,
        ..
    } = *params;
    let gm = params.gamma_mean();
    #[rustfmt::skip]
    let matrix = Matrix4::new(
        -gamma_a, 0.0,      0.0,      -2.0 * xi,
        0.0,      -gamma_b, 0.0,      -2.0 * xi,
        0.0,      0.0,      -gm,      delta_k,
        -xi,      -xi,      -delta_k, -gm,
    );
    AffineGenerator {
        matrix,
        drive: Vector4::new(0.0, 0.0, 0.0, -xi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rhs(state: &MomentState, params: &MediumParams) -> MomentState {
        moment_rhs(state, params).unwrap()
    }

    #[test]
    fn vacuum_sees_only_the_drive() {
        let p = MediumParams::new(1.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let d = rhs(&MomentState::vacuum(), &p);
        assert_eq!(d.n_a, 0.0);
        assert_eq!(d.n_b, 0.0);
        assert_eq!(d.m, Complex64::new(0.0, -1.0));
    }

    #[test]
    fn real_cross_correlation_freezes_photon_numbers() {
        // With Im m = 0 the n-derivatives vanish; n_a + n_b + 1 = 3 feeds Im m.
        for xi in [0.3, 1.0, 2.5] {
            let p = MediumParams::new(xi, 0.7, 0.0, 0.0, 1.0).unwrap();
            let d = rhs(&MomentState::new(1.0, 1.0, Complex64::new(0.0, 0.0)), &p);
            assert_eq!(d.n_a, 0.0);
            assert_eq!(d.n_b, 0.0);
            assert_abs_diff_eq!(d.m.im, -3.0 * xi, epsilon = 1e-15);
        }
    }

    #[test]
    fn lossy_mismatched_point_values() {
        let p = MediumParams::new(1.0, 11.5, 0.0, 22.7, 1.0).unwrap();
        let s = MomentState::new(0.0, 0.0, Complex64::new(0.0, -0.5));
        let d = rhs(&s, &p);
        assert_abs_diff_eq!(d.n_a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.n_b, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.m.re, -5.75, epsilon = 1e-15);
        assert_abs_diff_eq!(d.m.im, 4.675, epsilon = 1e-15);

        // Independent route: evaluate the complex-valued equation
        // dm/dz = -(i dk + gm) m - i xi (n_a + n_b + 1) directly.
        let i = Complex64::i();
        let dm = -(i * p.delta_k + p.gamma_mean()) * s.m - i * p.xi * (s.n_a + s.n_b + 1.0);
        assert_abs_diff_eq!(dm.re, d.m.re, epsilon = 1e-15);
        assert_abs_diff_eq!(dm.im, d.m.im, epsilon = 1e-15);
    }

    #[test]
    fn generator_coefficients_read_off() {
        let p = MediumParams::new(1.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let g = build_affine_generator(&p);
        #[rustfmt::skip]
        let expected = Matrix4::new(
            0.0, 0.0, 0.0, -2.0,
            0.0, 0.0, 0.0, -2.0,
            0.0, 0.0, 0.0, 0.0,
            -1.0, -1.0, 0.0, 0.0,
        );
        assert_eq!(g.matrix, expected);
        assert_eq!(g.drive, Vector4::new(0.0, 0.0, 0.0, -1.0));
    }

    #[test]
    fn zero_coupling_is_inert() {
        let p = MediumParams::new(0.0, 3.0, 0.0, 0.0, 1.0).unwrap();
        let g = build_affine_generator(&p);
        assert_eq!(g.drive, Vector4::zeros());
        assert_eq!(g.matrix.m14, 0.0);
        assert_eq!(g.matrix.m41, 0.0);
        // Vacuum stays put.
        let d = rhs(&MomentState::vacuum(), &p);
        assert_eq!(d.to_vector(), Vector4::zeros());
    }

    #[test]
    fn non_finite_state_is_rejected_with_field_name() {
        let p = MediumParams::new(1.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let s = MomentState::new(f64::NAN, 0.0, Complex64::new(0.0, 0.0));
        match moment_rhs(&s, &p) {
            Err(Error::NonFiniteMoment { field, .. }) => assert_eq!(field, "n_a"),
            other => panic!("expected NonFiniteMoment, got {other:?}"),
        }
        let s = MomentState::new(0.0, 0.0, Complex64::new(0.0, f64::INFINITY));
        match moment_rhs(&s, &p) {
            Err(Error::NonFiniteMoment { field, .. }) => assert_eq!(field, "im_m"),
            other => panic!("expected NonFiniteMoment, got {other:?}"),
        }
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(matches!(
            MediumParams::new(-1.0, 0.0, 0.0, 0.0, 1.0),
            Err(Error::InvalidParam { field: "xi", .. })
        ));
        assert!(matches!(
            MediumParams::new(1.0, 0.0, -0.1, 0.0, 1.0),
            Err(Error::InvalidParam { field: "gamma_a", .. })
        ));
        assert!(matches!(
            MediumParams::new(1.0, 0.0, 0.0, 0.0, 0.0),
            Err(Error::InvalidParam { field: "length", .. })
        ));
        assert!(matches!(
            MediumParams::new(1.0, f64::NAN, 0.0, 0.0, 1.0),
            Err(Error::InvalidParam { field: "delta_k", .. })
        ));
    }

    prop_compose! {
        fn arb_params()(
            xi in 0.0..3.0f64,
            delta_k in -20.0..20.0f64,
            gamma_a in 0.0..10.0f64,
            gamma_b in 0.0..30.0f64,
        ) -> MediumParams {
            MediumParams::new(xi, delta_k, gamma_a, gamma_b, 1.0).unwrap()
        }
    }

    prop_compose! {
        fn arb_state()(
            n_a in 0.0..50.0f64,
            n_b in 0.0..50.0f64,
            re in -40.0..40.0f64,
            im in -40.0..40.0f64,
        ) -> MomentState {
            MomentState::new(n_a, n_b, Complex64::new(re, im))
        }
    }

    proptest! {
        #[test]
        fn rhs_matches_affine_generator(p in arb_params(), s in arb_state()) {
            let g = build_affine_generator(&p);
            let direct = rhs(&s, &p).to_vector();
            let affine = g.apply(&s.to_vector());
            let scale = 1.0 + direct.amax();
            prop_assert!((direct - affine).amax() <= 1e-14 * scale);
        }

        #[test]
        fn lossless_pair_creation_is_symmetric(s in arb_state(), delta_k in -20.0..20.0f64) {
            let p = MediumParams::new(1.3, delta_k, 0.0, 0.0, 1.0).unwrap();
            let d = rhs(&s, &p);
            prop_assert_eq!(d.n_a, d.n_b);
        }

        #[test]
        fn drive_is_nonzero_iff_coupled(xi in 0.0..3.0f64) {
            let p = MediumParams::new(xi, 1.0, 0.5, 0.5, 1.0).unwrap();
            let g = build_affine_generator(&p);
            prop_assert_eq!(g.drive.norm() > 0.0, xi > 0.0);
        }
    }
}
