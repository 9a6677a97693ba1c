//! Parameter sweeps, optimal-loss search, and the loss-benefit threshold.
//!
//! Grid points are independent propagations and are evaluated through the
//! crate's ordered map, so sweeps parallelize under the `parallel` feature
//! while staying bitwise identical to sequential evaluation. The optimal
//! loss rate is found by a coarse scan refined with golden-section search;
//! two objectives are supported because brightness can be ranked either by
//! the intensity at the end of the medium or by the asymptotic growth
//! rate, and the two disagree slightly at finite length.

use crate::dynamics::{MediumParams, MomentState};
use crate::propagation::{asymptotic_growth_rate, propagate_closed_form};
use crate::{par, Error, Result};

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    DeltaK,
    GammaB,
}

/// Figure of merit for the loss optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Largest real part of the moment-equation spectrum; horizon free.
    #[default]
    AsymptoticRate,
    /// Spectral density of mode `a` at the evaluation horizon.
    FinalIntensity,
}

/// A one-axis sweep over otherwise fixed medium parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    /// Strictly increasing, finite grid of axis values.
    pub grid: Vec<f64>,
    pub base: MediumParams,
    /// Evaluation distance; defaults to the medium length.
    pub horizon: Option<f64>,
    /// Objective used by the per-point loss optimization.
    pub objective: Objective,
}

impl SweepSpec {
    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or(self.base.length)
    }

    fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.grid.is_empty() {
            return Err(Error::InvalidGrid("grid is empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("grid contains non-finite values"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("grid is not strictly increasing"));
        }
        Ok(())
    }

    fn params_at(&self, value: f64) -> MediumParams {
        match self.axis {
            SweepAxis::DeltaK => self.base.with_delta_k(value),
            SweepAxis::GammaB => self.base.with_gamma_b(value.max(0.0)),
        }
    }
}

/// One row of a sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub n_a: f64,
}

/// One row of a sweep table with the per-point loss optimum attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumPoint {
    pub axis_value: f64,
    pub n_a: f64,
    pub gamma_opt: f64,
    pub enhancement: f64,
}

/// Result of the optimal-loss search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaOptimum {
    pub gamma_opt: f64,
    pub objective_value: f64,
    /// The coarse scan saw more than one local maximum; the refinement
    /// bracket was widened around the global one.
    pub multimodal: bool,
    /// The objective is identically zero (no coupling), so the reported
    /// optimum is the trivial boundary.
    pub degenerate: bool,
}

/// Spectral density of mode `a` at distance `z`, from vacuum.
pub fn final_intensity(params: &MediumParams, z: f64) -> f64 {
    propagate_closed_form(&MomentState::vacuum(), params, z).n_a
}

/// Objective value at the given loss rate.
pub fn objective_value(params: &MediumParams, objective: Objective, horizon: f64) -> f64 {
    match objective {
        Objective::AsymptoticRate => asymptotic_growth_rate(params),
        Objective::FinalIntensity => final_intensity(params, horizon),
    }
}

/// Runs the sweep: one vacuum propagation per grid point, output ordered
/// by the input grid.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    let horizon = spec.horizon();
    Ok(par::map_ordered(&spec.grid, |&value| SweepPoint {
        axis_value: value,
        n_a: final_intensity(&spec.params_at(value), horizon),
    }))
}

/// Sequential reference implementation of [`run_sweep`]; same output.
pub fn run_sweep_sequential(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    let horizon = spec.horizon();
    Ok(par::map_sequential(&spec.grid, |&value| SweepPoint {
        axis_value: value,
        n_a: final_intensity(&spec.params_at(value), horizon),
    }))
}

/// Sweep over the phase mismatch.
pub fn sweep_delta_k(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    debug_assert_eq!(spec.axis, SweepAxis::DeltaK);
    run_sweep(spec)
}

/// Mismatch sweep with the optimal loss, its brightness, and the
/// enhancement over the lossless medium at every grid point.
pub fn sweep_with_optimum(
    spec: &SweepSpec,
    bracket_max: f64,
    tol: f64,
) -> Result<Vec<OptimumPoint>> {
    spec.validate()?;
    let horizon = spec.horizon();
    let points = par::map_ordered(&spec.grid, |&value| -> Result<OptimumPoint> {
        let params = spec.params_at(value).with_gamma_b(0.0);
        let horizon_params = MediumParams {
            length: horizon,
            ..params
        };
        let optimum = optimize_gamma(&horizon_params, spec.objective, bracket_max, tol)?;
        let n_base = final_intensity(&spec.params_at(value), horizon);
        let n_opt = final_intensity(&params.with_gamma_b(optimum.gamma_opt), horizon);
        let n_zero = final_intensity(&params, horizon);
        let enhancement = if n_zero > 0.0 {
            n_opt / n_zero
        } else if n_opt > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        Ok(OptimumPoint {
            axis_value: value,
            n_a: n_base,
            gamma_opt: optimum.gamma_opt,
            enhancement,
        })
    });
    points.into_iter().collect()
}

/// Loss rate in `[0, bracket_max]` maximizing the objective.
///
/// A coarse scan locates the global maximum (and flags multi-modality,
/// widening the refinement bracket when it appears); golden-section search
/// refines it to `tol`. Plateaus and boundary ties resolve toward the
/// smaller loss rate.
pub fn optimize_gamma(
    base: &MediumParams,
    objective: Objective,
    bracket_max: f64,
    tol: f64,
) -> Result<GammaOptimum> {
    base.validate()?;
    if !(bracket_max > 0.0) || !bracket_max.is_finite() {
        return Err(Error::InvalidParam {
            field: "bracket_max",
            reason: "must be positive and finite",
            value: bracket_max,
        });
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParam {
            field: "tol",
            reason: "must be positive and finite",
            value: tol,
        });
    }
    let horizon = base.length;
    if base.xi == 0.0 {
        return Ok(GammaOptimum {
            gamma_opt: 0.0,
            objective_value: objective_value(&base.with_gamma_b(0.0), objective, horizon),
            multimodal: false,
            degenerate: true,
        });
    }

    let eval = |gamma: f64| objective_value(&base.with_gamma_b(gamma), objective, horizon);

    const COARSE_INTERVALS: usize = 240;
    let step = bracket_max / COARSE_INTERVALS as f64;
    let values: Vec<f64> = (0..=COARSE_INTERVALS)
        .map(|i| eval(i as f64 * step))
        .collect();

    let best_idx = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("coarse grid is nonempty");

    let f_scale = 1e-12 * (1.0 + values[best_idx].abs());
    let mut maxima = 0usize;
    for i in 0..values.len() {
        let left_below = i == 0 || values[i] > values[i - 1] + f_scale;
        let right_below = i + 1 == values.len() || values[i] > values[i + 1] + f_scale;
        if left_below && right_below {
            maxima += 1;
        }
    }
    let multimodal = maxima > 1;

    let spread = if multimodal { 5 } else { 1 };
    let lo = best_idx.saturating_sub(spread) as f64 * step;
    let hi = ((best_idx + spread).min(COARSE_INTERVALS)) as f64 * step;
    let (refined, refined_value) = golden_section_max(&eval, lo, hi, tol);

    // Boundary candidates; ties break toward the smaller loss rate.
    let mut gamma_opt = refined;
    let mut value = refined_value;
    for (candidate, candidate_value) in [(bracket_max, values[COARSE_INTERVALS]), (0.0, values[0])]
    {
        let tie = 1e-12 * (1.0 + value.abs().max(candidate_value.abs()));
        if candidate_value > value + tie || (candidate_value >= value - tie && candidate < gamma_opt)
        {
            gamma_opt = candidate;
            value = candidate_value;
        }
    }

    Ok(GammaOptimum {
        gamma_opt,
        objective_value: value,
        multimodal,
        degenerate: false,
    })
}

/// Golden-section maximization of `f` on `[a, b]` to width `tol`;
/// returns `(x_max, f_max)`.
fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Mismatch beyond which engineered loss starts to pay off: bisection on
/// the predicate "the optimal loss rate is positive".
///
/// The predicate is checked for monotonicity on a coarse mismatch scan
/// before bisecting; `tol` bounds the returned mismatch's uncertainty.
pub fn loss_benefit_threshold(
    base: &MediumParams,
    objective: Objective,
    tol: f64,
) -> Result<f64> {
    base.validate()?;
    if base.xi == 0.0 {
        return Err(Error::ThresholdSearch("objective is degenerate at xi = 0"));
    }
    let bracket_max = 50.0 * base.xi;
    let gamma_tol = 1e-4 * bracket_max;
    let predicate = |delta_k: f64| -> Result<bool> {
        let optimum = optimize_gamma(
            &base.with_delta_k(delta_k),
            objective,
            bracket_max,
            gamma_tol,
        )?;
        Ok(optimum.gamma_opt > gamma_tol)
    };

    let dk_max = (8.0 * base.xi).max(base.delta_k.abs());
    const SCAN: usize = 32;
    let mut first_true = None;
    let mut last_false = None;
    for i in 0..=SCAN {
        let dk = dk_max * i as f64 / SCAN as f64;
        if predicate(dk)? {
            if first_true.is_none() {
                first_true = Some(dk);
            }
        } else {
            if first_true.is_some() {
                return Err(Error::ThresholdSearch(
                    "loss-benefit predicate is not monotone on the scan range",
                ));
            }
            last_false = Some(dk);
        }
    }
    let (mut lo, mut hi) = match (last_false, first_true) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => {
            return Err(Error::ThresholdSearch(
                "loss-benefit predicate does not change on the scan range",
            ))
        }
    };

    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if predicate(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Brightness gain from operating at the optimal loss rate: the ratio of
/// `n_a` at `gamma_opt` to `n_a` of the lossless medium, both at `horizon`.
pub fn enhancement_factor(base: &MediumParams, horizon: f64) -> Result<f64> {
    base.validate()?;
    if base.xi == 0.0 {
        return Ok(1.0);
    }
    let horizon_params = MediumParams {
        length: horizon,
        ..*base
    };
    let bracket_max = 50.0 * base.xi;
    let optimum = optimize_gamma(
        &horizon_params,
        Objective::FinalIntensity,
        bracket_max,
        1e-4 * bracket_max,
    )?;
    let n_opt = final_intensity(&base.with_gamma_b(optimum.gamma_opt), horizon);
    let n_zero = final_intensity(&base.with_gamma_b(0.0), horizon);
    if n_zero > 0.0 {
        Ok(n_opt / n_zero)
    } else if n_opt > 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(1.0)
    }
}
