//! The table-producing commands behind the CLI subcommands.
//!
//! Every command builds its full output in memory before anything touches
//! the filesystem, so a failed run leaves no partial file behind.

use twinbeam::classical::integrate_classical_capped;
use twinbeam::dynamics::MediumParams;
use twinbeam::gaussian::{
    covariance_from_moments, eof_along, log_negativity_along, nu_tilde_min,
};
use twinbeam::propagation::{integrate_capped, Trajectory};
use twinbeam::sweep::{
    loss_benefit_threshold, optimize_gamma, run_sweep, sweep_with_optimum, SweepAxis, SweepSpec,
};

use crate::config::{Model, RunConfig};
use crate::table::Table;
use crate::CliError;

pub fn trajectory_for(config: &RunConfig) -> Result<Trajectory, CliError> {
    let params = config.medium_params()?;
    let state0 = config.initial_state();
    let result = match config.model {
        Model::Quantum => integrate_capped(&state0, &params, config.z_steps, config.n_cap),
        Model::Classical => {
            integrate_classical_capped(&state0, &params, config.z_steps, config.n_cap)
        }
    };
    result.map_err(CliError::from_library)
}

fn moment_columns(table: &mut Table, traj: &Trajectory) {
    table.push("z", traj.z_grid.clone());
    table.push("n_a", traj.states.iter().map(|s| s.n_a).collect());
    table.push("n_b", traj.states.iter().map(|s| s.n_b).collect());
    table.push("re_m", traj.states.iter().map(|s| s.m.re).collect());
    table.push("im_m", traj.states.iter().map(|s| s.m.im).collect());
    table.push("abs_m", traj.states.iter().map(|s| s.m.norm()).collect());
}

/// `evolve`: moments and entanglement along the medium.
pub fn evolve(config: &RunConfig, with_eof: bool) -> Result<Table, CliError> {
    let traj = trajectory_for(config)?;
    let mut table = Table::new();
    moment_columns(&mut table, &traj);
    table.push("log_neg", log_negativity_along(&traj));
    let eof = if with_eof {
        let scale = config.entropy_scale();
        eof_along(&traj, config.eof_tol)
            .map_err(CliError::from_library)?
            .into_iter()
            .map(|e| Some(e * scale))
            .collect()
    } else {
        vec![None; traj.len()]
    };
    table.push_optional("eof", eof);
    Ok(table)
}

/// `entanglement`: the Gaussian-state measures along the medium, with the
/// entanglement of formation always included.
pub fn entanglement(config: &RunConfig) -> Result<Table, CliError> {
    let traj = trajectory_for(config)?;
    let scale = config.entropy_scale();
    let mut nu_min = Vec::with_capacity(traj.len());
    let mut nu_tilde = Vec::with_capacity(traj.len());
    for (_, state) in traj.iter() {
        let cov = covariance_from_moments(state);
        nu_min.push(cov.symplectic_eigenvalues().0);
        nu_tilde.push(nu_tilde_min(&cov));
    }
    let eof: Vec<f64> = eof_along(&traj, config.eof_tol)
        .map_err(CliError::from_library)?
        .into_iter()
        .map(|e| e * scale)
        .collect();

    let mut table = Table::new();
    table.push("z", traj.z_grid.clone());
    table.push("nu_min", nu_min);
    table.push("nu_tilde_min", nu_tilde);
    table.push("log_neg", log_negativity_along(&traj));
    table.push("eof", eof);
    Ok(table)
}

/// `sweep`: brightness over a parameter grid, optionally with the
/// per-point optimal loss and enhancement.
pub fn sweep(
    config: &RunConfig,
    axis: SweepAxis,
    grid: Vec<f64>,
    with_gamma_opt: bool,
) -> Result<Table, CliError> {
    if with_gamma_opt && axis == SweepAxis::GammaB {
        return Err(CliError::Config(
            "axis: --with-gamma-opt requires the delta_k axis".into(),
        ));
    }
    let spec = SweepSpec {
        axis,
        grid,
        base: config.medium_params()?,
        horizon: None,
        objective: config.objective.into(),
    };
    let mut table = Table::new();
    if with_gamma_opt {
        let rows = sweep_with_optimum(&spec, config.gamma_bracket(), config.gamma_tolerance())
            .map_err(CliError::from_library)?;
        table.push("axis_value", rows.iter().map(|r| r.axis_value).collect());
        table.push("n_a", rows.iter().map(|r| r.n_a).collect());
        table.push("gamma_opt", rows.iter().map(|r| r.gamma_opt).collect());
        table.push("enhancement", rows.iter().map(|r| r.enhancement).collect());
    } else {
        let rows = run_sweep(&spec).map_err(CliError::from_library)?;
        table.push("axis_value", rows.iter().map(|r| r.axis_value).collect());
        table.push("n_a", rows.iter().map(|r| r.n_a).collect());
    }
    Ok(table)
}

/// `optimize-gamma`: the optimal loss rate for the configured objective.
pub fn optimize(config: &RunConfig) -> Result<Table, CliError> {
    let params = config.medium_params()?;
    let optimum = optimize_gamma(
        &params,
        config.objective.into(),
        config.gamma_bracket(),
        config.gamma_tolerance(),
    )
    .map_err(CliError::from_library)?;
    let mut table = Table::new();
    table.push("gamma_opt", vec![optimum.gamma_opt]);
    table.push("objective_value", vec![optimum.objective_value]);
    table.push("multimodal", vec![f64::from(u8::from(optimum.multimodal))]);
    table.push("degenerate", vec![f64::from(u8::from(optimum.degenerate))]);
    Ok(table)
}

/// `threshold`: the mismatch beyond which loss becomes beneficial.
pub fn threshold(config: &RunConfig) -> Result<Table, CliError> {
    let params = config.medium_params()?;
    let delta_k_star = loss_benefit_threshold(&params, config.objective.into(), config.delta_k_tol)
        .map_err(CliError::from_library)?;
    let mut table = Table::new();
    table.push("delta_k_star", vec![delta_k_star]);
    Ok(table)
}

/// Evenly spaced sweep grid.
pub fn linspace(start: f64, stop: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::Config("grid_points: must be >= 1".into()));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    if !(start < stop) {
        return Err(CliError::Config(format!(
            "grid_start: must be below grid_stop (got {start} >= {stop})"
        )));
    }
    Ok((0..points)
        .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
        .collect())
}

pub fn params_with(config: &RunConfig, delta_k: f64, gamma_b: f64) -> Result<MediumParams, CliError> {
    Ok(config
        .medium_params()?
        .with_delta_k(delta_k)
        .with_gamma_b(gamma_b))
}
