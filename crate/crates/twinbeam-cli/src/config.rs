//! Run configuration: a flat key-value TOML file whose keys follow the
//! physical symbols (`xi`, `delta_k`, `gamma_a`, `gamma_b`, `length`).
//!
//! Every field has a default, so an empty file is a valid phase-matched
//! lossless run. Parsing an emitted echo reproduces the configuration
//! exactly, which keeps batch outputs self-describing.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use twinbeam::dynamics::{MediumParams, MomentState};
use twinbeam::sweep::Objective;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    /// Asymptotic growth rate; horizon independent.
    Rate,
    /// Spectral density at the end of the medium.
    Intensity,
}

impl From<ObjectiveKind> for Objective {
    fn from(kind: ObjectiveKind) -> Self {
        match kind {
            ObjectiveKind::Rate => Objective::AsymptoticRate,
            ObjectiveKind::Intensity => Objective::FinalIntensity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EntropyUnit {
    Nats,
    Bits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    // Medium parameters, named after the physical symbols.
    pub xi: f64,
    pub delta_k: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub length: f64,

    // Propagation.
    pub z_steps: usize,
    pub n_cap: f64,

    // Initial moments.
    pub seed_na: f64,
    pub seed_nb: f64,
    pub seed_m_re: f64,
    pub seed_m_im: f64,

    pub model: Model,
    pub objective: ObjectiveKind,

    // Optimizer controls; the bracket defaults to 50 xi and the loss
    // tolerance to 1e-4 of the bracket when left unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_tol: Option<f64>,
    pub delta_k_tol: f64,
    pub eof_tol: f64,

    /// Unit for the reported entanglement of formation.
    pub entropy_unit: EntropyUnit,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            xi: 1.0,
            delta_k: 0.0,
            gamma_a: 0.0,
            gamma_b: 0.0,
            length: 1.0,
            z_steps: 400,
            n_cap: 1e12,
            seed_na: 0.0,
            seed_nb: 0.0,
            seed_m_re: 0.0,
            seed_m_im: 0.0,
            model: Model::Quantum,
            objective: ObjectiveKind::Rate,
            gamma_max: None,
            gamma_tol: None,
            delta_k_tol: 1e-3,
            eof_tol: 1e-8,
            entropy_unit: EntropyUnit::Nats,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let config: Self =
            toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Echo of the effective configuration; parsing it reproduces `self`.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let numeric: [(&str, f64); 9] = [
            ("xi", self.xi),
            ("delta_k", self.delta_k),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("length", self.length),
            ("seed_na", self.seed_na),
            ("seed_nb", self.seed_nb),
            ("seed_m_re", self.seed_m_re),
            ("seed_m_im", self.seed_m_im),
        ];
        for (field, value) in numeric {
            if !value.is_finite() {
                return Err(CliError::Config(format!("{field}: must be finite")));
            }
        }
        if self.z_steps < 2 {
            return Err(CliError::Config(format!(
                "z_steps: must be >= 2 (got {})",
                self.z_steps
            )));
        }
        if !(self.n_cap > 0.0) {
            return Err(CliError::Config(format!(
                "n_cap: must be positive (got {})",
                self.n_cap
            )));
        }
        for (field, value) in [
            ("delta_k_tol", self.delta_k_tol),
            ("eof_tol", self.eof_tol),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(CliError::Config(format!(
                    "{field}: must be positive and finite (got {value})"
                )));
            }
        }
        if let Some(gamma_max) = self.gamma_max {
            if !(gamma_max > 0.0) || !gamma_max.is_finite() {
                return Err(CliError::Config(format!(
                    "gamma_max: must be positive and finite (got {gamma_max})"
                )));
            }
        }
        if let Some(gamma_tol) = self.gamma_tol {
            if !(gamma_tol > 0.0) || !gamma_tol.is_finite() {
                return Err(CliError::Config(format!(
                    "gamma_tol: must be positive and finite (got {gamma_tol})"
                )));
            }
        }
        // Field-level range checks shared with the library.
        self.medium_params().map(|_| ())
    }

    pub fn medium_params(&self) -> Result<MediumParams, CliError> {
        MediumParams::new(
            self.xi,
            self.delta_k,
            self.gamma_a,
            self.gamma_b,
            self.length,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn initial_state(&self) -> MomentState {
        MomentState::new(
            self.seed_na,
            self.seed_nb,
            num_complex::Complex64::new(self.seed_m_re, self.seed_m_im),
        )
    }

    pub fn gamma_bracket(&self) -> f64 {
        self.gamma_max.unwrap_or(50.0 * self.xi).max(f64::MIN_POSITIVE)
    }

    pub fn gamma_tolerance(&self) -> f64 {
        self.gamma_tol.unwrap_or(1e-4 * self.gamma_bracket())
    }

    /// Conversion factor applied to reported entropies.
    pub fn entropy_scale(&self) -> f64 {
        match self.entropy_unit {
            EntropyUnit::Nats => 1.0,
            EntropyUnit::Bits => 1.0 / std::f64::consts::LN_2,
        }
    }
}
