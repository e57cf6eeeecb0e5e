//! Scenario configuration: a single TOML file whose keys mirror the
//! domain types, with command-line flags layered on top. Defaults are
//! the baseline COVID-19 setup used throughout the examples.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::model::{
    beta_from_r0, ControlBounds, EpidemicParams, ModelKind, NormalizedState, ObjectiveWeights,
};
use crate::ocp::{OcpProblem, Quadrature};
use crate::solver::SweepSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[default]
    Fbsm,
    Pgrad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureChoice {
    #[default]
    Trapezoid,
    Simpson,
}

impl From<QuadratureChoice> for Quadrature {
    fn from(choice: QuadratureChoice) -> Self {
        match choice {
            QuadratureChoice::Trapezoid => Quadrature::Trapezoid,
            QuadratureChoice::Simpson => Quadrature::Simpson,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

impl Default for WeightsConfig {
    fn default() -> Self {
        Self {
            alpha1: 1.0,
            alpha2: 1.0,
            alpha3: 5.0e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    pub s: f64,
    pub e: f64,
    pub i: f64,
    pub j: f64,
    pub r: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        // 10^7 people with 1500 initial infections: 500 exposed,
        // 800 asymptomatic, 200 symptomatic
        Self {
            s: 0.99985,
            e: 5.0e-5,
            i: 8.0e-5,
            j: 2.0e-5,
            r: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesConfig {
    pub gamma: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub q: f64,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self {
            gamma: 0.18,
            sigma1: 0.8,
            sigma2: 0.2,
            rho1: 1.0 / 14.0,
            rho2: 1.0 / 21.0,
            q: 0.15,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettingsConfig {
    pub theta: f64,
    pub max_iters: usize,
    pub tol_u: f64,
    pub tol_q: f64,
    pub initial_guess: Option<f64>,
}

impl Default for SolverSettingsConfig {
    fn default() -> Self {
        let s = SweepSettings::default();
        Self {
            theta: s.theta,
            max_iters: s.max_iters,
            tol_u: s.tol_u,
            tol_q: s.tol_q,
            initial_guess: s.initial_guess,
        }
    }
}

impl From<SolverSettingsConfig> for SweepSettings {
    fn from(c: SolverSettingsConfig) -> Self {
        SweepSettings {
            theta: c.theta,
            max_iters: c.max_iters,
            tol_u: c.tol_u,
            tol_q: c.tol_q,
            initial_guess: c.initial_guess,
        }
    }
}

/// The scenario matrix executed by the sweep command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub horizons: Vec<f64>,
    pub r0_values: Vec<f64>,
    pub models: Vec<u8>,
    pub controlled: Vec<bool>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            horizons: vec![15.0, 30.0, 60.0, 120.0],
            r0_values: vec![3.0, 6.0],
            models: vec![1, 2],
            controlled: vec![false, true],
        }
    }
}

/// Complete run description. Every field has a baseline default, so an
/// empty file (or no file) is a valid configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// 1 = bilinear incidence, 2 = standard incidence.
    pub model: u8,
    /// Basic reproduction number; mutually exclusive with explicit betas.
    pub r0: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    /// Ratio `beta2/beta1` used when deriving betas from `r0`.
    pub beta_ratio: f64,
    /// Horizon in days.
    pub horizon: f64,
    /// Number of uniform integration steps.
    pub steps: usize,
    pub u_max: f64,
    pub solver: SolverChoice,
    pub seed: u64,
    /// Output directory for CSV artifacts.
    pub out: PathBuf,
    pub quadrature: QuadratureChoice,
    pub weights: WeightsConfig,
    pub initial: InitialConfig,
    pub rates: RatesConfig,
    pub solver_settings: SolverSettingsConfig,
    pub sweep: SweepConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            model: 1,
            r0: Some(3.0),
            beta1: None,
            beta2: None,
            beta_ratio: 0.1,
            horizon: 60.0,
            steps: 5000,
            u_max: 0.9,
            solver: SolverChoice::default(),
            seed: 0,
            out: PathBuf::from("out"),
            quadrature: QuadratureChoice::default(),
            weights: WeightsConfig::default(),
            initial: InitialConfig::default(),
            rates: RatesConfig::default(),
            solver_settings: SolverSettingsConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn kind(&self) -> Result<ModelKind> {
        ModelKind::from_index(self.model)
    }

    /// Resolve the transmission rates from either `r0` or explicit betas.
    pub fn resolve_params(&self) -> Result<EpidemicParams> {
        let rates = &self.rates;
        let base = EpidemicParams::new(
            1.0,
            self.beta_ratio.min(0.999),
            rates.gamma,
            rates.sigma1,
            rates.sigma2,
            rates.rho1,
            rates.rho2,
            rates.q,
        )
        .map_err(|e| Error::Config(e.to_string()))?;
        let (beta1, beta2) = match (self.r0, self.beta1, self.beta2) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(Error::Config(
                    "r0 and explicit betas are mutually exclusive".into(),
                ))
            }
            (Some(r0), None, None) => beta_from_r0(r0, &base, self.beta_ratio)
                .map_err(|e| Error::Config(e.to_string()))?,
            (None, Some(b1), Some(b2)) => (b1, b2),
            (None, Some(b1), None) => (b1, self.beta_ratio * b1),
            (None, None, _) => beta_from_r0(3.0, &base, self.beta_ratio)
                .map_err(|e| Error::Config(e.to_string()))?,
        };
        EpidemicParams::new(
            beta1,
            beta2,
            rates.gamma,
            rates.sigma1,
            rates.sigma2,
            rates.rho1,
            rates.rho2,
            rates.q,
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve_initial(&self) -> Result<NormalizedState> {
        let ic = NormalizedState {
            s: self.initial.s,
            e: self.initial.e,
            i: self.initial.i,
            j: self.initial.j,
            r: self.initial.r,
            n: 1.0,
        };
        ic.validate_initial()
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(ic)
    }

    pub fn resolve_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.horizon, self.steps).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve_bounds(&self) -> Result<ControlBounds> {
        ControlBounds::new(self.u_max).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve_weights(&self) -> Result<ObjectiveWeights> {
        ObjectiveWeights::new(self.weights.alpha1, self.weights.alpha2, self.weights.alpha3)
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Assemble the full problem statement this configuration describes.
    pub fn resolve_problem(&self) -> Result<OcpProblem> {
        let problem = OcpProblem::new(
            self.kind()?,
            self.resolve_params()?,
            self.resolve_weights()?,
            self.resolve_bounds()?,
            self.resolve_initial()?,
            self.resolve_grid()?,
        )
        .map_err(|e| Error::Config(e.to_string()))?;
        problem
            .with_quadrature(self.quadrature.into())
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn settings(&self) -> SweepSettings {
        self.solver_settings.into()
    }
}
