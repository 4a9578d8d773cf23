//! Entropy-based shear stress profiles and their constraint solvers.
//!
//! Every profile is written in a segment-local coordinate `u` in `[0, 1]`
//! with `tau(0) = 0` and `tau(1) = tau_max`.

mod family;
mod powerlaw;
mod predict;
mod renyi;
mod shannon;
mod tsallis;

pub use powerlaw::{powerlaw_n, powerlaw_profile};
pub use predict::{predict_profile, SectionStresses};
pub use renyi::{renyi_k, renyi_profile, renyi_residuals, solve_renyi, RenyiParams};
pub use shannon::{shannon_mean_ratio, shannon_profile, shannon_residual, solve_shannon};
pub use tsallis::{
    solve_tsallis, tsallis_k, tsallis_profile, tsallis_residuals, tsallis_tau_hat_range,
    TsallisParams,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{NumericsError, SolverConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("invalid stress targets: need 0 < tau_mean ({tau_mean}) < tau_max ({tau_max})")]
    InvalidTargets { tau_mean: f64, tau_max: f64 },

    #[error("{name} = {value} {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{model} cannot represent tau_mean/tau_max = {tau_hat}; reachable range is ({lo}, {hi})")]
    Unrepresentable {
        model: ModelId,
        tau_hat: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{model} profile leaves its real domain at u = {u}")]
    ProfileDomain { model: ModelId, u: f64 },

    #[error("{0} has no entropy parameters")]
    NotEntropyModel(ModelId),

    #[error("missing targets: {0}")]
    MissingTargets(&'static str),

    #[error(transparent)]
    Solver(#[from] NumericsError),
}

/// Mean and maximum shear stress of one boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StressTargets {
    pub tau_mean: f64,
    pub tau_max: f64,
}

impl StressTargets {
    pub fn new(tau_mean: f64, tau_max: f64) -> Result<Self, EntropyError> {
        if tau_mean > 0.0 && tau_mean < tau_max && tau_max.is_finite() {
            Ok(Self { tau_mean, tau_max })
        } else {
            Err(EntropyError::InvalidTargets { tau_mean, tau_max })
        }
    }

    pub fn tau_hat(&self) -> f64 {
        self.tau_mean / self.tau_max
    }

    pub fn scaled(&self, c: f64) -> Result<Self, EntropyError> {
        Self::new(c * self.tau_mean, c * self.tau_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    Shannon,
    ShannonPl,
    Tsallis,
    Renyi,
    RhoGRS,
}

impl ModelId {
    pub const ALL: [ModelId; 5] = [
        ModelId::Shannon,
        ModelId::ShannonPl,
        ModelId::Tsallis,
        ModelId::Renyi,
        ModelId::RhoGRS,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Shannon => "shannon",
            ModelId::ShannonPl => "shannon_pl",
            ModelId::Tsallis => "tsallis",
            ModelId::Renyi => "renyi",
            ModelId::RhoGRS => "rho_g_r_s",
        }
    }

    pub fn is_entropy(self) -> bool {
        self != ModelId::RhoGRS
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown model '{0}' (expected shannon, shannon_pl, tsallis, renyi or rho_g_r_s)")]
pub struct ParseModelIdError(pub String);

impl FromStr for ModelId {
    type Err = ParseModelIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        ModelId::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ParseModelIdError(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyConfig {
    /// Tsallis index; the exponent is `k = (q - 1) / q`.
    pub q: f64,
    pub alpha_prime: f64,
    pub solver: SolverConfig,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self {
            q: 2.0,
            alpha_prime: 0.5,
            solver: SolverConfig::default(),
        }
    }
}

impl EntropyConfig {
    pub fn validate(&self) -> Result<(), EntropyError> {
        tsallis_k(self.q)?;
        renyi_k(self.alpha_prime)?;
        self.solver.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    Shannon { lambda0: f64 },
    ShannonPl { n: f64 },
    Tsallis(TsallisParams),
    Renyi(RenyiParams),
}

/// Solved parameters together with the targets they were solved for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyModelParams {
    pub params: ModelParams,
    pub targets: StressTargets,
}

impl EntropyModelParams {
    pub fn solve(
        model: ModelId,
        targets: StressTargets,
        cfg: &EntropyConfig,
    ) -> Result<Self, EntropyError> {
        let params = match model {
            ModelId::Shannon => ModelParams::Shannon {
                lambda0: solve_shannon(&targets, &cfg.solver)?,
            },
            ModelId::ShannonPl => ModelParams::ShannonPl {
                n: powerlaw_n(&targets)?,
            },
            ModelId::Tsallis => ModelParams::Tsallis(solve_tsallis(&targets, cfg.q, &cfg.solver)?),
            ModelId::Renyi => ModelParams::Renyi(solve_renyi(
                targets.tau_hat(),
                cfg.alpha_prime,
                &cfg.solver,
            )?),
            ModelId::RhoGRS => return Err(EntropyError::NotEntropyModel(model)),
        };
        Ok(Self { params, targets })
    }

    pub fn model(&self) -> ModelId {
        match self.params {
            ModelParams::Shannon { .. } => ModelId::Shannon,
            ModelParams::ShannonPl { .. } => ModelId::ShannonPl,
            ModelParams::Tsallis(_) => ModelId::Tsallis,
            ModelParams::Renyi(_) => ModelId::Renyi,
        }
    }

    /// Profile value at segment coordinate `u`.
    pub fn evaluate(&self, u: f64) -> Result<f64, EntropyError> {
        let tau_max = self.targets.tau_max;
        match &self.params {
            ModelParams::Shannon { lambda0 } => Ok(shannon_profile(*lambda0, tau_max, u)),
            ModelParams::ShannonPl { n } => Ok(powerlaw_profile(*n, tau_max, u)),
            ModelParams::Tsallis(p) => tsallis_profile(p, u),
            ModelParams::Renyi(p) => renyi_profile(p, tau_max, u),
        }
    }
}
