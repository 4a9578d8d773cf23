//! Boundary shear stress in circular and flatbed channels from entropy
//! models, with Box-Cox based confidence bounds for their predictions.

pub mod boundary;
pub mod context;
pub mod dataset;
pub mod entropy;
pub mod geometry;
pub mod normalization;
pub mod numerics;
pub mod profile;
pub mod uncertainty;

pub use boundary::{BoundaryStress, FluidProperties, KnightConfig};
pub use context::ModelContext;
pub use dataset::{ConditionSet, HydraulicCondition, SectionClass};
pub use entropy::{EntropyConfig, ModelId, SectionStresses, StressTargets};
pub use geometry::ChannelSection;
pub use normalization::{LambdaFit, NormalizationState};
pub use numerics::SolverConfig;
pub use profile::{ProfileKind, ProfilePoint, ShearProfile};
pub use uncertainty::{CalibrationConfig, PairedDataset};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Boundary(#[from] boundary::BoundaryError),
    #[error(transparent)]
    Entropy(#[from] entropy::EntropyError),
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
    #[error(transparent)]
    Profile(#[from] profile::ProfileError),
    #[error(transparent)]
    Normalization(#[from] normalization::NormalizationError),
    #[error(transparent)]
    Uncertainty(#[from] uncertainty::UncertaintyError),
    #[error(transparent)]
    Dataset(#[from] dataset::DatasetError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Broad failure category, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Solver,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use uncertainty::UncertaintyError as U;
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::Numerics(_) => ErrorKind::Solver,
            Error::Entropy(e) => match e {
                entropy::EntropyError::Solver(_) => ErrorKind::Solver,
                entropy::EntropyError::InvalidParameter { .. } => ErrorKind::Config,
                _ => ErrorKind::Data,
            },
            Error::Uncertainty(e) => match e {
                U::InvalidLevel(_) | U::InvalidZeta(_) | U::InvalidRange { .. } => ErrorKind::Config,
                U::Numerics(_) | U::AllTrialsFailed(_) => ErrorKind::Solver,
                _ => ErrorKind::Data,
            },
            Error::Boundary(boundary::BoundaryError::InvalidFluid { .. }) => ErrorKind::Config,
            Error::Normalization(normalization::NormalizationError::InvalidLambda(_)) => ErrorKind::Config,
            _ => ErrorKind::Data,
        }
    }
}
