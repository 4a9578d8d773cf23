//! Mean and maximum wall/bed shear stresses from the Knight correlations,
//! and the uniform-flow global shear stress `rho * g * R * S`.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::entropy::{EntropyError, StressTargets};
use crate::geometry::ChannelSection;

const C2: f64 = 1.38;
const CSF_BRANCH: f64 = 4.374;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundaryError {
    #[error("P_b/P_w = {0} must be non-negative")]
    NegativeRatio(f64),
    #[error("degenerate correlation: section has no bed perimeter, supply stresses directly")]
    DegenerateCorrelation,
    #[error("invalid fluid properties: rho = {density}, g = {gravity}")]
    InvalidFluid { density: f64, gravity: f64 },
}

/// Logarithm used inside the wall shear force correlation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Ten,
    Natural,
}

/// Form of the mean bed stress relation.
///
/// `ForceBalance` uses `(1 - 0.01 %SF_w)(1 + P_w/P_b)`, which makes the wall
/// and bed forces add up to `rho g A S`. `AsPrinted` uses `(1 + P_b/P_w)`.
/// The two agree when `P_b = P_w`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BedMeanForm {
    #[default]
    ForceBalance,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct KnightConfig {
    pub log_base: LogBase,
    pub bed_mean_form: BedMeanForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidProperties {
    pub density: f64,
    pub gravity: f64,
}

impl Default for FluidProperties {
    fn default() -> Self {
        Self {
            density: 1000.0,
            gravity: 9.81,
        }
    }
}

impl FluidProperties {
    pub fn validate(&self) -> Result<(), BoundaryError> {
        if self.density > 0.0 && self.gravity > 0.0 && self.density.is_finite() && self.gravity.is_finite() {
            Ok(())
        } else {
            Err(BoundaryError::InvalidFluid {
                density: self.density,
                gravity: self.gravity,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryStress {
    pub tau_mean_wall: f64,
    pub tau_mean_bed: f64,
    pub tau_max_wall: f64,
    pub tau_max_bed: f64,
    pub sf_wall_percent: f64,
    /// `rho g R S` used to scale the four stresses.
    pub reference: f64,
}

impl BoundaryStress {
    pub fn wall_targets(&self) -> Result<StressTargets, EntropyError> {
        StressTargets::new(self.tau_mean_wall, self.tau_max_wall)
    }

    pub fn bed_targets(&self) -> Result<StressTargets, EntropyError> {
        StressTargets::new(self.tau_mean_bed, self.tau_max_bed)
    }

    /// `(tau_w P_w + tau_b P_b) / (rho g R S P)`; 1 when forces balance.
    pub fn force_balance(&self, section: &ChannelSection) -> f64 {
        (self.tau_mean_wall * section.wall_perimeter + self.tau_mean_bed * section.bed_perimeter)
            / (self.reference * section.wetted_perimeter)
    }
}

/// Percentage of the boundary shear force carried by the walls.
pub fn wall_shear_force_percent(pb_over_pw: f64, log_base: LogBase) -> Result<f64, BoundaryError> {
    if !(pb_over_pw >= 0.0) {
        return Err(BoundaryError::NegativeRatio(pb_over_pw));
    }
    let arg = pb_over_pw / C2 + 1.0;
    let log = match log_base {
        LogBase::Ten => arg.log10(),
        LogBase::Natural => arg.ln(),
    };
    let c_sf = if pb_over_pw < CSF_BRANCH {
        1.0
    } else {
        0.6603 * pb_over_pw.powf(0.28125)
    };
    Ok(c_sf * (-3.23 * log + 4.6052).exp())
}

/// Uniform-flow shear stress `rho g R S`.
pub fn global_shear(density: f64, gravity: f64, hydraulic_radius: f64, slope: f64) -> f64 {
    density * gravity * hydraulic_radius * slope
}

/// Mean and maximum wall/bed stresses of a flatbed section.
pub fn knight_stresses(
    section: &ChannelSection,
    fluid: &FluidProperties,
    cfg: &KnightConfig,
) -> Result<BoundaryStress, BoundaryError> {
    fluid.validate()?;
    if !section.is_flatbed() {
        return Err(BoundaryError::DegenerateCorrelation);
    }
    let ratio = section.bed_to_wall_ratio();
    let sf = wall_shear_force_percent(ratio, cfg.log_base)?;
    let wall_share = 0.01 * sf;
    let bed_share = 1.0 - wall_share;
    let reference = global_shear(
        fluid.density,
        fluid.gravity,
        section.hydraulic_radius,
        section.bed_slope,
    );

    let bed_factor = match cfg.bed_mean_form {
        BedMeanForm::ForceBalance => 1.0 + 1.0 / ratio,
        BedMeanForm::AsPrinted => 1.0 + ratio,
    };
    let stress = BoundaryStress {
        tau_mean_wall: reference * wall_share * (1.0 + ratio),
        tau_mean_bed: reference * bed_share * bed_factor,
        tau_max_wall: reference * wall_share * 2.0372 * ratio.powf(0.7108),
        tau_max_bed: reference * bed_share * 2.1697 * ratio.powf(-0.3287),
        sf_wall_percent: sf,
        reference,
    };

    if stress.tau_max_wall < stress.tau_mean_wall {
        warn!(
            pb_over_pw = ratio,
            tau_mean = stress.tau_mean_wall,
            tau_max = stress.tau_max_wall,
            "wall correlation gives tau_max below tau_mean"
        );
    }
    if stress.tau_max_bed < stress.tau_mean_bed {
        warn!(
            pb_over_pw = ratio,
            tau_mean = stress.tau_mean_bed,
            tau_max = stress.tau_max_bed,
            "bed correlation gives tau_max below tau_mean"
        );
    }
    Ok(stress)
}
