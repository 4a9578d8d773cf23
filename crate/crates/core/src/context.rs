use serde::Serialize;
use tracing::warn;

use crate::boundary::{global_shear, knight_stresses, FluidProperties, KnightConfig};
use crate::entropy::{EntropyConfig, SectionStresses, StressTargets};
use crate::geometry::{ChannelSection, DEFAULT_JUNCTION_OFFSET_M};
use crate::Error;

/// Default `tau_max / (rho g R S)` for plain circular sections.
pub const DEFAULT_CIRCULAR_TAU_MAX_FACTOR: f64 = 1.5;

/// Everything needed to turn a section into model predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelContext {
    pub entropy: EntropyConfig,
    pub fluid: FluidProperties,
    pub knight: KnightConfig,
    /// Wall/bed junction offset `y_w` in metres.
    pub junction_offset: f64,
    pub circular_tau_max_factor: f64,
}

impl Default for ModelContext {
    fn default() -> Self {
        Self {
            entropy: EntropyConfig::default(),
            fluid: FluidProperties::default(),
            knight: KnightConfig::default(),
            junction_offset: DEFAULT_JUNCTION_OFFSET_M,
            circular_tau_max_factor: DEFAULT_CIRCULAR_TAU_MAX_FACTOR,
        }
    }
}

impl ModelContext {
    pub fn validate(&self) -> Result<(), Error> {
        self.entropy.validate()?;
        self.fluid.validate()?;
        if !(self.junction_offset.is_finite() && self.junction_offset >= 0.0) {
            return Err(Error::Config(format!(
                "junction offset {} must be finite and non-negative",
                self.junction_offset
            )));
        }
        if !(self.circular_tau_max_factor.is_finite() && self.circular_tau_max_factor > 1.0) {
            return Err(Error::Config(format!(
                "circular tau_max factor {} must exceed 1",
                self.circular_tau_max_factor
            )));
        }
        Ok(())
    }

    /// Stresses for a section. Flatbed sections use the Knight correlations.
    /// Plain circular sections take `tau_mean = rho g R S` and `tau_max` from
    /// the override, or `circular_tau_max_factor * rho g R S` without one.
    pub fn stresses(
        &self,
        section: &ChannelSection,
        tau_max_override: Option<f64>,
    ) -> Result<SectionStresses, Error> {
        if section.is_flatbed() {
            return Ok(SectionStresses::Knight(knight_stresses(
                section,
                &self.fluid,
                &self.knight,
            )?));
        }
        let tau_mean = global_shear(
            self.fluid.density,
            self.fluid.gravity,
            section.hydraulic_radius,
            section.bed_slope,
        );
        let tau_max = match tau_max_override {
            Some(v) => v,
            None => {
                warn!(
                    factor = self.circular_tau_max_factor,
                    "no tau_max given for a circular section; assuming factor * rho g R S"
                );
                self.circular_tau_max_factor * tau_mean
            }
        };
        Ok(SectionStresses::Uniform(StressTargets::new(tau_mean, tau_max)?))
    }
}
