//! Hydraulic conditions, measured profiles and synthetic data.

mod io;
mod pairing;
mod synth;

pub use io::{
    load_conditions, load_profiles, read_conditions, read_profiles, write_conditions,
    write_profiles,
};
pub use pairing::{pair_samples, predict_dataset, PredictedDataset};
pub use synth::{midpoint_grid, synth_generate, SynthConfig, SynthOutput, SYNTH_FLOOR};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ChannelSection, GeometryError};

/// Pipe diameter of the reference flume, in metres.
pub const DEFAULT_DIAMETER_M: f64 = 0.244;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("line {line}, column {column}: {message}")]
    Field {
        line: u64,
        column: String,
        message: String,
    },
    #[error("header mismatch: expected {expected}, found {found}")]
    Header { expected: String, found: String },
    #[error("sample {sample_id}: {reason}")]
    Invalid { sample_id: String, reason: String },
    #[error("diameter directive: {0}")]
    Directive(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionClass {
    Circular,
    Flatbed,
}

impl SectionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SectionClass::Circular => "circular",
            SectionClass::Flatbed => "flatbed",
        }
    }
}

impl fmt::Display for SectionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SectionClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "circular" => Ok(SectionClass::Circular),
            "flatbed" | "flat_bed" | "circular_with_flatbed" => Ok(SectionClass::Flatbed),
            other => Err(format!("unknown section class '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydraulicCondition {
    pub sample_id: String,
    pub section_class: SectionClass,
    pub t_over_d: f64,
    pub h_plus_t_over_d: f64,
    pub slope: f64,
    /// Metadata only.
    pub froude: f64,
    /// Discharge in L/s, metadata only.
    pub discharge_lps: f64,
    pub tau_max_override: Option<f64>,
}

impl HydraulicCondition {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |reason: String| DatasetError::Invalid {
            sample_id: self.sample_id.clone(),
            reason,
        };
        if self.sample_id.trim().is_empty() {
            return Err(bad("empty sample id".into()));
        }
        if !(self.t_over_d >= 0.0 && self.t_over_d < 1.0) {
            return Err(bad(format!("t/D = {} must lie in [0, 1)", self.t_over_d)));
        }
        if !(self.h_plus_t_over_d > self.t_over_d && self.h_plus_t_over_d <= 1.0) {
            return Err(bad(format!(
                "(h+t)/D = {} must exceed t/D = {} and not exceed 1",
                self.h_plus_t_over_d, self.t_over_d
            )));
        }
        if !(self.slope.is_finite() && self.slope > 0.0) {
            return Err(bad(format!("slope {} must be positive", self.slope)));
        }
        let expected = if self.t_over_d == 0.0 {
            SectionClass::Circular
        } else {
            SectionClass::Flatbed
        };
        if self.section_class != expected {
            return Err(bad(format!(
                "section class {} does not match t/D = {}",
                self.section_class, self.t_over_d
            )));
        }
        if let Some(t) = self.tau_max_override {
            if !(t.is_finite() && t > 0.0) {
                return Err(bad(format!("tau_max {t} must be positive")));
            }
        }
        Ok(())
    }

    pub fn section(&self, diameter: f64) -> Result<ChannelSection, GeometryError> {
        ChannelSection::from_ratios(diameter, self.t_over_d, self.h_plus_t_over_d, self.slope)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionSet {
    pub diameter: f64,
    pub conditions: Vec<HydraulicCondition>,
}

impl ConditionSet {
    pub fn get(&self, sample_id: &str) -> Option<&HydraulicCondition> {
        self.conditions.iter().find(|c| c.sample_id == sample_id)
    }
}

/// The 23 flume runs: four plain circular, nineteen with a flat bed.
pub fn reference_conditions() -> ConditionSet {
    // (t/D, (h+t)/D, S0 * 1e3, Fr, Q)
    const ROWS: [(f64, f64, f64, f64, f64); 23] = [
        (0.0, 0.333, 1.00, 0.516, 5.36),
        (0.0, 0.506, 1.00, 0.505, 11.7),
        (0.0, 0.666, 1.00, 0.441, 17.3),
        (0.0, 0.826, 1.00, 0.375, 22.9),
        (0.25, 0.332, 1.96, 0.671, 1.32),
        (0.25, 0.499, 1.96, 0.748, 8.0),
        (0.25, 0.398, 1.96, 0.656, 3.3),
        (0.25, 0.666, 1.96, 0.68, 16.5),
        (0.25, 0.755, 1.96, 0.663, 22.1),
        (0.25, 0.795, 1.96, 0.626, 23.8),
        (0.25, 0.333, 8.62, 1.71, 3.39),
        (0.25, 0.499, 8.62, 1.7, 18.2),
        (0.25, 0.666, 8.62, 1.59, 38.9),
        (0.332, 0.499, 2.00, 0.718, 4.4),
        (0.332, 0.666, 2.00, 0.685, 12.2),
        (0.332, 0.75, 2.00, 0.669, 17.0),
        (0.332, 0.8, 2.00, 0.721, 22.1),
        (0.332, 0.499, 2.00, 1.96, 12.0),
        (0.5, 0.666, 9.00, 1.4, 8.4),
        (0.5, 0.75, 9.00, 1.42, 16.0),
        (0.5, 0.8, 9.00, 1.33, 20.0),
        (0.664, 0.75, 8.80, 1.44, 3.09),
        (0.664, 0.8, 8.80, 1.55, 4.93),
    ];
    let conditions = ROWS
        .iter()
        .enumerate()
        .map(|(i, &(t, d, s, fr, q))| HydraulicCondition {
            sample_id: (i + 1).to_string(),
            section_class: if t == 0.0 {
                SectionClass::Circular
            } else {
                SectionClass::Flatbed
            },
            t_over_d: t,
            h_plus_t_over_d: d,
            slope: s * 1e-3,
            froude: fr,
            discharge_lps: q,
            tau_max_override: None,
        })
        .collect();
    ConditionSet {
        diameter: DEFAULT_DIAMETER_M,
        conditions,
    }
}
