use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Measured,
    Predicted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    /// Position along the full wetted perimeter, 0 at one waterline and 1
    /// at the other.
    pub y_over_p: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("point {index}: position {value} outside [0, 1]")]
    PositionOutOfRange { index: usize, value: f64 },
    #[error("point {index}: position {value} does not increase on {previous}")]
    NotIncreasing {
        index: usize,
        previous: f64,
        value: f64,
    },
    #[error("point {index}: stress {value} must be finite and non-negative")]
    InvalidStress { index: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShearProfile {
    pub sample_id: String,
    pub kind: ProfileKind,
    pub points: Vec<ProfilePoint>,
}

impl ShearProfile {
    pub fn new(
        sample_id: impl Into<String>,
        kind: ProfileKind,
        points: Vec<ProfilePoint>,
    ) -> Result<Self, ProfileError> {
        for (index, p) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&p.y_over_p) {
                return Err(ProfileError::PositionOutOfRange {
                    index,
                    value: p.y_over_p,
                });
            }
            if !(p.tau.is_finite() && p.tau >= 0.0) {
                return Err(ProfileError::InvalidStress {
                    index,
                    value: p.tau,
                });
            }
            if index > 0 && !(p.y_over_p > points[index - 1].y_over_p) {
                return Err(ProfileError::NotIncreasing {
                    index,
                    previous: points[index - 1].y_over_p,
                    value: p.y_over_p,
                });
            }
        }
        Ok(Self {
            sample_id: sample_id.into(),
            kind,
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.y_over_p).collect()
    }

    pub fn stresses(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.tau).collect()
    }
}
