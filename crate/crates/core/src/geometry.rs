//! Cross-section geometry of circular pipes running partially full, with or
//! without a flat sediment bed.
//!
//! Heights are measured from the pipe invert. A bed of thickness `t` cuts the
//! circle with a horizontal chord; the water surface sits at `H = t + h`.
//! The wetted boundary is the circular arc between the two chords (the
//! walls) plus the bed chord itself.

use serde::Serialize;
use thiserror::Error;

/// Default wall/bed junction offset (5 mm).
pub const DEFAULT_JUNCTION_OFFSET_M: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("{field} = {value} is out of range: {reason}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
}

fn out_of_range(field: &'static str, value: f64, reason: &'static str) -> GeometryError {
    GeometryError::OutOfRange {
        field,
        value,
        reason,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelSection {
    pub diameter: f64,
    pub sediment_thickness: f64,
    /// Depth of water above the sediment surface.
    pub water_depth: f64,
    pub bed_slope: f64,
    pub wall_perimeter: f64,
    pub bed_perimeter: f64,
    pub wetted_perimeter: f64,
    pub flow_area: f64,
    pub hydraulic_radius: f64,
}

/// Half-angle subtended at the centre by the chord at height `y` above the
/// invert. `2 * r * angle` is the arc length below that chord.
fn half_angle(y: f64, diameter: f64) -> f64 {
    2.0 * (y / diameter).clamp(0.0, 1.0).sqrt().asin()
}

/// Area of the circular segment below height `y`.
fn segment_area(y: f64, diameter: f64) -> f64 {
    let r = 0.5 * diameter;
    let theta = half_angle(y, diameter);
    r * r * (theta - 0.5 * (2.0 * theta).sin())
}

impl ChannelSection {
    /// Builds a section from diameter, sediment thickness, water depth above
    /// the sediment and bed slope.
    pub fn new(
        diameter: f64,
        sediment_thickness: f64,
        water_depth: f64,
        bed_slope: f64,
    ) -> Result<Self, GeometryError> {
        if !(diameter.is_finite() && diameter > 0.0) {
            return Err(out_of_range("diameter", diameter, "must be positive"));
        }
        let t = sediment_thickness;
        if !(t.is_finite() && t >= 0.0 && t < diameter) {
            return Err(out_of_range(
                "sediment_thickness",
                t,
                "must satisfy 0 <= t < D",
            ));
        }
        let room = diameter - t;
        let mut h = water_depth;
        // Depths built from ratios such as (h+t)/D = 1 can overshoot by an ulp.
        if h > room && h - room <= 1e-12 * diameter {
            h = room;
        }
        if !(h.is_finite() && h > 0.0 && h <= room) {
            return Err(out_of_range("water_depth", h, "must satisfy 0 < h <= D - t"));
        }
        if !(bed_slope.is_finite() && bed_slope > 0.0) {
            return Err(out_of_range("bed_slope", bed_slope, "must be positive"));
        }

        let surface = t + h;
        let wall_perimeter = diameter * (half_angle(surface, diameter) - half_angle(t, diameter));
        let bed_perimeter = if t > 0.0 {
            2.0 * (t * (diameter - t)).sqrt()
        } else {
            0.0
        };
        let flow_area = segment_area(surface, diameter) - segment_area(t, diameter);
        let wetted_perimeter = wall_perimeter + bed_perimeter;

        Ok(Self {
            diameter,
            sediment_thickness: t,
            water_depth: h,
            bed_slope,
            wall_perimeter,
            bed_perimeter,
            wetted_perimeter,
            flow_area,
            hydraulic_radius: flow_area / wetted_perimeter,
        })
    }

    /// Builds a section from the dimensionless ratios `t/D` and `(h+t)/D`.
    pub fn from_ratios(
        diameter: f64,
        t_over_d: f64,
        depth_over_d: f64,
        bed_slope: f64,
    ) -> Result<Self, GeometryError> {
        Self::new(
            diameter,
            t_over_d * diameter,
            (depth_over_d - t_over_d) * diameter,
            bed_slope,
        )
    }

    /// Total depth `t + h` measured from the invert.
    pub fn total_depth(&self) -> f64 {
        self.sediment_thickness + self.water_depth
    }

    pub fn is_flatbed(&self) -> bool {
        self.bed_perimeter > 0.0
    }

    pub fn bed_to_wall_ratio(&self) -> f64 {
        self.bed_perimeter / self.wall_perimeter
    }

    /// Maps a full-perimeter coordinate `y/P` to its segment and the
    /// segment-local coordinate `u`.
    ///
    /// The coordinate is folded onto the half perimeter (`0` at the waterline,
    /// `P/2` on the centreline). On flatbed sections the wall segment ends at
    /// `P_w/2 + junction_offset`; `u` runs from 0 at the start of each segment
    /// to 1 at its end.
    pub fn locate(&self, y_over_p: f64, junction_offset: f64) -> SegmentPosition {
        let y = if y_over_p.is_nan() {
            0.0
        } else {
            y_over_p.clamp(0.0, 1.0)
        };
        let half = 0.5 * self.wetted_perimeter;
        let folded = y.min(1.0 - y) * self.wetted_perimeter;

        if !self.is_flatbed() {
            return if folded >= half {
                SegmentPosition {
                    segment: Segment::Bed,
                    u: 1.0,
                }
            } else {
                SegmentPosition {
                    segment: Segment::Wall,
                    u: (folded / half).clamp(0.0, 1.0),
                }
            };
        }

        let junction = (0.5 * self.wall_perimeter + junction_offset.max(0.0)).min(half);
        if folded < junction {
            SegmentPosition {
                segment: Segment::Wall,
                u: (folded / junction).clamp(0.0, 1.0),
            }
        } else {
            let bed_half = half - junction;
            let u = if bed_half > 0.0 {
                ((folded - junction) / bed_half).clamp(0.0, 1.0)
            } else {
                1.0
            };
            SegmentPosition {
                segment: Segment::Bed,
                u,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    Wall,
    Bed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentPosition {
    pub segment: Segment,
    pub u: f64,
}
