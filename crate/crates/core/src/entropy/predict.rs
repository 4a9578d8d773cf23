use serde::Serialize;

use crate::boundary::{global_shear, BoundaryStress};
use crate::context::ModelContext;
use crate::geometry::{ChannelSection, Segment};
use crate::profile::{ProfileKind, ProfilePoint, ShearProfile};
use crate::Error;

use super::{EntropyError, EntropyModelParams, ModelId, StressTargets};

/// Stresses that drive a section's profile: wall and bed values from the
/// Knight correlations, or one pair of targets for a plain circular section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum SectionStresses {
    Knight(BoundaryStress),
    Uniform(StressTargets),
}

/// Evaluates one model along the wetted perimeter at the given `y/P`
/// positions.
pub fn predict_profile(
    sample_id: &str,
    model: ModelId,
    section: &ChannelSection,
    stresses: &SectionStresses,
    positions: &[f64],
    ctx: &ModelContext,
) -> Result<ShearProfile, Error> {
    if model == ModelId::RhoGRS {
        let tau = global_shear(
            ctx.fluid.density,
            ctx.fluid.gravity,
            section.hydraulic_radius,
            section.bed_slope,
        );
        let points = positions
            .iter()
            .map(|&y_over_p| ProfilePoint { y_over_p, tau })
            .collect();
        return Ok(ShearProfile::new(sample_id, ProfileKind::Predicted, points)?);
    }

    let (wall, bed) = match (section.is_flatbed(), stresses) {
        (true, SectionStresses::Knight(b)) => (
            EntropyModelParams::solve(model, b.wall_targets()?, &ctx.entropy)?,
            EntropyModelParams::solve(model, b.bed_targets()?, &ctx.entropy)?,
        ),
        (false, SectionStresses::Uniform(t)) => {
            let p = EntropyModelParams::solve(model, *t, &ctx.entropy)?;
            (p, p)
        }
        (true, SectionStresses::Uniform(_)) => {
            return Err(EntropyError::MissingTargets("flatbed section needs separate wall and bed stresses").into())
        }
        (false, SectionStresses::Knight(_)) => {
            return Err(EntropyError::MissingTargets("plain circular section needs a single pair of targets").into())
        }
    };

    let mut points = Vec::with_capacity(positions.len());
    for &y_over_p in positions {
        let pos = section.locate(y_over_p, ctx.junction_offset);
        let params = match pos.segment {
            Segment::Wall => &wall,
            Segment::Bed => &bed,
        };
        points.push(ProfilePoint {
            y_over_p,
            tau: params.evaluate(pos.u)?,
        });
    }
    Ok(ShearProfile::new(sample_id, ProfileKind::Predicted, points)?)
}
