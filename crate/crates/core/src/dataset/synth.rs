use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use tracing::warn;

use crate::context::ModelContext;
use crate::entropy::ModelId;
use crate::normalization::{boxcox_forward, boxcox_inverse};
use crate::profile::{ProfileKind, ProfilePoint, ShearProfile};
use crate::uncertainty::SkippedSample;
use crate::Error;

use super::{predict_dataset, ConditionSet};

/// Stress given to synthetic points whose perturbed value is not positive.
pub const SYNTH_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynthConfig {
    pub model: ModelId,
    pub lambda_true: f64,
    pub sigma_true: f64,
    pub seed: u64,
    pub points_per_sample: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthOutput {
    pub measured: Vec<ShearProfile>,
    pub skipped: Vec<SkippedSample>,
    pub clipped_points: usize,
}

/// Midpoints of `n` equal cells on `[0, 1]`.
pub fn midpoint_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
}

/// Evaluates `cfg.model` on a midpoint grid for every condition and adds
/// Gaussian noise in transformed space.
pub fn synth_generate(
    set: &ConditionSet,
    cfg: &SynthConfig,
    ctx: &ModelContext,
) -> Result<SynthOutput, Error> {
    if !(cfg.sigma_true.is_finite() && cfg.sigma_true >= 0.0) {
        return Err(Error::Config(format!("sigma {} must be non-negative", cfg.sigma_true)));
    }
    if !cfg.lambda_true.is_finite() {
        return Err(Error::Config(format!("lambda {} must be finite", cfg.lambda_true)));
    }
    if cfg.points_per_sample == 0 {
        return Err(Error::Config("points per sample must be positive".into()));
    }
    let grid = midpoint_grid(cfg.points_per_sample);
    let templates: Vec<ShearProfile> = set
        .conditions
        .iter()
        .map(|c| {
            let points = grid.iter().map(|&y_over_p| ProfilePoint { y_over_p, tau: 0.0 }).collect();
            ShearProfile::new(c.sample_id.clone(), ProfileKind::Measured, points)
        })
        .collect::<Result<_, _>>()?;
    let predicted = predict_dataset(cfg.model, set, &templates, ctx)?;
    let noise = Normal::new(0.0, cfg.sigma_true).expect("sigma checked above");

    let mut clipped_points = 0;
    let mut measured = Vec::with_capacity(predicted.profiles.len());
    for p in &predicted.profiles {
        let stream = set
            .conditions
            .iter()
            .position(|c| c.sample_id == p.sample_id)
            .expect("predicted samples come from the condition set");
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream as u64);
        let points = p
            .points
            .iter()
            .map(|pt| {
                let eps = noise.sample(&mut rng);
                let tau = if cfg.sigma_true == 0.0 || pt.tau <= 0.0 {
                    pt.tau
                } else {
                    let z = boxcox_forward(pt.tau, cfg.lambda_true).expect("positive stress") + eps;
                    match boxcox_inverse(z, cfg.lambda_true) {
                        Ok(v) if v.is_finite() && v >= SYNTH_FLOOR => v,
                        _ => {
                            clipped_points += 1;
                            SYNTH_FLOOR
                        }
                    }
                };
                ProfilePoint {
                    y_over_p: pt.y_over_p,
                    tau,
                }
            })
            .collect();
        measured.push(ShearProfile::new(p.sample_id.clone(), ProfileKind::Measured, points)?);
    }
    if clipped_points > 0 {
        warn!(clipped_points, floor = SYNTH_FLOOR, "synthetic stresses clipped to the floor");
    }
    Ok(SynthOutput {
        measured,
        skipped: predicted.skipped,
        clipped_points,
    })
}
