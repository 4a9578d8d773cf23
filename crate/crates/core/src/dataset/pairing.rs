use serde::Serialize;
use tracing::warn;

use crate::context::ModelContext;
use crate::entropy::{predict_profile, EntropyError, ModelId};
use crate::normalization::positive_pairs;
use crate::profile::ShearProfile;
use crate::uncertainty::{PairedDataset, SamplePair, SkippedSample};
use crate::Error;

use super::{ConditionSet, DatasetError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictedDataset {
    pub model: ModelId,
    pub profiles: Vec<ShearProfile>,
    pub skipped: Vec<SkippedSample>,
}

fn missing_condition(id: &str) -> Error {
    DatasetError::Invalid {
        sample_id: id.to_string(),
        reason: "no hydraulic condition for this profile".into(),
    }
    .into()
}

/// Predicts every measured profile at its own positions. Samples whose
/// targets the model cannot represent are skipped with a warning.
pub fn predict_dataset(
    model: ModelId,
    set: &ConditionSet,
    measured: &[ShearProfile],
    ctx: &ModelContext,
) -> Result<PredictedDataset, Error> {
    let mut profiles = Vec::with_capacity(measured.len());
    let mut skipped = Vec::new();
    for m in measured {
        let cond = set.get(&m.sample_id).ok_or_else(|| missing_condition(&m.sample_id))?;
        let section = cond.section(set.diameter)?;
        let stresses = ctx.stresses(&section, cond.tau_max_override)?;
        match predict_profile(&m.sample_id, model, &section, &stresses, &m.positions(), ctx) {
            Ok(p) => profiles.push(p),
            Err(Error::Entropy(
                e @ (EntropyError::Unrepresentable { .. }
                | EntropyError::InvalidTargets { .. }
                | EntropyError::ProfileDomain { .. }),
            )) => {
                warn!(sample = %m.sample_id, model = %model, error = %e, "sample skipped");
                skipped.push(SkippedSample {
                    sample_id: m.sample_id.clone(),
                    reason: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PredictedDataset {
        model,
        profiles,
        skipped,
    })
}

/// Joins measured and predicted profiles by sample id, keeping only pairs
/// with both stresses positive.
pub fn pair_samples(
    set: &ConditionSet,
    measured: &[ShearProfile],
    predicted: &PredictedDataset,
) -> Result<PairedDataset, Error> {
    let mut samples = Vec::with_capacity(predicted.profiles.len());
    let mut skipped = predicted.skipped.clone();
    let mut excluded = 0;
    for m in measured {
        let Some(p) = predicted.profiles.iter().find(|p| p.sample_id == m.sample_id) else {
            continue;
        };
        let cond = set.get(&m.sample_id).ok_or_else(|| missing_condition(&m.sample_id))?;
        if m.positions() != p.positions() {
            return Err(DatasetError::Invalid {
                sample_id: m.sample_id.clone(),
                reason: "measured and predicted positions differ".into(),
            }
            .into());
        }
        let keep: Vec<bool> = m
            .points
            .iter()
            .zip(&p.points)
            .map(|(a, b)| a.tau > 0.0 && b.tau > 0.0)
            .collect();
        let (mv, pv, dropped) = positive_pairs(&m.stresses(), &p.stresses());
        excluded += dropped;
        if mv.is_empty() {
            skipped.push(SkippedSample {
                sample_id: m.sample_id.clone(),
                reason: "no pair with both stresses positive".into(),
            });
            continue;
        }
        let positions = m
            .positions()
            .into_iter()
            .zip(&keep)
            .filter_map(|(y, &k)| k.then_some(y))
            .collect();
        samples.push(SamplePair {
            sample_id: m.sample_id.clone(),
            section_class: cond.section_class,
            positions,
            measured: mv,
            predicted: pv,
        });
    }
    if excluded > 0 {
        warn!(excluded, model = %predicted.model, "non-positive stress pairs excluded");
    }
    Ok(PairedDataset {
        model: predicted.model,
        samples,
        skipped,
        excluded_nonpositive: excluded,
    })
}
