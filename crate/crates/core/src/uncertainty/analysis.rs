use serde::Serialize;

use crate::dataset::SectionClass;
use crate::entropy::ModelId;
use crate::normalization::{error_stats, NormalizationState};

use super::{
    band_statistics, build_bound, classify_certainty, find_ocb, BandStatistics, Certainty,
    OcbResult, UncertaintyError, DEFAULT_LEVEL,
};

/// Measured and predicted stresses of one sample at matching positions.
/// Only pairs with both stresses strictly positive are kept.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePair {
    pub sample_id: String,
    pub section_class: SectionClass,
    pub positions: Vec<f64>,
    pub measured: Vec<f64>,
    pub predicted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedSample {
    pub sample_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedDataset {
    pub model: ModelId,
    pub samples: Vec<SamplePair>,
    pub skipped: Vec<SkippedSample>,
    /// Pairs dropped because a stress was zero or negative.
    pub excluded_nonpositive: usize,
}

impl PairedDataset {
    pub fn n_points(&self) -> usize {
        self.samples.iter().map(|s| s.measured.len()).sum()
    }

    pub fn pooled(&self) -> (Vec<f64>, Vec<f64>) {
        pool(self.samples.iter())
    }
}

pub(crate) fn pool<'a>(samples: impl Iterator<Item = &'a SamplePair>) -> (Vec<f64>, Vec<f64>) {
    let mut m = Vec::new();
    let mut p = Vec::new();
    for s in samples {
        m.extend_from_slice(&s.measured);
        p.extend_from_slice(&s.predicted);
    }
    (m, p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hbmes1Report {
    pub model: ModelId,
    pub n_samples: usize,
    pub state: NormalizationState,
    pub level: f64,
    pub z: f64,
    pub stats: BandStatistics,
    pub certainty: Certainty,
    pub clipped_points: usize,
}

/// Pools every pair, fixes the error moments at `lambda` and scores the
/// 95 % bound.
pub fn hbmes1_analyze(dataset: &PairedDataset, lambda: f64) -> Result<Hbmes1Report, UncertaintyError> {
    let (m, p) = dataset.pooled();
    if m.is_empty() {
        return Err(UncertaintyError::Empty);
    }
    let state = error_stats(&m, &p, lambda)?;
    let bound = build_bound(&p, &state, DEFAULT_LEVEL)?;
    let stats = band_statistics(&m, &p, &bound)?;
    Ok(Hbmes1Report {
        model: dataset.model,
        n_samples: dataset.samples.len(),
        state,
        level: DEFAULT_LEVEL,
        z: bound.z,
        stats,
        certainty: classify_certainty(stats.n_in),
        clipped_points: bound.clipped_points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleOcb {
    pub sample_id: String,
    pub section_class: SectionClass,
    pub n_points: usize,
    #[serde(flatten)]
    pub result: OcbResult,
}

/// Mean FOCB per section class and over all samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassAggregates {
    pub circular: Option<f64>,
    pub flatbed: Option<f64>,
    /// Mean over all samples, i.e. the class means weighted by sample count.
    pub overall: Option<f64>,
    pub n_circular: usize,
    pub n_flatbed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hbmes2Report {
    pub model: ModelId,
    pub zeta: f64,
    pub state: NormalizationState,
    pub samples: Vec<SampleOcb>,
    pub focb: ClassAggregates,
}

/// Per-sample optimized bounds under the pooled error moments.
pub fn hbmes2_analyze(
    dataset: &PairedDataset,
    lambda: f64,
    zeta: f64,
) -> Result<Hbmes2Report, UncertaintyError> {
    let (m, p) = dataset.pooled();
    if m.is_empty() {
        return Err(UncertaintyError::Empty);
    }
    let state = error_stats(&m, &p, lambda)?;
    let mut samples = Vec::with_capacity(dataset.samples.len());
    for s in &dataset.samples {
        if s.measured.is_empty() {
            continue;
        }
        let result = find_ocb(&s.measured, &s.predicted, &state, zeta)?;
        samples.push(SampleOcb {
            sample_id: s.sample_id.clone(),
            section_class: s.section_class,
            n_points: s.measured.len(),
            result,
        });
    }

    let mean_of = |class: Option<SectionClass>| {
        let v: Vec<f64> = samples
            .iter()
            .filter(|s| class.map_or(true, |c| s.section_class == c))
            .map(|s| s.result.focb)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    };
    let count = |c: SectionClass| samples.iter().filter(|s| s.section_class == c).count();
    let focb = ClassAggregates {
        circular: mean_of(Some(SectionClass::Circular)),
        flatbed: mean_of(Some(SectionClass::Flatbed)),
        overall: mean_of(None),
        n_circular: count(SectionClass::Circular),
        n_flatbed: count(SectionClass::Flatbed),
    };
    Ok(Hbmes2Report {
        model: dataset.model,
        zeta,
        state,
        samples,
        focb,
    })
}

/// Overall mean rebuilt from class means and class sizes.
pub fn class_weighted_mean(circular: f64, n_circular: usize, flatbed: f64, n_flatbed: usize) -> f64 {
    (circular * n_circular as f64 + flatbed * n_flatbed as f64) / (n_circular + n_flatbed) as f64
}
