use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use tracing::{debug, warn};

use crate::normalization::{error_stats, fit, LambdaFit, NormalizationError};

use super::analysis::{pool, PairedDataset};
use super::{band_statistics, build_bound, UncertaintyError, DEFAULT_LEVEL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationConfig {
    pub ss_min: usize,
    pub ss_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub fit: LambdaFit,
    pub level: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            ss_min: 9,
            ss_max: 23,
            trials: 20,
            seed: 0,
            fit: LambdaFit::default(),
            level: DEFAULT_LEVEL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SsRecord {
    pub ss: usize,
    pub mean_n_in: f64,
    pub sd_n_in: f64,
    pub min_n_in: f64,
    pub max_n_in: f64,
    pub mean_lambda: f64,
    pub sd_lambda: f64,
    pub mean_delta_eps: f64,
    pub mean_mu_eps: f64,
    pub trials_ok: usize,
    pub trials_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub config: CalibrationConfig,
    pub records: Vec<SsRecord>,
    pub best_ss: usize,
    pub best_lambda: f64,
}

#[derive(Debug, Clone, Copy)]
struct Trial {
    n_in: f64,
    lambda: f64,
    delta_eps: f64,
    mu_eps: f64,
}

fn trial_rng(seed: u64, ss: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((ss as u64) << 32) | trial as u64);
    rng
}

fn run_trial(
    dataset: &PairedDataset,
    cfg: &CalibrationConfig,
    ss: usize,
    trial: usize,
) -> Result<Trial, UncertaintyError> {
    let mut rng = trial_rng(cfg.seed, ss, trial);
    let mut idx = sample(&mut rng, dataset.samples.len(), ss).into_vec();
    idx.sort_unstable();
    let (m, p) = pool(idx.iter().map(|&i| &dataset.samples[i]));
    let lambda = fit(cfg.fit, &m, &p)?;
    let state = error_stats(&m, &p, lambda)?;
    let bound = build_bound(&p, &state, cfg.level)?;
    let stats = band_statistics(&m, &p, &bound)?;
    Ok(Trial {
        n_in: stats.n_in,
        lambda,
        delta_eps: state.delta_eps,
        mu_eps: state.mu_eps,
    })
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Sweeps the subset size, scoring the 95 % bound on random subsets of the
/// samples, and picks the size whose mean inside share is closest to 95 %.
pub fn calibrate(
    dataset: &PairedDataset,
    cfg: &CalibrationConfig,
) -> Result<CalibrationResult, UncertaintyError> {
    if cfg.ss_min < 1 || cfg.ss_min > cfg.ss_max || cfg.trials == 0 {
        return Err(UncertaintyError::InvalidRange {
            min: cfg.ss_min,
            max: cfg.ss_max,
        });
    }
    super::level_z(cfg.level)?;
    let available = dataset.samples.len();
    if available < cfg.ss_max {
        return Err(UncertaintyError::InsufficientSamples {
            needed: cfg.ss_max,
            available,
        });
    }

    let mut records = Vec::with_capacity(cfg.ss_max - cfg.ss_min + 1);
    let mut last_err: Option<NormalizationError> = None;
    for ss in cfg.ss_min..=cfg.ss_max {
        let outcomes: Vec<Result<Trial, UncertaintyError>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(dataset, cfg, ss, t))
            .collect();
        let mut ok = Vec::with_capacity(cfg.trials);
        let mut failed = 0;
        for o in outcomes {
            match o {
                Ok(t) => ok.push(t),
                Err(UncertaintyError::Normalization(e)) => {
                    debug!(ss, error = %e, "calibration trial failed");
                    failed += 1;
                    last_err = Some(e);
                }
                Err(e) => return Err(e),
            }
        }
        if ok.is_empty() {
            warn!(ss, "every trial failed at this subset size");
            continue;
        }
        if failed > 0 {
            warn!(ss, failed, "some calibration trials failed");
        }
        let n_in: Vec<f64> = ok.iter().map(|t| t.n_in).collect();
        let lambdas: Vec<f64> = ok.iter().map(|t| t.lambda).collect();
        let (mean_n_in, sd_n_in) = mean_sd(&n_in);
        let (mean_lambda, sd_lambda) = mean_sd(&lambdas);
        let k = ok.len() as f64;
        records.push(SsRecord {
            ss,
            mean_n_in,
            sd_n_in,
            min_n_in: n_in.iter().copied().fold(f64::INFINITY, f64::min),
            max_n_in: n_in.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_lambda,
            sd_lambda,
            mean_delta_eps: ok.iter().map(|t| t.delta_eps).sum::<f64>() / k,
            mean_mu_eps: ok.iter().map(|t| t.mu_eps).sum::<f64>() / k,
            trials_ok: ok.len(),
            trials_failed: failed,
        });
    }

    let best = records
        .iter()
        .fold(None::<&SsRecord>, |best, r| match best {
            Some(b) if (b.mean_n_in - cfg.level).abs() <= (r.mean_n_in - cfg.level).abs() => Some(b),
            _ => Some(r),
        })
        .ok_or_else(|| UncertaintyError::AllTrialsFailed(last_err.clone().unwrap_or(NormalizationError::Degenerate)))?;
    Ok(CalibrationResult {
        config: *cfg,
        best_ss: best.ss,
        best_lambda: best.mean_lambda,
        records,
    })
}
