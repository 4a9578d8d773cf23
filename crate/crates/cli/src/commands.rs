use serde::Serialize;
use tracing::info;

use shearbound::dataset::{
    load_conditions, load_profiles, midpoint_grid, pair_samples, predict_dataset,
    reference_conditions, synth_generate, write_conditions, write_profiles, SynthConfig,
};
use shearbound::entropy::EntropyConfig;
use shearbound::uncertainty::{
    build_bound, calibrate, hbmes1_analyze, hbmes2_analyze, CalibrationConfig, CalibrationResult,
    Hbmes1Report, Hbmes2Report, SkippedSample, DEFAULT_LEVEL,
};
use shearbound::{
    ConditionSet, ErrorKind, FluidProperties, ModelContext, ModelId, NormalizationState,
    PairedDataset, ProfileKind, ProfilePoint, ShearProfile,
};

use crate::output::{ensure_dir, write_atomic, write_json, Table};
use crate::{Command, Failure, Options};

#[derive(Serialize)]
struct Effective<'a> {
    command: Command,
    options: &'a Options,
    context: ModelContext,
    diameter: f64,
}

#[derive(Serialize)]
struct ErrorInfo {
    kind: &'static str,
    message: String,
}

#[derive(Serialize)]
struct ModelEntry<T: Serialize> {
    model: ModelId,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorInfo>,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: Effective<'a>,
    models: Vec<ModelEntry<T>>,
}

fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Config => "config",
        ErrorKind::Data => "data",
        ErrorKind::Solver => "solver",
    }
}

/// Runs `f` for every model, keeping the first failure so that the report
/// is still written for the models that succeeded.
fn per_model<T: Serialize>(
    models: &[ModelId],
    first_failure: &mut Option<Failure>,
    mut f: impl FnMut(ModelId) -> Result<T, Failure>,
) -> Vec<ModelEntry<T>> {
    models
        .iter()
        .map(|&model| match f(model) {
            Ok(r) => ModelEntry {
                model,
                result: Some(r),
                error: None,
            },
            Err(e) => {
                tracing::error!(model = %model, "{}", e.message);
                let info = ErrorInfo {
                    kind: kind_name(e.kind),
                    message: e.message.clone(),
                };
                first_failure.get_or_insert(e);
                ModelEntry {
                    model,
                    result: None,
                    error: Some(info),
                }
            }
        })
        .collect()
}

fn context(opts: &Options) -> Result<ModelContext, Failure> {
    let ctx = ModelContext {
        entropy: EntropyConfig {
            q: opts.q,
            alpha_prime: opts.alpha_prime,
            ..EntropyConfig::default()
        },
        fluid: FluidProperties {
            density: opts.rho,
            gravity: opts.g,
        },
        junction_offset: opts.yw_m,
        ..ModelContext::default()
    };
    ctx.validate()?;
    Ok(ctx)
}

fn calibration_config(opts: &Options) -> CalibrationConfig {
    CalibrationConfig {
        ss_min: opts.ss_min,
        ss_max: opts.ss_max,
        trials: opts.trials,
        seed: opts.seed,
        fit: opts.lambda_fit.into(),
        level: DEFAULT_LEVEL,
    }
}

fn validate(cmd: Command, opts: &Options) -> Result<(), Failure> {
    if opts.models.is_empty() {
        return Err(Failure::config("at least one model is required"));
    }
    if opts.ss_min == 0 || opts.ss_min > opts.ss_max || opts.trials == 0 {
        return Err(Failure::config(format!(
            "invalid sweep: ss {}..={} with {} trials",
            opts.ss_min, opts.ss_max, opts.trials
        )));
    }
    if opts.points == 0 {
        return Err(Failure::config("--points must be positive"));
    }
    if let Some(l) = opts.lambda {
        if !l.is_finite() {
            return Err(Failure::config(format!("--lambda {l} must be finite")));
        }
    }
    let needs_profiles = matches!(cmd, Command::Calibrate | Command::Hbmes1 | Command::Hbmes2);
    if needs_profiles && opts.profiles.is_none() {
        return Err(Failure::config("this command needs --profiles"));
    }
    for p in opts.conditions.iter().chain(&opts.profiles) {
        if !p.is_file() {
            return Err(Failure::config(format!("{} does not exist", p.display())));
        }
    }
    Ok(())
}

pub fn run(cmd: Command, opts: &Options) -> Result<(), Failure> {
    validate(cmd, opts)?;
    let ctx = context(opts)?;
    let set = match &opts.conditions {
        Some(p) => load_conditions(p)?,
        None => reference_conditions(),
    };
    ensure_dir(&opts.out)?;
    let config = Effective {
        command: cmd,
        options: opts,
        context: ctx,
        diameter: set.diameter,
    };
    match cmd {
        Command::Predict => predict(opts, &ctx, &set, config),
        Command::Calibrate => run_calibrate(opts, &ctx, &set, config),
        Command::Hbmes1 => hbmes1(opts, &ctx, &set, config),
        Command::Hbmes2 => hbmes2(opts, &ctx, &set, config),
        Command::Synth => synth(opts, &ctx, &set, config),
    }
}

fn finish<T: Serialize>(
    opts: &Options,
    name: &str,
    config: Effective<'_>,
    models: Vec<ModelEntry<T>>,
    first_failure: Option<Failure>,
) -> Result<(), Failure> {
    write_json(&opts.out.join(name), &Report { config, models })?;
    info!(report = name, "written");
    first_failure.map_or(Ok(()), Err)
}

fn measured_profiles(opts: &Options) -> Result<Vec<ShearProfile>, Failure> {
    let path = opts
        .profiles
        .as_ref()
        .ok_or_else(|| Failure::config("this command needs --profiles"))?;
    let profiles = load_profiles(path)?;
    if profiles.is_empty() {
        return Err(Failure::data(format!("{} holds no profiles", path.display())));
    }
    Ok(profiles)
}

fn paired(
    model: ModelId,
    set: &ConditionSet,
    measured: &[ShearProfile],
    ctx: &ModelContext,
) -> Result<PairedDataset, Failure> {
    let predicted = predict_dataset(model, set, measured, ctx)?;
    Ok(pair_samples(set, measured, &predicted)?)
}

fn fmt(v: f64) -> String {
    v.to_string()
}

#[derive(Serialize)]
struct PredictSummary {
    table: String,
    n_profiles: usize,
    skipped: Vec<SkippedSample>,
}

fn predict(opts: &Options, ctx: &ModelContext, set: &ConditionSet, config: Effective<'_>) -> Result<(), Failure> {
    let templates = match &opts.profiles {
        Some(_) => measured_profiles(opts)?,
        None => {
            let grid = midpoint_grid(opts.points);
            set.conditions
                .iter()
                .map(|c| {
                    let points = grid.iter().map(|&y_over_p| ProfilePoint { y_over_p, tau: 0.0 }).collect();
                    ShearProfile::new(c.sample_id.clone(), ProfileKind::Measured, points)
                })
                .collect::<Result<_, _>>()
                .map_err(shearbound::Error::from)?
        }
    };
    let mut first_failure = None;
    let models = per_model(&opts.models, &mut first_failure, |model| {
        let pred = predict_dataset(model, set, &templates, ctx)?;
        let table = format!("predicted_{model}.csv");
        write_atomic(&opts.out.join(&table), write_profiles(&pred.profiles)?.as_bytes())?;
        Ok(PredictSummary {
            table,
            n_profiles: pred.profiles.len(),
            skipped: pred.skipped,
        })
    });
    finish(opts, "predict.json", config, models, first_failure)
}

fn calibration_table(model: ModelId, r: &CalibrationResult, opts: &Options) -> Result<String, Failure> {
    let name = format!("calibration_{model}.csv");
    let mut t = Table::new(&[
        "ss",
        "mean_n_in",
        "sd_n_in",
        "min_n_in",
        "max_n_in",
        "mean_lambda",
        "sd_lambda",
        "mean_delta_eps",
        "mean_mu_eps",
        "trials_ok",
        "trials_failed",
    ]);
    for rec in &r.records {
        t.row([
            rec.ss.to_string(),
            fmt(rec.mean_n_in),
            fmt(rec.sd_n_in),
            fmt(rec.min_n_in),
            fmt(rec.max_n_in),
            fmt(rec.mean_lambda),
            fmt(rec.sd_lambda),
            fmt(rec.mean_delta_eps),
            fmt(rec.mean_mu_eps),
            rec.trials_ok.to_string(),
            rec.trials_failed.to_string(),
        ]);
    }
    t.save(&opts.out.join(&name))?;
    Ok(name)
}

#[derive(Serialize)]
struct DatasetSummary {
    n_samples: usize,
    n_points: usize,
    excluded_nonpositive: usize,
    skipped: Vec<SkippedSample>,
}

impl DatasetSummary {
    fn of(ds: &PairedDataset) -> Self {
        Self {
            n_samples: ds.samples.len(),
            n_points: ds.n_points(),
            excluded_nonpositive: ds.excluded_nonpositive,
            skipped: ds.skipped.clone(),
        }
    }
}

#[derive(Serialize)]
struct CalibrationSummary {
    table: String,
    dataset: DatasetSummary,
    calibration: CalibrationResult,
}

fn run_calibrate(opts: &Options, ctx: &ModelContext, set: &ConditionSet, config: Effective<'_>) -> Result<(), Failure> {
    let measured = measured_profiles(opts)?;
    let cal = calibration_config(opts);
    let mut first_failure = None;
    let models = per_model(&opts.models, &mut first_failure, |model| {
        let ds = paired(model, set, &measured, ctx)?;
        let calibration = calibrate(&ds, &cal)?;
        let table = calibration_table(model, &calibration, opts)?;
        Ok(CalibrationSummary {
            table,
            dataset: DatasetSummary::of(&ds),
            calibration,
        })
    });
    finish(opts, "calibration.json", config, models, first_failure)
}

#[derive(Serialize)]
struct LambdaChoice {
    lambda: f64,
    source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_ss: Option<usize>,
}

fn choose_lambda(ds: &PairedDataset, opts: &Options) -> Result<LambdaChoice, Failure> {
    if let Some(lambda) = opts.lambda {
        return Ok(LambdaChoice {
            lambda,
            source: "given",
            best_ss: None,
        });
    }
    let r = calibrate(ds, &calibration_config(opts))?;
    Ok(LambdaChoice {
        lambda: r.best_lambda,
        source: "calibrated",
        best_ss: Some(r.best_ss),
    })
}

const BAND_HEADER: [&str; 7] = ["sample_id", "y_over_P", "level", "measured", "predicted", "lower", "upper"];

fn band_rows(
    t: &mut Table,
    sample_id: &str,
    positions: &[f64],
    measured: &[f64],
    predicted: &[f64],
    state: &NormalizationState,
    level: f64,
) -> Result<(), Failure> {
    let bound = build_bound(predicted, state, level)?;
    for i in 0..predicted.len() {
        t.row([
            sample_id.to_string(),
            fmt(positions[i]),
            fmt(level),
            fmt(measured[i]),
            fmt(predicted[i]),
            fmt(bound.lower[i]),
            fmt(bound.upper[i]),
        ]);
    }
    Ok(())
}

#[derive(Serialize)]
struct Hbmes1Summary {
    table: String,
    dataset: DatasetSummary,
    lambda: LambdaChoice,
    report: Hbmes1Report,
}

fn hbmes1(opts: &Options, ctx: &ModelContext, set: &ConditionSet, config: Effective<'_>) -> Result<(), Failure> {
    let measured = measured_profiles(opts)?;
    let mut first_failure = None;
    let models = per_model(&opts.models, &mut first_failure, |model| {
        let ds = paired(model, set, &measured, ctx)?;
        let lambda = choose_lambda(&ds, opts)?;
        let report = hbmes1_analyze(&ds, lambda.lambda)?;
        let table = format!("band95_{model}.csv");
        let mut t = Table::new(&BAND_HEADER);
        for s in &ds.samples {
            band_rows(&mut t, &s.sample_id, &s.positions, &s.measured, &s.predicted, &report.state, DEFAULT_LEVEL)?;
        }
        t.save(&opts.out.join(&table))?;
        Ok(Hbmes1Summary {
            table,
            dataset: DatasetSummary::of(&ds),
            lambda,
            report,
        })
    });
    finish(opts, "hbmes1.json", config, models, first_failure)
}

#[derive(Serialize)]
struct Hbmes2Summary {
    table: String,
    dataset: DatasetSummary,
    lambda: LambdaChoice,
    report: Hbmes2Report,
}

fn hbmes2(opts: &Options, ctx: &ModelContext, set: &ConditionSet, config: Effective<'_>) -> Result<(), Failure> {
    let measured = measured_profiles(opts)?;
    let mut first_failure = None;
    let models = per_model(&opts.models, &mut first_failure, |model| {
        let ds = paired(model, set, &measured, ctx)?;
        let lambda = choose_lambda(&ds, opts)?;
        let report = hbmes2_analyze(&ds, lambda.lambda, opts.zeta)?;
        let table = format!("ocb_{model}.csv");
        let mut t = Table::new(&BAND_HEADER);
        for (s, o) in ds.samples.iter().zip(&report.samples) {
            // A saturated search reports 100 %, which has no finite bound;
            // the table shows the widest level searched instead.
            let level = if o.result.saturated { 100.0 - opts.zeta } else { o.result.ocb };
            band_rows(&mut t, &s.sample_id, &s.positions, &s.measured, &s.predicted, &report.state, level)?;
        }
        t.save(&opts.out.join(&table))?;
        Ok(Hbmes2Summary {
            table,
            dataset: DatasetSummary::of(&ds),
            lambda,
            report,
        })
    });
    finish(opts, "hbmes2.json", config, models, first_failure)
}

#[derive(Serialize)]
struct SynthSummary {
    conditions: &'static str,
    profiles: &'static str,
    n_profiles: usize,
    clipped_points: usize,
    skipped: Vec<SkippedSample>,
}

fn synth(opts: &Options, ctx: &ModelContext, set: &ConditionSet, config: Effective<'_>) -> Result<(), Failure> {
    let cfg = SynthConfig {
        model: opts.synth_model,
        lambda_true: opts.lambda_true,
        sigma_true: opts.sigma_true,
        seed: opts.seed,
        points_per_sample: opts.points,
    };
    let out = synth_generate(set, &cfg, ctx)?;
    let summary = SynthSummary {
        conditions: "conditions.csv",
        profiles: "profiles.csv",
        n_profiles: out.measured.len(),
        clipped_points: out.clipped_points,
        skipped: out.skipped,
    };
    write_atomic(&opts.out.join(summary.conditions), write_conditions(set)?.as_bytes())?;
    write_atomic(&opts.out.join(summary.profiles), write_profiles(&out.measured)?.as_bytes())?;
    let models = vec![ModelEntry {
        model: cfg.model,
        result: Some(summary),
        error: None,
    }];
    finish(opts, "synth.json", config, models, None)
}
