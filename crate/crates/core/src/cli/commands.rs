use std::path::Path;

use nalgebra::DMatrix;

use super::output::{num, ppm_bytes, write_atomic, Table};
use super::{parse_table, to_table, Command, Context, Finished};
use crate::config::{
    ChangepointDemoConfig, CoherenceConfig, FitSeriesConfig, ImageDemoConfig, KernelEvalConfig,
    KernelSpec,
};
use crate::data::{load_csv, Standardization};
use crate::error::{Error, Result};
use crate::fit::{
    fit_gaussian_amplitudes, fit_series as run_fit, gaussians_for_tiling, project_spectrum, Family,
    L1Grid, SeriesParams, TimeScale,
};
use crate::gp::{sample_grid, GpModel, GridSpec, InputPoint};
use crate::kernels::{
    ChangePointKernel, Coregional, CrossRule, GaussianMosm, MinecraftKernel, StationaryKernel,
};
use crate::spectral::{coherence_of, GaussianMoSpectralModel, TargetSpectrumLmc};

/// Directory holding the bundled configs and data.
pub const BUNDLED_CONFIG_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");

pub(super) fn bundled(command: Command) -> (&'static str, &'static str) {
    match command {
        Command::Coherence => (
            "coherence_gaussian.toml",
            include_str!("../../configs/coherence_gaussian.toml"),
        ),
        Command::ImageDemo => (
            "image_demo.toml",
            include_str!("../../configs/image_demo.toml"),
        ),
        Command::ChangepointDemo => (
            "changepoint_demo.toml",
            include_str!("../../configs/changepoint_demo.toml"),
        ),
        Command::FitSeries => (
            "fit_series.toml",
            include_str!("../../configs/fit_series.toml"),
        ),
        Command::KernelEval => (
            "kernel_eval.toml",
            include_str!("../../configs/kernel_eval.toml"),
        ),
    }
}

fn finish(ctx: &Context, config: toml::Table, seed: u64, written: &[&str]) -> Finished {
    Finished {
        config,
        seed,
        outputs: written
            .iter()
            .map(|f| ctx.out.join(f).display().to_string())
            .collect(),
    }
}

pub(super) fn coherence(ctx: &Context) -> Result<Finished> {
    let cfg: CoherenceConfig = parse_table(ctx.table.clone(), &ctx.origin)?;
    let model = cfg.model.spectral_model()?;
    if model.input_dim() != 1 {
        return Err(Error::Config {
            path: ctx.origin.clone(),
            field: "model".into(),
            message: "coherence sweeps need a one-dimensional model".into(),
        });
    }
    let [i, j] = cfg.channels;
    if i >= model.num_channels() || j >= model.num_channels() {
        return Err(Error::Config {
            path: ctx.origin.clone(),
            field: "channels".into(),
            message: format!("model has {} channels", model.num_channels()),
        });
    }
    let mut table = Table::new(&["nu", "S11", "S22", "S12_model", "S12_bound", "coherence"]);
    for nu in cfg.frequencies.values()? {
        let s = model.density(&[nu]);
        let bound = (s[(i, i)] * s[(j, j)]).sqrt();
        let c = coherence_of(&s, i, j).unwrap_or(f64::NAN);
        table.row(&[nu, s[(i, i)], s[(j, j)], s[(i, j)], bound, c].map(num));
    }
    table.write(&ctx.out.join("coherence.csv"))?;
    Ok(finish(
        ctx,
        to_table(&cfg)?,
        ctx.seed.unwrap_or(0),
        &["coherence.csv"],
    ))
}

/// The three image-demo models.
pub struct ImageModels {
    pub target: TargetSpectrumLmc,
    pub minecraft: MinecraftKernel,
    pub gaussian: GaussianMosm,
}

impl ImageModels {
    pub fn build(cfg: &ImageDemoConfig) -> Result<Self> {
        let target = cfg.target.build()?;
        let (basis, amps) =
            project_spectrum(&target, &cfg.tiling).map_err(Error::in_stage("minecraft model"))?;
        let minecraft = MinecraftKernel::new(
            crate::spectral::MinecraftSpectralModel::new(basis, amps)
                .map_err(Error::in_stage("minecraft model"))?,
        );
        let comps = gaussians_for_tiling(&cfg.tiling, cfg.gaussian_std_scale)
            .map_err(Error::in_stage("gaussian model"))?;
        let grid = L1Grid {
            half_extent: cfg.tiling.half_extent.clone(),
            points: cfg.l1_points,
        };
        let a = fit_gaussian_amplitudes(&target, &comps, &grid)
            .map_err(Error::in_stage("gaussian model"))?;
        let gaussian = GaussianMosm::new(
            GaussianMoSpectralModel::new(comps, a).map_err(Error::in_stage("gaussian model"))?,
        );
        Ok(Self {
            target,
            minecraft,
            gaussian,
        })
    }
}

/// Lag-zero channel correlations in upper-triangle order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub model: &'static str,
    pub values: Vec<f64>,
}

fn lag0_correlations<K: StationaryKernel + ?Sized>(k: &K) -> Vec<f64> {
    let n = k.num_outputs();
    let zero = vec![0.0; k.input_dim()];
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(k.eval(i, j, &zero) / (k.eval(i, i, &zero) * k.eval(j, j, &zero)).sqrt());
        }
    }
    out
}

pub fn correlation_rows(models: &ImageModels) -> Vec<CorrelationRow> {
    vec![
        CorrelationRow {
            model: "target",
            values: lag0_correlations(&models.target),
        },
        CorrelationRow {
            model: "minecraft",
            values: lag0_correlations(&models.minecraft),
        },
        CorrelationRow {
            model: "gaussian",
            values: lag0_correlations(&models.gaussian),
        },
    ]
}

pub(super) fn image_demo(ctx: &Context) -> Result<Finished> {
    let mut cfg: ImageDemoConfig = parse_table(ctx.table.clone(), &ctx.origin)?;
    if let Some(s) = ctx.seed {
        cfg.seed = s;
    }
    let models = ImageModels::build(&cfg)?;
    let rows = correlation_rows(&models);
    let n = models.target.mixing().nrows();
    let mut header = vec!["model".to_string()];
    let pairs: Vec<String> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| format!("{i}{j}")))
        .collect();
    header.extend(pairs.iter().map(|p| format!("corr_{p}")));
    header.extend(pairs.iter().map(|p| format!("err_{p}")));
    let mut table = Table::new(&header);
    for r in &rows {
        let mut fields = vec![r.model.to_string()];
        fields.extend(r.values.iter().map(|&v| num(v)));
        fields.extend(
            r.values
                .iter()
                .zip(&rows[0].values)
                .map(|(v, t)| num(v - t)),
        );
        table.row(&fields);
    }
    table.write(&ctx.out.join("correlations.csv"))?;

    let grid = GridSpec {
        rows: cfg.grid.rows,
        cols: cfg.grid.cols,
        spacing: cfg.grid.spacing,
    };
    let draws: [(&str, &'static str, &dyn StationaryKernel); 3] = [
        ("target.ppm", "target model", &models.target),
        ("minecraft.ppm", "minecraft model", &models.minecraft),
        ("gaussian.ppm", "gaussian model", &models.gaussian),
    ];
    let mut clipped = Table::new(&["model", "clipped_fraction"]);
    for (file, stage, kernel) in draws {
        let sample = sample_grid(kernel, grid, cfg.seed).map_err(Error::in_stage(stage))?;
        write_atomic(&ctx.out.join(file), &ppm_bytes(&sample.channels)?)?;
        clipped.row(&[
            stage.trim_end_matches(" model").to_string(),
            num(sample.clipped_fraction),
        ]);
    }
    clipped.write(&ctx.out.join("sampling.csv"))?;
    Ok(finish(
        ctx,
        to_table(&cfg)?,
        cfg.seed,
        &[
            "correlations.csv",
            "target.ppm",
            "minecraft.ppm",
            "gaussian.ppm",
            "sampling.csv",
        ],
    ))
}

/// How the two regimes of the change-point demo relate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeCoupling {
    Independent,
    Identical,
    /// Multi-output regimes with `k12 = rho * k`.
    Coherent(f64),
}

pub fn changepoint_kernel(
    spec: &KernelSpec,
    coupling: RegimeCoupling,
    location: f64,
    steepness: f64,
) -> Result<ChangePointKernel> {
    let base = spec.build()?;
    if base.num_outputs() != 1 || base.input_dim() != 1 {
        return Err(Error::Config {
            path: String::new(),
            field: "kernel".into(),
            message: "change-point regimes need a single-output 1-D kernel".into(),
        });
    }
    match coupling {
        RegimeCoupling::Independent => {
            ChangePointKernel::new(base, CrossRule::Independent, location, steepness)
        }
        RegimeCoupling::Identical => {
            ChangePointKernel::new(base, CrossRule::Identical, location, steepness)
        }
        RegimeCoupling::Coherent(rho) => {
            let b = DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]);
            let pair = Coregional::new(base, b)?;
            ChangePointKernel::new(Box::new(pair), CrossRule::MultiOutput, location, steepness)
        }
    }
}

/// Prior standard deviation of the change-point process at each `x`.
pub fn changepoint_profile(kernel: &ChangePointKernel, xs: &[f64]) -> Vec<f64> {
    use crate::kernels::Covariance;
    xs.iter()
        .map(|&x| kernel.cov(&[x], 0, &[x], 0).max(0.0).sqrt())
        .collect()
}

pub(super) fn changepoint_demo(ctx: &Context) -> Result<Finished> {
    let mut cfg: ChangepointDemoConfig = parse_table(ctx.table.clone(), &ctx.origin)?;
    if let Some(s) = ctx.seed {
        cfg.seed = s;
    }
    let xs = cfg.inputs.values()?;
    let mut modes = vec![
        ("independent", 0.0, RegimeCoupling::Independent),
        ("identical", 1.0, RegimeCoupling::Identical),
    ];
    for &rho in &cfg.coherences {
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::Config {
                path: ctx.origin.clone(),
                field: "coherences".into(),
                message: format!("coherence {rho} outside [-1, 1]"),
            });
        }
        modes.push(("multi-output", rho, RegimeCoupling::Coherent(rho)));
    }
    let mut profile = Table::new(&["mode", "coherence", "x", "std"]);
    let mut header = vec!["mode".to_string(), "coherence".into(), "x".into()];
    header.extend((0..cfg.samples).map(|k| format!("sample_{k}")));
    let mut samples = Table::new(&header);
    let points: Vec<InputPoint> = xs.iter().map(|&x| InputPoint::scalar(x, 0)).collect();
    for (label, rho, coupling) in modes {
        let kernel = changepoint_kernel(&cfg.kernel, coupling, cfg.location, cfg.steepness)?;
        for (x, s) in xs.iter().zip(changepoint_profile(&kernel, &xs)) {
            profile.row(&[label.to_string(), num(rho), num(*x), num(s)]);
        }
        if cfg.samples > 0 {
            let draws = GpModel::noiseless(kernel)
                .sample_prior(&points, cfg.seed, cfg.samples)
                .map_err(Error::in_stage("sampling"))?;
            for (k, x) in xs.iter().enumerate() {
                let mut fields = vec![label.to_string(), num(rho), num(*x)];
                fields.extend(draws.row(k).iter().map(|&v| num(v)));
                samples.row(&fields);
            }
        }
    }
    profile.write(&ctx.out.join("profile.csv"))?;
    samples.write(&ctx.out.join("samples.csv"))?;
    Ok(finish(
        ctx,
        to_table(&cfg)?,
        cfg.seed,
        &["profile.csv", "samples.csv"],
    ))
}

/// Restart and iteration budgets restored by `--paper-scale`.
pub const FULL_RESTARTS: usize = 1000;
pub const FULL_ITERATIONS: usize = 2000;

/// Serialized result of `fit-series`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FittedSeries {
    pub family: Family,
    pub components: usize,
    pub smse: f64,
    pub nlml: f64,
    pub restart: usize,
    pub time_scale: TimeScale,
    pub standardization: Standardization,
    pub params: SeriesParams,
}

fn resolve(base: &Path, p: &Path) -> std::path::PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub(super) fn fit_series(ctx: &Context) -> Result<Finished> {
    let mut cfg: FitSeriesConfig = parse_table(ctx.table.clone(), &ctx.origin)?;
    if let Some(s) = ctx.seed {
        cfg.fit.optimizer.seed = s;
    }
    if ctx.paper_scale {
        cfg.fit.optimizer.restarts = FULL_RESTARTS;
        cfg.fit.optimizer.iterations = FULL_ITERATIONS;
    }
    let path = resolve(&ctx.base, &cfg.input.path);
    cfg.input.path = std::path::absolute(&path).unwrap_or(path);
    let series = load_csv(
        &cfg.input.path,
        &cfg.input.time_column,
        &cfg.input.value_column,
    )
    .map_err(Error::in_stage("load"))?;
    let fit = run_fit(&series, &cfg.fit)?;

    let mut trace = Table::new(&["iter", "objective", "grad_norm"]);
    for r in &fit.outcome.trace {
        trace.row(&[r.iter.to_string(), num(r.objective), num(r.grad_norm)]);
    }
    trace.write(&ctx.out.join("trace.csv"))?;
    let mut pred = Table::new(&["x", "channel", "mean", "var"]);
    for ((t, m), v) in fit.test_times.iter().zip(&fit.mean).zip(&fit.var) {
        pred.row(&[num(*t), "0".into(), num(*m), num(*v)]);
    }
    pred.write(&ctx.out.join("predictions.csv"))?;
    let model = FittedSeries {
        family: cfg.fit.family,
        components: cfg.fit.components,
        smse: fit.smse,
        nlml: fit.outcome.nlml,
        restart: fit.outcome.restart,
        time_scale: fit.time_scale,
        standardization: fit.standardization,
        params: fit.outcome.params.clone(),
    };
    let text = toml::to_string_pretty(&model).map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(&ctx.out.join("model.toml"), text.as_bytes())?;
    println!("smse {}", num(fit.smse));
    Ok(finish(
        ctx,
        to_table(&cfg)?,
        cfg.fit.optimizer.seed,
        &["trace.csv", "predictions.csv", "model.toml"],
    ))
}

pub(super) fn kernel_eval(ctx: &Context) -> Result<Finished> {
    let cfg: KernelEvalConfig = parse_table(ctx.table.clone(), &ctx.origin)?;
    let kernel = cfg.kernel.build()?;
    let lags = cfg.lags.points()?;
    let d = kernel.input_dim();
    if let Some(bad) = lags.iter().find(|l| l.len() != d) {
        return Err(Error::Config {
            path: ctx.origin.clone(),
            field: "lags".into(),
            message: format!("lag {bad:?} does not have dimension {d}"),
        });
    }
    let n = kernel.num_outputs();
    let mut header: Vec<String> = if d == 1 {
        vec!["r".into()]
    } else {
        (1..=d).map(|k| format!("r{k}")).collect()
    };
    let sep = if n > 9 { "_" } else { "" };
    for i in 1..=n {
        for j in 1..=n {
            header.push(format!("K{i}{sep}{j}"));
        }
    }
    let mut table = Table::new(&header);
    for lag in &lags {
        let mut fields: Vec<String> = lag.iter().map(|&r| num(r)).collect();
        for i in 0..n {
            for j in 0..n {
                fields.push(num(kernel.eval(i, j, lag)));
            }
        }
        table.row(&fields);
    }
    table.write(&ctx.out.join("kernel.csv"))?;
    Ok(finish(
        ctx,
        to_table(&cfg)?,
        ctx.seed.unwrap_or(0),
        &["kernel.csv"],
    ))
}
