//! Spectral approximation of target kernels and marginal-likelihood fitting
//! of change-point series models.

mod gaussian_l1;
mod optimize;
mod series;
mod tiling;

use serde::{Deserialize, Serialize};

pub use gaussian_l1::{
    fit_gaussian_amplitudes, gaussians_for_tiling, l1_nonnegative, peak_matched_std_scale, L1Grid,
    L1_TOLERANCE, MAX_SWEEPS,
};
pub use optimize::{
    fit_objective, initial_point, minimize_cg, FitOutcome, Minimum, OptimizerConfig, TraceRow,
};
pub use series::{
    finite_difference_gradient, num_params, Family, Freeze, InitSampler, RegimeSpectrum,
    SeriesObjective, SeriesParams, NOISE_FLOOR,
};
pub use tiling::{
    project_matrices, project_spectrum, spectral_l1_distance, TilingSpec, PROJECTION_ORDER,
};

use crate::data::{split_train_test, standardize, SplitMode, Standardization, TimeSeries};
use crate::error::{Error, Result};
use crate::gp::{smse, GpModel, InputPoint, MultiOutputDataset};

/// Everything [`fit_series`] needs besides the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFitConfig {
    pub family: Family,
    pub components: usize,
    #[serde(default = "default_ratio")]
    pub train_ratio: f64,
    #[serde(default = "default_split")]
    pub split: SplitMode,
    #[serde(default)]
    pub freeze: Freeze,
    /// Values for frozen groups; required when anything is frozen.
    #[serde(default)]
    pub anchor: Option<SeriesParams>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

fn default_ratio() -> f64 {
    0.9
}

fn default_split() -> SplitMode {
    SplitMode::Tail
}

/// Affine map from raw time onto the unit interval spanned by the training set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScale {
    pub origin: f64,
    pub span: f64,
}

impl TimeScale {
    pub fn apply(&self, t: f64) -> f64 {
        (t - self.origin) / self.span
    }
}

/// Fitted model and held-out predictions in original units. Parameters live
/// in scaled time and standardised values.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFit {
    pub outcome: FitOutcome,
    pub time_scale: TimeScale,
    pub standardization: Standardization,
    pub test_times: Vec<f64>,
    pub test_values: Vec<f64>,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    pub smse: f64,
}

/// Split, standardise, optimise with restarts, predict the held-out points
/// and score them by SMSE. Errors name the failing stage.
pub fn fit_series(series: &TimeSeries, config: &SeriesFitConfig) -> Result<SeriesFit> {
    if config.components == 0 {
        return Err(Error::in_stage("config")(Error::invalid(
            "components must be >= 1",
        )));
    }
    let frozen = config.freeze.layout || config.freeze.location || config.freeze.noise;
    if frozen && config.anchor.is_none() {
        return Err(Error::in_stage("config")(Error::invalid(
            "frozen parameter groups need an anchor model",
        )));
    }
    if let Some(a) = &config.anchor {
        if a.family() != config.family || a.components() != config.components {
            return Err(Error::in_stage("config")(Error::invalid(
                "anchor model does not match family and component count",
            )));
        }
    }
    let (train, test) = split_train_test(series, config.train_ratio, config.split)
        .map_err(Error::in_stage("split"))?;
    let (train_z, _, stats) = standardize(&train, &test).map_err(Error::in_stage("standardize"))?;
    let first = train.times()[0];
    let last = train.times()[train.len() - 1];
    let time_scale = TimeScale {
        origin: first,
        span: if last > first { last - first } else { 1.0 },
    };
    let x: Vec<f64> = train.times().iter().map(|&t| time_scale.apply(t)).collect();
    let objective = SeriesObjective::new(
        config.family,
        config.components,
        x.clone(),
        train_z.values().to_vec(),
    )
    .map_err(Error::in_stage("optimize"))?;
    let outcome = fit_objective(
        &objective,
        &config.optimizer,
        config.freeze,
        config.anchor.as_ref(),
    )
    .map_err(Error::in_stage("optimize"))?;

    let predict = || -> Result<(Vec<f64>, Vec<f64>)> {
        let p = &outcome.params;
        let model = GpModel::new(p.kernel()?, vec![p.noise])?;
        let inputs = x.iter().map(|&t| InputPoint::scalar(t, 0)).collect();
        let data = MultiOutputDataset::new(inputs, train_z.values().to_vec())?;
        let query: Vec<InputPoint> = test
            .times()
            .iter()
            .map(|&t| InputPoint::scalar(time_scale.apply(t), 0))
            .collect();
        let (mean, var) = model.predict(&data, &query)?;
        Ok((
            mean.iter().map(|&m| stats.invert(m)).collect(),
            var.iter().map(|&v| v * stats.std * stats.std).collect(),
        ))
    };
    let (mean, var) = predict().map_err(Error::in_stage("predict"))?;
    let score = smse(&mean, test.values(), train.values()).map_err(Error::in_stage("score"))?;
    Ok(SeriesFit {
        outcome,
        time_scale,
        standardization: stats,
        test_times: test.times().to_vec(),
        test_values: test.values().to_vec(),
        mean,
        var,
        smse: score,
    })
}

/// Noisy draw of the change-point model at `times`; the latent sample and
/// the noise come from separate streams of `seed`.
pub fn simulate_series(
    name: &str,
    params: &SeriesParams,
    times: &[f64],
    seed: u64,
) -> Result<TimeSeries> {
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, StandardNormal};

    let model = GpModel::noiseless(params.kernel()?);
    let points: Vec<InputPoint> = times.iter().map(|&t| InputPoint::scalar(t, 0)).collect();
    let latent = model.sample_prior(&points, seed, 1)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let sd = params.noise.sqrt();
    let values = latent
        .column(0)
        .iter()
        .map(|&f| {
            let z: f64 = StandardNormal.sample(&mut rng);
            f + sd * z
        })
        .collect();
    TimeSeries::new(name, times.to_vec(), values)
}
