//! TOML configuration for kernels and for each CLI command.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{SeriesFitConfig, TilingSpec};
use crate::kernels::{
    BlockSm, EllipsoidKernel, GaussianMosm, GaussianSm, MinecraftKernel, PairShift,
    StationaryKernel,
};
use crate::spectral::{
    AmplitudeMatrixSet, BlockBasis, BlockComponent, GaussianComponent, GaussianMoSpectralModel,
    Matern, MinecraftSpectralModel, SpectralModel, TargetSpectrumLmc,
};

/// Parses `text` as `T`, reporting the dotted path of the failing field.
pub fn from_toml_str<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    let de = toml::Deserializer::new(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        Error::Config {
            path: origin.to_string(),
            field: if field == "." { String::new() } else { field },
            message: e.into_inner().message().trim().to_string(),
        }
    })
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_toml_str(&text, &path.display().to_string())
}

pub fn to_toml_string<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string_pretty(value).map_err(|e| Error::Config {
        path: String::new(),
        field: String::new(),
        message: e.to_string(),
    })
}

fn config_err(field: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter(message) => Error::Config {
            path: String::new(),
            field: field.to_string(),
            message,
        },
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedGaussian {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub center: Vec<f64>,
    pub width: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedBlock {
    pub weight: f64,
    pub center: Vec<f64>,
    pub width: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    pub component: usize,
    pub i: usize,
    pub j: usize,
    pub delay: Vec<f64>,
    #[serde(default)]
    pub phase: f64,
}

/// A Minecraft spectrum: blocks plus one symmetric PSD `N x N` amplitude
/// matrix per block, given row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinecraftSpec {
    pub blocks: Vec<BlockSpec>,
    pub amplitudes: Vec<Vec<Vec<f64>>>,
}

impl MinecraftSpec {
    pub fn build(&self) -> Result<MinecraftSpectralModel> {
        let comps = self
            .blocks
            .iter()
            .map(|b| BlockComponent::new(b.center.clone(), b.width.clone()))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| config_err("blocks", e))?;
        let basis = BlockBasis::new(comps).map_err(|e| config_err("blocks", e))?;
        let mats = self
            .amplitudes
            .iter()
            .map(|rows| matrix_from_rows(rows))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| config_err("amplitudes", e))?;
        let amps =
            AmplitudeMatrixSet::from_matrices(&mats).map_err(|e| config_err("amplitudes", e))?;
        MinecraftSpectralModel::new(basis, amps).map_err(|e| config_err("amplitudes", e))
    }

    pub fn from_model(model: &MinecraftSpectralModel) -> Self {
        Self {
            blocks: model
                .basis()
                .components()
                .iter()
                .map(|c| BlockSpec {
                    center: c.center().to_vec(),
                    width: c.width().to_vec(),
                })
                .collect(),
            amplitudes: model
                .amplitudes()
                .matrices()
                .iter()
                .map(matrix_to_rows)
                .collect(),
        }
    }
}

/// LMC target over Matérn latents; `mixing` is `N x R`, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LmcSpec {
    pub mixing: Vec<Vec<f64>>,
    pub latents: Vec<Matern>,
}

impl LmcSpec {
    pub fn build(&self) -> Result<TargetSpectrumLmc> {
        let w = matrix_from_rows(&self.mixing).map_err(|e| config_err("mixing", e))?;
        TargetSpectrumLmc::new(w, self.latents.clone()).map_err(|e| config_err("latents", e))
    }
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::invalid(
            "matrix rows must be non-empty and of equal length",
        ));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Any kernel the library can evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    GaussianSm {
        components: Vec<WeightedGaussian>,
    },
    BlockSm {
        components: Vec<WeightedBlock>,
    },
    /// Shared Gaussians; `amplitudes` is `Q x N`.
    GaussianMosm {
        components: Vec<GaussianSpec>,
        amplitudes: Vec<Vec<f64>>,
    },
    Minecraft {
        blocks: Vec<BlockSpec>,
        amplitudes: Vec<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        shifts: Vec<ShiftSpec>,
    },
    Ellipsoid {
        blocks: Vec<BlockSpec>,
        amplitudes: Vec<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<usize>,
    },
    Matern(Matern),
    Lmc(LmcSpec),
}

impl KernelSpec {
    fn minecraft(
        blocks: &[BlockSpec],
        amplitudes: &[Vec<Vec<f64>>],
    ) -> Result<MinecraftSpectralModel> {
        MinecraftSpec {
            blocks: blocks.to_vec(),
            amplitudes: amplitudes.to_vec(),
        }
        .build()
    }

    fn gaussian_mosm(
        comps: &[GaussianSpec],
        amplitudes: &[Vec<f64>],
    ) -> Result<GaussianMoSpectralModel> {
        let comps = comps
            .iter()
            .map(|g| GaussianComponent::new(g.mean.clone(), g.std.clone()))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| config_err("components", e))?;
        let amps = matrix_from_rows(amplitudes).map_err(|e| config_err("amplitudes", e))?;
        GaussianMoSpectralModel::new(comps, amps).map_err(|e| config_err("amplitudes", e))
    }

    pub fn build(&self) -> Result<Box<dyn StationaryKernel>> {
        Ok(match self {
            KernelSpec::GaussianSm { components } => {
                let comps = components
                    .iter()
                    .map(|g| {
                        Ok((
                            g.weight,
                            GaussianComponent::new(g.mean.clone(), g.std.clone())?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| config_err("components", e))?;
                Box::new(GaussianSm::new(comps).map_err(|e| config_err("components", e))?)
            }
            KernelSpec::BlockSm { components } => {
                let comps = components
                    .iter()
                    .map(|b| {
                        Ok((
                            b.weight,
                            BlockComponent::new(b.center.clone(), b.width.clone())?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| config_err("components", e))?;
                Box::new(BlockSm::new(comps).map_err(|e| config_err("components", e))?)
            }
            KernelSpec::GaussianMosm {
                components,
                amplitudes,
            } => Box::new(GaussianMosm::new(Self::gaussian_mosm(
                components, amplitudes,
            )?)),
            KernelSpec::Minecraft {
                blocks,
                amplitudes,
                shifts,
            } => {
                let model = Self::minecraft(blocks, amplitudes)?;
                if shifts.is_empty() {
                    Box::new(MinecraftKernel::new(model))
                } else {
                    let shifts: Vec<PairShift> = shifts
                        .iter()
                        .map(|s| PairShift {
                            component: s.component,
                            i: s.i,
                            j: s.j,
                            delay: s.delay.clone(),
                            phase: s.phase,
                        })
                        .collect();
                    Box::new(
                        MinecraftKernel::with_shifts(model, &shifts)
                            .map_err(|e| config_err("shifts", e))?,
                    )
                }
            }
            KernelSpec::Ellipsoid {
                blocks,
                amplitudes,
                order,
            } => {
                let model = Self::minecraft(blocks, amplitudes)?;
                match order {
                    Some(n) => Box::new(
                        EllipsoidKernel::new(model, *n).map_err(|e| config_err("order", e))?,
                    ),
                    None => Box::new(EllipsoidKernel::with_default_order(model)),
                }
            }
            KernelSpec::Matern(m) => {
                m.validate().map_err(|e| config_err("lengthscale", e))?;
                Box::new(*m)
            }
            KernelSpec::Lmc(spec) => Box::new(spec.build()?),
        })
    }

    /// Real spectral matrix of the kernel, where one exists in closed form.
    pub fn spectral_model(&self) -> Result<Box<dyn SpectralModel>> {
        match self {
            KernelSpec::GaussianMosm {
                components,
                amplitudes,
            } => Ok(Box::new(Self::gaussian_mosm(components, amplitudes)?)),
            KernelSpec::Minecraft {
                blocks,
                amplitudes,
                shifts,
            } if shifts.is_empty() => Ok(Box::new(Self::minecraft(blocks, amplitudes)?)),
            KernelSpec::Lmc(spec) => Ok(Box::new(spec.build()?)),
            _ => Err(Error::Config {
                path: String::new(),
                field: "type".into(),
                message: "this kernel type has no real multi-output spectral matrix".into(),
            }),
        }
    }
}

/// Evenly spaced points `start..=stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl LinearGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::invalid(
                "grid needs finite bounds and at least one point",
            ));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let h = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| self.start + k as f64 * h)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceConfig {
    pub model: KernelSpec,
    pub frequencies: LinearGrid,
    #[serde(default = "default_pair")]
    pub channels: [usize; 2],
}

fn default_pair() -> [usize; 2] {
    [0, 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageGrid {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageDemoConfig {
    pub seed: u64,
    pub grid: ImageGrid,
    pub tiling: TilingSpec,
    pub target: LmcSpec,
    /// Gaussian std per axis as a multiple of the tile width.
    pub gaussian_std_scale: f64,
    /// Cells per axis of the L1 fitting grid.
    pub l1_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangepointDemoConfig {
    pub seed: u64,
    /// Single-output kernel shared by both regimes.
    pub kernel: KernelSpec,
    pub location: f64,
    pub steepness: f64,
    pub inputs: LinearGrid,
    pub samples: usize,
    /// Cross-regime coherence values for the multi-output mode.
    pub coherences: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesInput {
    pub path: PathBuf,
    #[serde(default = "default_time")]
    pub time_column: String,
    #[serde(default = "default_value")]
    pub value_column: String,
}

fn default_time() -> String {
    "time".into()
}

fn default_value() -> String {
    "value".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSeriesConfig {
    pub input: SeriesInput,
    pub fit: SeriesFitConfig,
}

/// Lags are given either explicitly or, for 1-D kernels, as a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LagSet {
    Grid(LinearGrid),
    Points(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelEvalConfig {
    pub kernel: KernelSpec,
    pub lags: LagSet,
}

impl LagSet {
    pub fn points(&self) -> Result<Vec<Vec<f64>>> {
        match self {
            LagSet::Grid(g) => Ok(g.values()?.into_iter().map(|r| vec![r]).collect()),
            LagSet::Points(p) => Ok(p.clone()),
        }
    }
}
