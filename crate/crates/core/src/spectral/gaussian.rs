use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SpectralModel;
use crate::error::{Error, Result};

/// Axis-aligned Gaussian spectral component `N(nu | mean, diag(std^2))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl GaussianComponent {
    pub fn new(mean: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        if mean.is_empty() || mean.len() != std.len() {
            return Err(Error::invalid(
                "gaussian mean and std must share a non-zero length",
            ));
        }
        if std.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::invalid("gaussian std must be finite and > 0"));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("gaussian mean must be finite"));
        }
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    /// Density of the Gaussian centred on `sign * mean`.
    pub fn density(&self, sign: f64, nu: &[f64]) -> f64 {
        let mut log = 0.0;
        let mut norm = 1.0;
        for ((n, m), s) in nu.iter().zip(&self.mean).zip(&self.std) {
            let z = (n - sign * m) / s;
            log -= 0.5 * z * z;
            norm *= (2.0 * std::f64::consts::PI).sqrt() * s;
        }
        log.exp() / norm
    }

    /// `0.5 * [G(nu, mu, sigma) + G(-nu, mu, sigma)]`.
    pub fn pair_density(&self, nu: &[f64]) -> f64 {
        0.5 * (self.density(1.0, nu) + self.density(-1.0, nu))
    }
}

/// Multi-output Gaussian spectral mixture with components shared by all
/// channels, per-channel amplitudes, and geometric-mean cross amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMoSpectralModel {
    components: Vec<GaussianComponent>,
    /// Q x N, non-negative.
    amplitudes: DMatrix<f64>,
    /// N x N, entries in {+1, -1}, unit diagonal.
    cross_sign: DMatrix<f64>,
}

impl GaussianMoSpectralModel {
    pub fn new(components: Vec<GaussianComponent>, amplitudes: DMatrix<f64>) -> Result<Self> {
        let n = amplitudes.ncols();
        Self::with_signs(components, amplitudes, DMatrix::from_element(n, n, 1.0))
    }

    pub fn with_signs(
        components: Vec<GaussianComponent>,
        amplitudes: DMatrix<f64>,
        cross_sign: DMatrix<f64>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid(
                "gaussian model needs at least one component",
            ));
        }
        let dim = components[0].dim();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::invalid("gaussian components differ in dimension"));
        }
        if amplitudes.nrows() != components.len() || amplitudes.ncols() == 0 {
            return Err(Error::invalid(format!(
                "amplitudes must be {}xN, got {}x{}",
                components.len(),
                amplitudes.nrows(),
                amplitudes.ncols()
            )));
        }
        if amplitudes.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::invalid("channel amplitudes must be finite and >= 0"));
        }
        let n = amplitudes.ncols();
        if cross_sign.nrows() != n || cross_sign.ncols() != n {
            return Err(Error::invalid("cross_sign must be N x N"));
        }
        // consistent signs s_ij = s_i s_j keep every component matrix PSD
        for i in 0..n {
            for j in 0..n {
                let s = cross_sign[(i, j)];
                if s != 1.0 && s != -1.0 {
                    return Err(Error::invalid("cross_sign entries must be +1 or -1"));
                }
                if s != cross_sign[(j, i)] || (i == j && s != 1.0) {
                    return Err(Error::invalid(
                        "cross_sign must be symmetric with unit diagonal",
                    ));
                }
                if s != cross_sign[(0, i)] * cross_sign[(0, j)] {
                    return Err(Error::invalid(
                        "cross_sign must factor as s_i * s_j to keep the model PSD",
                    ));
                }
            }
        }
        Ok(Self {
            components,
            amplitudes,
            cross_sign,
        })
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn amplitudes(&self) -> &DMatrix<f64> {
        &self.amplitudes
    }

    pub fn cross_sign(&self) -> &DMatrix<f64> {
        &self.cross_sign
    }

    /// `sign_ij * sqrt(A_i^q A_j^q)`.
    pub fn cross_amplitude(&self, q: usize, i: usize, j: usize) -> f64 {
        if i == j {
            return self.amplitudes[(q, i)];
        }
        self.cross_sign[(i, j)] * (self.amplitudes[(q, i)] * self.amplitudes[(q, j)]).sqrt()
    }
}

impl SpectralModel for GaussianMoSpectralModel {
    fn num_channels(&self) -> usize {
        self.amplitudes.ncols()
    }

    fn input_dim(&self) -> usize {
        self.components[0].dim()
    }

    fn density(&self, nu: &[f64]) -> DMatrix<f64> {
        let n = self.num_channels();
        let mut s = DMatrix::zeros(n, n);
        for (q, c) in self.components.iter().enumerate() {
            let g = c.pair_density(nu);
            for i in 0..n {
                for j in 0..=i {
                    let v = self.cross_amplitude(q, i, j) * g;
                    s[(i, j)] += v;
                    if i != j {
                        s[(j, i)] += v;
                    }
                }
            }
        }
        s
    }
}

/// Multi-output Gaussian mixture where each channel has its own component
/// means and widths. The cross-spectrum pairs component `q` of channel `a`
/// with component `q` of channel `b` through the geometric mean of the two
/// half-densities, separately on the positive and negative frequency side.
#[derive(Debug, Clone, PartialEq)]
pub struct PerChannelGaussianModel {
    /// `channels[a][q] = (amplitude, component)`.
    channels: Vec<Vec<(f64, GaussianComponent)>>,
}

impl PerChannelGaussianModel {
    pub fn new(channels: Vec<Vec<(f64, GaussianComponent)>>) -> Result<Self> {
        let q = channels.first().map(Vec::len).unwrap_or(0);
        if q == 0 {
            return Err(Error::invalid("per-channel model needs components"));
        }
        if channels.iter().any(|c| c.len() != q) {
            return Err(Error::invalid(
                "every channel needs the same number of components",
            ));
        }
        let dim = channels[0][0].1.dim();
        for ch in &channels {
            for (a, c) in ch {
                if !(a.is_finite() && *a >= 0.0) {
                    return Err(Error::invalid("amplitudes must be finite and >= 0"));
                }
                if c.dim() != dim {
                    return Err(Error::invalid("components differ in dimension"));
                }
            }
        }
        Ok(Self { channels })
    }

    pub fn channels(&self) -> &[Vec<(f64, GaussianComponent)>] {
        &self.channels
    }
}

impl SpectralModel for PerChannelGaussianModel {
    fn num_channels(&self) -> usize {
        self.channels.len()
    }

    fn input_dim(&self) -> usize {
        self.channels[0][0].1.dim()
    }

    fn density(&self, nu: &[f64]) -> DMatrix<f64> {
        let n = self.num_channels();
        let q = self.channels[0].len();
        // half-density terms C^{+-}_{aq} = A_aq / 2 * G^{+-}_{aq}
        let mut plus = DMatrix::zeros(n, q);
        let mut minus = DMatrix::zeros(n, q);
        for (a, ch) in self.channels.iter().enumerate() {
            for (k, (amp, c)) in ch.iter().enumerate() {
                plus[(a, k)] = 0.5 * amp * c.density(1.0, nu);
                minus[(a, k)] = 0.5 * amp * c.density(-1.0, nu);
            }
        }
        DMatrix::from_fn(n, n, |a, b| {
            (0..q)
                .map(|k| {
                    if a == b {
                        plus[(a, k)] + minus[(a, k)]
                    } else {
                        (plus[(a, k)] * plus[(b, k)]).sqrt()
                            + (minus[(a, k)] * minus[(b, k)]).sqrt()
                    }
                })
                .sum()
        })
    }
}
