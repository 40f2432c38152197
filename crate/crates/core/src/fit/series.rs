//! One-dimensional change-point model for time series. Each regime is an
//! output of a two-output spectral-mixture kernel, blended by a sigmoid:
//! `K(x, x') = sum_ab w_a(x) w_b(x') P_ab(x - x') + noise`, `w_0 = s`,
//! `w_1 = 1 - s`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::chol_with_jitter;
use crate::kernels::{
    sinc, sinc_derivative, ChangePointKernel, CrossRule, GaussianMosm, MinecraftKernel,
    StationaryKernel,
};
use crate::numerics::{logistic, softplus, softplus_grad, softplus_inv};
use crate::spectral::{
    AmplitudeMatrixSet, BlockBasis, BlockComponent, GaussianComponent, GaussianMoSpectralModel,
    MinecraftSpectralModel,
};

/// Added to the softplus noise so the Gram matrix stays well conditioned.
pub const NOISE_FLOOR: f64 = 1e-6;

/// Spectral family of the regime kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Block,
}

/// Constrained parameters of the two-regime spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum RegimeSpectrum {
    /// Contiguous bands from zero frequency; `factors[q] = [l11, l21, l22]`
    /// of the lower-triangular `L^q` with `A^q = L^q L^q^T`.
    Block {
        widths: Vec<f64>,
        factors: Vec<[f64; 3]>,
    },
    /// Shared Gaussian components with per-regime amplitudes and
    /// geometric-mean cross terms.
    Gaussian {
        means: Vec<f64>,
        stds: Vec<f64>,
        amplitudes: Vec<[f64; 2]>,
    },
}

/// All constrained parameters of the change-point model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub spectrum: RegimeSpectrum,
    pub location: f64,
    pub steepness: f64,
    pub noise: f64,
}

/// Which parameter groups stay at their initial values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Freeze {
    #[serde(default)]
    pub layout: bool,
    #[serde(default)]
    pub location: bool,
    #[serde(default)]
    pub noise: bool,
}

pub fn num_params(q: usize) -> usize {
    4 * q + 3
}

impl SeriesParams {
    pub fn family(&self) -> Family {
        match self.spectrum {
            RegimeSpectrum::Block { .. } => Family::Block,
            RegimeSpectrum::Gaussian { .. } => Family::Gaussian,
        }
    }

    pub fn components(&self) -> usize {
        match &self.spectrum {
            RegimeSpectrum::Block { widths, .. } => widths.len(),
            RegimeSpectrum::Gaussian { means, .. } => means.len(),
        }
    }

    /// Band centres of the block family (`edges` start at zero).
    pub fn block_centers(widths: &[f64]) -> Vec<f64> {
        let mut edge = 0.0;
        widths
            .iter()
            .map(|w| {
                let c = edge + 0.5 * w;
                edge += w;
                c
            })
            .collect()
    }

    pub fn to_unconstrained(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(num_params(self.components()));
        match &self.spectrum {
            RegimeSpectrum::Block { widths, factors } => {
                out.extend(widths.iter().map(|&w| softplus_inv(w)));
                for f in factors {
                    out.extend_from_slice(f);
                }
            }
            RegimeSpectrum::Gaussian {
                means,
                stds,
                amplitudes,
            } => {
                out.extend(means.iter().map(|&m| softplus_inv(m)));
                out.extend(stds.iter().map(|&s| softplus_inv(s)));
                for a in amplitudes {
                    out.push(softplus_inv(a[0]));
                    out.push(softplus_inv(a[1]));
                }
            }
        }
        out.push(self.location);
        out.push(softplus_inv(self.steepness));
        out.push(softplus_inv(self.noise - NOISE_FLOOR));
        out
    }

    pub fn from_unconstrained(family: Family, q: usize, theta: &[f64]) -> Result<Self> {
        if theta.len() != num_params(q) {
            return Err(Error::invalid(format!(
                "expected {} parameters for {q} components, got {}",
                num_params(q),
                theta.len()
            )));
        }
        let spectrum = match family {
            Family::Block => RegimeSpectrum::Block {
                widths: theta[..q].iter().map(|&u| softplus(u)).collect(),
                factors: (0..q)
                    .map(|k| {
                        let b = q + 3 * k;
                        [theta[b], theta[b + 1], theta[b + 2]]
                    })
                    .collect(),
            },
            Family::Gaussian => RegimeSpectrum::Gaussian {
                means: theta[..q].iter().map(|&u| softplus(u)).collect(),
                stds: theta[q..2 * q].iter().map(|&u| softplus(u)).collect(),
                amplitudes: (0..q)
                    .map(|k| {
                        [
                            softplus(theta[2 * q + 2 * k]),
                            softplus(theta[2 * q + 2 * k + 1]),
                        ]
                    })
                    .collect(),
            },
        };
        let tail = &theta[4 * q..];
        Ok(Self {
            spectrum,
            location: tail[0],
            steepness: softplus(tail[1]),
            noise: softplus(tail[2]) + NOISE_FLOOR,
        })
    }

    /// `true` for coordinates the optimiser may move.
    pub fn free_mask(family: Family, q: usize, freeze: Freeze) -> Vec<bool> {
        let mut mask = vec![true; num_params(q)];
        if freeze.layout {
            let layout = match family {
                Family::Block => 0..q,
                Family::Gaussian => 0..2 * q,
            };
            for k in layout {
                mask[k] = false;
            }
        }
        if freeze.location {
            mask[4 * q] = false;
        }
        if freeze.noise {
            mask[4 * q + 2] = false;
        }
        mask
    }

    /// The two-output regime kernel `P`.
    pub fn regime_kernel(&self) -> Result<Box<dyn StationaryKernel>> {
        match &self.spectrum {
            RegimeSpectrum::Block { widths, factors } => {
                let centers = Self::block_centers(widths);
                let comps = centers
                    .iter()
                    .zip(widths)
                    .map(|(&c, &w)| BlockComponent::new(vec![c], vec![w]))
                    .collect::<Result<Vec<_>>>()?;
                let basis = BlockBasis::new(comps)?;
                let l = factors
                    .iter()
                    .map(|f| DMatrix::from_row_slice(2, 2, &[f[0], 0.0, f[1], f[2]]))
                    .collect();
                let amps = AmplitudeMatrixSet::from_factors(l)?;
                Ok(Box::new(MinecraftKernel::new(MinecraftSpectralModel::new(
                    basis, amps,
                )?)))
            }
            RegimeSpectrum::Gaussian {
                means,
                stds,
                amplitudes,
            } => {
                let comps = means
                    .iter()
                    .zip(stds)
                    .map(|(&m, &s)| GaussianComponent::new(vec![m], vec![s]))
                    .collect::<Result<Vec<_>>>()?;
                let amps = DMatrix::from_fn(amplitudes.len(), 2, |q, a| amplitudes[q][a]);
                Ok(Box::new(GaussianMosm::new(GaussianMoSpectralModel::new(
                    comps, amps,
                )?)))
            }
        }
    }

    /// Noise-free change-point covariance.
    pub fn kernel(&self) -> Result<ChangePointKernel> {
        ChangePointKernel::new(
            self.regime_kernel()?,
            CrossRule::MultiOutput,
            self.location,
            self.steepness,
        )
    }
}

/// Ranges for random initialisation. Log-uniform unless noted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitSampler {
    /// Upper band edge (block) or frequency span (Gaussian).
    pub max_frequency: [f64; 2],
    /// Total per-regime variance.
    pub variance: [f64; 2],
    pub steepness: [f64; 2],
    pub noise: [f64; 2],
    /// Uniform range for the change-point location.
    pub location: [f64; 2],
}

impl Default for InitSampler {
    fn default() -> Self {
        Self {
            max_frequency: [1.0, 40.0],
            variance: [0.3, 1.5],
            steepness: [5.0, 100.0],
            noise: [1e-3, 0.2],
            location: [0.1, 0.9],
        }
    }
}

impl InitSampler {
    pub fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("max_frequency", self.max_frequency),
            ("variance", self.variance),
            ("steepness", self.steepness),
            ("noise", self.noise),
        ] {
            if !(r[0] > 0.0 && r[1] >= r[0] && r[1].is_finite()) {
                return Err(Error::invalid(format!(
                    "init range `{name}` must satisfy 0 < lo <= hi"
                )));
            }
        }
        if !(self.location[1] >= self.location[0] && self.location.iter().all(|v| v.is_finite())) {
            return Err(Error::invalid(
                "init range `location` must satisfy lo <= hi",
            ));
        }
        Ok(())
    }

    fn log_uniform<R: Rng>(rng: &mut R, r: [f64; 2]) -> f64 {
        let u: f64 = Uniform::new_inclusive(r[0].ln(), r[1].ln())
            .unwrap()
            .sample(rng);
        u.exp()
    }

    fn uniform<R: Rng>(rng: &mut R, r: [f64; 2]) -> f64 {
        Uniform::new_inclusive(r[0], r[1]).unwrap().sample(rng)
    }

    pub fn sample<R: Rng>(&self, family: Family, q: usize, rng: &mut R) -> SeriesParams {
        let top = Self::log_uniform(rng, self.max_frequency);
        let var = [
            Self::log_uniform(rng, self.variance),
            Self::log_uniform(rng, self.variance),
        ];
        // random proportions over components
        let mut share: Vec<f64> = (0..q).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = share.iter().sum();
        share.iter_mut().for_each(|s| *s /= total);
        let spectrum = match family {
            Family::Block => {
                let mut cut: Vec<f64> = (0..q).map(|_| Exp1.sample(rng)).collect();
                let sum: f64 = cut.iter().sum();
                cut.iter_mut().for_each(|c| *c *= top / sum);
                let factors = share
                    .iter()
                    .map(|&p| {
                        let rho: f64 = Self::uniform(rng, [-0.95, 0.95]);
                        let (a0, a1) = ((var[0] * p).sqrt(), (var[1] * p).sqrt());
                        [a0, rho * a1, (1.0 - rho * rho).sqrt() * a1]
                    })
                    .collect();
                RegimeSpectrum::Block {
                    widths: cut,
                    factors,
                }
            }
            Family::Gaussian => {
                let means = (0..q)
                    .map(|_| Self::uniform(rng, [0.0, top]).max(1e-6))
                    .collect();
                let stds = (0..q)
                    .map(|_| top / q as f64 * Self::log_uniform(rng, [0.05, 1.0]))
                    .collect();
                let amplitudes = share
                    .iter()
                    .map(|&p| {
                        let jitter: f64 = Self::log_uniform(rng, [0.2, 1.0]);
                        [var[0] * p * jitter, var[1] * p / jitter]
                    })
                    .collect();
                RegimeSpectrum::Gaussian {
                    means,
                    stds,
                    amplitudes,
                }
            }
        };
        SeriesParams {
            spectrum,
            location: Self::uniform(rng, self.location),
            steepness: Self::log_uniform(rng, self.steepness),
            noise: Self::log_uniform(rng, self.noise) + NOISE_FLOOR,
        }
    }
}

/// Negative log marginal likelihood of the change-point model on 1-D data.
#[derive(Debug, Clone)]
pub struct SeriesObjective {
    pub family: Family,
    pub components: usize,
    x: Vec<f64>,
    y: DVector<f64>,
}

/// Regime cross-kernel values `P_00, P_01, P_11` at one lag.
fn regime_values(p: &SeriesParams, r: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    match &p.spectrum {
        RegimeSpectrum::Block { widths, factors } => {
            let centers = SeriesParams::block_centers(widths);
            for ((&w, &m), f) in widths.iter().zip(&centers).zip(factors) {
                let base = (2.0 * PI * m * r).cos() * sinc(r * w);
                let a = block_amplitudes(f);
                for k in 0..3 {
                    out[k] += a[k] * base;
                }
            }
        }
        RegimeSpectrum::Gaussian {
            means,
            stds,
            amplitudes,
        } => {
            for ((&m, &s), a) in means.iter().zip(stds).zip(amplitudes) {
                let base = (-2.0 * PI * PI * s * s * r * r).exp() * (2.0 * PI * m * r).cos();
                let c = [a[0], (a[0] * a[1]).sqrt(), a[1]];
                for k in 0..3 {
                    out[k] += c[k] * base;
                }
            }
        }
    }
    out
}

fn block_amplitudes(f: &[f64; 3]) -> [f64; 3] {
    [f[0] * f[0], f[0] * f[1], f[1] * f[1] + f[2] * f[2]]
}

/// Mixing weights `G_00, G_01 (both cross orders), G_11` of a pair.
fn pair_weights(sm: f64, sn: f64) -> [f64; 3] {
    [
        sm * sn,
        sm * (1.0 - sn) + (1.0 - sm) * sn,
        (1.0 - sm) * (1.0 - sn),
    ]
}

impl SeriesObjective {
    pub fn new(family: Family, components: usize, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::invalid(
                "objective needs equal-length, non-empty data",
            ));
        }
        if components == 0 {
            return Err(Error::invalid("need at least one component"));
        }
        Ok(Self {
            family,
            components,
            x,
            y: DVector::from_vec(y),
        })
    }

    pub fn num_params(&self) -> usize {
        num_params(self.components)
    }

    fn params(&self, theta: &[f64]) -> Option<SeriesParams> {
        if theta.iter().any(|v| !v.is_finite()) {
            return None;
        }
        SeriesParams::from_unconstrained(self.family, self.components, theta).ok()
    }

    fn sigmoids(&self, p: &SeriesParams) -> Vec<f64> {
        self.x
            .iter()
            .map(|&x| logistic((x - p.location) * p.steepness))
            .collect()
    }

    /// Noisy Gram matrix.
    pub fn gram(&self, p: &SeriesParams) -> DMatrix<f64> {
        let n = self.x.len();
        let s = self.sigmoids(p);
        let mut k = DMatrix::zeros(n, n);
        for m in 0..n {
            for j in 0..=m {
                let pv = regime_values(p, self.x[m] - self.x[j]);
                let g = pair_weights(s[m], s[j]);
                let v = g[0] * pv[0] + g[1] * pv[1] + g[2] * pv[2];
                k[(m, j)] = v;
                k[(j, m)] = v;
            }
            k[(m, m)] += p.noise;
        }
        k
    }

    /// Objective only; `+inf` when the parameters are unusable.
    pub fn value(&self, theta: &[f64]) -> f64 {
        let Some(p) = self.params(theta) else {
            return f64::INFINITY;
        };
        let Ok(chol) = chol_with_jitter(&self.gram(&p)) else {
            return f64::INFINITY;
        };
        let alpha = chol.factor.solve(&self.y);
        let v = 0.5 * self.y.dot(&alpha)
            + 0.5 * chol.log_det()
            + 0.5 * self.y.len() as f64 * (2.0 * PI).ln();
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    }

    /// Objective and analytic gradient with respect to the unconstrained
    /// parameters; `(+inf, 0)` when the Gram matrix cannot be factorised.
    pub fn value_and_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let failed = (f64::INFINITY, vec![0.0; theta.len()]);
        let Some(p) = self.params(theta) else {
            return failed;
        };
        let Ok(chol) = chol_with_jitter(&self.gram(&p)) else {
            return failed;
        };
        let n = self.x.len();
        let alpha = chol.factor.solve(&self.y);
        let value =
            0.5 * self.y.dot(&alpha) + 0.5 * chol.log_det() + 0.5 * n as f64 * (2.0 * PI).ln();
        if !value.is_finite() {
            return failed;
        }
        // d value / d K = -1/2 (alpha alpha^T - K^-1)
        let kinv = chol.factor.inverse();
        let q = self.components;
        let s = self.sigmoids(&p);
        let ds = |m: usize| s[m] * (1.0 - s[m]);

        let mut g_layout_a = vec![0.0; q]; // d/d mean
        let mut g_layout_b = vec![0.0; q]; // d/d width or std
        let mut g_amp = vec![[0.0; 3]; q]; // d/d (C00, C01, C11)
        let (mut g_loc, mut g_steep, mut g_noise) = (0.0, 0.0, 0.0);

        for m in 0..n {
            for j in 0..=m {
                let w = alpha[m] * alpha[j] - kinv[(m, j)];
                let coef = if m == j { -0.5 * w } else { -w };
                if coef == 0.0 {
                    continue;
                }
                let r = self.x[m] - self.x[j];
                let g = pair_weights(s[m], s[j]);
                let mut pv = [0.0; 3];
                match &p.spectrum {
                    RegimeSpectrum::Block { widths, factors } => {
                        let centers = SeriesParams::block_centers(widths);
                        for k in 0..q {
                            let (wk, mk) = (widths[k], centers[k]);
                            let arg = 2.0 * PI * mk * r;
                            let (c, sn) = (arg.cos(), arg.sin());
                            let (sc, dsc) = (sinc(r * wk), sinc_derivative(r * wk));
                            let a = block_amplitudes(&factors[k]);
                            let e = g[0] * a[0] + g[1] * a[1] + g[2] * a[2];
                            g_layout_a[k] += coef * e * (-2.0 * PI * r * sn * sc);
                            g_layout_b[k] += coef * e * c * dsc * r;
                            let base = c * sc;
                            for t in 0..3 {
                                g_amp[k][t] += coef * g[t] * base;
                                pv[t] += a[t] * base;
                            }
                        }
                    }
                    RegimeSpectrum::Gaussian {
                        means,
                        stds,
                        amplitudes,
                    } => {
                        for k in 0..q {
                            let (mk, sk) = (means[k], stds[k]);
                            let env = (-2.0 * PI * PI * sk * sk * r * r).exp();
                            let arg = 2.0 * PI * mk * r;
                            let (c, sn) = (arg.cos(), arg.sin());
                            let a = amplitudes[k];
                            let cc = [a[0], (a[0] * a[1]).sqrt(), a[1]];
                            let e = g[0] * cc[0] + g[1] * cc[1] + g[2] * cc[2];
                            g_layout_a[k] += coef * e * (-2.0 * PI * r * sn * env);
                            g_layout_b[k] += coef * e * c * env * (-4.0 * PI * PI * sk * r * r);
                            let base = c * env;
                            for t in 0..3 {
                                g_amp[k][t] += coef * g[t] * base;
                                pv[t] += cc[t] * base;
                            }
                        }
                    }
                }
                // dK/ds_m and dK/ds_j with P_01 = P_10
                let dk_dsm = s[j] * (pv[0] - pv[1]) + (1.0 - s[j]) * (pv[1] - pv[2]);
                let dk_dsj = s[m] * (pv[0] - pv[1]) + (1.0 - s[m]) * (pv[1] - pv[2]);
                let (um, uj) = (self.x[m] - p.location, self.x[j] - p.location);
                g_loc += coef * (dk_dsm * (-p.steepness) * ds(m) + dk_dsj * (-p.steepness) * ds(j));
                g_steep += coef * (dk_dsm * um * ds(m) + dk_dsj * uj * ds(j));
                if m == j {
                    g_noise += coef;
                }
            }
        }

        let mut grad = vec![0.0; theta.len()];
        match &p.spectrum {
            RegimeSpectrum::Block { factors, .. } => {
                // mu_k = sum_{m<k} w_m + w_k / 2
                let mut suffix = 0.0;
                for k in (0..q).rev() {
                    let dw = g_layout_b[k] + 0.5 * g_layout_a[k] + suffix;
                    suffix += g_layout_a[k];
                    grad[k] = dw * softplus_grad(theta[k]);
                }
                for k in 0..q {
                    let f = factors[k];
                    let ga = g_amp[k];
                    let b = q + 3 * k;
                    grad[b] = ga[0] * 2.0 * f[0] + ga[1] * f[1];
                    grad[b + 1] = ga[1] * f[0] + ga[2] * 2.0 * f[1];
                    grad[b + 2] = ga[2] * 2.0 * f[2];
                }
            }
            RegimeSpectrum::Gaussian { amplitudes, .. } => {
                for k in 0..q {
                    grad[k] = g_layout_a[k] * softplus_grad(theta[k]);
                    grad[q + k] = g_layout_b[k] * softplus_grad(theta[q + k]);
                    let a = amplitudes[k];
                    let ga = g_amp[k];
                    let geo = (a[0] * a[1]).sqrt();
                    let (d0, d1) = if geo > 0.0 {
                        (0.5 * a[1] / geo, 0.5 * a[0] / geo)
                    } else {
                        (0.0, 0.0)
                    };
                    let b = 2 * q + 2 * k;
                    grad[b] = (ga[0] + ga[1] * d0) * softplus_grad(theta[b]);
                    grad[b + 1] = (ga[2] + ga[1] * d1) * softplus_grad(theta[b + 1]);
                }
            }
        }
        let t = 4 * q;
        grad[t] = g_loc;
        grad[t + 1] = g_steep * softplus_grad(theta[t + 1]);
        grad[t + 2] = g_noise * softplus_grad(theta[t + 2]);
        if grad.iter().any(|v| !v.is_finite()) {
            return failed;
        }
        (value, grad)
    }
}

/// Central differences with step `1e-5 * max(1, |theta_k|)`.
pub fn finite_difference_gradient(f: impl Fn(&[f64]) -> f64, theta: &[f64]) -> Vec<f64> {
    let mut x = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            let h = 1e-5 * theta[k].abs().max(1.0);
            x[k] = theta[k] + h;
            let up = f(&x);
            x[k] = theta[k] - h;
            let dn = f(&x);
            x[k] = theta[k];
            (up - dn) / (2.0 * h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{gram, InputPoint};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn data() -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..25).map(|k| k as f64 / 24.0).collect();
        let y = x
            .iter()
            .map(|t| {
                (7.0 * t).sin()
                    + if *t > 0.5 {
                        0.5 * (20.0 * t).cos()
                    } else {
                        0.0
                    }
            })
            .collect();
        (x, y)
    }

    #[test]
    fn unconstrained_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for family in [Family::Block, Family::Gaussian] {
            let p = InitSampler::default().sample(family, 4, &mut rng);
            let back = SeriesParams::from_unconstrained(family, 4, &p.to_unconstrained()).unwrap();
            let (a, b) = (p.to_unconstrained(), back.to_unconstrained());
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn direct_gram_matches_kernel_objects() {
        let (x, y) = data();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for family in [Family::Block, Family::Gaussian] {
            let p = InitSampler::default().sample(family, 3, &mut rng);
            let obj = SeriesObjective::new(family, 3, x.clone(), y.clone()).unwrap();
            let mut direct = obj.gram(&p);
            for k in 0..x.len() {
                direct[(k, k)] -= p.noise;
            }
            let pts: Vec<_> = x.iter().map(|&t| InputPoint::scalar(t, 0)).collect();
            let reference = gram(&p.kernel().unwrap(), &pts);
            assert!((direct - reference).amax() < 1e-12);
        }
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let (x, y) = data();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for family in [Family::Block, Family::Gaussian] {
            let obj = SeriesObjective::new(family, 3, x.clone(), y.clone()).unwrap();
            let theta = InitSampler::default()
                .sample(family, 3, &mut rng)
                .to_unconstrained();
            let (_, g) = obj.value_and_gradient(&theta);
            let fd = finite_difference_gradient(|t| obj.value(t), &theta);
            for (a, b) in g.iter().zip(&fd) {
                assert!(
                    (a - b).abs() <= 1e-4 * a.abs().max(b.abs()).max(1.0),
                    "{family:?}: {a} vs {b}"
                );
            }
        }
    }
}
