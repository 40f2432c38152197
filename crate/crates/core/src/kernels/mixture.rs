use std::f64::consts::PI;

use super::{sinc, StationaryKernel};
use crate::error::{Error, Result};
use crate::spectral::{BlockComponent, GaussianComponent, GaussianMoSpectralModel, SpectralModel};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `exp(-2 pi^2 r^T Sigma r) cos(2 pi r^T mu)` for one Gaussian pair.
fn gaussian_term(c: &GaussianComponent, lag: &[f64]) -> f64 {
    let quad: f64 = lag.iter().zip(c.std()).map(|(r, s)| r * r * s * s).sum();
    (-2.0 * PI * PI * quad).exp() * (2.0 * PI * dot(lag, c.mean())).cos()
}

/// `cos(2 pi r^T mu) prod_d sinc(r_d w_d)` for one block pair.
pub(crate) fn block_term(c: &BlockComponent, lag: &[f64]) -> f64 {
    let envelope: f64 = lag
        .iter()
        .zip(c.width())
        .map(|(r, w)| sinc(r * w))
        .product();
    envelope * (2.0 * PI * dot(lag, c.center())).cos()
}

/// Single-output Gaussian spectral mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSm {
    components: Vec<(f64, GaussianComponent)>,
}

impl GaussianSm {
    pub fn new(components: Vec<(f64, GaussianComponent)>) -> Result<Self> {
        check_components(components.iter().map(|(a, c)| (*a, c.dim())))?;
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, GaussianComponent)] {
        &self.components
    }

    pub fn density(&self, nu: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|(a, c)| a * c.pair_density(nu))
            .sum()
    }
}

impl StationaryKernel for GaussianSm {
    fn num_outputs(&self) -> usize {
        1
    }

    fn input_dim(&self) -> usize {
        self.components[0].1.dim()
    }

    fn eval(&self, _i: usize, _j: usize, lag: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|(a, c)| a * gaussian_term(c, lag))
            .sum()
    }
}

/// Single-output block spectral mixture (sinc kernel).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSm {
    components: Vec<(f64, BlockComponent)>,
}

impl BlockSm {
    pub fn new(components: Vec<(f64, BlockComponent)>) -> Result<Self> {
        check_components(components.iter().map(|(a, c)| (*a, c.dim())))?;
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, BlockComponent)] {
        &self.components
    }

    pub fn density(&self, nu: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|(a, c)| a * c.pair_density(nu))
            .sum()
    }
}

impl StationaryKernel for BlockSm {
    fn num_outputs(&self) -> usize {
        1
    }

    fn input_dim(&self) -> usize {
        self.components[0].1.dim()
    }

    fn eval(&self, _i: usize, _j: usize, lag: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|(a, c)| a * block_term(c, lag))
            .sum()
    }
}

fn check_components(items: impl Iterator<Item = (f64, usize)>) -> Result<()> {
    let mut dim = None;
    for (a, d) in items {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::invalid("mixture amplitudes must be finite and >= 0"));
        }
        if *dim.get_or_insert(d) != d {
            return Err(Error::invalid("mixture components differ in dimension"));
        }
    }
    if dim.is_none() {
        return Err(Error::invalid("mixture needs at least one component"));
    }
    Ok(())
}

/// Multi-output Gaussian spectral mixture with geometric-mean cross terms.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMosm {
    model: GaussianMoSpectralModel,
}

impl GaussianMosm {
    pub fn new(model: GaussianMoSpectralModel) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &GaussianMoSpectralModel {
        &self.model
    }
}

impl StationaryKernel for GaussianMosm {
    fn num_outputs(&self) -> usize {
        self.model.num_channels()
    }

    fn input_dim(&self) -> usize {
        self.model.input_dim()
    }

    fn eval(&self, i: usize, j: usize, lag: &[f64]) -> f64 {
        self.model
            .components()
            .iter()
            .enumerate()
            .map(|(q, c)| {
                let a = self.model.cross_amplitude(q, i, j);
                if a == 0.0 {
                    0.0
                } else {
                    a * gaussian_term(c, lag)
                }
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_sm_at_zero_is_total_amplitude() {
        let k = GaussianSm::new(vec![
            (0.7, GaussianComponent::new(vec![0.3], vec![0.1]).unwrap()),
            (1.1, GaussianComponent::new(vec![1.2], vec![0.4]).unwrap()),
        ])
        .unwrap();
        assert!((k.eval(0, 0, &[0.0]) - 1.8).abs() < 1e-15);
    }

    #[test]
    fn dc_gaussian_is_monotone() {
        let k = GaussianSm::new(vec![(
            2.0,
            GaussianComponent::new(vec![0.0], vec![0.3]).unwrap(),
        )])
        .unwrap();
        let mut prev = f64::INFINITY;
        for n in 0..40 {
            let r = 0.1 * n as f64;
            let v = k.eval(0, 0, &[r]);
            assert!((v - 2.0 * (-2.0 * PI * PI * 0.09 * r * r).exp()).abs() < 1e-15);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn unit_dc_block_is_sinc() {
        let k = BlockSm::new(vec![(
            1.0,
            BlockComponent::new(vec![0.0], vec![1.0]).unwrap(),
        )])
        .unwrap();
        assert_eq!(k.eval(0, 0, &[0.0]), 1.0);
        assert!(k.eval(0, 0, &[1.0]).abs() < 1e-15);
        assert!((k.eval(0, 0, &[0.37]) - sinc(0.37)).abs() < 1e-15);
    }

    #[test]
    fn mosm_with_proportional_amplitudes_has_full_correlation() {
        let comps = vec![
            GaussianComponent::new(vec![0.5], vec![0.2]).unwrap(),
            GaussianComponent::new(vec![1.5], vec![0.1]).unwrap(),
        ];
        let amps = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 4.0, 0.5, 2.0]);
        let k = GaussianMosm::new(GaussianMoSpectralModel::new(comps, amps).unwrap());
        let c = k.eval(0, 1, &[0.0]) / (k.eval(0, 0, &[0.0]) * k.eval(1, 1, &[0.0])).sqrt();
        assert!((c - 1.0).abs() < 1e-12);
    }
}
