//! Spectral densities: symmetrised blocks, Gaussian mixtures, Matérn latents
//! and their multi-output combinations, plus the coherence diagnostic.
//!
//! Frequencies are in cycles per input unit throughout: a density `S` and its
//! kernel are related by `K(r) = int S(nu) exp(2 pi i nu.r) d nu`.

mod amplitudes;
mod block;
mod gaussian;
mod lmc;
mod matern;

use nalgebra::DMatrix;

pub use amplitudes::{AmplitudeMatrixSet, FACTOR_JITTER};
pub use block::{validate_nonoverlap, BlockBasis, BlockComponent, Overlap};
pub use gaussian::{GaussianComponent, GaussianMoSpectralModel, PerChannelGaussianModel};
pub use lmc::{
    matern_mass_by_quadrature, solve_mixing, upper_correlations, MixingTemplate, TargetSpectrumLmc,
};
pub use matern::{Matern, Smoothness};

use crate::error::{Error, Result};

/// Auto-spectra at or below this value make coherence undefined.
pub const COHERENCE_FLOOR: f64 = 1e-300;

/// A pointwise spectral-matrix provider.
pub trait SpectralModel: Send + Sync {
    fn num_channels(&self) -> usize;

    fn input_dim(&self) -> usize;

    /// The `N x N` (real, symmetric) spectral matrix at frequency `nu`.
    fn density(&self, nu: &[f64]) -> DMatrix<f64>;
}

impl<T: SpectralModel + ?Sized> SpectralModel for Box<T> {
    fn num_channels(&self) -> usize {
        (**self).num_channels()
    }

    fn input_dim(&self) -> usize {
        (**self).input_dim()
    }

    fn density(&self, nu: &[f64]) -> DMatrix<f64> {
        (**self).density(nu)
    }
}

/// Multi-output spectral model built from disjoint blocks with PSD amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct MinecraftSpectralModel {
    basis: BlockBasis,
    amplitudes: AmplitudeMatrixSet,
}

impl MinecraftSpectralModel {
    pub fn new(basis: BlockBasis, amplitudes: AmplitudeMatrixSet) -> Result<Self> {
        if basis.len() != amplitudes.len() {
            return Err(Error::invalid(format!(
                "{} blocks but {} amplitude matrices",
                basis.len(),
                amplitudes.len()
            )));
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> &BlockBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &AmplitudeMatrixSet {
        &self.amplitudes
    }

    pub fn channels(&self) -> usize {
        self.amplitudes.channels()
    }
}

impl SpectralModel for MinecraftSpectralModel {
    fn num_channels(&self) -> usize {
        self.amplitudes.channels()
    }

    fn input_dim(&self) -> usize {
        self.basis.dim()
    }

    fn density(&self, nu: &[f64]) -> DMatrix<f64> {
        let n = self.num_channels();
        // at most one block pair is active
        match self.basis.active_component(nu) {
            Some(q) => self.amplitudes.matrix(q) * self.basis.components()[q].pair_density(nu),
            None => DMatrix::zeros(n, n),
        }
    }
}

/// Coherence `S_ij / sqrt(S_ii S_jj)` at `nu`.
pub fn coherence<M: SpectralModel + ?Sized>(
    model: &M,
    i: usize,
    j: usize,
    nu: &[f64],
) -> Result<f64> {
    let s = model.density(nu);
    coherence_of(&s, i, j).ok_or_else(|| Error::UndefinedCoherence { nu: nu.to_vec() })
}

/// Coherence from an already evaluated spectral matrix.
pub fn coherence_of(s: &DMatrix<f64>, i: usize, j: usize) -> Option<f64> {
    let (a, b) = (s[(i, i)], s[(j, j)]);
    if a <= COHERENCE_FLOOR || b <= COHERENCE_FLOOR {
        return None;
    }
    Some(s[(i, j)] / (a * b).sqrt())
}
