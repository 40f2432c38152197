use nalgebra::DMatrix;

use super::StationaryKernel;
use crate::error::{Error, Result};
use crate::spectral::{Matern, SpectralModel, TargetSpectrumLmc};

fn norm(lag: &[f64]) -> f64 {
    lag.iter().map(|r| r * r).sum::<f64>().sqrt()
}

impl StationaryKernel for Matern {
    fn num_outputs(&self) -> usize {
        1
    }

    fn input_dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _i: usize, _j: usize, lag: &[f64]) -> f64 {
        self.covariance(norm(lag))
    }
}

/// `K_ij(r) = sum_k W_ik W_jk k_k(r)`.
impl StationaryKernel for TargetSpectrumLmc {
    fn num_outputs(&self) -> usize {
        self.num_channels()
    }

    fn input_dim(&self) -> usize {
        SpectralModel::input_dim(self)
    }

    fn eval(&self, i: usize, j: usize, lag: &[f64]) -> f64 {
        let d = norm(lag);
        let w = self.mixing();
        self.latents()
            .iter()
            .enumerate()
            .map(|(k, l)| w[(i, k)] * w[(j, k)] * l.covariance(d))
            .sum()
    }
}

/// Intrinsic coregionalisation `K_ij(r) = B_ij k(r)` of a single-output
/// kernel with a PSD output covariance `B`.
pub struct Coregional {
    base: Box<dyn StationaryKernel>,
    outputs: DMatrix<f64>,
}

impl std::fmt::Debug for Coregional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Coregional")
            .field("outputs", &self.outputs)
            .finish_non_exhaustive()
    }
}

impl Coregional {
    pub fn new(base: Box<dyn StationaryKernel>, outputs: DMatrix<f64>) -> Result<Self> {
        if base.num_outputs() != 1 {
            return Err(Error::invalid(
                "coregionalisation needs a single-output base kernel",
            ));
        }
        let n = outputs.nrows();
        if n == 0 || outputs.ncols() != n || outputs.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "output covariance must be a finite square matrix",
            ));
        }
        if (&outputs - outputs.transpose()).amax() > 0.0 {
            return Err(Error::invalid("output covariance must be symmetric"));
        }
        let min_eig = outputs.symmetric_eigenvalues().min();
        if min_eig < -1e-12 * outputs.amax().max(1.0) {
            return Err(Error::invalid("output covariance must be PSD"));
        }
        Ok(Self { base, outputs })
    }

    pub fn outputs(&self) -> &DMatrix<f64> {
        &self.outputs
    }
}

impl StationaryKernel for Coregional {
    fn num_outputs(&self) -> usize {
        self.outputs.nrows()
    }

    fn input_dim(&self) -> usize {
        self.base.input_dim()
    }

    fn eval(&self, i: usize, j: usize, lag: &[f64]) -> f64 {
        self.outputs[(i, j)] * self.base.eval(0, 0, lag)
    }
}
