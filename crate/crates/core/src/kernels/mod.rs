//! Closed-form kernels for every spectral family, plus the change-point
//! composition.

mod changepoint;
mod minecraft;
mod mixture;
mod stationary;

pub use changepoint::{ChangePointKernel, CrossRule};
pub use minecraft::{EllipsoidKernel, MinecraftKernel, PairShift};
pub use mixture::{BlockSm, GaussianMosm, GaussianSm};
pub use stationary::Coregional;

use std::f64::consts::PI;

use crate::numerics::logistic;

const SINC_SERIES_BELOW: f64 = 1e-6;

/// `sin(pi x) / (pi x)`, with the removable singularity filled by its
/// quartic Taylor series for `|x| < 1e-6`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_BELOW {
        let p2 = (PI * x) * (PI * x);
        1.0 - p2 / 6.0 + p2 * p2 / 120.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Derivative of [`sinc`].
pub fn sinc_derivative(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let p2 = PI * PI;
        -p2 * x / 3.0 + p2 * p2 * x * x * x / 30.0
    } else {
        ((PI * x).cos() - sinc(x)) / x
    }
}

/// Logistic weight `1 / (1 + exp(-(x - x0) * steepness))`.
pub fn sigmoid(x: f64, x0: f64, steepness: f64) -> f64 {
    logistic((x - x0) * steepness)
}

/// A multi-output kernel that depends on inputs only through the lag `x - y`.
pub trait StationaryKernel: Send + Sync {
    fn num_outputs(&self) -> usize;

    fn input_dim(&self) -> usize;

    /// Cross-covariance `K_ij(lag)` between output `i` at `x` and output `j`
    /// at `y = x - lag`.
    fn eval(&self, i: usize, j: usize, lag: &[f64]) -> f64;
}

/// A general multi-output covariance function.
pub trait Covariance: Send + Sync {
    fn output_count(&self) -> usize;

    fn dimension(&self) -> usize;

    fn cov(&self, x: &[f64], i: usize, y: &[f64], j: usize) -> f64;
}

impl<K: StationaryKernel + ?Sized> Covariance for K {
    fn output_count(&self) -> usize {
        self.num_outputs()
    }

    fn dimension(&self) -> usize {
        self.input_dim()
    }

    fn cov(&self, x: &[f64], i: usize, y: &[f64], j: usize) -> f64 {
        let lag: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.eval(i, j, &lag)
    }
}

impl<K: StationaryKernel + ?Sized> StationaryKernel for Box<K> {
    fn num_outputs(&self) -> usize {
        (**self).num_outputs()
    }

    fn input_dim(&self) -> usize {
        (**self).input_dim()
    }

    fn eval(&self, i: usize, j: usize, lag: &[f64]) -> f64 {
        (**self).eval(i, j, lag)
    }
}
