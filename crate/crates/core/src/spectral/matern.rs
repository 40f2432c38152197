use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::gamma;

/// Matérn smoothness restricted to the half-integer closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub enum Smoothness {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl Smoothness {
    pub fn value(self) -> f64 {
        match self {
            Smoothness::Half => 0.5,
            Smoothness::ThreeHalves => 1.5,
            Smoothness::FiveHalves => 2.5,
        }
    }
}

impl TryFrom<f64> for Smoothness {
    type Error = String;

    fn try_from(v: f64) -> std::result::Result<Self, String> {
        match v {
            x if x == 0.5 => Ok(Smoothness::Half),
            x if x == 1.5 => Ok(Smoothness::ThreeHalves),
            x if x == 2.5 => Ok(Smoothness::FiveHalves),
            other => Err(format!(
                "unsupported Matérn smoothness {other}; use 0.5, 1.5 or 2.5"
            )),
        }
    }
}

impl From<Smoothness> for f64 {
    fn from(s: Smoothness) -> f64 {
        s.value()
    }
}

/// Isotropic Matérn covariance on `R^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matern {
    pub smoothness: Smoothness,
    pub lengthscale: f64,
    pub variance: f64,
    pub dim: usize,
}

impl Matern {
    pub fn new(
        smoothness: Smoothness,
        lengthscale: f64,
        variance: f64,
        dim: usize,
    ) -> Result<Self> {
        let m = Self {
            smoothness,
            lengthscale,
            variance,
            dim,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lengthscale.is_finite() && self.lengthscale > 0.0) {
            return Err(Error::invalid("Matérn lengthscale must be > 0"));
        }
        if !(self.variance.is_finite() && self.variance > 0.0) {
            return Err(Error::invalid("Matérn variance must be > 0"));
        }
        if self.dim == 0 {
            return Err(Error::invalid("Matérn input dimension must be >= 1"));
        }
        Ok(())
    }

    /// Spectral density in cycles per input unit, normalised so that it
    /// integrates to the variance over `R^dim`.
    pub fn spectral_density(&self, nu: &[f64]) -> f64 {
        let rho2: f64 = nu.iter().map(|v| v * v).sum();
        self.radial_spectral_density(rho2.sqrt())
    }

    /// The same density as a function of `|nu|`.
    pub fn radial_spectral_density(&self, rho: f64) -> f64 {
        let v = self.smoothness.value();
        let d = self.dim as f64;
        let l = self.lengthscale;
        let c = self.variance
            * 2f64.powf(d)
            * PI.powf(0.5 * d)
            * gamma(v + 0.5 * d)
            * (2.0 * v).powf(v)
            / (gamma(v) * l.powf(2.0 * v));
        c * (2.0 * v / (l * l) + 4.0 * PI * PI * rho * rho).powf(-(v + 0.5 * d))
    }

    /// Covariance as a function of the lag distance.
    pub fn covariance(&self, distance: f64) -> f64 {
        let s = distance.abs() / self.lengthscale;
        let shape = match self.smoothness {
            Smoothness::Half => (-s).exp(),
            Smoothness::ThreeHalves => {
                let a = 3f64.sqrt() * s;
                (1.0 + a) * (-a).exp()
            }
            Smoothness::FiveHalves => {
                let a = 5f64.sqrt() * s;
                (1.0 + a + a * a / 3.0) * (-a).exp()
            }
        };
        self.variance * shape
    }
}
