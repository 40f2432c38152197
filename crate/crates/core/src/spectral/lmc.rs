use nalgebra::{DMatrix, DVector};

use super::{Matern, SpectralModel};
use crate::error::{Error, Result};
use crate::numerics::special::gamma;
use crate::numerics::GaussLegendre;

/// Linear model of coregionalisation over Matérn latents:
/// `S_ij(nu) = sum_k W_ik W_jk S_k(nu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpectrumLmc {
    mixing: DMatrix<f64>,
    latents: Vec<Matern>,
}

impl TargetSpectrumLmc {
    pub fn new(mixing: DMatrix<f64>, latents: Vec<Matern>) -> Result<Self> {
        if latents.is_empty() || mixing.ncols() != latents.len() || mixing.nrows() == 0 {
            return Err(Error::invalid(format!(
                "mixing is {}x{} but there are {} latents",
                mixing.nrows(),
                mixing.ncols(),
                latents.len()
            )));
        }
        if mixing.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("mixing matrix must be finite"));
        }
        for l in &latents {
            l.validate()?;
        }
        let dim = latents[0].dim;
        if latents.iter().any(|l| l.dim != dim) {
            return Err(Error::invalid("latents differ in input dimension"));
        }
        Ok(Self { mixing, latents })
    }

    pub fn mixing(&self) -> &DMatrix<f64> {
        &self.mixing
    }

    pub fn latents(&self) -> &[Matern] {
        &self.latents
    }

    /// `W diag(sigma_k^2) W^T`.
    pub fn lag0_covariance(&self) -> DMatrix<f64> {
        let v = DVector::from_iterator(self.latents.len(), self.latents.iter().map(|l| l.variance));
        lag0_covariance(&self.mixing, &v)
    }
}

impl SpectralModel for TargetSpectrumLmc {
    fn num_channels(&self) -> usize {
        self.mixing.nrows()
    }

    fn input_dim(&self) -> usize {
        self.latents[0].dim
    }

    fn density(&self, nu: &[f64]) -> DMatrix<f64> {
        let s = DVector::from_iterator(
            self.latents.len(),
            self.latents.iter().map(|l| l.spectral_density(nu)),
        );
        lag0_covariance(&self.mixing, &s)
    }
}

fn lag0_covariance(w: &DMatrix<f64>, diag: &DVector<f64>) -> DMatrix<f64> {
    let scaled = DMatrix::from_fn(w.nrows(), w.ncols(), |i, k| w[(i, k)] * diag[k]);
    scaled * w.transpose()
}

/// Correlations of a covariance matrix in upper-triangle order
/// `(0,1), (0,2), ..., (1,2), ...`.
pub fn upper_correlations(cov: &DMatrix<f64>) -> Vec<f64> {
    let n = cov.nrows();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt());
        }
    }
    out
}

/// Total spectral mass of a Matérn latent, by radial Gauss–Legendre quadrature
/// after mapping `[0, inf)` onto `[0, 1)` with `rho = t / (1 - t)`.
pub fn matern_mass_by_quadrature(latent: &Matern) -> f64 {
    let d = latent.dim as f64;
    let sphere = 2.0 * std::f64::consts::PI.powf(0.5 * d) / gamma(0.5 * d);
    let rule = GaussLegendre::new(32);
    // panels refined towards t = 1, where the heavy tail lives
    let edges = [
        0.0, 0.5, 0.8, 0.9, 0.95, 0.98, 0.99, 0.995, 0.999, 0.9999, 1.0,
    ];
    edges
        .windows(2)
        .map(|e| {
            rule.integrate_composite(e[0], e[1], 8, |t| {
                let rho = t / (1.0 - t);
                let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                sphere * rho.powf(d - 1.0) * latent.radial_spectral_density(rho) * jac
            })
        })
        .sum()
}

/// Mixing matrix family: a fixed base with some entries left free.
#[derive(Debug, Clone)]
pub struct MixingTemplate {
    pub base: DMatrix<f64>,
    pub free: Vec<(usize, usize)>,
}

impl MixingTemplate {
    fn build(&self, params: &[f64]) -> DMatrix<f64> {
        let mut w = self.base.clone();
        for (&(i, k), &p) in self.free.iter().zip(params) {
            w[(i, k)] = p;
        }
        w
    }
}

/// Solves for the free entries of `template` so that the lag-zero channel
/// correlations of the LMC equal `targets`. Latent variances are taken from
/// quadrature of each latent's spectral density. Damped Newton with a
/// central-difference Jacobian.
pub fn solve_mixing(
    latents: &[Matern],
    template: &MixingTemplate,
    targets: &[f64],
) -> Result<DMatrix<f64>> {
    let n = template.base.nrows();
    if template.free.len() != targets.len() || targets.len() != n * (n - 1) / 2 {
        return Err(Error::invalid(
            "mixing template needs exactly one free entry per channel pair",
        ));
    }
    let variances =
        DVector::from_iterator(latents.len(), latents.iter().map(matern_mass_by_quadrature));
    let residual = |p: &[f64]| -> DVector<f64> {
        let cov = lag0_covariance(&template.build(p), &variances);
        DVector::from_iterator(
            targets.len(),
            upper_correlations(&cov)
                .into_iter()
                .zip(targets)
                .map(|(c, t)| c - t),
        )
    };
    let mut p: Vec<f64> = template
        .free
        .iter()
        .map(|&(i, k)| template.base[(i, k)])
        .collect();
    let mut r = residual(&p);
    for _ in 0..200 {
        if r.amax() < 1e-13 {
            return Ok(template.build(&p));
        }
        let m = p.len();
        let mut jac = DMatrix::zeros(m, m);
        for k in 0..m {
            let h = 1e-6 * p[k].abs().max(1.0);
            let mut up = p.clone();
            let mut dn = p.clone();
            up[k] += h;
            dn[k] -= h;
            let col = (residual(&up) - residual(&dn)) / (2.0 * h);
            jac.set_column(k, &col);
        }
        let step = jac
            .lu()
            .solve(&(-&r))
            .ok_or_else(|| Error::invalid("singular Jacobian while solving for mixing"))?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
            let rt = residual(&trial);
            if rt.iter().all(|v| v.is_finite()) && rt.norm() < r.norm() {
                p = trial;
                r = rt;
                break;
            }
            t *= 0.5;
            if t < 1e-10 {
                return Err(Error::invalid("mixing solve stalled"));
            }
        }
    }
    if r.amax() < 1e-10 {
        Ok(template.build(&p))
    } else {
        Err(Error::invalid("mixing solve did not converge"))
    }
}
