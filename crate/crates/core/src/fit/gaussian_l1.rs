use nalgebra::DMatrix;

use super::TilingSpec;
use crate::error::{Error, Result};
use crate::spectral::{GaussianComponent, SpectralModel};

/// Relative objective decrease at which coordinate descent stops.
pub const L1_TOLERANCE: f64 = 1e-8;
/// Sweeps after which coordinate descent gives up.
pub const MAX_SWEEPS: usize = 100_000;

/// Gaussians centred on the tiling's components with per-axis standard
/// deviation `std_scale * tile_width`. A scale of `1 / sqrt(2 pi)` gives each
/// Gaussian the peak density of its block.
pub fn gaussians_for_tiling(tiling: &TilingSpec, std_scale: f64) -> Result<Vec<GaussianComponent>> {
    if !(std_scale.is_finite() && std_scale > 0.0) {
        return Err(Error::invalid("gaussian std scale must be > 0"));
    }
    let basis = tiling.basis()?;
    basis
        .components()
        .iter()
        .map(|c| {
            GaussianComponent::new(
                c.center().to_vec(),
                c.width().iter().map(|w| w * std_scale).collect(),
            )
        })
        .collect()
}

/// Default width tie between a Gaussian and its tile.
pub fn peak_matched_std_scale() -> f64 {
    1.0 / (2.0 * std::f64::consts::PI).sqrt()
}

/// Evaluation grid for the L1 fit: midpoints of `points` cells per axis over
/// `[-half, half]`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Grid {
    pub half_extent: Vec<f64>,
    pub points: usize,
}

impl L1Grid {
    fn nodes(&self) -> Vec<Vec<f64>> {
        let d = self.half_extent.len();
        let total = self.points.pow(d as u32);
        (0..total)
            .map(|idx| {
                let mut rem = idx;
                (0..d)
                    .map(|k| {
                        let i = rem % self.points;
                        rem /= self.points;
                        let h = 2.0 * self.half_extent[k] / self.points as f64;
                        -self.half_extent[k] + (i as f64 + 0.5) * h
                    })
                    .collect()
            })
            .collect()
    }
}

/// Per-channel non-negative amplitudes (`Q x N`) minimising the L1 distance
/// between each auto-spectrum and the Gaussian mixture on `grid`.
pub fn fit_gaussian_amplitudes<M: SpectralModel + ?Sized>(
    target: &M,
    components: &[GaussianComponent],
    grid: &L1Grid,
) -> Result<DMatrix<f64>> {
    let nodes = grid.nodes();
    let phi = DMatrix::from_fn(nodes.len(), components.len(), |p, q| {
        components[q].pair_density(&nodes[p])
    });
    let n = target.num_channels();
    let mut targets = DMatrix::zeros(nodes.len(), n);
    for (p, nu) in nodes.iter().enumerate() {
        let s = target.density(nu);
        for i in 0..n {
            targets[(p, i)] = s[(i, i)];
        }
    }
    let mut out = DMatrix::zeros(components.len(), n);
    for i in 0..n {
        let y: Vec<f64> = targets.column(i).iter().copied().collect();
        let a = l1_nonnegative(&phi, &y)?;
        out.set_column(i, &nalgebra::DVector::from_vec(a));
    }
    Ok(out)
}

/// `argmin_{a >= 0} ||y - Phi a||_1` by non-negative least squares warm start
/// followed by exact coordinate minimisation.
pub fn l1_nonnegative(phi: &DMatrix<f64>, y: &[f64]) -> Result<Vec<f64>> {
    let (p, q) = phi.shape();
    let mut a = nnls_warm_start(phi, y)?;
    let mut resid: Vec<f64> = (0..p)
        .map(|r| y[r] - (0..q).map(|k| phi[(r, k)] * a[k]).sum::<f64>())
        .collect();
    let mut objective: f64 = resid.iter().map(|r| r.abs()).sum();
    let mut ratios: Vec<(f64, f64)> = Vec::with_capacity(p);
    for _ in 0..MAX_SWEEPS {
        let before = objective;
        for k in 0..q {
            // restore column k, then minimise sum |r_p - phi_pk t| over t >= 0
            ratios.clear();
            for r in 0..p {
                let f = phi[(r, k)];
                if f > 0.0 {
                    ratios.push(((resid[r] + f * a[k]) / f, f));
                }
            }
            let t = weighted_median(&mut ratios).max(0.0);
            if t != a[k] {
                let delta = t - a[k];
                for r in 0..p {
                    resid[r] -= phi[(r, k)] * delta;
                }
                a[k] = t;
            }
        }
        objective = resid.iter().map(|r| r.abs()).sum();
        if before - objective <= L1_TOLERANCE * before.max(f64::MIN_POSITIVE) {
            return Ok(a);
        }
    }
    Err(Error::NonConvergence { sweeps: MAX_SWEEPS })
}

/// Minimiser of `sum_p w_p |x_p - t|`.
fn weighted_median(items: &mut [(f64, f64)]) -> f64 {
    if items.is_empty() {
        return 0.0;
    }
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = items.iter().map(|x| x.1).sum();
    let mut acc = 0.0;
    for &(x, w) in items.iter() {
        acc += w;
        if acc >= 0.5 * total {
            return x;
        }
    }
    items[items.len() - 1].0
}

fn nnls_warm_start(phi: &DMatrix<f64>, y: &[f64]) -> Result<Vec<f64>> {
    let q = phi.ncols();
    let gram = phi.transpose() * phi;
    let rhs = phi.transpose() * nalgebra::DVector::from_column_slice(y);
    let mut a = vec![0.0; q];
    for _ in 0..MAX_SWEEPS {
        let mut change: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for k in 0..q {
            if gram[(k, k)] <= 0.0 {
                continue;
            }
            let dot: f64 = (0..q).map(|m| gram[(k, m)] * a[m]).sum();
            let t = (a[k] + (rhs[k] - dot) / gram[(k, k)]).max(0.0);
            change = change.max((t - a[k]).abs());
            scale = scale.max(t.abs());
            a[k] = t;
        }
        if change <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Ok(a);
        }
    }
    Err(Error::NonConvergence { sweeps: MAX_SWEEPS })
}
