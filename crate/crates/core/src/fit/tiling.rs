use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;
use crate::spectral::{AmplitudeMatrixSet, BlockBasis, BlockComponent, SpectralModel};

/// Gauss–Legendre order per axis used by [`project_spectrum`].
pub const PROJECTION_ORDER: usize = 16;

/// A regular tiling of a symmetric frequency box `[-half, half]`, paired into
/// symmetrised block components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingSpec {
    /// Half-extent of the domain along each axis.
    pub half_extent: Vec<f64>,
    /// Tiles along each axis.
    pub counts: Vec<usize>,
}

impl TilingSpec {
    pub fn new(half_extent: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let t = Self {
            half_extent,
            counts,
        };
        t.validate()?;
        Ok(t)
    }

    /// `[-2, 2]^2` in `8 x 8` tiles: 64 tiles, 32 components.
    pub fn square(half_extent: f64, per_axis: usize, dim: usize) -> Result<Self> {
        Self::new(vec![half_extent; dim], vec![per_axis; dim])
    }

    pub fn validate(&self) -> Result<()> {
        if self.half_extent.is_empty() || self.half_extent.len() != self.counts.len() {
            return Err(Error::invalid(
                "tiling extents and counts must share a non-zero length",
            ));
        }
        if self
            .half_extent
            .iter()
            .any(|h| !(h.is_finite() && *h > 0.0))
        {
            return Err(Error::invalid("tiling half-extent must be > 0"));
        }
        if self.counts.iter().any(|&c| c == 0) {
            return Err(Error::invalid("tiling counts must be >= 1"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn tile_width(&self) -> Vec<f64> {
        self.half_extent
            .iter()
            .zip(&self.counts)
            .map(|(h, &c)| 2.0 * h / c as f64)
            .collect()
    }

    /// One component per mirror pair of tiles: the tile whose first non-zero
    /// centre coordinate is positive, plus the DC tile if one exists.
    pub fn basis(&self) -> Result<BlockBasis> {
        self.validate()?;
        let width = self.tile_width();
        let total: usize = self.counts.iter().product();
        let mut comps = Vec::with_capacity(total / 2 + 1);
        for idx in 0..total {
            let mut rem = idx;
            let center: Vec<f64> = (0..self.dim())
                .map(|d| {
                    let k = rem % self.counts[d];
                    rem /= self.counts[d];
                    // integer-centred arithmetic keeps mirror tiles exact
                    let twice = 2 * k as i64 + 1 - self.counts[d] as i64;
                    0.5 * twice as f64 * width[d]
                })
                .collect();
            let keep = match center.iter().find(|c| **c != 0.0) {
                Some(c) => *c > 0.0,
                None => true,
            };
            if keep {
                comps.push(BlockComponent::new(center, width.clone())?);
            }
        }
        BlockBasis::new(comps)
    }
}

/// `A^q = 2 int_{R(mu_q, w_q)} S(nu) d nu` (once for a DC tile), before any
/// diagonal loading.
pub fn project_matrices<M: SpectralModel + ?Sized>(
    target: &M,
    basis: &BlockBasis,
) -> Result<Vec<DMatrix<f64>>> {
    let rule = GaussLegendre::new(PROJECTION_ORDER);
    let n = target.num_channels();
    basis
        .components()
        .iter()
        .map(|c| {
            let lo: Vec<f64> = c
                .center()
                .iter()
                .zip(c.width())
                .map(|(m, w)| m - 0.5 * w)
                .collect();
            let hi: Vec<f64> = c
                .center()
                .iter()
                .zip(c.width())
                .map(|(m, w)| m + 0.5 * w)
                .collect();
            let mut acc = DMatrix::zeros(n, n);
            for (nu, w) in rule.box_nodes(&lo, &hi) {
                let s = target.density(&nu);
                if s.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteQuadrature);
                }
                acc += s * w;
            }
            let factor = if c.is_dc() { 1.0 } else { 2.0 };
            let a = acc * factor;
            Ok(0.5 * (&a + a.transpose()))
        })
        .collect()
}

/// Projects `target` onto the tiling's blocks by mean integrals.
pub fn project_spectrum<M: SpectralModel + ?Sized>(
    target: &M,
    tiling: &TilingSpec,
) -> Result<(BlockBasis, AmplitudeMatrixSet)> {
    let basis = tiling.basis()?;
    let mats = project_matrices(target, &basis)?;
    let amps = AmplitudeMatrixSet::from_matrices(&mats)?;
    Ok((basis, amps))
}

/// Midpoint-rule estimate of `sum_ij int |S_ij - M_ij|` over
/// `[-half, half]` with `points` cells per axis.
pub fn spectral_l1_distance<A, B>(a: &A, b: &B, half_extent: &[f64], points: usize) -> f64
where
    A: SpectralModel + ?Sized,
    B: SpectralModel + ?Sized,
{
    let d = half_extent.len();
    let h: Vec<f64> = half_extent
        .iter()
        .map(|e| 2.0 * e / points as f64)
        .collect();
    let cell: f64 = h.iter().product();
    let total = points.pow(d as u32);
    let mut sum = 0.0;
    let mut nu = vec![0.0; d];
    for idx in 0..total {
        let mut rem = idx;
        for k in 0..d {
            let i = rem % points;
            rem /= points;
            nu[k] = -half_extent[k] + (i as f64 + 0.5) * h[k];
        }
        let diff = a.density(&nu) - b.density(&nu);
        sum += diff.iter().map(|v| v.abs()).sum::<f64>();
    }
    sum * cell
}
