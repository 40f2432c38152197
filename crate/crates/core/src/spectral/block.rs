use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::{gamma, normalized_bessel};

/// One symmetrised rectangular spectral component: the pair of boxes
/// centred on `+center` and `-center` with per-axis `width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockComponent {
    center: Vec<f64>,
    width: Vec<f64>,
}

impl BlockComponent {
    pub fn new(center: Vec<f64>, width: Vec<f64>) -> Result<Self> {
        if center.is_empty() || center.len() != width.len() {
            return Err(Error::invalid(format!(
                "block center has {} dims but width has {}",
                center.len(),
                width.len()
            )));
        }
        if width.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid("block widths must be finite and > 0"));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("block center must be finite"));
        }
        Ok(Self { center, width })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn width(&self) -> &[f64] {
        &self.width
    }

    /// A component centred exactly on the origin is a single block, not a pair.
    pub fn is_dc(&self) -> bool {
        self.center.iter().all(|&c| c == 0.0)
    }

    pub fn volume(&self) -> f64 {
        self.width.iter().product()
    }

    /// Density of the box centred on `sign * center` (open box).
    pub fn box_density(&self, sign: f64, nu: &[f64]) -> f64 {
        let inside = nu
            .iter()
            .zip(&self.center)
            .zip(&self.width)
            .all(|((n, c), w)| (n - sign * c).abs() < 0.5 * w);
        if inside {
            1.0 / self.volume()
        } else {
            0.0
        }
    }

    /// `0.5 * [B(nu; +mu, w) + B(nu; -mu, w)]`; integrates to one.
    pub fn pair_density(&self, nu: &[f64]) -> f64 {
        debug_assert_eq!(nu.len(), self.dim());
        if self.is_dc() {
            return self.box_density(1.0, nu);
        }
        0.5 * (self.box_density(1.0, nu) + self.box_density(-1.0, nu))
    }

    /// Symmetrised uniform density on the pair of ellipsoids inscribed in the
    /// component's boxes (semi-axes `width / 2`).
    pub fn ellipsoid_pair_density(&self, nu: &[f64]) -> f64 {
        let d = self.dim() as f64;
        let half_axes: f64 = self.width.iter().map(|w| 0.5 * w).product();
        let unit_ball = std::f64::consts::PI.powf(0.5 * d) / gamma(0.5 * d + 1.0);
        let height = 1.0 / (unit_ball * half_axes);
        let inside = |sign: f64| {
            let r2: f64 = nu
                .iter()
                .zip(&self.center)
                .zip(&self.width)
                .map(|((n, c), w)| {
                    let u = (n - sign * c) / (0.5 * w);
                    u * u
                })
                .sum();
            r2 < 1.0
        };
        let plus = if inside(1.0) { height } else { 0.0 };
        if self.is_dc() {
            return plus;
        }
        let minus = if inside(-1.0) { height } else { 0.0 };
        0.5 * (plus + minus)
    }

    /// Normalised transform of one ellipsoid at lag `r`, as a function of
    /// `pi * ||r (.) w||` with Bessel order `order / 2`.
    pub(crate) fn ellipsoid_profile(&self, order: usize, lag: &[f64]) -> f64 {
        let norm: f64 = lag
            .iter()
            .zip(&self.width)
            .map(|(r, w)| (r * w) * (r * w))
            .sum::<f64>()
            .sqrt();
        normalized_bessel(0.5 * order as f64, std::f64::consts::PI * norm)
    }
}

/// An overlapping pair of components found by [`validate_nonoverlap`]
/// (0-based indices; `first == second` for a self-mirror overlap).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overlap {
    pub first: usize,
    pub second: usize,
}

fn boxes_intersect(a: &BlockComponent, sa: f64, b: &BlockComponent, sb: f64) -> bool {
    (0..a.dim()).all(|d| {
        let gap = (sa * a.center[d] - sb * b.center[d]).abs();
        // slack absorbs rounding between abutting boxes built from cumulative edges
        gap < 0.5 * (a.width[d] + b.width[d]) * (1.0 - 1e-12)
    })
}

/// Checks that all boxes `R(+-mu_q, w_q)` are pairwise disjoint (as open sets).
/// Returns the first offending component pair, scanning in index order.
pub fn validate_nonoverlap(components: &[BlockComponent]) -> Option<Overlap> {
    for a in 0..components.len() {
        let ca = &components[a];
        if !ca.is_dc() && boxes_intersect(ca, 1.0, ca, -1.0) {
            return Some(Overlap {
                first: a,
                second: a,
            });
        }
        for b in a + 1..components.len() {
            let cb = &components[b];
            let signs_b: &[f64] = if cb.is_dc() { &[1.0] } else { &[1.0, -1.0] };
            // a's mirror against b is the same test as a against b's mirror
            if signs_b.iter().any(|&sb| boxes_intersect(ca, 1.0, cb, sb)) {
                return Some(Overlap {
                    first: a,
                    second: b,
                });
            }
        }
    }
    None
}

/// Ordered list of pairwise-disjoint block components sharing one input dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockBasis {
    components: Vec<BlockComponent>,
}

impl BlockBasis {
    pub fn new(components: Vec<BlockComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("block basis needs at least one component"));
        }
        let dim = components[0].dim();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::invalid("block components differ in dimension"));
        }
        if let Some(o) = validate_nonoverlap(&components) {
            return Err(Error::invalid(format!(
                "block components {} and {} overlap",
                o.first, o.second
            )));
        }
        Ok(Self { components })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn components(&self) -> &[BlockComponent] {
        &self.components
    }

    /// Index of the component whose support contains `nu`, if any.
    pub fn active_component(&self, nu: &[f64]) -> Option<usize> {
        self.components
            .iter()
            .position(|c| c.pair_density(nu) > 0.0)
    }
}
