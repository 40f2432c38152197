use super::{sigmoid, Covariance, StationaryKernel};
use crate::error::{Error, Result};

/// How the two regimes of a change point are correlated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossRule {
    /// `f1` and `f2` independent; the cross term vanishes.
    Independent,
    /// `f1 = f2`; a single process throughout.
    Identical,
    /// `f1`, `f2` are the two outputs of a multi-output kernel.
    MultiOutput,
}

/// `K(x, x') = sum_ab w_a(x) w_b(x') k_ab(x - x')` with weights
/// `w_0 = s`, `w_1 = 1 - s` and `s` a sigmoid in the first input coordinate.
pub struct ChangePointKernel {
    base: Box<dyn StationaryKernel>,
    rule: CrossRule,
    location: f64,
    steepness: f64,
}

impl std::fmt::Debug for ChangePointKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChangePointKernel")
            .field("rule", &self.rule)
            .field("location", &self.location)
            .field("steepness", &self.steepness)
            .finish_non_exhaustive()
    }
}

impl ChangePointKernel {
    /// `base` supplies the regime kernels. With one output it is used for both
    /// regimes (`Independent` or `Identical`). With two outputs its diagonal
    /// gives `k1`, `k2` and, under `MultiOutput`, its off-diagonal gives `k12`.
    pub fn new(
        base: Box<dyn StationaryKernel>,
        rule: CrossRule,
        location: f64,
        steepness: f64,
    ) -> Result<Self> {
        if !(steepness.is_finite() && steepness > 0.0) {
            return Err(Error::invalid("change-point steepness must be > 0"));
        }
        if !location.is_finite() {
            return Err(Error::invalid("change-point location must be finite"));
        }
        match (base.num_outputs(), rule) {
            (1, CrossRule::Independent | CrossRule::Identical) => {}
            (2, CrossRule::Independent | CrossRule::MultiOutput) => {}
            (n, r) => {
                return Err(Error::invalid(format!(
                    "{r:?} change point cannot use a {n}-output base kernel"
                )))
            }
        }
        Ok(Self {
            base,
            rule,
            location,
            steepness,
        })
    }

    pub fn rule(&self) -> CrossRule {
        self.rule
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn steepness(&self) -> f64 {
        self.steepness
    }

    pub fn base(&self) -> &dyn StationaryKernel {
        self.base.as_ref()
    }

    fn weights(&self, x: &[f64]) -> [f64; 2] {
        let s = sigmoid(x[0], self.location, self.steepness);
        [s, 1.0 - s]
    }

    /// Regime kernel `k_ab(lag)`.
    fn regime(&self, a: usize, b: usize, lag: &[f64]) -> f64 {
        let single = self.base.num_outputs() == 1;
        match self.rule {
            CrossRule::Independent if a != b => 0.0,
            CrossRule::Independent | CrossRule::Identical if single => self.base.eval(0, 0, lag),
            _ => self.base.eval(a, b, lag),
        }
    }
}

impl Covariance for ChangePointKernel {
    fn output_count(&self) -> usize {
        1
    }

    fn dimension(&self) -> usize {
        self.base.input_dim()
    }

    fn cov(&self, x: &[f64], _i: usize, y: &[f64], _j: usize) -> f64 {
        let lag: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let wx = self.weights(x);
        let wy = self.weights(y);
        let mut total = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let w = wx[a] * wy[b];
                if w != 0.0 {
                    total += w * self.regime(a, b, &lag);
                }
            }
        }
        total
    }
}
