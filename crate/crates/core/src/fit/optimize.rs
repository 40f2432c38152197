//! Nonlinear conjugate gradients with multi-start initialisation.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::series::{Family, Freeze, InitSampler, SeriesObjective, SeriesParams};
use crate::error::{Error, Result};

const ARMIJO_C: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 40;
const MAX_EXPANSIONS: usize = 20;

/// One optimiser iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub objective: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub theta: Vec<f64>,
    pub value: f64,
    pub trace: Vec<TraceRow>,
}

/// Polak–Ribière+ conjugate gradients with Armijo backtracking. Coordinates
/// with `free[k] == false` are held fixed. Stops after `iterations` steps, when
/// no step decreases the objective, or when the projected gradient vanishes.
pub fn minimize_cg(
    f: impl Fn(&[f64]) -> (f64, Vec<f64>),
    theta0: &[f64],
    free: &[bool],
    iterations: usize,
) -> Minimum {
    let mask = |g: &mut Vec<f64>| {
        for (v, &ok) in g.iter_mut().zip(free) {
            if !ok {
                *v = 0.0;
            }
        }
    };
    let mut theta = theta0.to_vec();
    let (mut value, mut grad) = f(&theta);
    mask(&mut grad);
    let norm = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut trace = vec![TraceRow {
        iter: 0,
        objective: value,
        grad_norm: norm(&grad),
    }];
    if !value.is_finite() {
        return Minimum {
            theta,
            value,
            trace,
        };
    }
    let mut dir: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut step = 1.0 / norm(&grad).max(1.0);
    for iter in 1..=iterations {
        let mut slope: f64 = dir.iter().zip(&grad).map(|(d, g)| d * g).sum();
        if slope >= 0.0 {
            dir = grad.iter().map(|g| -g).collect();
            slope = -grad.iter().map(|g| g * g).sum::<f64>();
        }
        if slope == 0.0 {
            break;
        }
        let try_step = |t: f64| {
            let trial: Vec<f64> = theta.iter().zip(&dir).map(|(x, d)| x + t * d).collect();
            let (v, g) = f(&trial);
            (v.is_finite() && v <= value + ARMIJO_C * t * slope).then_some((trial, v, g))
        };
        let mut t = step;
        let mut accepted = None;
        for k in 0..MAX_BACKTRACKS {
            if let Some(hit) = try_step(t) {
                accepted = Some(hit);
                // a full first step may be too short; grow while it keeps paying off
                if k == 0 {
                    for _ in 0..MAX_EXPANSIONS {
                        match try_step(2.0 * t) {
                            Some(hit)
                                if hit.1 < accepted.as_ref().map_or(f64::INFINITY, |a| a.1) =>
                            {
                                t *= 2.0;
                                accepted = Some(hit);
                            }
                            _ => break,
                        }
                    }
                }
                break;
            }
            t *= BACKTRACK;
        }
        let Some((next, next_value, mut next_grad)) = accepted else {
            break;
        };
        mask(&mut next_grad);
        let gg: f64 = grad.iter().map(|g| g * g).sum();
        let beta = if gg > 0.0 {
            let num: f64 = next_grad.iter().zip(&grad).map(|(n, o)| n * (n - o)).sum();
            (num / gg).max(0.0)
        } else {
            0.0
        };
        let new_slope_guess: f64 = -next_grad.iter().map(|g| g * g).sum::<f64>();
        dir = next_grad
            .iter()
            .zip(&dir)
            .map(|(g, d)| -g + beta * d)
            .collect();
        let new_slope: f64 = dir.iter().zip(&next_grad).map(|(d, g)| d * g).sum();
        // reuse the accepted step scaled by the change in directional slope
        step = if new_slope < 0.0 {
            (t * slope / new_slope).clamp(1e-10, 1e3)
        } else {
            (t * slope / new_slope_guess.min(-f64::MIN_POSITIVE)).clamp(1e-10, 1e3)
        };
        theta = next;
        value = next_value;
        grad = next_grad;
        trace.push(TraceRow {
            iter,
            objective: value,
            grad_norm: norm(&grad),
        });
        if norm(&grad) <= 1e-9 {
            break;
        }
    }
    Minimum {
        theta,
        value,
        trace,
    }
}

/// Multi-start settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Optimise every start instead of only the best-scoring initialisation.
    #[serde(default)]
    pub full_multistart: bool,
    #[serde(default)]
    pub init: InitSampler,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            iterations: 500,
            seed: 0,
            full_multistart: false,
            init: InitSampler::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be >= 1"));
        }
        self.init.validate()
    }
}

/// Result of [`fit_objective`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub params: SeriesParams,
    pub nlml: f64,
    pub trace: Vec<TraceRow>,
    /// Restart whose initialisation was kept.
    pub restart: usize,
}

/// Initialisation `restart`, drawn from its own ChaCha stream of `seed`.
/// Frozen coordinates are taken from `anchor` when given.
pub fn initial_point(
    config: &OptimizerConfig,
    family: Family,
    q: usize,
    restart: usize,
    free: &[bool],
    anchor: Option<&SeriesParams>,
) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);
    let sampled = config.init.sample(family, q, &mut rng).to_unconstrained();
    match anchor {
        Some(a) => sampled
            .iter()
            .zip(a.to_unconstrained())
            .zip(free)
            .map(|((s, f), &ok)| if ok { *s } else { f })
            .collect(),
        None => sampled,
    }
}

/// Minimises the negative log marginal likelihood from `restarts` seeded
/// initialisations. By default each start is scored by its objective alone and
/// only the best one is optimised.
pub fn fit_objective(
    objective: &SeriesObjective,
    config: &OptimizerConfig,
    freeze: Freeze,
    anchor: Option<&SeriesParams>,
) -> Result<FitOutcome> {
    config.validate()?;
    let (family, q) = (objective.family, objective.components);
    let free = SeriesParams::free_mask(family, q, freeze);
    let f = |t: &[f64]| objective.value_and_gradient(t);
    let starts =
        (0..config.restarts).map(|r| (r, initial_point(config, family, q, r, &free, anchor)));
    let best = if config.full_multistart {
        starts
            .map(|(r, s)| (r, minimize_cg(f, &s, &free, config.iterations)))
            .filter(|(_, m)| m.value.is_finite())
            .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
    } else {
        starts
            .map(|(r, s)| (r, objective.value(&s), s))
            .filter(|(_, v, _)| v.is_finite())
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(r, _, s)| (r, minimize_cg(f, &s, &free, config.iterations)))
    };
    let (restart, m) = best.ok_or(Error::AllRestartsFailed)?;
    if !m.value.is_finite() {
        return Err(Error::AllRestartsFailed);
    }
    Ok(FitOutcome {
        params: SeriesParams::from_unconstrained(family, q, &m.theta)?,
        nlml: m.value,
        trace: m.trace,
        restart,
    })
}
