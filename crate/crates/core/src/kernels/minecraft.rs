use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::mixture::block_term;
use super::{sinc, StationaryKernel};
use crate::error::{Error, Result};
use crate::spectral::{MinecraftSpectralModel, SpectralModel};

/// Delay and phase on one component for one ordered channel pair. The mirror
/// pair `(j, i)` receives `-delay` and `-phase`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairShift {
    pub component: usize,
    pub i: usize,
    pub j: usize,
    pub delay: Vec<f64>,
    pub phase: f64,
}

/// Per-component, per-pair delays `theta^q_ij` (length `D`) and phases.
#[derive(Debug, Clone, PartialEq)]
struct Shifts {
    /// `delay[q][i * n + j]`
    delay: Vec<Vec<Vec<f64>>>,
    phase: Vec<DMatrix<f64>>,
}

/// Multi-output kernel of a Minecraft spectral model, optionally with
/// cross-channel delays and phases.
#[derive(Debug, Clone, PartialEq)]
pub struct MinecraftKernel {
    model: MinecraftSpectralModel,
    shifts: Option<Shifts>,
}

/// Sample points per axis used when checking a delayed model for PSD.
const PSD_CHECK_POINTS: usize = 7;

impl MinecraftKernel {
    pub fn new(model: MinecraftSpectralModel) -> Self {
        Self {
            model,
            shifts: None,
        }
    }

    /// Adds explicit pair delays and phases. The resulting cross-spectrum is
    /// complex; it is checked for Hermitian PSD on a grid inside every block
    /// and rejected if any check fails.
    pub fn with_shifts(model: MinecraftSpectralModel, shifts: &[PairShift]) -> Result<Self> {
        let n = model.num_channels();
        let d = model.input_dim();
        let q = model.basis().len();
        let mut out = Shifts {
            delay: vec![vec![vec![0.0; d]; n * n]; q],
            phase: vec![DMatrix::zeros(n, n); q],
        };
        for s in shifts {
            if s.component >= q || s.i >= n || s.j >= n {
                return Err(Error::invalid(format!(
                    "shift ({}, {}, {}) out of range",
                    s.component, s.i, s.j
                )));
            }
            if s.delay.len() != d {
                return Err(Error::invalid(format!(
                    "delay has {} entries, input dimension is {d}",
                    s.delay.len()
                )));
            }
            if s.delay.iter().any(|v| !v.is_finite()) || !s.phase.is_finite() {
                return Err(Error::invalid("delays and phases must be finite"));
            }
            if s.i == s.j {
                if s.delay.iter().any(|&v| v != 0.0) || s.phase != 0.0 {
                    return Err(Error::invalid("auto-covariances cannot be delayed"));
                }
                continue;
            }
            out.delay[s.component][s.i * n + s.j] = s.delay.clone();
            out.delay[s.component][s.j * n + s.i] = s.delay.iter().map(|v| -v).collect();
            out.phase[s.component][(s.i, s.j)] = s.phase;
            out.phase[s.component][(s.j, s.i)] = -s.phase;
        }
        let kernel = Self {
            model,
            shifts: Some(out),
        };
        kernel.check_psd()?;
        Ok(kernel)
    }

    /// Delays and phases induced by per-channel offsets,
    /// `theta_ij = theta_i - theta_j` and `phi_ij = phi_i - phi_j`, applied to
    /// every component. Always PSD.
    pub fn with_channel_shifts(
        model: MinecraftSpectralModel,
        delays: &[Vec<f64>],
        phases: &[f64],
    ) -> Result<Self> {
        let n = model.num_channels();
        if delays.len() != n || phases.len() != n {
            return Err(Error::invalid("need one delay and one phase per channel"));
        }
        let mut shifts = Vec::new();
        for q in 0..model.basis().len() {
            for i in 0..n {
                for j in i + 1..n {
                    shifts.push(PairShift {
                        component: q,
                        i,
                        j,
                        delay: delays[i]
                            .iter()
                            .zip(&delays[j])
                            .map(|(a, b)| a - b)
                            .collect(),
                        phase: phases[i] - phases[j],
                    });
                }
            }
        }
        Self::with_shifts(model, &shifts)
    }

    pub fn model(&self) -> &MinecraftSpectralModel {
        &self.model
    }

    pub fn is_delayed(&self) -> bool {
        self.shifts.is_some()
    }

    pub fn delay(&self, q: usize, i: usize, j: usize) -> Option<&[f64]> {
        let n = self.model.num_channels();
        self.shifts
            .as_ref()
            .map(|s| s.delay[q][i * n + j].as_slice())
    }

    pub fn phase(&self, q: usize, i: usize, j: usize) -> f64 {
        self.shifts.as_ref().map_or(0.0, |s| s.phase[q][(i, j)])
    }

    /// Real and imaginary parts of the (Hermitian) spectral matrix at `nu`.
    pub fn complex_density(&self, nu: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.model.num_channels();
        let mut re = DMatrix::zeros(n, n);
        let mut im = DMatrix::zeros(n, n);
        for (q, c) in self.model.basis().components().iter().enumerate() {
            let plus = c.box_density(1.0, nu);
            let minus = if c.is_dc() {
                plus
            } else {
                c.box_density(-1.0, nu)
            };
            if plus == 0.0 && minus == 0.0 {
                continue;
            }
            // a DC block has both mirror densities equal and unhalved, so the
            // same one-half weighting applies to either case
            let a = self.model.amplitudes().matrix(q);
            for i in 0..n {
                for j in 0..n {
                    let (arg, phi) = match &self.shifts {
                        Some(s) => {
                            let t = &s.delay[q][i * n + j];
                            (2.0 * PI * dot(nu, t), s.phase[q][(i, j)])
                        }
                        None => (0.0, 0.0),
                    };
                    let (p_re, p_im) = ((arg + phi).cos(), (arg + phi).sin());
                    let (m_re, m_im) = ((arg - phi).cos(), (arg - phi).sin());
                    re[(i, j)] += 0.5 * a[(i, j)] * (plus * p_re + minus * m_re);
                    im[(i, j)] += 0.5 * a[(i, j)] * (plus * p_im + minus * m_im);
                }
            }
        }
        (re, im)
    }

    fn check_psd(&self) -> Result<()> {
        let n = self.model.num_channels();
        let d = self.model.input_dim();
        let scale = self
            .model
            .amplitudes()
            .total()
            .amax()
            .max(f64::MIN_POSITIVE);
        for (q, c) in self.model.basis().components().iter().enumerate() {
            let vol = c.volume();
            let total = PSD_CHECK_POINTS.pow(d as u32);
            for idx in 0..total {
                let mut rem = idx;
                let nu: Vec<f64> = (0..d)
                    .map(|k| {
                        let t = (rem % PSD_CHECK_POINTS) as f64 + 0.5;
                        rem /= PSD_CHECK_POINTS;
                        c.center()[k] + c.width()[k] * (t / PSD_CHECK_POINTS as f64 - 0.5)
                    })
                    .collect();
                let (re, im) = self.complex_density(&nu);
                // real embedding of the Hermitian matrix [[Re, -Im], [Im, Re]]
                let mut emb = DMatrix::zeros(2 * n, 2 * n);
                emb.view_mut((0, 0), (n, n)).copy_from(&re);
                emb.view_mut((n, n), (n, n)).copy_from(&re);
                emb.view_mut((n, 0), (n, n)).copy_from(&im);
                emb.view_mut((0, n), (n, n)).copy_from(&(-&im));
                let emb = 0.5 * (&emb + emb.transpose()) * vol;
                let min = emb.symmetric_eigenvalues().min();
                if min < -1e-10 * scale {
                    return Err(Error::invalid(format!(
                        "delays/phases make component {q} indefinite at {nu:?} (eigenvalue {min:e})"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl StationaryKernel for MinecraftKernel {
    fn num_outputs(&self) -> usize {
        self.model.num_channels()
    }

    fn input_dim(&self) -> usize {
        self.model.input_dim()
    }

    fn eval(&self, i: usize, j: usize, lag: &[f64]) -> f64 {
        let n = self.model.num_channels();
        let comps = self.model.basis().components();
        let mut total = 0.0;
        for (q, c) in comps.iter().enumerate() {
            let a = self.model.amplitudes().matrix(q)[(i, j)];
            if a == 0.0 {
                continue;
            }
            match &self.shifts {
                None => total += a * block_term(c, lag),
                Some(s) => {
                    let shifted: Vec<f64> = lag
                        .iter()
                        .zip(&s.delay[q][i * n + j])
                        .map(|(r, t)| r + t)
                        .collect();
                    let envelope: f64 = shifted
                        .iter()
                        .zip(c.width())
                        .map(|(r, w)| sinc(r * w))
                        .product();
                    let arg = 2.0 * PI * dot(&shifted, c.center()) + s.phase[q][(i, j)];
                    total += a * (envelope * arg.cos());
                }
            }
        }
        total
    }
}

/// Minecraft variant with each block replaced by the ellipsoid inscribed in
/// it, giving a Bessel envelope instead of a product of sincs.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidKernel {
    model: MinecraftSpectralModel,
    order: usize,
}

impl EllipsoidKernel {
    /// Bessel order `order / 2`; `order == D` is the exact transform of a
    /// uniform ellipsoid and larger orders give smoother envelopes.
    pub fn new(model: MinecraftSpectralModel, order: usize) -> Result<Self> {
        let d = model.input_dim();
        if order < d {
            return Err(Error::invalid(format!(
                "Bessel order parameter {order} is below the input dimension {d}"
            )));
        }
        Ok(Self { model, order })
    }

    pub fn with_default_order(model: MinecraftSpectralModel) -> Self {
        let order = model.input_dim();
        Self { model, order }
    }

    pub fn model(&self) -> &MinecraftSpectralModel {
        &self.model
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Spectral matrix for `order == D`.
    pub fn density(&self, nu: &[f64]) -> DMatrix<f64> {
        let n = self.model.num_channels();
        let mut s = DMatrix::zeros(n, n);
        for (q, c) in self.model.basis().components().iter().enumerate() {
            let g = c.ellipsoid_pair_density(nu);
            if g > 0.0 {
                s += self.model.amplitudes().matrix(q) * g;
            }
        }
        s
    }
}

impl StationaryKernel for EllipsoidKernel {
    fn num_outputs(&self) -> usize {
        self.model.num_channels()
    }

    fn input_dim(&self) -> usize {
        self.model.input_dim()
    }

    fn eval(&self, i: usize, j: usize, lag: &[f64]) -> f64 {
        self.model
            .basis()
            .components()
            .iter()
            .enumerate()
            .map(|(q, c)| {
                let a = self.model.amplitudes().matrix(q)[(i, j)];
                if a == 0.0 {
                    return 0.0;
                }
                a * (2.0 * PI * dot(lag, c.center())).cos() * c.ellipsoid_profile(self.order, lag)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{AmplitudeMatrixSet, BlockBasis, BlockComponent};

    fn model() -> MinecraftSpectralModel {
        let basis = BlockBasis::new(vec![
            BlockComponent::new(vec![0.0], vec![0.5]).unwrap(),
            BlockComponent::new(vec![1.0], vec![0.8]).unwrap(),
        ])
        .unwrap();
        let amps = AmplitudeMatrixSet::from_matrices(&[
            DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5]),
            DMatrix::from_row_slice(2, 2, &[0.7, -0.2, -0.2, 1.2]),
        ])
        .unwrap();
        MinecraftSpectralModel::new(basis, amps).unwrap()
    }

    #[test]
    fn zero_lag_is_amplitude_sum() {
        let k = MinecraftKernel::new(model());
        let total = k.model().amplitudes().total();
        for i in 0..2 {
            for j in 0..2 {
                assert!((k.eval(i, j, &[0.0]) - total[(i, j)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_shifts_reduce_exactly() {
        let plain = MinecraftKernel::new(model());
        let shifted =
            MinecraftKernel::with_channel_shifts(model(), &[vec![0.0], vec![0.0]], &[0.0, 0.0])
                .unwrap();
        for &r in &[-2.3, 0.0, 0.4, 1.9] {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(plain.eval(i, j, &[r]), shifted.eval(i, j, &[r]));
                }
            }
        }
    }

    #[test]
    fn pure_delay_shifts_the_cross_kernel() {
        let plain = MinecraftKernel::new(model());
        let theta = 0.35;
        let delayed =
            MinecraftKernel::with_channel_shifts(model(), &[vec![theta], vec![0.0]], &[0.0, 0.0])
                .unwrap();
        for &r in &[-1.0, 0.0, 0.25, 2.0] {
            assert!((delayed.eval(0, 1, &[r]) - plain.eval(0, 1, &[r + theta])).abs() < 1e-14);
            assert!((delayed.eval(1, 0, &[r]) - plain.eval(1, 0, &[r - theta])).abs() < 1e-14);
            assert_eq!(delayed.eval(0, 0, &[r]), plain.eval(0, 0, &[r]));
        }
    }

    #[test]
    fn indefinite_pair_phase_is_rejected() {
        // a rank-one amplitude leaves no room for a phase on one pair only
        let basis =
            BlockBasis::new(vec![BlockComponent::new(vec![1.0], vec![0.5]).unwrap()]).unwrap();
        let a = DMatrix::from_element(3, 3, 1.0);
        let m =
            MinecraftSpectralModel::new(basis, AmplitudeMatrixSet::from_matrices(&[a]).unwrap())
                .unwrap();
        let shift = PairShift {
            component: 0,
            i: 0,
            j: 1,
            delay: vec![0.0],
            phase: 2.0,
        };
        assert!(MinecraftKernel::with_shifts(m, &[shift]).is_err());
    }

    #[test]
    fn ellipsoid_order_below_dimension_rejected() {
        let basis = BlockBasis::new(vec![
            BlockComponent::new(vec![1.0, 0.0], vec![0.5, 0.5]).unwrap()
        ])
        .unwrap();
        let m = MinecraftSpectralModel::new(
            basis,
            AmplitudeMatrixSet::from_matrices(&[DMatrix::identity(1, 1)]).unwrap(),
        )
        .unwrap();
        assert!(EllipsoidKernel::new(m.clone(), 1).is_err());
        let k = EllipsoidKernel::new(m, 2).unwrap();
        assert!((k.eval(0, 0, &[0.0, 0.0]) - 1.0).abs() < 1e-11);
        assert_eq!(k.eval(0, 0, &[0.3, -0.2]), k.eval(0, 0, &[-0.3, 0.2]));
    }
}
