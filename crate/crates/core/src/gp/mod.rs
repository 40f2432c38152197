//! Exact multi-output GP inference on interleaved `(location, channel)` rows.

mod grid;

pub use grid::{sample_grid, GridSample, GridSpec};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernels::Covariance;

/// Jitter ladder tried by [`chol_with_jitter`], smallest first.
pub const JITTER_LADDER: [f64; 7] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

/// An input location tagged with its output channel (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct InputPoint {
    pub x: Vec<f64>,
    pub channel: usize,
}

impl InputPoint {
    pub fn new(x: Vec<f64>, channel: usize) -> Self {
        Self { x, channel }
    }

    pub fn scalar(x: f64, channel: usize) -> Self {
        Self {
            x: vec![x],
            channel,
        }
    }
}

/// Observations of a multi-output process, one row per `(location, channel)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiOutputDataset {
    inputs: Vec<InputPoint>,
    targets: DVector<f64>,
}

impl MultiOutputDataset {
    pub fn new(inputs: Vec<InputPoint>, targets: Vec<f64>) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::invalid(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        if targets.iter().any(|t| !t.is_finite())
            || inputs.iter().any(|p| p.x.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::invalid("dataset contains NaN or Inf"));
        }
        if let Some(p) = inputs.first() {
            if inputs.iter().any(|q| q.x.len() != p.x.len()) {
                return Err(Error::invalid("inputs differ in dimension"));
            }
        }
        Ok(Self {
            inputs,
            targets: DVector::from_vec(targets),
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[InputPoint] {
        &self.inputs
    }

    pub fn targets(&self) -> &DVector<f64> {
        &self.targets
    }
}

/// `M_ab = K_{c(a) c(b)}(x_a, x_b)`, symmetrised.
pub fn gram<K: Covariance + ?Sized>(kernel: &K, points: &[InputPoint]) -> DMatrix<f64> {
    let n = points.len();
    let mut m = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..=a {
            let (pa, pb) = (&points[a], &points[b]);
            let v = 0.5
                * (kernel.cov(&pa.x, pa.channel, &pb.x, pb.channel)
                    + kernel.cov(&pb.x, pb.channel, &pa.x, pa.channel));
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    m
}

/// `M_ab = K_{c(a) c(b)}(x_a, y_b)`.
pub fn cross_gram<K: Covariance + ?Sized>(
    kernel: &K,
    rows: &[InputPoint],
    cols: &[InputPoint],
) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |a, b| {
        kernel.cov(&rows[a].x, rows[a].channel, &cols[b].x, cols[b].channel)
    })
}

/// A Cholesky factor of `M + jitter I`.
#[derive(Debug, Clone)]
pub struct JitteredCholesky {
    pub factor: Cholesky<f64, Dyn>,
    pub jitter: f64,
}

impl JitteredCholesky {
    pub fn l(&self) -> DMatrix<f64> {
        self.factor.l()
    }

    /// `log det(M + jitter I)`.
    pub fn log_det(&self) -> f64 {
        2.0 * self
            .factor
            .l_dirty()
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum::<f64>()
    }
}

/// Cholesky of `M + j I` for the first `j` on [`JITTER_LADDER`] that succeeds.
pub fn chol_with_jitter(m: &DMatrix<f64>) -> Result<JitteredCholesky> {
    let n = m.nrows();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPsd { max_jitter: 0.0 });
    }
    for &jitter in &JITTER_LADDER {
        let mut loaded = m.clone();
        for i in 0..n {
            loaded[(i, i)] += jitter;
        }
        if let Some(factor) = loaded.cholesky() {
            return Ok(JitteredCholesky { factor, jitter });
        }
    }
    Err(Error::NotPsd {
        max_jitter: JITTER_LADDER[JITTER_LADDER.len() - 1],
    })
}

/// A kernel plus per-channel Gaussian observation noise.
#[derive(Debug, Clone)]
pub struct GpModel<K> {
    kernel: K,
    noise: Vec<f64>,
}

impl<K: Covariance> GpModel<K> {
    /// One noise variance per channel. Zero is allowed here but rejected by
    /// the inference paths.
    pub fn new(kernel: K, noise: Vec<f64>) -> Result<Self> {
        if noise.len() != kernel.output_count() {
            return Err(Error::invalid(format!(
                "{} noise variances for a {}-output kernel",
                noise.len(),
                kernel.output_count()
            )));
        }
        if noise.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("noise variances must be finite and >= 0"));
        }
        Ok(Self { kernel, noise })
    }

    /// Noise-free model for prior sampling.
    pub fn noiseless(kernel: K) -> Self {
        let n = kernel.output_count();
        Self {
            kernel,
            noise: vec![0.0; n],
        }
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    fn check_points(&self, points: &[InputPoint]) -> Result<()> {
        let n = self.kernel.output_count();
        let d = self.kernel.dimension();
        for p in points {
            if p.channel >= n {
                return Err(Error::invalid(format!(
                    "channel {} out of range for a {n}-output kernel",
                    p.channel
                )));
            }
            if p.x.len() != d {
                return Err(Error::invalid(format!(
                    "input of dimension {} for a {d}-dimensional kernel",
                    p.x.len()
                )));
            }
        }
        Ok(())
    }

    /// `num_samples` latent draws `L z` at `points`, one per column.
    pub fn sample_prior(
        &self,
        points: &[InputPoint],
        seed: u64,
        num_samples: usize,
    ) -> Result<DMatrix<f64>> {
        self.check_points(points)?;
        let chol = chol_with_jitter(&gram(&self.kernel, points))?;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let z = DMatrix::from_fn(points.len(), num_samples, |_, _| {
            StandardNormal.sample(&mut rng)
        });
        Ok(chol.l() * z)
    }

    fn noisy_factor(&self, data: &MultiOutputDataset) -> Result<JitteredCholesky> {
        self.check_points(data.inputs())?;
        if data.is_empty() {
            return Err(Error::invalid("dataset is empty"));
        }
        let mut k = gram(&self.kernel, data.inputs());
        for (a, p) in data.inputs().iter().enumerate() {
            let s = self.noise[p.channel];
            if s <= 0.0 {
                return Err(Error::invalid(format!(
                    "channel {} has zero noise; inference needs a positive noise variance",
                    p.channel
                )));
            }
            k[(a, a)] += s;
        }
        chol_with_jitter(&k)
    }

    /// `-1/2 y^T (K + S)^-1 y - 1/2 log det(K + S) - n/2 log 2 pi`.
    pub fn log_marginal_likelihood(&self, data: &MultiOutputDataset) -> Result<f64> {
        let chol = self.noisy_factor(data)?;
        let alpha = chol.factor.solve(data.targets());
        let n = data.len() as f64;
        Ok(-0.5 * data.targets().dot(&alpha)
            - 0.5 * chol.log_det()
            - 0.5 * n * (2.0 * std::f64::consts::PI).ln())
    }

    /// Posterior latent mean and variance at `test`.
    pub fn predict(
        &self,
        data: &MultiOutputDataset,
        test: &[InputPoint],
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        self.check_points(test)?;
        let chol = self.noisy_factor(data)?;
        let alpha = chol.factor.solve(data.targets());
        let ks = cross_gram(&self.kernel, data.inputs(), test);
        let mean = ks.transpose() * &alpha;
        let v = chol
            .factor
            .l_dirty()
            .solve_lower_triangular(&ks)
            .ok_or(Error::NotPsd {
                max_jitter: chol.jitter,
            })?;
        let var = DVector::from_fn(test.len(), |t, _| {
            let p = &test[t];
            let prior = self.kernel.cov(&p.x, p.channel, &p.x, p.channel);
            let explained: f64 = v.column(t).norm_squared();
            (prior - explained).max(0.0)
        });
        Ok((mean, var))
    }
}

/// Mean squared error divided by the (population) variance of `train`.
pub fn smse(predicted: &[f64], actual: &[f64], train: &[f64]) -> Result<f64> {
    if predicted.is_empty() || predicted.len() != actual.len() || train.is_empty() {
        return Err(Error::invalid("smse needs equal-length, non-empty vectors"));
    }
    let var = population_variance(train);
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance("training targets are constant"));
    }
    let mse = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum::<f64>()
        / predicted.len() as f64;
    Ok(mse / var)
}

pub(crate) fn population_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Matern, Smoothness};

    fn matern() -> Matern {
        Matern::new(Smoothness::FiveHalves, 0.3, 1.0, 1).unwrap()
    }

    #[test]
    fn single_point_gram() {
        let g = gram(&matern(), &[InputPoint::scalar(0.2, 0)]);
        assert_eq!(g, DMatrix::from_element(1, 1, 1.0));
    }

    #[test]
    fn identity_uses_first_rung() {
        let c = chol_with_jitter(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(c.jitter, 1e-10);
        assert!((c.l() - DMatrix::identity(3, 3)).amax() < 1e-10);
    }

    #[test]
    fn rank_deficient_matrix_factors() {
        let c = chol_with_jitter(&DMatrix::from_element(2, 2, 1.0)).unwrap();
        assert!(c.jitter <= 1e-4);
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(chol_with_jitter(&m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn lml_single_zero_observation() {
        let model = GpModel::new(
            Matern::new(Smoothness::Half, 1.0, 0.5, 1).unwrap(),
            vec![0.5],
        )
        .unwrap();
        let data = MultiOutputDataset::new(vec![InputPoint::scalar(0.0, 0)], vec![0.0]).unwrap();
        let lml = model.log_marginal_likelihood(&data).unwrap();
        assert!((lml + 0.918_938_533_204_672_7).abs() < 1e-9);
    }

    #[test]
    fn zero_noise_inference_rejected() {
        let model = GpModel::noiseless(matern());
        let data = MultiOutputDataset::new(
            vec![InputPoint::scalar(0.0, 0), InputPoint::scalar(0.0, 0)],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(model.log_marginal_likelihood(&data).is_err());
    }

    #[test]
    fn smse_examples() {
        assert_eq!(smse(&[1.0, 2.0], &[1.0, 2.0], &[0.0, 1.0]).unwrap(), 0.0);
        let train = [1.0, 3.0];
        let s = smse(&[2.0, 2.0], &[1.0, 3.0], &train).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        assert!(matches!(
            smse(&[1.0], &[1.0], &[2.0, 2.0]),
            Err(Error::DegenerateVariance(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let model = GpModel::noiseless(matern());
        let pts: Vec<_> = (0..5)
            .map(|k| InputPoint::scalar(0.1 * k as f64, 0))
            .collect();
        let a = model.sample_prior(&pts, 7, 3).unwrap();
        let b = model.sample_prior(&pts, 7, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, model.sample_prior(&pts, 8, 3).unwrap());
    }
}
