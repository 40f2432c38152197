//! Joint sampling of a multi-output stationary process on a regular 2-D grid
//! by circulant embedding. Dense Cholesky is cubic in the pixel count; this is
//! `O(M log M)` per channel pair on the doubled torus of `M` cells.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kernels::StationaryKernel;

/// A `rows x cols` pixel grid with uniform spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
}

/// Per-channel sample images (`rows x cols`) and the fraction of spectral
/// mass discarded by clipping negative eigenvalues of the embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub channels: Vec<DMatrix<f64>>,
    pub clipped_fraction: f64,
}

struct Fft2 {
    rows: usize,
    cols: usize,
    planner: FftPlanner<f64>,
}

impl Fft2 {
    fn run(&mut self, data: &mut [Complex<f64>], inverse: bool) {
        let (r, c) = (self.rows, self.cols);
        let row_fft = if inverse {
            self.planner.plan_fft_inverse(c)
        } else {
            self.planner.plan_fft_forward(c)
        };
        for row in data.chunks_mut(c) {
            row_fft.process(row);
        }
        let col_fft = if inverse {
            self.planner.plan_fft_inverse(r)
        } else {
            self.planner.plan_fft_forward(r)
        };
        let mut column = vec![Complex::new(0.0, 0.0); r];
        for j in 0..c {
            for i in 0..r {
                column[i] = data[i * c + j];
            }
            col_fft.process(&mut column);
            for i in 0..r {
                data[i * c + j] = column[i];
            }
        }
    }
}

/// Signed lag of torus index `k` on a ring of size `m` (`m` even).
fn wrapped(k: usize, m: usize) -> f64 {
    if k <= m / 2 {
        k as f64
    } else {
        k as f64 - m as f64
    }
}

/// Draws one joint sample of every channel of an even 2-D kernel on `grid`.
pub fn sample_grid<K: StationaryKernel + ?Sized>(
    kernel: &K,
    grid: GridSpec,
    seed: u64,
) -> Result<GridSample> {
    if kernel.input_dim() != 2 {
        return Err(Error::invalid("grid sampling needs a 2-D kernel"));
    }
    if grid.rows == 0 || grid.cols == 0 || !(grid.spacing > 0.0) {
        return Err(Error::invalid("grid needs positive size and spacing"));
    }
    let n = kernel.num_outputs();
    let (mr, mc) = (2 * grid.rows, 2 * grid.cols);
    let m = mr * mc;
    let mut fft = Fft2 {
        rows: mr,
        cols: mc,
        planner: FftPlanner::new(),
    };

    // eigenvalues of each circulant block: lambda[(i, j)][cell]
    let mut lambda = vec![vec![0.0; m]; n * n];
    for i in 0..n {
        for j in i..n {
            let mut buf: Vec<Complex<f64>> = (0..m)
                .map(|idx| {
                    let lag = [
                        wrapped(idx / mc, mr) * grid.spacing,
                        wrapped(idx % mc, mc) * grid.spacing,
                    ];
                    Complex::new(kernel.eval(i, j, &lag), 0.0)
                })
                .collect();
            fft.run(&mut buf, false);
            let re: Vec<f64> = buf.iter().map(|z| z.re).collect();
            lambda[i * n + j] = re.clone();
            lambda[j * n + i] = re;
        }
    }

    // per-frequency square roots of the N x N spectral matrices
    let mut factors = Vec::with_capacity(m);
    let (mut kept, mut dropped) = (0.0, 0.0);
    for cell in 0..m {
        let s = DMatrix::from_fn(n, n, |i, j| lambda[i * n + j][cell]);
        let eig = s.symmetric_eigen();
        let mut f = eig.eigenvectors.clone();
        for (k, &ev) in eig.eigenvalues.iter().enumerate() {
            if ev > 0.0 {
                kept += ev;
            } else {
                dropped -= ev;
            }
            let scale = ev.max(0.0).sqrt();
            f.column_mut(k).scale_mut(scale);
        }
        factors.push(f);
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let eps: Vec<Vec<Complex<f64>>> = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    Complex::new(
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                    )
                })
                .collect()
        })
        .collect();
    let norm = 1.0 / (m as f64).sqrt();
    let mut channels = Vec::with_capacity(n);
    for i in 0..n {
        let mut buf: Vec<Complex<f64>> = (0..m)
            .map(|cell| {
                let f = &factors[cell];
                (0..n)
                    .map(|j| eps[j][cell] * f[(i, j)])
                    .sum::<Complex<f64>>()
                    * norm
            })
            .collect();
        fft.run(&mut buf, true);
        channels.push(DMatrix::from_fn(grid.rows, grid.cols, |r, c| {
            buf[r * mc + c].re
        }));
    }
    let clipped_fraction = if kept > 0.0 { dropped / kept } else { 0.0 };
    Ok(GridSample {
        channels,
        clipped_fraction,
    })
}
