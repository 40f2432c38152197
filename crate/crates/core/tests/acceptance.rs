//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Pass criterion numbers to run a subset:
//! `cargo test --test acceptance -- 2 5`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use minecraft_kernel::cli::{
    changepoint_kernel, changepoint_profile, correlation_rows, main_with_args, ImageModels,
    RegimeCoupling, BUNDLED_CONFIG_DIR,
};
use minecraft_kernel::config::{
    self, ChangepointDemoConfig, CoherenceConfig, FitSeriesConfig, ImageDemoConfig,
};
use minecraft_kernel::fit::{
    fit_series, project_spectrum, simulate_series, Family, InitSampler, SeriesObjective,
    SeriesParams, TilingSpec,
};
use minecraft_kernel::gp::{gram, GpModel, InputPoint};
use minecraft_kernel::kernels::{
    BlockSm, Covariance, EllipsoidKernel, GaussianMosm, GaussianSm, MinecraftKernel,
    StationaryKernel,
};
use minecraft_kernel::spectral::{
    AmplitudeMatrixSet, BlockBasis, BlockComponent, GaussianComponent, GaussianMoSpectralModel,
    MinecraftSpectralModel, SpectralModel,
};

// ---------------------------------------------------------------- harness

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

#[derive(Default)]
struct Outcome {
    checks: Vec<Check>,
}

impl Outcome {
    fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

type Criterion = (usize, &'static str, f64, fn() -> Outcome);

const CRITERIA: [Criterion; 8] = [
    (1, "spectral consistency", 120.0, criterion_1),
    (2, "coherence pathology", 10.0, criterion_2),
    (3, "image correlations", 300.0, criterion_3),
    (4, "projection convergence", 120.0, criterion_4),
    (5, "change-point variance", 10.0, criterion_5),
    (6, "synthetic change-point benchmark", 900.0, criterion_6),
    (7, "numerical hygiene", 120.0, criterion_7),
    (8, "determinism", 300.0, criterion_8),
];

fn main() {
    let wanted: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = Vec::new();
    for (n, name, budget, run) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let mut outcome = run();
        let secs = start.elapsed().as_secs_f64();
        outcome.check(
            "runtime",
            secs <= budget,
            format!("{secs:.1}s <= {budget:.0}s"),
        );
        let verdict = if outcome.passed() { "PASS" } else { "FAIL" };
        let parts: Vec<String> = outcome
            .checks
            .iter()
            .map(|c| {
                format!(
                    "{} {}: {}",
                    if c.ok { "ok" } else { "FAILED" },
                    c.name,
                    c.detail
                )
            })
            .collect();
        println!("criterion {n} {name}: {verdict} [{}]", parts.join("; "));
        if !outcome.passed() {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

fn bundled<T: serde::de::DeserializeOwned>(name: &str) -> T {
    config::load(&Path::new(BUNDLED_CONFIG_DIR).join(name)).expect("bundled config")
}

// ------------------------------------------------------------- quadrature

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n {
        let mut t = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * t * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[k] = t;
        w[k] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// Composite tensor-product rule over a box, `panels` per axis.
fn box_nodes(lo: &[f64], hi: &[f64], panels: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
    let (x, w) = gauss_legendre(order);
    let mut axes = Vec::new();
    for (a, b) in lo.iter().zip(hi) {
        let h = (b - a) / panels as f64;
        let mut axis = Vec::new();
        for p in 0..panels {
            let left = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                axis.push((left + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
            }
        }
        axes.push(axis);
    }
    let mut out = vec![(Vec::new(), 1.0)];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|(pt, wt)| {
                axis.iter().map(move |&(v, wv)| {
                    let mut p = pt.clone();
                    p.push(v);
                    (p, wt * wv)
                })
            })
            .collect();
    }
    out
}

/// Nodes over the solid ellipse with centre `c` and full axes `w`, in
/// elliptical polar coordinates (Gauss in radius, trapezoid in angle).
fn ellipse_nodes(c: &[f64], w: &[f64]) -> Vec<(Vec<f64>, f64)> {
    let (x, wr) = gauss_legendre(40);
    let m = 256;
    let mut out = Vec::new();
    for (xi, wi) in x.iter().zip(&wr) {
        let rho = 0.5 * (xi + 1.0);
        for k in 0..m {
            let th = 2.0 * PI * k as f64 / m as f64;
            let nu = vec![
                c[0] + 0.5 * w[0] * rho * th.cos(),
                c[1] + 0.5 * w[1] * rho * th.sin(),
            ];
            let jac = 0.25 * w[0] * w[1] * rho;
            out.push((nu, 0.5 * wi * jac * 2.0 * PI / m as f64));
        }
    }
    out
}

// ------------------------------------------------------------ criterion 1

fn random_lags(rng: &mut ChaCha20Rng, d: usize) -> Vec<Vec<f64>> {
    (0..50)
        .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect()
}

/// Worst `|K - Q| / sqrt(K_ii(0) K_jj(0))` over lags and channel pairs,
/// with `Q(r) = sum_nodes w Re(S_ij(nu) exp(2 pi i nu.r))`.
fn fourier_error<K: StationaryKernel + ?Sized>(
    kernel: &K,
    nodes: &[(Vec<f64>, f64)],
    density: impl Fn(&[f64]) -> (DMatrix<f64>, DMatrix<f64>),
    lags: &[Vec<f64>],
) -> f64 {
    let n = kernel.num_outputs();
    let zero = vec![0.0; kernel.input_dim()];
    let dens: Vec<_> = nodes.iter().map(|(nu, _)| density(nu)).collect();
    let mut worst = 0.0f64;
    for r in lags {
        for i in 0..n {
            for j in 0..n {
                let q: f64 = nodes
                    .iter()
                    .zip(&dens)
                    .map(|((nu, w), (re, im))| {
                        let arg = 2.0 * PI * nu.iter().zip(r).map(|(a, b)| a * b).sum::<f64>();
                        w * (re[(i, j)] * arg.cos() - im[(i, j)] * arg.sin())
                    })
                    .sum();
                let scale = (kernel.eval(i, i, &zero) * kernel.eval(j, j, &zero)).sqrt();
                worst = worst.max((kernel.eval(i, j, r) - q).abs() / scale);
            }
        }
    }
    worst
}

fn real(m: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let z = DMatrix::zeros(m.nrows(), m.ncols());
    (m, z)
}

fn scalar(v: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    real(DMatrix::from_element(1, 1, v))
}

fn block(center: &[f64], width: &[f64]) -> BlockComponent {
    BlockComponent::new(center.to_vec(), width.to_vec()).unwrap()
}

/// Both mirror boxes of every block.
fn block_nodes(blocks: &[BlockComponent], panels: usize) -> Vec<(Vec<f64>, f64)> {
    let mut out = Vec::new();
    for b in blocks {
        for sign in [1.0, -1.0] {
            let lo: Vec<f64> = b
                .center()
                .iter()
                .zip(b.width())
                .map(|(c, w)| sign * c - 0.5 * w)
                .collect();
            let hi: Vec<f64> = b
                .center()
                .iter()
                .zip(b.width())
                .map(|(c, w)| sign * c + 0.5 * w)
                .collect();
            out.extend(box_nodes(&lo, &hi, panels, 16));
        }
    }
    out
}

fn spd(n: usize, rng: &mut ChaCha20Rng) -> DMatrix<f64> {
    let l = DMatrix::from_fn(n, n, |i, j| {
        if j <= i {
            rng.random_range(-1.0..1.0)
        } else {
            0.0
        }
    });
    &l * l.transpose() + DMatrix::identity(n, n) * 0.05
}

fn minecraft_model(
    blocks: Vec<BlockComponent>,
    n: usize,
    rng: &mut ChaCha20Rng,
) -> MinecraftSpectralModel {
    let mats: Vec<_> = blocks.iter().map(|_| spd(n, rng)).collect();
    MinecraftSpectralModel::new(
        BlockBasis::new(blocks).unwrap(),
        AmplitudeMatrixSet::from_matrices(&mats).unwrap(),
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::default();
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let record = |out: &mut Outcome, name: &str, err: f64, tol: f64| {
        out.check(name, err <= tol, format!("{err:.1e} <= {tol:.0e}"));
    };

    for d in [1usize, 2] {
        let comps: Vec<(f64, GaussianComponent)> = [(1.0, 0.7, 0.2), (0.5, 1.9, 0.4)]
            .iter()
            .map(|&(a, m, s)| {
                let mean = (0..d).map(|k| m * (1.0 - 0.3 * k as f64)).collect();
                let std = (0..d).map(|k| s * (1.0 + 0.2 * k as f64)).collect();
                (a, GaussianComponent::new(mean, std).unwrap())
            })
            .collect();
        let k = GaussianSm::new(comps).unwrap();
        let reach = 1.9 + 9.0 * 0.48;
        let nodes = box_nodes(
            &vec![-reach; d],
            &vec![reach; d],
            if d == 1 { 60 } else { 30 },
            16,
        );
        let lags = random_lags(&mut rng, d);
        let e = fourier_error(&k, &nodes, |nu| scalar(k.density(nu)), &lags);
        record(&mut out, &format!("gaussian-sm D={d}"), e, 1e-6);

        let blocks = if d == 1 {
            vec![block(&[0.6], &[0.8]), block(&[2.0], &[1.5])]
        } else {
            vec![
                block(&[0.6, 0.3], &[0.8, 0.5]),
                block(&[1.5, -1.0], &[0.6, 1.2]),
            ]
        };
        let k = BlockSm::new(vec![(0.7, blocks[0].clone()), (1.3, blocks[1].clone())]).unwrap();
        let nodes = block_nodes(&blocks, 4);
        let e = fourier_error(&k, &nodes, |nu| scalar(k.density(nu)), &lags);
        record(&mut out, &format!("block-sm D={d}"), e, 1e-6);

        for n in 1..=3 {
            let model = minecraft_model(blocks.clone(), n, &mut rng);
            let k = MinecraftKernel::new(model.clone());
            let e = fourier_error(&k, &nodes, |nu| real(model.density(nu)), &lags);
            record(&mut out, &format!("minecraft N={n} D={d}"), e, 1e-6);
        }

        let model = minecraft_model(blocks.clone(), 3, &mut rng);
        let delays: Vec<Vec<f64>> = (0..3)
            .map(|c| (0..d).map(|k| 0.3 * c as f64 - 0.1 * k as f64).collect())
            .collect();
        let k = MinecraftKernel::with_channel_shifts(model.clone(), &delays, &[0.0, 0.4, -0.7])
            .unwrap();
        let e = fourier_error(&k, &nodes, |nu| k.complex_density(nu), &lags);
        record(&mut out, &format!("delayed minecraft D={d}"), e, 1e-6);

        let model = minecraft_model(blocks.clone(), 2, &mut rng);
        let k = EllipsoidKernel::with_default_order(model);
        let nodes: Vec<(Vec<f64>, f64)> = if d == 1 {
            block_nodes(&blocks, 4)
        } else {
            blocks
                .iter()
                .flat_map(|b| {
                    let neg: Vec<f64> = b.center().iter().map(|c| -c).collect();
                    let mut v = ellipse_nodes(b.center(), b.width());
                    v.extend(ellipse_nodes(&neg, b.width()));
                    v
                })
                .collect()
        };
        let e = fourier_error(&k, &nodes, |nu| real(k.density(nu)), &lags);
        record(&mut out, &format!("bessel D={d}"), e, 1e-4);
    }
    out
}

// ------------------------------------------------------------ criterion 2

fn criterion_2() -> Outcome {
    let mut out = Outcome::default();

    let cfg: CoherenceConfig = bundled("coherence_gaussian.toml");
    let model = cfg.model.spectral_model().unwrap();
    let mut min_coh = f64::INFINITY;
    let mut worst_excess = f64::NEG_INFINITY;
    for nu in cfg.frequencies.values().unwrap() {
        let s = model.density(&[nu]);
        let bound = (s[(0, 0)] * s[(1, 1)]).sqrt();
        if bound > 0.0 {
            min_coh = min_coh.min(s[(0, 1)] / bound);
            worst_excess = worst_excess.max((s[(0, 1)].abs() - bound) / bound);
        }
    }
    out.check(
        "gaussian min coherence",
        min_coh <= 0.99,
        format!("{min_coh:.4} <= 0.99"),
    );
    out.check(
        "gaussian cross <= bound",
        worst_excess <= 1e-12,
        format!("max relative excess {worst_excess:.1e}"),
    );

    let cfg: CoherenceConfig = bundled("coherence_minecraft.toml");
    let model = cfg.model.spectral_model().unwrap();
    let blocks = match &cfg.model {
        config::KernelSpec::Minecraft { blocks, .. } => blocks.clone(),
        _ => panic!("bundled Minecraft config has another type"),
    };
    let mut worst = 0.0f64;
    for b in &blocks {
        for sign in [1.0, -1.0] {
            for k in 0..101 {
                let nu = sign * b.center[0] + b.width[0] * ((k as f64 + 0.5) / 101.0 - 0.5);
                let s = model.density(&[nu]);
                worst = worst.max((s[(0, 1)] / (s[(0, 0)] * s[(1, 1)]).sqrt() - 1.0).abs());
            }
        }
    }
    out.check(
        "minecraft coherence = 1",
        worst <= 1e-9,
        format!("max |c - 1| {worst:.1e}"),
    );
    out
}

// ------------------------------------------------------------ criterion 3

const TABLE_TARGET: [f64; 3] = [0.897, 0.960, 0.744];

fn criterion_3() -> Outcome {
    let mut out = Outcome::default();
    let cfg: ImageDemoConfig = bundled("image_demo.toml");

    // the frozen mixing reproduces the targets through the latent masses
    let w = DMatrix::from_fn(3, 3, |i, j| cfg.target.mixing[i][j]);
    let cov = &w * w.transpose();
    let frozen: Vec<f64> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt())
        .collect();

    let models = ImageModels::build(&cfg).unwrap();
    let rows = correlation_rows(&models);
    let get = |name: &str| {
        rows.iter()
            .find(|r| r.model == name)
            .unwrap()
            .values
            .clone()
    };
    let (target, mc, ga) = (get("target"), get("minecraft"), get("gaussian"));
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:+.4}"))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let dev = target
        .iter()
        .chain(&frozen)
        .zip(TABLE_TARGET.iter().chain(&TABLE_TARGET))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.check(
        "target within 0.005",
        dev <= 0.005,
        format!("target {}", fmt(&target)),
    );

    let me: Vec<f64> = mc.iter().zip(&target).map(|(a, b)| a - b).collect();
    let ge: Vec<f64> = ga.iter().zip(&target).map(|(a, b)| a - b).collect();
    out.check(
        "minecraft |err| <= 0.02",
        me.iter().all(|e| e.abs() <= 0.02),
        format!("errors {}", fmt(&me)),
    );
    let ratio = me
        .iter()
        .zip(&ge)
        .map(|(m, g)| g.abs() / m.abs().max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    out.check(
        "gaussian/minecraft >= 3",
        ratio >= 3.0,
        format!("min ratio {ratio:.1}"),
    );
    out.check(
        "gaussian errors negative",
        ge.iter().all(|&e| e < 0.0),
        format!("errors {}", fmt(&ge)),
    );

    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let code = main_with_args([
        "minecraft",
        "image-demo",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let secs = t.elapsed().as_secs_f64();
    out.check(
        "image-demo 64x64 runs",
        code == 0 && secs <= 300.0,
        format!("exit {code}, {secs:.1}s"),
    );
    out
}

// ------------------------------------------------------------ criterion 4

fn criterion_4() -> Outcome {
    let mut out = Outcome::default();
    let cfg: ImageDemoConfig = bundled("image_demo.toml");
    let target = cfg.target.build().unwrap();
    let half = 2.0;
    let cells = 128;
    let h = 2.0 * half / cells as f64;
    let mut dists = Vec::new();
    let mut counts = Vec::new();
    for per_axis in [4usize, 8, 16] {
        let tiling = TilingSpec::square(half, per_axis, 2).unwrap();
        let (basis, amps) = project_spectrum(&target, &tiling).unwrap();
        counts.push(basis.len());
        let model = MinecraftSpectralModel::new(basis, amps).unwrap();
        let mut l1 = 0.0;
        for a in 0..cells {
            for b in 0..cells {
                let nu = [-half + (a as f64 + 0.5) * h, -half + (b as f64 + 0.5) * h];
                l1 += (target.density(&nu) - model.density(&nu)).abs().sum() * h * h;
            }
        }
        dists.push(l1);
    }
    out.check(
        "component counts",
        counts == [8, 32, 128],
        format!("{counts:?}"),
    );
    out.check(
        "L1 strictly decreasing",
        dists.windows(2).all(|p| p[1] < p[0]),
        format!(
            "{}",
            dists
                .iter()
                .map(|d| format!("{d:.4}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ),
    );
    out
}

// ------------------------------------------------------------ criterion 5

fn criterion_5() -> Outcome {
    let mut out = Outcome::default();
    let cfg: ChangepointDemoConfig = bundled("changepoint_demo.toml");
    let x0 = 0.5;
    let base = cfg.kernel.build().unwrap();
    let k0 = base.eval(0, 0, &[0.0]).sqrt();

    let ratio = |coupling| {
        let k = changepoint_kernel(&cfg.kernel, coupling, x0, cfg.steepness).unwrap();
        changepoint_profile(&k, &[x0])[0] / k0
    };
    let r = ratio(RegimeCoupling::Independent);
    out.check(
        "independent",
        (r - 0.5f64.sqrt()).abs() <= 1e-6,
        format!("ratio {r:.9}"),
    );

    let k = changepoint_kernel(&cfg.kernel, RegimeCoupling::Identical, x0, cfg.steepness).unwrap();
    let xs = cfg.inputs.values().unwrap();
    let prof = changepoint_profile(&k, &xs);
    let spread = prof.iter().map(|s| (s - k0).abs()).fold(0.0, f64::max);
    out.check(
        "identical flat",
        spread <= 1e-9,
        format!("max deviation {spread:.1e}"),
    );

    for rho in [0.0, 0.5, 0.9, 1.0] {
        let r = ratio(RegimeCoupling::Coherent(rho));
        let want = (0.5 + 0.5 * rho).sqrt();
        out.check(
            &format!("coherence {rho}"),
            (r - want).abs() <= 1e-6,
            format!("ratio {r:.9} vs {want:.9}"),
        );
    }
    out
}

// ------------------------------------------------------------ criterion 6

fn criterion_6() -> Outcome {
    let mut out = Outcome::default();
    let truth: SeriesParams = bundled("synthetic_truth.toml");
    let base: FitSeriesConfig = bundled("fit_series.toml");
    let n = 200;
    let times: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let mut wins = 0;
    let mut pairs = Vec::new();
    for seed in 0..10u64 {
        let series = simulate_series("synthetic", &truth, &times, 100 + seed).unwrap();
        let mut score = BTreeMap::new();
        for family in [Family::Block, Family::Gaussian] {
            let mut fit = base.fit.clone();
            fit.family = family;
            let s = fit_series(&series, &fit)
                .map(|f| f.smse)
                .unwrap_or(f64::INFINITY);
            score.insert(family == Family::Block, s);
        }
        let (b, g) = (score[&true], score[&false]);
        if b <= g {
            wins += 1;
        }
        pairs.push(format!("{b:.3}/{g:.3}"));
    }
    out.check(
        "block <= gaussian on >= 8 of 10",
        wins >= 8,
        format!("{wins}/10 (block/gaussian SMSE {})", pairs.join(" ")),
    );
    out
}

// ------------------------------------------------------------ criterion 7

fn criterion_7() -> Outcome {
    let mut out = Outcome::default();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let sampler = InitSampler::default();

    let x: Vec<f64> = (0..40).map(|k| k as f64 / 39.0).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|t| (6.0 * t).sin() + 0.3 * (17.0 * t).cos())
        .collect();
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let family = if trial % 2 == 0 {
            Family::Block
        } else {
            Family::Gaussian
        };
        let obj = SeriesObjective::new(family, 3, x.clone(), y.clone()).unwrap();
        let theta = sampler.sample(family, 3, &mut rng).to_unconstrained();
        let (_, g) = obj.value_and_gradient(&theta);
        let fd: Vec<f64> = (0..theta.len())
            .map(|k| {
                let h = 1e-5 * theta[k].abs().max(1.0);
                let mut up = theta.clone();
                let mut dn = theta.clone();
                up[k] += h;
                dn[k] -= h;
                (obj.value(&up) - obj.value(&dn)) / (2.0 * h)
            })
            .collect();
        let diff: f64 = g
            .iter()
            .zip(&fd)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let norm: f64 = fd.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max(diff / norm.max(1e-12));
    }
    out.check(
        "gradient vs central differences",
        worst <= 1e-4,
        format!("max relative {worst:.1e}"),
    );

    let mut min_eig = f64::INFINITY;
    for trial in 0..20 {
        let d = 1 + trial % 2;
        let n = 1 + trial % 3;
        let kernel: Box<dyn Covariance> = match trial % 4 {
            0 | 1 => {
                let blocks = (0..3)
                    .map(|q| {
                        let c: Vec<f64> = (0..d).map(|k| 0.5 + q as f64 + 0.1 * k as f64).collect();
                        block(&c, &vec![rng.random_range(0.2..0.9); d])
                    })
                    .collect();
                Box::new(MinecraftKernel::new(minecraft_model(blocks, n, &mut rng)))
            }
            2 => {
                let comps = (0..3)
                    .map(|_| {
                        GaussianComponent::new(
                            (0..d).map(|_| rng.random_range(0.0..2.0)).collect(),
                            (0..d).map(|_| rng.random_range(0.1..0.5)).collect(),
                        )
                        .unwrap()
                    })
                    .collect();
                let a = DMatrix::from_fn(3, n, |_, _| rng.random_range(0.1..1.0));
                Box::new(GaussianMosm::new(
                    GaussianMoSpectralModel::new(comps, a).unwrap(),
                ))
            }
            _ => {
                let family = if trial % 8 == 3 {
                    Family::Block
                } else {
                    Family::Gaussian
                };
                Box::new(sampler.sample(family, 3, &mut rng).kernel().unwrap())
            }
        };
        let (d, n) = (kernel.dimension(), kernel.output_count());
        let pts: Vec<InputPoint> = (0..30)
            .map(|_| {
                InputPoint::new(
                    (0..d).map(|_| rng.random_range(-2.0..2.0)).collect(),
                    rng.random_range(0..n),
                )
            })
            .collect();
        let k = gram(kernel.as_ref(), &pts);
        let scale = k.diagonal().max();
        min_eig = min_eig.min(k.symmetric_eigenvalues().min() / scale);
    }
    out.check(
        "random Grams PSD",
        min_eig >= -1e-8,
        format!("min eigenvalue / max diagonal {min_eig:.1e}"),
    );

    let model = minecraft_model(
        vec![block(&[0.5], &[1.0]), block(&[1.5], &[1.0])],
        2,
        &mut rng,
    );
    let pts: Vec<InputPoint> = (0..8)
        .map(|k| InputPoint::scalar(0.15 * k as f64, k % 2))
        .collect();
    let gp = GpModel::noiseless(MinecraftKernel::new(model));
    let draws = 20000;
    let s = gp.sample_prior(&pts, 5, draws).unwrap();
    let emp = &s * s.transpose() / draws as f64;
    let k = gram(gp.kernel(), &pts);
    let rel = (&emp - &k).norm() / k.norm();
    out.check(
        "sample covariance",
        rel <= 0.05,
        format!("Frobenius relative {rel:.3}"),
    );
    out
}

// ------------------------------------------------------------ criterion 8

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.toml")
        .map(|p: PathBuf| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::default();
    for cmd in [
        "coherence",
        "image-demo",
        "changepoint-demo",
        "fit-series",
        "kernel-eval",
    ] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let first = main_with_args(["minecraft", cmd, "--out", a.path().to_str().unwrap()]);
        let manifest = a.path().join("manifest.toml");
        let second = main_with_args([
            "minecraft",
            cmd,
            "--config",
            manifest.to_str().unwrap(),
            "--out",
            b.path().to_str().unwrap(),
        ]);
        let (fa, fb) = (files(a.path()), files(b.path()));
        let same = first == 0 && second == 0 && !fa.is_empty() && fa == fb;
        out.check(cmd, same, format!("{} files", fa.len()));
    }
    out
}
