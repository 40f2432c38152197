//! Regenerates the bundled change-point series:
//!
//!     cargo run --example simulate_series -- configs/synthetic_truth.toml 200 0 out.csv

use std::path::PathBuf;

use minecraft_kernel::config;
use minecraft_kernel::data::write_csv;
use minecraft_kernel::fit::{simulate_series, SeriesParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [truth, n, seed, out] = args.as_slice() else {
        return Err("usage: simulate_series <truth.toml> <points> <seed> <out.csv>".into());
    };
    let params: SeriesParams = config::load(&PathBuf::from(truth))?;
    let n: usize = n.parse()?;
    let times: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let series = simulate_series("synthetic", &params, &times, seed.parse()?)?;
    write_csv(&PathBuf::from(out), &series)?;
    Ok(())
}
