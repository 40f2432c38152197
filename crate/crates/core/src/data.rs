//! Time-series ingestion, splitting and standardisation.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum series length accepted by [`split_train_test`].
pub const MIN_SPLIT_LEN: usize = 10;

/// Strictly increasing times with finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    name: String,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid("times and values differ in length"));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("series contains NaN or Inf"));
        }
        if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneTime { line: k as u64 + 2 });
        }
        Ok(Self {
            times,
            values,
            name: name.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn subset(&self, idx: &[usize]) -> TimeSeries {
        TimeSeries {
            times: idx.iter().map(|&i| self.times[i]).collect(),
            values: idx.iter().map(|&i| self.values[i]).collect(),
            name: self.name.clone(),
        }
    }
}

/// Reads `time_column` and `value_column` from a headed CSV file. Lines
/// starting with `#` are skipped. Reported line numbers are 1-based file lines.
pub fn load_csv(path: &Path, time_column: &str, value_column: &str) -> Result<TimeSeries> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    // keep physical line numbers while dropping comment lines
    let mut kept = String::new();
    let mut line_of = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim_start().starts_with('#') || line.trim().is_empty() {
            continue;
        }
        kept.push_str(&line);
        kept.push('\n');
        line_of.push(k as u64 + 1);
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(kept.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: line_of.first().copied().unwrap_or(1),
            column: String::new(),
            message: e.to_string(),
        })?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse {
                line: line_of.first().copied().unwrap_or(1),
                column: name.to_string(),
                message: "column not found in header".into(),
            })
    };
    let (ti, vi) = (find(time_column)?, find(value_column)?);
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = line_of.get(row + 1).copied().unwrap_or(0);
        let record = record.map_err(|e| Error::Parse {
            line,
            column: String::new(),
            message: e.to_string(),
        })?;
        let parse = |idx: usize, name: &str| -> Result<f64> {
            let field = record.get(idx).unwrap_or("");
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    column: name.to_string(),
                    message: format!("`{field}` is not a finite number"),
                })
        };
        let t = parse(ti, time_column)?;
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(Error::NonMonotoneTime { line });
            }
        }
        times.push(t);
        values.push(parse(vi, value_column)?);
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    TimeSeries::new(name, times, values)
}

/// Writes `time,value` with full round-trip precision.
pub fn write_csv(path: &Path, series: &TimeSeries) -> Result<()> {
    let mut out =
        std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    let mut body = String::from("time,value\n");
    for (t, v) in series.times.iter().zip(&series.values) {
        body.push_str(&format!("{t:?},{v:?}\n"));
    }
    out.write_all(body.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// How [`split_train_test`] chooses the held-out points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum SplitMode {
    /// Hold out the final segment.
    Tail,
    /// Seeded random subset; both parts keep time order.
    Random { seed: u64 },
}

/// `ceil(ratio * n)` training points, the rest for testing.
pub fn split_train_test(
    series: &TimeSeries,
    ratio: f64,
    mode: SplitMode,
) -> Result<(TimeSeries, TimeSeries)> {
    let n = series.len();
    if n < MIN_SPLIT_LEN {
        return Err(Error::TooShort {
            len: n,
            min: MIN_SPLIT_LEN,
        });
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid("split ratio must lie in (0, 1)"));
    }
    // guard against 0.9 * n landing a hair above an integer
    let n_train = ((ratio * n as f64) - 1e-9).ceil() as usize;
    let n_train = n_train.clamp(1, n - 1);
    let idx: Vec<usize> = (0..n).collect();
    let (mut train, mut test): (Vec<usize>, Vec<usize>) = match mode {
        SplitMode::Tail => (idx[..n_train].to_vec(), idx[n_train..].to_vec()),
        SplitMode::Random { seed } => {
            let mut shuffled = idx;
            shuffled.shuffle(&mut ChaCha20Rng::seed_from_u64(seed));
            (shuffled[..n_train].to_vec(), shuffled[n_train..].to_vec())
        }
    };
    train.sort_unstable();
    test.sort_unstable();
    Ok((series.subset(&train), series.subset(&test)))
}

/// Affine map fitted on the training values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: f64,
    pub std: f64,
}

impl Standardization {
    pub fn apply(&self, x: f64) -> f64 {
        (x - self.mean) / self.std
    }

    pub fn invert(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

/// Subtracts the training mean and divides by the training (population) std.
pub fn standardize(
    train: &TimeSeries,
    test: &TimeSeries,
) -> Result<(TimeSeries, TimeSeries, Standardization)> {
    if train.is_empty() {
        return Err(Error::DegenerateVariance("training series is empty"));
    }
    let n = train.len() as f64;
    let mean = train.values.iter().sum::<f64>() / n;
    let var = train
        .values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n;
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance("training values are constant"));
    }
    let stats = Standardization {
        mean,
        std: var.sqrt(),
    };
    let map = |s: &TimeSeries| TimeSeries {
        times: s.times.clone(),
        values: s.values.iter().map(|&v| stats.apply(v)).collect(),
        name: s.name.clone(),
    };
    Ok((map(train), map(test), stats))
}

/// Inverse of [`standardize`] for one series.
pub fn destandardize(series: &TimeSeries, stats: &Standardization) -> TimeSeries {
    TimeSeries {
        times: series.times.clone(),
        values: series.values.iter().map(|&z| stats.invert(z)).collect(),
        name: series.name.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> TimeSeries {
        TimeSeries::new(
            "r",
            (0..n).map(|k| k as f64).collect(),
            (0..n).map(|k| (k as f64).sin()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn tail_split_sizes() {
        let (tr, te) = split_train_test(&ramp(100), 0.9, SplitMode::Tail).unwrap();
        assert_eq!((tr.len(), te.len()), (90, 10));
        assert!(tr.times().last() < te.times().first());
        let (tr, te) = split_train_test(&ramp(10), 0.9, SplitMode::Tail).unwrap();
        assert_eq!((tr.len(), te.len()), (9, 1));
    }

    #[test]
    fn short_series_rejected() {
        assert!(matches!(
            split_train_test(&ramp(9), 0.9, SplitMode::Tail),
            Err(Error::TooShort { len: 9, .. })
        ));
    }

    #[test]
    fn random_split_is_reproducible_partition() {
        let s = ramp(37);
        let a = split_train_test(&s, 0.9, SplitMode::Random { seed: 3 }).unwrap();
        let b = split_train_test(&s, 0.9, SplitMode::Random { seed: 3 }).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<f64> = a.0.times().iter().chain(a.1.times()).copied().collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, s.times());
    }

    #[test]
    fn standardize_moments_and_inverse() {
        let s = ramp(50);
        let (tr, _, stats) = standardize(&s, &s).unwrap();
        let n = tr.len() as f64;
        let mean = tr.values().iter().sum::<f64>() / n;
        let var = tr.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() <= 1e-12);
        assert!((var.sqrt() - 1.0).abs() <= 1e-12);
        let back = destandardize(&tr, &stats);
        for (a, b) in back.values().iter().zip(s.values()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn constant_series_is_degenerate() {
        let s = TimeSeries::new("c", (0..12).map(|k| k as f64).collect(), vec![2.0; 12]).unwrap();
        assert!(matches!(
            standardize(&s, &s),
            Err(Error::DegenerateVariance(_))
        ));
    }
}
