//! Output writers: atomic file replacement, CSV tables and binary PPM.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid("output path has no file name"))?;
    let tmp: PathBuf = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes)
        .and_then(|_| f.sync_all())
        .map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// A CSV table held in memory until written.
#[derive(Debug, Clone)]
pub struct Table {
    body: String,
    columns: usize,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut body = String::new();
        for (k, h) in header.iter().enumerate() {
            if k > 0 {
                body.push(',');
            }
            body.push_str(h.as_ref());
        }
        body.push('\n');
        Self {
            body,
            columns: header.len(),
        }
    }

    /// Appends a row of preformatted fields.
    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        self.body.push_str(&fields.join(","));
        self.body.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.body
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.body.as_bytes())
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    let mut s = String::new();
    let _ = write!(s, "{x}");
    s
}

/// Binary PPM (P6): channels map to R, G, B as `|value|` scaled so the
/// largest magnitude in the image becomes 255.
pub fn ppm_bytes(channels: &[DMatrix<f64>]) -> Result<Vec<u8>> {
    if channels.is_empty() || channels.len() > 3 {
        return Err(Error::invalid(
            "an image needs between one and three channels",
        ));
    }
    let (rows, cols) = channels[0].shape();
    if channels.iter().any(|c| c.shape() != (rows, cols)) {
        return Err(Error::invalid("image channels differ in shape"));
    }
    let peak = channels
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { 255.0 / peak } else { 0.0 };
    let mut out = format!("P6\n{cols} {rows}\n255\n").into_bytes();
    out.reserve(rows * cols * 3);
    for r in 0..rows {
        for c in 0..cols {
            for k in 0..3 {
                let v = channels.get(k).map_or(0.0, |m| m[(r, c)].abs());
                out.push((v * scale).round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_golden_bytes() {
        let r = DMatrix::from_row_slice(1, 2, &[2.0, -1.0]);
        let g = DMatrix::from_row_slice(1, 2, &[0.0, 4.0]);
        let b = DMatrix::from_row_slice(1, 2, &[-4.0, 1.0]);
        let bytes = ppm_bytes(&[r, g, b]).unwrap();
        let mut expected = b"P6\n2 1\n255\n".to_vec();
        expected.extend_from_slice(&[128, 0, 255, 64, 255, 64]);
        assert_eq!(bytes, expected);
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
