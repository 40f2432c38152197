//! C interface to `minecraft-kernel`.
//!
//! Kernels and spectral models are built from the same TOML tables the CLI
//! reads and handed out as opaque pointers. Every fallible call returns an
//! [`MkStatus`]; on failure the message is available from
//! [`mk_last_error`] on the same thread until the next failing call.
//! Panics are caught at the boundary and reported as `MK_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use minecraft_kernel::config::{from_toml_str, KernelSpec};
use minecraft_kernel::kernels::StationaryKernel;
use minecraft_kernel::spectral::SpectralModel;
use minecraft_kernel::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// A stationary multi-output kernel.
pub struct MkKernel {
    inner: Box<dyn StationaryKernel>,
}

/// A real multi-output spectral density.
pub struct MkSpectrum {
    inner: Box<dyn SpectralModel>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MkStatus {
    match e.root() {
        Error::Config { .. } => MkStatus::Config,
        Error::InvalidParameter(_) | Error::TooShort { .. } => MkStatus::InvalidArgument,
        Error::Io { .. } | Error::Parse { .. } | Error::NonMonotoneTime { .. } => MkStatus::Io,
        _ => MkStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (MkStatus, String)>) -> MkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MkStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            MkStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (MkStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MkStatus, String) {
    (MkStatus::NullPointer, format!("`{what}` is null"))
}

fn invalid(message: impl Into<String>) -> (MkStatus, String) {
    (MkStatus::InvalidArgument, message.into())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (MkStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("`{what}` is not valid UTF-8")))
}

unsafe fn read_slice<'a, T>(
    p: *const T,
    len: usize,
    what: &str,
) -> Result<&'a [T], (MkStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn parse_spec(text: &str) -> Result<KernelSpec, (MkStatus, String)> {
    from_toml_str::<KernelSpec>(text, "<ffi>").map_err(lib_err)
}

/// Message of the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version, NUL terminated, static.
#[no_mangle]
pub extern "C" fn mk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a kernel from a TOML table with a `type` key.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mk_kernel_from_toml(
    toml: *const c_char,
    out: *mut *mut MkKernel,
) -> MkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = parse_spec(read_str(toml, "toml")?)?;
        let inner = spec.build().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MkKernel { inner }));
        Ok(())
    })
}

/// Releases a kernel; NULL is ignored.
///
/// # Safety
/// `kernel` must come from [`mk_kernel_from_toml`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn mk_kernel_free(kernel: *mut MkKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Number of outputs and input dimension.
///
/// # Safety
/// `kernel` must be a live handle; `outputs` and `dim` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn mk_kernel_shape(
    kernel: *const MkKernel,
    outputs: *mut usize,
    dim: *mut usize,
) -> MkStatus {
    guard(|| {
        let k = kernel.as_ref().ok_or_else(|| null("kernel"))?;
        if !outputs.is_null() {
            *outputs = k.inner.num_outputs();
        }
        if !dim.is_null() {
            *dim = k.inner.input_dim();
        }
        Ok(())
    })
}

/// `K_ij(lag)` with `lag` of length `dim`.
///
/// # Safety
/// `kernel` must be a live handle, `lag` readable for `dim` values and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mk_kernel_eval(
    kernel: *const MkKernel,
    i: usize,
    j: usize,
    lag: *const f64,
    dim: usize,
    out: *mut f64,
) -> MkStatus {
    guard(|| {
        let k = kernel.as_ref().ok_or_else(|| null("kernel"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let lag = read_slice(lag, dim, "lag")?;
        let n = k.inner.num_outputs();
        if i >= n || j >= n {
            return Err(invalid(format!(
                "output index out of range for a {n}-output kernel"
            )));
        }
        if dim != k.inner.input_dim() {
            return Err(invalid(format!(
                "lag has dimension {dim}, kernel expects {}",
                k.inner.input_dim()
            )));
        }
        *out = k.inner.eval(i, j, lag);
        Ok(())
    })
}

/// Gram matrix of `n` points: `x` is `n x dim` row-major, `channels` has
/// `n` entries and `out` receives `n x n` row-major values.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must not alias the
/// inputs.
#[no_mangle]
pub unsafe extern "C" fn mk_kernel_gram(
    kernel: *const MkKernel,
    x: *const f64,
    channels: *const usize,
    n: usize,
    dim: usize,
    out: *mut f64,
) -> MkStatus {
    guard(|| {
        let k = kernel.as_ref().ok_or_else(|| null("kernel"))?;
        if dim != k.inner.input_dim() {
            return Err(invalid(format!(
                "points have dimension {dim}, kernel expects {}",
                k.inner.input_dim()
            )));
        }
        let total = n
            .checked_mul(dim)
            .ok_or_else(|| invalid("n * dim overflows"))?;
        let cells = n.checked_mul(n).ok_or_else(|| invalid("n * n overflows"))?;
        let x = read_slice(x, total, "x")?;
        let ch = read_slice(channels, n, "channels")?;
        if cells > 0 && out.is_null() {
            return Err(null("out"));
        }
        if let Some(&c) = ch.iter().find(|&&c| c >= k.inner.num_outputs()) {
            return Err(invalid(format!("channel {c} out of range")));
        }
        let mut lag = vec![0.0; dim];
        for a in 0..n {
            for b in 0..n {
                for (d, l) in lag.iter_mut().enumerate() {
                    *l = x[a * dim + d] - x[b * dim + d];
                }
                *out.add(a * n + b) = k.inner.eval(ch[a], ch[b], &lag);
            }
        }
        Ok(())
    })
}

/// Builds the spectral density of a Gaussian multi-output, unshifted
/// Minecraft or LMC kernel table.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mk_spectrum_from_toml(
    toml: *const c_char,
    out: *mut *mut MkSpectrum,
) -> MkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = parse_spec(read_str(toml, "toml")?)?;
        let inner = spec.spectral_model().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MkSpectrum { inner }));
        Ok(())
    })
}

/// Releases a spectrum; NULL is ignored.
///
/// # Safety
/// `spectrum` must come from [`mk_spectrum_from_toml`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn mk_spectrum_free(spectrum: *mut MkSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Spectral matrix at `nu` written row-major into `out`, which must hold
/// `channels * channels` values.
///
/// # Safety
/// `spectrum` must be a live handle and the buffers valid for their lengths.
#[no_mangle]
pub unsafe extern "C" fn mk_spectrum_density(
    spectrum: *const MkSpectrum,
    nu: *const f64,
    dim: usize,
    out: *mut f64,
    out_len: usize,
) -> MkStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        if dim != s.inner.input_dim() {
            return Err(invalid(format!(
                "frequency has dimension {dim}, model expects {}",
                s.inner.input_dim()
            )));
        }
        let n = s.inner.num_channels();
        if out_len < n * n {
            return Err(invalid(format!(
                "output buffer holds {out_len} values, need {}",
                n * n
            )));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let nu = read_slice(nu, dim, "nu")?;
        let m = s.inner.density(nu);
        for i in 0..n {
            for j in 0..n {
                *out.add(i * n + j) = m[(i, j)];
            }
        }
        Ok(())
    })
}

/// Number of channels and input dimension.
///
/// # Safety
/// `spectrum` must be a live handle; `channels` and `dim` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn mk_spectrum_shape(
    spectrum: *const MkSpectrum,
    channels: *mut usize,
    dim: *mut usize,
) -> MkStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        if !channels.is_null() {
            *channels = s.inner.num_channels();
        }
        if !dim.is_null() {
            *dim = s.inner.input_dim();
        }
        Ok(())
    })
}
