use std::ffi::{CStr, CString};
use std::ptr;

use minecraft_kernel_ffi::*;

const MINECRAFT: &str = r#"
type = "minecraft"
amplitudes = [[[1.0, 0.6], [0.6, 0.5]], [[0.4, -0.2], [-0.2, 0.3]]]
blocks = [{ center = [0.5], width = [1.0] }, { center = [1.5], width = [1.0] }]
"#;

fn kernel(text: &str) -> *mut MkKernel {
    let src = CString::new(text).unwrap();
    let mut k = ptr::null_mut();
    assert_eq!(
        unsafe { mk_kernel_from_toml(src.as_ptr(), &mut k) },
        MkStatus::Ok
    );
    assert!(!k.is_null());
    k
}

fn last_error() -> String {
    let p = mk_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn kernel_round_trip() {
    let k = kernel(MINECRAFT);
    let (mut n, mut d) = (0usize, 0usize);
    assert_eq!(unsafe { mk_kernel_shape(k, &mut n, &mut d) }, MkStatus::Ok);
    assert_eq!((n, d), (2, 1));
    let mut v = 0.0;
    assert_eq!(
        unsafe { mk_kernel_eval(k, 0, 1, [0.0].as_ptr(), 1, &mut v) },
        MkStatus::Ok
    );
    assert!((v - 0.4).abs() < 1e-12);
    unsafe { mk_kernel_free(k) };
}

#[test]
fn gram_matches_eval() {
    let k = kernel(MINECRAFT);
    let x = [0.0, 0.3, 1.1];
    let ch = [0usize, 1, 1];
    let mut g = [0.0; 9];
    assert_eq!(
        unsafe { mk_kernel_gram(k, x.as_ptr(), ch.as_ptr(), 3, 1, g.as_mut_ptr()) },
        MkStatus::Ok
    );
    for a in 0..3 {
        for b in 0..3 {
            let mut v = 0.0;
            let lag = [x[a] - x[b]];
            unsafe { mk_kernel_eval(k, ch[a], ch[b], lag.as_ptr(), 1, &mut v) };
            assert_eq!(g[a * 3 + b], v);
            assert!((g[a * 3 + b] - g[b * 3 + a]).abs() < 1e-12);
        }
    }
    unsafe { mk_kernel_free(k) };
}

#[test]
fn spectrum_density_is_piecewise_constant() {
    let src = CString::new(MINECRAFT).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { mk_spectrum_from_toml(src.as_ptr(), &mut s) },
        MkStatus::Ok
    );
    let mut a = [0.0; 4];
    let mut b = [0.0; 4];
    unsafe {
        assert_eq!(
            mk_spectrum_density(s, [0.2].as_ptr(), 1, a.as_mut_ptr(), 4),
            MkStatus::Ok
        );
        assert_eq!(
            mk_spectrum_density(s, [0.8].as_ptr(), 1, b.as_mut_ptr(), 4),
            MkStatus::Ok
        );
        assert_eq!(a, b);
        assert_eq!(
            mk_spectrum_density(s, [0.2].as_ptr(), 1, a.as_mut_ptr(), 3),
            MkStatus::InvalidArgument
        );
        mk_spectrum_free(s);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut k = ptr::null_mut();
    let bad = CString::new("type = \"minecraft\"\nblocks = 3").unwrap();
    assert_eq!(
        unsafe { mk_kernel_from_toml(bad.as_ptr(), &mut k) },
        MkStatus::Config
    );
    assert!(k.is_null());
    let msg = last_error();
    assert!(msg.contains("config error"), "{msg}");

    assert_eq!(
        unsafe { mk_kernel_from_toml(ptr::null(), &mut k) },
        MkStatus::NullPointer
    );
    assert!(last_error().contains("toml"));

    let k = kernel(MINECRAFT);
    let mut v = 0.0;
    assert_eq!(
        unsafe { mk_kernel_eval(k, 2, 0, [0.0].as_ptr(), 1, &mut v) },
        MkStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { mk_kernel_eval(k, 0, 0, [0.0, 0.0].as_ptr(), 2, &mut v) },
        MkStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { mk_kernel_eval(ptr::null(), 0, 0, [0.0].as_ptr(), 1, &mut v) },
        MkStatus::NullPointer
    );
    unsafe { mk_kernel_free(k) };
    unsafe { mk_kernel_free(ptr::null_mut()) };
}

#[test]
fn non_spectral_kernels_rejected() {
    let src = CString::new(
        "type = \"matern\"\nsmoothness = 1.5\nlengthscale = 1.0\nvariance = 1.0\ndim = 1",
    )
    .unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { mk_spectrum_from_toml(src.as_ptr(), &mut s) },
        MkStatus::Config
    );
    assert!(s.is_null());
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(mk_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_api_and_compiles() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/minecraft_kernel.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "mk_last_error",
        "mk_kernel_from_toml",
        "mk_kernel_eval",
        "mk_kernel_gram",
        "mk_kernel_free",
        "mk_spectrum_density",
        "MK_STATUS_PANIC",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(status.success());
}
