//! Special functions: gamma and Bessel functions of integer or half-integer order.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive real arguments (Lanczos approximation).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    // exact for small integers and half-integers
    let twice = 2.0 * x;
    if twice.fract() == 0.0 && x <= 30.0 {
        return gamma_half_integer(twice as u32);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Gamma(k / 2) for a positive integer k, by upward recursion.
fn gamma_half_integer(k: u32) -> f64 {
    let (mut value, mut arg) = if k % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = k as f64 / 2.0;
    while arg < target {
        value *= arg;
        arg += 1.0;
    }
    value
}

/// Power series are used up to this argument; beyond it their alternating
/// terms cancel too much.
const SERIES_BELOW: f64 = 6.0;

/// Bessel function of the first kind `J_alpha(x)` for `alpha` a non-negative
/// integer or half-integer and `x >= 0`.
pub fn bessel_j(alpha: f64, x: f64) -> f64 {
    assert!(alpha >= 0.0 && (2.0 * alpha).fract() == 0.0);
    assert!(x >= 0.0);
    if x <= SERIES_BELOW {
        return bessel_j_series(alpha, x);
    }
    if alpha.fract() == 0.0 {
        bessel_j_integer_large(alpha as usize, x)
    } else {
        bessel_j_half_large(alpha, x)
    }
}

/// `Gamma(alpha + 1) (2 / x)^alpha J_alpha(x)`, which tends to 1 as `x -> 0`.
pub fn normalized_bessel(alpha: f64, x: f64) -> f64 {
    if x <= SERIES_BELOW {
        // series with the leading (x/2)^alpha factor cancelled
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..200 {
            let mf = m as f64;
            term *= -q / (mf * (mf + alpha));
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        return sum;
    }
    gamma(alpha + 1.0) * (2.0 / x).powf(alpha) * bessel_j(alpha, x)
}

fn bessel_j_series(alpha: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if alpha == 0.0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half.powf(alpha) / gamma(alpha + 1.0);
    let mut sum = term;
    for m in 1..300 {
        let mf = m as f64;
        term *= -q / (mf * (mf + alpha));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Bessel's integral `J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt`; the
/// integrand is periodic and smooth, so the trapezoid rule converges geometrically.
fn bessel_j_integer_large(n: usize, x: f64) -> f64 {
    let m = (2.0 * x) as usize + 2 * n + 64;
    let h = PI / m as f64;
    let nf = n as f64;
    let mut sum = 0.5 * (1.0 + (nf * PI).cos());
    for k in 1..m {
        let t = h * k as f64;
        sum += (nf * t - x * t.sin()).cos();
    }
    sum * h / PI
}

/// Half-integer orders from spherical Bessel functions by upward recurrence
/// (stable for `x` larger than the order).
fn bessel_j_half_large(alpha: f64, x: f64) -> f64 {
    let n = (alpha - 0.5).round() as usize;
    let j0 = x.sin() / x;
    let value = if n == 0 {
        j0
    } else {
        let mut prev = j0;
        let mut cur = x.sin() / (x * x) - x.cos() / x;
        for l in 1..n {
            let next = (2.0 * l as f64 + 1.0) / x * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    };
    (2.0 * x / PI).sqrt() * value
}
