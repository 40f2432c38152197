//! Numerical building blocks shared by the spectral, kernel and fitting code.

pub mod quadrature;
pub mod special;

pub use quadrature::GaussLegendre;

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Inverse of [`softplus`] for `y > 0`.
pub fn softplus_inv(y: f64) -> f64 {
    y + (-(-y).exp_m1()).ln()
}

/// Derivative of [`softplus`], i.e. the logistic function.
pub fn softplus_grad(x: f64) -> f64 {
    logistic(x)
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
