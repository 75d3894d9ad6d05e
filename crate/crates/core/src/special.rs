//! Tail-accurate helpers for the normal distribution and log-space algebra.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

use statrs::function::erf::{erfc, erfc_inv};

/// 0.5 * ln(2π)
pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln(1 - exp(x))` for `x <= 0`.
pub fn log1mexp(x: f64) -> f64 {
    if x > -LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(1 + exp(x))` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

pub fn norm_ln_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// `ln Φ(x)`, accurate far into the lower tail.
pub fn norm_ln_cdf(x: f64) -> f64 {
    if x > 0.0 {
        (-0.5 * erfc(x * FRAC_1_SQRT_2)).ln_1p()
    } else if x > -35.0 {
        (0.5 * erfc(-x * FRAC_1_SQRT_2)).ln()
    } else {
        // Mills-ratio asymptotic series; truncation error below 1e-12 here.
        let z = 1.0 / (x * x);
        let series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z)));
        norm_ln_pdf(x) - (-x).ln() + series.ln()
    }
}

/// Inverse of Φ for `p` in (0, 1).
pub fn norm_quantile(p: f64) -> f64 {
    let mut x = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    // One Newton polish on whichever tail keeps the residual well conditioned.
    if x.is_finite() {
        let r = if p < 0.5 {
            norm_cdf(x) - p
        } else {
            (1.0 - p) - norm_cdf(-x)
        };
        x -= r / norm_ln_pdf(x).exp();
    }
    x
}
