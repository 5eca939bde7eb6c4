//! Distribution functions used by the interval estimators.

use statrs::function::beta::{beta_reg, inv_beta_reg, ln_beta};
use statrs::function::erf::erfc_inv;

pub use statrs::function::gamma::ln_gamma;

/// CDF of the F(d1, d2) distribution.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    beta_reg(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2))
}

/// Quantile of the F(d1, d2) distribution.
///
/// Starts from the AS 64 incomplete-beta inverse and polishes the beta
/// variate with safeguarded Newton steps until the CDF residual is below
/// 1e-13.
pub fn f_quantile(p: f64, d1: f64, d2: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability {p} outside [0,1]");
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let z = beta_quantile(p, d1 / 2.0, d2 / 2.0);
    d2 * z / (d1 * (1.0 - z))
}

/// Quantile of Beta(a, b).
pub fn beta_quantile(p: f64, a: f64, b: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let ln_b = ln_beta(a, b);
    let mut x = inv_beta_reg(a, b, p).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..100 {
        let r = beta_reg(a, b, x) - p;
        if r.abs() < 1e-13 {
            break;
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let ln_pdf = (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() - ln_b;
        let mut next = x - r / ln_pdf.exp();
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-16 * x.max(1e-300) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability {p} outside (0,1)");
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

/// Asymptotic Kolmogorov survival function P(K > t), where K is the limit
/// law of sqrt(n)·D_n. Terms are summed until they drop below 1e-12.
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 0.2 {
        // the alternating series converges too slowly here and the value is 1
        // to double precision
        return 1.0;
    }
    let mut sum = 0.0;
    let mut k = 1.0_f64;
    loop {
        let term = (-2.0 * k * k * t * t).exp();
        let sign = if (k as u64) % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        k += 1.0;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
