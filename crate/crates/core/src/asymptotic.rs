//! Observed information, delta-method variance of `R̂` and the Wald-type
//! interval.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::interval::{check_level, Interval};
use crate::point::JointFit;
use crate::rayleigh::ProgressiveSample;
use crate::special::normal_quantile;

/// Negative Hessian of the log-likelihood in `(λ, α, μ)` order. The
/// `(λ, α)` entry is identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedInfo {
    pub i11: f64,
    pub i22: f64,
    pub i33: f64,
    pub i13: f64,
    pub i23: f64,
    /// `(λ, α, μ)`
    pub evaluated_at: (f64, f64, f64),
}

impl ObservedInfo {
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.i11, 0.0, self.i13],
            [0.0, self.i22, self.i23],
            [self.i13, self.i23, self.i33],
        ]
    }

    pub fn det(&self) -> f64 {
        self.i11 * self.i22 * self.i33 - self.i11 * self.i23 * self.i23 - self.i13 * self.i13 * self.i22
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaVariance {
    pub b11: f64,
    pub b12: f64,
    pub b13: f64,
    pub b22: f64,
    pub b23: f64,
    pub b33: f64,
    pub det_i: f64,
    /// Approximate `Var(R̂)` on the natural scale.
    pub var_r: f64,
}

pub fn observed_info(
    xs: &ProgressiveSample,
    ys: &ProgressiveSample,
    lambda: f64,
    alpha: f64,
    mu: f64,
) -> Result<ObservedInfo> {
    if !(lambda > 0.0 && alpha > 0.0) {
        return Err(domain(format!("scales must be positive, got λ={lambda}, α={alpha}")));
    }
    let bound = xs.first().min(ys.first());
    if !(mu < bound) {
        return Err(domain(format!("location {mu} must lie below {bound}")));
    }
    let n = xs.len() as f64;
    let m = ys.len() as f64;
    let sx: f64 = xs.weighted().map(|(x, w)| w * (x - mu)).sum();
    let sy: f64 = ys.weighted().map(|(y, w)| w * (y - mu)).sum();
    let wx: f64 = xs.scheme().weights().sum();
    let wy: f64 = ys.scheme().weights().sum();
    let inv_x: f64 = xs.values().iter().map(|x| (x - mu).powi(-2)).sum();
    let inv_y: f64 = ys.values().iter().map(|y| (y - mu).powi(-2)).sum();
    Ok(ObservedInfo {
        i11: n / (lambda * lambda),
        i22: m / (alpha * alpha),
        i33: 2.0 * (lambda * wx + alpha * wy) + inv_x + inv_y,
        i13: -2.0 * sx,
        i23: -2.0 * sy,
        evaluated_at: (lambda, alpha, mu),
    })
}

pub fn var_r_delta(info: &ObservedInfo, lambda: f64, alpha: f64) -> Result<DeltaVariance> {
    let ObservedInfo {
        i11, i22, i33, i13, i23, ..
    } = *info;
    let det_i = info.det();
    // positive definite iff all leading minors are positive
    let scale = i11 * i22 * i33;
    if !(i11 > 0.0 && i22 > 0.0 && det_i > 1e-14 * scale.abs()) || !det_i.is_finite() {
        return Err(Error::Singular(det_i));
    }
    let b11 = i22 * i33 - i23 * i23;
    let b12 = i13 * i23;
    let b13 = -i13 * i22;
    let b22 = i11 * i33 - i13 * i13;
    let b23 = -i11 * i23;
    let b33 = i11 * i22;
    let s = lambda + alpha;
    let var_r = (lambda * lambda * b22 + alpha * alpha * b11 - 2.0 * lambda * alpha * b12) / (det_i * s.powi(4));
    if !(var_r > 0.0) {
        return Err(Error::Singular(det_i));
    }
    Ok(DeltaVariance {
        b11,
        b12,
        b13,
        b22,
        b23,
        b33,
        det_i,
        var_r,
    })
}

/// Delta-method variance of `R̂` at a joint fit.
pub fn var_r_at(xs: &ProgressiveSample, ys: &ProgressiveSample, fit: &JointFit) -> Result<f64> {
    let info = observed_info(xs, ys, fit.lambda_hat, fit.alpha_hat, fit.mu_hat)?;
    Ok(var_r_delta(&info, fit.lambda_hat, fit.alpha_hat)?.var_r)
}

/// `R̂ ± z_{1−η/2} √var_r`, clamped to `[0, 1]`.
pub fn asymptotic_ci(xs: &ProgressiveSample, ys: &ProgressiveSample, eta: f64, fit: &JointFit) -> Result<Interval> {
    check_level(eta)?;
    let half = normal_quantile(1.0 - eta / 2.0) * var_r_at(xs, ys, fit)?.sqrt();
    Ok(Interval::ordered(fit.r_hat - half, fit.r_hat + half, 1.0 - eta).clamp_unit())
}
