//! Exact pivotal inference: the location pivots `T_X(μ)`, `T_Y(μ)`, the
//! exact interval for `μ`, the joint `(μ, R)` region and the exact
//! known-location interval for `R`.
//!
//! With `X**_i = λ(X_i − μ)²` the normalized spacings of a progressive
//! sample are i.i.d. standard exponential, which makes
//! `T_X(μ) = U_X / ((n−1)V_X) ~ F(2n−2, 2)` and `T_1 = U_X + V_X ~ χ²(2n)`
//! independent. `T_X` is free of `λ` and strictly increasing in `μ`, so it
//! can be inverted for `μ`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::interval::{check_level, Interval};
use crate::point::mle_known_mu;
use crate::rayleigh::ProgressiveSample;
use crate::special::f_quantile;

/// Values of the four pivotal statistics at a given location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PivotStats {
    pub t_x: f64,
    pub t_y: f64,
    pub t1: f64,
    pub t2: f64,
}

/// `T_X(μ) = (1/(N(n−1))) Σ(R_i+1)((x_i−μ)/(x_1−μ))² − 1/(n−1)`.
pub fn pivot_tx(sample: &ProgressiveSample, mu: f64) -> Result<f64> {
    let x1 = sample.first();
    if !(mu < x1) {
        return Err(domain(format!("location {mu} must lie below {x1}")));
    }
    Ok(pivot_unchecked(sample, mu))
}

fn pivot_unchecked(sample: &ProgressiveSample, mu: f64) -> f64 {
    let n = sample.len() as f64;
    let total = sample.scheme().total as f64;
    let d1 = sample.first() - mu;
    let s: f64 = sample.weighted().map(|(x, w)| w * ((x - mu) / d1).powi(2)).sum();
    // Σ w (r_i² − 1) avoids the cancellation in s/N − 1 when μ → −∞
    let excess: f64 = sample
        .weighted()
        .map(|(x, w)| {
            let r = (x - mu) / d1;
            w * (r - 1.0) * (r + 1.0)
        })
        .sum();
    debug_assert!((s - total - excess).abs() <= 1e-9 * s.max(1.0));
    excess / (total * (n - 1.0))
}

/// All four pivots at `mu`, given the true scales.
pub fn pivot_stats(
    xs: &ProgressiveSample,
    ys: &ProgressiveSample,
    mu: f64,
    lambda: f64,
    alpha: f64,
) -> Result<PivotStats> {
    let t_x = pivot_tx(xs, mu)?;
    let t_y = pivot_tx(ys, mu)?;
    let t1: f64 = 2.0 * lambda * xs.weighted().map(|(x, w)| w * (x - mu).powi(2)).sum::<f64>();
    let t2: f64 = 2.0 * alpha * ys.weighted().map(|(y, w)| w * (y - mu).powi(2)).sum::<f64>();
    Ok(PivotStats { t_x, t_y, t1, t2 })
}

/// The unique `μ < x₁` with `T_X(μ) = target`.
///
/// Works in `t = ln(x₁ − μ)`, where the pivot is strictly decreasing, and
/// bisects to floating-point resolution. Targets so small that the root
/// lies beyond `x₁ − 1e300` return that bound.
pub fn invert_pivot(sample: &ProgressiveSample, target: f64) -> Result<f64> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(domain(format!("pivot target must be positive and finite, got {target}")));
    }
    let x1 = sample.first();
    let at = |t: f64| pivot_unchecked(sample, x1 - t.exp());
    let scale = (sample.values()[sample.len() - 1] - x1).max(f64::MIN_POSITIVE);
    let mut t_lo = scale.ln();
    let mut t_hi = t_lo;
    // t_lo: pivot above target (μ close to x₁); t_hi: pivot below target.
    while at(t_lo) <= target {
        t_lo -= 2.0;
        if t_lo < -700.0 {
            return Err(Error::Numerical(format!("cannot bracket pivot target {target} near x1")));
        }
    }
    while at(t_hi) > target {
        t_hi += 2.0;
        if t_hi > 690.0 {
            return Ok(x1 - t_hi.exp());
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (t_lo + t_hi);
        if mid <= t_lo || mid >= t_hi {
            break;
        }
        if at(mid) > target {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
    }
    // pick the end with the smaller residual
    let (r_lo, r_hi) = ((at(t_lo) - target).abs(), (at(t_hi) - target).abs());
    let t = if r_lo <= r_hi { t_lo } else { t_hi };
    Ok(x1 - t.exp())
}

fn mu_bounds(xs: &ProgressiveSample, ys: &ProgressiveSample, spread: f64) -> Result<(f64, f64)> {
    let p_lo = (1.0 - spread) / 2.0;
    let p_hi = (1.0 + spread) / 2.0;
    let n = xs.len() as f64;
    let m = ys.len() as f64;
    let lo = invert_pivot(xs, f_quantile(p_lo, 2.0 * n - 2.0, 2.0))?
        .max(invert_pivot(ys, f_quantile(p_lo, 2.0 * m - 2.0, 2.0))?);
    let hi = invert_pivot(xs, f_quantile(p_hi, 2.0 * n - 2.0, 2.0))?
        .min(invert_pivot(ys, f_quantile(p_hi, 2.0 * m - 2.0, 2.0))?);
    Ok((lo, hi))
}

/// Exact `100(1−η)%` interval for the common location. Returns `None`
/// when the two pivot intervals do not intersect.
pub fn exact_ci_mu(xs: &ProgressiveSample, ys: &ProgressiveSample, eta: f64) -> Result<Option<Interval>> {
    check_level(eta)?;
    let (lo, hi) = mu_bounds(xs, ys, (1.0 - eta).sqrt())?;
    Ok((lo <= hi).then_some(Interval {
        lo,
        hi,
        level: 1.0 - eta,
    }))
}

/// One `R`-slice of the joint region: `(r_lo, r_hi)` at location `mu`.
pub fn region_slice(xs: &ProgressiveSample, ys: &ProgressiveSample, eta: f64, mu: f64) -> Result<(f64, f64)> {
    check_level(eta)?;
    let r_hat = mle_known_mu(xs, ys, mu)?.r_hat;
    let s = (1.0 - eta).sqrt();
    let (d1, d2) = (2.0 * xs.len() as f64, 2.0 * ys.len() as f64);
    let odds = (1.0 - r_hat) / r_hat;
    let lo = 1.0 / (1.0 + odds * f_quantile(1.0 - (1.0 - s) / 2.0, d1, d2));
    let hi = 1.0 / (1.0 + odds * f_quantile(1.0 - (1.0 + s) / 2.0, d1, d2));
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSlice {
    pub mu: f64,
    pub r_lo: f64,
    pub r_hi: f64,
}

/// Joint `100(1−η)%` confidence region for `(μ, R)`, tabulated on a grid of
/// locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointRegion {
    pub mu_interval: Interval,
    pub slices: Vec<RegionSlice>,
}

impl JointRegion {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mu,r_lo,r_hi\n");
        for s in &self.slices {
            let _ = writeln!(out, "{},{},{}", s.mu, s.r_lo, s.r_hi);
        }
        out
    }

    /// The rectangle `mu_interval × slice(mu)` at a chosen location, e.g.
    /// the joint MLE `μ̂`.
    pub fn rectangle_at(
        &self,
        xs: &ProgressiveSample,
        ys: &ProgressiveSample,
        mu: f64,
    ) -> Result<(Interval, Interval)> {
        let (lo, hi) = region_slice(xs, ys, 1.0 - self.mu_interval.level, mu)?;
        Ok((self.mu_interval, Interval::ordered(lo, hi, self.mu_interval.level)))
    }
}

/// The μ-interval uses quantile levels `(1 ± (1−η)^{1/4})/2`; each slice
/// inverts the known-location pivot at level `√(1−η)`. Returns `None` for
/// an empty μ-interval.
pub fn exact_joint_region(
    xs: &ProgressiveSample,
    ys: &ProgressiveSample,
    eta: f64,
    grid_size: usize,
) -> Result<Option<JointRegion>> {
    check_level(eta)?;
    if grid_size < 2 {
        return Err(domain(format!("grid_size must be at least 2, got {grid_size}")));
    }
    let (lo, hi) = mu_bounds(xs, ys, (1.0 - eta).powf(0.25))?;
    if lo > hi {
        return Ok(None);
    }
    let mut slices = Vec::with_capacity(grid_size);
    for k in 0..grid_size {
        let mu = if k == grid_size - 1 {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (grid_size - 1) as f64
        };
        let (r_lo, r_hi) = region_slice(xs, ys, eta, mu)?;
        slices.push(RegionSlice { mu, r_lo, r_hi });
    }
    Ok(Some(JointRegion {
        mu_interval: Interval {
            lo,
            hi,
            level: 1.0 - eta,
        },
        slices,
    }))
}

/// Whether `(mu, r)` lies in the joint region (slice evaluated at `mu`
/// itself rather than on a grid).
pub fn joint_region_covers(
    xs: &ProgressiveSample,
    ys: &ProgressiveSample,
    eta: f64,
    mu: f64,
    r: f64,
) -> Result<bool> {
    check_level(eta)?;
    let (lo, hi) = mu_bounds(xs, ys, (1.0 - eta).powf(0.25))?;
    if !(lo <= mu && mu <= hi) {
        return Ok(false);
    }
    let (r_lo, r_hi) = region_slice(xs, ys, eta, mu)?;
    Ok(r_lo <= r && r <= r_hi)
}

/// Exact `100(1−η)%` interval for `R` when `μ` is known, from
/// `(R/(1−R))·((1−R̂)/R̂) ~ F(2m, 2n)`.
pub fn exact_ci_r_known_mu(
    xs: &ProgressiveSample,
    ys: &ProgressiveSample,
    mu: f64,
    eta: f64,
) -> Result<Interval> {
    check_level(eta)?;
    let r_hat = mle_known_mu(xs, ys, mu)?.r_hat;
    let (d1, d2) = (2.0 * xs.len() as f64, 2.0 * ys.len() as f64);
    let odds = (1.0 - r_hat) / r_hat;
    let a = 1.0 / (1.0 + odds * f_quantile(1.0 - eta / 2.0, d1, d2));
    let b = 1.0 / (1.0 + odds * f_quantile(eta / 2.0, d1, d2));
    Ok(Interval::ordered(a, b, 1.0 - eta))
}
