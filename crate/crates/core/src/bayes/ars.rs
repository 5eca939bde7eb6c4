//! Adaptive rejection sampling for a log-concave density on a bounded
//! interval, with a tangent upper hull and chord squeeze.

use rand::distr::Open01;
use rand::Rng;

use crate::error::{domain, Error, Result};

/// Hull abscissae are capped; beyond this rejected points are not added.
const MAX_POINTS: usize = 40;
const MAX_TRIES: usize = 10_000;

struct Hull {
    lo: f64,
    hi: f64,
    /// `(x, h(x), h'(x))`, sorted by `x`.
    pts: Vec<(f64, f64, f64)>,
    /// Segment boundaries, `pts.len() + 1` entries from `lo` to `hi`.
    z: Vec<f64>,
    /// Cumulative segment masses relative to `exp(shift)`.
    cum: Vec<f64>,
    shift: f64,
}

/// `ln ∫₀^Δ exp(d·s) ds` for the exponential piece leaving its left end at 0.
fn ln_piece(d: f64, width: f64) -> f64 {
    if width <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let a = d.abs() * width;
    let ln_base = if a < 1e-12 {
        width.ln()
    } else {
        (-(-a).exp_m1() / d.abs()).ln()
    };
    // anchored at the larger end of the piece
    if d > 0.0 {
        d * width + ln_base
    } else {
        ln_base
    }
}

impl Hull {
    fn new(lo: f64, hi: f64, pts: Vec<(f64, f64, f64)>) -> Self {
        let mut hull = Self {
            lo,
            hi,
            pts,
            z: Vec::new(),
            cum: Vec::new(),
            shift: 0.0,
        };
        hull.rebuild();
        hull
    }

    fn tangent(&self, k: usize, x: f64) -> f64 {
        let (xk, hk, dk) = self.pts[k];
        hk + dk * (x - xk)
    }

    fn rebuild(&mut self) {
        let k = self.pts.len();
        self.z.clear();
        self.z.push(self.lo);
        for j in 0..k - 1 {
            let (x0, h0, d0) = self.pts[j];
            let (x1, h1, d1) = self.pts[j + 1];
            let z = if (d0 - d1).abs() > 1e-12 * (d0.abs() + d1.abs()).max(1e-300) {
                ((h1 - h0) - x1 * d1 + x0 * d0) / (d0 - d1)
            } else {
                0.5 * (x0 + x1)
            };
            self.z.push(z.clamp(x0, x1));
        }
        self.z.push(self.hi);
        // log masses of each piece, anchored at the piece's left end
        let ln_mass: Vec<f64> = (0..k)
            .map(|j| self.tangent(j, self.z[j]) + ln_piece(self.pts[j].2, self.z[j + 1] - self.z[j]))
            .collect();
        self.shift = ln_mass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.cum.clear();
        let mut acc = 0.0;
        for lm in ln_mass {
            acc += (lm - self.shift).exp();
            self.cum.push(acc);
        }
    }

    fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> (f64, usize) {
        let total = *self.cum.last().unwrap();
        let target = rng.sample::<f64, _>(Open01) * total;
        let j = self.cum.iter().position(|&c| c >= target).unwrap_or(self.cum.len() - 1);
        let (z0, z1) = (self.z[j], self.z[j + 1]);
        let w = z1 - z0;
        let d = self.pts[j].2;
        let u: f64 = rng.sample(Open01);
        let x = if d.abs() * w < 1e-12 {
            z0 + u * w
        } else if d > 0.0 {
            z1 + (u * (-d * w).exp_m1()).ln_1p() / d
        } else {
            z0 + (u * (d * w).exp_m1()).ln_1p() / d
        };
        (x.clamp(z0, z1), j)
    }

    /// Chord between neighbouring abscissae; `-inf` outside them.
    fn squeeze(&self, x: f64) -> f64 {
        let i = self.pts.partition_point(|p| p.0 <= x);
        if i == 0 || i == self.pts.len() {
            return f64::NEG_INFINITY;
        }
        let (x0, h0, _) = self.pts[i - 1];
        let (x1, h1, _) = self.pts[i];
        h0 + (h1 - h0) * (x - x0) / (x1 - x0)
    }

    fn insert(&mut self, p: (f64, f64, f64)) {
        if self.pts.len() >= MAX_POINTS {
            return;
        }
        let i = self.pts.partition_point(|q| q.0 < p.0);
        if self.pts.get(i).is_some_and(|q| q.0 == p.0) {
            return;
        }
        self.pts.insert(i, p);
        self.rebuild();
    }
}

/// Draw one value from the density `∝ exp(h)` on `(lo, hi)`.
///
/// `eval(x)` returns `(h(x), h'(x))` and must be concave; `init` holds at
/// least one interior abscissa with finite `h`.
pub fn sample_log_concave<F, G>(eval: F, lo: f64, hi: f64, init: &[f64], rng: &mut G) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
    G: Rng + ?Sized,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(domain(format!("sampling interval ({lo}, {hi}) is empty or unbounded")));
    }
    let mut pts: Vec<(f64, f64, f64)> = Vec::with_capacity(init.len());
    for &x in init {
        if !(x > lo && x < hi) {
            continue;
        }
        let (h, d) = eval(x);
        if h.is_finite() && d.is_finite() {
            pts.push((x, h, d));
        }
    }
    if pts.is_empty() {
        return Err(domain("no usable initial abscissa inside the support".to_string()));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let mut hull = Hull::new(lo, hi, pts);
    for _ in 0..MAX_TRIES {
        let (x, j) = hull.sample(rng);
        let upper = hull.tangent(j, x);
        let ln_u = rng.sample::<f64, _>(Open01).ln();
        if ln_u <= hull.squeeze(x) - upper {
            return Ok(x);
        }
        let (h, d) = eval(x);
        if ln_u <= h - upper {
            return Ok(x);
        }
        if h.is_finite() && d.is_finite() && x > lo && x < hi {
            hull.insert((x, h, d));
        }
    }
    Err(Error::Numerical(format!("rejection sampler exceeded {MAX_TRIES} proposals")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn ks_stat(mut draws: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        draws.sort_by(f64::total_cmp);
        let n = draws.len() as f64;
        draws
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).max((i + 1) as f64 / n - f)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn truncated_normal() {
        // N(0.3, 0.2²) restricted to (0, 1)
        let (m, s) = (0.3, 0.2);
        let eval = |x: f64| (-0.5 * ((x - m) / s).powi(2), -(x - m) / (s * s));
        let mut rng = RngStream::new(1, 2).rng();
        let draws: Vec<f64> = (0..5000)
            .map(|_| sample_log_concave(eval, 0.0, 1.0, &[0.1, 0.3, 0.5], &mut rng).unwrap())
            .collect();
        let phi = |x: f64| 0.5 * statrs::function::erf::erfc(-(x - m) / (s * std::f64::consts::SQRT_2));
        let (p0, p1) = (phi(0.0), phi(1.0));
        let d = ks_stat(draws, |x| (phi(x) - p0) / (p1 - p0));
        assert!(d < 1.63 / 5000f64.sqrt(), "D = {d}");
    }

    #[test]
    fn exponential_with_single_point() {
        // density ∝ e^{-3x} on (0, 2)
        let eval = |x: f64| (-3.0 * x, -3.0);
        let mut rng = RngStream::new(3, 0).rng();
        let draws: Vec<f64> = (0..5000)
            .map(|_| sample_log_concave(eval, 0.0, 2.0, &[1.0], &mut rng).unwrap())
            .collect();
        let norm = 1.0 - (-6.0f64).exp();
        let d = ks_stat(draws, |x| (1.0 - (-3.0 * x).exp()) / norm);
        assert!(d < 1.63 / 5000f64.sqrt(), "D = {d}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = RngStream::new(0, 0).rng();
        let eval = |x: f64| (-x, -1.0);
        assert!(sample_log_concave(eval, 1.0, 0.0, &[0.5], &mut rng).is_err());
        assert!(sample_log_concave(eval, 0.0, 1.0, &[2.0], &mut rng).is_err());
    }
}
