//! Point estimators of `R`: joint and known-location maximum likelihood, the
//! one-sample Rayleigh fit, and the UMVUE.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rayleigh::ProgressiveSample;

/// `U = Σ(R_i+1)(x_i−μ)²` and `V = Σ(S_j+1)(y_j−μ)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientStats {
    pub u: f64,
    pub v: f64,
}

fn below_support(xs: &ProgressiveSample, ys: &ProgressiveSample, mu: f64) -> Result<()> {
    let top = xs.first().min(ys.first());
    if !(mu < top) {
        return Err(domain(format!(
            "location {mu} must lie below the smallest observation {top}"
        )));
    }
    Ok(())
}

fn weighted_ss(sample: &ProgressiveSample, mu: f64) -> f64 {
    sample.weighted().map(|(x, w)| w * (x - mu) * (x - mu)).sum()
}

pub fn sufficient_stats(xs: &ProgressiveSample, ys: &ProgressiveSample, mu: f64) -> Result<SufficientStats> {
    below_support(xs, ys, mu)?;
    Ok(SufficientStats {
        u: weighted_ss(xs, mu),
        v: weighted_ss(ys, mu),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnownMuFit {
    pub lambda_hat: f64,
    pub alpha_hat: f64,
    pub r_hat: f64,
}

/// Closed-form MLE when the common location is known: `λ̂ = n/U`,
/// `α̂ = m/V`.
pub fn mle_known_mu(xs: &ProgressiveSample, ys: &ProgressiveSample, mu: f64) -> Result<KnownMuFit> {
    let s = sufficient_stats(xs, ys, mu)?;
    let lambda_hat = xs.len() as f64 / s.u;
    let alpha_hat = ys.len() as f64 / s.v;
    Ok(KnownMuFit {
        lambda_hat,
        alpha_hat,
        r_hat: alpha_hat / (alpha_hat + lambda_hat),
    })
}

/// Log-likelihood of `(λ, α, μ)` without the scheme constants.
pub fn log_likelihood(xs: &ProgressiveSample, ys: &ProgressiveSample, lambda: f64, alpha: f64, mu: f64) -> f64 {
    if !(mu < xs.first().min(ys.first())) || lambda <= 0.0 || alpha <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let n = xs.len() as f64;
    let m = ys.len() as f64;
    n * lambda.ln() + m * alpha.ln() + xs.values().iter().map(|x| (x - mu).ln()).sum::<f64>()
        + ys.values().iter().map(|y| (y - mu).ln()).sum::<f64>()
        - lambda * weighted_ss(xs, mu)
        - alpha * weighted_ss(ys, mu)
}

/// Gradient `(∂ℓ/∂λ, ∂ℓ/∂α, ∂ℓ/∂μ)` of [`log_likelihood`].
pub fn score(xs: &ProgressiveSample, ys: &ProgressiveSample, lambda: f64, alpha: f64, mu: f64) -> [f64; 3] {
    let n = xs.len() as f64;
    let m = ys.len() as f64;
    let (mut sx, mut sx2, mut inv) = (0.0, 0.0, 0.0);
    for (x, w) in xs.weighted() {
        sx += w * (x - mu);
        sx2 += w * (x - mu) * (x - mu);
        inv += 1.0 / (x - mu);
    }
    let (mut sy, mut sy2) = (0.0, 0.0);
    for (y, w) in ys.weighted() {
        sy += w * (y - mu);
        sy2 += w * (y - mu) * (y - mu);
        inv += 1.0 / (y - mu);
    }
    [
        n / lambda - sx2,
        m / alpha - sy2,
        2.0 * (lambda * sx + alpha * sy) - inv,
    ]
}

/// Fitted `(μ̂, λ̂, α̂, R̂)` plus convergence diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointFit {
    pub mu_hat: f64,
    pub lambda_hat: f64,
    pub alpha_hat: f64,
    pub r_hat: f64,
    pub iterations: usize,
    pub final_step: f64,
    /// Number of iterations where the fixed-point proposal was replaced by a
    /// damped or bisection step.
    #[serde(skip)]
    pub safeguarded_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    /// Starting location; defaults to `min(x₁, y₁) − 0.1·range`.
    pub mu0: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            mu0: None,
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

/// Per-sample sums entering the profile score.
struct Part<'a> {
    sample: &'a ProgressiveSample,
}

impl Part<'_> {
    /// `(count, Σw(x−μ), Σw(x−μ)², Σ1/(x−μ))`
    fn sums(&self, mu: f64) -> (f64, f64, f64, f64) {
        let (mut s1, mut s2, mut inv) = (0.0, 0.0, 0.0);
        for (x, w) in self.sample.weighted() {
            let d = x - mu;
            s1 += w * d;
            s2 += w * d * d;
            inv += 1.0 / d;
        }
        (self.sample.len() as f64, s1, s2, inv)
    }
}

/// Profile μ-score with the scales replaced by `λ̂(μ)`, `α̂(μ)`; the
/// fixed-point map is `k(μ) = μ + profile_score(μ)`.
fn profile_score(parts: &[Part<'_>], mu: f64) -> f64 {
    let mut s = 0.0;
    for p in parts {
        let (n, s1, s2, inv) = p.sums(mu);
        s += 2.0 * n * s1 / s2 - inv;
    }
    s
}

struct Located {
    mu: f64,
    iterations: usize,
    final_step: f64,
    safeguarded: usize,
}

/// Iterate `μ ← k(μ)` keeping a sign-change bracket of the profile score.
/// Once both ends of the bracket are known, a proposal that leaves it or
/// fails to halve the previous step is replaced by the bracket midpoint.
fn locate_mu(parts: &[Part<'_>], top: f64, mu0: f64, tol: f64, max_iter: usize) -> Result<Located> {
    if !(mu0 < top) {
        return Err(domain(format!(
            "initial location {mu0} must lie below the smallest observation {top}"
        )));
    }
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut lo = f64::NEG_INFINITY;
    let mut hi = top;
    let mut mu = mu0;
    let mut last_step = f64::INFINITY;
    let mut safeguarded = 0;
    let mut trajectory = vec![mu];
    for it in 0..max_iter {
        let s = profile_score(parts, mu);
        if !s.is_finite() {
            return Err(Error::Numerical(format!("profile score not finite at {mu}")));
        }
        if s > 0.0 {
            lo = lo.max(mu);
        } else {
            hi = hi.min(mu);
        }
        let bracket_exhausted = lo.is_finite() && (hi - lo) <= 4.0 * f64::EPSILON * hi.abs().max(1.0);
        if (last_step < tol && s.abs() <= 100.0 * tol) || s == 0.0 || (bracket_exhausted && last_step < tol) {
            return Ok(Located {
                mu,
                iterations: it,
                final_step: last_step,
                safeguarded,
            });
        }
        let proposal = mu + s;
        let inside = proposal > lo && proposal < hi;
        let contracting = (proposal - mu).abs() <= 0.5 * last_step || last_step.is_infinite();
        let next = if inside && contracting {
            proposal
        } else if lo.is_finite() {
            safeguarded += 1;
            0.5 * (lo + hi)
        } else {
            // every score so far was negative, so the step heads left and
            // cannot leave the domain
            proposal
        };
        last_step = (next - mu).abs();
        mu = next;
        trajectory.push(mu);
    }
    Err(Error::Convergence {
        iterations: max_iter,
        last_step,
        trajectory,
    })
}

fn default_mu0(values: impl Iterator<Item = f64>, top: f64) -> f64 {
    let max = values.fold(f64::NEG_INFINITY, f64::max);
    let range = max - top;
    let spread = if range > 0.0 { range } else { top.abs().max(1.0) };
    top - 0.1 * spread
}

/// Joint MLE of `(μ, λ, α)` and `R̂ = α̂/(α̂+λ̂)`.
pub fn mle_joint(xs: &ProgressiveSample, ys: &ProgressiveSample, opts: &MleOptions) -> Result<JointFit> {
    let top = xs.first().min(ys.first());
    let mu0 = opts.mu0.unwrap_or_else(|| {
        default_mu0(xs.values().iter().chain(ys.values()).copied(), top)
    });
    let parts = [Part { sample: xs }, Part { sample: ys }];
    let loc = locate_mu(&parts, top, mu0, opts.tol, opts.max_iter)?;
    let fit = mle_known_mu(xs, ys, loc.mu)?;
    Ok(JointFit {
        mu_hat: loc.mu,
        lambda_hat: fit.lambda_hat,
        alpha_hat: fit.alpha_hat,
        r_hat: fit.r_hat,
        iterations: loc.iterations,
        final_step: loc.final_step,
        safeguarded_steps: loc.safeguarded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleFit {
    pub mu_hat: f64,
    pub lambda_hat: f64,
    pub iterations: usize,
}

/// One-sample fit of `tR(μ, λ)`.
pub fn mle_single(sample: &ProgressiveSample, tol: f64, max_iter: usize) -> Result<SingleFit> {
    let top = sample.first();
    let mu0 = default_mu0(sample.values().iter().copied(), top);
    let loc = locate_mu(&[Part { sample }], top, mu0, tol, max_iter)?;
    Ok(SingleFit {
        mu_hat: loc.mu,
        lambda_hat: sample.len() as f64 / weighted_ss(sample, loc.mu),
        iterations: loc.iterations,
    })
}

/// The UMVUE of `R` given the sufficient statistics at a known location.
///
/// For `u ≤ v`: `1 − Σ_{k<m} (−1)^k (u/v)^k C(m−1,k)/C(n+k−1,k)`;
/// for `u > v`: `Σ_{k<n} (−1)^k (v/u)^k C(n−1,k)/C(m+k−1,k)`.
/// Ties use the first branch.
pub fn umvue_r(stats: &SufficientStats, n: usize, m: usize) -> Result<f64> {
    if n < 2 || m < 2 {
        return Err(domain(format!("UMVUE needs n, m >= 2 (n={n}, m={m})")));
    }
    if !(stats.u > 0.0 && stats.v > 0.0) {
        return Err(domain("sufficient statistics must be positive"));
    }
    let r = if stats.u <= stats.v {
        1.0 - alternating_series(stats.u / stats.v, m, n)
    } else {
        alternating_series(stats.v / stats.u, n, m)
    };
    Ok(r.clamp(0.0, 1.0))
}

/// `Σ_{k=0}^{a−1} (−1)^k ρ^k C(a−1,k)/C(b+k−1,k)`, with the binomial ratio
/// accumulated in log space via `c_{k+1}/c_k = (a−1−k)/(b+k)`.
fn alternating_series(ratio: f64, a: usize, b: usize) -> f64 {
    let ln_ratio = ratio.ln();
    let mut ln_coef = 0.0;
    let mut sum = 1.0;
    for k in 1..a {
        ln_coef += ((a - k) as f64).ln() - ((b + k - 1) as f64).ln();
        let mag = (ln_coef + k as f64 * ln_ratio).exp();
        sum += if k % 2 == 1 { -mag } else { mag };
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rayleigh::CensoringScheme;
    use approx::assert_abs_diff_eq;

    fn sample(total: usize, removals: Vec<usize>, values: Vec<f64>) -> ProgressiveSample {
        ProgressiveSample::new(CensoringScheme::new(total, removals).unwrap(), values).unwrap()
    }

    #[test]
    fn sufficient_stats_examples() {
        let xs = sample(2, vec![0, 0], vec![1.0, 2.0]);
        let s = sufficient_stats(&xs, &xs, 0.0).unwrap();
        assert_eq!(s.u, 5.0);
        let xs2 = sample(3, vec![1, 0], vec![1.0, 2.0]);
        assert_eq!(sufficient_stats(&xs2, &xs, 0.0).unwrap().u, 6.0);
        assert!(sufficient_stats(&xs, &xs, 1.0).is_err());
    }

    #[test]
    fn known_mu_examples() {
        let xs = sample(2, vec![0, 0], vec![1.0, 2.0]);
        let ys = sample(4, vec![0, 1, 0], vec![0.5, 0.7, 3.0]);
        let fit = mle_known_mu(&xs, &ys, 0.0).unwrap();
        assert_abs_diff_eq!(fit.lambda_hat, 0.4, epsilon = 1e-15);
        let sym = mle_known_mu(&xs, &xs, 0.0).unwrap();
        assert_eq!(sym.r_hat, 0.5);
        let sc = score(&xs, &ys, fit.lambda_hat, fit.alpha_hat, 0.0);
        assert!(sc[0].abs() < 1e-12 && sc[1].abs() < 1e-12);
    }

    #[test]
    fn known_mu_scale_equivariance() {
        let xs = sample(5, vec![1, 0, 1], vec![1.3, 1.9, 2.4]);
        let ys = sample(4, vec![0, 1, 0], vec![1.1, 1.5, 2.8]);
        let mu = 0.7;
        let c: f64 = 2.0;
        let scale = |s: &ProgressiveSample| {
            ProgressiveSample::new(
                s.scheme().clone(),
                s.values().iter().map(|v| mu + c * (v - mu)).collect(),
            )
            .unwrap()
        };
        let a = mle_known_mu(&xs, &ys, mu).unwrap();
        let b = mle_known_mu(&scale(&xs), &scale(&ys), mu).unwrap();
        assert_abs_diff_eq!(b.lambda_hat, a.lambda_hat / (c * c), epsilon = 1e-14);
        assert_abs_diff_eq!(b.alpha_hat, a.alpha_hat / (c * c), epsilon = 1e-14);
    }

    #[test]
    fn umvue_examples() {
        let s = SufficientStats { u: 1.0, v: 2.0 };
        assert_abs_diff_eq!(umvue_r(&s, 2, 2).unwrap(), 0.25, epsilon = 1e-15);
        let s = SufficientStats { u: 2.0, v: 1.0 };
        assert_abs_diff_eq!(umvue_r(&s, 2, 2).unwrap(), 0.75, epsilon = 1e-15);
        for n in 2..8 {
            let s = SufficientStats { u: 3.0, v: 3.0 };
            assert_abs_diff_eq!(umvue_r(&s, n, n).unwrap(), 0.5, epsilon = 1e-12);
        }
        assert!(umvue_r(&SufficientStats { u: 1.0, v: 1.0 }, 1, 3).is_err());
    }

    #[test]
    fn umvue_large_samples_stay_finite() {
        let s = SufficientStats { u: 290.0, v: 310.0 };
        let r = umvue_r(&s, 300, 300).unwrap();
        assert!(r > 0.0 && r < 1.0);
        let swapped = umvue_r(&SufficientStats { u: 310.0, v: 290.0 }, 300, 300).unwrap();
        assert_abs_diff_eq!(r + swapped, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn joint_fit_satisfies_score_equations() {
        let xs = sample(10, vec![0; 10], vec![1.2, 1.35, 1.4, 1.6, 1.62, 1.9, 2.1, 2.2, 2.5, 2.9]);
        let ys = sample(12, vec![2, 0, 0, 0, 0, 0, 0, 0, 0, 0], vec![1.15, 1.3, 1.5, 1.7, 1.8, 2.0, 2.3, 2.4, 2.7, 3.3]);
        let opts = MleOptions::default();
        let fit = mle_joint(&xs, &ys, &opts).unwrap();
        assert!(fit.mu_hat < 1.15);
        assert!(fit.final_step < opts.tol);
        let s = score(&xs, &ys, fit.lambda_hat, fit.alpha_hat, fit.mu_hat);
        for r in s {
            assert!(r.abs() < 100.0 * opts.tol, "residual {r}");
        }
        assert_abs_diff_eq!(fit.r_hat, fit.alpha_hat / (fit.alpha_hat + fit.lambda_hat), epsilon = 1e-15);
    }

    #[test]
    fn joint_fit_rejects_start_above_support() {
        let xs = sample(3, vec![0; 3], vec![1.0, 2.0, 3.0]);
        let opts = MleOptions {
            mu0: Some(1.5),
            ..MleOptions::default()
        };
        assert!(matches!(mle_joint(&xs, &xs, &opts), Err(Error::Domain(_))));
    }

    #[test]
    fn joint_fit_reports_non_convergence() {
        let xs = sample(3, vec![0; 3], vec![1.0, 2.0, 3.5]);
        let opts = MleOptions {
            max_iter: 2,
            ..MleOptions::default()
        };
        match mle_joint(&xs, &xs, &opts) {
            Err(Error::Convergence { trajectory, .. }) => assert_eq!(trajectory.len(), 3),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn single_fit_is_location_equivariant() {
        let vals = vec![1.2, 1.35, 1.4, 1.6, 1.62, 1.9, 2.1, 2.2, 2.5, 2.9];
        let a = mle_single(&sample(10, vec![0; 10], vals.clone()), 1e-12, 10_000).unwrap();
        let shifted: Vec<f64> = vals.iter().map(|v| v + 3.0).collect();
        let b = mle_single(&sample(10, vec![0; 10], shifted), 1e-12, 10_000).unwrap();
        assert_abs_diff_eq!(b.mu_hat, a.mu_hat + 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(b.lambda_hat, a.lambda_hat, epsilon = 1e-8);
    }
}
