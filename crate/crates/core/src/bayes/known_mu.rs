//! Posterior inference on `R` when the common location is known.
//!
//! With sufficient statistics `u = Σw(x−μ)²`, `v = Σv(y−μ)²` the posterior
//! density of `R` is
//! `f(r) = S r^{m+a₂−1}(1−r)^{n+a₁−1} / [r(b₂+v) + (1−r)(b₁+u)]^{n+m+a₁+a₂}`.

use crate::error::{domain, Result};
use crate::interval::{check_level, Interval};
use crate::point::SufficientStats;
use crate::quadrature::integrate;
use crate::special::ln_gamma;

use super::gibbs::PriorSpec;

fn check(stats: &SufficientStats, n: usize, m: usize, prior: &PriorSpec) -> Result<()> {
    prior.validate()?;
    if n == 0 || m == 0 {
        return Err(domain(format!("sample sizes must be positive (n={n}, m={m})")));
    }
    if !(stats.u > 0.0 && stats.v > 0.0) {
        return Err(domain(format!("sufficient statistics must be positive: {stats:?}")));
    }
    Ok(())
}

/// Log of the posterior density of `R`.
pub fn ln_posterior_pdf_r(stats: &SufficientStats, n: usize, m: usize, prior: &PriorSpec, r: f64) -> Result<f64> {
    check(stats, n, m, prior)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(domain(format!("r must lie in (0,1), got {r}")));
    }
    Ok(ln_pdf(stats, n as f64, m as f64, prior, r))
}

fn ln_pdf(stats: &SufficientStats, n: f64, m: f64, p: &PriorSpec, r: f64) -> f64 {
    let sa = n + p.a1;
    let sb = m + p.a2;
    let cu = p.b1 + stats.u;
    let cv = p.b2 + stats.v;
    let ln_s = ln_gamma(sa + sb) - ln_gamma(sa) - ln_gamma(sb) + sa * cu.ln() + sb * cv.ln();
    ln_s + (sb - 1.0) * r.ln() + (sa - 1.0) * (-r).ln_1p() - (sa + sb) * (r * cv + (1.0 - r) * cu).ln()
}

pub fn posterior_pdf_r_known_mu(stats: &SufficientStats, n: usize, m: usize, prior: &PriorSpec, r: f64) -> Result<f64> {
    ln_posterior_pdf_r(stats, n, m, prior, r).map(f64::exp)
}

/// Lindley approximation to the posterior mean of `R`:
/// `R̃{1 + λ̃R̃²/(α̃²(m+a₂−1)(n+b₁−1))·[λ̃(n+a₁−1) − α̃(m+a₂−1)]}` with
/// `λ̃ = (n+a₁−1)/(b₁+u)`, `α̃ = (m+a₂−1)/(b₂+v)`, `R̃ = α̃/(α̃+λ̃)`.
///
/// The `(n+b₁−1)` factor mixes a shape and a rate; it is kept as stated.
pub fn lindley_estimate(stats: &SufficientStats, n: usize, m: usize, prior: &PriorSpec) -> Result<f64> {
    check(stats, n, m, prior)?;
    let (n, m) = (n as f64, m as f64);
    let ka = n + prior.a1 - 1.0;
    let kb = m + prior.a2 - 1.0;
    let kd = n + prior.b1 - 1.0;
    if !(kb > 0.0 && kd > 0.0 && ka > 0.0) {
        return Err(domain(format!(
            "Lindley denominators must be positive (n+a1-1={ka}, m+a2-1={kb}, n+b1-1={kd})"
        )));
    }
    let lt = ka / (prior.b1 + stats.u);
    let at = kb / (prior.b2 + stats.v);
    let rt = at / (at + lt);
    Ok(rt * (1.0 + lt * rt * rt / (at * at * kb * kd) * (lt * ka - at * kb)))
}

/// Posterior CDF of `R` by adaptive quadrature.
pub fn posterior_cdf_r(stats: &SufficientStats, n: usize, m: usize, prior: &PriorSpec, r: f64) -> Result<f64> {
    check(stats, n, m, prior)?;
    cdf(stats, n as f64, m as f64, prior, r)
}

fn cdf(stats: &SufficientStats, n: f64, m: f64, prior: &PriorSpec, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Ok(0.0);
    }
    if r >= 1.0 {
        return Ok(1.0);
    }
    let f = |t: f64| {
        if t <= 0.0 || t >= 1.0 {
            0.0
        } else {
            ln_pdf(stats, n, m, prior, t).exp()
        }
    };
    // integrate the shorter tail for accuracy near 1
    let v = if r <= 0.5 {
        integrate(f, 0.0, r, 1e-13, 1e-12)?
    } else {
        1.0 - integrate(f, r, 1.0, 1e-13, 1e-12)?
    };
    Ok(v.clamp(0.0, 1.0))
}

fn invert_cdf(stats: &SufficientStats, n: f64, m: f64, prior: &PriorSpec, p: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = 0.5;
    for _ in 0..200 {
        let c = cdf(stats, n, m, prior, x)?;
        let resid = c - p;
        if resid.abs() < 1e-10 {
            return Ok(x);
        }
        if resid > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dens = ln_pdf(stats, n, m, prior, x).exp();
        let mut next = x - resid / dens;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if hi - lo < 1e-15 {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Equal-tail Bayesian interval: `P(R ≤ L) = η/2`, `P(R ≤ U) = 1 − η/2`.
pub fn bayes_interval_known_mu(
    stats: &SufficientStats,
    n: usize,
    m: usize,
    prior: &PriorSpec,
    eta: f64,
) -> Result<Interval> {
    check(stats, n, m, prior)?;
    check_level(eta)?;
    let (nf, mf) = (n as f64, m as f64);
    let lo = invert_cdf(stats, nf, mf, prior, eta / 2.0)?;
    let hi = invert_cdf(stats, nf, mf, prior, 1.0 - eta / 2.0)?;
    Interval::new(lo, hi, 1.0 - eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::function::beta::beta_reg;

    fn st(u: f64, v: f64) -> SufficientStats {
        SufficientStats { u, v }
    }

    // R is a monotone transform of B ~ Beta(m+a₂, n+a₁):
    // R = B/(B + (1−B)k) with k = (b₂+v)/(b₁+u).
    fn closed_cdf(s: &SufficientStats, n: f64, m: f64, p: &PriorSpec, r: f64) -> f64 {
        let k = (p.b2 + s.v) / (p.b1 + s.u);
        let b = k * r / (1.0 - r + k * r);
        beta_reg(m + p.a2, n + p.a1, b)
    }

    #[test]
    fn symmetric_density() {
        let p = PriorSpec::gamma(2.0, 1.0, 2.0, 1.0);
        let s = st(3.0, 3.0);
        for &r in &[0.05, 0.2, 0.37, 0.49] {
            let a = posterior_pdf_r_known_mu(&s, 7, 7, &p, r).unwrap();
            let b = posterior_pdf_r_known_mu(&s, 7, 7, &p, 1.0 - r).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
        assert_abs_diff_eq!(lindley_estimate(&s, 7, 7, &p).unwrap(), 0.5, epsilon = 1e-15);
        let iv = bayes_interval_known_mu(&s, 7, 7, &p, 0.05).unwrap();
        assert_abs_diff_eq!(iv.lo + iv.hi, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn beta_special_case() {
        // b₁+u = b₂+v makes the bracket constant: Beta(m+a₂, n+a₁)
        let p = PriorSpec::gamma(1.0, 0.5, 3.0, 1.5);
        let s = st(2.0, 1.0);
        let (n, m) = (4.0, 6.0);
        let (a, b) = (m + 3.0, n + 1.0);
        let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
        for &r in &[0.1, 0.5, 0.8] {
            let want = ((a - 1.0) * f64::ln(r) + (b - 1.0) * f64::ln(1.0 - r) - ln_beta).exp();
            let got = posterior_pdf_r_known_mu(&s, 4, 6, &p, r).unwrap();
            assert!((got - want).abs() < 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn cdf_and_interval_match_beta_transform() {
        let p = PriorSpec::gamma(0.0, 0.0, 0.0, 0.0);
        let s = st(12.5, 4.0);
        for &r in &[0.05, 0.3, 0.6, 0.95] {
            let got = posterior_cdf_r(&s, 10, 12, &p, r).unwrap();
            assert_abs_diff_eq!(got, closed_cdf(&s, 10.0, 12.0, &p, r), epsilon = 1e-10);
        }
        let iv = bayes_interval_known_mu(&s, 10, 12, &p, 0.05).unwrap();
        assert_abs_diff_eq!(closed_cdf(&s, 10.0, 12.0, &p, iv.lo), 0.025, epsilon = 1e-8);
        assert_abs_diff_eq!(closed_cdf(&s, 10.0, 12.0, &p, iv.hi), 0.975, epsilon = 1e-8);
        let inner = bayes_interval_known_mu(&s, 10, 12, &p, 0.5).unwrap();
        assert!(iv.lo < inner.lo && inner.hi < iv.hi);
    }

    #[test]
    fn domain_errors() {
        let p = PriorSpec::gamma(0.0, 0.0, 0.0, 0.0);
        assert!(posterior_pdf_r_known_mu(&st(1.0, 1.0), 3, 3, &p, 1.0).is_err());
        assert!(lindley_estimate(&st(1.0, 1.0), 1, 3, &p).is_err());
        assert!(lindley_estimate(&st(1.0, 1.0), 3, 1, &p).is_err());
    }
}
