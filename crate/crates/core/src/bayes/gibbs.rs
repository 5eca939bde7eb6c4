//! Gibbs sampler for `(λ, α, μ)` under independent gamma priors on the
//! scales and a uniform prior on `μ`.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::ars::sample_log_concave;
use crate::error::{domain, Error, Result};
use crate::interval::{check_level, Interval};
use crate::point::{mle_joint, mle_known_mu, MleOptions};
use crate::rayleigh::ProgressiveSample;

/// Gamma hyper-parameters (shape `a`, rate `b`) for `λ` and `α`, and the
/// upper end `t1` of the uniform prior on `μ`. Zero hyper-parameters give
/// the improper non-informative prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    /// Defaults to `min(x₁, y₁)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
}

impl PriorSpec {
    pub fn gamma(a1: f64, b1: f64, a2: f64, b2: f64) -> Self {
        Self { a1, b1, a2, b2, t1: None }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a1", self.a1), ("b1", self.b1), ("a2", self.a2), ("b2", self.b2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(domain(format!("prior hyper-parameter {name} must be finite and >= 0, got {v}")));
            }
        }
        if let Some(t1) = self.t1 {
            if !(t1 > 0.0 && t1.is_finite()) {
                return Err(domain(format!("prior bound t1 must be positive, got {t1}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub lambda: f64,
    pub alpha: f64,
    pub mu: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub draws: Vec<Draw>,
    pub burn_in: usize,
}

impl PosteriorDraws {
    pub fn retained(&self) -> &[Draw] {
        &self.draws[self.burn_in.min(self.draws.len())..]
    }

    /// Retained `R` draws.
    pub fn r_values(&self) -> Vec<f64> {
        self.retained().iter().map(|d| d.r).collect()
    }

    /// CSV `t,lambda,alpha,mu,r` over the full chain, `t` counting from 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,lambda,alpha,mu,r\n");
        for (t, d) in self.draws.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{},{}", t + 1, d.lambda, d.alpha, d.mu, d.r);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsOptions {
    pub t_total: usize,
    /// Defaults to 20% of `t_total`.
    #[serde(default)]
    pub burn_in: Option<usize>,
    /// `(λ₀, α₀, μ₀)`; defaults to the joint MLE when it lies inside the
    /// μ-support, else the support midpoint with the known-μ scale fits.
    #[serde(default)]
    pub init: Option<(f64, f64, f64)>,
    /// Draw `λ` and `α` given the previous `μ` instead of the fresh one.
    #[serde(default)]
    pub lagged_mu: bool,
}

impl GibbsOptions {
    pub fn new(t_total: usize) -> Self {
        Self {
            t_total,
            burn_in: None,
            init: None,
            lagged_mu: false,
        }
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(self.t_total / 5)
    }
}

/// Weighted sums `Σw`, `Σw·(x−c)`, `Σw·(x−c)²` about `c = x₁`.
#[derive(Debug, Clone, Copy)]
struct Moments {
    c: f64,
    w: f64,
    wx: f64,
    wxx: f64,
}

impl Moments {
    fn of(sample: &ProgressiveSample) -> Self {
        let c = sample.first();
        let mut m = Self { c, w: 0.0, wx: 0.0, wxx: 0.0 };
        for (x, w) in sample.weighted() {
            m.w += w;
            m.wx += w * (x - c);
            m.wxx += w * (x - c) * (x - c);
        }
        m
    }

    /// `Σw(x−μ)²`
    fn ss(&self, mu: f64) -> f64 {
        let s = self.c - mu;
        self.wxx + 2.0 * s * self.wx + s * s * self.w
    }

    /// `Σw(x−μ)`
    fn s1(&self, mu: f64) -> f64 {
        self.wx + (self.c - mu) * self.w
    }
}

/// The μ full conditional `h(μ) = Σln(x−μ) + Σln(y−μ) − λΣw(x−μ)² − αΣv(y−μ)²`
/// up to a constant, on `(0, min(x₁, y₁, t₁))`.
pub struct MuConditional<'a> {
    xs: &'a ProgressiveSample,
    ys: &'a ProgressiveSample,
    mx: Moments,
    my: Moments,
    upper: f64,
}

impl<'a> MuConditional<'a> {
    pub fn new(xs: &'a ProgressiveSample, ys: &'a ProgressiveSample, t1: Option<f64>) -> Result<Self> {
        let top = xs.first().min(ys.first());
        let upper = t1.map_or(top, |t| t.min(top));
        if !(upper > 0.0) {
            return Err(domain(format!("μ support (0, {upper}) is empty")));
        }
        Ok(Self {
            xs,
            ys,
            mx: Moments::of(xs),
            my: Moments::of(ys),
            upper,
        })
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// `(h, h')`
    pub fn eval(&self, lambda: f64, alpha: f64, mu: f64) -> (f64, f64) {
        let mut ln = 0.0;
        let mut inv = 0.0;
        for &x in self.xs.values().iter().chain(self.ys.values()) {
            let d = x - mu;
            ln += d.ln();
            inv += 1.0 / d;
        }
        let h = ln - lambda * self.mx.ss(mu) - alpha * self.my.ss(mu);
        let dh = -inv + 2.0 * (lambda * self.mx.s1(mu) + alpha * self.my.s1(mu));
        (h, dh)
    }

    /// `(h', h'')`
    pub fn derivs(&self, lambda: f64, alpha: f64, mu: f64) -> (f64, f64) {
        let mut inv = 0.0;
        let mut inv2 = 0.0;
        for &x in self.xs.values().iter().chain(self.ys.values()) {
            let r = 1.0 / (x - mu);
            inv += r;
            inv2 += r * r;
        }
        let dh = -inv + 2.0 * (lambda * self.mx.s1(mu) + alpha * self.my.s1(mu));
        let d2h = -inv2 - 2.0 * (lambda * self.mx.w + alpha * self.my.w);
        (dh, d2h)
    }

    /// Mode of the conditional on `[0, upper]` by bracketed Newton,
    /// starting from `start`.
    fn mode(&self, lambda: f64, alpha: f64, start: f64) -> (f64, f64) {
        let (d0, c0) = self.derivs(lambda, alpha, 0.0);
        if d0 <= 0.0 {
            return (0.0, c0);
        }
        let (mut lo, mut hi) = (0.0, self.upper);
        let mut x = start.clamp(0.0, self.upper);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let mut curv = c0;
        for _ in 0..100 {
            let (d, c) = self.derivs(lambda, alpha, x);
            curv = c;
            if d > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if d == 0.0 || hi - lo < 1e-15 * self.upper {
                break;
            }
            let mut next = x - d / c;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-10 * self.upper {
                x = next;
                break;
            }
            x = next;
        }
        (x, curv)
    }

    /// One exact draw from the conditional. `hint` seeds the mode search.
    pub fn sample<G: Rng + ?Sized>(&self, lambda: f64, alpha: f64, hint: f64, rng: &mut G) -> Result<f64> {
        if !(lambda > 0.0 && alpha > 0.0) {
            return Err(domain(format!("scales must be positive, got λ={lambda}, α={alpha}")));
        }
        let (mode, curv) = self.mode(lambda, alpha, hint);
        let sd = if curv < 0.0 { (-curv).sqrt().recip() } else { 0.25 * self.upper };
        let u = self.upper;
        // abscissae on both sides of the mode, kept inside the support
        let inside = |x: f64| x.clamp(1e-3 * u.min(sd), u - 1e-3 * (u - mode).min(sd).max(f64::MIN_POSITIVE));
        let init = [inside(mode - sd), inside(mode), inside(mode + sd)];
        sample_log_concave(|m| self.eval(lambda, alpha, m), 0.0, u, &init, rng)
    }
}

fn gamma_draw<G: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut G) -> Result<f64> {
    let g = Gamma::new(shape, 1.0 / rate)
        .map_err(|e| Error::Numerical(format!("gamma({shape}, rate {rate}): {e}")))?;
    Ok(g.sample(rng))
}

fn default_init(xs: &ProgressiveSample, ys: &ProgressiveSample, upper: f64) -> Result<(f64, f64, f64)> {
    if let Ok(fit) = mle_joint(xs, ys, &MleOptions::default()) {
        if fit.mu_hat > 0.0 && fit.mu_hat < upper {
            return Ok((fit.lambda_hat, fit.alpha_hat, fit.mu_hat));
        }
    }
    let mu = 0.5 * upper;
    let fit = mle_known_mu(xs, ys, mu)?;
    Ok((fit.lambda_hat, fit.alpha_hat, mu))
}

/// Systematic-scan Gibbs chain of length `t_total`.
///
/// Each sweep draws `μ₍ₜ₎` given `(λ₍ₜ₋₁₎, α₍ₜ₋₁₎)`, then
/// `λ₍ₜ₎ ~ Γ(n+a₁, b₁+Σw(x−μ)²)` and `α₍ₜ₎ ~ Γ(m+a₂, b₂+Σv(y−μ)²)` at
/// `μ = μ₍ₜ₎`, or at `μ₍ₜ₋₁₎` with `lagged_mu`.
pub fn gibbs_chain<G: Rng + ?Sized>(
    xs: &ProgressiveSample,
    ys: &ProgressiveSample,
    prior: &PriorSpec,
    opts: &GibbsOptions,
    rng: &mut G,
) -> Result<PosteriorDraws> {
    prior.validate()?;
    let burn_in = opts.burn_in();
    if opts.t_total == 0 || burn_in >= opts.t_total {
        return Err(domain(format!(
            "need t_total > burn_in (t_total={}, burn_in={burn_in})",
            opts.t_total
        )));
    }
    let cond = MuConditional::new(xs, ys, prior.t1)?;
    let (mut lambda, mut alpha, mut mu) = match opts.init {
        Some(init) => init,
        None => default_init(xs, ys, cond.upper)?,
    };
    if !(lambda > 0.0 && alpha > 0.0 && mu > 0.0 && mu < cond.upper) {
        return Err(domain(format!(
            "initial state (λ={lambda}, α={alpha}, μ={mu}) outside the support"
        )));
    }
    let shape_l = xs.len() as f64 + prior.a1;
    let shape_a = ys.len() as f64 + prior.a2;
    let mut draws = Vec::with_capacity(opts.t_total);
    for _ in 0..opts.t_total {
        let new_mu = cond.sample(lambda, alpha, mu, rng)?;
        let at = if opts.lagged_mu { mu } else { new_mu };
        lambda = gamma_draw(shape_l, prior.b1 + cond.mx.ss(at), rng)?;
        alpha = gamma_draw(shape_a, prior.b2 + cond.my.ss(at), rng)?;
        mu = new_mu;
        draws.push(Draw {
            lambda,
            alpha,
            mu,
            r: alpha / (alpha + lambda),
        });
    }
    Ok(PosteriorDraws { draws, burn_in })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub mean: f64,
    /// Divide-by-`T` variance.
    pub variance: f64,
    pub retained: usize,
}

pub fn posterior_summary(draws: &PosteriorDraws) -> Result<PosteriorSummary> {
    let r = draws.r_values();
    if r.len() < 2 {
        return Err(domain(format!("need at least 2 retained draws, got {}", r.len())));
    }
    let t = r.len() as f64;
    let mean = r.iter().sum::<f64>() / t;
    let variance = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / t;
    Ok(PosteriorSummary {
        mean,
        variance,
        retained: r.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CredibleMode {
    /// Order statistics `⌈(η/2)T⌉` and `⌈(1−η/2)T⌉`.
    #[default]
    EqualTail,
    /// Narrowest window holding `⌈(1−η)T⌉` sorted draws.
    Shortest,
}

pub fn credible_interval(draws: &PosteriorDraws, eta: f64, mode: CredibleMode) -> Result<Interval> {
    check_level(eta)?;
    let mut r = draws.r_values();
    r.sort_by(f64::total_cmp);
    credible_from_sorted(&r, eta, mode)
}

/// Credible interval from already sorted draws.
pub fn credible_from_sorted(r: &[f64], eta: f64, mode: CredibleMode) -> Result<Interval> {
    let t = r.len();
    let level = 1.0 - eta;
    match mode {
        CredibleMode::EqualTail => {
            if (eta / 2.0) * (t as f64) < 1.0 {
                return Err(domain(format!("{t} draws are too few for eta = {eta}")));
            }
            let i = ((eta / 2.0) * t as f64).ceil() as usize;
            let j = ((1.0 - eta / 2.0) * t as f64).ceil() as usize;
            if i < 1 || j > t {
                return Err(domain(format!("credible indices ({i}, {j}) out of range for {t} draws")));
            }
            Ok(Interval {
                lo: r[i - 1],
                hi: r[j - 1],
                level,
            })
        }
        CredibleMode::Shortest => {
            let k = (level * t as f64).ceil() as usize;
            if k < 1 || k > t {
                return Err(domain(format!("window of {k} draws out of range for {t} draws")));
            }
            let start = (0..=t - k)
                .min_by(|&a, &b| (r[a + k - 1] - r[a]).total_cmp(&(r[b + k - 1] - r[b])))
                .unwrap();
            Ok(Interval {
                lo: r[start],
                hi: r[start + k - 1],
                level,
            })
        }
    }
}
