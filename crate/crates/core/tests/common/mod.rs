//! Independent oracles shared by the integration and acceptance tests.
//! Nothing here calls the crate's own numerics.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite 20-point Gauss-Legendre over `panels` equal panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let gl = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
        let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        total += gl.iter().map(|&(x, w)| w * f(c + r * x)).sum::<f64>() * r;
    }
    total
}

/// Conditional density of the scaled first spacing `z` given the total `u`
/// for `n` observations: `(n−1)(u−z)^{n−2}/u^{n−1}` on `(0, u)`.
fn first_given_total(z: f64, u: f64, n: usize) -> f64 {
    (n - 1) as f64 * (u - z).powi(n as i32 - 2) / u.powi(n as i32 - 1)
}

/// `P(D < Z | U=u, V=v)` by 2-D quadrature; this is the UMVUE of `R`.
pub fn umvue_by_double_integral(u: f64, v: f64, n: usize, m: usize) -> f64 {
    // the integrand is polynomial on each piece, so one panel is exact
    let outer = |z: f64| {
        let top = z.min(v);
        first_given_total(z, u, n) * integrate(|d| first_given_total(d, v, m), 0.0, top, 1)
    };
    let split = u.min(v);
    integrate(outer, 0.0, split, 1) + if u > v { integrate(outer, split, u, 1) } else { 0.0 }
}

/// `x` solving `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Beta(a, b) density.
pub fn beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    ((a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() + ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)).exp()
}

/// Posterior mean of `R` at a known location: with gamma priors
/// `R = B/(B + (1−B)k)`, `B ~ Beta(m+a2, n+a1)`, `k = (b2+v)/(b1+u)`.
pub fn known_mu_posterior_mean(u: f64, v: f64, n: usize, m: usize, a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    let (a, b) = (m as f64 + a2, n as f64 + a1);
    let k = (b2 + v) / (b1 + u);
    integrate(|t| beta_pdf(t, a, b) * t / (t + (1.0 - t) * k), 0.0, 1.0, 200)
}

/// F(d1, 2) distribution function: `(d1 x / (d1 x + 2))^{d1/2}`.
pub fn f_cdf_d2_two(x: f64, d1: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (d1 * x / (d1 * x + 2.0)).powf(d1 / 2.0)
    }
}

/// One-sample KS distance against `cdf` and its asymptotic p-value.
pub fn ks_one_sample(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    let t = n.sqrt() * d;
    let p = if t < 0.2 {
        1.0
    } else {
        let s: f64 = (1..200)
            .map(|k| {
                let k = k as f64;
                (if k as i64 % 2 == 1 { 1.0 } else { -1.0 }) * (-2.0 * k * k * t * t).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    };
    (d, p)
}

/// Binomial standard error of a coverage proportion.
pub fn coverage_se(p: f64, reps: usize) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

/// Posterior mean of `R` with `μ` unknown: `λ`, `α` integrated out in
/// closed form, then quadrature over `μ ∈ (0, t1)` of the marginal times
/// the known-location mean. Samples are `(value, R_i + 1)` pairs.
pub fn joint_posterior_mean_r(
    xs: &[(f64, f64)],
    ys: &[(f64, f64)],
    (a1, b1, a2, b2): (f64, f64, f64, f64),
    t1: f64,
) -> f64 {
    let (n, m) = (xs.len(), ys.len());
    let ss = |s: &[(f64, f64)], mu: f64| s.iter().map(|&(x, w)| w * (x - mu).powi(2)).sum::<f64>();
    let ln_marginal = |mu: f64| {
        let logs: f64 = xs.iter().chain(ys).map(|&(x, _)| (x - mu).ln()).sum();
        logs - (n as f64 + a1) * (b1 + ss(xs, mu)).ln() - (m as f64 + a2) * (b2 + ss(ys, mu)).ln()
    };
    let gl = gauss_legendre(20);
    let panels = 400;
    let h = t1 / panels as f64;
    let mut nodes = Vec::with_capacity(panels * 20);
    for p in 0..panels {
        let c = (p as f64 + 0.5) * h;
        for &(x, w) in &gl {
            let mu = c + 0.5 * h * x;
            nodes.push((mu, 0.5 * h * w, ln_marginal(mu)));
        }
    }
    let top = nodes.iter().map(|t| t.2).fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (mu, w, l) in nodes {
        let wt = w * (l - top).exp();
        if wt < 1e-300 {
            continue;
        }
        let (a, b) = (m as f64 + a2, n as f64 + a1);
        let k = (b2 + ss(ys, mu)) / (b1 + ss(xs, mu));
        let inner = integrate(|t| beta_pdf(t, a, b) * t / (t + (1.0 - t) * k), 0.0, 1.0, 20);
        num += wt * inner;
        den += wt;
    }
    num / den
}
