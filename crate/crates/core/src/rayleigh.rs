//! Two-parameter Rayleigh primitives and progressive Type-II censored
//! samples.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand::distr::Open01;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::RngStream;

/// Location `mu` and scale `lambda` of a two-parameter Rayleigh law with
/// density `2λ(x−μ)exp(−λ(x−μ)²)` on `x > μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighParams {
    pub mu: f64,
    pub lambda: f64,
}

impl RayleighParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(domain(format!("location must be finite, got {mu}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(domain(format!("scale must be positive, got {lambda}")));
        }
        Ok(Self { mu, lambda })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= self.mu {
            return 0.0;
        }
        let d = x - self.mu;
        let z = self.lambda * d * d;
        if z.is_infinite() {
            return 0.0;
        }
        2.0 * self.lambda * d * (-z).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.mu {
            return 0.0;
        }
        let d = x - self.mu;
        -(-self.lambda * d * d).exp_m1()
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(domain(format!("probability must lie in [0,1), got {p}")));
        }
        Ok(self.mu + (-(-p).ln_1p() / self.lambda).sqrt())
    }
}

/// `R = P(Y < X) = α/(α+λ)` for `X ~ tR(μ, λ)` and `Y ~ tR(μ, α)`.
pub fn r_true(lambda: f64, alpha: f64) -> Result<f64> {
    if !(lambda > 0.0 && alpha > 0.0) {
        return Err(domain(format!(
            "scales must be positive (lambda={lambda}, alpha={alpha})"
        )));
    }
    Ok(alpha / (alpha + lambda))
}

/// A progressive Type-II censoring plan: `N` units on test, `n` observed
/// failures, `R_i` survivors withdrawn at the i-th failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensoringScheme {
    #[serde(rename = "N")]
    pub total: usize,
    #[serde(rename = "n")]
    pub observed: usize,
    pub removals: Vec<usize>,
}

impl CensoringScheme {
    pub fn new(total: usize, removals: Vec<usize>) -> Result<Self> {
        let s = Self {
            total,
            observed: removals.len(),
            removals,
        };
        s.validate()?;
        Ok(s)
    }

    /// Complete sampling: `N = n`, no withdrawals.
    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, vec![0; n])
    }

    pub fn validate(&self) -> Result<()> {
        if self.observed < 2 {
            return Err(Error::Scheme(format!(
                "at least two observed failures are required, got {}",
                self.observed
            )));
        }
        if self.removals.len() != self.observed {
            return Err(Error::Scheme(format!(
                "{} removal counts given for {} observed failures",
                self.removals.len(),
                self.observed
            )));
        }
        let withdrawn: usize = self.removals.iter().sum();
        if self.observed + withdrawn != self.total {
            return Err(Error::Scheme(format!(
                "n + sum(R) = {} does not equal N = {}",
                self.observed + withdrawn,
                self.total
            )));
        }
        Ok(())
    }

    /// `R_i + 1` as floating-point weights.
    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.removals.iter().map(|&r| r as f64 + 1.0)
    }
}

/// Observed failure times of one progressively censored life test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProgressiveSample {
    scheme: CensoringScheme,
    values: Vec<f64>,
}

impl ProgressiveSample {
    /// Bind strictly increasing failure times to their scheme.
    pub fn new(scheme: CensoringScheme, values: Vec<f64>) -> Result<Self> {
        scheme.validate()?;
        check_values(&scheme, &values, true)?;
        Ok(Self { scheme, values })
    }

    /// Like [`ProgressiveSample::new`] but tolerating ties, as produced by
    /// resampling with replacement.
    pub fn with_ties(scheme: CensoringScheme, values: Vec<f64>) -> Result<Self> {
        scheme.validate()?;
        check_values(&scheme, &values, false)?;
        Ok(Self { scheme, values })
    }

    pub fn scheme(&self) -> &CensoringScheme {
        &self.scheme
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    /// `(x_i, R_i + 1)` pairs.
    pub fn weighted(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.scheme.weights())
    }

    /// Write `index,value` CSV plus a `{N, n, removals}` JSON sidecar.
    pub fn write(&self, csv_path: &Path, scheme_path: &Path) -> Result<()> {
        std::fs::write(csv_path, self.to_csv())?;
        let json = serde_json::to_string_pretty(&self.scheme).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(scheme_path, json + "\n")?;
        Ok(())
    }

    pub fn read(csv_path: &Path, scheme_path: &Path) -> Result<Self> {
        let csv = std::fs::read_to_string(csv_path)?;
        let scheme_text = std::fs::read_to_string(scheme_path)?;
        Self::from_parts(&csv, &scheme_text)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", i + 1, v);
        }
        out
    }

    /// Parse the CSV body and JSON sidecar; rejects anything violating the
    /// sample invariants.
    pub fn from_parts(csv: &str, scheme_json: &str) -> Result<Self> {
        let scheme: CensoringScheme =
            serde_json::from_str(scheme_json).map_err(|e| Error::Parse(format!("scheme sidecar: {e}")))?;
        let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
        match lines.next().map(str::trim) {
            Some("index,value") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `index,value`, found {other:?}"
                )))
            }
        }
        let mut values = Vec::new();
        for (row, line) in lines.enumerate() {
            let (idx, val) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("row {}: expected two fields", row + 1)))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad index `{idx}`", row + 1)))?;
            if idx != row + 1 {
                return Err(Error::Parse(format!("row {}: index {idx} out of sequence", row + 1)));
            }
            let v: f64 = val
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad value `{val}`", row + 1)))?;
            values.push(v);
        }
        Self::new(scheme, values)
    }
}

fn check_values(scheme: &CensoringScheme, values: &[f64], strict: bool) -> Result<()> {
    if values.len() != scheme.observed {
        return Err(domain(format!(
            "{} values supplied for a scheme observing {}",
            values.len(),
            scheme.observed
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(domain("sample contains non-finite values"));
    }
    for w in values.windows(2) {
        if w[1] < w[0] || (strict && w[1] == w[0]) {
            return Err(domain(format!(
                "values must be {} increasing ({} followed by {})",
                if strict { "strictly" } else { "non-decreasingly" },
                w[0],
                w[1]
            )));
        }
    }
    Ok(())
}

/// Draw a progressive Type-II censored sample using the uniform-spacings
/// construction: `V_i = W_i^{1/(i + R_n + … + R_{n−i+1})}`,
/// `U_i = 1 − V_n V_{n−1} … V_{n−i+1}`, `x_i = F⁻¹(U_i)`.
pub fn sample_progressive(
    params: &RayleighParams,
    scheme: &CensoringScheme,
    stream: RngStream,
) -> Result<ProgressiveSample> {
    sample_progressive_with(params, scheme, &mut stream.rng())
}

pub fn sample_progressive_with<G: Rng + ?Sized>(
    params: &RayleighParams,
    scheme: &CensoringScheme,
    rng: &mut G,
) -> Result<ProgressiveSample> {
    scheme.validate()?;
    let n = scheme.observed;
    let mut v = vec![0.0; n];
    let mut tail = 0usize;
    for i in 1..=n {
        tail += scheme.removals[n - i];
        let w: f64 = rng.sample(Open01);
        v[i - 1] = w.powf(1.0 / (i + tail) as f64);
    }
    // U_i = 1 - V_n V_{n-1} ... V_{n-i+1}; V_k lives in v[k-1]
    let mut values = Vec::with_capacity(n);
    let mut log_prod = 0.0;
    for i in 1..=n {
        log_prod += v[n - i].ln();
        let u = -log_prod.exp_m1();
        values.push(params.quantile(u.min(1.0 - f64::EPSILON))?);
    }
    values.sort_by(f64::total_cmp);
    ProgressiveSample::new(scheme.clone(), values)
}
