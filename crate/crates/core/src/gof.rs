//! Kolmogorov–Smirnov fit check and P-P plot points for the two-parameter
//! Rayleigh model.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rayleigh::RayleighParams;
use crate::special::kolmogorov_sf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub ks_distance: f64,
    /// Asymptotic Kolmogorov p-value at `√n·D`.
    pub p_value: f64,
    pub fitted: RayleighParams,
}

/// `D = maxᵢ max(i/n − F(xᵢ), F(xᵢ) − (i−1)/n)` for sorted `values`.
pub fn ks_test(values: &[f64], params: &RayleighParams) -> Result<GofResult> {
    if values.is_empty() {
        return Err(domain("KS test needs at least one value".to_string()));
    }
    if values.windows(2).any(|w| w[0] > w[1]) {
        return Err(domain("KS test needs sorted values".to_string()));
    }
    let n = values.len() as f64;
    let d = values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = params.cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    Ok(GofResult {
        ks_distance: d,
        p_value: kolmogorov_sf(n.sqrt() * d),
        fitted: *params,
    })
}

/// `(i/(n+1), F(xᵢ))` for sorted `values`.
pub fn pp_points(values: &[f64], params: &RayleighParams) -> Vec<(f64, f64)> {
    let n1 = values.len() as f64 + 1.0;
    values
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n1, params.cdf(x)))
        .collect()
}

/// CSV `empirical,theoretical`.
pub fn pp_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("empirical,theoretical\n");
    for (e, t) in points {
        let _ = writeln!(out, "{e},{t}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_data_gives_half_step() {
        let p = RayleighParams::new(0.5, 2.0).unwrap();
        let n = 40;
        let xs: Vec<f64> = (1..=n).map(|i| p.quantile((i as f64 - 0.5) / n as f64).unwrap()).collect();
        let r = ks_test(&xs, &p).unwrap();
        assert!((r.ks_distance - 0.5 / n as f64).abs() < 1e-12);
        assert!(ks_test(&[], &p).is_err());
    }

    #[test]
    fn location_shift_invariance() {
        let p = RayleighParams::new(1.0, 1.5).unwrap();
        let xs = [1.2, 1.5, 1.7, 2.2, 2.9];
        let d = ks_test(&xs, &p).unwrap().ks_distance;
        let shifted: Vec<f64> = xs.iter().map(|x| x + 3.25).collect();
        let q = RayleighParams::new(4.25, 1.5).unwrap();
        assert!((ks_test(&shifted, &q).unwrap().ks_distance - d).abs() < 1e-12);
    }

    #[test]
    fn pp_median_point() {
        let p = RayleighParams::new(0.0, 1.0).unwrap();
        let med = p.quantile(0.5).unwrap();
        let pts = pp_points(&[med], &p);
        assert!((pts[0].0 - 0.5).abs() < 1e-15 && (pts[0].1 - 0.5).abs() < 1e-12);
        assert!(pp_csv(&pts).starts_with("empirical,theoretical\n"));
    }
}
