//! End-to-end analysis of the shipped strength data: joint fit, Wald
//! interval and Gibbs posterior for `R`, plus per-dataset model checks.

use serde::{Deserialize, Serialize};

use crate::asymptotic::asymptotic_ci;
use crate::bayes::{credible_interval, gibbs_chain, posterior_summary, CredibleMode, GibbsOptions, PriorSpec};
use crate::data::{apply_table7_scheme, load_dataset, CensoredScheme};
use crate::error::{Error, Result};
use crate::gof::{ks_test, pp_points, GofResult};
use crate::interval::Interval;
use crate::point::{mle_joint, mle_single, JointFit, MleOptions};
use crate::rayleigh::{ProgressiveSample, RayleighParams};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisMode {
    Complete,
    Scheme1,
    Scheme2,
}

impl std::str::FromStr for AnalysisMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(Self::Complete),
            "scheme1" => Ok(Self::Scheme1),
            "scheme2" => Ok(Self::Scheme2),
            _ => Err(Error::Lookup(format!(
                "unknown mode {s:?}; expected complete, scheme1 or scheme2"
            ))),
        }
    }
}

/// Strength samples `(x, y)` = (20 mm, 10 mm), shifted, for a mode.
pub fn real_samples(mode: AnalysisMode) -> Result<(ProgressiveSample, ProgressiveSample)> {
    let d1 = load_dataset("gauge20", true)?;
    let d2 = load_dataset("gauge10", true)?;
    match mode {
        AnalysisMode::Complete => Ok((d1.complete_sample()?, d2.complete_sample()?)),
        AnalysisMode::Scheme1 => Ok((
            apply_table7_scheme(&d1, CensoredScheme::Scheme1)?,
            apply_table7_scheme(&d2, CensoredScheme::Scheme1)?,
        )),
        AnalysisMode::Scheme2 => Ok((
            apply_table7_scheme(&d1, CensoredScheme::Scheme2)?,
            apply_table7_scheme(&d2, CensoredScheme::Scheme2)?,
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub eta: f64,
    pub seed: RngStream,
    pub gibbs: GibbsOptions,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            eta: 0.05,
            seed: RngStream::new(42, 0),
            gibbs: GibbsOptions::new(1000),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesReport {
    pub prior: PriorSpec,
    pub posterior_mean: f64,
    pub posterior_variance: f64,
    pub credible: Interval,
    pub credible_shortest: Interval,
    pub draws_retained: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealDataReport {
    pub mode: AnalysisMode,
    pub n: usize,
    pub m: usize,
    pub fit: JointFit,
    pub r_mle: f64,
    pub asymptotic_ci: Interval,
    pub bayes: BayesReport,
}

pub fn analyze_real_data(mode: AnalysisMode, prior: &PriorSpec, opts: &AnalysisOptions) -> Result<RealDataReport> {
    let (xs, ys) = real_samples(mode)?;
    let fit = mle_joint(&xs, &ys, &MleOptions::default())?;
    let ci = asymptotic_ci(&xs, &ys, opts.eta, &fit)?;
    let draws = gibbs_chain(&xs, &ys, prior, &opts.gibbs, &mut opts.seed.rng())?;
    let summary = posterior_summary(&draws)?;
    Ok(RealDataReport {
        mode,
        n: xs.len(),
        m: ys.len(),
        r_mle: fit.r_hat,
        fit,
        asymptotic_ci: ci,
        bayes: BayesReport {
            prior: *prior,
            posterior_mean: summary.mean,
            posterior_variance: summary.variance,
            credible: credible_interval(&draws, opts.eta, CredibleMode::EqualTail)?,
            credible_shortest: credible_interval(&draws, opts.eta, CredibleMode::Shortest)?,
            draws_retained: summary.retained,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFit {
    pub dataset: String,
    pub shift_applied: bool,
    pub mu_hat: f64,
    pub lambda_hat: f64,
    pub gof: GofResult,
    pub pp: Vec<(f64, f64)>,
}

/// One-sample fit of a shipped dataset with its KS check. With `params` the
/// check uses those values instead of the fit.
pub fn fit_dataset(name: &str, apply_shift: bool, params: Option<RayleighParams>) -> Result<DatasetFit> {
    let d = load_dataset(name, apply_shift)?;
    let sample = d.complete_sample()?;
    let fit = mle_single(&sample, 1e-12, 10_000)?;
    let used = match params {
        Some(p) => p,
        None => RayleighParams::new(fit.mu_hat, fit.lambda_hat)?,
    };
    Ok(DatasetFit {
        dataset: d.name,
        shift_applied: apply_shift,
        mu_hat: fit.mu_hat,
        lambda_hat: fit.lambda_hat,
        gof: ks_test(&d.values, &used)?,
        pp: pp_points(&d.values, &used),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_parse_and_load() {
        for (s, n) in [("complete", 50), ("scheme1", 10), ("scheme2", 10)] {
            let mode: AnalysisMode = s.parse().unwrap();
            let (xs, ys) = real_samples(mode).unwrap();
            assert_eq!((xs.len(), ys.len()), (n, n));
        }
        assert!("scheme9".parse::<AnalysisMode>().is_err());
    }

    #[test]
    fn report_is_reproducible() {
        let opts = AnalysisOptions {
            gibbs: GibbsOptions::new(200),
            ..AnalysisOptions::default()
        };
        let prior = PriorSpec::gamma(0.0, 0.0, 0.0, 0.0);
        let a = analyze_real_data(AnalysisMode::Scheme2, &prior, &opts).unwrap();
        let b = analyze_real_data(AnalysisMode::Scheme2, &prior, &opts).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.asymptotic_ci.contains(a.r_mle));
    }
}
