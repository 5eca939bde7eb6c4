//! Non-parametric percentile (Boot-p) and studentized (Boot-t) intervals
//! for `R`.
//!
//! Resampling draws the observed failure times with replacement and keeps
//! the original removal scheme. The studentized root is
//! `T* = (R̂* − R̂)/√var_r(R̂*)` with `var_r` already on the variance scale,
//! so the interval is `R̂ + H⁻¹(q)·√var_r(R̂)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::var_r_at;
use crate::error::{domain, Error, Result};
use crate::interval::{check_level, Interval};
use crate::point::{mle_joint, JointFit, MleOptions};
use crate::rayleigh::ProgressiveSample;
use crate::rng::RngStream;

/// Largest tolerated share of failed bootstrap replicates.
pub const MAX_FAILURE_RATE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootConfig {
    pub nboot: usize,
    pub eta: f64,
    pub seed: RngStream,
}

impl BootConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nboot < 2 {
            return Err(domain(format!("nboot must be at least 2, got {}", self.nboot)));
        }
        check_level(self.eta)
    }
}

/// Draw `n` observed values with replacement and sort them.
pub fn boot_resample<G: Rng + ?Sized>(sample: &ProgressiveSample, rng: &mut G) -> ProgressiveSample {
    let vals = sample.values();
    let mut out: Vec<f64> = (0..vals.len()).map(|_| vals[rng.random_range(0..vals.len())]).collect();
    out.sort_by(f64::total_cmp);
    ProgressiveSample::with_ties(sample.scheme().clone(), out).expect("resample of a valid sample is valid")
}

/// Outcome of one resample pair.
#[derive(Debug, Clone, Copy)]
struct Replicate {
    r_star: f64,
    /// `None` when the information at the bootstrap fit is singular.
    t_star: Option<f64>,
}

/// Both bootstrap intervals from one shared set of resamples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootIntervals {
    pub boot_p: Interval,
    pub boot_t: Interval,
    /// Replicates whose MLE failed.
    pub failed: usize,
    /// Replicates with a fit but singular information (excluded from Boot-t).
    pub singular: usize,
}

fn replicates(xs: &ProgressiveSample, ys: &ProgressiveSample, r_hat: f64, cfg: &BootConfig) -> Vec<Option<Replicate>> {
    (0..cfg.nboot)
        .into_par_iter()
        .map(|b| {
            let mut rng = cfg.seed.derive(b as u64).rng();
            let xb = boot_resample(xs, &mut rng);
            let yb = boot_resample(ys, &mut rng);
            let fit = mle_joint(&xb, &yb, &MleOptions::default()).ok()?;
            if !fit.r_hat.is_finite() {
                return None;
            }
            let t_star = var_r_at(&xb, &yb, &fit)
                .ok()
                .map(|v| (fit.r_hat - r_hat) / v.sqrt())
                .filter(|t| t.is_finite());
            Some(Replicate {
                r_star: fit.r_hat,
                t_star,
            })
        })
        .collect()
}

/// Type-1 empirical quantile: the `⌈k·q⌉`-th smallest value (1-based),
/// clamped to the sample.
pub fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    let k = sorted.len();
    let idx = ((k as f64 * q).ceil() as usize).clamp(1, k);
    sorted[idx - 1]
}

fn check_failures(failed: usize, total: usize) -> Result<()> {
    if failed as f64 > MAX_FAILURE_RATE * total as f64 {
        return Err(Error::Bootstrap { failed, total });
    }
    Ok(())
}

/// Boot-p and Boot-t intervals sharing resamples. `fit` is the joint MLE on
/// the original data.
pub fn boot_intervals(
    xs: &ProgressiveSample,
    ys: &ProgressiveSample,
    fit: &JointFit,
    cfg: &BootConfig,
) -> Result<BootIntervals> {
    cfg.validate()?;
    let reps = replicates(xs, ys, fit.r_hat, cfg);
    let ok: Vec<Replicate> = reps.iter().flatten().copied().collect();
    let failed = cfg.nboot - ok.len();
    check_failures(failed, cfg.nboot)?;

    let mut r_star: Vec<f64> = ok.iter().map(|r| r.r_star).collect();
    r_star.sort_by(f64::total_cmp);
    let (ql, qh) = (cfg.eta / 2.0, 1.0 - cfg.eta / 2.0);
    let level = 1.0 - cfg.eta;
    let boot_p = Interval::ordered(empirical_quantile(&r_star, ql), empirical_quantile(&r_star, qh), level).clamp_unit();

    let mut t_star: Vec<f64> = ok.iter().filter_map(|r| r.t_star).collect();
    let singular = ok.len() - t_star.len();
    check_failures(failed + singular, cfg.nboot)?;
    t_star.sort_by(f64::total_cmp);
    let sd = var_r_at(xs, ys, fit)?.sqrt();
    let boot_t = Interval::ordered(
        fit.r_hat + empirical_quantile(&t_star, ql) * sd,
        fit.r_hat + empirical_quantile(&t_star, qh) * sd,
        level,
    )
    .clamp_unit();
    Ok(BootIntervals {
        boot_p,
        boot_t,
        failed,
        singular,
    })
}

pub fn boot_p_ci(xs: &ProgressiveSample, ys: &ProgressiveSample, cfg: &BootConfig) -> Result<Interval> {
    cfg.validate()?;
    let fit = mle_joint(xs, ys, &MleOptions::default())?;
    let reps = replicates(xs, ys, fit.r_hat, cfg);
    let mut r_star: Vec<f64> = reps.iter().flatten().map(|r| r.r_star).collect();
    check_failures(cfg.nboot - r_star.len(), cfg.nboot)?;
    r_star.sort_by(f64::total_cmp);
    Ok(Interval::ordered(
        empirical_quantile(&r_star, cfg.eta / 2.0),
        empirical_quantile(&r_star, 1.0 - cfg.eta / 2.0),
        1.0 - cfg.eta,
    )
    .clamp_unit())
}

pub fn boot_t_ci(xs: &ProgressiveSample, ys: &ProgressiveSample, cfg: &BootConfig) -> Result<Interval> {
    let fit = mle_joint(xs, ys, &MleOptions::default())?;
    Ok(boot_intervals(xs, ys, &fit, cfg)?.boot_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rayleigh::{sample_progressive, CensoringScheme, RayleighParams};

    fn data(seed: u64) -> (ProgressiveSample, ProgressiveSample) {
        let mut removals = vec![0; 20];
        removals[19] = 10;
        let scheme = CensoringScheme::new(30, removals).unwrap();
        let xs = sample_progressive(&RayleighParams::new(0.5, 1.0).unwrap(), &scheme, RngStream::new(seed, 0)).unwrap();
        let ys = sample_progressive(&RayleighParams::new(0.5, 2.0).unwrap(), &scheme, RngStream::new(seed, 1)).unwrap();
        (xs, ys)
    }

    #[test]
    fn resample_properties() {
        let (xs, _) = data(3);
        let a = boot_resample(&xs, &mut RngStream::new(9, 9).rng());
        let b = boot_resample(&xs, &mut RngStream::new(9, 9).rng());
        assert_eq!(a, b);
        assert!(a.values().windows(2).all(|w| w[0] <= w[1]));
        assert!(a.values().iter().all(|v| xs.values().contains(v)));
        assert_eq!(a.scheme(), xs.scheme());

        let flat = ProgressiveSample::with_ties(CensoringScheme::complete(4).unwrap(), vec![2.0; 4]).unwrap();
        assert_eq!(boot_resample(&flat, &mut RngStream::new(1, 1).rng()).values(), &[2.0; 4]);
    }

    #[test]
    fn quantile_convention() {
        let v: Vec<f64> = (1..=250).map(f64::from).collect();
        assert_eq!(empirical_quantile(&v, 0.025), 7.0);
        assert_eq!(empirical_quantile(&v, 0.975), 244.0);
        assert_eq!(empirical_quantile(&v, 0.0), 1.0);
    }

    #[test]
    fn intervals_reproducible_and_in_unit() {
        let (xs, ys) = data(5);
        let cfg = BootConfig {
            nboot: 60,
            eta: 0.1,
            seed: RngStream::new(11, 0),
        };
        let fit = mle_joint(&xs, &ys, &MleOptions::default()).unwrap();
        let a = boot_intervals(&xs, &ys, &fit, &cfg).unwrap();
        let b = boot_intervals(&xs, &ys, &fit, &cfg).unwrap();
        assert_eq!(a, b);
        for iv in [a.boot_p, a.boot_t] {
            assert!(0.0 <= iv.lo && iv.lo <= iv.hi && iv.hi <= 1.0);
        }
        assert_eq!(boot_p_ci(&xs, &ys, &cfg).unwrap(), a.boot_p);
        assert!(BootConfig { nboot: 1, ..cfg }.validate().is_err());
    }
}
