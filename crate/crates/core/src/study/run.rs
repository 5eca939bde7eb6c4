//! The Monte Carlo engine.
//!
//! Every replication draws from its own stream derived from
//! `(seed, cell, replication)`. Replications are evaluated in parallel,
//! collected in index order and accumulated sequentially, so reports do
//! not depend on the number of workers.

use std::ops::Range;

use rayon::prelude::*;

use super::config::StudyConfig;
use super::report::{mu_label, StudyReport, Table};
use crate::asymptotic::asymptotic_ci;
use crate::bayes::{
    bayes_interval_known_mu, credible_interval, gibbs_chain, lindley_estimate, posterior_summary, CredibleMode,
    GibbsOptions,
};
use crate::bootstrap::{boot_intervals, BootConfig};
use crate::error::Result;
use crate::exact::exact_ci_r_known_mu;
use crate::point::{mle_joint, mle_known_mu, sufficient_stats, umvue_r, MleOptions};
use crate::rayleigh::{r_true, sample_progressive_with, CensoringScheme, ProgressiveSample, RayleighParams};
use crate::rng::RngStream;

/// Which half of the study to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StudyKind {
    pub points: bool,
    pub intervals: bool,
}

impl StudyKind {
    pub const POINTS: Self = Self {
        points: true,
        intervals: false,
    };
    pub const INTERVALS: Self = Self {
        points: false,
        intervals: true,
    };
    pub const BOTH: Self = Self {
        points: true,
        intervals: true,
    };
}

#[derive(Debug, Clone, Copy)]
enum Outcome {
    Point(f64),
    Interval(f64, f64),
    Failed,
}

type RepResult = Vec<(String, Outcome)>;

fn draw_pair(
    stream: RngStream,
    px: &RayleighParams,
    py: &RayleighParams,
    sx: &CensoringScheme,
    sy: &CensoringScheme,
) -> Result<(ProgressiveSample, ProgressiveSample)> {
    let mut rng = stream.derive(0).rng();
    let xs = sample_progressive_with(px, sx, &mut rng)?;
    let ys = sample_progressive_with(py, sy, &mut rng)?;
    Ok((xs, ys))
}

fn joint_rep(
    cfg: &StudyConfig,
    kind: StudyKind,
    (xs, ys): (ProgressiveSample, ProgressiveSample),
    stream: RngStream,
) -> RepResult {
    let est = &cfg.estimators;
    let mut out: RepResult = Vec::new();
    let need_fit = (kind.points && est.mle) || (kind.intervals && (est.asymptotic || est.boot_p || est.boot_t));
    let fit = if need_fit {
        mle_joint(&xs, &ys, &MleOptions::default()).ok()
    } else {
        None
    };
    if kind.points && est.mle {
        out.push(("MLE".into(), fit.as_ref().map_or(Outcome::Failed, |f| Outcome::Point(f.r_hat))));
    }
    if kind.intervals && est.asymptotic {
        let iv = fit.as_ref().and_then(|f| asymptotic_ci(&xs, &ys, cfg.eta, f).ok());
        out.push(("asymptotic".into(), iv.map_or(Outcome::Failed, |i| Outcome::Interval(i.lo, i.hi))));
    }
    if kind.intervals && (est.boot_p || est.boot_t) {
        let bcfg = BootConfig {
            nboot: cfg.nboot,
            eta: cfg.eta,
            seed: stream.derive(1),
        };
        let b = fit.as_ref().and_then(|f| boot_intervals(&xs, &ys, f, &bcfg).ok());
        if est.boot_p {
            out.push((
                "Boot-p".into(),
                b.as_ref().map_or(Outcome::Failed, |b| Outcome::Interval(b.boot_p.lo, b.boot_p.hi)),
            ));
        }
        if est.boot_t {
            out.push((
                "Boot-t".into(),
                b.as_ref().map_or(Outcome::Failed, |b| Outcome::Interval(b.boot_t.lo, b.boot_t.hi)),
            ));
        }
    }
    let want_mean = kind.points && est.bayes;
    let want_cred = kind.intervals && est.credible;
    if want_mean || want_cred {
        let init = fit
            .as_ref()
            .filter(|f| f.mu_hat > 0.0)
            .map(|f| (f.lambda_hat, f.alpha_hat, f.mu_hat));
        let opts = GibbsOptions {
            t_total: cfg.gibbs_t,
            burn_in: Some(cfg.burn_in()),
            init,
            lagged_mu: false,
        };
        for (k, p) in cfg.priors.iter().enumerate() {
            let chain = gibbs_chain(&xs, &ys, &p.prior, &opts, &mut stream.derive(2 + k as u64).rng());
            if want_mean {
                let m = chain.as_ref().ok().and_then(|c| posterior_summary(c).ok());
                out.push((p.label.clone(), m.map_or(Outcome::Failed, |s| Outcome::Point(s.mean))));
            }
            if want_cred {
                let iv = chain
                    .as_ref()
                    .ok()
                    .and_then(|c| credible_interval(c, cfg.eta, CredibleMode::EqualTail).ok());
                out.push((
                    format!("{}-credible", p.label),
                    iv.map_or(Outcome::Failed, |i| Outcome::Interval(i.lo, i.hi)),
                ));
            }
        }
    }
    out
}

fn known_mu_rep(
    cfg: &StudyConfig,
    kind: StudyKind,
    mu: f64,
    (xs, ys): (ProgressiveSample, ProgressiveSample),
) -> RepResult {
    let mut out: RepResult = Vec::new();
    let (n, m) = (xs.len(), ys.len());
    let prior = &cfg.known_mu.prior;
    let stats = sufficient_stats(&xs, &ys, mu).ok();
    let point = |v: Option<f64>| v.map_or(Outcome::Failed, Outcome::Point);
    if kind.points {
        let mle = mle_known_mu(&xs, &ys, mu).ok().map(|f| f.r_hat);
        out.push(("MLE".into(), point(mle)));
        out.push(("UMVUE".into(), point(stats.as_ref().and_then(|s| umvue_r(s, n, m).ok()))));
        let lind = stats.as_ref().and_then(|s| lindley_estimate(s, n, m, prior).ok());
        out.push(("Lindley".into(), point(lind)));
    }
    if kind.intervals {
        let iv = stats
            .as_ref()
            .and_then(|s| bayes_interval_known_mu(s, n, m, prior, cfg.eta).ok());
        out.push((
            "Lindley-interval".into(),
            iv.map_or(Outcome::Failed, |i| Outcome::Interval(i.lo, i.hi)),
        ));
        let ex = exact_ci_r_known_mu(&xs, &ys, mu, cfg.eta).ok();
        out.push(("exact".into(), ex.map_or(Outcome::Failed, |i| Outcome::Interval(i.lo, i.hi))));
    }
    out
}

/// Stream for replication `rep` of cell `(table, setting, pair)`.
pub fn replication_stream(seed: u64, table: u64, setting: usize, pair: usize, rep: usize) -> RngStream {
    RngStream::new(seed, 0)
        .derive((table << 48) | ((setting as u64) << 24) | pair as u64)
        .derive(rep as u64)
}

fn accumulate(report: &mut StudyReport, table: Table, setting: &str, pair: &str, truth: f64, reps: Vec<RepResult>) {
    for rep in reps {
        for (method, outcome) in rep {
            let acc = report.cell_mut(table, setting, pair, &method);
            match outcome {
                Outcome::Point(v) => acc.add_point(v, truth),
                Outcome::Interval(lo, hi) => acc.add_interval(lo, hi, truth),
                Outcome::Failed => acc.add_failure(),
            }
        }
    }
}

/// Run replications `reps` of the study. `progress` is called after each
/// finished cell with a short description.
pub fn run_study_range(
    cfg: &StudyConfig,
    kind: StudyKind,
    reps: Range<usize>,
    progress: &(dyn Fn(&str) + Sync),
) -> Result<StudyReport> {
    cfg.validate()?;
    let mut report = StudyReport {
        replications: reps.len(),
        ..StudyReport::default()
    };
    let est = &cfg.estimators;
    let joint_wanted = (kind.points && (est.mle || est.bayes))
        || (kind.intervals && (est.asymptotic || est.boot_p || est.boot_t || est.credible));
    if joint_wanted {
        for (si, ps) in cfg.parameter_sets.iter().enumerate() {
            let px = RayleighParams::new(ps.mu, ps.lambda)?;
            let py = RayleighParams::new(ps.mu, ps.alpha)?;
            let truth = r_true(ps.lambda, ps.alpha)?;
            for (pi, (sx, sy)) in cfg.scheme_pairs.iter().enumerate() {
                let results: Vec<RepResult> = reps
                    .clone()
                    .into_par_iter()
                    .map(|rep| {
                        let stream = replication_stream(cfg.seed, 0, si, pi, rep);
                        let data = draw_pair(stream, &px, &py, &sx.scheme, &sy.scheme)?;
                        Ok(joint_rep(cfg, kind, data, stream))
                    })
                    .collect::<Result<_>>()?;
                let pair = cfg.pair_label(pi);
                accumulate(&mut report, Table::Joint, &ps.label, &pair, truth, results);
                progress(&format!("{} {pair}", ps.label));
            }
        }
    }
    if est.known_mu {
        let km = &cfg.known_mu;
        let truth = r_true(km.lambda, km.alpha)?;
        for (si, &mu) in km.mu_values.iter().enumerate() {
            let px = RayleighParams::new(mu, km.lambda)?;
            let py = RayleighParams::new(mu, km.alpha)?;
            for (pi, (sx, sy)) in cfg.scheme_pairs.iter().enumerate() {
                let results: Vec<RepResult> = reps
                    .clone()
                    .into_par_iter()
                    .map(|rep| {
                        let stream = replication_stream(cfg.seed, 1, si, pi, rep);
                        let data = draw_pair(stream, &px, &py, &sx.scheme, &sy.scheme)?;
                        Ok(known_mu_rep(cfg, kind, mu, data))
                    })
                    .collect::<Result<_>>()?;
                let pair = cfg.pair_label(pi);
                let setting = mu_label(mu);
                accumulate(&mut report, Table::KnownMu, &setting, &pair, truth, results);
                progress(&format!("mu={setting} {pair}"));
            }
        }
    }
    Ok(report)
}

pub fn run_study(cfg: &StudyConfig, kind: StudyKind) -> Result<StudyReport> {
    run_study_range(cfg, kind, 0..cfg.replications, &|_| {})
}

/// Bias and MSE of the point estimators.
pub fn run_point_study(cfg: &StudyConfig) -> Result<StudyReport> {
    run_study(cfg, StudyKind::POINTS)
}

/// Average length and coverage of the interval estimators.
pub fn run_interval_study(cfg: &StudyConfig) -> Result<StudyReport> {
    run_study(cfg, StudyKind::INTERVALS)
}
