use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sskit_core::analysis::{analyze_real_data, fit_dataset, AnalysisMode, AnalysisOptions};
use sskit_core::asymptotic::asymptotic_ci;
use sskit_core::bayes::{
    credible_interval, gibbs_chain, lindley_estimate, posterior_summary, CredibleMode, GibbsOptions, PriorSpec,
};
use sskit_core::bootstrap::{boot_intervals, BootConfig};
use sskit_core::exact::{exact_ci_mu, exact_ci_r_known_mu, exact_joint_region};
use sskit_core::gof::pp_csv;
use sskit_core::study::{
    interval_table_csv, known_mu_table_csv, point_table_csv, run_study_range, summarize_orderings, validate_config,
    StudyConfig, StudyKind,
};
use sskit_core::{
    mle_joint, mle_known_mu, sample_progressive, sufficient_stats, umvue_r, CensoringScheme, Error, MleOptions,
    ProgressiveSample, RayleighParams, Result, RngStream,
};

use crate::{
    AnalyzeArgs, BayesArgs, Command, EstimateArgs, GofArgs, IntervalArgs, Kind, Method, SampleArgs, SimulateArgs,
    StudyArgs,
};

const DEFAULT_SEED: u64 = 42;

pub fn print_json_error(kind: &str, message: &str) {
    let v = json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{v}");
}

pub fn dispatch(cmd: Command, w: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate(a, w),
        Command::Estimate(a) => estimate(a, w),
        Command::Interval(a) => interval(a, w),
        Command::Bayes(a) => bayes(a, w),
        Command::Study(a) => study(a, w),
        Command::Analyze(a) => analyze(a, w),
        Command::Gof(a) => gof(a, w),
    }
}

fn to_pretty(v: &impl serde::Serialize) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::Parse(e.to_string()))
}

/// Writes `name` under `out` if an output directory was requested.
fn write_artifact(out: &Option<PathBuf>, name: &str, contents: &str) -> Result<()> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

/// Prints the report and stores it as `name` when `--out` is set.
fn emit(w: &mut dyn Write, out: &Option<PathBuf>, name: &str, report: &Value) -> Result<()> {
    let text = to_pretty(report)?;
    write_artifact(out, name, &text)?;
    w.write_all(text.as_bytes())?;
    Ok(())
}

fn sidecar(csv: &Path, explicit: &Option<PathBuf>) -> PathBuf {
    explicit.clone().unwrap_or_else(|| csv.with_extension("scheme.json"))
}

fn read_samples(a: &SampleArgs) -> Result<(ProgressiveSample, ProgressiveSample)> {
    let read = |csv: &Path, scheme: &Option<PathBuf>| {
        ProgressiveSample::read(csv, &sidecar(csv, scheme))
            .map_err(|e| with_context(e, &csv.display().to_string()))
    };
    Ok((read(&a.xs, &a.xs_scheme)?, read(&a.ys, &a.ys_scheme)?))
}

fn with_context(e: Error, what: &str) -> Error {
    match e {
        Error::Io(m) => Error::Io(format!("{what}: {m}")),
        Error::Parse(m) => Error::Parse(format!("{what}: {m}")),
        other => other,
    }
}

/// `prior1`..`prior3` or four comma-separated hyper-parameters.
fn parse_prior(s: &str) -> Result<PriorSpec> {
    let defaults = StudyConfig::default().priors;
    if let Some(p) = defaults.iter().find(|p| p.label.eq_ignore_ascii_case(s)) {
        return Ok(p.prior);
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("prior {s:?}: expected prior1..prior3 or a1,b1,a2,b2")))?;
    let [a1, b1, a2, b2] = parts[..] else {
        return Err(Error::Parse(format!("prior {s:?}: expected four numbers, got {}", parts.len())));
    };
    let p = PriorSpec::gamma(a1, b1, a2, b2);
    p.validate()?;
    Ok(p)
}

fn simulate(a: SimulateArgs, w: &mut dyn Write) -> Result<()> {
    let params = RayleighParams::new(a.mu, a.lambda)?;
    let scheme = CensoringScheme::new(a.total, a.removals)?;
    let seed = a.seed.seed.unwrap_or(DEFAULT_SEED);
    let sample = sample_progressive(&params, &scheme, RngStream::new(seed, 0))?;
    if let Some(dir) = &a.output.out {
        std::fs::create_dir_all(dir)?;
        sample.write(
            &dir.join(format!("{}.csv", a.name)),
            &dir.join(format!("{}.scheme.json", a.name)),
        )?;
    }
    w.write_all(sample.to_csv().as_bytes())?;
    Ok(())
}

fn estimate(a: EstimateArgs, w: &mut dyn Write) -> Result<()> {
    let (xs, ys) = read_samples(&a.samples)?;
    let fit = mle_joint(&xs, &ys, &MleOptions::default())?;
    let mut report = json!({ "n": xs.len(), "m": ys.len(), "joint_mle": fit });
    if let Some(mu) = a.mu {
        let prior = parse_prior(&a.prior)?;
        let stats = sufficient_stats(&xs, &ys, mu)?;
        report["known_mu"] = json!({
            "mu": mu,
            "u": stats.u,
            "v": stats.v,
            "mle": mle_known_mu(&xs, &ys, mu)?.r_hat,
            "umvue": umvue_r(&stats, xs.len(), ys.len())?,
            "lindley": lindley_estimate(&stats, xs.len(), ys.len(), &prior)?,
            "prior": prior,
        });
    }
    emit(w, &a.output.out, "estimate.json", &report)
}

fn interval(a: IntervalArgs, w: &mut dyn Write) -> Result<()> {
    let (xs, ys) = read_samples(&a.samples)?;
    let want = |m: Method| a.method == Method::All || a.method == m;
    let mut report = json!({ "eta": a.eta });
    if want(Method::Exact) {
        report["exact_mu"] = json!(exact_ci_mu(&xs, &ys, a.eta)?);
        match exact_joint_region(&xs, &ys, a.eta, a.grid)? {
            Some(region) => {
                write_artifact(&a.output.out, "region.csv", &region.to_csv())?;
                report["joint_region_mu"] = json!(region.mu_interval);
            }
            None => report["joint_region_mu"] = Value::Null,
        }
        if let Some(mu) = a.mu {
            report["exact_r_known_mu"] = json!(exact_ci_r_known_mu(&xs, &ys, mu, a.eta)?);
        }
    }
    let needs_fit = want(Method::Asymptotic) || want(Method::BootP) || want(Method::BootT);
    if needs_fit {
        let fit = mle_joint(&xs, &ys, &MleOptions::default())?;
        report["r_mle"] = json!(fit.r_hat);
        if want(Method::Asymptotic) {
            report["asymptotic"] = json!(asymptotic_ci(&xs, &ys, a.eta, &fit)?);
        }
        if want(Method::BootP) || want(Method::BootT) {
            let cfg = BootConfig {
                nboot: a.nboot,
                eta: a.eta,
                seed: RngStream::new(a.seed.seed.unwrap_or(DEFAULT_SEED), 0),
            };
            let b = boot_intervals(&xs, &ys, &fit, &cfg)?;
            if want(Method::BootP) {
                report["boot_p"] = json!(b.boot_p);
            }
            if want(Method::BootT) {
                report["boot_t"] = json!(b.boot_t);
            }
            report["boot_failed"] = json!(b.failed);
            report["boot_singular"] = json!(b.singular);
        }
    }
    emit(w, &a.output.out, "interval.json", &report)
}

fn bayes(a: BayesArgs, w: &mut dyn Write) -> Result<()> {
    let (xs, ys) = read_samples(&a.samples)?;
    let prior = parse_prior(&a.prior)?;
    let opts = GibbsOptions {
        burn_in: a.burn_in,
        ..GibbsOptions::new(a.t)
    };
    let seed = a.seed.seed.unwrap_or(DEFAULT_SEED);
    let draws = gibbs_chain(&xs, &ys, &prior, &opts, &mut RngStream::new(seed, 0).rng())?;
    let summary = posterior_summary(&draws)?;
    write_artifact(&a.output.out, "draws.csv", &draws.to_csv())?;
    let report = json!({
        "prior": prior,
        "t_total": a.t,
        "burn_in": draws.burn_in,
        "posterior_mean": summary.mean,
        "posterior_variance": summary.variance,
        "retained": summary.retained,
        "credible": credible_interval(&draws, a.eta, CredibleMode::EqualTail)?,
        "credible_shortest": credible_interval(&draws, a.eta, CredibleMode::Shortest)?,
    });
    emit(w, &a.output.out, "bayes.json", &report)
}

fn study(a: StudyArgs, w: &mut dyn Write) -> Result<()> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            validate_config(&text)?
        }
        None => StudyConfig::default(),
    };
    if a.fast {
        cfg.replications = 100;
        cfg.nboot = 100;
    }
    if let Some(r) = a.replications {
        cfg.replications = r;
    }
    if let Some(b) = a.nboot {
        cfg.nboot = b;
    }
    if let Some(t) = a.gibbs_t {
        cfg.gibbs_t = t;
    }
    if let Some(e) = a.eta {
        cfg.eta = e;
    }
    if let Some(s) = a.seed.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    if a.check {
        w.write_all(to_pretty(&cfg)?.as_bytes())?;
        return Ok(());
    }
    let kind = match a.kind {
        Kind::Points => StudyKind::POINTS,
        Kind::Intervals => StudyKind::INTERVALS,
        Kind::Both => StudyKind::BOTH,
    };
    let quiet = a.quiet;
    let progress = move |cell: &str| {
        if !quiet {
            eprintln!("done {cell}");
        }
    };
    let report = run_study_range(&cfg, kind, 0..cfg.replications, &progress)?;
    let findings = summarize_orderings(&report, &cfg);
    let out = &a.output.out;
    write_artifact(out, "config.json", &to_pretty(&cfg)?)?;
    write_artifact(out, "report.json", &to_pretty(&report)?)?;
    if kind.points {
        write_artifact(out, "points.csv", &point_table_csv(&report, &cfg))?;
    }
    if kind.intervals {
        write_artifact(out, "intervals.csv", &interval_table_csv(&report, &cfg))?;
    }
    if cfg.estimators.known_mu {
        write_artifact(out, "known_mu.csv", &known_mu_table_csv(&report, &cfg))?;
    }
    emit(
        w, out,
        "findings.json",
        &json!({ "replications": report.replications, "findings": findings }),
    )
}

fn analyze(a: AnalyzeArgs, w: &mut dyn Write) -> Result<()> {
    let mode: AnalysisMode = a.mode.parse()?;
    let prior = parse_prior(&a.prior)?;
    let opts = AnalysisOptions {
        eta: a.eta,
        seed: RngStream::new(a.seed.seed.unwrap_or(DEFAULT_SEED), 0),
        gibbs: GibbsOptions::new(a.t),
    };
    let report = analyze_real_data(mode, &prior, &opts)?;
    emit(w, &a.output.out, &format!("analyze_{}.json", a.mode), &json!(report))
}

fn gof(a: GofArgs, w: &mut dyn Write) -> Result<()> {
    let params = match (a.mu, a.lambda) {
        (Some(mu), Some(lambda)) => Some(RayleighParams::new(mu, lambda)?),
        _ => None,
    };
    let fit = fit_dataset(&a.dataset, !a.unshifted, params)?;
    write_artifact(&a.output.out, &format!("pp_{}.csv", fit.dataset), &pp_csv(&fit.pp))?;
    let report = json!({
        "dataset": fit.dataset,
        "shift_applied": fit.shift_applied,
        "mu_hat": fit.mu_hat,
        "lambda_hat": fit.lambda_hat,
        "gof": fit.gof,
    });
    emit(w, &a.output.out, &format!("gof_{}.json", fit.dataset), &report)
}
