use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sskit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sskit"))
        .args(args)
        .env_remove("SSKIT_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn repo_file(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(name).display().to_string()
}

fn simulate_pair(dir: &Path) -> (String, String) {
    let d = dir.display().to_string();
    let a = sskit(&["simulate", "--mu", "1", "--lambda", "1", "-N", "20", "--removals", "1,1,1,1,1,1,1,1,1,1", "--name", "x", "--seed", "5", "--out", &d]);
    assert!(a.status.success());
    let b = sskit(&["simulate", "--mu", "1", "--lambda", "2", "-N", "12", "--removals", "0,0,0,0,0,0,0,4", "--name", "y", "--seed", "6", "--out", &d]);
    assert!(b.status.success());
    (dir.join("x.csv").display().to_string(), dir.join("y.csv").display().to_string())
}

#[test]
fn analyze_reports_the_library_estimate() {
    let v = json(&sskit(&["analyze", "--mode", "complete", "--eta", "0.05", "--seed", "42"]));
    let r = v["r_mle"].as_f64().unwrap();
    assert!((0.0..1.0).contains(&r));
    let lo = v["asymptotic_ci"]["lo"].as_f64().unwrap();
    let hi = v["asymptotic_ci"]["hi"].as_f64().unwrap();
    assert!(lo < r && r < hi);
    assert_eq!(v["n"], 50);
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let out = sskit(&["estimate", "--xs", "a.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--ys") && err.contains("Usage"), "{err}");
    assert_eq!(sskit(&["study", "--no-such-flag"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one_with_json_when_asked() {
    let out = sskit(&["--json-errors", "analyze", "--mode", "scheme9"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "lookup");
    let out = sskit(&["--json-errors", "estimate", "--xs", "a.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn simulate_then_estimate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = simulate_pair(dir.path());
    let v = json(&sskit(&["estimate", "--xs", &x, "--ys", &y, "--mu", "1"]));
    assert_eq!(v["n"], 10);
    assert_eq!(v["m"], 8);
    for key in ["mle", "umvue", "lindley"] {
        let r = v["known_mu"][key].as_f64().unwrap();
        assert!((0.0..1.0).contains(&r), "{key}: {r}");
    }
    let v = json(&sskit(&["interval", "--xs", &x, "--ys", &y, "--mu", "1", "--nboot", "50", "--out", &dir.path().display().to_string()]));
    for key in ["asymptotic", "boot_p", "boot_t", "exact_r_known_mu"] {
        assert!(v[key]["lo"].as_f64().unwrap() <= v[key]["hi"].as_f64().unwrap(), "{key}");
    }
    assert!(dir.path().join("region.csv").exists());
    assert!(dir.path().join("interval.json").exists());
}

#[test]
fn seeded_commands_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = simulate_pair(dir.path());
    let run = |args: &[&str]| {
        let out = sskit(args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let bayes = ["bayes", "--xs", &x, "--ys", &y, "-T", "400", "--seed", "9"];
    assert_eq!(run(&bayes), run(&bayes));
    let analyze = ["analyze", "--mode", "scheme2", "--seed", "3", "-T", "300"];
    assert_eq!(run(&analyze), run(&analyze));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = simulate_pair(dir.path());
    let flag = sskit(&["bayes", "--xs", &x, "--ys", &y, "-T", "300", "--seed", "17"]);
    let env = Command::new(env!("CARGO_BIN_EXE_sskit"))
        .args(["bayes", "--xs", &x, "--ys", &y, "-T", "300"])
        .env("SSKIT_SEED", "17")
        .output()
        .unwrap();
    assert!(flag.status.success() && env.status.success());
    assert_eq!(flag.stdout, env.stdout);
}

#[test]
fn shipped_paper_config_validates() {
    let v = json(&sskit(&["study", "--config", &repo_file("paper_tables.json"), "--check"]));
    assert_eq!(v["replications"], 1000);
    assert_eq!(v["nboot"], 250);
    assert_eq!(v["gibbs_t"], 1000);
    assert_eq!(v["parameter_sets"].as_array().unwrap().len(), 3);
    assert_eq!(v["scheme_pairs"].as_array().unwrap().len(), 6);
}

#[test]
fn empty_config_gives_defaults_and_bad_scheme_names_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "{}").unwrap();
    let from_empty = json(&sskit(&["study", "--config", &empty.display().to_string(), "--check"]));
    let defaults = json(&sskit(&["study", "--check"]));
    assert_eq!(from_empty, defaults);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"scheme_pairs": [[{"label":"a","N":5,"removals":[0,0]}, {"label":"b","N":4,"removals":[0,0,0,1]}]]}"#).unwrap();
    let out = sskit(&["--json-errors", "study", "--config", &bad.display().to_string(), "--check"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "config");
    assert!(v["error"]["message"].as_str().unwrap().contains("scheme_pairs[0][0].removals"));
}

#[test]
fn study_outputs_do_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"parameter_sets": [{"label":"T","lambda":1.0,"alpha":2.0,"mu":0.5}],
            "scheme_pairs": [[{"label":"a","N":12,"removals":[0,0,0,0,0,0,0,4]},
                              {"label":"b","N":12,"removals":[1,1,1,1,0,0,0,0]}]],
            "known_mu": {"mu_values": [0.5]},
            "replications": 12, "nboot": 20, "gibbs_t": 150, "seed": 3}"#,
    )
    .unwrap();
    let run = |jobs: &str, sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = sskit(&["--jobs", jobs, "study", "--config", &cfg.display().to_string(), "--quiet", "--out", &out_dir.display().to_string()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let (a, b) = (run("1", "serial"), run("4", "parallel"));
    for file in ["report.json", "points.csv", "intervals.csv", "known_mu.csv", "findings.json"] {
        let (x, y) = (std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap());
        assert_eq!(x, y, "{file} differs");
    }
    let points = std::fs::read_to_string(a.join("points.csv")).unwrap();
    assert!(points.starts_with("theta,scheme,mle_bias,mle_mse,"));
}

#[test]
fn gof_writes_pp_points() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&sskit(&["gof", "--dataset", "gauge10", "--out", &dir.path().display().to_string()]));
    assert_eq!(v["shift_applied"], true);
    let d = v["gof"]["ks_distance"].as_f64().unwrap();
    assert!(d > 0.0 && d < 0.3);
    let pp = std::fs::read_to_string(dir.path().join("pp_gauge10.csv")).unwrap();
    assert_eq!(pp.lines().count(), 51);
    assert!(sskit(&["gof", "--dataset", "nope"]).status.code() == Some(1));
}
