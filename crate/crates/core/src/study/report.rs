//! Study accumulators, table layouts and ordering findings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::StudyConfig;

/// Raw sums over replications for one (table, cell, method). Keeping sums
/// rather than means makes partial runs mergeable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Accumulator {
    pub count: usize,
    pub failures: usize,
    pub sum_err: f64,
    pub sum_sq_err: f64,
    pub sum_length: f64,
    pub covered: usize,
    pub intervals: usize,
}

impl Accumulator {
    pub fn add_point(&mut self, estimate: f64, truth: f64) {
        let e = estimate - truth;
        self.count += 1;
        self.sum_err += e;
        self.sum_sq_err += e * e;
    }

    pub fn add_interval(&mut self, lo: f64, hi: f64, truth: f64) {
        self.intervals += 1;
        self.sum_length += hi - lo;
        if lo <= truth && truth <= hi {
            self.covered += 1;
        }
    }

    pub fn add_failure(&mut self) {
        self.failures += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.failures += other.failures;
        self.sum_err += other.sum_err;
        self.sum_sq_err += other.sum_sq_err;
        self.sum_length += other.sum_length;
        self.covered += other.covered;
        self.intervals += other.intervals;
    }

    pub fn abs_bias(&self) -> Option<f64> {
        (self.count > 0).then(|| (self.sum_err / self.count as f64).abs())
    }

    pub fn mse(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum_sq_err / self.count as f64)
    }

    pub fn avg_length(&self) -> Option<f64> {
        (self.intervals > 0).then(|| self.sum_length / self.intervals as f64)
    }

    pub fn coverage(&self) -> Option<f64> {
        (self.intervals > 0).then(|| self.covered as f64 / self.intervals as f64)
    }
}

/// Which table a cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    /// Unknown location: bias/MSE and interval length/coverage.
    Joint,
    /// Known location.
    KnownMu,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub table: Table,
    /// Parameter-set label, or the location value for the known-μ table.
    pub setting: String,
    pub scheme_pair: String,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(flatten)]
    pub key: CellKey,
    pub replications: usize,
    pub failures: usize,
    pub bias: Option<f64>,
    pub mse: Option<f64>,
    pub avg_length: Option<f64>,
    pub coverage: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    /// Replications covered by this report.
    pub replications: usize,
    #[serde(with = "cells_as_list")]
    pub cells: BTreeMap<CellKey, Accumulator>,
}

mod cells_as_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        #[serde(flatten)]
        key: CellKey,
        #[serde(flatten)]
        acc: Accumulator,
    }

    pub fn serialize<S: Serializer>(cells: &BTreeMap<CellKey, Accumulator>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = cells
            .iter()
            .map(|(k, a)| Entry {
                key: k.clone(),
                acc: *a,
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<CellKey, Accumulator>, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.key, e.acc)).collect())
    }
}

impl StudyReport {
    pub fn cell_mut(&mut self, table: Table, setting: &str, pair: &str, method: &str) -> &mut Accumulator {
        self.cells
            .entry(CellKey {
                table,
                setting: setting.to_string(),
                scheme_pair: pair.to_string(),
                method: method.to_string(),
            })
            .or_default()
    }

    pub fn get(&self, table: Table, setting: &str, pair: &str, method: &str) -> Option<&Accumulator> {
        self.cells.get(&CellKey {
            table,
            setting: setting.to_string(),
            scheme_pair: pair.to_string(),
            method: method.to_string(),
        })
    }

    /// Combine with a report over a disjoint set of replications.
    pub fn merge(&mut self, other: &StudyReport) {
        self.replications += other.replications;
        for (k, a) in &other.cells {
            self.cells.entry(k.clone()).or_default().merge(a);
        }
    }

    pub fn rows(&self) -> Vec<ReportRow> {
        self.cells
            .iter()
            .map(|(k, a)| ReportRow {
                key: k.clone(),
                replications: a.count.max(a.intervals),
                failures: a.failures,
                bias: a.abs_bias(),
                mse: a.mse(),
                avg_length: a.avg_length(),
                coverage: a.coverage(),
            })
            .collect()
    }
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

fn method_label(m: &str) -> String {
    m.to_lowercase().replace('-', "")
}

/// Bias/MSE layout: one row per (parameter set, scheme pair); MLE then one
/// column pair per prior.
pub fn point_table_csv(report: &StudyReport, cfg: &StudyConfig) -> String {
    let mut methods = vec!["MLE".to_string()];
    methods.extend(cfg.priors.iter().map(|p| p.label.clone()));
    let mut out = String::from("theta,scheme");
    for m in &methods {
        let l = method_label(m);
        let _ = write!(out, ",{l}_bias,{l}_mse");
    }
    out.push('\n');
    for ps in &cfg.parameter_sets {
        for k in 0..cfg.scheme_pairs.len() {
            let pair = cfg.pair_label(k);
            let _ = write!(out, "{},\"{pair}\"", ps.label);
            for m in &methods {
                let a = report.get(Table::Joint, &ps.label, &pair, m).copied().unwrap_or_default();
                let _ = write!(out, ",{},{}", fmt(a.abs_bias()), fmt(a.mse()));
            }
            out.push('\n');
        }
    }
    out
}

/// Length/coverage layout: asymptotic, Boot-p, Boot-t, then one credible
/// interval per prior.
pub fn interval_table_csv(report: &StudyReport, cfg: &StudyConfig) -> String {
    let mut methods: Vec<(String, String)> = vec![
        ("asymptotic".into(), "mle".into()),
        ("Boot-p".into(), "bootp".into()),
        ("Boot-t".into(), "boott".into()),
    ];
    methods.extend(cfg.priors.iter().map(|p| (format!("{}-credible", p.label), method_label(&p.label))));
    let mut out = String::from("theta,scheme");
    for (_, l) in &methods {
        let _ = write!(out, ",{l}_length,{l}_coverage");
    }
    out.push('\n');
    for ps in &cfg.parameter_sets {
        for k in 0..cfg.scheme_pairs.len() {
            let pair = cfg.pair_label(k);
            let _ = write!(out, "{},\"{pair}\"", ps.label);
            for (m, _) in &methods {
                let a = report.get(Table::Joint, &ps.label, &pair, m).copied().unwrap_or_default();
                let _ = write!(out, ",{},{}", fmt(a.avg_length()), fmt(a.coverage()));
            }
            out.push('\n');
        }
    }
    out
}

/// Known-location layout: MLE, Lindley and UMVUE bias/MSE, then the
/// Lindley-based interval.
pub fn known_mu_table_csv(report: &StudyReport, cfg: &StudyConfig) -> String {
    let mut out = String::from(
        "mu,scheme,mle_bias,mle_mse,lindley_bias,lindley_mse,umvue_bias,umvue_mse,lindley_length,lindley_coverage\n",
    );
    for &mu in &cfg.known_mu.mu_values {
        let setting = mu_label(mu);
        for k in 0..cfg.scheme_pairs.len() {
            let pair = cfg.pair_label(k);
            let get = |m: &str| report.get(Table::KnownMu, &setting, &pair, m).copied().unwrap_or_default();
            let (mle, lind, umvue, lint) = (get("MLE"), get("Lindley"), get("UMVUE"), get("Lindley-interval"));
            let _ = writeln!(
                out,
                "{setting},\"{pair}\",{},{},{},{},{},{},{},{}",
                fmt(mle.abs_bias()),
                fmt(mle.mse()),
                fmt(lind.abs_bias()),
                fmt(lind.mse()),
                fmt(umvue.abs_bias()),
                fmt(umvue.mse()),
                fmt(lint.avg_length()),
                fmt(lint.coverage()),
            );
        }
    }
    out
}

pub fn mu_label(mu: f64) -> String {
    format!("{mu}")
}

/// Differences at or below this are ties, not violations.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingStatus {
    Holds,
    Tie,
    Violated,
    /// Some method in the chain is absent from the report.
    Missing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub claim: String,
    pub setting: String,
    pub scheme_pair: String,
    /// `(method, value)` in the asserted increasing order.
    pub chain: Vec<(String, Option<f64>)>,
    pub status: FindingStatus,
    /// Smallest consecutive gap; negative when violated.
    pub margin: Option<f64>,
}

fn judge(chain: &[(String, Option<f64>)]) -> (FindingStatus, Option<f64>) {
    let vals: Option<Vec<f64>> = chain.iter().map(|c| c.1).collect();
    let Some(vals) = vals else {
        return (FindingStatus::Missing, None);
    };
    let margin = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let status = if margin < -TIE_TOLERANCE {
        FindingStatus::Violated
    } else if margin <= TIE_TOLERANCE {
        FindingStatus::Tie
    } else {
        FindingStatus::Holds
    };
    (status, Some(margin))
}

/// Ordering claims evaluated per (parameter set, scheme pair) cell:
/// credible lengths decrease along the prior list; asymptotic < Boot-p <
/// Boot-t in length; every credible interval is shorter than the
/// asymptotic one; Bayes MSE decreases along the prior list.
pub fn summarize_orderings(report: &StudyReport, cfg: &StudyConfig) -> Vec<Finding> {
    let mut out = Vec::new();
    let has = |m: &str| report.cells.keys().any(|k| k.table == Table::Joint && k.method == m);
    let methods_present = report.cells.keys().filter(|k| k.table == Table::Joint).map(|k| &k.method);
    let distinct: std::collections::BTreeSet<&String> = methods_present.collect();
    if distinct.len() < 2 {
        return out;
    }
    for ps in &cfg.parameter_sets {
        for k in 0..cfg.scheme_pairs.len() {
            let pair = cfg.pair_label(k);
            let length = |m: &str| report.get(Table::Joint, &ps.label, &pair, m).and_then(Accumulator::avg_length);
            let mse = |m: &str| report.get(Table::Joint, &ps.label, &pair, m).and_then(Accumulator::mse);
            let mut push = |claim: &str, chain: Vec<(String, Option<f64>)>| {
                let (status, margin) = judge(&chain);
                out.push(Finding {
                    claim: claim.to_string(),
                    setting: ps.label.clone(),
                    scheme_pair: pair.clone(),
                    chain,
                    status,
                    margin,
                });
            };
            let credible: Vec<String> = cfg.priors.iter().rev().map(|p| format!("{}-credible", p.label)).collect();
            if cfg.priors.len() >= 2 && credible.iter().any(|m| has(m)) {
                push(
                    "credible length decreases with prior informativeness",
                    credible.iter().map(|m| (m.clone(), length(m))).collect(),
                );
            }
            if ["asymptotic", "Boot-p", "Boot-t"].iter().filter(|m| has(m)).count() >= 2 {
                push(
                    "asymptotic < Boot-p < Boot-t in length",
                    ["asymptotic", "Boot-p", "Boot-t"].iter().map(|m| (m.to_string(), length(m))).collect(),
                );
            }
            if has("asymptotic") && credible.iter().any(|m| has(m)) {
                let longest = credible
                    .iter()
                    .filter_map(|m| length(m).map(|v| (m.clone(), v)))
                    .max_by(|a, b| a.1.total_cmp(&b.1));
                let chain = match longest {
                    Some((m, v)) => vec![(m, Some(v)), ("asymptotic".to_string(), length("asymptotic"))],
                    None => vec![(credible[0].clone(), None), ("asymptotic".to_string(), length("asymptotic"))],
                };
                push("credible < asymptotic in length", chain);
            }
            let bayes: Vec<String> = cfg.priors.iter().rev().map(|p| p.label.clone()).collect();
            if cfg.priors.len() >= 2 && bayes.iter().any(|m| has(m)) {
                push(
                    "Bayes MSE decreases with prior informativeness",
                    bayes.iter().map(|m| (m.clone(), mse(m))).collect(),
                );
            }
        }
    }
    out
}
