//! Shipped carbon-fibre strength datasets and their two progressively
//! censored subsets.
//!
//! Files are embedded at build time and checked against pinned SHA-256
//! digests on every load.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rayleigh::{CensoringScheme, ProgressiveSample};

/// Amount subtracted from every observation before analysis.
pub const SHIFT: f64 = 0.75;

const GAUGE20: &str = include_str!("../data/gauge20.csv");
const GAUGE10: &str = include_str!("../data/gauge10.csv");
const TABLE7: &str = include_str!("../data/table7.csv");

const GAUGE20_SHA256: &str = "7801cb55a4356bef7d9ae1cd0708bd8df3be276d2626d80a06f9e04042714abc";
const GAUGE10_SHA256: &str = "99ef9d20eb9d241ac74b999e05ba2ce73982611bfb1a8dca755e80a9960bc7f7";
const TABLE7_SHA256: &str = "963a995c70cc5913a7e7e96ce3eb078277443048e635950ad3ded2fb00edf7e6";

pub const DATASET_NAMES: [&str; 2] = ["gauge20", "gauge10"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedDataset {
    pub name: String,
    pub values: Vec<f64>,
    pub shift_applied: f64,
}

impl NamedDataset {
    /// The whole dataset as an uncensored sample (ties allowed).
    pub fn complete_sample(&self) -> Result<ProgressiveSample> {
        ProgressiveSample::with_ties(CensoringScheme::complete(self.values.len())?, self.values.clone())
    }
}

fn verify(name: &str, text: &str, want: &str) -> Result<()> {
    let got = hex::encode(Sha256::digest(text.as_bytes()));
    if got != want {
        return Err(Error::Integrity(format!("{name}: SHA-256 {got} does not match pinned {want}")));
    }
    Ok(())
}

fn parse_values(name: &str, text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines();
    if lines.next() != Some("value") {
        return Err(Error::Integrity(format!("{name}: missing `value` header")));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map_err(|e| Error::Integrity(format!("{name}: bad value {l:?}: {e}")))
        })
        .collect()
}

/// Load `gauge20` (20 mm gauge length) or `gauge10` (10 mm), optionally
/// shifted by [`SHIFT`].
pub fn load_dataset(name: &str, apply_shift: bool) -> Result<NamedDataset> {
    let (text, sha) = match name {
        "gauge20" => (GAUGE20, GAUGE20_SHA256),
        "gauge10" => (GAUGE10, GAUGE10_SHA256),
        _ => {
            return Err(Error::Lookup(format!(
                "unknown dataset {name:?}; expected one of {DATASET_NAMES:?}"
            )))
        }
    };
    verify(name, text, sha)?;
    let raw = parse_values(name, text)?;
    if raw.len() != 50 || raw.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Integrity(format!("{name}: expected 50 sorted values")));
    }
    let shift = if apply_shift { SHIFT } else { 0.0 };
    Ok(NamedDataset {
        name: name.to_string(),
        values: raw.iter().map(|v| v - shift).collect(),
        shift_applied: shift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensoredScheme {
    Scheme1,
    Scheme2,
}

impl CensoredScheme {
    pub fn removals(self) -> Vec<usize> {
        match self {
            Self::Scheme1 => vec![4; 10],
            Self::Scheme2 => {
                let mut r = vec![2; 10];
                r[9] = 22;
                r
            }
        }
    }

    fn id(self) -> &'static str {
        match self {
            Self::Scheme1 => "scheme1",
            Self::Scheme2 => "scheme2",
        }
    }
}

impl std::str::FromStr for CensoredScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scheme1" => Ok(Self::Scheme1),
            "scheme2" => Ok(Self::Scheme2),
            _ => Err(Error::Lookup(format!("unknown scheme {s:?}; expected scheme1 or scheme2"))),
        }
    }
}

/// Rows of the shipped censored-sample table for one scheme and sample
/// (`x` for gauge20, `y` for gauge10), in unshifted units.
fn table7_row(scheme: CensoredScheme, sample: &str) -> Result<Vec<f64>> {
    verify("table7", TABLE7, TABLE7_SHA256)?;
    let mut rows: Vec<(usize, f64)> = Vec::new();
    for line in TABLE7.lines().skip(1).filter(|l| !l.is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(Error::Integrity(format!("table7: malformed line {line:?}")));
        }
        if f[0] == scheme.id() && f[1] == sample {
            let idx = f[2].parse().map_err(|e| Error::Integrity(format!("table7: {e}")))?;
            let v = f[3].parse().map_err(|e| Error::Integrity(format!("table7: {e}")))?;
            rows.push((idx, v));
        }
    }
    if rows.iter().enumerate().any(|(i, r)| r.0 != i + 1) {
        return Err(Error::Integrity("table7: indices out of sequence".into()));
    }
    Ok(rows.into_iter().map(|r| r.1).collect())
}

/// The censored sample of one shipped dataset under a shipped scheme. The
/// table rows are authoritative; they are checked to be a subset of the
/// dataset and consistent with the scheme.
pub fn apply_table7_scheme(dataset: &NamedDataset, scheme: CensoredScheme) -> Result<ProgressiveSample> {
    let sample = match dataset.name.as_str() {
        "gauge20" => "x",
        "gauge10" => "y",
        other => return Err(Error::Lookup(format!("no censored rows for dataset {other:?}"))),
    };
    let row = table7_row(scheme, sample)?;
    let removals = scheme.removals();
    if row.len() != removals.len() {
        return Err(Error::Integrity(format!(
            "table7 {}/{sample}: {} values for {} removals",
            scheme.id(),
            row.len(),
            removals.len()
        )));
    }
    let values: Vec<f64> = row.iter().map(|v| v - dataset.shift_applied).collect();
    for v in &values {
        if !dataset.values.iter().any(|d| (d - v).abs() < 1e-9) {
            return Err(Error::Integrity(format!(
                "table7 {}/{sample}: value {v} is not in {}",
                scheme.id(),
                dataset.name
            )));
        }
    }
    let cs = CensoringScheme::new(dataset.values.len(), removals)
        .map_err(|e| Error::Integrity(format!("table7 {}: {e}", scheme.id())))?;
    ProgressiveSample::new(cs, values).map_err(|e| Error::Integrity(format!("table7 {}: {e}", scheme.id())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_endpoints() {
        let d1 = load_dataset("gauge20", false).unwrap();
        assert_eq!(d1.values[0], 1.966);
        let d2 = load_dataset("gauge10", false).unwrap();
        assert_eq!(d2.values[49], 4.027);
        let s = load_dataset("gauge20", true).unwrap();
        assert!((s.values[0] - 1.216).abs() < 1e-12);
        assert!(matches!(load_dataset("gauge5", false), Err(Error::Lookup(_))));
    }

    #[test]
    fn integrity_check_rejects_tampering() {
        assert!(verify("x", "value\n1.0\n", GAUGE20_SHA256).is_err());
    }

    #[test]
    fn censored_rows() {
        let d1 = load_dataset("gauge20", false).unwrap();
        let s1 = apply_table7_scheme(&d1, CensoredScheme::Scheme1).unwrap();
        assert_eq!((s1.values()[0], s1.values()[9]), (1.966, 2.821));
        let d2 = load_dataset("gauge10", true).unwrap();
        let s2 = apply_table7_scheme(&d2, CensoredScheme::Scheme2).unwrap();
        assert!((s2.values()[0] - (2.454 - 0.75)).abs() < 1e-12);
        assert!((s2.values()[9] - (3.223 - 0.75)).abs() < 1e-12);
        for s in [&s1, &s2] {
            assert_eq!(s.len() + s.scheme().removals.iter().sum::<usize>(), 50);
        }
        assert!("scheme3".parse::<CensoredScheme>().is_err());
    }
}
