//! Study configuration: JSON schema, defaults and path-annotated validation.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bayes::PriorSpec;
use crate::error::{Error, Result};
use crate::rayleigh::CensoringScheme;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub label: String,
    pub lambda: f64,
    pub alpha: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScheme {
    pub label: String,
    #[serde(flatten)]
    pub scheme: CensoringScheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPrior {
    pub label: String,
    #[serde(flatten)]
    pub prior: PriorSpec,
}

/// Known-location sub-study: each `mu` value is crossed with every scheme
/// pair at scales `(lambda, alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownMuConfig {
    pub mu_values: Vec<f64>,
    pub lambda: f64,
    pub alpha: f64,
    /// Prior used by the Lindley estimate and the Bayes interval.
    pub prior: PriorSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Estimators {
    pub mle: bool,
    pub bayes: bool,
    pub asymptotic: bool,
    pub boot_p: bool,
    pub boot_t: bool,
    pub credible: bool,
    pub known_mu: bool,
}

impl Default for Estimators {
    fn default() -> Self {
        Self {
            mle: true,
            bayes: true,
            asymptotic: true,
            boot_p: true,
            boot_t: true,
            credible: true,
            known_mu: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub parameter_sets: Vec<ParameterSet>,
    pub scheme_pairs: Vec<(LabeledScheme, LabeledScheme)>,
    pub priors: Vec<LabeledPrior>,
    pub known_mu: KnownMuConfig,
    pub replications: usize,
    pub nboot: usize,
    pub gibbs_t: usize,
    /// Defaults to 20% of `gibbs_t`.
    pub burn_in: Option<usize>,
    pub eta: f64,
    pub seed: u64,
    pub estimators: Estimators,
}

fn scheme(label: &str, removals: Vec<usize>) -> LabeledScheme {
    let total = removals.len() + removals.iter().sum::<usize>();
    LabeledScheme {
        label: label.to_string(),
        scheme: CensoringScheme::new(total, removals).expect("default schemes are valid"),
    }
}

/// The three 30-unit, 10-failure schemes used throughout the study.
pub fn default_schemes() -> [LabeledScheme; 3] {
    let mut r1 = vec![0; 10];
    r1[9] = 20;
    let mut r2 = vec![0; 10];
    r2[0] = 20;
    [scheme("r1", r1), scheme("r2", r2), scheme("r3", vec![2; 10])]
}

fn prior(label: &str, a: f64, b: f64) -> LabeledPrior {
    LabeledPrior {
        label: label.to_string(),
        prior: PriorSpec::gamma(a, b, a, b),
    }
}

impl Default for StudyConfig {
    fn default() -> Self {
        let [r1, r2, r3] = default_schemes();
        let pairs = [(&r1, &r1), (&r2, &r2), (&r3, &r3), (&r1, &r2), (&r1, &r3), (&r2, &r3)];
        Self {
            parameter_sets: [("Theta1", 1.0), ("Theta2", 1.5), ("Theta3", 2.5)]
                .iter()
                .map(|&(label, mu)| ParameterSet {
                    label: label.to_string(),
                    lambda: 1.0,
                    alpha: 1.0,
                    mu,
                })
                .collect(),
            scheme_pairs: pairs.iter().map(|(a, b)| ((*a).clone(), (*b).clone())).collect(),
            priors: vec![prior("Prior1", 0.0, 0.0), prior("Prior2", 1.0, 1.0), prior("Prior3", 2.0, 3.0)],
            known_mu: KnownMuConfig {
                mu_values: vec![0.0, 1.0, 1.5],
                lambda: 1.0,
                alpha: 1.0,
                prior: PriorSpec::gamma(0.0, 0.0, 0.0, 0.0),
            },
            replications: 1000,
            nboot: 250,
            gibbs_t: 1000,
            burn_in: None,
            eta: 0.05,
            seed: 1,
            estimators: Estimators::default(),
        }
    }
}

impl StudyConfig {
    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(self.gibbs_t / 5)
    }

    pub fn pair_label(&self, k: usize) -> String {
        let (a, b) = &self.scheme_pairs[k];
        format!("({},{})", a.label, b.label)
    }

    /// Re-check a config built in code (documents go through
    /// [`validate_config`]).
    pub fn validate(&self) -> Result<()> {
        let text = serde_json::to_string(self).map_err(|e| Error::Parse(e.to_string()))?;
        validate_config(&text).map(|_| ())
    }
}

struct Checker {
    errors: Vec<String>,
}

impl Checker {
    fn err(&mut self, path: &str, msg: impl std::fmt::Display) {
        self.errors.push(format!("{path}: {msg}"));
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str, allowed: &[&str]) -> Option<&'v Map<String, Value>> {
        match v.as_object() {
            Some(o) => {
                for k in o.keys() {
                    if !allowed.contains(&k.as_str()) {
                        self.err(&join(path, k), "unknown field");
                    }
                }
                Some(o)
            }
            None => {
                self.err(path, "expected an object");
                None
            }
        }
    }

    fn num(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.err(path, "expected a finite number");
                None
            }
        }
    }

    fn count(&mut self, v: &Value, path: &str, min: u64) -> Option<usize> {
        match v.as_u64() {
            Some(x) if x >= min => Some(x as usize),
            Some(x) => {
                self.err(path, format!("must be at least {min}, got {x}"));
                None
            }
            None => {
                self.err(path, "expected a non-negative integer");
                None
            }
        }
    }

    fn text(&mut self, v: &Value, path: &str) -> Option<String> {
        match v.as_str() {
            Some(s) if !s.is_empty() => Some(s.to_string()),
            _ => {
                self.err(path, "expected a non-empty string");
                None
            }
        }
    }

    fn array<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Vec<Value>> {
        match v.as_array() {
            Some(a) if !a.is_empty() => Some(a),
            Some(_) => {
                self.err(path, "must not be empty");
                None
            }
            None => {
                self.err(path, "expected an array");
                None
            }
        }
    }

    fn positive(&mut self, v: &Value, path: &str) -> Option<f64> {
        let x = self.num(v, path)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.err(path, format!("must be positive, got {x}"));
            None
        }
    }

    fn parameter_set(&mut self, v: &Value, path: &str) -> Option<ParameterSet> {
        let o = self.object(v, path, &["label", "lambda", "alpha", "mu"])?;
        let label = self.field(o, path, "label", |c, v, p| c.text(v, p));
        let lambda = self.field(o, path, "lambda", |c, v, p| c.positive(v, p));
        let alpha = self.field(o, path, "alpha", |c, v, p| c.positive(v, p));
        let mu = self.field(o, path, "mu", |c, v, p| c.num(v, p));
        Some(ParameterSet {
            label: label?,
            lambda: lambda?,
            alpha: alpha?,
            mu: mu?,
        })
    }

    fn field<T>(
        &mut self,
        o: &Map<String, Value>,
        path: &str,
        key: &str,
        f: impl FnOnce(&mut Self, &Value, &str) -> Option<T>,
    ) -> Option<T> {
        let p = join(path, key);
        match o.get(key) {
            Some(v) => f(self, v, &p),
            None => {
                self.err(&p, "missing field");
                None
            }
        }
    }

    fn scheme(&mut self, v: &Value, path: &str) -> Option<LabeledScheme> {
        let o = self.object(v, path, &["label", "N", "n", "removals"])?;
        let label = self.field(o, path, "label", |c, v, p| c.text(v, p));
        let total = self.field(o, path, "N", |c, v, p| c.count(v, p, 2));
        let rp = join(path, "removals");
        let removals: Option<Vec<usize>> = match o.get("removals") {
            Some(v) => self.array(v, &rp).and_then(|a| {
                let items: Vec<Option<usize>> =
                    a.iter().enumerate().map(|(i, x)| self.count(x, &format!("{rp}[{i}]"), 0)).collect();
                items.into_iter().collect()
            }),
            None => {
                self.err(&rp, "missing field");
                None
            }
        };
        let n = match o.get("n") {
            Some(v) => self.count(v, &join(path, "n"), 2),
            None => removals.as_ref().map(Vec::len),
        };
        let (label, total, removals, n) = (label?, total?, removals?, n?);
        if n != removals.len() {
            self.err(&rp, format!("has {} entries but n = {n}", removals.len()));
            return None;
        }
        if n < 2 {
            self.err(&rp, "needs at least 2 observed failures");
            return None;
        }
        let sum: usize = removals.iter().sum();
        if n + sum != total {
            self.err(&rp, format!("n + sum(removals) = {} but N = {total}", n + sum));
            return None;
        }
        match CensoringScheme::new(total, removals) {
            Ok(scheme) => Some(LabeledScheme { label, scheme }),
            Err(e) => {
                self.err(path, e);
                None
            }
        }
    }

    fn prior_spec(&mut self, o: &Map<String, Value>, path: &str) -> Option<PriorSpec> {
        let get = |c: &mut Self, k: &str| {
            c.field(o, path, k, |c, v, p| {
                let x = c.num(v, p)?;
                if x >= 0.0 {
                    Some(x)
                } else {
                    c.err(p, format!("must be >= 0, got {x}"));
                    None
                }
            })
        };
        let a1 = get(self, "a1");
        let b1 = get(self, "b1");
        let a2 = get(self, "a2");
        let b2 = get(self, "b2");
        let t1 = match o.get("t1") {
            Some(Value::Null) | None => Some(None),
            Some(v) => self.positive(v, &join(path, "t1")).map(Some),
        };
        Some(PriorSpec {
            a1: a1?,
            b1: b1?,
            a2: a2?,
            b2: b2?,
            t1: t1?,
        })
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

const TOP_FIELDS: [&str; 11] = [
    "parameter_sets",
    "scheme_pairs",
    "priors",
    "known_mu",
    "replications",
    "nboot",
    "gibbs_t",
    "burn_in",
    "eta",
    "seed",
    "estimators",
];

/// Parse and validate a study document. Missing top-level fields take
/// their defaults; every violation is reported with its JSON path.
pub fn validate_config(text: &str) -> Result<StudyConfig> {
    let doc: Value = if text.trim().is_empty() {
        Value::Object(Map::new())
    } else {
        serde_json::from_str(text).map_err(|e| Error::Config(vec![format!("document: {e}")]))?
    };
    let mut c = Checker { errors: Vec::new() };
    let mut cfg = StudyConfig::default();
    let Some(top) = c.object(&doc, "", &TOP_FIELDS) else {
        return Err(Error::Config(c.errors));
    };

    if let Some(v) = top.get("parameter_sets") {
        if let Some(a) = c.array(v, "parameter_sets") {
            let sets: Vec<_> = a
                .iter()
                .enumerate()
                .map(|(i, x)| c.parameter_set(x, &format!("parameter_sets[{i}]")))
                .collect();
            if let Some(sets) = sets.into_iter().collect::<Option<Vec<_>>>() {
                cfg.parameter_sets = sets;
            }
        }
    }
    if let Some(v) = top.get("scheme_pairs") {
        if let Some(a) = c.array(v, "scheme_pairs") {
            let mut pairs = Vec::new();
            let mut ok = true;
            for (i, p) in a.iter().enumerate() {
                let path = format!("scheme_pairs[{i}]");
                match p.as_array() {
                    Some(two) if two.len() == 2 => {
                        let x = c.scheme(&two[0], &format!("{path}[0]"));
                        let y = c.scheme(&two[1], &format!("{path}[1]"));
                        match (x, y) {
                            (Some(x), Some(y)) => pairs.push((x, y)),
                            _ => ok = false,
                        }
                    }
                    _ => {
                        c.err(&path, "expected a pair [x_scheme, y_scheme]");
                        ok = false;
                    }
                }
            }
            if ok {
                cfg.scheme_pairs = pairs;
            }
        }
    }
    if let Some(v) = top.get("priors") {
        if let Some(a) = c.array(v, "priors") {
            let mut priors = Vec::new();
            for (i, p) in a.iter().enumerate() {
                let path = format!("priors[{i}]");
                let Some(o) = c.object(p, &path, &["label", "a1", "b1", "a2", "b2", "t1"]) else {
                    continue;
                };
                let label = c.field(o, &path, "label", |c, v, p| c.text(v, p));
                let spec = c.prior_spec(o, &path);
                if let (Some(label), Some(prior)) = (label, spec) {
                    priors.push(LabeledPrior { label, prior });
                }
            }
            if priors.len() == a.len() {
                cfg.priors = priors;
            }
        }
    }
    if let Some(v) = top.get("known_mu") {
        if let Some(o) = c.object(v, "known_mu", &["mu_values", "lambda", "alpha", "prior"]) {
            if let Some(mv) = o.get("mu_values") {
                if let Some(a) = c.array(mv, "known_mu.mu_values") {
                    let vals: Option<Vec<f64>> = a
                        .iter()
                        .enumerate()
                        .map(|(i, x)| c.num(x, &format!("known_mu.mu_values[{i}]")))
                        .collect::<Vec<_>>()
                        .into_iter()
                        .collect();
                    if let Some(vals) = vals {
                        cfg.known_mu.mu_values = vals;
                    }
                }
            }
            if let Some(x) = o.get("lambda").and_then(|v| c.positive(v, "known_mu.lambda")) {
                cfg.known_mu.lambda = x;
            }
            if let Some(x) = o.get("alpha").and_then(|v| c.positive(v, "known_mu.alpha")) {
                cfg.known_mu.alpha = x;
            }
            if let Some(pv) = o.get("prior") {
                if let Some(po) = c.object(pv, "known_mu.prior", &["a1", "b1", "a2", "b2", "t1"]) {
                    if let Some(p) = c.prior_spec(po, "known_mu.prior") {
                        cfg.known_mu.prior = p;
                    }
                }
            }
        }
    }
    if let Some(v) = top.get("replications") {
        if let Some(x) = c.count(v, "replications", 1) {
            cfg.replications = x;
        }
    }
    if let Some(v) = top.get("nboot") {
        if let Some(x) = c.count(v, "nboot", 2) {
            cfg.nboot = x;
        }
    }
    if let Some(v) = top.get("gibbs_t") {
        if let Some(x) = c.count(v, "gibbs_t", 2) {
            cfg.gibbs_t = x;
        }
    }
    match top.get("burn_in") {
        None | Some(Value::Null) => {}
        Some(v) => {
            if let Some(x) = c.count(v, "burn_in", 0) {
                cfg.burn_in = Some(x);
            }
        }
    }
    if cfg.burn_in() >= cfg.gibbs_t {
        c.err("burn_in", format!("must be below gibbs_t = {}", cfg.gibbs_t));
    }
    if let Some(v) = top.get("eta") {
        if let Some(x) = c.num(v, "eta") {
            if x > 0.0 && x < 1.0 {
                cfg.eta = x;
            } else {
                c.err("eta", format!("must lie in (0,1), got {x}"));
            }
        }
    }
    if let Some(v) = top.get("seed") {
        match v.as_u64() {
            Some(s) => cfg.seed = s,
            None => c.err("seed", "expected a non-negative integer"),
        }
    }
    if let Some(v) = top.get("estimators") {
        let names = ["mle", "bayes", "asymptotic", "boot_p", "boot_t", "credible", "known_mu"];
        if let Some(o) = c.object(v, "estimators", &names) {
            let e = &mut cfg.estimators;
            for (k, val) in o {
                let Some(b) = val.as_bool() else {
                    c.err(&join("estimators", k), "expected true or false");
                    continue;
                };
                match k.as_str() {
                    "mle" => e.mle = b,
                    "bayes" => e.bayes = b,
                    "asymptotic" => e.asymptotic = b,
                    "boot_p" => e.boot_p = b,
                    "boot_t" => e.boot_t = b,
                    "credible" => e.credible = b,
                    "known_mu" => e.known_mu = b,
                    _ => {}
                }
            }
        }
    }
    if c.errors.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(c.errors))
    }
}
