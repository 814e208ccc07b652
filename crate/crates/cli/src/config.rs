//! Method options and the bench configuration file.
//!
//! The configuration format is line-based `key = value` text. `#` starts a
//! comment. Keys before the first `[section]` describe the dataset and the
//! repetition count; every `[section]` adds one method to the matrix. The
//! section name is the method unless a `method = ...` key names it, which
//! allows several variants of one method.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use ksbetas::{ConstraintConfig, Estimator, PiMode};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodKind {
    #[serde(rename = "argmax")]
    Argmax,
    #[serde(rename = "k-means")]
    KMeans,
    #[serde(rename = "kl-k-means")]
    KlKMeans,
    #[serde(rename = "k-medians")]
    KMedians,
    #[serde(rename = "hsc")]
    Hsc,
    #[serde(rename = "k-dirs")]
    KDirs,
    #[serde(rename = "k-sbetas")]
    KSBetas,
    /// k-sBetas with delta fixed to 0.
    #[serde(rename = "k-betas")]
    KBetas,
    /// k-sBetas with uniform proportions.
    #[serde(rename = "k-sbetas-biased")]
    KSBetasBiased,
}

impl MethodKind {
    pub const ALL: [MethodKind; 9] = [
        MethodKind::Argmax,
        MethodKind::KMeans,
        MethodKind::KlKMeans,
        MethodKind::KMedians,
        MethodKind::Hsc,
        MethodKind::KDirs,
        MethodKind::KSBetas,
        MethodKind::KBetas,
        MethodKind::KSBetasBiased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Argmax => "argmax",
            MethodKind::KMeans => "k-means",
            MethodKind::KlKMeans => "kl-k-means",
            MethodKind::KMedians => "k-medians",
            MethodKind::Hsc => "hsc",
            MethodKind::KDirs => "k-dirs",
            MethodKind::KSBetas => "k-sbetas",
            MethodKind::KBetas => "k-betas",
            MethodKind::KSBetasBiased => "k-sbetas-biased",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        MethodKind::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let known: Vec<&str> = MethodKind::ALL.iter().map(|m| m.name()).collect();
            CliError::Config(format!("unknown method '{s}' (known: {})", known.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Mom,
    Mle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignKind {
    Hungarian,
    Argmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Vertex,
}

fn parse_choice<T: Copy>(key: &str, value: &str, choices: &[(&str, T)]) -> Result<T, CliError> {
    choices.iter().find(|(n, _)| *n == value).map(|(_, v)| *v).ok_or_else(|| {
        let names: Vec<&str> = choices.iter().map(|c| c.0).collect();
        CliError::Config(format!("{key} must be one of {}, got '{value}'", names.join(", ")))
    })
}

impl FromStr for EstimatorKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        parse_choice("estimator", s, &[("mom", EstimatorKind::Mom), ("mle", EstimatorKind::Mle)])
    }
}

impl FromStr for AlignKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        parse_choice("align", s, &[("hungarian", AlignKind::Hungarian), ("argmax", AlignKind::Argmax)])
    }
}

impl FromStr for InitKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        parse_choice("init", s, &[("vertex", InitKind::Vertex)])
    }
}

fn parse_pi(s: &str) -> Result<PiMode, CliError> {
    parse_choice("pi", s, &[("adaptive", PiMode::Adaptive), ("uniform", PiMode::Uniform)])
}

/// Per-method options with the defaults of the reference experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOptions {
    pub delta: f64,
    pub tau_minus: f64,
    pub tau_plus: f64,
    pub iters: usize,
    pub estimator: EstimatorKind,
    pub mle_iters: usize,
    pub pi: PiMode,
    pub init: InitKind,
    pub align: AlignKind,
    /// k-Dirs only: clamp parameters to at least `1 + 1e-3`.
    pub unimodal: bool,
}

impl Default for MethodOptions {
    fn default() -> Self {
        Self {
            delta: 0.15,
            tau_minus: 1.0,
            tau_plus: 165.0,
            iters: 25,
            estimator: EstimatorKind::Mom,
            mle_iters: 500,
            pi: PiMode::Adaptive,
            init: InitKind::Vertex,
            align: AlignKind::Hungarian,
            unimodal: false,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::Config(format!("invalid value '{value}' for {key}")))
}

impl MethodOptions {
    /// Applies one `key = value` option.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "delta" => self.delta = parse_num(key, value)?,
            "tau_minus" | "tau-minus" => self.tau_minus = parse_num(key, value)?,
            "tau_plus" | "tau-plus" => self.tau_plus = parse_num(key, value)?,
            "iters" => self.iters = parse_num(key, value)?,
            "mle_iters" | "mle-iters" => self.mle_iters = parse_num(key, value)?,
            "estimator" => self.estimator = value.parse()?,
            "pi" => self.pi = parse_pi(value)?,
            "init" => self.init = value.parse()?,
            "align" => self.align = value.parse()?,
            "unimodal" => self.unimodal = parse_num(key, value)?,
            _ => return Err(CliError::Config(format!("unknown option '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(CliError::Config(format!("delta must be finite and >= 0, got {}", self.delta)));
        }
        ConstraintConfig::new(self.tau_minus, self.tau_plus).map_err(|e| CliError::Config(e.to_string()))?;
        if self.iters == 0 {
            return Err(CliError::Config("iters must be at least 1".into()));
        }
        if self.mle_iters == 0 {
            return Err(CliError::Config("mle_iters must be at least 1".into()));
        }
        Ok(())
    }

    pub fn constraints(&self) -> ConstraintConfig {
        ConstraintConfig { tau_minus: self.tau_minus, tau_plus: self.tau_plus }
    }

    pub fn estimator(&self) -> Estimator {
        match self.estimator {
            EstimatorKind::Mom => Estimator::Mom,
            EstimatorKind::Mle => {
                Estimator::Mle(ksbetas::sbeta::MleOptions { max_iters: self.mle_iters, ..Default::default() })
            }
        }
    }
}

/// A named method variant in a bench matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub label: String,
    pub method: MethodKind,
    pub options: MethodOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    Simu { n: usize, seed: u64 },
    Isimus { n: usize, seed: u64 },
    File { input: String, labels: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub dataset: DatasetSpec,
    pub runs: usize,
    pub methods: Vec<MethodSpec>,
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut dataset = String::from("simu");
        let (mut n, mut seed, mut runs) = (100_000usize, 1u64, 5usize);
        let (mut input, mut labels) = (None, None);
        let mut methods: Vec<(String, Option<MethodKind>, MethodOptions, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| CliError::Config(format!("line {lineno}: malformed section header")))?;
                methods.push((name.to_string(), None, MethodOptions::default(), lineno));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::Config(format!("line {lineno}: expected key = value")))?;
            let at = |e: CliError| match e {
                CliError::Config(m) => CliError::Config(format!("line {lineno}: {m}")),
                other => other,
            };
            match methods.last_mut() {
                None => match key {
                    "dataset" => dataset = value.to_string(),
                    "n" => n = parse_num(key, value).map_err(at)?,
                    "seed" => seed = parse_num(key, value).map_err(at)?,
                    "runs" => runs = parse_num(key, value).map_err(at)?,
                    "input" => input = Some(value.to_string()),
                    "labels" => labels = Some(value.to_string()),
                    _ => return Err(CliError::Config(format!("line {lineno}: unknown key '{key}'"))),
                },
                Some((_, method, options, _)) => {
                    if key == "method" {
                        *method = Some(value.parse().map_err(at)?);
                    } else {
                        options.set(key, value).map_err(at)?;
                    }
                }
            }
        }
        let dataset = match dataset.as_str() {
            "simu" => DatasetSpec::Simu { n, seed },
            "isimus" => DatasetSpec::Isimus { n, seed },
            "file" => DatasetSpec::File {
                input: input.ok_or_else(|| CliError::Config("dataset = file needs input = <path>".into()))?,
                labels,
            },
            other => return Err(CliError::Config(format!("dataset must be simu, isimus or file, got '{other}'"))),
        };
        if matches!(dataset, DatasetSpec::Simu { n: 0, .. } | DatasetSpec::Isimus { n: 0, .. }) {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        let mut seen = BTreeSet::new();
        let mut specs = Vec::with_capacity(methods.len());
        for (label, method, options, lineno) in methods {
            let method = match method {
                Some(m) => m,
                None => label.parse().map_err(|e| match e {
                    CliError::Config(m) => CliError::Config(format!("line {lineno}: {m}")),
                    other => other,
                })?,
            };
            options.validate()?;
            if !seen.insert(label.clone()) {
                return Err(CliError::Config(format!("line {lineno}: duplicate section [{label}]")));
            }
            specs.push(MethodSpec { label, method, options });
        }
        Ok(Self { dataset, runs, methods: specs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_variants() {
        let cfg = BenchConfig::parse(
            "# demo\ndataset = isimus\nn = 1000\nseed = 3\nruns = 2\n\n[k-sbetas]\ndelta = 0.2\n\
             [biased]\nmethod = k-sbetas\npi = uniform\n[argmax]\n",
        )
        .unwrap();
        assert_eq!(cfg.dataset, DatasetSpec::Isimus { n: 1000, seed: 3 });
        assert_eq!(cfg.runs, 2);
        assert_eq!(cfg.methods.len(), 3);
        assert_eq!(cfg.methods[0].options.delta, 0.2);
        assert_eq!(cfg.methods[1].method, MethodKind::KSBetas);
        assert_eq!(cfg.methods[1].options.pi, PiMode::Uniform);
        assert_eq!(cfg.methods[2].method, MethodKind::Argmax);
    }

    #[test]
    fn rejects_unknown_names() {
        assert!(matches!(BenchConfig::parse("[gmm]\n"), Err(CliError::Config(_))));
        assert!(matches!(BenchConfig::parse("[k-means]\nfoo = 1\n"), Err(CliError::Config(_))));
        assert!(matches!(BenchConfig::parse("colour = red\n"), Err(CliError::Config(_))));
        assert!(matches!(BenchConfig::parse("[k-means]\n[k-means]\n"), Err(CliError::Config(_))));
        assert!(matches!(BenchConfig::parse("[k-sbetas]\ntau_minus = 0\n"), Err(CliError::Config(_))));
    }

    #[test]
    fn method_names_roundtrip() {
        for m in MethodKind::ALL {
            assert_eq!(m.name().parse::<MethodKind>().unwrap(), m);
        }
    }
}
