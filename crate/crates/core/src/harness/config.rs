//! Experiment configuration and its plain-text key-value file format.
//!
//! ```text
//! # comments start with '#'
//! dataset = er:n=2000,p=0.05,seed=1
//! dataset = ba:n=1000,m=3,seed=2,name=ba-small
//! dataset = file:path=data/ca-GrQc.txt,name=ca-grqc,scale=0.25
//! algorithms = unctr, control, crsv, greedy
//! epsilons = 0.25, 0.5, 1, 2, 4, 8, 16
//! trials = 30
//! seed = 0
//! ordering = input
//! threshold_scale_real = 0.25
//! threshold_scale_synthetic = 0.5
//! timing = true
//! output = results.csv
//! ```
//!
//! `dataset` may repeat; every other key may appear at most once. Dataset
//! options are comma separated, so file paths must not contain commas.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use crate::coloring::OrderingMode;
use crate::error::{Error, Result};
use crate::graph::{gen_barabasi_albert, gen_erdos_renyi, load_edge_list, Graph};
use crate::mech::PrivacyBudget;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Unctr,
    Control,
    Crsv,
    Greedy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Unctr, Algorithm::Control, Algorithm::Crsv, Algorithm::Greedy];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Unctr => "unctr",
            Algorithm::Control => "control",
            Algorithm::Crsv => "crsv",
            Algorithm::Greedy => "greedy",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::param(format!("unknown algorithm `{s}`")))
    }
}

/// Real graphs and synthetic ones get different default threshold scales.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetClass {
    Real,
    Synthetic,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetSource {
    File(PathBuf),
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    BarabasiAlbert { n: usize, m: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    pub name: String,
    pub source: DatasetSource,
    /// Overrides the class default threshold scale.
    pub threshold_scale: Option<f64>,
}

impl DatasetSpec {
    pub fn class(&self) -> DatasetClass {
        match self.source {
            DatasetSource::File(_) => DatasetClass::Real,
            _ => DatasetClass::Synthetic,
        }
    }

    /// Loads or generates the graph.
    pub fn load(&self) -> Result<Graph> {
        match &self.source {
            DatasetSource::File(path) => {
                let file = File::open(path).map_err(|e| {
                    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
                })?;
                Ok(load_edge_list(BufReader::new(file))?.0)
            }
            DatasetSource::ErdosRenyi { n, p, seed } => gen_erdos_renyi(*n, *p, *seed),
            DatasetSource::BarabasiAlbert { n, m, seed } => gen_barabasi_albert(*n, *m, *seed),
        }
    }
}

impl FromStr for DatasetSpec {
    type Err = Error;

    /// Parses `<kind>:<key>=<value>,...` with kind `file`, `er` or `ba`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::param(format!("dataset `{s}` must look like `<kind>:<options>`")))?;
        let mut name = None;
        let mut scale = None;
        let mut path = None;
        let (mut n, mut p, mut m, mut seed) = (None, None, None, None);
        let mut seen = HashSet::new();
        for option in rest.split(',').map(str::trim).filter(|o| !o.is_empty()) {
            let (key, value) = option
                .split_once('=')
                .ok_or_else(|| Error::param(format!("dataset option `{option}` must be `key=value`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::param(format!("dataset option `{key}` given twice")));
            }
            match key {
                "name" if !value.is_empty() && !value.contains(char::is_whitespace) => name = Some(value.to_string()),
                "name" => return Err(Error::param("dataset name must be a non-empty token")),
                "scale" => scale = Some(positive(key, value)?),
                "path" => path = Some(PathBuf::from(value)),
                "n" => n = Some(number::<usize>(key, value)?),
                "p" => p = Some(number::<f64>(key, value)?),
                "m" => m = Some(number::<usize>(key, value)?),
                "seed" => seed = Some(number::<u64>(key, value)?),
                other => return Err(Error::param(format!("unknown dataset option `{other}`"))),
            }
        }
        fn require<T>(kind: &str, what: &str, v: Option<T>) -> Result<T> {
            v.ok_or_else(|| Error::param(format!("`{kind}` dataset requires `{what}`")))
        }
        let forbid = |what: &str, present: bool| {
            if present {
                Err(Error::param(format!("`{kind}` dataset does not take `{what}`")))
            } else {
                Ok(())
            }
        };
        let (source, default_name) = match kind.trim() {
            "file" => {
                forbid("n", n.is_some())?;
                forbid("p", p.is_some())?;
                forbid("m", m.is_some())?;
                forbid("seed", seed.is_some())?;
                let path: PathBuf = require(kind, "path", path)?;
                let stem = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().replace(char::is_whitespace, "_"))
                    .filter(|s| !s.is_empty())
                    .unwrap_or_else(|| "graph".to_string());
                (DatasetSource::File(path), stem)
            }
            "er" => {
                forbid("path", path.is_some())?;
                forbid("m", m.is_some())?;
                let (n, p, seed) = (require(kind, "n", n)?, require(kind, "p", p)?, seed.unwrap_or(0));
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::param(format!("edge probability {p} is outside [0, 1]")));
                }
                (DatasetSource::ErdosRenyi { n, p, seed }, format!("er-n{n}-p{p}-s{seed}"))
            }
            "ba" => {
                forbid("path", path.is_some())?;
                forbid("p", p.is_some())?;
                let (n, m, seed) = (require(kind, "n", n)?, require(kind, "m", m)?, seed.unwrap_or(0));
                if m == 0 || m >= n {
                    return Err(Error::param(format!("attachment count {m} must satisfy 1 <= m < n = {n}")));
                }
                (DatasetSource::BarabasiAlbert { n, m, seed }, format!("ba-n{n}-m{m}-s{seed}"))
            }
            other => return Err(Error::param(format!("unknown dataset kind `{other}`"))),
        };
        Ok(DatasetSpec {
            name: name.unwrap_or(default_name),
            source,
            threshold_scale: scale,
        })
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::param(format!("`{key}` has invalid value `{value}`")))
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let x: f64 = number(key, value)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::param(format!("`{key}` must be positive, got {value}")))
    }
}

/// `2^-2, 2^-1, ..., 2^4`.
pub fn default_epsilons() -> Vec<f64> {
    (-2..=4).map(|k| 2f64.powi(k)).collect()
}

pub const DEFAULT_TRIALS: usize = 30;
pub const DEFAULT_SCALE_REAL: f64 = 0.25;
pub const DEFAULT_SCALE_SYNTHETIC: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSpec>,
    pub algorithms: Vec<Algorithm>,
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub ordering: OrderingMode,
    pub threshold_scale_real: f64,
    pub threshold_scale_synthetic: f64,
    /// When false, `runtime_ms` is written as 0 so reruns are byte-identical.
    pub timing: bool,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            datasets: Vec::new(),
            algorithms: Algorithm::ALL.to_vec(),
            epsilons: default_epsilons(),
            trials: DEFAULT_TRIALS,
            seed: 0,
            ordering: OrderingMode::Input,
            threshold_scale_real: DEFAULT_SCALE_REAL,
            threshold_scale_synthetic: DEFAULT_SCALE_SYNTHETIC,
            timing: true,
            output: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses the key-value format. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = HashSet::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, format!("expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key != "dataset" && !seen.insert(key.to_string()) {
                return Err(Error::parse(line_no, format!("`{key}` is set more than once")));
            }
            cfg.apply(key, value).map_err(|e| match e {
                Error::Param(message) => Error::parse(line_no, message),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    /// Sets one key. Shared by the file parser and command-line overrides.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dataset" => self.datasets.push(value.parse()?),
            "algorithms" => self.algorithms = list(value)?,
            "epsilons" => self.epsilons = list(value)?,
            "trials" => self.trials = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "ordering" => self.ordering = value.parse()?,
            "threshold_scale_real" => self.threshold_scale_real = positive(key, value)?,
            "threshold_scale_synthetic" => self.threshold_scale_synthetic = positive(key, value)?,
            "timing" => {
                self.timing = match value {
                    "true" | "on" | "yes" => true,
                    "false" | "off" | "no" => false,
                    other => return Err(Error::param(format!("`timing` must be true or false, got `{other}`"))),
                }
            }
            "output" if !value.is_empty() => self.output = Some(PathBuf::from(value)),
            "output" => return Err(Error::param("`output` must not be empty")),
            other => return Err(Error::param(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Startup checks run before any dataset is touched.
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::param("no datasets configured"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::param("no algorithms configured"));
        }
        if self.epsilons.is_empty() {
            return Err(Error::param("epsilon grid is empty"));
        }
        for &eps in &self.epsilons {
            PrivacyBudget::new(eps)?;
        }
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        let mut names = HashSet::new();
        for d in &self.datasets {
            if !names.insert(d.name.as_str()) {
                return Err(Error::param(format!("dataset name `{}` is used twice", d.name)));
            }
        }
        let mut algs = HashSet::new();
        for a in &self.algorithms {
            if !algs.insert(a) {
                return Err(Error::param(format!("algorithm `{a}` is listed twice")));
            }
        }
        Ok(())
    }

    /// Threshold scale for `dataset`: its override or the class default.
    pub fn threshold_scale(&self, dataset: &DatasetSpec) -> f64 {
        dataset.threshold_scale.unwrap_or(match dataset.class() {
            DatasetClass::Real => self.threshold_scale_real,
            DatasetClass::Synthetic => self.threshold_scale_synthetic,
        })
    }
}

fn list<T: FromStr>(value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::param(format!("invalid list entry `{s}`"))))
        .collect()
}
