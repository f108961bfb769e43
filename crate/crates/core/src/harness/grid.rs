use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::{Algorithm, DatasetSpec, ExperimentConfig};
use crate::coloring::{
    control_threshold, controlled_resample, greedy_coloring, random_coloring, resample_sequential,
    streams, unctr_order, Coloring, PrivatePalette,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mech::{MechanismSpec, PrivacyBudget, RandomSource};
use crate::metrics::verify_coloring;

/// Column order of the benchmark CSV.
pub const TRIAL_HEADER: [&str; 14] = [
    "dataset",
    "n",
    "m",
    "max_degree",
    "algorithm",
    "epsilon",
    "trial",
    "seed",
    "palette_size",
    "noisy_delta",
    "avg_defect",
    "max_defect",
    "recolored_count",
    "runtime_ms",
];

/// Value of the `algorithm` column on rows recording a dataset failure.
pub const ERROR_ALGORITHM: &str = "error";

pub const COMPOSITION_NOTICE: &str = "notice: repeated trials are for evaluation only; \
a deployment answering k queries with epsilon-DP mechanisms spends k * epsilon in total";

/// One benchmark row.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub dataset: String,
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub trial: usize,
    pub seed: u64,
    pub palette_size: usize,
    pub noisy_delta: f64,
    pub avg_defect: f64,
    pub max_defect: usize,
    pub recolored_count: usize,
    /// Time spent in the algorithm-specific phase; 0 with timing disabled.
    pub runtime_ms: f64,
}

impl TrialRecord {
    fn to_record(&self) -> [String; 14] {
        [
            self.dataset.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.max_degree.to_string(),
            self.algorithm.to_string(),
            self.epsilon.to_string(),
            self.trial.to_string(),
            self.seed.to_string(),
            self.palette_size.to_string(),
            self.noisy_delta.to_string(),
            self.avg_defect.to_string(),
            self.max_defect.to_string(),
            self.recolored_count.to_string(),
            self.runtime_ms.to_string(),
        ]
    }
}

/// Seed for one `(dataset, epsilon, trial)` cell, derived by hashing so that
/// cells are independent and reproducible.
pub fn cell_seed(base_seed: u64, dataset: &str, epsilon: f64, trial: usize) -> u64 {
    let digest = Sha256::new()
        .chain_update(base_seed.to_le_bytes())
        .chain_update((dataset.len() as u64).to_le_bytes())
        .chain_update(dataset.as_bytes())
        .chain_update(epsilon.to_bits().to_le_bytes())
        .chain_update((trial as u64).to_le_bytes())
        .finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Result of a grid run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridOutcome {
    pub rows: usize,
    /// `(dataset, message)` for every dataset that could not be processed.
    pub errors: Vec<(String, String)>,
}

/// Runs every configured `(dataset, epsilon, trial)` cell and writes one CSV
/// row per algorithm. A dataset that fails to load produces one error row
/// and the grid moves on.
pub fn run_grid<W: Write>(cfg: &ExperimentConfig, out: W, write_header: bool) -> Result<GridOutcome> {
    cfg.validate()?;
    let mut writer = csv::Writer::from_writer(out);
    if write_header {
        writer.write_record(TRIAL_HEADER)?;
    }
    let mut outcome = GridOutcome::default();
    for spec in &cfg.datasets {
        let records = spec.load().and_then(|g| run_dataset(cfg, spec, &g));
        match records {
            Ok(records) => {
                for r in &records {
                    writer.write_record(r.to_record())?;
                }
                outcome.rows += records.len();
            }
            Err(e) => {
                let mut row = vec![String::new(); TRIAL_HEADER.len()];
                row[0] = spec.name.clone();
                row[4] = ERROR_ALGORITHM.to_string();
                writer.write_record(&row)?;
                outcome.errors.push((spec.name.clone(), e.to_string()));
            }
        }
    }
    writer.flush()?;
    Ok(outcome)
}

/// All rows for one dataset, ordered by (algorithm, epsilon, trial) in
/// configuration order.
pub fn run_dataset(cfg: &ExperimentConfig, spec: &DatasetSpec, g: &Graph) -> Result<Vec<TrialRecord>> {
    let order = unctr_order(g, cfg.ordering);
    let scale = cfg.threshold_scale(spec);
    let cells: Vec<(usize, usize)> = (0..cfg.epsilons.len())
        .flat_map(|e| (0..cfg.trials).map(move |t| (e, t)))
        .collect();
    let nested = cells
        .par_iter()
        .map(|&(e, trial)| {
            let cell = Cell {
                g,
                dataset: &spec.name,
                epsilon: cfg.epsilons[e],
                trial,
                seed: cell_seed(cfg.seed, &spec.name, cfg.epsilons[e], trial),
                order: &order,
                threshold_scale: scale,
                timing: cfg.timing,
            };
            cell.run(&cfg.algorithms)
                .map(|rows| rows.into_iter().map(move |r| ((e, trial), r)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<_> = nested.into_iter().flatten().collect();
    let alg_rank = |a: Algorithm| cfg.algorithms.iter().position(|&x| x == a).unwrap_or(usize::MAX);
    rows.sort_by_key(|((e, t), r)| (alg_rank(r.algorithm), *e, *t));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

struct Cell<'a> {
    g: &'a Graph,
    dataset: &'a str,
    epsilon: f64,
    trial: usize,
    seed: u64,
    order: &'a [usize],
    threshold_scale: f64,
    timing: bool,
}

impl Cell<'_> {
    /// Draws one palette and one initial coloring, then runs every algorithm
    /// against them.
    fn run(&self, algorithms: &[Algorithm]) -> Result<Vec<TrialRecord>> {
        let g = self.g;
        let eps = PrivacyBudget::new(self.epsilon)?;
        let src = RandomSource::new(self.seed);
        let palette = PrivatePalette::draw(g, eps, src.derive(streams::NOISY_DELTA));
        let initial = random_coloring(g, palette.size, &mut src.derive(streams::INITIAL).rng())?;
        algorithms
            .iter()
            .map(|&algorithm| {
                let start = Instant::now();
                let (coloring, recolored_count) = match algorithm {
                    Algorithm::Unctr => {
                        let c = resample_sequential(
                            g,
                            initial.clone(),
                            self.order,
                            eps,
                            MechanismSpec::HALF,
                            &mut src.derive(streams::SEQUENTIAL).rng(),
                        )?;
                        (c, 0)
                    }
                    Algorithm::Control => {
                        let threshold = control_threshold(g.n(), palette.noisy_delta, eps, self.threshold_scale);
                        let (c, recolored) = controlled_resample(
                            g,
                            &initial,
                            eps,
                            threshold,
                            MechanismSpec::FULL,
                            src.derive(streams::CONTROL),
                        )?;
                        (c, recolored.len())
                    }
                    Algorithm::Crsv => (initial.clone(), 0),
                    Algorithm::Greedy => (greedy_coloring(g, palette.size)?, 0),
                };
                let elapsed = start.elapsed().as_secs_f64() * 1e3;
                self.record(algorithm, &coloring, palette, recolored_count, elapsed)
            })
            .collect()
    }

    fn record(
        &self,
        algorithm: Algorithm,
        coloring: &Coloring,
        palette: PrivatePalette,
        recolored_count: usize,
        runtime_ms: f64,
    ) -> Result<TrialRecord> {
        let report = verify_coloring(self.g, coloring).map_err(|violations| {
            Error::param(format!(
                "{algorithm} produced an invalid coloring: {}",
                violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
            ))
        })?;
        Ok(TrialRecord {
            dataset: self.dataset.to_string(),
            n: self.g.n(),
            m: self.g.m(),
            max_degree: self.g.max_degree(),
            algorithm,
            epsilon: self.epsilon,
            trial: self.trial,
            seed: self.seed,
            palette_size: palette.size,
            noisy_delta: palette.noisy_delta,
            avg_defect: report.average,
            max_defect: report.maximum,
            recolored_count,
            runtime_ms: if self.timing { runtime_ms } else { 0.0 },
        })
    }
}

/// Reads benchmark rows, skipping dataset-error rows. Columns are located by
/// header name.
pub fn read_trials<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(input);
    let headers = reader.headers()?.clone();
    let mut index = [0usize; 14];
    for (slot, name) in index.iter_mut().zip(TRIAL_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }
    let mut records = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let line = row + 2;
        let rec = result?;
        let field = |i: usize| rec.get(index[i]).unwrap_or("");
        if field(4) == ERROR_ALGORITHM {
            continue;
        }
        fn parse<T: std::str::FromStr>(line: usize, column: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::parse(line, format!("column `{column}` has invalid value `{value}`")))
        }
        let p = |i: usize| (line, TRIAL_HEADER[i], field(i));
        records.push(TrialRecord {
            dataset: field(0).to_string(),
            n: parse(p(1).0, p(1).1, p(1).2)?,
            m: parse(p(2).0, p(2).1, p(2).2)?,
            max_degree: parse(p(3).0, p(3).1, p(3).2)?,
            algorithm: field(4).parse().map_err(|_| Error::parse(line, format!("unknown algorithm `{}`", field(4))))?,
            epsilon: parse(p(5).0, p(5).1, p(5).2)?,
            trial: parse(p(6).0, p(6).1, p(6).2)?,
            seed: parse(p(7).0, p(7).1, p(7).2)?,
            palette_size: parse(p(8).0, p(8).1, p(8).2)?,
            noisy_delta: parse(p(9).0, p(9).1, p(9).2)?,
            avg_defect: parse(p(10).0, p(10).1, p(10).2)?,
            max_defect: parse(p(11).0, p(11).1, p(11).2)?,
            recolored_count: parse(p(12).0, p(12).1, p(12).2)?,
            runtime_ms: parse(p(13).0, p(13).1, p(13).2)?,
        });
    }
    Ok(records)
}
