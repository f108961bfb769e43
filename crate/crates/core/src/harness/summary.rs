use std::io::{Read, Write};

use super::config::Algorithm;
use super::grid::read_trials;
use crate::error::Result;

pub const SUMMARY_HEADER: [&str; 9] = [
    "dataset",
    "algorithm",
    "epsilon",
    "trials",
    "avg_defect_mean",
    "avg_defect_std",
    "max_defect_mean",
    "max_defect_std",
    "recolored_mean",
];

/// Aggregate of all trials in one `(dataset, algorithm, epsilon)` cell.
/// Standard deviations use the `n - 1` denominator and are 0 for one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub trials: usize,
    pub avg_defect_mean: f64,
    pub avg_defect_std: f64,
    pub max_defect_mean: f64,
    pub max_defect_std: f64,
    pub recolored_mean: f64,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Groups benchmark rows by `(dataset, algorithm, epsilon)` in order of first
/// appearance.
pub fn summarize<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let records = read_trials(input)?;
    let mut groups: Vec<((String, Algorithm, u64), Vec<usize>)> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let key = (r.dataset.clone(), r.algorithm, r.epsilon.to_bits());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(i),
            None => groups.push((key, vec![i])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|((dataset, algorithm, eps_bits), members)| {
            let column = |f: fn(&super::grid::TrialRecord) -> f64| {
                members.iter().map(|&i| f(&records[i])).collect::<Vec<_>>()
            };
            let (avg_defect_mean, avg_defect_std) = mean_std(&column(|r| r.avg_defect));
            let (max_defect_mean, max_defect_std) = mean_std(&column(|r| r.max_defect as f64));
            let (recolored_mean, _) = mean_std(&column(|r| r.recolored_count as f64));
            SummaryRow {
                dataset,
                algorithm,
                epsilon: f64::from_bits(eps_bits),
                trials: members.len(),
                avg_defect_mean,
                avg_defect_std,
                max_defect_mean,
                max_defect_std,
                recolored_mean,
            }
        })
        .collect())
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(SUMMARY_HEADER)?;
    for r in rows {
        writer.write_record([
            r.dataset.clone(),
            r.algorithm.to_string(),
            r.epsilon.to_string(),
            r.trials.to_string(),
            r.avg_defect_mean.to_string(),
            r.avg_defect_std.to_string(),
            r.max_defect_mean.to_string(),
            r.max_defect_std.to_string(),
            r.recolored_mean.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
