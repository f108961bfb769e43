//! Experiment grids, benchmark CSV persistence and summaries.

mod config;
mod grid;
mod summary;

pub use self::config::{
    default_epsilons, Algorithm, DatasetClass, DatasetSource, DatasetSpec, ExperimentConfig, DEFAULT_SCALE_REAL,
    DEFAULT_SCALE_SYNTHETIC, DEFAULT_TRIALS,
};
pub use self::grid::{
    cell_seed, read_trials, run_dataset, run_grid, GridOutcome, TrialRecord, COMPOSITION_NOTICE, ERROR_ALGORITHM,
    TRIAL_HEADER,
};
pub use self::summary::{mean_std, summarize, write_summary, SummaryRow, SUMMARY_HEADER};
