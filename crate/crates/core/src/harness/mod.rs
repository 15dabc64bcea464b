//! File formats, experiment configs, scripted reproductions and the command
//! functions behind the `fcomp` binary.

pub mod commands;
mod experiment;
mod io;
mod repro;

pub use experiment::{run_experiment, ExperimentConfig, ExperimentResult, PreparedExperiment, ReportsSource, SweepRow};
pub use io::{
    parse_outcomes_csv, parse_reports_csv, read_outcomes_csv, read_reports_csv, write_reports_csv, LabeledReports,
};
pub use repro::{
    run_repro, uniform_counterexample_rate, Check, ReproCase, ReproOutcome, UNDERCUT, UNIFORM_GRID, UNIFORM_TRIALS,
};
