//! Forecasting competitions that reward honest forecasts.
//!
//! Picking the forecaster with the highest total proper score invites
//! exaggeration. This crate implements lottery-based alternatives (event
//! lotteries and their independent-event variant), tools to audit any
//! mechanism for profitable misreports, and accuracy analysis for how often
//! the best forecaster actually wins.
//!
//! ```
//! use fcomp::{Mechanism, OutcomeVector, ReportMatrix, ScoringRule, SeededStream};
//!
//! let reports = ReportMatrix::new(vec![vec![0.8], vec![0.6]]).unwrap();
//! let outcome = OutcomeVector::new(vec![1.0]);
//! let dist = fcomp::elf_distribution(&reports, &outcome, &ScoringRule::quadratic()).unwrap();
//! assert!((dist[0] - 0.56).abs() < 1e-12);
//!
//! let result = Mechanism::Elf
//!     .run(&reports, &outcome, &ScoringRule::quadratic(), &mut SeededStream::new(7))
//!     .unwrap();
//! assert!(result.winner < 2);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accuracy;
pub mod error;
pub mod harness;
pub mod incentives;
pub mod mechanisms;
pub mod rng;
pub mod scoring;

pub use error::{Error, Result};
pub use mechanisms::{
    elf_distribution, CompetitionResult, Mechanism, OutcomeVector, ReportMatrix, ScoreMatrix, SelectionDistribution,
    TieBreak,
};
pub use rng::{Purpose, SeededStream};
pub use scoring::{ScoringRule, TrueDistribution};
