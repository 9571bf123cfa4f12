//! Citation-distribution diagnostics for research evaluation.
//!
//! The crate computes fractional top-percentile indicators (`P_top x%`) for
//! groups of papers such as countries or institutions, fits the two-anchor
//! power law linking group and global citation ranks, and flags the three
//! ways real groups depart from it:
//!
//! - an extreme upper tail that sits above or below the power law,
//! - an inflated lower tail (excess of lowly cited papers),
//! - a deflated lower part (deficit of lowly cited papers).
//!
//! Institutions described by published indicator tables are labelled Type A
//! (stable ratios), B (decreasing) or C (increasing).

pub mod classify;
pub mod cli;
pub mod corpus;
pub mod doublerank;
pub mod error;
pub mod percentile;
pub mod report;
pub mod synth;
pub mod tails;

pub use corpus::{
    load_corpus, rank_global, CorpusSchema, PaperRecord, RankPolicy, RankedCorpus, GLOBAL,
};
pub use error::{Error, ErrorClass, Result};
pub use percentile::{
    indicator_set, percentile_threshold, top_percentile_count, PercentileSet, Ratio,
};
