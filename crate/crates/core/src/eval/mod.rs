//! MOS-based evaluation: ingestion, significance tests, correlation with
//! objective metrics, latency and the final report.

mod bench;
mod mos;
mod report;
mod stats;

pub use bench::{latency_bench, LatencyRow, MIN_REPETITIONS};
pub use mos::{aggregate_mos, ingest_mos, write_mos_csv, CellMean, MosAggregate, MosRecord, MOS_HEADER};
pub use report::{
    build_report, read_score_table, validate_report_json, EvalReport, MethodSummary, MetricCorrelation,
    MetricTable, MetricValue, PairwiseTest, RankingVerdict, DEFAULT_ALPHA, REPORT_SCHEMA_VERSION,
};
pub use stats::{
    correlate, mann_whitney_u, mid_ranks, normal_two_sided_p, quantile, sample_variance, t_two_sided_p,
    welch_ttest, Correlation, Direction, MannWhitneyResult, WelchResult,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("bad MOS header: {0:?}")]
    BadHeader(String),
    #[error("row {row}: score {score} outside 1..=5")]
    ScoreOutOfRange { row: usize, score: i64 },
    #[error("row {row}: duplicate (rater, image, method) rating")]
    DuplicateRating { row: usize },
    #[error("row {row}: {detail}")]
    MalformedRow { row: usize, detail: String },
    #[error("no records")]
    Empty,
    #[error("need at least 2 samples per group, got {0}")]
    TooFewSamples(usize),
    #[error("both samples have zero variance")]
    DegenerateVariance,
    #[error("all values tied")]
    AllValuesTied,
    #[error("need at least 3 aligned pairs, got {0}")]
    InsufficientPairs(usize),
    #[error("zero variance in one of the correlated series")]
    ZeroVariance,
    #[error("at least {MIN_REPETITIONS} repetitions required, got {0}")]
    TooFewRepetitions(usize),
    #[error("model failed: {0}")]
    ModelLoadFailure(String),
    #[error("inconsistent ids: {0}")]
    IdMismatch(String),
    #[error("alpha {0} outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("report violates schema: {0}")]
    SchemaViolation(String),
}
