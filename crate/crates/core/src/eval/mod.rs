//! Scoring detected fetal QRS complexes against reference annotations.

mod matching;
mod metrics;
mod report;

pub use matching::{match_annotations, match_times, MatchResult, DEFAULT_HALF_WIDTH_S};
pub use metrics::{accuracy, f1, ppv, sensitivity, MetricsReport};
pub use report::{compare_report, round2, CompareReport, ReportRow, REPORT_COLUMNS};
