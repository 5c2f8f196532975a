//! Detection metrics from match counts.

use crate::error::{Error, Result};

use super::matching::MatchResult;

pub fn sensitivity(m: &MatchResult) -> Result<f64> {
    let den = m.tp + m.fn_;
    if den == 0 {
        return Err(Error::UndefinedMetric("sensitivity: empty reference"));
    }
    Ok(m.tp as f64 / den as f64)
}

pub fn ppv(m: &MatchResult) -> Result<f64> {
    let den = m.tp + m.fp;
    if den == 0 {
        return Err(Error::UndefinedMetric("ppv: no detections"));
    }
    Ok(m.tp as f64 / den as f64)
}

/// `TP / (TP + FN + FP + TN)` with `TN = 0`.
pub fn accuracy(m: &MatchResult) -> Result<f64> {
    let den = m.tp + m.fn_ + m.fp + m.tn;
    if den == 0 {
        return Err(Error::UndefinedMetric("accuracy: no events"));
    }
    Ok(m.tp as f64 / den as f64)
}

/// `2TP / (2TP + FN + FP)`.
pub fn f1(m: &MatchResult) -> Result<f64> {
    let den = 2 * m.tp + m.fn_ + m.fp;
    if den == 0 {
        return Err(Error::UndefinedMetric("f1: no events"));
    }
    Ok(2.0 * m.tp as f64 / den as f64)
}

/// Per-record scores as fractions in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub record_id: String,
    pub electrode: String,
    pub se: f64,
    pub ppv: f64,
    pub acc: f64,
    pub f1: f64,
    pub snr_db: Option<f64>,
}

impl MetricsReport {
    /// Scores that are undefined for `m` (for instance PPV with no
    /// detections) are reported as 0.
    pub fn from_match(
        m: &MatchResult,
        snr_db: Option<f64>,
        record_id: impl Into<String>,
        electrode: impl Into<String>,
    ) -> Self {
        MetricsReport {
            record_id: record_id.into(),
            electrode: electrode.into(),
            se: sensitivity(m).unwrap_or(0.0),
            ppv: ppv(m).unwrap_or(0.0),
            acc: accuracy(m).unwrap_or(0.0),
            f1: f1(m).unwrap_or(0.0),
            snr_db,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("se", self.se),
            ("ppv", self.ppv),
            ("acc", self.acc),
            ("f1", self.f1),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(name, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}
