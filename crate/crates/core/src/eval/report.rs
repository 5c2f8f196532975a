//! Electrode comparison tables laid out like the clinical results table.

use serde::Serialize;

use crate::error::{Error, Result};

use super::metrics::MetricsReport;

pub const REPORT_COLUMNS: [&str; 11] = [
    "subject",
    "snr_ref_db",
    "snr_nce_db",
    "se_ref",
    "se_nce",
    "ppv_ref",
    "ppv_nce",
    "acc_ref",
    "acc_nce",
    "f1_ref",
    "f1_nce",
];

/// One table row. Metrics are percentages, SNR in dB.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub subject: String,
    pub snr_ref_db: Option<f64>,
    pub snr_nce_db: Option<f64>,
    pub se_ref: f64,
    pub se_nce: f64,
    pub ppv_ref: f64,
    pub ppv_nce: f64,
    pub acc_ref: f64,
    pub acc_nce: f64,
    pub f1_ref: f64,
    pub f1_nce: f64,
}

impl ReportRow {
    fn values(&self) -> [Option<f64>; 10] {
        [
            self.snr_ref_db,
            self.snr_nce_db,
            Some(self.se_ref),
            Some(self.se_nce),
            Some(self.ppv_ref),
            Some(self.ppv_nce),
            Some(self.acc_ref),
            Some(self.acc_nce),
            Some(self.f1_ref),
            Some(self.f1_nce),
        ]
    }

    /// Values rounded for display, in column order after `subject`.
    pub fn rendered(&self) -> [Option<f64>; 10] {
        self.values().map(|v| v.map(round2))
    }
}

/// Per-record rows plus their column means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub rows: Vec<ReportRow>,
    pub average: ReportRow,
}

/// Two-decimal rounding, half away from zero, after snapping to 1e-6 so
/// values like 95.825 that are not exact in binary round as written.
pub fn round2(v: f64) -> f64 {
    let micro = (v.abs() * 1e6).round();
    let hundredths = ((micro + 5000.0) / 10000.0).floor();
    if hundredths == 0.0 {
        return 0.0;
    }
    v.signum() * hundredths / 100.0
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0;
    for v in values {
        sum += v?;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Pairs `(nce, reference)` reports by record. Both members of a pair must
/// carry the same record id.
pub fn compare_report(pairs: &[(MetricsReport, MetricsReport)]) -> Result<CompareReport> {
    if pairs.is_empty() {
        return Err(Error::param("rows", "at least one record is required"));
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for (nce, reference) in pairs {
        if nce.record_id != reference.record_id {
            return Err(Error::param(
                "rows",
                format!(
                    "record '{}' paired with '{}'",
                    nce.record_id, reference.record_id
                ),
            ));
        }
        nce.validate()?;
        reference.validate()?;
        rows.push(ReportRow {
            subject: nce.record_id.clone(),
            snr_ref_db: reference.snr_db,
            snr_nce_db: nce.snr_db,
            se_ref: 100.0 * reference.se,
            se_nce: 100.0 * nce.se,
            ppv_ref: 100.0 * reference.ppv,
            ppv_nce: 100.0 * nce.ppv,
            acc_ref: 100.0 * reference.acc,
            acc_nce: 100.0 * nce.acc,
            f1_ref: 100.0 * reference.f1,
            f1_nce: 100.0 * nce.f1,
        });
    }
    let col = |f: fn(&ReportRow) -> Option<f64>| mean(rows.iter().map(f));
    let req = |f: fn(&ReportRow) -> f64| mean(rows.iter().map(|r| Some(f(r)))).unwrap_or(0.0);
    let average = ReportRow {
        subject: "average".to_string(),
        snr_ref_db: col(|r| r.snr_ref_db),
        snr_nce_db: col(|r| r.snr_nce_db),
        se_ref: req(|r| r.se_ref),
        se_nce: req(|r| r.se_nce),
        ppv_ref: req(|r| r.ppv_ref),
        ppv_nce: req(|r| r.ppv_nce),
        acc_ref: req(|r| r.acc_ref),
        acc_nce: req(|r| r.acc_nce),
        f1_ref: req(|r| r.f1_ref),
        f1_nce: req(|r| r.f1_nce),
    };
    Ok(CompareReport { rows, average })
}

impl CompareReport {
    /// CSV with a header, one line per record and a final `average` line.
    /// Missing SNR values are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = REPORT_COLUMNS.join(",");
        out.push('\n');
        for row in self.rows.iter().chain(std::iter::once(&self.average)) {
            out.push_str(&row.subject);
            for v in row.rendered() {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&format!("{v:.2}"));
                }
            }
            out.push('\n');
        }
        out
    }

    /// JSON array of row objects with the CSV field names, values rounded as
    /// in the CSV.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .chain(std::iter::once(&self.average))
            .map(|row| {
                let mut obj = serde_json::Map::new();
                obj.insert("subject".into(), row.subject.clone().into());
                for (name, v) in REPORT_COLUMNS[1..].iter().zip(row.rendered()) {
                    obj.insert(
                        (*name).into(),
                        v.map_or(serde_json::Value::Null, Into::into),
                    );
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}
