//! Annotation files: one event time in seconds per line, six decimals.

use std::fs;
use std::path::Path;

use crate::dsp::AnnotationSet;
use crate::error::{Error, Result};

pub fn format_annotations(a: &AnnotationSet) -> String {
    a.times().iter().map(|t| format!("{t:.6}\n")).collect()
}

/// Parses annotation text. Blank lines are ignored; anything else must be a
/// finite, non-negative time strictly later than the previous one.
pub fn parse_annotations(text: &str, path: &Path) -> Result<AnnotationSet> {
    let mut times: Vec<f64> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: k + 1,
            message,
        };
        let t: f64 = line
            .parse()
            .map_err(|_| err(format!("'{line}' is not a number")))?;
        if !t.is_finite() || t < 0.0 {
            return Err(err(format!("time {line} must be finite and >= 0")));
        }
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(err(format!("time {line} does not follow {prev}")));
            }
        }
        times.push(t);
    }
    AnnotationSet::new(times)
}

pub fn write_annotations(path: &Path, a: &AnnotationSet) -> Result<()> {
    fs::write(path, format_annotations(a)).map_err(|e| Error::io(path, e))
}

pub fn read_annotations(path: &Path) -> Result<AnnotationSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(&text, path)
}
