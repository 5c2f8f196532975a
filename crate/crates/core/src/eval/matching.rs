//! One-to-one matching of detected events against reference events.

use crate::dsp::AnnotationSet;
use crate::error::{Error, Result};

/// Default matching half-width, seconds.
pub const DEFAULT_HALF_WIDTH_S: f64 = 0.050;

/// Slack added to the window so that an offset of exactly `half_width`
/// survives decimal round-off in the event times.
const BOUNDARY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// Always zero: event detection has no true negatives.
    pub tn: usize,
    /// `(reference, detection)` pairs in chronological order.
    pub pairs: Vec<(f64, f64)>,
    pub half_width: f64,
}

impl MatchResult {
    pub fn reference_count(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn detection_count(&self) -> usize {
        self.tp + self.fp
    }

    /// Counts only, for aggregating over records.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        MatchResult {
            tp,
            fp,
            fn_,
            tn: 0,
            pairs: Vec::new(),
            half_width: DEFAULT_HALF_WIDTH_S,
        }
    }
}

fn ensure_increasing(name: &str, times: &[f64]) -> Result<()> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param(
            name,
            "event times must be strictly increasing",
        ));
    }
    Ok(())
}

/// Walks the detections in time order and pairs each with the nearest
/// still-unmatched reference within `±half_width` (inclusive). Ties go to
/// the earlier reference.
pub fn match_annotations(
    reference: &AnnotationSet,
    detected: &AnnotationSet,
    half_width: f64,
) -> Result<MatchResult> {
    match_times(reference.times(), detected.times(), half_width)
}

/// [`match_annotations`] on raw time slices, which are checked for order.
pub fn match_times(reference: &[f64], detected: &[f64], half_width: f64) -> Result<MatchResult> {
    if !(half_width >= 0.0) || !half_width.is_finite() {
        return Err(Error::param("half_width", "must be finite and >= 0"));
    }
    ensure_increasing("reference", reference)?;
    ensure_increasing("detections", detected)?;
    let reach = half_width + BOUNDARY_EPS;
    let mut used = vec![false; reference.len()];
    let mut pairs = Vec::new();
    let mut start = 0;
    for &d in detected {
        while start < reference.len() && reference[start] < d - reach {
            start += 1;
        }
        let mut best: Option<usize> = None;
        for (j, &r) in reference.iter().enumerate().skip(start) {
            if r > d + reach {
                break;
            }
            if used[j] {
                continue;
            }
            if best.is_none_or(|b| (r - d).abs() < (reference[b] - d).abs()) {
                best = Some(j);
            }
        }
        if let Some(j) = best {
            used[j] = true;
            pairs.push((reference[j], d));
        }
    }
    let tp = pairs.len();
    Ok(MatchResult {
        tp,
        fp: detected.len() - tp,
        fn_: reference.len() - tp,
        tn: 0,
        pairs,
        half_width,
    })
}
