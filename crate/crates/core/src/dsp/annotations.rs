use crate::error::{Error, Result};

/// Strictly increasing event times in seconds (R-peak locations).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationSet {
    times: Vec<f64>,
}

impl AnnotationSet {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::param("annotations", "times must be finite and >= 0"));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::param(
                "annotations",
                format!("times not strictly increasing at index {}", i + 1),
            ));
        }
        Ok(AnnotationSet { times })
    }

    pub fn empty() -> Self {
        AnnotationSet::default()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks every time lies inside `[0, duration]`.
    pub fn check_within(&self, duration: f64) -> Result<()> {
        match self.times.last() {
            Some(&t) if t > duration => Err(Error::param(
                "annotations",
                format!("event at {t} s beyond record end {duration} s"),
            )),
            _ => Ok(()),
        }
    }

    /// Every event shifted by `dt` seconds (events moved below zero are dropped).
    pub fn shifted(&self, dt: f64) -> Self {
        AnnotationSet {
            times: self
                .times
                .iter()
                .map(|t| t + dt)
                .filter(|t| *t >= 0.0)
                .collect(),
        }
    }
}

impl TryFrom<Vec<f64>> for AnnotationSet {
    type Error = Error;

    fn try_from(times: Vec<f64>) -> Result<Self> {
        AnnotationSet::new(times)
    }
}
