use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniformly sampled voltage series.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform<T> {
    sample_rate: T,
    samples: Vec<T>,
    label: String,
}

impl<T: Scalar> Waveform<T> {
    /// Checks the sample rate and that every sample is finite. Empty
    /// waveforms are allowed so header-only records can round-trip.
    pub fn new(sample_rate: T, samples: Vec<T>, label: impl Into<String>) -> Result<Self> {
        if !(sample_rate > T::zero()) || !sample_rate.is_finite() {
            return Err(Error::param("sample_rate", "must be finite and > 0"));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::param("samples", format!("sample {i} is not finite")));
        }
        Ok(Waveform {
            sample_rate,
            samples,
            label: label.into(),
        })
    }

    pub fn zeros(sample_rate: T, len: usize, label: impl Into<String>) -> Result<Self> {
        Self::new(sample_rate, vec![T::zero(); len], label)
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Record length in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate.as_f64()
    }

    /// Time of sample `i`, seconds.
    pub fn time_of(&self, i: usize) -> f64 {
        i as f64 / self.sample_rate.as_f64()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same sample rate and label, new samples (must be finite).
    pub fn with_samples(&self, samples: Vec<T>) -> Result<Self> {
        Self::new(self.sample_rate, samples, self.label.clone())
    }

    pub fn scaled(&self, k: T) -> Self {
        Waveform {
            sample_rate: self.sample_rate,
            samples: self.samples.iter().map(|&v| v * k).collect(),
            label: self.label.clone(),
        }
    }

    /// Sample-wise `self + k·other`. Lengths and rates must match.
    pub fn add_scaled(&self, other: &Waveform<T>, k: T) -> Result<Self> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::param("waveform", "lengths differ"));
        }
        if self.sample_rate != other.sample_rate {
            return Err(Error::param("waveform", "sample rates differ"));
        }
        Ok(Waveform {
            sample_rate: self.sample_rate,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| a + k * b)
                .collect(),
            label: self.label.clone(),
        })
    }

    pub fn mean(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        self.samples.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(self.samples.len())
    }

    pub fn rms(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        (self.samples.iter().fold(T::zero(), |a, &b| a + b * b) / T::from_count(self.samples.len()))
            .sqrt()
    }

    pub fn std_dev(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        let m = self.mean();
        (self
            .samples
            .iter()
            .fold(T::zero(), |a, &b| a + (b - m) * (b - m))
            / T::from_count(self.samples.len()))
        .sqrt()
    }

    pub fn max(&self) -> T {
        self.samples.iter().copied().fold(T::neg_infinity(), T::max)
    }
}
