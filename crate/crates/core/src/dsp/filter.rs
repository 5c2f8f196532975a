//! Zero-phase band-limiting of recorded waveforms.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signals::Waveform;

use super::iir::{butterworth, Pass, Sos};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    HighPass,
    LowPass,
    BandPass,
}

/// Only maximally flat designs are provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterFamily {
    #[default]
    Butterworth,
}

/// Corners are in Hz. `low_hz` is ignored for low-pass and `high_hz` for
/// high-pass filters. `order` applies to each edge of a band-pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec<T> {
    pub kind: FilterKind,
    pub low_hz: T,
    pub high_hz: T,
    pub order: usize,
    pub family: FilterFamily,
}

impl<T: Scalar> Default for FilterSpec<T> {
    /// 4th-order Butterworth band-pass, 3 to 250 Hz.
    fn default() -> Self {
        FilterSpec::bandpass(T::lit(3.0), T::lit(250.0))
    }
}

impl<T: Scalar> FilterSpec<T> {
    pub fn bandpass(low_hz: T, high_hz: T) -> Self {
        FilterSpec {
            kind: FilterKind::BandPass,
            low_hz,
            high_hz,
            order: 4,
            family: FilterFamily::Butterworth,
        }
    }

    pub fn highpass(corner_hz: T) -> Self {
        FilterSpec {
            kind: FilterKind::HighPass,
            low_hz: corner_hz,
            high_hz: T::infinity(),
            ..FilterSpec::bandpass(corner_hz, corner_hz)
        }
    }

    pub fn lowpass(corner_hz: T) -> Self {
        FilterSpec {
            kind: FilterKind::LowPass,
            low_hz: T::zero(),
            high_hz: corner_hz,
            ..FilterSpec::bandpass(corner_hz, corner_hz)
        }
    }

    /// Corners actually used at `fs`. An upper corner between 0.98·fs/2 and
    /// fs/2 inclusive is pulled down to 0.98·fs/2.
    pub fn effective_corners(&self, fs: T) -> Result<(Option<T>, Option<T>)> {
        if self.order == 0 {
            return Err(Error::param("order", "must be >= 1"));
        }
        let nyq = fs / T::lit(2.0);
        let ceiling = T::lit(0.98) * nyq;
        let low = match self.kind {
            FilterKind::LowPass => None,
            _ => {
                if !(self.low_hz > T::zero() && self.low_hz < ceiling) {
                    return Err(Error::param("low_hz", "must lie in (0, fs/2)"));
                }
                Some(self.low_hz)
            }
        };
        let high = match self.kind {
            FilterKind::HighPass => None,
            _ => {
                let mut h = self.high_hz;
                if !(h > T::zero() && h <= nyq) {
                    return Err(Error::param("high_hz", "must lie in (0, fs/2]"));
                }
                if h > ceiling {
                    log::info!(
                        "upper corner {} Hz clamped to {} Hz at fs = {} Hz",
                        h,
                        ceiling,
                        fs
                    );
                    h = ceiling;
                }
                Some(h)
            }
        };
        if let (Some(l), Some(h)) = (low, high) {
            if l >= h {
                return Err(Error::param("low_hz", "must be below high_hz"));
            }
        }
        Ok((low, high))
    }

    pub fn design(&self, fs: T) -> Result<Sos<T>> {
        let (low, high) = self.effective_corners(fs)?;
        let mut sos: Option<Sos<T>> = None;
        if let Some(l) = low {
            sos = Some(butterworth(Pass::High, self.order, l, fs)?);
        }
        if let Some(h) = high {
            let lp = butterworth(Pass::Low, self.order, h, fs)?;
            sos = Some(match sos {
                Some(s) => s.cascade(lp),
                None => lp,
            });
        }
        Ok(sos.expect("at least one edge"))
    }
}

/// Forward-backward filtering with the design given by `spec`; length preserved.
pub fn bandpass<T: Scalar>(w: &Waveform<T>, spec: &FilterSpec<T>) -> Result<Waveform<T>> {
    let sos = spec.design(w.sample_rate())?;
    w.with_samples(sos.filtfilt(w.samples()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(f: f64, fs: f64, n: usize) -> Waveform<f64> {
        let s = (0..n)
            .map(|i| (std::f64::consts::TAU * f * i as f64 / fs).sin())
            .collect();
        Waveform::new(fs, s, "").unwrap()
    }

    fn mid_rms(w: &Waveform<f64>) -> f64 {
        let n = w.len();
        let x = &w.samples()[n / 4..3 * n / 4];
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn removes_dc_offset() {
        let w = sine(20.0, 500.0, 5000).with_samples(
            sine(20.0, 500.0, 5000)
                .samples()
                .iter()
                .map(|v| v + 0.5)
                .collect(),
        );
        let y = bandpass(&w.unwrap(), &FilterSpec::bandpass(3.0, 245.0)).unwrap();
        assert!(y.mean().abs() < 0.01 * 0.5, "{}", y.mean());
    }

    #[test]
    fn one_hertz_is_strongly_attenuated() {
        let y = bandpass(&sine(1.0, 500.0, 10_000), &FilterSpec::bandpass(3.0, 245.0)).unwrap();
        let db = 20.0 * (mid_rms(&y) / std::f64::consts::FRAC_1_SQRT_2).log10();
        assert!(db < -12.0, "{db}");
    }

    #[test]
    fn fifty_hertz_passes() {
        let y = bandpass(
            &sine(50.0, 500.0, 10_000),
            &FilterSpec::bandpass(3.0, 245.0),
        )
        .unwrap();
        let ratio = mid_rms(&y) / std::f64::consts::FRAC_1_SQRT_2;
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn nyquist_corner_is_clamped_and_bad_corners_rejected() {
        let spec = FilterSpec::<f64>::default();
        let (_, h) = spec.effective_corners(500.0).unwrap();
        assert!((h.unwrap() - 245.0).abs() < 1e-12);
        assert!(FilterSpec::bandpass(3.0, 300.0).design(500.0).is_err());
        assert!(FilterSpec::bandpass(0.0, 100.0).design(500.0).is_err());
        assert!(FilterSpec::bandpass(50.0, 40.0).design(500.0).is_err());
        let mut zero = spec;
        zero.order = 0;
        assert!(zero.design(500.0).is_err());
    }

    #[test]
    fn highpass_and_lowpass_variants() {
        let hp = FilterSpec::highpass(10.0f64).design(500.0).unwrap();
        assert!(hp.response(1.0, 500.0).norm() < 1e-3);
        let lp = FilterSpec::lowpass(10.0f64).design(500.0).unwrap();
        assert!((lp.response(0.0, 500.0).norm() - 1.0).abs() < 1e-12);
    }
}
