//! QRS-window signal-to-noise ratio.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signals::Waveform;

use super::AnnotationSet;

/// Half width of the window counted as signal around each peak.
pub const SNR_HALF_WINDOW_S: f64 = 0.05;

/// `10·log10(P_in / P_out)` where `P_in` is the mean power of samples within
/// ±50 ms of any peak and `P_out` that of all other samples.
pub fn snr_db<T: Scalar>(w: &Waveform<T>, peaks: &AnnotationSet) -> Result<T> {
    if peaks.is_empty() {
        return Err(Error::Definition(
            "no peaks to define the signal windows".into(),
        ));
    }
    let fs = w.sample_rate().as_f64();
    let half = (SNR_HALF_WINDOW_S * fs).round() as isize;
    let n = w.len();
    let mut inside = vec![false; n];
    for &t in peaks.times() {
        let c = (t * fs).round() as isize;
        let lo = (c - half).max(0);
        let hi = (c + half).min(n as isize - 1);
        for i in lo..=hi {
            inside[i as usize] = true;
        }
    }
    let (mut p_in, mut n_in, mut p_out, mut n_out) = (T::zero(), 0, T::zero(), 0);
    for (&x, &m) in w.samples().iter().zip(&inside) {
        if m {
            p_in += x * x;
            n_in += 1;
        } else {
            p_out += x * x;
            n_out += 1;
        }
    }
    if n_out == 0 {
        return Err(Error::Definition(
            "peak windows cover the whole record".into(),
        ));
    }
    if n_in == 0 {
        return Err(Error::Definition(
            "no peak window overlaps the record".into(),
        ));
    }
    if p_out == T::zero() {
        return Err(Error::Definition(
            "zero power outside the peak windows".into(),
        ));
    }
    let ratio = (p_in / T::from_count(n_in)) / (p_out / T::from_count(n_out));
    Ok(T::lit(10.0) * ratio.log10())
}
