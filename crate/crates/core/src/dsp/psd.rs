//! Welch power spectral density and input-referred noise.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::circuit::RationalTransferFunction;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signals::Waveform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    /// Periodic Hann.
    #[default]
    Hann,
    Hamming,
    Rectangular,
}

impl Window {
    pub fn name(&self) -> &'static str {
        match self {
            Window::Hann => "hann",
            Window::Hamming => "hamming",
            Window::Rectangular => "rectangular",
        }
    }

    pub fn coefficients<T: Scalar>(&self, n: usize) -> Vec<T> {
        let nf = T::from_count(n);
        (0..n)
            .map(|i| {
                let c = (T::TAU() * T::from_count(i) / nf).cos();
                match self {
                    Window::Hann => T::lit(0.5) - T::lit(0.5) * c,
                    Window::Hamming => T::lit(0.54) - T::lit(0.46) * c,
                    Window::Rectangular => T::one(),
                }
            })
            .collect()
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hann" | "hanning" => Ok(Window::Hann),
            "hamming" => Ok(Window::Hamming),
            "rect" | "rectangular" | "boxcar" => Ok(Window::Rectangular),
            _ => Err(Error::param("window", format!("unknown window '{s}'"))),
        }
    }
}

/// One-sided density estimate on bins `k·fs/segment_len`, `k = 0..=segment_len/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate<T> {
    pub frequencies: Vec<T>,
    /// V²/Hz.
    pub density: Vec<T>,
    pub segment_len: usize,
    pub overlap: f64,
    pub window: Window,
}

impl<T: Scalar> PsdEstimate<T> {
    pub fn resolution(&self) -> T {
        if self.frequencies.len() < 2 {
            return T::zero();
        }
        self.frequencies[1] - self.frequencies[0]
    }

    /// `Σ density·Δf`, which approximates the signal variance.
    pub fn integral(&self) -> T {
        let df = self.resolution();
        self.density.iter().fold(T::zero(), |a, &d| a + d * df)
    }

    /// `Σ density·Δf` over bins with `lo <= f <= hi`.
    pub fn band_integral(&self, lo: T, hi: T) -> T {
        let df = self.resolution();
        self.bins(lo, hi).fold(T::zero(), |a, (_, d)| a + d * df)
    }

    /// Mean density over bins with `lo <= f <= hi`.
    pub fn band_mean(&self, lo: T, hi: T) -> Option<T> {
        let (sum, n) = self
            .bins(lo, hi)
            .fold((T::zero(), 0), |(s, n), (_, d)| (s + d, n + 1));
        (n > 0).then(|| sum / T::from_count(n))
    }

    fn bins(&self, lo: T, hi: T) -> impl Iterator<Item = (T, T)> + '_ {
        self.frequencies
            .iter()
            .zip(&self.density)
            .filter(move |(f, _)| **f >= lo && **f <= hi)
            .map(|(f, d)| (*f, *d))
    }

    /// Linear interpolation of the density at `f`, `None` outside the grid.
    pub fn value_at(&self, f: T) -> Option<T> {
        let i = self.frequencies.iter().position(|&x| x >= f)?;
        if self.frequencies[i] == f {
            return Some(self.density[i]);
        }
        if i == 0 {
            return None;
        }
        let (f0, f1) = (self.frequencies[i - 1], self.frequencies[i]);
        let t = (f - f0) / (f1 - f0);
        Some(self.density[i - 1] + t * (self.density[i] - self.density[i - 1]))
    }

    /// Amplitude spectral density, V/√Hz.
    pub fn amplitude(&self) -> Vec<T> {
        self.density.iter().map(|d| d.sqrt()).collect()
    }
}

/// Segment length, overlap and taper for [`welch_psd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchConfig {
    pub segment_s: f64,
    pub overlap: f64,
    pub window: Window,
}

impl Default for WelchConfig {
    fn default() -> Self {
        WelchConfig {
            segment_s: 4.0,
            overlap: 0.5,
            window: Window::Hann,
        }
    }
}

impl WelchConfig {
    pub fn segment_len(&self, fs: f64) -> usize {
        (self.segment_s * fs).round() as usize
    }

    /// Default settings, with the segment shortened to the record if needed.
    pub fn estimate<T: Scalar>(&self, w: &Waveform<T>) -> Result<PsdEstimate<T>> {
        let seg = self.segment_len(w.sample_rate().as_f64()).min(w.len());
        welch_psd(w, seg, self.overlap, self.window)
    }
}

/// Averaged modified periodogram with per-segment mean removal.
pub fn welch_psd<T: Scalar>(
    w: &Waveform<T>,
    segment: usize,
    overlap: f64,
    window: Window,
) -> Result<PsdEstimate<T>> {
    if segment < 2 {
        return Err(Error::param("segment", "must be >= 2 samples"));
    }
    if segment > w.len() {
        return Err(Error::param("segment", "longer than the record"));
    }
    if !(0.0..=0.9).contains(&overlap) {
        return Err(Error::param("overlap", "must lie in [0, 0.9]"));
    }
    let fs = w.sample_rate();
    let x = w.samples();
    let step = (segment - (overlap * segment as f64).round() as usize).max(1);
    let count = (x.len() - segment) / step + 1;
    let win: Vec<T> = window.coefficients(segment);
    let win_power = win.iter().fold(T::zero(), |a, &v| a + v * v);
    let fft = FftPlanner::new().plan_fft_forward(segment);
    let bins = segment / 2 + 1;
    let mut acc = vec![T::zero(); bins];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); segment];
    for s in 0..count {
        let seg = &x[s * step..s * step + segment];
        let mean = seg.iter().fold(T::zero(), |a, &v| a + v) / T::from_count(segment);
        for ((b, &v), &c) in buf.iter_mut().zip(seg).zip(&win) {
            *b = Complex::new((v - mean) * c, T::zero());
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let scale = T::one() / (fs * win_power * T::from_count(count));
    let two = T::lit(2.0);
    let density = acc
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            let one_sided = k != 0 && !(segment.is_multiple_of(2) && k == segment / 2);
            if one_sided {
                p * scale * two
            } else {
                p * scale
            }
        })
        .collect();
    let df = fs / T::from_count(segment);
    Ok(PsdEstimate {
        frequencies: (0..bins).map(|k| df * T::from_count(k)).collect(),
        density,
        segment_len: segment,
        overlap,
        window,
    })
}

/// Output noise PSD divided by `|H(j2πf)|²` with the default Welch settings.
/// The DC bin, where a high-pass front end has no gain, is dropped.
pub fn input_referred_noise<T: Scalar>(
    output: &Waveform<T>,
    tf: &RationalTransferFunction<T>,
) -> Result<PsdEstimate<T>> {
    input_referred_noise_with(output, tf, &WelchConfig::default())
}

pub fn input_referred_noise_with<T: Scalar>(
    output: &Waveform<T>,
    tf: &RationalTransferFunction<T>,
    cfg: &WelchConfig,
) -> Result<PsdEstimate<T>> {
    let mut psd = cfg.estimate(output)?;
    let floor = T::lit(1e-12);
    let mut frequencies = Vec::with_capacity(psd.frequencies.len());
    let mut density = Vec::with_capacity(psd.density.len());
    for (&f, &d) in psd.frequencies.iter().zip(&psd.density).skip(1) {
        let mag = tf.magnitude_hz(f);
        if !(mag >= floor) {
            return Err(Error::DivisionByZero(format!(
                "|H| = {:e} at {} Hz is below 1e-12",
                mag.as_f64(),
                f
            )));
        }
        frequencies.push(f);
        density.push(d / (mag * mag));
    }
    psd.frequencies = frequencies;
    psd.density = density;
    Ok(psd)
}
