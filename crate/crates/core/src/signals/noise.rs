//! Electrode/amplifier noise model: white voltage noise with a 1/f region
//! below a corner, white input current noise, and mains interference.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One-sided densities. The voltage PSD is `white² · (1 + corner/f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig<T> {
    /// White voltage noise density, V/√Hz.
    pub white_density: T,
    /// Frequency below which 1/f noise dominates, Hz. Zero disables it.
    pub flicker_corner_hz: T,
    pub mains_hz: T,
    /// Mains amplitude at the skin, volts (peak).
    pub mains_amplitude: T,
    /// White current noise injected at the amplifier input node, A/√Hz.
    pub current_density: T,
}

impl<T: Scalar> Default for NoiseConfig<T> {
    fn default() -> Self {
        NoiseConfig {
            white_density: T::lit(0.9e-6),
            flicker_corner_hz: T::lit(1.0),
            mains_hz: T::lit(60.0),
            mains_amplitude: T::lit(5e-6),
            current_density: T::lit(1e-15),
        }
    }
}

impl<T: Scalar> NoiseConfig<T> {
    pub fn silent() -> Self {
        NoiseConfig {
            white_density: T::zero(),
            flicker_corner_hz: T::zero(),
            mains_hz: T::lit(60.0),
            mains_amplitude: T::zero(),
            current_density: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("noise_white_v_per_rthz", self.white_density),
            ("noise_flicker_corner_hz", self.flicker_corner_hz),
            ("mains_amplitude_v", self.mains_amplitude),
            ("noise_current_a_per_rthz", self.current_density),
        ];
        for (name, v) in fields {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::param(name, "must be finite and >= 0"));
            }
        }
        if !(self.mains_hz > T::zero()) || !self.mains_hz.is_finite() {
            return Err(Error::param("mains_hz", "must be > 0"));
        }
        Ok(())
    }

    /// One-sided voltage PSD at `f` Hz, V²/Hz.
    pub fn voltage_psd(&self, f: T) -> T {
        let w2 = self.white_density * self.white_density;
        w2 * (T::one() + self.flicker_corner_hz / f)
    }

    /// Variance of a record of `n` samples from [`voltage_noise`] plus mains:
    /// the white band up to Nyquist, the 1/f part summed over the discrete
    /// bins it is synthesized on, and `A²/2` for the tone.
    pub fn expected_variance(&self, n: usize, fs: T) -> T {
        let w2 = self.white_density * self.white_density;
        let white = w2 * fs / T::lit(2.0);
        let df = fs / T::from_count(n);
        let flicker = (1..=n / 2).fold(T::zero(), |acc, k| {
            acc + w2 * self.flicker_corner_hz / (df * T::from_count(k)) * df
        });
        white + flicker + self.mains_amplitude * self.mains_amplitude / T::lit(2.0)
    }
}

fn gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let v: f64 = StandardNormal.sample(rng);
    T::lit(v)
}

/// White samples with one-sided density `density` (unit/√Hz).
pub fn white_noise<T: Scalar, R: Rng + ?Sized>(density: T, n: usize, fs: T, rng: &mut R) -> Vec<T> {
    let sigma = density * (fs / T::lit(2.0)).sqrt();
    (0..n).map(|_| sigma * gaussian::<T, R>(rng)).collect()
}

/// 1/f noise with one-sided PSD `white² · corner / f`, synthesized by
/// shaping complex Gaussian bins and inverting the FFT. The DC bin is zero.
pub fn flicker_noise<T: Scalar, R: Rng + ?Sized>(
    white_density: T,
    corner_hz: T,
    n: usize,
    fs: T,
    rng: &mut R,
) -> Vec<T> {
    if n < 2 || corner_hz <= T::zero() || white_density <= T::zero() {
        return vec![T::zero(); n];
    }
    let df = fs / T::from_count(n);
    let nf = T::from_count(n);
    let w2 = white_density * white_density;
    let mut spec = vec![Complex::new(T::zero(), T::zero()); n];
    let half = T::lit(0.5);
    for k in 1..=n / 2 {
        let f = df * T::from_count(k);
        let power = w2 * corner_hz / f * df;
        if 2 * k == n {
            // Nyquist bin is real.
            spec[k] = Complex::new(nf * power.sqrt() * gaussian::<T, R>(rng), T::zero());
        } else {
            // Power splits over the bin and its mirror, re and im each half.
            let amp = nf * (power * half * half).sqrt();
            let re = gaussian::<T, R>(rng);
            let im = gaussian::<T, R>(rng);
            spec[k] = Complex::new(amp * re, amp * im);
            spec[n - k] = spec[k].conj();
        }
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    spec.into_iter().map(|c| c.re / nf).collect()
}

/// White plus 1/f voltage noise.
pub fn voltage_noise<T: Scalar, R: Rng + ?Sized>(
    cfg: &NoiseConfig<T>,
    n: usize,
    fs: T,
    rng: &mut R,
) -> Vec<T> {
    let white = white_noise(cfg.white_density, n, fs, rng);
    let flicker = flicker_noise(cfg.white_density, cfg.flicker_corner_hz, n, fs, rng);
    white.into_iter().zip(flicker).map(|(a, b)| a + b).collect()
}

/// Mains sinusoid, zero phase at t = 0.
pub fn mains_interference<T: Scalar>(cfg: &NoiseConfig<T>, n: usize, fs: T) -> Vec<T> {
    let w = T::TAU() * cfg.mains_hz / fs;
    (0..n)
        .map(|i| cfg.mains_amplitude * (w * T::from_count(i)).sin())
        .collect()
}
