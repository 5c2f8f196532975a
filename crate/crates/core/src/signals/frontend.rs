//! Applying the analog front end to sampled signals.

use crate::circuit::{
    amplifier_transfer_function, build_transfer_function, input_node_impedance, CircuitParams,
    RationalTransferFunction, MIDBAND_HZ,
};
use crate::dsp::iir::{bilinear_zpk, Sos};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::adc::{adc_decode, adc_quantize, AdcConfig};
use super::noise::{mains_interference, voltage_noise, white_noise, NoiseConfig};
use super::synth::{noise_rng, synth_components, SynthesisConfig};
use super::waveform::Waveform;
use crate::dsp::AnnotationSet;

/// Bilinear discretization of `tf` at `fs`, prewarped at the 10 Hz mid-band
/// reference. Rejects unstable models and models with poles above fs/4.
pub fn discretize<T: Scalar>(tf: &RationalTransferFunction<T>, fs: T) -> Result<Sos<T>> {
    let poles = tf.poles();
    if poles.iter().any(|p| p.re >= T::zero()) {
        return Err(Error::Unstable {
            poles: poles
                .iter()
                .map(|p| (p.re.as_f64(), p.im.as_f64()))
                .collect(),
        });
    }
    let fastest = poles
        .iter()
        .map(|p| p.norm() / T::TAU())
        .fold(T::zero(), T::max);
    if fastest > fs / T::lit(4.0) * T::lit(1.0 + 1e-9) {
        return Err(Error::param(
            "sample_rate",
            format!(
                "must be at least 4x the fastest pole ({:.3} Hz)",
                fastest.as_f64()
            ),
        ));
    }
    if poles.is_empty() {
        return Ok(Sos::identity(tf.zpk_gain()));
    }
    bilinear_zpk(&tf.zeros(), &poles, tf.zpk_gain(), fs, T::lit(MIDBAND_HZ))
}

/// Filters `w` through the discretized transfer function, starting from rest.
pub fn apply_frontend<T: Scalar>(
    w: &Waveform<T>,
    tf: &RationalTransferFunction<T>,
) -> Result<Waveform<T>> {
    let sos = discretize(tf, w.sample_rate())?;
    w.with_samples(sos.filter(w.samples()))
}

/// Front-end output for a skin potential `source` with the noise sources
/// placed where they physically enter the circuit: mains at the skin,
/// voltage noise at the amplifier input and current noise into the input
/// node impedance. The coupling capacitance therefore changes the
/// signal-to-noise ratio, not just the gain.
pub fn acquire<T: Scalar>(
    source: &Waveform<T>,
    params: &CircuitParams<T>,
    noise: &NoiseConfig<T>,
    seed: u64,
) -> Result<Waveform<T>> {
    noise.validate()?;
    let fs = source.sample_rate();
    let n = source.len();
    let mains = mains_interference(noise, n, fs);
    let skin: Vec<T> = source
        .samples()
        .iter()
        .zip(&mains)
        .map(|(&s, &m)| s + m)
        .collect();
    let h = build_transfer_function(params)?;
    let signal = discretize(&h, fs)?.filter(&skin);

    let mut rng = noise_rng(seed);
    let e_n = voltage_noise(noise, n, fs, &mut rng);
    let i_n = white_noise(noise.current_density, n, fs, &mut rng);
    let v_i = discretize(&input_node_impedance(params)?, fs)?.filter(&i_n);
    let node: Vec<T> = e_n.iter().zip(&v_i).map(|(&a, &b)| a + b).collect();
    let amp_noise = discretize(&amplifier_transfer_function(params)?, fs)?.filter(&node);

    let out = signal
        .into_iter()
        .zip(amp_noise)
        .map(|(a, b)| a + b)
        .collect();
    Waveform::new(fs, out, "frontend")
}

/// Simulated recording of a mixed maternal/fetal ECG through the front end
/// and converter.
#[derive(Debug, Clone)]
pub struct Recording<T> {
    /// Input-referred volts decoded from the converter codes.
    pub signal: Waveform<T>,
    pub codes: Vec<i32>,
    pub maternal_peaks: AnnotationSet,
    pub fetal_peaks: AnnotationSet,
}

/// Rate multiple at which the analog chain is simulated before the
/// converter decimates to its output rate.
pub const ANALOG_OVERSAMPLE: usize = 4;

/// Zero-delay decimation by [`ANALOG_OVERSAMPLE`] with a symmetric
/// `[1, 2, 2, 2, 1] / 8` kernel centred on each kept sample, a crude stand-in
/// for the converter's own decimation filter.
fn decimate<T: Scalar>(x: &[T], n_out: usize) -> Vec<T> {
    const KERNEL: [f64; 5] = [0.125, 0.25, 0.25, 0.25, 0.125];
    let last = x.len().saturating_sub(1) as isize;
    (0..n_out)
        .map(|i| {
            let c = (i * ANALOG_OVERSAMPLE) as isize;
            KERNEL.iter().enumerate().fold(T::zero(), |acc, (k, &w)| {
                let j = (c + k as isize - 2).clamp(0, last) as usize;
                acc + T::lit(w) * x[j]
            })
        })
        .collect()
}

/// Synthesizes clean maternal and fetal traces, acquires them through the
/// front end with `cfg.noise` at [`ANALOG_OVERSAMPLE`] times the converter
/// rate, decimates and digitizes. The front-end output is referred back to
/// the electrode by the converter's nominal AFE gain.
pub fn simulate_recording<T: Scalar>(
    cfg: &SynthesisConfig<T>,
    params: &CircuitParams<T>,
    adc: &AdcConfig<T>,
    seed: u64,
) -> Result<Recording<T>> {
    adc.validate()?;
    cfg.validate()?;
    if adc.sample_rate != cfg.sample_rate {
        return Err(Error::param(
            "sample_rate",
            "synthesis and converter sample rates differ",
        ));
    }
    let n_out = cfg.sample_count();
    let mut analog = *cfg;
    analog.sample_rate = cfg.sample_rate * T::from_count(ANALOG_OVERSAMPLE);
    let c = synth_components(&analog, seed)?;
    let source = c.maternal.add_scaled(&c.fetal, T::one())?;
    let out = acquire(&source, params, &cfg.noise, seed)?;
    let electrode: Vec<T> = decimate(out.samples(), n_out)
        .into_iter()
        .map(|v| v / adc.afe_gain)
        .collect();
    let codes = adc_quantize(&Waveform::new(cfg.sample_rate, electrode, "")?, adc)?;
    let signal = adc_decode(&codes, adc)?.with_label("fmecg");
    let last = signal.time_of(n_out.saturating_sub(1));
    let keep = |a: &AnnotationSet| {
        AnnotationSet::new(a.times().iter().copied().filter(|&t| t <= last).collect())
    };
    Ok(Recording {
        signal,
        codes,
        maternal_peaks: keep(&c.maternal_peaks)?,
        fetal_peaks: keep(&c.fetal_peaks)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(f: f64, fs: f64, n: usize) -> Waveform<f64> {
        let s = (0..n)
            .map(|i| (std::f64::consts::TAU * f * i as f64 / fs).sin())
            .collect();
        Waveform::new(fs, s, "sine").unwrap()
    }

    /// Least-squares amplitude of a tone at `f` over `x`.
    fn tone_amplitude(x: &[f64], f: f64, fs: f64, start: usize) -> f64 {
        let (mut ss, mut sc, mut cc, mut s2, mut c2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (i, &v) in x.iter().enumerate().skip(start) {
            let ph = std::f64::consts::TAU * f * i as f64 / fs;
            let (s, c) = ph.sin_cos();
            ss += v * s;
            cc += v * c;
            sc += s * c;
            s2 += s * s;
            c2 += c * c;
        }
        let det = s2 * c2 - sc * sc;
        let a = (ss * c2 - cc * sc) / det;
        let b = (cc * s2 - ss * sc) / det;
        (a * a + b * b).sqrt()
    }

    #[test]
    fn constant_gain_is_exact() {
        let w = sine(7.0, 500.0, 1000);
        let out = apply_frontend(&w, &RationalTransferFunction::constant(11.0)).unwrap();
        for (a, b) in w.samples().iter().zip(out.samples()) {
            assert_eq!(*b, 11.0 * a);
        }
    }

    #[test]
    fn ten_hertz_sine_steady_state_ratio() {
        let p = CircuitParams::<f64>::default();
        let tf = build_transfer_function(&p).unwrap();
        let fs = 1000.0;
        let w = sine(10.0, fs, 30_000);
        let out = apply_frontend(&w, &tf).unwrap();
        let amp = tone_amplitude(out.samples(), 10.0, fs, (5.0 * fs) as usize);
        let want = tf.magnitude_hz(10.0);
        assert!((amp - want).abs() / want < 0.02, "{amp} vs {want}");
    }

    #[test]
    fn dc_offset_settles_to_zero() {
        // The bias node (Rbias·Cs ≈ 500 s) is the slowest pole.
        let tf = build_transfer_function(&CircuitParams::<f64>::default()).unwrap();
        let w = Waveform::new(1000.0, vec![1e-3; 2000 * 1000], "dc").unwrap();
        let out = apply_frontend(&w, &tf).unwrap();
        let tail = &out.samples()[1900 * 1000..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        assert!(mean.abs() < 0.01 * 11.0 * 1e-3, "{mean}");
    }

    #[test]
    fn rejects_unstable_and_undersampled() {
        let unstable = RationalTransferFunction::new(vec![1.0], vec![-1.0, 1.0]).unwrap();
        let w = sine(1.0, 500.0, 100);
        match apply_frontend(&w, &unstable) {
            Err(Error::Unstable { poles }) => assert_eq!(poles, vec![(1.0, 0.0)]),
            other => panic!("{other:?}"),
        }
        let fast = RationalTransferFunction::new(
            vec![1.0],
            vec![1.0, 1.0 / (std::f64::consts::TAU * 200.0)],
        )
        .unwrap();
        assert!(apply_frontend(&w, &fast).is_err());
    }

    #[test]
    fn decimation_keeps_constants_and_length() {
        let x = vec![3.0f64; 41];
        let y = decimate(&x, 10);
        assert_eq!(y.len(), 10);
        assert!(y.iter().all(|v| (v - 3.0).abs() < 1e-15));
    }

    #[test]
    fn recording_is_deterministic_and_sized() {
        let cfg = SynthesisConfig::<f64> {
            duration_s: 5.0,
            ..Default::default()
        };
        let p = CircuitParams::default();
        let adc = AdcConfig::default();
        let a = simulate_recording(&cfg, &p, &adc, 4).unwrap();
        let b = simulate_recording(&cfg, &p, &adc, 4).unwrap();
        assert_eq!(a.codes, b.codes);
        assert_eq!(a.signal.len(), 2500);
        assert!(!a.fetal_peaks.is_empty());
        assert!(a.maternal_peaks.times().iter().all(|&t| t <= 4.998));
    }

    #[test]
    fn output_length_preserved() {
        let tf = build_transfer_function(&CircuitParams::<f64>::default()).unwrap();
        let w = sine(3.0, 1000.0, 777);
        assert_eq!(apply_frontend(&w, &tf).unwrap().len(), 777);
    }
}
