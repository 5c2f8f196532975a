//! Gaussian-sum PQRST synthesis of maternal, fetal and mixed abdominal ECG.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dsp::AnnotationSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::noise::{mains_interference, voltage_noise, NoiseConfig};
use super::waveform::Waveform;

/// One Gaussian bump of the beat template, timed relative to the R peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub offset_s: f64,
    pub width_s: f64,
    pub amplitude: f64,
}

/// P, Q, R, S and T waves. Amplitudes are relative; the template is
/// normalized so its value at the R instant is exactly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeatShape {
    pub waves: [Wave; 5],
}

impl BeatShape {
    pub fn adult() -> Self {
        let w = |offset_s, width_s, amplitude| Wave {
            offset_s,
            width_s,
            amplitude,
        };
        BeatShape {
            waves: [
                w(-0.160, 0.020, 0.15),
                w(-0.030, 0.008, -0.12),
                w(0.000, 0.010, 1.00),
                w(0.030, 0.010, -0.25),
                w(0.220, 0.030, 0.30),
            ],
        }
    }

    /// Adult morphology compressed in time; fetal complexes are roughly half
    /// as wide.
    pub fn fetal() -> Self {
        Self::adult().time_scaled(0.5)
    }

    pub fn time_scaled(mut self, k: f64) -> Self {
        for w in self.waves.iter_mut() {
            w.offset_s *= k;
            w.width_s *= k;
        }
        self
    }

    fn raw(&self, t: f64) -> f64 {
        self.waves
            .iter()
            .map(|w| {
                let z = (t - w.offset_s) / w.width_s;
                w.amplitude * (-0.5 * z * z).exp()
            })
            .sum()
    }

    /// Template value at `t` seconds from the R peak, scaled so `value(0) = 1`.
    pub fn value(&self, t: f64) -> f64 {
        self.raw(t) / self.raw(0.0)
    }

    /// Half-width of the interval outside which the template is negligible.
    pub fn support(&self) -> f64 {
        self.waves
            .iter()
            .map(|w| w.offset_s.abs() + 6.0 * w.width_s)
            .fold(0.0, f64::max)
    }
}

/// Rate, R amplitude and beat-to-beat variability of one heart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeartConfig<T> {
    pub rate_bpm: T,
    /// R-wave amplitude, volts.
    pub r_amplitude: T,
    /// Standard deviation of the RR interval as a fraction of the mean.
    pub hrv_jitter: T,
}

/// Fetal heart plus the single multiplicative path attenuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FetalConfig<T> {
    pub heart: HeartConfig<T>,
    pub attenuation: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisConfig<T> {
    pub maternal: HeartConfig<T>,
    pub fetal: FetalConfig<T>,
    pub noise: NoiseConfig<T>,
    pub duration_s: T,
    pub sample_rate: T,
}

/// Ratio of fetal to maternal R amplitude used by the defaults.
pub const FETAL_TO_MATERNAL_RATIO: f64 = 0.25;

impl<T: Scalar> Default for SynthesisConfig<T> {
    fn default() -> Self {
        let maternal_r = 0.85e-3;
        SynthesisConfig {
            maternal: HeartConfig {
                rate_bpm: T::lit(80.0),
                r_amplitude: T::lit(maternal_r),
                hrv_jitter: T::lit(0.02),
            },
            fetal: FetalConfig {
                heart: HeartConfig {
                    rate_bpm: T::lit(140.0),
                    r_amplitude: T::lit(FETAL_TO_MATERNAL_RATIO * maternal_r),
                    hrv_jitter: T::lit(0.02),
                },
                attenuation: T::one(),
            },
            noise: NoiseConfig::default(),
            duration_s: T::lit(60.0),
            sample_rate: T::lit(500.0),
        }
    }
}

fn check_heart<T: Scalar>(h: &HeartConfig<T>, who: &str, rate_range: (f64, f64)) -> Result<()> {
    let rate = h.rate_bpm.as_f64();
    if !(rate >= rate_range.0 && rate <= rate_range.1) {
        return Err(Error::param(
            format!("{who}_rate_bpm"),
            format!("must lie in [{}, {}]", rate_range.0, rate_range.1),
        ));
    }
    if !(h.r_amplitude >= T::zero()) || !h.r_amplitude.is_finite() {
        return Err(Error::param(format!("{who}_r_amplitude_v"), "must be >= 0"));
    }
    if !(h.hrv_jitter >= T::zero() && h.hrv_jitter < T::lit(0.5)) {
        return Err(Error::param(
            format!("{who}_hrv_jitter"),
            "must lie in [0, 0.5)",
        ));
    }
    Ok(())
}

impl<T: Scalar> SynthesisConfig<T> {
    pub fn validate(&self) -> Result<()> {
        check_heart(&self.maternal, "maternal", (40.0, 200.0))?;
        check_heart(&self.fetal.heart, "fetal", (100.0, 200.0))?;
        if !(self.fetal.attenuation >= T::zero()) || !self.fetal.attenuation.is_finite() {
            return Err(Error::param("fetal_attenuation", "must be >= 0"));
        }
        self.noise.validate()?;
        if !(self.duration_s > T::zero()) || !self.duration_s.is_finite() {
            return Err(Error::param("duration_s", "must be > 0"));
        }
        if !(self.sample_rate > T::zero()) || !self.sample_rate.is_finite() {
            return Err(Error::param("sample_rate_hz", "must be > 0"));
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        (self.duration_s.as_f64() * self.sample_rate.as_f64()).round() as usize
    }

    /// Same config with every noise source switched off.
    pub fn noiseless(mut self) -> Self {
        self.noise = NoiseConfig::silent();
        self
    }
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const STREAM_MATERNAL: u64 = 0;
const STREAM_FETAL: u64 = 1;
const STREAM_NOISE: u64 = 2;

/// R-peak times: the first beat sits half a nominal interval into the
/// record, later intervals are the nominal interval perturbed by zero-mean
/// Gaussian jitter. Also returns the first beat past the end so its leading
/// waves can be rendered.
fn beat_times(rate_bpm: f64, jitter: f64, last_time: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let rr = 60.0 / rate_bpm;
    let mut times = Vec::new();
    let mut t = 0.5 * rr;
    loop {
        times.push(t);
        if t > last_time {
            break;
        }
        let xi: f64 = StandardNormal.sample(rng);
        let factor = (1.0 + jitter * xi).clamp(0.5, 1.5);
        t += rr * factor;
    }
    times
}

fn render<T: Scalar>(shape: &BeatShape, beats: &[f64], amplitude: f64, fs: f64, out: &mut [T]) {
    let support = shape.support();
    let n = out.len();
    for &tb in beats {
        let lo = ((tb - support) * fs).floor().max(0.0) as usize;
        let hi = (((tb + support) * fs).ceil() as usize).min(n.saturating_sub(1));
        if lo > hi || n == 0 {
            continue;
        }
        for (i, v) in out.iter_mut().enumerate().take(hi + 1).skip(lo) {
            let t = i as f64 / fs;
            *v += T::lit(amplitude * shape.value(t - tb));
        }
    }
}

fn synth_heart<T: Scalar>(
    shape: &BeatShape,
    heart: &HeartConfig<T>,
    amplitude: f64,
    n: usize,
    fs: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<T>, AnnotationSet) {
    let last_time = n.saturating_sub(1) as f64 / fs;
    let beats = beat_times(
        heart.rate_bpm.as_f64(),
        heart.hrv_jitter.as_f64(),
        last_time,
        rng,
    );
    let mut samples = vec![T::zero(); n];
    render(shape, &beats, amplitude, fs, &mut samples);
    let inside: Vec<f64> = beats.into_iter().filter(|&t| t <= last_time).collect();
    if inside.is_empty() {
        log::warn!("record shorter than one beat: no annotations produced");
    }
    (
        samples,
        AnnotationSet::new(inside).expect("beat times increase"),
    )
}

/// Single-source ECG with exact R-peak annotations.
pub fn synth_ecg<T: Scalar>(
    rate_bpm: T,
    r_amplitude: T,
    jitter: T,
    duration_s: T,
    fs: T,
    seed: u64,
) -> Result<(Waveform<T>, AnnotationSet)> {
    synth_ecg_shaped(
        &BeatShape::adult(),
        rate_bpm,
        r_amplitude,
        jitter,
        duration_s,
        fs,
        seed,
    )
}

pub fn synth_ecg_shaped<T: Scalar>(
    shape: &BeatShape,
    rate_bpm: T,
    r_amplitude: T,
    jitter: T,
    duration_s: T,
    fs: T,
    seed: u64,
) -> Result<(Waveform<T>, AnnotationSet)> {
    let heart = HeartConfig {
        rate_bpm,
        r_amplitude,
        hrv_jitter: jitter,
    };
    check_heart(&heart, "heart", (40.0, 200.0))?;
    if !(duration_s > T::zero()) || !(fs > T::zero()) {
        return Err(Error::param(
            "duration_s",
            "duration and sample rate must be > 0",
        ));
    }
    let n = (duration_s.as_f64() * fs.as_f64()).round() as usize;
    let mut rng = rng_for(seed, STREAM_MATERNAL);
    let (samples, ann) = synth_heart(
        shape,
        &heart,
        r_amplitude.as_f64(),
        n,
        fs.as_f64(),
        &mut rng,
    );
    Ok((Waveform::new(fs, samples, "ecg")?, ann))
}

/// Clean maternal and fetal components rendered separately.
#[derive(Debug, Clone)]
pub struct FetalMaternalComponents<T> {
    pub maternal: Waveform<T>,
    /// Fetal trace, attenuation already applied.
    pub fetal: Waveform<T>,
    pub maternal_peaks: AnnotationSet,
    pub fetal_peaks: AnnotationSet,
}

pub fn synth_components<T: Scalar>(
    cfg: &SynthesisConfig<T>,
    seed: u64,
) -> Result<FetalMaternalComponents<T>> {
    cfg.validate()?;
    let n = cfg.sample_count();
    let fs = cfg.sample_rate.as_f64();
    let (m, m_ann) = synth_heart(
        &BeatShape::adult(),
        &cfg.maternal,
        cfg.maternal.r_amplitude.as_f64(),
        n,
        fs,
        &mut rng_for(seed, STREAM_MATERNAL),
    );
    let (f, f_ann) = synth_heart(
        &BeatShape::fetal(),
        &cfg.fetal.heart,
        (cfg.fetal.heart.r_amplitude * cfg.fetal.attenuation).as_f64(),
        n,
        fs,
        &mut rng_for(seed, STREAM_FETAL),
    );
    Ok(FetalMaternalComponents {
        maternal: Waveform::new(cfg.sample_rate, m, "maternal")?,
        fetal: Waveform::new(cfg.sample_rate, f, "fetal")?,
        maternal_peaks: m_ann,
        fetal_peaks: f_ann,
    })
}

/// Mixed abdominal trace `maternal + attenuation·fetal + noise`, with the
/// noise model applied directly at the skin (the ideal-coupling limit).
pub fn synth_fmecg<T: Scalar>(
    cfg: &SynthesisConfig<T>,
    seed: u64,
) -> Result<(Waveform<T>, AnnotationSet, AnnotationSet)> {
    let c = synth_components(cfg, seed)?;
    let n = c.maternal.len();
    let mut rng = rng_for(seed, STREAM_NOISE);
    let noise = voltage_noise(&cfg.noise, n, cfg.sample_rate, &mut rng);
    let mains = mains_interference(&cfg.noise, n, cfg.sample_rate);
    let samples: Vec<T> = c
        .maternal
        .samples()
        .iter()
        .zip(c.fetal.samples())
        .zip(noise.iter().zip(&mains))
        .map(|((&m, &f), (&e, &h))| m + f + e + h)
        .collect();
    Ok((
        Waveform::new(cfg.sample_rate, samples, "fmecg")?,
        c.maternal_peaks,
        c.fetal_peaks,
    ))
}

pub(crate) fn noise_rng(seed: u64) -> ChaCha8Rng {
    rng_for(seed, STREAM_NOISE)
}
