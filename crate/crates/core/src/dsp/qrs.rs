//! QRS detection: wavelet-detail energy envelope, adaptive threshold and
//! refractory non-maximum suppression.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signals::Waveform;

use super::wavelet::{stationary_details, Wavelet};
use super::AnnotationSet;

/// Shortest record the detectors accept, seconds.
pub const MIN_RECORD_S: f64 = 2.0;

/// Tuning of [`detect_qrs`]. Times are in seconds, frequencies in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QrsDetectorConfig {
    /// Wavelet detail levels whose nominal band overlaps this range feed the
    /// envelope.
    pub band_hz: (f64, f64),
    /// Moving-average length applied to the squared detail signal.
    pub envelope_s: f64,
    pub refractory_s: f64,
    /// Longest expected RR interval; sets the window of the level estimate.
    pub max_rr_s: f64,
    /// Half-width of the search for the peak of |x| around each detection.
    pub refine_s: f64,
    /// Multiple of the running median of the envelope.
    pub threshold_factor: f64,
    pub median_window_s: f64,
    /// Fraction of the typical per-beat envelope maximum below which no
    /// detection is accepted.
    pub gate_fraction: f64,
}

impl QrsDetectorConfig {
    pub fn maternal() -> Self {
        QrsDetectorConfig {
            band_hz: (12.0, 50.0),
            envelope_s: 0.08,
            refractory_s: 0.25,
            max_rr_s: 1.5,
            refine_s: 0.05,
            threshold_factor: 2.5,
            median_window_s: 2.0,
            gate_fraction: 0.2,
        }
    }

    pub fn fetal() -> Self {
        QrsDetectorConfig {
            band_hz: (35.0, 100.0),
            envelope_s: 0.04,
            refractory_s: 0.2,
            max_rr_s: 0.6,
            refine_s: 0.025,
            threshold_factor: 2.5,
            median_window_s: 2.0,
            gate_fraction: 0.2,
        }
    }
}

pub fn detect_maternal_qrs<T: Scalar>(w: &Waveform<T>) -> Result<AnnotationSet> {
    detect_qrs(w, &QrsDetectorConfig::maternal())
}

pub fn detect_fetal_qrs<T: Scalar>(residual: &Waveform<T>) -> Result<AnnotationSet> {
    detect_qrs(residual, &QrsDetectorConfig::fetal())
}

/// Decomposition depth: deepest level whose band still lies above ~10 Hz.
fn decomposition_levels(fs: f64, n: usize) -> usize {
    let by_rate = (fs / 20.0).log2().floor().max(1.0) as usize;
    let by_len = (usize::BITS - 1 - n.leading_zeros()) as usize;
    by_rate.min(by_len).max(1)
}

fn centered_moving_average(x: &[f64], width: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &v in x {
        prefix.push(prefix.last().copied().unwrap_or(0.0) + v);
    }
    let half = width / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mid = v.len() / 2;
    *v.select_nth_unstable_by(mid, f64::total_cmp).1
}

/// Running median evaluated every `stride` samples and held in between.
fn running_median(x: &[f64], window: usize, stride: usize) -> Vec<f64> {
    let n = x.len();
    let half = window / 2;
    let mut out = vec![0.0; n];
    let mut buf = Vec::with_capacity(window + 1);
    let mut start = 0;
    while start < n {
        let c = (start + stride / 2).min(n - 1);
        buf.clear();
        buf.extend_from_slice(&x[c.saturating_sub(half)..(c + half + 1).min(n)]);
        let m = median(&mut buf);
        let end = (start + stride).min(n);
        out[start..end].iter_mut().for_each(|v| *v = m);
        start = end;
    }
    out
}

/// Generic detector behind [`detect_maternal_qrs`] and [`detect_fetal_qrs`].
pub fn detect_qrs<T: Scalar>(w: &Waveform<T>, cfg: &QrsDetectorConfig) -> Result<AnnotationSet> {
    let fs = w.sample_rate().as_f64();
    if w.duration() < MIN_RECORD_S {
        return Err(Error::InsufficientData(format!(
            "record of {:.3} s is shorter than {MIN_RECORD_S} s",
            w.duration()
        )));
    }
    let x: Vec<f64> = w.samples().iter().map(|v| v.as_f64()).collect();
    let n = x.len();
    let levels = decomposition_levels(fs, n);
    let details = stationary_details(&x, levels, Wavelet::Db4)?;
    let mut detail = vec![0.0; n];
    let mut used = 0;
    for (j, d) in details.iter().enumerate() {
        let hi = fs / 2f64.powi(j as i32 + 1);
        if hi / 2.0 < cfg.band_hz.1 && hi > cfg.band_hz.0 {
            detail.iter_mut().zip(d).for_each(|(a, b)| *a += b);
            used += 1;
        }
    }
    if used == 0 {
        detail.copy_from_slice(&details[0]);
    }

    let samples = |s: f64| ((s * fs).round() as usize).max(1);
    let squared: Vec<f64> = detail.iter().map(|v| v * v).collect();
    let env = centered_moving_average(&squared, samples(cfg.envelope_s));

    let floor = running_median(&env, samples(cfg.median_window_s), samples(0.25));
    let block = samples(cfg.max_rr_s);
    let mut maxima: Vec<f64> = env
        .chunks(block)
        .map(|c| c.iter().copied().fold(0.0, f64::max))
        .collect();
    let gate = cfg.gate_fraction * median(&mut maxima);

    let mut candidates: Vec<usize> = (1..n.saturating_sub(1))
        .filter(|&i| {
            let thr = (cfg.threshold_factor * floor[i]).max(gate);
            env[i] > thr && env[i] >= env[i - 1] && env[i] > env[i + 1]
        })
        .collect();
    candidates.sort_by(|&a, &b| env[b].total_cmp(&env[a]).then(a.cmp(&b)));

    let refractory = samples(cfg.refractory_s);
    let mut kept: Vec<usize> = Vec::new();
    for c in candidates {
        if kept.iter().all(|&k| k.abs_diff(c) >= refractory) {
            kept.push(c);
        }
    }

    let reach = samples(cfg.refine_s);
    let mut refined: Vec<usize> = kept
        .into_iter()
        .map(|c| {
            let lo = c.saturating_sub(reach);
            let hi = (c + reach).min(n - 1);
            (lo..=hi)
                .max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()).then(b.cmp(&a)))
                .unwrap_or(c)
        })
        .collect();
    refined.sort_unstable();
    refined.dedup();

    let mut times: Vec<usize> = Vec::with_capacity(refined.len());
    for i in refined {
        match times.last() {
            Some(&p) if i - p < refractory => {
                if x[i].abs() > x[p].abs() {
                    *times.last_mut().expect("non-empty") = i;
                }
            }
            _ => times.push(i),
        }
    }
    AnnotationSet::new(times.into_iter().map(|i| i as f64 / fs).collect())
}
