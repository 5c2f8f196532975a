//! Maternal ECG cancellation by scaled template subtraction.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signals::Waveform;

use super::AnnotationSet;

/// Half-width of the maternal template, seconds.
pub const TEMPLATE_HALF_WINDOW_S: f64 = 0.3;
/// Fewest complete beats from which a template is built.
pub const MIN_TEMPLATE_BEATS: usize = 3;

/// Average of the complete ±300 ms windows around the maternal events,
/// indexed from `-half` to `+half` samples.
pub fn maternal_template<T: Scalar>(w: &Waveform<T>, m: &AnnotationSet) -> Result<Vec<f64>> {
    let fs = w.sample_rate().as_f64();
    let half = (TEMPLATE_HALF_WINDOW_S * fs).round() as usize;
    let x = w.samples();
    let mut acc = vec![0.0; 2 * half + 1];
    let mut count = 0;
    for &t in m.times() {
        let c = (t * fs).round() as usize;
        if c < half || c + half >= x.len() {
            continue;
        }
        for (a, v) in acc.iter_mut().zip(&x[c - half..=c + half]) {
            *a += v.as_f64();
        }
        count += 1;
    }
    if count < MIN_TEMPLATE_BEATS {
        return Err(Error::TemplateQuality(format!(
            "{count} complete maternal beats, at least {MIN_TEMPLATE_BEATS} needed"
        )));
    }
    acc.iter_mut().for_each(|a| *a /= count as f64);
    Ok(acc)
}

const HUBER_K: f64 = 1.345;
const FIT_ITERATIONS: usize = 4;

fn weighted_fit(x: &[f64], t: &[f64], s: &[f64], w: &[f64]) -> Option<(f64, f64)> {
    let (mut tt, mut ts, mut ss, mut xt, mut xs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for j in 0..x.len() {
        let wj = w[j];
        tt += wj * t[j] * t[j];
        ts += wj * t[j] * s[j];
        ss += wj * s[j] * s[j];
        xt += wj * x[j] * t[j];
        xs += wj * x[j] * s[j];
    }
    let det = tt * ss - ts * ts;
    if det > 1e-12 * tt * ss && det > 0.0 {
        Some(((xt * ss - xs * ts) / det, (xs * tt - xt * ts) / det))
    } else if tt > 0.0 {
        Some((xt / tt, 0.0))
    } else {
        None
    }
}

/// Huber-weighted least squares of `x ≈ a·t + b·s`, so that a fetal complex
/// riding on the maternal beat barely moves the fit.
fn robust_fit(x: &[f64], t: &[f64], s: &[f64]) -> Option<(f64, f64)> {
    let mut w = vec![1.0; x.len()];
    let mut fit = weighted_fit(x, t, s, &w)?;
    for _ in 1..FIT_ITERATIONS {
        let r: Vec<f64> = (0..x.len())
            .map(|j| x[j] - fit.0 * t[j] - fit.1 * s[j])
            .collect();
        let mut abs: Vec<f64> = r.iter().map(|v| v.abs()).collect();
        let mid = abs.len() / 2;
        let mad = *abs.select_nth_unstable_by(mid, f64::total_cmp).1;
        let scale = 1.4826 * mad;
        if scale <= 0.0 {
            break;
        }
        for (wj, rj) in w.iter_mut().zip(&r) {
            let u = rj.abs() / (HUBER_K * scale);
            *wj = if u <= 1.0 { 1.0 } else { 1.0 / u };
        }
        fit = weighted_fit(x, t, s, &w)?;
    }
    Some(fit)
}

/// Subtracts the maternal template at every event in `m`. Each beat is fitted
/// by least squares with the template and its time derivative, which absorbs
/// the sub-sample misalignment left by sample-rounded event times. The fit
/// is Huber-weighted. Windows
/// cut by the record edges use the matching part of the template.
pub fn cancel_maternal<T: Scalar>(w: &Waveform<T>, m: &AnnotationSet) -> Result<Waveform<T>> {
    let template = maternal_template(w, m)?;
    let len = template.len();
    let slope: Vec<f64> = (0..len)
        .map(|i| {
            let a = template[i.saturating_sub(1)];
            let b = template[(i + 1).min(len - 1)];
            (b - a) / 2.0
        })
        .collect();
    let fs = w.sample_rate().as_f64();
    let half = (len / 2) as isize;
    let x: Vec<f64> = w.samples().iter().map(|v| v.as_f64()).collect();
    let n = x.len() as isize;
    let mut out = x.clone();
    for &t in m.times() {
        let c = (t * fs).round() as isize;
        let lo = (c - half).max(0);
        let hi = (c + half).min(n - 1);
        if lo > hi {
            continue;
        }
        let k = |i: isize| (i - c + half) as usize;
        let idx: Vec<usize> = (lo..=hi).map(|i| i as usize).collect();
        let tv: Vec<f64> = (lo..=hi).map(|i| template[k(i)]).collect();
        let sv: Vec<f64> = (lo..=hi).map(|i| slope[k(i)]).collect();
        let xv: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let Some((a, b)) = robust_fit(&xv, &tv, &sv) else {
            continue;
        };
        for (j, &i) in idx.iter().enumerate() {
            out[i] -= a * tv[j] + b * sv[j];
        }
    }
    w.with_samples(out.into_iter().map(T::lit).collect())
        .map(|r| r.with_label("residual"))
}
