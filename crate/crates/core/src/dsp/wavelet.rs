//! Periodized discrete wavelet transform with the Daubechies 4-vanishing-
//! moment basis.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signals::Waveform;

/// Orthonormal bases available to [`dwt`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Wavelet {
    /// Daubechies, 8 taps, 4 vanishing moments.
    #[default]
    Db4,
}

const DB4_LO: [f64; 8] = [
    0.230_377_813_308_855_23,
    0.714_846_570_552_541_5,
    0.630_880_767_929_590_4,
    -0.027_983_769_416_983_85,
    -0.187_034_811_718_881_14,
    0.030_841_381_835_986_965,
    0.032_883_011_666_982_945,
    -0.010_597_401_784_997_278,
];

impl Wavelet {
    pub fn name(&self) -> &'static str {
        match self {
            Wavelet::Db4 => "db4",
        }
    }

    fn filters<T: Scalar>(&self) -> (Vec<T>, Vec<T>) {
        let h: Vec<T> = DB4_LO.iter().map(|&v| T::lit(v)).collect();
        let l = h.len();
        let g = (0..l)
            .map(|k| {
                if k % 2 == 0 {
                    h[l - 1 - k]
                } else {
                    -h[l - 1 - k]
                }
            })
            .collect();
        (h, g)
    }
}

/// Coefficients of a multi-level decomposition. `details[0]` is the finest
/// level. `lengths[j]` is the signal length entering level `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid<T> {
    pub approx: Vec<T>,
    pub details: Vec<Vec<T>>,
    pub lengths: Vec<usize>,
    pub sample_rate: T,
    pub wavelet: Wavelet,
}

impl<T: Scalar> WaveletPyramid<T> {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Sum of squares over every coefficient.
    pub fn energy(&self) -> T {
        self.details
            .iter()
            .flatten()
            .chain(&self.approx)
            .fold(T::zero(), |a, &v| a + v * v)
    }

    /// Nominal band `[fs/2^(j+1), fs/2^j]` of detail level `j` (1-based).
    pub fn detail_band(&self, level: usize) -> (T, T) {
        let hi = self.sample_rate / T::lit(2f64.powi(level as i32));
        (hi / T::lit(2.0), hi)
    }

    /// Reconstruction from the chosen detail levels only (1-based).
    pub fn detail_signal(&self, levels: &[usize]) -> Result<Vec<T>> {
        let mut only = self.clone();
        only.approx.iter_mut().for_each(|v| *v = T::zero());
        for (j, d) in only.details.iter_mut().enumerate() {
            if !levels.contains(&(j + 1)) {
                d.iter_mut().for_each(|v| *v = T::zero());
            }
        }
        Ok(idwt(&only)?.into_samples())
    }
}

fn analyze<T: Scalar>(x: &[T], h: &[T], g: &[T]) -> (Vec<T>, Vec<T>) {
    let n = x.len();
    let half = n / 2;
    let mut a = vec![T::zero(); half];
    let mut d = vec![T::zero(); half];
    for i in 0..half {
        for k in 0..h.len() {
            let v = x[(2 * i + k) % n];
            a[i] += h[k] * v;
            d[i] += g[k] * v;
        }
    }
    (a, d)
}

fn synthesize<T: Scalar>(a: &[T], d: &[T], h: &[T], g: &[T]) -> Vec<T> {
    let n = 2 * a.len();
    let mut x = vec![T::zero(); n];
    for i in 0..a.len() {
        for k in 0..h.len() {
            x[(2 * i + k) % n] += h[k] * a[i] + g[k] * d[i];
        }
    }
    x
}

/// `levels`-deep decomposition. Odd lengths at any level are extended by
/// repeating the last sample; the original lengths are kept for trimming.
pub fn dwt<T: Scalar>(w: &Waveform<T>, levels: usize) -> Result<WaveletPyramid<T>> {
    dwt_with(w, levels, Wavelet::default())
}

pub fn dwt_with<T: Scalar>(
    w: &Waveform<T>,
    levels: usize,
    wavelet: Wavelet,
) -> Result<WaveletPyramid<T>> {
    if levels == 0 {
        return Err(Error::param("levels", "must be >= 1"));
    }
    if levels >= usize::BITS as usize || (1usize << levels) > w.len() {
        return Err(Error::param(
            "levels",
            "2^levels must not exceed the signal length",
        ));
    }
    let (h, g) = wavelet.filters::<T>();
    let mut approx = w.samples().to_vec();
    let mut details = Vec::with_capacity(levels);
    let mut lengths = Vec::with_capacity(levels);
    for _ in 0..levels {
        lengths.push(approx.len());
        if approx.len() % 2 == 1 {
            approx.push(*approx.last().expect("non-empty"));
        }
        let (a, d) = analyze(&approx, &h, &g);
        details.push(d);
        approx = a;
    }
    Ok(WaveletPyramid {
        approx,
        details,
        lengths,
        sample_rate: w.sample_rate(),
        wavelet,
    })
}

pub fn idwt<T: Scalar>(p: &WaveletPyramid<T>) -> Result<Waveform<T>> {
    let (h, g) = p.wavelet.filters::<T>();
    let mut x = p.approx.clone();
    for j in (0..p.details.len()).rev() {
        let d = &p.details[j];
        if d.len() != x.len() {
            return Err(Error::param(
                "pyramid",
                "detail and approximation lengths differ",
            ));
        }
        x = synthesize(&x, d, &h, &g);
        x.truncate(p.lengths[j]);
    }
    Waveform::new(p.sample_rate, x, "idwt")
}

/// Undecimated (à trous) detail signals for levels `1..=levels`, each the
/// same length as the input. Filters are dilated by `2^(j-1)` at level `j`,
/// centred, applied circularly and scaled by `1/√2` so every level keeps the
/// input's units. Unlike [`dwt`], the result commutes with time shifts.
pub fn stationary_details<T: Scalar>(
    x: &[T],
    levels: usize,
    wavelet: Wavelet,
) -> Result<Vec<Vec<T>>> {
    if levels == 0 {
        return Err(Error::param("levels", "must be >= 1"));
    }
    if levels >= usize::BITS as usize || (1usize << levels) > x.len() {
        return Err(Error::param(
            "levels",
            "2^levels must not exceed the signal length",
        ));
    }
    let (h, g) = wavelet.filters::<T>();
    let norm = T::one() / T::lit(2.0).sqrt();
    let n = x.len();
    let mut approx = x.to_vec();
    let mut out = Vec::with_capacity(levels);
    for j in 0..levels {
        let step = 1usize << j;
        let centre = (h.len() - 1) * step / 2;
        let mut a = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        for i in 0..n {
            let base = i + n * (centre / n + 1) - centre;
            for k in 0..h.len() {
                let v = approx[(base + k * step) % n];
                a[i] += h[k] * v;
                d[i] += g[k] * v;
            }
            a[i] *= norm;
            d[i] *= norm;
        }
        out.push(d);
        approx = a;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wf(x: Vec<f64>) -> Waveform<f64> {
        Waveform::new(500.0, x, "").unwrap()
    }

    #[test]
    fn filter_bank_is_orthonormal() {
        let (h, g) = Wavelet::Db4.filters::<f64>();
        let dot = |a: &[f64], b: &[f64], s: usize| -> f64 {
            (0..a.len() - s).map(|k| a[k + s] * b[k]).sum()
        };
        assert!((dot(&h, &h, 0) - 1.0).abs() < 1e-12);
        assert!((h.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-12);
        for s in [2, 4, 6] {
            assert!(dot(&h, &h, s).abs() < 1e-12);
        }
        assert!(dot(&h, &g, 0).abs() < 1e-12);
    }

    #[test]
    fn constant_has_no_detail() {
        let p = dwt(&wf(vec![3.0; 256]), 4).unwrap();
        for d in &p.details {
            assert!(d.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn impulse_energy_preserved() {
        let mut x = vec![0.0; 128];
        x[37] = 1.0;
        let p = dwt(&wf(x), 4).unwrap();
        assert!((p.energy() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn odd_length_round_trip() {
        let x: Vec<f64> = (0..1001)
            .map(|i| ((i * 7919) % 113) as f64 - 50.0)
            .collect();
        let p = dwt(&wf(x.clone()), 4).unwrap();
        let y = idwt(&p).unwrap();
        assert_eq!(y.len(), x.len());
        for (a, b) in x.iter().zip(y.samples()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn too_many_levels_rejected() {
        assert!(dwt(&wf(vec![0.0; 15]), 4).is_err());
        assert!(dwt(&wf(vec![0.0; 16]), 4).is_ok());
        assert!(dwt(&wf(vec![0.0; 16]), 0).is_err());
    }

    #[test]
    fn detail_signals_sum_to_input() {
        let x: Vec<f64> = (0..512)
            .map(|i| (i as f64 * 0.3).sin() + (i as f64 * 0.02).cos())
            .collect();
        let p = dwt(&wf(x.clone()), 3).unwrap();
        let mut only_a = p.clone();
        only_a
            .details
            .iter_mut()
            .for_each(|d| d.iter_mut().for_each(|v| *v = 0.0));
        let a = idwt(&only_a).unwrap();
        let d = p.detail_signal(&[1, 2, 3]).unwrap();
        for i in 0..x.len() {
            assert!((a.samples()[i] + d[i] - x[i]).abs() < 1e-10);
        }
        assert_eq!(p.detail_band(1), (125.0, 250.0));
    }

    #[test]
    fn stationary_details_commute_with_shift() {
        let x: Vec<f64> = (0..256)
            .map(|i| ((i * 37) % 101) as f64 / 50.0 - 1.0)
            .collect();
        let mut shifted = x.clone();
        shifted.rotate_right(5);
        let a = stationary_details(&x, 3, Wavelet::Db4).unwrap();
        let b = stationary_details(&shifted, 3, Wavelet::Db4).unwrap();
        for (da, db) in a.iter().zip(&b) {
            for i in 0..256 {
                assert!((da[i] - db[(i + 5) % 256]).abs() < 1e-12);
            }
        }
        let flat = stationary_details(&[2.0f64; 64], 4, Wavelet::Db4).unwrap();
        assert!(flat.iter().flatten().all(|v| v.abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn energy_and_reconstruction(x in prop::collection::vec(-1.0f64..1.0, 64..600), levels in 1usize..5) {
            let n = x.len() & !15;
            let x = x[..n].to_vec();
            let p = dwt(&wf(x.clone()), levels).unwrap();
            let e: f64 = x.iter().map(|v| v * v).sum();
            prop_assert!((p.energy() - e).abs() <= 1e-9 * e.max(1e-300));
            let y = idwt(&p).unwrap();
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
            for (a, b) in x.iter().zip(y.samples()) {
                prop_assert!((a - b).abs() <= 1e-8 * scale);
            }
        }
    }
}
