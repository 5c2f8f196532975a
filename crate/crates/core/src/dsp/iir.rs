//! Second-order-section IIR filters: bilinear discretization of analog
//! zero/pole/gain models, Butterworth design and zero-phase filtering.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One section `(b0 + b1·q + b2·q²) / (1 + a1·q + a2·q²)`, `q = z⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad<T> {
    pub b: [T; 3],
    pub a: [T; 3],
}

impl<T: Scalar> Biquad<T> {
    fn dc_gain(&self) -> T {
        (self.b[0] + self.b[1] + self.b[2]) / (self.a[0] + self.a[1] + self.a[2])
    }

    /// Transposed direct-form-II state after settling on a unit step.
    fn step_state(&self) -> [T; 2] {
        let g = self.dc_gain();
        let z2 = self.b[2] - self.a[2] * g;
        let z1 = self.b[1] - self.a[1] * g + z2;
        [z1, z2]
    }

    #[inline]
    fn tick(&self, x: T, z: &mut [T; 2]) -> T {
        let y = self.b[0] * x + z[0];
        z[0] = self.b[1] * x - self.a[1] * y + z[1];
        z[1] = self.b[2] * x - self.a[2] * y;
        y
    }
}

/// Cascade of biquads.
#[derive(Debug, Clone, PartialEq)]
pub struct Sos<T> {
    pub sections: Vec<Biquad<T>>,
}

impl<T: Scalar> Sos<T> {
    pub fn identity(gain: T) -> Self {
        Sos {
            sections: vec![Biquad {
                b: [gain, T::zero(), T::zero()],
                a: [T::one(), T::zero(), T::zero()],
            }],
        }
    }

    pub fn cascade(mut self, other: Sos<T>) -> Self {
        self.sections.extend(other.sections);
        self
    }

    /// Frequency response at `f` Hz for sample rate `fs`.
    pub fn response(&self, f: T, fs: T) -> Complex<T> {
        let q = Complex::from_polar(T::one(), -T::TAU() * f / fs);
        self.sections
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, s| {
                let num = Complex::new(s.b[0], T::zero()) + q * s.b[1] + q * q * s.b[2];
                let den = Complex::new(s.a[0], T::zero()) + q * s.a[1] + q * q * s.a[2];
                acc * num / den
            })
    }

    fn run(&self, x: &[T], mut state: Vec<[T; 2]>) -> Vec<T> {
        x.iter()
            .map(|&v| {
                self.sections
                    .iter()
                    .zip(state.iter_mut())
                    .fold(v, |acc, (s, z)| s.tick(acc, z))
            })
            .collect()
    }

    /// Causal filtering from rest.
    pub fn filter(&self, x: &[T]) -> Vec<T> {
        self.run(x, vec![[T::zero(); 2]; self.sections.len()])
    }

    /// Per-section states for a steady input of value `x0`.
    fn steady_state(&self, x0: T) -> Vec<[T; 2]> {
        let mut scale = x0;
        self.sections
            .iter()
            .map(|s| {
                let [z1, z2] = s.step_state();
                let out = [z1 * scale, z2 * scale];
                scale *= s.dc_gain();
                out
            })
            .collect()
    }

    /// Forward-backward filtering with odd-reflection padding and
    /// steady-state initial conditions. The result has zero phase and the
    /// squared magnitude of the cascade.
    pub fn filtfilt(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![x[0] * self.response(T::zero(), T::one()).norm_sqr()];
        }
        let pad = (3 * (2 * self.sections.len() + 1)).min(n - 1);
        let two = T::lit(2.0);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| two * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| two * x[n - 1] - x[n - 1 - i]));

        let fwd = self.run(&ext, self.steady_state(ext[0]));
        let rev: Vec<T> = fwd.into_iter().rev().collect();
        let back = self.run(&rev, self.steady_state(rev[0]));
        back.into_iter().rev().skip(pad).take(n).collect()
    }
}

fn is_real<T: Scalar>(z: &Complex<T>) -> bool {
    z.im == T::zero()
}

/// Groups roots into conjugate pairs (upper member kept) and reals.
fn split_roots<T: Scalar>(roots: &[Complex<T>]) -> (Vec<Complex<T>>, Vec<T>) {
    let tol = T::lit(1e-9);
    let mut pairs = Vec::new();
    let mut reals = Vec::new();
    let mut lower: Vec<Complex<T>> = Vec::new();
    for r in roots {
        if r.im.abs() <= tol * r.norm().max(T::one()) || is_real(r) {
            reals.push(r.re);
        } else if r.im > T::zero() {
            pairs.push(*r);
        } else {
            lower.push(*r);
        }
    }
    debug_assert_eq!(pairs.len(), lower.len(), "unpaired complex roots");
    (pairs, reals)
}

fn take_nearest<T: Scalar, V: Copy>(
    pool: &mut Vec<V>,
    target: Complex<T>,
    pos: impl Fn(&V) -> Complex<T>,
) -> Option<V> {
    let idx = pool
        .iter()
        .enumerate()
        .min_by(|a, b| {
            let da = (pos(a.1) - target).norm();
            let db = (pos(b.1) - target).norm();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })?
        .0;
    Some(pool.swap_remove(idx))
}

fn quad_from_pair<T: Scalar>(z: Complex<T>) -> [T; 3] {
    [T::one(), -T::lit(2.0) * z.re, z.norm_sqr()]
}

fn quad_from_reals<T: Scalar>(a: T, b: T) -> [T; 3] {
    [T::one(), -(a + b), a * b]
}

fn linear<T: Scalar>(a: T) -> [T; 3] {
    [T::one(), -a, T::zero()]
}

/// Bilinear discretization of an analog `k·Π(s−zᵢ)/Π(s−pⱼ)` model with
/// frequency prewarping at `prewarp_hz` (the digital response equals the
/// analog one exactly at that frequency).
pub fn bilinear_zpk<T: Scalar>(
    zeros: &[Complex<T>],
    poles: &[Complex<T>],
    gain: T,
    fs: T,
    prewarp_hz: T,
) -> Result<Sos<T>> {
    if zeros.len() > poles.len() {
        return Err(Error::param("zeros", "more zeros than poles (improper)"));
    }
    if !(prewarp_hz > T::zero() && prewarp_hz < fs / T::lit(2.0)) {
        return Err(Error::param("prewarp_hz", "must lie in (0, fs/2)"));
    }
    let k = T::TAU() * prewarp_hz / (T::PI() * prewarp_hz / fs).tan();
    let kc = Complex::new(k, T::zero());
    let map = |r: &Complex<T>| (kc + r) / (kc - r);

    let mut dgain = Complex::new(gain, T::zero());
    for z in zeros {
        dgain *= kc - z;
    }
    for p in poles {
        dgain /= kc - p;
    }
    let mut dz: Vec<Complex<T>> = zeros.iter().map(map).collect();
    dz.extend(std::iter::repeat_n(
        Complex::new(-T::one(), T::zero()),
        poles.len() - zeros.len(),
    ));
    let dp: Vec<Complex<T>> = poles.iter().map(map).collect();

    let (pole_pairs, mut pole_reals) = split_roots(&dp);
    let (mut zero_pairs, mut zero_reals) = split_roots(&dz);
    let real_pos = |r: &T| Complex::new(*r, T::zero());

    let mut sections: Vec<Biquad<T>> = Vec::new();
    for pp in pole_pairs {
        let num = if let Some(zp) = take_nearest(&mut zero_pairs, pp, |z| *z) {
            quad_from_pair(zp)
        } else {
            let a = take_nearest(&mut zero_reals, pp, real_pos).unwrap_or(T::zero());
            let b = take_nearest(&mut zero_reals, pp, real_pos).unwrap_or(T::zero());
            quad_from_reals(a, b)
        };
        sections.push(Biquad {
            b: num,
            a: quad_from_pair(pp),
        });
    }
    // Remaining complex zero pairs need two real poles each.
    while let Some(zp) = zero_pairs.pop() {
        let a = take_nearest(&mut pole_reals, zp, real_pos)
            .ok_or_else(|| Error::param("zeros", "cannot pair complex zeros with poles"))?;
        let b = take_nearest(&mut pole_reals, zp, real_pos)
            .ok_or_else(|| Error::param("zeros", "cannot pair complex zeros with poles"))?;
        sections.push(Biquad {
            b: quad_from_pair(zp),
            a: quad_from_reals(a, b),
        });
    }
    for p in pole_reals {
        let z = take_nearest(&mut zero_reals, real_pos(&p), real_pos).unwrap_or(T::zero());
        sections.push(Biquad {
            b: linear(z),
            a: linear(p),
        });
    }
    if sections.is_empty() {
        return Ok(Sos::identity(dgain.re));
    }
    for b in sections[0].b.iter_mut() {
        *b *= dgain.re;
    }
    Ok(Sos { sections })
}

/// Butterworth response type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pass {
    Low,
    High,
}

/// Digital Butterworth filter of the given order, prewarped at the corner.
pub fn butterworth<T: Scalar>(pass: Pass, order: usize, corner_hz: T, fs: T) -> Result<Sos<T>> {
    if order == 0 {
        return Err(Error::param("order", "must be >= 1"));
    }
    if !(corner_hz > T::zero() && corner_hz < fs / T::lit(2.0)) {
        return Err(Error::param("corner", "must lie in (0, fs/2)"));
    }
    let wc = T::TAU() * corner_hz;
    let n = T::from_count(order);
    let proto: Vec<Complex<T>> = (0..order)
        .map(|k| {
            let theta = T::PI() * (T::from_count(2 * k + order + 1)) / (T::lit(2.0) * n);
            let mut p = Complex::from_polar(T::one(), theta);
            if (2 * k + 1) == order {
                p.im = T::zero();
            }
            p
        })
        .collect();
    let (zeros, poles, gain): (Vec<Complex<T>>, Vec<Complex<T>>, T) = match pass {
        Pass::Low => (
            Vec::new(),
            proto.iter().map(|p| *p * wc).collect(),
            wc.powi(order as i32),
        ),
        Pass::High => (
            vec![Complex::new(T::zero(), T::zero()); order],
            proto
                .iter()
                .map(|p| Complex::new(wc, T::zero()) / *p)
                .collect(),
            T::one(),
        ),
    };
    bilinear_zpk(&zeros, &poles, gain, fs, corner_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn butterworth_corner_is_half_power() {
        for order in 1..=5 {
            for pass in [Pass::Low, Pass::High] {
                let sos = butterworth(pass, order, 40.0, 500.0).unwrap();
                let g = sos.response(40.0, 500.0).norm();
                assert_relative_eq!(g, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-9);
            }
        }
        let lp = butterworth(Pass::Low, 4, 40.0, 500.0).unwrap();
        assert_relative_eq!(lp.response(0.0, 500.0).norm(), 1.0, epsilon = 1e-12);
        let hp = butterworth(Pass::High, 4, 3.0, 500.0).unwrap();
        assert!(hp.response(0.0, 500.0).norm() < 1e-12);
        assert_relative_eq!(hp.response(250.0, 500.0).norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn butterworth_matches_digital_magnitude_formula() {
        // Prewarped Butterworth: |H|² = 1 / (1 + (tan(πf/fs) / tan(πfc/fs))^(2n))
        let (fc, fs, n) = (30.0f64, 500.0, 4);
        let sos = butterworth(Pass::Low, n, fc, fs).unwrap();
        for f in [1.0, 10.0, 29.0, 60.0, 200.0] {
            let r = ((std::f64::consts::PI * f / fs).tan()
                / (std::f64::consts::PI * fc / fs).tan())
            .powi(2 * n as i32);
            let want = 1.0 / (1.0 + r).sqrt();
            assert_relative_eq!(sos.response(f, fs).norm(), want, max_relative = 1e-9);
        }
    }

    #[test]
    fn filtfilt_keeps_constant_through_lowpass_and_kills_it_in_highpass() {
        let x = vec![2.5f64; 300];
        let lp = butterworth(Pass::Low, 4, 20.0, 500.0).unwrap();
        for v in lp.filtfilt(&x) {
            assert_relative_eq!(v, 2.5, epsilon = 1e-9);
        }
        let hp = butterworth(Pass::High, 4, 3.0, 500.0).unwrap();
        for v in hp.filtfilt(&x) {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn bilinear_exact_at_prewarp_frequency() {
        // H(s) = 100 / (s + 100) · s / (s + 1)
        let zeros = [Complex::new(0.0, 0.0)];
        let poles = [Complex::new(-100.0, 0.0), Complex::new(-1.0, 0.0)];
        let sos = bilinear_zpk(&zeros, &poles, 100.0, 500.0, 10.0).unwrap();
        let s = Complex::new(0.0, std::f64::consts::TAU * 10.0);
        let analog = s * 100.0 / ((s + 100.0) * (s + 1.0));
        let digital = sos.response(10.0, 500.0);
        assert_relative_eq!(digital.re, analog.re, epsilon = 1e-12);
        assert_relative_eq!(digital.im, analog.im, epsilon = 1e-12);
    }

    #[test]
    fn complex_zero_pair_with_real_poles() {
        let zeros = [Complex::new(-1.0, 5.0), Complex::new(-1.0, -5.0)];
        let poles = [
            Complex::new(-2.0, 0.0),
            Complex::new(-30.0, 0.0),
            Complex::new(-40.0, 0.0),
        ];
        let sos = bilinear_zpk(&zeros, &poles, 3.0, 500.0, 5.0).unwrap();
        let s = Complex::new(0.0, std::f64::consts::TAU * 5.0);
        let analog = (s - zeros[0]) * (s - zeros[1]) * 3.0
            / ((s - poles[0]) * (s - poles[1]) * (s - poles[2]));
        assert_relative_eq!(
            sos.response(5.0, 500.0).norm(),
            analog.norm(),
            max_relative = 1e-10
        );
    }
}
