use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::params::CircuitParams;
use super::transfer::{build_transfer_function, RationalTransferFunction};

/// Reference frequency for every mid-band gain and flatness figure.
pub const MIDBAND_HZ: f64 = 10.0;

/// Sampled Bode data.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse<T> {
    pub frequencies: Vec<T>,
    pub gain_db: Vec<T>,
    /// Unwrapped phase, degrees.
    pub phase_deg: Vec<T>,
}

impl<T: Scalar> FrequencyResponse<T> {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

/// `n` points log-spaced from `start` to `stop` inclusive.
pub fn logspace<T: Scalar>(start: T, stop: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let (a, b) = (start.log10(), stop.log10());
            let step = (b - a) / T::from_count(n - 1);
            (0..n)
                .map(|i| T::lit(10.0).powf(a + step * T::from_count(i)))
                .collect()
        }
    }
}

fn check_frequencies<T: Scalar>(freqs: &[T]) -> Result<()> {
    if freqs.is_empty() {
        return Err(Error::param("frequencies", "must not be empty"));
    }
    if freqs.iter().any(|f| !(*f > T::zero()) || !f.is_finite()) {
        return Err(Error::param("frequencies", "must be finite and > 0"));
    }
    if freqs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("frequencies", "must be strictly increasing"));
    }
    Ok(())
}

pub fn evaluate_response<T: Scalar>(
    tf: &RationalTransferFunction<T>,
    freqs: &[T],
) -> Result<FrequencyResponse<T>> {
    check_frequencies(freqs)?;
    let twenty = T::lit(20.0);
    let full_turn = T::lit(360.0);
    let half_turn = T::lit(180.0);
    let mut gain_db = Vec::with_capacity(freqs.len());
    let mut phase_deg: Vec<T> = Vec::with_capacity(freqs.len());
    for &f in freqs {
        let h = tf.eval_hz(f);
        gain_db.push(twenty * h.norm().log10());
        let mut ph = h.arg().to_degrees();
        if let Some(&prev) = phase_deg.last() {
            while ph - prev > half_turn {
                ph -= full_turn;
            }
            while prev - ph > half_turn {
                ph += full_turn;
            }
        }
        phase_deg.push(ph);
    }
    Ok(FrequencyResponse {
        frequencies: freqs.to_vec(),
        gain_db,
        phase_deg,
    })
}

/// Mid-band gain (V/V at 10 Hz) for each source capacitance.
pub fn gain_sweep<T: Scalar>(
    p: &CircuitParams<T>,
    cs_values: &[T],
    neutralization: bool,
) -> Result<Vec<(T, T)>> {
    cs_values
        .iter()
        .map(|&cs| {
            if !(cs > T::zero()) {
                return Err(Error::param("Cs", "sweep values must be > 0"));
            }
            let q = p.with_cs(cs).with_neutralization(neutralization);
            let tf = build_transfer_function(&q)?;
            Ok((cs, tf.magnitude_hz(T::lit(MIDBAND_HZ))))
        })
        .collect()
}

/// Half-power (−3.01 dB) corners relative to the plateau, found by
/// log-linear interpolation between neighbouring samples. The plateau is the
/// maximum gain over samples in [1, 100] Hz.
pub fn cutoff_frequencies<T: Scalar>(fr: &FrequencyResponse<T>) -> Result<(T, T)> {
    check_frequencies(&fr.frequencies)?;
    let (lo_band, hi_band) = (T::one(), T::lit(100.0));
    let peak = fr
        .frequencies
        .iter()
        .zip(&fr.gain_db)
        .enumerate()
        .filter(|(_, (f, _))| **f >= lo_band && **f <= hi_band)
        .max_by(|a, b| {
            a.1 .1
                .partial_cmp(b.1 .1)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(i, (_, g))| (i, *g));
    let Some((ipk, plateau)) = peak else {
        return Err(Error::param(
            "frequencies",
            "response has no samples in the 1-100 Hz plateau band",
        ));
    };
    let target = plateau - T::lit(10.0) * T::lit(2.0).log10();
    let interp = |i: usize, j: usize| {
        let (f0, f1) = (fr.frequencies[i].ln(), fr.frequencies[j].ln());
        let (g0, g1) = (fr.gain_db[i], fr.gain_db[j]);
        (f0 + (target - g0) / (g1 - g0) * (f1 - f0)).exp()
    };
    let low = (0..ipk)
        .rev()
        .find(|&i| fr.gain_db[i] < target)
        .map(|i| interp(i, i + 1));
    let high = (ipk + 1..fr.len())
        .find(|&i| fr.gain_db[i] < target)
        .map(|i| interp(i - 1, i));
    match (low, high) {
        (Some(l), Some(h)) => Ok((l, h)),
        (None, Some(_)) => Err(Error::Bounds("low")),
        (Some(_), None) => Err(Error::Bounds("high")),
        (None, None) => Err(Error::Bounds("low and high")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn single_pole(fc: f64) -> RationalTransferFunction<f64> {
        RationalTransferFunction::new(vec![1.0], vec![1.0, 1.0 / (std::f64::consts::TAU * fc)])
            .unwrap()
    }

    #[test]
    fn pure_gain_is_flat() {
        let tf = RationalTransferFunction::constant(11.0);
        let fr = evaluate_response(&tf, &logspace(0.1, 1e4, 50)).unwrap();
        for (g, ph) in fr.gain_db.iter().zip(&fr.phase_deg) {
            assert_relative_eq!(*g, 20.0 * 11f64.log10(), epsilon = 1e-12);
            assert_eq!(*ph, 0.0);
        }
        assert!((fr.gain_db[0] - 20.83).abs() < 0.005);
    }

    #[test]
    fn single_pole_corner_values() {
        let fr = evaluate_response(&single_pole(250.0), &[1.0, 250.0]).unwrap();
        assert_relative_eq!(fr.gain_db[1] - fr.gain_db[0], -3.0103, epsilon = 1e-3);
        assert_relative_eq!(fr.phase_deg[1], -45.0, epsilon = 1e-3);
    }

    #[test]
    fn rejects_bad_frequency_lists() {
        let tf = single_pole(250.0);
        assert!(evaluate_response(&tf, &[]).is_err());
        assert!(evaluate_response(&tf, &[1.0, 1.0]).is_err());
        assert!(evaluate_response(&tf, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn single_pole_cutoffs() {
        let fr = evaluate_response(&single_pole(250.0), &logspace(1.0, 1e4, 400)).unwrap();
        assert!(matches!(cutoff_frequencies(&fr), Err(Error::Bounds("low"))));
        let tf = single_pole(250.0).cascade(
            &RationalTransferFunction::new(vec![0.0, 1.0], vec![std::f64::consts::TAU * 0.07, 1.0])
                .unwrap(),
        );
        let fr = evaluate_response(&tf, &logspace(0.01, 1e4, 400)).unwrap();
        let (lo, hi) = cutoff_frequencies(&fr).unwrap();
        assert_relative_eq!(lo, 0.07, max_relative = 2e-3);
        assert_relative_eq!(hi, 250.0, max_relative = 2e-3);
    }

    #[test]
    fn flat_response_has_no_corners() {
        let tf = RationalTransferFunction::constant(2.0);
        let fr = evaluate_response(&tf, &logspace(0.1, 1e3, 100)).unwrap();
        assert!(matches!(
            cutoff_frequencies(&fr),
            Err(Error::Bounds("low and high"))
        ));
    }

    #[test]
    fn phase_unwraps_through_multiple_poles() {
        let tf = single_pole(1.0)
            .cascade(&single_pole(2.0))
            .cascade(&single_pole(3.0));
        let fr = evaluate_response(&tf, &logspace(0.01, 1e4, 200)).unwrap();
        let last = *fr.phase_deg.last().unwrap();
        assert!((last + 270.0).abs() < 0.5, "{last}");
        assert!(fr.phase_deg.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn gain_sweep_examples() {
        let p = CircuitParams::<f64>::default();
        for (_, g) in gain_sweep(&p, &[5e-12, 30e-12, 100e-12], true).unwrap() {
            assert!((g - 11.0).abs() / 11.0 < 0.02, "{g}");
        }
        let off = gain_sweep(&p, &[10e-12, 1e-6], false).unwrap();
        assert!((off[0].1 - 5.5).abs() / 5.5 < 0.01);
        assert!((off[1].1 - 11.0).abs() / 11.0 < 0.01);
    }
}
