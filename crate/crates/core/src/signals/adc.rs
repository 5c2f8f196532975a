//! Delta-sigma acquisition chip model: programmable gain, signed
//! two's-complement codes and the input-referred LSB size.

use crate::error::{Error, FormatError, Result};
use crate::scalar::Scalar;

use super::waveform::Waveform;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcConfig<T> {
    /// Internal reference, volts.
    pub vref: T,
    pub resolution_bits: u8,
    /// Programmable gain inside the converter.
    pub pga_gain: T,
    /// Analog front-end gain ahead of the converter.
    pub afe_gain: T,
    pub sample_rate: T,
}

impl<T: Scalar> Default for AdcConfig<T> {
    fn default() -> Self {
        AdcConfig {
            vref: T::lit(4.5),
            resolution_bits: 24,
            pga_gain: T::lit(24.0),
            afe_gain: T::lit(11.0),
            sample_rate: T::lit(500.0),
        }
    }
}

impl<T: Scalar> AdcConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.resolution_bits, 16 | 24) {
            return Err(Error::param("resolution_bits", "must be 16 or 24"));
        }
        for (name, v) in [
            ("vref_v", self.vref),
            ("pga_gain", self.pga_gain),
            ("afe_gain", self.afe_gain),
            ("sample_rate_hz", self.sample_rate),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::param(name, "must be finite and > 0"));
            }
        }
        Ok(())
    }

    pub fn max_code(&self) -> i32 {
        (1i32 << (self.resolution_bits - 1)) - 1
    }

    pub fn min_code(&self) -> i32 {
        -(1i32 << (self.resolution_bits - 1))
    }

    /// Total gain from electrode to converter input.
    pub fn total_gain(&self) -> T {
        self.pga_gain * self.afe_gain
    }
}

/// Input-referred voltage of one LSB: `Vref / (2^(bits−1) · PGA · AFE)`.
pub fn adc_sensitivity<T: Scalar>(cfg: &AdcConfig<T>) -> Result<T> {
    cfg.validate()?;
    let steps = T::lit((1u64 << (cfg.resolution_bits - 1)) as f64);
    Ok(cfg.vref / (steps * cfg.total_gain()))
}

/// Rounds each input-referred sample to the nearest code, saturating at
/// the ends of the signed range.
pub fn adc_quantize<T: Scalar>(w: &Waveform<T>, cfg: &AdcConfig<T>) -> Result<Vec<i32>> {
    let lsb = adc_sensitivity(cfg)?;
    if w.sample_rate() != cfg.sample_rate {
        return Err(Error::param(
            "sample_rate",
            "waveform rate differs from converter rate",
        ));
    }
    let (lo, hi) = (cfg.min_code(), cfg.max_code());
    Ok(w.samples()
        .iter()
        .map(|&v| {
            let c = (v / lsb).round().as_f64();
            c.clamp(lo as f64, hi as f64) as i32
        })
        .collect())
}

/// Converts codes back to input-referred volts.
pub fn adc_decode<T: Scalar>(codes: &[i32], cfg: &AdcConfig<T>) -> Result<Waveform<T>> {
    let lsb = adc_sensitivity(cfg)?;
    let (lo, hi) = (cfg.min_code(), cfg.max_code());
    if let Some(&code) = codes.iter().find(|&&c| c < lo || c > hi) {
        return Err(FormatError::CodeOutOfRange {
            code,
            bits: cfg.resolution_bits,
        }
        .into());
    }
    let samples = codes.iter().map(|&c| T::lit(c as f64) * lsb).collect();
    Waveform::new(cfg.sample_rate, samples, "adc")
}

/// 24-bit big-endian two's complement.
pub fn encode_be24(code: i32) -> [u8; 3] {
    let b = code.to_be_bytes();
    [b[1], b[2], b[3]]
}

pub fn decode_be24(bytes: [u8; 3]) -> i32 {
    // Place in the top three bytes, then arithmetic shift to sign-extend.
    i32::from_be_bytes([bytes[0], bytes[1], bytes[2], 0]) >> 8
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sensitivity_values() {
        let s: f64 = adc_sensitivity(&AdcConfig::default()).unwrap();
        assert!((s - 2.032e-9).abs() < 0.001e-9, "{s}");
        let unity = AdcConfig {
            pga_gain: 1.0,
            afe_gain: 1.0,
            ..AdcConfig::default()
        };
        let s1: f64 = adc_sensitivity(&unity).unwrap();
        assert!((s1 * 1e6 - 0.536).abs() < 0.001);
        let doubled = AdcConfig {
            pga_gain: 48.0,
            ..AdcConfig::default()
        };
        assert!((adc_sensitivity(&doubled).unwrap() - s / 2.0).abs() < 1e-24);
        let bad = AdcConfig::<f64> {
            resolution_bits: 12,
            ..AdcConfig::default()
        };
        assert!(adc_sensitivity(&bad).is_err());
    }

    #[test]
    fn quantize_examples() {
        let cfg = AdcConfig::<f64>::default();
        let fs_in = cfg.vref / cfg.total_gain();
        let w = Waveform::new(500.0, vec![0.0, 1e-6, fs_in, -fs_in, 2.0 * fs_in], "x").unwrap();
        let codes = adc_quantize(&w, &cfg).unwrap();
        assert_eq!(
            codes,
            vec![0, 492, (1 << 23) - 1, -(1 << 23), (1 << 23) - 1]
        );
        let back = adc_decode(&codes[..1], &cfg).unwrap();
        assert_eq!(back.samples(), &[0.0]);
        assert!(adc_decode(&[1 << 23], &cfg).is_err());
    }

    #[test]
    fn be24_edges() {
        for c in [0, 1, -1, (1 << 23) - 1, -(1 << 23), 492, -492] {
            assert_eq!(decode_be24(encode_be24(c)), c);
        }
        assert_eq!(encode_be24(-1), [0xff, 0xff, 0xff]);
        assert_eq!(encode_be24(0x123456), [0x12, 0x34, 0x56]);
    }

    proptest! {
        #[test]
        fn round_trip_within_half_lsb(v in proptest::collection::vec(-0.017f64..0.017, 1..64)) {
            let cfg = AdcConfig::<f64>::default();
            let lsb = adc_sensitivity(&cfg).unwrap();
            let w = Waveform::new(500.0, v, "x").unwrap();
            let back = adc_decode(&adc_quantize(&w, &cfg).unwrap(), &cfg).unwrap();
            for (a, b) in w.samples().iter().zip(back.samples()) {
                prop_assert!((a - b).abs() <= 0.5 * lsb * (1.0 + 1e-9));
            }
        }
    }
}
