//! Binary record format: a 56-byte little-endian header followed by
//! channel-interleaved 3-byte big-endian two's-complement codes. The layout
//! is described byte by byte in `docs/FORMAT.md`.

use std::fs;
use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::scalar::Scalar;
use crate::signals::{adc_decode, adc_quantize, decode_be24, encode_be24, AdcConfig, Waveform};

pub const RECORD_MAGIC: [u8; 4] = *b"NCEB";
pub const RECORD_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 56;
pub const BYTES_PER_SAMPLE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordHeader {
    pub version: u16,
    pub channels: u16,
    /// Converter settings; `adc.sample_rate` is the record's sample rate.
    pub adc: AdcConfig<f64>,
    /// Samples per channel.
    pub sample_count: u64,
}

impl RecordHeader {
    pub fn new(adc: AdcConfig<f64>, channels: u16, sample_count: u64) -> Self {
        RecordHeader {
            version: RECORD_VERSION,
            channels,
            adc,
            sample_count,
        }
    }

    pub fn payload_len(&self) -> Option<usize> {
        (self.sample_count as usize)
            .checked_mul(self.channels as usize)?
            .checked_mul(BYTES_PER_SAMPLE)
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..4].copy_from_slice(&RECORD_MAGIC);
        b[4..6].copy_from_slice(&self.version.to_le_bytes());
        b[6..8].copy_from_slice(&self.channels.to_le_bytes());
        b[8..16].copy_from_slice(&self.adc.sample_rate.to_le_bytes());
        b[16..24].copy_from_slice(&self.adc.vref.to_le_bytes());
        b[24..32].copy_from_slice(&self.adc.pga_gain.to_le_bytes());
        b[32..40].copy_from_slice(&self.adc.afe_gain.to_le_bytes());
        b[40] = self.adc.resolution_bits;
        b[48..56].copy_from_slice(&self.sample_count.to_le_bytes());
        b
    }

    pub fn from_bytes(b: &[u8]) -> std::result::Result<Self, FormatError> {
        if b.len() < 4 {
            return Err(FormatError::Truncated {
                expected: HEADER_LEN,
                actual: b.len(),
            });
        }
        let magic: [u8; 4] = b[0..4].try_into().expect("4 bytes");
        if magic != RECORD_MAGIC {
            return Err(FormatError::BadMagic {
                found: magic,
                expected: RECORD_MAGIC,
            });
        }
        if b.len() < HEADER_LEN {
            return Err(FormatError::Truncated {
                expected: HEADER_LEN,
                actual: b.len(),
            });
        }
        let u16_at = |i: usize| u16::from_le_bytes(b[i..i + 2].try_into().expect("2 bytes"));
        let f64_at = |i: usize| f64::from_le_bytes(b[i..i + 8].try_into().expect("8 bytes"));
        let version = u16_at(4);
        if version != RECORD_VERSION {
            return Err(FormatError::UnsupportedVersion {
                found: version,
                supported: RECORD_VERSION,
            });
        }
        if b[41..48].iter().any(|&v| v != 0) {
            return Err(FormatError::Header {
                field: "reserved",
                reason: "reserved bytes 41..48 must be zero".into(),
            });
        }
        let channels = u16_at(6);
        if channels == 0 {
            return Err(FormatError::Header {
                field: "channels",
                reason: "must be >= 1".into(),
            });
        }
        let adc = AdcConfig {
            vref: f64_at(16),
            resolution_bits: b[40],
            pga_gain: f64_at(24),
            afe_gain: f64_at(32),
            sample_rate: f64_at(8),
        };
        if let Err(e) = adc.validate() {
            return Err(FormatError::Header {
                field: "adc",
                reason: e.to_string(),
            });
        }
        Ok(RecordHeader {
            version,
            channels,
            adc,
            sample_count: u64::from_le_bytes(b[48..56].try_into().expect("8 bytes")),
        })
    }
}

/// Serializes a header and interleaved codes (`codes.len()` must be a
/// multiple of the channel count).
pub fn encode_record(header: &RecordHeader, codes: &[i32]) -> Result<Vec<u8>> {
    let expected = header.sample_count as usize * header.channels as usize;
    if codes.len() != expected {
        return Err(Error::param(
            "codes",
            format!("{} codes for a header announcing {expected}", codes.len()),
        ));
    }
    let (lo, hi) = (header.adc.min_code(), header.adc.max_code());
    let mut out = Vec::with_capacity(HEADER_LEN + BYTES_PER_SAMPLE * codes.len());
    out.extend_from_slice(&header.to_bytes());
    for &c in codes {
        if c < lo || c > hi {
            return Err(FormatError::CodeOutOfRange {
                code: c,
                bits: header.adc.resolution_bits,
            }
            .into());
        }
        out.extend_from_slice(&encode_be24(c));
    }
    Ok(out)
}

/// Parses a whole record; the payload length must match the header exactly.
pub fn decode_record(bytes: &[u8]) -> Result<(RecordHeader, Vec<i32>)> {
    let header = RecordHeader::from_bytes(bytes)?;
    let payload = header.payload_len().ok_or(FormatError::Header {
        field: "sample_count",
        reason: "payload size overflows".into(),
    })?;
    let expected = HEADER_LEN + payload;
    if bytes.len() < expected {
        return Err(FormatError::Truncated {
            expected,
            actual: bytes.len(),
        }
        .into());
    }
    if bytes.len() > expected {
        return Err(FormatError::TrailingData {
            expected,
            actual: bytes.len(),
        }
        .into());
    }
    let (lo, hi) = (header.adc.min_code(), header.adc.max_code());
    let mut codes = Vec::with_capacity(payload / BYTES_PER_SAMPLE);
    for chunk in bytes[HEADER_LEN..].chunks_exact(BYTES_PER_SAMPLE) {
        let c = decode_be24([chunk[0], chunk[1], chunk[2]]);
        if c < lo || c > hi {
            return Err(FormatError::CodeOutOfRange {
                code: c,
                bits: header.adc.resolution_bits,
            }
            .into());
        }
        codes.push(c);
    }
    Ok((header, codes))
}

fn adc_as_f64<T: Scalar>(cfg: &AdcConfig<T>) -> AdcConfig<f64> {
    AdcConfig {
        vref: cfg.vref.as_f64(),
        resolution_bits: cfg.resolution_bits,
        pga_gain: cfg.pga_gain.as_f64(),
        afe_gain: cfg.afe_gain.as_f64(),
        sample_rate: cfg.sample_rate.as_f64(),
    }
}

fn adc_from_f64<T: Scalar>(cfg: &AdcConfig<f64>) -> AdcConfig<T> {
    AdcConfig {
        vref: T::lit(cfg.vref),
        resolution_bits: cfg.resolution_bits,
        pga_gain: T::lit(cfg.pga_gain),
        afe_gain: T::lit(cfg.afe_gain),
        sample_rate: T::lit(cfg.sample_rate),
    }
}

/// Writes already-quantized codes of a single channel.
pub fn write_codes(path: &Path, codes: &[i32], cfg: &AdcConfig<f64>) -> Result<()> {
    cfg.validate()?;
    let header = RecordHeader::new(*cfg, 1, codes.len() as u64);
    let bytes = encode_record(&header, codes)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_codes(path: &Path) -> Result<(RecordHeader, Vec<i32>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_record(&bytes)
}

/// Quantizes input-referred volts with `cfg` and writes a one-channel record.
pub fn write_record<T: Scalar>(path: &Path, w: &Waveform<T>, cfg: &AdcConfig<T>) -> Result<()> {
    let codes = adc_quantize(w, cfg)?;
    write_codes(path, &codes, &adc_as_f64(cfg))
}

/// Reads a one-channel record and decodes it to input-referred volts.
pub fn read_record<T: Scalar>(path: &Path) -> Result<(Waveform<T>, AdcConfig<T>)> {
    let (header, codes) = read_codes(path)?;
    if header.channels != 1 {
        return Err(FormatError::Header {
            field: "channels",
            reason: format!("{} channels, expected 1", header.channels),
        }
        .into());
    }
    let cfg = adc_from_f64::<T>(&header.adc);
    let w = adc_decode(&codes, &cfg)?;
    Ok((w, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(n: u64) -> RecordHeader {
        RecordHeader::new(AdcConfig::default(), 1, n)
    }

    #[test]
    fn header_round_trip_and_layout() {
        let h = RecordHeader::new(AdcConfig::default(), 3, 1234);
        let b = h.to_bytes();
        assert_eq!(&b[0..4], b"NCEB");
        assert_eq!(&b[4..6], &[1, 0]);
        assert_eq!(&b[6..8], &[3, 0]);
        assert_eq!(b[40], 24);
        assert_eq!(RecordHeader::from_bytes(&b).unwrap(), h);
    }

    #[test]
    fn empty_record_is_header_only() {
        let bytes = encode_record(&header(0), &[]).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN);
        let (h, codes) = decode_record(&bytes).unwrap();
        assert_eq!(h.sample_count, 0);
        assert!(codes.is_empty());
    }

    #[test]
    fn payload_size_and_code_round_trip() {
        let codes: Vec<i32> = (0..1000)
            .map(|i| (i * 16_769) % 8_388_607 - 4_000_000)
            .collect();
        let bytes = encode_record(&header(1000), &codes).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 3 * 1000);
        assert_eq!(decode_record(&bytes).unwrap().1, codes);
    }

    #[test]
    fn distinct_format_errors() {
        let good = encode_record(&header(4), &[1, -1, 8_388_607, -8_388_608]).unwrap();

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(
            decode_record(&bad),
            Err(Error::Format(FormatError::BadMagic { .. }))
        ));

        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(
            decode_record(&bad),
            Err(Error::Format(FormatError::UnsupportedVersion {
                found: 2,
                supported: 1
            }))
        ));

        match decode_record(&good[..good.len() - 2]) {
            Err(Error::Format(FormatError::Truncated { expected, actual })) => {
                assert_eq!((expected, actual), (68, 66));
            }
            other => panic!("{other:?}"),
        }

        let mut long = good.clone();
        long.push(0);
        assert!(matches!(
            decode_record(&long),
            Err(Error::Format(FormatError::TrailingData { .. }))
        ));

        let mut reserved = good.clone();
        reserved[45] = 1;
        assert!(matches!(
            decode_record(&reserved),
            Err(Error::Format(FormatError::Header { .. }))
        ));

        assert!(matches!(
            decode_record(&good[..10]),
            Err(Error::Format(FormatError::Truncated {
                expected: 56,
                actual: 10
            }))
        ));
    }

    #[test]
    fn sixteen_bit_range_enforced() {
        let cfg = AdcConfig::<f64> {
            resolution_bits: 16,
            ..Default::default()
        };
        let h = RecordHeader::new(cfg, 1, 1);
        assert!(encode_record(&h, &[40_000]).is_err());
        let mut bytes = encode_record(&h, &[0]).unwrap();
        bytes[HEADER_LEN..].copy_from_slice(&encode_be24(40_000));
        assert!(matches!(
            decode_record(&bytes),
            Err(Error::Format(FormatError::CodeOutOfRange {
                code: 40_000,
                bits: 16
            }))
        ));
    }
}
