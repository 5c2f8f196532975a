//! Simulation and analysis toolkit for capacitively coupled ECG electrodes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod io;
pub mod scalar;
pub mod signals;

pub use error::{Error, FormatError, Result};
pub use scalar::Scalar;

/// Double-precision instantiations used by the CLI and tests.
pub type CircuitParamsF64 = circuit::CircuitParams<f64>;
pub type TransferFunctionF64 = circuit::RationalTransferFunction<f64>;
pub type FrequencyResponseF64 = circuit::FrequencyResponse<f64>;
pub type WaveformF64 = signals::Waveform<f64>;
pub type SynthesisConfigF64 = signals::SynthesisConfig<f64>;
pub type NoiseConfigF64 = signals::NoiseConfig<f64>;
pub type AdcConfigF64 = signals::AdcConfig<f64>;
pub type PsdEstimateF64 = dsp::PsdEstimate<f64>;

/// Single-precision instantiations for memory-constrained use.
pub type CircuitParamsF32 = circuit::CircuitParams<f32>;
pub type TransferFunctionF32 = circuit::RationalTransferFunction<f32>;
pub type FrequencyResponseF32 = circuit::FrequencyResponse<f32>;
pub type WaveformF32 = signals::Waveform<f32>;
pub type SynthesisConfigF32 = signals::SynthesisConfig<f32>;
pub type NoiseConfigF32 = signals::NoiseConfig<f32>;
pub type AdcConfigF32 = signals::AdcConfig<f32>;
pub type PsdEstimateF32 = dsp::PsdEstimate<f32>;
