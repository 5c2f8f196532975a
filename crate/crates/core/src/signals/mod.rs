//! Synthetic signals and the acquisition chain they pass through.

mod adc;
mod coupling;
mod frontend;
mod noise;
mod synth;
mod waveform;

pub use adc::{adc_decode, adc_quantize, adc_sensitivity, decode_be24, encode_be24, AdcConfig};
pub use coupling::{insulation_to_capacitance, DEFAULT_PLATE_AREA_M2, EPSILON_0};
pub use frontend::{
    acquire, apply_frontend, discretize, simulate_recording, Recording, ANALOG_OVERSAMPLE,
};
pub use noise::{flicker_noise, mains_interference, voltage_noise, white_noise, NoiseConfig};
pub use synth::{
    synth_components, synth_ecg, synth_ecg_shaped, synth_fmecg, BeatShape, FetalConfig,
    FetalMaternalComponents, HeartConfig, SynthesisConfig, Wave, FETAL_TO_MATERNAL_RATIO,
};
pub use waveform::Waveform;

/// Deterministic generator for a seed and stream id.
pub fn seeded_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    synth::rng_for(seed, stream)
}
