//! Digital processing: filtering, wavelets, QRS detection, maternal
//! cancellation, spectral estimation and SNR.

mod annotations;
mod cancel;
mod filter;
pub mod iir;
mod pipeline;
mod psd;
mod qrs;
mod snr;
mod wavelet;

pub use annotations::AnnotationSet;
pub use cancel::{cancel_maternal, maternal_template, MIN_TEMPLATE_BEATS, TEMPLATE_HALF_WINDOW_S};
pub use filter::{bandpass, FilterFamily, FilterKind, FilterSpec};
pub use pipeline::{extract_fetal_qrs, PipelineConfig, PipelineOutput};
pub use psd::{
    input_referred_noise, input_referred_noise_with, welch_psd, PsdEstimate, WelchConfig, Window,
};
pub use qrs::{detect_fetal_qrs, detect_maternal_qrs, detect_qrs, QrsDetectorConfig, MIN_RECORD_S};
pub use snr::{snr_db, SNR_HALF_WINDOW_S};
pub use wavelet::{dwt, dwt_with, idwt, stationary_details, Wavelet, WaveletPyramid};
