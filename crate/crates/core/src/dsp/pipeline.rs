//! Fetal QRS extraction from a single abdominal channel: band-pass,
//! maternal detection, maternal cancellation, fetal detection.

use crate::error::Result;
use crate::scalar::Scalar;
use crate::signals::Waveform;

use super::{
    bandpass, cancel_maternal, detect_qrs, snr_db, AnnotationSet, FilterSpec, QrsDetectorConfig,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig<T> {
    pub filter: FilterSpec<T>,
    pub maternal: QrsDetectorConfig,
    pub fetal: QrsDetectorConfig,
}

impl<T: Scalar> Default for PipelineConfig<T> {
    fn default() -> Self {
        PipelineConfig {
            filter: FilterSpec::default(),
            maternal: QrsDetectorConfig::maternal(),
            fetal: QrsDetectorConfig::fetal(),
        }
    }
}

/// Intermediate and final products of [`extract_fetal_qrs`].
#[derive(Debug, Clone)]
pub struct PipelineOutput<T> {
    pub filtered: Waveform<T>,
    pub maternal_peaks: AnnotationSet,
    pub residual: Waveform<T>,
    pub fetal_peaks: AnnotationSet,
    /// Fetal SNR on the band-passed mixture, before cancellation.
    pub snr_pre_db: Option<T>,
    /// Fetal SNR on the residual.
    pub snr_post_db: Option<T>,
}

pub fn extract_fetal_qrs<T: Scalar>(
    w: &Waveform<T>,
    cfg: &PipelineConfig<T>,
) -> Result<PipelineOutput<T>> {
    let filtered = bandpass(w, &cfg.filter)?;
    let maternal_peaks = detect_qrs(&filtered, &cfg.maternal)?;
    let residual = cancel_maternal(&filtered, &maternal_peaks)?;
    let fetal_peaks = detect_qrs(&residual, &cfg.fetal)?;
    let snr_pre_db = snr_db(&filtered, &fetal_peaks).ok();
    let snr_post_db = snr_db(&residual, &fetal_peaks).ok();
    Ok(PipelineOutput {
        filtered,
        maternal_peaks,
        residual,
        fetal_peaks,
        snr_pre_db,
        snr_post_db,
    })
}
