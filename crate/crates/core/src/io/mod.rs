//! Persistence: binary records, annotation files, config files and CSV.

mod annotations;
mod config;
mod csv;
mod record;

pub use annotations::{format_annotations, parse_annotations, read_annotations, write_annotations};
pub use config::{
    load_config, parse_config, write_config, ConfigFile, ConfigValue, ExperimentConfig,
};
pub use csv::{
    gain_sweep_csv, parse_waveform_csv, psd_csv, read_waveform_csv, response_csv, waveform_csv,
    write_gain_sweep_csv, write_psd_csv, write_response_csv, write_waveform_csv,
};
pub use record::{
    decode_record, encode_record, read_codes, read_record, write_codes, write_record, RecordHeader,
    BYTES_PER_SAMPLE, HEADER_LEN, RECORD_MAGIC, RECORD_VERSION,
};
