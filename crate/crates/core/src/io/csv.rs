//! CSV writers for sweeps, waveforms and spectra, and a waveform reader.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::circuit::FrequencyResponse;
use crate::dsp::PsdEstimate;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signals::Waveform;

fn write_text(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn table<I>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = format!("{header}\n");
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(",")).expect("write to String");
    }
    out
}

pub fn response_csv<T: Scalar>(r: &FrequencyResponse<T>) -> String {
    table(
        "frequency_hz,gain_db,phase_deg",
        r.frequencies
            .iter()
            .zip(&r.gain_db)
            .zip(&r.phase_deg)
            .map(|((f, g), p)| vec![f.as_f64(), g.as_f64(), p.as_f64()]),
    )
}

pub fn gain_sweep_csv<T: Scalar>(rows: &[(T, T)]) -> String {
    table(
        "cs_farad,gain_vv",
        rows.iter().map(|(c, g)| vec![c.as_f64(), g.as_f64()]),
    )
}

pub fn waveform_csv<T: Scalar>(w: &Waveform<T>) -> String {
    table(
        "time_s,volts",
        w.samples()
            .iter()
            .enumerate()
            .map(|(i, v)| vec![w.time_of(i), v.as_f64()]),
    )
}

pub fn psd_csv<T: Scalar>(p: &PsdEstimate<T>) -> String {
    table(
        "frequency_hz,density_v2_per_hz",
        p.frequencies
            .iter()
            .zip(&p.density)
            .map(|(f, d)| vec![f.as_f64(), d.as_f64()]),
    )
}

pub fn write_response_csv<T: Scalar>(path: &Path, r: &FrequencyResponse<T>) -> Result<()> {
    write_text(path, response_csv(r))
}

pub fn write_gain_sweep_csv<T: Scalar>(path: &Path, rows: &[(T, T)]) -> Result<()> {
    write_text(path, gain_sweep_csv(rows))
}

pub fn write_waveform_csv<T: Scalar>(path: &Path, w: &Waveform<T>) -> Result<()> {
    write_text(path, waveform_csv(w))
}

pub fn write_psd_csv<T: Scalar>(path: &Path, p: &PsdEstimate<T>) -> Result<()> {
    write_text(path, psd_csv(p))
}

/// Reads a `time_s,volts` file. The sample rate is taken from the first two
/// time stamps; every later stamp must sit on the same grid to within 1 µs.
pub fn parse_waveform_csv<T: Scalar>(text: &str, path: &Path) -> Result<Waveform<T>> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "time_s,volts" => {}
        _ => return Err(err(1, "expected header 'time_s,volts'".into())),
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (k, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(t), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(k + 1, "expected two columns".into()));
        };
        let t: f64 = t
            .trim()
            .parse()
            .map_err(|_| err(k + 1, format!("bad time '{t}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| err(k + 1, format!("bad value '{v}'")))?;
        times.push((k + 1, t));
        values.push(T::lit(v));
    }
    if times.len() < 2 {
        return Err(err(
            1,
            "at least two samples are needed to infer the sample rate".into(),
        ));
    }
    let t0 = times[0].1;
    let dt = times[1].1 - t0;
    if !(dt > 0.0) {
        return Err(err(times[1].0, "time must increase".into()));
    }
    for (i, &(line, t)) in times.iter().enumerate() {
        if (t - (t0 + i as f64 * dt)).abs() > 1e-6 {
            return Err(err(line, format!("time {t} is off the uniform grid")));
        }
    }
    Waveform::new(T::lit(1.0 / dt), values, "csv")
}

pub fn read_waveform_csv<T: Scalar>(path: &Path) -> Result<Waveform<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_waveform_csv(&text, path)
}
