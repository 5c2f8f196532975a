use std::fs;
use std::path::{Path, PathBuf};

use nce_core::circuit::{
    build_transfer_function, cutoff_frequencies, evaluate_response, gain_sweep, logspace,
    MIDBAND_HZ,
};
use nce_core::dsp::{bandpass, extract_fetal_qrs, input_referred_noise, snr_db, FilterSpec};
use nce_core::eval::{compare_report, match_annotations, MatchResult, MetricsReport};
use nce_core::io::{
    load_config, psd_csv, read_annotations, read_record, write_annotations, write_codes,
    write_gain_sweep_csv, write_response_csv, write_waveform_csv, ExperimentConfig,
};
use nce_core::signals::{
    acquire, adc_sensitivity, simulate_recording, AdcConfig, Waveform, ANALOG_OVERSAMPLE,
};
use nce_core::{CircuitParamsF64, Error};
use serde_json::{json, Value};

use crate::{
    BodeArgs, Cli, CliError, Command, EvalArgs, GainSweepArgs, NoiseArgs, OnOff, ProcessArgs,
    SensitivityArgs, SynthArgs,
};

type CmdResult = Result<Value, CliError>;

const PICO: f64 = 1e-12;

pub fn run(cli: &Cli) -> CmdResult {
    let cfg = match &cli.config {
        Some(path) => ExperimentConfig::<f64>::load(path)?,
        None => ExperimentConfig::default(),
    };
    match &cli.command {
        Command::Bode(a) => bode(&cfg, a),
        Command::GainSweep(a) => gain_sweep_cmd(&cfg, a),
        Command::Noise(a) => noise(&cfg, a),
        Command::Synth(a) => synth(cfg, a),
        Command::Process(a) => process(a),
        Command::Eval(a) => eval(a),
        Command::Sensitivity(a) => sensitivity(cli.config.is_some(), &cfg, a),
    }
}

fn summary(command: &str, files: &[PathBuf], extra: Value) -> Value {
    let mut v = json!({
        "status": "ok",
        "command": command,
        "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    if let (Value::Object(base), Value::Object(more)) = (&mut v, extra) {
        base.extend(more);
    }
    v
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Core(Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn circuit_for(
    base: &CircuitParamsF64,
    cs_pf: Option<f64>,
    neutralization: Option<OnOff>,
) -> CircuitParamsF64 {
    let mut p = *base;
    if let Some(cs) = cs_pf {
        p = p.with_cs(cs * PICO);
    }
    if let Some(n) = neutralization {
        p = p.with_neutralization(n.enabled());
    }
    p
}

fn check_finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be finite")))
    }
}

fn bode(cfg: &ExperimentConfig<f64>, a: &BodeArgs) -> CmdResult {
    check_finite("fmin", a.fmin)?;
    check_finite("fmax", a.fmax)?;
    if !(a.fmin > 0.0) || a.fmin >= a.fmax {
        return Err(CliError::Usage("need 0 < fmin < fmax".into()));
    }
    if a.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let cs_list: Vec<Option<f64>> = if a.cs.is_empty() {
        vec![None]
    } else {
        a.cs.iter().map(|&c| Some(c)).collect()
    };
    fs::create_dir_all(&a.out_dir).map_err(|e| io_err(&a.out_dir, e))?;
    let freqs = logspace(a.fmin, a.fmax, a.points);
    // Corners come from a sweep wide enough to contain them whatever the
    // requested range.
    let corner_grid = logspace(a.fmin.min(1e-3), a.fmax.max(1e5), 1000);
    let mut files = Vec::new();
    let mut curves = Vec::new();
    for cs in cs_list {
        let p = circuit_for(&cfg.circuit, cs, a.neutralization);
        let tf = build_transfer_function(&p)?;
        let fr = evaluate_response(&tf, &freqs)?;
        let cs_pf = p.cs / PICO;
        let path = a.out_dir.join(format!("bode_cs{cs_pf}pF.csv"));
        write_response_csv(&path, &fr)?;
        let wide = evaluate_response(&tf, &corner_grid)?;
        let corners = match cutoff_frequencies(&wide) {
            Ok((lo, hi)) => json!([lo, hi]),
            Err(e) => {
                log::warn!("Cs = {cs_pf} pF: {e}");
                Value::Null
            }
        };
        curves.push(json!({
            "cs_pf": cs_pf,
            "midband_gain_db": 20.0 * tf.magnitude_hz(MIDBAND_HZ).log10(),
            "corners_hz": corners,
            "file": path.display().to_string(),
        }));
        files.push(path);
    }
    Ok(summary("bode", &files, json!({ "curves": curves })))
}

fn gain_sweep_cmd(cfg: &ExperimentConfig<f64>, a: &GainSweepArgs) -> CmdResult {
    if a.cs_list.is_empty() {
        return Err(CliError::Usage("--cs-list is empty".into()));
    }
    let cs: Vec<f64> = a.cs_list.iter().map(|c| c * PICO).collect();
    let rows = gain_sweep(&cfg.circuit, &cs, a.neutralization.enabled())?;
    write_gain_sweep_csv(&a.out, &rows)?;
    let gains: Vec<Value> = rows
        .iter()
        .map(|(c, g)| json!({ "cs_pf": c / PICO, "gain_vv": g }))
        .collect();
    Ok(summary(
        "gain-sweep",
        std::slice::from_ref(&a.out),
        json!({ "neutralization": a.neutralization.enabled(), "gains": gains }),
    ))
}

fn noise(cfg: &ExperimentConfig<f64>, a: &NoiseArgs) -> CmdResult {
    if !(a.duration > 0.0) || !a.duration.is_finite() {
        return Err(CliError::Usage("--duration must be > 0".into()));
    }
    let p = circuit_for(&cfg.circuit, a.cs, a.neutralization);
    let fs = cfg.adc.sample_rate * ANALOG_OVERSAMPLE as f64;
    let n = (a.duration * fs).round() as usize;
    let source = Waveform::zeros(fs, n, "noise")?;
    let out = acquire(&source, &p, &cfg.synthesis.noise, a.seed)?;
    let h = build_transfer_function(&p)?;
    let psd = input_referred_noise(&out, &h)?;
    write_text(&a.out, &psd_csv(&psd))?;
    let asd_10 = psd.band_mean(9.0, 11.0).map(f64::sqrt);
    Ok(summary(
        "noise",
        std::slice::from_ref(&a.out),
        json!({
            "cs_pf": p.cs / PICO,
            "neutralization": p.neutralization_enabled,
            "sample_rate_hz": fs,
            "input_referred_10hz_v_per_rthz": asd_10,
        }),
    ))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn synth(mut cfg: ExperimentConfig<f64>, a: &SynthArgs) -> CmdResult {
    if a.out.as_os_str().is_empty() {
        return Err(CliError::Usage("--out must not be empty".into()));
    }
    if let Some(d) = a.duration {
        cfg.synthesis.duration_s = d;
    }
    cfg.circuit = circuit_for(&cfg.circuit, a.cs, a.neutralization);
    let rec = simulate_recording(&cfg.synthesis, &cfg.circuit, &cfg.adc, a.seed)?;
    write_codes(&a.out, &rec.codes, &cfg.adc)?;
    let fetal = sibling(&a.out, ".fetal.txt");
    let maternal = sibling(&a.out, ".maternal.txt");
    write_annotations(&fetal, &rec.fetal_peaks)?;
    write_annotations(&maternal, &rec.maternal_peaks)?;
    Ok(summary(
        "synth",
        &[a.out.clone(), fetal, maternal],
        json!({
            "seed": a.seed,
            "samples": rec.codes.len(),
            "sample_rate_hz": cfg.adc.sample_rate,
            "fetal_beats": rec.fetal_peaks.len(),
            "maternal_beats": rec.maternal_peaks.len(),
        }),
    ))
}

fn process(a: &ProcessArgs) -> CmdResult {
    let (w, _) = read_record::<f64>(&a.input)?;
    let out = extract_fetal_qrs(&w, &Default::default())?;
    write_annotations(&a.out_annotations, &out.fetal_peaks)?;
    let mut files = vec![a.out_annotations.clone()];
    if let Some(dir) = &a.artifacts_dir {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let filtered = dir.join("filtered.csv");
        let residual = dir.join("residual.csv");
        let maternal = dir.join("maternal.txt");
        write_waveform_csv(&filtered, &out.filtered)?;
        write_waveform_csv(&residual, &out.residual)?;
        write_annotations(&maternal, &out.maternal_peaks)?;
        files.extend([filtered, residual, maternal]);
    }
    Ok(summary(
        "process",
        &files,
        json!({
            "fetal_beats": out.fetal_peaks.len(),
            "maternal_beats": out.maternal_peaks.len(),
            "snr_pre_db": out.snr_pre_db,
            "snr_post_db": out.snr_post_db,
        }),
    ))
}

fn metrics_json(r: &MetricsReport, m: &MatchResult) -> Value {
    json!({
        "record_id": r.record_id,
        "electrode": r.electrode,
        "tp": m.tp,
        "fp": m.fp,
        "fn": m.fn_,
        "se": r.se,
        "ppv": r.ppv,
        "acc": r.acc,
        "f1": r.f1,
        "snr_db": r.snr_db,
    })
}

fn metrics_csv(rows: &[(&MetricsReport, &MatchResult)]) -> String {
    let mut out = String::from("record_id,electrode,tp,fp,fn,se,ppv,acc,f1,snr_db\n");
    for (r, m) in rows {
        let snr = r.snr_db.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.record_id, r.electrode, m.tp, m.fp, m.fn_, r.se, r.ppv, r.acc, r.f1, snr
        ));
    }
    out
}

fn eval(a: &EvalArgs) -> CmdResult {
    let reference = read_annotations(&a.reference)?;
    let det = read_annotations(&a.det)?;
    let filtered = match &a.record {
        Some(path) => {
            let (w, _) = read_record::<f64>(path)?;
            Some(bandpass(&w, &FilterSpec::default())?)
        }
        None => None,
    };
    let snr = |peaks| filtered.as_ref().and_then(|w| snr_db(w, peaks).ok());

    let m = match_annotations(&reference, &det, a.half_width)?;
    let nce = MetricsReport::from_match(&m, snr(&det), a.record_id.clone(), "nce");
    let json_path = a.out.with_extension("json");
    let mut extra = json!({ "nce": metrics_json(&nce, &m) });

    match &a.paired_reference_run {
        None => {
            write_text(&a.out, &metrics_csv(&[(&nce, &m)]))?;
            write_text(&json_path, &metrics_json(&nce, &m).to_string())?;
        }
        Some(path) => {
            let ref_det = read_annotations(path)?;
            let rm = match_annotations(&reference, &ref_det, a.half_width)?;
            let rr =
                MetricsReport::from_match(&rm, snr(&ref_det), a.record_id.clone(), "reference");
            let table = compare_report(&[(nce.clone(), rr.clone())])?;
            write_text(&a.out, &table.to_csv())?;
            write_text(&json_path, &table.to_json().to_string())?;
            extra["reference"] = metrics_json(&rr, &rm);
        }
    }
    Ok(summary("eval", &[a.out.clone(), json_path], extra))
}

fn sensitivity(has_config: bool, cfg: &ExperimentConfig<f64>, a: &SensitivityArgs) -> CmdResult {
    let mut adc: AdcConfig<f64> = match &a.adc_config {
        Some(path) => load_config(path)?,
        None if has_config => cfg.adc,
        None => AdcConfig::default(),
    };
    if let Some(v) = a.vref {
        adc.vref = v;
    }
    if let Some(v) = a.pga {
        adc.pga_gain = v;
    }
    if let Some(v) = a.afe {
        adc.afe_gain = v;
    }
    if let Some(b) = a.bits {
        adc.resolution_bits = b;
    }
    let v = adc_sensitivity(&adc)?;
    Ok(summary(
        "sensitivity",
        &[],
        json!({
            "volts_per_lsb": v,
            "microvolts_per_lsb": v * 1e6,
            "vref_v": adc.vref,
            "pga_gain": adc.pga_gain,
            "afe_gain": adc.afe_gain,
            "resolution_bits": adc.resolution_bits,
        }),
    ))
}
