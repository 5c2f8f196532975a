use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nce(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nce"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn nce")
}

fn summary(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "stdout must be one JSON line: {text}");
    serde_json::from_str(lines[0]).expect("JSON summary")
}

fn ok(dir: &Path, args: &[&str]) -> Value {
    let out = nce(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = summary(&out);
    assert_eq!(s["status"], "ok");
    for f in s["files"].as_array().unwrap() {
        assert!(dir.join(f.as_str().unwrap()).exists(), "missing {f}");
    }
    s
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    nce(dir, args).status.code().unwrap()
}

#[test]
fn bode_defaults_are_flat_near_20_8_db() {
    let dir = tempfile::tempdir().unwrap();
    let s = ok(dir.path(), &["bode"]);
    let c = &s["curves"][0];
    assert_eq!(c["cs_pf"], 100.0);
    let g = c["midband_gain_db"].as_f64().unwrap();
    assert!((g - 20.83).abs() < 0.05, "{g}");
    let lo = c["corners_hz"][0].as_f64().unwrap();
    let hi = c["corners_hz"][1].as_f64().unwrap();
    assert!((lo - 0.07).abs() < 0.0035 && (hi - 250.0).abs() < 12.5);

    let text = std::fs::read_to_string(dir.path().join("bode_cs100pF.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("frequency_hz,gain_db,phase_deg"));
    assert_eq!(text.lines().count(), 401);
}

#[test]
fn bode_writes_one_file_per_capacitance() {
    let dir = tempfile::tempdir().unwrap();
    let s = ok(dir.path(), &["bode", "--cs", "5,30,100", "--points", "50"]);
    assert_eq!(s["files"].as_array().unwrap().len(), 3);
    for c in s["curves"].as_array().unwrap() {
        assert!((c["midband_gain_db"].as_f64().unwrap() - 20.83).abs() < 0.1);
    }
}

#[test]
fn bode_rejects_inverted_range() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(dir.path(), &["bode", "--fmin", "100", "--fmax", "10"]),
        2
    );
    assert_eq!(code(dir.path(), &["bode", "--points", "1"]), 2);
}

#[test]
fn gain_sweep_on_is_constant_off_increases() {
    let dir = tempfile::tempdir().unwrap();
    let on = ok(
        dir.path(),
        &["gain-sweep", "--cs-list", "5,30,100", "--out", "on.csv"],
    );
    for g in on["gains"].as_array().unwrap() {
        assert!((g["gain_vv"].as_f64().unwrap() - 11.0).abs() < 0.22);
    }
    let off = ok(
        dir.path(),
        &[
            "gain-sweep",
            "--cs-list",
            "5,30,100",
            "--neutralization",
            "off",
            "--out",
            "off.csv",
        ],
    );
    let gains: Vec<f64> = off["gains"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["gain_vv"].as_f64().unwrap())
        .collect();
    assert!(gains.windows(2).all(|w| w[1] > w[0]), "{gains:?}");
    assert_eq!(code(dir.path(), &["gain-sweep", "--cs-list", ""]), 2);
}

#[test]
fn noise_anchor_and_direction() {
    let dir = tempfile::tempdir().unwrap();
    let get = |cs: &str| {
        let s = ok(
            dir.path(),
            &[
                "noise",
                "--cs",
                cs,
                "--duration",
                "120",
                "--out",
                &format!("n{cs}.csv"),
            ],
        );
        s["input_referred_10hz_v_per_rthz"].as_f64().unwrap()
    };
    let n30 = get("30");
    let n5 = get("5");
    let n100 = get("100");
    assert!(n30 > 0.5e-6 && n30 < 2e-6, "{n30}");
    assert!(n5 >= n100, "{n5} vs {n100}");
    assert_eq!(code(dir.path(), &["noise", "--duration", "0"]), 2);
}

#[test]
fn synth_is_reproducible_and_counts_beats() {
    let dir = tempfile::tempdir().unwrap();
    let s = ok(
        dir.path(),
        &[
            "synth",
            "--seed",
            "9",
            "--duration",
            "60",
            "--out",
            "a.nceb",
        ],
    );
    let fetal = s["fetal_beats"].as_u64().unwrap();
    assert!((138..=142).contains(&fetal), "{fetal}");
    ok(
        dir.path(),
        &[
            "synth",
            "--seed",
            "9",
            "--duration",
            "60",
            "--out",
            "b.nceb",
        ],
    );
    let a = std::fs::read(dir.path().join("a.nceb")).unwrap();
    let b = std::fs::read(dir.path().join("b.nceb")).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        std::fs::read(dir.path().join("a.fetal.txt")).unwrap(),
        std::fs::read(dir.path().join("b.fetal.txt")).unwrap()
    );
    assert_eq!(code(dir.path(), &["synth", "--seed", "1"]), 2);
}

#[test]
fn synth_honours_config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.toml"),
        "duration_s = 10.0\nfetal_rate_bpm = 120.0\n",
    )
    .unwrap();
    let s = ok(
        dir.path(),
        &["--config", "exp.toml", "synth", "--out", "r.nceb"],
    );
    assert_eq!(s["samples"], 5000);
    let beats = s["fetal_beats"].as_u64().unwrap();
    assert!((19..=21).contains(&beats), "{beats}");
    let s = ok(
        dir.path(),
        &[
            "--config",
            "exp.toml",
            "synth",
            "--duration",
            "4",
            "--out",
            "r.nceb",
        ],
    );
    assert_eq!(s["samples"], 2000);

    std::fs::write(dir.path().join("bad.toml"), "no_such_key = 1.0\n").unwrap();
    assert_eq!(code(dir.path(), &["--config", "bad.toml", "bode"]), 22);
}

#[test]
fn process_then_eval_scores_clean_synthetic() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "synth",
            "--seed",
            "2",
            "--duration",
            "60",
            "--out",
            "r.nceb",
        ],
    );
    let p = ok(
        dir.path(),
        &[
            "process",
            "--in",
            "r.nceb",
            "--out-annotations",
            "det.txt",
            "--artifacts-dir",
            "art",
        ],
    );
    assert_eq!(p["files"].as_array().unwrap().len(), 4);
    let first = std::fs::read(dir.path().join("det.txt")).unwrap();
    ok(
        dir.path(),
        &["process", "--in", "r.nceb", "--out-annotations", "det2.txt"],
    );
    assert_eq!(first, std::fs::read(dir.path().join("det2.txt")).unwrap());

    let e = ok(
        dir.path(),
        &[
            "eval",
            "--ref",
            "r.fetal.txt",
            "--det",
            "det.txt",
            "--record",
            "r.nceb",
        ],
    );
    assert!(e["nce"]["f1"].as_f64().unwrap() >= 0.95);
    assert!(e["nce"]["snr_db"].is_number());
}

#[test]
fn process_rejects_empty_record() {
    let dir = tempfile::tempdir().unwrap();
    nce_core::io::write_codes(
        &dir.path().join("empty.nceb"),
        &[],
        &nce_core::signals::AdcConfig::default(),
    )
    .unwrap();
    assert_eq!(
        code(
            dir.path(),
            &[
                "process",
                "--in",
                "empty.nceb",
                "--out-annotations",
                "d.txt"
            ]
        ),
        12
    );
}

#[test]
fn eval_identity_and_paired_table() {
    let dir = tempfile::tempdir().unwrap();
    let times: String = (0..100)
        .map(|i| format!("{:.6}\n", 0.5 + i as f64 * 0.43))
        .collect();
    std::fs::write(dir.path().join("ref.txt"), &times).unwrap();
    let e = ok(
        dir.path(),
        &["eval", "--ref", "ref.txt", "--det", "ref.txt"],
    );
    for k in ["se", "ppv", "acc", "f1"] {
        assert_eq!(e["nce"][k], 1.0);
    }

    // 96 hits, 4 misses, 5 spurious detections far from any reference.
    let mut det: Vec<String> = times.lines().take(96).map(String::from).collect();
    det.extend((0..5).map(|i| format!("{:.6}", 60.0 + i as f64 * 0.43)));
    std::fs::write(dir.path().join("det.txt"), det.join("\n") + "\n").unwrap();
    let e = ok(
        dir.path(),
        &[
            "eval",
            "--ref",
            "ref.txt",
            "--det",
            "det.txt",
            "--paired-reference-run",
            "ref.txt",
            "--out",
            "table.csv",
        ],
    );
    assert_eq!(e["nce"]["tp"], 96);
    assert_eq!(e["nce"]["fn"], 4);
    assert_eq!(e["nce"]["fp"], 5);
    let r4 = |v: &Value| (v.as_f64().unwrap() * 1e4).round() / 1e4;
    assert_eq!(r4(&e["nce"]["se"]), 0.96);
    assert_eq!(r4(&e["nce"]["ppv"]), 0.9505);
    assert_eq!(r4(&e["nce"]["f1"]), 0.9552);
    let table = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert!(table
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("record,,,100.00,96.00,100.00,95.05"));
    assert!(dir.path().join("table.json").exists());
}

#[test]
fn eval_missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = nce(
        dir.path(),
        &["eval", "--ref", "nope.txt", "--det", "nope.txt"],
    );
    assert_eq!(out.status.code(), Some(20));
    let s = summary(&out);
    assert_eq!(s["status"], "error");
    assert_eq!(s["files"].as_array().unwrap().len(), 0);
}

#[test]
fn sensitivity_values_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let s = ok(dir.path(), &["sensitivity"]);
    let uv = s["microvolts_per_lsb"].as_f64().unwrap();
    assert_eq!(format!("{uv:.3}"), "0.002");
    let s = ok(dir.path(), &["sensitivity", "--pga", "1", "--afe", "1"]);
    let uv = s["microvolts_per_lsb"].as_f64().unwrap();
    assert!((uv - 0.536).abs() < 5e-4, "{uv}");
    assert_eq!(code(dir.path(), &["sensitivity", "--bits", "12"]), 10);

    std::fs::write(
        dir.path().join("adc.toml"),
        "pga_gain = 1.0\nafe_gain = 1.0\n",
    )
    .unwrap();
    let s = ok(dir.path(), &["sensitivity", "--adc-config", "adc.toml"]);
    assert!((s["microvolts_per_lsb"].as_f64().unwrap() - 0.536).abs() < 5e-4);
}

#[test]
fn help_is_available_for_every_command() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [
        "bode",
        "gain-sweep",
        "noise",
        "synth",
        "process",
        "eval",
        "sensitivity",
    ] {
        let out = nce(dir.path(), &[cmd, "--help"]);
        assert!(out.status.success(), "{cmd}");
    }
}
