//! Flat `key = value` configuration files (TOML syntax) with unit-bearing
//! key names. Every key has a short alias (`rf1` for `rf1_ohm`). Unknown
//! keys are rejected, missing keys keep their defaults and the result is
//! validated after loading.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::circuit::CircuitParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signals::{AdcConfig, SynthesisConfig};

/// A configuration value after TOML parsing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfigValue {
    Number(f64),
    Integer(i64),
    Bool(bool),
}

/// Types that can be read from and echoed to a flat config file.
pub trait ConfigFile: Sized + Default {
    /// Canonical key names with their aliases, in echo order.
    fn keys() -> &'static [(&'static str, &'static str)];

    /// Applies `key` (canonical name), returning an error for a bad value.
    fn set(&mut self, key: &str, value: ConfigValue) -> Result<()>;

    fn get(&self, key: &str) -> ConfigValue;

    fn validate(&self) -> Result<()>;

    /// Maps a canonical key or alias to the canonical key.
    fn canonical(name: &str) -> Option<&'static str> {
        Self::keys()
            .iter()
            .find(|(k, a)| *k == name || *a == name)
            .map(|(k, _)| *k)
    }

    /// One `key = value` line per field, numbers in `{:e}` notation.
    fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (k, _) in Self::keys() {
            match self.get(k) {
                ConfigValue::Number(v) => writeln!(out, "{k} = {}", format_number(v)),
                ConfigValue::Integer(v) => writeln!(out, "{k} = {v}"),
                ConfigValue::Bool(b) => writeln!(out, "{k} = {b}"),
            }
            .expect("write to String");
        }
        out
    }
}

fn format_number(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses flat TOML into `(key, value, line)` triples.
fn parse_flat(text: &str, path: &Path) -> Result<Vec<(String, ConfigValue, usize)>> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
        path: path.to_path_buf(),
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let mut out = Vec::with_capacity(table.len());
    for (key, value) in table {
        let line = text
            .lines()
            .position(|l| {
                let l = l.trim_start();
                l.strip_prefix(key.as_str())
                    .is_some_and(|rest| rest.trim_start().starts_with('='))
            })
            .map_or(1, |i| i + 1);
        let v = match value {
            toml::Value::Float(f) => ConfigValue::Number(f),
            toml::Value::Integer(i) => ConfigValue::Integer(i),
            toml::Value::Boolean(b) => ConfigValue::Bool(b),
            other => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!(
                        "key '{key}': expected a number or boolean, found {}",
                        other.type_str()
                    ),
                })
            }
        };
        out.push((key, v, line));
    }
    Ok(out)
}

fn number(key: &str, v: ConfigValue) -> Result<f64> {
    match v {
        ConfigValue::Number(x) => Ok(x),
        ConfigValue::Integer(i) => Ok(i as f64),
        ConfigValue::Bool(_) => Err(Error::param(key, "expected a number")),
    }
}

fn boolean(key: &str, v: ConfigValue) -> Result<bool> {
    match v {
        ConfigValue::Bool(b) => Ok(b),
        _ => Err(Error::param(key, "expected true or false")),
    }
}

/// Routes each parsed entry to the first target that knows its key.
/// A field may be given once, under its canonical name or its alias.
fn apply_entries(text: &str, path: &Path, targets: &mut [&mut dyn DynConfig]) -> Result<()> {
    let mut seen: BTreeSet<(usize, &'static str)> = BTreeSet::new();
    for (key, value, line) in parse_flat(text, path)? {
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let Some((idx, canon)) = targets
            .iter()
            .enumerate()
            .find_map(|(i, t)| t.canonical_key(&key).map(|c| (i, c)))
        else {
            return Err(parse_err(format!("unknown key '{key}'")));
        };
        if !seen.insert((idx, canon)) {
            return Err(parse_err(format!("'{canon}' given more than once")));
        }
        targets[idx].set_value(canon, value)?;
    }
    Ok(())
}

/// Object-safe view of [`ConfigFile`] used to route keys.
trait DynConfig {
    fn canonical_key(&self, name: &str) -> Option<&'static str>;
    fn set_value(&mut self, key: &str, value: ConfigValue) -> Result<()>;
}

impl<C: ConfigFile> DynConfig for C {
    fn canonical_key(&self, name: &str) -> Option<&'static str> {
        C::canonical(name)
    }

    fn set_value(&mut self, key: &str, value: ConfigValue) -> Result<()> {
        self.set(key, value)
    }
}

/// Parses `text` into `C`, starting from `C::default()`.
pub fn parse_config<C: ConfigFile>(text: &str, path: &Path) -> Result<C> {
    let mut c = C::default();
    apply_entries(text, path, &mut [&mut c])?;
    c.validate()?;
    Ok(c)
}

pub fn load_config<C: ConfigFile>(path: &Path) -> Result<C> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

pub fn write_config<C: ConfigFile>(path: &Path, c: &C) -> Result<()> {
    fs::write(path, c.to_config_string()).map_err(|e| Error::io(path, e))
}

/// Circuit, synthesis and converter settings read from one file whose keys
/// may belong to any of the three. `sample_rate_hz` sets both the synthesis
/// and the converter rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExperimentConfig<T: Scalar> {
    pub circuit: CircuitParams<T>,
    pub synthesis: SynthesisConfig<T>,
    pub adc: AdcConfig<T>,
}

impl<T: Scalar> ExperimentConfig<T> {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut e = ExperimentConfig::default();
        apply_entries(
            text,
            path,
            &mut [&mut e.circuit, &mut e.synthesis, &mut e.adc],
        )?;
        e.adc.sample_rate = e.synthesis.sample_rate;
        e.circuit.validate()?;
        e.synthesis.validate()?;
        e.adc.validate()?;
        Ok(e)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_config_string(&self) -> String {
        let mut adc_keys = self.adc.to_config_string();
        adc_keys = adc_keys
            .lines()
            .filter(|l| !l.starts_with("sample_rate_hz"))
            .map(|l| format!("{l}\n"))
            .collect();
        self.circuit.to_config_string() + &self.synthesis.to_config_string() + &adc_keys
    }
}

macro_rules! numeric_config {
    ($ty:ident; $($canon:literal | $alias:literal => $($field:ident).+;)*
     extra { $($xcanon:literal | $xalias:literal;)* }
     set_extra($s:ident, $k:ident, $v:ident) $set_extra:block
     get_extra($g:ident, $gk:ident) $get_extra:block
     validate($vs:ident) $validate:block) => {
        impl<T: Scalar> ConfigFile for $ty<T> {
            fn keys() -> &'static [(&'static str, &'static str)] {
                &[$(($canon, $alias),)* $(($xcanon, $xalias),)*]
            }

            fn set(&mut self, key: &str, value: ConfigValue) -> Result<()> {
                match key {
                    $($canon => {
                        self.$($field).+ = T::lit(number(key, value)?);
                        Ok(())
                    })*
                    _ => {
                        let ($s, $k, $v) = (self, key, value);
                        $set_extra
                    }
                }
            }

            fn get(&self, key: &str) -> ConfigValue {
                match key {
                    $($canon => ConfigValue::Number(self.$($field).+.as_f64()),)*
                    _ => {
                        let ($g, $gk) = (self, key);
                        $get_extra
                    }
                }
            }

            fn validate(&self) -> Result<()> {
                let $vs = self;
                $validate
            }
        }
    };
}

numeric_config! {
    CircuitParams;
    "cs_farad" | "cs" => cs;
    "rs_ohm" | "rs" => rs;
    "rin_ohm" | "rin" => rin;
    "cin_farad" | "cin" => cin;
    "rd_ohm" | "rd" => rd;
    "rb_ohm" | "rb" => rb;
    "rc_ohm" | "rc" => rc;
    "rf1_ohm" | "rf1" => rf1;
    "rf2_ohm" | "rf2" => rf2;
    "cf1_farad" | "cf1" => cf1;
    "rn1_ohm" | "rn1" => rn1;
    "rn2_ohm" | "rn2" => rn2;
    "cn_farad" | "cn" => cn;
    "r2_ohm" | "r2" => r2;
    "c2_farad" | "c2" => c2;
    "r3_ohm" | "r3" => r3;
    "c3_farad" | "c3" => c3;
    extra { "neutralization" | "neutralization_enabled"; }
    set_extra(s, k, v) {
        s.neutralization_enabled = boolean(k, v)?;
        Ok(())
    }
    get_extra(s, _k) { ConfigValue::Bool(s.neutralization_enabled) }
    validate(s) { CircuitParams::validate(s) }
}

numeric_config! {
    SynthesisConfig;
    "maternal_rate_bpm" | "maternal_bpm" => maternal.rate_bpm;
    "maternal_r_amplitude_v" | "maternal_amplitude" => maternal.r_amplitude;
    "maternal_hrv_jitter" | "maternal_jitter" => maternal.hrv_jitter;
    "fetal_rate_bpm" | "fetal_bpm" => fetal.heart.rate_bpm;
    "fetal_r_amplitude_v" | "fetal_amplitude" => fetal.heart.r_amplitude;
    "fetal_hrv_jitter" | "fetal_jitter" => fetal.heart.hrv_jitter;
    "fetal_attenuation" | "attenuation" => fetal.attenuation;
    "noise_white_v_per_rthz" | "noise_white" => noise.white_density;
    "noise_flicker_corner_hz" | "flicker_corner" => noise.flicker_corner_hz;
    "noise_current_a_per_rthz" | "noise_current" => noise.current_density;
    "mains_hz" | "mains" => noise.mains_hz;
    "mains_amplitude_v" | "mains_amplitude" => noise.mains_amplitude;
    "duration_s" | "duration" => duration_s;
    "sample_rate_hz" | "fs" => sample_rate;
    extra {}
    set_extra(_s, k, _v) { Err(Error::param(k, "unknown field")) }
    get_extra(_s, _k) { ConfigValue::Number(f64::NAN) }
    validate(s) { SynthesisConfig::validate(s) }
}

numeric_config! {
    AdcConfig;
    "vref_v" | "vref" => vref;
    "pga_gain" | "pga" => pga_gain;
    "afe_gain" | "afe" => afe_gain;
    "sample_rate_hz" | "fs" => sample_rate;
    extra { "resolution_bits" | "bits"; }
    set_extra(s, k, v) {
        match v {
            ConfigValue::Integer(b) if (16..=24).contains(&b) => {
                s.resolution_bits = b as u8;
                Ok(())
            }
            _ => Err(Error::param(k, "must be 16 or 24")),
        }
    }
    get_extra(s, _k) { ConfigValue::Integer(s.resolution_bits as i64) }
    validate(s) { AdcConfig::validate(s) }
}
