//! `key = value` configuration files.
//!
//! Keys are the command-line flag names without leading dashes
//! (`ue-density = 300`). Dashes and underscores inside keys are ignored,
//! so `ue_density` and `uedensity` are accepted too. `#` starts a comment.
//! Sweep files may give comma-separated lists.

use std::collections::BTreeMap;
use std::path::Path;

use crate::energy::SleepModel;
use crate::error::{Error, Result};
use crate::link::EdgeConvention;
use crate::fastfading::KFactorModel;
use crate::scenario::{ScenarioConfig, UeDistribution};

/// Raw settings keyed by normalized name.
pub type KeyValues = BTreeMap<String, String>;

/// Keys accepted in configuration files and their meaning.
pub const KNOWN_KEYS: &[(&str, &str)] = &[
    ("isd", "inter-site distance in m"),
    ("ue-density", "UEs per km²"),
    ("ue-dist", "uniform | hotspot"),
    ("idle", "on | off"),
    ("sleep-model", "1..5"),
    ("carrier-ghz", "carrier frequency in GHz"),
    ("bandwidth-hz", "bandwidth in Hz (default 5 % of the carrier)"),
    ("antennas", "1 | 2 | 4"),
    ("target-snr-db", "cell-edge SNR target in dB"),
    ("runs", "Monte-Carlo runs"),
    ("seed", "master seed"),
    ("out", "output directory"),
    ("region-side-m", "side of the square region in m"),
    ("noise-figure-db", "UE noise figure in dB"),
    ("edge", "sqrt3/2 | circumradius (calibration edge distance)"),
    ("shadow-decorrelation-m", "shadowing decorrelation distance in m"),
    ("k-fit-distance-m", "distance at which the Rician K decay is fitted"),
    ("ues-per-bs", "UEs per cell in the scheduler study"),
    ("ttis", "TTIs per drop in the scheduler study"),
];

pub fn normalize_key(key: &str) -> String {
    key.trim()
        .trim_start_matches('-')
        .chars()
        .filter(|c| *c != '-' && *c != '_')
        .flat_map(char::to_lowercase)
        .collect()
}

fn is_known(norm: &str) -> bool {
    KNOWN_KEYS.iter().any(|(k, _)| normalize_key(k) == norm)
}

/// Parses `key = value` lines. `origin` names the source in errors.
pub fn parse_key_values(text: &str, origin: &str) -> Result<KeyValues> {
    let mut out = KeyValues::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: origin.to_string(),
            line: i + 1,
            message,
        };
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let key = normalize_key(k);
        if !is_known(&key) {
            return Err(err(format!("unknown key '{}'", k.trim())));
        }
        let value = v.trim();
        if value.is_empty() {
            return Err(err(format!("missing value for '{}'", k.trim())));
        }
        out.insert(key, value.to_string());
    }
    Ok(out)
}

pub fn read_key_values(path: &Path) -> Result<KeyValues> {
    let text = std::fs::read_to_string(path)?;
    parse_key_values(&text, &path.display().to_string())
}

fn invalid(key: &str, value: &str, what: &str) -> Error {
    Error::InvalidConfig(format!("{key} = {value}: {what}"))
}

pub fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| invalid(key, value, "expected a number"))
}

pub fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value.trim().parse::<u64>().map_err(|_| invalid(key, value, "expected a non-negative integer"))
}

pub fn parse_on_off(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(invalid(key, value, "expected on or off")),
    }
}

pub fn parse_antennas(key: &str, value: &str) -> Result<u32> {
    match parse_u64(key, value)? {
        n @ (1 | 2 | 4) => Ok(n as u32),
        _ => Err(invalid(key, value, "expected 1, 2 or 4")),
    }
}

pub fn parse_edge(key: &str, value: &str) -> Result<EdgeConvention> {
    match value.trim().to_ascii_lowercase().as_str() {
        "sqrt3/2" | "halfsqrt3" | "verbatim" => Ok(EdgeConvention::HalfSqrt3),
        "circumradius" | "isd/sqrt3" => Ok(EdgeConvention::Circumradius),
        _ => Err(invalid(key, value, "expected sqrt3/2 or circumradius")),
    }
}

/// Splits a comma-separated list.
pub fn split_list(value: &str) -> Vec<&str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Applies one setting to a scenario. Keys that do not describe a
/// scenario (`out`, `ues-per-bs`, `ttis`) are ignored here.
pub fn apply_setting(cfg: &mut ScenarioConfig, key: &str, value: &str) -> Result<()> {
    match normalize_key(key).as_str() {
        "isd" => cfg.isd_m = parse_f64(key, value)?,
        "uedensity" => cfg.ue_density_per_km2 = parse_f64(key, value)?,
        "uedist" => cfg.ue_distribution = value.parse::<UeDistribution>()?,
        "idle" => cfg.idle_mode_enabled = parse_on_off(key, value)?,
        "sleepmodel" => cfg.sleep_model = value.parse::<SleepModel>()?,
        "carrierghz" => cfg.carrier_ghz = parse_f64(key, value)?,
        "bandwidthhz" => cfg.bandwidth_hz = Some(parse_f64(key, value)?),
        "antennas" => cfg.num_bs_antennas = parse_antennas(key, value)?,
        "targetsnrdb" => cfg.target_edge_snr_db = parse_f64(key, value)?,
        "runs" => cfg.runs = parse_u64(key, value)?,
        "seed" => cfg.seed = parse_u64(key, value)?,
        "regionsidem" => cfg.region_side_m = parse_f64(key, value)?,
        "noisefiguredb" => cfg.model.radio.ue_noise_figure_db = parse_f64(key, value)?,
        "edge" => cfg.model.radio.edge = parse_edge(key, value)?,
        "shadowdecorrelationm" => cfg.model.shadow.decorrelation_m = parse_f64(key, value)?,
        "kfitdistancem" => cfg.model.kfactor = KFactorModel::fitted_at(parse_f64(key, value)?),
        "out" | "uesperbs" | "ttis" => {}
        other => return Err(Error::InvalidConfig(format!("unknown key '{other}'"))),
    }
    Ok(())
}

/// Applies every setting; later layers should be applied afterwards to
/// take precedence.
pub fn apply_all(cfg: &mut ScenarioConfig, kv: &KeyValues) -> Result<()> {
    for (k, v) in kv {
        apply_setting(cfg, k, v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_syntax() {
        let kv = parse_key_values("# comment\nisd = 35\n ue-density=300 # trailing\n\nue_dist = hotspot\n", "t").unwrap();
        assert_eq!(kv.get("isd").map(String::as_str), Some("35"));
        assert_eq!(kv.get("uedensity").map(String::as_str), Some("300"));
        assert_eq!(kv.get("uedist").map(String::as_str), Some("hotspot"));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(parse_key_values("isd 35", "f"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_key_values("\nbogus = 1", "f"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_key_values("isd =", "f").is_err());
    }

    #[test]
    fn applies_settings() {
        let mut cfg = ScenarioConfig::default();
        let kv = parse_key_values(
            "isd = 10\nidle = off\nsleep-model = 4\nantennas = 2\ncarrier-ghz = 10\nue-dist = uniform\nedge = circumradius",
            "t",
        )
        .unwrap();
        apply_all(&mut cfg, &kv).unwrap();
        assert_eq!(cfg.isd_m, 10.0);
        assert!(!cfg.idle_mode_enabled);
        assert_eq!(cfg.sleep_model, SleepModel::Sm4);
        assert_eq!(cfg.num_bs_antennas, 2);
        assert_eq!(cfg.bandwidth_hz(), 500e6);
        assert_eq!(cfg.ue_distribution, UeDistribution::Uniform);
        assert_eq!(cfg.model.radio.edge, EdgeConvention::Circumradius);
        assert!(apply_setting(&mut cfg, "antennas", "3").is_err());
        assert!(apply_setting(&mut cfg, "idle", "maybe").is_err());
    }
}
