//! Cross-product sweeps and the energy-efficiency study.
//!
//! Points that share geometry (ISD, UE density and distribution, carrier)
//! are evaluated on the same prepared runs, and every point uses the same
//! run seeds, so comparisons between points use common random numbers.

use crate::energy::SleepModel;
use crate::error::{Error, Result};
use crate::scenario::{ScenarioConfig, UeDistribution, REFERENCE_ISDS_M};

use super::config::{self, normalize_key, split_list, KeyValues};
use super::stats::{aggregate, CdfGrid, Summary};
use super::{simulate_variants, RunMetrics, Variant};

/// Lists to cross. An empty `bandwidths_hz` means 5 % of each carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub isds_m: Vec<f64>,
    pub ue_densities: Vec<f64>,
    pub ue_distributions: Vec<UeDistribution>,
    pub idle: Vec<bool>,
    pub sleep_models: Vec<SleepModel>,
    pub carriers_ghz: Vec<f64>,
    pub bandwidths_hz: Vec<f64>,
    pub antennas: Vec<u32>,
    pub target_snrs_db: Vec<f64>,
}

impl SweepSpec {
    /// A one-point sweep at `base`.
    pub fn single(base: &ScenarioConfig) -> Self {
        SweepSpec {
            isds_m: vec![base.isd_m],
            ue_densities: vec![base.ue_density_per_km2],
            ue_distributions: vec![base.ue_distribution],
            idle: vec![base.idle_mode_enabled],
            sleep_models: vec![base.sleep_model],
            carriers_ghz: vec![base.carrier_ghz],
            bandwidths_hz: base.bandwidth_hz.into_iter().collect(),
            antennas: vec![base.num_bs_antennas],
            target_snrs_db: vec![base.target_edge_snr_db],
            base: base.clone(),
        }
    }

    /// Builds a sweep from settings whose values may be comma-separated
    /// lists. Without an `isd` entry the reference ISDs are swept.
    pub fn from_key_values(base: &ScenarioConfig, kv: &KeyValues) -> Result<Self> {
        let mut spec = SweepSpec::single(base);
        spec.isds_m = REFERENCE_ISDS_M.to_vec();
        fn list<T>(key: &str, value: &str, f: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
            let items = split_list(value);
            if items.is_empty() {
                return Err(Error::InvalidConfig(format!("{key}: empty list")));
            }
            items.into_iter().map(|v| f(key, v)).collect()
        }
        for (k, v) in kv {
            match normalize_key(k).as_str() {
                "isd" => spec.isds_m = list(k, v, config::parse_f64)?,
                "uedensity" => spec.ue_densities = list(k, v, config::parse_f64)?,
                "uedist" => spec.ue_distributions = list(k, v, |_, s| s.parse())?,
                "idle" => spec.idle = list(k, v, config::parse_on_off)?,
                "sleepmodel" => spec.sleep_models = list(k, v, |_, s| s.parse())?,
                "carrierghz" => spec.carriers_ghz = list(k, v, config::parse_f64)?,
                "bandwidthhz" => spec.bandwidths_hz = list(k, v, config::parse_f64)?,
                "antennas" => spec.antennas = list(k, v, config::parse_antennas)?,
                "targetsnrdb" => spec.target_snrs_db = list(k, v, config::parse_f64)?,
                _ => config::apply_setting(&mut spec.base, k, v)?,
            }
        }
        Ok(spec)
    }

    /// Every point in a fixed order: ISD, density, distribution, carrier,
    /// bandwidth, idle, sleep model, antennas, target SNR (last varies
    /// fastest).
    pub fn points(&self) -> Vec<ScenarioConfig> {
        let bws: Vec<Option<f64>> = if self.bandwidths_hz.is_empty() {
            vec![None]
        } else {
            self.bandwidths_hz.iter().map(|&b| Some(b)).collect()
        };
        let mut out = Vec::new();
        for &isd in &self.isds_m {
            for &d in &self.ue_densities {
                for &ud in &self.ue_distributions {
                    for &f in &self.carriers_ghz {
                        for &b in &bws {
                            for &idle in &self.idle {
                                for &sm in &self.sleep_models {
                                    for &a in &self.antennas {
                                        for &t in &self.target_snrs_db {
                                            out.push(ScenarioConfig {
                                                isd_m: isd,
                                                ue_density_per_km2: d,
                                                ue_distribution: ud,
                                                carrier_ghz: f,
                                                bandwidth_hz: b,
                                                idle_mode_enabled: idle,
                                                sleep_model: sm,
                                                num_bs_antennas: a,
                                                target_edge_snr_db: t,
                                                ..self.base.clone()
                                            });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn same_geometry(a: &ScenarioConfig, b: &ScenarioConfig) -> bool {
    a.isd_m == b.isd_m
        && a.ue_density_per_km2 == b.ue_density_per_km2
        && a.ue_distribution == b.ue_distribution
        && a.carrier_ghz == b.carrier_ghz
}

/// Runs every point, evaluating points with shared geometry together.
/// Results are returned in point order.
pub fn run_points(points: &[ScenarioConfig]) -> Result<Vec<Vec<RunMetrics>>> {
    let mut results: Vec<Option<Vec<RunMetrics>>> = vec![None; points.len()];
    for i in 0..points.len() {
        if results[i].is_some() {
            continue;
        }
        let group: Vec<usize> = (i..points.len())
            .filter(|&j| results[j].is_none() && same_geometry(&points[i], &points[j]))
            .collect();
        let variants: Vec<Variant> = group.iter().map(|&j| Variant::of(&points[j])).collect();
        let runs = simulate_variants(&points[i], &variants)?;
        for (j, r) in group.into_iter().zip(runs) {
            results[j] = Some(r);
        }
    }
    Ok(results.into_iter().map(|r| r.expect("every point evaluated")).collect())
}

/// Runs and summarizes every point of a sweep.
pub fn run_sweep(spec: &SweepSpec, grid: &CdfGrid) -> Result<Vec<(ScenarioConfig, Summary)>> {
    let points = spec.points();
    let runs = run_points(&points)?;
    points
        .into_iter()
        .zip(runs)
        .map(|(p, r)| Ok((p, aggregate(&r, grid)?)))
        .collect()
}

/// Mean energy efficiency for one (ISD, antennas, sleep model).
#[derive(Debug, Clone, PartialEq)]
pub struct EeRecord {
    pub isd_m: f64,
    pub antennas: u32,
    pub sleep_model: SleepModel,
    pub mean_ee_bps_per_w: f64,
    /// Per-run values, in run order.
    pub run_ee_bps_per_w: Vec<f64>,
}

/// Energy efficiency with idle mode on for every ISD, antenna count and
/// sleep model. Bandwidth defaults to 20 MHz, the bandwidth of the power
/// model; each ISD must have a power-table row.
pub fn run_ee_study(base: &ScenarioConfig, isds_m: &[f64], antennas: &[u32]) -> Result<Vec<EeRecord>> {
    let mut out = Vec::new();
    for &isd in isds_m {
        let cfg = ScenarioConfig {
            isd_m: isd,
            idle_mode_enabled: true,
            bandwidth_hz: Some(base.bandwidth_hz.unwrap_or(20e6)),
            ..base.clone()
        };
        let variants: Vec<Variant> = antennas
            .iter()
            .map(|&a| Variant {
                num_bs_antennas: a,
                ..Variant::of(&cfg)
            })
            .collect();
        let runs = simulate_variants(&cfg, &variants)?;
        for (&a, runs) in antennas.iter().zip(&runs) {
            for sm in SleepModel::ALL {
                let per_run: Vec<f64> = runs.iter().map(|r| r.ee_with(isd, a, sm)).collect::<Result<_>>()?;
                out.push(EeRecord {
                    isd_m: isd,
                    antennas: a,
                    sleep_model: sm,
                    mean_ee_bps_per_w: per_run.iter().sum::<f64>() / per_run.len() as f64,
                    run_ee_bps_per_w: per_run,
                });
            }
        }
    }
    Ok(out)
}
