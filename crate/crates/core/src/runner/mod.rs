//! Monte-Carlo engine: per-run pipeline, multi-run orchestration,
//! configuration files, sweeps and CSV output.

pub mod config;
pub mod output;
pub mod stats;
pub mod sweep;

use rayon::prelude::*;

use crate::energy::{network_energy_efficiency_bps_per_w, NetworkLoad, SleepModel};
use crate::error::{Error, Result};
use crate::link::{self, LinkGains};
use crate::propagation::ShadowField;
use crate::rng;
use crate::scenario::{build_hex_grid, drop_ues, Deployment, ScenarioConfig};

/// Statistics of one simulation run. UEs camped on guard-tier sites are
/// left out of every list and count.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub run_index: u64,
    /// Data SINR of served UEs and pilot SINR of coverage holes.
    pub sinr_samples_db: Vec<f64>,
    /// Throughput of served UEs.
    pub ue_throughputs_bps: Vec<f64>,
    pub interior_sites: usize,
    pub active_interior_sites: usize,
    pub active_sites_per_km2: f64,
    pub mean_ues_per_active_site: f64,
    /// Transmit power of every site (all sites share one calibration).
    pub tx_power_dbm: f64,
    pub network_tx_power_dbm_per_km2: f64,
    pub served_throughput_bps: f64,
    pub ee_bps_per_w: Option<f64>,
    pub coverage_holes: usize,
    pub coverage_hole_fraction: f64,
}

impl RunMetrics {
    /// Energy efficiency of this run under another idle profile.
    pub fn ee_with(&self, isd_m: f64, antennas: u32, profile: SleepModel) -> Result<f64> {
        network_energy_efficiency_bps_per_w(
            &NetworkLoad {
                isd_m,
                antennas,
                served_throughput_bps: self.served_throughput_bps,
                active_sites: self.active_interior_sites,
                idle_sites: self.interior_sites - self.active_interior_sites,
                load_fraction: 1.0,
            },
            profile,
        )
    }
}

/// Settings that leave the geometry and the link gains of a run unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub idle_mode_enabled: bool,
    pub num_bs_antennas: u32,
    pub bandwidth_hz: f64,
    pub target_edge_snr_db: f64,
    pub sleep_model: SleepModel,
}

impl Variant {
    pub fn of(cfg: &ScenarioConfig) -> Self {
        Variant {
            idle_mode_enabled: cfg.idle_mode_enabled,
            num_bs_antennas: cfg.num_bs_antennas,
            bandwidth_hz: cfg.bandwidth_hz(),
            target_edge_snr_db: cfg.target_edge_snr_db,
            sleep_model: cfg.sleep_model,
        }
    }

    pub fn apply(&self, cfg: &ScenarioConfig) -> ScenarioConfig {
        ScenarioConfig {
            idle_mode_enabled: self.idle_mode_enabled,
            num_bs_antennas: self.num_bs_antennas,
            bandwidth_hz: Some(self.bandwidth_hz),
            target_edge_snr_db: self.target_edge_snr_db,
            sleep_model: self.sleep_model,
            ..cfg.clone()
        }
    }
}

/// Deployment, UE drop and link gains of one run, computed once and shared
/// by every [`Variant`].
#[derive(Debug, Clone)]
pub struct PreparedRun {
    pub run_index: u64,
    pub seed: u64,
    pub deployment: Deployment,
    pub gains: LinkGains,
    cfg: ScenarioConfig,
}

impl PreparedRun {
    pub fn new(cfg: &ScenarioConfig, run_index: u64) -> Result<Self> {
        let wrap = |e: Error| Error::Run {
            run_index,
            source: Box::new(e),
        };
        let seed = rng::run_seed(cfg.seed, run_index);
        let mut dep = build_hex_grid(cfg).map_err(wrap)?;
        drop_ues(cfg, &mut dep, &mut rng::stream(seed, rng::tag::UE_DROP)).map_err(wrap)?;
        let shadow = ShadowField::new(cfg.model.shadow, seed, dep.sites.len(), dep.bounds());
        let gains = link::compute_link_gains(&dep, &cfg.model.path_model(cfg.carrier_ghz), &cfg.model.antenna, &shadow);
        Ok(PreparedRun {
            run_index,
            seed,
            deployment: dep,
            gains,
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn evaluate(&self, v: &Variant) -> Result<RunMetrics> {
        let cfg = &self.cfg;
        let dep = &self.deployment;
        let radio = &cfg.model.radio;
        let path = cfg.model.path_model(cfg.carrier_ghz);
        let height = cfg.model.height_rule.height_m(cfg.isd_m);
        let tx = link::calibrate_tx_power_dbm(cfg.isd_m, height, v.bandwidth_hz, v.target_edge_snr_db, &path, radio);
        let tx_all = vec![tx; dep.sites.len()];
        let noise = radio.noise_power_dbm(v.bandwidth_hz);
        let state = link::associate(&self.gains, &tx_all, noise, radio.pilot_sinr_floor_db, v.idle_mode_enabled);
        let data = link::data_sinr_db(
            dep,
            &self.gains,
            &tx_all,
            noise,
            &state,
            v.num_bs_antennas as usize,
            cfg.model.antenna.horizontal_spacing_wavelengths,
        );

        let mut sinr_samples_db = Vec::with_capacity(dep.ues.len());
        let mut ue_throughputs_bps = Vec::with_capacity(dep.ues.len());
        let mut holes = 0;
        #[allow(clippy::needless_range_loop)]
        for u in 0..dep.ues.len() {
            if dep.sites[state.camped[u]].in_guard_tier {
                continue;
            }
            match (state.serving[u], data[u]) {
                (Some(s), Some(g)) => {
                    sinr_samples_db.push(g);
                    ue_throughputs_bps.push(link::ue_throughput_bps(
                        g,
                        state.ues_per_site[s],
                        v.bandwidth_hz,
                        radio.shannon_backoff_db,
                    ));
                }
                _ => {
                    holes += 1;
                    sinr_samples_db.push(state.pilot_sinr_db[u]);
                }
            }
        }
        let interior_sites = dep.interior_sites().count();
        let active_interior_sites = dep
            .interior_sites()
            .filter(|s| state.active_sites[s.id])
            .count();
        let area = cfg.region_area_km2();
        let served_throughput_bps = ue_throughputs_bps.iter().sum();
        let mut m = RunMetrics {
            run_index: self.run_index,
            interior_sites,
            active_interior_sites,
            active_sites_per_km2: active_interior_sites as f64 / area,
            mean_ues_per_active_site: if active_interior_sites > 0 {
                ue_throughputs_bps.len() as f64 / active_interior_sites as f64
            } else {
                0.0
            },
            tx_power_dbm: tx,
            network_tx_power_dbm_per_km2: tx + link::lin_to_db(active_interior_sites.max(1) as f64 / area),
            served_throughput_bps,
            ee_bps_per_w: None,
            coverage_holes: holes,
            coverage_hole_fraction: holes as f64 / sinr_samples_db.len().max(1) as f64,
            sinr_samples_db,
            ue_throughputs_bps,
        };
        m.ee_bps_per_w = m.ee_with(cfg.isd_m, v.num_bs_antennas, v.sleep_model).ok();
        Ok(m)
    }
}

/// Runs the full pipeline for run `run_index` of `cfg`. Deterministic in
/// `(cfg, run_index)`.
pub fn execute_run(cfg: &ScenarioConfig, run_index: u64) -> Result<RunMetrics> {
    PreparedRun::new(cfg, run_index)?.evaluate(&Variant::of(cfg))
}

/// All runs of `cfg`, evaluated for every variant on shared geometry and
/// gains. The result is indexed `[variant][run]`.
pub fn simulate_variants(cfg: &ScenarioConfig, variants: &[Variant]) -> Result<Vec<Vec<RunMetrics>>> {
    cfg.validate()?;
    let per_run: Vec<Vec<RunMetrics>> = (0..cfg.runs)
        .into_par_iter()
        .map(|r| {
            let prepared = PreparedRun::new(cfg, r)?;
            variants.iter().map(|v| prepared.evaluate(v)).collect()
        })
        .collect::<Result<_>>()?;
    Ok((0..variants.len())
        .map(|i| per_run.iter().map(|runs| runs[i].clone()).collect())
        .collect())
}

/// All runs of one configuration.
pub fn simulate(cfg: &ScenarioConfig) -> Result<Vec<RunMetrics>> {
    Ok(simulate_variants(cfg, &[Variant::of(cfg)])?.remove(0))
}
