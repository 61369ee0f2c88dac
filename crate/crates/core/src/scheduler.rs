//! Round-robin and proportional-fair downlink scheduling on the LTE
//! resource-block grid, and the multi-cell study comparing them.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::fastfading::RicianLink;
use crate::link::{self, db_to_lin};
use crate::model::ModelParams;
use crate::propagation::ShadowField;
use crate::rng;
use crate::runner::stats::percentile;
use crate::scenario::{build_hex_grid, Deployment, ScenarioConfig, UE_HEIGHT_M, UE_SITE_EXCLUSION_M};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbGrid {
    pub rb_bandwidth_hz: f64,
    pub tti_s: f64,
    pub n_rbs: usize,
    pub subcarriers_per_rb: u32,
}

impl RbGrid {
    pub fn new(bandwidth_hz: f64) -> Self {
        let rb_bandwidth_hz = 180e3;
        RbGrid {
            rb_bandwidth_hz,
            tti_s: 1e-3,
            n_rbs: ((bandwidth_hz / rb_bandwidth_hz).floor() as usize).max(1),
            subcarriers_per_rb: 12,
        }
    }

    /// Rate of one RB at linear SINR `sinr`, with the capacity backoff.
    #[inline]
    pub fn rb_rate_bps(&self, sinr: f64, backoff_lin: f64) -> f64 {
        self.rb_bandwidth_hz * (1.0 + sinr / backoff_lin).log2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchedulerKind {
    RoundRobin,
    ProportionalFair,
}

impl SchedulerKind {
    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::RoundRobin => "rr",
            SchedulerKind::ProportionalFair => "pf",
        }
    }
}

/// Round robin: RB `k` of TTI `t` goes to UE `(k + t·n_rbs) mod U`, so the
/// rotation continues across TTIs and long-run shares differ by at most
/// one RB.
pub fn schedule_rr(n_ues: usize, grid: &RbGrid, tti: u64) -> Vec<usize> {
    assert!(n_ues >= 1, "round robin needs at least one UE");
    let offset = (tti % n_ues as u64) as usize * (grid.n_rbs % n_ues);
    (0..grid.n_rbs).map(|k| (k + offset) % n_ues).collect()
}

/// Proportional-fair bookkeeping of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PfState {
    /// Moving-average served throughput per UE; `None` until first estimate.
    pub avg_tput_bps: Vec<Option<f64>>,
    pub time_constant_ttis: f64,
    pub n_max: usize,
}

impl PfState {
    pub fn new(n_ues: usize) -> Self {
        PfState {
            avg_tput_bps: vec![None; n_ues],
            time_constant_ttis: 100.0,
            n_max: 10,
        }
    }

    /// `R ← (1 − 1/T)·R + (1/T)·served`.
    pub fn update(&mut self, served_bps: &[f64]) {
        let a = 1.0 / self.time_constant_ttis;
        for (r, &s) in self.avg_tput_bps.iter_mut().zip(served_bps) {
            let prev = r.unwrap_or(s);
            *r = Some((1.0 - a) * prev + a * s);
        }
    }
}

/// Time-domain stage: ranks UEs by `D̂/R` and returns the best `n_max`,
/// ties to the lower UE index. A UE without history starts at `R = D̂`.
pub fn pf_td_select(state: &mut PfState, estimates_bps: &[f64]) -> Vec<usize> {
    for (r, &d) in state.avg_tput_bps.iter_mut().zip(estimates_bps) {
        if r.is_none() {
            *r = Some(d);
        }
    }
    let metric: Vec<f64> = estimates_bps
        .iter()
        .zip(&state.avg_tput_bps)
        .map(|(&d, r)| {
            let r = r.unwrap_or(d);
            if r > 0.0 {
                d / r
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..estimates_bps.len()).collect();
    order.sort_by(|&a, &b| metric[b].total_cmp(&metric[a]).then(a.cmp(&b)));
    order.truncate(state.n_max);
    order
}

/// Frequency-domain stage: RB `k` goes to `argmax_u γ_{u,k} / Σ_k γ_{u,k}`
/// over the selected UEs, ties to the lower UE index. `sinr[u][k]` is
/// linear. Returns the UE index (into `sinr`) for every RB.
pub fn pf_fd_allocate(selected: &[usize], sinr: &[Vec<f64>]) -> Vec<usize> {
    assert!(!selected.is_empty(), "frequency-domain stage needs at least one UE");
    let n_rbs = sinr[selected[0]].len();
    let mut order = selected.to_vec();
    order.sort_unstable();
    let inv_sum: Vec<f64> = order.iter().map(|&u| 1.0 / sinr[u].iter().sum::<f64>()).collect();
    (0..n_rbs)
        .map(|k| {
            let mut best = (order[0], f64::NEG_INFINITY);
            for (&u, &w) in order.iter().zip(&inv_sum) {
                let m = sinr[u][k] * w;
                if m > best.1 {
                    best = (u, m);
                }
            }
            best.0
        })
        .collect()
}

/// Settings of the RR/PF comparison. Every study cell is loaded with its
/// own UEs; all sites transmit at full load.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedStudyConfig {
    pub isds_m: Vec<f64>,
    pub ues_per_bs: Vec<usize>,
    pub carrier_ghz: f64,
    pub bandwidth_hz: f64,
    pub target_edge_snr_db: f64,
    /// Side of the measured region in ISDs; guard tiers are added around it.
    pub region_side_isds: f64,
    pub drops: u64,
    pub ttis: u64,
    pub seed: u64,
    pub model: ModelParams,
}

impl Default for SchedStudyConfig {
    fn default() -> Self {
        SchedStudyConfig {
            isds_m: vec![150.0, 40.0, 20.0],
            ues_per_bs: vec![1, 2, 4, 6, 8],
            carrier_ghz: 2.0,
            bandwidth_hz: 20e6,
            target_edge_snr_db: 12.0,
            region_side_isds: 4.0,
            drops: 100,
            ttis: 50,
            seed: 1,
            model: ModelParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedRecord {
    pub isd_m: f64,
    pub scheduler: SchedulerKind,
    pub ues_per_bs: usize,
    pub mean_cell_tput_bps: f64,
    pub p5_ue_tput_bps: f64,
    pub p50_ue_tput_bps: f64,
    pub p95_ue_tput_bps: f64,
    pub cells: usize,
}

/// A UE attached to a study cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellUe {
    pub sinr_db: f64,
    pub k_factor: f64,
    pub link_id: u64,
}

/// Per-cell outcome for one UE count and scheduler.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub cell_tput_bps: f64,
    pub ue_tput_bps: Vec<f64>,
}

/// Runs RR and PF over `ttis` TTIs on the same fading realizations.
/// Returns `(rr, pf)`.
pub fn simulate_cell(
    ues: &[CellUe],
    grid: &RbGrid,
    ttis: u64,
    backoff_db: f64,
    fading_seed: u64,
) -> (CellOutcome, CellOutcome) {
    simulate_cell_prefixes(ues, &[ues.len()], grid, ttis, backoff_db, fading_seed).remove(0)
}

/// Like [`simulate_cell`] for each prefix `ues[..u]`, `u` in `counts`,
/// sharing one set of fading draws.
pub fn simulate_cell_prefixes(
    ues: &[CellUe],
    counts: &[usize],
    grid: &RbGrid,
    ttis: u64,
    backoff_db: f64,
    fading_seed: u64,
) -> Vec<(CellOutcome, CellOutcome)> {
    let n = counts.iter().copied().max().unwrap_or(0);
    assert!(n <= ues.len() && counts.iter().all(|&c| c >= 1));
    let n_rbs = grid.n_rbs;
    let backoff = db_to_lin(backoff_db);
    let links: Vec<RicianLink> = ues[..n]
        .iter()
        .map(|u| RicianLink::new(fading_seed, u.link_id, u.k_factor))
        .collect();
    let wideband: Vec<f64> = ues[..n].iter().map(|u| db_to_lin(u.sinr_db)).collect();
    let mut sinr = vec![vec![0.0; n_rbs]; n];
    let mut rate = vec![vec![0.0; n_rbs]; n];
    let mut pf: Vec<PfState> = counts.iter().map(|&c| PfState::new(c)).collect();
    let mut rr_ue: Vec<Vec<f64>> = counts.iter().map(|&c| vec![0.0; c]).collect();
    let mut pf_ue = rr_ue.clone();
    let mut served = vec![0.0; n];
    for t in 0..ttis {
        for u in 0..n {
            for k in 0..n_rbs {
                let g = wideband[u] * links[u].power(k as u64, t, n_rbs as u64);
                sinr[u][k] = g;
                rate[u][k] = grid.rb_rate_bps(g, backoff);
            }
        }
        let estimates: Vec<f64> = rate.iter().map(|row| row.iter().sum()).collect();
        for (i, &c) in counts.iter().enumerate() {
            served[..c].iter_mut().for_each(|s| *s = 0.0);
            for (k, &u) in schedule_rr(c, grid, t).iter().enumerate() {
                served[u] += rate[u][k];
            }
            for (acc, s) in rr_ue[i].iter_mut().zip(&served) {
                *acc += s;
            }

            let selected = pf_td_select(&mut pf[i], &estimates[..c]);
            served[..c].iter_mut().for_each(|s| *s = 0.0);
            for (k, &u) in pf_fd_allocate(&selected, &sinr[..c]).iter().enumerate() {
                served[u] += rate[u][k];
            }
            pf[i].update(&served[..c]);
            for (acc, s) in pf_ue[i].iter_mut().zip(&served) {
                *acc += s;
            }
        }
    }
    let finish = |ue: Vec<f64>| {
        let ue: Vec<f64> = ue.into_iter().map(|x| x / ttis as f64).collect();
        CellOutcome {
            cell_tput_bps: ue.iter().sum(),
            ue_tput_bps: ue,
        }
    };
    rr_ue
        .into_iter()
        .zip(pf_ue)
        .map(|(rr, pf)| (finish(rr), finish(pf)))
        .collect()
}

/// Drops up to `count` UEs uniformly in the cell of `site`, keeping only
/// positions whose strongest pilot is `site` and whose pilot SINR with all
/// sites active clears the floor.
#[allow(clippy::too_many_arguments)]
fn drop_cell_ues<R: Rng>(
    dep: &Deployment,
    site: usize,
    count: usize,
    tx_dbm: f64,
    noise_dbm: f64,
    cfg: &SchedStudyConfig,
    shadow: &ShadowField,
    rng: &mut R,
) -> Vec<CellUe> {
    let path = cfg.model.path_model(cfg.carrier_ghz);
    let radius = dep.lattice.isd_m / 3f64.sqrt();
    let s = &dep.sites[site];
    let noise_mw = db_to_lin(noise_dbm - tx_dbm);
    let mut out = Vec::with_capacity(count);
    let mut gains = Vec::with_capacity(dep.sites.len());
    for _attempt in 0..200 * count {
        if out.len() == count {
            break;
        }
        let r = radius * rng.gen::<f64>().sqrt();
        let a = 2.0 * PI * rng.gen::<f64>();
        let (x, y) = (s.x_m + r * a.cos(), s.y_m + r * a.sin());
        if dep.lattice.nearest_distance_m(x, y) < UE_SITE_EXCLUSION_M {
            continue;
        }
        gains.clear();
        link::gains_at(dep, x, y, &path, &cfg.model.antenna, shadow, &mut gains);
        let best = gains
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &g)| if g > b.1 { (i, g) } else { b });
        if best.0 != site {
            continue;
        }
        let total: f64 = gains.iter().map(|&g| db_to_lin(g)).sum();
        let sig = db_to_lin(gains[site]);
        let sinr_db = link::sinr_db(sig, total - sig, noise_mw);
        if sinr_db < cfg.model.radio.pilot_sinr_floor_db {
            continue;
        }
        let d3 = r.hypot(s.height_m - UE_HEIGHT_M);
        out.push(CellUe {
            sinr_db,
            k_factor: cfg.model.kfactor.k_factor(d3),
            link_id: rng::key(&[site as u64, out.len() as u64]),
        });
    }
    out
}

/// Accumulated results of one ISD: for every (U, scheduler) the cell
/// throughput sum, cell count and UE throughputs.
type IsdAccum = Vec<[(f64, usize, Vec<f64>); 2]>;

fn study_drop(cfg: &SchedStudyConfig, isd: f64, drop: u64) -> Result<IsdAccum> {
    let scen = ScenarioConfig {
        isd_m: isd,
        region_side_m: cfg.region_side_isds * isd,
        carrier_ghz: cfg.carrier_ghz,
        bandwidth_hz: Some(cfg.bandwidth_hz),
        target_edge_snr_db: cfg.target_edge_snr_db,
        model: cfg.model.clone(),
        ..ScenarioConfig::default()
    };
    let dep = build_hex_grid(&scen)?;
    let seed = rng::key(&[cfg.seed, isd.to_bits(), drop]);
    let shadow = ShadowField::new(cfg.model.shadow, seed, dep.sites.len(), dep.bounds());
    let path = cfg.model.path_model(cfg.carrier_ghz);
    let radio = &cfg.model.radio;
    let height = dep.sites[0].height_m;
    let tx = link::calibrate_tx_power_dbm(isd, height, cfg.bandwidth_hz, cfg.target_edge_snr_db, &path, radio);
    let noise = radio.noise_power_dbm(cfg.bandwidth_hz);
    let grid = RbGrid::new(cfg.bandwidth_hz);
    let u_max = cfg.ues_per_bs.iter().copied().max().unwrap_or(1);
    let mut stream = rng::stream(seed, rng::tag::SCHED_DROP);
    let mut acc: IsdAccum = cfg
        .ues_per_bs
        .iter()
        .map(|_| [(0.0, 0, Vec::new()), (0.0, 0, Vec::new())])
        .collect();
    for site in dep.sites.iter().filter(|s| !s.in_guard_tier) {
        let ues = drop_cell_ues(&dep, site.id, u_max, tx, noise, cfg, &shadow, &mut stream);
        if ues.len() < u_max {
            continue;
        }
        let outcomes = simulate_cell_prefixes(&ues, &cfg.ues_per_bs, &grid, cfg.ttis, radio.shannon_backoff_db, seed);
        for (slot, (rr, pf)) in acc.iter_mut().zip(outcomes) {
            for (a, o) in slot.iter_mut().zip([rr, pf]) {
                a.0 += o.cell_tput_bps;
                a.1 += 1;
                a.2.extend(o.ue_tput_bps);
            }
        }
    }
    Ok(acc)
}

/// Mean cell throughput and UE-throughput percentiles for every
/// (ISD, U, scheduler). RR and PF see the same UEs and fading.
pub fn run_scheduler_study(cfg: &SchedStudyConfig) -> Result<Vec<SchedRecord>> {
    let mut records = Vec::new();
    for &isd in &cfg.isds_m {
        let drops: Vec<IsdAccum> = (0..cfg.drops)
            .into_par_iter()
            .map(|d| study_drop(cfg, isd, d))
            .collect::<Result<_>>()?;
        for (i, &u) in cfg.ues_per_bs.iter().enumerate() {
            for (j, kind) in [SchedulerKind::RoundRobin, SchedulerKind::ProportionalFair].into_iter().enumerate() {
                let (mut sum, mut cells, mut ue) = (0.0, 0usize, Vec::new());
                for d in &drops {
                    sum += d[i][j].0;
                    cells += d[i][j].1;
                    ue.extend_from_slice(&d[i][j].2);
                }
                ue.sort_by(f64::total_cmp);
                let pct = |p: f64| percentile(&ue, p).unwrap_or(f64::NAN);
                records.push(SchedRecord {
                    isd_m: isd,
                    scheduler: kind,
                    ues_per_bs: u,
                    mean_cell_tput_bps: if cells > 0 { sum / cells as f64 } else { f64::NAN },
                    p5_ue_tput_bps: pct(5.0),
                    p50_ue_tput_bps: pct(50.0),
                    p95_ue_tput_bps: pct(95.0),
                    cells,
                });
            }
        }
    }
    Ok(records)
}
