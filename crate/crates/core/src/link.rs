//! Link budget: transmit-power calibration, per-link gains, pilot-based
//! association with idle mode, SINR and the SINR-to-throughput mapping.

use crate::antenna::{self, BeamWeights, DipoleArrayConfig};
use crate::propagation::{PathGainModel, ShadowField};
use crate::scenario::{Deployment, UE_HEIGHT_M};

/// Where the calibration edge sits relative to the ISD.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeConvention {
    /// `√3/2 · ISD`.
    HalfSqrt3,
    /// `ISD/√3`, the hexagon circumradius.
    Circumradius,
}

impl EdgeConvention {
    pub fn fraction(self) -> f64 {
        match self {
            EdgeConvention::HalfSqrt3 => 3f64.sqrt() / 2.0,
            EdgeConvention::Circumradius => 1.0 / 3f64.sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EdgeConvention::HalfSqrt3 => "sqrt3/2*isd",
            EdgeConvention::Circumradius => "isd/sqrt3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConstants {
    pub noise_psd_dbm_hz: f64,
    pub ue_noise_figure_db: f64,
    pub pilot_sinr_floor_db: f64,
    pub edge: EdgeConvention,
    /// Distance of the operating point from Shannon capacity.
    pub shannon_backoff_db: f64,
}

impl Default for RadioConstants {
    fn default() -> Self {
        RadioConstants {
            noise_psd_dbm_hz: -174.0,
            ue_noise_figure_db: 9.0,
            pilot_sinr_floor_db: -6.5,
            edge: EdgeConvention::HalfSqrt3,
            shannon_backoff_db: 3.5,
        }
    }
}

impl RadioConstants {
    pub fn noise_power_dbm(&self, bandwidth_hz: f64) -> f64 {
        self.noise_psd_dbm_hz + 10.0 * bandwidth_hz.log10() + self.ue_noise_figure_db
    }

    pub fn edge_distance_m(&self, isd_m: f64) -> f64 {
        self.edge.fraction() * isd_m
    }
}

#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Transmit power giving `target_snr_db` at the cell edge under path gain
/// alone: `P_N + |G_P(edge)| + γ_edge`.
pub fn calibrate_tx_power_dbm(
    isd_m: f64,
    site_height_m: f64,
    bandwidth_hz: f64,
    target_snr_db: f64,
    model: &PathGainModel,
    radio: &RadioConstants,
) -> f64 {
    let edge = radio.edge_distance_m(isd_m);
    let d3 = edge.hypot(site_height_m - UE_HEIGHT_M);
    radio.noise_power_dbm(bandwidth_hz) + model.path_gain_db(d3).abs() + target_snr_db
}

/// Per-link gain in dB (antenna + path + shadow) for every UE/site pair,
/// stored UE-major.
#[derive(Debug, Clone)]
pub struct LinkGains {
    pub n_ues: usize,
    pub n_sites: usize,
    gain_db: Vec<f64>,
}

impl LinkGains {
    pub fn from_matrix(n_ues: usize, n_sites: usize, gain_db: Vec<f64>) -> Self {
        assert_eq!(gain_db.len(), n_ues * n_sites);
        LinkGains { n_ues, n_sites, gain_db }
    }

    #[inline]
    pub fn get(&self, ue: usize, site: usize) -> f64 {
        self.gain_db[ue * self.n_sites + site]
    }

    pub fn row(&self, ue: usize) -> &[f64] {
        &self.gain_db[ue * self.n_sites..(ue + 1) * self.n_sites]
    }
}

/// Antenna, path and shadow gains in dB from every site to a receiver at
/// `(x, y)` at UE height.
pub fn gains_at(
    dep: &Deployment,
    x: f64,
    y: f64,
    path: &PathGainModel,
    antenna: &DipoleArrayConfig,
    shadow: &ShadowField,
    out: &mut Vec<f64>,
) {
    let common = shadow.common_db(x, y);
    out.extend(dep.sites.iter().map(|site| {
        let r = (site.x_m - x).hypot(site.y_m - y);
        let theta = antenna::elevation_rad(site.height_m, UE_HEIGHT_M, r);
        antenna.gain_dbi(theta)
            + path.path_gain_db(r.hypot(site.height_m - UE_HEIGHT_M))
            + common
            + shadow.site_db(site.id, x, y)
    }));
}

/// Antenna, path and shadow gains for all links of a deployment.
pub fn compute_link_gains(
    dep: &Deployment,
    path: &PathGainModel,
    antenna: &DipoleArrayConfig,
    shadow: &ShadowField,
) -> LinkGains {
    let mut gain = Vec::with_capacity(dep.ues.len() * dep.sites.len());
    for ue in &dep.ues {
        gains_at(dep, ue.x_m, ue.y_m, path, antenna, shadow, &mut gain);
    }
    LinkGains::from_matrix(dep.ues.len(), dep.sites.len(), gain)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationState {
    /// Strongest-pilot site of every UE, holes included.
    pub camped: Vec<usize>,
    /// Serving site, `None` for coverage holes.
    pub serving: Vec<Option<usize>>,
    pub active_sites: Vec<bool>,
    pub ues_per_site: Vec<u32>,
    pub coverage_holes: Vec<usize>,
    /// Pilot SINR against the final active set.
    pub pilot_sinr_db: Vec<f64>,
}

impl AssociationState {
    pub fn n_active(&self) -> usize {
        self.active_sites.iter().filter(|&&a| a).count()
    }

    /// UEs served by each site.
    pub fn served_by_site(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.active_sites.len()];
        for (u, s) in self.serving.iter().enumerate() {
            if let Some(s) = s {
                out[*s].push(u);
            }
        }
        out
    }
}

/// Index of the largest value; ties resolve to the lowest index.
fn argmax(xs: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, x) in xs.enumerate() {
        if x > best.1 {
            best = (i, x);
        }
    }
    best.0
}

fn pilot_sinr_pass(
    gains: &LinkGains,
    tx_power_dbm: &[f64],
    noise_mw: f64,
    servers: &[usize],
    active: &[bool],
) -> Vec<f64> {
    (0..gains.n_ues)
        .map(|u| {
            let row = gains.row(u);
            let mut total = 0.0;
            for (s, (&g, &on)) in row.iter().zip(active).enumerate() {
                if on {
                    total += db_to_lin(tx_power_dbm[s] + g);
                }
            }
            let sig = db_to_lin(tx_power_dbm[servers[u]] + row[servers[u]]);
            sinr_db(sig, (total - sig).max(0.0), noise_mw)
        })
        .collect()
}

/// Strongest-pilot association. UEs below the pilot SINR floor become
/// coverage holes. With idle mode, sites without a served UE are switched
/// off and the pilot SINR of the remaining UEs is re-evaluated; since a UE
/// never camps on an idle site and removing sites only lowers
/// interference, the association is then a fixed point.
pub fn associate(
    gains: &LinkGains,
    tx_power_dbm: &[f64],
    noise_dbm: f64,
    pilot_floor_db: f64,
    idle_mode: bool,
) -> AssociationState {
    let n_sites = gains.n_sites;
    let noise_mw = db_to_lin(noise_dbm);
    let camped: Vec<usize> = (0..gains.n_ues)
        .map(|u| argmax(gains.row(u).iter().zip(tx_power_dbm).map(|(g, p)| g + p)))
        .collect();

    let mut active = vec![!idle_mode; n_sites];
    if idle_mode {
        for &s in &camped {
            active[s] = true;
        }
    }
    let first = pilot_sinr_pass(gains, tx_power_dbm, noise_mw, &camped, &active);
    let serving: Vec<Option<usize>> = camped
        .iter()
        .zip(&first)
        .map(|(&s, &g)| (g >= pilot_floor_db).then_some(s))
        .collect();
    let coverage_holes: Vec<usize> = serving
        .iter()
        .enumerate()
        .filter_map(|(u, s)| s.is_none().then_some(u))
        .collect();

    let pilot_sinr_db = if idle_mode {
        active = vec![false; n_sites];
        for s in serving.iter().flatten() {
            active[*s] = true;
        }
        if coverage_holes.is_empty() {
            first
        } else {
            // Holes keep their first-pass value; their camped site may be off.
            let second = pilot_sinr_pass(gains, tx_power_dbm, noise_mw, &camped, &active);
            second
                .into_iter()
                .zip(first)
                .zip(&serving)
                .map(|((s, f), srv)| if srv.is_some() { s } else { f })
                .collect()
        }
    } else {
        first
    };

    let mut ues_per_site = vec![0u32; n_sites];
    for s in serving.iter().flatten() {
        ues_per_site[*s] += 1;
    }
    AssociationState {
        camped,
        serving,
        active_sites: active,
        ues_per_site,
        coverage_holes,
        pilot_sinr_db,
    }
}

/// `S / (I + N)` in dB from linear powers.
#[inline]
pub fn sinr_db(signal_mw: f64, interference_mw: f64, noise_mw: f64) -> f64 {
    lin_to_db(signal_mw / (interference_mw + noise_mw))
}

/// Horizontal-array phases from `site` towards `ue` in a deployment.
pub fn link_phases(dep: &Deployment, site: usize, ue: usize, n_antennas: usize, spacing_wavelengths: f64) -> Vec<f64> {
    let s = &dep.sites[site];
    let u = &dep.ues[ue];
    let (dx, dy) = (u.x_m - s.x_m, u.y_m - s.y_m);
    let r = dx.hypot(dy);
    antenna::horizontal_phases(
        n_antennas,
        spacing_wavelengths,
        dy.atan2(dx),
        antenna::elevation_rad(s.height_m, UE_HEIGHT_M, r),
    )
}

/// Beams chosen by every served UE from its serving site.
pub fn select_serving_beams(
    dep: &Deployment,
    state: &AssociationState,
    n_antennas: usize,
    spacing_wavelengths: f64,
) -> Vec<Option<BeamWeights>> {
    state
        .serving
        .iter()
        .enumerate()
        .map(|(u, s)| {
            s.map(|s| antenna::select_beam(&link_phases(dep, s, u, n_antennas, spacing_wavelengths)))
        })
        .collect()
}

/// Data-channel SINR of every served UE (`None` for holes). With one
/// antenna this equals the pilot SINR. With several, the serving site uses
/// the UE's beam and every other active site uses the beams of its own
/// UEs, evaluated towards the victim.
pub fn data_sinr_db(
    dep: &Deployment,
    gains: &LinkGains,
    tx_power_dbm: &[f64],
    noise_dbm: f64,
    state: &AssociationState,
    n_antennas: usize,
    spacing_wavelengths: f64,
) -> Vec<Option<f64>> {
    if n_antennas <= 1 {
        return state
            .serving
            .iter()
            .zip(&state.pilot_sinr_db)
            .map(|(s, &g)| s.map(|_| g))
            .collect();
    }
    let noise_mw = db_to_lin(noise_dbm);
    let beams = select_serving_beams(dep, state, n_antennas, spacing_wavelengths);
    let served = state.served_by_site();
    let site_beams: Vec<Vec<BeamWeights>> = served
        .iter()
        .map(|ues| ues.iter().filter_map(|&u| beams[u].clone()).collect())
        .collect();
    let n_active = state.n_active();
    let empty_factor = n_antennas as f64;

    (0..gains.n_ues)
        .map(|u| {
            let serv = state.serving[u]?;
            let row = gains.row(u);
            let mut interference = 0.0;
            // Active sites without served UEs transmit omni-equivalent power.
            let mut seen = 0;
            for (s, on) in state.active_sites.iter().enumerate() {
                if !on || s == serv {
                    continue;
                }
                seen += 1;
                let rx = db_to_lin(tx_power_dbm[s] + row[s]);
                let factor = if site_beams[s].is_empty() {
                    empty_factor
                } else {
                    let ph = link_phases(dep, s, u, n_antennas, spacing_wavelengths);
                    site_beams[s].iter().map(|b| b.power_gain(&ph)).sum::<f64>() / site_beams[s].len() as f64
                };
                interference += rx * factor;
            }
            debug_assert!(seen + 1 == n_active || !state.active_sites[serv]);
            let ph = link_phases(dep, serv, u, n_antennas, spacing_wavelengths);
            let sig = db_to_lin(tx_power_dbm[serv] + row[serv]) * beams[u].as_ref()?.power_gain(&ph);
            Some(sinr_db(sig, interference, noise_mw))
        })
        .collect()
}

/// Round-robin share of the Shannon rate at a fixed backoff, no MCS cap:
/// `B·log2(1 + 10^{(γ − backoff)/10}) / U`.
pub fn ue_throughput_bps(sinr_db: f64, n_ues_in_cell: u32, bandwidth_hz: f64, backoff_db: f64) -> f64 {
    assert!(n_ues_in_cell >= 1, "cell must serve at least one UE");
    bandwidth_hz * (1.0 + db_to_lin(sinr_db - backoff_db)).log2() / n_ues_in_cell as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::ShadowParams;
    use crate::scenario::{build_hex_grid, ScenarioConfig, Ue};

    fn gains(rows: &[&[f64]]) -> LinkGains {
        let n_sites = rows[0].len();
        LinkGains::from_matrix(rows.len(), n_sites, rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    #[test]
    fn tx_power_at_200m_isd() {
        let radio = RadioConstants::default();
        let p = calibrate_tx_power_dbm(200.0, 24.0, 20e6, 12.0, &PathGainModel::umi(2.0), &radio);
        let edge = (200.0 * 3f64.sqrt() / 2.0).hypot(22.5);
        let hand = -174.0 + 10.0 * 20e6f64.log10() + 9.0 - PathGainModel::umi(2.0).path_gain_db(edge) + 12.0;
        assert!((p - hand).abs() < 1e-12);
    }

    #[test]
    fn tx_power_scales_with_bandwidth_and_target() {
        let radio = RadioConstants::default();
        let m = PathGainModel::umi(3.5);
        let base = calibrate_tx_power_dbm(50.0, 6.0, 20e6, 12.0, &m, &radio);
        let wide = calibrate_tx_power_dbm(50.0, 6.0, 40e6, 12.0, &m, &radio);
        let hot = calibrate_tx_power_dbm(50.0, 6.0, 20e6, 15.0, &m, &radio);
        assert!((wide - base - 10.0 * 2f64.log10()).abs() < 1e-12);
        assert!((hot - base - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_ue_single_active_site() {
        let g = gains(&[&[-60.0, -80.0, -90.0]]);
        let st = associate(&g, &[0.0; 3], -100.0, -6.5, true);
        assert_eq!(st.serving, vec![Some(0)]);
        assert_eq!(st.active_sites, vec![true, false, false]);
        assert_eq!(st.ues_per_site, vec![1, 0, 0]);
        // No interferers: SINR equals SNR.
        assert!((st.pilot_sinr_db[0] - 40.0).abs() < 1e-9);
    }

    #[test]
    fn equal_rss_ties_to_lowest_site() {
        let g = gains(&[&[-70.0, -70.0]]);
        let st = associate(&g, &[10.0, 10.0], -200.0, -6.5, false);
        assert_eq!(st.camped, vec![0]);
        // Two equal links and negligible noise give 0 dB.
        assert!(st.pilot_sinr_db[0].abs() < 1e-9);
    }

    #[test]
    fn three_site_sinr_matches_hand_sum() {
        let g = gains(&[&[-60.0, -65.0, -72.0]]);
        let tx = [10.0, 13.0, 7.0];
        let st = associate(&g, &tx, -95.0, -6.5, false);
        let s = 10f64.powf((10.0 - 60.0) / 10.0);
        let i = 10f64.powf((13.0 - 65.0) / 10.0) + 10f64.powf((7.0 - 72.0) / 10.0);
        let n = 10f64.powf(-9.5);
        let hand = 10.0 * (s / (i + n)).log10();
        assert!((st.pilot_sinr_db[0] - hand).abs() < 1e-9);
    }

    #[test]
    fn weak_pilot_is_a_coverage_hole() {
        let g = gains(&[
            &[-70.0, -70.0, -70.2, -70.3, -70.4, -70.5],
            &[-50.0, -90.0, -90.0, -90.0, -90.0, -90.0],
        ]);
        let st = associate(&g, &[0.0; 6], -120.0, -6.5, false);
        assert!(st.pilot_sinr_db[0] < -6.5);
        assert_eq!(st.coverage_holes, vec![0]);
        assert_eq!(st.serving, vec![None, Some(0)]);
        assert_eq!(st.ues_per_site, vec![1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn idle_mode_association_is_fixed_point() {
        let g = gains(&[&[-60.0, -62.0, -90.0, -61.0], &[-75.0, -70.0, -90.0, -72.0]]);
        let tx = [0.0; 4];
        let st = associate(&g, &tx, -100.0, -6.5, true);
        assert_eq!(st.active_sites, vec![true, true, false, false]);
        // Re-associating against active sites only changes nothing.
        let masked: Vec<f64> = (0..2)
            .flat_map(|u| (0..4).map(move |s| (u, s)))
            .map(|(u, s)| if st.active_sites[s] { g.get(u, s) } else { -1e9 })
            .collect();
        let again = associate(&LinkGains::from_matrix(2, 4, masked), &tx, -100.0, -6.5, true);
        assert_eq!(again.serving, st.serving);
        assert_eq!(again.active_sites, st.active_sites);
        for (a, b) in again.pilot_sinr_db.iter().zip(&st.pilot_sinr_db) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn throughput_mapping() {
        assert!((ue_throughput_bps(3.5, 1, 100e6, 3.5) - 100e6).abs() < 1e-3);
        let one = ue_throughput_bps(12.0, 1, 20e6, 3.5);
        assert_eq!(ue_throughput_bps(12.0, 2, 20e6, 3.5), one / 2.0);
        let hand = 500e6 * (1.0 + 10f64.powf(1.65)).log2();
        assert!((ue_throughput_bps(20.0, 1, 500e6, 3.5) - hand).abs() < 1e-3);
        assert!((hand / 1e9 - 2.75).abs() < 0.01);
    }

    fn small_deployment() -> (Deployment, LinkGains, Vec<f64>) {
        let cfg = ScenarioConfig {
            isd_m: 50.0,
            region_side_m: 150.0,
            ..ScenarioConfig::default()
        };
        let mut dep = build_hex_grid(&cfg).unwrap();
        dep.ues = (0..12)
            .map(|i| Ue {
                id: i,
                x_m: 10.0 + 11.0 * i as f64,
                y_m: 20.0 + 9.0 * (i % 5) as f64,
                hotspot_id: None,
            })
            .collect();
        let shadow = ShadowField::new(ShadowParams::default(), 3, dep.sites.len(), dep.bounds());
        let g = compute_link_gains(&dep, &PathGainModel::umi(2.0), &DipoleArrayConfig::default(), &shadow);
        let tx = vec![5.0; dep.sites.len()];
        (dep, g, tx)
    }

    #[test]
    fn one_antenna_data_sinr_equals_pilot() {
        let (dep, g, tx) = small_deployment();
        let st = associate(&g, &tx, -90.0, -6.5, true);
        let data = data_sinr_db(&dep, &g, &tx, -90.0, &st, 1, 0.6);
        for (d, (p, s)) in data.iter().zip(st.pilot_sinr_db.iter().zip(&st.serving)) {
            assert_eq!(d.is_some(), s.is_some());
            if let Some(d) = d {
                assert_eq!(d, p);
            }
        }
    }

    #[test]
    fn association_ignores_antenna_count_and_common_power_offset() {
        let (_, g, tx) = small_deployment();
        let a = associate(&g, &tx, -90.0, -6.5, true);
        let shifted: Vec<f64> = tx.iter().map(|p| p + 17.0).collect();
        let b = associate(&g, &shifted, -90.0, -6.5, true);
        assert_eq!(a.camped, b.camped);
        assert_eq!(a.active_sites, b.active_sites);
    }

    #[test]
    fn beamforming_does_not_hurt_serving_link() {
        let (dep, g, tx) = small_deployment();
        let st = associate(&g, &tx, -200.0, -6.5, true);
        for n in [2, 4] {
            let beams = select_serving_beams(&dep, &st, n, 0.6);
            for (u, b) in beams.iter().enumerate() {
                if let (Some(b), Some(s)) = (b, st.serving[u]) {
                    let ph = link_phases(&dep, s, u, n, 0.6);
                    assert!(antenna::beamformed_link_gain_db(g.get(u, s), b, &ph) >= g.get(u, s) - 1e-9);
                }
            }
        }
    }
}
