//! Deployment geometry: the hexagonal small-cell lattice with its guard
//! tiers, and the uniform or hotspot-clustered UE drop.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::Rng;

use crate::energy::SleepModel;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Inter-site distances studied in the reference deployment set.
pub const REFERENCE_ISDS_M: [f64; 9] = [200.0, 150.0, 100.0, 75.0, 50.0, 35.0, 20.0, 10.0, 5.0];

pub const UE_HEIGHT_M: f64 = 1.5;
pub const UE_SITE_EXCLUSION_M: f64 = 0.5;
pub const HOTSPOT_RADIUS_M: f64 = 40.0;
pub const HOTSPOT_MIN_SEPARATION_M: f64 = 40.0;
pub const UES_PER_HOTSPOT: usize = 20;
pub const GUARD_TIERS: u32 = 2;

const HOTSPOT_MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UeDistribution {
    Uniform,
    /// Half of the UEs uniform, half in 40 m hotspots of 20 UEs.
    Nonuniform,
}

impl UeDistribution {
    pub fn legend_code(self) -> u8 {
        match self {
            UeDistribution::Uniform => 0,
            UeDistribution::Nonuniform => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UeDistribution::Uniform => "uniform",
            UeDistribution::Nonuniform => "hotspot",
        }
    }
}

impl std::str::FromStr for UeDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" | "0" => Ok(UeDistribution::Uniform),
            "hotspot" | "nonuniform" | "non-uniform" | "1" => Ok(UeDistribution::Nonuniform),
            other => Err(Error::InvalidConfig(format!("unknown UE distribution '{other}'"))),
        }
    }
}

/// Full experiment descriptor. Mirrors the figure-legend parameters
/// (i, d, ud, s, sm, f, a, t) plus run control.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub isd_m: f64,
    pub ue_density_per_km2: f64,
    pub ue_distribution: UeDistribution,
    pub idle_mode_enabled: bool,
    pub sleep_model: SleepModel,
    pub carrier_ghz: f64,
    /// `None` means 5 % of the carrier frequency.
    pub bandwidth_hz: Option<f64>,
    pub num_bs_antennas: u32,
    pub target_edge_snr_db: f64,
    pub region_side_m: f64,
    pub runs: u64,
    pub seed: u64,
    pub model: ModelParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            isd_m: 35.0,
            ue_density_per_km2: 300.0,
            ue_distribution: UeDistribution::Nonuniform,
            idle_mode_enabled: true,
            sleep_model: SleepModel::Sm1,
            carrier_ghz: 2.0,
            bandwidth_hz: None,
            num_bs_antennas: 1,
            target_edge_snr_db: 12.0,
            region_side_m: 500.0,
            runs: 150,
            seed: 1,
            model: ModelParams::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz.unwrap_or(0.05 * self.carrier_ghz * 1e9)
    }

    pub fn region_area_km2(&self) -> f64 {
        self.region_side_m * self.region_side_m * 1e-6
    }

    /// Number of UEs in one drop.
    pub fn ue_count(&self) -> usize {
        (self.ue_density_per_km2 * self.region_area_km2()).round() as usize
    }

    /// Checks hard constraints and returns notes for accepted but unusual values.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.isd_m.is_finite() && self.isd_m > 0.0) {
            return bad(format!("isd must be positive, got {}", self.isd_m));
        }
        if !(self.ue_density_per_km2.is_finite() && self.ue_density_per_km2 > 0.0) {
            return bad(format!(
                "ue density must be positive, got {}",
                self.ue_density_per_km2
            ));
        }
        if !(self.region_side_m.is_finite() && self.region_side_m > 0.0) {
            return bad(format!("region side must be positive, got {}", self.region_side_m));
        }
        if self.region_side_m < self.isd_m {
            return Err(Error::DegenerateRegion {
                side_m: self.region_side_m,
                isd_m: self.isd_m,
            });
        }
        if !(self.carrier_ghz.is_finite() && self.carrier_ghz > 0.0) {
            return bad(format!("carrier must be positive, got {}", self.carrier_ghz));
        }
        if !matches!(self.num_bs_antennas, 1 | 2 | 4) {
            return bad(format!(
                "antennas must be 1, 2 or 4, got {}",
                self.num_bs_antennas
            ));
        }
        if let Some(b) = self.bandwidth_hz {
            if !(b.is_finite() && b > 0.0) {
                return bad(format!("bandwidth must be positive, got {b}"));
            }
        }
        if !self.target_edge_snr_db.is_finite() {
            return bad("target SNR must be finite".into());
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        let mut notes = Vec::new();
        if !REFERENCE_ISDS_M.iter().any(|&r| (r - self.isd_m).abs() < 1e-9) {
            notes.push(format!(
                "isd {} m is outside the reference set {:?}",
                self.isd_m, REFERENCE_ISDS_M
            ));
        }
        if ![9.0, 12.0, 15.0].contains(&self.target_edge_snr_db) {
            notes.push(format!(
                "target edge SNR {} dB is outside the reference set {{9, 12, 15}}",
                self.target_edge_snr_db
            ));
        }
        Ok(notes)
    }
}

/// Antenna height that keeps the electrical downtilt pointing at the same
/// relative position in the cell: linear in ISD from a reference point,
/// clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightRule {
    pub reference_height_m: f64,
    pub reference_isd_m: f64,
    pub min_height_m: f64,
    pub max_height_m: f64,
}

impl Default for HeightRule {
    fn default() -> Self {
        HeightRule {
            reference_height_m: 6.0,
            reference_isd_m: 50.0,
            min_height_m: 3.0,
            max_height_m: 24.0,
        }
    }
}

impl HeightRule {
    pub fn height_m(&self, isd_m: f64) -> f64 {
        (self.reference_height_m * isd_m / self.reference_isd_m)
            .clamp(self.min_height_m, self.max_height_m)
    }
}

/// Sites per km² of a hexagonal lattice with pitch `isd_m`.
pub fn site_density_per_km2(isd_m: f64) -> f64 {
    2.0 / (3f64.sqrt() * isd_m * isd_m) * 1e6
}

/// Whole number of sites per km² as quoted for deployment planning
/// (rounded up: a fraction of a site still needs a site).
pub fn reported_site_density_per_km2(isd_m: f64) -> u64 {
    site_density_per_km2(isd_m).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub id: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub height_m: f64,
    pub in_guard_tier: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ue {
    pub id: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub hotspot_id: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hotspot {
    pub center_x_m: f64,
    pub center_y_m: f64,
    pub radius_m: f64,
}

/// Flat-top hexagonal lattice: rows parallel to x, odd rows shifted by
/// half a pitch, one site at the region center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexLattice {
    pub isd_m: f64,
    pub center_x_m: f64,
    pub center_y_m: f64,
}

impl HexLattice {
    pub fn row_pitch_m(&self) -> f64 {
        self.isd_m * 3f64.sqrt() / 2.0
    }

    fn row_offset_m(&self, row: i64) -> f64 {
        if row.rem_euclid(2) == 1 {
            self.isd_m / 2.0
        } else {
            0.0
        }
    }

    pub fn point(&self, row: i64, col: i64) -> (f64, f64) {
        (
            self.center_x_m + col as f64 * self.isd_m + self.row_offset_m(row),
            self.center_y_m + row as f64 * self.row_pitch_m(),
        )
    }

    /// Distance from `(x, y)` to the closest lattice point.
    pub fn nearest_distance_m(&self, x: f64, y: f64) -> f64 {
        let pitch = self.row_pitch_m();
        let r0 = ((y - self.center_y_m) / pitch).round() as i64;
        let mut best = f64::INFINITY;
        for row in r0 - 1..=r0 + 1 {
            let off = self.center_x_m + self.row_offset_m(row);
            let col = ((x - off) / self.isd_m).round() as i64;
            let (px, py) = self.point(row, col);
            best = best.min((px - x).hypot(py - y));
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub lattice: HexLattice,
    pub region_side_m: f64,
    /// Extent of the guard margin around the region on every side.
    pub guard_margin_m: f64,
    pub sites: Vec<Site>,
    pub ues: Vec<Ue>,
    pub hotspots: Vec<Hotspot>,
}

impl Deployment {
    pub fn interior_sites(&self) -> impl Iterator<Item = &Site> {
        self.sites.iter().filter(|s| !s.in_guard_tier)
    }

    pub fn in_region(&self, x: f64, y: f64) -> bool {
        (0.0..=self.region_side_m).contains(&x) && (0.0..=self.region_side_m).contains(&y)
    }

    /// Bounding box `(x_min, x_max, y_min, y_max)` of region plus guard margin.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let m = self.guard_margin_m;
        (-m, self.region_side_m + m, -m, self.region_side_m + m)
    }

    pub fn write_sites_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["site_id", "x", "y", "height", "guard"])?;
        for s in &self.sites {
            w.write_record([
                s.id.to_string(),
                format!("{:.4}", s.x_m),
                format!("{:.4}", s.y_m),
                format!("{:.3}", s.height_m),
                (s.in_guard_tier as u8).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_ues_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["ue_id", "x", "y", "hotspot_id"])?;
        for u in &self.ues {
            w.write_record([
                u.id.to_string(),
                format!("{:.4}", u.x_m),
                format!("{:.4}", u.y_m),
                u.hotspot_id.map(|h| h.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_hotspots_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["hotspot_id", "x", "y", "radius"])?;
        for (i, h) in self.hotspots.iter().enumerate() {
            w.write_record([
                i.to_string(),
                format!("{:.4}", h.center_x_m),
                format!("{:.4}", h.center_y_m),
                format!("{:.1}", h.radius_m),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds the site lattice covering the region plus `GUARD_TIERS` tiers
/// beyond each edge. UEs are left empty.
pub fn build_hex_grid(cfg: &ScenarioConfig) -> Result<Deployment> {
    let side = cfg.region_side_m;
    let isd = cfg.isd_m;
    if !(side > 0.0 && isd > 0.0) || side < isd {
        return Err(Error::DegenerateRegion {
            side_m: side,
            isd_m: isd,
        });
    }
    let lattice = HexLattice {
        isd_m: isd,
        center_x_m: side / 2.0,
        center_y_m: side / 2.0,
    };
    let margin = GUARD_TIERS as f64 * isd;
    let height = cfg.model.height_rule.height_m(isd);
    let pitch = lattice.row_pitch_m();
    let half = side / 2.0 + margin;
    let max_row = (half / pitch).ceil() as i64 + 1;
    let max_col = (half / isd).ceil() as i64 + 1;
    let eps = 1e-9 * isd;

    let mut sites = Vec::new();
    for row in -max_row..=max_row {
        for col in -max_col..=max_col {
            let (x, y) = lattice.point(row, col);
            if x < -margin - eps || x > side + margin + eps || y < -margin - eps || y > side + margin + eps {
                continue;
            }
            let interior = (-eps..=side + eps).contains(&x) && (-eps..=side + eps).contains(&y);
            sites.push(Site {
                id: sites.len(),
                x_m: x,
                y_m: y,
                height_m: height,
                in_guard_tier: !interior,
            });
        }
    }
    Ok(Deployment {
        lattice,
        region_side_m: side,
        guard_margin_m: margin,
        sites,
        ues: Vec::new(),
        hotspots: Vec::new(),
    })
}

/// Sizes of the hotspots for `clustered` UEs: full groups of 20 and one
/// final under-filled group for the remainder.
pub fn hotspot_sizes(clustered: usize) -> Vec<usize> {
    let mut sizes = vec![UES_PER_HOTSPOT; clustered / UES_PER_HOTSPOT];
    if !clustered.is_multiple_of(UES_PER_HOTSPOT) {
        sizes.push(clustered % UES_PER_HOTSPOT);
    }
    sizes
}

/// Drops UEs into `deployment` following `cfg.ue_distribution`.
pub fn drop_ues<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    deployment: &mut Deployment,
    rng: &mut R,
) -> Result<()> {
    let total = cfg.ue_count();
    let side = deployment.region_side_m;
    let lattice = deployment.lattice;
    let clustered = match cfg.ue_distribution {
        UeDistribution::Uniform => 0,
        UeDistribution::Nonuniform => total / 2,
    };
    let sizes = hotspot_sizes(clustered);
    let hotspots = place_hotspots(side, sizes.len(), rng)?;

    let clear = |x: f64, y: f64| lattice.nearest_distance_m(x, y) >= UE_SITE_EXCLUSION_M;
    let mut ues = Vec::with_capacity(total);
    while ues.len() < total - clustered {
        let (x, y) = (rng.gen::<f64>() * side, rng.gen::<f64>() * side);
        if clear(x, y) {
            ues.push(Ue {
                id: ues.len(),
                x_m: x,
                y_m: y,
                hotspot_id: None,
            });
        }
    }
    for (h, (&size, spot)) in sizes.iter().zip(&hotspots).enumerate() {
        let mut placed = 0;
        while placed < size {
            let r = spot.radius_m * rng.gen::<f64>().sqrt();
            let a = 2.0 * PI * rng.gen::<f64>();
            let (x, y) = (spot.center_x_m + r * a.cos(), spot.center_y_m + r * a.sin());
            if clear(x, y) {
                ues.push(Ue {
                    id: ues.len(),
                    x_m: x,
                    y_m: y,
                    hotspot_id: Some(h),
                });
                placed += 1;
            }
        }
    }
    deployment.ues = ues;
    deployment.hotspots = hotspots;
    Ok(())
}

/// Hotspot centers uniform over the region inset by the hotspot radius,
/// pairwise at least `HOTSPOT_MIN_SEPARATION_M` apart.
fn place_hotspots<R: Rng + ?Sized>(side: f64, count: usize, rng: &mut R) -> Result<Vec<Hotspot>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let span = side - 2.0 * HOTSPOT_RADIUS_M;
    let mut spots: Vec<Hotspot> = Vec::with_capacity(count);
    let mut attempts = 0;
    while spots.len() < count {
        if span < 0.0 || attempts >= HOTSPOT_MAX_ATTEMPTS {
            return Err(Error::HotspotPackingFailed {
                attempts,
                placed: spots.len(),
                wanted: count,
            });
        }
        attempts += 1;
        let x = HOTSPOT_RADIUS_M + rng.gen::<f64>() * span;
        let y = HOTSPOT_RADIUS_M + rng.gen::<f64>() * span;
        if spots
            .iter()
            .all(|s| (s.center_x_m - x).hypot(s.center_y_m - y) >= HOTSPOT_MIN_SEPARATION_M)
        {
            spots.push(Hotspot {
                center_x_m: x,
                center_y_m: y,
                radius_m: HOTSPOT_RADIUS_M,
            });
        }
    }
    Ok(spots)
}
