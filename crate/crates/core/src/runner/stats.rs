//! Percentiles, empirical CDFs and the cross-run summary.

use crate::error::{Error, Result};

use super::RunMetrics;

/// Percentile `p` (0–100) of ascending `sorted` data by linear
/// interpolation between closest order statistics: with `h = (n−1)·p/100`,
/// the result is `x[⌊h⌋] + (h − ⌊h⌋)·(x[⌊h⌋+1] − x[⌊h⌋])`.
pub fn percentile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * (p / 100.0).clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Percentile of unsorted data.
pub fn percentile_of(data: &[f64], p: f64) -> Option<f64> {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    percentile(&v, p)
}

pub fn mean(data: &[f64]) -> Option<f64> {
    (!data.is_empty()).then(|| data.iter().sum::<f64>() / data.len() as f64)
}

/// Fixed SINR grid for CDF output, in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfGrid {
    pub min_db: f64,
    pub max_db: f64,
    pub step_db: f64,
}

impl Default for CdfGrid {
    fn default() -> Self {
        CdfGrid {
            min_db: -40.0,
            max_db: 80.0,
            step_db: 0.5,
        }
    }
}

impl CdfGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max_db - self.min_db) / self.step_db).round() as usize;
        (0..=n).map(|i| self.min_db + i as f64 * self.step_db).collect()
    }

    /// `P(X ≤ x)` at every grid point; samples beyond the grid are clamped
    /// onto its ends, so the last value is always 1.
    pub fn cdf(&self, samples: &[f64]) -> Vec<(f64, f64)> {
        let mut s: Vec<f64> = samples.iter().map(|x| x.clamp(self.min_db, self.max_db)).collect();
        s.sort_by(f64::total_cmp);
        let n = s.len().max(1) as f64;
        self.points()
            .into_iter()
            .map(|x| {
                let below = s.partition_point(|&v| v <= x + 1e-9);
                (x, below as f64 / n)
            })
            .collect()
    }
}

/// Statistics pooled over all runs of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub runs: usize,
    pub served_ue_samples: usize,
    pub sinr_samples: usize,
    pub mean_ue_tput_bps: f64,
    /// 5th percentile of UE throughput (cell edge).
    pub p5_ue_tput_bps: f64,
    pub p50_ue_tput_bps: f64,
    pub median_sinr_db: f64,
    pub mean_active_sites_per_km2: f64,
    pub mean_ues_per_active_site: f64,
    pub tx_power_dbm: f64,
    pub mean_network_tx_power_dbm_per_km2: f64,
    pub mean_ee_bps_per_w: Option<f64>,
    pub coverage_hole_fraction: f64,
    pub sinr_cdf: Vec<(f64, f64)>,
}

/// Pools per-run samples and averages per-run scalars.
pub fn aggregate(runs: &[RunMetrics], grid: &CdfGrid) -> Result<Summary> {
    if runs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut tput: Vec<f64> = runs.iter().flat_map(|r| r.ue_throughputs_bps.iter().copied()).collect();
    let mut sinr: Vec<f64> = runs.iter().flat_map(|r| r.sinr_samples_db.iter().copied()).collect();
    tput.sort_by(f64::total_cmp);
    sinr.sort_by(f64::total_cmp);
    let avg = |f: &dyn Fn(&RunMetrics) -> f64| runs.iter().map(f).sum::<f64>() / runs.len() as f64;
    let ee: Option<Vec<f64>> = runs.iter().map(|r| r.ee_bps_per_w).collect();
    Ok(Summary {
        runs: runs.len(),
        served_ue_samples: tput.len(),
        sinr_samples: sinr.len(),
        mean_ue_tput_bps: mean(&tput).unwrap_or(f64::NAN),
        p5_ue_tput_bps: percentile(&tput, 5.0).unwrap_or(f64::NAN),
        p50_ue_tput_bps: percentile(&tput, 50.0).unwrap_or(f64::NAN),
        median_sinr_db: percentile(&sinr, 50.0).unwrap_or(f64::NAN),
        mean_active_sites_per_km2: avg(&|r| r.active_sites_per_km2),
        mean_ues_per_active_site: avg(&|r| r.mean_ues_per_active_site),
        tx_power_dbm: runs[0].tx_power_dbm,
        mean_network_tx_power_dbm_per_km2: avg(&|r| r.network_tx_power_dbm_per_km2),
        mean_ee_bps_per_w: ee.map(|v| mean(&v).unwrap_or(f64::NAN)),
        coverage_hole_fraction: avg(&|r| r.coverage_hole_fraction),
        sinr_cdf: grid.cdf(&sinr),
    })
}
