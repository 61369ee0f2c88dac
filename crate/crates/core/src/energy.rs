//! Small-cell power consumption (full load, slow idle, shut-down) per ISD
//! and antenna count, idle-mode profiles, and network energy efficiency.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SleepModel {
    /// Slow idle.
    Sm1,
    /// Shut-down state.
    Sm2,
    /// 30 % of slow idle.
    Sm3,
    /// 15 % of slow idle.
    Sm4,
    /// Idle draws nothing.
    Sm5,
}

impl SleepModel {
    pub const ALL: [SleepModel; 5] = [
        SleepModel::Sm1,
        SleepModel::Sm2,
        SleepModel::Sm3,
        SleepModel::Sm4,
        SleepModel::Sm5,
    ];

    pub fn index(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1..=5 => Ok(Self::ALL[i as usize - 1]),
            _ => Err(Error::InvalidConfig(format!("sleep model must be 1..5, got {i}"))),
        }
    }

    /// Idle power draw for a table entry.
    pub fn idle_power_w(self, entry: &PowerEntry) -> f64 {
        match self {
            SleepModel::Sm1 => entry.idle1_w,
            SleepModel::Sm2 => entry.idle2_w,
            SleepModel::Sm3 => 0.30 * entry.idle1_w,
            SleepModel::Sm4 => 0.15 * entry.idle1_w,
            SleepModel::Sm5 => 0.0,
        }
    }
}

impl std::str::FromStr for SleepModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches("sm");
        t.parse::<u8>()
            .map_err(|_| Error::InvalidConfig(format!("bad sleep model '{s}'")))
            .and_then(Self::from_index)
    }
}

/// One ISD row: transmit power and consumption for 1, 2 and 4 antennas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRow {
    pub isd_m: f64,
    pub tx_power_dbm: f64,
    pub tx_power_mw: f64,
    pub full_load_w: [f64; 3],
    pub idle1_w: [f64; 3],
    pub idle2_w: [f64; 3],
}

/// Consumption figures for one (ISD, antenna count) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEntry {
    pub isd_m: f64,
    pub antennas: u32,
    pub tx_power_dbm: f64,
    pub full_load_w: f64,
    pub idle1_w: f64,
    pub idle2_w: f64,
}

// Table values, not approximations of mathematical constants.
#[allow(clippy::approx_constant)]
const POWER_ROWS: [PowerRow; 9] = [
    PowerRow { isd_m: 200.0, tx_power_dbm: 23.27, tx_power_mw: 212.32, full_load_w: [1.8923, 2.5848, 4.4560], idle1_w: [0.2324, 0.3105, 0.4959], idle2_w: [0.1881, 0.2478, 0.4073] },
    PowerRow { isd_m: 150.0, tx_power_dbm: 20.52, tx_power_mw: 112.72, full_load_w: [1.3405, 2.0316, 3.9015], idle1_w: [0.2191, 0.2971, 0.4825], idle2_w: [0.1748, 0.2345, 0.3939] },
    PowerRow { isd_m: 100.0, tx_power_dbm: 16.64, tx_power_mw: 46.13, full_load_w: [0.9793, 1.6696, 3.5386], idle1_w: [0.2104, 0.2884, 0.4738], idle2_w: [0.1661, 0.2257, 0.3852] },
    PowerRow { isd_m: 75.0, tx_power_dbm: 13.90, tx_power_mw: 24.55, full_load_w: [0.8643, 1.5544, 3.4231], idle1_w: [0.2076, 0.2856, 0.4710], idle2_w: [0.1633, 0.2230, 0.3824] },
    PowerRow { isd_m: 50.0, tx_power_dbm: 10.02, tx_power_mw: 10.05, full_load_w: [0.7853, 1.4752, 3.3437], idle1_w: [0.2057, 0.2837, 0.4691], idle2_w: [0.1614, 0.2210, 0.3804] },
    PowerRow { isd_m: 35.0, tx_power_dbm: 6.61, tx_power_mw: 4.58, full_load_w: [0.7558, 1.4456, 3.3141], idle1_w: [0.2050, 0.2830, 0.4683], idle2_w: [0.1607, 0.2203, 0.3797] },
    PowerRow { isd_m: 20.0, tx_power_dbm: 1.27, tx_power_mw: 1.34, full_load_w: [0.7383, 1.4281, 3.2965], idle1_w: [0.2046, 0.2826, 0.4679], idle2_w: [0.1603, 0.2199, 0.3793] },
    PowerRow { isd_m: 10.0, tx_power_dbm: -5.20, tx_power_mw: 0.30, full_load_w: [0.7326, 1.4224, 3.2908], idle1_w: [0.2044, 0.2824, 0.4678], idle2_w: [0.1601, 0.2198, 0.3792] },
    PowerRow { isd_m: 5.0, tx_power_dbm: -11.89, tx_power_mw: 0.06, full_load_w: [0.7314, 1.4211, 3.2895], idle1_w: [0.2044, 0.2824, 0.4678], idle2_w: [0.1601, 0.2197, 0.3791] },
];

/// Power consumption table for the 2020 small-cell type at 20 MHz.
#[derive(Debug, Clone, Copy, Default)]
pub struct PowerTable;

impl PowerTable {
    pub fn rows(&self) -> &'static [PowerRow] {
        &POWER_ROWS
    }

    pub fn entry(&self, isd_m: f64, antennas: u32) -> Result<PowerEntry> {
        let col = match antennas {
            1 => 0,
            2 => 1,
            4 => 2,
            _ => return Err(Error::NoPowerModelRow { isd_m, antennas }),
        };
        let row = POWER_ROWS
            .iter()
            .find(|r| (r.isd_m - isd_m).abs() < 1e-9)
            .ok_or(Error::NoPowerModelRow { isd_m, antennas })?;
        Ok(PowerEntry {
            isd_m,
            antennas,
            tx_power_dbm: row.tx_power_dbm,
            full_load_w: row.full_load_w[col],
            idle1_w: row.idle1_w[col],
            idle2_w: row.idle2_w[col],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteState {
    Active,
    Idle,
}

/// Power drawn by one site. Active power interpolates linearly between the
/// slow-idle and full-load anchors with the scheduled-RB share.
pub fn site_power_w(state: SiteState, entry: &PowerEntry, profile: SleepModel, load_fraction: f64) -> f64 {
    match state {
        SiteState::Active => {
            let load = load_fraction.clamp(0.0, 1.0);
            entry.idle1_w + (entry.full_load_w - entry.idle1_w) * load
        }
        SiteState::Idle => profile.idle_power_w(entry),
    }
}

/// Aggregate inputs for network energy efficiency over the non-guard sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkLoad {
    pub isd_m: f64,
    pub antennas: u32,
    pub served_throughput_bps: f64,
    pub active_sites: usize,
    pub idle_sites: usize,
    pub load_fraction: f64,
}

/// Served throughput per Watt, idle sites included at their profile power.
pub fn network_energy_efficiency_bps_per_w(load: &NetworkLoad, profile: SleepModel) -> Result<f64> {
    let entry = PowerTable.entry(load.isd_m, load.antennas)?;
    let power = load.active_sites as f64 * site_power_w(SiteState::Active, &entry, profile, load.load_fraction)
        + load.idle_sites as f64 * site_power_w(SiteState::Idle, &entry, profile, 0.0);
    if power <= 0.0 {
        return Ok(0.0);
    }
    Ok(load.served_throughput_bps / power)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_examples() {
        let e = PowerTable.entry(35.0, 1).unwrap();
        assert_eq!(site_power_w(SiteState::Active, &e, SleepModel::Sm1, 1.0), 0.7558);
        let e = PowerTable.entry(200.0, 1).unwrap();
        assert_eq!(site_power_w(SiteState::Idle, &e, SleepModel::Sm2, 0.0), 0.1881);
        let sm3 = site_power_w(SiteState::Idle, &e, SleepModel::Sm3, 0.0);
        assert!((sm3 - 0.0697).abs() < 1e-4);
        assert!((sm3 - 0.30 * 0.2324).abs() < 1e-15);
    }

    #[test]
    fn table_rows_are_ordered() {
        for r in PowerTable.rows() {
            for c in 0..3 {
                assert!(r.full_load_w[c] > r.idle1_w[c]);
                assert!(r.idle1_w[c] > r.idle2_w[c]);
                assert!(r.idle2_w[c] > 0.0);
            }
            for c in 0..2 {
                assert!(r.full_load_w[c + 1] > r.full_load_w[c]);
                assert!(r.idle1_w[c + 1] > r.idle1_w[c]);
                assert!(r.idle2_w[c + 1] > r.idle2_w[c]);
            }
        }
    }

    #[test]
    fn sleep_profiles() {
        let e = PowerTable.entry(50.0, 4).unwrap();
        assert_eq!(SleepModel::Sm1.idle_power_w(&e), 0.4691);
        assert_eq!(SleepModel::Sm2.idle_power_w(&e), 0.3804);
        assert_eq!(SleepModel::Sm4.idle_power_w(&e), 0.15 * 0.4691);
        assert_eq!(SleepModel::Sm5.idle_power_w(&e), 0.0);
        assert_eq!("sm3".parse::<SleepModel>().unwrap(), SleepModel::Sm3);
        assert_eq!("5".parse::<SleepModel>().unwrap(), SleepModel::Sm5);
        assert!("6".parse::<SleepModel>().is_err());
    }

    #[test]
    fn active_power_interpolates_load() {
        let e = PowerTable.entry(100.0, 2).unwrap();
        let half = site_power_w(SiteState::Active, &e, SleepModel::Sm1, 0.5);
        assert!((half - (0.2884 + 0.5 * (1.6696 - 0.2884))).abs() < 1e-12);
        assert_eq!(site_power_w(SiteState::Active, &e, SleepModel::Sm5, 0.0), 0.2884);
    }

    #[test]
    fn missing_row_is_an_error() {
        assert!(matches!(PowerTable.entry(40.0, 1), Err(Error::NoPowerModelRow { .. })));
        assert!(matches!(PowerTable.entry(35.0, 3), Err(Error::NoPowerModelRow { .. })));
    }

    #[test]
    fn single_served_site_with_zero_idle_power() {
        let load = NetworkLoad {
            isd_m: 20.0,
            antennas: 1,
            served_throughput_bps: 5e7,
            active_sites: 1,
            idle_sites: 700,
            load_fraction: 1.0,
        };
        let ee = network_energy_efficiency_bps_per_w(&load, SleepModel::Sm5).unwrap();
        assert!((ee - 5e7 / 0.7383).abs() < 1e-6);
        let mut prev = 0.0;
        for p in [SleepModel::Sm1, SleepModel::Sm3, SleepModel::Sm4, SleepModel::Sm5] {
            let v = network_energy_efficiency_bps_per_w(&load, p).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }
}
