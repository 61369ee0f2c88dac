//! CSV outputs. Every file starts with a `#`-prefixed audit block listing
//! the run controls and every model constant, followed by a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::model::ModelParams;
use crate::scenario::ScenarioConfig;
use crate::scheduler::SchedRecord;

use super::stats::Summary;
use super::sweep::EeRecord;

/// Ordered `key = value` lines written at the top of every output file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditBlock {
    pub entries: Vec<(String, String)>,
}

impl AuditBlock {
    pub fn new(tool: &str, model: &ModelParams) -> Self {
        let mut entries = vec![
            ("tool".to_string(), tool.to_string()),
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ];
        entries.extend(model.audit_lines());
        entries.push((
            "percentile_rule".into(),
            "linear between order statistics, h = (n-1)p/100".into(),
        ));
        AuditBlock { entries }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "# {k} = {v}")?;
        }
        Ok(())
    }
}

fn open(path: &Path, audit: &AuditBlock) -> Result<csv::Writer<BufWriter<File>>> {
    let mut f = BufWriter::new(File::create(path)?);
    audit.write_to(&mut f)?;
    Ok(csv::Writer::from_writer(f))
}

const CONFIG_COLUMNS: [&str; 11] = [
    "isd",
    "ue_density",
    "ue_dist",
    "idle",
    "sleep_model",
    "carrier_ghz",
    "bandwidth_hz",
    "antennas",
    "target_snr_db",
    "runs",
    "seed",
];

fn config_fields(c: &ScenarioConfig) -> Vec<String> {
    vec![
        c.isd_m.to_string(),
        c.ue_density_per_km2.to_string(),
        c.ue_distribution.name().to_string(),
        if c.idle_mode_enabled { "on" } else { "off" }.to_string(),
        c.sleep_model.index().to_string(),
        c.carrier_ghz.to_string(),
        c.bandwidth_hz().to_string(),
        c.num_bs_antennas.to_string(),
        c.target_edge_snr_db.to_string(),
        c.runs.to_string(),
        c.seed.to_string(),
    ]
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_summary_csv(path: &Path, rows: &[(ScenarioConfig, Summary)], audit: &AuditBlock) -> Result<()> {
    let mut w = open(path, audit)?;
    let mut header: Vec<&str> = CONFIG_COLUMNS.to_vec();
    header.extend([
        "mean_ue_tput_bps",
        "p5_ue_tput_bps",
        "p50_ue_tput_bps",
        "median_sinr_db",
        "active_sites_per_km2",
        "ues_per_active_site",
        "tx_power_dbm",
        "network_tx_power_dbm_per_km2",
        "mean_ee_bps_per_w",
        "coverage_hole_fraction",
        "served_ue_samples",
    ]);
    w.write_record(&header)?;
    for (c, s) in rows {
        let mut rec = config_fields(c);
        rec.extend([
            s.mean_ue_tput_bps.to_string(),
            s.p5_ue_tput_bps.to_string(),
            s.p50_ue_tput_bps.to_string(),
            s.median_sinr_db.to_string(),
            s.mean_active_sites_per_km2.to_string(),
            s.mean_ues_per_active_site.to_string(),
            s.tx_power_dbm.to_string(),
            s.mean_network_tx_power_dbm_per_km2.to_string(),
            opt(s.mean_ee_bps_per_w),
            s.coverage_hole_fraction.to_string(),
            s.served_ue_samples.to_string(),
        ]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sinr_cdf_csv(path: &Path, rows: &[(ScenarioConfig, Summary)], audit: &AuditBlock) -> Result<()> {
    let mut w = open(path, audit)?;
    let mut header: Vec<&str> = CONFIG_COLUMNS.to_vec();
    header.extend(["sinr_db", "cdf"]);
    w.write_record(&header)?;
    for (c, s) in rows {
        let base = config_fields(c);
        for (x, p) in &s.sinr_cdf {
            let mut rec = base.clone();
            rec.extend([x.to_string(), p.to_string()]);
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sched_csv(path: &Path, rows: &[SchedRecord], audit: &AuditBlock) -> Result<()> {
    let mut w = open(path, audit)?;
    w.write_record([
        "isd",
        "scheduler",
        "ues_per_bs",
        "mean_cell_tput_bps",
        "p5_ue_tput_bps",
        "p50",
        "p95",
    ])?;
    for r in rows {
        w.write_record([
            r.isd_m.to_string(),
            r.scheduler.name().to_string(),
            r.ues_per_bs.to_string(),
            r.mean_cell_tput_bps.to_string(),
            r.p5_ue_tput_bps.to_string(),
            r.p50_ue_tput_bps.to_string(),
            r.p95_ue_tput_bps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ee_csv(path: &Path, rows: &[EeRecord], audit: &AuditBlock) -> Result<()> {
    let mut w = open(path, audit)?;
    w.write_record(["isd", "antennas", "sleep_model", "mean_ee_bps_per_w"])?;
    for r in rows {
        w.write_record([
            r.isd_m.to_string(),
            r.antennas.to_string(),
            r.sleep_model.index().to_string(),
            r.mean_ee_bps_per_w.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
