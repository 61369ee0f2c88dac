//! Command-line front end.
//!
//! Settings are layered: built-in defaults, then an optional `key = value`
//! file given with `--config`, then command-line flags. Usage errors exit
//! with status 2, simulation errors with status 1.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, CommandFactory, Parser, Subcommand};

use densecell_core::runner::config::{self, normalize_key, KeyValues};
use densecell_core::runner::output::{self, AuditBlock};
use densecell_core::runner::stats::CdfGrid;
use densecell_core::runner::sweep::{run_ee_study, run_sweep, SweepSpec};
use densecell_core::runner::PreparedRun;
use densecell_core::scenario::REFERENCE_ISDS_M;
use densecell_core::scheduler::{run_scheduler_study, SchedStudyConfig};
use densecell_core::{Error, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(name = "densecell", version, about = "Monte-Carlo simulator for ultra-dense small-cell networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one configuration; writes summary.csv and sinr_cdf.csv.
    Simulate(Settings),
    /// Cross-product sweep; list values are comma-separated (default ISDs: the nine reference ISDs).
    Sweep(Settings),
    /// Round-robin vs proportional-fair study; writes sched.csv.
    SchedStudy(Settings),
    /// Energy efficiency per ISD, antenna count and sleep model; writes ee.csv.
    EeStudy(Settings),
    /// Write the sites and UEs of one run as CSV.
    DumpDeployment {
        #[command(flatten)]
        settings: Settings,
        /// Run index whose drop is written.
        #[arg(long, default_value_t = 0)]
        run: u64,
    },
}

/// Flags shared by every subcommand. Values are kept as text and parsed by
/// the same code that reads configuration files.
#[derive(Args, Debug, Default)]
struct Settings {
    /// `key = value` file; flags take precedence over it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Inter-site distance in m.
    #[arg(long)]
    isd: Option<String>,
    /// UEs per km².
    #[arg(long)]
    ue_density: Option<String>,
    #[arg(long, value_parser = ["uniform", "hotspot"])]
    ue_dist: Option<String>,
    #[arg(long, value_parser = ["on", "off"])]
    idle: Option<String>,
    #[arg(long, value_parser = ["1", "2", "3", "4", "5"])]
    sleep_model: Option<String>,
    #[arg(long)]
    carrier_ghz: Option<String>,
    /// Defaults to 5 % of the carrier frequency.
    #[arg(long)]
    bandwidth_hz: Option<String>,
    #[arg(long, value_parser = ["1", "2", "4"])]
    antennas: Option<String>,
    /// Cell-edge SNR target in dB.
    #[arg(long)]
    target_snr_db: Option<String>,
    /// Monte-Carlo runs (drops in the scheduler study).
    #[arg(long)]
    runs: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
    /// UEs per cell for the scheduler study.
    #[arg(long)]
    ues_per_bs: Option<String>,
    /// TTIs per drop for the scheduler study.
    #[arg(long)]
    ttis: Option<String>,
}

impl Settings {
    fn flags(&self) -> Vec<(&'static str, &String)> {
        [
            ("isd", &self.isd),
            ("ue-density", &self.ue_density),
            ("ue-dist", &self.ue_dist),
            ("idle", &self.idle),
            ("sleep-model", &self.sleep_model),
            ("carrier-ghz", &self.carrier_ghz),
            ("bandwidth-hz", &self.bandwidth_hz),
            ("antennas", &self.antennas),
            ("target-snr-db", &self.target_snr_db),
            ("runs", &self.runs),
            ("seed", &self.seed),
            ("out", &self.out),
            ("ues-per-bs", &self.ues_per_bs),
            ("ttis", &self.ttis),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
        .collect()
    }

    /// File settings overlaid with flags.
    fn key_values(&self) -> Result<KeyValues, Error> {
        let mut kv = match &self.config {
            Some(p) => config::read_key_values(p)?,
            None => KeyValues::new(),
        };
        for (k, v) in self.flags() {
            kv.insert(normalize_key(k), v.clone());
        }
        Ok(kv)
    }
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Run(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Run(e)
    }
}

fn usage_err(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let sub = match &cli.command {
        Command::Simulate(_) => "simulate",
        Command::Sweep(_) => "sweep",
        Command::SchedStudy(_) => "sched-study",
        Command::EeStudy(_) => "ee-study",
        Command::DumpDeployment { .. } => "dump-deployment",
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            let mut cmd = Cli::command();
            cmd.build();
            let usage = cmd
                .find_subcommand_mut(sub)
                .map(|c| c.render_usage().to_string())
                .unwrap_or_default();
            eprintln!("error: {msg}\n\n{usage}\n\nFor more information, try 'densecell {sub} --help'.");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Simulate(s) => simulate(&s),
        Command::Sweep(s) => sweep(&s),
        Command::SchedStudy(s) => sched_study(&s),
        Command::EeStudy(s) => ee_study(&s),
        Command::DumpDeployment { settings, run } => dump_deployment(&settings, run),
    }
}

fn out_dir(kv: &KeyValues) -> Result<PathBuf, Failure> {
    let dir = PathBuf::from(kv.get("out").map(String::as_str).unwrap_or("results"));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

/// A single scenario; `--isd` must come from a flag or the file.
fn single_config(kv: &KeyValues) -> Result<ScenarioConfig, Failure> {
    if !kv.contains_key("isd") {
        return Err(Failure::Usage("--isd is required (or an `isd` entry in --config)".into()));
    }
    let mut cfg = ScenarioConfig::default();
    config::apply_all(&mut cfg, kv).map_err(usage_err)?;
    check(&cfg)?;
    Ok(cfg)
}

fn check(cfg: &ScenarioConfig) -> Result<(), Failure> {
    for note in cfg.validate().map_err(usage_err)? {
        eprintln!("note: {note}");
    }
    Ok(())
}

fn audit(tool: &str, cfg: &ScenarioConfig) -> AuditBlock {
    AuditBlock::new(tool, &cfg.model)
        .with("runs", cfg.runs)
        .with("master_seed", cfg.seed)
        .with("region_side_m", cfg.region_side_m)
}

fn write_summaries(dir: &Path, rows: &[(ScenarioConfig, densecell_core::runner::stats::Summary)], audit: &AuditBlock) -> Result<(), Failure> {
    let summary = dir.join("summary.csv");
    let cdf = dir.join("sinr_cdf.csv");
    output::write_summary_csv(&summary, rows, audit).context("writing summary.csv")?;
    output::write_sinr_cdf_csv(&cdf, rows, audit).context("writing sinr_cdf.csv")?;
    eprintln!("wrote {} and {}", summary.display(), cdf.display());
    Ok(())
}

fn simulate(s: &Settings) -> Result<(), Failure> {
    let kv = s.key_values().map_err(usage_err)?;
    let cfg = single_config(&kv)?;
    let dir = out_dir(&kv)?;
    let t0 = Instant::now();
    let rows = run_sweep(&SweepSpec::single(&cfg), &CdfGrid::default()).context("simulation failed")?;
    let (_, sum) = &rows[0];
    println!(
        "isd={} m  runs={}  mean={:.4e} bps  p5={:.4e} bps  median_sinr={:.2} dB  ues/active_bs={:.3}  tx={:.2} dBm  ({:.1} s)",
        cfg.isd_m,
        sum.runs,
        sum.mean_ue_tput_bps,
        sum.p5_ue_tput_bps,
        sum.median_sinr_db,
        sum.mean_ues_per_active_site,
        sum.tx_power_dbm,
        t0.elapsed().as_secs_f64()
    );
    write_summaries(&dir, &rows, &audit("simulate", &cfg))
}

fn sweep(s: &Settings) -> Result<(), Failure> {
    let kv = s.key_values().map_err(usage_err)?;
    let spec = SweepSpec::from_key_values(&ScenarioConfig::default(), &kv).map_err(usage_err)?;
    let points = spec.points();
    for p in &points {
        check(p)?;
    }
    let dir = out_dir(&kv)?;
    eprintln!("sweeping {} points x {} runs", points.len(), spec.base.runs);
    let rows = run_sweep(&spec, &CdfGrid::default()).context("sweep failed")?;
    for (c, sum) in &rows {
        println!(
            "isd={:>5} f={:>4} GHz a={} idle={}  mean={:.4e}  p5={:.4e}  median_sinr={:.2} dB",
            c.isd_m,
            c.carrier_ghz,
            c.num_bs_antennas,
            if c.idle_mode_enabled { "on" } else { "off" },
            sum.mean_ue_tput_bps,
            sum.p5_ue_tput_bps,
            sum.median_sinr_db
        );
    }
    write_summaries(&dir, &rows, &audit("sweep", &spec.base))
}

fn list_f64(kv: &KeyValues, key: &str, default: &[f64]) -> Result<Vec<f64>, Failure> {
    match kv.get(key) {
        Some(v) => config::split_list(v)
            .into_iter()
            .map(|x| config::parse_f64(key, x).map_err(usage_err))
            .collect(),
        None => Ok(default.to_vec()),
    }
}

fn list_u64(kv: &KeyValues, key: &str, default: &[u64]) -> Result<Vec<u64>, Failure> {
    match kv.get(key) {
        Some(v) => config::split_list(v)
            .into_iter()
            .map(|x| config::parse_u64(key, x).map_err(usage_err))
            .collect(),
        None => Ok(default.to_vec()),
    }
}

fn sched_study(s: &Settings) -> Result<(), Failure> {
    let kv = s.key_values().map_err(usage_err)?;
    let mut cfg = SchedStudyConfig::default();
    cfg.isds_m = list_f64(&kv, "isd", &cfg.isds_m)?;
    cfg.ues_per_bs = list_u64(&kv, "uesperbs", &[1, 2, 4, 6, 8])?
        .into_iter()
        .map(|u| u as usize)
        .collect();
    // Scenario-level keys (noise figure, edge convention, ...) go through
    // the shared parser; the study reads the fields it uses from it.
    let mut scen = ScenarioConfig {
        carrier_ghz: cfg.carrier_ghz,
        bandwidth_hz: Some(cfg.bandwidth_hz),
        runs: cfg.drops,
        seed: cfg.seed,
        ..ScenarioConfig::default()
    };
    for (k, v) in &kv {
        if k != "isd" {
            config::apply_setting(&mut scen, k, v).map_err(usage_err)?;
        }
    }
    cfg.carrier_ghz = scen.carrier_ghz;
    cfg.bandwidth_hz = scen.bandwidth_hz.unwrap_or(cfg.bandwidth_hz);
    cfg.target_edge_snr_db = scen.target_edge_snr_db;
    cfg.drops = scen.runs;
    cfg.seed = scen.seed;
    cfg.model = scen.model.clone();
    if let Some(t) = kv.get("ttis") {
        cfg.ttis = config::parse_u64("ttis", t).map_err(usage_err)?;
    }
    if cfg.isds_m.iter().any(|i| i.is_nan() || *i <= 0.0) || cfg.ues_per_bs.contains(&0) || cfg.drops == 0 || cfg.ttis == 0 {
        return Err(Failure::Usage("isd, ues-per-bs, runs and ttis must be positive".into()));
    }
    let dir = out_dir(&kv)?;
    eprintln!("scheduler study: {} ISDs x {} drops x {} TTIs", cfg.isds_m.len(), cfg.drops, cfg.ttis);
    let recs = run_scheduler_study(&cfg).context("scheduler study failed")?;
    for r in &recs {
        println!(
            "isd={:>5} {:<2} U={}  cell={:.4e} bps  p5={:.4e}  p50={:.4e}  p95={:.4e}",
            r.isd_m,
            r.scheduler.name(),
            r.ues_per_bs,
            r.mean_cell_tput_bps,
            r.p5_ue_tput_bps,
            r.p50_ue_tput_bps,
            r.p95_ue_tput_bps
        );
    }
    let audit = AuditBlock::new("sched-study", &cfg.model)
        .with("drops", cfg.drops)
        .with("ttis", cfg.ttis)
        .with("master_seed", cfg.seed)
        .with("carrier_ghz", cfg.carrier_ghz)
        .with("bandwidth_hz", cfg.bandwidth_hz)
        .with("target_snr_db", cfg.target_edge_snr_db)
        .with("region_side_isds", cfg.region_side_isds);
    let path = dir.join("sched.csv");
    output::write_sched_csv(&path, &recs, &audit).context("writing sched.csv")?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn ee_study(s: &Settings) -> Result<(), Failure> {
    let kv = s.key_values().map_err(usage_err)?;
    let isds = list_f64(&kv, "isd", &REFERENCE_ISDS_M)?;
    let antennas: Vec<u32> = match kv.get("antennas") {
        Some(v) => config::split_list(v)
            .into_iter()
            .map(|x| config::parse_antennas("antennas", x).map_err(usage_err))
            .collect::<Result<_, _>>()?,
        None => vec![1, 2, 4],
    };
    let mut base = ScenarioConfig::default();
    for (k, v) in &kv {
        if k != "isd" && k != "antennas" {
            config::apply_setting(&mut base, k, v).map_err(usage_err)?;
        }
    }
    for &isd in &isds {
        check(&ScenarioConfig { isd_m: isd, ..base.clone() })?;
    }
    let dir = out_dir(&kv)?;
    let recs = run_ee_study(&base, &isds, &antennas).map_err(|e| match e {
        Error::NoPowerModelRow { .. } => usage_err(e),
        e => Failure::Run(anyhow::Error::new(e).context("energy study failed")),
    })?;
    for r in &recs {
        println!(
            "isd={:>5} a={} sm={}  ee={:.4e} bps/W",
            r.isd_m,
            r.antennas,
            r.sleep_model.index(),
            r.mean_ee_bps_per_w
        );
    }
    let audit = audit("ee-study", &base).with("bandwidth_hz", base.bandwidth_hz.unwrap_or(20e6));
    let path = dir.join("ee.csv");
    output::write_ee_csv(&path, &recs, &audit).context("writing ee.csv")?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn dump_deployment(s: &Settings, run: u64) -> Result<(), Failure> {
    let kv = s.key_values().map_err(usage_err)?;
    let cfg = single_config(&kv)?;
    let dir = out_dir(&kv)?;
    let prepared = PreparedRun::new(&cfg, run).context("building deployment")?;
    let dep = &prepared.deployment;
    let sites = dir.join("sites.csv");
    let ues = dir.join("ues.csv");
    dep.write_sites_csv(&sites).context("writing sites.csv")?;
    dep.write_ues_csv(&ues).context("writing ues.csv")?;
    println!(
        "run {run}: {} sites ({} interior), {} UEs, {} hotspots",
        dep.sites.len(),
        dep.interior_sites().count(),
        dep.ues.len(),
        dep.hotspots.len()
    );
    eprintln!("wrote {} and {}", sites.display(), ues.display());
    Ok(())
}
