//! Helpers for the statistical acceptance suite: a PASS/FAIL report and
//! a cache of simulated scenarios shared between criteria.

use std::collections::BTreeMap;
use std::time::Instant;

use densecell_core::runner::stats::{aggregate, CdfGrid, Summary};
use densecell_core::runner::{simulate_variants, RunMetrics, Variant};
use densecell_core::{Result, ScenarioConfig};

/// One line per criterion; the process fails if any line fails.
#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    /// Records and prints a criterion result with its measured values.
    pub fn check(&mut self, name: &str, pass: bool, detail: impl AsRef<str>) {
        let line = format!("{} {name}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
        println!("{line}");
        self.lines.push((pass, line));
    }

    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|(p, _)| !p).count()
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// `|measured − target| ≤ tol`.
pub fn within_abs(measured: f64, target: f64, tol: f64) -> bool {
    (measured - target).abs() <= tol
}

/// `|measured/target − 1| ≤ rel`.
pub fn within_rel(measured: f64, target: f64, rel: f64) -> bool {
    (measured / target - 1.0).abs() <= rel
}

/// Geometry key: scenarios sharing ISD and carrier share drops and gains.
fn geometry_key(cfg: &ScenarioConfig) -> (u64, u64) {
    (cfg.isd_m.to_bits(), cfg.carrier_ghz.to_bits())
}

/// Requested scenarios grouped by geometry, simulated once per group so
/// that every variant of a geometry sees the same drops.
#[derive(Debug, Default)]
pub struct ScenarioBank {
    requests: BTreeMap<(u64, u64), (ScenarioConfig, Vec<Variant>)>,
    results: BTreeMap<(u64, u64), Vec<Vec<RunMetrics>>>,
}

impl ScenarioBank {
    pub fn new() -> Self {
        ScenarioBank::default()
    }

    /// Registers `cfg`; its geometry fields and run control must match any
    /// earlier request with the same ISD and carrier.
    pub fn request(&mut self, cfg: &ScenarioConfig) {
        let entry = self
            .requests
            .entry(geometry_key(cfg))
            .or_insert_with(|| (cfg.clone(), Vec::new()));
        assert_eq!(entry.0.ue_density_per_km2, cfg.ue_density_per_km2);
        assert_eq!(entry.0.ue_distribution, cfg.ue_distribution);
        assert_eq!(entry.0.runs, cfg.runs);
        let v = Variant::of(cfg);
        if !entry.1.contains(&v) {
            entry.1.push(v);
        }
    }

    /// Simulates every registered geometry, printing timings.
    pub fn run(&mut self) -> Result<()> {
        for (key, (cfg, variants)) in &self.requests {
            if self.results.contains_key(key) {
                continue;
            }
            let t0 = Instant::now();
            let runs = simulate_variants(cfg, variants)?;
            println!(
                "  simulated isd {} m, {} GHz: {} variants x {} runs in {:.1} s",
                cfg.isd_m,
                cfg.carrier_ghz,
                variants.len(),
                cfg.runs,
                t0.elapsed().as_secs_f64()
            );
            self.results.insert(*key, runs);
        }
        Ok(())
    }

    /// Per-run metrics of a requested scenario.
    pub fn runs(&self, cfg: &ScenarioConfig) -> &[RunMetrics] {
        let key = geometry_key(cfg);
        let (_, variants) = &self.requests[&key];
        let i = variants
            .iter()
            .position(|v| *v == Variant::of(cfg))
            .expect("scenario was requested");
        &self.results.get(&key).expect("bank has been run")[i]
    }

    /// Summary of a requested scenario.
    pub fn summary(&self, cfg: &ScenarioConfig) -> Summary {
        aggregate(self.runs(cfg), &CdfGrid::default()).expect("at least one run")
    }
}
