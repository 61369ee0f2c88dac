//! Python bindings: scenario configuration, single runs and multi-run
//! summaries, deployments, the scheduler and energy studies, and a few
//! model primitives.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use densecell_core::energy::{PowerTable, SleepModel};
use densecell_core::link::EdgeConvention;
use densecell_core::runner::config;
use densecell_core::runner::stats::{self, CdfGrid};
use densecell_core::runner::sweep::{run_ee_study, run_sweep, SweepSpec};
use densecell_core::runner::{self, PreparedRun};
use densecell_core::scheduler::{run_scheduler_study, SchedStudyConfig};
use densecell_core::{fastfading, propagation, scenario, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidConfig(_)
        | Error::Parse { .. }
        | Error::DegenerateRegion { .. }
        | Error::NoPowerModelRow { .. }
        | Error::EmptyInput => PyValueError::new_err(e.to_string()),
        Error::Run { run_index, source } => PyRuntimeError::new_err(format!("run {run_index}: {source}")),
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Simulation scenario. Bandwidth `None` means 5 % of the carrier.
#[pyclass(name = "ScenarioConfig", module = "densecell", from_py_object)]
#[derive(Clone)]
struct PyScenarioConfig {
    inner: scenario::ScenarioConfig,
}

#[pymethods]
impl PyScenarioConfig {
    #[new]
    #[pyo3(signature = (
        isd,
        ue_density = 300.0,
        ue_dist = "hotspot",
        idle = true,
        sleep_model = 1,
        carrier_ghz = 2.0,
        bandwidth_hz = None,
        antennas = 1,
        target_snr_db = 12.0,
        runs = 150,
        seed = 1,
        region_side_m = 500.0,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        isd: f64,
        ue_density: f64,
        ue_dist: &str,
        idle: bool,
        sleep_model: u8,
        carrier_ghz: f64,
        bandwidth_hz: Option<f64>,
        antennas: u32,
        target_snr_db: f64,
        runs: u64,
        seed: u64,
        region_side_m: f64,
    ) -> PyResult<Self> {
        let inner = scenario::ScenarioConfig {
            isd_m: isd,
            ue_density_per_km2: ue_density,
            ue_distribution: ue_dist.parse().map_err(to_py)?,
            idle_mode_enabled: idle,
            sleep_model: SleepModel::from_index(sleep_model).map_err(to_py)?,
            carrier_ghz,
            bandwidth_hz,
            num_bs_antennas: antennas,
            target_edge_snr_db: target_snr_db,
            region_side_m,
            runs,
            seed,
            ..scenario::ScenarioConfig::default()
        };
        inner.validate().map_err(to_py)?;
        Ok(PyScenarioConfig { inner })
    }

    /// Reads a `key = value` file on top of the defaults.
    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        let kv = config::read_key_values(&path).map_err(to_py)?;
        let mut inner = scenario::ScenarioConfig::default();
        config::apply_all(&mut inner, &kv).map_err(to_py)?;
        inner.validate().map_err(to_py)?;
        Ok(PyScenarioConfig { inner })
    }

    /// Returns a copy with one setting changed, using configuration-file
    /// key names (`"idle"`, `"carrier-ghz"`, `"edge"`, ...).
    fn with_setting(&self, key: &str, value: &str) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        config::apply_setting(&mut inner, key, value).map_err(to_py)?;
        inner.validate().map_err(to_py)?;
        Ok(PyScenarioConfig { inner })
    }

    /// Notes about settings outside the reference set.
    fn validate(&self) -> PyResult<Vec<String>> {
        self.inner.validate().map_err(to_py)
    }

    #[getter]
    fn isd(&self) -> f64 {
        self.inner.isd_m
    }
    #[getter]
    fn ue_density(&self) -> f64 {
        self.inner.ue_density_per_km2
    }
    #[getter]
    fn ue_dist(&self) -> &'static str {
        self.inner.ue_distribution.name()
    }
    #[getter]
    fn idle(&self) -> bool {
        self.inner.idle_mode_enabled
    }
    #[getter]
    fn sleep_model(&self) -> u8 {
        self.inner.sleep_model.index()
    }
    #[getter]
    fn carrier_ghz(&self) -> f64 {
        self.inner.carrier_ghz
    }
    #[getter]
    fn bandwidth_hz(&self) -> f64 {
        self.inner.bandwidth_hz()
    }
    #[getter]
    fn antennas(&self) -> u32 {
        self.inner.num_bs_antennas
    }
    #[getter]
    fn target_snr_db(&self) -> f64 {
        self.inner.target_edge_snr_db
    }
    #[getter]
    fn runs(&self) -> u64 {
        self.inner.runs
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
    #[getter]
    fn region_side_m(&self) -> f64 {
        self.inner.region_side_m
    }
    #[getter]
    fn edge(&self) -> &'static str {
        match self.inner.model.radio.edge {
            EdgeConvention::HalfSqrt3 => "sqrt3/2",
            EdgeConvention::Circumradius => "circumradius",
        }
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "ScenarioConfig(isd={}, ue_density={}, ue_dist='{}', idle={}, sleep_model={}, carrier_ghz={}, \
             bandwidth_hz={}, antennas={}, target_snr_db={}, runs={}, seed={})",
            c.isd_m,
            c.ue_density_per_km2,
            c.ue_distribution.name(),
            if c.idle_mode_enabled { "True" } else { "False" },
            c.sleep_model.index(),
            c.carrier_ghz,
            c.bandwidth_hz(),
            c.num_bs_antennas,
            c.target_edge_snr_db,
            c.runs,
            c.seed
        )
    }
}

/// Statistics of one run.
#[pyclass(name = "RunMetrics", module = "densecell", get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyRunMetrics {
    run_index: u64,
    sinr_samples_db: Vec<f64>,
    ue_throughputs_bps: Vec<f64>,
    interior_sites: usize,
    active_interior_sites: usize,
    active_sites_per_km2: f64,
    mean_ues_per_active_site: f64,
    tx_power_dbm: f64,
    served_throughput_bps: f64,
    ee_bps_per_w: Option<f64>,
    coverage_holes: usize,
}

impl From<runner::RunMetrics> for PyRunMetrics {
    fn from(m: runner::RunMetrics) -> Self {
        PyRunMetrics {
            run_index: m.run_index,
            sinr_samples_db: m.sinr_samples_db,
            ue_throughputs_bps: m.ue_throughputs_bps,
            interior_sites: m.interior_sites,
            active_interior_sites: m.active_interior_sites,
            active_sites_per_km2: m.active_sites_per_km2,
            mean_ues_per_active_site: m.mean_ues_per_active_site,
            tx_power_dbm: m.tx_power_dbm,
            served_throughput_bps: m.served_throughput_bps,
            ee_bps_per_w: m.ee_bps_per_w,
            coverage_holes: m.coverage_holes,
        }
    }
}

/// Cross-run summary of one scenario.
#[pyclass(name = "Summary", module = "densecell", get_all, skip_from_py_object)]
#[derive(Clone)]
struct PySummary {
    runs: usize,
    served_ue_samples: usize,
    mean_ue_tput_bps: f64,
    p5_ue_tput_bps: f64,
    p50_ue_tput_bps: f64,
    median_sinr_db: f64,
    mean_active_sites_per_km2: f64,
    mean_ues_per_active_site: f64,
    tx_power_dbm: f64,
    mean_ee_bps_per_w: Option<f64>,
    coverage_hole_fraction: f64,
    /// `(sinr_db, cdf)` pairs on the output grid.
    sinr_cdf: Vec<(f64, f64)>,
}

impl From<stats::Summary> for PySummary {
    fn from(s: stats::Summary) -> Self {
        PySummary {
            runs: s.runs,
            served_ue_samples: s.served_ue_samples,
            mean_ue_tput_bps: s.mean_ue_tput_bps,
            p5_ue_tput_bps: s.p5_ue_tput_bps,
            p50_ue_tput_bps: s.p50_ue_tput_bps,
            median_sinr_db: s.median_sinr_db,
            mean_active_sites_per_km2: s.mean_active_sites_per_km2,
            mean_ues_per_active_site: s.mean_ues_per_active_site,
            tx_power_dbm: s.tx_power_dbm,
            mean_ee_bps_per_w: s.mean_ee_bps_per_w,
            coverage_hole_fraction: s.coverage_hole_fraction,
            sinr_cdf: s.sinr_cdf,
        }
    }
}

#[pymethods]
impl PySummary {
    fn __repr__(&self) -> String {
        format!(
            "Summary(runs={}, mean_ue_tput_bps={:.4e}, p5_ue_tput_bps={:.4e}, median_sinr_db={:.2})",
            self.runs, self.mean_ue_tput_bps, self.p5_ue_tput_bps, self.median_sinr_db
        )
    }
}

/// Sites and UEs of one run.
#[pyclass(name = "Deployment", module = "densecell", skip_from_py_object)]
#[derive(Clone)]
struct PyDeployment {
    inner: scenario::Deployment,
}

#[pymethods]
impl PyDeployment {
    /// `(site_id, x, y, height, guard)` tuples.
    fn sites(&self) -> Vec<(usize, f64, f64, f64, bool)> {
        self.inner
            .sites
            .iter()
            .map(|s| (s.id, s.x_m, s.y_m, s.height_m, s.in_guard_tier))
            .collect()
    }

    /// `(ue_id, x, y, hotspot_id)` tuples.
    fn ues(&self) -> Vec<(usize, f64, f64, Option<usize>)> {
        self.inner.ues.iter().map(|u| (u.id, u.x_m, u.y_m, u.hotspot_id)).collect()
    }

    /// `(x, y, radius)` of every hotspot.
    fn hotspots(&self) -> Vec<(f64, f64, f64)> {
        self.inner
            .hotspots
            .iter()
            .map(|h| (h.center_x_m, h.center_y_m, h.radius_m))
            .collect()
    }

    #[getter]
    fn interior_site_count(&self) -> usize {
        self.inner.interior_sites().count()
    }

    fn write_csv(&self, sites_path: std::path::PathBuf, ues_path: std::path::PathBuf) -> PyResult<()> {
        self.inner.write_sites_csv(&sites_path).map_err(to_py)?;
        self.inner.write_ues_csv(&ues_path).map_err(to_py)
    }
}

/// One row of the scheduler study.
#[pyclass(name = "SchedRecord", module = "densecell", get_all, skip_from_py_object)]
#[derive(Clone)]
struct PySchedRecord {
    isd: f64,
    scheduler: &'static str,
    ues_per_bs: usize,
    mean_cell_tput_bps: f64,
    p5_ue_tput_bps: f64,
    p50_ue_tput_bps: f64,
    p95_ue_tput_bps: f64,
}

/// One row of the energy-efficiency study.
#[pyclass(name = "EeRecord", module = "densecell", get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyEeRecord {
    isd: f64,
    antennas: u32,
    sleep_model: u8,
    mean_ee_bps_per_w: f64,
    run_ee_bps_per_w: Vec<f64>,
}

/// Runs `run_index` of a scenario.
#[pyfunction]
fn execute_run(py: Python<'_>, cfg: PyScenarioConfig, run_index: u64) -> PyResult<PyRunMetrics> {
    py.detach(|| runner::execute_run(&cfg.inner, run_index))
        .map(Into::into)
        .map_err(to_py)
}

/// All runs of a scenario, summarized.
#[pyfunction]
fn simulate(py: Python<'_>, cfg: PyScenarioConfig) -> PyResult<PySummary> {
    let mut rows = py
        .detach(|| run_sweep(&SweepSpec::single(&cfg.inner), &CdfGrid::default()))
        .map_err(to_py)?;
    Ok(rows.remove(0).1.into())
}

/// Deployment (sites and UE drop) of one run.
#[pyfunction]
#[pyo3(signature = (cfg, run_index = 0))]
fn build_deployment(cfg: PyScenarioConfig, run_index: u64) -> PyResult<PyDeployment> {
    let prepared = PreparedRun::new(&cfg.inner, run_index).map_err(to_py)?;
    Ok(PyDeployment {
        inner: prepared.deployment,
    })
}

/// Round-robin vs proportional-fair study.
#[pyfunction]
#[pyo3(signature = (isds = None, ues_per_bs = None, drops = 100, ttis = 50, seed = 1))]
fn scheduler_study(
    py: Python<'_>,
    isds: Option<Vec<f64>>,
    ues_per_bs: Option<Vec<usize>>,
    drops: u64,
    ttis: u64,
    seed: u64,
) -> PyResult<Vec<PySchedRecord>> {
    let mut cfg = SchedStudyConfig {
        drops,
        ttis,
        seed,
        ..SchedStudyConfig::default()
    };
    if let Some(i) = isds {
        cfg.isds_m = i;
    }
    if let Some(u) = ues_per_bs {
        cfg.ues_per_bs = u;
    }
    if cfg.ues_per_bs.contains(&0) || drops == 0 || ttis == 0 {
        return Err(PyValueError::new_err("ues_per_bs, drops and ttis must be positive"));
    }
    let recs = py.detach(|| run_scheduler_study(&cfg)).map_err(to_py)?;
    Ok(recs
        .into_iter()
        .map(|r| PySchedRecord {
            isd: r.isd_m,
            scheduler: r.scheduler.name(),
            ues_per_bs: r.ues_per_bs,
            mean_cell_tput_bps: r.mean_cell_tput_bps,
            p5_ue_tput_bps: r.p5_ue_tput_bps,
            p50_ue_tput_bps: r.p50_ue_tput_bps,
            p95_ue_tput_bps: r.p95_ue_tput_bps,
        })
        .collect())
}

/// Energy efficiency for every ISD, antenna count and sleep model, with
/// idle mode on and 20 MHz unless the scenario sets a bandwidth.
#[pyfunction]
#[pyo3(signature = (cfg, isds = None, antennas = None))]
fn ee_study(
    py: Python<'_>,
    cfg: PyScenarioConfig,
    isds: Option<Vec<f64>>,
    antennas: Option<Vec<u32>>,
) -> PyResult<Vec<PyEeRecord>> {
    let isds = isds.unwrap_or_else(|| scenario::REFERENCE_ISDS_M.to_vec());
    let antennas = antennas.unwrap_or_else(|| vec![1, 2, 4]);
    let recs = py.detach(|| run_ee_study(&cfg.inner, &isds, &antennas)).map_err(to_py)?;
    Ok(recs
        .into_iter()
        .map(|r| PyEeRecord {
            isd: r.isd_m,
            antennas: r.antennas,
            sleep_model: r.sleep_model.index(),
            mean_ee_bps_per_w: r.mean_ee_bps_per_w,
            run_ee_bps_per_w: r.run_ee_bps_per_w,
        })
        .collect())
}

type PowerTableRow = (f64, f64, Vec<f64>, Vec<f64>, Vec<f64>);

/// Power-table rows as `(isd, tx_dbm, full_load_w, idle1_w, idle2_w)` with
/// per-antenna lists for 1, 2 and 4 antennas.
#[pyfunction]
fn power_table() -> Vec<PowerTableRow> {
    PowerTable
        .rows()
        .iter()
        .map(|r| (r.isd_m, r.tx_power_dbm, r.full_load_w.to_vec(), r.idle1_w.to_vec(), r.idle2_w.to_vec()))
        .collect()
}

/// Hexagonal-lattice site density in sites/km².
#[pyfunction]
fn site_density(isd: f64) -> f64 {
    scenario::site_density_per_km2(isd)
}

/// Smoothed LOS probability at a 2D distance.
#[pyfunction]
fn los_probability(d_m: f64) -> f64 {
    propagation::los_probability(d_m)
}

/// Expected path gain in dB at a 3D distance.
#[pyfunction]
#[pyo3(signature = (d_m, carrier_ghz = 2.0))]
fn path_gain_db(d_m: f64, carrier_ghz: f64) -> f64 {
    propagation::PathGainModel::umi(carrier_ghz).path_gain_db(d_m)
}

/// Rician K-factor at a distance.
#[pyfunction]
fn k_factor(d_m: f64) -> f64 {
    fastfading::k_factor(d_m)
}

/// Percentile by linear interpolation between order statistics.
#[pyfunction]
fn percentile(data: Vec<f64>, p: f64) -> PyResult<f64> {
    stats::percentile_of(&data, p).ok_or_else(|| PyValueError::new_err("empty data"))
}

#[pymodule]
fn densecell(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenarioConfig>()?;
    m.add_class::<PyRunMetrics>()?;
    m.add_class::<PySummary>()?;
    m.add_class::<PyDeployment>()?;
    m.add_class::<PySchedRecord>()?;
    m.add_class::<PyEeRecord>()?;
    m.add_function(wrap_pyfunction!(execute_run, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(build_deployment, m)?)?;
    m.add_function(wrap_pyfunction!(scheduler_study, m)?)?;
    m.add_function(wrap_pyfunction!(ee_study, m)?)?;
    m.add_function(wrap_pyfunction!(power_table, m)?)?;
    m.add_function(wrap_pyfunction!(site_density, m)?)?;
    m.add_function(wrap_pyfunction!(los_probability, m)?)?;
    m.add_function(wrap_pyfunction!(path_gain_db, m)?)?;
    m.add_function(wrap_pyfunction!(k_factor, m)?)?;
    m.add_function(wrap_pyfunction!(percentile, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
