//! Statistical acceptance suite. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.
//!
//! `DENSECELL_ACCEPTANCE_RUNS` overrides the number of Monte-Carlo runs
//! (default 150); tolerances are never widened, so reduced runs are only
//! useful for a quick look.

use std::process::ExitCode;
use std::time::Instant;

use densecell_core::energy::{PowerTable, SleepModel};
use densecell_core::fastfading::RicianLink;
use densecell_core::link::calibrate_tx_power_dbm;
use densecell_core::propagation::{ShadowField, ShadowParams};
use densecell_core::runner::stats::{percentile, CdfGrid};
use densecell_core::scenario::{reported_site_density_per_km2, REFERENCE_ISDS_M};
use densecell_core::scheduler::{pf_fd_allocate, pf_td_select, run_scheduler_study, PfState, SchedStudyConfig, SchedulerKind};
use densecell_core::{ModelParams, ScenarioConfig};
use densecell_validation::{within_abs, within_rel, Report, ScenarioBank};

/// Power-consumption table as printed: ISD, Tx dBm, Tx mW, full load
/// (1/2/4 antennas), idle mode 1 (1/2/4), idle mode 2 (1/2/4).
const POWER_TABLE_TEXT: &str = "
200 23.27 212.32 1.8923 2.5848 4.4560 0.2324 0.3105 0.4959 0.1881 0.2478 0.4073
150 20.52 112.72 1.3405 2.0316 3.9015 0.2191 0.2971 0.4825 0.1748 0.2345 0.3939
100 16.64 46.13 0.9793 1.6696 3.5386 0.2104 0.2884 0.4738 0.1661 0.2257 0.3852
75 13.90 24.55 0.8643 1.5544 3.4231 0.2076 0.2856 0.4710 0.1633 0.2230 0.3824
50 10.02 10.05 0.7853 1.4752 3.3437 0.2057 0.2837 0.4691 0.1614 0.2210 0.3804
35 6.61 4.58 0.7558 1.4456 3.3141 0.2050 0.2830 0.4683 0.1607 0.2203 0.3797
20 1.27 1.34 0.7383 1.4281 3.2965 0.2046 0.2826 0.4679 0.1603 0.2199 0.3793
10 -5.20 0.30 0.7326 1.4224 3.2908 0.2044 0.2824 0.4678 0.1601 0.2198 0.3792
5 -11.89 0.06 0.7314 1.4211 3.2895 0.2044 0.2824 0.4678 0.1601 0.2197 0.3791
";

const ANTENNAS: [u32; 3] = [1, 2, 4];

fn scenario(isd: f64, carrier_ghz: f64, runs: u64) -> ScenarioConfig {
    ScenarioConfig {
        isd_m: isd,
        carrier_ghz,
        runs,
        ..ScenarioConfig::default()
    }
}

fn idle_off(cfg: &ScenarioConfig) -> ScenarioConfig {
    ScenarioConfig {
        idle_mode_enabled: false,
        ..cfg.clone()
    }
}

fn with_antennas(cfg: &ScenarioConfig, a: u32) -> ScenarioConfig {
    ScenarioConfig {
        num_bs_antennas: a,
        ..cfg.clone()
    }
}

/// Scenario of the energy study: 20 MHz, idle mode on.
fn ee_scenario(isd: f64, a: u32, runs: u64) -> ScenarioConfig {
    ScenarioConfig {
        bandwidth_hz: Some(20e6),
        num_bs_antennas: a,
        ..scenario(isd, 2.0, runs)
    }
}

fn pct(x: f64) -> f64 {
    100.0 * (x - 1.0)
}

fn main() -> ExitCode {
    let started = Instant::now();
    let runs: u64 = std::env::var("DENSECELL_ACCEPTANCE_RUNS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(150);
    println!("acceptance suite: {runs} runs per scenario");
    if runs < 150 {
        println!("  NOTE: reduced run count; tolerances unchanged");
    }

    let mut report = Report::new();

    hex_density(&mut report);
    tx_power(&mut report);

    // Every system-level scenario, simulated once per (ISD, carrier).
    let base35 = scenario(35.0, 2.0, runs);
    let base10 = scenario(10.0, 2.0, runs);
    let base200 = scenario(200.0, 2.0, runs);
    let base5 = scenario(5.0, 2.0, runs);
    let bw250 = scenario(35.0, 5.0, runs);
    let bw500 = scenario(35.0, 10.0, runs);
    let gbps50 = scenario(50.0, 10.0, runs);
    let gbps20 = scenario(20.0, 5.0, runs);
    let mut bank = ScenarioBank::new();
    for cfg in [&base35, &base10, &base200, &base5, &bw250, &bw500, &gbps50, &gbps20] {
        bank.request(cfg);
    }
    for cfg in [&base35, &base10] {
        bank.request(&idle_off(cfg));
    }
    for a in ANTENNAS {
        bank.request(&with_antennas(&bw500, a));
        for isd in REFERENCE_ISDS_M {
            bank.request(&ee_scenario(isd, a, runs));
        }
    }
    if let Err(e) = bank.run() {
        println!("FAIL simulation: {e}");
        return ExitCode::FAILURE;
    }

    one_ue_per_cell(&mut report, &bank, &base35);
    idle_gain(&mut report, &bank, &base35, &base10);
    densification(&mut report, &bank, &base200, &base35, &base5);
    bandwidth_scaling(&mut report, &bank, &base35, &bw250, &bw500);
    gbps_targets(&mut report, &bank, &gbps50, &gbps20);
    beamforming(&mut report, &bank, &bw500);
    scheduler(&mut report);
    energy(&mut report, &bank, runs);
    property_suite(&mut report);

    println!(
        "acceptance: {} of {} criteria passed ({:.0} s)",
        report.len() - report.failures(),
        report.len(),
        started.elapsed().as_secs_f64()
    );
    if report.failures() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn hex_density(report: &mut Report) {
    let expected = [29, 52, 116, 206, 462, 943, 2887, 11548, 46189];
    let got: Vec<u64> = REFERENCE_ISDS_M.iter().map(|&i| reported_site_density_per_km2(i)).collect();
    report.check("hex density table", got == expected, format!("{got:?} vs {expected:?} sites/km²"));
}

fn tx_power(report: &mut Report) {
    let model = ModelParams::default();
    let height = model.height_rule;
    let mut worst = (0.0f64, 0.0f64);
    let mut cells = Vec::new();
    for row in PowerTable.rows() {
        let p = calibrate_tx_power_dbm(
            row.isd_m,
            height.height_m(row.isd_m),
            20e6,
            12.0,
            &model.path_model(2.0),
            &model.radio,
        );
        let dev = p - row.tx_power_dbm;
        if dev.abs() > worst.1.abs() {
            worst = (row.isd_m, dev);
        }
        cells.push(format!("{}:{:+.1}", row.isd_m, dev));
    }
    report.check(
        "transmit power within 3 dB of the power table (2 GHz, 20 MHz, 12 dB)",
        worst.1.abs() <= 3.0,
        format!(
            "worst deviation {:+.2} dB at isd {} m; per isd [{}]",
            worst.1,
            worst.0,
            cells.join(" ")
        ),
    );
}

fn one_ue_per_cell(report: &mut Report, bank: &ScenarioBank, base35: &ScenarioConfig) {
    let s = bank.summary(base35);
    report.check(
        "active UEs per active BS at isd 35 m <= 1.1",
        s.mean_ues_per_active_site <= 1.1,
        format!("{:.3}", s.mean_ues_per_active_site),
    );
}

fn idle_gain(report: &mut Report, bank: &ScenarioBank, base35: &ScenarioConfig, base10: &ScenarioConfig) {
    let gain = |cfg: &ScenarioConfig| bank.summary(cfg).median_sinr_db - bank.summary(&idle_off(cfg)).median_sinr_db;
    let (g35, g10) = (gain(base35), gain(base10));
    report.check(
        "idle-mode median SINR gain (35 m: 8.76 ± 1.5 dB, 10 m: 20.62 ± 2.5 dB)",
        within_abs(g35, 8.76, 1.5) && within_abs(g10, 20.62, 2.5),
        format!("35 m {g35:.2} dB, 10 m {g10:.2} dB"),
    );
}

fn densification(
    report: &mut Report,
    bank: &ScenarioBank,
    base200: &ScenarioConfig,
    base35: &ScenarioConfig,
    base5: &ScenarioConfig,
) {
    let b = bank.summary(base200);
    let s35 = bank.summary(base35);
    let s5 = bank.summary(base5);
    let m35 = s35.mean_ue_tput_bps / b.mean_ue_tput_bps;
    let e35 = s35.p5_ue_tput_bps / b.p5_ue_tput_bps;
    let m5 = s5.mean_ue_tput_bps / b.mean_ue_tput_bps;
    let e5 = s5.p5_ue_tput_bps / b.p5_ue_tput_bps;
    let pass = within_rel(m35, 7.56, 0.20) && within_rel(e35, 5.80, 0.20) && within_rel(m5, 17.56, 0.25) && within_rel(e5, 48.0, 0.25);
    report.check(
        "densification gains vs 200 m (35 m: 7.56x/5.80x ±20 %, 5 m: 17.56x/48.0x ±25 %)",
        pass,
        format!("35 m mean {m35:.2}x edge {e35:.2}x; 5 m mean {m5:.2}x edge {e5:.2}x"),
    );
}

fn bandwidth_scaling(
    report: &mut Report,
    bank: &ScenarioBank,
    base35: &ScenarioConfig,
    bw250: &ScenarioConfig,
    bw500: &ScenarioConfig,
) {
    let m100 = bank.summary(base35).mean_ue_tput_bps;
    let r250 = bank.summary(bw250).mean_ue_tput_bps / m100;
    let r500 = bank.summary(bw500).mean_ue_tput_bps / m100;
    report.check(
        "bandwidth scaling at 35 m (250 MHz: 2.59x, 500 MHz: 5.31x, ±10 %)",
        within_rel(r250, 2.59, 0.10) && within_rel(r500, 5.31, 0.10),
        format!("250 MHz {r250:.2}x, 500 MHz {r500:.2}x"),
    );
}

fn gbps_targets(report: &mut Report, bank: &ScenarioBank, gbps50: &ScenarioConfig, gbps20: &ScenarioConfig) {
    let a = bank.summary(gbps50).mean_ue_tput_bps / 1e9;
    let b = bank.summary(gbps20).mean_ue_tput_bps / 1e9;
    report.check(
        "Gbps targets (50 m + 500 MHz: 1.27, 20 m + 250 MHz: 1.01 Gbps, ±20 %)",
        within_rel(a, 1.27, 0.20) && within_rel(b, 1.01, 0.20),
        format!("50 m {a:.3} Gbps, 20 m {b:.3} Gbps"),
    );
}

fn beamforming(report: &mut Report, bank: &ScenarioBank, bw500: &ScenarioConfig) {
    let s: Vec<_> = ANTENNAS.iter().map(|&a| bank.summary(&with_antennas(bw500, a))).collect();
    let g2 = pct(s[1].mean_ue_tput_bps / s[0].mean_ue_tput_bps);
    let g4 = pct(s[2].mean_ue_tput_bps / s[0].mean_ue_tput_bps);
    let e4 = pct(s[2].p5_ue_tput_bps / s[0].p5_ue_tput_bps);
    report.check(
        "beamforming gains at 35 m, 500 MHz (2v1 13.77 ±8, 4v1 18.92 ±8, edge 4v1 48.96 ±15 points)",
        within_abs(g2, 13.77, 8.0) && within_abs(g4, 18.92, 8.0) && within_abs(e4, 48.96, 15.0),
        format!("2v1 {g2:+.1} %, 4v1 {g4:+.1} %, edge 4v1 {e4:+.1} %"),
    );
}

fn scheduler(report: &mut Report) {
    // More drops than the command-line default to resolve the 2 % flatness
    // criterion above the drop-to-drop noise.
    let cfg = SchedStudyConfig {
        drops: 300,
        ..SchedStudyConfig::default()
    };
    let t0 = Instant::now();
    let recs = match run_scheduler_study(&cfg) {
        Ok(r) => r,
        Err(e) => {
            report.check("scheduler study", false, format!("error: {e}"));
            return;
        }
    };
    println!(
        "  scheduler study: {} drops x {} TTIs in {:.1} s",
        cfg.drops,
        cfg.ttis,
        t0.elapsed().as_secs_f64()
    );
    let cell = |isd: f64, kind: SchedulerKind, u: usize| {
        recs.iter()
            .find(|r| r.isd_m == isd && r.scheduler == kind && r.ues_per_bs == u)
            .map(|r| r.mean_cell_tput_bps)
            .expect("record present")
    };
    let targets = [(150.0, 21.2), (40.0, 12.4), (20.0, 10.5)];
    let gains: Vec<f64> = targets
        .iter()
        .map(|&(isd, _)| {
            pct(cell(isd, SchedulerKind::ProportionalFair, 4) / cell(isd, SchedulerKind::RoundRobin, 4))
        })
        .collect();
    let values_ok = targets.iter().zip(&gains).all(|(&(_, t), &g)| within_abs(g, t, 8.0));
    let decreasing = gains.windows(2).all(|w| w[1] < w[0]);
    let mut rr_spread = 0.0f64;
    let mut pf_ge_rr = true;
    for &(isd, _) in &targets {
        let r1 = cell(isd, SchedulerKind::RoundRobin, cfg.ues_per_bs[0]);
        for &u in &cfg.ues_per_bs {
            let rr = cell(isd, SchedulerKind::RoundRobin, u);
            rr_spread = rr_spread.max((rr / r1 - 1.0).abs());
            pf_ge_rr &= cell(isd, SchedulerKind::ProportionalFair, u) >= rr;
        }
    }
    report.check(
        "scheduler study (PF gain at U=4: 21.2/12.4/10.5 ±8 points and decreasing; RR flat within 2 %; PF >= RR)",
        values_ok && decreasing && rr_spread <= 0.02 && pf_ge_rr,
        format!(
            "PF gain 150 m {:+.1} %, 40 m {:+.1} %, 20 m {:+.1} % (decreasing: {decreasing}); RR spread {:.2} %; PF >= RR: {pf_ge_rr}",
            gains[0],
            gains[1],
            gains[2],
            100.0 * rr_spread
        ),
    );
}

fn energy(report: &mut Report, bank: &ScenarioBank, runs: u64) {
    // Embedded table against the printed one.
    let rows = PowerTable.rows();
    let mut table_ok = rows.len() == 9;
    for (line, row) in POWER_TABLE_TEXT.trim().lines().zip(rows) {
        let v: Vec<f64> = line.split_whitespace().map(|x| x.parse().unwrap()).collect();
        let embedded = [
            [row.isd_m, row.tx_power_dbm, row.tx_power_mw].as_slice(),
            &row.full_load_w,
            &row.idle1_w,
            &row.idle2_w,
        ]
        .concat();
        table_ok &= v == embedded;
    }

    let ee = |isd: f64, a: u32, sm: SleepModel| -> Vec<f64> {
        bank.runs(&ee_scenario(isd, a, runs))
            .iter()
            .map(|r| r.ee_with(isd, a, sm).expect("power-table row"))
            .collect()
    };
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;

    // sm5 ≥ sm4 ≥ sm3 ≥ sm1 in every run (sm2 sits between sm3 and sm1).
    let order = [SleepModel::Sm5, SleepModel::Sm4, SleepModel::Sm3, SleepModel::Sm1];
    let mut ordering_ok = true;
    for isd in REFERENCE_ISDS_M {
        for a in ANTENNAS {
            let per_sm: Vec<Vec<f64>> = order.iter().map(|&sm| ee(isd, a, sm)).collect();
            for w in per_sm.windows(2) {
                ordering_ok &= w[0].iter().zip(&w[1]).all(|(hi, lo)| hi >= lo);
            }
        }
    }

    // Trends over densification (ISDs in decreasing order), 1 antenna.
    let sm5: Vec<f64> = REFERENCE_ISDS_M.iter().map(|&i| mean(&ee(i, 1, SleepModel::Sm5))).collect();
    let sm1: Vec<f64> = REFERENCE_ISDS_M.iter().map(|&i| mean(&ee(i, 1, SleepModel::Sm1))).collect();
    let sm5_ok = sm5.windows(2).all(|w| w[1] >= w[0]);
    let beyond_100: Vec<f64> = REFERENCE_ISDS_M
        .iter()
        .zip(&sm1)
        .filter(|(&i, _)| i < 100.0)
        .map(|(_, &e)| e)
        .collect();
    let sm1_ok = beyond_100.windows(2).all(|w| w[1] <= w[0]);

    // More antennas, lower efficiency, for every ISD and sleep model.
    let mut antennas_ok = true;
    for isd in REFERENCE_ISDS_M {
        for sm in SleepModel::ALL {
            let m: Vec<f64> = ANTENNAS.iter().map(|&a| mean(&ee(isd, a, sm))).collect();
            antennas_ok &= m[0] > m[1] && m[1] > m[2];
        }
    }

    let fmt = |v: &[f64]| v.iter().map(|e| format!("{:.3}", e / 1e8)).collect::<Vec<_>>().join(" ");
    report.check(
        "energy (table exact; sm5>=sm4>=sm3>=sm1 per run; sm5 non-decreasing; sm1 non-increasing below 100 m; more antennas lower EE)",
        table_ok && ordering_ok && sm5_ok && sm1_ok && antennas_ok,
        format!(
            "table {table_ok}, ordering {ordering_ok}, sm5 trend {sm5_ok}, sm1 trend {sm1_ok}, antennas {antennas_ok}; \
             1-antenna EE [1e8 bps/W] at isd {:?}: sm5 [{}] sm1 [{}]",
            REFERENCE_ISDS_M,
            fmt(&sm5),
            fmt(&sm1)
        ),
    );
}

/// Representative spot checks of the unit-level properties; the full
/// property suite runs with the unit and integration tests.
fn property_suite(report: &mut Report) {
    let mut notes = Vec::new();

    // Percentile rule on 1..100.
    let data: Vec<f64> = (1..=100).map(f64::from).collect();
    let p5 = percentile(&data, 5.0).unwrap();
    let p_ok = (p5 - 5.95).abs() < 1e-12;
    notes.push(format!("p5(1..100) = {p5}"));

    // CDF ends at one and never decreases.
    let cdf = CdfGrid::default().cdf(&[-100.0, 0.0, 3.0, 200.0]);
    let cdf_ok = cdf.windows(2).all(|w| w[0].1 <= w[1].1) && cdf.last().unwrap().1 == 1.0;

    // Shadowing: marginal σ and inter-site correlation at co-located points.
    let params = ShadowParams::default();
    let (mut s0, mut s00, mut s11, mut s01, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for seed in 0..400u64 {
        let f = ShadowField::new(params, seed, 2, (0.0, 1000.0, 0.0, 1000.0));
        for k in 0..5 {
            let (x, y) = (100.0 + 150.0 * k as f64, 500.0);
            let a = f.sample_shadow_db(0, x, y).unwrap();
            let b = f.sample_shadow_db(1, x, y).unwrap();
            s0 += a;
            s00 += a * a;
            s11 += b * b;
            s01 += a * b;
            n += 1.0;
        }
    }
    let sigma = (s00 / n - (s0 / n) * (s0 / n)).sqrt();
    let rho = s01 / (s00 * s11).sqrt();
    let shadow_ok = within_abs(sigma, 6.0, 0.4) && within_abs(rho, 0.5, 0.06);
    notes.push(format!("shadow σ {sigma:.2} dB, ρ {rho:.3}"));

    // Rician: E|h|² = 1 and, for K = 0, Var|h|² = 1 (exponential power).
    let mut rician_ok = true;
    for k in [0.0, 1.0, 32.0] {
        let (mut m, mut m2, n) = (0.0, 0.0, 200_000u64);
        for i in 0..n {
            let p = RicianLink::new(9, i % 50, k).power(i / 50, 0, n / 50);
            m += p;
            m2 += p * p;
        }
        let (mean, var) = (m / n as f64, m2 / n as f64 - (m / n as f64).powi(2));
        // Var|h|² = (2K + 1)/(K + 1)² for unit-mean Rician power.
        let var_ref = (2.0 * k + 1.0) / ((k + 1.0) * (k + 1.0));
        rician_ok &= within_abs(mean, 1.0, 0.01) && within_rel(var, var_ref, 0.05);
        notes.push(format!("K={k}: E {mean:.4} Var {var:.4}/{var_ref:.4}"));
    }

    // Proportional fair against brute force on a small instance.
    let sinr: Vec<Vec<f64>> = (0..6)
        .map(|u| (0..8).map(|k| 1.0 + ((u * 7 + k * 3) % 11) as f64).collect())
        .collect();
    let selected = [0, 2, 3, 5];
    let alloc = pf_fd_allocate(&selected, &sinr);
    let brute: Vec<usize> = (0..8)
        .map(|k| {
            let mut best = selected[0];
            for &u in &selected {
                let m = |u: usize| sinr[u][k] / sinr[u].iter().sum::<f64>();
                if m(u) > m(best) {
                    best = u;
                }
            }
            best
        })
        .collect();
    let mut st = PfState::new(6);
    st.n_max = 3;
    st.avg_tput_bps = vec![Some(1.0), Some(2.0), Some(0.5), Some(4.0), Some(1.0), Some(3.0)];
    let td = pf_td_select(&mut st, &[1.0, 1.0, 1.0, 1.0, 3.0, 1.0]);
    let sched_ok = alloc == brute && td == vec![4, 2, 0];

    report.check(
        "property suite spot checks (percentile, CDF, shadowing, Rician moments, scheduler oracles)",
        p_ok && cdf_ok && shadow_ok && rician_ok && sched_ok,
        notes.join("; "),
    );
}
