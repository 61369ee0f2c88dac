//! Vertical dipole-array pattern and horizontal codebook beamforming.
//!
//! Elevation angles are measured from the horizon, positive towards the
//! ground. Azimuths are measured from the x-axis, which is also the axis of
//! the horizontal beamforming array.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

/// Lower bound applied to pattern offsets in dB.
pub const PATTERN_FLOOR_DB: f64 = -40.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DipoleArrayConfig {
    pub n_elements_vertical: usize,
    pub max_element_gain_dbi: f64,
    pub spacing_wavelengths: f64,
    /// Normalized voltage per vertical element.
    pub excitation: Vec<f64>,
    pub phase_increment_rad: f64,
    pub n_horizontal: usize,
    pub horizontal_spacing_wavelengths: f64,
}

impl Default for DipoleArrayConfig {
    fn default() -> Self {
        DipoleArrayConfig {
            n_elements_vertical: 4,
            max_element_gain_dbi: 2.15,
            spacing_wavelengths: 0.6,
            excitation: vec![0.97, 1.077, 1.077, 0.86],
            phase_increment_rad: 1.658,
            n_horizontal: 1,
            horizontal_spacing_wavelengths: 0.6,
        }
    }
}

impl DipoleArrayConfig {
    pub fn is_valid(&self) -> bool {
        self.excitation.len() == self.n_elements_vertical && matches!(self.n_horizontal, 1 | 2 | 4)
    }

    /// Element gain plus vertical array factor, in dBi.
    pub fn gain_dbi(&self, theta_rad: f64) -> f64 {
        self.max_element_gain_dbi + vertical_offset_db(theta_rad) + vertical_array_factor_db(theta_rad, self)
    }
}

/// Half-wave dipole attenuation in the vertical plane, 0 dB at the horizon.
pub fn vertical_offset_db(theta_rad: f64) -> f64 {
    let s = (theta_rad + FRAC_PI_2).sin();
    let num = (FRAC_PI_2 * (theta_rad + FRAC_PI_2).cos()).cos();
    if s.abs() < 1e-12 {
        return PATTERN_FLOOR_DB;
    }
    let ratio = (num / s).abs();
    if ratio <= 0.0 {
        return PATTERN_FLOOR_DB;
    }
    (20.0 * ratio.log10()).max(PATTERN_FLOOR_DB)
}

/// Gain of one element: maximum gain, flat horizontal offset and the
/// dipole vertical offset.
pub fn element_gain_db(_phi_rad: f64, theta_rad: f64) -> f64 {
    DipoleArrayConfig::default().max_element_gain_dbi + vertical_offset_db(theta_rad)
}

/// `20·log10 |Σ a(n)·exp(j(n−1)(2π·d·(−sin θ) + δ))|`, with the excitation
/// used as given.
pub fn vertical_array_factor_db(theta_rad: f64, cfg: &DipoleArrayConfig) -> f64 {
    let psi = TAU * cfg.spacing_wavelengths * (-theta_rad.sin()) + cfg.phase_increment_rad;
    let step = Complex64::from_polar(1.0, psi);
    let mut phasor = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for &a in &cfg.excitation {
        sum += phasor * a;
        phasor *= step;
    }
    let mag = sum.norm();
    if mag <= 0.0 {
        return PATTERN_FLOOR_DB;
    }
    (20.0 * mag.log10()).max(PATTERN_FLOOR_DB)
}

/// A rank-1 codebook entry with unit-magnitude weight per antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamWeights {
    pub codebook_index: usize,
    pub weights: Vec<Complex64>,
}

impl BeamWeights {
    pub fn identity() -> Self {
        BeamWeights {
            codebook_index: 0,
            weights: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn n_antennas(&self) -> usize {
        self.weights.len()
    }

    /// `|Σ w_n·h_n|²` for a channel with unit-magnitude per-antenna phases.
    /// Equals 1 for a single antenna and at most `N²`.
    pub fn power_gain(&self, channel_phases: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(channel_phases)
            .map(|(w, &p)| w * Complex64::from_polar(1.0, p))
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Array gain relative to the same total power from one antenna,
    /// `|w·h|² / N`, in dB.
    pub fn array_gain_db(&self, channel_phases: &[f64]) -> f64 {
        10.0 * (self.power_gain(channel_phases) / self.n_antennas() as f64).log10()
    }
}

/// Rank-1 precoders of the 2-antenna codebook, scaled to unit magnitude.
fn codebook_2tx() -> Vec<Vec<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let j = Complex64::new(0.0, 1.0);
    vec![vec![one, one], vec![one, -one], vec![one, j], vec![one, -j]]
}

/// Rank-1 precoders of the 4-antenna Householder codebook: the first
/// column of `I − 2uuᴴ/uᴴu`, scaled to unit magnitude.
fn codebook_4tx() -> Vec<Vec<Complex64>> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let (h, j) = (FRAC_1_SQRT_2, c(0.0, 1.0));
    let one = c(1.0, 0.0);
    let generators: [[Complex64; 4]; 16] = [
        [one, -one, -one, -one],
        [one, -j, one, j],
        [one, one, -one, one],
        [one, j, one, -j],
        [one, c(-h, -h), -j, c(h, -h)],
        [one, c(h, -h), j, c(-h, -h)],
        [one, c(h, h), -j, c(-h, h)],
        [one, c(-h, h), j, c(h, h)],
        [one, -one, one, one],
        [one, -j, -one, -j],
        [one, one, one, -one],
        [one, j, -one, j],
        [one, -one, -one, one],
        [one, -one, one, -one],
        [one, one, -one, -one],
        [one, one, one, one],
    ];
    generators
        .iter()
        .map(|u| {
            let norm: f64 = u.iter().map(|x| x.norm_sqr()).sum();
            (0..4)
                .map(|row| {
                    let e = if row == 0 { one } else { c(0.0, 0.0) };
                    // Scale by 2 so every entry has unit magnitude.
                    2.0 * (e - 2.0 * u[row] * u[0].conj() / norm)
                })
                .collect()
        })
        .collect()
}

/// Rank-1 codebook for `n` antennas.
pub fn codebook(n: usize) -> &'static [Vec<Complex64>] {
    static ONE: OnceLock<Vec<Vec<Complex64>>> = OnceLock::new();
    static TWO: OnceLock<Vec<Vec<Complex64>>> = OnceLock::new();
    static FOUR: OnceLock<Vec<Vec<Complex64>>> = OnceLock::new();
    match n {
        1 => ONE.get_or_init(|| vec![vec![Complex64::new(1.0, 0.0)]]),
        2 => TWO.get_or_init(codebook_2tx),
        4 => FOUR.get_or_init(codebook_4tx),
        _ => panic!("no codebook for {n} antennas"),
    }
}

/// Quantized MRT: the codebook entry maximizing `|w·h|²` for the given
/// per-antenna channel phases. Ties resolve to the lowest index.
pub fn select_beam(channel_phases: &[f64]) -> BeamWeights {
    let n = channel_phases.len();
    if n <= 1 {
        return BeamWeights::identity();
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, w) in codebook(n).iter().enumerate() {
        let g = w
            .iter()
            .zip(channel_phases)
            .map(|(w, &p)| w * Complex64::from_polar(1.0, p))
            .sum::<Complex64>()
            .norm_sqr();
        if g > best.1 + 1e-12 {
            best = (i, g);
        }
    }
    BeamWeights {
        codebook_index: best.0,
        weights: codebook(n)[best.0].clone(),
    }
}

/// Per-antenna phases of a uniform linear array along the x-axis towards
/// a receiver at `azimuth_rad`, `elevation_rad`.
pub fn horizontal_phases(n: usize, spacing_wavelengths: f64, azimuth_rad: f64, elevation_rad: f64) -> Vec<f64> {
    let step = TAU * spacing_wavelengths * azimuth_rad.cos() * elevation_rad.cos();
    (0..n).map(|i| i as f64 * step).collect()
}

/// Serving-link gain with the selected beam, in dB.
pub fn beamformed_link_gain_db(base_gain_db: f64, weights: &BeamWeights, channel_phases: &[f64]) -> f64 {
    base_gain_db + 10.0 * weights.power_gain(channel_phases).log10()
}

/// Interfering-link gain: the interferer cycles through the beams of the
/// UEs it serves with equal time share, so the victim sees the mean power
/// gain of those beams. A transmitter without served UEs radiates `N`
/// times the single-antenna power on average.
pub fn interference_link_gain_db(base_gain_db: f64, interferer_beams: &[BeamWeights], channel_phases: &[f64]) -> f64 {
    let n = channel_phases.len().max(1);
    let factor = if n == 1 {
        1.0
    } else if interferer_beams.is_empty() {
        n as f64
    } else {
        interferer_beams.iter().map(|b| b.power_gain(channel_phases)).sum::<f64>() / interferer_beams.len() as f64
    };
    base_gain_db + 10.0 * factor.log10()
}

/// Elevation of the line from a transmitter at `tx_height_m` to a receiver
/// at `rx_height_m`, `horizontal_m` away, positive downwards.
pub fn elevation_rad(tx_height_m: f64, rx_height_m: f64, horizontal_m: f64) -> f64 {
    (tx_height_m - rx_height_m).atan2(horizontal_m)
}

/// Wraps an angle to (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a % TAU;
    if x <= -PI {
        x += TAU;
    } else if x > PI {
        x -= TAU;
    }
    x
}
