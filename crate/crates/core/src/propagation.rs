//! Path gain (LOS/NLOS blend weighted by the LOS probability) and spatially
//! correlated log-normal shadowing.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::rng;

/// Smallest distance used in any distance-dependent formula.
pub const MIN_DISTANCE_M: f64 = 0.5;

/// `loss_db = slope·log10(d) + intercept + freq_coeff·log10(f_GHz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossCoefficients {
    pub slope: f64,
    pub intercept: f64,
    pub freq_coeff: f64,
}

impl LossCoefficients {
    /// Urban-micro line-of-sight loss.
    pub const UMI_LOS: LossCoefficients = LossCoefficients {
        slope: 22.0,
        intercept: 28.0,
        freq_coeff: 20.0,
    };
    /// Urban-micro non-line-of-sight loss.
    pub const UMI_NLOS: LossCoefficients = LossCoefficients {
        slope: 36.7,
        intercept: 22.7,
        freq_coeff: 26.0,
    };

    pub fn loss_db(&self, d_m: f64, carrier_ghz: f64) -> f64 {
        self.slope * d_m.max(MIN_DISTANCE_M).log10()
            + self.intercept
            + self.freq_coeff * carrier_ghz.log10()
    }
}

/// Cubic Hermite window that removes the kink of the LOS probability at
/// 18 m. Outside `[start_m, end_m]` the closed form is used unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosSmoothing {
    pub start_m: f64,
    pub end_m: f64,
}

impl Default for LosSmoothing {
    fn default() -> Self {
        LosSmoothing {
            start_m: 14.0,
            end_m: 22.0,
        }
    }
}

/// Closed-form urban-micro LOS probability, `min(18/d, 1)(1 − e^{−d/36}) + e^{−d/36}`.
pub fn los_probability_closed_form(d_m: f64) -> f64 {
    let d = d_m.max(MIN_DISTANCE_M);
    let e = (-d / 36.0).exp();
    (18.0 / d).min(1.0) * (1.0 - e) + e
}

fn los_probability_slope(d_m: f64) -> f64 {
    if d_m <= 18.0 {
        return 0.0;
    }
    let e = (-d_m / 36.0).exp();
    -18.0 / (d_m * d_m) * (1.0 - e) + 18.0 / d_m * e / 36.0 - e / 36.0
}

impl LosSmoothing {
    pub fn probability(&self, d_m: f64) -> f64 {
        let d = d_m.max(MIN_DISTANCE_M);
        if d <= self.start_m || d >= self.end_m || self.end_m <= self.start_m {
            return los_probability_closed_form(d);
        }
        let (a, b) = (self.start_m, self.end_m);
        let h = b - a;
        let t = (d - a) / h;
        let (p0, p1) = (los_probability_closed_form(a), los_probability_closed_form(b));
        let (m0, m1) = (los_probability_slope(a) * h, los_probability_slope(b) * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1
    }
}

/// LOS probability with the default smoothing window.
pub fn los_probability(d_m: f64) -> f64 {
    LosSmoothing::default().probability(d_m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGainModel {
    pub carrier_ghz: f64,
    pub los: LossCoefficients,
    pub nlos: LossCoefficients,
    pub smoothing: LosSmoothing,
}

impl PathGainModel {
    pub fn umi(carrier_ghz: f64) -> Self {
        PathGainModel {
            carrier_ghz,
            los: LossCoefficients::UMI_LOS,
            nlos: LossCoefficients::UMI_NLOS,
            smoothing: LosSmoothing::default(),
        }
    }

    pub fn los_probability(&self, d_m: f64) -> f64 {
        self.smoothing.probability(d_m)
    }

    /// Expected path gain in dB (negative), blending LOS and NLOS gains
    /// with the LOS probability. `d_3d_m` is the 3D distance.
    pub fn path_gain_db(&self, d_3d_m: f64) -> f64 {
        let d = d_3d_m.max(MIN_DISTANCE_M);
        let p = self.los_probability(d);
        -(p * self.los.loss_db(d, self.carrier_ghz) + (1.0 - p) * self.nlos.loss_db(d, self.carrier_ghz))
    }
}

pub fn path_gain_db(d_3d_m: f64, model: &PathGainModel) -> f64 {
    model.path_gain_db(d_3d_m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowParams {
    pub sigma_db: f64,
    pub inter_site_correlation: f64,
    pub decorrelation_m: f64,
    /// Number of random plane waves per spectral field.
    pub components: usize,
}

impl Default for ShadowParams {
    fn default() -> Self {
        ShadowParams {
            sigma_db: 6.0,
            inter_site_correlation: 0.5,
            decorrelation_m: 20.0,
            components: 32,
        }
    }
}

/// Unit-variance Gaussian-like random field with covariance
/// `exp(-|Δ|/decorrelation)`, realized as a sum of plane waves whose wave
/// vectors are drawn from the matching 2D spectral density. Can be
/// evaluated at any position without a precomputed map.
#[derive(Debug, Clone)]
struct SpectralField {
    // Interleaved (kx, ky, phase) triples.
    waves: Vec<f64>,
}

impl SpectralField {
    fn new(field_key: u64, components: usize, decorrelation_m: f64) -> Self {
        let mut waves = Vec::with_capacity(3 * components);
        for i in 0..components as u64 {
            let u = rng::uniform(field_key, 3 * i);
            // Radial CDF of the exponential-covariance spectrum: 1 - (1 + L²k²)^{-1/2}.
            let k = ((1.0 - u).powi(-2) - 1.0).sqrt() / decorrelation_m;
            let dir = TAU * rng::uniform(field_key, 3 * i + 1);
            let phase = TAU * rng::uniform(field_key, 3 * i + 2);
            waves.extend_from_slice(&[k * dir.cos(), k * dir.sin(), phase]);
        }
        SpectralField { waves }
    }

    #[inline]
    fn value(&self, x: f64, y: f64) -> f64 {
        let n = self.waves.len() / 3;
        let sum: f64 = self
            .waves
            .chunks_exact(3)
            .map(|w| (w[0] * x + w[1] * y + w[2]).cos())
            .sum();
        sum * (2.0 / n as f64).sqrt()
    }
}

/// Per-run shadowing: `σ·(√ρ·Z_common(pos) + √(1−ρ)·Z_site(pos))`, which
/// gives inter-site correlation ρ for co-located samples.
#[derive(Debug, Clone)]
pub struct ShadowField {
    params: ShadowParams,
    bounds: (f64, f64, f64, f64),
    common: SpectralField,
    sites: Vec<SpectralField>,
}

impl ShadowField {
    /// `bounds` is `(x_min, x_max, y_min, y_max)`.
    pub fn new(params: ShadowParams, seed: u64, n_sites: usize, bounds: (f64, f64, f64, f64)) -> Self {
        let comps = params.components.max(1);
        let common = SpectralField::new(rng::key(&[seed, rng::tag::SHADOW_COMMON]), comps, params.decorrelation_m);
        let sites = (0..n_sites as u64)
            .map(|s| SpectralField::new(rng::key(&[seed, rng::tag::SHADOW_SITE, s]), comps, params.decorrelation_m))
            .collect();
        ShadowField {
            params,
            bounds,
            common,
            sites,
        }
    }

    pub fn params(&self) -> &ShadowParams {
        &self.params
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (x0, x1, y0, y1) = self.bounds;
        (x0..=x1).contains(&x) && (y0..=y1).contains(&y)
    }

    /// Weighted common component at a position, in dB. Shared by all sites.
    #[inline]
    pub fn common_db(&self, x: f64, y: f64) -> f64 {
        self.params.sigma_db * self.params.inter_site_correlation.sqrt() * self.common.value(x, y)
    }

    /// Weighted site-specific component at a position, in dB.
    #[inline]
    pub fn site_db(&self, site: usize, x: f64, y: f64) -> f64 {
        self.params.sigma_db * (1.0 - self.params.inter_site_correlation).sqrt() * self.sites[site].value(x, y)
    }

    /// Shadow gain of `site` at `(x, y)` in dB.
    pub fn sample_shadow_db(&self, site: usize, x: f64, y: f64) -> Result<f64> {
        if site >= self.sites.len() {
            return Err(Error::UnknownSite(site));
        }
        if !self.contains(x, y) {
            return Err(Error::OutsideShadowField { x, y });
        }
        Ok(self.common_db(x, y) + self.site_db(site, x, y))
    }
}

pub fn sample_shadow_db(site: usize, x: f64, y: f64, field: &ShadowField) -> Result<f64> {
    field.sample_shadow_db(site, x, y)
}
