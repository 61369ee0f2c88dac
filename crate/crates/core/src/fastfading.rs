//! Distance-dependent Rician small-scale fading for the scheduler study.
//!
//! The K factor is the ratio of specular to scattered power. It sits at
//! its LOS value inside the guaranteed-LOS range and decays exponentially
//! beyond it towards a near-Rayleigh floor.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::propagation::los_probability_closed_form;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KFactorModel {
    pub k_los: f64,
    pub los_range_m: f64,
    pub k_floor: f64,
    /// Exponential decay length beyond `los_range_m`.
    pub decay_m: f64,
}

impl KFactorModel {
    /// Decay length chosen so that `K(fit_distance_m)` equals the direct
    /// power ratio `P_LOS / (1 − P_LOS)` at that distance.
    pub fn fitted_at(fit_distance_m: f64) -> Self {
        let (k_los, los_range_m) = (32.0, 18.0);
        let p = los_probability_closed_form(fit_distance_m);
        let target = p / (1.0 - p);
        KFactorModel {
            k_los,
            los_range_m,
            k_floor: 0.1,
            decay_m: (fit_distance_m - los_range_m) / (k_los / target).ln(),
        }
    }

    pub fn k_factor(&self, d_m: f64) -> f64 {
        if d_m <= self.los_range_m {
            return self.k_los;
        }
        (self.k_los * (-(d_m - self.los_range_m) / self.decay_m).exp()).max(self.k_floor)
    }
}

impl Default for KFactorModel {
    fn default() -> Self {
        KFactorModel::fitted_at(36.0)
    }
}

/// K factor at `d_m` under the default model.
pub fn k_factor(d_m: f64) -> f64 {
    KFactorModel::default().k_factor(d_m)
}

/// Rician coefficients of one link: a fixed specular phase and i.i.d.
/// scattered components per (RB, TTI), all addressed by counters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianLink {
    pub k_factor: f64,
    pub los_phase_rad: f64,
    key: u64,
    los: Complex64,
    scatter_scale: f64,
}

impl RicianLink {
    /// Link `link_id` of a run with seed `seed`.
    pub fn new(seed: u64, link_id: u64, k_factor: f64) -> Self {
        let key = rng::key(&[seed, rng::tag::FAST_FADING, link_id]);
        let los_phase_rad = TAU * rng::uniform(key, u64::MAX);
        RicianLink {
            k_factor,
            los_phase_rad,
            key,
            los: Complex64::from_polar((k_factor / (k_factor + 1.0)).sqrt(), los_phase_rad),
            scatter_scale: (0.5 / (k_factor + 1.0)).sqrt(),
        }
    }

    /// `√(K/(K+1))·e^{jφ} + √(1/(K+1))·CN(0,1)` for one RB in one TTI.
    #[inline]
    pub fn coefficient(&self, rb: u64, tti: u64, n_rbs: u64) -> Complex64 {
        let (a, b) = rng::normal_pair(self.key, tti * n_rbs + rb);
        self.los + Complex64::new(a, b) * self.scatter_scale
    }

    /// `|h|²` for one RB in one TTI.
    #[inline]
    pub fn power(&self, rb: u64, tti: u64, n_rbs: u64) -> f64 {
        self.coefficient(rb, tti, n_rbs).norm_sqr()
    }
}

/// One fading coefficient for `ue` on `rb` in `tti`.
pub fn sample_channel(seed: u64, ue: u64, rb: u64, tti: u64, n_rbs: u64, k: f64) -> Complex64 {
    RicianLink::new(seed, ue, k).coefficient(rb, tti, n_rbs)
}
