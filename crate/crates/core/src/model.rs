//! Tunable model parameters that are not part of the experiment legend:
//! propagation coefficients, shadowing, antenna array, height rule, radio
//! constants and the fast-fading K-factor law. Every value is echoed into
//! the audit block of output files.

use crate::antenna::DipoleArrayConfig;
use crate::fastfading::KFactorModel;
use crate::link::RadioConstants;
use crate::propagation::{LosSmoothing, LossCoefficients, PathGainModel, ShadowParams};
use crate::scenario::HeightRule;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub radio: RadioConstants,
    pub los: LossCoefficients,
    pub nlos: LossCoefficients,
    pub los_smoothing: LosSmoothing,
    pub shadow: ShadowParams,
    pub antenna: DipoleArrayConfig,
    pub height_rule: HeightRule,
    pub kfactor: KFactorModel,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            radio: RadioConstants::default(),
            los: LossCoefficients::UMI_LOS,
            nlos: LossCoefficients::UMI_NLOS,
            los_smoothing: LosSmoothing::default(),
            shadow: ShadowParams::default(),
            antenna: DipoleArrayConfig::default(),
            height_rule: HeightRule::default(),
            kfactor: KFactorModel::default(),
        }
    }
}

impl ModelParams {
    pub fn path_model(&self, carrier_ghz: f64) -> PathGainModel {
        PathGainModel {
            carrier_ghz,
            los: self.los,
            nlos: self.nlos,
            smoothing: self.los_smoothing,
        }
    }

    /// `key = value` pairs describing every constant, for output headers.
    pub fn audit_lines(&self) -> Vec<(String, String)> {
        let r = &self.radio;
        let coeff = |c: &LossCoefficients| format!("{}*log10(d) + {} + {}*log10(f_ghz)", c.slope, c.intercept, c.freq_coeff);
        let a = &self.antenna;
        let h = &self.height_rule;
        let k = &self.kfactor;
        vec![
            ("noise_psd_dbm_hz".into(), r.noise_psd_dbm_hz.to_string()),
            ("ue_noise_figure_db".into(), r.ue_noise_figure_db.to_string()),
            ("pilot_sinr_floor_db".into(), r.pilot_sinr_floor_db.to_string()),
            ("edge_distance".into(), r.edge.name().into()),
            ("shannon_backoff_db".into(), r.shannon_backoff_db.to_string()),
            ("los_loss_db".into(), coeff(&self.los)),
            ("nlos_loss_db".into(), coeff(&self.nlos)),
            (
                "los_smoothing_window_m".into(),
                format!("{}..{}", self.los_smoothing.start_m, self.los_smoothing.end_m),
            ),
            ("shadow_sigma_db".into(), self.shadow.sigma_db.to_string()),
            ("shadow_inter_site_correlation".into(), self.shadow.inter_site_correlation.to_string()),
            ("shadow_decorrelation_m".into(), self.shadow.decorrelation_m.to_string()),
            ("shadow_spectral_components".into(), self.shadow.components.to_string()),
            ("antenna_vertical_elements".into(), a.n_elements_vertical.to_string()),
            ("antenna_max_element_gain_dbi".into(), a.max_element_gain_dbi.to_string()),
            ("antenna_spacing_wavelengths".into(), a.spacing_wavelengths.to_string()),
            (
                "antenna_excitation".into(),
                a.excitation.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
            ),
            ("antenna_phase_increment_rad".into(), a.phase_increment_rad.to_string()),
            ("antenna_horizontal_spacing_wavelengths".into(), a.horizontal_spacing_wavelengths.to_string()),
            (
                "site_height_rule".into(),
                format!(
                    "{} m * isd / {} m clamped to [{}, {}] m",
                    h.reference_height_m, h.reference_isd_m, h.min_height_m, h.max_height_m
                ),
            ),
            ("ue_height_m".into(), crate::scenario::UE_HEIGHT_M.to_string()),
            ("guard_tiers".into(), crate::scenario::GUARD_TIERS.to_string()),
            (
                "rician_k".into(),
                format!(
                    "{} for d <= {} m, else max({}, {}*exp(-(d-{})/{:.4}))",
                    k.k_los, k.los_range_m, k.k_floor, k.k_los, k.los_range_m, k.decay_m
                ),
            ),
        ]
    }
}
