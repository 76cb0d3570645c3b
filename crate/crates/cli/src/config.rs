//! Versioned structured-text configuration. Frequencies are quoted in Hz in
//! config files and converted to angular units at parse time; unknown keys
//! are rejected so typos surface instead of silently using defaults.

use std::f64::consts::TAU;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qudit_hamiltonian::HamiltonianParams;
use qudit_sim::ErrorModel;
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    #[serde(default = "default_omega0_hz")]
    pub omega0_hz: f64,
    #[serde(default = "default_omega0_hz")]
    pub omega_rf_drive_hz: f64,
    #[serde(default = "default_omega_rf_hz")]
    pub omega_x_hz: f64,
    #[serde(default = "default_omega_rf_hz")]
    pub omega_y_hz: f64,
    #[serde(default = "default_omega_uw_hz")]
    pub omega_uw_hz: f64,
    #[serde(default)]
    pub delta_rf_hz: f64,
    #[serde(default)]
    pub delta_uw_hz: f64,
    #[serde(default = "default_true")]
    pub c_rwa: bool,
}

fn default_omega0_hz() -> f64 {
    1.0e6
}
fn default_omega_rf_hz() -> f64 {
    25.0e3
}
fn default_omega_uw_hz() -> f64 {
    27.5e3
}
fn default_true() -> bool {
    true
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl HamiltonianConfig {
    pub fn to_params(&self) -> Result<HamiltonianParams> {
        let p = HamiltonianParams {
            omega0: TAU * self.omega0_hz,
            omega_rf_drive: TAU * self.omega_rf_drive_hz,
            omega_x: TAU * self.omega_x_hz,
            omega_y: TAU * self.omega_y_hz,
            omega_uw: TAU * self.omega_uw_hz,
            delta_rf: TAU * self.delta_rf_hz,
            delta_uw: TAU * self.delta_uw_hz,
            c_rwa: self.c_rwa,
            ..HamiltonianParams::default()
        };
        p.validate().map_err(|e| anyhow::anyhow!("hamiltonian: {e}"))?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorModelConfig {
    #[serde(default = "default_delta_rf_sigma_hz")]
    pub delta_rf_sigma_hz: f64,
    #[serde(default = "default_uw_factor")]
    pub delta_uw_factor: f64,
    #[serde(default = "default_omega_sigma_hz")]
    pub omega_x_sigma_hz: f64,
    #[serde(default = "default_omega_sigma_hz")]
    pub omega_y_sigma_hz: f64,
    #[serde(default = "default_omega_uw_sigma_hz")]
    pub omega_uw_sigma_hz: f64,
    #[serde(default = "default_phase_mismatch_deg")]
    pub phase_mismatch_sigma_deg: f64,
    #[serde(default = "default_sga_sigma")]
    pub sga_noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_delta_rf_sigma_hz() -> f64 {
    15.0
}
fn default_uw_factor() -> f64 {
    7.0
}
fn default_omega_sigma_hz() -> f64 {
    25.0
}
fn default_omega_uw_sigma_hz() -> f64 {
    27.5
}
fn default_phase_mismatch_deg() -> f64 {
    0.04
}
fn default_sga_sigma() -> f64 {
    0.01
}

impl Default for ErrorModelConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl ErrorModelConfig {
    pub fn to_model(&self) -> Result<ErrorModel> {
        if self.sga_noise_sigma < 0.0 {
            bail!("error_model.sga_noise_sigma must be nonnegative, got {}", self.sga_noise_sigma);
        }
        let m = ErrorModel {
            delta_rf_sigma: TAU * self.delta_rf_sigma_hz,
            delta_uw_factor: self.delta_uw_factor,
            omega_x_sigma: TAU * self.omega_x_sigma_hz,
            omega_y_sigma: TAU * self.omega_y_sigma_hz,
            omega_uw_sigma: TAU * self.omega_uw_sigma_hz,
            phase_mismatch_sigma: self.phase_mismatch_sigma_deg.to_radians(),
            sga_noise_sigma: self.sga_noise_sigma,
            seed: self.seed,
        };
        m.validate().map_err(|e| anyhow::anyhow!("error_model: {e}"))?;
        Ok(m)
    }
}

/// Campaign kinds map to the study sweeps the reports reproduce.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum CampaignKind {
    GrapeSweep {
        #[serde(default = "default_t_list_us")]
        t_list_us: Vec<f64>,
        #[serde(default = "default_dt_list_us")]
        dt_list_us: Vec<f64>,
        #[serde(default = "one")]
        n_targets: usize,
        #[serde(default = "default_target_f")]
        target_fidelity: f64,
        #[serde(default = "two")]
        n_starts: usize,
        #[serde(default = "default_sweep_iters")]
        max_iters: usize,
    },
    QstStudy {
        constructions: Vec<String>,
        #[serde(default = "default_states")]
        n_states: usize,
        #[serde(default = "default_estimators")]
        estimators: Vec<String>,
        #[serde(default)]
        error_model: ErrorModelConfig,
        #[serde(default = "default_ensemble")]
        ensemble_draws: usize,
    },
    QstPartial {
        construction: String,
        #[serde(default = "default_states")]
        n_states: usize,
        #[serde(default = "default_estimators")]
        estimators: Vec<String>,
        #[serde(default)]
        error_model: ErrorModelConfig,
        #[serde(default = "default_ensemble")]
        ensemble_draws: usize,
        #[serde(default)]
        epsilon: Option<f64>,
    },
    QptStudy {
        #[serde(default = "four")]
        dim: usize,
        #[serde(default = "one")]
        n_processes: usize,
        #[serde(default = "default_probe_counts")]
        probe_counts: Vec<usize>,
        #[serde(default)]
        noisy: bool,
        #[serde(default)]
        error_model: ErrorModelConfig,
    },
    RbStudy {
        #[serde(default = "default_etas")]
        etas: Vec<f64>,
        #[serde(default = "default_lengths")]
        lengths: Vec<usize>,
        #[serde(default = "ten")]
        n_sequences: usize,
    },
    PovmAudit {
        #[serde(default = "default_audit_constructions")]
        constructions: Vec<String>,
        #[serde(default = "default_verify_states")]
        verify_states: usize,
    },
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}
fn four() -> usize {
    4
}
fn ten() -> usize {
    10
}
fn default_states() -> usize {
    20
}
fn default_ensemble() -> usize {
    20
}
fn default_target_f() -> f64 {
    0.999
}
fn default_sweep_iters() -> usize {
    800
}
fn default_t_list_us() -> Vec<f64> {
    vec![300.0, 450.0, 600.0]
}
fn default_dt_list_us() -> Vec<f64> {
    vec![4.0]
}
fn default_estimators() -> Vec<String> {
    vec!["ls".into(), "ml".into()]
}
fn default_probe_counts() -> Vec<usize> {
    vec![4, 16]
}
fn default_etas() -> Vec<f64> {
    vec![0.01, 0.02, 0.05]
}
fn default_lengths() -> Vec<usize> {
    vec![1, 4, 8, 12, 18, 24, 30]
}
fn default_audit_constructions() -> Vec<String> {
    vec![
        "mub4".into(),
        "mub16".into(),
        "gmb16".into(),
        "sic4".into(),
        "psi4".into(),
        "5mub16".into(),
        "5gmb16".into(),
        "5pb16".into(),
        "4gmb16".into(),
        "4pb16".into(),
    ]
}
fn default_verify_states() -> usize {
    10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(flatten)]
    pub kind: CampaignKind,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub hamiltonian: HamiltonianConfig,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

/// Load, validate, and normalize a campaign config; an empty file yields the
/// full default echo of the requested kind.
pub fn validate_config(path: &Path) -> Result<CampaignConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let text = if text.trim().is_empty() {
        "{\"kind\": \"povm_audit\"}".to_string()
    } else {
        text
    };
    let cfg: CampaignConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    if cfg.version != CONFIG_VERSION {
        bail!("config version {} unsupported (expected {})", cfg.version, CONFIG_VERSION);
    }
    Ok(cfg)
}

/// FNV-1a hash of the canonical JSON encoding, carried by every artifact.
pub fn config_hash(cfg: &CampaignConfig) -> String {
    let s = serde_json::to_string(cfg).expect("config serialize");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    format!("{h:016x}")
}
