//! Calibrated control-error model: Gaussian draws of the Hamiltonian
//! parameters with the microwave detuning slaved to seven times the rf
//! detuning, plus the readout frequency noise level.

use std::f64::consts::TAU;

use qudit_hamiltonian::HamiltonianParams;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::SimError;

/// Standard deviations of the control-parameter errors (all angular except
/// the phase mismatch and the dimensionless readout noise). Defaults are the
/// calibrated values: 15 Hz on the rf detuning, 25 Hz on the rf Larmor
/// amplitudes, 27.5 Hz on the microwave Rabi rate, 0.04 degrees of relative
/// rf phase, 0.01 on readout frequencies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorModel {
    pub delta_rf_sigma: f64,
    /// Microwave detuning slaved to `delta_uw_factor * delta_rf`.
    pub delta_uw_factor: f64,
    pub omega_x_sigma: f64,
    pub omega_y_sigma: f64,
    pub omega_uw_sigma: f64,
    /// Sigma of the phi_x - phi_y phase mismatch, radians.
    pub phase_mismatch_sigma: f64,
    /// Additive Gaussian noise on every readout frequency.
    pub sga_noise_sigma: f64,
    pub seed: u64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        ErrorModel {
            delta_rf_sigma: TAU * 15.0,
            delta_uw_factor: 7.0,
            omega_x_sigma: TAU * 25.0,
            omega_y_sigma: TAU * 25.0,
            omega_uw_sigma: TAU * 27.5,
            phase_mismatch_sigma: 0.04f64.to_radians(),
            sga_noise_sigma: 0.01,
            seed: 0,
        }
    }
}

impl ErrorModel {
    /// A model with every error switched off.
    pub fn noiseless() -> Self {
        ErrorModel {
            delta_rf_sigma: 0.0,
            delta_uw_factor: 7.0,
            omega_x_sigma: 0.0,
            omega_y_sigma: 0.0,
            omega_uw_sigma: 0.0,
            phase_mismatch_sigma: 0.0,
            sga_noise_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, v) in [
            ("delta_rf_sigma", self.delta_rf_sigma),
            ("omega_x_sigma", self.omega_x_sigma),
            ("omega_y_sigma", self.omega_y_sigma),
            ("omega_uw_sigma", self.omega_uw_sigma),
            ("phase_mismatch_sigma", self.phase_mismatch_sigma),
            ("sga_noise_sigma", self.sga_noise_sigma),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SimError::Invalid(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// One Gaussian draw of every parameter offset.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> ParameterDraw {
        fn gauss<R: Rng>(rng: &mut R, sigma: f64) -> f64 {
            if sigma == 0.0 {
                0.0
            } else {
                qudit_core::random::randn(rng) * sigma
            }
        }
        let delta_rf = gauss(rng, self.delta_rf_sigma);
        ParameterDraw {
            delta_rf,
            delta_uw: self.delta_uw_factor * delta_rf,
            d_omega_x: gauss(rng, self.omega_x_sigma),
            d_omega_y: gauss(rng, self.omega_y_sigma),
            d_omega_uw: gauss(rng, self.omega_uw_sigma),
            phase_mismatch: gauss(rng, self.phase_mismatch_sigma),
        }
    }
}

/// One realization of the control-parameter errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterDraw {
    pub delta_rf: f64,
    pub delta_uw: f64,
    pub d_omega_x: f64,
    pub d_omega_y: f64,
    pub d_omega_uw: f64,
    pub phase_mismatch: f64,
}

impl ParameterDraw {
    pub fn nominal() -> ParameterDraw {
        ParameterDraw {
            delta_rf: 0.0,
            delta_uw: 0.0,
            d_omega_x: 0.0,
            d_omega_y: 0.0,
            d_omega_uw: 0.0,
            phase_mismatch: 0.0,
        }
    }

    pub fn apply(&self, p: &HamiltonianParams) -> HamiltonianParams {
        let mut q = p.clone();
        q.delta_rf += self.delta_rf;
        q.delta_uw += self.delta_uw;
        q.omega_x += self.d_omega_x;
        q.omega_y += self.d_omega_y;
        q.omega_uw += self.d_omega_uw;
        q.phase_mismatch += self.phase_mismatch;
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn zero_sigmas_give_nominal() {
        let m = ErrorModel::noiseless();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
        let d = m.sample(&mut rng);
        assert_eq!(d, ParameterDraw::nominal());
    }

    #[test]
    fn sample_moments_and_slaving() {
        let m = ErrorModel::default();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let n = 100_000;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for _ in 0..n {
            let d = m.sample(&mut rng);
            assert!((d.delta_uw - 7.0 * d.delta_rf).abs() < 1e-12);
            acc += d.delta_rf;
            acc2 += d.delta_rf * d.delta_rf;
        }
        let mean = acc / n as f64;
        let sigma = (acc2 / n as f64 - mean * mean).sqrt();
        let expect = TAU * 15.0;
        assert!((sigma - expect).abs() < 0.02 * expect, "sigma {sigma} vs {expect}");
        assert!(mean.abs() < 0.02 * expect);
    }
}
