//! Parameter sets for the control Hamiltonian and the optical addressing
//! field. All frequencies are angular (rad/s); constructors taking Hz apply
//! the 2*pi conversion, since configs and the literature quote Hz.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::constants;
use crate::HamiltonianError;

/// The six-parameter set that fixes the control Hamiltonian, plus derived
/// constants. Defaults reproduce the nominal experimental operating point
/// (bias Larmor 1 MHz, rf drive 1 MHz, rf Larmor 25 kHz, uw Rabi 27.5 kHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    /// Bias Larmor angular frequency Omega_0.
    pub omega0: f64,
    /// rf Larmor angular frequency along x.
    pub omega_x: f64,
    /// rf Larmor angular frequency along y.
    pub omega_y: f64,
    /// Microwave Rabi angular frequency.
    pub omega_uw: f64,
    /// rf detuning Delta_rf = omega_rf - Omega_0.
    pub delta_rf: f64,
    /// Microwave detuning from the |4,4> <-> |3,3> resonance.
    pub delta_uw: f64,
    /// rf drive angular frequency omega_rf.
    pub omega_rf_drive: f64,
    /// Ground hyperfine splitting in angular frequency units.
    pub e_hf: f64,
    /// Ratio g^(3)/g^(4) of the manifold g-factors (negative).
    pub g_r: f64,
    /// Include corrections beyond the plain rotating-wave approximation.
    pub c_rwa: bool,
    /// Relative phase error added to phi_y (rf coil mismatch), radians.
    pub phase_mismatch: f64,
}

impl Default for HamiltonianParams {
    fn default() -> Self {
        HamiltonianParams {
            omega0: TAU * 1.0e6,
            omega_x: TAU * 25.0e3,
            omega_y: TAU * 25.0e3,
            omega_uw: TAU * 27.5e3,
            delta_rf: 0.0,
            delta_uw: 0.0,
            omega_rf_drive: TAU * 1.0e6,
            e_hf: constants::E_HF,
            g_r: constants::g_ratio(),
            c_rwa: true,
            phase_mismatch: 0.0,
        }
    }
}

impl HamiltonianParams {
    pub fn validate(&self) -> Result<(), HamiltonianError> {
        for (name, v) in [
            ("omega0", self.omega0),
            ("omega_x", self.omega_x),
            ("omega_y", self.omega_y),
            ("omega_uw", self.omega_uw),
            ("delta_rf", self.delta_rf),
            ("delta_uw", self.delta_uw),
            ("omega_rf_drive", self.omega_rf_drive),
            ("e_hf", self.e_hf),
            ("g_r", self.g_r),
        ] {
            if !v.is_finite() {
                return Err(HamiltonianError::InvalidParameter(format!(
                    "{name} is not finite"
                )));
            }
        }
        let has_rf = self.omega_x != 0.0 || self.omega_y != 0.0;
        if has_rf && (self.omega0 <= 0.0 || self.omega_rf_drive <= 0.0) {
            return Err(HamiltonianError::InvalidParameter(
                "omega0 and omega_rf_drive must be positive when rf terms are built".into(),
            ));
        }
        Ok(())
    }

    /// Offsets applied on top of the nominal values, in angular units.
    /// `delta_uw` here is the additional microwave detuning.
    pub fn with_offsets(
        &self,
        d_omega0: f64,
        d_omega_x: f64,
        d_omega_y: f64,
        d_omega_uw: f64,
        d_delta_rf: f64,
        d_delta_uw: f64,
    ) -> HamiltonianParams {
        let mut p = self.clone();
        p.omega0 += d_omega0;
        // The rf drive tracks its generator, not the atomic resonance, so a
        // bias-field shift appears as an opposite shift of delta_rf.
        p.delta_rf += d_delta_rf - d_omega0;
        p.omega_x += d_omega_x;
        p.omega_y += d_omega_y;
        p.omega_uw += d_omega_uw;
        p.delta_uw += d_delta_uw;
        p
    }
}

/// Which optical line the addressing field is tuned near.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpticalLine {
    D1,
    D2,
}

impl OpticalLine {
    /// Excited-state electronic angular momentum J'.
    pub fn j_excited(self) -> f64 {
        match self {
            OpticalLine::D1 => 0.5,
            OpticalLine::D2 => 1.5,
        }
    }

    pub fn natural_linewidth(self) -> f64 {
        match self {
            OpticalLine::D1 => constants::GAMMA_D1,
            OpticalLine::D2 => constants::GAMMA_D2,
        }
    }

    /// Excited hyperfine levels F' that dipole-couple to the ground state.
    pub fn excited_levels(self) -> &'static [i32] {
        match self {
            OpticalLine::D1 => &[3, 4],
            OpticalLine::D2 => &[2, 3, 4, 5],
        }
    }
}

/// Optical addressing field parameters for the light-shift Hamiltonian.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LightFieldParams {
    /// I / I_sat.
    pub intensity_ratio: f64,
    /// Detunings Delta_{F=3, F'} in rad/s, keyed by F'. Detunings from the
    /// F=4 ground manifold are derived by adding the ground splitting.
    pub detunings_f3: BTreeMap<i32, f64>,
    /// Natural linewidth of the excited state, rad/s.
    pub gamma: f64,
    /// Complex polarization vector (x, y, z components), unit norm.
    pub polarization: [(f64, f64); 3],
    pub line: OpticalLine,
}

impl LightFieldParams {
    pub fn validate(&self) -> Result<(), HamiltonianError> {
        if self.gamma <= 0.0 {
            return Err(HamiltonianError::InvalidParameter("gamma must be positive".into()));
        }
        let norm2: f64 = self
            .polarization
            .iter()
            .map(|(re, im)| re * re + im * im)
            .sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(HamiltonianError::InvalidParameter(format!(
                "polarization norm^2 = {norm2} deviates from 1"
            )));
        }
        Ok(())
    }

    /// Detuning Delta_{F,F'} for a ground manifold F in {3,4}.
    pub fn detuning(&self, f_ground: i32, f_excited: i32) -> Result<f64, HamiltonianError> {
        let base = *self
            .detunings_f3
            .get(&f_excited)
            .ok_or(HamiltonianError::MissingDetuning(f_excited))?;
        match f_ground {
            3 => Ok(base),
            4 => Ok(base + constants::E_HF),
            _ => Err(HamiltonianError::InvalidParameter(format!(
                "ground manifold F={f_ground} out of range"
            ))),
        }
    }

    /// The addressing-field operating point used for inhomogeneous control:
    /// linear x polarization on the D1 line, 4.86 GHz red of F=3 -> F'=4,
    /// intensity 3.0 mW/cm^2.
    pub fn d1_addressing_default() -> LightFieldParams {
        let delta_34 = -TAU * 4.86e9;
        let mut detunings = BTreeMap::new();
        detunings.insert(4, delta_34);
        detunings.insert(3, delta_34 + constants::D1_HF_SPLITTING);
        LightFieldParams {
            intensity_ratio: 3.0 / constants::I_SAT_D1_MW_CM2,
            detunings_f3: detunings,
            gamma: constants::GAMMA_D1,
            polarization: [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            line: OpticalLine::D1,
        }
    }

    /// Circular sigma+ polarization propagating along z.
    pub fn with_sigma_plus(mut self) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        self.polarization = [(s, 0.0), (0.0, s), (0.0, 0.0)];
        self
    }
}
