//! Waveform propagation under a Hamiltonian model: ordered product of
//! per-step propagators, with optional linear bias-field ramps and an
//! optional additive static term (light shift).

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::linalg::eigh;
use qudit_core::CMat;
use qudit_hamiltonian::builder::h_total_mat;
use qudit_hamiltonian::HamiltonianParams;

use crate::waveform::ControlWaveform;
use crate::GrapeError;

/// Linear bias-field perturbation delta_Omega(t) from start to end of the
/// waveform, in rad/s on omega0.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Ramp {
    pub delta_omega_i: f64,
    pub delta_omega_f: f64,
}

impl Ramp {
    pub fn constant(offset: f64) -> Ramp {
        Ramp { delta_omega_i: offset, delta_omega_f: offset }
    }

    /// Offset at the midpoint of step j out of n.
    pub fn at_step(&self, j: usize, n: usize) -> f64 {
        let frac = (j as f64 + 0.5) / n as f64;
        self.delta_omega_i + (self.delta_omega_f - self.delta_omega_i) * frac
    }
}

/// Everything the propagator needs besides the phases.
#[derive(Debug, Clone)]
pub struct EvalContext {
    pub params: HamiltonianParams,
    pub ramp: Option<Ramp>,
    /// Additive static Hermitian term, e.g. an addressing-field light shift.
    pub extra: Option<CMat>,
}

impl EvalContext {
    pub fn nominal(params: HamiltonianParams) -> Self {
        EvalContext { params, ramp: None, extra: None }
    }

    pub(crate) fn step_params(&self, j: usize, n: usize) -> HamiltonianParams {
        match &self.ramp {
            None => self.params.clone(),
            Some(r) => {
                let d = r.at_step(j, n);
                self.params.with_offsets(d, 0.0, 0.0, 0.0, 0.0, 0.0)
            }
        }
    }

    pub(crate) fn step_hamiltonian(&self, w: &ControlWaveform, j: usize) -> CMat {
        let p = self.step_params(j, w.n_steps());
        let mut h = h_total_mat(&p, w.phi_x[j], w.phi_y[j], w.phi_uw[j]);
        if let Some(extra) = &self.extra {
            h = &h + extra;
        }
        h
    }
}

/// Per-step spectral data shared by the propagator and the gradient.
pub(crate) struct StepDecomposition {
    pub values: ndarray::Array1<f64>,
    pub vectors: CMat,
    pub phases: Vec<Complex64>,
    pub unitary: CMat,
}

pub(crate) fn decompose_step(h: &CMat, dt: f64) -> Result<StepDecomposition, GrapeError> {
    let dec = eigh(h)?;
    let n = dec.values.len();
    let phases: Vec<Complex64> = dec
        .values
        .iter()
        .map(|&w| Complex64::from_polar(1.0, -w * dt))
        .collect();
    let mut scaled = dec.vectors.clone();
    for (j, ph) in phases.iter().enumerate() {
        for i in 0..n {
            scaled[[i, j]] *= *ph;
        }
    }
    let unitary = scaled.dot(&qudit_core::linalg::dagger(&dec.vectors));
    Ok(StepDecomposition { values: dec.values, vectors: dec.vectors, phases, unitary })
}

/// Ordered product U_N ... U_1 of the step propagators.
pub fn propagate(w: &ControlWaveform, ctx: &EvalContext) -> Result<CMat, GrapeError> {
    ctx.params.validate()?;
    let d = 16;
    let mut u: CMat = Array2::eye(d);
    for j in 0..w.n_steps() {
        let h = ctx.step_hamiltonian(w, j);
        let step = decompose_step(&h, w.dt)?;
        u = step.unitary.dot(&u);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qudit_core::linalg::frobenius_norm;

    fn default_ctx() -> EvalContext {
        EvalContext::nominal(HamiltonianParams::default())
    }

    #[test]
    fn empty_waveform_is_identity() {
        let w = ControlWaveform::zeros(4e-6, 0);
        let u = propagate(&w, &default_ctx()).unwrap();
        assert!(frobenius_norm(&(&u - &qudit_core::linalg::identity(16))) < 1e-14);
    }

    #[test]
    fn zero_couplings_give_diagonal_phases() {
        let mut p = HamiltonianParams::default();
        p.omega_x = 0.0;
        p.omega_y = 0.0;
        p.omega_uw = 0.0;
        let ctx = EvalContext::nominal(p);
        let w = ControlWaveform::zeros(4e-6, 3);
        let u = propagate(&w, &ctx).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                if i != j {
                    assert!(u[[i, j]].norm() < 1e-10);
                } else {
                    assert!((u[[i, i]].norm() - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn composition_of_halves() {
        let mut w = ControlWaveform::zeros(4e-6, 10);
        for j in 0..10 {
            w.phi_x[j] = 0.3 * j as f64;
            w.phi_y[j] = -0.1 * j as f64;
            w.phi_uw[j] = 0.05 * j as f64;
        }
        let ctx = default_ctx();
        let full = propagate(&w, &ctx).unwrap();
        let first = ControlWaveform::new(w.dt, w.phi_x[..5].to_vec(), w.phi_y[..5].to_vec(), w.phi_uw[..5].to_vec()).unwrap();
        let second = ControlWaveform::new(w.dt, w.phi_x[5..].to_vec(), w.phi_y[5..].to_vec(), w.phi_uw[5..].to_vec()).unwrap();
        let u1 = propagate(&first, &ctx).unwrap();
        let u2 = propagate(&second, &ctx).unwrap();
        let composed = u2.dot(&u1);
        assert!(frobenius_norm(&(&composed - &full)) < 1e-9);
    }

    #[test]
    fn refinement_invariance() {
        let mut w = ControlWaveform::zeros(4e-6, 6);
        for j in 0..6 {
            w.phi_x[j] = (j as f64).sin();
            w.phi_y[j] = (j as f64).cos();
            w.phi_uw[j] = 0.2;
        }
        let ctx = default_ctx();
        let u1 = propagate(&w, &ctx).unwrap();
        let u2 = propagate(&w.refine_halved(), &ctx).unwrap();
        // Piecewise-constant evolution is exactly represented either way.
        let f = {
            let tr = qudit_core::linalg::trace(&qudit_core::linalg::dagger(&u1).dot(&u2));
            tr.norm_sqr() / (16.0 * 16.0)
        };
        assert!(f > 1.0 - 1e-8, "refinement fidelity {f}");
    }

    #[test]
    fn ramp_shifts_bias() {
        let ramp = Ramp { delta_omega_i: -100.0, delta_omega_f: 100.0 };
        assert!((ramp.at_step(0, 100) + 99.0).abs() < 1e-9);
        assert!((ramp.at_step(99, 100) - 99.0).abs() < 1e-9);
        // A constant ramp equals shifting omega0 directly.
        let w = ControlWaveform::zeros(4e-6, 4);
        let p = HamiltonianParams::default();
        let ctx_ramp = EvalContext {
            params: p.clone(),
            ramp: Some(Ramp::constant(std::f64::consts::TAU * 40.0)),
            extra: None,
        };
        let shifted = p.with_offsets(std::f64::consts::TAU * 40.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let ctx_direct = EvalContext::nominal(shifted);
        let u1 = propagate(&w, &ctx_ramp).unwrap();
        let u2 = propagate(&w, &ctx_direct).unwrap();
        assert!(frobenius_norm(&(&u1 - &u2)) < 1e-9);
    }
}
