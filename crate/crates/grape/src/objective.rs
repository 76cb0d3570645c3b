//! Objectives for the ascent loop: single-model task fidelity, weighted
//! robustness averages over parameter draws, and the two-branch
//! inhomogeneous (light-shift addressed) cost.

use rayon::prelude::*;

use crate::gradient::{cost, gradient};
use crate::propagate::EvalContext;
use crate::task::ControlTask;
use crate::waveform::ControlWaveform;
use crate::GrapeError;

/// A differentiable figure of merit over waveforms, normalized to [0, 1].
pub trait Objective: Sync {
    fn evaluate(&self, w: &ControlWaveform) -> Result<(f64, Vec<f64>), GrapeError>;
    fn value(&self, w: &ControlWaveform) -> Result<f64, GrapeError>;
    /// Parameter floor used for the under-parameterization warning.
    fn parameter_floor(&self) -> usize;
}

/// Plain task fidelity under one Hamiltonian model.
pub struct TaskObjective {
    pub task: ControlTask,
    pub ctx: EvalContext,
}

impl Objective for TaskObjective {
    fn evaluate(&self, w: &ControlWaveform) -> Result<(f64, Vec<f64>), GrapeError> {
        let rep = gradient(w, &self.task, &self.ctx)?;
        Ok((rep.fidelity, rep.gradient))
    }

    fn value(&self, w: &ControlWaveform) -> Result<f64, GrapeError> {
        cost(w, &self.task, &self.ctx)
    }

    fn parameter_floor(&self) -> usize {
        self.task.parameter_floor()
    }
}

/// Weighted sample set for robustness averaging. Weights must be positive
/// and sum to one.
#[derive(Debug, Clone)]
pub struct RobustnessSpec {
    pub samples: Vec<(EvalContext, f64)>,
}

impl RobustnessSpec {
    pub fn validate(&self) -> Result<(), GrapeError> {
        if self.samples.is_empty() {
            return Err(GrapeError::TaskMismatch("robustness spec has no samples".into()));
        }
        let mut sum = 0.0;
        for (_, w) in &self.samples {
            if *w <= 0.0 {
                return Err(GrapeError::TaskMismatch("robustness weights must be positive".into()));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(GrapeError::TaskMismatch(format!(
                "robustness weights sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    /// The four-point static/dynamic design used for robust unitaries:
    /// two static bias offsets of +-`static_offset` and two linear ramps
    /// from -+`ramp_offset` to +-`ramp_offset` (rad/s), equally weighted.
    pub fn four_point(params: &qudit_hamiltonian::HamiltonianParams, static_offset: f64, ramp_offset: f64) -> RobustnessSpec {
        use crate::propagate::Ramp;
        let mk = |ri: f64, rf: f64| EvalContext {
            params: params.clone(),
            ramp: Some(Ramp { delta_omega_i: ri, delta_omega_f: rf }),
            extra: None,
        };
        RobustnessSpec {
            samples: vec![
                (mk(static_offset, static_offset), 0.25),
                (mk(-static_offset, -static_offset), 0.25),
                (mk(ramp_offset, -ramp_offset), 0.25),
                (mk(-ramp_offset, ramp_offset), 0.25),
            ],
        }
    }
}

/// Average fidelity over the sample set; the gradient is the matching
/// weighted sum, evaluated on the same fixed samples (no resampling).
pub struct RobustObjective {
    pub task: ControlTask,
    pub spec: RobustnessSpec,
}

impl Objective for RobustObjective {
    fn evaluate(&self, w: &ControlWaveform) -> Result<(f64, Vec<f64>), GrapeError> {
        self.spec.validate()?;
        let parts: Result<Vec<(f64, Vec<f64>, f64)>, GrapeError> = self
            .spec
            .samples
            .par_iter()
            .map(|(ctx, weight)| {
                let rep = gradient(w, &self.task, ctx)?;
                Ok((rep.fidelity, rep.gradient, *weight))
            })
            .collect();
        let parts = parts?;
        let n = w.parameter_count();
        let mut f = 0.0;
        let mut g = vec![0.0; n];
        for (fi, gi, wt) in parts {
            f += wt * fi;
            for (acc, v) in g.iter_mut().zip(gi.iter()) {
                *acc += wt * v;
            }
        }
        Ok((f, g))
    }

    fn value(&self, w: &ControlWaveform) -> Result<f64, GrapeError> {
        self.spec.validate()?;
        let vals: Result<Vec<f64>, GrapeError> = self
            .spec
            .samples
            .par_iter()
            .map(|(ctx, weight)| Ok(weight * cost(w, &self.task, ctx)?))
            .collect();
        Ok(vals?.iter().sum())
    }

    fn parameter_floor(&self) -> usize {
        self.task.parameter_floor()
    }
}

/// Two-branch inhomogeneous cost: one waveform must realize `task_on` for
/// atoms seeing the addressing light shift (`ctx_on`) and `task_off` for
/// unaddressed atoms (`ctx_off`). The raw value is the sum of the two
/// fidelities (max 2); `normalized` reports it divided by 2.
pub struct InhomogeneousObjective {
    pub task_on: ControlTask,
    pub ctx_on: EvalContext,
    pub task_off: ControlTask,
    pub ctx_off: EvalContext,
}

impl InhomogeneousObjective {
    pub fn raw(&self, w: &ControlWaveform) -> Result<f64, GrapeError> {
        Ok(cost(w, &self.task_on, &self.ctx_on)? + cost(w, &self.task_off, &self.ctx_off)?)
    }

    pub fn normalized(&self, w: &ControlWaveform) -> Result<f64, GrapeError> {
        Ok(self.raw(w)? / 2.0)
    }
}

impl Objective for InhomogeneousObjective {
    fn evaluate(&self, w: &ControlWaveform) -> Result<(f64, Vec<f64>), GrapeError> {
        let branches = [(&self.task_on, &self.ctx_on), (&self.task_off, &self.ctx_off)];
        let parts: Result<Vec<(f64, Vec<f64>)>, GrapeError> = branches
            .par_iter()
            .map(|(task, ctx)| {
                let rep = gradient(w, task, ctx)?;
                Ok((rep.fidelity, rep.gradient))
            })
            .collect();
        let parts = parts?;
        let n = w.parameter_count();
        let mut f = 0.0;
        let mut g = vec![0.0; n];
        for (fi, gi) in parts {
            f += fi / 2.0;
            for (acc, v) in g.iter_mut().zip(gi.iter()) {
                *acc += v / 2.0;
            }
        }
        Ok((f, g))
    }

    fn value(&self, w: &ControlWaveform) -> Result<f64, GrapeError> {
        self.normalized(w)
    }

    fn parameter_floor(&self) -> usize {
        self.task_on.parameter_floor() + self.task_off.parameter_floor()
    }
}
