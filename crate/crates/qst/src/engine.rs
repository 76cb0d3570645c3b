//! Shared projected-gradient engine over the density-matrix set, with
//! monotone backtracking and optional Nesterov extrapolation. Serves the
//! least-squares and maximum-likelihood objectives; trace minimization uses
//! its own PSD-cone variant in `estimators`.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::linalg::{frobenius_norm, project_density};
use qudit_core::{CMat, CVec};
use serde::{Deserialize, Serialize};

use crate::QstError;

/// Estimator configuration shared by the constrained estimators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Error-threshold parameter for trace minimization (per-outcome RMS by
    /// default; see `EpsilonMode`).
    pub epsilon: f64,
    pub max_iters: usize,
    /// Stationarity tolerance on the projected-gradient mapping.
    pub tol: f64,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { epsilon: 0.0, max_iters: 5000, tol: 1e-9, seed: 0 }
    }
}

/// Reconstruction output with solver diagnostics.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub rho: CMat,
    pub objective: f64,
    pub iterations: usize,
    /// Norm of the projected-gradient mapping at exit.
    pub stationarity: f64,
    pub converged: bool,
}

/// Elements paired with observed frequencies, flattened over settings.
pub(crate) struct FlatData {
    pub kets: Vec<CVec>,
    pub freqs: Vec<f64>,
    pub dim: usize,
}

impl FlatData {
    pub fn new(
        frequencies: &[Vec<f64>],
        construction: &qudit_povm::PovmConstruction,
    ) -> Result<FlatData, QstError> {
        if frequencies.len() != construction.n_settings() {
            return Err(QstError::Mismatch(format!(
                "record has {} settings, construction {}",
                frequencies.len(),
                construction.n_settings()
            )));
        }
        let mut kets = Vec::new();
        let mut freqs = Vec::new();
        for (s, setting) in construction.settings.iter().enumerate() {
            // Records from embedded measurements may carry extra completion
            // outcomes beyond the construction's elements; ignore them.
            if frequencies[s].len() < setting.len() {
                return Err(QstError::Mismatch(format!(
                    "setting {s}: record has {} outcomes, construction needs {}",
                    frequencies[s].len(),
                    setting.len()
                )));
            }
            for (e, &f) in setting.iter().zip(frequencies[s].iter()) {
                kets.push(e.ket.clone());
                freqs.push(f);
            }
        }
        Ok(FlatData { kets, freqs, dim: construction.dim })
    }

    pub fn probabilities(&self, rho: &CMat) -> Vec<f64> {
        let d = self.dim;
        self.kets
            .iter()
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..d {
                    let mut row = Complex64::new(0.0, 0.0);
                    for j in 0..d {
                        row += rho[[i, j]] * k[j];
                    }
                    acc += k[i].conj() * row;
                }
                acc.re
            })
            .collect()
    }

    /// sum_a coeff_a |k_a><k_a| for per-element coefficients.
    pub fn weighted_sum(&self, coeffs: &[f64]) -> CMat {
        let d = self.dim;
        let mut m: CMat = Array2::zeros((d, d));
        for (k, &c) in self.kets.iter().zip(coeffs.iter()) {
            if c == 0.0 {
                continue;
            }
            let cc = Complex64::new(c, 0.0);
            for i in 0..d {
                let ki = k[i] * cc;
                for j in 0..d {
                    m[[i, j]] += ki * k[j].conj();
                }
            }
        }
        m
    }
}

/// Minimize a convex objective over density matrices by monotone projected
/// gradient with Nesterov extrapolation (falling back to the plain step
/// whenever extrapolation would increase the objective).
pub(crate) fn minimize_over_densities(
    data: &FlatData,
    objective: &dyn Fn(&[f64]) -> f64,
    gradient_coeffs: &dyn Fn(&[f64]) -> Vec<f64>,
    cfg: &EstimatorConfig,
) -> Result<Estimate, QstError> {
    let d = data.dim;
    let mut rho: CMat = Array2::eye(d).mapv(|z: Complex64| z / d as f64);
    let mut p = data.probabilities(&rho);
    let mut obj = objective(&p);
    let mut momentum: Option<CMat> = None;
    let mut t_k = 1.0f64;
    let mut step = 1.0f64;
    let mut stationarity = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0usize;

    while iterations < cfg.max_iters {
        iterations += 1;
        // Extrapolated point (monotone safeguard below).
        let y = match &momentum {
            Some(prev) => {
                let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_k * t_k).sqrt());
                let beta = (t_k - 1.0) / t_next;
                t_k = t_next;
                let ex = &rho + &(&rho - prev).mapv(|z| z * beta);
                ex
            }
            None => rho.clone(),
        };
        let py = data.probabilities(&y);
        let gy = data.weighted_sum(&gradient_coeffs(&py));

        let mut accepted = false;
        let mut trial_from_y = true;
        for _attempt in 0..60 {
            let base = if trial_from_y { &y } else { &rho };
            let gbase = if trial_from_y {
                gy.clone()
            } else {
                data.weighted_sum(&gradient_coeffs(&p))
            };
            let cand = project_density(&(base - &gbase.mapv(|z| z * step)))?;
            let pc = data.probabilities(&cand);
            let oc = objective(&pc);
            if oc <= obj + 1e-18 {
                // Projected-gradient mapping norm for the stop rule.
                stationarity = frobenius_norm(&(&cand - base)) / step.max(1e-30);
                momentum = Some(rho.clone());
                rho = cand;
                p = pc;
                let improved = obj - oc;
                obj = oc;
                step = (step * 1.4).min(1e12);
                accepted = true;
                if stationarity < cfg.tol || improved.abs() < 1e-18 {
                    converged = stationarity < cfg.tol;
                }
                break;
            }
            if trial_from_y {
                // Extrapolation overshoots; restart momentum and retry from
                // the current iterate at the same step.
                trial_from_y = false;
                momentum = None;
                t_k = 1.0;
                continue;
            }
            step *= 0.4;
            if step < 1e-18 {
                break;
            }
        }
        if !accepted {
            break;
        }
        if converged {
            break;
        }
    }

    // Rank-1 polish: flat-POVM problems condition badly near pure optima, so
    // try a pure-state descent seeded at the dominant eigenvector and keep
    // it when it reaches a lower objective. This is a restart heuristic for
    // the same convex program; mixed optima reject it automatically.
    if let Some(better) = pure_polish(data, objective, gradient_coeffs, &rho, obj)? {
        let pb = data.probabilities(&better);
        let ob = objective(&pb);
        if ob < obj {
            rho = better;
            obj = ob;
        }
    }
    Ok(Estimate { rho, objective: obj, iterations, stationarity, converged })
}

/// Riemannian descent over pure states for the same objective; returns a
/// candidate density when it beats `obj_now`.
fn pure_polish(
    data: &FlatData,
    objective: &dyn Fn(&[f64]) -> f64,
    gradient_coeffs: &dyn Fn(&[f64]) -> Vec<f64>,
    rho: &CMat,
    obj_now: f64,
) -> Result<Option<CMat>, QstError> {
    let d = data.dim;
    let dec = qudit_core::linalg::eigh(rho)?;
    let mut psi: CVec = ndarray::Array1::zeros(d);
    for i in 0..d {
        psi[i] = dec.vectors[[i, d - 1]];
    }
    let rho_of = |v: &CVec| -> CMat {
        let mut m: CMat = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = v[i] * v[j].conj();
            }
        }
        m
    };
    let mut cur = objective(&data.probabilities(&rho_of(&psi)));
    let mut step = 0.1;
    for _ in 0..4000 {
        let p = data.probabilities(&rho_of(&psi));
        let coeffs = gradient_coeffs(&p);
        let gmat = data.weighted_sum(&coeffs);
        let grad = gmat.dot(&psi);
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial: CVec = (&psi - &grad.mapv(|z| z * step)).to_owned();
            let n: f64 = trial.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n <= 0.0 {
                break;
            }
            trial.mapv_inplace(|z| z / n);
            let ot = objective(&data.probabilities(&rho_of(&trial)));
            if ot < cur {
                psi = trial;
                cur = ot;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || cur < 1e-26 {
            break;
        }
    }
    if cur < obj_now {
        Ok(Some(rho_of(&psi)))
    } else {
        Ok(None)
    }
}
