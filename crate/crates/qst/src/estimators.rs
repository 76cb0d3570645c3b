//! The four reconstruction routes: linear inversion (unconstrained),
//! least squares and maximum likelihood over the density set, and
//! compressed-sensing trace minimization over the PSD cone.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::linalg::{project_psd, solve_spd, trace};
use qudit_core::opbasis;
use qudit_core::CMat;
use qudit_povm::PovmConstruction;
use serde::{Deserialize, Serialize};

use crate::engine::{minimize_over_densities, Estimate, EstimatorConfig, FlatData};
use crate::QstError;

/// How the trace-minimization misfit bound is derived from epsilon.
///
/// The calibration defines epsilon as a per-outcome RMS deviation, so the
/// default bound on the summed squared misfit is n_outcomes * epsilon^2.
/// The literal readings of the printed program (bare sum bounded by epsilon,
/// or an l2-norm bound) are kept behind this switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonMode {
    RmsPerOutcome,
    SumSquared,
    L2Norm,
}

impl EpsilonMode {
    pub fn bound(self, epsilon: f64, n_outcomes: usize) -> f64 {
        match self {
            EpsilonMode::RmsPerOutcome => (n_outcomes as f64) * epsilon * epsilon,
            EpsilonMode::SumSquared => epsilon,
            EpsilonMode::L2Norm => epsilon * epsilon,
        }
    }
}

/// Unconstrained least-squares inversion over Hermitian unit-trace matrices.
/// The output may carry negative eigenvalues; that is the point of the
/// comparison with the constrained estimators.
pub fn linear_inversion(
    frequencies: &[Vec<f64>],
    construction: &PovmConstruction,
) -> Result<CMat, QstError> {
    let data = FlatData::new(frequencies, construction)?;
    let d = data.dim;
    let basis = opbasis::hermitian_basis(d);
    let n = data.kets.len();
    // A[a, k] = Tr(E_a U_k), real by Hermiticity.
    let mut a = Array2::<f64>::zeros((n, d * d));
    for (row, ket) in data.kets.iter().enumerate() {
        for (col, u) in basis.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    s += u[[i, j]] * ket[j];
                }
                acc += ket[i].conj() * s;
            }
            a[[row, col]] = acc.re;
        }
    }
    // Rank check over the full coefficient space.
    let cols = d * d;
    let mut gram = Array2::<f64>::zeros((cols, cols));
    for i in 0..cols {
        for j in 0..cols {
            gram[[i, j]] = (0..n).map(|r| a[[r, i]] * a[[r, j]]).sum();
        }
    }
    let gram_c = gram.mapv(|x| Complex64::new(x, 0.0));
    let dec = qudit_core::linalg::eigh(&gram_c)?;
    let top = dec.values.iter().cloned().fold(0.0f64, f64::max);
    let rank = dec.values.iter().filter(|&&w| w > 1e-10 * top).count();
    if rank < cols {
        return Err(QstError::RankDeficient { rank, needed: cols });
    }
    // Fix the trace coefficient (U_0 = I/sqrt(d)) and solve for the rest.
    let c0 = 1.0 / (d as f64).sqrt();
    let rhs: Vec<f64> = (1..cols)
        .map(|k| {
            (0..n)
                .map(|r| a[[r, k]] * (data.freqs[r] - a[[r, 0]] * c0))
                .sum()
        })
        .collect();
    let mut sub = Array2::<f64>::zeros((cols - 1, cols - 1));
    for i in 1..cols {
        for j in 1..cols {
            sub[[i - 1, j - 1]] = gram[[i, j]];
        }
    }
    let solved = solve_spd(&sub, &rhs)?;
    let mut coeffs = vec![c0];
    coeffs.extend(solved);
    Ok(opbasis::from_coefficients(&coeffs, &basis))
}

/// Constrained least squares over the density set.
pub fn least_squares(
    frequencies: &[Vec<f64>],
    construction: &PovmConstruction,
    cfg: &EstimatorConfig,
) -> Result<Estimate, QstError> {
    let data = FlatData::new(frequencies, construction)?;
    let freqs = data.freqs.clone();
    let objective = move |p: &[f64]| -> f64 {
        p.iter().zip(freqs.iter()).map(|(pi, fi)| (pi - fi) * (pi - fi)).sum()
    };
    let freqs2 = data.freqs.clone();
    let grad = move |p: &[f64]| -> Vec<f64> {
        p.iter().zip(freqs2.iter()).map(|(pi, fi)| 2.0 * (pi - fi)).collect()
    };
    minimize_over_densities(&data, &objective, &grad, cfg)
}

/// Maximum likelihood over the density set: minimizes the negative
/// log-likelihood -sum f log Tr(E rho). Negative frequencies (raw-mode
/// records) are clipped to zero for the logarithm.
pub fn max_likelihood(
    frequencies: &[Vec<f64>],
    construction: &PovmConstruction,
    cfg: &EstimatorConfig,
) -> Result<Estimate, QstError> {
    let data = FlatData::new(frequencies, construction)?;
    let weights: Vec<f64> = data.freqs.iter().map(|&f| f.max(0.0)).collect();
    let w1 = weights.clone();
    let objective = move |p: &[f64]| -> f64 {
        p.iter()
            .zip(w1.iter())
            .map(|(pi, fi)| if *fi > 0.0 { -fi * pi.max(1e-12).ln() } else { 0.0 })
            .sum()
    };
    let w2 = weights;
    let grad = move |p: &[f64]| -> Vec<f64> {
        p.iter()
            .zip(w2.iter())
            .map(|(pi, fi)| if *fi > 0.0 { -fi / pi.max(1e-12) } else { 0.0 })
            .collect()
    };
    minimize_over_densities(&data, &objective, &grad, cfg)
}

/// Trace-minimization output, before and after renormalization.
#[derive(Debug, Clone)]
pub struct TraceMinOutcome {
    pub rho: CMat,
    pub raw_trace: f64,
    /// Summed squared misfit at the solution.
    pub misfit: f64,
    pub bound: f64,
    pub iterations: usize,
}

/// Compressed-sensing estimator: minimize Tr(X) over PSD X with the summed
/// squared misfit bounded. Infeasible bounds produce an explicit error. The
/// final estimate is renormalized to unit trace.
pub fn trace_min(
    frequencies: &[Vec<f64>],
    construction: &PovmConstruction,
    cfg: &EstimatorConfig,
    mode: EpsilonMode,
) -> Result<TraceMinOutcome, QstError> {
    if cfg.epsilon <= 0.0 {
        return Err(QstError::InvalidConfig(
            "trace minimization requires epsilon > 0".into(),
        ));
    }
    let data = FlatData::new(frequencies, construction)?;
    let d = data.dim;
    let bound = mode.bound(cfg.epsilon, data.kets.len());
    let misfit_of = |p: &[f64]| -> f64 {
        p.iter()
            .zip(data.freqs.iter())
            .map(|(pi, fi)| (pi - fi) * (pi - fi))
            .sum()
    };

    // Stage 1: feasibility. Minimize the misfit alone over the PSD cone.
    let mut x: CMat = Array2::eye(d).mapv(|z: Complex64| z / d as f64);
    let mut p = data.probabilities(&x);
    let mut g = misfit_of(&p);
    let mut step = 0.5;
    let mut iterations = 0usize;
    for _ in 0..cfg.max_iters {
        if g <= 0.8 * bound {
            break;
        }
        iterations += 1;
        let coeffs: Vec<f64> = p
            .iter()
            .zip(data.freqs.iter())
            .map(|(pi, fi)| 2.0 * (pi - fi))
            .collect();
        let grad = data.weighted_sum(&coeffs);
        let mut accepted = false;
        for _ in 0..50 {
            let cand = project_psd(&(&x - &grad.mapv(|z| z * step)))?;
            let pc = data.probabilities(&cand);
            let gc = misfit_of(&pc);
            if gc < g {
                x = cand;
                p = pc;
                g = gc;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.4;
            if step < 1e-18 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    if g > bound {
        return Err(QstError::TmInfeasible { best_misfit: g, bound });
    }

    // Stage 2: exact-penalty continuation on Tr X + mu max(0, g - B)^2.
    let mut mu = 1.0 / bound.max(1e-18);
    let tol_active = 1e-8 * bound.max(1e-30);
    for _stage in 0..40 {
        let penalty = |tr: f64, g: f64| tr + mu * (g - bound).max(0.0).powi(2);
        let mut obj = penalty(trace(&x).re, g);
        let mut step = 1.0 / mu.max(1.0);
        for _ in 0..cfg.max_iters {
            iterations += 1;
            let excess = (g - bound).max(0.0);
            let mut grad = data.weighted_sum(
                &p.iter()
                    .zip(data.freqs.iter())
                    .map(|(pi, fi)| 2.0 * mu * 2.0 * excess * (pi - fi))
                    .collect::<Vec<_>>(),
            );
            for i in 0..d {
                grad[[i, i]] += Complex64::new(1.0, 0.0);
            }
            let mut accepted = false;
            for _ in 0..60 {
                let cand = project_psd(&(&x - &grad.mapv(|z| z * step)))?;
                let pc = data.probabilities(&cand);
                let gc = misfit_of(&pc);
                let oc = penalty(trace(&cand).re, gc);
                if oc < obj - 1e-16 {
                    x = cand;
                    p = pc;
                    g = gc;
                    obj = oc;
                    step *= 1.5;
                    accepted = true;
                    break;
                }
                step *= 0.4;
                if step < 1e-20 {
                    break;
                }
            }
            if !accepted {
                break;
            }
        }
        let excess = (g - bound).max(0.0);
        if excess <= tol_active {
            break;
        }
        mu *= 10.0;
    }

    let raw_trace = trace(&x).re;
    let rho = if raw_trace > 1e-12 {
        x.mapv(|z| z / raw_trace)
    } else {
        Array2::eye(d).mapv(|z: Complex64| z / d as f64)
    };
    Ok(TraceMinOutcome { rho, raw_trace, misfit: g, bound, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qudit_core::fidelity::state_fidelity_mat;
    use qudit_core::haar_random_state;
    use qudit_povm::{mub, psi};

    fn exact_frequencies(c: &PovmConstruction, rho: &CMat) -> Vec<Vec<f64>> {
        c.settings
            .iter()
            .map(|s| s.iter().map(|e| e.probability(rho)).collect())
            .collect()
    }

    #[test]
    fn pauli_linear_inversion_closed_form() {
        // d = 2 record from the three Pauli bases reproduces the closed-form
        // entries rho = (I + <sx> sx + <sy> sy + <sz> sz)/2.
        let c = mub(2).unwrap();
        let psi_state = haar_random_state(2, 3).unwrap();
        let rho = psi_state.projector();
        let freqs = exact_frequencies(&c, &rho);
        let est = linear_inversion(&freqs, &c).unwrap();
        assert!(qudit_core::linalg::frobenius_norm(&(&est - &rho)) < 1e-10);
        // Closed form from expectation values of the second and third bases
        // (x- and y-like) and the logical basis (z).
        let sz = freqs[0][0] - freqs[0][1];
        assert!((est[[0, 0]].re - 0.5 * (1.0 + sz)).abs() < 1e-10);
    }

    #[test]
    fn noiseless_inversion_recovers_any_state() {
        let c = mub(4).unwrap();
        for seed in 0..3 {
            let s = haar_random_state(4, 100 + seed).unwrap();
            let rho = s.projector();
            let freqs = exact_frequencies(&c, &rho);
            let est = linear_inversion(&freqs, &c).unwrap();
            assert!(qudit_core::linalg::frobenius_norm(&(&est - &rho)) < 1e-10);
        }
    }

    #[test]
    fn perturbed_record_goes_negative_ls_repairs() {
        let c = mub(4).unwrap();
        let s = haar_random_state(4, 7).unwrap();
        let rho = s.projector();
        let mut freqs = exact_frequencies(&c, &rho);
        freqs[1][0] -= 0.02;
        let li = linear_inversion(&freqs, &c).unwrap();
        let dec = qudit_core::linalg::eigh(&li).unwrap();
        let min_eig = dec.values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min_eig < -1e-4, "linear inversion should go negative, got {min_eig}");

        let cfg = EstimatorConfig::default();
        let ls = least_squares(&freqs, &c, &cfg).unwrap();
        let dec2 = qudit_core::linalg::eigh(&ls.rho).unwrap();
        let min2 = dec2.values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min2 > -1e-9);
        let tr = qudit_core::linalg::trace(&ls.rho).re;
        assert!((tr - 1.0).abs() < 1e-9);
    }

    #[test]
    fn noiseless_ls_ml_recover_truth() {
        let c = mub(4).unwrap();
        let s = haar_random_state(4, 11).unwrap();
        let rho = s.projector();
        let freqs = exact_frequencies(&c, &rho);
        let cfg = EstimatorConfig::default();
        for est in [
            least_squares(&freqs, &c, &cfg).unwrap(),
            max_likelihood(&freqs, &c, &cfg).unwrap(),
        ] {
            let f = state_fidelity_mat(&est.rho, &rho).unwrap();
            assert!(1.0 - f < 1e-6, "infidelity {}", 1.0 - f);
        }
    }

    #[test]
    fn ml_uniform_logical_record_is_maximally_mixed_diagonal() {
        let c = qudit_povm::construction::logical_basis(4);
        let freqs = vec![vec![0.25; 4]];
        let cfg = EstimatorConfig::default();
        let est = max_likelihood(&freqs, &c, &cfg).unwrap();
        for i in 0..4 {
            assert!((est.rho[[i, i]].re - 0.25).abs() < 1e-6);
        }
    }

    #[test]
    fn ls_ml_agree_at_low_noise() {
        let c = mub(4).unwrap();
        let s = haar_random_state(4, 13).unwrap();
        let rho = s.projector();
        let mut freqs = exact_frequencies(&c, &rho);
        let mut rng_state = 0x12345u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng_state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for s in freqs.iter_mut() {
            for f in s.iter_mut() {
                *f = (*f + 0.004 * next()).clamp(0.0, 1.0);
            }
        }
        let cfg = EstimatorConfig::default();
        let ls = least_squares(&freqs, &c, &cfg).unwrap();
        let ml = max_likelihood(&freqs, &c, &cfg).unwrap();
        let f = state_fidelity_mat(&ls.rho, &ml.rho).unwrap();
        assert!(1.0 - f < 5e-3, "LS/ML disagreement {}", 1.0 - f);
    }

    #[test]
    fn trace_min_noiseless_band() {
        let c = mub(4).unwrap();
        let s = haar_random_state(4, 17).unwrap();
        let rho = s.projector();
        let freqs = exact_frequencies(&c, &rho);
        let cfg = EstimatorConfig { epsilon: 1e-4, ..Default::default() };
        let out = trace_min(&freqs, &c, &cfg, EpsilonMode::RmsPerOutcome).unwrap();
        let f = state_fidelity_mat(&out.rho, &rho).unwrap();
        assert!(1.0 - f < 1e-3, "infidelity {}", 1.0 - f);
    }

    #[test]
    fn trace_min_huge_epsilon_collapses_trace() {
        let c = mub(4).unwrap();
        let s = haar_random_state(4, 19).unwrap();
        let rho = s.projector();
        let freqs = exact_frequencies(&c, &rho);
        let cfg = EstimatorConfig { epsilon: 10.0, ..Default::default() };
        let out = trace_min(&freqs, &c, &cfg, EpsilonMode::RmsPerOutcome).unwrap();
        assert!(out.raw_trace < 1e-6, "raw trace {}", out.raw_trace);
    }

    #[test]
    fn trace_min_infeasible_reports() {
        let c = mub(4).unwrap();
        let s = haar_random_state(4, 23).unwrap();
        let rho = s.projector();
        let mut freqs = exact_frequencies(&c, &rho);
        // Corrupt one setting so no PSD state can match that well.
        for f in freqs[0].iter_mut() {
            *f = 0.9;
        }
        let cfg = EstimatorConfig { epsilon: 1e-6, ..Default::default() };
        match trace_min(&freqs, &c, &cfg, EpsilonMode::RmsPerOutcome) {
            Err(QstError::TmInfeasible { best_misfit, bound }) => {
                assert!(best_misfit > bound);
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn psi_neumark_record_round_trip() {
        // Subspace construction reconstruction from its own exact record.
        let c = psi(4).unwrap();
        let s = haar_random_state(4, 29).unwrap();
        let rho = s.projector();
        let freqs = exact_frequencies(&c, &rho);
        let cfg = EstimatorConfig::default();
        let est = least_squares(&freqs, &c, &cfg).unwrap();
        let f = state_fidelity_mat(&est.rho, &rho).unwrap();
        assert!(1.0 - f < 1e-6, "infidelity {}", 1.0 - f);
    }

    #[test]
    fn estimators_always_return_physical_states() {
        // Fuzzing with adversarial records, including negative entries.
        let c = mub(4).unwrap();
        let mut rng_state = 42u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 33) as f64 / (1u64 << 31) as f64
        };
        let cfg = EstimatorConfig { max_iters: 800, ..Default::default() };
        for _case in 0..25 {
            let freqs: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..4).map(|_| next() * 1.2 - 0.1).collect())
                .collect();
            for est in [
                least_squares(&freqs, &c, &cfg).unwrap(),
                max_likelihood(&freqs, &c, &cfg).unwrap(),
            ] {
                let dec = qudit_core::linalg::eigh(&est.rho).unwrap();
                let min_eig = dec.values.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(min_eig > -1e-9, "negative eigenvalue {min_eig}");
                let tr = qudit_core::linalg::trace(&est.rho).re;
                assert!((tr - 1.0).abs() < 1e-9);
            }
        }
    }
}
