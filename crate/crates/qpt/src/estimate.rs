//! CP+TP-constrained least-squares process estimation by projected gradient
//! with Dykstra's alternating projections onto the PSD cone and the
//! trace-preservation affine subspace (in Choi coordinates, where both
//! projections are exact and cheap).

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::linalg::{eigh, frobenius_norm};
use qudit_core::{CMat, Ket};
use qudit_povm::PovmConstruction;
use serde::{Deserialize, Serialize};

use crate::process::{choi_trace_out, ProcessMatrix};
use crate::QptError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QptConfig {
    pub max_iters: usize,
    pub tol: f64,
    /// Dykstra iterations per projection.
    pub dykstra_iters: usize,
}

impl Default for QptConfig {
    fn default() -> Self {
        QptConfig { max_iters: 1500, tol: 1e-10, dykstra_iters: 120 }
    }
}

#[derive(Debug)]
pub struct ProcessEstimate {
    pub chi: ProcessMatrix,
    pub objective: f64,
    pub iterations: usize,
    pub stationarity: f64,
    pub cp_violation: f64,
    pub tp_violation: f64,
    pub converged: bool,
}

fn project_psd_inplace(j: &CMat) -> Result<CMat, QptError> {
    let dec = eigh(j)?;
    Ok(dec.map_spectrum(|w| Complex64::new(w.max(0.0), 0.0)))
}

fn project_tp(j: &CMat, d: usize) -> CMat {
    // J - (1/d) I (x) (Tr_out J - I).
    let t = choi_trace_out(j, d);
    let mut out = j.clone();
    for b in 0..d {
        for dd in 0..d {
            let delta = (t[[b, dd]]
                - if b == dd { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
                / d as f64;
            for a in 0..d {
                out[[a * d + b, a * d + dd]] -= delta;
            }
        }
    }
    out
}

/// Dykstra's algorithm for the metric projection onto CP (PSD cone)
/// intersected with TP (affine subspace). Returns the cone-side iterate, so
/// the output is exactly PSD and trace preserving up to the convergence
/// tolerance; every objective evaluation in the solver happens at such
/// points, keeping line-search comparisons consistent.
fn project_cptp(j0: &CMat, d: usize, max_iters: usize) -> Result<CMat, QptError> {
    let n = d * d;
    let scale = frobenius_norm(j0).max(1.0);
    let mut x = j0.clone();
    let mut p: CMat = Array2::zeros((n, n));
    let mut q: CMat = Array2::zeros((n, n));
    let mut y_last: CMat = Array2::zeros((n, n));
    for it in 0..max_iters {
        let y = project_psd_inplace(&(&x + &p))?;
        p = &(&x + &p) - &y;
        let x_next = project_tp(&(&y + &q), d);
        q = &(&y + &q) - &x_next;
        let drift = frobenius_norm(&(&x_next - &y));
        x = x_next;
        y_last = y;
        if it > 2 && drift < 1e-10 * scale {
            break;
        }
    }
    Ok(y_last)
}

struct ProbeBlock {
    /// conj(rho_j) for the Kronecker gradient assembly.
    rho_conj: CMat,
    /// Element kets of every (setting, outcome) kept, flattened.
    kets: Vec<qudit_core::CVec>,
    freqs: Vec<f64>,
}

/// Measurement model in the factorized Choi form: predictions are Born
/// probabilities of the output states W[rho_j], and the objective gradient
/// assembles as sum_j G_j (x) conj(rho_j) with G_j a d x d residual matrix.
/// No d^2 x d^2 object is ever formed per data point, which is what keeps
/// the 16-dimensional problem tractable.
struct FlatModel {
    blocks: Vec<ProbeBlock>,
    dim: usize,
}

impl FlatModel {
    /// Output state W[rho_j] from the Choi matrix:
    /// W_{ac} = sum_{bd} J[(ab),(cd)] rho_{bd}.
    fn output_state(&self, j: &CMat, block: &ProbeBlock) -> CMat {
        let d = self.dim;
        let mut out: CMat = Array2::zeros((d, d));
        for a in 0..d {
            for c in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..d {
                    let row = a * d + b;
                    for dd in 0..d {
                        acc += j[[row, c * d + dd]] * block.rho_conj[[b, dd]].conj();
                    }
                }
                out[[a, c]] = acc;
            }
        }
        out
    }

    fn predictions(&self, j: &CMat) -> Vec<f64> {
        let d = self.dim;
        let mut p = Vec::new();
        for block in &self.blocks {
            let m = self.output_state(j, block);
            for k in &block.kets {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..d {
                    let mut row = Complex64::new(0.0, 0.0);
                    for jj in 0..d {
                        row += m[[i, jj]] * k[jj];
                    }
                    acc += k[i].conj() * row;
                }
                p.push(acc.re);
            }
        }
        p
    }

    fn objective(&self, p: &[f64]) -> f64 {
        let mut obj = 0.0;
        let mut idx = 0;
        for block in &self.blocks {
            for &f in &block.freqs {
                let r = p[idx] - f;
                obj += r * r;
                idx += 1;
            }
        }
        obj
    }

    /// Gradient sum_l 2 (p_l - f_l) h_l h_l^dag with h = vec(e psi^dag):
    /// grad[(ab),(cd)] = sum_j (G_j)_{ac} conj(rho_j)_{bd},
    /// G_j = sum_l 2 (p - f) e e^dag.
    fn gradient(&self, p: &[f64]) -> CMat {
        let d = self.dim;
        let n = d * d;
        let mut grad: CMat = Array2::zeros((n, n));
        let mut idx = 0;
        for block in &self.blocks {
            let mut g: CMat = Array2::zeros((d, d));
            for (k, &f) in block.kets.iter().zip(block.freqs.iter()) {
                let coef = 2.0 * (p[idx] - f);
                idx += 1;
                if coef == 0.0 {
                    continue;
                }
                for a in 0..d {
                    let ka = k[a] * coef;
                    for c in 0..d {
                        g[[a, c]] += ka * k[c].conj();
                    }
                }
            }
            for a in 0..d {
                for b in 0..d {
                    let row = a * d + b;
                    for c in 0..d {
                        let gac = g[[a, c]];
                        if gac == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for dd in 0..d {
                            grad[[row, c * d + dd]] += gac * block.rho_conj[[b, dd]];
                        }
                    }
                }
            }
        }
        grad
    }
}

/// Estimate the process matrix from frequencies f[probe][setting][outcome].
///
/// Minimizes the summed squared misfit subject to complete positivity and
/// trace preservation; contradictory records are not rejected, the convex
/// optimum plus residual is the answer.
pub fn estimate_process(
    frequencies: &[Vec<Vec<f64>>],
    probes: &[Ket],
    construction: &PovmConstruction,
    cfg: &QptConfig,
) -> Result<ProcessEstimate, QptError> {
    let d = construction.dim;
    if frequencies.len() != probes.len() {
        return Err(QptError::Mismatch(format!(
            "{} probes but {} frequency blocks",
            probes.len(),
            frequencies.len()
        )));
    }
    let mut blocks = Vec::new();
    for (pi, probe_block) in frequencies.iter().enumerate() {
        if probe_block.len() != construction.n_settings() {
            return Err(QptError::Mismatch(format!(
                "probe {pi}: {} settings in record, construction has {}",
                probe_block.len(),
                construction.n_settings()
            )));
        }
        let rho = probes[pi].projector();
        let mut kets = Vec::new();
        let mut freqs = Vec::new();
        for (s, fr) in probe_block.iter().enumerate() {
            let n_el = construction.settings[s].len();
            if fr.len() < n_el {
                return Err(QptError::Mismatch(format!(
                    "probe {pi} setting {s}: {} outcomes, need {n_el}",
                    fr.len()
                )));
            }
            for o in 0..n_el {
                kets.push(construction.settings[s][o].ket.clone());
                freqs.push(fr[o]);
            }
        }
        blocks.push(ProbeBlock { rho_conj: rho.mapv(|z| z.conj()), kets, freqs });
    }
    let flat = FlatModel { blocks, dim: d };

    // Monotone accelerated projected gradient (MFISTA): extrapolate, take a
    // projected step with quadratic-model backtracking, keep the best point.
    let n = d * d;
    let mut j: CMat = Array2::eye(n).mapv(|z: Complex64| z / d as f64);
    let mut j_prev = j.clone();
    let mut obj = flat.objective(&flat.predictions(&j));
    let mut t_k = 1.0f64;
    let mut step = 1.0f64;
    let mut stationarity = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0usize;

    while iterations < cfg.max_iters {
        iterations += 1;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_k * t_k).sqrt());
        let beta = (t_k - 1.0) / t_next;
        let y = &j + &(&j - &j_prev).mapv(|z| z * beta);
        let py = flat.predictions(&y);
        let oy = flat.objective(&py);
        let grad = flat.gradient(&py);

        let mut z = j.clone();
        let mut oz = obj;
        let mut accepted = false;
        for _ in 0..50 {
            let cand = project_cptp(&(&y - &grad.mapv(|w| w * step)), d, cfg.dykstra_iters)?;
            let pc = flat.predictions(&cand);
            let oc = flat.objective(&pc);
            // Quadratic upper-bound test at the extrapolated point.
            let diff = &cand - &y;
            let lin: f64 = diff
                .iter()
                .zip(grad.iter())
                .map(|(dz, gz)| (dz.conj() * gz).re)
                .sum();
            let quad = frobenius_norm(&diff);
            if oc <= oy + lin + quad * quad / (2.0 * step) + 1e-14 * oy.abs().max(1e-30) {
                z = cand;
                oz = oc;
                accepted = true;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                break;
            }
        }
        if !accepted {
            break;
        }
        stationarity = frobenius_norm(&(&z - &y)) / step.max(1e-30);
        // Monotone safeguard: keep the better of the accelerated point and
        // the incumbent; restart momentum when acceleration overshoots.
        j_prev = j.clone();
        if oz <= obj {
            j = z;
            obj = oz;
            t_k = t_next;
        } else {
            // Acceleration overshot: restart momentum and take a plain
            // projected step from the incumbent.
            t_k = 1.0;
            let pj = flat.predictions(&j);
            let gj = flat.gradient(&pj);
            let cand = project_cptp(&(&j - &gj.mapv(|w| w * step)), d, cfg.dykstra_iters)?;
            let oc = flat.objective(&flat.predictions(&cand));
            if oc <= obj {
                j = cand;
                obj = oc;
            }
        }
        step = (step * 1.3).min(1e9);
        if std::env::var_os("QPT_TRACE").is_some() && iterations % 10 == 0 {
            eprintln!("qpt iter {iterations}: objective {obj:.6e}, step {step:.2e}");
        }
        if stationarity < cfg.tol {
            converged = true;
            break;
        }
    }
    // Final tight projection to report honest constraint violations.
    let j_final = project_cptp(&j, d, cfg.dykstra_iters * 10)?;
    let chi = ProcessMatrix::from_choi(d, &j_final)?;
    let cp = chi.cp_violation()?;
    let tp = chi.tp_violation();
    let p_final = flat.predictions(&j_final);
    let obj_final = flat.objective(&p_final);
    Ok(ProcessEstimate {
        chi,
        objective: obj_final,
        iterations,
        stationarity,
        cp_violation: cp,
        tp_violation: tp,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::intelligent_probes;
    use crate::process::{process_fidelity, unitary_to_chi};
    use qudit_core::haar_random_unitary;
    use qudit_povm::mub;

    fn exact_record(
        u: &CMat,
        probes: &[Ket],
        c: &PovmConstruction,
    ) -> Vec<Vec<Vec<f64>>> {
        probes
            .iter()
            .map(|psi| {
                let out = u.dot(psi.amplitudes());
                let mut rho: CMat = Array2::zeros((u.nrows(), u.nrows()));
                for i in 0..u.nrows() {
                    for jj in 0..u.nrows() {
                        rho[[i, jj]] = out[i] * out[jj].conj();
                    }
                }
                c.settings
                    .iter()
                    .map(|s| s.iter().map(|e| e.probability(&rho)).collect())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn noiseless_recovery_d4() {
        let d = 4;
        let c = mub(d).unwrap();
        let probes = intelligent_probes(d).unwrap();
        let u = haar_random_unitary(d, 77).unwrap();
        let rec = exact_record(u.entries(), &probes, &c);
        let model = crate::model::ProbeFrequencyModel::new(&probes, &c).unwrap();
        let est = estimate_process(&rec, &probes, &c, &QptConfig::default()).unwrap();
        let target = unitary_to_chi(u.entries()).unwrap();
        let f = process_fidelity(&est.chi, &target).unwrap();
        assert!(1.0 - f < 1e-4, "process infidelity {}", 1.0 - f);
        assert!(est.cp_violation < 1e-6);
        assert!(est.tp_violation < 1e-6);
    }

    #[test]
    fn constraints_hold_on_adversarial_records() {
        let d = 4;
        let c = mub(d).unwrap();
        let probes = intelligent_probes(d).unwrap();
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 33) as f64 / (1u64 << 31) as f64
        };
        let cfg = QptConfig { max_iters: 120, ..Default::default() };
        for _case in 0..4 {
            let rec: Vec<Vec<Vec<f64>>> = (0..d)
                .map(|_| {
                    (0..c.n_settings())
                        .map(|_| (0..d).map(|_| next() * 1.2 - 0.1).collect())
                        .collect()
                })
                .collect();
            let est = estimate_process(&rec, &probes, &c, &cfg).unwrap();
            assert!(est.cp_violation < 1e-6, "cp violation {}", est.cp_violation);
            assert!(est.tp_violation < 1e-6, "tp violation {}", est.tp_violation);
        }
    }

    #[test]
    fn records_separate_distinct_unitaries() {
        // Intelligent-probe records of two distinguishable Haar unitaries
        // differ measurably.
        let d = 4;
        let c = mub(d).unwrap();
        let probes = intelligent_probes(d).unwrap();
        for seed in 0..6 {
            let u = haar_random_unitary(d, 200 + seed).unwrap();
            let v = haar_random_unitary(d, 300 + seed).unwrap();
            let fu = {
                let tr = qudit_core::linalg::trace(&qudit_core::linalg::dagger(u.entries()).dot(v.entries()));
                tr.norm_sqr() / ((d * d) as f64)
            };
            if fu > 0.99 {
                continue;
            }
            let ra = exact_record(u.entries(), &probes, &c);
            let rb = exact_record(v.entries(), &probes, &c);
            let mut dist2 = 0.0;
            for (pa, pb) in ra.iter().zip(rb.iter()) {
                for (sa, sb) in pa.iter().zip(pb.iter()) {
                    for (a, b) in sa.iter().zip(sb.iter()) {
                        dist2 += (a - b) * (a - b);
                    }
                }
            }
            assert!(dist2.sqrt() > 1e-3, "records too close: {}", dist2.sqrt());
        }
    }
}

