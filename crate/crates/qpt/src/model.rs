//! The probe-frequency measurement model p_{j,l} = Tr(D_{j,l}^dag chi).
//!
//! For pure probes and rank-1 POVM elements every D matrix factorizes: in
//! Choi coordinates D_{j,l}^dag = h h^dag with h = vec(|psi_j><e_l|), so the
//! model only stores the h vectors (one length-d^2 vector per probe-element
//! pair) instead of d^2 x d^2 matrices. That is what makes the
//! 16-dimensional reconstruction fit in memory; blocks of full D matrices
//! can still be materialized on demand for cross-checks.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use qudit_core::{CMat, CVec, Ket};
use qudit_povm::PovmConstruction;
use rayon::prelude::*;

use crate::process::{choi_to_chi, OperatorBasis};
use crate::QptError;

/// Cached measurement vectors for (probe, setting, outcome) triples.
pub struct ProbeFrequencyModel {
    pub dim: usize,
    /// h[probe][setting][outcome], each of length d^2.
    pub hvecs: Vec<Vec<Vec<CVec>>>,
    pub n_probes: usize,
    pub settings: Vec<usize>,
}

impl ProbeFrequencyModel {
    pub fn new(probes: &[Ket], construction: &PovmConstruction) -> Result<Self, QptError> {
        let d = construction.dim;
        if probes.is_empty() {
            return Err(QptError::Mismatch("no probes".into()));
        }
        for p in probes {
            if p.dim() != d {
                return Err(QptError::Mismatch(format!(
                    "probe dim {} vs construction dim {d}",
                    p.dim()
                )));
            }
        }
        let hvecs: Vec<Vec<Vec<CVec>>> = probes
            .iter()
            .map(|psi| {
                construction
                    .settings
                    .iter()
                    .map(|setting| {
                        setting
                            .iter()
                            .map(|e| {
                                // h = vec(|e><psi|): p = h^dag J h is the
                                // Born probability of outcome e after the
                                // process acts on |psi>.
                                let mut h: CVec = Array1::zeros(d * d);
                                for a in 0..d {
                                    for b in 0..d {
                                        h[a * d + b] = e.ket[a] * psi.amplitudes()[b].conj();
                                    }
                                }
                                h
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(ProbeFrequencyModel {
            dim: d,
            n_probes: probes.len(),
            settings: construction.settings.iter().map(|s| s.len()).collect(),
            hvecs,
        })
    }

    /// Predicted probabilities p[probe][setting][outcome] for a process
    /// given by its Choi matrix.
    pub fn predict_choi(&self, j: &CMat) -> Vec<Vec<Vec<f64>>> {
        self.hvecs
            .par_iter()
            .map(|probe| {
                probe
                    .iter()
                    .map(|setting| {
                        setting
                            .iter()
                            .map(|h| quadratic_form(j, h))
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Same through the public chi representation.
    pub fn predict(&self, chi: &crate::process::ProcessMatrix) -> Vec<Vec<Vec<f64>>> {
        self.predict_choi(&chi.choi())
    }

    /// Materialize one D_{j,l} matrix in chi coordinates (test oracle).
    pub fn d_matrix(&self, probe: usize, setting: usize, outcome: usize) -> CMat {
        let h = &self.hvecs[probe][setting][outcome];
        let n = self.dim * self.dim;
        let mut dj: CMat = Array2::zeros((n, n));
        for r in 0..n {
            for c in 0..n {
                dj[[r, c]] = h[r] * h[c].conj();
            }
        }
        // D^dag in Choi coordinates is h h^dag; move it to chi coordinates
        // through the same congruence used for processes.
        choi_to_chi(&dj, &OperatorBasis::new(self.dim))
    }
}

pub(crate) fn quadratic_form(j: &CMat, h: &CVec) -> f64 {
    let n = h.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..n {
        let hr = h[r];
        if hr == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut row = Complex64::new(0.0, 0.0);
        for c in 0..n {
            row += j[[r, c]] * h[c];
        }
        acc += hr.conj() * row;
    }
    acc.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::intelligent_probes;
    use crate::process::{apply_process, unitary_to_chi, ProcessMatrix};
    use qudit_core::haar_random_unitary;
    use qudit_core::linalg::trace;
    use qudit_povm::mub;

    fn random_cptp(d: usize, seed: u64) -> ProcessMatrix {
        // Mix a few Haar unitaries into a CPTP map.
        let weights = [0.6, 0.25, 0.15];
        let n = d * d;
        let mut j: CMat = Array2::zeros((n, n));
        for (k, w) in weights.iter().enumerate() {
            let u = haar_random_unitary(d, seed + k as u64).unwrap();
            let pu = unitary_to_chi(u.entries()).unwrap();
            j = &j + &pu.choi().mapv(|z| z * *w);
        }
        ProcessMatrix::from_choi(d, &j).unwrap()
    }

    #[test]
    fn identity_process_reproduces_born_probabilities() {
        let d = 4;
        let c = mub(d).unwrap();
        let probes = intelligent_probes(d).unwrap();
        let model = ProbeFrequencyModel::new(&probes, &c).unwrap();
        let eye: CMat = Array2::eye(d);
        let chi = unitary_to_chi(&eye).unwrap();
        let pred = model.predict(&chi);
        for (jp, psi) in probes.iter().enumerate() {
            let rho = psi.projector();
            for (s, setting) in c.settings.iter().enumerate() {
                for (o, e) in setting.iter().enumerate() {
                    let want = e.probability(&rho);
                    assert!(
                        (pred[jp][s][o] - want).abs() < 1e-12,
                        "probe {jp} setting {s} outcome {o}"
                    );
                }
            }
        }
    }

    #[test]
    fn two_path_equivalence_on_random_cptp() {
        // predict == (apply_process then Born rule), the central D-matrix
        // correctness oracle.
        let d = 4;
        let c = mub(d).unwrap();
        let probes = intelligent_probes(d).unwrap();
        let model = ProbeFrequencyModel::new(&probes, &c).unwrap();
        for seed in 0..10 {
            let chi = random_cptp(d, 100 + 10 * seed);
            let pred = model.predict(&chi);
            for (jp, psi) in probes.iter().enumerate() {
                let out = apply_process(&chi, &psi.projector()).unwrap();
                for (s, setting) in c.settings.iter().enumerate() {
                    for (o, e) in setting.iter().enumerate() {
                        let want = e.probability(&out);
                        assert!(
                            (pred[jp][s][o] - want).abs() < 1e-10,
                            "seed {seed} probe {jp} setting {s} outcome {o}: {} vs {want}",
                            pred[jp][s][o]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn linearity_in_chi() {
        let d = 4;
        let c = mub(d).unwrap();
        let probes = intelligent_probes(d).unwrap();
        let model = ProbeFrequencyModel::new(&probes, &c).unwrap();
        let a = random_cptp(d, 300);
        let b = random_cptp(d, 400);
        let mix = ProcessMatrix::from_choi(
            d,
            &(&a.choi().mapv(|z| z * 0.3) + &b.choi().mapv(|z| z * 0.7)),
        )
        .unwrap();
        let pa = model.predict(&a);
        let pb = model.predict(&b);
        let pm = model.predict(&mix);
        for jp in 0..probes.len() {
            for s in 0..c.n_settings() {
                for o in 0..d {
                    let want = 0.3 * pa[jp][s][o] + 0.7 * pb[jp][s][o];
                    assert!((pm[jp][s][o] - want).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn d_matrix_oracle_matches_quadratic_form() {
        let d = 3;
        let probes = intelligent_probes(d).unwrap();
        let c = qudit_povm::mub_prime(3).unwrap();
        let model = ProbeFrequencyModel::new(&probes, &c).unwrap();
        let chi = random_cptp(d, 500);
        let pred = model.predict(&chi);
        // p = Tr(D^dag chi) with the materialized D in chi coordinates.
        let dm = model.d_matrix(1, 2, 0);
        let p_direct = trace(&qudit_core::linalg::dagger(&dm).dot(&chi.chi)).re;
        assert!((p_direct - pred[1][2][0]).abs() < 1e-10);
    }
}
