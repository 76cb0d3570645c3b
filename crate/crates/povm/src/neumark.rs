//! Neumark extension: realize a rank-1 subspace POVM as an orthogonal
//! measurement on the full 16-dimensional space.
//!
//! Given subnormalized kets e_a on the rank-s subspace with
//! sum_a |e_a><e_a| = I_s, the Gram-factor construction finds orthonormal
//! vectors v_a in the big space with P v_a = (embedded) e_a, so the
//! compressed projectors P |v_a><v_a| P reproduce the POVM exactly. The
//! basis is completed on the orthocomplement, and the measurement unitary
//! U = sum_a |a><v_a| maps it onto the logical readout basis.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::linalg::{dagger, eigh, frobenius_norm};
use qudit_core::{CMat, CVec};

use crate::construction::{PovmConstruction, PovmElement};
use crate::PovmError;

/// Result of the embedding: an orthonormal basis of the big space whose
/// first `n_elements` vectors compress onto the POVM, plus the measurement
/// unitary in the logical basis.
#[derive(Debug, Clone)]
pub struct NeumarkEmbedding {
    pub basis: Vec<CVec>,
    pub measurement_unitary: CMat,
    pub n_elements: usize,
    /// Orthonormal columns spanning the subspace, fixing subspace coords.
    pub subspace_frame: CMat,
}

/// Embed rank-1 subspace POVM elements (kets of dimension s = rank P) into
/// `d_big` dimensions through the projector `p` on the big space.
pub fn neumark_embed(
    elements: &[PovmElement],
    p: &CMat,
    d_big: usize,
) -> Result<NeumarkEmbedding, PovmError> {
    let n = elements.len();
    if n > d_big {
        return Err(PovmError::ConstructionFailed(format!(
            "cannot embed {n} elements into {d_big} dimensions"
        )));
    }
    if p.nrows() != d_big {
        return Err(PovmError::ConstructionFailed(format!(
            "projector dim {} does not match d_big {d_big}",
            p.nrows()
        )));
    }
    // Canonical orthonormal frame of range(P): Gram-Schmidt over the
    // columns of P in index order, so a first-block projector embeds the
    // subspace as the leading coordinates. The complement frame follows by
    // continuing over the standard basis.
    let mut frame_cols: Vec<CVec> = Vec::new();
    for c in 0..d_big {
        let mut v = CVec::from_iter((0..d_big).map(|r| p[[r, c]]));
        for u in &frame_cols {
            let ov: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for r in 0..d_big {
                let delta = ov * u[r];
                v[r] -= delta;
            }
        }
        let nrm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            v.mapv_inplace(|z| z / nrm);
            frame_cols.push(v);
        }
    }
    let s = frame_cols.len();
    let mut comp_cols: Vec<CVec> = Vec::new();
    for c in 0..d_big {
        let mut v: CVec = ndarray::Array1::zeros(d_big);
        v[c] = Complex64::new(1.0, 0.0);
        for u in frame_cols.iter().chain(comp_cols.iter()) {
            let ov: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for r in 0..d_big {
                let delta = ov * u[r];
                v[r] -= delta;
            }
        }
        let nrm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            v.mapv_inplace(|z| z / nrm);
            comp_cols.push(v);
        }
    }
    if comp_cols.len() != d_big - s {
        return Err(PovmError::ConstructionFailed(
            "failed to build the orthocomplement frame".into(),
        ));
    }
    let mut frame: CMat = Array2::zeros((d_big, s));
    for (c, v) in frame_cols.iter().enumerate() {
        for r in 0..d_big {
            frame[[r, c]] = v[r];
        }
    }
    let mut comp: CMat = Array2::zeros((d_big, d_big - s));
    for (c, v) in comp_cols.iter().enumerate() {
        for r in 0..d_big {
            comp[[r, c]] = v[r];
        }
    }
    let sub_dim = elements[0].ket.len();
    if sub_dim != s {
        return Err(PovmError::ConstructionFailed(format!(
            "elements live on dim {sub_dim}, projector has rank {s}"
        )));
    }

    // A: s x n matrix of subspace kets; completeness means A A^dag = I_s.
    let mut a: CMat = Array2::zeros((s, n));
    for (c, e) in elements.iter().enumerate() {
        for r in 0..s {
            a[[r, c]] = e.ket[r];
        }
    }
    let aa = a.dot(&dagger(&a));
    let defect = frobenius_norm(&(&aa - &qudit_core::linalg::identity(s)));
    if defect > 1e-8 {
        return Err(PovmError::ConstructionFailed(format!(
            "input elements do not resolve the subspace identity (defect {defect:.3e})"
        )));
    }

    // B with B^dag B = I_n - A^dag A (PSD of rank n - s), rows living on the
    // orthocomplement coordinates.
    let q = {
        let ata = dagger(&a).dot(&a);
        let mut m: CMat = Array2::eye(n);
        m = &m - &ata;
        m
    };
    let qdec = eigh(&q)?;
    let mut b: CMat = Array2::zeros((d_big - s, n));
    let mut row = 0usize;
    for idx in (0..n).rev() {
        let lam = qdec.values[idx];
        if lam > 1e-10 {
            if row >= d_big - s {
                return Err(PovmError::ConstructionFailed(
                    "orthocomplement too small for the completion".into(),
                ));
            }
            let scale = lam.max(0.0).sqrt();
            for c in 0..n {
                b[[row, c]] = qdec.vectors[[c, idx]].conj() * scale;
            }
            row += 1;
        }
    }

    // v_a = frame * A[:, a] + comp * B[:, a]; orthonormal by construction.
    let fa = frame.dot(&a);
    let cb = comp.dot(&b);
    let mut basis: Vec<CVec> = Vec::with_capacity(d_big);
    for c in 0..n {
        let v = CVec::from_iter((0..d_big).map(|r| fa[[r, c]] + cb[[r, c]]));
        basis.push(v);
    }
    // Complete with Gram-Schmidt over the standard basis.
    for cand in 0..d_big {
        if basis.len() == d_big {
            break;
        }
        let mut v: CVec = ndarray::Array1::zeros(d_big);
        v[cand] = Complex64::new(1.0, 0.0);
        for u in &basis {
            let ov: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for r in 0..d_big {
                let delta = ov * u[r];
                v[r] -= delta;
            }
        }
        let nrm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            v.mapv_inplace(|z| z / nrm);
            basis.push(v);
        }
    }
    if basis.len() != d_big {
        return Err(PovmError::ConstructionFailed(
            "failed to complete the Neumark basis".into(),
        ));
    }
    // Measurement unitary per the readout convention: U maps the measured
    // basis onto the logical basis, U = sum_a |a><v_a|.
    let mut u: CMat = Array2::zeros((d_big, d_big));
    for (aidx, v) in basis.iter().enumerate() {
        for c in 0..d_big {
            u[[aidx, c]] = v[c].conj();
        }
    }
    Ok(NeumarkEmbedding { basis, measurement_unitary: u, n_elements: n, subspace_frame: frame })
}

impl NeumarkEmbedding {
    /// Compress a big-space basis projector back onto the subspace:
    /// returns the ket (in subspace coordinates) of P |v_a><v_a| P.
    pub fn compressed_ket(&self, a: usize) -> CVec {
        dagger(&self.subspace_frame).dot(&self.basis[a])
    }
}

/// Convenience: embed every setting of a flat rank-1 construction on the
/// first-rank(P) subspace, producing the 16-dim measurement construction.
pub fn embed_construction(
    c: &PovmConstruction,
    p: &CMat,
    d_big: usize,
) -> Result<(PovmConstruction, Vec<NeumarkEmbedding>), PovmError> {
    let mut settings = Vec::new();
    let mut embeddings = Vec::new();
    for (s, setting) in c.settings.iter().enumerate() {
        let emb = neumark_embed(setting, p, d_big)?;
        let els: Vec<PovmElement> = emb
            .basis
            .iter()
            .enumerate()
            .map(|(o, v)| PovmElement { ket: v.clone(), setting: s, outcome: o })
            .collect();
        settings.push(els);
        embeddings.push(emb);
    }
    Ok((
        PovmConstruction {
            name: format!("{}@{d_big}", c.name),
            dim: d_big,
            ic_class: c.ic_class,
            settings,
            notes: c.notes.clone(),
        },
        embeddings,
    ))
}
