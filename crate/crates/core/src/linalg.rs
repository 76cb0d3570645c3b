//! Self-contained dense linear algebra: Hermitian eigendecomposition,
//! Householder QR, spectral matrix functions, cone/simplex projections,
//! nonnegative least squares and small real solvers.
//!
//! The eigensolver follows the classic two-stage route: unitary Householder
//! reduction of the Hermitian matrix to a real symmetric tridiagonal form,
//! then implicit-shift QL iteration with accumulated rotations. Accuracy is
//! set by the tridiagonal stage, O(eps * ||A||) on eigenvalues.

use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::CoreError;
use crate::{CMat, CVec};

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Global count of Hermitian eigendecompositions, used by the waveform
/// optimizer tests to assert the per-evaluation diagonalization budget.
static EIGH_COUNT: AtomicU64 = AtomicU64::new(0);

thread_local! {
    static EIGH_COUNT_TL: std::cell::Cell<u64> = const { std::cell::Cell::new(0) };
}

pub fn eigh_count() -> u64 {
    EIGH_COUNT.load(Ordering::Relaxed)
}

/// Eigendecompositions performed by the calling thread; exact even when
/// other threads are running their own decompositions.
pub fn eigh_count_this_thread() -> u64 {
    EIGH_COUNT_TL.with(|c| c.get())
}

/// Result of a Hermitian eigendecomposition: `a = V diag(w) V^dag` with
/// eigenvalues ascending and eigenvectors as columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Array1<f64>,
    pub vectors: CMat,
}

impl Eigh {
    /// Reassemble `V f(diag) V^dag` for a scalar function of the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &w) in self.values.iter().enumerate() {
            let fw = f(w);
            for i in 0..n {
                scaled[[i, j]] *= fw;
            }
        }
        let vh = dagger(&self.vectors);
        scaled.dot(&vh)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(A + A^dag)/2` before reduction, so tiny
/// non-Hermitian noise is tolerated; callers that need strictness should
/// check Hermiticity themselves.
pub fn eigh(a: &CMat) -> Result<Eigh, CoreError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(CoreError::dim(format!("eigh: non-square {}x{}", n, a.ncols())));
    }
    EIGH_COUNT.fetch_add(1, Ordering::Relaxed);
    EIGH_COUNT_TL.with(|c| c.set(c.get() + 1));
    if n == 0 {
        return Ok(Eigh { values: Array1::zeros(0), vectors: Array2::zeros((0, 0)) });
    }
    if n == 1 {
        return Ok(Eigh {
            values: Array1::from_elem(1, a[[0, 0]].re),
            vectors: Array2::from_elem((1, 1), C_ONE),
        });
    }

    // Work on the Hermitian part, in a flat row-major buffer for speed.
    let idx = |i: usize, j: usize| i * n + j;
    let mut m = vec![C_ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            m[idx(i, j)] = 0.5 * (a[[i, j]] + a[[j, i]].conj());
        }
    }

    // Stage 1: Householder reduction to Hermitian tridiagonal. The transform
    // is accumulated transposed (row r of `qt` is column r of Q) so every
    // update touches contiguous memory.
    let mut qt = vec![C_ZERO; n * n];
    for i in 0..n {
        qt[idx(i, i)] = C_ONE;
    }
    let mut v = vec![C_ZERO; n];
    let mut w = vec![C_ZERO; n];
    let mut acc_row = vec![C_ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let mut xnorm2 = 0.0f64;
        for i in k + 1..n {
            xnorm2 += m[idx(i, k)].norm_sqr();
        }
        if xnorm2 <= f64::MIN_POSITIVE {
            continue;
        }
        let xnorm = xnorm2.sqrt();
        let x0 = m[idx(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C_ONE };
        let alpha = -phase * xnorm;
        for z in v.iter_mut() {
            *z = C_ZERO;
        }
        for i in k + 1..n {
            v[i] = m[idx(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v[k + 1..].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= f64::MIN_POSITIVE {
            continue;
        }
        let beta = 2.0 / vnorm2;

        // p = beta * M v on the trailing block (v vanishes above k+1).
        for i in k..n {
            let row = &m[idx(i, k + 1)..idx(i, n)];
            let mut acc = C_ZERO;
            for (mz, vz) in row.iter().zip(&v[k + 1..n]) {
                acc += *mz * *vz;
            }
            w[i] = acc * beta;
        }
        let mut vp = C_ZERO;
        for i in k + 1..n {
            vp += v[i].conj() * w[i];
        }
        let kc = vp * (beta * 0.5);
        for i in k + 1..n {
            w[i] -= kc * v[i];
        }
        w[k] -= kc * v[k]; // v[k] = 0, no-op kept for clarity of the identity
        // Hermitian rank-2 update: M -= v w^dag + w v^dag on rows/cols >= k.
        for i in k..n {
            let vi = v[i];
            let wi = w[i];
            let row = &mut m[i * n..i * n + n];
            for j in k..n {
                row[j] -= vi * w[j].conj() + wi * v[j].conj();
            }
        }
        // Q <- Q (I - beta v v^dag)  ==>  qt rows combine contiguously:
        // acc_row[r] = beta * sum_i v_i qt[i][r]; qt[i][r] -= conj(v_i) acc_row[r].
        for z in acc_row.iter_mut() {
            *z = C_ZERO;
        }
        for i in k + 1..n {
            let vi = v[i];
            if vi == C_ZERO {
                continue;
            }
            let row = &qt[i * n..i * n + n];
            for (a_r, q_r) in acc_row.iter_mut().zip(row.iter()) {
                *a_r += vi * *q_r;
            }
        }
        for z in acc_row.iter_mut() {
            *z *= beta;
        }
        for i in k + 1..n {
            let vic = v[i].conj();
            if vic == C_ZERO {
                continue;
            }
            let row = &mut qt[i * n..i * n + n];
            for (q_r, a_r) in row.iter_mut().zip(acc_row.iter()) {
                *q_r -= vic * *a_r;
            }
        }
    }

    let mut diag = vec![0.0f64; n];
    let mut sub = vec![C_ZERO; n - 1];
    for i in 0..n {
        diag[i] = m[idx(i, i)].re;
    }
    for i in 0..n - 1 {
        sub[i] = m[idx(i + 1, i)];
    }

    // Stage 2: phase out the complex subdiagonal so QL runs on real data.
    let mut phases = vec![C_ONE; n];
    for i in 0..n - 1 {
        if sub[i].norm() > 0.0 {
            phases[i + 1] = phases[i] * (sub[i] / sub[i].norm());
        } else {
            phases[i + 1] = phases[i];
        }
    }
    let mut e = vec![0.0f64; n];
    for i in 0..n - 1 {
        e[i] = sub[i].norm();
    }
    for (j, ph) in phases.iter().enumerate() {
        let row = &mut qt[j * n..j * n + n];
        for z in row.iter_mut() {
            *z *= *ph;
        }
    }

    // Stage 3: implicit-shift QL with eigenvector accumulation on qt rows.
    let mut d = diag;
    let eps = f64::EPSILON;
    // Deflation needs an absolute fallback scale: blocks of near-zero
    // eigenvalues make the relative test |e| <= eps (|d_m| + |d_m+1|)
    // unattainable, while dropping |e| <= eps * ||A|| is backward stable.
    let anorm = (0..n)
        .map(|i| d[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 } + e.get(i).map_or(0.0, |x| x.abs()))
        .fold(0.0f64, f64::max);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mseg = n - 1;
            for mm in l..n - 1 {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= eps * dd || e[mm].abs() <= eps * anorm {
                    mseg = mm;
                    break;
                }
            }
            if mseg == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(CoreError::numerical("eigh: QL failed to converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r } else { -r };
            g = d[mseg] - d[l] + e[l] / (g + sign_r);
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut i = mseg;
            while i > l {
                let im1 = i - 1;
                let mut f = s * e[im1];
                let b = c * e[im1];
                r = f.hypot(g);
                e[i] = r;
                if r == 0.0 {
                    d[i] -= p;
                    e[mseg] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i] - p;
                r = (d[im1] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i] = g + p;
                g = c * r - b;
                // Rotate eigenvector rows (im1, i) of qt in place.
                let (lo, hi) = qt.split_at_mut(i * n);
                let row_a = &mut lo[im1 * n..im1 * n + n];
                let row_b = &mut hi[..n];
                for (za, zb) in row_a.iter_mut().zip(row_b.iter_mut()) {
                    let fb = *zb;
                    let fa = *za;
                    *zb = Complex64::new(
                        s * fa.re + c * fb.re,
                        s * fa.im + c * fb.im,
                    );
                    *za = Complex64::new(
                        c * fa.re - s * fb.re,
                        c * fa.im - s * fb.im,
                    );
                }
                f = 0.0;
                let _ = f;
                i -= 1;
            }
            if r == 0.0 && i > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mseg] = 0.0;
        }
    }

    // Sort ascending and emit eigenvectors as columns.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let values = Array1::from_iter(order.iter().map(|&i| d[i]));
    let mut vectors = Array2::zeros((n, n));
    for (newj, &oldj) in order.iter().enumerate() {
        let row = &qt[oldj * n..oldj * n + n];
        for i in 0..n {
            vectors[[i, newj]] = row[i];
        }
    }
    Ok(Eigh { values, vectors })
}

/// Conjugate transpose.
pub fn dagger(a: &CMat) -> CMat {
    let (r, c) = (a.nrows(), a.ncols());
    let mut out = Array2::zeros((c, r));
    for i in 0..r {
        for j in 0..c {
            out[[j, i]] = a[[i, j]].conj();
        }
    }
    out
}

pub fn trace(a: &CMat) -> Complex64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[[i, i]]).sum()
}

pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn identity(n: usize) -> CMat {
    Array2::eye(n)
}

/// Hermiticity deviation max_ij |A_ij - conj(A_ji)|.
pub fn hermiticity_error(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// exp(-i * A * t) for Hermitian A, through the spectral decomposition.
pub fn expm_i_hermitian(a: &CMat, t: f64) -> Result<CMat, CoreError> {
    let dec = eigh(a)?;
    Ok(dec.map_spectrum(|w| Complex64::from_polar(1.0, -w * t)))
}

/// Principal square root of a PSD Hermitian matrix, eigenvalues floored at 0.
pub fn sqrtm_psd(a: &CMat) -> Result<CMat, CoreError> {
    let dec = eigh(a)?;
    Ok(dec.map_spectrum(|w| Complex64::new(w.max(0.0).sqrt(), 0.0)))
}

/// Householder QR of a square complex matrix; returns unitary Q with
/// the R factor's diagonal. Used for Haar sampling.
pub fn qr_unitary(a: &CMat) -> (CMat, CVec) {
    let n = a.nrows();
    let mut r = a.clone();
    // Store reflectors to build Q afterwards.
    let mut vs: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut xnorm2 = 0.0;
        for i in k..n {
            xnorm2 += r[[i, k]].norm_sqr();
        }
        let xnorm = xnorm2.sqrt();
        let x0 = r[[k, k]];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C_ONE };
        let alpha = -phase * xnorm;
        let mut v = vec![C_ZERO; n];
        for i in k..n {
            v[i] = r[[i, k]];
        }
        v[k] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 > f64::MIN_POSITIVE {
            let beta = 2.0 / vnorm2;
            for j in k..n {
                let mut acc = C_ZERO;
                for i in k..n {
                    acc += v[i].conj() * r[[i, j]];
                }
                let acc = acc * beta;
                for i in k..n {
                    let upd = acc * v[i];
                    r[[i, j]] -= upd;
                }
            }
            vs.push(v);
        } else {
            vs.push(vec![C_ZERO; n]);
        }
    }
    // Q = H_0 H_1 ... H_{n-1} applied to identity.
    let mut q: CMat = Array2::eye(n);
    for k in (0..n).rev() {
        let v = &vs[k];
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= f64::MIN_POSITIVE {
            continue;
        }
        let beta = 2.0 / vnorm2;
        for j in 0..n {
            let mut acc = C_ZERO;
            for i in k..n {
                acc += v[i].conj() * q[[i, j]];
            }
            let acc = acc * beta;
            for i in k..n {
                let upd = acc * v[i];
                q[[i, j]] -= upd;
            }
        }
    }
    let rdiag = CVec::from_iter((0..n).map(|i| r[[i, i]]));
    (q, rdiag)
}

/// Euclidean projection of a real vector onto the probability simplex
/// { x >= 0, sum x = s }.
pub fn project_simplex(v: &[f64], s: f64) -> Vec<f64> {
    let _n = v.len();
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut css = 0.0;
    let mut rho = 0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - s) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            rho = i;
            theta = t;
        }
    }
    let _ = rho;
    v.iter().map(|&x| (x - theta).max(0.0)).collect::<Vec<_>>().into_iter().collect()
}

/// Projection of a Hermitian matrix onto the PSD cone (eigenvalue clipping).
pub fn project_psd(a: &CMat) -> Result<CMat, CoreError> {
    let dec = eigh(a)?;
    Ok(dec.map_spectrum(|w| Complex64::new(w.max(0.0), 0.0)))
}

/// Projection of a Hermitian matrix onto the density-matrix set
/// { rho >= 0, Tr rho = 1 }: eigenvalues projected onto the simplex.
pub fn project_density(a: &CMat) -> Result<CMat, CoreError> {
    let dec = eigh(a)?;
    let lam = project_simplex(dec.values.as_slice().unwrap(), 1.0);
    let n = lam.len();
    let mut scaled = dec.vectors.clone();
    for (j, &w) in lam.iter().enumerate() {
        for i in 0..n {
            scaled[[i, j]] *= w;
        }
    }
    let vh = dagger(&dec.vectors);
    Ok(scaled.dot(&vh))
}

/// Solve a real symmetric positive-definite system via Cholesky.
pub fn solve_spd(a: &Array2<f64>, b: &[f64]) -> Result<Vec<f64>, CoreError> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(CoreError::dim("solve_spd: shape mismatch"));
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(CoreError::numerical(format!(
                        "solve_spd: non-positive pivot {sum:.3e} at {i}"
                    )));
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    // Forward then backward substitution.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[[i, k]] * y[k];
        }
        y[i] = sum / l[[i, i]];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[[k, i]] * x[k];
        }
        x[i] = sum / l[[i, i]];
    }
    Ok(x)
}

/// Lawson-Hanson nonnegative least squares: minimize ||A x - b|| s.t. x >= 0.
///
/// Returns the solution and the residual norm. Suitable for the small systems
/// used here (peak fitting, POVM weight solves).
pub fn nnls(a: &Array2<f64>, b: &[f64]) -> Result<(Vec<f64>, f64), CoreError> {
    let (m, n) = (a.nrows(), a.ncols());
    if b.len() != m {
        return Err(CoreError::dim("nnls: rhs length mismatch"));
    }
    let mut x = vec![0.0f64; n];
    let mut passive = vec![false; n];
    let atb: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| a[[i, j]] * b[i]).sum())
        .collect();
    let ata = {
        let mut g = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                g[[i, j]] = (0..m).map(|k| a[[k, i]] * a[[k, j]]).sum();
            }
        }
        g
    };
    let scale = ata.diag().iter().cloned().fold(1.0f64, f64::max);
    let tol = 1e-12 * scale;

    for _outer in 0..(10 * n.max(4)) {
        // Gradient of 0.5||Ax-b||^2 is A^T A x - A^T b.
        let mut w = vec![0.0f64; n];
        for j in 0..n {
            let mut g = -atb[j];
            for k in 0..n {
                g += ata[[j, k]] * x[k];
            }
            w[j] = -g;
        }
        // Most positive gradient among active (zero) coordinates.
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if !passive[j] && w[j] > tol {
                if best.map_or(true, |(_, bw)| w[j] > bw) {
                    best = Some((j, w[j]));
                }
            }
        }
        let Some((enter, _)) = best else { break };
        passive[enter] = true;

        loop {
            // Solve the passive-set least squares.
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let k = idx.len();
            let mut sub = Array2::<f64>::zeros((k, k));
            let mut rhs = vec![0.0; k];
            for (ii, &jj) in idx.iter().enumerate() {
                rhs[ii] = atb[jj];
                for (ii2, &jj2) in idx.iter().enumerate() {
                    sub[[ii, ii2]] = ata[[jj, jj2]];
                }
            }
            // Ridge for near-singular passive sets.
            for i in 0..k {
                sub[[i, i]] += 1e-14 * scale;
            }
            let z = solve_spd(&sub, &rhs)?;
            if z.iter().all(|&v| v > 0.0) {
                for (ii, &jj) in idx.iter().enumerate() {
                    x[jj] = z[ii];
                }
                for j in 0..n {
                    if !passive[j] {
                        x[j] = 0.0;
                    }
                }
                break;
            }
            // Step toward z until a coordinate hits zero; drop it.
            let mut alpha = f64::INFINITY;
            for (ii, &jj) in idx.iter().enumerate() {
                if z[ii] <= 0.0 {
                    let denom = x[jj] - z[ii];
                    if denom > 0.0 {
                        alpha = alpha.min(x[jj] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (ii, &jj) in idx.iter().enumerate() {
                x[jj] += alpha * (z[ii] - x[jj]);
            }
            for &jj in &idx {
                if x[jj] <= tol.max(1e-300) {
                    x[jj] = 0.0;
                    passive[jj] = false;
                }
            }
        }
    }
    let mut res2 = 0.0;
    for i in 0..m {
        let mut r = -b[i];
        for j in 0..n {
            r += a[[i, j]] * x[j];
        }
        res2 += r * r;
    }
    Ok((x, res2.sqrt()))
}

/// Rank of a set of stacked complex row vectors, by eigenvalues of the Gram
/// matrix, with a relative threshold.
pub fn gram_rank(rows: &[CVec], rel_tol: f64) -> Result<usize, CoreError> {
    let k = rows.len();
    let mut g: CMat = Array2::zeros((k, k));
    for i in 0..k {
        for j in 0..k {
            let mut acc = C_ZERO;
            for (a, b) in rows[i].iter().zip(rows[j].iter()) {
                acc += a.conj() * b;
            }
            g[[i, j]] = acc;
        }
    }
    let dec = eigh(&g)?;
    let top = dec.values.iter().cloned().fold(0.0f64, f64::max);
    if top <= 0.0 {
        return Ok(0);
    }
    Ok(dec.values.iter().filter(|&&w| w > rel_tol * top).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn random_hermitian(n: usize, seed: u64) -> CMat {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let mut a: CMat = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        let ah = dagger(&a);
        (&a + &ah).mapv(|z| 0.5 * z)
    }

    fn check_eigh(a: &CMat, tol: f64) {
        let n = a.nrows();
        let dec = eigh(a).unwrap();
        // Residual ||A V - V diag||
        let av = a.dot(&dec.vectors);
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let r = av[[i, j]] - dec.vectors[[i, j]] * dec.values[j];
                worst = worst.max(r.norm());
            }
        }
        let scale = frobenius_norm(a).max(1.0);
        assert!(worst < tol * scale, "residual {worst:.3e} vs scale {scale:.3e}");
        // Orthonormality
        let vhv = dagger(&dec.vectors).dot(&dec.vectors);
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((vhv[[i, j]] - Complex64::new(expect, 0.0)).norm() < tol);
            }
        }
    }

    #[test]
    fn eigh_pauli_x() {
        let a = array![
            [C_ZERO, C_ONE],
            [C_ONE, C_ZERO]
        ];
        let dec = eigh(&a).unwrap();
        assert!((dec.values[0] + 1.0).abs() < 1e-14);
        assert!((dec.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_random_sizes() {
        for &n in &[2usize, 3, 5, 8, 16, 33, 64] {
            let a = random_hermitian(n, 7 + n as u64);
            check_eigh(&a, 1e-11);
        }
    }

    #[test]
    fn eigh_degenerate_spectrum() {
        // Projector with a 3-fold degenerate eigenvalue.
        let n = 5;
        let u = crate::random::haar_random_unitary(n, 42).unwrap();
        let mut d: CMat = Array2::zeros((n, n));
        for i in 0..3 {
            d[[i, i]] = C_ONE;
        }
        let p = u.entries().dot(&d).dot(&dagger(u.entries()));
        check_eigh(&p, 1e-11);
        let dec = eigh(&p).unwrap();
        for i in 0..2 {
            assert!(dec.values[i].abs() < 1e-11);
        }
        for i in 3..5 {
            assert!((dec.values[i] - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn eigh_large_scale_entries() {
        // Entries at the magnitude of angular frequencies (1e10) still resolve.
        let mut a = random_hermitian(12, 3);
        a.mapv_inplace(|z| z * 1e10);
        check_eigh(&a, 1e-11);
    }

    #[test]
    fn expm_unitary() {
        let h = random_hermitian(8, 11);
        let u = expm_i_hermitian(&h, 0.37).unwrap();
        let uhu = dagger(&u).dot(&u);
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((uhu[[i, j]] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn simplex_projection_matches_kkt() {
        // Against exhaustive KKT: the projection must satisfy sum = s,
        // x >= 0, and for a common theta, x_i = max(v_i - theta, 0).
        let v = vec![0.3, -0.2, 0.9, 0.15];
        let p = project_simplex(&v, 1.0);
        let sum: f64 = p.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| x >= 0.0));
        // Recover theta from any strictly positive coordinate and check all.
        let theta = v
            .iter()
            .zip(&p)
            .filter(|(_, &pi)| pi > 0.0)
            .map(|(&vi, &pi)| vi - pi)
            .next()
            .unwrap();
        for (vi, pi) in v.iter().zip(&p) {
            assert!(((vi - theta).max(0.0) - pi).abs() < 1e-12);
        }
    }

    #[test]
    fn density_projection_minimizes_distance() {
        // Spot check against a dense grid of feasible diagonal candidates.
        let a = random_hermitian(3, 21);
        let p = project_density(&a).unwrap();
        let base = frobenius_norm(&(&p - &a));
        let dec = eigh(&a).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for _ in 0..200 {
            let mut lam = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            let s: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|x| *x /= s);
            let cand = {
                let mut scaled = dec.vectors.clone();
                for (j, &w) in lam.iter().enumerate() {
                    for i in 0..3 {
                        scaled[[i, j]] *= w;
                    }
                }
                scaled.dot(&dagger(&dec.vectors))
            };
            let dist = frobenius_norm(&(&cand - &a));
            assert!(dist + 1e-12 >= base);
        }
    }

    #[test]
    fn nnls_exact_recovery() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9);
        let (m, n) = (20, 6);
        let mut a = Array2::<f64>::zeros((m, n));
        for i in 0..m {
            for j in 0..n {
                a[[i, j]] = rng.gen::<f64>();
            }
        }
        let xtrue: Vec<f64> = (0..n).map(|j| j as f64 * 0.2).collect();
        let b: Vec<f64> = (0..m)
            .map(|i| (0..n).map(|j| a[[i, j]] * xtrue[j]).sum())
            .collect();
        let (x, res) = nnls(&a, &b).unwrap();
        assert!(res < 1e-9);
        for (xi, ti) in x.iter().zip(&xtrue) {
            assert!((xi - ti).abs() < 1e-8, "{xi} vs {ti}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn eigh_reconstructs(seed in 0u64..500, n in 2usize..12) {
            let a = random_hermitian(n, seed);
            let dec = eigh(&a).unwrap();
            let recon = dec.map_spectrum(|w| Complex64::new(w, 0.0));
            let err = frobenius_norm(&(&recon - &a));
            prop_assert!(err < 1e-11 * frobenius_norm(&a).max(1.0));
        }
    }
}
