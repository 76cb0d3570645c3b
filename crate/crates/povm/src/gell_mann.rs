//! Orthonormal bases from eigenbases of maximal commuting families of
//! generalized Gell-Mann operators.
//!
//! The d^2 - 1 generalized Gell-Mann matrices split into the diagonal family
//! (eigenbasis = logical) and, for every perfect matching of the index pairs,
//! the symmetric X_{jk} family and the antisymmetric Y_{jk} family, whose
//! common eigenbases pair |j>, |k> into (|j> +- |k>)/sqrt(2) and
//! (|j> +- i|k>)/sqrt(2). A 1-factorization of the complete graph K_d by
//! circulant steps, arranged so the first two matchings chain all levels in
//! one cycle (adjacent even and odd pairs), makes the first five bases the
//! pure-state-complete set; all 2d-1 bases together resolve every matrix
//! entry and are fully informationally complete.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::CMat;

use crate::construction::{IcClass, PovmConstruction};
use crate::PovmError;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

type Matching = Vec<(usize, usize)>;

/// 1-factorization of K_d for even d = 2^k: adjacent-even pairs, adjacent-odd
/// pairs (together the Hamiltonian cycle 0-1-...-d-1-0), then the two
/// alternating matchings of every circulant step 2 <= s < d/2, then the
/// antipodal matching {(j, j + d/2)}.
fn matchings(d: usize) -> Vec<Matching> {
    if d == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out: Vec<Matching> = Vec::with_capacity(d - 1);
    let m1: Matching = (0..d / 2).map(|j| (2 * j, 2 * j + 1)).collect();
    let m2: Matching = (0..d / 2)
        .map(|j| {
            let (u, v) = (2 * j + 1, (2 * j + 2) % d);
            (u.min(v), u.max(v))
        })
        .collect();
    out.push(m1);
    out.push(m2);
    for s in 2..d / 2 {
        let g = gcd(d, s);
        let mut even: Matching = Vec::with_capacity(d / 2);
        let mut odd: Matching = Vec::with_capacity(d / 2);
        for r in 0..g {
            let len = d / g;
            for t in 0..len {
                let u = (r + t * s) % d;
                let v = (r + (t + 1) * s) % d;
                let pair = (u.min(v), u.max(v));
                if t % 2 == 0 {
                    even.push(pair);
                } else {
                    odd.push(pair);
                }
            }
        }
        out.push(even);
        out.push(odd);
    }
    out.push((0..d / 2).map(|j| (j, j + d / 2)).collect());
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn pair_basis(d: usize, m: &Matching, imaginary: bool) -> CMat {
    let mut basis: CMat = Array2::zeros((d, d));
    for (col2, &(j, k)) in m.iter().enumerate() {
        let second = if imaginary {
            Complex64::new(0.0, SQRT_HALF)
        } else {
            Complex64::new(SQRT_HALF, 0.0)
        };
        basis[[j, 2 * col2]] = Complex64::new(SQRT_HALF, 0.0);
        basis[[k, 2 * col2]] = second;
        basis[[j, 2 * col2 + 1]] = Complex64::new(SQRT_HALF, 0.0);
        basis[[k, 2 * col2 + 1]] = -second;
    }
    basis
}

/// Gell-Mann basis construction with `count` in {4, 5, 2d-1} bases.
///
/// count = 2d-1: logical + both families of every matching (F-IC).
/// count = 5: logical + the four chained-pair superposition bases (R1S-IC).
/// count = 4: the four superposition bases without the logical one (R1-IC).
pub fn gell_mann_bases(d: usize, count: usize) -> Result<PovmConstruction, PovmError> {
    if !d.is_power_of_two() || d < 2 {
        return Err(PovmError::UnsupportedDimension(format!(
            "Gell-Mann basis construction implemented for powers of two, got {d}"
        )));
    }
    let full = 2 * d - 1;
    let ms = matchings(d);
    // Ordered basis list: logical, X(M1), X(M2), Y(M1), Y(M2), then pairs.
    let mut bases: Vec<CMat> = Vec::with_capacity(full);
    bases.push(Array2::eye(d));
    if d == 2 {
        bases.push(pair_basis(d, &ms[0], false));
        bases.push(pair_basis(d, &ms[0], true));
    } else {
        bases.push(pair_basis(d, &ms[0], false));
        bases.push(pair_basis(d, &ms[1], false));
        bases.push(pair_basis(d, &ms[0], true));
        bases.push(pair_basis(d, &ms[1], true));
        for m in &ms[2..] {
            bases.push(pair_basis(d, m, false));
            bases.push(pair_basis(d, m, true));
        }
    }
    debug_assert_eq!(bases.len(), full);

    let (selected, class, name): (Vec<CMat>, IcClass, String) = match count {
        c if c == full => (bases, IcClass::FullyIc, format!("GMB{d}")),
        5 => (bases[..5].to_vec(), IcClass::Rank1Strict, format!("5GMB{d}")),
        4 => (bases[1..5].to_vec(), IcClass::Rank1, format!("4GMB{d}")),
        other => {
            return Err(PovmError::UnsupportedDimension(format!(
                "GMB basis count {other} unsupported (use 4, 5 or {full})"
            )))
        }
    };
    Ok(PovmConstruction::from_bases(name, class, &selected))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matchings_partition_all_pairs() {
        for d in [2usize, 4, 8, 16] {
            let ms = matchings(d);
            assert_eq!(ms.len(), d - 1);
            let mut seen = std::collections::HashSet::new();
            for m in &ms {
                assert_eq!(m.len(), d / 2);
                let mut used = vec![false; d];
                for &(a, b) in m {
                    assert!(a < b && b < d);
                    assert!(!used[a] && !used[b], "vertex reused in matching");
                    used[a] = true;
                    used[b] = true;
                    assert!(seen.insert((a, b)), "edge ({a},{b}) repeated");
                }
            }
            assert_eq!(seen.len(), d * (d - 1) / 2);
        }
    }

    #[test]
    fn counts_match_table() {
        let c = gell_mann_bases(4, 7).unwrap();
        assert_eq!(c.n_settings(), 7);
        assert_eq!(c.n_outcomes(), 28);
        let c = gell_mann_bases(16, 31).unwrap();
        assert_eq!(c.n_settings(), 31);
        assert_eq!(c.n_outcomes(), 2 * 16 * 16 - 16);
        let c5 = gell_mann_bases(16, 5).unwrap();
        assert_eq!(c5.n_outcomes(), 80);
        assert_eq!(c5.ic_class, IcClass::Rank1Strict);
        let c4 = gell_mann_bases(16, 4).unwrap();
        assert_eq!(c4.n_outcomes(), 64);
        // The four-basis variant omits the logical basis.
        let first = c4.setting_basis(0).unwrap();
        let dev = qudit_core::linalg::frobenius_norm(&(&first - &qudit_core::linalg::identity(16)));
        assert!(dev > 1.0);
    }

    #[test]
    fn bases_orthonormal_and_complete() {
        for d in [2usize, 4, 16] {
            let c = gell_mann_bases(d, 2 * d - 1).unwrap();
            assert!(c.completeness_defect() < 1e-12);
            for s in 0..c.n_settings() {
                c.setting_basis(s).unwrap();
            }
        }
    }

    #[test]
    fn d2_full_set_is_pauli() {
        // For d = 2 the three bases are the sigma_z, sigma_x, sigma_y
        // eigenbases: informational completeness comes from rank 4.
        let c = gell_mann_bases(2, 3).unwrap();
        assert_eq!(c.n_settings(), 3);
        let rows: Vec<qudit_core::CVec> = c
            .elements()
            .map(|e| {
                let op = e.operator();
                qudit_core::CVec::from_iter((0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| op[[i, j]]))
            })
            .collect();
        let rank = qudit_core::linalg::gram_rank(&rows, 1e-9).unwrap();
        assert_eq!(rank, 4);
    }
}
