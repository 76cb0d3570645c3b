//! Wigner 3j / 6j symbols and Clebsch-Gordan coefficients from the Racah
//! closed forms, in double precision. Condon-Shortley phase convention.

use crate::HamiltonianError;

/// Largest factorial argument needed for the spins in this workspace.
const FACT_LEN: usize = 128;

fn factorials() -> &'static [f64; FACT_LEN] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; FACT_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0f64; FACT_LEN];
        for i in 1..FACT_LEN {
            t[i] = t[i - 1] * i as f64;
        }
        t
    })
}

fn fact(n: i64) -> f64 {
    factorials()[n as usize]
}

/// Validate a half-integer and return 2j as an integer.
fn twice(j: f64, name: &str) -> Result<i64, HamiltonianError> {
    let t = (2.0 * j).round();
    if (2.0 * j - t).abs() > 1e-9 {
        return Err(HamiltonianError::InvalidParameter(format!(
            "{name} = {j} is not a half-integer"
        )));
    }
    Ok(t as i64)
}

fn triangle_ok(tj1: i64, tj2: i64, tj3: i64) -> bool {
    tj3 >= (tj1 - tj2).abs() && tj3 <= tj1 + tj2 && (tj1 + tj2 + tj3) % 2 == 0
}

/// sqrt of the triangle coefficient Delta(j1 j2 j3), arguments doubled.
fn sqrt_triangle(tj1: i64, tj2: i64, tj3: i64) -> f64 {
    let a = (tj1 + tj2 - tj3) / 2;
    let b = (tj1 - tj2 + tj3) / 2;
    let c = (-tj1 + tj2 + tj3) / 2;
    (fact(a) * fact(b) * fact(c) / fact((tj1 + tj2 + tj3) / 2 + 1)).sqrt()
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
pub fn wigner3j(
    j1: f64,
    j2: f64,
    j3: f64,
    m1: f64,
    m2: f64,
    m3: f64,
) -> Result<f64, HamiltonianError> {
    let tj1 = twice(j1, "j1")?;
    let tj2 = twice(j2, "j2")?;
    let tj3 = twice(j3, "j3")?;
    let tm1 = twice(m1, "m1")?;
    let tm2 = twice(m2, "m2")?;
    let tm3 = twice(m3, "m3")?;
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0 {
        return Err(HamiltonianError::InvalidParameter(
            "m must differ from j by an integer".into(),
        ));
    }
    if tm1 + tm2 + tm3 != 0
        || tm1.abs() > tj1
        || tm2.abs() > tj2
        || tm3.abs() > tj3
        || !triangle_ok(tj1, tj2, tj3)
    {
        return Ok(0.0);
    }

    let prefix = sqrt_triangle(tj1, tj2, tj3)
        * (fact((tj1 + tm1) / 2)
            * fact((tj1 - tm1) / 2)
            * fact((tj2 + tm2) / 2)
            * fact((tj2 - tm2) / 2)
            * fact((tj3 + tm3) / 2)
            * fact((tj3 - tm3) / 2))
        .sqrt();

    // Summation bounds for the Racah series.
    let a1 = (tj1 + tj2 - tj3) / 2;
    let a2 = (tj1 - tm1) / 2;
    let a3 = (tj2 + tm2) / 2;
    let b1 = (tj3 - tj2 + tm1) / 2;
    let b2 = (tj3 - tj1 - tm2) / 2;
    let kmin = 0.max(-b1).max(-b2);
    let kmax = a1.min(a2).min(a3);
    let mut sum = 0.0;
    let mut k = kmin;
    while k <= kmax {
        let term = fact(k)
            * fact(a1 - k)
            * fact(a2 - k)
            * fact(a3 - k)
            * fact(b1 + k)
            * fact(b2 + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / term;
        k += 1;
    }
    let phase = if ((tj1 - tj2 - tm3) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(phase * prefix * sum)
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>.
pub fn clebsch_gordan(
    j1: f64,
    m1: f64,
    j2: f64,
    m2: f64,
    j: f64,
    m: f64,
) -> Result<f64, HamiltonianError> {
    let w = wigner3j(j1, j2, j, m1, m2, -m)?;
    let tj1 = twice(j1, "j1")?;
    let tj2 = twice(j2, "j2")?;
    let tm = twice(m, "M")?;
    let exp = (tj1 - tj2 + tm) / 2;
    let phase = if exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(phase * ((2.0 * j + 1.0).sqrt()) * w)
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}. Returns 0 when any triangle
/// condition fails.
pub fn wigner6j(
    j1: f64,
    j2: f64,
    j3: f64,
    j4: f64,
    j5: f64,
    j6: f64,
) -> Result<f64, HamiltonianError> {
    let t = [
        twice(j1, "j1")?,
        twice(j2, "j2")?,
        twice(j3, "j3")?,
        twice(j4, "j4")?,
        twice(j5, "j5")?,
        twice(j6, "j6")?,
    ];
    let (tj1, tj2, tj3, tj4, tj5, tj6) = (t[0], t[1], t[2], t[3], t[4], t[5]);
    let triads = [
        (tj1, tj2, tj3),
        (tj1, tj5, tj6),
        (tj4, tj2, tj6),
        (tj4, tj5, tj3),
    ];
    for &(a, b, c) in &triads {
        if !triangle_ok(a, b, c) {
            return Ok(0.0);
        }
    }
    let prefix: f64 = triads.iter().map(|&(a, b, c)| sqrt_triangle(a, b, c)).product();

    let s1 = (tj1 + tj2 + tj3) / 2;
    let s2 = (tj1 + tj5 + tj6) / 2;
    let s3 = (tj4 + tj2 + tj6) / 2;
    let s4 = (tj4 + tj5 + tj3) / 2;
    let q1 = (tj1 + tj2 + tj4 + tj5) / 2;
    let q2 = (tj2 + tj3 + tj5 + tj6) / 2;
    let q3 = (tj3 + tj1 + tj6 + tj4) / 2;

    let tmin = s1.max(s2).max(s3).max(s4);
    let tmax = q1.min(q2).min(q3);
    let mut sum = 0.0;
    let mut tcur = tmin;
    while tcur <= tmax {
        let num = fact(tcur + 1);
        let den = fact(tcur - s1)
            * fact(tcur - s2)
            * fact(tcur - s3)
            * fact(tcur - s4)
            * fact(q1 - tcur)
            * fact(q2 - tcur)
            * fact(q3 - tcur);
        let sign = if tcur % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * num / den;
        tcur += 1;
    }
    Ok(prefix * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use num_complex::Complex64;
    use qudit_core::CMat;

    #[test]
    fn stretch_state_cg() {
        // <3,3;1,1|4,4> couples maximal projections: exactly 1.
        let c = clebsch_gordan(3.0, 3.0, 1.0, 1.0, 4.0, 4.0).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spin_half_cg_table() {
        // Singlet/triplet decomposition of two spin-1/2.
        let c_triplet = clebsch_gordan(0.5, 0.5, 0.5, -0.5, 1.0, 0.0).unwrap();
        let c_singlet = clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0.0, 0.0).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((c_triplet - inv_sqrt2).abs() < 1e-12);
        assert!((c_singlet - inv_sqrt2).abs() < 1e-12);
    }

    #[test]
    fn triangle_violation_is_zero() {
        assert_eq!(wigner6j(1.0, 1.0, 3.0, 1.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(wigner3j(1.0, 1.0, 5.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn non_half_integer_rejected() {
        assert!(wigner6j(0.3, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn sixj_orthogonality() {
        // sum_x (2x+1) {j1 j2 x; j3 j4 j5}{j1 j2 x; j3 j4 j6} = delta / (2 j5 + 1)
        let cases: [(f64, f64, f64, f64, f64, f64); 4] = [
            (0.5, 0.5, 0.5, 0.5, 1.0, 1.0),
            (1.0, 1.5, 0.5, 2.0, 2.0, 1.0),
            (2.0, 1.0, 1.0, 2.0, 1.0, 2.0),
            (1.5, 1.5, 1.0, 1.0, 1.5, 0.5),
        ];
        for &(j1, j2, j3, j4, j5, j6) in &cases {
            let mut sum = 0.0;
            // x ranges over half-integers compatible with both triads.
            let xmin = (j1 - j2).abs().max((j3 - j4).abs());
            let xmax = (j1 + j2).min(j3 + j4);
            let mut x = xmin;
            while x <= xmax + 1e-9 {
                let a = wigner6j(j1, j2, x, j3, j4, j5).unwrap();
                let b = wigner6j(j1, j2, x, j3, j4, j6).unwrap();
                sum += (2.0 * x + 1.0) * a * b;
                x += 0.5;
            }
            let expect = if (j5 - j6).abs() < 1e-12 { 1.0 / (2.0 * j5 + 1.0) } else { 0.0 };
            assert!(
                (sum - expect).abs() < 1e-12,
                "orthogonality failed for {:?}: {} vs {}",
                (j1, j2, j3, j4, j5, j6),
                sum,
                expect
            );
        }
    }

    /// Brute-force recoupling oracle: build Clebsch-Gordan tables from ladder
    /// operators alone (no Racah formula), then compute the recoupling
    /// overlap that defines the 6j symbol.
    fn ladder_cg_table(j1: f64, j2: f64) -> Vec<(f64, Vec<Vec<f64>>)> {
        // Returns, for each total J (descending), coefficient rows indexed by
        // M (descending) and columns by m1 index; coefficients real.
        let d1 = (2.0 * j1) as usize + 1;
        let d2 = (2.0 * j2) as usize + 1;
        let dim = d1 * d2;
        let m1 = |i: usize| j1 - i as f64;
        let m2 = |i: usize| j2 - i as f64;
        // J- on product space.
        let lower = |state: &Vec<f64>| -> Vec<f64> {
            let mut out = vec![0.0; dim];
            for i1 in 0..d1 {
                for i2 in 0..d2 {
                    let amp = state[i1 * d2 + i2];
                    if amp == 0.0 {
                        continue;
                    }
                    // j- |j,m> = sqrt(j(j+1)-m(m-1)) |j,m-1>
                    if i1 + 1 < d1 {
                        let c = (j1 * (j1 + 1.0) - m1(i1) * (m1(i1) - 1.0)).sqrt();
                        out[(i1 + 1) * d2 + i2] += c * amp;
                    }
                    if i2 + 1 < d2 {
                        let c = (j2 * (j2 + 1.0) - m2(i2) * (m2(i2) - 1.0)).sqrt();
                        out[i1 * d2 + (i2 + 1)] += c * amp;
                    }
                }
            }
            out
        };
        let normalize = |v: &mut Vec<f64>| {
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= n);
        };
        let mut tables = Vec::new();
        let mut used: Vec<Vec<f64>> = Vec::new();
        let mut j = j1 + j2;
        while j >= (j1 - j2).abs() - 1e-9 {
            // Highest-weight state |J,J>: in the M = J sector, orthogonal to
            // all previously found states; Condon-Shortley fixes the sign so
            // the m1-maximal coefficient is positive.
            let target_m = j;
            let mut basis_idx = Vec::new();
            for i1 in 0..d1 {
                for i2 in 0..d2 {
                    if (m1(i1) + m2(i2) - target_m).abs() < 1e-9 {
                        basis_idx.push(i1 * d2 + i2);
                    }
                }
            }
            let mut vec0 = vec![0.0; dim];
            // Start from an arbitrary vector in the sector, project out used
            // J,M = target_m states.
            for (k, &bi) in basis_idx.iter().enumerate() {
                vec0[bi] = 1.0 + k as f64 * 0.1;
            }
            for u in &used {
                let um: f64 = u.iter().zip(vec0.iter()).map(|(a, b)| a * b).sum();
                if um.abs() > 0.0 {
                    for (vi, ui) in vec0.iter_mut().zip(u.iter()) {
                        *vi -= um * ui;
                    }
                }
            }
            normalize(&mut vec0);
            // Condon-Shortley: coefficient with largest m1 must be positive.
            let lead = basis_idx
                .iter()
                .min_by(|&&a, &&b| (a / d2).cmp(&(b / d2)))
                .copied()
                .unwrap();
            if vec0[lead] < 0.0 {
                vec0.iter_mut().for_each(|x| *x = -*x);
            }
            // Ladder down to all M.
            let mut rows = Vec::new();
            let mut cur = vec0.clone();
            rows.push(cur.clone());
            let steps = (2.0 * j) as usize;
            for _ in 0..steps {
                cur = lower(&cur);
                normalize(&mut cur);
                rows.push(cur.clone());
            }
            for r in &rows {
                used.push(r.clone());
            }
            tables.push((j, rows));
            j -= 1.0;
        }
        tables
    }

    #[test]
    fn sixj_brute_force_recoupling() {
        // <(j1 j2) j12, j3; J M | j1, (j2 j3) j23; J M>
        //   = (-1)^(j1+j2+j3+J) sqrt((2 j12+1)(2 j23+1)) {j1 j2 j12; j3 J j23}
        let check = |j1: f64, j2: f64, j3: f64, j12: f64, j23: f64, jtot: f64| {
            let d1 = (2.0 * j1) as usize + 1;
            let d2 = (2.0 * j2) as usize + 1;
            let d3 = (2.0 * j3) as usize + 1;
            // |(j1 j2) j12, j3; J, M=J> via two ladder tables.
            let t12 = ladder_cg_table(j1, j2);
            let rows12 = &t12.iter().find(|(jj, _)| (*jj - j12).abs() < 1e-9).unwrap().1;
            let t12_3 = ladder_cg_table(j12, j3);
            let rows_a = &t12_3.iter().find(|(jj, _)| (*jj - jtot).abs() < 1e-9).unwrap().1;
            // Expand into the product basis (m1, m2, m3).
            let d12 = (2.0 * j12) as usize + 1;
            let mut psi_a = vec![0.0; d1 * d2 * d3];
            let row_a = &rows_a[0]; // M = J
            for i12 in 0..d12 {
                for i3 in 0..d3 {
                    let amp = row_a[i12 * d3 + i3];
                    if amp == 0.0 {
                        continue;
                    }
                    let inner = &rows12[i12]; // M12 = j12 - i12
                    for i1 in 0..d1 {
                        for i2 in 0..d2 {
                            psi_a[(i1 * d2 + i2) * d3 + i3] += amp * inner[i1 * d2 + i2];
                        }
                    }
                }
            }
            // |j1, (j2 j3) j23; J, M=J>
            let t23 = ladder_cg_table(j2, j3);
            let rows23 = &t23.iter().find(|(jj, _)| (*jj - j23).abs() < 1e-9).unwrap().1;
            let t1_23 = ladder_cg_table(j1, j23);
            let rows_b = &t1_23.iter().find(|(jj, _)| (*jj - jtot).abs() < 1e-9).unwrap().1;
            let d23 = (2.0 * j23) as usize + 1;
            let mut psi_b = vec![0.0; d1 * d2 * d3];
            let row_b = &rows_b[0];
            for i1 in 0..d1 {
                for i23 in 0..d23 {
                    let amp = row_b[i1 * d23 + i23];
                    if amp == 0.0 {
                        continue;
                    }
                    let inner = &rows23[i23];
                    for i2 in 0..d2 {
                        for i3 in 0..d3 {
                            psi_b[(i1 * d2 + i2) * d3 + i3] += amp * inner[i2 * d3 + i3];
                        }
                    }
                }
            }
            let overlap: f64 = psi_a.iter().zip(psi_b.iter()).map(|(a, b)| a * b).sum();
            let phase = if ((j1 + j2 + j3 + jtot) as i64) % 2 == 0 { 1.0 } else { -1.0 };
            let want = phase
                * ((2.0 * j12 + 1.0) * (2.0 * j23 + 1.0)).sqrt()
                * wigner6j(j1, j2, j12, j3, jtot, j23).unwrap();
            assert!(
                (overlap - want).abs() < 1e-10,
                "recoupling mismatch for {:?}: {} vs {}",
                (j1, j2, j3, j12, j23, jtot),
                overlap,
                want
            );
        };
        // Two spin-1/2 pairs case from the contract plus a few others.
        check(0.5, 0.5, 0.5, 1.0, 1.0, 0.5);
        check(0.5, 0.5, 0.5, 1.0, 0.0, 0.5);
        check(0.5, 0.5, 0.5, 0.0, 1.0, 0.5);
        check(1.0, 0.5, 0.5, 1.5, 1.0, 1.0);
        check(1.0, 1.0, 1.0, 2.0, 1.0, 1.0);
    }

    #[test]
    fn cg_completeness_as_unitary() {
        // Stack CG coefficients <j1 m1; j2 m2 | J M> into a matrix; must be
        // orthogonal (real unitary) over the product space.
        let (j1, j2): (f64, f64) = (3.0, 1.0);
        let d1 = 7;
        let d2 = 3;
        let dim = d1 * d2;
        let mut u: CMat = Array2::zeros((dim, dim));
        let mut row = 0;
        let mut jtot = j1 + j2;
        while jtot >= (j1 - j2).abs() - 1e-9 {
            let dj = (2.0 * jtot) as usize + 1;
            for k in 0..dj {
                let m = jtot - k as f64;
                for i1 in 0..d1 {
                    for i2 in 0..d2 {
                        let m1 = j1 - i1 as f64;
                        let m2 = j2 - i2 as f64;
                        if (m1 + m2 - m).abs() > 1e-9 {
                            continue;
                        }
                        let c = clebsch_gordan(j1, m1, j2, m2, jtot, m).unwrap();
                        u[[row, i1 * d2 + i2]] = Complex64::new(c, 0.0);
                    }
                }
                row += 1;
            }
            jtot -= 1.0;
        }
        assert_eq!(row, dim);
        let g = qudit_core::linalg::dagger(&u).dot(&u);
        let dev = qudit_core::linalg::frobenius_norm(&(&g - &qudit_core::linalg::identity(dim)));
        assert!(dev < 1e-12, "CG matrix not unitary: {dev:.3e}");
    }
}
