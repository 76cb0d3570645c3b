//! AC-Stark light-shift Hamiltonian on a ground hyperfine manifold, summed
//! over the coupled excited levels, with scalar / vector / tensor parts.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::basis::spin_operators;
use qudit_core::{CMat, QuditOperator};

use crate::angular::wigner6j;
use crate::constants::{GROUND_J, NUCLEAR_SPIN};
use crate::params::LightFieldParams;
use crate::HamiltonianError;

/// Oscillator-strength coefficient |K|^2 for the F -> F' transition.
fn k_coeff_sq(f: f64, f_ex: f64, j_ex: f64) -> Result<f64, HamiltonianError> {
    let k = ((2.0 * j_ex + 1.0) * (2.0 * f + 1.0)).sqrt()
        * wigner6j(f_ex, NUCLEAR_SPIN, j_ex, GROUND_J, 1.0, f)?;
    Ok(k * k)
}

/// Rank-K tensor coefficients C^(K)_{FF'} from the Wigner-Eckart reduction.
fn c_coeffs(f: f64, f_ex: f64, j_ex: f64) -> Result<(f64, f64, f64), HamiltonianError> {
    let ksq = k_coeff_sq(f, f_ex, j_ex)?;
    let phase_exp = (3.0 * f - f_ex).round() as i64;
    let base_phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let c0 = -base_phase * (1.0 / 3.0f64.sqrt()) * (2.0 * f_ex + 1.0) / (2.0 * f + 1.0).sqrt()
        * wigner6j(f, 1.0, f_ex, 1.0, f, 0.0)?
        * ksq;
    let c1 = base_phase * (1.5f64).sqrt() * (2.0 * f_ex + 1.0)
        / (f * (f + 1.0) * (2.0 * f + 1.0)).sqrt()
        * wigner6j(f, 1.0, f_ex, 1.0, f, 1.0)?
        * ksq;
    let c2 = base_phase * 30.0f64.sqrt() * (2.0 * f_ex + 1.0)
        / (f * (f + 1.0) * (2.0 * f + 1.0) * (2.0 * f - 1.0) * (2.0 * f + 3.0)).sqrt()
        * wigner6j(f, 1.0, f_ex, 1.0, f, 2.0)?
        * ksq;
    Ok((c0, c1, c2))
}

/// AC-Stark prefactor V0 in angular frequency units,
/// (Gamma/8)(I/I_sat) (Delta/Gamma) / ((Delta/Gamma)^2 + 1/4), times the
/// line-strength normalization 3 that makes the rank-0 coefficients summed
/// over the line's excited levels equal one (they match the tabulated
/// cesium hyperfine strength factors: 3 C0_{3F'} = {1/4, 3/4}).
fn v0(intensity_ratio: f64, delta: f64, gamma: f64) -> f64 {
    let x = delta / gamma;
    3.0 * (gamma / 8.0) * intensity_ratio * x / (x * x + 0.25)
}

/// Light-shift Hamiltonian on the 2F+1 dimensional manifold F.
pub fn light_shift(f: i32, field: &LightFieldParams) -> Result<QuditOperator, HamiltonianError> {
    field.validate()?;
    if f != 3 && f != 4 {
        return Err(HamiltonianError::InvalidParameter(format!(
            "ground manifold F={f} out of range"
        )));
    }
    let ff = f as f64;
    let dim = (2 * f + 1) as usize;
    let (fx, fy, fz) = spin_operators(ff)?;
    let fx = fx.entries();
    let fy = fy.entries();
    let fz = fz.entries();

    let eps: Vec<Complex64> = field
        .polarization
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    let eps_norm2: f64 = eps.iter().map(|z| z.norm_sqr()).sum();

    // eps* x eps is purely imaginary; the Hermitian vector term uses its
    // imaginary part as the fictitious field direction.
    let cross = [
        eps[1].conj() * eps[2] - eps[2].conj() * eps[1],
        eps[2].conj() * eps[0] - eps[0].conj() * eps[2],
        eps[0].conj() * eps[1] - eps[1].conj() * eps[0],
    ];
    let fict = [cross[0].im, cross[1].im, cross[2].im];

    // eps . F and its adjoint square |eps.F|^2 = (eps.F)^dag (eps.F).
    let eps_dot_f = {
        let mut m: CMat = Array2::zeros((dim, dim));
        m = &m + &fx.mapv(|z| z * eps[0]);
        m = &m + &fy.mapv(|z| z * eps[1]);
        m = &m + &fz.mapv(|z| z * eps[2]);
        m
    };
    let eps_f_sq = qudit_core::linalg::dagger(&eps_dot_f).dot(&eps_dot_f);
    let f2_scaled = ff * (ff + 1.0) * eps_norm2 / 3.0;

    let mut h: CMat = Array2::zeros((dim, dim));
    for &f_ex in field.line.excited_levels() {
        // Dipole selection: |F - F'| <= 1 with F=0 -> F'=0 excluded (moot here).
        if (f_ex - f).abs() > 1 {
            continue;
        }
        let delta = field.detuning(f, f_ex)?;
        let v = v0(field.intensity_ratio, delta, field.gamma);
        let (c0, c1, c2) = c_coeffs(ff, f_ex as f64, field.line.j_excited())?;
        for i in 0..dim {
            h[[i, i]] += Complex64::new(v * c0 * eps_norm2, 0.0);
        }
        let vec_op = &fx.mapv(|z| z * fict[0]) + &fy.mapv(|z| z * fict[1]) + &fz.mapv(|z| z * fict[2]);
        h = &h + &vec_op.mapv(|z| z * (v * c1));
        h = &h + &eps_f_sq.mapv(|z| z * (v * c2));
        for i in 0..dim {
            h[[i, i]] -= Complex64::new(v * c2 * f2_scaled, 0.0);
        }
    }
    Ok(QuditOperator::hermitian(h)?)
}

/// Differential scalar (rank-0) shift between the F=4 and F=3 manifolds,
/// the quantity that acts as an effective microwave detuning.
pub fn differential_scalar_shift(field: &LightFieldParams) -> Result<f64, HamiltonianError> {
    field.validate()?;
    let eps_norm2: f64 = field
        .polarization
        .iter()
        .map(|&(re, im)| re * re + im * im)
        .sum();
    let mut shifts = [0.0f64; 2]; // [F=3, F=4]
    for (slot, f) in [(0usize, 3i32), (1usize, 4i32)] {
        for &f_ex in field.line.excited_levels() {
            if (f_ex - f).abs() > 1 {
                continue;
            }
            let delta = field.detuning(f, f_ex)?;
            let v = v0(field.intensity_ratio, delta, field.gamma);
            let (c0, _, _) = c_coeffs(f as f64, f_ex as f64, field.line.j_excited())?;
            shifts[slot] += v * c0 * eps_norm2;
        }
    }
    Ok(shifts[1] - shifts[0])
}

/// Light-shift operator embedded into the canonical 16-dim layout, acting on
/// both manifolds.
pub fn light_shift_full(field: &LightFieldParams) -> Result<QuditOperator, HamiltonianError> {
    let h4 = light_shift(4, field)?;
    let h3 = light_shift(3, field)?;
    let m = qudit_core::embed_block_mat(h4.entries(), h3.entries());
    Ok(QuditOperator::hermitian(m)?)
}
