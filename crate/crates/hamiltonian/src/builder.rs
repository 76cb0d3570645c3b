//! Construction of the static, rf and microwave Hamiltonians in the
//! transformed rotating frame, with corrections beyond the plain RWA, and
//! their analytic derivatives with respect to the control phases.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::basis::{projector_f3, projector_f4, spin_operators};
use qudit_core::{embed_block_mat, BasisLabel, CMat, QuditOperator};

use crate::angular::clebsch_gordan;
use crate::params::HamiltonianParams;
use crate::HamiltonianError;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Embedded spin operators and projectors cached for builder calls.
#[derive(Debug, Clone)]
pub(crate) struct SpinFrames {
    pub f4x: CMat,
    pub f4y: CMat,
    pub f4z: CMat,
    pub f3x: CMat,
    pub f3y: CMat,
    pub f3z: CMat,
    pub f4z2: CMat,
    pub f3z2: CMat,
    pub p4: CMat,
    pub p3: CMat,
}

impl SpinFrames {
    fn new() -> Self {
        let (fx4, fy4, fz4) = spin_operators(4.0).expect("spin-4 operators");
        let (fx3, fy3, fz3) = spin_operators(3.0).expect("spin-3 operators");
        let zero7: CMat = Array2::zeros((7, 7));
        let zero9: CMat = Array2::zeros((9, 9));
        let f4z = embed_block_mat(fz4.entries(), &zero7);
        let f3z = embed_block_mat(&zero9, fz3.entries());
        SpinFrames {
            f4x: embed_block_mat(fx4.entries(), &zero7),
            f4y: embed_block_mat(fy4.entries(), &zero7),
            f4z2: f4z.dot(&f4z),
            f3z2: f3z.dot(&f3z),
            f4z,
            f3x: embed_block_mat(&zero9, fx3.entries()),
            f3y: embed_block_mat(&zero9, fy3.entries()),
            f3z,
            p4: projector_f4(),
            p3: projector_f3(),
        }
    }
}

pub(crate) fn frames() -> &'static SpinFrames {
    use std::sync::OnceLock;
    static FRAMES: OnceLock<SpinFrames> = OnceLock::new();
    FRAMES.get_or_init(SpinFrames::new)
}

fn scaled(m: &CMat, c: f64) -> CMat {
    m.mapv(|z| z * c)
}

/// Static Hamiltonian in the transformed frame: Breit-Rabi constants, the
/// quadratic Zeeman term, and the frame detuning terms. The hyperfine block
/// offset E_HF/2 (P4 - P3) cancels against the frame transformation and is
/// not retained here; keeping it would detune the microwave pseudospin by
/// the full ground splitting and remove inter-manifold control.
pub fn h_static(p: &HamiltonianParams) -> Result<QuditOperator, HamiltonianError> {
    p.validate()?;
    let fr = frames();
    let quad = p.g_r * p.omega0 * p.omega0 / p.e_hf;
    let block = 1.5 * p.omega0 * (1.0 + p.g_r) - 12.5 * quad
        - 0.5 * (p.delta_uw - 7.0 * p.delta_rf);
    let mut h = scaled(&fr.p4, block);
    h = &h - &scaled(&fr.p3, block);
    h = &h + &scaled(&fr.f3z, p.omega0 * (1.0 + p.g_r));
    h = &h + &scaled(&fr.f4z2, quad);
    h = &h - &scaled(&fr.f3z2, quad);
    h = &h - &scaled(&fr.f4z, p.delta_rf);
    h = &h + &scaled(&fr.f3z, p.delta_rf);
    Ok(QuditOperator::hermitian(h)?)
}

/// Static Hamiltonian with its trace part removed; useful when comparing
/// matrices directly rather than through fidelities.
pub fn h_static_traceless(p: &HamiltonianParams) -> Result<QuditOperator, HamiltonianError> {
    let h = h_static(p)?;
    let d = h.dim() as f64;
    let tr = h.trace().re / d;
    let m = h.entries() - &scaled(&qudit_core::linalg::identity(h.dim()), tr);
    Ok(QuditOperator::hermitian(m)?)
}

/// rf Hamiltonian in the transformed frame. With `c_rwa` off this is the
/// plain rotating-wave form; with it on, the Bloch-Siegert-type averaged
/// corrections are included.
pub fn h_rf(p: &HamiltonianParams, phi_x: f64, phi_y: f64) -> Result<QuditOperator, HamiltonianError> {
    p.validate()?;
    Ok(QuditOperator::hermitian(h_rf_mat(p, phi_x, phi_y))?)
}

pub fn h_rf_mat(p: &HamiltonianParams, phi_x: f64, phi_y_raw: f64) -> CMat {
    let fr = frames();
    let phi_y = phi_y_raw + p.phase_mismatch;
    let c = if p.c_rwa { 1.0 } else { 0.0 };
    let g = p.g_r;
    let w = p.omega_rf_drive;
    let corr = c * p.omega0 * (1.0 - g) / (2.0 * w);
    let km = 1.0 - corr;
    let kp = 1.0 + corr;
    let dr = c * p.delta_rf / (2.0 * w);

    let (sx, cx) = phi_x.sin_cos();
    let (sy, cy) = phi_y.sin_cos();

    let mut h: CMat = Array2::zeros((16, 16));
    let ax = 0.5 * p.omega_x;
    // First line pair: resonant x drive with corrected F3 weights.
    h = &h + &scaled(&fr.f4x, ax * cx);
    h = &h - &scaled(&fr.f3x, ax * cx * g * km);
    h = &h - &scaled(&fr.f4y, ax * sx);
    h = &h - &scaled(&fr.f3y, ax * sx * g * kp);
    // Detuning cross terms for x.
    h = &h + &scaled(&fr.f4x, ax * dr * sx);
    h = &h - &scaled(&fr.f3x, ax * dr * g * cx);
    h = &h - &scaled(&fr.f4y, ax * dr * cx);
    h = &h - &scaled(&fr.f3y, ax * dr * g * sx);

    let ay = 0.5 * p.omega_y;
    // Resonant y drive.
    h = &h + &scaled(&fr.f4y, ay * cy);
    h = &h - &scaled(&fr.f3y, ay * cy * g * km);
    h = &h + &scaled(&fr.f4x, ay * sy);
    h = &h + &scaled(&fr.f3x, ay * sy * g * kp);
    // Detuning cross terms for y.
    h = &h + &scaled(&fr.f4x, ay * dr * cy);
    h = &h + &scaled(&fr.f3x, ay * dr * g * sy);
    h = &h + &scaled(&fr.f4y, ay * dr * sy);
    h = &h + &scaled(&fr.f3y, ay * dr * g * cy);

    // Quadratic light-shift-like Fz corrections.
    if c != 0.0 {
        let ox2 = p.omega_x * p.omega_x * (1.0 - 2.0 * (2.0 * phi_x).cos());
        let oy2 = p.omega_y * p.omega_y * (1.0 - 2.0 * (2.0 * phi_y).cos());
        let cross = 2.0 * p.omega_x * p.omega_y * (phi_x - phi_y).sin();
        let z4 = (ox2 + oy2 + cross) / (16.0 * w);
        let z3 = -(g * g) * (ox2 + oy2 - cross) / (16.0 * w);
        h = &h + &scaled(&fr.f4z, z4);
        h = &h + &scaled(&fr.f3z, z3);
    }
    h
}

/// Analytic derivatives (dH_rf/dphi_x, dH_rf/dphi_y).
pub fn h_rf_phase_gradients(p: &HamiltonianParams, phi_x: f64, phi_y_raw: f64) -> (CMat, CMat) {
    let fr = frames();
    let phi_y = phi_y_raw + p.phase_mismatch;
    let c = if p.c_rwa { 1.0 } else { 0.0 };
    let g = p.g_r;
    let w = p.omega_rf_drive;
    let corr = c * p.omega0 * (1.0 - g) / (2.0 * w);
    let km = 1.0 - corr;
    let kp = 1.0 + corr;
    let dr = c * p.delta_rf / (2.0 * w);

    let (sx, cx) = phi_x.sin_cos();
    let (sy, cy) = phi_y.sin_cos();
    let ax = 0.5 * p.omega_x;
    let ay = 0.5 * p.omega_y;

    let mut dx: CMat = Array2::zeros((16, 16));
    dx = &dx - &scaled(&fr.f4x, ax * sx);
    dx = &dx + &scaled(&fr.f3x, ax * sx * g * km);
    dx = &dx - &scaled(&fr.f4y, ax * cx);
    dx = &dx - &scaled(&fr.f3y, ax * cx * g * kp);
    dx = &dx + &scaled(&fr.f4x, ax * dr * cx);
    dx = &dx + &scaled(&fr.f3x, ax * dr * g * sx);
    dx = &dx + &scaled(&fr.f4y, ax * dr * sx);
    dx = &dx - &scaled(&fr.f3y, ax * dr * g * cx);

    let mut dy: CMat = Array2::zeros((16, 16));
    dy = &dy - &scaled(&fr.f4y, ay * sy);
    dy = &dy + &scaled(&fr.f3y, ay * sy * g * km);
    dy = &dy + &scaled(&fr.f4x, ay * cy);
    dy = &dy + &scaled(&fr.f3x, ay * cy * g * kp);
    dy = &dy - &scaled(&fr.f4x, ay * dr * sy);
    dy = &dy + &scaled(&fr.f3x, ay * dr * g * cy);
    dy = &dy + &scaled(&fr.f4y, ay * dr * cy);
    dy = &dy - &scaled(&fr.f3y, ay * dr * g * sy);

    if c != 0.0 {
        let dx_sq = 4.0 * p.omega_x * p.omega_x * (2.0 * phi_x).sin();
        let dy_sq = 4.0 * p.omega_y * p.omega_y * (2.0 * phi_y).sin();
        let cross_c = 2.0 * p.omega_x * p.omega_y * (phi_x - phi_y).cos();
        dx = &dx + &scaled(&fr.f4z, (dx_sq + cross_c) / (16.0 * w));
        dx = &dx + &scaled(&fr.f3z, -(g * g) * (dx_sq - cross_c) / (16.0 * w));
        dy = &dy + &scaled(&fr.f4z, (dy_sq - cross_c) / (16.0 * w));
        dy = &dy + &scaled(&fr.f3z, -(g * g) * (dy_sq + cross_c) / (16.0 * w));
    }
    (dx, dy)
}

/// Pseudospin operators sigma_x/y/z^(m) for the |3,m> <-> |4,m+1> transition
/// in the canonical layout.
fn sigma_ops(m: i32) -> (CMat, CMat, CMat) {
    let up = BasisLabel::index_of(4, m + 1).expect("upper state");
    let dn = BasisLabel::index_of(3, m).expect("lower state");
    let mut sx: CMat = Array2::zeros((16, 16));
    let mut sy: CMat = Array2::zeros((16, 16));
    let mut sz: CMat = Array2::zeros((16, 16));
    sx[[up, dn]] = C_ONE;
    sx[[dn, up]] = C_ONE;
    sy[[up, dn]] = Complex64::new(0.0, 1.0);
    sy[[dn, up]] = Complex64::new(0.0, -1.0);
    sz[[up, up]] = C_ONE;
    sz[[dn, dn]] = -C_ONE;
    (sx, sy, sz)
}

fn cg_sigma_plus(m: i32) -> f64 {
    clebsch_gordan(3.0, m as f64, 1.0, 1.0, 4.0, m as f64 + 1.0).expect("CG coefficient")
}

/// Microwave detuning of the off-resonant |3,m> -> |4,m+1> transition,
/// relative to the drive locked near the |3,3> -> |4,4> resonance. Includes
/// the linear Zeeman splitting of the two manifolds and the quadratic term.
fn delta_uw_m(p: &HamiltonianParams, m: i32) -> f64 {
    let mf = m as f64;
    let quad = p.g_r * p.omega0 * p.omega0 / p.e_hf;
    p.delta_uw - (mf - 3.0) * (1.0 - p.g_r) * p.omega0
        - quad * ((mf + 1.0) * (mf + 1.0) + mf * mf - 25.0)
}

/// Microwave Hamiltonian in the transformed frame: resonant pseudospin drive
/// on |4,4> <-> |3,3>, plus (when corrections are on) the AC Zeeman shifts
/// and the residual off-resonant sigma+ driving of the other transitions.
pub fn h_uw(p: &HamiltonianParams, phi_uw: f64) -> Result<QuditOperator, HamiltonianError> {
    p.validate()?;
    Ok(QuditOperator::hermitian(h_uw_mat(p, phi_uw))?)
}

pub fn h_uw_mat(p: &HamiltonianParams, phi_uw: f64) -> CMat {
    let (s, c) = phi_uw.sin_cos();
    let mut h: CMat = Array2::zeros((16, 16));
    if p.omega_uw == 0.0 {
        return h;
    }
    let (sx, sy, _) = sigma_ops(3);
    let half = 0.5 * p.omega_uw;
    h = &h + &scaled(&sx, half * c);
    h = &h + &scaled(&sy, half * s);
    if p.c_rwa {
        for m in -3..3 {
            let cg = cg_sigma_plus(m);
            let (sxm, sym, szm) = sigma_ops(m);
            let ac = p.omega_uw * p.omega_uw / (8.0 * p.omega0) * cg * cg / (3.0 - m as f64);
            h = &h + &scaled(&szm, ac);
            let drive = -p.omega_uw / p.omega_rf_drive * cg * delta_uw_m(p, m)
                / (4.0 * (m as f64 - 3.0));
            h = &h + &scaled(&sxm, drive * c);
            h = &h + &scaled(&sym, drive * s);
        }
    }
    h
}

/// Analytic derivative dH_uw/dphi_uw.
pub fn h_uw_phase_gradient(p: &HamiltonianParams, phi_uw: f64) -> CMat {
    let (s, c) = phi_uw.sin_cos();
    let mut h: CMat = Array2::zeros((16, 16));
    if p.omega_uw == 0.0 {
        return h;
    }
    let (sx, sy, _) = sigma_ops(3);
    let half = 0.5 * p.omega_uw;
    h = &h - &scaled(&sx, half * s);
    h = &h + &scaled(&sy, half * c);
    if p.c_rwa {
        for m in -3..3 {
            let cg = cg_sigma_plus(m);
            let (sxm, sym, _) = sigma_ops(m);
            let drive = -p.omega_uw / p.omega_rf_drive * cg * delta_uw_m(p, m)
                / (4.0 * (m as f64 - 3.0));
            h = &h - &scaled(&sxm, drive * s);
            h = &h + &scaled(&sym, drive * c);
        }
    }
    h
}

/// Full control Hamiltonian for one phase triple.
pub fn h_total(
    p: &HamiltonianParams,
    phi_x: f64,
    phi_y: f64,
    phi_uw: f64,
) -> Result<QuditOperator, HamiltonianError> {
    let stat = h_static(p)?;
    let m = stat.entries() + &h_rf_mat(p, phi_x, phi_y) + &h_uw_mat(p, phi_uw);
    Ok(QuditOperator::hermitian(m)?)
}

/// Raw-matrix form of [`h_total`] without role validation, for hot loops.
pub fn h_total_mat(p: &HamiltonianParams, phi_x: f64, phi_y: f64, phi_uw: f64) -> CMat {
    let stat = h_static(p).expect("validated params").into_entries();
    &stat + &h_rf_mat(p, phi_x, phi_y) + &h_uw_mat(p, phi_uw)
}

#[allow(unused)]
fn unused_marker() {
    let _ = C_ZERO;
}

#[cfg(test)]
mod tests {
    use super::*;
    use qudit_core::linalg::{frobenius_norm, hermiticity_error};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::TAU;

    #[test]
    fn static_zero_field_is_block_offset_only() {
        let p = HamiltonianParams {
            omega0: 0.0,
            omega_x: 0.0,
            omega_y: 0.0,
            omega_uw: 0.0,
            delta_rf: 0.0,
            delta_uw: 0.0,
            ..Default::default()
        };
        let h = h_static(&p).unwrap();
        // Must be exactly proportional to (P4 - P3); at zero field every
        // transformed-frame constant vanishes, so the coefficient is zero.
        let fr = frames();
        let coeff = h.entries()[[0, 0]];
        let expect = &scaled(&fr.p4, coeff.re) - &scaled(&fr.p3, coeff.re);
        assert!(frobenius_norm(&(h.entries() - &expect)) < 1e-9);
        assert!(coeff.re.abs() < 1e-9);
    }

    #[test]
    fn static_quadratic_zeeman_coefficient() {
        // The coefficient of (Fz^4)^2 equals g_r Omega0^2 / E_HF: read it off
        // by differencing diagonal entries of the F=4 block.
        let p = HamiltonianParams::default();
        let h = h_static(&p).unwrap();
        let quad = p.g_r * p.omega0 * p.omega0 / p.e_hf;
        // h[mF] = const + lin * mF + quad * mF^2 on the F=4 block.
        let e = |m: i32| h.entries()[[BasisLabel::index_of(4, m).unwrap(), BasisLabel::index_of(4, m).unwrap()]].re;
        let second_diff = e(2) - 2.0 * e(1) + e(0);
        assert!(
            (second_diff - 2.0 * quad).abs() < 1e-6 * quad.abs(),
            "{second_diff} vs {}",
            2.0 * quad
        );
    }

    #[test]
    fn static_is_diagonal() {
        let h = h_static(&HamiltonianParams::default()).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                if i != j {
                    assert_eq!(h.entries()[[i, j]], C_ZERO);
                }
            }
        }
    }

    #[test]
    fn rf_plain_rwa_zero_phase() {
        // c_rwa = 0, zero phases, Omega_y = 0: (Omega_x/2)(F4x - g_r F3x).
        let p = HamiltonianParams {
            c_rwa: false,
            omega_y: 0.0,
            ..Default::default()
        };
        let h = h_rf(&p, 0.0, 0.0).unwrap();
        let fr = frames();
        let expect = &scaled(&fr.f4x, 0.5 * p.omega_x) - &scaled(&fr.f3x, 0.5 * p.omega_x * p.g_r);
        assert!(frobenius_norm(&(h.entries() - &expect)) < 1e-9);
    }

    #[test]
    fn rf_zero_amplitude_vanishes() {
        let p = HamiltonianParams {
            omega_x: 0.0,
            omega_y: 0.0,
            ..Default::default()
        };
        let h = h_rf(&p, 0.7, -0.3).unwrap();
        assert!(frobenius_norm(h.entries()) < 1e-30);
    }

    #[test]
    fn rf_correction_terms_match_independent_assembly() {
        // Difference between corrected and plain RWA equals the correction
        // terms assembled separately.
        let phi_x = 0.83;
        let phi_y = -1.21;
        let p_on = HamiltonianParams { delta_rf: TAU * 40.0, ..Default::default() };
        let p_off = HamiltonianParams { c_rwa: false, ..p_on.clone() };
        let diff = h_rf(&p_on, phi_x, phi_y).unwrap().into_entries()
            - h_rf(&p_off, phi_x, phi_y).unwrap().into_entries();

        let fr = frames();
        let g = p_on.g_r;
        let w = p_on.omega_rf_drive;
        let corr = p_on.omega0 * (1.0 - g) / (2.0 * w);
        let dr = p_on.delta_rf / (2.0 * w);
        let (sx, cx) = phi_x.sin_cos();
        let (sy, cy) = phi_y.sin_cos();
        let ax = 0.5 * p_on.omega_x;
        let ay = 0.5 * p_on.omega_y;
        let mut expect: CMat = Array2::zeros((16, 16));
        // Corrections to the resonant weights (only F3 components shift).
        expect = &expect + &scaled(&fr.f3x, ax * cx * g * corr);
        expect = &expect - &scaled(&fr.f3y, ax * sx * g * corr);
        expect = &expect + &scaled(&fr.f3y, ay * cy * g * corr);
        expect = &expect + &scaled(&fr.f3x, ay * sy * g * corr);
        // Detuning cross terms.
        expect = &expect + &scaled(&fr.f4x, ax * dr * sx);
        expect = &expect - &scaled(&fr.f3x, ax * dr * g * cx);
        expect = &expect - &scaled(&fr.f4y, ax * dr * cx);
        expect = &expect - &scaled(&fr.f3y, ax * dr * g * sx);
        expect = &expect + &scaled(&fr.f4x, ay * dr * cy);
        expect = &expect + &scaled(&fr.f3x, ay * dr * g * sy);
        expect = &expect + &scaled(&fr.f4y, ay * dr * sy);
        expect = &expect + &scaled(&fr.f3y, ay * dr * g * cy);
        // Quadratic Fz terms.
        let ox2 = p_on.omega_x * p_on.omega_x * (1.0 - 2.0 * (2.0 * phi_x).cos());
        let oy2 = p_on.omega_y * p_on.omega_y * (1.0 - 2.0 * (2.0 * phi_y).cos());
        let cross = 2.0 * p_on.omega_x * p_on.omega_y * (phi_x - phi_y).sin();
        expect = &expect + &scaled(&fr.f4z, (ox2 + oy2 + cross) / (16.0 * w));
        expect = &expect + &scaled(&fr.f3z, -(g * g) * (ox2 + oy2 - cross) / (16.0 * w));

        assert!(frobenius_norm(&(&diff - &expect)) < 1e-6);
    }

    #[test]
    fn uw_plain_rwa_is_pseudospin_flip() {
        let p = HamiltonianParams { c_rwa: false, ..Default::default() };
        let h = h_uw(&p, 0.0).unwrap();
        let i44 = BasisLabel::index_of(4, 4).unwrap();
        let i33 = BasisLabel::index_of(3, 3).unwrap();
        let mut expect: CMat = Array2::zeros((16, 16));
        expect[[i44, i33]] = Complex64::new(0.5 * p.omega_uw, 0.0);
        expect[[i33, i44]] = Complex64::new(0.5 * p.omega_uw, 0.0);
        assert!(frobenius_norm(&(h.entries() - &expect)) < 1e-9);
    }

    #[test]
    fn uw_zero_amplitude_vanishes() {
        let p = HamiltonianParams { omega_uw: 0.0, ..Default::default() };
        let h = h_uw(&p, 1.3).unwrap();
        assert!(frobenius_norm(h.entries()) == 0.0);
    }

    #[test]
    fn uw_ac_zeeman_scaling() {
        let p = HamiltonianParams::default();
        let h = h_uw(&p, 0.0).unwrap();
        for m in -3..3 {
            let up = BasisLabel::index_of(4, m + 1).unwrap();
            let cg = cg_sigma_plus(m);
            let expect = p.omega_uw * p.omega_uw / (8.0 * p.omega0) * cg * cg / (3.0 - m as f64);
            assert!(
                (h.entries()[[up, up]].re - expect).abs() < 1e-9 * expect.abs().max(1.0),
                "m = {m}"
            );
        }
    }

    #[test]
    fn total_hermitian_at_random_phases() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2024);
        let p = HamiltonianParams { delta_rf: TAU * 15.0, delta_uw: TAU * 105.0, ..Default::default() };
        for _ in 0..100 {
            let hx: f64 = rng.gen::<f64>() * TAU;
            let hy: f64 = rng.gen::<f64>() * TAU;
            let hu: f64 = rng.gen::<f64>() * TAU;
            let h = h_total(&p, hx, hy, hu).unwrap();
            assert!(hermiticity_error(h.entries()) < 1e-12 * p.e_hf);
        }
    }

    #[test]
    fn total_matches_sum_of_parts() {
        let p = HamiltonianParams::default();
        let h = h_total(&p, 0.0, 0.0, 0.0).unwrap();
        let sum = h_static(&p).unwrap().into_entries()
            + h_rf_mat(&p, 0.0, 0.0)
            + h_uw_mat(&p, 0.0);
        assert!(frobenius_norm(&(h.entries() - &sum)) == 0.0);
    }

    #[test]
    fn phase_periodicity() {
        let p = HamiltonianParams::default();
        for (a, b) in [(0.37, 0.37 + TAU), (-1.2, -1.2 + TAU)] {
            let h1 = h_rf_mat(&p, a, 0.1);
            let h2 = h_rf_mat(&p, b, 0.1);
            assert!(frobenius_norm(&(&h1 - &h2)) < 1e-12 * p.omega_x);
            let u1 = h_uw_mat(&p, a);
            let u2 = h_uw_mat(&p, b);
            assert!(frobenius_norm(&(&u1 - &u2)) < 1e-12 * p.omega_uw);
        }
    }

    #[test]
    fn rf_phase_gradients_match_finite_differences() {
        let p = HamiltonianParams { delta_rf: TAU * 20.0, ..Default::default() };
        let (phi_x, phi_y) = (0.9, -0.4);
        let hstep = 1e-6;
        let (dx, dy) = h_rf_phase_gradients(&p, phi_x, phi_y);
        let fd_x = (&h_rf_mat(&p, phi_x + hstep, phi_y) - &h_rf_mat(&p, phi_x - hstep, phi_y))
            .mapv(|z| z / (2.0 * hstep));
        let fd_y = (&h_rf_mat(&p, phi_x, phi_y + hstep) - &h_rf_mat(&p, phi_x, phi_y - hstep))
            .mapv(|z| z / (2.0 * hstep));
        assert!(frobenius_norm(&(&dx - &fd_x)) < 1e-4);
        assert!(frobenius_norm(&(&dy - &fd_y)) < 1e-4);
        let du = h_uw_phase_gradient(&p, 0.77);
        let fd_u = (&h_uw_mat(&p, 0.77 + hstep) - &h_uw_mat(&p, 0.77 - hstep))
            .mapv(|z| z / (2.0 * hstep));
        assert!(frobenius_norm(&(&du - &fd_u)) < 1e-4);
    }
}
