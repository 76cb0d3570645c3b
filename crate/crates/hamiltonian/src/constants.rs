//! Physical constants for the cesium 6S_1/2 qudit and the D-line optical
//! transitions. Frequencies are angular (rad/s) unless suffixed `_hz`.

use std::f64::consts::TAU;

/// Electron spin g-factor.
pub const G_S: f64 = 2.0023193;
/// Cesium-133 nuclear g-factor (Steck, Cs D line data).
pub const G_I: f64 = -0.00039885395;
/// Nuclear spin quantum number.
pub const NUCLEAR_SPIN: f64 = 3.5;
/// Ground-state electronic angular momentum (6S_1/2).
pub const GROUND_J: f64 = 0.5;

/// Ground hyperfine splitting, rad/s (9.192631770 GHz exactly defines the SI
/// second).
pub const E_HF: f64 = TAU * 9.192_631_770e9;

/// D1 line (6P_1/2) natural linewidth, rad/s.
pub const GAMMA_D1: f64 = TAU * 4.5612e6;
/// D2 line (6P_3/2) natural linewidth, rad/s.
pub const GAMMA_D2: f64 = TAU * 5.2227e6;

/// D1 excited-state hyperfine splitting F'=3 to F'=4, rad/s.
pub const D1_HF_SPLITTING: f64 = TAU * 1.16768e9;

/// D1 far-detuned saturation intensity, mW/cm^2.
pub const I_SAT_D1_MW_CM2: f64 = 2.4989;

/// Lande g-factor of a ground hyperfine manifold F, from the standard
/// spin-1/2 + nuclear-spin composition.
pub fn lande_g(f: f64) -> f64 {
    let s = 0.5;
    let i = NUCLEAR_SPIN;
    let ff1 = f * (f + 1.0);
    G_S * (ff1 + s * (s + 1.0) - i * (i + 1.0)) / (2.0 * ff1)
        + G_I * (ff1 - s * (s + 1.0) + i * (i + 1.0)) / (2.0 * ff1)
}

/// Ratio g^(3)/g^(4); negative because the manifolds precess oppositely.
pub fn g_ratio() -> f64 {
    lande_g(3.0) / lande_g(4.0)
}
