//! Physical constants and unit conventions.
//!
//! All internal frequencies are angular (rad/s). User-facing interfaces
//! (config files, CSV output, CLI) use ordinary frequencies in Hz; the
//! conversion is exactly `ω = 2π f`. Magnetic fields are tesla internally
//! and gauss (1 G = 10⁻⁴ T) in user-facing text, matching lab convention.

/// 2π, for converting between ordinary frequency (Hz) and angular frequency (rad/s).
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Electron gyromagnetic ratio γ_e in rad s⁻¹ T⁻¹ (negative: magnetic moment
/// is anti-parallel to spin for the electron).
pub const GAMMA_E: f64 = -1.76e11;

/// Vacuum permeability μ₀ in T·m/A.
pub const MU_0: f64 = 1.25663706212e-6;

/// Reduced Planck constant ħ in J·s.
pub const HBAR: f64 = 1.054571817e-34;

/// NV center zero-field splitting Δ_ZS = 2π × 2.87 GHz (rad/s).
pub const DELTA_ZS: f64 = TWO_PI * 2.87e9;

/// Tesla per gauss.
pub const TESLA_PER_GAUSS: f64 = 1e-4;

/// Convert ordinary frequency in Hz to angular frequency in rad/s.
#[inline]
pub fn hz_to_rad(f_hz: f64) -> f64 {
    TWO_PI * f_hz
}

/// Convert angular frequency in rad/s to ordinary frequency in Hz.
#[inline]
pub fn rad_to_hz(omega: f64) -> f64 {
    omega / TWO_PI
}

/// Convert gauss to tesla.
#[inline]
pub fn gauss_to_tesla(b_gauss: f64) -> f64 {
    b_gauss * TESLA_PER_GAUSS
}

/// Convert tesla to gauss.
#[inline]
pub fn tesla_to_gauss(b_tesla: f64) -> f64 {
    b_tesla / TESLA_PER_GAUSS
}
