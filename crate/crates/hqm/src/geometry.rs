//! Microscopic geometry of the device and the lattice sums behind the
//! coupling constants.
//!
//! The YIG sphere is modelled as a simple-cubic lattice of effective
//! spin-s sites at number density ρ (lattice constant a = ρ^(−1/3)),
//! clipped to the sphere. Three quantities are evaluated as sums over the
//! N sampled sites:
//!
//! * flux-qubit–magnon coupling (wire along z at transverse offset r_F,
//!   field of a straight wire B = μ₀ I_p / 2π r):
//!
//!   g_FY = (μ₀/2π)·|γ_e|·I_p·√(2s/N)·Σᵢ 1/r⊥ᵢ
//!
//! * magnon–NV coupling (dipole field of the uniformly precessing
//!   transverse magnetization at the NV position):
//!
//!   g_YN = −(μ₀/4π)·γ_e²·ħ·√(2s/N)·Σᵢ (3cos²θᵢ − 1)/rᵢ³
//!
//! * static NV frequency shift from the polarized sphere:
//!
//!   δ_YN = (μ₀/4π)·γ_e²·ħ·s·Σᵢ (3cos²θᵢ − 1)/rᵢ³
//!
//! where rᵢ is the NV→site distance and θᵢ the angle of that vector to
//! the z quantization axis. The √N factor in the couplings is the
//! collective enhancement of the uniform (Kittel, k = 0) magnon mode; the
//! more spins precess in phase, the stronger the effective coupling.
//!
//! All sums run in a fixed deterministic site order with compensated
//! (Kahan) accumulation, so results are bit-exact across runs and
//! independent of any internal chunking.

use crate::error::{HqmError, Result};
use crate::units::{GAMMA_E, HBAR, MU_0};

/// YIG sphere as a clipped cubic lattice of effective spins.
#[derive(Clone, Debug)]
pub struct YigSphere {
    /// Sphere radius (m). Default 45 nm.
    pub radius: f64,
    /// Cubic lattice constant a = spin_density^(−1/3) (m).
    pub lattice_constant: f64,
    /// Effective spin quantum number per site (dimensionless).
    pub spin_s: f64,
    /// Effective spin sites per m³. Default 4.2e27 (4.2e21 cm⁻³).
    pub spin_density: f64,
    /// Sphere center (m).
    pub center: [f64; 3],
}

impl YigSphere {
    /// Sphere at the origin with lattice constant derived from the density.
    pub fn new(radius: f64, spin_density: f64, spin_s: f64) -> Self {
        YigSphere {
            radius,
            lattice_constant: spin_density.powf(-1.0 / 3.0),
            spin_s,
            spin_density,
            center: [0.0; 3],
        }
    }

    /// Same sphere, displaced center.
    pub fn with_center(mut self, center: [f64; 3]) -> Self {
        self.center = center;
        self
    }

    /// Check physical-range invariants (positive radius and spin).
    pub fn validate(&self) -> Result<()> {
        if self.radius <= 0.0 {
            return Err(HqmError::InvalidParameter(
                "YigSphere: radius must be positive".into(),
            ));
        }
        if self.spin_s <= 0.0 {
            return Err(HqmError::InvalidParameter(
                "YigSphere: spin_s must be positive".into(),
            ));
        }
        if self.spin_density <= 0.0 {
            return Err(HqmError::InvalidParameter(
                "YigSphere: spin_density must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Default geometry: R = 45 nm, ρ = 4.2e27 m⁻³, s = 1/2, centered at origin.
    pub fn default_sphere() -> Self {
        YigSphere::new(45e-9, 4.2e27, 0.5)
    }

    /// Visit every lattice site (fixed deterministic order).
    fn for_each_site(&self, mut f: impl FnMut([f64; 3])) {
        let a = self.lattice_constant;
        let n = (self.radius / a).floor() as i64;
        let r2 = self.radius * self.radius;
        for i in -n..=n {
            let x = a * i as f64;
            for j in -n..=n {
                let y = a * j as f64;
                let xy2 = x * x + y * y;
                if xy2 > r2 {
                    continue;
                }
                for k in -n..=n {
                    let z = a * k as f64;
                    if xy2 + z * z <= r2 {
                        f([
                            self.center[0] + x,
                            self.center[1] + y,
                            self.center[2] + z,
                        ]);
                    }
                }
            }
        }
    }
}

/// Flux-qubit geometry: a persistent-current loop represented by its near
/// wire segment, a straight line parallel to z at transverse position
/// (−r_F, 0) — on the opposite side of the sphere from the NV center.
#[derive(Clone, Debug)]
pub struct FluxQubitGeom {
    /// Persistent current I_p (A). Default 500 nA.
    pub persistent_current: f64,
    /// Transverse distance of the wire from the sphere center (m). Default 0.25 µm.
    pub wire_distance: f64,
}

impl FluxQubitGeom {
    /// Default: I_p = 500 nA at r_F = 0.25 µm.
    pub fn default_geom() -> Self {
        FluxQubitGeom {
            persistent_current: 500e-9,
            wire_distance: 0.25e-6,
        }
    }

    /// Check invariants against the sphere it couples to (wire outside sphere).
    pub fn validate(&self, sphere: &YigSphere) -> Result<()> {
        if self.persistent_current <= 0.0 {
            return Err(HqmError::InvalidParameter(
                "FluxQubitGeom: persistent current must be positive".into(),
            ));
        }
        if self.wire_distance <= sphere.radius {
            return Err(HqmError::InvalidParameter(
                "FluxQubitGeom: wire distance must exceed the sphere radius".into(),
            ));
        }
        Ok(())
    }
}

/// NV-center position; the quantization axis is fixed to z.
#[derive(Clone, Debug)]
pub struct NvGeom {
    /// NV position (m).
    pub position: [f64; 3],
}

impl NvGeom {
    /// Default placement: on the +x axis through the sphere center at
    /// `radius + 60 nm` from the center, i.e. 60 nm outside the surface.
    pub fn default_for(sphere: &YigSphere) -> Self {
        NvGeom {
            position: [
                sphere.center[0] + sphere.radius + 60e-9,
                sphere.center[1],
                sphere.center[2],
            ],
        }
    }

    /// Check that the NV sits outside the sphere.
    pub fn validate(&self, sphere: &YigSphere) -> Result<()> {
        let d2: f64 = (0..3)
            .map(|i| (self.position[i] - sphere.center[i]).powi(2))
            .sum();
        if d2.sqrt() <= sphere.radius {
            return Err(HqmError::InvalidParameter(
                "NvGeom: NV position lies inside the YIG sphere".into(),
            ));
        }
        Ok(())
    }
}

/// Kahan compensated accumulator: the error of a 10⁶-term sum stays at a
/// few ULP regardless of ordering, which keeps the lattice sums bit-stable.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
    #[inline]
    fn value(&self) -> f64 {
        self.sum
    }
}

/// All lattice sites of the sphere, in the fixed deterministic order used
/// by every sum in this module.
pub fn sample_spin_sites(sphere: &YigSphere) -> Vec<[f64; 3]> {
    let mut sites = Vec::new();
    sphere.for_each_site(|s| sites.push(s));
    sites
}

/// Flux-qubit–magnon coupling g_FY (rad/s):
/// (μ₀/2π)·|γ_e|·I_p·√(2s/N)·Σᵢ 1/r⊥ᵢ, with r⊥ᵢ the perpendicular distance
/// from site i to the wire axis.
///
/// Errors if any lattice site falls on the wire axis.
pub fn coupling_g_fy(sphere: &YigSphere, fq: &FluxQubitGeom) -> Result<f64> {
    let wire_x = sphere.center[0] - fq.wire_distance;
    let wire_y = sphere.center[1];
    let mut sum = Kahan::default();
    let mut n: u64 = 0;
    let mut on_axis = false;
    sphere.for_each_site(|s| {
        let dx = s[0] - wire_x;
        let dy = s[1] - wire_y;
        let rperp = (dx * dx + dy * dy).sqrt();
        if rperp < 1e-15 {
            on_axis = true;
        } else {
            sum.add(1.0 / rperp);
        }
        n += 1;
    });
    if on_axis {
        return Err(HqmError::InvalidParameter(
            "coupling_g_fy: a lattice site lies on the flux-qubit wire axis".into(),
        ));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let collective = (2.0 * sphere.spin_s / n as f64).sqrt();
    Ok((MU_0 / (2.0 * std::f64::consts::PI))
        * GAMMA_E.abs()
        * fq.persistent_current
        * collective
        * sum.value())
}

/// Dipole angular sum Σᵢ (3cos²θᵢ − 1)/rᵢ³ over all sites as seen from the
/// NV position (rad-independent geometric factor, units m⁻³), together
/// with the site count.
fn dipole_angular_sum(sphere: &YigSphere, nv: &NvGeom) -> Result<(f64, u64)> {
    nv.validate(sphere)?;
    let mut sum = Kahan::default();
    let mut n: u64 = 0;
    sphere.for_each_site(|s| {
        let dx = s[0] - nv.position[0];
        let dy = s[1] - nv.position[1];
        let dz = s[2] - nv.position[2];
        let r2 = dx * dx + dy * dy + dz * dz;
        let r = r2.sqrt();
        let cos_theta = dz / r;
        sum.add((3.0 * cos_theta * cos_theta - 1.0) / (r2 * r));
        n += 1;
    });
    Ok((sum.value(), n))
}

/// Magnon–NV coupling g_YN (rad/s):
/// −(μ₀/4π)·γ_e²·ħ·√(2s/N)·Σᵢ (3cos²θᵢ − 1)/rᵢ³. The sign is retained;
/// its overall value depends on where the NV sits relative to the sphere.
///
/// Errors if the NV position is inside the sphere.
pub fn coupling_g_yn(sphere: &YigSphere, nv: &NvGeom) -> Result<f64> {
    let (ang, n) = dipole_angular_sum(sphere, nv)?;
    if n == 0 {
        return Ok(0.0);
    }
    let collective = (2.0 * sphere.spin_s / n as f64).sqrt();
    Ok(-(MU_0 / (4.0 * std::f64::consts::PI)) * GAMMA_E * GAMMA_E * HBAR * collective * ang)
}

/// Static NV frequency shift δ_YN (rad/s) caused by the polarized sphere:
/// (μ₀/4π)·γ_e²·ħ·s·Σᵢ (3cos²θᵢ − 1)/rᵢ³. Linear in the per-site spin s
/// (every site contributes its full static moment — no collective √N here).
pub fn shift_delta_yn(sphere: &YigSphere, nv: &NvGeom) -> Result<f64> {
    let (ang, _) = dipole_angular_sum(sphere, nv)?;
    Ok((MU_0 / (4.0 * std::f64::consts::PI)) * GAMMA_E * GAMMA_E * HBAR * sphere.spin_s * ang)
}

/// Anchoring of the uniform-mode (Kittel) frequency: the absolute offset
/// is not predicted from exchange constants but calibrated at the transfer
/// operating point, where the flux-qubit–magnon detuning is known.
#[derive(Clone, Copy, Debug)]
pub struct KittelCalibration {
    /// Bias field at the anchor point (T).
    pub b_anchor: f64,
    /// Kittel angular frequency at the anchor point (rad/s).
    pub omega_at_anchor: f64,
}

/// Uniform-mode magnon frequency at total bias field `b_total`:
/// ω_K(B) = ω_K(B_anchor) + |γ_e|·(B − B_anchor). The slope is exactly the
/// electron gyromagnetic ratio; only the offset is calibration.
pub fn kittel_frequency(b_total: f64, cal: &KittelCalibration) -> f64 {
    cal.omega_at_anchor + GAMMA_E.abs() * (b_total - cal.b_anchor)
}
