//! Geometry → coupling pipeline.
//!
//! Builds the default device (45 nm YIG sphere, flux-qubit wire at
//! 0.25 µm, NV center 60 nm above the surface), evaluates the
//! microscopic lattice sums, and prints every derived quantity of the
//! effective three-level model: dispersive shifts, effective couplings
//! g_(±1), and the self-consistent resonance field B_res.
//!
//! Run with: cargo run --example couplings

use hqm::effective::{
    effective_coupling, effective_shifts, resonance_field, EffectiveParams, PhysicalParams,
};
use hqm::geometry::{
    coupling_g_fy, coupling_g_yn, sample_spin_sites, shift_delta_yn, FluxQubitGeom, NvGeom,
    YigSphere,
};
use hqm::units::TWO_PI;

fn main() -> hqm::Result<()> {
    let sphere = YigSphere::default_sphere();
    let fq = FluxQubitGeom::default_geom();
    let nv = NvGeom::default_for(&sphere);

    println!("device geometry");
    println!("  sphere radius     {:>12.1} nm", sphere.radius * 1e9);
    println!("  lattice constant  {:>12.3} nm", sphere.lattice_constant * 1e9);
    println!("  spin sites N      {:>12}", sample_spin_sites(&sphere).len());
    println!("  wire distance     {:>12.2} µm", fq.wire_distance * 1e6);
    println!("  NV standoff       {:>12.1} nm", nv.position[0] * 1e9 - sphere.radius * 1e9);
    println!();

    let g_fy = coupling_g_fy(&sphere, &fq)?;
    let g_yn = coupling_g_yn(&sphere, &nv)?;
    let d_yn = shift_delta_yn(&sphere, &nv)?;
    println!("microscopic couplings (lattice sums)");
    println!("  g_FY/2π           {:>12.4} MHz", g_fy / TWO_PI / 1e6);
    println!("  g_YN/2π           {:>12.4} kHz", g_yn / TWO_PI / 1e3);
    println!("  δ_YN/2π           {:>12.4} MHz", d_yn / TWO_PI / 1e6);
    println!();

    let geom_params = PhysicalParams::from_geometry(&sphere, &fq, &nv, TWO_PI * 2.40e9, TWO_PI * 170e6)?;
    print_effective("geometry-derived parameters", &geom_params)?;

    // The standard operating point used throughout the protocol work:
    // bare couplings chosen so g_(−1)/2π lands at 700 kHz.
    let reference = PhysicalParams::reference();
    print_effective("reference operating point", &reference)?;
    Ok(())
}

fn print_effective(title: &str, p: &PhysicalParams) -> hqm::Result<()> {
    let (d_f, d_n_minus, d_n_plus) = effective_shifts(p)?;
    let g_minus = effective_coupling(p, -1)?;
    let g_plus = effective_coupling(p, 1)?;
    let b_res = resonance_field(p)?;
    let e = EffectiveParams::from_physical(p)?;
    println!("{title}");
    println!("  δ_F/2π            {:>12.4} kHz", d_f / TWO_PI / 1e3);
    println!("  δ_N,(−1)/2π       {:>12.4} kHz", d_n_minus / TWO_PI / 1e3);
    println!("  δ_N,(+1)/2π       {:>12.4} kHz", d_n_plus / TWO_PI / 1e3);
    println!("  g_(−1)/2π         {:>12.4} kHz", g_minus / TWO_PI / 1e3);
    println!("  g_(+1)/2π         {:>12.4} kHz", g_plus / TWO_PI / 1e3);
    println!("  g_(+1)/g_(−1)     {:>12.6}", e.g_plus / e.g_minus);
    println!("  B_res             {:>12.6} mT", b_res * 1e3);
    println!("  Ω = 2γ_e·B_res/2π {:>12.4} MHz", e.omega_fast() / TWO_PI / 1e6);
    println!();
    Ok(())
}
