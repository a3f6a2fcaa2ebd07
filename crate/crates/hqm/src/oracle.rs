//! Brute-force tripartite model: flux qubit ⊗ truncated magnon Fock space
//! ⊗ NV triplet, used to validate the adiabatic elimination behind
//! [`crate::effective`].
//!
//! The full lab-frame Hamiltonian on dims [2, n_max+1, 3] is
//!
//! H = ½ω_F σ_F^z + ω_K a†a + Σ_j (ω_(j) + δ_YN)|j⟩⟨j|
//!     − (g_FY σ_F⁺ a + h.c.) − (g_YN a† S⁻₍₋₁₎ + g_YN a† S⁻₍₊₁₎ + h.c.),
//!
//! i.e. both qubits exchange excitations only with the magnon mode — there
//! is no direct FQ–NV term. The rotating-wave form of the couplings is
//! used (the bare Zeeman couplings are fast compared to every g), and the
//! static sphere shift δ_YN sits on both |±1⟩ levels.
//!
//! [`validate_swt`] evolves this model and the six-level effective model
//! side by side (closed system, exact spectral propagation composed at a
//! validated substep), partial-traces the magnon out of the full state,
//! and reports the maximum trace distance and magnon occupation over a
//! fixed 360-checkpoint grid. Dissipation is deliberately absent here: the
//! reduction being tested is a statement about Hamiltonians.

use num_complex::Complex64;

use crate::effective::{
    build_h_eff_three_level, nv_lower_minus, nv_lower_plus, nv_proj_minus, nv_proj_plus,
    EffectiveParams, PhysicalParams,
};
use crate::error::{HqmError, Result};
use crate::linalg::{
    hermitian_eigen, partial_trace, trace_distance, ComplexMatrix, HilbertSpace, C_ONE, C_ZERO,
};

/// Checkpoints per validation run (inclusive of both endpoints).
pub const SWT_CHECKPOINTS: usize = 360;

/// Truncated tripartite model.
#[derive(Clone, Debug)]
pub struct FullModel {
    /// Magnon Fock cutoff (the Fock factor has dimension n_max + 1).
    pub n_max: usize,
    pub params: PhysicalParams,
    pub space: HilbertSpace,
}

impl FullModel {
    /// Build a model with cutoff `n_max` ≥ 2 (virtual single *and* double
    /// excitation must be representable for the second-order physics to
    /// survive truncation).
    pub fn new(params: PhysicalParams, n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(HqmError::InvalidParameter(format!(
                "magnon cutoff n_max = {n_max} < 2 cannot resolve virtual double excitation"
            )));
        }
        params.validate()?;
        let space = HilbertSpace::new(&[2, n_max + 1, 3]);
        Ok(FullModel {
            n_max,
            params,
            space,
        })
    }

    /// Bias field the model is evaluated at (the transfer operating
    /// point B_L + δB).
    pub fn operating_field(&self) -> f64 {
        self.params.b_l + self.params.delta_b
    }

    /// Default initial state |1_F⟩ ⊗ |0 magnons⟩ ⊗ |0_N⟩.
    pub fn initial_state(&self) -> Vec<Complex64> {
        let nm = self.n_max + 1;
        let mut psi = vec![C_ZERO; 2 * nm * 3];
        psi[(nm + 0) * 3 + 1] = C_ONE; // fq = 1, fock = 0, nv = m_s 0
        psi
    }
}

/// Magnon annihilation operator on the truncated Fock space
/// (dimension n_max + 1): a|n⟩ = √n|n−1⟩.
pub fn annihilation(n_max: usize) -> ComplexMatrix {
    let nm = n_max + 1;
    let mut a = ComplexMatrix::zeros(nm, nm);
    for n in 1..nm {
        a.set(n - 1, n, Complex64::new((n as f64).sqrt(), 0.0));
    }
    a
}

fn kron3(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> ComplexMatrix {
    crate::linalg::kron(&crate::linalg::kron(a, b), c)
}

/// Full tripartite Hamiltonian (see module docs).
pub fn build_full_hamiltonian(m: &FullModel) -> ComplexMatrix {
    let p = &m.params;
    let nm = m.n_max + 1;
    let b = m.operating_field();
    let w_p = p.omega_nv(1, b);
    let w_m = p.omega_nv(-1, b);

    let i2 = ComplexMatrix::identity(2);
    let im = ComplexMatrix::identity(nm);
    let i3 = ComplexMatrix::identity(3);
    let a = annihilation(m.n_max);
    let ad = a.dagger();
    let n_op = ad.matmul(&a);
    let sp = crate::linalg::sigma_plus();
    let sm = crate::linalg::sigma_minus();

    let mut h = kron3(&crate::linalg::sigma_z(), &im, &i3)
        .scale(Complex64::new(0.5 * p.omega_f, 0.0));
    h.add_scaled(&kron3(&i2, &n_op, &i3), Complex64::new(p.omega_k, 0.0));
    h.add_scaled(
        &kron3(&i2, &im, &nv_proj_minus()),
        Complex64::new(w_m + p.delta_yn, 0.0),
    );
    h.add_scaled(
        &kron3(&i2, &im, &nv_proj_plus()),
        Complex64::new(w_p + p.delta_yn, 0.0),
    );
    // −g_FY (σ⁺a + σ⁻a†)
    let g = Complex64::new(-p.g_fy, 0.0);
    h.add_scaled(&kron3(&sp, &a, &i3), g);
    h.add_scaled(&kron3(&sm, &ad, &i3), g);
    // −g_YN (a†S⁻ + aS⁺) on both NV branches
    let g = Complex64::new(-p.g_yn, 0.0);
    for lower in [nv_lower_minus(), nv_lower_plus()] {
        h.add_scaled(&kron3(&i2, &ad, &lower), g);
        h.add_scaled(&kron3(&i2, &a, &lower.dagger()), g);
    }
    h
}

/// Total excitation number |1⟩⟨1|_F + a†a + (P₊ + P₋)_N, conserved by the
/// rotating-wave structure of the full Hamiltonian.
pub fn total_excitation(m: &FullModel) -> ComplexMatrix {
    let nm = m.n_max + 1;
    let i2 = ComplexMatrix::identity(2);
    let im = ComplexMatrix::identity(nm);
    let i3 = ComplexMatrix::identity(3);
    let a = annihilation(m.n_max);
    let mut n = kron3(&crate::linalg::projector_excited(), &im, &i3);
    n = &n + &kron3(&i2, &a.dagger().matmul(&a), &i3);
    n = &n + &kron3(&i2, &im, &(&nv_proj_minus() + &nv_proj_plus()));
    n
}

/// Outcome of one full-vs-effective comparison run.
#[derive(Clone, Debug)]
pub struct SwtReport {
    /// Checkpoint times (s).
    pub times: Vec<f64>,
    /// Trace distance between the magnon-traced full state and the
    /// effective state at each checkpoint.
    pub trace_distances: Vec<f64>,
    /// Magnon occupation ⟨a†a⟩ of the full state at each checkpoint.
    pub magnon_occupations: Vec<f64>,
    pub max_trace_distance: f64,
    pub max_magnon_occupation: f64,
    /// Worst deviation of the full-state norm from 1 over the run.
    pub unitarity_defect: f64,
    /// Effective storage coupling g_(−1) used for the comparison (rad/s).
    pub effective_coupling: f64,
}

/// Spectral propagator for one substep: U = V·diag(e^(−iE·h))·V†.
fn substep_propagator(eigs: &[f64], vecs: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let d = eigs.len();
    let mut phased = vecs.clone();
    // Scale column k by e^{−i E_k h}, then multiply by V†.
    for c in 0..d {
        let ph = Complex64::new(0.0, -eigs[c] * h).exp();
        for r in 0..d {
            phased.set(r, c, phased.get(r, c) * ph);
        }
    }
    phased.matmul(&vecs.dagger())
}

/// Evolve the full and effective models over `duration` and compare.
///
/// `dt` is the propagation substep; it must resolve the full model's
/// spectrum (dt·max|E| ≤ 0.1) or the run is refused — a coarser step
/// could not legitimately claim to track the magnon's dynamics, whatever
/// the propagation backend. Checkpoints are a fixed 360-point grid over
/// the window. The comparison is closed-system by construction.
pub fn validate_swt(m: &FullModel, duration: f64, dt: f64) -> Result<SwtReport> {
    if !(duration > 0.0) || !(dt > 0.0) {
        return Err(HqmError::InvalidParameter(
            "validate_swt: duration and dt must be positive".into(),
        ));
    }
    let h_full = build_full_hamiltonian(m);
    let (eigs_f, vecs_f) = hermitian_eigen(&h_full)?;
    let max_abs_eig = eigs_f.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    if dt * max_abs_eig > 0.1 {
        return Err(HqmError::StepSize(format!(
            "dt·max|E| = {:.3} > 0.1: substep cannot resolve the magnon frequency",
            dt * max_abs_eig
        )));
    }

    let e = EffectiveParams::from_physical(&m.params)?;
    let h_eff = build_h_eff_three_level(&e, m.operating_field());
    let (eigs_e, vecs_e) = hermitian_eigen(&h_eff)?;

    let n_intervals = SWT_CHECKPOINTS - 1;
    let interval = duration / n_intervals as f64;
    let n_sub = (interval / dt).ceil().max(1.0) as usize;
    let h_sub = interval / n_sub as f64;
    let u_full = substep_propagator(&eigs_f, &vecs_f, h_sub);
    let u_eff = substep_propagator(&eigs_e, &vecs_e, h_sub);

    let nm = m.n_max + 1;
    let mut psi_f = m.initial_state();
    let mut psi_e = vec![C_ZERO; 6];
    psi_e[3 + 1] = C_ONE; // |1_F, 0_N⟩

    let dim_f = psi_f.len();
    let mut report = SwtReport {
        times: Vec::with_capacity(SWT_CHECKPOINTS),
        trace_distances: Vec::with_capacity(SWT_CHECKPOINTS),
        magnon_occupations: Vec::with_capacity(SWT_CHECKPOINTS),
        max_trace_distance: 0.0,
        max_magnon_occupation: 0.0,
        unitarity_defect: 0.0,
        effective_coupling: e.g_minus,
    };

    for k in 0..SWT_CHECKPOINTS {
        if k > 0 {
            for _ in 0..n_sub {
                psi_f = u_full.matvec(&psi_f);
                psi_e = u_eff.matvec(&psi_e);
            }
        }
        let t = k as f64 * interval;

        let norm: f64 = psi_f.iter().map(|a| a.norm_sqr()).sum();
        report.unitarity_defect = report.unitarity_defect.max((norm - 1.0).abs());

        // ρ_full = |ψ⟩⟨ψ|, then trace out the magnon factor.
        let mut rho_full = ComplexMatrix::zeros(dim_f, dim_f);
        for r in 0..dim_f {
            for c in 0..dim_f {
                rho_full.set(r, c, psi_f[r] * psi_f[c].conj());
            }
        }
        let rho_red = partial_trace(&rho_full, &m.space, &[0, 2])?;
        let mut rho_eff = ComplexMatrix::zeros(6, 6);
        for r in 0..6 {
            for c in 0..6 {
                rho_eff.set(r, c, psi_e[r] * psi_e[c].conj());
            }
        }
        let td = trace_distance(&rho_red, &rho_eff)?;

        let mut nbar = 0.0;
        for f in 0..2 {
            for n in 0..nm {
                for v in 0..3 {
                    nbar += n as f64 * psi_f[(f * nm + n) * 3 + v].norm_sqr();
                }
            }
        }

        report.times.push(t);
        report.trace_distances.push(td);
        report.magnon_occupations.push(nbar);
        report.max_trace_distance = report.max_trace_distance.max(td);
        report.max_magnon_occupation = report.max_magnon_occupation.max(nbar);
    }
    Ok(report)
}
