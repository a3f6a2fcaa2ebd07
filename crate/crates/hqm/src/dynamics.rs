//! Lindblad master-equation engine with time-dependent Hamiltonians.
//!
//! The equation of motion is
//!
//! dρ/dt = −i[H(t), ρ] + Σ_k r_k (2 O_k ρ O_k† − O_k†O_k ρ − ρ O_k†O_k),
//!
//! integrated by fixed-step RK4 directly in the d×d state space (the
//! vectorized Liouvillian is used only for closed-form static propagation,
//! `propagate_static`). Fixed step is deliberate: regression values in the
//! result tables must be bit-reproducible across runs and platforms, which
//! adaptive steppers do not guarantee.
//!
//! # Rate conventions
//!
//! Relaxation and dephasing are specified as (T1, T2) per two-level
//! transition and converted by [`rates_from_t1_t2`]:
//!
//! * decay channel (O = lowering operator) at rate γ_s/2 with γ_s = 1/T1,
//!   so the excited population decays exactly as e^(−t/T1);
//! * pure-dephasing channel (O = excited-state projector) at rate
//!   γ_p = (2/T2 − γ_s)/2, so the off-diagonal element decays exactly as
//!   e^(−t/T2) (decay contributes γ_s/2, dephasing γ_p).
//!
//! Note the textbook prefactor pairing (γ_p/2 on the projector channel)
//! would give coherence decay (γ_s + γ_p)/2 and *not* reproduce a stated
//! T2 = 2/(γ_s + 2γ_p); the (T1, T2) values are treated as authoritative
//! and the channel rates are derived so measured decay constants match
//! them exactly. See the `fit_t1_t2_roundtrip` test.
//!
//! # Field schedules
//!
//! [`FieldSchedule`] describes the bias-field waveform as ordered segments
//! with step, linear, or exponential profiles. Within a segment,
//! B(t) = B_end + (B_start − B_end)·w(t) with w(0) = 1 and
//!
//! * step: w ≡ 0 (instantaneous switch at the segment start),
//! * linear: w = 1 − t/τ_r,
//! * exponential: w = e^(−3t/τ_r), which reaches its target only up to a
//!   residual e^(−3) ≈ 5% of the step — the physical ramp is truncated at
//!   the segment boundary, and the residual detuning error this causes is
//!   part of what the ramp tables quantify.

use num_complex::Complex64;

use crate::error::{HqmError, Result};
use crate::linalg::{
    embed, hermitian_eigen, liouvillian, matrix_exponential, unvec_col, vec_col, ComplexMatrix,
    HilbertSpace, C_ZERO,
};

/// Density operator on a structured Hilbert space.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub space: HilbertSpace,
    pub matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// ρ = |ψ⟩⟨ψ| from a normalized state vector.
    pub fn from_pure(space: HilbertSpace, psi: &[Complex64]) -> Result<Self> {
        let d = space.total_dim();
        if psi.len() != d {
            return Err(HqmError::DimensionMismatch(format!(
                "state vector length {} vs space dimension {}",
                psi.len(),
                d
            )));
        }
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(HqmError::InvalidParameter(format!(
                "state vector not normalized: ⟨ψ|ψ⟩ = {norm:.12}"
            )));
        }
        let mut m = ComplexMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m.set(r, c, psi[r] * psi[c].conj());
            }
        }
        Ok(DensityMatrix { space, matrix: m })
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        let m = ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
        DensityMatrix { space, matrix: m }
    }

    /// Population of computational basis state `i`.
    pub fn population(&self, i: usize) -> f64 {
        self.matrix.get(i, i).re
    }

    /// Off-diagonal element ⟨r|ρ|c⟩.
    pub fn coherence(&self, r: usize, c: usize) -> Complex64 {
        self.matrix.get(r, c)
    }

    /// tr ρ².
    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// State-class invariants with explicit tolerances: |tr ρ − 1| ≤
    /// `trace_tol`, Hermiticity deviation ≤ `herm_tol`, smallest
    /// eigenvalue ≥ −1e−8.
    pub fn check_invariants(&self, trace_tol: f64, herm_tol: f64) -> Result<()> {
        self.check_invariants_against(1.0, trace_tol, herm_tol)
    }

    /// Like [`check_invariants`], but measuring trace drift against
    /// `trace_ref` instead of 1 — a propagator answers for the drift it
    /// produced, not for drift inherited from earlier stages.
    pub fn check_invariants_against(
        &self,
        trace_ref: f64,
        trace_tol: f64,
        herm_tol: f64,
    ) -> Result<()> {
        let tr = self.matrix.trace();
        if (tr.re - trace_ref).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(HqmError::StepSize(format!(
                "density-matrix trace drifted to {:.12} + {:.3e}i (from {trace_ref:.12})",
                tr.re, tr.im
            )));
        }
        if !self.matrix.is_hermitian(herm_tol) {
            return Err(HqmError::StepSize(
                "density matrix lost Hermiticity beyond tolerance".into(),
            ));
        }
        let (eigs, _) = hermitian_eigen(&self.matrix)?;
        let min = eigs.first().copied().unwrap_or(0.0);
        if min < -1e-8 {
            return Err(HqmError::StepSize(format!(
                "density matrix developed negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Default invariant check (trace and Hermiticity to 1e−9).
    pub fn validate(&self) -> Result<()> {
        self.check_invariants(1e-9, 1e-9)
    }
}

/// Decay/dephasing rate pair for one two-level transition, in the
/// engine's channel normalization (see module docs).
#[derive(Clone, Copy, Debug)]
pub struct RatePair {
    /// Spontaneous-decay rate γ_s = 1/T1 (s⁻¹).
    pub gamma_s: f64,
    /// Pure-dephasing channel rate γ_p = (2/T2 − γ_s)/2 (s⁻¹).
    pub gamma_p: f64,
}

/// Convert (T1, T2) to engine channel rates. `t1` may be infinite
/// (no spontaneous decay). Requires 0 < T2 ≤ 2·T1.
pub fn rates_from_t1_t2(t1: f64, t2: f64) -> Result<RatePair> {
    if !(t1 > 0.0) || !(t2 > 0.0) {
        return Err(HqmError::InvalidParameter(format!(
            "T1 = {t1:.3e}, T2 = {t2:.3e}: relaxation times must be positive"
        )));
    }
    if t2 > 2.0 * t1 * (1.0 + 1e-12) {
        return Err(HqmError::InvalidParameter(format!(
            "T2 = {t2:.3e} s exceeds 2·T1 = {:.3e} s (unphysical)",
            2.0 * t1
        )));
    }
    let gamma_s = if t1.is_finite() { 1.0 / t1 } else { 0.0 };
    let gamma_p = ((2.0 / t2 - gamma_s) / 2.0).max(0.0);
    Ok(RatePair { gamma_s, gamma_p })
}

/// Collection of Lindblad channels (full-space operator, rate) in the
/// factor-2 dissipator normalization.
#[derive(Clone, Debug)]
pub struct DecoherenceRates {
    dim: usize,
    channels: Vec<(ComplexMatrix, f64)>,
}

impl DecoherenceRates {
    /// No decoherence (closed-system evolution) on a `dim`-dimensional
    /// space.
    pub fn none(dim: usize) -> Self {
        DecoherenceRates {
            dim,
            channels: Vec::new(),
        }
    }

    /// Add one channel with operator `op` (dim×dim) and rate ≥ 0.
    pub fn add_channel(&mut self, op: ComplexMatrix, rate: f64) -> Result<()> {
        if op.rows() != self.dim || op.cols() != self.dim {
            return Err(HqmError::DimensionMismatch(format!(
                "channel operator is {}×{}, expected {}×{}",
                op.rows(),
                op.cols(),
                self.dim,
                self.dim
            )));
        }
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(HqmError::InvalidParameter(format!(
                "channel rate {rate:.3e} must be finite and ≥ 0"
            )));
        }
        if rate > 0.0 {
            self.channels.push((op, rate));
        }
        Ok(())
    }

    /// Add the decay + pure-dephasing channel pair for one two-level
    /// transition of subsystem `subsystem`, specified by its lowering
    /// operator `lower` (in subsystem dimensions) and (T1, T2). The
    /// dephasing projector is O†O — the excited-state projector of the
    /// transition.
    pub fn add_t1_t2(
        &mut self,
        space: &HilbertSpace,
        subsystem: usize,
        lower: &ComplexMatrix,
        t1: f64,
        t2: f64,
    ) -> Result<()> {
        let pair = rates_from_t1_t2(t1, t2)?;
        let full_lower = embed(lower, space, subsystem)?;
        let proj = lower.dagger().matmul(lower);
        let full_proj = embed(&proj, space, subsystem)?;
        self.add_channel(full_lower, pair.gamma_s / 2.0)?;
        self.add_channel(full_proj, pair.gamma_p)?;
        Ok(())
    }

    /// Channel list as (operator, rate) pairs.
    pub fn channels(&self) -> &[(ComplexMatrix, f64)] {
        &self.channels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Bias-field ramp shape within one schedule segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RampProfile {
    Step,
    Linear,
    Exponential,
}

impl RampProfile {
    /// Interpolation weight w(t): B(t) = B_end + (B_start − B_end)·w(t).
    pub fn weight(&self, t_loc: f64, duration: f64) -> f64 {
        match self {
            RampProfile::Step => 0.0,
            RampProfile::Linear => (1.0 - t_loc / duration).clamp(0.0, 1.0),
            RampProfile::Exponential => (-3.0 * t_loc / duration).exp().min(1.0),
        }
    }
}

/// One segment of a bias-field schedule.
#[derive(Clone, Copy, Debug)]
pub struct Segment {
    pub profile: RampProfile,
    pub duration: f64,
    pub b_start: f64,
    pub b_end: f64,
}

/// Piecewise bias-field waveform B(t).
#[derive(Clone, Debug)]
pub struct FieldSchedule {
    segments: Vec<Segment>,
}

impl FieldSchedule {
    /// Validate and build a schedule: positive total duration,
    /// non-negative segment durations (strictly positive for ramps), and
    /// anchor continuity into every linear/exponential segment.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(HqmError::InvalidParameter("empty field schedule".into()));
        }
        let mut total = 0.0;
        for (i, s) in segments.iter().enumerate() {
            if !(s.duration >= 0.0) {
                return Err(HqmError::InvalidParameter(format!(
                    "segment {i} has negative duration"
                )));
            }
            if s.profile != RampProfile::Step && s.duration <= 0.0 {
                return Err(HqmError::InvalidParameter(format!(
                    "segment {i}: ramp profiles need a positive duration"
                )));
            }
            total += s.duration;
            if i > 0 && s.profile != RampProfile::Step {
                let prev_end = segments[i - 1].b_end;
                if (s.b_start - prev_end).abs() > 1e-12 {
                    return Err(HqmError::InvalidParameter(format!(
                        "segment {i}: field discontinuity {:.3e} T entering a ramp",
                        s.b_start - prev_end
                    )));
                }
            }
        }
        if total <= 0.0 {
            return Err(HqmError::InvalidParameter(
                "field schedule has zero total duration".into(),
            ));
        }
        Ok(FieldSchedule { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Field value at absolute schedule time `t` (clamped to the ends).
    pub fn field_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.segments[0].b_start;
        }
        let mut t0 = 0.0;
        for s in &self.segments {
            if t < t0 + s.duration {
                let w = s.profile.weight(t - t0, s.duration);
                return s.b_end + (s.b_start - s.b_end) * w;
            }
            t0 += s.duration;
        }
        self.segments.last().unwrap().b_end
    }
}

/// Integration step control.
#[derive(Clone, Copy, Debug)]
pub struct StepSpec {
    /// Nominal step (s); the actual step is duration/n with
    /// n = max(1, round(duration/dt)).
    pub dt: f64,
    /// Absolute start time fed to the Hamiltonian closure (s).
    pub t0: f64,
    /// Fastest angular frequency in H(t) (rad/s); `integrate` refuses to
    /// run unless dt·ω_max ≤ 0.3. Pass 0.0 for a static Hamiltonian.
    pub omega_max: f64,
    /// Keep every `stride`-th step in the trajectory (0 = endpoints only).
    pub stride: usize,
}

/// Time-resolved output of [`integrate`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory is never empty")
    }
}

fn lindblad_rhs(
    h: &ComplexMatrix,
    prepped: &[(ComplexMatrix, ComplexMatrix, ComplexMatrix, f64)],
    rho: &ComplexMatrix,
) -> ComplexMatrix {
    // −i(Hρ − ρH)
    let mut out = &h.matmul(rho) - &rho.matmul(h);
    out = out.scale(Complex64::new(0.0, -1.0));
    for (o, od, odo, r) in prepped {
        // r·(2 OρO† − O†Oρ − ρO†O)
        let sandwich = o.matmul(rho).matmul(od);
        out.add_scaled(&sandwich, Complex64::new(2.0 * r, 0.0));
        out.add_scaled(&odo.matmul(rho), Complex64::new(-r, 0.0));
        out.add_scaled(&rho.matmul(odo), Complex64::new(-r, 0.0));
    }
    out
}

/// Fixed-step RK4 integration of the master equation with a
/// time-dependent Hamiltonian, optionally accumulating a phase integral
/// ∫ f(t) dt on the same step grid (Simpson's rule per step, so the phase
/// and the state see identical time resolution).
///
/// Returns the sampled trajectory and the accumulated phase. Invariants
/// (trace, Hermiticity, positivity) are checked at every sampled state;
/// violations report a step-size error.
pub fn integrate_with_phase<H, P>(
    rho0: &DensityMatrix,
    h_of_t: H,
    phase_rate: Option<P>,
    rates: &DecoherenceRates,
    duration: f64,
    step: &StepSpec,
) -> Result<(Trajectory, f64)>
where
    H: Fn(f64) -> ComplexMatrix,
    P: Fn(f64) -> f64,
{
    let d = rho0.space.total_dim();
    if rates.dim() != d {
        return Err(HqmError::DimensionMismatch(format!(
            "rates on dim {} vs state dim {}",
            rates.dim(),
            d
        )));
    }
    if !(step.dt > 0.0) {
        return Err(HqmError::StepSize("dt must be positive".into()));
    }
    if step.dt * step.omega_max > 0.3 {
        return Err(HqmError::StepSize(format!(
            "dt·ω_max = {:.3} exceeds 0.3: the step cannot resolve the fastest \
             Hamiltonian frequency",
            step.dt * step.omega_max
        )));
    }
    let mut traj = Trajectory {
        times: vec![step.t0],
        states: vec![rho0.clone()],
    };
    if duration <= 0.0 {
        return Ok((traj, 0.0));
    }

    let prepped: Vec<_> = rates
        .channels()
        .iter()
        .map(|(o, r)| {
            let od = o.dagger();
            let odo = od.matmul(o);
            (o.clone(), od, odo, *r)
        })
        .collect();

    let n = ((duration / step.dt).round() as usize).max(1);
    let h = duration / n as f64;
    let half = Complex64::new(h / 2.0, 0.0);
    let sixth = Complex64::new(h / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);

    let mut rho = rho0.matrix.clone();
    let trace_ref = rho.trace().re;
    let mut phase = 0.0f64;
    let mut t = step.t0;
    for k in 0..n {
        let h1 = h_of_t(t);
        let h2 = h_of_t(t + h / 2.0);
        let h4 = h_of_t(t + h);

        let k1 = lindblad_rhs(&h1, &prepped, &rho);
        let mut y = rho.clone();
        y.add_scaled(&k1, half);
        let k2 = lindblad_rhs(&h2, &prepped, &y);
        let mut y = rho.clone();
        y.add_scaled(&k2, half);
        let k3 = lindblad_rhs(&h2, &prepped, &y);
        let mut y = rho.clone();
        y.add_scaled(&k3, Complex64::new(h, 0.0));
        let k4 = lindblad_rhs(&h4, &prepped, &y);

        let mut incr = k1;
        incr.add_scaled(&k2, two);
        incr.add_scaled(&k3, two);
        incr = &incr + &k4;
        rho.add_scaled(&incr, sixth);

        if let Some(f) = &phase_rate {
            phase += (h / 6.0) * (f(t) + 4.0 * f(t + h / 2.0) + f(t + h));
        }
        t = step.t0 + duration * (k + 1) as f64 / n as f64;

        let is_last = k + 1 == n;
        if is_last || (step.stride > 0 && (k + 1) % step.stride == 0) {
            let state = DensityMatrix {
                space: rho0.space.clone(),
                matrix: rho.clone(),
            };
            let elapsed_us = (t - step.t0) / 1e-6;
            state
                .check_invariants_against(trace_ref, 1e-9 * (1.0 + elapsed_us), 1e-10)
                .map_err(|e| {
                    HqmError::StepSize(format!("at t = {t:.3e} s: {e} (reduce dt)"))
                })?;
            traj.times.push(t);
            traj.states.push(state);
        }
    }
    Ok((traj, phase))
}

/// Fixed-step RK4 integration of the master equation (no phase
/// accumulation). See [`integrate_with_phase`].
pub fn integrate<H>(
    rho0: &DensityMatrix,
    h_of_t: H,
    rates: &DecoherenceRates,
    duration: f64,
    step: &StepSpec,
) -> Result<Trajectory>
where
    H: Fn(f64) -> ComplexMatrix,
{
    let (traj, _) = integrate_with_phase(
        rho0,
        h_of_t,
        None::<fn(f64) -> f64>,
        rates,
        duration,
        step,
    )?;
    Ok(traj)
}

/// Closed-form propagation under a constant Liouvillian:
/// vec(ρ(T)) = exp(L·T)·vec(ρ(0)). Exact for static segments of any
/// length (used for the storage stage, where T is milliseconds and
/// step-wise integration would be both slow and lossy).
pub fn propagate_static(
    rho0: &DensityMatrix,
    h: &ComplexMatrix,
    rates: &DecoherenceRates,
    duration: f64,
) -> Result<DensityMatrix> {
    let d = rho0.space.total_dim();
    if h.rows() != d || rates.dim() != d {
        return Err(HqmError::DimensionMismatch(
            "propagate_static: dimension mismatch".into(),
        ));
    }
    if duration == 0.0 {
        return Ok(rho0.clone());
    }
    let l = liouvillian(h, rates.channels())?;
    let lt = l.scale(Complex64::new(duration, 0.0));
    let u = matrix_exponential(&lt, 1e-13)?;
    let v = u.matvec(&vec_col(&rho0.matrix));
    let m = unvec_col(&v, d);
    // The exact Lindblad flow preserves Hermiticity identically, so the
    // anti-Hermitian residue of the scaled-and-squared exponential is
    // pure floating-point noise; project it out. Trace drift, by
    // contrast, measures genuine exponential error and is checked, with
    // the same per-microsecond budget the stepwise integrator uses.
    let sym = (&m + &m.dagger()).scale(Complex64::new(0.5, 0.0));
    let out = DensityMatrix {
        space: rho0.space.clone(),
        matrix: sym,
    };
    out.check_invariants_against(
        rho0.matrix.trace().re,
        1e-9 * (1.0 + duration / 1e-6),
        1e-9,
    )
    .map_err(|e| HqmError::StepSize(format!("static propagation over {duration:.3e} s: {e}")))?;
    Ok(out)
}

/// Uhlmann fidelity against a pure target: F = √(⟨Ψ|ρ|Ψ⟩).
/// The square root is part of the definition used throughout the crate's
/// reported numbers.
pub fn fidelity(rho: &DensityMatrix, target: &[Complex64]) -> Result<f64> {
    let d = rho.space.total_dim();
    if target.len() != d {
        return Err(HqmError::DimensionMismatch(format!(
            "target length {} vs state dim {}",
            target.len(),
            d
        )));
    }
    let norm: f64 = target.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(HqmError::InvalidParameter(format!(
            "fidelity target not normalized: ⟨Ψ|Ψ⟩ = {norm:.12}"
        )));
    }
    let mut q = C_ZERO;
    for r in 0..d {
        let mut row = C_ZERO;
        for c in 0..d {
            row += rho.matrix.get(r, c) * target[c];
        }
        q += target[r].conj() * row;
    }
    Ok(q.re.max(0.0).sqrt())
}
