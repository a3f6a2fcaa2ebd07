//! The write–store–read memory protocol.
//!
//! A run traverses seven bias-field segments:
//!
//! 1. rise to resonance, 2. transfer hold (t₁ = π/(2g_(−1))), 3. fall to
//! the storage field, 4. storage hold, 5. rise, 6. retrieval hold (t₁),
//! 7. fall.
//!
//! Dynamics happen in the interaction picture of [`crate::effective`]:
//! on resonance the storage transition |1_F,0_N⟩ ↔ |0_F,−1_N⟩ swaps at
//! rate g_(−1); off resonance it is detuned by δ_B,(−1)(B). The
//! counter-rotating g_(+1) channel (fast phase Ω = 2γ_e B_res) is kept in
//! the integrator by default; during the storage hold both couplings are
//! dropped — the detuning exceeds 100·g, so the system freely precesses,
//! and the hold is propagated in closed form.
//!
//! The stored component accumulates the deterministic phase
//! φ_s = ∫ δ_B,(−1)(t) dt over the storage hold and its adjacent ramps
//! (segments 3–5). Because it is deterministic it is corrected in the
//! *target* (never in ρ): checkpoint fidelities are evaluated against
//!
//! * after transfer:  −i cosθ e^(−iφ_s)|0_F,−1⟩ + e^(iφ) sinθ|0_F,0⟩,
//! * after storage:   the same with φ_s grown by the hold,
//! * after retrieval: −cosθ e^(−iφ_s)|1_F,0⟩ + e^(iφ) sinθ|0_F,0⟩,
//!
//! where φ_s at each checkpoint integrates only the segments already
//! traversed (the outer ramps 1 and 7 contribute no phase: the stored
//! amplitude rides a zero-detuning level there).
//!
//! Decoherence is stage-dependent: transfer/retrieval use intrinsic
//! rates (FQ T1 = T2 = 10 µs; NV T1 = 6 ms, T2* = 90 or 20 µs), the
//! storage hold uses dynamical-decoupling values (NV T1 = 10 s,
//! T2 = 0.6 s). Both NV transitions carry decay and dephasing channels.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{
    fidelity, integrate_with_phase, propagate_static, DecoherenceRates, DensityMatrix,
    FieldSchedule, RampProfile, Segment, StepSpec, Trajectory,
};
use crate::effective::{
    nv_lower_minus, nv_lower_plus, nv_proj_minus, nv_proj_plus, EffectiveParams, PhysicalParams,
};
use crate::error::{HqmError, Result};
use crate::linalg::{kron, sigma_minus, sigma_plus, ComplexMatrix, HilbertSpace, C_ZERO};
use crate::units::TWO_PI;

/// Basis index of |0_F, +1_N⟩ (the leakage level).
pub const IDX_LEAK: usize = 0;
/// Basis index of |0_F, 0_N⟩.
pub const IDX_GROUND: usize = 1;
/// Basis index of |0_F, −1_N⟩ (the storage level).
pub const IDX_STORED: usize = 2;
/// Basis index of |1_F, 0_N⟩ (the loaded qubit).
pub const IDX_LOADED: usize = 4;

/// FQ input state cosθ|1_F⟩ + e^(iφ) sinθ|0_F⟩, joint with |0_N⟩.
#[derive(Clone, Copy, Debug)]
pub struct InitialState {
    pub theta: f64,
    pub phi: f64,
}

impl InitialState {
    pub fn new(theta: f64, phi: f64) -> Self {
        InitialState { theta, phi }
    }

    /// |Φ_1⟩ = |1_F⟩: the bare excitation, worst case for decoherence.
    pub fn phi_1() -> Self {
        Self::new(0.0, 0.0)
    }

    /// |Φ_0⟩ = |0_F⟩: stationary under the protocol.
    pub fn phi_0() -> Self {
        Self::new(std::f64::consts::FRAC_PI_2, 0.0)
    }

    /// |Φ_x⟩ = √(1−x)|1_F⟩ + √x|0_F⟩ for the ground weight x.
    pub fn phi_x(x: f64) -> Self {
        Self::new(x.sqrt().asin(), 0.0)
    }

    pub fn phi_half() -> Self {
        Self::phi_x(0.5)
    }

    pub fn phi_third() -> Self {
        Self::phi_x(1.0 / 3.0)
    }

    pub fn phi_quarter() -> Self {
        Self::phi_x(0.25)
    }

    pub fn phi_fifth() -> Self {
        Self::phi_x(0.2)
    }

    /// Weight cos²θ on the decoherence-exposed |1_F⟩ component.
    pub fn excited_weight(&self) -> f64 {
        self.theta.cos().powi(2)
    }

    /// Six-dimensional joint state vector (FQ ⊗ NV).
    pub fn state_vector(&self) -> Vec<Complex64> {
        let mut psi = vec![C_ZERO; 6];
        psi[IDX_LOADED] = Complex64::new(self.theta.cos(), 0.0);
        psi[IDX_GROUND] = Complex64::from_polar(self.theta.sin(), self.phi);
        psi
    }
}

/// (T1, T2) per subsystem for one protocol stage. Infinite times switch
/// the corresponding channel off.
#[derive(Clone, Copy, Debug)]
pub struct StageRates {
    pub fq_t1: f64,
    pub fq_t2: f64,
    pub nv_t1: f64,
    pub nv_t2: f64,
}

impl StageRates {
    /// Transfer/retrieval-stage defaults with a selectable NV T2*.
    /// The NV T1 during transfer is a documented assumption (6 ms,
    /// conservative; it contributes < 1e−4 over a 0.36 µs stage).
    pub fn transfer_default(nv_t2: f64) -> Self {
        StageRates {
            fq_t1: 10e-6,
            fq_t2: 10e-6,
            nv_t1: 6e-3,
            nv_t2,
        }
    }

    /// Storage-stage defaults: NV under dynamical decoupling.
    pub fn storage_default() -> Self {
        StageRates {
            fq_t1: 10e-6,
            fq_t2: 10e-6,
            nv_t1: 10.0,
            nv_t2: 0.6,
        }
    }

    /// All channels off (closed-system runs).
    pub fn lossless() -> Self {
        StageRates {
            fq_t1: f64::INFINITY,
            fq_t2: f64::INFINITY,
            nv_t1: f64::INFINITY,
            nv_t2: f64::INFINITY,
        }
    }

    fn build(&self, space: &HilbertSpace) -> Result<DecoherenceRates> {
        let mut d = DecoherenceRates::none(space.total_dim());
        d.add_t1_t2(space, 0, &sigma_minus(), self.fq_t1, self.fq_t2)?;
        d.add_t1_t2(space, 1, &nv_lower_minus(), self.nv_t1, self.nv_t2)?;
        d.add_t1_t2(space, 1, &nv_lower_plus(), self.nv_t1, self.nv_t2)?;
        Ok(d)
    }
}

/// Full configuration of one memory run.
#[derive(Clone, Debug)]
pub struct MemoryProtocol {
    pub params: PhysicalParams,
    pub effective: EffectiveParams,
    /// Direct coupling input g_(−1)/2π in Hz, replacing the derived value
    /// (the standard grids use 700/350 kHz); g_(+1) keeps the physical
    /// ratio to g_(−1).
    pub g_override_hz: Option<f64>,
    /// Storage-hold duration (s).
    pub storage_time: f64,
    /// Ramp shape and rise time for segments 1/3/5/7; `None` = ideal
    /// steps.
    pub ramp: Option<(RampProfile, f64)>,
    pub transfer_rates: StageRates,
    pub storage_rates: StageRates,
    /// Integrator step (s).
    pub dt: f64,
    /// Drop the counter-rotating g_(+1) channel (speed over the ~1e−7
    /// leakage physics).
    pub drop_counter_rotating: bool,
    /// Override the transfer/retrieval hold duration (set by
    /// calibration); `None` = π/(2g_(−1)).
    pub hold_override: Option<f64>,
    /// Record the maximum |0_F,+1_N⟩ population during the transfer hold.
    pub track_leak: bool,
    /// Stop after the transfer checkpoint (ramp-comparison runs).
    pub transfer_only: bool,
}

impl MemoryProtocol {
    pub fn new(params: PhysicalParams) -> Result<Self> {
        params.validate()?;
        let effective = EffectiveParams::from_physical(&params)?;
        Ok(MemoryProtocol {
            params,
            effective,
            g_override_hz: None,
            storage_time: 10e-3,
            ramp: None,
            transfer_rates: StageRates::transfer_default(90e-6),
            storage_rates: StageRates::storage_default(),
            dt: 5e-11,
            drop_counter_rotating: false,
            hold_override: None,
            track_leak: false,
            transfer_only: false,
        })
    }

    /// Storage coupling g_(−1) in rad/s (override or derived).
    pub fn g_minus(&self) -> f64 {
        match self.g_override_hz {
            Some(hz) => TWO_PI * hz,
            None => self.effective.g_minus,
        }
    }

    /// Counter-rotating coupling g_(+1) in rad/s, scaled from g_(−1) by
    /// the physical ratio.
    pub fn g_plus(&self) -> f64 {
        if self.drop_counter_rotating {
            0.0
        } else {
            self.g_minus() * (self.effective.g_plus / self.effective.g_minus)
        }
    }

    /// Nominal hold t₁ = π/(2 g_(−1)).
    pub fn nominal_hold(&self) -> f64 {
        std::f64::consts::PI / (2.0 * self.g_minus())
    }

    /// Actual hold duration (calibrated if set).
    pub fn hold_time(&self) -> f64 {
        self.hold_override.unwrap_or_else(|| self.nominal_hold())
    }

    /// Storage (off-resonant) field B_L.
    pub fn b_off(&self) -> f64 {
        self.params.b_l
    }

    /// Transfer (on-resonant) field B_L + δB.
    pub fn b_on(&self) -> f64 {
        self.params.b_l + self.params.delta_b
    }

    /// The seven-segment field schedule of one full run.
    pub fn schedule(&self) -> Result<FieldSchedule> {
        let (profile, rise) = match self.ramp {
            Some((p, d)) => (p, d),
            None => (RampProfile::Step, 0.0),
        };
        let hold = self.hold_time();
        let (off, on) = (self.b_off(), self.b_on());
        let seg = |p: RampProfile, dur: f64, b0: f64, b1: f64| Segment {
            profile: p,
            duration: dur,
            b_start: b0,
            b_end: b1,
        };
        FieldSchedule::new(vec![
            seg(profile, rise, off, on),
            seg(RampProfile::Step, hold, on, on),
            seg(profile, rise, on, off),
            seg(RampProfile::Step, self.storage_time, off, off),
            seg(profile, rise, off, on),
            seg(RampProfile::Step, hold, on, on),
            seg(profile, rise, on, off),
        ])
    }

    /// Protocol-level invariants: the storage field must park the
    /// transition at least 100·g_(−1) off resonance, and the step must
    /// resolve the fast channel.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let det = self.effective.delta_b_minus(self.b_off()).abs();
        if det < 100.0 * self.g_minus() {
            return Err(HqmError::InvalidParameter(format!(
                "storage detuning |δ_B| = 2π·{:.3} MHz is below 100·g_(−1) = 2π·{:.3} MHz; \
                 the stored state would keep exchanging with the flux qubit",
                det / TWO_PI / 1e6,
                100.0 * self.g_minus() / TWO_PI / 1e6
            )));
        }
        if !(self.storage_time >= 0.0) {
            return Err(HqmError::InvalidParameter(
                "storage time must be ≥ 0".into(),
            ));
        }
        Ok(())
    }
}

/// Checkpoint fidelities and bookkeeping of one run.
#[derive(Clone, Debug)]
pub struct StageReport {
    /// F after the transfer stage (post fall-ramp).
    pub f_transfer: f64,
    /// F after the storage hold (`None` for transfer-only runs).
    pub f_storage: Option<f64>,
    /// F after retrieval (post final ramp).
    pub f_retrieval: Option<f64>,
    /// Accumulated deterministic phase φ_s at the last checkpoint (rad).
    pub phi_s: f64,
    pub hold_time: f64,
    pub storage_time: f64,
    /// Total schedule time simulated (s).
    pub total_time: f64,
    /// Max |0_F,+1_N⟩ population during the transfer hold, if tracked.
    pub leak_max: Option<f64>,
}

/// Interaction-picture Hamiltonian pieces, prebuilt once per run.
struct HamiltonianParts {
    /// g_(−1)(σ⁺S⁻₍₋₁₎ + h.c.)
    h_res: ComplexMatrix,
    /// I₂ ⊗ (P₋ − P₊), the detuning direction.
    d_pm: ComplexMatrix,
    a_plus: ComplexMatrix,
    a_plus_dag: ComplexMatrix,
    g_plus: f64,
    omega_fast: f64,
}

impl HamiltonianParts {
    fn new(proto: &MemoryProtocol) -> Self {
        let flip = kron(&sigma_plus(), &nv_lower_minus());
        let h_res = (&flip + &flip.dagger()).scale(Complex64::new(proto.g_minus(), 0.0));
        let d_pm = kron(
            &ComplexMatrix::identity(2),
            &(&nv_proj_minus() - &nv_proj_plus()),
        );
        let a_plus = kron(&sigma_plus(), &nv_lower_plus());
        let a_plus_dag = a_plus.dagger();
        HamiltonianParts {
            h_res,
            d_pm,
            a_plus,
            a_plus_dag,
            g_plus: proto.g_plus(),
            omega_fast: proto.effective.omega_fast(),
        }
    }

    /// H(t) at detuning `dm` = δ_B,(−1)(B(t)).
    fn at(&self, t: f64, dm: f64) -> ComplexMatrix {
        let mut h = self.h_res.clone();
        if dm != 0.0 {
            h.add_scaled(&self.d_pm, Complex64::new(dm, 0.0));
        }
        if self.g_plus != 0.0 {
            let ph = Complex64::from_polar(self.g_plus, self.omega_fast * t);
            h.add_scaled(&self.a_plus, ph);
            h.add_scaled(&self.a_plus_dag, ph.conj());
        }
        h
    }

    fn omega_max(&self, dm_max: f64) -> f64 {
        let fast = if self.g_plus != 0.0 {
            self.omega_fast.abs()
        } else {
            0.0
        };
        fast.max(dm_max.abs())
    }
}

fn stored_target(init: &InitialState, phi_s: f64) -> Vec<Complex64> {
    let mut t = vec![C_ZERO; 6];
    t[IDX_STORED] = Complex64::new(0.0, -1.0)
        * Complex64::from_polar(init.theta.cos(), -phi_s);
    t[IDX_GROUND] = Complex64::from_polar(init.theta.sin(), init.phi);
    t
}

fn retrieved_target(init: &InitialState, phi_s: f64) -> Vec<Complex64> {
    let mut t = vec![C_ZERO; 6];
    t[IDX_LOADED] = -Complex64::from_polar(init.theta.cos(), -phi_s);
    t[IDX_GROUND] = Complex64::from_polar(init.theta.sin(), init.phi);
    t
}

struct SegmentOutcome {
    rho: DensityMatrix,
    phase: f64,
    trajectory: Trajectory,
}

/// Integrate one schedule segment starting at absolute time `t0`.
fn run_segment(
    rho: &DensityMatrix,
    seg: &Segment,
    parts: &HamiltonianParts,
    eff: &EffectiveParams,
    rates: &DecoherenceRates,
    t0: f64,
    dt: f64,
    accumulate_phase: bool,
    stride: usize,
) -> Result<SegmentOutcome> {
    let dm_of = |t: f64| {
        let w = seg.profile.weight(t - t0, seg.duration);
        let b = seg.b_end + (seg.b_start - seg.b_end) * w;
        eff.delta_b_minus(b)
    };
    let dm_extreme = eff
        .delta_b_minus(seg.b_start)
        .abs()
        .max(eff.delta_b_minus(seg.b_end).abs());
    let step = StepSpec {
        dt,
        t0,
        omega_max: parts.omega_max(dm_extreme),
        stride,
    };
    let phase_fn = if accumulate_phase { Some(&dm_of) } else { None };
    let (traj, phase) = integrate_with_phase(
        rho,
        |t| parts.at(t, dm_of(t)),
        phase_fn,
        rates,
        seg.duration,
        &step,
    )?;
    Ok(SegmentOutcome {
        rho: traj.final_state().clone(),
        phase,
        trajectory: traj,
    })
}

/// Execute the protocol and evaluate the checkpoint fidelities.
pub fn run_protocol(init: &InitialState, proto: &MemoryProtocol) -> Result<StageReport> {
    run_protocol_impl(init, proto, 0).map(|(report, _)| report)
}

/// Like [`run_protocol`], additionally returning the strided state
/// trajectory of the transfer stage (segments 1–3) for plotting.
pub fn run_protocol_traced(
    init: &InitialState,
    proto: &MemoryProtocol,
    stride: usize,
) -> Result<(StageReport, Trajectory)> {
    run_protocol_impl(init, proto, stride.max(1))
}

fn run_protocol_impl(
    init: &InitialState,
    proto: &MemoryProtocol,
    stride: usize,
) -> Result<(StageReport, Trajectory)> {
    proto.validate()?;
    let sched = proto.schedule()?;
    let segs = sched.segments();
    let space = HilbertSpace::new(&[2, 3]);
    let d_int = proto.transfer_rates.build(&space)?;
    let d_dd = proto.storage_rates.build(&space)?;
    let parts = HamiltonianParts::new(proto);
    let eff = &proto.effective;

    let mut rho = DensityMatrix::from_pure(space, &init.state_vector())?;
    let mut t_now = 0.0f64;
    let mut phi_s = 0.0f64;
    let mut transfer_traj = Trajectory {
        times: vec![0.0],
        states: vec![rho.clone()],
    };
    let mut leak_max: Option<f64> = None;

    let advance = |traj: &mut Trajectory,
                       rho: &mut DensityMatrix,
                       t_now: &mut f64,
                       phi_s: &mut f64,
                       seg: &Segment,
                       rates: &DecoherenceRates,
                       accum: bool,
                       seg_stride: usize,
                       keep: bool|
     -> Result<Option<Trajectory>> {
        if seg.duration == 0.0 {
            return Ok(None);
        }
        let out = run_segment(rho, seg, &parts, eff, rates, *t_now, proto.dt, accum, seg_stride)?;
        *rho = out.rho;
        *t_now += seg.duration;
        if accum {
            *phi_s += out.phase;
        }
        if keep && seg_stride > 0 {
            traj.times.extend_from_slice(&out.trajectory.times[1..]);
            traj.states
                .extend_from_slice(&out.trajectory.states[1..]);
        }
        Ok(Some(out.trajectory))
    };

    // 1. rise (no phase: the stored level is still empty).
    advance(
        &mut transfer_traj,
        &mut rho,
        &mut t_now,
        &mut phi_s,
        &segs[0],
        &d_int,
        false,
        stride,
        true,
    )?;
    // 2. transfer hold.
    let hold_stride = if proto.track_leak { 1 } else { stride };
    let hold_traj = advance(
        &mut transfer_traj,
        &mut rho,
        &mut t_now,
        &mut phi_s,
        &segs[1],
        &d_int,
        false,
        hold_stride,
        stride > 0,
    )?;
    if proto.track_leak {
        let m = hold_traj
            .as_ref()
            .map(|t| {
                t.states
                    .iter()
                    .fold(0.0f64, |a, s| a.max(s.population(IDX_LEAK)))
            })
            .unwrap_or(0.0);
        leak_max = Some(m);
    }
    // 3. fall into storage (phase window opens).
    advance(
        &mut transfer_traj,
        &mut rho,
        &mut t_now,
        &mut phi_s,
        &segs[2],
        &d_int,
        true,
        stride,
        true,
    )?;
    let f_transfer = fidelity(&rho, &stored_target(init, phi_s))?;

    let mut report = StageReport {
        f_transfer,
        f_storage: None,
        f_retrieval: None,
        phi_s,
        hold_time: proto.hold_time(),
        storage_time: proto.storage_time,
        total_time: t_now,
        leak_max,
    };
    if proto.transfer_only {
        return Ok((report, transfer_traj));
    }

    // 4. storage hold: free precession at full detuning, closed form.
    let dm_off = eff.delta_b_minus(proto.b_off());
    let h_sto = parts.d_pm.scale(Complex64::new(dm_off, 0.0));
    rho = propagate_static(&rho, &h_sto, &d_dd, proto.storage_time)?;
    t_now += proto.storage_time;
    phi_s += dm_off * proto.storage_time;
    report.f_storage = Some(fidelity(&rho, &stored_target(init, phi_s))?);

    // 5. rise (still inside the phase window).
    advance(
        &mut transfer_traj,
        &mut rho,
        &mut t_now,
        &mut phi_s,
        &segs[4],
        &d_int,
        true,
        0,
        false,
    )?;
    // 6. retrieval hold.
    advance(
        &mut transfer_traj,
        &mut rho,
        &mut t_now,
        &mut phi_s,
        &segs[5],
        &d_int,
        false,
        0,
        false,
    )?;
    // 7. final fall (stored level already emptied — no phase).
    advance(
        &mut transfer_traj,
        &mut rho,
        &mut t_now,
        &mut phi_s,
        &segs[6],
        &d_int,
        false,
        0,
        false,
    )?;
    report.f_retrieval = Some(fidelity(&rho, &retrieved_target(init, phi_s))?);
    report.phi_s = phi_s;
    report.total_time = t_now;
    Ok((report, transfer_traj))
}

/// Deterministic stored-phase integral φ_s = ∫ δ_B,(−1)(t) dt over the
/// storage hold and its adjacent ramps (schedule segments 3–5), in
/// closed form. `run_protocol` accumulates the same integral numerically
/// on the integration grid; the two agree to integrator precision.
pub fn phase_correction(proto: &MemoryProtocol) -> Result<f64> {
    let sched = proto.schedule()?;
    let segs = sched.segments();
    let eff = &proto.effective;
    let mut phi = 0.0;
    for seg in &segs[2..5] {
        if seg.duration == 0.0 {
            continue;
        }
        let dm_start = eff.delta_b_minus(seg.b_start);
        let dm_end = eff.delta_b_minus(seg.b_end);
        // ∫₀^τ [dm_end + (dm_start − dm_end)·w(t)] dt
        let w_integral = match seg.profile {
            RampProfile::Step => 0.0,
            RampProfile::Linear => seg.duration / 2.0,
            RampProfile::Exponential => {
                seg.duration / 3.0 * (1.0 - (-3.0f64).exp())
            }
        };
        phi += dm_end * seg.duration + (dm_start - dm_end) * w_integral;
    }
    Ok(phi)
}

/// Result of a transfer-time calibration.
#[derive(Clone, Copy, Debug)]
pub struct Calibration {
    /// Optimal hold duration (s).
    pub hold_time: f64,
    /// Transfer fidelity at the optimum.
    pub fidelity: f64,
    /// Nominal π/(2g_(−1)) for reference.
    pub nominal: f64,
    /// The optimum sits against a window edge — widen the window.
    pub at_boundary: bool,
}

/// Golden-section maximization of the transfer fidelity over the hold
/// duration in [t₁(1−window), t₁(1+window)], resolved to 0.1 ns. The
/// returned hold never degrades the fidelity below the nominal hold's
/// value (the nominal is kept if the search cannot beat it).
pub fn calibrate_transfer_time(
    init: &InitialState,
    proto: &MemoryProtocol,
    window: f64,
) -> Result<Calibration> {
    if !(window > 0.0 && window < 1.0) {
        return Err(HqmError::InvalidParameter(
            "calibration window must be in (0, 1)".into(),
        ));
    }
    let nominal = proto.nominal_hold();
    let eval = |hold: f64| -> Result<f64> {
        let mut p = proto.clone();
        p.hold_override = Some(hold);
        p.transfer_only = true;
        p.track_leak = false;
        Ok(run_protocol(init, &p)?.f_transfer)
    };
    const TOL: f64 = 0.1e-9;
    let gr = (5.0f64.sqrt() - 1.0) / 2.0;
    let (lo, hi) = (nominal * (1.0 - window), nominal * (1.0 + window));
    let (mut a, mut b) = (lo, hi);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a > TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = eval(d)?;
        }
    }
    let mut best = (a + b) / 2.0;
    let mut f_best = eval(best)?;
    let f_nominal = eval(nominal)?;
    if f_nominal >= f_best {
        best = nominal;
        f_best = f_nominal;
    }
    Ok(Calibration {
        hold_time: best,
        fidelity: f_best,
        nominal,
        at_boundary: (best - lo).abs() < 2.0 * TOL || (hi - best).abs() < 2.0 * TOL,
    })
}

/// Reference fidelities (transfer, storage, retrieval) for the standard
/// step-ramp grid: initial state × g_(−1)/2π × NV T2*. Used for the
/// deviation columns of the table output.
pub const TABLE1_REFERENCE: [(&str, f64, f64, (f64, f64, f64)); 8] = [
    ("half", 700e3, 90e-6, (0.9689, 0.9598, 0.9318)),
    ("half", 700e3, 20e-6, (0.9627, 0.9548, 0.9218)),
    ("half", 350e3, 90e-6, (0.9421, 0.9363, 0.8880)),
    ("half", 350e3, 20e-6, (0.9307, 0.9270, 0.8709)),
    ("one", 700e3, 90e-6, (0.9317, 0.9284, 0.8653)),
    ("one", 700e3, 20e-6, (0.9268, 0.9239, 0.8562)),
    ("one", 350e3, 90e-6, (0.8695, 0.8668, 0.7537)),
    ("one", 350e3, 20e-6, (0.8608, 0.8581, 0.7386)),
];

/// Reference post-transfer fidelities for the ramped grid, as
/// (exponential 4 ns, exponential 10 ns, linear 4 ns, linear 10 ns).
pub const TABLE2_REFERENCE: [(&str, f64, f64, (f64, f64, f64, f64)); 8] = [
    ("half", 700e3, 90e-6, (0.9677, 0.9647, 0.9672, 0.9639)),
    ("half", 700e3, 20e-6, (0.9613, 0.9581, 0.9608, 0.9573)),
    ("half", 350e3, 90e-6, (0.9412, 0.9395, 0.9410, 0.9392)),
    ("half", 350e3, 20e-6, (0.9296, 0.9278, 0.9295, 0.9275)),
    ("one", 700e3, 90e-6, (0.9294, 0.9241, 0.9288, 0.9228)),
    ("one", 700e3, 20e-6, (0.9246, 0.9193, 0.9240, 0.9180)),
    ("one", 350e3, 90e-6, (0.8678, 0.8648, 0.8677, 0.8646)),
    ("one", 350e3, 20e-6, (0.8591, 0.8561, 0.8590, 0.8559)),
];

fn state_for(label: &str) -> InitialState {
    match label {
        "half" => InitialState::phi_half(),
        "one" => InitialState::phi_1(),
        "third" => InitialState::phi_third(),
        "quarter" => InitialState::phi_quarter(),
        "fifth" => InitialState::phi_fifth(),
        _ => InitialState::phi_0(),
    }
}

/// One row of the full-protocol comparison table.
#[derive(Clone, Debug)]
pub struct Table1Row {
    pub label: &'static str,
    pub g_hz: f64,
    pub nv_t2: f64,
    pub f_transfer: f64,
    pub f_storage: f64,
    pub f_retrieval: f64,
    pub reference: (f64, f64, f64),
}

impl Table1Row {
    pub fn deviations(&self) -> (f64, f64, f64) {
        (
            (self.f_transfer - self.reference.0).abs(),
            (self.f_storage - self.reference.1).abs(),
            (self.f_retrieval - self.reference.2).abs(),
        )
    }

    pub fn max_deviation(&self) -> f64 {
        let (a, b, c) = self.deviations();
        a.max(b).max(c)
    }
}

/// One row of the ramp-comparison table (post-transfer fidelity per ramp
/// shape and rise time).
#[derive(Clone, Debug)]
pub struct Table2Row {
    pub label: &'static str,
    pub g_hz: f64,
    pub nv_t2: f64,
    /// (exp 4 ns, exp 10 ns, lin 4 ns, lin 10 ns)
    pub cells: (f64, f64, f64, f64),
    pub reference: (f64, f64, f64, f64),
}

impl Table2Row {
    pub fn deviations(&self) -> (f64, f64, f64, f64) {
        (
            (self.cells.0 - self.reference.0).abs(),
            (self.cells.1 - self.reference.1).abs(),
            (self.cells.2 - self.reference.2).abs(),
            (self.cells.3 - self.reference.3).abs(),
        )
    }

    pub fn max_deviation(&self) -> f64 {
        let (a, b, c, d) = self.deviations();
        a.max(b).max(c).max(d)
    }
}

/// Run the full-protocol grid (rows in the fixed reference order,
/// computed in parallel).
pub fn run_table1(base: &MemoryProtocol) -> Result<Vec<Table1Row>> {
    TABLE1_REFERENCE
        .par_iter()
        .map(|&(label, g_hz, nv_t2, reference)| {
            let mut p = base.clone();
            p.g_override_hz = Some(g_hz);
            p.transfer_rates = StageRates {
                nv_t2,
                ..base.transfer_rates
            };
            p.transfer_only = false;
            let r = run_protocol(&state_for(label), &p)?;
            Ok(Table1Row {
                label,
                g_hz,
                nv_t2,
                f_transfer: r.f_transfer,
                f_storage: r.f_storage.expect("full run"),
                f_retrieval: r.f_retrieval.expect("full run"),
                reference,
            })
        })
        .collect()
}

/// Run the ramped transfer grid (post-transfer fidelity only; rows in
/// the fixed reference order, cells in parallel).
pub fn run_table2(base: &MemoryProtocol) -> Result<Vec<Table2Row>> {
    let cells: [(RampProfile, f64); 4] = [
        (RampProfile::Exponential, 4e-9),
        (RampProfile::Exponential, 10e-9),
        (RampProfile::Linear, 4e-9),
        (RampProfile::Linear, 10e-9),
    ];
    TABLE2_REFERENCE
        .par_iter()
        .map(|&(label, g_hz, nv_t2, reference)| {
            let fs = cells
                .par_iter()
                .map(|&(profile, rise)| {
                    let mut p = base.clone();
                    p.g_override_hz = Some(g_hz);
                    p.transfer_rates = StageRates {
                        nv_t2,
                        ..base.transfer_rates
                    };
                    p.ramp = Some((profile, rise));
                    p.transfer_only = true;
                    Ok(run_protocol(&state_for(label), &p)?.f_transfer)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(Table2Row {
                label,
                g_hz,
                nv_t2,
                cells: (fs[0], fs[1], fs[2], fs[3]),
                reference,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Cross-check values frozen from an independent implementation of
    // the identical protocol (same step, same rate conventions).
    const FROZEN_HALF_700_90: (f64, f64, f64) = (0.9944257, 0.9910094, 0.9855591);
    const FROZEN_ONE_350_20: (f64, f64, f64) = (0.9736883, 0.9732015, 0.9475949);
    const FROZEN_T2_HALF_700_90_EXP4: f64 = 0.9942140;
    const FROZEN_T2_HALF_700_90_EXP10: f64 = 0.9938639;
    const FROZEN_LEAK_MAX: f64 = 4.3987e-7;
    const TOL: f64 = 2e-4;

    fn base_proto() -> MemoryProtocol {
        MemoryProtocol::new(PhysicalParams::reference()).unwrap()
    }

    #[test]
    fn initial_states() {
        let states = [
            InitialState::phi_1(),
            InitialState::phi_fifth(),
            InitialState::phi_quarter(),
            InitialState::phi_third(),
            InitialState::phi_half(),
        ];
        // Norms and monotone excited weight (worst case first).
        let mut prev = f64::INFINITY;
        for s in &states {
            let v = s.state_vector();
            let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(s.excited_weight() < prev + 1e-12);
            prev = s.excited_weight();
        }
        assert!((states[0].excited_weight() - 1.0).abs() < 1e-12);
        assert!((states[4].excited_weight() - 0.5).abs() < 1e-12);
        assert!((InitialState::phi_0().excited_weight()).abs() < 1e-12);
        // Relative phase lands on the ground component.
        let s = InitialState::new(0.7, 1.1);
        let v = s.state_vector();
        assert!((v[IDX_GROUND].arg() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn schedule_has_seven_segments() {
        let mut p = base_proto();
        p.ramp = Some((RampProfile::Exponential, 4e-9));
        let sched = p.schedule().unwrap();
        assert_eq!(sched.segments().len(), 7);
        let total = 4.0 * 4e-9 + 2.0 * p.hold_time() + p.storage_time;
        assert!((sched.total_duration() - total).abs() < 1e-15);
        // Step schedule collapses the ramps to zero duration.
        let p = base_proto();
        let sched = p.schedule().unwrap();
        assert!((sched.total_duration() - (2.0 * p.hold_time() + p.storage_time)).abs() < 1e-15);
    }

    #[test]
    fn ground_state_is_stationary() {
        let mut p = base_proto();
        p.g_override_hz = Some(700e3);
        p.transfer_rates = StageRates::lossless();
        p.storage_rates = StageRates::lossless();
        let r = run_protocol(&InitialState::phi_0(), &p).unwrap();
        assert!((r.f_transfer - 1.0).abs() < 1e-9);
        assert!((r.f_storage.unwrap() - 1.0).abs() < 1e-9);
        assert!((r.f_retrieval.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lossless_protocol_near_unity() {
        let mut p = base_proto();
        p.g_override_hz = Some(700e3);
        p.transfer_rates = StageRates::lossless();
        p.storage_rates = StageRates::lossless();
        let r = run_protocol(&InitialState::phi_half(), &p).unwrap();
        // Only the ~1e−7 counter-rotating leakage separates this from 1.
        assert!(r.f_transfer > 0.9999, "f_t = {}", r.f_transfer);
        assert!(r.f_storage.unwrap() > 0.9999);
        assert!(r.f_retrieval.unwrap() > 0.9999);
    }

    #[test]
    fn frozen_cross_check_half_700_90() {
        let mut p = base_proto();
        p.g_override_hz = Some(700e3);
        p.transfer_rates = StageRates::transfer_default(90e-6);
        let r = run_protocol(&InitialState::phi_half(), &p).unwrap();
        let (ft, fs, fr) = FROZEN_HALF_700_90;
        assert!((r.f_transfer - ft).abs() < TOL, "f_t = {:.7}", r.f_transfer);
        assert!(
            (r.f_storage.unwrap() - fs).abs() < TOL,
            "f_s = {:.7}",
            r.f_storage.unwrap()
        );
        assert!(
            (r.f_retrieval.unwrap() - fr).abs() < TOL,
            "f_r = {:.7}",
            r.f_retrieval.unwrap()
        );
        // Monotone stage degradation.
        assert!(r.f_transfer >= r.f_storage.unwrap());
        assert!(r.f_storage.unwrap() >= r.f_retrieval.unwrap());
    }

    #[test]
    fn frozen_cross_check_one_350_20() {
        let mut p = base_proto();
        p.g_override_hz = Some(350e3);
        p.transfer_rates = StageRates::transfer_default(20e-6);
        let r = run_protocol(&InitialState::phi_1(), &p).unwrap();
        let (ft, fs, fr) = FROZEN_ONE_350_20;
        assert!((r.f_transfer - ft).abs() < TOL, "f_t = {:.7}", r.f_transfer);
        assert!((r.f_storage.unwrap() - fs).abs() < TOL);
        assert!((r.f_retrieval.unwrap() - fr).abs() < TOL);
    }

    #[test]
    fn frozen_cross_check_ramped_transfer() {
        let mut p = base_proto();
        p.g_override_hz = Some(700e3);
        p.transfer_rates = StageRates::transfer_default(90e-6);
        p.transfer_only = true;
        p.ramp = Some((RampProfile::Exponential, 4e-9));
        let f4 = run_protocol(&InitialState::phi_half(), &p)
            .unwrap()
            .f_transfer;
        assert!((f4 - FROZEN_T2_HALF_700_90_EXP4).abs() < TOL, "exp4 = {f4:.7}");
        p.ramp = Some((RampProfile::Exponential, 10e-9));
        let f10 = run_protocol(&InitialState::phi_half(), &p)
            .unwrap()
            .f_transfer;
        assert!((f10 - FROZEN_T2_HALF_700_90_EXP10).abs() < TOL, "exp10 = {f10:.7}");
        // Slower ramp loses slightly more.
        assert!(f4 > f10);
    }

    #[test]
    fn leakage_during_transfer() {
        let mut p = base_proto();
        p.g_override_hz = Some(700e3);
        p.transfer_rates = StageRates::transfer_default(90e-6);
        p.track_leak = true;
        p.transfer_only = true;
        let r = run_protocol(&InitialState::phi_half(), &p).unwrap();
        let leak = r.leak_max.unwrap();
        assert!(
            (leak - FROZEN_LEAK_MAX).abs() / FROZEN_LEAK_MAX < 1e-3,
            "leak = {leak:.4e}"
        );
        assert!(leak > 1e-8 && leak < 1e-6);
        // Dropping the fast channel removes the leakage entirely.
        p.drop_counter_rotating = true;
        let r = run_protocol(&InitialState::phi_half(), &p).unwrap();
        assert!(r.leak_max.unwrap() < 1e-12);
    }

    #[test]
    fn phase_correction_examples() {
        // Zero storage, step ramps → no phase.
        let mut p = base_proto();
        p.storage_time = 0.0;
        assert_eq!(phase_correction(&p).unwrap(), 0.0);

        // Constant detuning during the 10 ms hold.
        let p = base_proto();
        let dm = p.effective.delta_b_minus(p.b_off());
        let phi = phase_correction(&p).unwrap();
        assert!((phi - dm * 10e-3).abs() < 1e-9 * phi.abs());
        // δ_B/2π ≈ 224 MHz: φ_s ≈ 2π·2.24e6 rad.
        assert!((phi / TWO_PI / 1e6 - 2.2408).abs() < 0.002, "φ_s/2π = {:.4}e6", phi / TWO_PI / 1e6);

        // Doubling the hold doubles the phase.
        let mut p2 = base_proto();
        p2.storage_time = 20e-3;
        assert!((phase_correction(&p2).unwrap() - 2.0 * phi).abs() < 1e-6);

        // Ramps extend the window: equal rise and fall profiles add
        // exactly one rise time of full-detuning phase.
        let mut p3 = base_proto();
        p3.ramp = Some((RampProfile::Exponential, 6e-9));
        let phi3 = phase_correction(&p3).unwrap();
        assert!((phi3 - dm * (10e-3 + 6e-9)).abs() < 1e-9 * phi3.abs());
    }

    #[test]
    fn accumulated_phase_matches_closed_form() {
        let mut p = base_proto();
        p.g_override_hz = Some(700e3);
        p.ramp = Some((RampProfile::Linear, 10e-9));
        p.storage_time = 1e-6;
        let r = run_protocol(&InitialState::phi_half(), &p).unwrap();
        let phi = phase_correction(&p).unwrap();
        assert!(
            (r.phi_s - phi).abs() < 1e-6,
            "dynamic {} vs closed form {}",
            r.phi_s,
            phi
        );
    }

    #[test]
    fn calibration_recovers_nominal_for_steps() {
        let mut p = base_proto();
        p.g_override_hz = Some(700e3);
        p.transfer_rates = StageRates::lossless();
        let cal = calibrate_transfer_time(&InitialState::phi_half(), &p, 0.05).unwrap();
        assert!(
            (cal.hold_time - cal.nominal).abs() <= 0.2e-9,
            "calibrated {:.3} ns vs nominal {:.3} ns",
            cal.hold_time * 1e9,
            cal.nominal * 1e9
        );
        assert!(!cal.at_boundary);
        // Optimizer contract: never below the nominal fidelity.
        let mut pn = p.clone();
        pn.transfer_only = true;
        let f_nominal = run_protocol(&InitialState::phi_half(), &pn)
            .unwrap()
            .f_transfer;
        assert!(cal.fidelity >= f_nominal - 1e-12);
    }

    #[test]
    fn calibration_shortens_hold_for_ramps() {
        let mut p = base_proto();
        p.g_override_hz = Some(700e3);
        p.transfer_rates = StageRates::lossless();
        p.ramp = Some((RampProfile::Linear, 10e-9));
        let cal = calibrate_transfer_time(&InitialState::phi_half(), &p, 0.05).unwrap();
        // The ramp already transfers some population, so the optimal
        // hold is strictly shorter than π/(2g).
        assert!(
            cal.hold_time < cal.nominal - 0.1e-9,
            "calibrated {:.3} ns vs nominal {:.3} ns",
            cal.hold_time * 1e9,
            cal.nominal * 1e9
        );
        let mut pn = p.clone();
        pn.transfer_only = true;
        let f_nominal = run_protocol(&InitialState::phi_half(), &pn)
            .unwrap()
            .f_transfer;
        assert!(cal.fidelity >= f_nominal);
    }

    #[test]
    fn storage_detuning_guard() {
        let mut p = base_proto();
        p.g_override_hz = Some(3e6); // 100·g exceeds the 80 G detuning
        assert!(p.validate().is_err());
    }
}
