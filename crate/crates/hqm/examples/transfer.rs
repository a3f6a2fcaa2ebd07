//! Resonant transfer stage, time-resolved.
//!
//! Loads |Φ_½⟩ = (|1_F⟩ + |0_F⟩)/√2 ⊗ |0_N⟩, holds the bias field at
//! resonance for t₁ = π/(2g_(−1)) with g_(−1)/2π = 700 kHz, and prints
//! the population swap |1_F,0_N⟩ → |0_F,−1_N⟩ together with the tiny
//! counter-rotating leakage into |0_F,+1_N⟩.
//!
//! Run with: cargo run --example transfer

use hqm::effective::PhysicalParams;
use hqm::protocol::{run_protocol_traced, InitialState, MemoryProtocol, StageRates};

fn main() -> hqm::Result<()> {
    let mut proto = MemoryProtocol::new(PhysicalParams::reference())?;
    proto.g_override_hz = Some(700e3);
    proto.transfer_rates = StageRates::transfer_default(90e-6);
    proto.transfer_only = true;
    proto.track_leak = true;

    let init = InitialState::phi_half();
    let (report, traj) = run_protocol_traced(&init, &proto, 357)?;

    println!("transfer hold t₁ = {:.4} µs", report.hold_time * 1e6);
    println!();
    println!("{:>10}  {:>10}  {:>10}  {:>12}", "t (µs)", "|1_F,0_N⟩", "|0_F,−1_N⟩", "|0_F,+1_N⟩");
    let step = (traj.times.len() / 20).max(1);
    for i in (0..traj.times.len()).step_by(step) {
        let s = &traj.states[i];
        println!(
            "{:>10.4}  {:>10.6}  {:>10.6}  {:>12.3e}",
            traj.times[i] * 1e6,
            s.population(4),
            s.population(2),
            s.population(0),
        );
    }
    let last = traj.states.last().unwrap();
    println!(
        "{:>10.4}  {:>10.6}  {:>10.6}  {:>12.3e}",
        traj.times.last().unwrap() * 1e6,
        last.population(4),
        last.population(2),
        last.population(0),
    );
    println!();
    println!("transfer fidelity  {:.7}", report.f_transfer);
    println!("peak leakage       {:.4e}  (counter-rotating g_(+1) channel)", report.leak_max.unwrap());
    Ok(())
}
