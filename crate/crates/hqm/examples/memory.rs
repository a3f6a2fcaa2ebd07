//! One full write → store → read memory run.
//!
//! Transfers |Φ_½⟩ into the NV ground-state pair {|0_N⟩, |−1_N⟩}, holds
//! it for 10 ms at the storage field (NV under dynamical decoupling),
//! and retrieves it back onto the flux qubit. Prints the three
//! checkpoint fidelities, the deterministic stored phase φ_s, and the
//! same run with 4 ns exponential ramps instead of ideal field steps.
//!
//! Run with: cargo run --example memory

use hqm::dynamics::RampProfile;
use hqm::effective::PhysicalParams;
use hqm::protocol::{phase_correction, run_protocol, InitialState, MemoryProtocol, StageRates};
use hqm::units::TWO_PI;

fn main() -> hqm::Result<()> {
    let mut proto = MemoryProtocol::new(PhysicalParams::reference())?;
    proto.g_override_hz = Some(700e3);
    proto.transfer_rates = StageRates::transfer_default(90e-6);
    proto.storage_time = 10e-3;
    let init = InitialState::phi_half();

    println!("ideal field steps, 10 ms storage");
    run_and_print(&init, &proto)?;

    proto.ramp = Some((RampProfile::Exponential, 4e-9));
    println!("4 ns exponential ramps, 10 ms storage");
    run_and_print(&init, &proto)?;
    Ok(())
}

fn run_and_print(init: &InitialState, proto: &MemoryProtocol) -> hqm::Result<()> {
    let r = run_protocol(init, proto)?;
    let phi_closed = phase_correction(proto)?;
    println!("  transfer hold      {:.4} µs", r.hold_time * 1e6);
    println!("  f_transfer         {:.7}", r.f_transfer);
    println!("  f_storage          {:.7}", r.f_storage.unwrap());
    println!("  f_retrieval        {:.7}", r.f_retrieval.unwrap());
    println!(
        "  φ_s                {:.4e} rad  ({:.6} rad mod 2π)",
        r.phi_s,
        r.phi_s.rem_euclid(TWO_PI)
    );
    println!(
        "  φ_s vs closed form {:.2e} rad",
        (r.phi_s - phi_closed).abs()
    );
    println!();
    Ok(())
}
