//! Bias-field ramps, stored phase, and hold calibration.
//!
//! Three demonstrations around the field schedule:
//!   1. the B(t) shapes of linear vs exponential 10 ns ramps,
//!   2. the deterministic stored phase φ_s — closed form vs the value
//!      the integrator accumulates along the trajectory,
//!   3. golden-section calibration of the transfer hold, which shortens
//!      the hold when ramps already transfer part of the population.
//!
//! Run with: cargo run --example ramps

use hqm::dynamics::RampProfile;
use hqm::effective::PhysicalParams;
use hqm::protocol::{
    calibrate_transfer_time, phase_correction, run_protocol, InitialState, MemoryProtocol,
    StageRates,
};

fn main() -> hqm::Result<()> {
    let rise = 10e-9;
    println!("ramp weight w(t) over a {:.0} ns rise (B = B_res + (B_L − B_res)·w)", rise * 1e9);
    println!("{:>8}  {:>10}  {:>12}", "t (ns)", "linear", "exponential");
    for k in 0..=10 {
        let t = rise * k as f64 / 10.0;
        println!(
            "{:>8.1}  {:>10.6}  {:>12.6}",
            t * 1e9,
            RampProfile::Linear.weight(t, rise),
            RampProfile::Exponential.weight(t, rise),
        );
    }
    println!();

    let mut proto = MemoryProtocol::new(PhysicalParams::reference())?;
    proto.g_override_hz = Some(700e3);
    proto.transfer_rates = StageRates::transfer_default(90e-6);
    proto.ramp = Some((RampProfile::Linear, rise));
    proto.storage_time = 1e-6;
    let init = InitialState::phi_half();

    let r = run_protocol(&init, &proto)?;
    let closed = phase_correction(&proto)?;
    println!("stored phase over 1 µs storage + 10 ns ramps");
    println!("  closed form   {closed:.9e} rad");
    println!("  accumulated   {:.9e} rad", r.phi_s);
    println!("  difference    {:.2e} rad", (r.phi_s - closed).abs());
    println!();

    // Calibration: with ramps, some transfer already happens on the way
    // in and out of resonance, so the optimal hold is below π/(2g).
    let mut lossless = proto.clone();
    lossless.transfer_rates = StageRates::lossless();
    let cal = calibrate_transfer_time(&init, &lossless, 0.05)?;
    println!("transfer-hold calibration (lossless, 10 ns linear ramps)");
    println!("  nominal hold  {:.4} ns", cal.nominal * 1e9);
    println!("  calibrated    {:.4} ns", cal.hold_time * 1e9);
    println!("  fidelity      {:.9}", cal.fidelity);
    println!("  at boundary   {}", cal.at_boundary);
    Ok(())
}
