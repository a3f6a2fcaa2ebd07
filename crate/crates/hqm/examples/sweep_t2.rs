//! Sensitivity sweep: NV T2* during transfer.
//!
//! Repeats the full |Φ_½⟩ / 700 kHz protocol while sweeping the NV
//! inhomogeneous dephasing time through {10, 20, 40, 90, 180} µs. The
//! retrieval fidelity improves monotonically — the transfer stages are
//! where the stored coherence is exposed to the NV T2* channel.
//!
//! Run with: cargo run --example sweep_t2

use hqm::effective::PhysicalParams;
use hqm::protocol::{run_protocol, InitialState, MemoryProtocol, StageRates};
use rayon::prelude::*;

fn main() -> hqm::Result<()> {
    let grid = [10e-6, 20e-6, 40e-6, 90e-6, 180e-6];
    let init = InitialState::phi_half();

    let rows: Vec<(f64, hqm::protocol::StageReport)> = grid
        .par_iter()
        .map(|&t2| {
            let mut proto = MemoryProtocol::new(PhysicalParams::reference())?;
            proto.g_override_hz = Some(700e3);
            proto.transfer_rates = StageRates::transfer_default(t2);
            let r = run_protocol(&init, &proto)?;
            Ok((t2, r))
        })
        .collect::<hqm::Result<Vec<_>>>()?;

    println!(
        "{:>9}  {:>10} {:>10} {:>10}",
        "T2* (µs)", "f_transfer", "f_storage", "f_retrieval"
    );
    for (t2, r) in &rows {
        println!(
            "{:>9.0}  {:>10.7} {:>10.7} {:>10.7}",
            t2 * 1e6,
            r.f_transfer,
            r.f_storage.unwrap(),
            r.f_retrieval.unwrap()
        );
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].1.f_retrieval.unwrap() > w[0].1.f_retrieval.unwrap());
    println!();
    println!("f_retrieval strictly increasing in T2*: {monotone}");
    Ok(())
}
