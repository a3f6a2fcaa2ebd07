//! Full-protocol fidelity grid (step ramps).
//!
//! Eight rows — initial state {|Φ_½⟩, |Φ_1⟩} × g_(−1)/2π {700, 350} kHz
//! × NV T2* {90, 20} µs — each a complete write → store → read run with
//! 10 ms storage. Prints the three stage fidelities next to the
//! published reference values and their deviations.
//!
//! Run with: cargo run --example table1

use hqm::effective::PhysicalParams;
use hqm::protocol::{run_table1, MemoryProtocol};

fn main() -> hqm::Result<()> {
    let base = MemoryProtocol::new(PhysicalParams::reference())?;
    let rows = run_table1(&base)?;

    println!(
        "{:<6} {:>7} {:>7}   {:>9} {:>9} {:>9}   {:>9} {:>9} {:>9}   {:>7}",
        "state", "g (kHz)", "T2 (µs)", "f_t", "f_s", "f_r", "ref f_t", "ref f_s", "ref f_r", "max dev"
    );
    for r in &rows {
        println!(
            "{:<6} {:>7.0} {:>7.0}   {:>9.7} {:>9.7} {:>9.7}   {:>9.4} {:>9.4} {:>9.4}   {:>7.4}",
            r.label,
            r.g_hz / 1e3,
            r.nv_t2 * 1e6,
            r.f_transfer,
            r.f_storage,
            r.f_retrieval,
            r.reference.0,
            r.reference.1,
            r.reference.2,
            r.max_deviation(),
        );
    }
    let worst = rows.iter().map(|r| r.max_deviation()).fold(0.0, f64::max);
    println!();
    println!("worst deviation from reference: {worst:.4}");
    println!(
        "stage ordering f_t ≥ f_s ≥ f_r holds in every row: {}",
        rows.iter()
            .all(|r| r.f_transfer >= r.f_storage && r.f_storage >= r.f_retrieval)
    );
    Ok(())
}
