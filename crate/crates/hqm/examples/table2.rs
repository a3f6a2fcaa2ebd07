//! Ramped-transfer fidelity grid.
//!
//! The same eight parameter rows as the full-protocol grid, but
//! comparing bias-field ramp shapes during the transfer stage:
//! exponential vs linear rise, 4 ns vs 10 ns rise time. Faster ramps
//! spend less time partially detuned, so 4 ns beats 10 ns and the
//! exponential (which leaves the detuned region fastest) beats the
//! linear ramp in every matched pair.
//!
//! Run with: cargo run --example table2

use hqm::effective::PhysicalParams;
use hqm::protocol::{run_table2, MemoryProtocol};

fn main() -> hqm::Result<()> {
    let base = MemoryProtocol::new(PhysicalParams::reference())?;
    let rows = run_table2(&base)?;

    println!(
        "{:<6} {:>7} {:>7}   {:>9} {:>9} {:>9} {:>9}   {:>7}",
        "state", "g (kHz)", "T2 (µs)", "exp 4ns", "exp 10ns", "lin 4ns", "lin 10ns", "max dev"
    );
    for r in &rows {
        println!(
            "{:<6} {:>7.0} {:>7.0}   {:>9.7} {:>9.7} {:>9.7} {:>9.7}   {:>7.4}",
            r.label,
            r.g_hz / 1e3,
            r.nv_t2 * 1e6,
            r.cells.0,
            r.cells.1,
            r.cells.2,
            r.cells.3,
            r.max_deviation(),
        );
    }
    println!();
    let ordering = rows.iter().all(|r| {
        let (e4, e10, l4, l10) = r.cells;
        e4 >= l4 && e10 >= l10 && e4 >= e10 && l4 >= l10
    });
    println!("exp ≥ lin and 4 ns ≥ 10 ns in every matched pair: {ordering}");
    Ok(())
}
