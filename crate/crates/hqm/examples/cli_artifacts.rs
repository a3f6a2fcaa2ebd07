//! The CLI surface, driven as a library.
//!
//! Everything the `hqm` binary does is callable directly: this example
//! writes the `couplings`, `ramp-plot`, and `memory` artifacts into a
//! temporary directory and shows where each file lands. Artifact
//! directories always carry the fully-resolved config snapshot, so any
//! run can be reproduced by re-feeding `config.resolved.txt`.
//!
//! Run with: cargo run --example cli_artifacts

use hqm::cli::{cmd_couplings, cmd_memory, cmd_ramp_plot};
use hqm::config::Config;

fn main() -> hqm::Result<()> {
    let dir = std::env::temp_dir().join("hqm-example-artifacts");
    std::fs::create_dir_all(&dir)?;

    let cfg = Config::parse_str(
        "[protocol]\n\
         storage_time_s = 1e-4\n\
         ramp_profile = exponential\n\
         rise_time_s = 4e-9\n\
         track_leak = true\n\
         [integrator]\n\
         stride = 100\n",
    )?;

    for (name, artifact) in [
        ("couplings", cmd_couplings(&cfg, &dir)?),
        ("ramp-plot", cmd_ramp_plot(&cfg, &dir)?),
        ("memory", cmd_memory(&cfg, &dir)?),
    ] {
        println!("{name}:");
        for (k, v) in &artifact.summary {
            println!("  {k} = {v}");
        }
        println!("  files:");
        for f in &artifact.files {
            println!("    {}", f.display());
        }
        println!();
    }
    println!("equivalent shell commands:");
    println!("  hqm couplings --out {}", dir.display());
    println!("  hqm ramp-plot --config run.cfg --out {}", dir.display());
    println!("  hqm memory    --config run.cfg --calibrate");
    Ok(())
}
