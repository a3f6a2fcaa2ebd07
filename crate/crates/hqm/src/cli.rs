//! The `hqm` command-line interface.
//!
//! ```text
//! hqm <command> --config FILE [--out DIR] [--drop-counter-rotating] [--calibrate]
//! ```
//!
//! Commands: `couplings`, `transfer`, `memory`, `table1`, `table2`,
//! `oracle`, `ramp-plot`, `sweep` (sweep adds `--axis section.key` and a
//! grid via `--values v1,v2,…` or `--min A --max B --points N`).
//!
//! Every command writes a [`RunArtifact`]: an output directory holding
//! the resolved config snapshot, CSV files (each embedding that same
//! snapshot in `#` metadata lines), optional SVG plots, and a
//! `summary.txt` with key metrics and a pass/fail verdict. The directory
//! is `--out` if given, else the `HQM_OUT_DIR` environment variable,
//! else `./hqm-out`. Output is deterministic: the same config and binary
//! version produce byte-identical files.
//!
//! Table commands double as regression gates: when a fidelity deviates
//! from its reference beyond the acceptance tolerance (or a required
//! ordering pattern breaks), the process exit code is 2.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::Config;
use crate::csvout::{fid, num, CsvDoc};
use crate::dynamics::RampProfile;
use crate::effective::{
    effective_coupling, effective_shifts, resonance_field, EffectiveParams,
};
use crate::error::{HqmError, Result};
use crate::geometry::{coupling_g_fy, coupling_g_yn, sample_spin_sites, shift_delta_yn};
use crate::oracle::{validate_swt, FullModel};
use crate::protocol::{
    calibrate_transfer_time, phase_correction, run_protocol, run_protocol_traced, run_table1,
    run_table2, MemoryProtocol, Table2Row,
};
use crate::svg::LinePlot;
use crate::units::TWO_PI;

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "HQM_OUT_DIR";

/// Acceptance tolerance for table 1 deviations (|Φ_½⟩ rows are tighter).
pub const TABLE1_TOL: f64 = 0.015;
pub const TABLE1_TOL_HALF: f64 = 0.010;
/// Acceptance tolerance for table 2 deviations.
pub const TABLE2_TOL: f64 = 0.010;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Couplings,
    Transfer,
    Memory,
    Table1,
    Table2,
    Oracle,
    RampPlot,
    Sweep,
}

impl Command {
    fn parse(s: &str) -> Option<Command> {
        Some(match s {
            "couplings" => Command::Couplings,
            "transfer" => Command::Transfer,
            "memory" => Command::Memory,
            "table1" => Command::Table1,
            "table2" => Command::Table2,
            "oracle" => Command::Oracle,
            "ramp-plot" => Command::RampPlot,
            "sweep" => Command::Sweep,
            _ => return None,
        })
    }
}

/// Parsed command line.
#[derive(Clone, Debug)]
pub struct CliArgs {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub drop_counter_rotating: bool,
    pub calibrate: bool,
    pub axis: Option<String>,
    pub values: Option<Vec<f64>>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
}

pub const USAGE: &str = "\
usage: hqm <command> [--config FILE] [--out DIR] [--drop-counter-rotating] [--calibrate]

commands:
  couplings   geometry → coupling pipeline: N, g_FY, g_YN, shifts, g_(±1), B_res
  transfer    population-vs-time traces of the resonant transfer stage
  memory      one full write → store → read run with stage fidelities
  table1      full-protocol fidelity grid with reference deviations (exit 2 on breach)
  table2      ramped-transfer fidelity grid with reference deviations (exit 2 on breach)
  oracle      effective-vs-full-model trace distance over one transfer
  ramp-plot   bias-field schedule B(t) as CSV/SVG
  sweep       protocol runs over a config-key grid
              (--axis section.key and --values v1,v2,… or --min A --max B --points N)

options:
  --config FILE             key = value config (defaults apply when omitted)
  --out DIR                 output directory (else $HQM_OUT_DIR, else ./hqm-out)
  --drop-counter-rotating   drop the fast g_(+1) channel
  --calibrate               golden-section calibration of the transfer hold
  --help                    this text
";

/// Parse argv (without the program name).
pub fn parse_args(args: &[String]) -> Result<CliArgs> {
    let mut it = args.iter();
    let cmd = it
        .next()
        .ok_or_else(|| HqmError::Config(format!("missing command\n{USAGE}")))?;
    if cmd == "--help" || cmd == "-h" {
        return Err(HqmError::Config(USAGE.to_string()));
    }
    let command = Command::parse(cmd)
        .ok_or_else(|| HqmError::Config(format!("unknown command `{cmd}`\n{USAGE}")))?;
    let mut out = CliArgs {
        command,
        config: None,
        out: None,
        drop_counter_rotating: false,
        calibrate: false,
        axis: None,
        values: None,
        min: None,
        max: None,
        points: None,
    };
    let need_value = |it: &mut std::slice::Iter<String>, flag: &str| -> Result<String> {
        it.next()
            .map(|s| s.to_string())
            .ok_or_else(|| HqmError::Config(format!("flag {flag} needs a value")))
    };
    while let Some(a) = it.next() {
        match a.as_str() {
            "--config" => out.config = Some(PathBuf::from(need_value(&mut it, "--config")?)),
            "--out" => out.out = Some(PathBuf::from(need_value(&mut it, "--out")?)),
            "--drop-counter-rotating" => out.drop_counter_rotating = true,
            "--calibrate" => out.calibrate = true,
            "--axis" => out.axis = Some(need_value(&mut it, "--axis")?),
            "--values" => {
                let list = need_value(&mut it, "--values")?;
                let mut vs = Vec::new();
                for part in list.split(',') {
                    vs.push(part.trim().parse::<f64>().map_err(|_| {
                        HqmError::Config(format!("--values: `{part}` is not a number"))
                    })?);
                }
                out.values = Some(vs);
            }
            "--min" => {
                out.min = Some(need_value(&mut it, "--min")?.parse().map_err(|_| {
                    HqmError::Config("--min expects a number".into())
                })?)
            }
            "--max" => {
                out.max = Some(need_value(&mut it, "--max")?.parse().map_err(|_| {
                    HqmError::Config("--max expects a number".into())
                })?)
            }
            "--points" => {
                out.points = Some(need_value(&mut it, "--points")?.parse().map_err(|_| {
                    HqmError::Config("--points expects an integer".into())
                })?)
            }
            "--help" | "-h" => return Err(HqmError::Config(USAGE.to_string())),
            other => {
                return Err(HqmError::Config(format!(
                    "unknown flag `{other}`\n{USAGE}"
                )))
            }
        }
    }
    Ok(out)
}

/// Resolve the output directory: flag > environment > `./hqm-out`.
pub fn resolve_out_dir(flag: Option<&Path>, env_value: Option<&str>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(e) = env_value {
        if !e.is_empty() {
            return PathBuf::from(e);
        }
    }
    PathBuf::from("hqm-out")
}

/// Everything one command run produced.
#[derive(Clone, Debug)]
pub struct RunArtifact {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Vec<(String, String)>,
    pub passed: bool,
}

impl RunArtifact {
    fn new(dir: &Path) -> Self {
        RunArtifact {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            summary: Vec::new(),
            passed: true,
        }
    }

    fn add_metric(&mut self, key: &str, value: String) {
        self.summary.push((key.to_string(), value));
    }

    fn write_csv(&mut self, name: &str, doc: &CsvDoc) -> Result<()> {
        let path = self.dir.join(name);
        doc.write(&path)?;
        self.files.push(path);
        Ok(())
    }

    fn write_svg(&mut self, name: &str, plot: &LinePlot) -> Result<()> {
        let path = self.dir.join(name);
        plot.write(&path)?;
        self.files.push(path);
        Ok(())
    }

    /// Write `config.resolved.txt` and `summary.txt` (metrics plus the
    /// final `status = pass|fail` line).
    fn finish(&mut self, cfg: &Config) -> Result<()> {
        let cfg_path = self.dir.join("config.resolved.txt");
        std::fs::write(&cfg_path, cfg.to_text())?;
        self.files.push(cfg_path);
        let mut text = String::new();
        for (k, v) in &self.summary {
            text.push_str(&format!("{k} = {v}\n"));
        }
        text.push_str(&format!(
            "status = {}\n",
            if self.passed { "pass" } else { "fail" }
        ));
        let sum_path = self.dir.join("summary.txt");
        std::fs::write(&sum_path, text)?;
        self.files.push(sum_path);
        Ok(())
    }
}

fn base_doc(cfg: &Config, command: &str) -> CsvDoc {
    let mut doc = CsvDoc::new();
    doc.meta(format!("tool = hqm {}", env!("CARGO_PKG_VERSION")))
        .meta(format!("command = {command}"))
        .meta("resolved config:")
        .meta_block(&cfg.to_text());
    doc
}

/// Apply the CLI flag overrides onto a parsed config.
fn apply_flags(cfg: &mut Config, args: &CliArgs) {
    if args.drop_counter_rotating {
        cfg.model.drop_counter_rotating = true;
    }
    if args.calibrate {
        cfg.protocol.calibrate = true;
    }
}

/// Build the protocol from config, running hold calibration when asked.
fn prepared_protocol(cfg: &Config) -> Result<(MemoryProtocol, crate::protocol::InitialState)> {
    let (mut proto, init) = cfg.build_protocol()?;
    if cfg.protocol.calibrate {
        let cal = calibrate_transfer_time(&init, &proto, cfg.protocol.calibration_window)?;
        proto.hold_override = Some(cal.hold_time);
    }
    Ok((proto, init))
}

/// `couplings`: the geometry-to-coupling pipeline.
pub fn cmd_couplings(cfg: &Config, out_dir: &Path) -> Result<RunArtifact> {
    let mut art = RunArtifact::new(out_dir);
    let (sphere, fq, nv) = cfg.build_geometry();
    let n_sites = sample_spin_sites(&sphere).len();
    let g_fy = coupling_g_fy(&sphere, &fq)?;
    let g_yn = coupling_g_yn(&sphere, &nv)?;
    let d_yn = shift_delta_yn(&sphere, &nv)?;
    let params = cfg.build_params()?;
    let (d_f, d_n_minus, d_n_plus) = effective_shifts(&params)?;
    let g_minus = effective_coupling(&params, -1)?;
    let g_plus = effective_coupling(&params, 1)?;
    let b_res = resonance_field(&params)?;

    let mut doc = base_doc(cfg, "couplings");
    doc.meta(format!("n_sites = {n_sites}"))
        .meta(format!("b_res_t = {}", num(b_res)))
        .meta("value_si: rad/s for frequencies, SI base units otherwise")
        .header(&["quantity", "value_si", "value_hz"]);
    let mut freq = |name: &str, v: f64| {
        doc.row(vec![name.to_string(), num(v), num(v / TWO_PI)]);
    };
    freq("g_fy", g_fy);
    freq("g_yn", g_yn);
    freq("delta_yn", d_yn);
    freq("delta_f", d_f);
    freq("delta_n_minus", d_n_minus);
    freq("delta_n_plus", d_n_plus);
    freq("g_minus", g_minus);
    freq("g_plus", g_plus);
    doc.row(vec!["n_sites".into(), format!("{n_sites}"), String::new()]);
    doc.row(vec!["b_res".into(), num(b_res), String::new()]);
    art.write_csv("couplings.csv", &doc)?;

    let g_minus_hz = g_minus.abs() / TWO_PI;
    art.add_metric("n_sites", format!("{n_sites}"));
    art.add_metric("g_fy_hz", num(g_fy / TWO_PI));
    art.add_metric("g_yn_hz", num(g_yn / TWO_PI));
    art.add_metric("g_minus_hz", num(g_minus_hz));
    art.add_metric("g_plus_hz", num(g_plus.abs() / TWO_PI));
    art.add_metric("b_res_t", num(b_res));
    let in_band = (0.1e6..=1.5e6).contains(&g_minus_hz);
    art.add_metric("g_minus_in_100khz_1500khz_band", format!("{in_band}"));
    art.finish(cfg)?;
    Ok(art)
}

/// `transfer`: time-resolved populations of the transfer stage.
pub fn cmd_transfer(cfg: &Config, out_dir: &Path) -> Result<RunArtifact> {
    let mut art = RunArtifact::new(out_dir);
    let (mut proto, init) = prepared_protocol(cfg)?;
    proto.transfer_only = true;
    proto.track_leak = true;
    let (report, traj) = run_protocol_traced(&init, &proto, cfg.integrator.stride)?;

    let mut doc = base_doc(cfg, "transfer");
    doc.header(&[
        "time_s",
        "p_0f_plus1",
        "p_0f_0",
        "p_0f_minus1",
        "p_1f_plus1",
        "p_1f_0",
        "p_1f_minus1",
    ]);
    for (t, s) in traj.times.iter().zip(traj.states.iter()) {
        doc.row(vec![
            num(*t),
            num(s.population(0)),
            num(s.population(1)),
            num(s.population(2)),
            num(s.population(3)),
            num(s.population(4)),
            num(s.population(5)),
        ]);
    }
    art.write_csv("transfer.csv", &doc)?;

    let mut plot = LinePlot::new(
        "transfer-stage populations",
        "time (µs)",
        "population",
    );
    let series = |idx: usize| -> Vec<(f64, f64)> {
        traj.times
            .iter()
            .zip(traj.states.iter())
            .map(|(t, s)| (*t * 1e6, s.population(idx)))
            .collect()
    };
    plot.series("|1_F,0_N>", series(4));
    plot.series("|0_F,-1_N>", series(2));
    plot.series("|0_F,+1_N> x 1e6", series(0).into_iter().map(|(t, p)| (t, p * 1e6)).collect());
    art.write_svg("transfer.svg", &plot)?;

    art.add_metric("f_transfer", fid(report.f_transfer));
    art.add_metric("hold_time_s", num(report.hold_time));
    if let Some(leak) = report.leak_max {
        art.add_metric("leak_max", num(leak));
    }
    art.add_metric("rows", format!("{}", doc.n_rows()));
    art.finish(cfg)?;
    Ok(art)
}

/// `memory`: one full protocol run.
pub fn cmd_memory(cfg: &Config, out_dir: &Path) -> Result<RunArtifact> {
    let mut art = RunArtifact::new(out_dir);
    let (mut proto, init) = prepared_protocol(cfg)?;
    proto.track_leak = cfg.protocol.track_leak;
    let report = run_protocol(&init, &proto)?;
    let phi_closed = phase_correction(&proto)?;

    let mut doc = base_doc(cfg, "memory");
    doc.header(&[
        "f_transfer",
        "f_storage",
        "f_retrieval",
        "phi_s_rad",
        "phi_s_mod_2pi_rad",
        "hold_time_s",
        "storage_time_s",
        "total_time_s",
    ]);
    doc.row(vec![
        fid(report.f_transfer),
        fid(report.f_storage.unwrap_or(f64::NAN)),
        fid(report.f_retrieval.unwrap_or(f64::NAN)),
        num(report.phi_s),
        num(report.phi_s.rem_euclid(TWO_PI)),
        num(report.hold_time),
        num(report.storage_time),
        num(report.total_time),
    ]);
    art.write_csv("memory.csv", &doc)?;

    art.add_metric("f_transfer", fid(report.f_transfer));
    art.add_metric("f_storage", fid(report.f_storage.unwrap_or(f64::NAN)));
    art.add_metric("f_retrieval", fid(report.f_retrieval.unwrap_or(f64::NAN)));
    art.add_metric("phi_s_mod_2pi_rad", num(report.phi_s.rem_euclid(TWO_PI)));
    art.add_metric(
        "phi_s_vs_closed_form_rad",
        num((report.phi_s - phi_closed).abs()),
    );
    art.add_metric("hold_time_s", num(report.hold_time));
    if let Some(leak) = report.leak_max {
        art.add_metric("leak_max", num(leak));
    }
    if cfg.protocol.calibrate {
        art.add_metric("calibrated_hold_s", num(proto.hold_time()));
        art.add_metric("nominal_hold_s", num(proto.nominal_hold()));
    }
    art.finish(cfg)?;
    Ok(art)
}

fn table1_tolerance(label: &str) -> f64 {
    if label == "half" {
        TABLE1_TOL_HALF
    } else {
        TABLE1_TOL
    }
}

/// Pattern checks for the ramped grid: exponential beats linear at equal
/// rise time, and 4 ns beats 10 ns at equal profile, in every row.
pub fn table2_patterns_hold(rows: &[Table2Row]) -> bool {
    rows.iter().all(|r| {
        let (e4, e10, l4, l10) = r.cells;
        e4 >= l4 && e10 >= l10 && e4 >= e10 && l4 >= l10
    })
}

/// `table1`: the full-protocol grid with reference deviations.
pub fn cmd_table1(cfg: &Config, out_dir: &Path) -> Result<RunArtifact> {
    let mut art = RunArtifact::new(out_dir);
    let (base, _) = cfg.build_protocol()?;
    let rows = run_table1(&base)?;

    let mut doc = base_doc(cfg, "table1");
    doc.header(&[
        "state",
        "g_minus_hz",
        "nv_t2_s",
        "f_transfer",
        "f_storage",
        "f_retrieval",
        "ref_transfer",
        "ref_storage",
        "ref_retrieval",
        "dev_transfer",
        "dev_storage",
        "dev_retrieval",
        "tolerance",
    ]);
    let mut worst: f64 = 0.0;
    let mut passed = true;
    for r in &rows {
        let (dt, ds, dr) = r.deviations();
        let tol = table1_tolerance(r.label);
        passed &= r.max_deviation() <= tol;
        worst = worst.max(r.max_deviation());
        doc.row(vec![
            r.label.to_string(),
            num(r.g_hz),
            num(r.nv_t2),
            fid(r.f_transfer),
            fid(r.f_storage),
            fid(r.f_retrieval),
            fid(r.reference.0),
            fid(r.reference.1),
            fid(r.reference.2),
            fid(dt),
            fid(ds),
            fid(dr),
            num(tol),
        ]);
    }
    art.write_csv("table1.csv", &doc)?;
    art.add_metric("rows", format!("{}", rows.len()));
    art.add_metric("max_deviation", fid(worst));
    art.add_metric(
        "ordering_f_t_ge_f_s_ge_f_r",
        format!(
            "{}",
            rows.iter()
                .all(|r| r.f_transfer >= r.f_storage && r.f_storage >= r.f_retrieval)
        ),
    );
    art.passed = passed;
    art.finish(cfg)?;
    Ok(art)
}

/// `table2`: the ramped-transfer grid with reference deviations.
pub fn cmd_table2(cfg: &Config, out_dir: &Path) -> Result<RunArtifact> {
    let mut art = RunArtifact::new(out_dir);
    let (base, _) = cfg.build_protocol()?;
    let rows = run_table2(&base)?;

    let mut doc = base_doc(cfg, "table2");
    doc.header(&[
        "state",
        "g_minus_hz",
        "nv_t2_s",
        "f_exp_4ns",
        "f_exp_10ns",
        "f_lin_4ns",
        "f_lin_10ns",
        "ref_exp_4ns",
        "ref_exp_10ns",
        "ref_lin_4ns",
        "ref_lin_10ns",
        "dev_max",
        "tolerance",
    ]);
    let mut worst: f64 = 0.0;
    let mut passed = true;
    for r in &rows {
        passed &= r.max_deviation() <= TABLE2_TOL;
        worst = worst.max(r.max_deviation());
        doc.row(vec![
            r.label.to_string(),
            num(r.g_hz),
            num(r.nv_t2),
            fid(r.cells.0),
            fid(r.cells.1),
            fid(r.cells.2),
            fid(r.cells.3),
            fid(r.reference.0),
            fid(r.reference.1),
            fid(r.reference.2),
            fid(r.reference.3),
            fid(r.max_deviation()),
            num(TABLE2_TOL),
        ]);
    }
    let patterns = table2_patterns_hold(&rows);
    passed &= patterns;
    art.write_csv("table2.csv", &doc)?;
    art.add_metric("rows", format!("{}", rows.len()));
    art.add_metric("max_deviation", fid(worst));
    art.add_metric("patterns_exp_ge_lin_and_4ns_ge_10ns", format!("{patterns}"));
    art.passed = passed;
    art.finish(cfg)?;
    Ok(art)
}

/// `oracle`: full-model validation of the effective description.
pub fn cmd_oracle(cfg: &Config, out_dir: &Path) -> Result<RunArtifact> {
    let mut art = RunArtifact::new(out_dir);
    let params = cfg.build_params()?;
    let eff = EffectiveParams::from_physical(&params)?;
    let duration = std::f64::consts::PI / (2.0 * eff.g_minus);
    let delta = params.omega_f - params.omega_k;
    let g_fy = params.g_fy;
    let model = FullModel::new(params, cfg.integrator.oracle_n_max)?;
    let report = validate_swt(&model, duration, cfg.integrator.oracle_dt_s)?;

    let mut doc = base_doc(cfg, "oracle");
    doc.header(&["time_s", "trace_distance", "magnon_occupation"]);
    for i in 0..report.times.len() {
        doc.row(vec![
            num(report.times[i]),
            num(report.trace_distances[i]),
            num(report.magnon_occupations[i]),
        ]);
    }
    art.write_csv("oracle.csv", &doc)?;

    let mut plot = LinePlot::new(
        "effective vs full model",
        "time (µs)",
        "trace distance / occupation",
    );
    plot.series(
        "trace distance",
        report
            .times
            .iter()
            .zip(report.trace_distances.iter())
            .map(|(t, d)| (*t * 1e6, *d))
            .collect(),
    );
    plot.series(
        "magnon occupation",
        report
            .times
            .iter()
            .zip(report.magnon_occupations.iter())
            .map(|(t, m)| (*t * 1e6, *m))
            .collect(),
    );
    art.write_svg("oracle.svg", &plot)?;

    let magnon_bound = 10.0 * (g_fy / delta).powi(2);
    art.add_metric("max_trace_distance", num(report.max_trace_distance));
    art.add_metric("max_magnon_occupation", num(report.max_magnon_occupation));
    art.add_metric("magnon_bound", num(magnon_bound));
    art.add_metric("unitarity_defect", num(report.unitarity_defect));
    art.add_metric("effective_coupling_hz", num(report.effective_coupling / TWO_PI));
    art.add_metric(
        "trace_distance_below_5e-2",
        format!("{}", report.max_trace_distance < 5e-2),
    );
    art.add_metric(
        "magnon_below_bound",
        format!("{}", report.max_magnon_occupation < magnon_bound),
    );
    art.finish(cfg)?;
    Ok(art)
}

/// `ramp-plot`: the bias-field schedule as data.
pub fn cmd_ramp_plot(cfg: &Config, out_dir: &Path) -> Result<RunArtifact> {
    let mut art = RunArtifact::new(out_dir);
    let (proto, _) = prepared_protocol(cfg)?;
    let sched = proto.schedule()?;
    let eff = &proto.effective;
    let b_off = proto.b_off();

    let mut doc = base_doc(cfg, "ramp-plot");
    doc.header(&["time_s", "b_field_t", "b_offset_gauss", "delta_minus_hz"]);
    let mut t0 = 0.0f64;
    let mut transfer_window: Vec<(f64, f64)> = Vec::new();
    for (i, seg) in sched.segments().iter().enumerate() {
        let samples = if seg.profile == RampProfile::Step { 2 } else { 257 };
        for k in 0..samples {
            let t_loc = seg.duration * k as f64 / (samples - 1) as f64;
            let w = seg.profile.weight(t_loc, seg.duration);
            let b = seg.b_end + (seg.b_start - seg.b_end) * w;
            let t = t0 + t_loc;
            doc.row(vec![
                num(t),
                num(b),
                num((b - b_off) / 1e-4),
                num(eff.delta_b_minus(b) / TWO_PI),
            ]);
            if i < 3 {
                transfer_window.push((t * 1e9, (b - b_off) / 1e-4));
            }
        }
        t0 += seg.duration;
    }
    art.write_csv("ramp.csv", &doc)?;

    let mut plot = LinePlot::new("bias-field schedule (transfer window)", "time (ns)", "B − B_L (G)");
    plot.series("B(t)", transfer_window);
    art.write_svg("ramp.svg", &plot)?;

    art.add_metric("segments", format!("{}", sched.segments().len()));
    art.add_metric("total_time_s", num(sched.total_duration()));
    art.add_metric("hold_time_s", num(proto.hold_time()));
    art.finish(cfg)?;
    Ok(art)
}

/// `sweep`: full protocol runs over a numeric config-key grid.
pub fn cmd_sweep(
    cfg: &Config,
    out_dir: &Path,
    axis: &str,
    values: &[f64],
) -> Result<RunArtifact> {
    if values.is_empty() {
        return Err(HqmError::Config("sweep needs at least one grid point".into()));
    }
    // Validate the axis before spawning anything.
    cfg.clone().set_numeric(axis, values[0])?;
    let mut art = RunArtifact::new(out_dir);
    let mut grid: Vec<f64> = values.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("grid values must not be NaN"));

    let results: Vec<(f64, crate::protocol::StageReport)> = grid
        .par_iter()
        .map(|&v| {
            let mut c = cfg.clone();
            c.set_numeric(axis, v)?;
            let (proto, init) = c.build_protocol()?;
            let report = run_protocol(&init, &proto)?;
            Ok((v, report))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut doc = base_doc(cfg, "sweep");
    doc.meta(format!("axis = {axis}"));
    doc.header(&[
        "axis_value",
        "f_transfer",
        "f_storage",
        "f_retrieval",
        "phi_s_mod_2pi_rad",
    ]);
    for (v, r) in &results {
        doc.row(vec![
            num(*v),
            fid(r.f_transfer),
            fid(r.f_storage.unwrap_or(f64::NAN)),
            fid(r.f_retrieval.unwrap_or(f64::NAN)),
            num(r.phi_s.rem_euclid(TWO_PI)),
        ]);
    }
    art.write_csv("sweep.csv", &doc)?;

    let mut plot = LinePlot::new(format!("sweep over {axis}"), axis, "fidelity");
    plot.series(
        "f_transfer",
        results.iter().map(|(v, r)| (*v, r.f_transfer)).collect(),
    );
    plot.series(
        "f_retrieval",
        results
            .iter()
            .map(|(v, r)| (*v, r.f_retrieval.unwrap_or(f64::NAN)))
            .collect(),
    );
    art.write_svg("sweep.svg", &plot)?;

    art.add_metric("axis", axis.to_string());
    art.add_metric("points", format!("{}", results.len()));
    art.finish(cfg)?;
    Ok(art)
}

/// Linear grid for `--min/--max/--points`.
fn linspace(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(HqmError::Config("--points must be ≥ 1".into()));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    Ok((0..points)
        .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
        .collect())
}

/// Dispatch one parsed command line. `env_out_dir` carries the
/// [`OUT_DIR_ENV`] value so the dispatcher itself stays testable.
pub fn run(args: &CliArgs, env_out_dir: Option<&str>) -> Result<RunArtifact> {
    let mut cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    apply_flags(&mut cfg, args);
    let out_dir = resolve_out_dir(args.out.as_deref(), env_out_dir);
    std::fs::create_dir_all(&out_dir)?;
    match args.command {
        Command::Couplings => cmd_couplings(&cfg, &out_dir),
        Command::Transfer => cmd_transfer(&cfg, &out_dir),
        Command::Memory => cmd_memory(&cfg, &out_dir),
        Command::Table1 => cmd_table1(&cfg, &out_dir),
        Command::Table2 => cmd_table2(&cfg, &out_dir),
        Command::Oracle => cmd_oracle(&cfg, &out_dir),
        Command::RampPlot => cmd_ramp_plot(&cfg, &out_dir),
        Command::Sweep => {
            let axis = args.axis.clone().ok_or_else(|| {
                HqmError::Config("sweep needs --axis section.key".into())
            })?;
            let values = match (&args.values, args.min, args.max, args.points) {
                (Some(v), _, _, _) => v.clone(),
                (None, Some(lo), Some(hi), Some(n)) => linspace(lo, hi, n)?,
                _ => {
                    return Err(HqmError::Config(
                        "sweep needs --values v1,v2,… or --min A --max B --points N".into(),
                    ))
                }
            };
            cmd_sweep(&cfg, &out_dir, &axis, &values)
        }
    }
}

/// Write one line to stdout, swallowing write errors so that a closed
/// pipe (`hqm … | head`) ends the output quietly instead of panicking.
fn out_line(args: std::fmt::Arguments) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_fmt(args);
    let _ = stdout.write_all(b"\n");
}

/// Stderr counterpart of [`out_line`], for the same closed-pipe reason.
fn err_line(args: std::fmt::Arguments) {
    use std::io::Write;
    let mut stderr = std::io::stderr().lock();
    let _ = stderr.write_fmt(args);
    let _ = stderr.write_all(b"\n");
}

/// Process entry: parse argv, run, print the summary, map the outcome to
/// an exit code (0 ok, 1 error, 2 reference-tolerance breach).
pub fn main_entry(argv: &[String]) -> i32 {
    if argv.iter().any(|a| a == "--help" || a == "-h") {
        out_line(format_args!("{USAGE}"));
        return 0;
    }
    let args = match parse_args(argv) {
        Ok(a) => a,
        Err(e) => {
            err_line(format_args!("{e}"));
            return 1;
        }
    };
    let env_out = std::env::var(OUT_DIR_ENV).ok();
    match run(&args, env_out.as_deref()) {
        Ok(art) => {
            for (k, v) in &art.summary {
                out_line(format_args!("{k} = {v}"));
            }
            out_line(format_args!(
                "status = {}",
                if art.passed { "pass" } else { "fail" }
            ));
            out_line(format_args!("artifacts in {}", art.dir.display()));
            if art.passed {
                0
            } else {
                2
            }
        }
        Err(e) => {
            err_line(format_args!("error: {e}"));
            1
        }
    }
}
