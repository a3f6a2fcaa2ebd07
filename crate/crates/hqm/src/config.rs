//! Run configuration: a flat `key = value` text format with sections
//! `[geometry]`, `[model]`, `[rates]`, `[protocol]`, `[integrator]`.
//!
//! Every key carries its SI unit in its name (`_s`, `_hz`, `_m`, `_a`,
//! `_per_m3`, `_rad`). Unknown sections or keys are hard errors with the
//! offending line number — a typo must never silently fall back to a
//! default. Parsing starts from the documented defaults, so a partial
//! file is a valid override set, and [`Config::to_text`] serializes the
//! fully-resolved state: every run artifact embeds that snapshot, and
//! re-feeding it reproduces the run exactly.

use crate::csvout::num;
use crate::dynamics::RampProfile;
use crate::effective::PhysicalParams;
use crate::error::{HqmError, Result};
use crate::geometry::{FluxQubitGeom, NvGeom, YigSphere};
use crate::protocol::{InitialState, MemoryProtocol, StageRates};
use crate::units::TWO_PI;

/// Device geometry inputs (used when `model.coupling_source = geometry`).
#[derive(Clone, Debug, PartialEq)]
pub struct GeometryConfig {
    /// YIG sphere radius (m).
    pub sphere_radius_m: f64,
    /// Effective spin density (m⁻³).
    pub spin_density_per_m3: f64,
    /// Effective spin per site.
    pub spin_s: f64,
    /// NV distance from the sphere surface along +x (m).
    pub nv_standoff_m: f64,
    /// Flux-qubit persistent current (A).
    pub fq_current_a: f64,
    /// Flux-qubit wire distance from the sphere center (m).
    pub fq_wire_distance_m: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            sphere_radius_m: 45e-9,
            spin_density_per_m3: 4.2e27,
            spin_s: 0.5,
            nv_standoff_m: 60e-9,
            fq_current_a: 500e-9,
            fq_wire_distance_m: 0.25e-6,
        }
    }
}

/// Where the bare couplings (g_FY, g_YN, δ_YN) come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingSource {
    /// The standard operating point (g_(−1)/2π ≈ 700 kHz by construction).
    Reference,
    /// Microscopic lattice sums over the configured geometry.
    Geometry,
}

/// Effective-model inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub coupling_source: CouplingSource,
    /// Flux-qubit gap ω_F/2π (Hz).
    pub omega_f_hz: f64,
    /// Magnon detuning (ω_F − ω_K)/2π (Hz).
    pub detuning_hz: f64,
    /// Direct storage-coupling input g_(−1)/2π (Hz); `derived` uses the
    /// effective-model value.
    pub g_minus_hz: Option<f64>,
    /// Drop the counter-rotating g_(+1) channel.
    pub drop_counter_rotating: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            coupling_source: CouplingSource::Reference,
            omega_f_hz: 2.40e9,
            detuning_hz: 170e6,
            g_minus_hz: Some(700e3),
            drop_counter_rotating: false,
        }
    }
}

/// Stage-dependent decoherence times (s).
#[derive(Clone, Debug, PartialEq)]
pub struct RatesConfig {
    pub fq_t1_s: f64,
    pub fq_t2_s: f64,
    pub nv_t1_s: f64,
    pub nv_t2_s: f64,
    pub storage_fq_t1_s: f64,
    pub storage_fq_t2_s: f64,
    pub storage_nv_t1_s: f64,
    pub storage_nv_t2_s: f64,
}

impl Default for RatesConfig {
    fn default() -> Self {
        RatesConfig {
            fq_t1_s: 10e-6,
            fq_t2_s: 10e-6,
            nv_t1_s: 6e-3,
            nv_t2_s: 90e-6,
            storage_fq_t1_s: 10e-6,
            storage_fq_t2_s: 10e-6,
            storage_nv_t1_s: 10.0,
            storage_nv_t2_s: 0.6,
        }
    }
}

/// Protocol-stage inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    /// Named input state: one, zero, half, third, quarter, fifth.
    pub initial_state: String,
    /// Relative phase φ of the ground component (rad).
    pub initial_phi_rad: f64,
    pub storage_time_s: f64,
    /// step, linear, or exponential.
    pub ramp_profile: RampProfile,
    /// Rise time for non-step ramps (s).
    pub rise_time_s: f64,
    /// Calibrate the transfer hold before the run.
    pub calibrate: bool,
    /// Half-width of the calibration window as a fraction of π/(2g).
    pub calibration_window: f64,
    /// Track the |0_F,+1_N⟩ leakage maximum during the transfer hold.
    pub track_leak: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            initial_state: "half".into(),
            initial_phi_rad: 0.0,
            storage_time_s: 10e-3,
            ramp_profile: RampProfile::Step,
            rise_time_s: 4e-9,
            calibrate: false,
            calibration_window: 0.1,
            track_leak: false,
        }
    }
}

/// Integration controls.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    /// RK4 step (s).
    pub dt_s: f64,
    /// Keep every `stride`-th step in trajectory output (≥ 1).
    pub stride: usize,
    /// Magnon Fock cutoff for the full-model check.
    pub oracle_n_max: usize,
    /// Sub-step for the full-model check (s).
    pub oracle_dt_s: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt_s: 5e-11,
            stride: 1,
            oracle_n_max: 3,
            oracle_dt_s: 1e-12,
        }
    }
}

/// Fully-resolved run configuration.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Config {
    pub geometry: GeometryConfig,
    pub model: ModelConfig,
    pub rates: RatesConfig,
    pub protocol: ProtocolConfig,
    pub integrator: IntegratorConfig,
}

const SECTIONS: [&str; 5] = ["geometry", "model", "rates", "protocol", "integrator"];

fn parse_f64(value: &str, line: usize, key: &str) -> Result<f64> {
    value.parse::<f64>().map_err(|_| {
        HqmError::Config(format!("line {line}: `{key}` expects a number, got `{value}`"))
    })
}

fn parse_bool(value: &str, line: usize, key: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(HqmError::Config(format!(
            "line {line}: `{key}` expects true or false, got `{value}`"
        ))),
    }
}

fn parse_usize(value: &str, line: usize, key: &str) -> Result<usize> {
    value.parse::<usize>().map_err(|_| {
        HqmError::Config(format!(
            "line {line}: `{key}` expects a non-negative integer, got `{value}`"
        ))
    })
}

impl Config {
    /// Parse an override file on top of the defaults. Lines are
    /// `key = value`, `[section]` headers, `#` comments, or blank.
    pub fn parse_str(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    HqmError::Config(format!("line {line_no}: unterminated section header"))
                })?;
                if !SECTIONS.contains(&name) {
                    return Err(HqmError::Config(format!(
                        "line {line_no}: unknown section [{name}] (expected one of {})",
                        SECTIONS.join(", ")
                    )));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HqmError::Config(format!("line {line_no}: expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim();
            let value = value.trim();
            let section = section.as_deref().ok_or_else(|| {
                HqmError::Config(format!(
                    "line {line_no}: `{key}` appears before any [section] header"
                ))
            })?;
            cfg.apply(section, key, value, line_no)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load and parse a config file.
    pub fn load(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HqmError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse_str(&text)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str, line: usize) -> Result<()> {
        let unknown = || {
            HqmError::Config(format!(
                "line {line}: unknown key `{key}` in section [{section}]"
            ))
        };
        match section {
            "geometry" => {
                let g = &mut self.geometry;
                let slot = match key {
                    "sphere_radius_m" => &mut g.sphere_radius_m,
                    "spin_density_per_m3" => &mut g.spin_density_per_m3,
                    "spin_s" => &mut g.spin_s,
                    "nv_standoff_m" => &mut g.nv_standoff_m,
                    "fq_current_a" => &mut g.fq_current_a,
                    "fq_wire_distance_m" => &mut g.fq_wire_distance_m,
                    _ => return Err(unknown()),
                };
                *slot = parse_f64(value, line, key)?;
            }
            "model" => match key {
                "coupling_source" => {
                    self.model.coupling_source = match value {
                        "reference" => CouplingSource::Reference,
                        "geometry" => CouplingSource::Geometry,
                        _ => {
                            return Err(HqmError::Config(format!(
                                "line {line}: `coupling_source` expects reference or geometry, \
                                 got `{value}`"
                            )))
                        }
                    }
                }
                "omega_f_hz" => self.model.omega_f_hz = parse_f64(value, line, key)?,
                "detuning_hz" => self.model.detuning_hz = parse_f64(value, line, key)?,
                "g_minus_hz" => {
                    self.model.g_minus_hz = if value == "derived" {
                        None
                    } else {
                        Some(parse_f64(value, line, key)?)
                    }
                }
                "drop_counter_rotating" => {
                    self.model.drop_counter_rotating = parse_bool(value, line, key)?
                }
                _ => return Err(unknown()),
            },
            "rates" => {
                let r = &mut self.rates;
                let slot = match key {
                    "fq_t1_s" => &mut r.fq_t1_s,
                    "fq_t2_s" => &mut r.fq_t2_s,
                    "nv_t1_s" => &mut r.nv_t1_s,
                    "nv_t2_s" => &mut r.nv_t2_s,
                    "storage_fq_t1_s" => &mut r.storage_fq_t1_s,
                    "storage_fq_t2_s" => &mut r.storage_fq_t2_s,
                    "storage_nv_t1_s" => &mut r.storage_nv_t1_s,
                    "storage_nv_t2_s" => &mut r.storage_nv_t2_s,
                    _ => return Err(unknown()),
                };
                // `inf` disables a channel.
                *slot = parse_f64(value, line, key)?;
            }
            "protocol" => match key {
                "initial_state" => {
                    if !["one", "zero", "half", "third", "quarter", "fifth"].contains(&value) {
                        return Err(HqmError::Config(format!(
                            "line {line}: `initial_state` expects one, zero, half, third, \
                             quarter, or fifth, got `{value}`"
                        )));
                    }
                    self.protocol.initial_state = value.to_string();
                }
                "initial_phi_rad" => self.protocol.initial_phi_rad = parse_f64(value, line, key)?,
                "storage_time_s" => self.protocol.storage_time_s = parse_f64(value, line, key)?,
                "ramp_profile" => {
                    self.protocol.ramp_profile = match value {
                        "step" => RampProfile::Step,
                        "linear" => RampProfile::Linear,
                        "exponential" => RampProfile::Exponential,
                        _ => {
                            return Err(HqmError::Config(format!(
                                "line {line}: `ramp_profile` expects step, linear, or \
                                 exponential, got `{value}`"
                            )))
                        }
                    }
                }
                "rise_time_s" => self.protocol.rise_time_s = parse_f64(value, line, key)?,
                "calibrate" => self.protocol.calibrate = parse_bool(value, line, key)?,
                "calibration_window" => {
                    self.protocol.calibration_window = parse_f64(value, line, key)?
                }
                "track_leak" => self.protocol.track_leak = parse_bool(value, line, key)?,
                _ => return Err(unknown()),
            },
            "integrator" => match key {
                "dt_s" => self.integrator.dt_s = parse_f64(value, line, key)?,
                "stride" => self.integrator.stride = parse_usize(value, line, key)?,
                "oracle_n_max" => self.integrator.oracle_n_max = parse_usize(value, line, key)?,
                "oracle_dt_s" => self.integrator.oracle_dt_s = parse_f64(value, line, key)?,
                _ => return Err(unknown()),
            },
            _ => unreachable!("section names are validated at the header"),
        }
        Ok(())
    }

    /// Cross-field validation, applied after parsing and before builds.
    pub fn validate(&self) -> Result<()> {
        let c = |ok: bool, msg: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(HqmError::Config(msg.to_string()))
            }
        };
        c(self.integrator.dt_s > 0.0, "integrator.dt_s must be > 0")?;
        c(self.integrator.stride >= 1, "integrator.stride must be ≥ 1")?;
        c(
            self.integrator.oracle_n_max >= 2,
            "integrator.oracle_n_max must be ≥ 2",
        )?;
        c(
            self.integrator.oracle_dt_s > 0.0,
            "integrator.oracle_dt_s must be > 0",
        )?;
        c(
            self.protocol.storage_time_s >= 0.0,
            "protocol.storage_time_s must be ≥ 0",
        )?;
        if self.protocol.ramp_profile != RampProfile::Step {
            c(
                self.protocol.rise_time_s > 0.0,
                "protocol.rise_time_s must be > 0 for linear/exponential ramps",
            )?;
        }
        c(
            self.protocol.calibration_window > 0.0 && self.protocol.calibration_window < 1.0,
            "protocol.calibration_window must be in (0, 1)",
        )?;
        if let Some(g) = self.model.g_minus_hz {
            c(g > 0.0, "model.g_minus_hz must be > 0 (or `derived`)")?;
        }
        Ok(())
    }

    /// Serialize the fully-resolved configuration. `parse_str` of the
    /// result reproduces `self` exactly (shortest-roundtrip float
    /// formatting), which is what makes embedded snapshots replayable.
    pub fn to_text(&self) -> String {
        let g = &self.geometry;
        let m = &self.model;
        let r = &self.rates;
        let p = &self.protocol;
        let i = &self.integrator;
        let ramp = match p.ramp_profile {
            RampProfile::Step => "step",
            RampProfile::Linear => "linear",
            RampProfile::Exponential => "exponential",
        };
        let source = match m.coupling_source {
            CouplingSource::Reference => "reference",
            CouplingSource::Geometry => "geometry",
        };
        let g_minus = match m.g_minus_hz {
            Some(v) => num(v),
            None => "derived".to_string(),
        };
        format!(
            "[geometry]\n\
             sphere_radius_m = {}\n\
             spin_density_per_m3 = {}\n\
             spin_s = {}\n\
             nv_standoff_m = {}\n\
             fq_current_a = {}\n\
             fq_wire_distance_m = {}\n\
             \n\
             [model]\n\
             coupling_source = {source}\n\
             omega_f_hz = {}\n\
             detuning_hz = {}\n\
             g_minus_hz = {g_minus}\n\
             drop_counter_rotating = {}\n\
             \n\
             [rates]\n\
             fq_t1_s = {}\n\
             fq_t2_s = {}\n\
             nv_t1_s = {}\n\
             nv_t2_s = {}\n\
             storage_fq_t1_s = {}\n\
             storage_fq_t2_s = {}\n\
             storage_nv_t1_s = {}\n\
             storage_nv_t2_s = {}\n\
             \n\
             [protocol]\n\
             initial_state = {}\n\
             initial_phi_rad = {}\n\
             storage_time_s = {}\n\
             ramp_profile = {ramp}\n\
             rise_time_s = {}\n\
             calibrate = {}\n\
             calibration_window = {}\n\
             track_leak = {}\n\
             \n\
             [integrator]\n\
             dt_s = {}\n\
             stride = {}\n\
             oracle_n_max = {}\n\
             oracle_dt_s = {}\n",
            num(g.sphere_radius_m),
            num(g.spin_density_per_m3),
            num(g.spin_s),
            num(g.nv_standoff_m),
            num(g.fq_current_a),
            num(g.fq_wire_distance_m),
            num(m.omega_f_hz),
            num(m.detuning_hz),
            m.drop_counter_rotating,
            num(r.fq_t1_s),
            num(r.fq_t2_s),
            num(r.nv_t1_s),
            num(r.nv_t2_s),
            num(r.storage_fq_t1_s),
            num(r.storage_fq_t2_s),
            num(r.storage_nv_t1_s),
            num(r.storage_nv_t2_s),
            p.initial_state,
            num(p.initial_phi_rad),
            num(p.storage_time_s),
            num(p.rise_time_s),
            p.calibrate,
            num(p.calibration_window),
            p.track_leak,
            num(i.dt_s),
            i.stride,
            i.oracle_n_max,
            num(i.oracle_dt_s),
        )
    }

    /// Numeric accessor by dotted key (`section.key`), for sweeps.
    pub fn get_numeric(&self, dotted: &str) -> Result<f64> {
        let (section, key) = dotted.split_once('.').ok_or_else(|| {
            HqmError::Config(format!("axis `{dotted}` must be section.key"))
        })?;
        let g = &self.geometry;
        let m = &self.model;
        let r = &self.rates;
        let p = &self.protocol;
        let i = &self.integrator;
        let v = match (section, key) {
            ("geometry", "sphere_radius_m") => g.sphere_radius_m,
            ("geometry", "spin_density_per_m3") => g.spin_density_per_m3,
            ("geometry", "spin_s") => g.spin_s,
            ("geometry", "nv_standoff_m") => g.nv_standoff_m,
            ("geometry", "fq_current_a") => g.fq_current_a,
            ("geometry", "fq_wire_distance_m") => g.fq_wire_distance_m,
            ("model", "omega_f_hz") => m.omega_f_hz,
            ("model", "detuning_hz") => m.detuning_hz,
            ("model", "g_minus_hz") => m.g_minus_hz.unwrap_or(f64::NAN),
            ("rates", "fq_t1_s") => r.fq_t1_s,
            ("rates", "fq_t2_s") => r.fq_t2_s,
            ("rates", "nv_t1_s") => r.nv_t1_s,
            ("rates", "nv_t2_s") => r.nv_t2_s,
            ("rates", "storage_fq_t1_s") => r.storage_fq_t1_s,
            ("rates", "storage_fq_t2_s") => r.storage_fq_t2_s,
            ("rates", "storage_nv_t1_s") => r.storage_nv_t1_s,
            ("rates", "storage_nv_t2_s") => r.storage_nv_t2_s,
            ("protocol", "initial_phi_rad") => p.initial_phi_rad,
            ("protocol", "storage_time_s") => p.storage_time_s,
            ("protocol", "rise_time_s") => p.rise_time_s,
            ("protocol", "calibration_window") => p.calibration_window,
            ("integrator", "dt_s") => i.dt_s,
            ("integrator", "oracle_dt_s") => i.oracle_dt_s,
            _ => {
                return Err(HqmError::Config(format!(
                    "`{dotted}` is not a sweepable numeric key"
                )))
            }
        };
        Ok(v)
    }

    /// Numeric setter by dotted key (`section.key`), for sweeps. The
    /// special value handling of `rise_time_s = 0` switches the ramp to
    /// a step so rise-time sweeps can include the ideal limit.
    pub fn set_numeric(&mut self, dotted: &str, value: f64) -> Result<()> {
        let (section, key) = dotted.split_once('.').ok_or_else(|| {
            HqmError::Config(format!("axis `{dotted}` must be section.key"))
        })?;
        match (section, key) {
            ("geometry", "sphere_radius_m") => self.geometry.sphere_radius_m = value,
            ("geometry", "spin_density_per_m3") => self.geometry.spin_density_per_m3 = value,
            ("geometry", "spin_s") => self.geometry.spin_s = value,
            ("geometry", "nv_standoff_m") => self.geometry.nv_standoff_m = value,
            ("geometry", "fq_current_a") => self.geometry.fq_current_a = value,
            ("geometry", "fq_wire_distance_m") => self.geometry.fq_wire_distance_m = value,
            ("model", "omega_f_hz") => self.model.omega_f_hz = value,
            ("model", "detuning_hz") => self.model.detuning_hz = value,
            ("model", "g_minus_hz") => self.model.g_minus_hz = Some(value),
            ("rates", "fq_t1_s") => self.rates.fq_t1_s = value,
            ("rates", "fq_t2_s") => self.rates.fq_t2_s = value,
            ("rates", "nv_t1_s") => self.rates.nv_t1_s = value,
            ("rates", "nv_t2_s") => self.rates.nv_t2_s = value,
            ("rates", "storage_fq_t1_s") => self.rates.storage_fq_t1_s = value,
            ("rates", "storage_fq_t2_s") => self.rates.storage_fq_t2_s = value,
            ("rates", "storage_nv_t1_s") => self.rates.storage_nv_t1_s = value,
            ("rates", "storage_nv_t2_s") => self.rates.storage_nv_t2_s = value,
            ("protocol", "initial_phi_rad") => self.protocol.initial_phi_rad = value,
            ("protocol", "storage_time_s") => self.protocol.storage_time_s = value,
            ("protocol", "rise_time_s") => {
                if value == 0.0 {
                    self.protocol.ramp_profile = RampProfile::Step;
                } else {
                    self.protocol.rise_time_s = value;
                    if self.protocol.ramp_profile == RampProfile::Step {
                        self.protocol.ramp_profile = RampProfile::Linear;
                    }
                }
            }
            ("protocol", "calibration_window") => self.protocol.calibration_window = value,
            ("integrator", "dt_s") => self.integrator.dt_s = value,
            ("integrator", "oracle_dt_s") => self.integrator.oracle_dt_s = value,
            _ => {
                return Err(HqmError::Config(format!(
                    "`{dotted}` is not a sweepable numeric key"
                )))
            }
        }
        self.validate()
    }

    /// The configured device geometry as typed values.
    pub fn build_geometry(&self) -> (YigSphere, FluxQubitGeom, NvGeom) {
        let sphere = YigSphere::new(
            self.geometry.sphere_radius_m,
            self.geometry.spin_density_per_m3,
            self.geometry.spin_s,
        );
        let fq = FluxQubitGeom {
            persistent_current: self.geometry.fq_current_a,
            wire_distance: self.geometry.fq_wire_distance_m,
        };
        let nv = NvGeom {
            position: [
                sphere.center[0] + sphere.radius + self.geometry.nv_standoff_m,
                sphere.center[1],
                sphere.center[2],
            ],
        };
        (sphere, fq, nv)
    }

    /// The physical parameter set selected by `model.coupling_source`.
    pub fn build_params(&self) -> Result<PhysicalParams> {
        match self.model.coupling_source {
            CouplingSource::Reference => {
                let mut p = PhysicalParams::reference();
                p.omega_f = TWO_PI * self.model.omega_f_hz;
                p.omega_k = p.omega_f - TWO_PI * self.model.detuning_hz;
                Ok(p)
            }
            CouplingSource::Geometry => {
                let (sphere, fq, nv) = self.build_geometry();
                PhysicalParams::from_geometry(
                    &sphere,
                    &fq,
                    &nv,
                    TWO_PI * self.model.omega_f_hz,
                    TWO_PI * self.model.detuning_hz,
                )
            }
        }
    }

    /// The configured protocol plus initial state, ready to run.
    pub fn build_protocol(&self) -> Result<(MemoryProtocol, InitialState)> {
        self.validate()?;
        let mut proto = MemoryProtocol::new(self.build_params()?)?;
        proto.g_override_hz = self.model.g_minus_hz;
        proto.drop_counter_rotating = self.model.drop_counter_rotating;
        proto.storage_time = self.protocol.storage_time_s;
        proto.ramp = match self.protocol.ramp_profile {
            RampProfile::Step => None,
            p => Some((p, self.protocol.rise_time_s)),
        };
        proto.transfer_rates = StageRates {
            fq_t1: self.rates.fq_t1_s,
            fq_t2: self.rates.fq_t2_s,
            nv_t1: self.rates.nv_t1_s,
            nv_t2: self.rates.nv_t2_s,
        };
        proto.storage_rates = StageRates {
            fq_t1: self.rates.storage_fq_t1_s,
            fq_t2: self.rates.storage_fq_t2_s,
            nv_t1: self.rates.storage_nv_t1_s,
            nv_t2: self.rates.storage_nv_t2_s,
        };
        proto.dt = self.integrator.dt_s;
        proto.track_leak = self.protocol.track_leak;
        let mut init = match self.protocol.initial_state.as_str() {
            "one" => InitialState::phi_1(),
            "zero" => InitialState::phi_0(),
            "half" => InitialState::phi_half(),
            "third" => InitialState::phi_third(),
            "quarter" => InitialState::phi_quarter(),
            "fifth" => InitialState::phi_fifth(),
            other => {
                return Err(HqmError::Config(format!(
                    "unknown initial state `{other}`"
                )))
            }
        };
        init.phi = self.protocol.initial_phi_rad;
        Ok((proto, init))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = Config::default();
        let text = c.to_text();
        let back = Config::parse_str(&text).unwrap();
        assert_eq!(c, back);
        // And the snapshot of the round-tripped config is byte-identical.
        assert_eq!(text, back.to_text());
    }

    #[test]
    fn overrides_round_trip() {
        let text = "
[model]
g_minus_hz = derived
coupling_source = geometry

[protocol]
ramp_profile = exponential
rise_time_s = 10e-9
initial_state = one

[rates]
nv_t2_s = 2e-5
";
        let c = Config::parse_str(text).unwrap();
        assert_eq!(c.model.g_minus_hz, None);
        assert_eq!(c.model.coupling_source, CouplingSource::Geometry);
        assert_eq!(c.protocol.ramp_profile, RampProfile::Exponential);
        assert_eq!(c.rates.nv_t2_s, 2e-5);
        let back = Config::parse_str(&c.to_text()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn unknown_key_reports_line_number() {
        let text = "[model]\nomega_f_hz = 2.4e9\ntypo_key = 1\n";
        let err = Config::parse_str(text).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("typo_key"), "{err}");
    }

    #[test]
    fn unknown_section_rejected() {
        let err = Config::parse_str("[nope]\nx = 1\n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
        assert!(err.contains("[nope]") || err.contains("nope"), "{err}");
    }

    #[test]
    fn key_before_section_rejected() {
        let err = Config::parse_str("dt_s = 1e-10\n").unwrap_err().to_string();
        assert!(err.contains("before any [section]"), "{err}");
    }

    #[test]
    fn bad_values_rejected() {
        for text in [
            "[integrator]\ndt_s = fast\n",
            "[integrator]\ndt_s = 0\n",
            "[protocol]\ninitial_state = sideways\n",
            "[protocol]\nramp_profile = cubic\n",
            "[model]\ndrop_counter_rotating = maybe\n",
        ] {
            assert!(Config::parse_str(text).is_err(), "accepted: {text}");
        }
    }

    #[test]
    fn infinite_rates_parse() {
        let c = Config::parse_str("[rates]\nfq_t1_s = inf\nfq_t2_s = inf\n").unwrap();
        assert!(c.rates.fq_t1_s.is_infinite());
        let back = Config::parse_str(&c.to_text()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn numeric_axis_access() {
        let mut c = Config::default();
        c.set_numeric("rates.nv_t2_s", 20e-6).unwrap();
        assert_eq!(c.get_numeric("rates.nv_t2_s").unwrap(), 20e-6);
        assert!(c.set_numeric("protocol.initial_state", 1.0).is_err());
        assert!(c.set_numeric("nodots", 1.0).is_err());
        // Rise-time zero switches to a step schedule.
        c.set_numeric("protocol.rise_time_s", 4e-9).unwrap();
        assert_eq!(c.protocol.ramp_profile, RampProfile::Linear);
        c.set_numeric("protocol.rise_time_s", 0.0).unwrap();
        assert_eq!(c.protocol.ramp_profile, RampProfile::Step);
    }

    #[test]
    fn build_protocol_applies_fields() {
        let text = "
[model]
g_minus_hz = 350e3
drop_counter_rotating = true

[protocol]
storage_time_s = 1e-3
ramp_profile = linear
rise_time_s = 4e-9
initial_state = quarter
initial_phi_rad = 0.5

[integrator]
dt_s = 1e-10
";
        let c = Config::parse_str(text).unwrap();
        let (proto, init) = c.build_protocol().unwrap();
        assert_eq!(proto.g_override_hz, Some(350e3));
        assert!(proto.drop_counter_rotating);
        assert_eq!(proto.storage_time, 1e-3);
        assert_eq!(proto.ramp, Some((RampProfile::Linear, 4e-9)));
        assert_eq!(proto.dt, 1e-10);
        assert!((init.excited_weight() - 0.75).abs() < 1e-12);
        assert_eq!(init.phi, 0.5);
    }
}
