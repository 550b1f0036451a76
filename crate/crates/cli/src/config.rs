//! Experiment configuration: JSON text, dotted-path overrides and
//! field-path validation.

use std::fmt;
use std::path::{Path, PathBuf};

use dcsk_wpt::montecarlo::{grid_points, scenario_at, Scenario, SweepAxis};
use dcsk_wpt::receiver::SaturationMonitor;
use dcsk_wpt::{McConfig, McMode, SystemConfig, WaveformKind};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

const OMEGA_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    pub pt_dbm: f64,
    pub r_m: f64,
    pub pathloss_exp: f64,
    pub k2: f64,
    pub k4: f64,
    pub r_ant_ohm: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            pt_dbm: 30.0,
            r_m: 20.0,
            pathloss_exp: 4.0,
            k2: 0.0034,
            k4: 0.3829,
            r_ant_ohm: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    pub m: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub tau: usize,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self { m: 4.0, omega1: 0.75, omega2: 0.25, tau: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindName {
    ClassicDcsk,
    WptOptimal,
}

impl From<KindName> for WaveformKind {
    fn from(k: KindName) -> Self {
        match k {
            KindName::ClassicDcsk => WaveformKind::ClassicDcsk,
            KindName::WptOptimal => WaveformKind::WptOptimal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveformSection {
    pub beta: u32,
    pub kind: KindName,
    pub degree: u32,
    /// Defaults to the full symbol.
    pub correlator_len: Option<usize>,
}

impl Default for WaveformSection {
    fn default() -> Self {
        Self { beta: 30, kind: KindName::WptOptimal, degree: 2, correlator_len: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Chip,
    Moment,
}

impl From<ModeName> for McMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Chip => McMode::Chip,
            ModeName::Moment => McMode::Moment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub trials: u64,
    pub mode: ModeName,
    pub seed: u64,
    pub chunk: u64,
    pub workers: Option<usize>,
    pub burn_in: bool,
    pub saturation_threshold: Option<f64>,
}

impl Default for McSection {
    fn default() -> Self {
        let d = McConfig::default();
        Self {
            trials: d.trials,
            mode: ModeName::Chip,
            seed: d.seed,
            chunk: d.chunk,
            workers: None,
            burn_in: false,
            saturation_threshold: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Beta,
    Tau,
    OmegaRatio,
    Omega2,
    M,
}

impl From<AxisName> for SweepAxis {
    fn from(a: AxisName) -> Self {
        match a {
            AxisName::Beta => SweepAxis::Beta,
            AxisName::Tau => SweepAxis::Tau,
            AxisName::OmegaRatio => SweepAxis::OmegaRatio,
            AxisName::Omega2 => SweepAxis::Omega2,
            AxisName::M => SweepAxis::M,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub axis: AxisName,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// File stem; defaults to the config file's stem.
    pub name: Option<String>,
    pub format: OutputFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("results"), name: None, format: OutputFormat::Csv }
    }
}

/// Every section is optional; missing fields take the reference link
/// budget and channel defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub system: SystemSection,
    pub channel: ChannelSection,
    pub waveform: WaveformSection,
    pub mc: McSection,
    /// Axes of a cartesian sweep, first axis outermost. Empty runs one point.
    pub sweep: Vec<AxisSection>,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn system_config(&self) -> SystemConfig {
        let s = &self.system;
        SystemConfig {
            pt_watts: 0.0,
            distance_m: s.r_m,
            pathloss_exp: s.pathloss_exp,
            k2: s.k2,
            k4: s.k4,
            r_ant_ohm: s.r_ant_ohm,
        }
        .with_pt_dbm(s.pt_dbm)
    }

    /// The base point before sweep coordinates are applied.
    pub fn scenario(&self) -> Scenario {
        Scenario {
            system: self.system_config(),
            m: self.channel.m,
            omega1: self.channel.omega1,
            omega2: self.channel.omega2,
            tau: self.channel.tau,
            beta: self.waveform.beta,
            kind: self.waveform.kind.into(),
            degree: self.waveform.degree,
            correlator_len: self.waveform.correlator_len,
        }
    }

    pub fn mc_config(&self) -> McConfig {
        McConfig {
            trials: self.mc.trials,
            mode: self.mc.mode.into(),
            seed: self.mc.seed,
            chunk: self.mc.chunk,
            workers: self.mc.workers,
            burn_in: self.mc.burn_in,
            saturation: SaturationMonitor { threshold: self.mc.saturation_threshold },
        }
    }

    pub fn axes(&self) -> Vec<(SweepAxis, Vec<f64>)> {
        self.sweep.iter().map(|a| (a.axis.into(), a.values.clone())).collect()
    }
}

/// Parses config text into a JSON tree.
pub fn parse_text(text: &str, origin: &Path) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Syntax {
        file: origin.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Applies one `dotted.path=value` assignment. The value is read as JSON
/// where possible and as a bare string otherwise; missing tables are created.
/// Numeric segments index into arrays.
pub fn apply_override(tree: &mut Value, assignment: &str) -> Result<(), CliError> {
    let bad = |message: String| CliError::Override { assignment: assignment.to_string(), message };
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| bad("expected KEY=VALUE".into()))?;
    let segments: Vec<&str> = path.trim().split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(bad(format!("malformed key {path:?}")));
    }
    let raw = raw.trim();
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));

    let mut node = tree;
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        let prefix = segments[..=i].join(".");
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(seg.to_string(), value);
                    return Ok(());
                }
                map.entry(seg.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = seg
                    .parse()
                    .map_err(|_| bad(format!("{prefix}: array index expected")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| bad(format!("{prefix}: index out of range (length {len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(bad(format!("{} is not a table", segments[..i].join(".")))),
        };
    }
    unreachable!("loop returns on the last segment")
}

/// Deserializes a JSON tree, reporting the offending field path.
pub fn from_tree(tree: Value) -> Result<ExperimentConfig, CliError> {
    serde_path_to_error::deserialize(tree).map_err(|e| {
        let path = e.path().to_string();
        CliError::Field { path, message: e.into_inner().to_string() }
    })
}

/// Reads, overrides and deserializes a config file.
pub fn load(path: &Path, overrides: &[String]) -> Result<(ExperimentConfig, Value), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    let mut tree = parse_text(&text, path)?;
    if !tree.is_object() {
        return Err(CliError::Field { path: ".".into(), message: "top level must be a table".into() });
    }
    for o in overrides {
        apply_override(&mut tree, o)?;
    }
    let cfg = from_tree(tree.clone())?;
    Ok((cfg, tree))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    /// Only some sweep points are affected; those rows carry the error.
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.path, self.message)
    }
}

fn positive(out: &mut Vec<Diagnostic>, path: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        out.push(Diagnostic::error(path, format!("must be finite and > 0, got {v}")));
    }
}

fn non_negative(out: &mut Vec<Diagnostic>, path: &str, v: f64) {
    if !(v.is_finite() && v >= 0.0) {
        out.push(Diagnostic::error(path, format!("must be finite and >= 0, got {v}")));
    }
}

fn check_m(out: &mut Vec<Diagnostic>, path: &str, m: f64) {
    if !(m.is_finite() && m >= 0.5) {
        out.push(Diagnostic::error(path, format!("m must be >= 0.5, got {m}")));
    }
}

/// Checks that involve several fields at once, evaluated per grid point.
/// Returns (field path, message) pairs.
fn point_checks(s: &Scenario, mode: McMode) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    let sum = s.omega1 + s.omega2;
    if (sum - 1.0).abs() > OMEGA_SUM_TOL {
        out.push(("channel.omega1", format!("omega sum ≠ 1 (omega1 + omega2 = {sum})")));
    }
    if s.omega2 < 0.0 || s.omega1 < 0.0 {
        out.push(("channel.omega2", "omega must be >= 0".to_string()));
    } else if s.omega2 > s.omega1 {
        out.push((
            "channel.omega2",
            format!("omega2 = {} exceeds omega1 = {}; the direct ray must be the stronger one", s.omega2, s.omega1),
        ));
    }
    if !(s.m.is_finite() && s.m >= 0.5) {
        out.push(("channel.m", format!("m must be >= 0.5, got {}", s.m)));
    }
    if s.beta == 0 {
        out.push(("waveform.beta", "beta must be >= 1".to_string()));
        return out;
    }
    let max_tau = s.kind.max_tau(s.beta);
    if s.tau > max_tau {
        let bound = match s.kind {
            WaveformKind::WptOptimal => "beta−1",
            WaveformKind::ClassicDcsk => "2·beta−1",
        };
        out.push(("channel.tau", format!("tau exceeds {bound} (tau = {}, beta = {})", s.tau, s.beta)));
    }
    let symbol_len = s.kind.symbol_len(s.beta);
    if let Some(psi) = s.correlator_len {
        if psi == 0 || psi > symbol_len {
            out.push((
                "waveform.correlator_len",
                format!("correlator_len must lie in 1..={symbol_len}, got {psi}"),
            ));
        }
    }
    if mode == McMode::Moment {
        let full = s.correlator_len.is_none_or(|p| p == symbol_len);
        if s.kind != WaveformKind::WptOptimal || !full {
            out.push((
                "mc.mode",
                "moment mode needs the wpt-optimal waveform with a full-symbol correlator".to_string(),
            ));
        }
    }
    out
}

fn describe(coords: &[(SweepAxis, f64)]) -> String {
    coords
        .iter()
        .map(|(a, v)| format!("{}={v}", a.label()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// All invariant checks, without running anything. An empty list means the
/// config is runnable.
pub fn validate(cfg: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let s = &cfg.system;
    if !s.pt_dbm.is_finite() {
        out.push(Diagnostic::error("system.pt_dbm", format!("must be finite, got {}", s.pt_dbm)));
    }
    positive(&mut out, "system.r_m", s.r_m);
    positive(&mut out, "system.pathloss_exp", s.pathloss_exp);
    positive(&mut out, "system.r_ant_ohm", s.r_ant_ohm);
    non_negative(&mut out, "system.k2", s.k2);
    non_negative(&mut out, "system.k4", s.k4);
    if s.k2 == 0.0 && s.k4 == 0.0 {
        out.push(Diagnostic::error("system.k4", "k2 and k4 are both zero; nothing is harvested"));
    }

    if cfg.waveform.degree < 2 {
        out.push(Diagnostic::error("waveform.degree", format!("degree must be >= 2, got {}", cfg.waveform.degree)));
    }
    let mc = &cfg.mc;
    if mc.trials == 0 {
        out.push(Diagnostic::error("mc.trials", "trials must be >= 1"));
    }
    if mc.chunk == 0 {
        out.push(Diagnostic::error("mc.chunk", "chunk must be >= 1"));
    }
    if mc.workers == Some(0) {
        out.push(Diagnostic::error("mc.workers", "workers must be >= 1"));
    }
    if let Some(t) = mc.saturation_threshold {
        positive(&mut out, "mc.saturation_threshold", t);
    }

    let before_sweep = out.len();
    let mut seen = Vec::new();
    for (i, a) in cfg.sweep.iter().enumerate() {
        if seen.contains(&a.axis) {
            out.push(Diagnostic::error(format!("sweep[{i}].axis"), "axis appears twice"));
        }
        seen.push(a.axis);
        if a.values.is_empty() {
            out.push(Diagnostic::error(format!("sweep[{i}].values"), "no values"));
        }
        for (j, &v) in a.values.iter().enumerate() {
            let path = format!("sweep[{i}].values[{j}]");
            let integral = v.is_finite() && v >= 0.0 && v.fract() == 0.0;
            match a.axis {
                AxisName::Beta if !integral || v < 1.0 => {
                    out.push(Diagnostic::error(path, format!("beta must be an integer >= 1, got {v}")))
                }
                AxisName::Tau if !integral => {
                    out.push(Diagnostic::error(path, format!("tau must be a non-negative integer, got {v}")))
                }
                AxisName::OmegaRatio if !(0.0..=1.0).contains(&v) => {
                    out.push(Diagnostic::error(path, format!("omega_ratio must lie in [0, 1], got {v}")))
                }
                AxisName::Omega2 if !(0.0..=0.5).contains(&v) => {
                    out.push(Diagnostic::error(path, format!("omega2 must lie in [0, 0.5], got {v}")))
                }
                AxisName::M => check_m(&mut out, &path, v),
                _ => {}
            }
        }
    }
    if out.len() > before_sweep {
        return out;
    }

    let base = cfg.scenario();
    let mode: McMode = mc.mode.into();
    let points = grid_points(&cfg.axes());
    let mut failures: Vec<Vec<(&'static str, String)>> = Vec::with_capacity(points.len());
    for coords in &points {
        failures.push(match scenario_at(coords, &base) {
            Ok(s) => point_checks(&s, mode),
            Err(e) => vec![("sweep", e.to_string())],
        });
    }
    let every_point_fails = failures.iter().all(|f| !f.is_empty());
    if cfg.sweep.is_empty() || every_point_fails {
        let mut reported: Vec<(&str, String)> = Vec::new();
        for f in &failures {
            for (path, message) in f {
                let msg = if cfg.sweep.is_empty() { message.clone() } else { format!("{message} at every sweep point") };
                if !reported.iter().any(|(p, m)| p == path && *m == msg) {
                    reported.push((path, msg));
                }
            }
        }
        // one line per field, the first failing point stands for the rest
        let mut by_field: Vec<&str> = Vec::new();
        for (path, msg) in reported {
            if !by_field.contains(&path) {
                by_field.push(path);
                out.push(Diagnostic::error(path, msg));
            }
        }
    } else {
        for (coords, f) in points.iter().zip(&failures) {
            for (path, message) in f {
                out.push(Diagnostic {
                    severity: Severity::Warning,
                    path: path.to_string(),
                    message: format!("sweep point ({}): {message}", describe(coords)),
                });
            }
        }
    }
    out
}
