//! Batch runner behind the `dcsk-wpt` binary: loads an experiment config,
//! evaluates every sweep point (closed forms plus Monte-Carlo) and writes a
//! CSV table with a JSON manifest next to it.

pub mod config;
mod error;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use dcsk_wpt::montecarlo::{evaluate_point, grid_points};
use serde_json::json;

pub use config::{Diagnostic, ExperimentConfig, Severity};
pub use error::CliError;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// `dotted.path=value` assignments, applied in order.
    pub overrides: Vec<String>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
}

impl RunOptions {
    /// Overrides with the shortcut flags appended, so they win.
    pub fn all_overrides(&self) -> Vec<String> {
        let mut all = self.overrides.clone();
        if let Some(s) = self.seed {
            all.push(format!("mc.seed={s}"));
        }
        if let Some(t) = self.trials {
            all.push(format!("mc.trials={t}"));
        }
        if let Some(w) = self.workers {
            all.push(format!("mc.workers={w}"));
        }
        all
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub rows: usize,
    pub failed_rows: usize,
    pub warnings: Vec<Diagnostic>,
}

/// Loads and validates without running. Diagnostics are the result; only
/// unreadable or unparseable files are errors.
pub fn check(config_path: &Path, overrides: &[String]) -> Result<Vec<Diagnostic>, CliError> {
    let (cfg, _) = config::load(config_path, overrides)?;
    Ok(config::validate(&cfg))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

pub fn run(config_path: &Path, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let overrides = opts.all_overrides();
    let (cfg, _) = config::load(config_path, &overrides)?;
    let diagnostics = config::validate(&cfg);
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        return Err(CliError::Invalid(diagnostics));
    }

    let base = cfg.scenario();
    let mc = cfg.mc_config();
    let points = grid_points(&cfg.axes());
    let mut rows = Vec::with_capacity(points.len());
    let mut entries = Vec::with_capacity(points.len());
    for (i, coords) in points.into_iter().enumerate() {
        let t = Instant::now();
        let row = evaluate_point(coords, &base, &mc);
        let elapsed = t.elapsed().as_secs_f64();
        match &row.outcome {
            Ok(_) => log::info!("point {i}: done in {elapsed:.2} s"),
            Err(e) => log::warn!("point {i}: {e}"),
        }
        entries.push(report::point_entry(i, &row, elapsed));
        rows.push(row);
    }
    let failed_rows = rows.iter().filter(|r| r.outcome.is_err()).count();

    let dir = opts.out_dir.clone().unwrap_or_else(|| cfg.output.dir.clone());
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Write { path: dir.clone(), source })?;
    let stem = cfg.output.name.clone().unwrap_or_else(|| {
        config_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".to_string())
    });
    let csv_path = dir.join(format!("{stem}.csv"));
    let manifest_path = dir.join(format!("{stem}.manifest.json"));

    let mut table = Vec::new();
    report::write_csv(&mut table, &rows, &cfg).map_err(|e| CliError::Write {
        path: csv_path.clone(),
        source: std::io::Error::other(e),
    })?;
    write_file(&csv_path, &table)?;

    let started_unix = started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "tool_version": env!("CARGO_PKG_VERSION"),
        "core_version": dcsk_wpt::VERSION,
        "config_path": config_path.display().to_string(),
        "overrides": overrides,
        "seed": cfg.mc.seed,
        "config": cfg,
        "csv": csv_path.file_name().map(|n| n.to_string_lossy().into_owned()),
        "rows": rows.len(),
        "failed_rows": failed_rows,
        "diagnostics": diagnostics,
        "points": entries,
        "started_unix_s": started_unix,
        "wall_time_s": clock.elapsed().as_secs_f64(),
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest is plain JSON");
    write_file(&manifest_path, text.as_bytes())?;

    Ok(RunSummary {
        csv: csv_path,
        manifest: manifest_path,
        rows: rows.len(),
        failed_rows,
        warnings: diagnostics,
    })
}
