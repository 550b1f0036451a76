//! CSV rows and the JSON run manifest.

use dcsk_wpt::channel::{pathloss_scales, watts_to_dbm};
use dcsk_wpt::montecarlo::{SweepAxis, SweepRow};
use dcsk_wpt::PowerEstimate;
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;

/// CSV header, in order. Closed-form columns are blank for rows without a
/// closed form (classic waveform or partial correlator) and every result
/// column is blank on error rows.
pub const COLUMNS: &[&str] = &[
    "point",
    "status",
    "pt_dbm",
    "r_m",
    "pathloss_exp",
    "k2",
    "k4",
    "r_ant_ohm",
    "m",
    "omega1",
    "omega2",
    "omega_ratio",
    "tau",
    "beta",
    "kind",
    "degree",
    "psi",
    "mode",
    "trials",
    "seed",
    "chunk",
    "burn_in",
    "eps1",
    "eps2",
    "theorem_m2",
    "theorem_m4",
    "theorem_linear_w",
    "theorem_nonlinear_w",
    "theorem_total_w",
    "theorem_total_dbm",
    "corollary_m2",
    "corollary_m4",
    "corollary_linear_w",
    "corollary_nonlinear_w",
    "corollary_total_w",
    "corollary_total_dbm",
    "mc_m2",
    "mc_se2",
    "mc_m4",
    "mc_se4",
    "mc_linear_w",
    "mc_nonlinear_w",
    "mc_total_w",
    "mc_se_total_w",
    "mc_total_dbm",
    "saturation_hits",
    "z_m2",
    "z_m4",
    "z_total",
    "error",
];

/// Shortest round-trip decimal; scientific below 1e-3 in magnitude (and for
/// very large values).
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if !v.is_finite() {
        v.to_string()
    } else if v.abs() < 1e-3 || v.abs() >= 1e15 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn column(name: &str) -> usize {
    COLUMNS
        .iter()
        .position(|c| *c == name)
        .unwrap_or_else(|| panic!("unknown column {name}"))
}

struct Row(Vec<String>);

impl Row {
    fn set(&mut self, name: &str, value: impl Into<String>) {
        self.0[column(name)] = value.into();
    }

    fn num(&mut self, name: &str, v: f64) {
        self.set(name, format_number(v));
    }

    fn power(&mut self, prefix: &str, p: &PowerEstimate) {
        self.num(&format!("{prefix}_m2"), p.m2);
        self.num(&format!("{prefix}_m4"), p.m4);
        self.num(&format!("{prefix}_linear_w"), p.linear_term);
        self.num(&format!("{prefix}_nonlinear_w"), p.nonlinear_term);
        self.num(&format!("{prefix}_total_w"), p.total);
        self.num(&format!("{prefix}_total_dbm"), watts_to_dbm(p.total));
    }
}

/// One CSV record for a sweep row.
pub fn csv_record(index: usize, row: &SweepRow, cfg: &ExperimentConfig) -> Vec<String> {
    let mut r = Row(vec![String::new(); COLUMNS.len()]);
    let s = &row.scenario;
    let sys = &cfg.system;
    r.set("point", index.to_string());
    for (name, v) in [
        ("pt_dbm", sys.pt_dbm),
        ("r_m", sys.r_m),
        ("pathloss_exp", sys.pathloss_exp),
        ("k2", sys.k2),
        ("k4", sys.k4),
        ("r_ant_ohm", sys.r_ant_ohm),
        ("m", s.m),
        ("omega1", s.omega1),
        ("omega2", s.omega2),
    ] {
        r.num(name, v);
    }
    if s.omega1 > 0.0 {
        r.num("omega_ratio", s.omega2 / s.omega1);
    }
    r.set("tau", s.tau.to_string());
    r.set("beta", s.beta.to_string());
    r.set("kind", s.kind.label());
    r.set("degree", s.degree.to_string());
    r.set("psi", s.correlator_len.unwrap_or_else(|| s.kind.symbol_len(s.beta)).to_string());
    r.set("mode", dcsk_wpt::McMode::from(cfg.mc.mode).label());
    r.set("trials", cfg.mc.trials.to_string());
    r.set("seed", cfg.mc.seed.to_string());
    r.set("chunk", cfg.mc.chunk.to_string());
    r.set("burn_in", cfg.mc.burn_in.to_string());
    // the swept values exactly as requested, also on rows that failed to build
    for &(axis, v) in &row.coords {
        let name = match axis {
            SweepAxis::Beta => "beta",
            SweepAxis::Tau => "tau",
            SweepAxis::OmegaRatio => "omega_ratio",
            SweepAxis::Omega2 => "omega2",
            SweepAxis::M => "m",
        };
        r.num(name, v);
    }

    if let Ok(scales) = pathloss_scales(&s.system) {
        r.num("eps1", scales.eps1);
        r.num("eps2", scales.eps2);
    }

    match &row.outcome {
        Err(e) => {
            r.set("status", "error");
            r.set("error", e.to_string());
        }
        Ok(out) => {
            r.set("status", "ok");
            if let Some(t) = &out.theorem {
                r.power("theorem", t);
            }
            if let Some(c) = &out.corollary {
                r.power("corollary", c);
            }
            let mc = &out.mc;
            r.num("mc_m2", mc.m2_hat);
            r.num("mc_se2", mc.se2);
            r.num("mc_m4", mc.m4_hat);
            r.num("mc_se4", mc.se4);
            r.num("mc_linear_w", mc.power.linear_term);
            r.num("mc_nonlinear_w", mc.power.nonlinear_term);
            r.num("mc_total_w", mc.power.total);
            r.num("mc_se_total_w", mc.se_total);
            r.num("mc_total_dbm", watts_to_dbm(mc.power.total));
            r.set("saturation_hits", mc.saturation_hits.to_string());
            if let Some(t) = &out.theorem {
                r.num("z_m2", (mc.m2_hat - t.m2) / mc.se2);
                r.num("z_m4", (mc.m4_hat - t.m4) / mc.se4);
                r.num("z_total", (mc.power.total - t.total) / mc.se_total);
            }
        }
    }
    r.0
}

pub fn write_csv<W: std::io::Write>(out: W, rows: &[SweepRow], cfg: &ExperimentConfig) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for (i, row) in rows.iter().enumerate() {
        w.write_record(csv_record(i, row, cfg))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-point entry of the manifest.
pub fn point_entry(index: usize, row: &SweepRow, elapsed_s: f64) -> Value {
    let coords: Map<String, Value> = row
        .coords
        .iter()
        .map(|(a, v)| (a.label().to_string(), json!(v)))
        .collect();
    let (status, warnings) = match &row.outcome {
        Ok(out) => ("ok", out.mc.warnings.clone()),
        Err(e) => ("error", vec![e.to_string()]),
    };
    json!({
        "point": index,
        "coords": coords,
        "status": status,
        "elapsed_s": elapsed_s,
        "warnings": warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0625e-6), "1.0625e-6");
        assert_eq!(format_number(-2.5e-4), "-2.5e-4");
        assert_eq!(format_number(0.046274), "0.046274");
        assert_eq!(format_number(995255.5), "995255.5");
        assert_eq!(format_number(-13.4), "-13.4");
        assert_eq!(format_number(f64::INFINITY), "inf");
        let v = 0.1 + 0.2;
        assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn columns_are_unique() {
        for (i, c) in COLUMNS.iter().enumerate() {
            assert_eq!(column(c), i);
        }
    }
}
