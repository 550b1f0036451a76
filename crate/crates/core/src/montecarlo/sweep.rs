//! Parameter sweeps pairing Monte-Carlo estimates with the closed forms.

use crate::analytics::{corollary_power, theorem1_power};
use crate::channel::{ChannelParams, SystemConfig};
use crate::error::{argument, Error, Result};
use crate::receiver::PowerEstimate;
use crate::waveform::{WaveformKind, WaveformSpec};

use super::{run_mc, McConfig, McResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    Beta,
    Tau,
    /// Ω₂/Ω₁ with Ω₁ + Ω₂ = 1.
    OmegaRatio,
    /// Ω₂ with Ω₁ = 1 − Ω₂.
    Omega2,
    M,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            Self::Beta => "beta",
            Self::Tau => "tau",
            Self::OmegaRatio => "omega_ratio",
            Self::Omega2 => "omega2",
            Self::M => "m",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" => Ok(Self::Beta),
            "tau" => Ok(Self::Tau),
            "omega_ratio" => Ok(Self::OmegaRatio),
            "omega2" => Ok(Self::Omega2),
            "m" => Ok(Self::M),
            other => Err(argument(format!(
                "unknown sweep axis {other:?} (expected beta, tau, omega_ratio, omega2 or m)"
            ))),
        }
    }
}

/// Raw scenario values; validated only when turned into module types, so a
/// sweep can carry invalid points as row-level errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub system: SystemConfig,
    pub m: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub tau: usize,
    pub beta: u32,
    pub kind: WaveformKind,
    pub degree: u32,
    /// `None` tracks the symbol length as β changes.
    pub correlator_len: Option<usize>,
}

fn as_count(axis: SweepAxis, value: f64) -> Result<u64> {
    if value.is_finite() && value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as u64)
    } else {
        Err(argument(format!("{} must be a non-negative integer, got {value}", axis.label())))
    }
}

impl Scenario {
    pub fn channel(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.m, self.omega1, self.omega2, self.tau)
    }

    pub fn waveform(&self) -> Result<WaveformSpec> {
        let spec = WaveformSpec::new(self.beta, self.kind)?.with_degree(self.degree)?;
        match self.correlator_len {
            Some(psi) => spec.with_correlator_len(psi),
            None => Ok(spec),
        }
    }

    pub fn with(mut self, axis: SweepAxis, value: f64) -> Result<Self> {
        match axis {
            SweepAxis::Beta => self.beta = as_count(axis, value)? as u32,
            SweepAxis::Tau => self.tau = as_count(axis, value)? as usize,
            SweepAxis::OmegaRatio => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(argument(format!("omega_ratio must lie in [0, 1], got {value}")));
                }
                self.omega1 = 1.0 / (1.0 + value);
                self.omega2 = 1.0 - self.omega1;
            }
            SweepAxis::Omega2 => {
                self.omega2 = value;
                self.omega1 = 1.0 - value;
            }
            SweepAxis::M => self.m = value,
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowOutcome {
    pub mc: McResult,
    /// Present for the WPT-optimal waveform with a full-symbol correlator.
    pub theorem: Option<PowerEstimate>,
    pub corollary: Option<PowerEstimate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<(SweepAxis, f64)>,
    pub scenario: Scenario,
    pub outcome: Result<RowOutcome>,
}

/// Monte-Carlo estimate plus closed forms for one scenario.
pub fn evaluate(scenario: &Scenario, mc: &McConfig) -> Result<RowOutcome> {
    let params = scenario.channel()?;
    let spec = scenario.waveform()?;
    let closed_form = spec.kind() == WaveformKind::WptOptimal && spec.correlator_len() == spec.symbol_len();
    let (theorem, corollary) = if closed_form {
        (
            Some(theorem1_power(&scenario.system, &params, spec.beta())?),
            Some(corollary_power(&scenario.system, &params, spec.beta())?),
        )
    } else {
        (None, None)
    };
    let mc = run_mc(&scenario.system, &params, &spec, mc)?;
    Ok(RowOutcome { mc, theorem, corollary })
}

/// One row per value of a single axis.
pub fn sweep(axis: SweepAxis, values: &[f64], fixed: &Scenario, mc: &McConfig) -> Vec<SweepRow> {
    sweep_grid(&[(axis, values.to_vec())], fixed, mc)
}

/// Coordinates of the cartesian product of the axes, first axis outermost.
pub fn grid_points(axes: &[(SweepAxis, Vec<f64>)]) -> Vec<Vec<(SweepAxis, f64)>> {
    let mut points: Vec<Vec<(SweepAxis, f64)>> = vec![Vec::new()];
    for (axis, values) in axes {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push((*axis, v));
                    p
                })
            })
            .collect();
    }
    points
}

/// Applies `coords` to `fixed` in order.
pub fn scenario_at(coords: &[(SweepAxis, f64)], fixed: &Scenario) -> Result<Scenario> {
    coords.iter().try_fold(*fixed, |s, &(axis, v)| s.with(axis, v))
}

/// Evaluates one grid point; a point that cannot be built keeps `fixed` as
/// its scenario.
pub fn evaluate_point(coords: Vec<(SweepAxis, f64)>, fixed: &Scenario, mc: &McConfig) -> SweepRow {
    let (scenario, outcome) = match scenario_at(&coords, fixed) {
        Ok(s) => (s, evaluate(&s, mc)),
        Err(e) => (*fixed, Err(e)),
    };
    SweepRow { coords, scenario, outcome }
}

/// Cartesian product of the axes, first axis outermost. An invalid point
/// becomes an error row and the sweep continues.
pub fn sweep_grid(axes: &[(SweepAxis, Vec<f64>)], fixed: &Scenario, mc: &McConfig) -> Vec<SweepRow> {
    grid_points(axes)
        .into_iter()
        .map(|coords| evaluate_point(coords, fixed, mc))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Scenario {
        Scenario {
            system: SystemConfig::default(),
            m: 4.0,
            omega1: 0.75,
            omega2: 0.25,
            tau: 3,
            beta: 30,
            kind: WaveformKind::WptOptimal,
            degree: 2,
            correlator_len: None,
        }
    }

    fn quick() -> McConfig {
        McConfig { trials: 2_000, chunk: 500, ..McConfig::default() }
    }

    #[test]
    fn grid_order_and_size() {
        let rows = sweep_grid(
            &[(SweepAxis::Omega2, vec![0.0, 0.25, 0.5]), (SweepAxis::Beta, vec![10.0, 20.0])],
            &base(),
            &quick(),
        );
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[1].coords, vec![(SweepAxis::Omega2, 0.0), (SweepAxis::Beta, 20.0)]);
        assert_eq!(rows[1].scenario.beta, 20);
        assert!(rows.iter().all(|r| r.outcome.is_ok()));
    }

    #[test]
    fn invalid_points_become_error_rows() {
        let rows = sweep(SweepAxis::Tau, &[1.0, 2.5, 40.0, 2.0], &base(), &quick());
        assert_eq!(rows.len(), 4);
        assert!(rows[0].outcome.is_ok());
        assert!(rows[1].outcome.is_err());
        assert!(rows[2].outcome.is_err());
        assert!(rows[3].outcome.is_ok());
    }

    #[test]
    fn classic_rows_have_no_closed_form() {
        let s = Scenario { kind: WaveformKind::ClassicDcsk, ..base() };
        let out = evaluate(&s, &quick()).unwrap();
        assert!(out.theorem.is_none() && out.corollary.is_none());
    }

    #[test]
    fn axis_parsing() {
        for axis in [SweepAxis::Beta, SweepAxis::Tau, SweepAxis::OmegaRatio, SweepAxis::Omega2, SweepAxis::M] {
            assert_eq!(axis.label().parse::<SweepAxis>().unwrap(), axis);
        }
        assert!("psi".parse::<SweepAxis>().is_err());
    }
}
