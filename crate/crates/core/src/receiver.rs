//! Analog correlator and the nonlinear rectenna power functional.
//!
//! Harvested power depends on the second and fourth moments of the
//! correlator chip sum, `P = ε₁ E{S²} + ε₂ E{S⁴}`, so both the closed forms
//! and the simulator hand moments (not sample powers) to
//! [`harvested_power`].

use crate::error::{argument, domain, Result};

/// Σ y_k over the first ψ received chips. The √P_t factor of the physical
/// correlator output lives in the path-loss scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorOutput {
    pub chip_sum: f64,
}

pub fn correlate(received: &[f64], psi: usize) -> Result<CorrelatorOutput> {
    if psi == 0 {
        return Err(argument("correlator length must be >= 1"));
    }
    if received.len() < psi {
        return Err(argument(format!(
            "correlator window {psi} longer than received sequence of {} chips",
            received.len()
        )));
    }
    Ok(CorrelatorOutput {
        chip_sum: received[..psi].iter().sum(),
    })
}

/// Harvested power with its linear and quartic contributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    /// Watts.
    pub total: f64,
    /// ε₁·m2, watts.
    pub linear_term: f64,
    /// ε₂·m4, watts.
    pub nonlinear_term: f64,
    pub m2: f64,
    pub m4: f64,
    /// Standard error of `m2`; zero for closed forms.
    pub stderr2: f64,
    /// Standard error of `m4`; zero for closed forms.
    pub stderr4: f64,
    /// Monte-Carlo trial count; zero for closed forms.
    pub trials: u64,
}

/// Fourth moments may sit a few ulps under m2² when S² is (nearly)
/// deterministic.
const JENSEN_SLACK: f64 = 1e-12;

/// Assembles `ε₁·m2 + ε₂·m4`.
pub fn harvested_power(m2: f64, m4: f64, eps1: f64, eps2: f64) -> Result<PowerEstimate> {
    for (name, v) in [("m2", m2), ("m4", m4), ("eps1", eps1), ("eps2", eps2)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(argument(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    if m4 < m2 * m2 * (1.0 - JENSEN_SLACK) {
        return Err(argument(format!(
            "fourth moment {m4} below squared second moment {}; the estimator is broken",
            m2 * m2
        )));
    }
    let linear_term = eps1 * m2;
    let nonlinear_term = eps2 * m4;
    Ok(PowerEstimate {
        total: linear_term + nonlinear_term,
        linear_term,
        nonlinear_term,
        m2,
        m4,
        stderr2: 0.0,
        stderr4: 0.0,
        trials: 0,
    })
}

/// Correlator-free rectenna model `k₂R_ant E|y|² + k₄R_ant² E|y|⁴`.
pub fn rectenna_instantaneous(y_rms2: f64, y_rms4: f64, k2: f64, k4: f64, r_ant: f64) -> Result<f64> {
    for (name, v) in [("E|y|^2", y_rms2), ("E|y|^4", y_rms4), ("k2", k2), ("k4", k4), ("R_ant", r_ant)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(domain(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    Ok(k2 * r_ant * y_rms2 + k4 * r_ant * r_ant * y_rms4)
}

/// Counts correlator outputs large enough to push the diode out of its
/// small-signal region. Disabled unless a threshold is set.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SaturationMonitor {
    pub threshold: Option<f64>,
}

impl SaturationMonitor {
    pub fn exceeds(&self, out: &CorrelatorOutput) -> bool {
        self.threshold.is_some_and(|t| out.chip_sum.abs() > t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn correlate_examples() {
        assert_eq!(correlate(&[0.5], 1).unwrap().chip_sum, 0.5);
        assert_eq!(correlate(&[1.0, -1.0, 1.0, -1.0], 4).unwrap().chip_sum, 0.0);
        assert_eq!(correlate(&[1.0; 4], 4).unwrap().chip_sum, 4.0);
        assert_eq!(correlate(&[1.0, 2.0, 4.0], 2).unwrap().chip_sum, 3.0);
        assert!(correlate(&[1.0; 3], 4).is_err());
        assert!(correlate(&[1.0; 3], 0).is_err());
    }

    #[test]
    fn harvested_power_examples() {
        let p = harvested_power(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(p.total, 0.0);
        let p = harvested_power(1.0, 3.0, 1.0, 1.0).unwrap();
        assert_eq!(p.total, 4.0);
        assert_eq!(p.linear_term, 1.0);
        assert_eq!(p.nonlinear_term, 3.0);
        assert!(harvested_power(2.0, 3.0, 1.0, 1.0).is_err());
        assert!(harvested_power(-1.0, 3.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn rectenna_examples() {
        assert_eq!(rectenna_instantaneous(0.0, 0.0, 0.0034, 0.3829, 50.0).unwrap(), 0.0);
        let p = rectenna_instantaneous(1.0, 1.0, 0.0034, 0.3829, 50.0).unwrap();
        assert!((p - (0.17 + 957.25)).abs() < 1e-10);
        let lin = rectenna_instantaneous(0.8, 5.0, 0.0034, 0.0, 50.0).unwrap();
        assert!((lin - 0.0034 * 50.0 * 0.8).abs() < 1e-15);
        assert!(rectenna_instantaneous(-1.0, 0.0, 0.0034, 0.3829, 50.0).is_err());
    }

    #[test]
    fn saturation_monitor() {
        let off = SaturationMonitor::default();
        assert!(!off.exceeds(&CorrelatorOutput { chip_sum: 1e9 }));
        let on = SaturationMonitor { threshold: Some(2.0) };
        assert!(on.exceeds(&CorrelatorOutput { chip_sum: -2.5 }));
        assert!(!on.exceeds(&CorrelatorOutput { chip_sum: 1.5 }));
    }

    proptest! {
        #[test]
        fn power_is_monotone(m2 in 0.0f64..1e3, extra in 0.0f64..1e3, e1 in 0.0f64..1.0, e2 in 0.0f64..1.0,
                             bump in 0.0f64..10.0) {
            let m4 = m2 * m2 + extra;
            let base = harvested_power(m2, m4, e1, e2).unwrap().total;
            prop_assert!(harvested_power(m2, m4 + bump, e1, e2).unwrap().total >= base);
            prop_assert!(harvested_power(m2, m4, e1 + bump, e2).unwrap().total >= base);
            prop_assert!(harvested_power(m2, m4, e1, e2 + bump).unwrap().total >= base);
            // raising m2 keeps Jensen when m4 is raised alongside it
            let m2b = m2 + bump;
            prop_assert!(harvested_power(m2b, m4.max(m2b * m2b), e1, e2).unwrap().total >= base);
        }
    }
}
