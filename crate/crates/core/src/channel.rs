//! Two-ray Nakagami-m block-fading channel and the link budget.

use rand::Rng;
use rand_distr::Distribution;

use crate::error::{argument, domain, Result};
use crate::specfun::{Nakagami, NakagamiSpec};
use crate::waveform::{delayed_view, ChipFrame};

const OMEGA_SUM_TOL: f64 = 1e-12;

/// Transmit power, geometry and rectenna constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub pt_watts: f64,
    pub distance_m: f64,
    pub pathloss_exp: f64,
    pub k2: f64,
    pub k4: f64,
    pub r_ant_ohm: f64,
}

impl Default for SystemConfig {
    /// 30 dBm at 20 m with pathloss exponent 4; k₂ = 0.0034, k₄ = 0.3829, 50 Ω.
    fn default() -> Self {
        Self {
            pt_watts: 1.0,
            distance_m: 20.0,
            pathloss_exp: 4.0,
            k2: 0.0034,
            k4: 0.3829,
            r_ant_ohm: 50.0,
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

impl SystemConfig {
    pub fn with_pt_dbm(mut self, dbm: f64) -> Self {
        self.pt_watts = dbm_to_watts(dbm);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("pt_watts", self.pt_watts),
            ("distance_m", self.distance_m),
            ("pathloss_exp", self.pathloss_exp),
            ("r_ant_ohm", self.r_ant_ohm),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        for (name, v) in [("k2", self.k2), ("k4", self.k4)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Deterministic scale factors of the quadratic and quartic harvesting terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossScales {
    /// r^{−a} k₂ R_ant P_t
    pub eps1: f64,
    /// r^{−2a} k₄ R_ant² P_t²
    pub eps2: f64,
}

pub fn pathloss_scales(config: &SystemConfig) -> Result<PathlossScales> {
    config.validate()?;
    let loss = config.distance_m.powf(-config.pathloss_exp);
    Ok(PathlossScales {
        eps1: loss * config.k2 * config.r_ant_ohm * config.pt_watts,
        eps2: loss * loss * config.k4 * (config.r_ant_ohm * config.pt_watts).powi(2),
    })
}

/// Power-delay profile of the two-ray channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    m: f64,
    omega1: f64,
    omega2: f64,
    tau: usize,
}

impl ChannelParams {
    pub fn new(m: f64, omega1: f64, omega2: f64, tau: usize) -> Result<Self> {
        if !(m.is_finite() && m >= 0.5) {
            return Err(domain(format!("fading figure must satisfy m >= 0.5, got {m}")));
        }
        if !(omega1.is_finite() && omega2.is_finite()) {
            return Err(domain("ray power gains must be finite"));
        }
        if (omega1 + omega2 - 1.0).abs() > OMEGA_SUM_TOL {
            return Err(domain(format!(
                "ray power gains must sum to 1, got {omega1} + {omega2}"
            )));
        }
        if omega2 < 0.0 || omega2 > omega1 + OMEGA_SUM_TOL {
            return Err(domain(format!(
                "ray power gains must satisfy omega1 >= omega2 >= 0, got {omega1}, {omega2}"
            )));
        }
        Ok(Self { m, omega1, omega2, tau })
    }

    /// Single-ray channel: Ω₁ = 1, Ω₂ = 0, τ = 0.
    pub fn flat(m: f64) -> Result<Self> {
        Self::new(m, 1.0, 0.0, 0)
    }

    /// Splits unit power by the ratio Ω₂/Ω₁ ∈ [0, 1].
    pub fn from_ratio(m: f64, ratio: f64, tau: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&ratio) {
            return Err(domain(format!("power ratio omega2/omega1 must lie in [0, 1], got {ratio}")));
        }
        let omega1 = 1.0 / (1.0 + ratio);
        Self::new(m, omega1, 1.0 - omega1, tau)
    }

    pub fn with_tau(self, tau: usize) -> Self {
        Self { tau, ..self }
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn tau(&self) -> usize {
        self.tau
    }
}

/// Ray amplitudes held for one symbol window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadeRealization {
    pub alpha1: f64,
    pub alpha2: f64,
}

/// Reusable amplitude samplers for both rays.
#[derive(Debug, Clone, Copy)]
pub struct TwoRayFading {
    first: Nakagami,
    second: Option<Nakagami>,
}

impl TwoRayFading {
    pub fn new(params: &ChannelParams) -> Self {
        let first = Nakagami::new(
            NakagamiSpec::new(params.m, params.omega1).expect("validated channel params"),
        );
        let second = (params.omega2 > 0.0).then(|| {
            Nakagami::new(NakagamiSpec::new(params.m, params.omega2).expect("validated channel params"))
        });
        Self { first, second }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> FadeRealization {
        let alpha1 = self.first.sample(rng);
        let alpha2 = self.second.map_or(0.0, |d| d.sample(rng));
        FadeRealization { alpha1, alpha2 }
    }
}

/// Independent α₁ ~ Nakagami(m, Ω₁), α₂ ~ Nakagami(m, Ω₂); α₂ = 0 when Ω₂ = 0.
pub fn draw_fade<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> FadeRealization {
    TwoRayFading::new(params).draw(rng)
}

/// y_k = α₁ s_k + α₂ s_{k−τ} over the window of `symbol_index`.
pub fn apply_two_ray(
    frame: &ChipFrame,
    fade: FadeRealization,
    params: &ChannelParams,
    symbol_index: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(frame.symbol_len());
    apply_two_ray_into(frame, fade, params.tau, symbol_index, &mut out)?;
    Ok(out)
}

/// Buffer-reusing form of [`apply_two_ray`]; `out` is overwritten.
pub fn apply_two_ray_into(
    frame: &ChipFrame,
    fade: FadeRealization,
    tau: usize,
    symbol_index: usize,
    out: &mut Vec<f64>,
) -> Result<()> {
    let delayed = delayed_view(frame, tau, symbol_index)?;
    let direct = frame
        .symbol(symbol_index)
        .ok_or_else(|| argument(format!("symbol index {symbol_index} out of range")))?;
    out.clear();
    out.extend(
        direct
            .iter()
            .zip(delayed)
            .map(|(s, sd)| fade.alpha1 * s + fade.alpha2 * sd),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::{WaveformKind, WaveformSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn pathloss_examples() {
        let cfg = SystemConfig::default();
        let s = pathloss_scales(&cfg).unwrap();
        assert!(rel(s.eps1, 1.0625e-6) < 1e-14, "{}", s.eps1);
        assert!(rel(s.eps2, 0.3829 * 2500.0 / 20f64.powi(8)) < 1e-14);
        assert!(rel(s.eps2, 3.73926e-8) < 1e-5);

        let unit = SystemConfig { distance_m: 1.0, ..cfg };
        assert!(rel(pathloss_scales(&unit).unwrap().eps1, 0.17) < 1e-14);

        assert!(pathloss_scales(&SystemConfig { distance_m: 0.0, ..cfg }).is_err());
        assert!(pathloss_scales(&SystemConfig { pt_watts: -1.0, ..cfg }).is_err());
        assert!(pathloss_scales(&SystemConfig { pathloss_exp: 0.0, ..cfg }).is_err());
    }

    #[test]
    fn dbm_conversion() {
        assert_eq!(dbm_to_watts(30.0), 1.0);
        assert!((watts_to_dbm(1.0) - 30.0).abs() < 1e-12);
        assert_eq!(SystemConfig::default().with_pt_dbm(30.0), SystemConfig::default());
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(4.0, 0.6, 0.3, 0).is_err());
        assert!(ChannelParams::new(4.0, 0.25, 0.75, 0).is_err());
        assert!(ChannelParams::new(0.4, 1.0, 0.0, 0).is_err());
        assert!(ChannelParams::new(4.0, 0.5, 0.5, 3).is_ok());
        let p = ChannelParams::from_ratio(4.0, 1.0 / 3.0, 2).unwrap();
        assert!((p.omega2() - 0.25).abs() < 1e-15);
        assert!(ChannelParams::from_ratio(4.0, 1.5, 2).is_err());
    }

    #[test]
    fn zero_power_ray_is_silent() {
        let p = ChannelParams::flat(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert_eq!(draw_fade(&p, &mut rng).alpha2, 0.0);
        }
    }

    fn frame(beta: u32, bits: &[i8], refs: &[f64]) -> ChipFrame {
        let spec = WaveformSpec::new(beta, WaveformKind::WptOptimal).unwrap();
        ChipFrame::from_references(&spec, bits, refs).unwrap()
    }

    #[test]
    fn apply_examples() {
        let f = frame(3, &[1, -1], &[0.3, -0.7]);
        let single = FadeRealization { alpha1: 1.0, alpha2: 0.0 };
        for tau in 0..=2 {
            let p = ChannelParams::new(4.0, 0.75, 0.25, tau).unwrap();
            assert_eq!(apply_two_ray(&f, single, &p, 1).unwrap(), f.symbol(1).unwrap());
        }

        let p0 = ChannelParams::new(4.0, 0.5, 0.5, 0).unwrap();
        let fade = FadeRealization { alpha1: 0.7, alpha2: 1.3 };
        let y = apply_two_ray(&f, fade, &p0, 1).unwrap();
        for (yk, sk) in y.iter().zip(f.symbol(1).unwrap()) {
            assert!((yk - 2.0 * sk).abs() < 1e-15);
        }

        let f = frame(3, &[1, 1], &[0.5, 0.5]);
        let p = ChannelParams::new(4.0, 0.5, 0.5, 2).unwrap();
        let y = apply_two_ray(&f, FadeRealization { alpha1: 1.0, alpha2: 1.0 }, &p, 1).unwrap();
        assert_eq!(y, vec![1.0; 4]);

        assert!(apply_two_ray(&f, fade, &p, 0).is_err());
        assert!(apply_two_ray(&f, fade, &p.with_tau(3), 1).is_err());
    }

    #[test]
    fn channel_is_linear_in_the_frame() {
        let f = frame(5, &[-1, 1], &[0.31, -0.44]);
        let p = ChannelParams::new(2.0, 0.75, 0.25, 3).unwrap();
        let fade = FadeRealization { alpha1: 0.9, alpha2: 0.4 };
        let y = apply_two_ray(&f, fade, &p, 1).unwrap();
        let yc = apply_two_ray(&f.scaled(-2.5), fade, &p, 1).unwrap();
        for (a, b) in y.iter().zip(&yc) {
            assert!((b + 2.5 * a).abs() < 1e-14);
        }
    }

    #[test]
    fn flat_profile_is_single_nakagami_ray() {
        let f = frame(4, &[1, -1], &[0.2, 0.9]);
        let p = ChannelParams::flat(4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fade = draw_fade(&p, &mut rng);
        let y = apply_two_ray(&f, fade, &p, 1).unwrap();
        for (yk, sk) in y.iter().zip(f.symbol(1).unwrap()) {
            assert_eq!(*yk, fade.alpha1 * sk);
        }
    }
}
