//! Closed-form harvested power of the WPT-optimal DCSK waveform.
//!
//! Over a two-ray channel the correlator sum of symbol `l` collapses to
//!
//! ```text
//! S = δ₁·x_prev + δ₂·x_cur
//! δ₁ = τ α₂ d_{l−1}
//! δ₂ = α₁(1 + β d_l) + α₂(1 + (β − τ) d_l)
//! ```
//!
//! with `x_prev`, `x_cur` the reference chips of symbols `l−1` and `l`.
//! Arcsine-law chips have E{x²} = 1/2 and E{x⁴} = 3/8, which yields
//!
//! ```text
//! E{S²} = (E{δ₁²} + E{δ₂²}) / 2
//! E{S⁴} = 3/8·E{δ₁⁴} + 3/2·E{δ₁²δ₂²} + 3/8·E{δ₂⁴}
//! ```
//!
//! [`theorem1_power`] is the published expanded polynomial, which replaces
//! E{δ₁²δ₂²} by E{δ₁²}·E{δ₂²}. [`theorem1_power_assembled`] rebuilds the same
//! quantity from the individual moments; agreement between the two guards
//! the long transcription. [`exact_chip_sum_moments`] keeps the coupling
//! through the shared α₂ instead.

use crate::channel::{pathloss_scales, ChannelParams, SystemConfig};
use crate::error::{argument, Result};
use crate::receiver::{harvested_power, PowerEstimate};
use crate::specfun::{log_gamma_unchecked, nakagami_moment, NakagamiSpec};

/// E{x²} of an arcsine-distributed chip.
pub const CHIP_SECOND_MOMENT: f64 = 0.5;
/// E{x⁴} of an arcsine-distributed chip.
pub const CHIP_FOURTH_MOMENT: f64 = 0.375;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaMoments {
    pub e_d1_sq: f64,
    pub e_d2_sq: f64,
    pub e_d1_4: f64,
    pub e_d2_4: f64,
}

fn check_delay(params: &ChannelParams, beta: u32) -> Result<()> {
    let tau = params.tau();
    if tau > 0 && tau + 1 > beta as usize {
        return Err(argument(format!(
            "delay {tau} exceeds beta - 1 = {}",
            i64::from(beta) - 1
        )));
    }
    Ok(())
}

/// (Γ(m + ½)/Γ(m))² / m, so that E{α₁}E{α₂} = this · √(Ω₁Ω₂).
fn mean_product_coeff(m: f64) -> f64 {
    let lr = log_gamma_unchecked(m + 0.5) - log_gamma_unchecked(m);
    (2.0 * lr).exp() / m
}

/// Γ(m + 3/2)Γ(m + ½) / (m² Γ(m)²), so that E{α₁³}E{α₂} = this · Ω₁^{3/2} Ω₂^{1/2}.
fn mixed_coeff(m: f64) -> f64 {
    let lm = log_gamma_unchecked(m);
    let lr = log_gamma_unchecked(m + 1.5) + log_gamma_unchecked(m + 0.5) - 2.0 * lm;
    lr.exp() / (m * m)
}

pub fn delta1_sq(params: &ChannelParams) -> f64 {
    let tau = params.tau() as f64;
    tau * tau * params.omega2()
}

pub fn delta1_4(params: &ChannelParams) -> f64 {
    let tau = params.tau() as f64;
    let m = params.m();
    tau.powi(4) * params.omega2().powi(2) * (m + 1.0) / m
}

pub fn delta2_sq(params: &ChannelParams, beta: u32) -> Result<f64> {
    check_delay(params, beta)?;
    let (o1, o2, m) = (params.omega1(), params.omega2(), params.m());
    let b = f64::from(beta);
    let tau = params.tau() as f64;
    let g = b - tau;
    Ok(o1 * (1.0 + b * b)
        + o2 * (1.0 + g * g)
        + 2.0 * (1.0 + b * b - b * tau) * mean_product_coeff(m) * (o1 * o2).sqrt())
}

pub fn delta2_4(params: &ChannelParams, beta: u32) -> Result<f64> {
    check_delay(params, beta)?;
    let (o1, o2, m) = (params.omega1(), params.omega2(), params.m());
    let b = f64::from(beta);
    let g = b - params.tau() as f64;
    let k = (m + 1.0) / m;
    let cm = mixed_coeff(m);
    let b2 = b * b;
    let g2 = g * g;
    Ok(o1 * o1 * (1.0 + 6.0 * b2 + b2 * b2) * k
        + 4.0 * cm * o1.powf(1.5) * o2.sqrt() * ((1.0 + 3.0 * b2) + g * (3.0 * b + b2 * b))
        + 6.0 * o1 * o2 * (g2 * (1.0 + b2) + 4.0 * b * g + 1.0 + b2)
        + 4.0 * cm * o1.sqrt() * o2.powf(1.5) * (1.0 + 3.0 * g2 + b * g2 * g + 3.0 * b * g)
        + o2 * o2 * (1.0 + 6.0 * g2 + g2 * g2) * k)
}

pub fn delta_moments(params: &ChannelParams, beta: u32) -> Result<DeltaMoments> {
    Ok(DeltaMoments {
        e_d1_sq: delta1_sq(params),
        e_d2_sq: delta2_sq(params, beta)?,
        e_d1_4: delta1_4(params),
        e_d2_4: delta2_4(params, beta)?,
    })
}

/// Moments of one ray amplitude; a ray with zero power is identically zero.
fn ray_moment(m: f64, omega: f64, n: u32) -> f64 {
    if omega == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    nakagami_moment(NakagamiSpec::new(m, omega).expect("validated channel params"), n)
}

/// E{(1 + β d)^p (1 + γ d)^q} over an equiprobable bit d = ±1.
fn bit_average(beta: f64, gamma: f64, p: i32, q: i32) -> f64 {
    [1.0, -1.0]
        .iter()
        .map(|d: &f64| (1.0 + beta * d).powi(p) * (1.0 + gamma * d).powi(q))
        .sum::<f64>()
        / 2.0
}

/// E{δ₂ᵏ} from the binomial expansion in α₁, α₂ with bit averages done
/// numerically; independent of the expanded polynomials above.
fn delta2_moment_by_expansion(params: &ChannelParams, beta: u32, k: u32) -> f64 {
    let (m, o1, o2) = (params.m(), params.omega1(), params.omega2());
    let b = f64::from(beta);
    let g = b - params.tau() as f64;
    (0..=k)
        .map(|j| {
            let binom = (0..j).fold(1.0, |acc, i| acc * f64::from(k - i) / f64::from(i + 1));
            binom
                * ray_moment(m, o1, k - j)
                * ray_moment(m, o2, j)
                * bit_average(b, g, (k - j) as i32, j as i32)
        })
        .sum()
}

/// E{S²} and E{S⁴} assembled from the individual δ moments with x_prev and
/// x_cur independent, as the published closed form assumes.
pub fn chip_sum_moments(params: &ChannelParams, beta: u32) -> Result<(f64, f64)> {
    check_delay(params, beta)?;
    let tau = params.tau() as f64;
    let (m, o2) = (params.m(), params.omega2());
    let d1_sq = tau * tau * ray_moment(m, o2, 2);
    let d1_4 = tau.powi(4) * ray_moment(m, o2, 4);
    let d2_sq = delta2_moment_by_expansion(params, beta, 2);
    let d2_4 = delta2_moment_by_expansion(params, beta, 4);
    let x2 = CHIP_SECOND_MOMENT;
    let x4 = CHIP_FOURTH_MOMENT;
    let m2 = x2 * (d1_sq + d2_sq);
    let m4 = x4 * d1_4 + 6.0 * x2 * x2 * d1_sq * d2_sq + x4 * d2_4;
    Ok((m2, m4))
}

/// E{δ₁²δ₂²} with δ₁ and δ₂ sharing α₂.
pub fn delta_cross_moment(params: &ChannelParams, beta: u32) -> Result<f64> {
    check_delay(params, beta)?;
    let (m, o1, o2) = (params.m(), params.omega1(), params.omega2());
    let b = f64::from(beta);
    let tau = params.tau() as f64;
    let g = b - tau;
    // τ² E{α₂² (α₁A + α₂B)²}, A = 1 + βd, B = 1 + γd
    let inner = ray_moment(m, o1, 2) * ray_moment(m, o2, 2) * bit_average(b, g, 2, 0)
        + ray_moment(m, o2, 4) * bit_average(b, g, 0, 2)
        + 2.0 * ray_moment(m, o1, 1) * ray_moment(m, o2, 3) * bit_average(b, g, 1, 1);
    Ok(tau * tau * inner)
}

/// E{S²} and E{S⁴} of the correlator sum when one α₂ multiplies both the
/// predecessor tail and the current symbol, which is what the chip-level
/// channel does.
pub fn exact_chip_sum_moments(params: &ChannelParams, beta: u32) -> Result<(f64, f64)> {
    let d = delta_moments(params, beta)?;
    let cross = delta_cross_moment(params, beta)?;
    let x2 = CHIP_SECOND_MOMENT;
    let x4 = CHIP_FOURTH_MOMENT;
    let m2 = x2 * (d.e_d1_sq + d.e_d2_sq);
    let m4 = x4 * d.e_d1_4 + 6.0 * x2 * x2 * cross + x4 * d.e_d2_4;
    Ok((m2, m4))
}

/// The two brackets of the expanded closed form, `P = ε₁/2·L + ε₂/2·N`.
fn theorem1_brackets(params: &ChannelParams, beta: u32) -> Result<(f64, f64)> {
    check_delay(params, beta)?;
    let (o1, o2, m) = (params.omega1(), params.omega2(), params.m());
    let b = f64::from(beta);
    let tau = params.tau() as f64;
    let g = b - tau;
    let k = (m + 1.0) / m;
    let c1 = mean_product_coeff(m) * m;
    let cm = mixed_coeff(m);
    let root = (o1 * o2).sqrt();

    let linear = tau * tau * o2
        + o1 * (1.0 + b * b)
        + o2 * (1.0 + g * g)
        + 2.0 * (1.0 + b * b - b * tau) * c1 * root / m;

    let quartic = 0.75
        * (tau.powi(4) * o2 * o2 * k
            + o1 * o1 * (1.0 + 6.0 * b * b + b.powi(4)) * k
            + 4.0 * cm * o1.powf(1.5) * o2.powf(0.5)
                * ((1.0 + 3.0 * b * b) + g * (3.0 * b + b.powi(3)))
            + 6.0 * o1 * o2 * (g * g * (1.0 + b * b) + 4.0 * b * g + 1.0 + b * b)
            + 4.0 * cm * o1.powf(0.5) * o2.powf(1.5)
                * (1.0 + 3.0 * g * g + b * g.powi(3) + 3.0 * b * g)
            + o2 * o2 * (1.0 + 6.0 * g * g + g.powi(4)) * k)
        + 3.0 * tau * tau * o2
            * (o1 * (1.0 + b * b) + o2 * (1.0 + g * g) + 2.0 * (1.0 + b * b - b * tau) * c1 * root / m);

    Ok((linear, quartic))
}

/// Harvested power of the WPT-optimal waveform over the two-ray channel,
/// from the expanded closed form.
pub fn theorem1_power(config: &SystemConfig, params: &ChannelParams, beta: u32) -> Result<PowerEstimate> {
    let scales = pathloss_scales(config)?;
    let (linear, quartic) = theorem1_brackets(params, beta)?;
    harvested_power(linear / 2.0, quartic / 2.0, scales.eps1, scales.eps2)
}

/// Same quantity as [`theorem1_power`], assembled from [`chip_sum_moments`].
pub fn theorem1_power_assembled(
    config: &SystemConfig,
    params: &ChannelParams,
    beta: u32,
) -> Result<PowerEstimate> {
    let scales = pathloss_scales(config)?;
    let (m2, m4) = chip_sum_moments(params, beta)?;
    harvested_power(m2, m4, scales.eps1, scales.eps2)
}

/// Zero-delay limit of [`theorem1_power`]; `params.tau()` is ignored.
pub fn corollary_power(config: &SystemConfig, params: &ChannelParams, beta: u32) -> Result<PowerEstimate> {
    let scales = pathloss_scales(config)?;
    let (o1, o2, m) = (params.omega1(), params.omega2(), params.m());
    let b = f64::from(beta);
    let b2 = b * b;
    let k = (m + 1.0) / m;
    let c1 = mean_product_coeff(m) * m;
    let cm = mixed_coeff(m);
    let m2 = 0.5 * (1.0 + b2) * (o1 + o2 + 2.0 * c1 * (o1 * o2).sqrt() / m);
    let m4 = 0.375
        * (1.0 + 6.0 * b2 + b2 * b2)
        * ((o1 * o1 + o2 * o2) * k
            + 6.0 * o1 * o2
            + 4.0 * cm * (o1.sqrt() * o2.powf(1.5) + o1.powf(1.5) * o2.sqrt()));
    harvested_power(m2, m4, scales.eps1, scales.eps2)
}

/// Flat Nakagami-m block fading (single ray).
pub fn flat_fading_power(config: &SystemConfig, m: f64, beta: u32) -> Result<PowerEstimate> {
    if !(m.is_finite() && m >= 0.5) {
        return Err(crate::error::domain(format!("fading figure must satisfy m >= 0.5, got {m}")));
    }
    let scales = pathloss_scales(config)?;
    let b2 = f64::from(beta).powi(2);
    let m2 = 0.5 * (1.0 + b2);
    let m4 = 3.0 * (1.0 + m) / (8.0 * m) * (1.0 + 6.0 * b2 + b2 * b2);
    harvested_power(m2, m4, scales.eps1, scales.eps2)
}
