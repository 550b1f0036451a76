//! Monte-Carlo estimation of the correlator-sum moments E{S²} and E{S⁴}.
//!
//! Two estimators share one harness:
//!
//! * [`McMode::Chip`] builds a two-symbol frame from a true Chebyshev orbit,
//!   passes it through the two-ray channel and correlates the second symbol;
//! * [`McMode::Moment`] samples `S = δ₁ x_prev + δ₂ x_cur` directly with
//!   independent arcsine chips. Only defined for the WPT-optimal waveform
//!   with a full-symbol correlator.
//!
//! Trial `i` draws from its own ChaCha8 stream keyed by the seed, and trials
//! are grouped into fixed chunks whose accumulators merge in chunk order, so
//! results are bit-identical for any worker count.

mod sweep;

pub use sweep::{
    evaluate, evaluate_point, grid_points, scenario_at, sweep, sweep_grid, RowOutcome, Scenario, SweepAxis, SweepRow,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{apply_two_ray_into, pathloss_scales, ChannelParams, SystemConfig, TwoRayFading};
use crate::chaos::{sample_invariant, ChaosGenerator};
use crate::error::{argument, Result};
use crate::receiver::{correlate, harvested_power, CorrelatorOutput, PowerEstimate, SaturationMonitor};
use crate::waveform::{build_frame, WaveformKind, WaveformSpec};

/// Below this many trials the standard errors are flagged as unreliable.
const MIN_TRIALS_FOR_SE: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum McMode {
    Chip,
    Moment,
}

impl McMode {
    pub fn label(self) -> &'static str {
        match self {
            Self::Chip => "chip",
            Self::Moment => "moment",
        }
    }
}

impl std::str::FromStr for McMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chip" => Ok(Self::Chip),
            "moment" => Ok(Self::Moment),
            other => Err(argument(format!("unknown Monte-Carlo mode {other:?} (expected chip or moment)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub mode: McMode,
    pub seed: u64,
    /// Trials per work unit. Part of the result's identity: changing it
    /// changes the floating-point merge order.
    pub chunk: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Run the chaotic map 64 steps past its invariant-law start (chip mode).
    pub burn_in: bool,
    pub saturation: SaturationMonitor,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            mode: McMode::Chip,
            seed: 0,
            chunk: 10_000,
            workers: None,
            burn_in: false,
            saturation: SaturationMonitor::default(),
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(argument("trials must be >= 1"));
        }
        if self.chunk == 0 {
            return Err(argument("chunk must be >= 1"));
        }
        if self.workers == Some(0) {
            return Err(argument("workers must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub m2_hat: f64,
    pub m4_hat: f64,
    pub se2: f64,
    pub se4: f64,
    /// Standard error of `power.total`, including the S²–S⁴ covariance.
    pub se_total: f64,
    pub power: PowerEstimate,
    pub trials: u64,
    pub saturation_hits: u64,
    pub warnings: Vec<String>,
}

/// Running means, centred sums of squares and the centred co-moment of S²
/// and S⁴ (Chan et al. merge).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean2: f64,
    ss2: f64,
    mean4: f64,
    ss4: f64,
    cross: f64,
    saturation_hits: u64,
}

impl MomentAccumulator {
    pub fn push(&mut self, chip_sum: f64) {
        let s2 = chip_sum * chip_sum;
        let s4 = s2 * s2;
        self.count += 1;
        let n = self.count as f64;
        let d2 = s2 - self.mean2;
        self.mean2 += d2 / n;
        self.ss2 += d2 * (s2 - self.mean2);
        let d4 = s4 - self.mean4;
        self.mean4 += d4 / n;
        self.ss4 += d4 * (s4 - self.mean4);
        self.cross += d2 * (s4 - self.mean4);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let d2 = other.mean2 - self.mean2;
        let d4 = other.mean4 - self.mean4;
        self.mean2 += d2 * nb / n;
        self.mean4 += d4 * nb / n;
        self.ss2 += other.ss2 + d2 * d2 * na * nb / n;
        self.ss4 += other.ss4 + d4 * d4 * na * nb / n;
        self.cross += other.cross + d2 * d4 * na * nb / n;
        self.count += other.count;
        self.saturation_hits += other.saturation_hits;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean2(&self) -> f64 {
        self.mean2
    }

    pub fn mean4(&self) -> f64 {
        self.mean4
    }

    /// Standard errors of the two means; infinite for fewer than two samples.
    pub fn standard_errors(&self) -> (f64, f64) {
        if self.count < 2 {
            return (f64::INFINITY, f64::INFINITY);
        }
        let n = self.count as f64;
        let se = |ss: f64| (ss.max(0.0) / (n - 1.0) / n).sqrt();
        (se(self.ss2), se(self.ss4))
    }

    /// Standard error of the mean of `w2·S² + w4·S⁴`.
    pub fn combined_standard_error(&self, w2: f64, w4: f64) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        let n = self.count as f64;
        let ss = w2 * w2 * self.ss2 + w4 * w4 * self.ss4 + 2.0 * w2 * w4 * self.cross;
        (ss.max(0.0) / (n - 1.0) / n).sqrt()
    }
}

/// Everything a trial needs besides its random stream.
struct TrialContext {
    fading: TwoRayFading,
    spec: WaveformSpec,
    tau: usize,
    beta: f64,
    burn_in: bool,
}

fn random_bit<R: Rng + ?Sized>(rng: &mut R) -> i8 {
    if rng.random::<bool>() {
        1
    } else {
        -1
    }
}

fn chip_trial<R: Rng + ?Sized>(ctx: &TrialContext, rng: &mut R, received: &mut Vec<f64>) -> Result<f64> {
    let fade = ctx.fading.draw(rng);
    let bits = [random_bit(rng), random_bit(rng)];
    let mut generator = ChaosGenerator::from_invariant(ctx.spec.degree(), rng)?;
    if ctx.burn_in {
        generator.burn_in();
    }
    let frame = build_frame(&ctx.spec, &bits, &mut generator)?;
    apply_two_ray_into(&frame, fade, ctx.tau, 1, received)?;
    Ok(correlate(received, ctx.spec.correlator_len())?.chip_sum)
}

fn moment_trial<R: Rng + ?Sized>(ctx: &TrialContext, rng: &mut R) -> f64 {
    let fade = ctx.fading.draw(rng);
    let d_prev = f64::from(random_bit(rng));
    let d_cur = f64::from(random_bit(rng));
    let x_prev = sample_invariant(rng);
    let x_cur = sample_invariant(rng);
    let tau = ctx.tau as f64;
    let delta1 = tau * fade.alpha2 * d_prev;
    let delta2 = fade.alpha1 * (1.0 + ctx.beta * d_cur) + fade.alpha2 * (1.0 + (ctx.beta - tau) * d_cur);
    delta1 * x_prev + delta2 * x_cur
}

fn stream_key(seed: u64) -> <ChaCha8Rng as SeedableRng>::Seed {
    ChaCha8Rng::seed_from_u64(seed).get_seed()
}

/// The random stream of trial `index`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(stream_key(seed));
    rng.set_stream(index);
    rng
}

fn run_chunk(
    ctx: &TrialContext,
    mc: &McConfig,
    key: <ChaCha8Rng as SeedableRng>::Seed,
    chunk_index: u64,
) -> Result<MomentAccumulator> {
    let start = chunk_index * mc.chunk;
    let end = (start + mc.chunk).min(mc.trials);
    let mut acc = MomentAccumulator::default();
    let mut received = Vec::with_capacity(ctx.spec.symbol_len());
    for i in start..end {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(i);
        let chip_sum = match mc.mode {
            McMode::Chip => chip_trial(ctx, &mut rng, &mut received)?,
            McMode::Moment => moment_trial(ctx, &mut rng),
        };
        if mc.saturation.exceeds(&CorrelatorOutput { chip_sum }) {
            acc.saturation_hits += 1;
        }
        acc.push(chip_sum);
    }
    Ok(acc)
}

/// Estimates the correlator-sum moments and the harvested power.
pub fn run_mc(
    config: &SystemConfig,
    params: &ChannelParams,
    spec: &WaveformSpec,
    mc: &McConfig,
) -> Result<McResult> {
    mc.validate()?;
    let scales = pathloss_scales(config)?;
    if params.tau() > spec.max_tau() {
        return Err(argument(format!(
            "delay {} exceeds the maximum {} for this waveform",
            params.tau(),
            spec.max_tau()
        )));
    }
    if mc.mode == McMode::Moment
        && (spec.kind() != WaveformKind::WptOptimal || spec.correlator_len() != spec.symbol_len())
    {
        return Err(argument(
            "moment mode needs the wpt-optimal waveform with a full-symbol correlator",
        ));
    }

    let ctx = TrialContext {
        fading: TwoRayFading::new(params),
        spec: *spec,
        tau: params.tau(),
        beta: f64::from(spec.beta()),
        burn_in: mc.burn_in,
    };
    let key = stream_key(mc.seed);
    let n_chunks = mc.trials.div_ceil(mc.chunk);
    let run = || -> Result<Vec<MomentAccumulator>> {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| run_chunk(&ctx, mc, key, c))
            .collect()
    };
    let chunks = match mc.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| argument(format!("cannot start {n} workers: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let mut total = MomentAccumulator::default();
    for acc in &chunks {
        total.merge(acc);
    }
    let (se2, se4) = total.standard_errors();

    let mut warnings = Vec::new();
    if mc.trials < MIN_TRIALS_FOR_SE {
        warnings.push(format!(
            "only {} trials; standard errors are unreliable below {MIN_TRIALS_FOR_SE}",
            mc.trials
        ));
    }
    if total.saturation_hits > 0 {
        warnings.push(format!(
            "{} of {} correlator outputs exceeded the saturation threshold",
            total.saturation_hits, mc.trials
        ));
    }

    let mut power = harvested_power(total.mean2, total.mean4, scales.eps1, scales.eps2)?;
    power.stderr2 = se2;
    power.stderr4 = se4;
    power.trials = total.count;

    Ok(McResult {
        m2_hat: total.mean2,
        m4_hat: total.mean4,
        se2,
        se4,
        se_total: total.combined_standard_error(scales.eps1, scales.eps2),
        power,
        trials: total.count,
        saturation_hits: total.saturation_hits,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 17.0 - 2.0).collect();
        let mut whole = MomentAccumulator::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut merged = MomentAccumulator::default();
        for part in xs.chunks(77) {
            let mut a = MomentAccumulator::default();
            part.iter().for_each(|&x| a.push(x));
            merged.merge(&a);
        }
        assert_eq!(merged.count(), 1000);
        assert!((merged.mean2() / whole.mean2() - 1.0).abs() < 1e-13);
        assert!((merged.mean4() / whole.mean4() - 1.0).abs() < 1e-13);
        let (a, b) = (merged.standard_errors(), whole.standard_errors());
        assert!((a.0 / b.0 - 1.0).abs() < 1e-10 && (a.1 / b.1 - 1.0).abs() < 1e-10);

        // naive two-pass oracle
        let n = xs.len() as f64;
        let s4: Vec<f64> = xs.iter().map(|x| x.powi(4)).collect();
        let mean = s4.iter().sum::<f64>() / n;
        let var = s4.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((whole.standard_errors().1 / (var / n).sqrt() - 1.0).abs() < 1e-10);

        // combined error against the two-pass variance of the weighted sum
        let (w2, w4) = (0.3, 1.7);
        let p: Vec<f64> = xs.iter().map(|x| w2 * x * x + w4 * x.powi(4)).collect();
        let pm = p.iter().sum::<f64>() / n;
        let pv = p.iter().map(|v| (v - pm).powi(2)).sum::<f64>() / (n - 1.0);
        let want = (pv / n).sqrt();
        assert!((merged.combined_standard_error(w2, w4) / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_sample_has_infinite_error() {
        let mut a = MomentAccumulator::default();
        a.push(1.0);
        assert_eq!(a.standard_errors().0, f64::INFINITY);
    }

    #[test]
    fn trial_streams_are_distinct() {
        let a: u64 = trial_rng(7, 0).random();
        let b: u64 = trial_rng(7, 1).random();
        let c: u64 = trial_rng(8, 0).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, trial_rng(7, 0).random::<u64>());
    }

    #[test]
    fn rejects_invalid_runs() {
        let cfg = SystemConfig::default();
        let p = ChannelParams::new(4.0, 0.75, 0.25, 3).unwrap();
        let wpt = WaveformSpec::new(10, WaveformKind::WptOptimal).unwrap();
        let zero = McConfig { trials: 0, ..McConfig::default() };
        assert!(run_mc(&cfg, &p, &wpt, &zero).is_err());
        let short = WaveformSpec::new(3, WaveformKind::WptOptimal).unwrap();
        assert!(run_mc(&cfg, &p, &short, &McConfig { trials: 10, ..McConfig::default() }).is_err());
        let classic = WaveformSpec::new(10, WaveformKind::ClassicDcsk).unwrap();
        let moment = McConfig { trials: 10, mode: McMode::Moment, ..McConfig::default() };
        assert!(run_mc(&cfg, &p, &classic, &moment).is_err());
        assert!(run_mc(&cfg, &p, &wpt.with_correlator_len(4).unwrap(), &moment).is_err());
    }

    #[test]
    fn small_runs_are_reported_not_fatal() {
        let cfg = SystemConfig::default();
        let p = ChannelParams::new(4.0, 0.75, 0.25, 3).unwrap();
        let wpt = WaveformSpec::new(10, WaveformKind::WptOptimal).unwrap();
        let r = run_mc(&cfg, &p, &wpt, &McConfig { trials: 5, ..McConfig::default() }).unwrap();
        assert_eq!(r.trials, 5);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn saturation_hits_are_counted() {
        let cfg = SystemConfig::default();
        let p = ChannelParams::new(4.0, 0.75, 0.25, 3).unwrap();
        let wpt = WaveformSpec::new(10, WaveformKind::WptOptimal).unwrap();
        let mc = McConfig {
            trials: 2000,
            saturation: SaturationMonitor { threshold: Some(0.0) },
            ..McConfig::default()
        };
        let r = run_mc(&cfg, &p, &wpt, &mc).unwrap();
        assert!(r.saturation_hits > 1900);
        assert!(r.warnings.iter().any(|w| w.contains("saturation")));
    }
}
