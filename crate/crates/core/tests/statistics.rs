//! Sampling checks for the chaotic sources, the Nakagami sampler and the
//! two-ray fading draw.

use dcsk_wpt::channel::{draw_fade, ChannelParams, TwoRayFading};
use dcsk_wpt::chaos::{sample_invariant, ChaosGenerator};
use dcsk_wpt::specfun::{nakagami_moment, Nakagami, NakagamiSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use statrs::distribution::{ChiSquared, ContinuousCDF, Gamma as GammaLaw};

/// Sample mean and its standard error.
fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut mean, mut ss) = (0.0, 0.0, 0.0);
    for x in xs {
        n += 1.0;
        let d = x - mean;
        mean += d / n;
        ss += d * (x - mean);
    }
    (mean, (ss / (n - 1.0) / n).sqrt())
}

fn assert_within(label: &str, (mean, se): (f64, f64), want: f64, k: f64) {
    let z = (mean - want) / se;
    assert!(z.abs() <= k, "{label}: mean {mean}, want {want}, se {se}, z {z}");
}

/// ∫ xⁿ /(π√(1−x²)) dx by the midpoint rule after x = cos θ.
fn arcsine_moment_quadrature(n: i32) -> f64 {
    let steps = 20_000;
    let h = std::f64::consts::PI / steps as f64;
    (0..steps)
        .map(|i| ((i as f64 + 0.5) * h).cos().powi(n))
        .sum::<f64>()
        * h
        / std::f64::consts::PI
}

#[test]
fn quadrature_oracle_for_arcsine_moments() {
    assert!(arcsine_moment_quadrature(1).abs() < 1e-12);
    assert!((arcsine_moment_quadrature(2) - 0.5).abs() < 1e-12);
    assert!((arcsine_moment_quadrature(4) - 0.375).abs() < 1e-12);
}

#[test]
fn invariant_sampler_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let xs: Vec<f64> = (0..1_000_000).map(|_| sample_invariant(&mut rng)).collect();
    for (order, want) in [(1, 0.0), (2, arcsine_moment_quadrature(2)), (3, 0.0), (4, arcsine_moment_quadrature(4))] {
        assert_within(&format!("E x^{order}"), mean_se(xs.iter().map(|x| x.powi(order))), want, 5.0);
    }
}

fn orbit(x0: f64, n: usize) -> Vec<f64> {
    ChaosGenerator::new(2, x0).unwrap().generate_chips(n).unwrap()
}

#[test]
fn map_orbit_moments_and_autocorrelation() {
    let xs = orbit(0.3, 1_000_000);
    assert!(xs.iter().all(|x| x.abs() <= 1.0));
    for (order, want) in [(1, 0.0), (2, 0.5), (3, 0.0), (4, 0.375)] {
        assert_within(&format!("orbit E x^{order}"), mean_se(xs.iter().map(|x| x.powi(order))), want, 5.0);
    }
    for lag in 1..=5 {
        let prods = xs.iter().zip(&xs[lag..]).map(|(a, b)| a * b);
        assert_within(&format!("lag {lag}"), mean_se(prods), 0.0, 5.0);
    }
}

#[test]
fn map_orbit_histogram_follows_arcsine_law() {
    let xs = orbit(0.3, 1_000_000);
    let bins = 10;
    // equiprobable bins under the arcsine law: edges cos(π(1 − j/bins))
    let edges: Vec<f64> = (0..=bins)
        .map(|j| (std::f64::consts::PI * (1.0 - j as f64 / bins as f64)).cos())
        .collect();
    let mut counts = vec![0u64; bins];
    for &x in &xs {
        let j = edges[1..bins].partition_point(|&e| e <= x);
        counts[j] += 1;
    }
    let expected = xs.len() as f64 / bins as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(1.0 - 1e-3);
    assert!(stat < critical, "chi-square {stat} >= {critical}");
}

#[test]
fn nakagami_sample_moments() {
    let spec = NakagamiSpec::new(4.0, 0.75).unwrap();
    let d = Nakagami::new(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let xs: Vec<f64> = (0..1_000_000).map(|_| d.sample(&mut rng)).collect();
    for n in [1, 2, 3, 4] {
        let want = nakagami_moment(spec, n);
        assert_within(&format!("E a^{n}"), mean_se(xs.iter().map(|x| x.powi(n as i32))), want, 5.0);
    }
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[test]
fn nakagami_power_passes_kolmogorov_smirnov() {
    let n = 100_000;
    // asymptotic critical value at significance 1e-3
    let critical = ((2.0f64 / 1e-3).ln() / 2.0).sqrt() / (n as f64).sqrt();
    for (m, omega, seed) in [(4.0, 0.75, 1), (1.0, 1.0, 2), (0.7, 0.25, 3), (12.5, 0.5, 4)] {
        let d = Nakagami::new(NakagamiSpec::new(m, omega).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let powers: Vec<f64> = (0..n).map(|_| d.sample(&mut rng).powi(2)).collect();
        let law = GammaLaw::new(m, m / omega).unwrap(); // shape, rate
        let stat = ks_statistic(powers, |x| law.cdf(x));
        assert!(stat < critical, "m={m}: KS {stat} >= {critical}");
    }
}

#[test]
fn two_ray_fade_moments() {
    let p = ChannelParams::new(4.0, 0.75, 0.25, 3).unwrap();
    let fading = TwoRayFading::new(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let fades: Vec<_> = (0..1_000_000).map(|_| fading.draw(&mut rng)).collect();
    let m1 = nakagami_moment(NakagamiSpec::new(4.0, 0.75).unwrap(), 1);
    let m2 = nakagami_moment(NakagamiSpec::new(4.0, 0.25).unwrap(), 1);
    assert_within("E a1 a2", mean_se(fades.iter().map(|f| f.alpha1 * f.alpha2)), m1 * m2, 5.0);
    assert_within("E a1^2", mean_se(fades.iter().map(|f| f.alpha1 * f.alpha1)), 0.75, 5.0);
    assert_within("E a2^2", mean_se(fades.iter().map(|f| f.alpha2 * f.alpha2)), 0.25, 5.0);
}

#[test]
fn ray_energy_split_follows_power_profile() {
    use dcsk_wpt::waveform::{build_frame, delayed_view, WaveformKind, WaveformSpec};
    let p = ChannelParams::new(2.0, 0.75, 0.25, 2).unwrap();
    let spec = WaveformSpec::new(6, WaveformKind::WptOptimal).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (mut direct, mut delayed) = (0.0, 0.0);
    for _ in 0..200_000 {
        let fade = draw_fade(&p, &mut rng);
        let mut g = ChaosGenerator::new(2, sample_invariant(&mut rng)).unwrap();
        let f = build_frame(&spec, &[1, -1], &mut g).unwrap();
        let e1: f64 = f.symbol(1).unwrap().iter().map(|s| (fade.alpha1 * s).powi(2)).sum();
        let e2: f64 = delayed_view(&f, 2, 1).unwrap().iter().map(|s| (fade.alpha2 * s).powi(2)).sum();
        direct += e1;
        delayed += e2;
    }
    let ratio = direct / delayed;
    assert!((ratio / 3.0 - 1.0).abs() < 0.02, "energy ratio {ratio}");
}
