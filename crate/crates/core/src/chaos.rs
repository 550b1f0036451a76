//! Chebyshev chaotic sequences and their arcsine invariant law.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{argument, domain, Result};

pub const DEFAULT_DEGREE: u32 = 2;
pub const BURN_IN_ITERATIONS: usize = 64;

/// Evaluates the degree-`degree` Chebyshev polynomial, which equals
/// cos(degree · arccos x) on [−1, 1].
fn chebyshev(degree: u32, x: f64) -> f64 {
    if degree == 2 {
        return 2.0 * x * x - 1.0;
    }
    let (mut prev, mut cur) = (1.0, x);
    for _ in 1..degree {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur.clamp(-1.0, 1.0)
}

/// Chebyshev map x_{k+1} = cos(ξ arccos x_k) with its current state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosGenerator {
    degree: u32,
    state: f64,
}

impl ChaosGenerator {
    pub fn new(degree: u32, state: f64) -> Result<Self> {
        if degree < 2 {
            return Err(argument(format!("Chebyshev degree must be >= 2, got {degree}")));
        }
        if state.is_nan() || state.abs() > 1.0 {
            return Err(domain(format!("chaotic state must lie in [-1, 1], got {state}")));
        }
        Ok(Self { degree, state })
    }

    /// Starts the map from a draw of its invariant law, so the orbit is
    /// stationary from the first chip.
    pub fn from_invariant<R: Rng + ?Sized>(degree: u32, rng: &mut R) -> Result<Self> {
        Self::new(degree, sample_invariant(rng))
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn state(&self) -> f64 {
        self.state
    }

    /// True when the current state maps onto itself.
    pub fn is_fixed_point(&self) -> bool {
        chebyshev(self.degree, self.state) == self.state
    }

    /// Advances the map once and returns the new chip.
    pub fn chebyshev_next(&mut self) -> Result<f64> {
        if self.state.is_nan() || self.state.abs() > 1.0 {
            return Err(domain(format!("chaotic state must lie in [-1, 1], got {}", self.state)));
        }
        self.state = chebyshev(self.degree, self.state);
        Ok(self.state)
    }

    /// Advances the state without the range check; the constructor and the
    /// clamped map keep it inside [−1, 1].
    pub(crate) fn step(&mut self) -> f64 {
        self.state = chebyshev(self.degree, self.state);
        self.state
    }

    /// Discards [`BURN_IN_ITERATIONS`] iterates.
    pub fn burn_in(&mut self) {
        for _ in 0..BURN_IN_ITERATIONS {
            self.step();
        }
    }

    /// Returns `count` successive iterates.
    ///
    /// A fixed-point start still yields a sequence, but a warning is logged
    /// because the orbit carries no chaos.
    pub fn generate_chips(&mut self, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(argument("chip count must be >= 1"));
        }
        if self.is_fixed_point() {
            log::warn!(
                "Chebyshev map of degree {} started on fixed point {}; orbit is constant",
                self.degree,
                self.state
            );
        }
        Ok((0..count).map(|_| self.step()).collect())
    }
}

/// Draws x = cos(πU), U ~ Uniform(0, 1): the arcsine density 1/(π√(1−x²)).
pub fn sample_invariant<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (PI * rng.random::<f64>()).cos()
}
