//! Chebyshev chaotic chip generation.
//!
//! Chips follow the arcsine law with density `1 / (pi * sqrt(1 - x^2))` on
//! `(-1, 1)`. Every symbol starts from a fresh invariant-distributed initial
//! condition drawn as `cos(pi * u)`, so no long orbit is ever iterated in
//! floating point.
//!
//! The default map degree is 4. Lower degrees produce non-vanishing
//! fourth-order cross moments along a trajectory: for degree 2,
//! `E{x_k^2 x_{k+1} x_{k+2}} = 1/8`, and for degree 3, `E{x_k^3 x_{k+1}} = 1/8`.
//! From degree 4 upward the only surviving fourth-order cross moments are
//! `E{x_i^2 x_j^2} = 1/4`, exactly what an i.i.d. arcsine sequence gives.

use rand::Rng;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Slack accepted on `|x| <= 1` before an input is rejected.
pub const DOMAIN_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_DEGREE: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrajectoryMode {
    /// First chip invariant-distributed, the rest by iterating the map.
    #[default]
    PerSymbolTrajectory,
    /// Every chip drawn independently from the invariant law.
    IidInvariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChaosConfig {
    degree: u32,
    pub trajectory_mode: TrajectoryMode,
}

impl ChaosConfig {
    pub fn new(degree: u32, trajectory_mode: TrajectoryMode) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidDegree(degree));
        }
        Ok(Self {
            degree,
            trajectory_mode,
        })
    }

    pub fn iid() -> Self {
        Self {
            degree: DEFAULT_DEGREE,
            trajectory_mode: TrajectoryMode::IidInvariant,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

impl Default for ChaosConfig {
    fn default() -> Self {
        Self {
            degree: DEFAULT_DEGREE,
            trajectory_mode: TrajectoryMode::PerSymbolTrajectory,
        }
    }
}

/// Chaotic samples, each in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipSequence(Vec<f64>);

impl ChipSequence {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = samples.iter().find(|x| !(x.abs() <= 1.0)) {
            return Err(Error::ChaosDomain(bad));
        }
        Ok(Self(samples))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ChipSequence {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Information bit `d = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bit {
    Plus,
    Minus,
}

impl Bit {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Bit::Plus => 1.0,
            Bit::Minus => -1.0,
        }
    }
}

/// Chebyshev polynomial `T_n(x)` by the three-term recurrence.
#[inline]
fn chebyshev_poly(degree: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    let mut cur = x;
    for _ in 1..degree {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// One step of the Chebyshev map, `cos(degree * arccos(x))`.
///
/// Inputs may overshoot `[-1, 1]` by at most [`DOMAIN_TOLERANCE`]; anything
/// further out is rejected rather than clamped.
pub fn chebyshev_next(x: f64, degree: u32) -> Result<f64> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    if !(x.abs() <= 1.0 + DOMAIN_TOLERANCE) {
        return Err(Error::ChaosDomain(x));
    }
    Ok(step(x.clamp(-1.0, 1.0), degree))
}

#[inline]
fn step(x: f64, degree: u32) -> f64 {
    chebyshev_poly(degree, x).clamp(-1.0, 1.0)
}

/// Draws from the invariant (arcsine) law by the exact transform `cos(pi u)`.
#[inline]
pub fn sample_invariant<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    invariant_from_uniform(rng.random::<f64>())
}

#[inline]
pub fn invariant_from_uniform(u: f64) -> f64 {
    (PI * u).cos()
}

pub fn random_bit<R: Rng + ?Sized>(rng: &mut R) -> Bit {
    if rng.random::<bool>() {
        Bit::Plus
    } else {
        Bit::Minus
    }
}

/// Fills `out` with chips according to `config`.
pub fn fill_reference<R: Rng + ?Sized>(out: &mut [f64], config: &ChaosConfig, rng: &mut R) {
    match config.trajectory_mode {
        TrajectoryMode::IidInvariant => {
            for x in out.iter_mut() {
                *x = sample_invariant(rng);
            }
        }
        TrajectoryMode::PerSymbolTrajectory => {
            let Some((first, rest)) = out.split_first_mut() else {
                return;
            };
            let mut x = sample_invariant(rng);
            *first = x;
            for slot in rest {
                x = step(x, config.degree);
                *slot = x;
            }
        }
    }
}

/// Reference chips for one symbol.
pub fn generate_reference<R: Rng + ?Sized>(
    length: usize,
    config: &ChaosConfig,
    rng: &mut R,
) -> Result<ChipSequence> {
    if length == 0 {
        return Err(Error::Empty("reference length"));
    }
    let mut samples = vec![0.0; length];
    fill_reference(&mut samples, config, rng);
    Ok(ChipSequence(samples))
}

/// Trajectory of `length` chips from a given starting point.
pub fn trajectory_from(start: f64, length: usize, degree: u32) -> Result<ChipSequence> {
    if length == 0 {
        return Err(Error::Empty("trajectory length"));
    }
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    if !(start.abs() <= 1.0 + DOMAIN_TOLERANCE) {
        return Err(Error::ChaosDomain(start));
    }
    let mut x = start.clamp(-1.0, 1.0);
    let mut samples = Vec::with_capacity(length);
    samples.push(x);
    for _ in 1..length {
        x = step(x, degree);
        samples.push(x);
    }
    Ok(ChipSequence(samples))
}
