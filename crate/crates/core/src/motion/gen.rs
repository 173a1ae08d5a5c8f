use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MotionError, Polynomial, PriorityAssignment, Rational, Scenario, Trajectory};
use crate::kernel::check_general_position;

/// Random coordinates are multiples of `2^-GRID_BITS`.
const GRID_BITS: u32 = 20;
const PRIORITY_STREAM: u64 = 0x7072_696f;
const JITTER_STREAM: u64 = 0x6a69_7474;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionModel {
    Static,
    Linear,
    Quadratic,
}

impl fmt::Display for MotionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MotionModel::Static => "static",
            MotionModel::Linear => "linear",
            MotionModel::Quadratic => "quadratic",
        })
    }
}

impl FromStr for MotionModel {
    type Err = MotionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "static" => Ok(MotionModel::Static),
            "linear" => Ok(MotionModel::Linear),
            "quadratic" => Ok(MotionModel::Quadratic),
            other => Err(MotionError::UnsupportedModel(other.to_string())),
        }
    }
}

fn grid(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    let scale = 1i64 << GRID_BITS;
    super::rat(rng.random_range(lo * scale..=hi * scale), scale)
}

/// Deterministic random scenario: initial positions uniform in the unit
/// square, velocities uniform in `[-1,1]^2`, accelerations (quadratic model)
/// uniform in `[-1,1]^2`. Motions are expressed in absolute time, so the
/// position at `window.0` is the drawn initial position.
pub fn gen_random_scenario(
    n: usize,
    seed: u64,
    model: MotionModel,
    window: (Rational, Rational),
) -> Result<Scenario, MotionError> {
    if n < 2 {
        return Err(MotionError::TooFewPoints(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t0 = window.0.clone();
    let points = (0..n)
        .map(|_| {
            let x0 = grid(&mut rng, 0, 1);
            let y0 = grid(&mut rng, 0, 1);
            let (vx, vy, ax, ay) = match model {
                MotionModel::Static => Default::default(),
                MotionModel::Linear => (grid(&mut rng, -1, 1), grid(&mut rng, -1, 1), Default::default(), Default::default()),
                MotionModel::Quadratic => (
                    grid(&mut rng, -1, 1),
                    grid(&mut rng, -1, 1),
                    grid(&mut rng, -1, 1),
                    grid(&mut rng, -1, 1),
                ),
            };
            // p(t) = p0 + v (t - t0) + a (t - t0)^2
            let shift = |c0: Rational, c1: Rational, c2: Rational| {
                Polynomial::new(alloc::vec![c0, c1, c2]).compose_affine(&-t0.clone(), &super::int(1))
            };
            Trajectory::polynomial(window.0.clone(), window.1.clone(), shift(x0, vx, ax), shift(y0, vy, ay))
        })
        .collect();
    let label = format!("random n={} seed={} model={}", n, seed, model);
    let scenario = Scenario::new(points, window, seed, label)?;
    match check_general_position(&scenario, &scenario.window.0) {
        Ok(()) => Ok(scenario),
        Err(_) => perturb_scenario(&scenario, 8),
    }
}

/// Perturb mode: translates every trajectory by a deterministic seeded
/// jitter of magnitude below `1e-9` until the window start is in general
/// position.
pub fn perturb_scenario(scenario: &Scenario, attempts: usize) -> Result<Scenario, MotionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    rng.set_stream(JITTER_STREAM);
    let mut last = String::new();
    for _ in 0..attempts {
        // |k| / 2^40 < 1e-9 for |k| <= 1000.
        let denom = 1i64 << 40;
        let points: Vec<Trajectory> = scenario
            .points
            .iter()
            .map(|p| {
                let dx = super::rat(rng.random_range(-1000..=1000), denom);
                let dy = super::rat(rng.random_range(-1000..=1000), denom);
                p.translated(&dx, &dy)
            })
            .collect();
        let candidate = Scenario { points, ..scenario.clone() };
        match check_general_position(&candidate, &candidate.window.0) {
            Ok(()) => return Ok(candidate),
            Err(e) => last = e,
        }
    }
    Err(MotionError::Degenerate(last))
}

/// Seeded Fisher-Yates permutation of `1..=n`. The generator runs on its own
/// stream so that priorities stay independent of any scenario drawn from the
/// same seed value.
pub fn draw_priorities(n: usize, seed: u64) -> PriorityAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PRIORITY_STREAM);
    let mut ranks: Vec<u32> = (1..=n as u32).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        ranks.swap(i, j);
    }
    PriorityAssignment::from_ranks(ranks)
}
