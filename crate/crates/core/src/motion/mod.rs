//! Point trajectories, scenarios and random priorities.

mod gen;
mod poly;

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use gen::{draw_priorities, gen_random_scenario, perturb_scenario, MotionModel};
pub use poly::Polynomial;
pub(crate) use poly::rational_sqrt;

use crate::kernel::EventTime;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MotionError {
    #[error("time {0} lies outside the trajectory domain")]
    OutOfRange(String),
    #[error("trajectory has no pieces")]
    Empty,
    #[error("piece {0} has an empty or reversed interval")]
    BadInterval(usize),
    #[error("pieces {0} and {1} are not contiguous")]
    Gap(usize, usize),
    #[error("trajectory jumps at breakpoint {0}")]
    Discontinuous(String),
    #[error("piece degree {found} exceeds the configured maximum {max}")]
    DegreeTooHigh { found: usize, max: usize },
    #[error("a scenario needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("trajectory {0} does not cover the scenario window")]
    WindowNotCovered(usize),
    #[error("degenerate configuration at the window start: {0}")]
    Degenerate(String),
    #[error("unsupported motion model {0}")]
    UnsupportedModel(String),
}

/// One polynomial piece of a trajectory, valid on `[start, end]`.
#[derive(Clone)]
pub struct Piece {
    pub start: Rational,
    pub end: Rational,
    pub x: Polynomial,
    pub y: Polynomial,
    approx_x: Vec<f64>,
    approx_y: Vec<f64>,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.start == other.start && self.end == other.end && self.x == other.x && self.y == other.y
    }
}

impl Eq for Piece {}

impl core::fmt::Debug for Piece {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "[{}, {}]: x = {:?}, y = {:?}", self.start, self.end, self.x, self.y)
    }
}

impl Piece {
    pub fn new(start: Rational, end: Rational, x: Polynomial, y: Polynomial) -> Self {
        let approx_x = x.approx_coeffs();
        let approx_y = y.approx_coeffs();
        Piece { start, end, x, y, approx_x, approx_y }
    }

    pub fn approx_x(&self) -> &[f64] {
        &self.approx_x
    }

    pub fn approx_y(&self) -> &[f64] {
        &self.approx_y
    }

    pub fn degree(&self) -> usize {
        self.x.degree().max(self.y.degree())
    }
}

/// Piecewise-polynomial motion of a single point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pieces: Vec<Piece>,
}

impl Trajectory {
    pub fn new(pieces: Vec<Piece>) -> Result<Self, MotionError> {
        if pieces.is_empty() {
            return Err(MotionError::Empty);
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.start >= p.end {
                return Err(MotionError::BadInterval(i));
            }
        }
        for i in 1..pieces.len() {
            let (a, b) = (&pieces[i - 1], &pieces[i]);
            if a.end != b.start {
                return Err(MotionError::Gap(i - 1, i));
            }
            if a.x.eval(&a.end) != b.x.eval(&b.start) || a.y.eval(&a.end) != b.y.eval(&b.start) {
                return Err(MotionError::Discontinuous(alloc::format!("{}", a.end)));
            }
        }
        Ok(Trajectory { pieces })
    }

    /// Single-piece trajectory.
    pub fn polynomial(start: Rational, end: Rational, x: Polynomial, y: Polynomial) -> Self {
        Trajectory { pieces: alloc::vec![Piece::new(start, end, x, y)] }
    }

    pub fn constant(start: Rational, end: Rational, x: Rational, y: Rational) -> Self {
        Self::polynomial(start, end, Polynomial::constant(x), Polynomial::constant(y))
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn start(&self) -> &Rational {
        &self.pieces[0].start
    }

    pub fn end(&self) -> &Rational {
        &self.pieces[self.pieces.len() - 1].end
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(Piece::degree).max().unwrap_or(0)
    }

    /// Piece used at time `t`: the one with `start <= t < end`, or the last
    /// piece at the very end of the domain.
    pub fn piece_at(&self, t: &Rational) -> Result<&Piece, MotionError> {
        if t < self.start() || t > self.end() {
            return Err(MotionError::OutOfRange(alloc::format!("{}", t)));
        }
        let idx = self.pieces.partition_point(|p| &p.end <= t);
        Ok(&self.pieces[idx.min(self.pieces.len() - 1)])
    }

    /// Piece governing the motion immediately after `t`.
    pub fn piece_after(&self, t: &EventTime) -> &Piece {
        let idx = self
            .pieces
            .partition_point(|p| t.cmp_rational(&p.end) != Ordering::Less);
        &self.pieces[idx.min(self.pieces.len() - 1)]
    }

    pub fn eval(&self, t: &Rational) -> Result<(Rational, Rational), MotionError> {
        let p = self.piece_at(t)?;
        Ok((p.x.eval(t), p.y.eval(t)))
    }

    /// Breakpoints strictly inside the domain.
    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.pieces.iter().skip(1).map(|p| &p.start)
    }

    /// Adds a constant offset to every piece.
    pub fn translated(&self, dx: &Rational, dy: &Rational) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                Piece::new(
                    p.start.clone(),
                    p.end.clone(),
                    p.x.add(&Polynomial::constant(dx.clone())),
                    p.y.add(&Polynomial::constant(dy.clone())),
                )
            })
            .collect();
        Trajectory { pieces }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub points: Vec<Trajectory>,
    pub window: (Rational, Rational),
    pub seed: u64,
    pub label: String,
}

impl Scenario {
    pub fn new(
        points: Vec<Trajectory>,
        window: (Rational, Rational),
        seed: u64,
        label: String,
    ) -> Result<Self, MotionError> {
        if points.len() < 2 {
            return Err(MotionError::TooFewPoints(points.len()));
        }
        if window.0 >= window.1 {
            return Err(MotionError::BadInterval(0));
        }
        for (i, p) in points.iter().enumerate() {
            if p.start() > &window.0 || p.end() < &window.1 {
                return Err(MotionError::WindowNotCovered(i));
            }
        }
        Ok(Scenario { points, window, seed, label })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions_at(&self, t: &Rational) -> Result<Vec<(Rational, Rational)>, MotionError> {
        self.points.iter().map(|p| p.eval(t)).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.points.iter().map(Trajectory::max_degree).max().unwrap_or(0)
    }

    pub fn check_max_degree(&self, max: usize) -> Result<(), MotionError> {
        let found = self.max_degree();
        if found > max {
            Err(MotionError::DegreeTooHigh { found, max })
        } else {
            Ok(())
        }
    }
}

/// Random ranks `1..=n` of the points; the sentinels at minus and plus
/// infinity carry the reserved ranks -1 and 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityAssignment {
    rank: Vec<u32>,
}

impl PriorityAssignment {
    /// Panics unless `rank` is a permutation of `1..=n`.
    pub fn from_ranks(rank: Vec<u32>) -> Self {
        let mut seen = alloc::vec![false; rank.len()];
        for &r in &rank {
            assert!(r >= 1 && (r as usize) <= rank.len(), "rank {} out of range", r);
            assert!(!seen[r as usize - 1], "rank {} repeated", r);
            seen[r as usize - 1] = true;
        }
        PriorityAssignment { rank }
    }

    /// Ranks given by point order: point `i` gets rank `i + 1`.
    pub fn identity(n: usize) -> Self {
        PriorityAssignment { rank: (1..=n as u32).collect() }
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, p: u32) -> u32 {
        self.rank[p as usize]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    pub fn priority(&self, v: crate::kernel::Vertex) -> i64 {
        use crate::kernel::Vertex;
        match v {
            Vertex::NegInf => -1,
            Vertex::PosInf => 0,
            Vertex::Pt(p) => self.rank[p as usize] as i64,
        }
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = alloc::vec![false; self.rank.len()];
        self.rank.iter().all(|&r| {
            let ok = r >= 1 && (r as usize) <= seen.len() && !seen[r as usize - 1];
            if ok {
                seen[r as usize - 1] = true;
            }
            ok
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_constant_and_linear() {
        let c = Trajectory::constant(int(0), int(10), int(3), int(4));
        assert_eq!(c.eval(&rat(7, 3)).unwrap(), (int(3), int(4)));
        let l = Trajectory::polynomial(
            int(0),
            int(10),
            Polynomial::from_ints(&[0, 1]),
            Polynomial::zero(),
        );
        assert_eq!(l.eval(&int(2)).unwrap(), (int(2), int(0)));
    }

    #[test]
    fn eval_second_piece() {
        let t = Trajectory::new(alloc::vec![
            Piece::new(int(0), int(1), Polynomial::from_ints(&[0, 1]), Polynomial::zero()),
            Piece::new(int(1), int(2), Polynomial::from_ints(&[2, -1]), Polynomial::zero()),
        ])
        .unwrap();
        assert_eq!(t.eval(&rat(3, 2)).unwrap().0, rat(1, 2));
        assert_eq!(t.eval(&int(1)).unwrap().0, int(1));
        assert!(matches!(t.eval(&int(3)), Err(MotionError::OutOfRange(_))));
    }

    #[test]
    fn discontinuous_pieces_rejected() {
        let r = Trajectory::new(alloc::vec![
            Piece::new(int(0), int(1), Polynomial::from_ints(&[0, 1]), Polynomial::zero()),
            Piece::new(int(1), int(2), Polynomial::from_ints(&[5]), Polynomial::zero()),
        ]);
        assert!(matches!(r, Err(MotionError::Discontinuous(_))));
    }

    #[test]
    fn sentinel_priorities() {
        use crate::kernel::Vertex;
        let p = PriorityAssignment::identity(3);
        assert_eq!(p.priority(Vertex::NegInf), -1);
        assert_eq!(p.priority(Vertex::PosInf), 0);
        assert_eq!(p.priority(Vertex::Pt(2)), 3);
        assert!(p.is_bijection());
    }
}
