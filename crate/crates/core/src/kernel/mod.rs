//! Exact predicates over moving points, symbolic sentinels, root isolation
//! and algebraic event times.

mod cert;
mod frame;
mod time;

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::Neg;

pub use cert::{collinearity_times, condition_polys, next_failure, x_swap_times, Condition};
pub use frame::{orient_points, AfterFrame, Frame, StaticFrame};
pub use time::{compare_times, isolate_roots, EventTime};

use crate::motion::{MotionError, Rational, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of<T: PartialOrd + Default>(v: &T) -> Sign {
        let z = T::default();
        match v.partial_cmp(&z) {
            Some(Ordering::Less) => Sign::Neg,
            Some(Ordering::Greater) => Sign::Pos,
            _ => Sign::Zero,
        }
    }

    pub fn from_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Neg,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Pos,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }
}

/// Which hull the structure is built over. The lower structure is the upper
/// structure of the point set reflected in the x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Upper, Side::Lower];

    pub fn index(self) -> usize {
        match self {
            Side::Upper => 0,
            Side::Lower => 1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        })
    }
}

/// A point id or one of the two sentinels. Sentinels sit infinitely far to
/// the left (right) and infinitely far below everything, so every
/// non-vertical line passes above them. The derived order puts `NegInf`
/// before every point and `PosInf` after.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    NegInf,
    Pt(u32),
    PosInf,
}

impl Vertex {
    pub fn is_real(self) -> bool {
        matches!(self, Vertex::Pt(_))
    }

    pub fn id(self) -> Option<u32> {
        match self {
            Vertex::Pt(p) => Some(p),
            _ => None,
        }
    }

    /// Panics on a sentinel.
    pub fn pt(self) -> u32 {
        match self {
            Vertex::Pt(p) => p,
            other => panic!("expected a real point, found {:?}", other),
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::NegInf => f.write_str("-inf"),
            Vertex::PosInf => f.write_str("+inf"),
            Vertex::Pt(p) => write!(f, "{}", p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("root isolation on the zero polynomial")]
    ZeroPolynomial,
    #[error("degenerate motion: {0}")]
    DegenerateMotion(String),
    #[error(transparent)]
    Motion(#[from] MotionError),
}

/// Rejects configurations with two equal x-coordinates or three collinear
/// points at `t`. The triple test is cubic, so it only runs up to
/// [`COLLINEAR_CHECK_LIMIT`] points; larger inputs get the x test only.
pub fn check_general_position(scenario: &Scenario, t: &Rational) -> Result<(), String> {
    let frame = StaticFrame::new(scenario, t.clone()).map_err(|e| format!("{}", e))?;
    let n = scenario.len() as u32;
    let mut ids: alloc::vec::Vec<u32> = (0..n).collect();
    ids.sort_by(|&a, &b| frame.cmp_x_exact(a, b));
    for w in ids.windows(2) {
        if frame.cmp_x_exact(w[0], w[1]) == Ordering::Equal {
            return Err(format!("points {} and {} share an x-coordinate", w[0], w[1]));
        }
    }
    if scenario.len() <= COLLINEAR_CHECK_LIMIT {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if frame.orient_real(i, j, k) == Sign::Zero {
                        return Err(format!("points {}, {}, {} are collinear", i, j, k));
                    }
                }
            }
        }
    }
    Ok(())
}

pub const COLLINEAR_CHECK_LIMIT: usize = 400;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_order_puts_sentinels_outside() {
        assert!(Vertex::NegInf < Vertex::Pt(0));
        assert!(Vertex::Pt(7) < Vertex::PosInf);
        assert!(Vertex::Pt(1) < Vertex::Pt(2));
    }

    #[test]
    fn sign_negation() {
        assert_eq!(-Sign::Pos, Sign::Neg);
        assert_eq!(-Sign::Zero, Sign::Zero);
        assert_eq!(Sign::of(&-3i64), Sign::Neg);
    }
}
