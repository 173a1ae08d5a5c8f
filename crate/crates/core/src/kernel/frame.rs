use alloc::vec::Vec;
use core::cell::{Cell, OnceCell};
use core::cmp::Ordering;

use num_traits::ToPrimitive;

use super::{EventTime, Side, Sign, Vertex};
use crate::motion::{MotionError, Piece, Polynomial, Rational, Scenario};

/// Exact orientation of three rational points: `Pos` iff `c` lies left of
/// the directed line `ab`.
pub fn orient_points(a: (&Rational, &Rational), b: (&Rational, &Rational), c: (&Rational, &Rational)) -> Sign {
    let f = |r: &Rational| r.to_f64().filter(|v| v.is_finite());
    if let (Some(ax), Some(ay), Some(bx), Some(by), Some(cx), Some(cy)) = (f(a.0), f(a.1), f(b.0), f(b.1), f(c.0), f(c.1)) {
        let m = [ax, ay, bx, by, cx, cy].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m < 1e100 {
            let err = m * f64::EPSILON + 1e-300;
            if let Some(s) = filtered_orient(&[(ax, ay), (bx, by), (cx, cy)], err, 0, 1, 2) {
                return s;
            }
        }
    }
    let det = (b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1);
    Sign::of(&det)
}

/// How an orientation query with sentinels reduces to coordinate tests.
pub(crate) enum Plan {
    Real(u32, u32, u32),
    /// Sentinel first, then two real points (a cyclic rotation of the query).
    One(Vertex, u32, u32),
    Const(Sign),
}

pub(crate) fn plan(a: Vertex, b: Vertex, c: Vertex) -> Plan {
    use Vertex::*;
    match (a, b, c) {
        (Pt(a), Pt(b), Pt(c)) => Plan::Real(a, b, c),
        (s, Pt(b), Pt(c)) => Plan::One(s, b, c),
        (Pt(a), s, Pt(c)) => Plan::One(s, c, a),
        (Pt(a), Pt(b), s) => Plan::One(s, a, b),
        (NegInf, PosInf, Pt(_)) | (PosInf, Pt(_), NegInf) | (Pt(_), NegInf, PosInf) => Plan::Const(Sign::Pos),
        (PosInf, NegInf, Pt(_)) | (NegInf, Pt(_), PosInf) | (Pt(_), PosInf, NegInf) => Plan::Const(Sign::Neg),
        _ => Plan::Const(Sign::Zero),
    }
}

/// Sign of the y-tiebreak term for a query whose sentinel is `s`:
/// `orient(s, b, c)` is decided by `x_b - x_c` first, then by this factor
/// times `y_b - y_c`.
pub(crate) fn y_factor(s: Vertex, side: Side) -> Sign {
    let base = if s == Vertex::NegInf { Sign::Neg } else { Sign::Pos };
    if side == Side::Lower {
        -base
    } else {
        base
    }
}

fn times(a: Sign, b: Sign) -> Sign {
    match (a, b) {
        (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
        (x, y) if x == y => Sign::Pos,
        _ => Sign::Neg,
    }
}

/// Point positions at one instant, with exact predicates.
pub trait Frame {
    /// Sign of `x_b - x_c`.
    fn cmp_x(&self, b: u32, c: u32) -> Sign;
    /// Sign of `y_b - y_c`, in unreflected coordinates.
    fn cmp_y(&self, b: u32, c: u32) -> Sign;
    /// Orientation of three real points in unreflected coordinates.
    fn orient_real(&self, a: u32, b: u32, c: u32) -> Sign;
    fn counter(&self) -> &Cell<u64>;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn comparisons(&self) -> u64 {
        self.counter().get()
    }

    fn orient(&self, a: Vertex, b: Vertex, c: Vertex, side: Side) -> Sign {
        self.counter().set(self.counter().get() + 1);
        match plan(a, b, c) {
            Plan::Real(a, b, c) => {
                let s = self.orient_real(a, b, c);
                if side == Side::Lower {
                    -s
                } else {
                    s
                }
            }
            Plan::One(s, b, c) => match self.cmp_x(b, c) {
                Sign::Zero => times(y_factor(s, side), self.cmp_y(b, c)),
                sx => sx,
            },
            Plan::Const(s) => s,
        }
    }

    /// Strict left-to-right order: x, then y, then id.
    fn x_before(&self, a: Vertex, b: Vertex) -> bool {
        self.counter().set(self.counter().get() + 1);
        match (a, b) {
            (Vertex::Pt(a), Vertex::Pt(b)) => match self.cmp_x(a, b) {
                Sign::Neg => true,
                Sign::Pos => false,
                Sign::Zero => match self.cmp_y(a, b) {
                    Sign::Neg => true,
                    Sign::Pos => false,
                    Sign::Zero => a < b,
                },
            },
            _ => a < b,
        }
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, k| acc * t + k)
}

fn magnitude(c: &[f64], t: f64) -> f64 {
    let at = t.abs().max(1.0);
    c.iter().rev().fold(0.0, |acc, k| acc * at + k.abs())
}

/// Bound on `|p'|` near `t`, used to absorb time approximation error.
fn speed(c: &[f64], t: f64) -> f64 {
    let at = t.abs().max(1.0) + 1.0;
    c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, v)| acc * at + k as f64 * v.abs())
}

fn filtered_orient(p: &[(f64, f64)], err: f64, a: u32, b: u32, c: u32) -> Option<Sign> {
    let (ax, ay) = p[a as usize];
    let (bx, by) = p[b as usize];
    let (cx, cy) = p[c as usize];
    let (dx1, dy1, dx2, dy2) = (bx - ax, by - ay, cx - ax, cy - ay);
    let det = dx1 * dy2 - dx2 * dy1;
    let e = 2.0 * err;
    let bound = 2.0 * (e * (dx1.abs() + dy1.abs() + dx2.abs() + dy2.abs()) + 2.0 * e * e)
        + 1e-14 * ((dx1 * dy2).abs() + (dx2 * dy1).abs());
    if det > bound {
        Some(Sign::Pos)
    } else if det < -bound {
        Some(Sign::Neg)
    } else {
        None
    }
}

fn filtered_diff(v: f64, w: f64, err: f64) -> Option<Sign> {
    let d = v - w;
    let bound = 4.0 * err + 1e-15 * (v.abs() + w.abs());
    if d > bound {
        Some(Sign::Pos)
    } else if d < -bound {
        Some(Sign::Neg)
    } else {
        None
    }
}

/// Positions at a rational instant.
pub struct StaticFrame<'a> {
    scenario: &'a Scenario,
    t: Rational,
    approx: Vec<(f64, f64)>,
    exact: Vec<OnceCell<(Rational, Rational)>>,
    err: f64,
    count: Cell<u64>,
}

impl<'a> StaticFrame<'a> {
    pub fn new(scenario: &'a Scenario, t: Rational) -> Result<Self, MotionError> {
        let tf = t.to_f64().unwrap_or(f64::NAN);
        let mut approx = Vec::with_capacity(scenario.len());
        let mut mag: f64 = 0.0;
        for p in &scenario.points {
            let piece = p.piece_at(&t)?;
            mag = mag.max(magnitude(piece.approx_x(), tf)).max(magnitude(piece.approx_y(), tf));
            approx.push((horner(piece.approx_x(), tf), horner(piece.approx_y(), tf)));
        }
        let exact = (0..scenario.len()).map(|_| OnceCell::new()).collect();
        Ok(StaticFrame { scenario, t, approx, exact, err: 1e-13 * (1.0 + mag), count: Cell::new(0) })
    }

    pub fn time(&self) -> &Rational {
        &self.t
    }

    pub fn position(&self, p: u32) -> &(Rational, Rational) {
        self.exact[p as usize].get_or_init(|| {
            self.scenario.points[p as usize].eval(&self.t).expect("time checked at construction")
        })
    }

    pub fn approx_position(&self, p: u32) -> (f64, f64) {
        self.approx[p as usize]
    }

    pub fn cmp_x_exact(&self, a: u32, b: u32) -> Ordering {
        match self.cmp_x(a, b) {
            Sign::Neg => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Pos => Ordering::Greater,
        }
    }
}

impl Frame for StaticFrame<'_> {
    fn cmp_x(&self, b: u32, c: u32) -> Sign {
        filtered_diff(self.approx[b as usize].0, self.approx[c as usize].0, self.err)
            .unwrap_or_else(|| Sign::of(&(&self.position(b).0 - &self.position(c).0)))
    }

    fn cmp_y(&self, b: u32, c: u32) -> Sign {
        filtered_diff(self.approx[b as usize].1, self.approx[c as usize].1, self.err)
            .unwrap_or_else(|| Sign::of(&(&self.position(b).1 - &self.position(c).1)))
    }

    fn orient_real(&self, a: u32, b: u32, c: u32) -> Sign {
        filtered_orient(&self.approx, self.err, a, b, c).unwrap_or_else(|| {
            let (pa, pb, pc) = (self.position(a), self.position(b), self.position(c));
            orient_points((&pa.0, &pa.1), (&pb.0, &pb.1), (&pc.0, &pc.1))
        })
    }

    fn counter(&self) -> &Cell<u64> {
        &self.count
    }

    fn len(&self) -> usize {
        self.scenario.len()
    }
}

/// Positions on an open interval immediately after an event time `t0`.
/// Predicates report the sign that holds on `(t0, t0 + eps)`.
pub struct AfterFrame<'a> {
    scenario: &'a Scenario,
    t: EventTime,
    approx: Vec<(f64, f64)>,
    err: f64,
    count: Cell<u64>,
}

impl<'a> AfterFrame<'a> {
    pub fn new(scenario: &'a Scenario, t: EventTime) -> Self {
        let tf = t.approx();
        let lo = t.lo().to_f64().unwrap_or(f64::NAN);
        let hi = t.hi().to_f64().unwrap_or(f64::NAN);
        let dt = (hi - lo).abs().max((tf - lo).abs()).max((hi - tf).abs()) + 1e-15 * tf.abs().max(1.0);
        let mut approx = Vec::with_capacity(scenario.len());
        let mut mag: f64 = 0.0;
        let mut spd: f64 = 0.0;
        for p in &scenario.points {
            let piece = p.piece_after(&t);
            mag = mag.max(magnitude(piece.approx_x(), tf)).max(magnitude(piece.approx_y(), tf));
            spd = spd.max(speed(piece.approx_x(), tf)).max(speed(piece.approx_y(), tf));
            approx.push((horner(piece.approx_x(), tf), horner(piece.approx_y(), tf)));
        }
        let err = 1e-13 * (1.0 + mag) + 2.0 * spd * dt;
        AfterFrame { scenario, t, approx, err, count: Cell::new(0) }
    }

    pub fn time(&self) -> &EventTime {
        &self.t
    }

    pub fn approx_position(&self, p: u32) -> (f64, f64) {
        self.approx[p as usize]
    }

    fn piece(&self, p: u32) -> &Piece {
        self.scenario.points[p as usize].piece_after(&self.t)
    }

    pub fn cmp_x_exact(&self, a: u32, b: u32) -> Ordering {
        match self.cmp_x(a, b) {
            Sign::Neg => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Pos => Ordering::Greater,
        }
    }
}

/// Orientation determinant of three pieces as a polynomial in time.
pub(crate) fn det_poly(a: &Piece, b: &Piece, c: &Piece) -> Polynomial {
    let dx1 = b.x.sub(&a.x);
    let dy1 = b.y.sub(&a.y);
    let dx2 = c.x.sub(&a.x);
    let dy2 = c.y.sub(&a.y);
    dx1.mul(&dy2).sub(&dx2.mul(&dy1))
}

impl Frame for AfterFrame<'_> {
    fn cmp_x(&self, b: u32, c: u32) -> Sign {
        filtered_diff(self.approx[b as usize].0, self.approx[c as usize].0, self.err)
            .unwrap_or_else(|| self.t.sign_after(&self.piece(b).x.sub(&self.piece(c).x)))
    }

    fn cmp_y(&self, b: u32, c: u32) -> Sign {
        filtered_diff(self.approx[b as usize].1, self.approx[c as usize].1, self.err)
            .unwrap_or_else(|| self.t.sign_after(&self.piece(b).y.sub(&self.piece(c).y)))
    }

    fn orient_real(&self, a: u32, b: u32, c: u32) -> Sign {
        filtered_orient(&self.approx, self.err, a, b, c)
            .unwrap_or_else(|| self.t.sign_after(&det_poly(self.piece(a), self.piece(b), self.piece(c))))
    }

    fn counter(&self) -> &Cell<u64> {
        &self.count
    }

    fn len(&self) -> usize {
        self.scenario.len()
    }
}
