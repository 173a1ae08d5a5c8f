use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::frame::{det_poly, plan, y_factor, Plan};
use super::{isolate_roots, EventTime, Frame, KernelError, Side, Sign, Vertex};
use crate::motion::{Piece, Polynomial, Rational, Scenario, Trajectory};

/// A predicate over at most three points whose truth, together with the
/// other predicates of its certificate, certifies part of the structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// `x(a) < x(b)`.
    XBefore(u32, u32),
    /// `orient(a, b, c)` on `side` equals `expect`.
    Orient { a: Vertex, b: Vertex, c: Vertex, side: Side, expect: Sign },
}

impl Condition {
    pub fn below(a: Vertex, b: Vertex, c: Vertex, side: Side) -> Self {
        Condition::Orient { a, b, c, side, expect: Sign::Neg }
    }

    pub fn points(&self) -> impl Iterator<Item = u32> {
        let vs = match *self {
            Condition::XBefore(a, b) => [Vertex::Pt(a), Vertex::Pt(b), Vertex::NegInf],
            Condition::Orient { a, b, c, .. } => [a, b, c],
        };
        vs.into_iter().filter_map(Vertex::id)
    }

    pub fn holds<F: Frame + ?Sized>(&self, frame: &F) -> bool {
        match *self {
            Condition::XBefore(a, b) => frame.cmp_x(a, b) == Sign::Neg,
            Condition::Orient { a, b, c, side, expect } => frame.orient(a, b, c, side) == expect,
        }
    }
}

/// Polynomials in time whose lexicographic sign (first nonzero value)
/// is the sign the condition tests, paired with the sign it expects.
/// `None` for conditions that cannot change, such as an orientation with
/// both sentinels.
pub fn condition_polys<'p>(cond: &Condition, piece: impl Fn(u32) -> &'p Piece) -> Option<(Vec<Polynomial>, Sign)> {
    match *cond {
        Condition::XBefore(a, b) => Some((alloc::vec![piece(b).x.sub(&piece(a).x)], Sign::Pos)),
        Condition::Orient { a, b, c, side, expect } => match plan(a, b, c) {
            Plan::Real(a, b, c) => {
                let d = det_poly(piece(a), piece(b), piece(c));
                let d = if side == Side::Lower { d.neg() } else { d };
                Some((alloc::vec![d], expect))
            }
            Plan::One(s, b, c) => {
                let dx = piece(b).x.sub(&piece(c).x);
                let dy = piece(b).y.sub(&piece(c).y);
                let dy = if y_factor(s, side) == Sign::Neg { dy.neg() } else { dy };
                Some((alloc::vec![dx, dy], expect))
            }
            Plan::Const(_) => None,
        },
    }
}

fn lex_sign_after(polys: &[Polynomial], t: &EventTime) -> Sign {
    polys.iter().map(|p| t.sign_after(p)).find(|&s| s != Sign::Zero).unwrap_or(Sign::Zero)
}

/// First time after `now` and before `t_end` at which `cond`, assumed to
/// hold on an interval right after `now`, stops holding. Roots of even
/// multiplicity do not flip the sign and only count when `even_roots` is set.
pub fn next_failure(
    cond: &Condition,
    scenario: &Scenario,
    now: &EventTime,
    t_end: &Rational,
    even_roots: bool,
) -> Result<Option<EventTime>, KernelError> {
    if now.cmp_rational(t_end) != Ordering::Less {
        return Ok(None);
    }
    let ids: Vec<u32> = cond.points().collect();
    let mut cuts: Vec<Rational> = ids
        .iter()
        .flat_map(|&p| scenario.points[p as usize].breakpoints())
        .filter(|b| now.cmp_rational(b) == Ordering::Less && *b < t_end)
        .cloned()
        .collect();
    cuts.sort();
    cuts.dedup();
    let mut seg_start = now.lo().clone();
    for k in 0..=cuts.len() {
        let seg_end = cuts.get(k).unwrap_or(t_end).clone();
        let (polys, expect) = if k == 0 {
            match condition_polys(cond, |p| scenario.points[p as usize].piece_after(now)) {
                Some(x) => x,
                None => return Ok(None),
            }
        } else {
            let at = &seg_start;
            match condition_polys(cond, |p| scenario.points[p as usize].piece_at(at).expect("inside window")) {
                Some(x) => x,
                None => return Ok(None),
            }
        };
        let Some(top) = polys.iter().find(|p| !p.is_zero()) else {
            return Err(KernelError::DegenerateMotion(format!("{:?} holds identically", cond)));
        };
        if k > 0 {
            let b = EventTime::exact(seg_start.clone());
            if lex_sign_after(&polys, &b) != expect {
                return Ok(Some(b));
            }
        }
        for r in isolate_roots(top, &seg_start, &seg_end)? {
            let after_start = if k == 0 {
                compare_after(&r, now)
            } else {
                r.cmp_rational(&seg_start) == Ordering::Greater
            };
            if !after_start || r.cmp_rational(&seg_end) != Ordering::Less {
                continue;
            }
            if r.is_odd() || even_roots {
                return Ok(Some(r));
            }
        }
        seg_start = seg_end;
    }
    Ok(None)
}

fn compare_after(r: &EventTime, now: &EventTime) -> bool {
    super::compare_times(r, now) == Ordering::Greater
}

fn segment_roots(
    trajs: &[&Trajectory],
    window: &(Rational, Rational),
    what: &str,
    poly: impl Fn(&[&Piece]) -> Polynomial,
) -> Result<Vec<EventTime>, KernelError> {
    let mut cuts: Vec<Rational> = trajs
        .iter()
        .flat_map(|t| t.breakpoints())
        .filter(|b| *b > &window.0 && *b < &window.1)
        .cloned()
        .collect();
    cuts.sort();
    cuts.dedup();
    cuts.insert(0, window.0.clone());
    cuts.push(window.1.clone());
    let mut out: Vec<EventTime> = Vec::new();
    for w in cuts.windows(2) {
        let pieces: Vec<&Piece> = trajs.iter().map(|t| t.piece_at(&w[0])).collect::<Result<_, _>>()?;
        let p = poly(&pieces);
        if p.is_zero() {
            return Err(KernelError::DegenerateMotion(format!("{} on [{}, {}]", what, w[0], w[1])));
        }
        for r in isolate_roots(&p, &w[0], &w[1])? {
            if out.last().is_some_and(|l| l == &r) {
                continue;
            }
            out.push(r);
        }
    }
    Ok(out)
}

/// Times in `window` at which the three points are collinear.
pub fn collinearity_times(
    a: &Trajectory,
    b: &Trajectory,
    c: &Trajectory,
    window: &(Rational, Rational),
) -> Result<Vec<EventTime>, KernelError> {
    segment_roots(&[a, b, c], window, "persistent collinearity", |p| det_poly(p[0], p[1], p[2]))
}

/// Times in `window` at which the two points share an x-coordinate.
pub fn x_swap_times(a: &Trajectory, b: &Trajectory, window: &(Rational, Rational)) -> Result<Vec<EventTime>, KernelError> {
    segment_roots(&[a, b], window, "identical x-coordinates", |p| p[0].x.sub(&p[1].x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{AfterFrame, StaticFrame};
    use crate::motion::{int, rat, Piece};

    fn lin(x0: i64, vx: i64, y0: i64, vy: i64) -> Trajectory {
        Trajectory::polynomial(
            int(0),
            int(10),
            Polynomial::from_ints(&[x0, vx]),
            Polynomial::from_ints(&[y0, vy]),
        )
    }

    #[test]
    fn collinear_static_points_have_no_roots() {
        let w = (int(0), int(10));
        let r = collinearity_times(&lin(0, 0, 0, 0), &lin(1, 0, 0, 0), &lin(0, 0, 1, 0), &w).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn falling_point_crosses_line() {
        let w = (int(0), int(10));
        let r = collinearity_times(&lin(0, 0, 0, 0), &lin(1, 0, 0, 0), &lin(2, 0, 1, -1), &w).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].as_rational(), Some(&int(1)));
    }

    #[test]
    fn crossing_x_swap() {
        let w = (int(0), int(10));
        let r = x_swap_times(&lin(0, 1, 0, 0), &lin(1, -1, 5, 0), &w).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].as_rational(), Some(&rat(1, 2)));
        assert!(x_swap_times(&lin(0, 1, 0, 0), &lin(1, 1, 0, 0), &w).unwrap().is_empty());
    }

    #[test]
    fn identical_x_is_degenerate() {
        let w = (int(0), int(10));
        assert!(matches!(
            x_swap_times(&lin(0, 1, 0, 0), &lin(0, 1, 3, 0), &w),
            Err(KernelError::DegenerateMotion(_))
        ));
    }

    #[test]
    fn piecewise_roots_are_found_per_piece() {
        // x goes 0 -> 2 -> 0 over [0, 2]; the other point rests at x = 1.
        let a = Trajectory::new(alloc::vec![
            Piece::new(int(0), int(1), Polynomial::from_ints(&[0, 2]), Polynomial::zero()),
            Piece::new(int(1), int(2), Polynomial::from_ints(&[4, -2]), Polynomial::zero()),
        ])
        .unwrap();
        let b = Trajectory::constant(int(0), int(2), int(1), int(1));
        let r = x_swap_times(&a, &b, &(int(0), int(2))).unwrap();
        let got: Vec<_> = r.iter().map(|t| t.as_rational().cloned()).collect();
        assert_eq!(got, alloc::vec![Some(rat(1, 2)), Some(rat(3, 2))]);
    }

    #[test]
    fn failure_time_of_orientation() {
        let s = Scenario::new(
            alloc::vec![lin(0, 0, 0, 0), lin(1, 0, 0, 0), lin(2, 0, 1, -1)],
            (int(0), int(10)),
            0,
            "t".into(),
        )
        .unwrap();
        let now = EventTime::exact(int(0));
        let f = StaticFrame::new(&s, int(0)).unwrap();
        let expect = f.orient(Vertex::Pt(0), Vertex::Pt(1), Vertex::Pt(2), Side::Upper);
        assert_eq!(expect, Sign::Pos);
        let cond = Condition::Orient { a: Vertex::Pt(0), b: Vertex::Pt(1), c: Vertex::Pt(2), side: Side::Upper, expect };
        let t = next_failure(&cond, &s, &now, &int(10), false).unwrap().unwrap();
        assert_eq!(t.as_rational(), Some(&int(1)));
        // After the failure the opposite sign holds and never fails again.
        let g = AfterFrame::new(&s, t.clone());
        let flipped = Condition::Orient { a: Vertex::Pt(0), b: Vertex::Pt(1), c: Vertex::Pt(2), side: Side::Upper, expect: Sign::Neg };
        assert!(flipped.holds(&g));
        assert!(next_failure(&flipped, &s, &t, &int(10), false).unwrap().is_none());
        // Failures at or after the window end are dropped.
        assert!(next_failure(&cond, &s, &now, &int(1), false).unwrap().is_none());
    }

    #[test]
    fn tangential_touch_is_skipped_by_default() {
        // y(t) = (t - 1)^2 touches the x-axis through points 0 and 1.
        let c = Trajectory::polynomial(int(0), int(10), Polynomial::from_ints(&[2]), Polynomial::from_ints(&[1, -2, 1]));
        let s = Scenario::new(alloc::vec![lin(0, 0, 0, 0), lin(1, 0, 0, 0), c], (int(0), int(10)), 0, "t".into()).unwrap();
        let cond = Condition::Orient { a: Vertex::Pt(0), b: Vertex::Pt(1), c: Vertex::Pt(2), side: Side::Upper, expect: Sign::Pos };
        let now = EventTime::exact(int(0));
        assert!(next_failure(&cond, &s, &now, &int(10), false).unwrap().is_none());
        let t = next_failure(&cond, &s, &now, &int(10), true).unwrap().unwrap();
        assert_eq!(t.as_rational(), Some(&int(1)));
    }

    #[test]
    fn sentinel_conditions_follow_x_order() {
        let s = Scenario::new(alloc::vec![lin(0, 1, 0, 0), lin(1, -1, 5, 0)], (int(0), int(10)), 0, "t".into()).unwrap();
        // orient(-inf, 0, 1) is the sign of x0 - x1: negative until t = 1/2.
        let cond = Condition::Orient { a: Vertex::NegInf, b: Vertex::Pt(0), c: Vertex::Pt(1), side: Side::Upper, expect: Sign::Neg };
        let t = next_failure(&cond, &s, &EventTime::exact(int(0)), &int(10), false).unwrap().unwrap();
        assert_eq!(t.as_rational(), Some(&rat(1, 2)));
    }
}
