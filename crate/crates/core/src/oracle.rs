//! Brute-force reference: the static triangulation at one instant computed
//! by direct recursion on the sorted point set with explicit hulls and
//! visibility scans, a validity checker, and the set of all times at which
//! the combinatorics can change.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write;

use num_traits::Zero;

use crate::kernel::{
    collinearity_times, compare_times, orient_points, x_swap_times, EventTime, Frame, KernelError, Side, Sign,
    StaticFrame, Vertex,
};
use crate::motion::{MotionError, PriorityAssignment, Rational, Scenario};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulationSnapshot {
    /// Each triple sorted; the list sorted.
    pub triangles: Vec<[u32; 3]>,
    /// Convex hull, counterclockwise from the leftmost point.
    pub hull: Vec<u32>,
    pub time: Rational,
}

impl TriangulationSnapshot {
    pub fn new(mut triangles: Vec<[u32; 3]>, hull: Vec<u32>, time: Rational) -> Self {
        for t in &mut triangles {
            t.sort_unstable();
        }
        triangles.sort_unstable();
        TriangulationSnapshot { triangles, hull, time }
    }

    /// Sorted edge list of the triangles.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> =
            self.triangles.iter().flat_map(|t| [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]).collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// One triangle per line, ids separated by spaces.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# t={} triangles={} hull={}", self.time, self.triangles.len(), self.hull.len());
        for t in &self.triangles {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub fn equivalent(a: &TriangulationSnapshot, b: &TriangulationSnapshot) -> bool {
    a.triangles == b.triangles
}

struct Ctx<'a> {
    f: &'a StaticFrame<'a>,
    side: Side,
    prio: &'a PriorityAssignment,
    out: Vec<[u32; 3]>,
}

impl Ctx<'_> {
    fn orient(&self, a: Vertex, b: Vertex, c: Vertex) -> Sign {
        self.f.orient(a, b, c, self.side)
    }

    fn upper_hull(&self, pts: &[Vertex]) -> Vec<Vertex> {
        let mut h: Vec<Vertex> = Vec::with_capacity(pts.len());
        for &p in pts {
            while h.len() >= 2 && self.orient(h[h.len() - 2], h[h.len() - 1], p) != Sign::Neg {
                h.pop();
            }
            h.push(p);
        }
        h
    }

    /// `a` sees `b` across the region with lower boundary `chain`.
    fn sees(&self, chain: &[Vertex], i: usize, j: usize) -> bool {
        chain[i + 1..j].iter().all(|&c| self.orient(chain[i], chain[j], c) == Sign::Neg)
    }

    /// Triangulates the x-monotone region above `chain` and below the
    /// segment joining its ends.
    fn region(&mut self, chain: Vec<Vertex>) -> Result<(), OracleError> {
        let k = chain.len() - 1;
        if k < 2 {
            return Ok(());
        }
        let convex: Vec<usize> =
            (1..k).filter(|&i| self.orient(chain[i - 1], chain[i], chain[i + 1]) == Sign::Pos).collect();
        if convex.len() != 1 {
            return Err(OracleError::Degenerate(format!("region with {} convex lower vertices", convex.len())));
        }
        let m = convex[0];
        if k == 2 {
            self.out.push([chain[0].pt(), chain[1].pt(), chain[2].pt()]);
            return Ok(());
        }
        let i = (1..k)
            .filter(|&i| i != m)
            .min_by_key(|&i| self.prio.priority(chain[i]))
            .expect("more than three vertices");
        let j = if i < m {
            (m..=k).rev().find(|&j| self.sees(&chain, i, j))
        } else {
            (0..=m).find(|&j| self.sees(&chain, j, i))
        }
        .ok_or_else(|| OracleError::Degenerate(String::from("vertex sees nothing across its region")))?;
        let (a, b) = (i.min(j), i.max(j));
        let upper: Vec<Vertex> = chain[..=a].iter().chain(&chain[b..]).copied().collect();
        let lower = chain[a..=b].to_vec();
        self.region(lower)?;
        self.region(upper)
    }

    fn split(&mut self, pts: &[Vertex]) -> Result<(), OracleError> {
        if pts.len() < 3 {
            return Ok(());
        }
        let mid = (1..pts.len() - 1).min_by_key(|&i| self.prio.priority(pts[i])).unwrap();
        let whole = self.upper_hull(pts);
        if !whole.contains(&pts[mid]) {
            let p = pts[mid];
            let k = whole.iter().position(|&v| self.f.x_before(p, v)).unwrap();
            let (u, w) = (whole[k - 1], whole[k]);
            let ul = self.upper_hull(&pts[..=mid]);
            let ur = self.upper_hull(&pts[mid..]);
            let s = ul.iter().position(|&v| v == u).unwrap();
            let e = ur.iter().position(|&v| v == w).unwrap();
            let chain: Vec<Vertex> = ul[s..].iter().chain(&ur[1..=e]).copied().collect();
            self.region(chain)?;
        }
        self.split(&pts[..=mid])?;
        self.split(&pts[mid..])
    }
}

fn sorted_ids(f: &StaticFrame<'_>) -> Result<Vec<u32>, OracleError> {
    let mut ids: Vec<u32> = (0..f.len() as u32).collect();
    ids.sort_by(|&a, &b| f.cmp_x_exact(a, b));
    for w in ids.windows(2) {
        if f.cmp_x_exact(w[0], w[1]) == Ordering::Equal {
            return Err(OracleError::Degenerate(format!("points {} and {} share an x-coordinate", w[0], w[1])));
        }
    }
    Ok(ids)
}

/// Convex hull of exact positions, counterclockwise from the leftmost point.
pub fn convex_hull(pos: &[(Rational, Rational)]) -> Vec<u32> {
    let mut ids: Vec<u32> = (0..pos.len() as u32).collect();
    ids.sort_by(|&a, &b| pos[a as usize].cmp(&pos[b as usize]));
    let turn = |a: u32, b: u32, c: u32| {
        let (p, q, r) = (&pos[a as usize], &pos[b as usize], &pos[c as usize]);
        orient_points((&p.0, &p.1), (&q.0, &q.1), (&r.0, &r.1))
    };
    let mut lower: Vec<u32> = Vec::new();
    for &p in &ids {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) != Sign::Pos {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<u32> = Vec::new();
    for &p in ids.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) != Sign::Pos {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// The triangulation at `t`, computed from scratch.
pub fn static_snapshot(
    scenario: &Scenario,
    prio: &PriorityAssignment,
    t: &Rational,
) -> Result<TriangulationSnapshot, OracleError> {
    let f = StaticFrame::new(scenario, t.clone())?;
    let ids = sorted_ids(&f)?;
    let mut pts = Vec::with_capacity(ids.len() + 2);
    pts.push(Vertex::NegInf);
    pts.extend(ids.iter().map(|&p| Vertex::Pt(p)));
    pts.push(Vertex::PosInf);
    let mut out = Vec::new();
    for side in Side::BOTH {
        let mut ctx = Ctx { f: &f, side, prio, out: Vec::new() };
        ctx.split(&pts)?;
        out.extend(ctx.out);
    }
    let pos = scenario.positions_at(t)?;
    Ok(TriangulationSnapshot::new(out, convex_hull(&pos), t.clone()))
}

fn twice_area(a: &(Rational, Rational), b: &(Rational, Rational), c: &(Rational, Rational)) -> Rational {
    (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0)
}

/// Checks that `tris` triangulates the convex hull of `pos`: nondegenerate
/// triangles, hull edges used once and interior edges twice from opposite
/// sides, areas summing to the hull area, Euler counts, and no point
/// strictly inside a triangle.
pub fn check_triangulation(pos: &[(Rational, Rational)], tris: &[[u32; 3]]) -> Result<(), String> {
    let n = pos.len();
    let hull = convex_hull(pos);
    let h = hull.len();
    if n >= 3 && tris.len() != 2 * n - h - 2 {
        return Err(format!("{} triangles, expected {}", tris.len(), 2 * n - h - 2));
    }
    let p = |i: u32| &pos[i as usize];
    let mut area = Rational::zero();
    let mut sides: BTreeMap<(u32, u32), Vec<Sign>> = BTreeMap::new();
    for t in tris {
        let a2 = twice_area(p(t[0]), p(t[1]), p(t[2]));
        if a2.is_zero() {
            return Err(format!("degenerate triangle {:?}", t));
        }
        area += if a2 < Rational::zero() { -a2 } else { a2 };
        for (u, v, w) in [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])] {
            let s = orient_points((&p(u).0, &p(u).1), (&p(v).0, &p(v).1), (&p(w).0, &p(w).1));
            sides.entry((u.min(v), u.max(v))).or_default().push(s);
        }
        for q in 0..n as u32 {
            if t.contains(&q) {
                continue;
            }
            let o = |a: u32, b: u32| orient_points((&p(a).0, &p(a).1), (&p(b).0, &p(b).1), (&p(q).0, &p(q).1));
            let s = [o(t[0], t[1]), o(t[1], t[2]), o(t[2], t[0])];
            if s[0] != Sign::Zero && s[0] == s[1] && s[1] == s[2] {
                return Err(format!("point {} inside triangle {:?}", q, t));
            }
        }
    }
    let mut hull_area = Rational::zero();
    for k in 1..h.saturating_sub(1) {
        hull_area += twice_area(p(hull[0]), p(hull[k]), p(hull[k + 1]));
    }
    if area != hull_area {
        return Err(format!("triangle area {} differs from hull area {}", area, hull_area));
    }
    let hull_edges: Vec<(u32, u32)> = (0..h).map(|k| (hull[k], hull[(k + 1) % h])).map(|(a, b)| (a.min(b), a.max(b))).collect();
    for (e, s) in &sides {
        let on_hull = hull_edges.contains(e);
        match (on_hull, s.as_slice()) {
            (true, [_]) => {}
            (false, [a, b]) if *a == -*b => {}
            _ => return Err(format!("edge {:?} has bad incidence {:?}", e, s)),
        }
    }
    for e in &hull_edges {
        if n >= 3 && !sides.contains_key(e) {
            return Err(format!("hull edge {:?} missing", e));
        }
    }
    Ok(())
}

/// Every time in the window at which two points swap x-order or three
/// become collinear, sorted and deduplicated. Cubic in the number of
/// points.
pub fn candidate_times(scenario: &Scenario) -> Result<Vec<EventTime>, KernelError> {
    let pts = &scenario.points;
    let w = &scenario.window;
    let n = pts.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.extend(x_swap_times(&pts[i], &pts[j], w)?);
            for k in j + 1..n {
                out.extend(collinearity_times(&pts[i], &pts[j], &pts[k], w)?);
            }
        }
    }
    out.sort_by(compare_times);
    out.dedup_by(|a, b| compare_times(a, b) == Ordering::Equal);
    Ok(out)
}

/// A rational strictly between two distinct event times.
pub fn rational_between(a: &EventTime, b: &EventTime) -> Rational {
    let (mut lo, mut hi) = if compare_times(a, b) == Ordering::Less { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    while lo.hi() >= hi.lo() {
        if lo.is_exact() || (!hi.is_exact() && hi.hi() - hi.lo() > lo.hi() - lo.lo()) {
            hi.refine();
        } else {
            lo.refine();
        }
    }
    (lo.hi() + hi.lo()) / Rational::from_integer(2.into())
}

/// Sample times strictly inside the window and strictly between candidate
/// times: the midpoint of every gap.
pub fn gap_samples(scenario: &Scenario, candidates: &[EventTime]) -> Vec<Rational> {
    let mut marks = Vec::with_capacity(candidates.len() + 2);
    marks.push(EventTime::exact(scenario.window.0.clone()));
    marks.extend(candidates.iter().cloned());
    marks.push(EventTime::exact(scenario.window.1.clone()));
    marks.dedup_by(|a, b| compare_times(a, b) == Ordering::Equal);
    marks.windows(2).map(|w| rational_between(&w[0], &w[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::{gen_random_scenario, int, rat, MotionModel, Trajectory};

    fn scenario(pts: &[(i64, i64)]) -> Scenario {
        let points = pts.iter().map(|&(x, y)| Trajectory::constant(int(0), int(1), int(x), int(y))).collect();
        Scenario::new(points, (int(0), int(1)), 0, "o".into()).unwrap()
    }

    #[test]
    fn square_with_center() {
        let s = scenario(&[(0, 0), (4, 1), (1, 4), (5, 5), (2, 2)]);
        let prio = PriorityAssignment::identity(5);
        let snap = static_snapshot(&s, &prio, &int(0)).unwrap();
        assert_eq!(snap.triangles.len(), 4);
        check_triangulation(&s.positions_at(&int(0)).unwrap(), &snap.triangles).unwrap();
        assert_eq!(snap.hull, vec![0, 1, 3, 2]);
    }

    #[test]
    fn random_static_snapshots_are_valid() {
        for seed in 0..10 {
            let s = gen_random_scenario(30, seed, MotionModel::Static, (int(0), int(1))).unwrap();
            let prio = crate::motion::draw_priorities(30, seed);
            let snap = static_snapshot(&s, &prio, &int(0)).unwrap();
            check_triangulation(&s.positions_at(&int(0)).unwrap(), &snap.triangles).unwrap();
        }
    }

    #[test]
    fn checker_rejects_overlap() {
        let s = scenario(&[(0, 0), (4, 0), (0, 4), (1, 1)]);
        let pos = s.positions_at(&int(0)).unwrap();
        assert!(check_triangulation(&pos, &[[0, 1, 2], [0, 1, 3]]).is_err());
        assert!(check_triangulation(&pos, &[[0, 1, 3], [1, 2, 3], [0, 2, 3]]).is_ok());
    }

    #[test]
    fn candidates_of_two_crossing_points() {
        let a = Trajectory::polynomial(int(0), int(1), crate::motion::Polynomial::from_ints(&[0, 1]), crate::motion::Polynomial::constant(int(0)));
        let b = Trajectory::constant(int(0), int(1), rat(1, 2), int(1));
        let s = Scenario::new(alloc::vec![a, b], (int(0), int(1)), 0, "c".into()).unwrap();
        let c = candidate_times(&s).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].as_rational(), Some(&rat(1, 2)));
        let g = gap_samples(&s, &c);
        assert_eq!(g, alloc::vec![rat(1, 4), rat(3, 4)]);
    }
}
