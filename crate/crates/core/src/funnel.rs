//! Funnels of pseudo-triangles and their chord triangulations.
//!
//! A funnel is bounded above by a base segment (the bridge) and below by two
//! chains meeting at the apex: the left chain runs from the left base
//! endpoint down to the apex, the right chain from the apex up to the right
//! base endpoint. Both chains bulge into the funnel. The triangulation draws
//! one chord per non-corner vertex, in increasing priority, from the vertex
//! to the farthest vertex it sees on the opposite chain of the current
//! sub-pseudo-triangle. All chords cross the vertical line above the apex, so
//! they are kept bottom to top.

use alloc::vec;
use alloc::vec::Vec;

use crate::kernel::{Condition, Frame, Side, Sign, Vertex};
use crate::motion::PriorityAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chord {
    pub gen: u32,
    pub other: u32,
}

impl Chord {
    pub fn edge(&self) -> (u32, u32) {
        (self.gen.min(self.other), self.gen.max(self.other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chain {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Funnel {
    pub apex: u32,
    /// Left base endpoint down to the apex.
    pub left: Vec<u32>,
    /// Apex up to the right base endpoint.
    pub right: Vec<u32>,
    /// Bottom to top.
    pub chords: Vec<Chord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FunnelError {
    #[error("the funnel is empty")]
    Empty,
    #[error("vertex {0} is a corner of the funnel")]
    Corner(u32),
    #[error("vertex {0} is not on the funnel")]
    NotInFunnel(u32),
}

fn pt(v: u32) -> Vertex {
    Vertex::Pt(v)
}

fn orient<F: Frame + ?Sized>(f: &F, side: Side, a: u32, b: u32, c: u32) -> Sign {
    f.orient(pt(a), pt(b), pt(c), side)
}

/// Index into `right` of the farthest vertex visible from `q`, a vertex left
/// of the right chain: the upper tangent point from `q`, or the last vertex.
pub fn tangent_right<F: Frame + ?Sized>(f: &F, side: Side, q: u32, right: &[u32]) -> usize {
    let last = right.len() - 1;
    let (mut lo, mut hi) = (0, last);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if orient(f, side, q, right[mid], right[mid + 1]) == Sign::Pos {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Mirror of [`tangent_right`]: index into `left` of the farthest vertex
/// visible from `q`, a vertex right of the left chain.
pub fn tangent_left<F: Frame + ?Sized>(f: &F, side: Side, q: u32, left: &[u32]) -> usize {
    let (mut lo, mut hi) = (0, left.len() - 1);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if orient(f, side, left[mid], q, left[mid - 1]) == Sign::Pos {
            hi = mid - 1;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Normalizes a region whose chain degenerated to the apex alone: the apex
/// then coincides with a base endpoint and the true apex is its neighbor.
fn normalize(mut l: Vec<u32>, mut r: Vec<u32>) -> (Vec<u32>, Vec<u32>) {
    if l.len() == 1 && r.len() >= 2 {
        l.push(r[1]);
        r.remove(0);
    } else if r.len() == 1 && l.len() >= 2 {
        r.insert(0, l[l.len() - 2]);
        l.pop();
    }
    (l, r)
}

fn triangulate_rec<F: Frame + ?Sized>(
    f: &F,
    side: Side,
    prio: &PriorityAssignment,
    l: Vec<u32>,
    r: Vec<u32>,
    out: &mut Vec<Chord>,
) {
    let (l, r) = normalize(l, r);
    if l.len() + r.len() <= 4 {
        return;
    }
    let mut best: Option<(u32, Chain, usize)> = None;
    for (chain, xs) in [(Chain::Left, &l), (Chain::Right, &r)] {
        for (i, &q) in xs.iter().enumerate().take(xs.len() - 1).skip(1) {
            if best.is_none_or(|(b, _, _)| prio.rank(q) < prio.rank(b)) {
                best = Some((q, chain, i));
            }
        }
    }
    let (q, chain, i) = best.expect("region with more than three vertices has a non-corner");
    match chain {
        Chain::Left => {
            let j = tangent_right(f, side, q, &r);
            let lower = (l[i..].to_vec(), r[..=j].to_vec());
            let mut upper_r = vec![q];
            upper_r.extend_from_slice(&r[j..]);
            let upper = (l[..=i].to_vec(), upper_r);
            triangulate_rec(f, side, prio, lower.0, lower.1, out);
            out.push(Chord { gen: q, other: r[j] });
            triangulate_rec(f, side, prio, upper.0, upper.1, out);
        }
        Chain::Right => {
            let j = tangent_left(f, side, q, &l);
            let lower = (l[j..].to_vec(), r[..=i].to_vec());
            let mut upper_l = l[..=j].to_vec();
            upper_l.push(q);
            let upper = (upper_l, r[i..].to_vec());
            triangulate_rec(f, side, prio, lower.0, lower.1, out);
            out.push(Chord { gen: q, other: l[j] });
            triangulate_rec(f, side, prio, upper.0, upper.1, out);
        }
    }
}

/// Chords of the priority-driven triangulation of the region bounded by
/// `left` and `right` (sharing the apex) and the segment joining their
/// outer ends, bottom to top.
pub fn triangulate<F: Frame + ?Sized>(
    f: &F,
    side: Side,
    prio: &PriorityAssignment,
    left: &[u32],
    right: &[u32],
) -> Vec<Chord> {
    let mut out = Vec::new();
    triangulate_rec(f, side, prio, left.to_vec(), right.to_vec(), &mut out);
    out
}

impl Funnel {
    pub fn empty(apex: u32) -> Self {
        Funnel { apex, left: vec![apex], right: vec![apex], chords: Vec::new() }
    }

    /// Builds the funnel on the given chains and triangulates it.
    pub fn new<F: Frame + ?Sized>(
        f: &F,
        side: Side,
        prio: &PriorityAssignment,
        left: Vec<u32>,
        right: Vec<u32>,
    ) -> Self {
        let apex = right[0];
        debug_assert_eq!(left.last(), Some(&apex));
        let chords = triangulate(f, side, prio, &left, &right);
        Funnel { apex, left, right, chords }
    }

    pub fn is_empty(&self) -> bool {
        self.left.len() == 1 && self.right.len() == 1
    }

    pub fn is_triangle(&self) -> bool {
        self.left.len() == 2 && self.right.len() == 2
    }

    pub fn bridge(&self) -> Option<(u32, u32)> {
        if self.is_empty() {
            None
        } else {
            Some((self.left[0], self.right[self.right.len() - 1]))
        }
    }

    /// Number of distinct vertices.
    pub fn vertex_count(&self) -> usize {
        self.left.len() + self.right.len() - 1
    }

    /// Non-corner vertices with their chain and index.
    pub fn non_corners(&self) -> impl Iterator<Item = (u32, Chain, usize)> + '_ {
        let l = self.left.len();
        let r = self.right.len();
        let left = self.left.iter().enumerate().take(l.saturating_sub(1)).skip(1).map(|(i, &q)| (q, Chain::Left, i));
        let right = self.right.iter().enumerate().take(r.saturating_sub(1)).skip(1).map(|(i, &q)| (q, Chain::Right, i));
        left.chain(right)
    }

    pub fn locate(&self, q: u32) -> Option<(Chain, usize)> {
        if q == self.apex {
            return None;
        }
        if let Some(i) = self.left.iter().position(|&v| v == q) {
            return Some((Chain::Left, i));
        }
        self.right.iter().position(|&v| v == q).map(|i| (Chain::Right, i))
    }

    /// Index on the opposite chain of the farthest vertex visible from the
    /// vertex at `(chain, i)`.
    pub fn nu_index<F: Frame + ?Sized>(&self, f: &F, side: Side, chain: Chain, i: usize) -> usize {
        match chain {
            Chain::Left => {
                if i == 0 {
                    self.right.len() - 1
                } else {
                    tangent_right(f, side, self.left[i], &self.right)
                }
            }
            Chain::Right => {
                if i == self.right.len() - 1 {
                    0
                } else {
                    tangent_left(f, side, self.right[i], &self.left)
                }
            }
        }
    }

    /// The visibility vertex of `q`.
    pub fn visible_vertex<F: Frame + ?Sized>(&self, f: &F, side: Side, q: u32) -> Result<u32, FunnelError> {
        if self.is_empty() {
            return Err(FunnelError::Empty);
        }
        if q == self.apex {
            return Err(FunnelError::Corner(q));
        }
        let (chain, i) = self.locate(q).ok_or(FunnelError::NotInFunnel(q))?;
        let j = self.nu_index(f, side, chain, i);
        Ok(match chain {
            Chain::Left => self.right[j],
            Chain::Right => self.left[j],
        })
    }

    /// Conditions keeping the visibility vertex of `(chain, i)` valid: the
    /// chain neighbors of the visible vertex stay below the line to it.
    pub fn visibility_conditions(&self, chain: Chain, i: usize, nu: usize, side: Side) -> Vec<Condition> {
        let (q, opp) = match chain {
            Chain::Left => (self.left[i], &self.right),
            Chain::Right => (self.right[i], &self.left),
        };
        let v = opp[nu];
        let mut out = Vec::with_capacity(2);
        for k in [nu.wrapping_sub(1), nu + 1] {
            if let Some(&y) = opp.get(k) {
                let (a, b) = match chain {
                    Chain::Left => (q, v),
                    Chain::Right => (v, q),
                };
                out.push(Condition::below(pt(a), pt(b), pt(y), side));
            }
        }
        out
    }

    /// Certified visibility generators: for each target on a chain only the
    /// outermost generators pointing at it are kept. Returns
    /// `(generator, target, conditions)`.
    pub fn visibility_certificates<F: Frame + ?Sized>(&self, f: &F, side: Side) -> Vec<(u32, u32, Vec<Condition>)> {
        let mut out = Vec::new();
        if self.is_empty() || self.is_triangle() {
            return out;
        }
        for chain in [Chain::Left, Chain::Right] {
            let len = match chain {
                Chain::Left => self.left.len(),
                Chain::Right => self.right.len(),
            };
            if len < 3 {
                continue;
            }
            let nus: Vec<usize> = (1..len - 1).map(|i| self.nu_index(f, side, chain, i)).collect();
            for (k, &nu) in nus.iter().enumerate() {
                let first = k == 0 || nus[k - 1] != nu;
                let last = k + 1 == nus.len() || nus[k + 1] != nu;
                if !(first || last) {
                    continue;
                }
                let i = k + 1;
                let (q, target) = match chain {
                    Chain::Left => (self.left[i], self.right[nu]),
                    Chain::Right => (self.right[i], self.left[nu]),
                };
                out.push((q, target, self.visibility_conditions(chain, i, nu, side)));
            }
        }
        out
    }

    /// Triangles, bottom to top, each as sorted ids.
    pub fn triangles(&self) -> Vec<[u32; 3]> {
        let mut out = Vec::new();
        let Some(bridge) = self.bridge() else {
            return out;
        };
        let mut prev = (self.apex, self.apex);
        let levels = self.chords.iter().map(|c| (c.gen, c.other)).chain(core::iter::once(bridge));
        for next in levels {
            let mut vs = [prev.0, prev.1, next.0, next.1];
            vs.sort_unstable();
            let mut tri = [vs[0]; 3];
            let mut k = 1;
            for &v in &vs[1..] {
                if v != tri[k - 1] {
                    if k == 3 {
                        k = 4;
                        break;
                    }
                    tri[k] = v;
                    k += 1;
                }
            }
            debug_assert_eq!(k, 3, "consecutive funnel chords must bound a triangle");
            if k == 3 {
                out.push(tri);
            }
            prev = next;
        }
        out
    }

    /// Bridge and chord edges as sorted pairs.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.bridge()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .into_iter()
            .chain(self.chords.iter().map(Chord::edge))
    }
}

/// Sub-pseudo-triangle in which a vertex generates its chord, delimited by
/// the chords just below and above it among those of lower-priority
/// generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tau0 {
    /// Index in the chord list of the delimiting chord below, if any.
    pub below: Option<usize>,
    /// Index in the chord list of the delimiting chord above, if any (none
    /// means the bridge).
    pub above: Option<usize>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

/// Position of a chord as (index on the left chain, index on the right
/// chain); the apex is the end of the left chain and the start of the right.
fn chord_span(funnel: &Funnel, c: &Chord) -> Option<(usize, usize)> {
    let lpos = |v: u32| {
        if v == funnel.apex {
            Some(funnel.left.len() - 1)
        } else {
            funnel.left.iter().position(|&x| x == v)
        }
    };
    let rpos = |v: u32| {
        if v == funnel.apex {
            Some(0)
        } else {
            funnel.right.iter().position(|&x| x == v)
        }
    };
    match (lpos(c.gen), rpos(c.other)) {
        (Some(l), Some(r)) => Some((l, r)),
        _ => Some((lpos(c.other)?, rpos(c.gen)?)),
    }
}

/// Locates the sub-pseudo-triangle in which `p0` generates its chord: the
/// region between the highest chord below `p0`'s chord and the lowest chord
/// above it whose generators precede `p0` in priority order.
pub fn find_tau0(funnel: &Funnel, prio: &PriorityAssignment, p0: u32) -> Result<Tau0, FunnelError> {
    if funnel.is_empty() {
        return Err(FunnelError::Empty);
    }
    if p0 == funnel.apex {
        return Err(FunnelError::Corner(p0));
    }
    funnel.locate(p0).ok_or(FunnelError::NotInFunnel(p0))?;
    let k = funnel.chords.iter().position(|c| c.gen == p0).ok_or(FunnelError::Corner(p0))?;
    let earlier = |c: &Chord| prio.rank(c.gen) < prio.rank(p0);
    let below = (0..k).rev().find(|&m| earlier(&funnel.chords[m]));
    let above = (k + 1..funnel.chords.len()).find(|&m| earlier(&funnel.chords[m]));
    let (l_lo, r_hi) = match above {
        Some(m) => chord_span(funnel, &funnel.chords[m]).ok_or(FunnelError::NotInFunnel(p0))?,
        None => (0, funnel.right.len() - 1),
    };
    let (l_hi, r_lo) = match below {
        Some(m) => chord_span(funnel, &funnel.chords[m]).ok_or(FunnelError::NotInFunnel(p0))?,
        None => (funnel.left.len() - 1, 0),
    };
    let (left, right) = region_chains(funnel, l_lo, l_hi, r_lo, r_hi, below.map(|m| funnel.chords[m]));
    Ok(Tau0 { below, above, left, right })
}

/// Chains of the region above the chord `(l_hi, r_lo)` and below the chord
/// `(l_lo, r_hi)`. Its apex is the generator of the lower chord.
fn region_chains(
    funnel: &Funnel,
    l_lo: usize,
    l_hi: usize,
    r_lo: usize,
    r_hi: usize,
    below: Option<Chord>,
) -> (Vec<u32>, Vec<u32>) {
    let lch = &funnel.left;
    let rch = &funnel.right;
    match below {
        None => (lch[l_lo..=l_hi].to_vec(), rch[r_lo..=r_hi].to_vec()),
        Some(c) => {
            if lch[..lch.len() - 1].contains(&c.gen) {
                let mut r = vec![lch[l_hi]];
                r.extend_from_slice(&rch[r_lo..=r_hi]);
                (lch[l_lo..=l_hi].to_vec(), r)
            } else {
                let mut l = lch[l_lo..=l_hi].to_vec();
                l.push(rch[r_lo]);
                (l, rch[r_lo..=r_hi].to_vec())
            }
        }
    }
}

/// Recomputes the chords strictly inside `tau0` at the current geometry and
/// splices them into the funnel. Returns `(removed, added)` chords.
pub fn retriangulate_tau0<F: Frame + ?Sized>(
    funnel: &mut Funnel,
    f: &F,
    side: Side,
    prio: &PriorityAssignment,
    tau0: &Tau0,
) -> (Vec<Chord>, Vec<Chord>) {
    let start = tau0.below.map_or(0, |m| m + 1);
    let end = tau0.above.unwrap_or(funnel.chords.len());
    let fresh = triangulate(f, side, prio, &tau0.left, &tau0.right);
    let old: Vec<Chord> = funnel.chords[start..end].to_vec();
    let removed: Vec<Chord> = old.iter().filter(|c| !fresh.contains(c)).copied().collect();
    let added: Vec<Chord> = fresh.iter().filter(|c| !old.contains(c)).copied().collect();
    funnel.chords.splice(start..end, fresh);
    (removed, added)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::StaticFrame;
    use crate::motion::{int, rat, Rational, Scenario, Trajectory};

    fn scenario(pts: &[(Rational, Rational)]) -> Scenario {
        let points = pts.iter().map(|(x, y)| Trajectory::constant(int(0), int(1), x.clone(), y.clone())).collect();
        Scenario::new(points, (int(0), int(1)), 0, "f".into()).unwrap()
    }

    fn ints(pts: &[(i64, i64)]) -> Vec<(Rational, Rational)> {
        pts.iter().map(|&(x, y)| (int(x), int(y))).collect()
    }

    #[test]
    fn triangle_funnel_has_no_chords() {
        let s = scenario(&ints(&[(0, 4), (1, 0), (2, 4)]));
        let f = StaticFrame::new(&s, int(0)).unwrap();
        let p = PriorityAssignment::identity(3);
        let fun = Funnel::new(&f, Side::Upper, &p, vec![0, 1], vec![1, 2]);
        assert!(fun.chords.is_empty());
        assert_eq!(fun.triangles(), vec![[0, 1, 2]]);
        assert_eq!(fun.visible_vertex(&f, Side::Upper, 0), Ok(2));
        assert_eq!(fun.visible_vertex(&f, Side::Upper, 2), Ok(0));
        assert_eq!(fun.visible_vertex(&f, Side::Upper, 1), Err(FunnelError::Corner(1)));
    }

    #[test]
    fn single_non_corner_vertex() {
        // Left chain 0 -> 1 -> 2 (apex), right chain 2 -> 3.
        let s = scenario(&ints(&[(0, 10), (2, 7), (4, 0), (6, 9)]));
        let f = StaticFrame::new(&s, int(0)).unwrap();
        let p = PriorityAssignment::identity(4);
        let fun = Funnel::new(&f, Side::Upper, &p, vec![0, 1, 2], vec![2, 3]);
        assert_eq!(fun.chords, vec![Chord { gen: 1, other: 3 }]);
        assert_eq!(fun.triangles(), vec![[1, 2, 3], [0, 1, 3]]);
    }

    #[test]
    fn tangent_stops_at_bulge() {
        // Right chain bulges: from q the far end is hidden.
        let s = scenario(&[
            (int(0), int(10)),
            (int(1), int(8)),
            (int(2), int(0)),
            (int(3), int(9)),
            (int(6), int(10)),
            (int(7), rat(21, 2)),
        ]);
        let f = StaticFrame::new(&s, int(0)).unwrap();
        let j = tangent_right(&f, Side::Upper, 1, &[2, 3, 4, 5]);
        // slopes from q=(1,8): to 3 -> 1/2, to 4 -> 2/5, to 5 -> 5/12.
        assert_eq!(j, 1);
    }
}
