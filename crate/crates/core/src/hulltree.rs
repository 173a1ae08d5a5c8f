//! The pseudo-triangulation tree: a treap on x-order and priority whose
//! nodes carry the upper hull of their subtree (closed by the inorder
//! neighbors) and the funnel below the bridge of that hull.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::funnel::Funnel;
use crate::kernel::{Frame, Side, Sign, StaticFrame, Vertex};
use crate::motion::{PriorityAssignment, Rational, Scenario};

pub const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub parent: u32,
    pub left: u32,
    pub right: u32,
    /// Inorder predecessor of the subtree, or a sentinel.
    pub lend: Vertex,
    /// Inorder successor of the subtree, or a sentinel.
    pub rend: Vertex,
    /// Upper hull of the subtree together with `lend` and `rend`.
    pub hull: Vec<Vertex>,
    pub funnel: Funnel,
}

impl Node {
    fn blank(p: u32) -> Self {
        Node {
            parent: NIL,
            left: NIL,
            right: NIL,
            lend: Vertex::NegInf,
            rend: Vertex::PosInf,
            hull: Vec::new(),
            funnel: Funnel::empty(p),
        }
    }

    pub fn bridge(&self) -> Option<(u32, u32)> {
        self.funnel.bridge()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtTree {
    side: Side,
    root: u32,
    nodes: Vec<Node>,
}

/// Upper common tangent of two x-separated upper hulls, as indices into
/// `left` and `right`. Both slices must be nonempty.
pub fn compute_bridge<F: Frame + ?Sized>(f: &F, side: Side, left: &[Vertex], right: &[Vertex]) -> (usize, usize) {
    let mut a = left.len() - 1;
    let mut b = 0;
    loop {
        let mut moved = false;
        while a > 0 && f.orient(left[a], right[b], left[a - 1], side) == Sign::Pos {
            a -= 1;
            moved = true;
        }
        while b + 1 < right.len() && f.orient(left[a], right[b], right[b + 1], side) == Sign::Pos {
            b += 1;
            moved = true;
        }
        if !moved {
            return (a, b);
        }
    }
}

/// True iff `b` can be the apex of a pseudo-triangle with endpoints `a` and
/// `c`: `b` comes after both in priority order and no point strictly between
/// `a` and `c` in x comes before `b`. Assumes `x(a) < x(b) < x(c)`.
pub fn pseudo_triangle_condition<F: Frame + ?Sized>(
    f: &F,
    prio: &PriorityAssignment,
    a: Vertex,
    b: Vertex,
    c: Vertex,
) -> bool {
    let pb = prio.priority(b);
    if pb <= prio.priority(a).max(prio.priority(c)) {
        return false;
    }
    (0..f.len() as u32)
        .map(Vertex::Pt)
        .filter(|&p| f.x_before(a, p) && f.x_before(p, c))
        .all(|p| prio.priority(p) >= pb)
}

/// Cartesian tree of `ids` (in x-order) by rank. Returns the root and the
/// `(parent, left, right)` links for every id.
fn cartesian(ids: &[u32], prio: &PriorityAssignment) -> (u32, Vec<(u32, u32, u32)>) {
    let mut links = vec![(NIL, NIL, NIL); ids.len()];
    let mut stack: Vec<usize> = Vec::new();
    for k in 0..ids.len() {
        let mut last = None;
        while let Some(&top) = stack.last() {
            if prio.rank(ids[top]) > prio.rank(ids[k]) {
                last = stack.pop();
            } else {
                break;
            }
        }
        if let Some(l) = last {
            links[k].1 = l as u32;
            links[l].0 = k as u32;
        }
        if let Some(&top) = stack.last() {
            links[top].2 = k as u32;
            links[k].0 = top as u32;
        }
        stack.push(k);
    }
    let map = |i: u32| if i == NIL { NIL } else { ids[i as usize] };
    let root = map(stack[0] as u32);
    (root, links.into_iter().map(|(p, l, r)| (map(p), map(l), map(r))).collect())
}

impl PtTree {
    /// Builds the tree over all points, given in x-order, at the frame's
    /// time.
    pub fn build<F: Frame + ?Sized>(f: &F, side: Side, order: &[u32], prio: &PriorityAssignment) -> Self {
        let n = order.len();
        let mut tree = PtTree { side, root: NIL, nodes: (0..n as u32).map(Node::blank).collect() };
        if n > 0 {
            tree.rebuild_range(f, order, 0, n - 1, NIL, prio);
        }
        tree
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, v: u32) -> &Node {
        &self.nodes[v as usize]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Depth of `v` (the root has depth 0).
    pub fn depth(&self, mut v: u32) -> usize {
        let mut d = 0;
        while self.nodes[v as usize].parent != NIL {
            v = self.nodes[v as usize].parent;
            d += 1;
        }
        d
    }

    /// Rebuilds the subtree spanning `order[lo..=hi]` under `parent` and
    /// recomputes hulls and funnels bottom-up. Returns the rebuilt nodes,
    /// children before parents; the new subtree root comes last.
    pub fn rebuild_range<F: Frame + ?Sized>(
        &mut self,
        f: &F,
        order: &[u32],
        lo: usize,
        hi: usize,
        parent: u32,
        prio: &PriorityAssignment,
    ) -> Vec<u32> {
        let ids = &order[lo..=hi];
        let (root, links) = cartesian(ids, prio);
        for (k, &p) in ids.iter().enumerate() {
            let node = &mut self.nodes[p as usize];
            node.left = links[k].1;
            node.right = links[k].2;
            node.parent = if p == root { parent } else { links[k].0 };
        }
        if parent == NIL {
            self.root = root;
        } else {
            let par = &mut self.nodes[parent as usize];
            if f.x_before(Vertex::Pt(root), Vertex::Pt(parent)) {
                par.left = root;
            } else {
                par.right = root;
            }
        }
        // Subtree spans, children first.
        let mut bottom_up: Vec<u32> = ids.to_vec();
        bottom_up.sort_unstable_by_key(|&p| core::cmp::Reverse(prio.rank(p)));
        let at = |k: usize| Vertex::Pt(order[k]);
        let mut span = vec![(0usize, 0usize); ids.len()];
        let index: alloc::collections::BTreeMap<u32, usize> =
            ids.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        for &p in &bottom_up {
            let k = index[&p];
            let node = &self.nodes[p as usize];
            let s = if node.left == NIL { k } else { span[index[&node.left]].0 };
            let e = if node.right == NIL { k } else { span[index[&node.right]].1 };
            span[k] = (s, e);
            let g = lo + s;
            let h = lo + e;
            let node = &mut self.nodes[p as usize];
            node.lend = if g == 0 { Vertex::NegInf } else { at(g - 1) };
            node.rend = if h + 1 == order.len() { Vertex::PosInf } else { at(h + 1) };
        }
        for &p in &bottom_up {
            self.refresh(f, p, prio);
        }
        bottom_up
    }

    /// Hull and funnel of `v` computed from its children's hulls.
    pub fn compute_node<F: Frame + ?Sized>(&self, f: &F, v: u32, prio: &PriorityAssignment) -> (Vec<Vertex>, Funnel) {
        let node = &self.nodes[v as usize];
        let p = Vertex::Pt(v);
        let lbase = [node.lend, p];
        let rbase = [p, node.rend];
        let lh: &[Vertex] = if node.left == NIL { &lbase } else { &self.nodes[node.left as usize].hull };
        let rh: &[Vertex] = if node.right == NIL { &rbase } else { &self.nodes[node.right as usize].hull };
        let side = self.side;
        if f.orient(lh[lh.len() - 2], p, rh[1], side) != Sign::Pos {
            let mut hull = lh.to_vec();
            hull.extend_from_slice(&rh[1..]);
            return (hull, Funnel::empty(v));
        }
        let (i, j) = compute_bridge(f, side, &lh[..lh.len() - 1], &rh[1..]);
        let j = j + 1;
        let mut hull = lh[..=i].to_vec();
        hull.extend_from_slice(&rh[j..]);
        let left: Vec<u32> = lh[i..].iter().map(|w| w.pt()).collect();
        let right: Vec<u32> = rh[..=j].iter().map(|w| w.pt()).collect();
        (hull, Funnel::new(f, side, prio, left, right))
    }

    /// Recomputes the hull and funnel of `v`. Returns whether the hull
    /// changed.
    pub fn refresh<F: Frame + ?Sized>(&mut self, f: &F, v: u32, prio: &PriorityAssignment) -> bool {
        let (hull, funnel) = self.compute_node(f, v, prio);
        let node = &mut self.nodes[v as usize];
        node.funnel = funnel;
        if node.hull != hull {
            node.hull = hull;
            true
        } else {
            false
        }
    }

    /// Replaces the funnel of `v`, keeping its hull.
    pub fn set_funnel(&mut self, v: u32, funnel: Funnel) {
        self.nodes[v as usize].funnel = funnel;
    }

    /// Hull vertices of the whole set, left to right, without sentinels.
    pub fn upper_hull(&self) -> Vec<u32> {
        if self.root == NIL {
            return Vec::new();
        }
        self.nodes[self.root as usize].hull.iter().filter_map(|v| v.id()).collect()
    }

    /// Inorder traversal.
    pub fn inorder(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = Vec::new();
        let mut cur = self.root;
        while cur != NIL || !stack.is_empty() {
            while cur != NIL {
                stack.push(cur);
                cur = self.nodes[cur as usize].left;
            }
            let v = stack.pop().unwrap();
            out.push(v);
            cur = self.nodes[v as usize].right;
        }
        out
    }

    /// Checks x-order, heap order, parent links and endpoint fields.
    pub fn check_treap<F: Frame + ?Sized>(&self, f: &F, prio: &PriorityAssignment) -> Result<(), String> {
        let ino = self.inorder();
        if ino.len() != self.nodes.len() {
            return Err(format!("inorder reaches {} of {} nodes", ino.len(), self.nodes.len()));
        }
        for w in ino.windows(2) {
            if !f.x_before(Vertex::Pt(w[0]), Vertex::Pt(w[1])) {
                return Err(format!("points {} and {} out of x-order", w[0], w[1]));
            }
        }
        let pos: alloc::collections::BTreeMap<u32, usize> = ino.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        for &v in &ino {
            let node = &self.nodes[v as usize];
            for c in [node.left, node.right] {
                if c == NIL {
                    continue;
                }
                if self.nodes[c as usize].parent != v {
                    return Err(format!("child {} of {} has parent {}", c, v, self.nodes[c as usize].parent));
                }
                if prio.rank(c) < prio.rank(v) {
                    return Err(format!("child {} precedes parent {} in priority", c, v));
                }
            }
            let (mut s, mut e) = (v, v);
            while self.nodes[s as usize].left != NIL {
                s = self.nodes[s as usize].left;
            }
            while self.nodes[e as usize].right != NIL {
                e = self.nodes[e as usize].right;
            }
            let lend = pos[&s].checked_sub(1).map_or(Vertex::NegInf, |k| Vertex::Pt(ino[k]));
            let rend = ino.get(pos[&e] + 1).map_or(Vertex::PosInf, |&p| Vertex::Pt(p));
            if node.lend != lend || node.rend != rend {
                return Err(format!("endpoints of {} are {},{} but should be {},{}", v, node.lend, node.rend, lend, rend));
            }
        }
        if self.root != NIL && self.nodes[self.root as usize].parent != NIL {
            return Err(String::from("root has a parent"));
        }
        Ok(())
    }

    pub fn verify_treap<F: Frame + ?Sized>(&self, f: &F, prio: &PriorityAssignment) -> bool {
        self.check_treap(f, prio).is_ok()
    }

    /// Checks the treap and that every hull and funnel matches a fresh
    /// computation from the children.
    pub fn check<F: Frame + ?Sized>(&self, f: &F, prio: &PriorityAssignment) -> Result<(), String> {
        self.check_treap(f, prio)?;
        for v in 0..self.nodes.len() as u32 {
            let (hull, funnel) = self.compute_node(f, v, prio);
            let node = &self.nodes[v as usize];
            if node.hull != hull {
                return Err(format!("stale hull at node {}", v));
            }
            if node.funnel != funnel {
                return Err(format!("stale funnel at node {}", v));
            }
        }
        Ok(())
    }

    /// Indented preorder listing: apex, endpoints, bridge, chain lengths and
    /// chord count per node.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tree {} n={}", self.side, self.nodes.len());
        let mut stack = vec![(self.root, 0usize)];
        while let Some((v, d)) = stack.pop() {
            if v == NIL {
                continue;
            }
            let node = &self.nodes[v as usize];
            let bridge = match node.bridge() {
                Some((a, b)) => format!("{}-{}", a, b),
                None => String::from("none"),
            };
            let _ = writeln!(
                out,
                "{:indent$}{} [{},{}] bridge={} L={} R={} chords={}",
                "",
                v,
                node.lend,
                node.rend,
                bridge,
                node.funnel.left.len(),
                node.funnel.right.len(),
                node.funnel.chords.len(),
                indent = 2 * d
            );
            stack.push((node.right, d + 1));
            stack.push((node.left, d + 1));
        }
        out
    }
}

/// Both trees built from scratch at a rational time.
pub struct StaticBuild {
    pub order: Vec<u32>,
    pub trees: [PtTree; 2],
    /// Orientation and x-order tests performed, sorting included.
    pub comparisons: u64,
}

pub fn build_static(
    scenario: &Scenario,
    prio: &PriorityAssignment,
    t: Rational,
) -> Result<StaticBuild, crate::motion::MotionError> {
    let f = StaticFrame::new(scenario, t)?;
    let mut order: Vec<u32> = (0..scenario.len() as u32).collect();
    order.sort_by(|&a, &b| {
        if a == b {
            core::cmp::Ordering::Equal
        } else if f.x_before(Vertex::Pt(a), Vertex::Pt(b)) {
            core::cmp::Ordering::Less
        } else {
            core::cmp::Ordering::Greater
        }
    });
    let trees = [PtTree::build(&f, Side::Upper, &order, prio), PtTree::build(&f, Side::Lower, &order, prio)];
    Ok(StaticBuild { order, trees, comparisons: f.comparisons() })
}
