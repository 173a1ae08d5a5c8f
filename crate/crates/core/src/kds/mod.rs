//! Certificates, the event queue and the kinetic loop over both the upper
//! and the lower structure.

mod census;
mod queue;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;

pub use census::{Census, Storage};
pub use queue::EventQueue;

use crate::funnel::Funnel;
use crate::hulltree::{PtTree, NIL};
use crate::kernel::{
    check_general_position, compare_times, next_failure, AfterFrame, Condition, EventTime, Frame, KernelError, Side,
    Vertex,
};
use crate::motion::{PriorityAssignment, Rational, Scenario};
use crate::oracle::TriangulationSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Ct,
    Ce,
    Cv,
}

impl EventKind {
    pub const ALL: [EventKind; 3] = [EventKind::Ct, EventKind::Ce, EventKind::Cv];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Ct => "CT",
            EventKind::Ce => "CE",
            EventKind::Cv => "CV",
        })
    }
}

/// Stable identity of a certificate. The derived order ranks x-order
/// certificates first, then bridge, then visibility certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CertKey {
    /// Consecutive points in x-order, left one first.
    Ct(u32, u32),
    /// Bridge (or empty funnel) of a node.
    Ce(Side, u32),
    /// Visibility vertex of a generator in the funnel of a node.
    Cv(Side, u32, u32),
}

impl CertKey {
    pub fn kind(&self) -> EventKind {
        match self {
            CertKey::Ct(..) => EventKind::Ct,
            CertKey::Ce(..) => EventKind::Ce,
            CertKey::Cv(..) => EventKind::Cv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub conditions: Vec<Condition>,
    /// Visibility target of a CV certificate.
    pub target: Option<u32>,
    pub failure: Option<EventTime>,
}

impl Certificate {
    pub fn points(&self) -> BTreeSet<u32> {
        self.conditions.iter().flat_map(|c| c.points()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub time: EventTime,
    /// Kind of the first certificate of the batch.
    pub kind: EventKind,
    pub points: Vec<u32>,
    /// Certificates that failed at this instant.
    pub failures: usize,
    pub removed: usize,
    pub added: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Counters {
    /// Event instants by the kind of their first certificate.
    pub events: [u64; 3],
    /// Certificate failures by kind.
    pub failures: [u64; 3],
    pub insertions: u64,
    pub deletions: u64,
    /// Popped certificates whose conditions all still held just after
    /// their failure time.
    pub spurious: u64,
    pub comparisons: u64,
    pub failure_computations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KdsError {
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub struct KineticState {
    scenario: Arc<Scenario>,
    prio: PriorityAssignment,
    order: Vec<u32>,
    pos: Vec<usize>,
    trees: [PtTree; 2],
    certs: BTreeMap<CertKey, Certificate>,
    queue: EventQueue,
    now: EventTime,
    t_end: Rational,
    even_roots: bool,
    edges: BTreeMap<(u32, u32), u32>,
    touched: BTreeMap<(u32, u32), bool>,
    fcache: BTreeMap<Condition, Option<EventTime>>,
    counters: Counters,
}

fn norm(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

type Work = [BTreeSet<(Reverse<usize>, u32)>; 2];

impl KineticState {
    /// Builds both structures just after `t0` and schedules every
    /// certificate up to the end of the scenario window.
    pub fn init(scenario: Scenario, prio: PriorityAssignment, t0: Rational) -> Result<Self, KdsError> {
        Self::init_with(scenario, prio, t0, false)
    }

    /// As [`KineticState::init`]; with `even_roots` set, tangential touches
    /// also count as certificate failures.
    pub fn init_with(
        scenario: Scenario,
        prio: PriorityAssignment,
        t0: Rational,
        even_roots: bool,
    ) -> Result<Self, KdsError> {
        assert_eq!(prio.len(), scenario.len(), "one priority per point");
        check_general_position(&scenario, &t0).map_err(KdsError::Degenerate)?;
        let scenario = Arc::new(scenario);
        let sc = scenario.clone();
        let now = EventTime::exact(t0);
        let frame = AfterFrame::new(&sc, now.clone());
        let n = scenario.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by(|&a, &b| {
            if a == b {
                Ordering::Equal
            } else if frame.x_before(Vertex::Pt(a), Vertex::Pt(b)) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        });
        let mut pos = vec![0; n];
        for (k, &p) in order.iter().enumerate() {
            pos[p as usize] = k;
        }
        let trees = [
            PtTree::build(&frame, Side::Upper, &order, &prio),
            PtTree::build(&frame, Side::Lower, &order, &prio),
        ];
        let t_end = scenario.window.1.clone();
        let mut st = KineticState {
            scenario,
            prio,
            order,
            pos,
            trees,
            certs: BTreeMap::new(),
            queue: EventQueue::new(),
            now,
            t_end,
            even_roots,
            edges: BTreeMap::new(),
            touched: BTreeMap::new(),
            fcache: BTreeMap::new(),
            counters: Counters::default(),
        };
        for k in 0..n.saturating_sub(1) {
            let (a, b) = (st.order[k], st.order[k + 1]);
            st.edge_add(a, b);
            st.set_ct(a, b)?;
        }
        for side in Side::BOTH {
            for v in 0..n as u32 {
                let es: Vec<(u32, u32)> = st.trees[side.index()].node(v).funnel.edges().collect();
                for (a, b) in es {
                    st.edge_add(a, b);
                }
                st.reset_node_certs(side, v, &frame)?;
            }
        }
        st.counters.comparisons += frame.comparisons();
        st.touched.clear();
        Ok(st)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn priorities(&self) -> &PriorityAssignment {
        &self.prio
    }

    pub fn now(&self) -> &EventTime {
        &self.now
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn tree(&self, side: Side) -> &PtTree {
        &self.trees[side.index()]
    }

    pub fn certificates(&self) -> &BTreeMap<CertKey, Certificate> {
        &self.certs
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    /// Current triangulation edges.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.keys().copied()
    }

    pub fn next_event_time(&mut self) -> Option<EventTime> {
        self.queue.peek().map(|(t, _)| t.clone())
    }

    fn edge_add(&mut self, a: u32, b: u32) {
        let e = norm(a, b);
        let present = self.edges.get(&e).is_some_and(|&c| c > 0);
        self.touched.entry(e).or_insert(present);
        *self.edges.entry(e).or_insert(0) += 1;
    }

    fn edge_remove(&mut self, a: u32, b: u32) {
        let e = norm(a, b);
        let present = self.edges.get(&e).is_some_and(|&c| c > 0);
        self.touched.entry(e).or_insert(present);
        match self.edges.get_mut(&e) {
            Some(c) if *c > 1 => *c -= 1,
            Some(_) => {
                self.edges.remove(&e);
            }
            None => debug_assert!(false, "removing absent edge {:?}", e),
        }
    }

    /// Edges deleted and inserted since the last flush.
    fn flush_touched(&mut self) -> (usize, usize) {
        let (mut removed, mut added) = (0, 0);
        for (e, before) in core::mem::take(&mut self.touched) {
            let after = self.edges.contains_key(&e);
            match (before, after) {
                (true, false) => removed += 1,
                (false, true) => added += 1,
                _ => {}
            }
        }
        (removed, added)
    }

    fn failure_of(&mut self, conds: &[Condition]) -> Result<Option<EventTime>, KdsError> {
        let mut best: Option<EventTime> = None;
        if self.fcache.len() > 64 * self.order.len() + 4096 {
            self.fcache.clear();
        }
        for c in conds {
            // A cached failure time stays valid until it has passed.
            let cached = match self.fcache.get(c) {
                Some(None) => Some(None),
                Some(Some(t)) if compare_times(t, &self.now) == Ordering::Greater => Some(Some(t.clone())),
                _ => None,
            };
            let next = match cached {
                Some(v) => v,
                None => {
                    self.counters.failure_computations += 1;
                    let v = next_failure(c, &self.scenario, &self.now, &self.t_end, self.even_roots)?;
                    self.fcache.insert(*c, v.clone());
                    v
                }
            };
            if let Some(t) = next {
                if best.as_ref().is_none_or(|b| compare_times(&t, b) == Ordering::Less) {
                    best = Some(t);
                }
            }
        }
        Ok(best)
    }

    fn install(&mut self, key: CertKey, conditions: Vec<Condition>, target: Option<u32>) -> Result<(), KdsError> {
        if let Some(old) = self.certs.get_mut(&key) {
            let fresh = old.failure.as_ref().is_none_or(|t| compare_times(t, &self.now) == Ordering::Greater);
            if old.conditions == conditions && fresh {
                old.target = target;
                return Ok(());
            }
        }
        let failure = self.failure_of(&conditions)?;
        self.queue.schedule(key, failure.clone());
        self.certs.insert(key, Certificate { conditions, target, failure });
        Ok(())
    }

    fn drop_cert(&mut self, key: &CertKey) {
        self.certs.remove(key);
        self.queue.cancel(key);
    }

    fn set_ct(&mut self, a: u32, b: u32) -> Result<(), KdsError> {
        self.install(CertKey::Ct(a, b), vec![Condition::XBefore(a, b)], None)
    }

    /// Certificates owned by node `v`: its bridge certificate and the
    /// certified visibility generators of its funnel.
    pub fn node_certificates<F: Frame + ?Sized>(
        &self,
        side: Side,
        v: u32,
        f: &F,
    ) -> Vec<(CertKey, Vec<Condition>, Option<u32>)> {
        let tree = &self.trees[side.index()];
        let mut out = Vec::new();
        out.push((CertKey::Ce(side, v), bridge_conditions(tree, v), None));
        for (q, target, conds) in tree.node(v).funnel.visibility_certificates(f, side) {
            out.push((CertKey::Cv(side, v, q), conds, Some(target)));
        }
        out
    }

    fn reset_node_certs<F: Frame + ?Sized>(&mut self, side: Side, v: u32, f: &F) -> Result<(), KdsError> {
        let fresh = self.node_certificates(side, v, f);
        let stale: Vec<CertKey> = self
            .certs
            .range(CertKey::Cv(side, v, 0)..=CertKey::Cv(side, v, u32::MAX))
            .map(|(k, _)| *k)
            .filter(|k| !fresh.iter().any(|(f, _, _)| f == k))
            .collect();
        for k in &stale {
            self.drop_cert(k);
        }
        for (key, conds, target) in fresh {
            self.install(key, conds, target)?;
        }
        Ok(())
    }

    fn refresh_node<F: Frame + ?Sized>(&mut self, side: Side, v: u32, f: &F) -> Result<bool, KdsError> {
        let old: Vec<(u32, u32)> = self.trees[side.index()].node(v).funnel.edges().collect();
        let changed = self.trees[side.index()].refresh(f, v, &self.prio);
        let new: Vec<(u32, u32)> = self.trees[side.index()].node(v).funnel.edges().collect();
        if old != new {
            for (a, b) in old {
                self.edge_remove(a, b);
            }
            for (a, b) in new {
                self.edge_add(a, b);
            }
        }
        self.reset_node_certs(side, v, f)?;
        Ok(changed)
    }

    fn enqueue_work(&self, work: &mut Work, side: Side, v: u32) {
        if v != NIL {
            work[side.index()].insert((Reverse(self.trees[side.index()].depth(v)), v));
        }
    }

    /// Swaps the x-consecutive points `a` (left) and `b` and rebuilds the
    /// subtree of whichever comes first in priority order.
    fn swap<F: Frame + ?Sized>(&mut self, a: u32, b: u32, f: &F, work: &mut Work) -> Result<(), KdsError> {
        let k = self.pos[a as usize];
        if self.pos[b as usize] != k + 1 {
            return Err(KdsError::Degenerate(format!("x-swap of non-adjacent points {} and {}", a, b)));
        }
        let prev = k.checked_sub(1).map(|i| self.order[i]);
        let next = self.order.get(k + 2).copied();
        self.drop_cert(&CertKey::Ct(a, b));
        if let Some(p) = prev {
            self.drop_cert(&CertKey::Ct(p, a));
            self.edge_remove(p, a);
            self.edge_add(p, b);
        }
        if let Some(q) = next {
            self.drop_cert(&CertKey::Ct(b, q));
            self.edge_remove(b, q);
            self.edge_add(a, q);
        }
        self.order.swap(k, k + 1);
        self.pos[a as usize] = k + 1;
        self.pos[b as usize] = k;
        if let Some(p) = prev {
            self.set_ct(p, b)?;
        }
        self.set_ct(b, a)?;
        if let Some(q) = next {
            self.set_ct(a, q)?;
        }
        let v = if self.prio.rank(a) < self.prio.rank(b) { a } else { b };
        let n = self.order.len();
        for side in Side::BOTH {
            let i = side.index();
            let node = self.trees[i].node(v);
            let parent = node.parent;
            let lo = match node.lend {
                Vertex::Pt(p) => self.pos[p as usize] + 1,
                _ => 0,
            };
            let hi = match node.rend {
                Vertex::Pt(p) => self.pos[p as usize] - 1,
                _ => n - 1,
            };
            let old_hull = node.hull.clone();
            for k in lo..=hi {
                let es: Vec<(u32, u32)> = self.trees[i].node(self.order[k]).funnel.edges().collect();
                for (x, y) in es {
                    self.edge_remove(x, y);
                }
            }
            let rebuilt = self.trees[i].rebuild_range(f, &self.order, lo, hi, parent, &self.prio);
            for &p in &rebuilt {
                let es: Vec<(u32, u32)> = self.trees[i].node(p).funnel.edges().collect();
                for (x, y) in es {
                    self.edge_add(x, y);
                }
                self.reset_node_certs(side, p, f)?;
            }
            if self.trees[i].node(v).hull != old_hull {
                self.enqueue_work(work, side, parent);
            }
        }
        Ok(())
    }

    fn run_work<F: Frame + ?Sized>(&mut self, work: &mut Work, f: &F) -> Result<(), KdsError> {
        for side in Side::BOTH {
            while let Some((_, v)) = work[side.index()].pop_first() {
                if self.refresh_node(side, v, f)? {
                    let parent = self.trees[side.index()].node(v).parent;
                    self.enqueue_work(work, side, parent);
                }
            }
        }
        Ok(())
    }

    /// Processes every certificate failing at the earliest pending event
    /// time, if that time lies before `t_end`.
    pub fn step_until(&mut self, t_end: &Rational) -> Result<Option<EventRecord>, KdsError> {
        match self.queue.peek() {
            Some((t, _)) if t.cmp_rational(t_end) == Ordering::Less => {}
            _ => return Ok(None),
        }
        let (t0, first) = self.queue.pop().expect("peeked");
        let mut batch = vec![first];
        while let Some((t, _)) = self.queue.peek() {
            if compare_times(t, &t0) != Ordering::Equal {
                break;
            }
            batch.push(self.queue.pop().expect("peeked").1);
        }
        self.now = t0.clone();
        let sc = self.scenario.clone();
        let frame = AfterFrame::new(&sc, t0.clone());
        let kind = batch[0].kind();
        let points: Vec<u32> = self.certs.get(&batch[0]).map(|c| c.points().into_iter().collect()).unwrap_or_default();
        batch.sort();
        let mut work: Work = [BTreeSet::new(), BTreeSet::new()];
        for key in &batch {
            self.counters.failures[key.kind().index()] += 1;
            if let Some(c) = self.certs.get(key) {
                if c.conditions.iter().all(|c| c.holds(&frame)) {
                    self.counters.spurious += 1;
                }
            }
            match *key {
                CertKey::Ct(a, b) => {
                    if self.certs.contains_key(key) {
                        self.swap(a, b, &frame, &mut work)?;
                    }
                }
                CertKey::Ce(side, v) | CertKey::Cv(side, v, _) => self.enqueue_work(&mut work, side, v),
            }
        }
        self.run_work(&mut work, &frame)?;
        let (removed, added) = self.flush_touched();
        self.counters.events[kind.index()] += 1;
        self.counters.deletions += removed as u64;
        self.counters.insertions += added as u64;
        self.counters.comparisons += frame.comparisons();
        Ok(Some(EventRecord { time: t0, kind, points, failures: batch.len(), removed, added }))
    }

    /// Processes the next event instant inside the window.
    pub fn step(&mut self) -> Result<Option<EventRecord>, KdsError> {
        let end = self.t_end.clone();
        self.step_until(&end)
    }

    /// Processes all events strictly before `t_end`.
    pub fn advance(&mut self, t_end: &Rational) -> Result<Vec<EventRecord>, KdsError> {
        let mut out = Vec::new();
        while let Some(r) = self.step_until(t_end)? {
            out.push(r);
        }
        Ok(out)
    }

    /// The maintained triangulation, labelled with `t`.
    pub fn extract(&self, t: Rational) -> TriangulationSnapshot {
        let mut tris = Vec::new();
        for tree in &self.trees {
            for node in tree.nodes() {
                tris.extend(node.funnel.triangles());
            }
        }
        let mut hull = self.trees[Side::Lower.index()].upper_hull();
        let upper = self.trees[Side::Upper.index()].upper_hull();
        if upper.len() > 2 {
            hull.extend(upper[1..upper.len() - 1].iter().rev());
        }
        TriangulationSnapshot::new(tris, hull, t)
    }

    /// Checks the whole state against a fresh computation just after the
    /// current time: trees, x-order, certificate set and edge multiset.
    pub fn check(&self) -> Result<(), String> {
        let frame = AfterFrame::new(&self.scenario, self.now.clone());
        for tree in &self.trees {
            tree.check(&frame, &self.prio)?;
            if tree.inorder() != self.order {
                return Err(format!("{} tree inorder differs from the x-order", tree.side()));
            }
        }
        let mut expect: BTreeMap<CertKey, (Vec<Condition>, Option<u32>)> = BTreeMap::new();
        for w in self.order.windows(2) {
            expect.insert(CertKey::Ct(w[0], w[1]), (vec![Condition::XBefore(w[0], w[1])], None));
        }
        let mut edges: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for w in self.order.windows(2) {
            *edges.entry(norm(w[0], w[1])).or_insert(0) += 1;
        }
        for side in Side::BOTH {
            for v in 0..self.order.len() as u32 {
                for (k, c, t) in self.node_certificates(side, v, &frame) {
                    expect.insert(k, (c, t));
                }
                for (a, b) in self.trees[side.index()].node(v).funnel.edges() {
                    *edges.entry(norm(a, b)).or_insert(0) += 1;
                }
            }
        }
        if edges != self.edges {
            return Err(String::from("edge multiset out of date"));
        }
        if expect.len() != self.certs.len() {
            return Err(format!("{} certificates stored, {} expected", self.certs.len(), expect.len()));
        }
        for (k, (conds, target)) in &expect {
            let Some(c) = self.certs.get(k) else {
                return Err(format!("missing certificate {:?}", k));
            };
            if &c.conditions != conds || &c.target != target {
                return Err(format!("certificate {:?} out of date", k));
            }
            if !conds.iter().all(|c| c.holds(&frame)) {
                return Err(format!("certificate {:?} does not hold", k));
            }
            if let Some(t) = &c.failure {
                if compare_times(t, &self.now) != Ordering::Greater {
                    return Err(format!("certificate {:?} failure not in the future", k));
                }
            }
        }
        Ok(())
    }

    /// Every stored certificate holds at `t`.
    pub fn check_certificates_at(&self, t: &Rational) -> Result<(), String> {
        let frame = crate::kernel::StaticFrame::new(&self.scenario, t.clone()).map_err(|e| format!("{}", e))?;
        for (k, c) in &self.certs {
            if !c.conditions.iter().all(|c| c.holds(&frame)) {
                return Err(format!("certificate {:?} fails at {}", k, t));
            }
        }
        Ok(())
    }

    pub fn census(&self) -> Census {
        census::census(self)
    }

    pub(crate) fn funnels(&self) -> impl Iterator<Item = (Side, u32, &Funnel)> + '_ {
        Side::BOTH.into_iter().flat_map(move |side| {
            self.trees[side.index()].nodes().iter().enumerate().map(move |(v, n)| (side, v as u32, &n.funnel))
        })
    }
}

/// Conditions of the bridge certificate of `v`: with an empty funnel the
/// apex stays above the segment joining its hull neighbors; otherwise the
/// hull neighbors of both bridge endpoints stay below the bridge.
pub fn bridge_conditions(tree: &PtTree, v: u32) -> Vec<Condition> {
    let node = tree.node(v);
    let side = tree.side();
    let p = Vertex::Pt(v);
    let lbase = [node.lend, p];
    let rbase = [p, node.rend];
    let lh: &[Vertex] = if node.left == NIL { &lbase } else { &tree.node(node.left).hull };
    let rh: &[Vertex] = if node.right == NIL { &rbase } else { &tree.node(node.right).hull };
    match node.bridge() {
        None => vec![Condition::below(lh[lh.len() - 2], p, rh[1], side)],
        Some((a, b)) => {
            let (a, b) = (Vertex::Pt(a), Vertex::Pt(b));
            let i = lh.iter().position(|&w| w == a).expect("bridge endpoint on the left hull");
            let j = rh.iter().position(|&w| w == b).expect("bridge endpoint on the right hull");
            let mut out = Vec::with_capacity(4);
            for y in [i.checked_sub(1).map(|k| lh[k]), lh.get(i + 1).copied()].into_iter().flatten() {
                out.push(Condition::below(a, b, y, side));
            }
            for y in [j.checked_sub(1).map(|k| rh[k]), rh.get(j + 1).copied()].into_iter().flatten() {
                out.push(Condition::below(a, b, y, side));
            }
            out
        }
    }
}
