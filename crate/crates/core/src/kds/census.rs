use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{CertKey, KineticState};
use crate::hulltree::NIL;
use crate::kernel::Side;

/// Stored entities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Storage {
    /// Tree nodes over both sides.
    pub nodes: usize,
    /// Distinct vertices over all funnel chains.
    pub chain_vertices: usize,
    pub chords: usize,
    pub certificates: usize,
    /// Vertices of the stored subtree hulls, kept alongside the funnels.
    pub hull_vertices: usize,
}

impl Storage {
    /// Nodes, chain vertices, chords and certificates.
    pub fn total(&self) -> usize {
        self.nodes + self.chain_vertices + self.chords + self.certificates
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    /// Per point: x-order, bridge and visibility certificates it takes part
    /// in. A point takes part in a visibility certificate as its generator
    /// or as its target.
    pub per_point: Vec<[u32; 3]>,
    /// Certificates by kind.
    pub certificates: [usize; 3],
    /// Largest number of visibility certificates one point takes part in
    /// within a single funnel.
    pub max_cv_per_funnel: u32,
    /// Largest number of bridge certificates of one side a point appears in.
    pub max_ce_per_side: u32,
    /// Height (in nodes) of the upper and lower trees.
    pub height: [usize; 2],
    pub storage: Storage,
}

impl Census {
    pub fn mean_per_point(&self) -> f64 {
        let n = self.per_point.len().max(1) as f64;
        self.per_point.iter().map(|c| (c[0] + c[1] + c[2]) as f64).sum::<f64>() / n
    }
}

fn height(st: &KineticState, side: Side) -> usize {
    let tree = st.tree(side);
    let mut best = 0;
    let mut stack = vec![(tree.root(), 1usize)];
    while let Some((v, d)) = stack.pop() {
        if v == NIL {
            continue;
        }
        best = best.max(d);
        stack.push((tree.node(v).left, d + 1));
        stack.push((tree.node(v).right, d + 1));
    }
    best
}

pub(super) fn census(st: &KineticState) -> Census {
    let n = st.order().len();
    let mut per_point = vec![[0u32; 3]; n];
    let mut certificates = [0usize; 3];
    let mut cv_roles: BTreeMap<(Side, u32, u32), u32> = BTreeMap::new();
    let mut ce_side: BTreeMap<(Side, u32), u32> = BTreeMap::new();
    for (key, cert) in st.certificates() {
        let k = key.kind().index();
        certificates[k] += 1;
        match *key {
            CertKey::Ct(a, b) => {
                per_point[a as usize][k] += 1;
                per_point[b as usize][k] += 1;
            }
            CertKey::Ce(side, _) => {
                for p in cert.points() {
                    per_point[p as usize][k] += 1;
                    *ce_side.entry((side, p)).or_insert(0) += 1;
                }
            }
            CertKey::Cv(side, v, q) => {
                let mut roles = vec![q];
                if let Some(t) = cert.target {
                    roles.push(t);
                }
                for p in roles {
                    per_point[p as usize][k] += 1;
                    *cv_roles.entry((side, v, p)).or_insert(0) += 1;
                }
            }
        }
    }
    let mut storage = Storage { nodes: 2 * n, certificates: st.certificates().len(), ..Storage::default() };
    for (_, _, f) in st.funnels() {
        if !f.is_empty() {
            storage.chain_vertices += f.vertex_count();
        }
        storage.chords += f.chords.len();
    }
    for side in Side::BOTH {
        storage.hull_vertices += st.tree(side).nodes().iter().map(|n| n.hull.len()).sum::<usize>();
    }
    Census {
        per_point,
        certificates,
        max_cv_per_funnel: cv_roles.values().copied().max().unwrap_or(0),
        max_ce_per_side: ce_side.values().copied().max().unwrap_or(0),
        height: [height(st, Side::Upper), height(st, Side::Lower)],
        storage,
    }
}
