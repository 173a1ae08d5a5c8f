//! Kinetic-versus-static verification and per-event invariant checks.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use kinetri_core::hulltree::{pseudo_triangle_condition, NIL};
use kinetri_core::kds::{KdsError, KineticState};
use kinetri_core::kernel::{compare_times, StaticFrame};
use kinetri_core::motion::{PriorityAssignment, Rational, Scenario};
use kinetri_core::oracle::{candidate_times, check_triangulation, equivalent, rational_between, static_snapshot};
use kinetri_core::{EventTime, Side, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decimal::format_rational;

/// A rational strictly between the current time and the next event (or the
/// window end).
pub fn time_after_now(state: &mut KineticState) -> Rational {
    let end = EventTime::exact(state.scenario().window.1.clone());
    let next = state.next_event_time().filter(|t| compare_times(t, &end) == Ordering::Less).unwrap_or(end);
    rational_between(state.now(), &next)
}

/// Full structural check of the state at `t`, which must lie strictly
/// between the current time and the next event.
pub fn check_invariants(state: &KineticState, t: &Rational) -> Result<(), String> {
    state.check()?;
    state.check_certificates_at(t)?;
    let sc = state.scenario();
    let f = StaticFrame::new(sc, t.clone()).map_err(|e| e.to_string())?;
    let prio = state.priorities();
    for side in Side::BOTH {
        let tree = state.tree(side);
        if tree.root() == NIL {
            continue;
        }
        for (v, node) in tree.nodes().iter().enumerate() {
            if !pseudo_triangle_condition(&f, prio, node.lend, Vertex::Pt(v as u32), node.rend) {
                return Err(format!("{} node {} violates the pseudo-triangle condition", side, v));
            }
            let funnel = &node.funnel;
            let gens: Vec<u32> = funnel.chords.iter().map(|c| c.gen).collect();
            let uniq: BTreeSet<u32> = gens.iter().copied().collect();
            let eligible: BTreeSet<u32> = funnel.non_corners().map(|(q, _, _)| q).collect();
            if uniq.len() != gens.len() || uniq != eligible {
                return Err(format!("{} node {}: chord generators differ from non-corner vertices", side, v));
            }
        }
    }
    let snap = state.extract(t.clone());
    let pos = sc.positions_at(t).map_err(|e| e.to_string())?;
    check_triangulation(&pos, &snap.triangles)?;
    let (n, h) = (sc.len(), snap.hull.len());
    if n >= 3 && snap.edges().len() != 3 * n - h - 3 {
        return Err(format!("{} edges, expected {}", snap.edges().len(), 3 * n - h - 3));
    }
    let census = state.census();
    if census.max_cv_per_funnel > 3 {
        return Err(format!("a point takes part in {} visibility certificates of one funnel", census.max_cv_per_funnel));
    }
    if census.per_point.iter().any(|c| c[0] > 2) {
        return Err("a point takes part in more than two x-order certificates".into());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub time: Rational,
    pub what: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: usize,
    pub events: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut s = format!("checks={} events={} mismatches={}\n", self.checks, self.events, self.mismatches.len());
        for m in &self.mismatches {
            s.push_str(&format!("mismatch t={} ({}) {}\n", m.time, format_rational(&m.time, 12).0, m.what));
        }
        s
    }
}

/// Three rationals strictly inside the gap between two times.
fn interior(lo: &EventTime, hi: &EventTime) -> [Rational; 3] {
    let m = rational_between(lo, hi);
    let me = EventTime::exact(m.clone());
    [rational_between(lo, &me), m, rational_between(&me, hi)]
}

#[derive(Debug, Clone)]
enum Probe {
    /// Kinetic state against the static scheme.
    Sample,
    /// Three times inside one candidate gap.
    Gap(usize),
}

/// Runs the kinetic structure under `kinetic` priorities and compares it to
/// the static scheme under `reference` priorities at `samples` random
/// non-event times. For `n <= 10` every gap between consecutive candidate
/// times is checked as well, and every processed event must be a candidate.
pub fn verify_against(
    scenario: &Scenario,
    kinetic: &PriorityAssignment,
    reference: &PriorityAssignment,
    samples: usize,
    sample_seed: u64,
) -> Result<VerifyReport, KdsError> {
    let t0 = scenario.window.0.clone();
    let mut report = VerifyReport::default();
    let mut st = KineticState::init(scenario.clone(), kinetic.clone(), t0.clone())?;
    let times: Vec<EventTime> = st.advance(&scenario.window.1.clone())?.into_iter().map(|r| r.time).collect();
    report.events = times.len();

    let mut marks = vec![EventTime::exact(t0.clone())];
    marks.extend(times.iter().cloned());
    marks.push(EventTime::exact(scenario.window.1.clone()));
    marks.dedup_by(|a, b| compare_times(a, b) == Ordering::Equal);
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let mut probes: Vec<(Rational, Probe)> = Vec::new();
    for _ in 0..samples {
        let g = rng.random_range(0..marks.len() - 1);
        let [a, _, b] = interior(&marks[g], &marks[g + 1]);
        let u = Rational::new(rng.random_range(0..=1i64 << 20).into(), (1i64 << 20).into());
        probes.push((&a + (&b - &a) * u, Probe::Sample));
    }
    if scenario.len() <= 10 {
        let cands = candidate_times(scenario).map_err(KdsError::from)?;
        for t in &times {
            if cands.binary_search_by(|c| compare_times(c, t)).is_err() {
                report.mismatches.push(Mismatch {
                    time: t.lo().clone(),
                    what: "processed event is not a candidate time".into(),
                });
            }
        }
        let mut cm = vec![EventTime::exact(t0.clone())];
        cm.extend(cands.into_iter().filter(|c| c.cmp_rational(&t0) == Ordering::Greater && c.cmp_rational(&scenario.window.1) == Ordering::Less));
        cm.push(EventTime::exact(scenario.window.1.clone()));
        for (g, w) in cm.windows(2).enumerate() {
            for t in interior(&w[0], &w[1]) {
                probes.push((t, Probe::Gap(g)));
            }
        }
    }
    probes.sort_by(|a, b| a.0.cmp(&b.0));

    let mut st = KineticState::init(scenario.clone(), kinetic.clone(), t0)?;
    let mut gap_ref: Option<(usize, Vec<[u32; 3]>)> = None;
    for (t, probe) in probes {
        st.advance(&t)?;
        report.checks += 1;
        let kin = st.extract(t.clone());
        let stat = match static_snapshot(scenario, reference, &t) {
            Ok(s) => s,
            Err(e) => {
                report.mismatches.push(Mismatch { time: t, what: format!("static scheme failed: {}", e) });
                continue;
            }
        };
        if !equivalent(&kin, &stat) {
            report.mismatches.push(Mismatch { time: t.clone(), what: "kinetic triangulation differs from the static one".into() });
        }
        if let Probe::Gap(g) = probe {
            match &gap_ref {
                Some((h, tris)) if *h == g => {
                    if tris != &stat.triangles {
                        report.mismatches.push(Mismatch { time: t, what: format!("static triangulation changes inside gap {}", g) });
                    }
                }
                _ => gap_ref = Some((g, stat.triangles.clone())),
            }
        }
    }
    Ok(report)
}

pub fn verify(scenario: &Scenario, prio: &PriorityAssignment, samples: usize, sample_seed: u64) -> Result<VerifyReport, KdsError> {
    verify_against(scenario, prio, prio, samples, sample_seed)
}
