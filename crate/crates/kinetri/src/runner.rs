//! Running a scenario through the kinetic structure and summarising it.

use std::fmt::Write as _;
use std::time::Instant;

use kinetri_core::kds::{Census, EventKind, KdsError, KineticState};
use kinetri_core::motion::{PriorityAssignment, Rational, Scenario};

use crate::decimal::format_time;
use crate::eventlog::LoggedEvent;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Kds(#[from] KdsError),
    #[error("self-check failed after the event at t={time}: {msg}")]
    Check { time: String, msg: String },
}

pub struct RunResult {
    pub state: KineticState,
    pub events: Vec<LoggedEvent>,
    pub init_ns: u64,
    pub wall_ns: u64,
}

/// Runs the whole window. With `check` set, the full state is compared to a
/// fresh computation after every event.
pub fn run(scenario: Scenario, prio: PriorityAssignment, check: bool) -> Result<RunResult, RunError> {
    let t0 = scenario.window.0.clone();
    let start = Instant::now();
    let mut state = KineticState::init(scenario, prio, t0)?;
    let init_ns = start.elapsed().as_nanos() as u64;
    let mut events = Vec::new();
    loop {
        let s = Instant::now();
        let Some(record) = state.step()? else { break };
        let wall_ns = s.elapsed().as_nanos() as u64;
        if check {
            state.check().map_err(|msg| RunError::Check { time: format_time(&record.time, 12).0, msg })?;
        }
        events.push(LoggedEvent { record, wall_ns });
    }
    Ok(RunResult { state, events, init_ns, wall_ns: start.elapsed().as_nanos() as u64 })
}

#[derive(Debug, Clone)]
pub struct RunStats {
    pub n: usize,
    pub seed: u64,
    pub priority_seed: Option<u64>,
    pub window: (Rational, Rational),
    /// Event instants by the kind of their first certificate.
    pub events: [u64; 3],
    pub failures: [u64; 3],
    pub chords_removed: u64,
    pub chords_added: u64,
    pub max_changes: u64,
    /// Summed and counted chord deltas over bridge and visibility events.
    pub local_delta: (u64, u64),
    pub spurious: u64,
    pub comparisons: u64,
    pub failure_computations: u64,
    pub init_ns: u64,
    pub wall_ns: u64,
    pub census: Census,
}

impl RunStats {
    pub fn from_run(r: &RunResult, priority_seed: Option<u64>) -> Self {
        let sc = r.state.scenario();
        let c = r.state.counters();
        let mut st = RunStats {
            n: sc.len(),
            seed: sc.seed,
            priority_seed,
            window: sc.window.clone(),
            events: [0; 3],
            failures: c.failures,
            chords_removed: 0,
            chords_added: 0,
            max_changes: 0,
            local_delta: (0, 0),
            spurious: c.spurious,
            comparisons: c.comparisons,
            failure_computations: c.failure_computations,
            init_ns: r.init_ns,
            wall_ns: r.wall_ns,
            census: r.state.census(),
        };
        for e in &r.events {
            let rec = &e.record;
            let ch = (rec.removed + rec.added) as u64;
            st.events[rec.kind.index()] += 1;
            st.chords_removed += rec.removed as u64;
            st.chords_added += rec.added as u64;
            st.max_changes = st.max_changes.max(ch);
            if rec.kind != EventKind::Ct {
                st.local_delta.0 += ch;
                st.local_delta.1 += 1;
            }
        }
        st
    }

    pub fn total_events(&self) -> u64 {
        self.events.iter().sum()
    }

    pub fn total_changes(&self) -> u64 {
        self.chords_removed + self.chords_added
    }

    pub fn mean_changes(&self) -> f64 {
        ratio(self.total_changes(), self.total_events())
    }

    /// Mean chord delta over bridge and visibility events.
    pub fn mean_local_delta(&self) -> f64 {
        ratio(self.local_delta.0, self.local_delta.1)
    }

    pub fn to_kv(&self) -> String {
        let c = &self.census;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{}={}", k, v);
        };
        kv("n", self.n.to_string());
        kv("seed", self.seed.to_string());
        kv("priority_seed", self.priority_seed.map_or("none".into(), |k| k.to_string()));
        kv("window", format!("{},{}", self.window.0, self.window.1));
        kv("events", self.total_events().to_string());
        for k in EventKind::ALL {
            kv(&format!("events_{}", k), self.events[k.index()].to_string());
        }
        for k in EventKind::ALL {
            kv(&format!("failures_{}", k), self.failures[k.index()].to_string());
        }
        kv("chords_removed", self.chords_removed.to_string());
        kv("chords_added", self.chords_added.to_string());
        kv("changes", self.total_changes().to_string());
        kv("mean_changes_per_event", format!("{:.6}", self.mean_changes()));
        kv("max_changes_per_event", self.max_changes.to_string());
        kv("mean_delta_ce_cv", format!("{:.6}", self.mean_local_delta()));
        kv("spurious", self.spurious.to_string());
        kv("comparisons", self.comparisons.to_string());
        kv("failure_computations", self.failure_computations.to_string());
        kv("init_ns", self.init_ns.to_string());
        kv("wall_ns", self.wall_ns.to_string());
        for k in EventKind::ALL {
            kv(&format!("certificates_{}", k), c.certificates[k.index()].to_string());
        }
        kv("certificates_per_point_mean", format!("{:.6}", c.mean_per_point()));
        let max_pp = c.per_point.iter().map(|p| p[0] + p[1] + p[2]).max().unwrap_or(0);
        kv("certificates_per_point_max", max_pp.to_string());
        kv("max_ct_per_point", c.per_point.iter().map(|p| p[0]).max().unwrap_or(0).to_string());
        kv("max_cv_per_funnel", c.max_cv_per_funnel.to_string());
        kv("max_ce_per_side", c.max_ce_per_side.to_string());
        kv("height_upper", c.height[0].to_string());
        kv("height_lower", c.height[1].to_string());
        kv("storage_nodes", c.storage.nodes.to_string());
        kv("storage_chain_vertices", c.storage.chain_vertices.to_string());
        kv("storage_chords", c.storage.chords.to_string());
        kv("storage_certificates", c.storage.certificates.to_string());
        kv("storage_total", c.storage.total().to_string());
        kv("storage_hull_vertices", c.storage.hull_vertices.to_string());
        s
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Parses `key=value` lines.
pub fn parse_kv(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}
