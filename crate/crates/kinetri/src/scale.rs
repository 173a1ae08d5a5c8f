//! Scaling experiments over sizes and seeds.

use std::fmt::Write as _;
use std::sync::Mutex;

use kinetri_core::motion::{draw_priorities, gen_random_scenario, MotionModel, Rational};

use crate::runner::{run, RunError, RunStats};

#[derive(Debug, Clone)]
pub struct ScaleRow {
    pub n: usize,
    pub runs: Vec<RunStats>,
}

fn mean<F: Fn(&RunStats) -> f64>(runs: &[RunStats], f: F) -> f64 {
    runs.iter().map(f).sum::<f64>() / runs.len().max(1) as f64
}

impl ScaleRow {
    pub fn mean_events(&self) -> f64 {
        mean(&self.runs, |r| r.total_events() as f64)
    }

    pub fn mean_changes(&self) -> f64 {
        mean(&self.runs, |r| r.total_changes() as f64)
    }

    /// Pooled mean of changes per event.
    pub fn changes_per_event(&self) -> f64 {
        let e: u64 = self.runs.iter().map(|r| r.total_events()).sum();
        let c: u64 = self.runs.iter().map(|r| r.total_changes()).sum();
        if e == 0 { 0.0 } else { c as f64 / e as f64 }
    }

    /// Pooled mean chord delta over bridge and visibility events.
    pub fn local_delta(&self) -> f64 {
        let s: u64 = self.runs.iter().map(|r| r.local_delta.0).sum();
        let k: u64 = self.runs.iter().map(|r| r.local_delta.1).sum();
        if k == 0 { 0.0 } else { s as f64 / k as f64 }
    }

    pub fn mean_storage(&self) -> f64 {
        mean(&self.runs, |r| r.census.storage.total() as f64)
    }

    pub fn mean_certs_per_point(&self) -> f64 {
        mean(&self.runs, |r| r.census.mean_per_point())
    }

    pub fn max_cv_per_funnel(&self) -> u32 {
        self.runs.iter().map(|r| r.census.max_cv_per_funnel).max().unwrap_or(0)
    }

    pub fn mean_wall_ms(&self) -> f64 {
        mean(&self.runs, |r| r.wall_ns as f64 / 1e6)
    }
}

/// Least-squares slope of `y` against `x`; `None` with fewer than two
/// distinct abscissae or any non-positive value.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx < 1e-12 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

pub struct ScaleConfig {
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub model: MotionModel,
    pub window: (Rational, Rational),
    /// Fixed priority seed; by default each run draws priorities from its
    /// scenario seed.
    pub priority_seed: Option<u64>,
    pub threads: usize,
}

/// One generated run per (size, seed). Seeds of one size run on parallel
/// worker threads.
pub fn scale(cfg: &ScaleConfig) -> Result<Vec<ScaleRow>, RunError> {
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let results = Mutex::new(Vec::new());
        let next = Mutex::new(0usize);
        std::thread::scope(|s| {
            for _ in 0..cfg.threads.max(1).min(cfg.seeds.len().max(1)) {
                s.spawn(|| loop {
                    let i = {
                        let mut k = next.lock().unwrap();
                        *k += 1;
                        *k - 1
                    };
                    let Some(&seed) = cfg.seeds.get(i) else { break };
                    let r = (|| -> Result<RunStats, RunError> {
                        let sc = gen_random_scenario(n, seed, cfg.model, cfg.window.clone())
                            .map_err(|e| RunError::Kds(kinetri_core::kds::KdsError::Degenerate(e.to_string())))?;
                        let prio = draw_priorities(n, cfg.priority_seed.unwrap_or(seed));
                        let res = run(sc, prio, false)?;
                        Ok(RunStats::from_run(&res, cfg.priority_seed))
                    })();
                    results.lock().unwrap().push((i, r));
                });
            }
        });
        let mut results = results.into_inner().unwrap();
        results.sort_by_key(|r| r.0);
        let runs = results.into_iter().map(|r| r.1).collect::<Result<Vec<_>, _>>()?;
        rows.push(ScaleRow { n, runs });
    }
    Ok(rows)
}

pub struct Slopes {
    pub changes_vs_n: Option<f64>,
    pub events_vs_n: Option<f64>,
    pub delta_vs_logn: Option<f64>,
}

pub fn slopes(rows: &[ScaleRow]) -> Slopes {
    let pick = |f: &dyn Fn(&ScaleRow) -> (f64, f64)| loglog_slope(&rows.iter().map(f).collect::<Vec<_>>());
    Slopes {
        changes_vs_n: pick(&|r| (r.n as f64, r.mean_changes())),
        events_vs_n: pick(&|r| (r.n as f64, r.mean_events())),
        delta_vs_logn: pick(&|r| ((r.n as f64).ln(), r.local_delta())),
    }
}

pub const SCALE_HEADER: &str = "n,seeds,mean_events,mean_changes,changes_per_event,mean_delta_ce_cv,mean_storage,storage_per_n,mean_certificates_per_point,max_cv_per_funnel,mean_wall_ms";

pub fn scale_csv(rows: &[ScaleRow]) -> String {
    let mut s = String::from(SCALE_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{:.3},{:.3},{:.6},{:.6},{:.3},{:.6},{:.6},{},{:.3}",
            r.n,
            r.runs.len(),
            r.mean_events(),
            r.mean_changes(),
            r.changes_per_event(),
            r.local_delta(),
            r.mean_storage(),
            r.mean_storage() / r.n as f64,
            r.mean_certs_per_point(),
            r.max_cv_per_funnel(),
            r.mean_wall_ms()
        );
    }
    s
}

pub fn fmt_slope(s: Option<f64>) -> String {
    s.map_or_else(|| "n/a".into(), |v| format!("{:.6}", v))
}
