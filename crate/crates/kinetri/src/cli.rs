//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use kinetri_core::kernel::check_general_position;
use kinetri_core::kds::KineticState;
use kinetri_core::motion::{draw_priorities, gen_random_scenario, perturb_scenario, MotionModel, Rational, Scenario};

use crate::decimal::parse_rational;
use crate::eventlog::write_events;
use crate::runner::{run, RunError, RunStats};
use crate::scale::{fmt_slope, scale, scale_csv, slopes, ScaleConfig};
use crate::scenario_file;
use crate::verify::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Run,
    Verify,
    Scale,
    Census,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "kinetri", version, about = "Kinetic treap pseudo-triangulation of moving points")]
pub struct Cli {
    /// Scenario file (JSON).
    #[arg(long, conflicts_with = "gen")]
    pub scenario: Option<PathBuf>,
    /// Generate a random scenario: n,seed,model with model static|linear|quadratic.
    #[arg(long, value_name = "N,SEED,MODEL")]
    pub gen: Option<String>,
    /// Seed of the random priority permutation (default: the scenario seed).
    #[arg(long, value_name = "K")]
    pub priority_seed: Option<u64>,
    /// Simulation window a,b; rationals may be written p/q.
    #[arg(long, value_name = "A,B")]
    pub window: Option<String>,
    /// Random sample times per scenario in verify mode.
    #[arg(long, value_name = "S", default_value_t = 50)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Mode::Run)]
    pub mode: Mode,
    /// Sizes for scale mode, e.g. 32,64,128,256.
    #[arg(long, value_name = "LIST")]
    pub sizes: Option<String>,
    /// Seeds for verify and scale modes, e.g. 1-10 or 1,4,9.
    #[arg(long, value_name = "LIST")]
    pub seeds: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Reject degenerate scenarios instead of perturbing them.
    #[arg(long)]
    pub strict_degeneracy: bool,
    /// Recheck the whole structure after every event in run mode.
    #[arg(long)]
    pub check: bool,
    /// Significant digits of event times in the log.
    #[arg(long, default_value_t = crate::decimal::DEFAULT_DIGITS)]
    pub digits: usize,
    /// Worker threads for scale mode (default: available cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("degenerate scenario: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Format(#[from] scenario_file::FormatError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(RunError::Check { .. }) => 1,
            _ => 3,
        }
    }
}

/// Parses `1,4,9`, `1-10` or a mix of both.
pub fn parse_list(s: &str) -> Result<Vec<u64>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || CliError::Usage(format!("bad list element {:?}", part));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty list {:?}", s)));
    }
    Ok(out)
}

pub fn parse_window(s: &str) -> Result<(Rational, Rational), CliError> {
    let (a, b) = s.split_once(',').ok_or_else(|| CliError::Usage(format!("window must be a,b: {:?}", s)))?;
    let a = parse_rational(a).map_err(CliError::Usage)?;
    let b = parse_rational(b).map_err(CliError::Usage)?;
    if a >= b {
        return Err(CliError::Usage(format!("empty window {:?}", s)));
    }
    Ok((a, b))
}

pub struct GenSpec {
    pub n: usize,
    pub seed: u64,
    pub model: MotionModel,
}

pub fn parse_gen(s: &str) -> Result<GenSpec, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("--gen expects n,seed,model: {:?}", s));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok(GenSpec {
        n: parts[0].parse().map_err(|_| bad())?,
        seed: parts[1].parse().map_err(|_| bad())?,
        model: parts[2].parse().map_err(|e| CliError::Usage(format!("{}", e)))?,
    })
}

fn default_window() -> (Rational, Rational) {
    (Rational::from_integer(0.into()), Rational::from_integer(1.into()))
}

impl Cli {
    fn window(&self) -> Result<Option<(Rational, Rational)>, CliError> {
        self.window.as_deref().map(parse_window).transpose()
    }

    fn generate(&self, g: &GenSpec, seed: u64) -> Result<Scenario, CliError> {
        let w = self.window()?.unwrap_or_else(default_window);
        gen_random_scenario(g.n, seed, g.model, w).map_err(|e| CliError::Degenerate(e.to_string()))
    }

    /// The scenario named by `--scenario` or `--gen` (with `seed` replacing
    /// the generator seed), after degeneracy handling. The flag reports
    /// whether it was perturbed.
    pub fn scenario_for(&self, seed: Option<u64>) -> Result<(Scenario, bool), CliError> {
        let sc = match (&self.scenario, &self.gen) {
            (Some(path), _) => {
                let sc = scenario_file::load(path)?;
                match self.window()? {
                    Some(w) => Scenario::new(sc.points, w, sc.seed, sc.label).map_err(|e| CliError::Usage(e.to_string()))?,
                    None => sc,
                }
            }
            (None, Some(g)) => {
                let g = parse_gen(g)?;
                let seed = seed.unwrap_or(g.seed);
                self.generate(&g, seed)?
            }
            (None, None) => return Err(CliError::Usage("one of --scenario or --gen is required".into())),
        };
        match check_general_position(&sc, &sc.window.0) {
            Ok(()) => Ok((sc, false)),
            Err(e) if self.strict_degeneracy => Err(CliError::Degenerate(e)),
            Err(_) => Ok((perturb_scenario(&sc, 16).map_err(|e| CliError::Degenerate(e.to_string()))?, true)),
        }
    }

    fn priority_seed_for(&self, sc: &Scenario) -> u64 {
        self.priority_seed.unwrap_or(sc.seed)
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn cmd_run(cli: &Cli) -> Result<i32, CliError> {
    let (sc, perturbed) = cli.scenario_for(None)?;
    let pseed = cli.priority_seed_for(&sc);
    let prio = draw_priorities(sc.len(), pseed);
    let res = run(sc, prio, cli.check)?;
    fs::create_dir_all(&cli.out)?;
    write_events(fs::File::create(cli.out.join("events.csv"))?, &res.events, cli.digits)?;
    let stats = RunStats::from_run(&res, Some(pseed));
    let mut text = stats.to_kv();
    text.push_str(&format!("perturbed={}\n", u8::from(perturbed)));
    write(&cli.out, "stats.txt", &text)?;
    println!(
        "n={} events={} changes={} wall_ms={:.3}",
        stats.n,
        stats.total_events(),
        stats.total_changes(),
        stats.wall_ns as f64 / 1e6
    );
    Ok(0)
}

fn cmd_census(cli: &Cli) -> Result<i32, CliError> {
    let (sc, perturbed) = cli.scenario_for(None)?;
    let pseed = cli.priority_seed_for(&sc);
    let prio = draw_priorities(sc.len(), pseed);
    let t0 = sc.window.0.clone();
    let start = std::time::Instant::now();
    let state = KineticState::init(sc, prio, t0).map_err(RunError::from)?;
    let res = crate::runner::RunResult {
        state,
        events: Vec::new(),
        init_ns: start.elapsed().as_nanos() as u64,
        wall_ns: start.elapsed().as_nanos() as u64,
    };
    let stats = RunStats::from_run(&res, Some(pseed));
    let mut text = stats.to_kv();
    text.push_str(&format!("perturbed={}\n", u8::from(perturbed)));
    write(&cli.out, "stats.txt", &text)?;
    print!("{}", text);
    Ok(0)
}

fn cmd_verify(cli: &Cli) -> Result<i32, CliError> {
    let seeds: Vec<Option<u64>> = match (&cli.seeds, &cli.gen) {
        (Some(s), Some(_)) => parse_list(s)?.into_iter().map(Some).collect(),
        _ => vec![None],
    };
    let mut report = String::new();
    let mut failed = false;
    for seed in seeds {
        let (sc, _) = cli.scenario_for(seed)?;
        let pseed = cli.priority_seed_for(&sc);
        let prio = draw_priorities(sc.len(), pseed);
        let r = verify(&sc, &prio, cli.samples, pseed).map_err(RunError::from)?;
        report.push_str(&format!("seed={} priority_seed={} n={} {}", sc.seed, pseed, sc.len(), r.summary()));
        if !r.passed() {
            failed = true;
            let name = format!("repro_seed{}.json", sc.seed);
            write(&cli.out, &name, &scenario_file::to_json(&sc))?;
            let m = &r.mismatches[0];
            report.push_str(&format!(
                "reproduce: kinetri --mode verify --scenario {} --priority-seed {} # first mismatch at t={}\n",
                cli.out.join(&name).display(),
                pseed,
                m.time
            ));
        }
    }
    write(&cli.out, "verify.txt", &report)?;
    print!("{}", report);
    Ok(i32::from(failed))
}

fn cmd_scale(cli: &Cli) -> Result<i32, CliError> {
    let sizes = match &cli.sizes {
        Some(s) => parse_list(s)?.into_iter().map(|k| k as usize).collect(),
        None => vec![32, 64, 128, 256],
    };
    let seeds = match &cli.seeds {
        Some(s) => parse_list(s)?,
        None => (1..=10).collect(),
    };
    let model = match &cli.gen {
        Some(g) => parse_gen(g)?.model,
        None => MotionModel::Linear,
    };
    let window = cli.window()?.unwrap_or_else(|| (Rational::from_integer(0.into()), Rational::new(1.into(), 8.into())));
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |k| k.get()));
    let cfg = ScaleConfig { sizes, seeds, model, window, priority_seed: cli.priority_seed, threads };
    let rows = scale(&cfg)?;
    let csv = scale_csv(&rows);
    write(&cli.out, "scale.csv", &csv)?;
    let sl = slopes(&rows);
    let stats = format!(
        "sizes={}\nseeds={}\nmodel={}\nwindow={},{}\nslope_changes_vs_n={}\nslope_events_vs_n={}\nslope_delta_vs_logn={}\n",
        rows.iter().map(|r| r.n.to_string()).collect::<Vec<_>>().join(","),
        cfg.seeds.len(),
        model,
        cfg.window.0,
        cfg.window.1,
        fmt_slope(sl.changes_vs_n),
        fmt_slope(sl.events_vs_n),
        fmt_slope(sl.delta_vs_logn)
    );
    write(&cli.out, "stats.txt", &stats)?;
    print!("{}{}", csv, stats);
    Ok(0)
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    match cli.mode {
        Mode::Run => cmd_run(cli),
        Mode::Verify => cmd_verify(cli),
        Mode::Scale => cmd_scale(cli),
        Mode::Census => cmd_census(cli),
    }
}
