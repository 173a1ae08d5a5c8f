use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use kinetri::cli::{parse_list, parse_window};
use kinetri::eventlog::read_events;
use kinetri::runner::parse_kv;
use kinetri::scale::loglog_slope;
use kinetri::scenario_file::save;
use kinetri::verify::verify_against;
use kinetri_core::motion::{draw_priorities, gen_random_scenario, int, rat, MotionModel, Scenario, Trajectory};
use kinetri_core::Polynomial;

fn kinetri(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kinetri")).args(args).output().expect("binary runs")
}

fn stats(dir: &Path) -> BTreeMap<String, String> {
    parse_kv(&std::fs::read_to_string(dir.join("stats.txt")).unwrap()).into_iter().collect()
}

fn constant(pts: &[(i64, i64)]) -> Scenario {
    let points = pts.iter().map(|&(x, y)| Trajectory::constant(int(0), int(1), int(x), int(y))).collect();
    Scenario::new(points, (int(0), int(1)), 4, "fixed".into()).unwrap()
}

#[test]
fn static_scenario_has_no_events() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = kinetri(&["--gen", "20,3,static", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stats(dir.path())["events"], "0");
    let lines = read_events(std::fs::File::open(dir.path().join("events.csv")).unwrap()).unwrap();
    assert!(lines.is_empty());
}

#[test]
fn crossing_pair_gives_one_x_swap() {
    let dir = tempfile::tempdir().unwrap();
    let a = Trajectory::polynomial(int(0), int(1), Polynomial::from_ints(&[0, 2]), Polynomial::from_ints(&[0]));
    let b = Trajectory::polynomial(int(0), int(1), Polynomial::from_ints(&[1]), Polynomial::from_ints(&[1]));
    let s = Scenario::new(vec![a, b], (int(0), int(1)), 0, "pair".into()).unwrap();
    let file = dir.path().join("pair.json");
    save(&s, &file).unwrap();
    let out = dir.path().join("out");
    let o = kinetri(&["--scenario", file.to_str().unwrap(), "--out", out.to_str().unwrap(), "--check"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let st = stats(&out);
    assert_eq!(st["events"], "1");
    assert_eq!(st["events_CT"], "1");
    let lines = read_events(std::fs::File::open(out.join("events.csv")).unwrap()).unwrap();
    assert_eq!((lines[0].time.as_str(), lines[0].exact, lines[0].points.as_str()), ("0.5", 1, "0 1"));
    let o = kinetri(&["--scenario", file.to_str().unwrap(), "--mode", "verify", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
}

#[test]
fn reruns_are_identical_apart_from_wall_clock() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |d: &Path| {
        let lines = read_events(std::fs::File::open(d.join("events.csv")).unwrap()).unwrap();
        lines.into_iter().map(|mut l| {
            l.wall_ns = 0;
            l
        }).collect::<Vec<_>>()
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = kinetri(&["--gen", "24,5,quadratic", "--window", "0,1/2", "--priority-seed", "9", "--out", d.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(strip(&a), strip(&b));
    let (sa, sb) = (stats(&a), stats(&b));
    for (k, v) in &sa {
        if !k.ends_with("_ns") {
            assert_eq!(v, &sb[k], "{}", k);
        }
    }
}

#[test]
fn degenerate_input_is_perturbed_unless_strict() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("line.json");
    save(&constant(&[(0, 0), (1, 1), (2, 2), (3, 0)]), &file).unwrap();
    let out = dir.path().join("o");
    let f = file.to_str().unwrap();
    let o = kinetri(&["--scenario", f, "--out", out.to_str().unwrap(), "--strict-degeneracy"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate"));
    let o = kinetri(&["--scenario", f, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stats(&out)["perturbed"], "1");
}

#[test]
fn verify_mode_passes_on_small_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let o = kinetri(&["--gen", "8,1,linear", "--mode", "verify", "--seeds", "1-20", "--samples", "10", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let report = std::fs::read_to_string(dir.path().join("verify.txt")).unwrap();
    assert_eq!(report.matches("mismatches=0").count(), 20);
    let o = kinetri(&["--gen", "2,1,linear", "--mode", "verify", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
}

#[test]
fn corrupted_kinetic_run_is_caught() {
    // The kinetic structure runs under the wrong priorities, so it maintains
    // a different triangulation than the reference.
    let n = 12;
    let s = gen_random_scenario(n, 3, MotionModel::Linear, (int(0), int(1))).unwrap();
    let r = verify_against(&s, &draw_priorities(n, 1), &draw_priorities(n, 2), 20, 1).unwrap();
    assert!(!r.passed());
    assert!(r.summary().contains("mismatch t="));
}

#[test]
fn census_mode_reports_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let o = kinetri(&["--gen", "16,2,linear", "--mode", "census", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let st = stats(dir.path());
    assert_eq!(st["certificates_CT"], "15");
    assert_eq!(st["events"], "0");
    assert!(st["max_ct_per_point"].parse::<u32>().unwrap() <= 2);
    assert!(st["max_cv_per_funnel"].parse::<u32>().unwrap() <= 3);
}

#[test]
fn scale_mode_writes_table_and_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = kinetri(&["--mode", "scale", "--sizes", "16,32", "--seeds", "1-4", "--out", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("scale.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1][2] > rows[0][2], "mean events increase with n");
    assert_ne!(stats(dir.path())["slope_changes_vs_n"], "n/a");
    let o = kinetri(&["--mode", "scale", "--sizes", "16", "--seeds", "1-2", "--out", d]);
    assert!(o.status.success());
    assert_eq!(stats(dir.path())["slope_changes_vs_n"], "n/a");
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(kinetri(&["--mode", "run"]).status.code(), Some(2));
    assert_eq!(kinetri(&["--gen", "5,1"]).status.code(), Some(2));
    assert_eq!(kinetri(&["--gen", "5,1,linear", "--window", "1,0"]).status.code(), Some(2));
    assert!(parse_list("1-3,7").unwrap() == vec![1, 2, 3, 7]);
    assert!(parse_list("3-1").is_err());
    assert_eq!(parse_window("0,1/8").unwrap(), (int(0), rat(1, 8)));
    assert_eq!(loglog_slope(&[(2.0, 4.0), (4.0, 16.0)]).map(|s| (s * 1e9).round()), Some(2e9));
    assert_eq!(loglog_slope(&[(2.0, 4.0), (2.0, 5.0)]), None);
}
