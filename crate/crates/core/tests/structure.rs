use kinetri_core::funnel::{find_tau0, retriangulate_tau0};
use kinetri_core::hulltree::{build_static, compute_bridge, pseudo_triangle_condition, NIL};
use kinetri_core::kds::{CertKey, KineticState};
use kinetri_core::kernel::{orient_points, AfterFrame, StaticFrame};
use kinetri_core::motion::{draw_priorities, gen_random_scenario, int, rat, MotionModel, Rational, Scenario};
use kinetri_core::oracle::rational_between;
use kinetri_core::{EventTime, Side, Sign, Vertex};

fn next_gap_time(st: &mut KineticState) -> Rational {
    let end = EventTime::exact(st.scenario().window.1.clone());
    let next = st.next_event_time().unwrap_or(end);
    rational_between(st.now(), &next)
}

#[test]
fn x_swap_repair_equals_fresh_init() {
    let mut swaps = 0;
    for seed in 1..=6 {
        let n = 16;
        let sc = gen_random_scenario(n, seed, MotionModel::Linear, (int(0), int(1))).unwrap();
        let prio = draw_priorities(n, seed + 100);
        let mut st = KineticState::init(sc.clone(), prio.clone(), int(0)).unwrap();
        while let Some(r) = st.step().unwrap() {
            if r.kind != kinetri_core::kds::EventKind::Ct {
                continue;
            }
            swaps += 1;
            let t = next_gap_time(&mut st);
            let fresh = KineticState::init(sc.clone(), prio.clone(), t.clone()).unwrap();
            for side in Side::BOTH {
                assert_eq!(st.tree(side).dump(), fresh.tree(side).dump(), "seed {} t {}", seed, t);
            }
            let a: Vec<_> = st.certificates().iter().map(|(k, c)| (*k, c.conditions.clone(), c.target)).collect();
            let b: Vec<_> = fresh.certificates().iter().map(|(k, c)| (*k, c.conditions.clone(), c.target)).collect();
            assert_eq!(a, b, "certificates after swap, seed {} t {}", seed, t);
        }
    }
    assert!(swaps > 20);
}

#[test]
fn census_of_small_inputs() {
    let sc = gen_random_scenario(2, 4, MotionModel::Linear, (int(0), int(1))).unwrap();
    let st = KineticState::init(sc, draw_priorities(2, 1), int(0)).unwrap();
    let c = st.census();
    assert_eq!(c.certificates[0], 1);
    assert!(c.per_point.iter().all(|p| p[0] == 1));

    let sc = gen_random_scenario(3, 4, MotionModel::Static, (int(0), int(1))).unwrap();
    let mut st = KineticState::init(sc, draw_priorities(3, 1), int(0)).unwrap();
    assert!(st.next_event_time().is_none());

    for seed in 1..=5 {
        let n = 16;
        let sc = gen_random_scenario(n, seed, MotionModel::Linear, (int(0), int(1))).unwrap();
        let st = KineticState::init(sc, draw_priorities(n, seed), int(0)).unwrap();
        let c = st.census();
        assert_eq!(c.certificates[0], n - 1);
        assert!(c.per_point.iter().all(|p| p[0] <= 2));
        assert!(c.max_cv_per_funnel <= 3);
        let ce = st.certificates().keys().filter(|k| matches!(k, CertKey::Ce(..))).count();
        assert_eq!(ce, c.certificates[1]);
        assert!(ce <= 2 * n);
        let depth = c.height.iter().max().copied().unwrap() as u32;
        assert!(c.max_ce_per_side <= depth + 2, "{} > {}", c.max_ce_per_side, depth);
        assert_eq!(c.storage.nodes, 2 * n);
    }
}

#[test]
fn tau0_retriangulation_equals_full_retriangulation() {
    let mut checked = 0;
    for seed in 1..=8 {
        let n = 24;
        let sc = gen_random_scenario(n, seed, MotionModel::Linear, (int(0), int(1))).unwrap();
        let prio = draw_priorities(n, seed);
        let mut st = KineticState::init(sc.clone(), prio.clone(), int(0)).unwrap();
        loop {
            let next = st
                .certificates()
                .iter()
                .filter_map(|(k, c)| c.failure.clone().map(|t| (t, *k)))
                .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
            let before = match next {
                Some((_, CertKey::Cv(side, v, q))) => Some((side, v, q, st.tree(side).node(v).funnel.clone())),
                _ => None,
            };
            if st.step().unwrap().is_none() {
                break;
            }
            let Some((side, v, q, old)) = before else { continue };
            let new = st.tree(side).node(v).funnel.clone();
            if new.left != old.left || new.right != old.right {
                continue;
            }
            let Ok(tau0) = find_tau0(&old, &prio, q) else { continue };
            let f = AfterFrame::new(&sc, st.now().clone());
            let mut patched = old.clone();
            retriangulate_tau0(&mut patched, &f, side, &prio, &tau0);
            assert_eq!(patched.chords, new.chords, "seed {} node {} generator {}", seed, v, q);
            checked += 1;
        }
    }
    assert!(checked > 0);
}

fn static_points(n: usize, seed: u64) -> Scenario {
    gen_random_scenario(n, seed, MotionModel::Static, (int(0), int(1))).unwrap()
}

/// Andrew's monotone chain, upper part, left to right.
fn monotone_upper(pos: &[(Rational, Rational)], ids: &[u32]) -> Vec<u32> {
    let mut ids = ids.to_vec();
    ids.sort_by(|&a, &b| pos[a as usize].cmp(&pos[b as usize]));
    let p = |i: u32| (&pos[i as usize].0, &pos[i as usize].1);
    let mut h: Vec<u32> = Vec::new();
    for &q in &ids {
        while h.len() >= 2 && orient_points(p(h[h.len() - 2]), p(h[h.len() - 1]), p(q)) != Sign::Neg {
            h.pop();
        }
        h.push(q);
    }
    h
}

#[test]
fn upper_hull_matches_monotone_chain() {
    for seed in 1..=20 {
        let n = 5 + seed as usize * 3;
        let sc = static_points(n, seed);
        let prio = draw_priorities(n, seed);
        let b = build_static(&sc, &prio, int(0)).unwrap();
        let pos = sc.positions_at(&int(0)).unwrap();
        let ids: Vec<u32> = (0..n as u32).collect();
        assert_eq!(b.trees[Side::Upper.index()].upper_hull(), monotone_upper(&pos, &ids));
        let reflected: Vec<(Rational, Rational)> = pos.iter().map(|(x, y)| (x.clone(), -y.clone())).collect();
        assert_eq!(b.trees[Side::Lower.index()].upper_hull(), monotone_upper(&reflected, &ids));
    }
}

#[test]
fn bridge_matches_brute_force() {
    for seed in 1..=30 {
        let n = 6 + (seed as usize % 15);
        let sc = static_points(n, 50 + seed);
        let f = StaticFrame::new(&sc, int(0)).unwrap();
        let pos = sc.positions_at(&int(0)).unwrap();
        let mut ids: Vec<u32> = (0..n as u32).collect();
        ids.sort_by(|&a, &b| pos[a as usize].0.cmp(&pos[b as usize].0));
        let split = 1 + (seed as usize * 7) % (n - 1);
        let (l, r) = ids.split_at(split);
        let lh = monotone_upper(&pos, l);
        let rh = monotone_upper(&pos, r);
        let lv: Vec<Vertex> = lh.iter().map(|&p| Vertex::Pt(p)).collect();
        let rv: Vec<Vertex> = rh.iter().map(|&p| Vertex::Pt(p)).collect();
        let (i, j) = compute_bridge(&f, Side::Upper, &lv, &rv);
        let p = |i: u32| (&pos[i as usize].0, &pos[i as usize].1);
        let mut expect = None;
        for &a in l {
            for &b in r {
                if ids.iter().all(|&q| q == a || q == b || orient_points(p(a), p(b), p(q)) == Sign::Neg) {
                    expect = Some((a, b));
                }
            }
        }
        assert_eq!(Some((lh[i], rh[j])), expect, "seed {}", seed);
    }
}

#[test]
fn pseudo_triangle_condition_characterises_tree_nodes() {
    for seed in 1..=12 {
        let n = 4 + seed as usize;
        let sc = static_points(n, 80 + seed);
        let prio = draw_priorities(n, seed);
        let b = build_static(&sc, &prio, int(0)).unwrap();
        let f = StaticFrame::new(&sc, int(0)).unwrap();
        let mut seq = vec![Vertex::NegInf];
        seq.extend(b.order.iter().map(|&p| Vertex::Pt(p)));
        seq.push(Vertex::PosInf);
        let tree = &b.trees[0];
        assert_ne!(tree.root(), NIL);
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                for k in j + 1..seq.len() {
                    let Vertex::Pt(v) = seq[j] else { unreachable!() };
                    let node = tree.node(v);
                    let holds = pseudo_triangle_condition(&f, &prio, seq[i], seq[j], seq[k]);
                    assert_eq!(holds, node.lend == seq[i] && node.rend == seq[k], "seed {} triple {:?}", seed, (i, j, k));
                }
            }
        }
    }
}

#[test]
fn build_comparisons_grow_like_n_log_n() {
    let ratio = |n: usize| {
        let sc = static_points(n, 7);
        let b = build_static(&sc, &draw_priorities(n, 3), rat(1, 2)).unwrap();
        b.comparisons as f64 / (n as f64 * (n as f64).log2())
    };
    let (a, b) = (ratio(256), ratio(2048));
    assert!((a / b - 1.0).abs() < 0.3, "{} vs {}", a, b);
}
