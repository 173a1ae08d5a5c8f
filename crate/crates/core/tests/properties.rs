use std::cmp::Ordering;

use kinetri_core::kernel::{collinearity_times, compare_times, isolate_roots, orient_points, Frame, StaticFrame};
use kinetri_core::motion::{draw_priorities, int, rat, Rational, Scenario, Trajectory};
use kinetri_core::{EventTime, Polynomial, Side, Sign, Vertex};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q() -> impl Strategy<Value = Rational> {
    (-60i64..60, 1i64..8).prop_map(|(p, d)| rat(p, d))
}

fn pt() -> impl Strategy<Value = (Rational, Rational)> {
    (q(), q())
}

fn exact_det(a: &(Rational, Rational), b: &(Rational, Rational), c: &(Rational, Rational)) -> Rational {
    (&b.0 - &a.0) * (&c.1 - &a.1) - (&c.0 - &a.0) * (&b.1 - &a.1)
}

fn o(a: &(Rational, Rational), b: &(Rational, Rational), c: &(Rational, Rational)) -> Sign {
    orient_points((&a.0, &a.1), (&b.0, &b.1), (&c.0, &c.1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn orient_is_antisymmetric_and_exact(a in pt(), b in pt(), c in pt()) {
        let s = o(&a, &b, &c);
        prop_assert_eq!(o(&b, &a, &c), -s);
        prop_assert_eq!(o(&a, &c, &b), -s);
        prop_assert_eq!(o(&c, &b, &a), -s);
        prop_assert_eq!(o(&b, &c, &a), s);
        prop_assert_eq!(s, Sign::of(&exact_det(&a, &b, &c)));
        prop_assert_eq!(s == Sign::Zero, exact_det(&a, &b, &c).is_zero());
    }

    #[test]
    fn frame_orient_with_sentinels_is_antisymmetric(
        pts in proptest::collection::vec((0i64..1000, 0i64..1000), 3),
        which in 0usize..6,
        lower in any::<bool>(),
    ) {
        let points = pts.iter().map(|&(x, y)| Trajectory::constant(int(0), int(1), int(x), int(y))).collect();
        let sc = Scenario::new(points, (int(0), int(1)), 0, String::new()).unwrap();
        let f = StaticFrame::new(&sc, int(0)).unwrap();
        let side = if lower { Side::Lower } else { Side::Upper };
        let all = [Vertex::Pt(0), Vertex::Pt(1), Vertex::Pt(2), Vertex::NegInf, Vertex::PosInf];
        let triples = [(0, 1, 2), (0, 1, 3), (0, 4, 1), (3, 0, 2), (3, 4, 0), (1, 2, 4)];
        let (i, j, k) = triples[which];
        let (a, b, c) = (all[i], all[j], all[k]);
        let s = f.orient(a, b, c, side);
        prop_assert_eq!(f.orient(b, c, a, side), s);
        prop_assert_eq!(f.orient(c, a, b, side), s);
        prop_assert_eq!(f.orient(b, a, c, side), -s);
        prop_assert_eq!(f.orient(a, c, b, side), -s);
    }

    #[test]
    fn filtered_sign_agrees_with_exact_evaluation(
        coeffs in proptest::collection::vec((-1_000_000i64..1_000_000, 1i64..1_000), 1..6),
        t in (-4_000i64..4_000, 1i64..1_000),
    ) {
        let p = Polynomial::new(coeffs.iter().map(|&(a, b)| rat(a, b)).collect());
        let t = rat(t.0, t.1);
        prop_assert_eq!(p.sign_at(&t), p.eval(&t).cmp(&Rational::zero()));
    }

    #[test]
    fn quadratic_roots_are_complete(c in (-40i64..40, -40i64..40, -40i64..40)) {
        // (t - r1)(t - r2) shifted so that roots land inside [0, 1] often.
        let p = Polynomial::new(vec![rat(c.0, 97), rat(c.1, 41), rat(c.2.max(1), 13)]);
        let roots = isolate_roots(&p, &int(0), &int(1)).unwrap();
        for r in &roots {
            prop_assert!(r.cmp_rational(&int(0)) != Ordering::Less && r.cmp_rational(&int(1)) != Ordering::Greater);
        }
        let samples: Vec<Rational> = (0..=400).map(|k| rat(k, 400)).collect();
        for w in samples.windows(2) {
            let (sa, sb) = (p.sign_at(&w[0]), p.sign_at(&w[1]));
            if sa != Ordering::Equal && sb != Ordering::Equal && sa != sb {
                let inside = roots.iter().filter(|r| r.cmp_rational(&w[0]) == Ordering::Greater && r.cmp_rational(&w[1]) == Ordering::Less).count();
                prop_assert_eq!(inside, 1);
            }
        }
    }
}

fn random_linear(rng: &mut ChaCha8Rng) -> Trajectory {
    let mut g = || rat(rng.random_range(-1000..=1000), 997);
    let x = Polynomial::new(vec![g(), g()]);
    let y = Polynomial::new(vec![g(), g()]);
    Trajectory::polynomial(int(0), int(1), x, y)
}

#[test]
fn collinearity_roots_are_complete_for_random_linear_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let samples: Vec<Rational> = (0..=256).map(|k| rat(k, 256)).collect();
    let mut found = 0;
    for _ in 0..1000 {
        let (a, b, c) = (random_linear(&mut rng), random_linear(&mut rng), random_linear(&mut rng));
        let roots = collinearity_times(&a, &b, &c, &(int(0), int(1))).unwrap();
        found += roots.len();
        let det = |t: &Rational| {
            let (pa, pb, pc) = (a.eval(t).unwrap(), b.eval(t).unwrap(), c.eval(t).unwrap());
            exact_det(&pa, &pb, &pc).cmp(&Rational::zero())
        };
        let signs: Vec<Ordering> = samples.iter().map(det).collect();
        for k in 0..samples.len() - 1 {
            let (sa, sb) = (signs[k], signs[k + 1]);
            if sa != Ordering::Equal && sb != Ordering::Equal && sa != sb {
                let inside = roots
                    .iter()
                    .filter(|r| r.cmp_rational(&samples[k]) == Ordering::Greater && r.cmp_rational(&samples[k + 1]) == Ordering::Less)
                    .count();
                assert_eq!(inside, 1, "sign change in gap {} without exactly one root", k);
            }
        }
        for r in &roots {
            // Every returned root is a zero: odd ones change sign across the
            // isolating interval, even ones are touches.
            if let Some(t) = r.as_rational() {
                assert_eq!(det(t), Ordering::Equal);
            } else if r.is_odd() {
                assert_ne!(r.poly().sign_at(r.lo()), r.poly().sign_at(r.hi()));
            }
        }
    }
    assert!(found > 100, "only {} roots", found);
}

fn random_times(seed: u64, k: usize) -> Vec<EventTime> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < k {
        let r1 = rat(rng.random_range(0..64), 64);
        let c = rng.random_range(1..5i64);
        // t^2 - c has irrational roots; (t - r1) rational ones; the product
        // forces equal roots across different polynomials.
        let irr = Polynomial::new(vec![rat(-c, 16), int(0), int(1)]);
        let lin = Polynomial::root_factor(&r1);
        let choice = rng.random_range(0..3);
        let p = match choice {
            0 => irr,
            1 => lin,
            _ => irr.mul(&lin),
        };
        out.extend(isolate_roots(&p, &int(0), &int(1)).unwrap());
    }
    out
}

#[test]
fn compare_times_is_a_weak_order() {
    let ts = random_times(5, 40);
    for a in &ts {
        assert_eq!(compare_times(a, a), Ordering::Equal);
        for b in &ts {
            let ab = compare_times(a, b);
            assert_eq!(compare_times(b, a), ab.reverse());
            if (a.approx() - b.approx()).abs() > 1e-9 {
                assert_eq!(ab, a.approx().partial_cmp(&b.approx()).unwrap());
            }
            for c in &ts {
                if ab != Ordering::Greater && compare_times(b, c) != Ordering::Greater {
                    assert_ne!(compare_times(a, c), Ordering::Greater);
                }
            }
        }
    }
    let mut sorted = ts.clone();
    sorted.sort_by(compare_times);
    assert!(sorted.windows(2).all(|w| compare_times(&w[0], &w[1]) != Ordering::Greater));
}

/// Chi-square statistic of observed counts against a uniform expectation.
fn chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

#[test]
fn priorities_are_uniform_permutations() {
    // All 24 permutations of four points: 23 degrees of freedom, critical
    // value 49.73 at the 0.1% level.
    let mut counts = std::collections::BTreeMap::new();
    for seed in 0..4800 {
        *counts.entry(draw_priorities(4, seed).ranks().to_vec()).or_insert(0u64) += 1;
    }
    assert_eq!(counts.len(), 24);
    let c: Vec<u64> = counts.values().copied().collect();
    assert!(chi_square(&c) < 49.73, "chi2 {}", chi_square(&c));
    // Rank of one point among ten: 9 degrees of freedom, critical value 27.88.
    let mut pos = [0u64; 10];
    for seed in 0..5000 {
        pos[draw_priorities(10, seed).rank(3) as usize - 1] += 1;
    }
    assert!(chi_square(&pos) < 27.88, "chi2 {}", chi_square(&pos));
}
