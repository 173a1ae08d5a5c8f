use kinetri_core::kds::KineticState;
use kinetri_core::motion::{draw_priorities, gen_random_scenario, int, MotionModel};
use kinetri_core::oracle::{check_triangulation, rational_between, static_snapshot};
use kinetri_core::EventTime;

fn run(n: usize, seed: u64, model: MotionModel) {
    let s = gen_random_scenario(n, seed, model, (int(0), int(1))).unwrap();
    let prio = draw_priorities(n, seed ^ 0x55);
    let mut st = KineticState::init(s.clone(), prio.clone(), int(0)).unwrap();
    st.check().unwrap();
    let mut prev = EventTime::exact(int(0));
    let mut events = 0;
    loop {
        let next = st.next_event_time().unwrap_or_else(|| EventTime::exact(int(1)));
        let next = if next.cmp_rational(&int(1)).is_lt() { next } else { EventTime::exact(int(1)) };
        let t = rational_between(&prev, &next);
        let kin = st.extract(t.clone());
        let snap = static_snapshot(&s, &prio, &t).unwrap();
        assert_eq!(kin.triangles, snap.triangles, "n={} seed={} t={} after {} events", n, seed, t, events);
        assert_eq!(kin.hull, snap.hull);
        check_triangulation(&s.positions_at(&t).unwrap(), &kin.triangles).unwrap();
        st.check_certificates_at(&t).unwrap();
        match st.step().unwrap() {
            Some(r) => {
                events += 1;
                prev = r.time;
                if let Err(e) = st.check() {
                    panic!("n={} seed={} event {} ({:?}): {}", n, seed, events, r.kind, e);
                }
            }
            None => break,
        }
    }
}

#[test]
fn linear_small() {
    for seed in 0..10 {
        run(8, seed, MotionModel::Linear);
    }
}

#[test]
fn linear_medium() {
    for seed in 0..4 {
        run(24, seed, MotionModel::Linear);
    }
}

#[test]
fn quadratic_small() {
    for seed in 0..6 {
        run(10, seed, MotionModel::Quadratic);
    }
}
