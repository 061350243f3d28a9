//! Ad-hoc operator timing probe.



use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use audb::algebra::AggFunc;
use audb::native::{onepass_sort, onepass_window};
use audb::ordering::SortSpec;
use audb::relation::{AuRelation, RangeTuple, Schema};
use audb::value::{Kind, MultTriple, RangeValue, Scalar};
use audb::window::WindowSpec;

fn scaling_relation(seed: u64, n: usize, frac: f64) -> AuRelation {
    let mut rng = StdRng::seed_from_u64(seed);
    let schema = Schema::new(vec![("K".into(), Kind::Real), ("A".into(), Kind::Real)]).unwrap();
    let mut out = AuRelation::new(schema);
    for i in 0..n {
        let v = rng.gen_range(0..10 * n as u64) as f64;
        let uncertain = rng.gen_bool(frac);
        let a = if uncertain {
            let w = rng.gen_range(1..=100) as f64;
            RangeValue::reals(v, v + (w / 2.0).floor(), v + w)
        } else {
            RangeValue::reals(v, v, v)
        };
        let m = MultTriple::ONE;
        out.insert(
            RangeTuple(vec![RangeValue::certain(Scalar::Real(i as f64)), a]),
            m,
        )
        .unwrap();
    }
    out
}

fn cpu_now() -> std::time::Duration {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    std::time::Duration::new(ts.tv_sec as u64, ts.tv_nsec as u32)
}

fn main() {
    let order = SortSpec::asc(&["A", "K"]);
    let w = WindowSpec::new(AggFunc::Sum, Some("A"), "S", &[], order.clone(), -2, 0).unwrap();
    let small = scaling_relation(1, 10_000, 0.05);
    let big = scaling_relation(2, 100_000, 0.05);
    let mut best = [std::time::Duration::MAX; 4];
    for round in 0..5 {
        for (slot, r) in [(0usize, &small), (1, &big)] {
            let t = cpu_now();
            let _ = onepass_sort(r, &order, None, "pos").unwrap();
            best[slot] = best[slot].min(cpu_now() - t);
            let t = cpu_now();
            let _ = onepass_window(r, &w).unwrap();
            best[slot + 2] = best[slot + 2].min(cpu_now() - t);
        }
        println!(
            "round {round}: sort {:?} -> {:?} (x{:.1}), window {:?} -> {:?} (x{:.1})",
            best[0],
            best[1],
            best[1].as_secs_f64() / best[0].as_secs_f64(),
            best[2],
            best[3],
            best[3].as_secs_f64() / best[2].as_secs_f64()
        );
    }
}
