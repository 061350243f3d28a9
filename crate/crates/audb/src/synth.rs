//! Synthetic uncertain relations for benchmarks and scaling tests.

use rand::Rng;

use crate::relation::{AuRelation, RangeTuple, Schema};
use crate::value::{Kind, MultTriple, RangeValue, Scalar};

/// A uniform benchmark relation with `n` rows over schema `K, A` (both
/// real): `K` is a certain, distinct row key and `A` draws uniformly from
/// `0..range`. A row is uncertain with probability `uncertain_frac`, giving
/// `A` an interval of up to a tenth of the range and, half the time, the
/// multiplicity triple `(0, 1, 1)` instead of a certain `(1, 1, 1)`.
pub fn uniform_relation(
    rng: &mut impl Rng,
    n: usize,
    uncertain_frac: f64,
    range: u64,
) -> AuRelation {
    let schema = Schema::new(vec![
        ("K".into(), Kind::Real),
        ("A".into(), Kind::Real),
    ])
    .expect("fixed two-attribute schema");
    let mut out = AuRelation::new(schema);
    let max_width = (range / 10).max(1);
    for i in 0..n {
        let v = rng.gen_range(0..range.max(1)) as f64;
        let uncertain = rng.gen_bool(uncertain_frac);
        let a = if uncertain {
            let w = rng.gen_range(1..=max_width) as f64;
            RangeValue::reals(v, v + (w / 2.0).floor(), v + w)
        } else {
            RangeValue::reals(v, v, v)
        };
        let ann = if uncertain && rng.gen_bool(0.5) {
            MultTriple::new(0, 1, 1).expect("valid triple")
        } else {
            MultTriple::ONE
        };
        out.insert(
            RangeTuple(vec![RangeValue::certain(Scalar::Real(i as f64)), a]),
            ann,
        )
        .expect("schema-conforming row");
    }
    out
}
