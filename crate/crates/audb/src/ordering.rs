//! Sorting and top-k: deterministic operators (used for selected-guess
//! results and ground truth) and their bound-preserving range counterparts.
//!
//! A sort order is a list of attributes with directions; ties are broken by
//! the remaining schema attributes ascending in schema order, which makes the
//! deterministic order total. Positions are 0-based. The uncertain sort
//! operator splits each row into its possible duplicates and extends each
//! with a position triple computed from the multiplicities of rows certainly,
//! selected-guess, and possibly preceding it.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::algebra::select;
use crate::expr::Expr;
use crate::relation::{AuRelation, BagRelation, RangeTuple, Schema};
use crate::value::{Kind, MultTriple, RangeBool, RangeValue, Scalar};
use crate::Result;

/// Sort direction for one attribute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Asc,
    Desc,
}

/// An ordered list of (attribute, direction) sort keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SortSpec {
    pub keys: Vec<(String, Dir)>,
}

impl SortSpec {
    pub fn new(keys: Vec<(String, Dir)>) -> Self {
        SortSpec { keys }
    }

    /// All-ascending order on the given attributes.
    pub fn asc(names: &[&str]) -> Self {
        SortSpec {
            keys: names.iter().map(|n| (n.to_string(), Dir::Asc)).collect(),
        }
    }

    /// Resolve to attribute indices and append the remaining schema
    /// attributes ascending as tie-breakers, making the order total.
    pub fn resolve_full(&self, schema: &Schema) -> Result<Vec<(usize, Dir)>> {
        let mut order = Vec::with_capacity(schema.len());
        for (name, dir) in &self.keys {
            order.push((schema.index_of(name)?, *dir));
        }
        for i in 0..schema.len() {
            if !order.iter().any(|&(j, _)| j == i) {
                order.push((i, Dir::Asc));
            }
        }
        Ok(order)
    }
}

/// Total deterministic comparison of scalar tuples under a resolved order.
pub fn det_tuple_cmp(a: &[Scalar], b: &[Scalar], order: &[(usize, Dir)]) -> Result<Ordering> {
    for &(i, dir) in order {
        let ord = a[i].compare(&b[i])?;
        let ord = match dir {
            Dir::Asc => ord,
            Dir::Desc => ord.reverse(),
        };
        if ord != Ordering::Equal {
            return Ok(ord);
        }
    }
    Ok(Ordering::Equal)
}

/// Can `a` precede `b` in some realization of the intervals? Evaluated
/// optimistically per attribute: a strict win at the first level where
/// overlap permits one.
fn possibly_less(a: &RangeTuple, b: &RangeTuple, order: &[(usize, Dir)]) -> Result<bool> {
    for &(i, dir) in order {
        let (x, y) = match dir {
            Dir::Asc => (&a.values()[i], &b.values()[i]),
            Dir::Desc => (&b.values()[i], &a.values()[i]),
        };
        // Possibly x < y: the lowest x beats the highest y.
        if x.lb().le(y.ub())? && x.lb() != y.ub() {
            return Ok(true);
        }
        // Possibly equal: the intervals overlap; otherwise the order between
        // a and b is decided here.
        if !(x.lb().le(y.ub())? && y.lb().le(x.ub())?) {
            return Ok(false);
        }
    }
    Ok(false)
}

/// Can `a` precede or tie with `b` in some realization?
fn possibly_less_or_tie(a: &RangeTuple, b: &RangeTuple, order: &[(usize, Dir)]) -> Result<bool> {
    if possibly_less(a, b, order)? {
        return Ok(true);
    }
    for &(i, _) in order {
        let (x, y) = (&a.values()[i], &b.values()[i]);
        if !(x.lb().le(y.ub())? && y.lb().le(x.ub())?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The lifted tuple comparison `a ≺ b`: certainly precedes, precedes in the
/// selected-guess world, possibly precedes.
///
/// The certain component is the negation of "`b` possibly precedes or ties
/// with `a`": a tie at some prefix can still resolve into certain precedence
/// through the tie-breaking attributes, which a per-level conjunction of
/// certain comparisons would miss.
pub fn range_less(a: &RangeTuple, b: &RangeTuple, order: &[(usize, Dir)]) -> Result<RangeBool> {
    let ub = possibly_less(a, b, order)?;
    let lb = !possibly_less_or_tie(b, a, order)?;
    let sg = det_tuple_cmp(&a.sg_tuple(), &b.sg_tuple(), order)? == Ordering::Less;
    RangeBool::new(lb, sg, ub)
}

/// Position bounds of the `i`-th duplicate of `t_hat` (0-based): `i` plus the
/// certain/sg/possible multiplicity of other rows preceding it at each level.
pub fn pos_bounds(
    r: &AuRelation,
    spec: &SortSpec,
    t_hat: &RangeTuple,
    i: u64,
) -> Result<RangeValue> {
    let order = spec.resolve_full(r.schema())?;
    let (mut lb, mut sg, mut ub) = (i, i, i);
    for (other, ann) in r.rows() {
        if other == t_hat {
            continue;
        }
        let prec = range_less(other, t_hat, &order)?;
        if prec.lb {
            lb += ann.lb();
        }
        if prec.sg {
            sg += ann.sg();
        }
        if prec.ub {
            ub += ann.ub();
        }
    }
    RangeValue::new(
        Scalar::Real(lb as f64),
        Scalar::Real(sg as f64),
        Scalar::Real(ub as f64),
    )
}

/// Uncertain sort: split each row into its possible duplicates, extend each
/// with its position triple, and annotate duplicates `(1,1,1)` when certain,
/// `(0,1,1)` when selected-guess only, and `(0,0,1)` when merely possible.
pub fn sort(r: &AuRelation, spec: &SortSpec, tau: &str) -> Result<AuRelation> {
    let schema = r.schema().extend(tau, Kind::Real)?;
    let mut out = AuRelation::new(schema);
    for (tuple, ann) in r.rows() {
        for i in 0..ann.ub() {
            let pos = pos_bounds(r, spec, tuple, i)?;
            let dup_ann = if i < ann.lb() {
                MultTriple::ONE
            } else if i < ann.sg() {
                MultTriple::new(0, 1, 1).unwrap()
            } else {
                MultTriple::new(0, 0, 1).unwrap()
            };
            let mut values = tuple.values().to_vec();
            values.push(pos);
            out.insert(RangeTuple(values), dup_ann)?;
        }
    }
    Ok(out)
}

/// Top-k as a selection `τ < k` over the sort result (0-based positions,
/// strict comparison): rows certainly outside drop, rows possibly outside
/// lose their certain multiplicity.
pub fn topk(r: &AuRelation, spec: &SortSpec, k: u64, tau: &str) -> Result<AuRelation> {
    let sorted = sort(r, spec, tau)?;
    select(&sorted, &Expr::lt(Expr::var(tau), Expr::real(k as f64)))
}

/// Deterministic sort: assign each duplicate a distinct 0-based position
/// under the total tie-broken order. All output multiplicities are 1.
pub fn det_sort(r: &BagRelation, spec: &SortSpec, tau: &str) -> Result<BagRelation> {
    let order = spec.resolve_full(r.schema())?;
    let schema = r.schema().extend(tau, Kind::Real)?;
    let mut tuples: Vec<(&Vec<Scalar>, u64)> = r.rows().map(|(t, &m)| (t, m)).collect();
    sort_by_order(&mut tuples, &order)?;
    let mut out = BagRelation::new(schema);
    let mut pos = 0u64;
    for (tuple, mult) in tuples {
        for _ in 0..mult {
            let mut values = tuple.clone();
            values.push(Scalar::Real(pos as f64));
            out.insert(values, 1);
            pos += 1;
        }
    }
    Ok(out)
}

fn sort_by_order<'a>(
    tuples: &mut [(&'a Vec<Scalar>, u64)],
    order: &[(usize, Dir)],
) -> Result<()> {
    // Comparison errors cannot surface from within sort_by, so check first.
    for window in tuples.windows(2) {
        det_tuple_cmp(window[0].0, window[1].0, order)?;
    }
    tuples.sort_by(|(a, _), (b, _)| {
        det_tuple_cmp(a, b, order).expect("kinds checked above")
    });
    Ok(())
}

/// Deterministic row-based windowed aggregation.
///
/// Each duplicate's window is the positions `[pos + l, pos + u]` within its
/// partition; a partition row contributes the size of the overlap between
/// that interval and the positions it covers. One output row per duplicate,
/// merged by addition.
#[allow(clippy::too_many_arguments)]
pub fn det_window(
    r: &BagRelation,
    f: crate::algebra::AggFunc,
    attr: Option<&str>,
    output: &str,
    partition_by: &[String],
    spec: &SortSpec,
    l: i64,
    u: i64,
) -> Result<BagRelation> {
    use crate::algebra::AggFunc;

    let order = spec.resolve_full(r.schema())?;
    let g_idx = partition_by
        .iter()
        .map(|name| r.schema().index_of(name))
        .collect::<Result<Vec<_>>>()?;
    let a_idx = match attr {
        Some(name) => Some(r.schema().index_of(name)?),
        None => None,
    };
    let schema = r.schema().extend(output, Kind::Real)?;
    let mut out = BagRelation::new(schema);

    let all: Vec<(&Vec<Scalar>, u64)> = r.rows().map(|(t, &m)| (t, m)).collect();
    for &(tuple, mult) in &all {
        // The partition of this tuple, in sorted order with positions.
        let mut part: Vec<(&Vec<Scalar>, u64)> = all
            .iter()
            .filter(|(t, _)| g_idx.iter().all(|&g| t[g] == tuple[g]))
            .copied()
            .collect();
        sort_by_order(&mut part, &order)?;
        let mut starts = Vec::with_capacity(part.len());
        let mut pos = 0i64;
        for &(_, m) in &part {
            starts.push(pos);
            pos += m as i64;
        }
        let my_start = part
            .iter()
            .position(|(t, _)| *t == tuple)
            .map(|j| starts[j])
            .expect("tuple is in its own partition");

        for i in 0..mult {
            let my_pos = my_start + i as i64;
            let (lo, hi) = (my_pos + l, my_pos + u);
            // Aggregate member values weighted by window multiplicity.
            let mut sum = 0.0f64;
            let mut count = 0u64;
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for (j, &(member, m)) in part.iter().enumerate() {
                let cover = (starts[j], starts[j] + m as i64 - 1);
                let overlap = (hi.min(cover.1) - lo.max(cover.0) + 1).max(0) as u64;
                if overlap == 0 {
                    continue;
                }
                let v = match a_idx {
                    Some(a) => member[a].as_real()?,
                    None => 1.0,
                };
                sum += overlap as f64 * v;
                count += overlap;
                min = min.min(v);
                max = max.max(v);
            }
            let agg = match f {
                AggFunc::Sum => sum,
                AggFunc::Count => count as f64,
                AggFunc::Min => min,
                AggFunc::Max => max,
                AggFunc::Avg => sum / count as f64,
            };
            let mut values = tuple.clone();
            values.push(Scalar::Real(agg));
            out.insert(values, 1);
        }
    }
    Ok(out)
}
