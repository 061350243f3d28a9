//! Row-based windowed aggregation over uncertain relations.
//!
//! Each duplicate of a row aggregates over the frame of sort positions
//! `[pos + l, pos + u]` within its partition. Because positions, partition
//! membership, and row multiplicities are all uncertain, the window of a row
//! splits into members *certainly* in the frame in every realization and
//! members only *possibly* in it. Value bounds combine all certain members
//! with a worst-case / best-case selection of possible members, capped by the
//! fixed frame size `u − l + 1`; the selected-guess column follows ordinary
//! deterministic window semantics over the selected-guess positions.

use crate::algebra::{divide_intervals, AggFunc};
use crate::expr::range_eq;
use crate::ordering::{pos_bounds, SortSpec};
use crate::relation::{AuRelation, RangeTuple, Schema};
use crate::value::{Kind, MultTriple, RangeValue, Scalar};
use crate::{Error, Result};

/// A row-based window aggregation query: `f(attr) OVER (PARTITION BY
/// partition_by ORDER BY order ROWS BETWEEN l AND u)` emitted as `output`.
///
/// Frame offsets are row counts relative to the current row's position;
/// `l ≤ 0 ≤ u` or `l ≤ u ≤ 0`, so the frame never excludes positions on both
/// sides of the current row in the same direction.
#[derive(Clone, Debug)]
pub struct WindowSpec {
    pub f: AggFunc,
    pub attr: Option<String>,
    pub output: String,
    pub partition_by: Vec<String>,
    pub order: SortSpec,
    pub l: i64,
    pub u: i64,
}

impl WindowSpec {
    pub fn new(
        f: AggFunc,
        attr: Option<&str>,
        output: &str,
        partition_by: &[&str],
        order: SortSpec,
        l: i64,
        u: i64,
    ) -> Result<Self> {
        if l > u || l > 0 {
            return Err(Error::InvalidArgument {
                detail: format!("invalid window frame [{l}, {u}]"),
            });
        }
        if attr.is_none() && f != AggFunc::Count {
            return Err(Error::InvalidArgument {
                detail: format!("window function {f:?} requires an attribute"),
            });
        }
        Ok(WindowSpec {
            f,
            attr: attr.map(str::to_string),
            output: output.to_string(),
            partition_by: partition_by.iter().map(|s| s.to_string()).collect(),
            order,
            l,
            u,
        })
    }

    /// The fixed number of positions in the frame.
    pub fn size(&self) -> u64 {
        (self.u - self.l + 1) as u64
    }
}

/// How strongly one candidate row belongs to the window of the current row:
/// its multiplicity certainly in the frame, in the selected-guess frame, and
/// possibly in the frame beyond the certain part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowMembership {
    pub cert: u64,
    pub sg: u64,
    pub poss_extra: u64,
}

/// Split every row into its possible duplicates, each with an extra
/// duplicate-id column named `dup` and multiplicity upper bound 1.
///
/// Duplicate `i` keeps annotation `(1,1,1)` while `i < lb`, `(0,1,1)` while
/// `lb ≤ i < sg`, and `(0,0,1)` beyond, so the split is faithful to the
/// original triple. The id column makes duplicates distinct rows, which gives
/// each its own window below.
pub fn flatten(r: &AuRelation, dup: &str) -> Result<AuRelation> {
    let schema = r.schema().extend(dup, Kind::Real)?;
    let mut out = AuRelation::new(schema);
    for (tuple, ann) in r.rows() {
        for i in 0..ann.ub() {
            let dup_ann = if i < ann.lb() {
                MultTriple::ONE
            } else if i < ann.sg() {
                MultTriple::new(0, 1, 1).unwrap()
            } else {
                MultTriple::new(0, 0, 1).unwrap()
            };
            let mut values = tuple.values().to_vec();
            values.push(RangeValue::certain(Scalar::Real(i as f64)));
            out.insert(RangeTuple(values), dup_ann)?;
        }
    }
    Ok(out)
}

/// The rows that may share `t_hat`'s partition: every row whose group values
/// can coincide with `t_hat`'s, with its annotation scaled by the equality
/// indicator. `t_hat` itself keeps its full annotation — a row always shares
/// its own partition even when its group values are uncertain.
pub fn partition_of(r: &AuRelation, t_hat: &RangeTuple, group_by: &[String]) -> Result<AuRelation> {
    let g_idx = group_by
        .iter()
        .map(|name| r.schema().index_of(name))
        .collect::<Result<Vec<_>>>()?;
    let mut out = AuRelation::new(r.schema().clone());
    for (tuple, ann) in r.rows() {
        let ann = if tuple == t_hat {
            *ann
        } else {
            let mut scaled = *ann;
            for &g in &g_idx {
                let ind = range_eq(&tuple.values()[g], &t_hat.values()[g])?;
                scaled = scaled.scale_by(ind);
            }
            scaled
        };
        if !ann.is_zero() {
            out.insert(tuple.clone(), ann)?;
        }
    }
    Ok(out)
}

/// Membership of a candidate with position bounds `pos_o` in the window of a
/// row with position bounds `pos_t`.
///
/// The frame certainly covers positions `[pos_t.ub + l, pos_t.lb + u]` (the
/// intersection over all realizations) and possibly covers
/// `[pos_t.lb + l, pos_t.ub + u]` (the union). A candidate is certainly in
/// the window when its whole position interval fits the certain coverage and
/// possibly in it when the intervals intersect. When the frame contains
/// offset 0, the row is always a certain member of its own window regardless
/// of how uncertain its absolute position is.
pub(crate) fn membership(
    pos_t: (i64, i64, i64),
    pos_o: (i64, i64, i64),
    ann: &MultTriple,
    l: i64,
    u: i64,
    is_self: bool,
) -> WindowMembership {
    let (cert_lo, cert_hi) = (pos_t.2 + l, pos_t.0 + u);
    let (poss_lo, poss_hi) = (pos_t.0 + l, pos_t.2 + u);
    let (sg_lo, sg_hi) = (pos_t.1 + l, pos_t.1 + u);
    let mut cert = if pos_o.0 >= cert_lo && pos_o.2 <= cert_hi {
        ann.lb()
    } else {
        0
    };
    if is_self && l <= 0 && 0 <= u {
        cert = cert.max(1);
    }
    let poss = if pos_o.2 >= poss_lo && pos_o.0 <= poss_hi {
        ann.ub()
    } else {
        0
    };
    let sg = if ann.sg() > 0 && pos_o.1 >= sg_lo && pos_o.1 <= sg_hi {
        ann.sg()
    } else {
        0
    };
    WindowMembership {
        cert,
        sg,
        poss_extra: poss.saturating_sub(cert.min(poss)),
    }
}

/// Membership triples for every row of `t_hat`'s partition, with positions
/// computed under `order` within the partition.
pub fn window_membership(
    part: &AuRelation,
    t_hat: &RangeTuple,
    order: &SortSpec,
    l: i64,
    u: i64,
) -> Result<Vec<(RangeTuple, MultTriple, WindowMembership)>> {
    let as_i64 = |v: &RangeValue| -> Result<(i64, i64, i64)> {
        let (a, b, c) = v.as_reals()?;
        Ok((a as i64, b as i64, c as i64))
    };
    let pos_t = as_i64(&pos_bounds(part, order, t_hat, 0)?)?;
    let mut out = Vec::new();
    for (tuple, ann) in part.rows() {
        let pos_o = as_i64(&pos_bounds(part, order, tuple, 0)?)?;
        let m = membership(pos_t, pos_o, ann, l, u, tuple == t_hat);
        out.push((tuple.clone(), *ann, m));
    }
    Ok(out)
}

/// One window member's aggregation-attribute bounds together with its
/// membership strength.
pub(crate) struct Contribution {
    pub(crate) lb: f64,
    pub(crate) sg: f64,
    pub(crate) ub: f64,
    pub(crate) memb: WindowMembership,
}

/// Lower and upper sum over a window of capacity `w`: all certain members
/// plus, in the `w − Σcert` positions that remain, the possible members that
/// push the bound furthest — the most negative lower-bound values downward,
/// the largest positive upper-bound values upward.
fn sum_bounds(contribs: &[Contribution], w: u64) -> (f64, f64) {
    let cert_total: u64 = contribs.iter().map(|c| c.memb.cert).sum();
    let cap = w.saturating_sub(cert_total) as usize;
    let mut lb: f64 = contribs.iter().map(|c| c.memb.cert as f64 * c.lb).sum();
    let mut ub: f64 = contribs.iter().map(|c| c.memb.cert as f64 * c.ub).sum();
    let mut neg: Vec<f64> = Vec::new();
    let mut pos: Vec<f64> = Vec::new();
    for c in contribs {
        for _ in 0..c.memb.poss_extra {
            if c.lb < 0.0 {
                neg.push(c.lb);
            }
            if c.ub > 0.0 {
                pos.push(c.ub);
            }
        }
    }
    neg.sort_by(f64::total_cmp);
    pos.sort_by(|a, b| f64::total_cmp(b, a));
    lb += neg.iter().take(cap).sum::<f64>();
    ub += pos.iter().take(cap).sum::<f64>();
    (lb, ub)
}

/// Aggregate one window's contributions into a value triple.
pub(crate) fn aggregate_window(contribs: &[Contribution], f: AggFunc, w: u64) -> Result<RangeValue> {
    let sg_agg = |values: &dyn Fn(&Contribution) -> f64| -> (f64, u64) {
        let mut acc = match f {
            AggFunc::Min => f64::INFINITY,
            AggFunc::Max => f64::NEG_INFINITY,
            _ => 0.0,
        };
        let mut n = 0u64;
        for c in contribs.iter().filter(|c| c.memb.sg > 0) {
            let v = values(c);
            acc = match f {
                AggFunc::Min => acc.min(v),
                AggFunc::Max => acc.max(v),
                _ => acc + c.memb.sg as f64 * v,
            };
            n += c.memb.sg;
        }
        (acc, n)
    };
    let triple = |lb: f64, sg: f64, ub: f64| {
        RangeValue::new(
            Scalar::Real(lb),
            Scalar::Real(sg.max(lb).min(ub)),
            Scalar::Real(ub),
        )
    };
    match f {
        AggFunc::Sum => {
            let (lb, ub) = sum_bounds(contribs, w);
            triple(lb, sg_agg(&|c| c.sg).0, ub)
        }
        AggFunc::Count => {
            let ones: Vec<Contribution> = contribs
                .iter()
                .map(|c| Contribution { lb: 1.0, sg: 1.0, ub: 1.0, memb: c.memb })
                .collect();
            let (lb, ub) = sum_bounds(&ones, w);
            triple(lb, sg_agg(&|_| 1.0).0, ub)
        }
        AggFunc::Min | AggFunc::Max => {
            let extreme = |acc: f64, v: f64| match f {
                AggFunc::Min => acc.min(v),
                _ => acc.max(v),
            };
            let neutral = match f {
                AggFunc::Min => f64::INFINITY,
                _ => f64::NEG_INFINITY,
            };
            // Any possible member may enter the window and push the result
            // outward; only certain members cap it from the other side.
            let mut outer = neutral;
            let mut inner = neutral;
            for c in contribs {
                if c.memb.cert > 0 || c.memb.poss_extra > 0 {
                    outer = extreme(outer, if f == AggFunc::Min { c.lb } else { c.ub });
                }
                if c.memb.cert > 0 {
                    inner = extreme(inner, if f == AggFunc::Min { c.ub } else { c.lb });
                }
            }
            let (lb, ub) = match f {
                AggFunc::Min => (outer, inner),
                _ => (inner, outer),
            };
            triple(lb, sg_agg(&|c| c.sg).0, ub)
        }
        AggFunc::Avg => {
            let (slb, sub) = sum_bounds(contribs, w);
            let (ssg, _) = sg_agg(&|c| c.sg);
            let ones: Vec<Contribution> = contribs
                .iter()
                .map(|c| Contribution { lb: 1.0, sg: 1.0, ub: 1.0, memb: c.memb })
                .collect();
            let (clb, cub) = sum_bounds(&ones, w);
            let (_, csg) = sg_agg(&|c| c.sg);
            let sum = RangeValue::new(
                Scalar::Real(slb),
                Scalar::Real(ssg.max(slb).min(sub)),
                Scalar::Real(sub),
            )?;
            let cnt = RangeValue::new(
                Scalar::Real(clb),
                Scalar::Real((csg as f64).max(clb).min(cub)),
                Scalar::Real(cub),
            )?;
            divide_intervals(&sum, &cnt)
        }
    }
}

/// Row-based windowed aggregation: extend every row with a bounds triple for
/// `f(attr)` over its frame.
///
/// The relation is first flattened so each duplicate carries its own window;
/// the final projection drops the duplicate id again, merging duplicates
/// whose aggregate triples coincide.
pub fn window_aggregate(r: &AuRelation, spec: &WindowSpec) -> Result<AuRelation> {
    let a_idx = match &spec.attr {
        Some(name) => {
            let idx = r.schema().index_of(name)?;
            if r.schema().kind(idx) != Kind::Real {
                return Err(Error::TypeMismatch {
                    expected: Kind::Real,
                    found: r.schema().kind(idx),
                });
            }
            Some(idx)
        }
        None => None,
    };
    for name in &spec.partition_by {
        r.schema().index_of(name)?;
    }
    let dup = fresh_name(r.schema(), "#dup");
    let flat = flatten(r, &dup)?;
    let schema = r.schema().extend(&spec.output, Kind::Real)?;
    let mut out = AuRelation::new(schema);
    let as_i64 = |v: &RangeValue| -> Result<(i64, i64, i64)> {
        let (a, b, c) = v.as_reals()?;
        Ok((a as i64, b as i64, c as i64))
    };
    // Position bounds depend only on the partition, not on the current row,
    // so rows with equal partitions — always, under empty or certain
    // grouping — share one set of per-row positions.
    type Positions = Vec<(RangeTuple, MultTriple, (i64, i64, i64))>;
    let mut parts: Vec<(AuRelation, Positions)> = Vec::new();
    for (t_hat, ann) in flat.rows() {
        let part = partition_of(&flat, t_hat, &spec.partition_by)?;
        let idx = match parts.iter().position(|(rel, _)| *rel == part) {
            Some(i) => i,
            None => {
                let mut pos = Vec::with_capacity(part.len());
                for (tuple, m) in part.rows() {
                    let p = as_i64(&pos_bounds(&part, &spec.order, tuple, 0)?)?;
                    pos.push((tuple.clone(), *m, p));
                }
                parts.push((part, pos));
                parts.len() - 1
            }
        };
        let members = &parts[idx].1;
        let pos_t = members
            .iter()
            .find(|(tuple, _, _)| tuple == t_hat)
            .map(|(_, _, p)| *p)
            .expect("a row is always in its own partition");
        let contribs = members
            .iter()
            .map(|(tuple, m, pos_o)| {
                let memb = membership(pos_t, *pos_o, m, spec.l, spec.u, tuple == t_hat);
                let (lb, sg, ub) = match a_idx {
                    Some(a) => tuple.values()[a].as_reals()?,
                    None => (1.0, 1.0, 1.0),
                };
                Ok(Contribution { lb, sg, ub, memb })
            })
            .collect::<Result<Vec<_>>>()?;
        let agg = aggregate_window(&contribs, spec.f, spec.size())?;
        let mut values = t_hat.values()[..t_hat.arity() - 1].to_vec();
        values.push(agg);
        out.insert(RangeTuple(values), *ann)?;
    }
    Ok(out)
}

/// A column name not present in the schema.
pub(crate) fn fresh_name(schema: &Schema, base: &str) -> String {
    let mut name = base.to_string();
    let mut i = 0;
    while schema.names().any(|n| n == name) {
        name = format!("{base}{i}");
        i += 1;
    }
    name
}
