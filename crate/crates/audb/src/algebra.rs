//! Positive relational algebra over AU relations and bound-preserving
//! group-by aggregation.
//!
//! Selection scales each multiplicity triple by the indicator triple of the
//! predicate's range evaluation; projection merges by triple addition; join
//! multiplies triples componentwise; union adds. Aggregation groups rows by
//! their selected-guess group-by values, merges group-by bounds over assigned
//! rows, and computes aggregate bounds from the minimum and maximum possible
//! contribution of every row that could fall into the group.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::expr::{eval_range, Expr};
use crate::relation::{AuRelation, RangeTuple, Schema};
use crate::value::{combine, Kind, Monoid, MultTriple, RangeValue, Scalar};
use crate::{Error, Result};

/// Static result kind of an expression over a schema.
pub fn infer_kind(e: &Expr, schema: &Schema) -> Result<Kind> {
    match e {
        Expr::Var(name) => Ok(schema.kind(schema.index_of(name)?)),
        Expr::Const(c) => Ok(c.kind()),
        Expr::Add(..) | Expr::Mul(..) => Ok(Kind::Real),
        Expr::Not(..) | Expr::And(..) | Expr::Or(..) | Expr::Eq(..) | Expr::Le(..) => {
            Ok(Kind::Bool)
        }
        Expr::If(_, t, f) => {
            let (kt, kf) = (infer_kind(t, schema)?, infer_kind(f, schema)?);
            if kt != kf {
                return Err(Error::KindMismatch {
                    left: kt,
                    right: kf,
                });
            }
            Ok(kt)
        }
    }
}

/// Keep each row scaled by the indicator triple of `θ`; rows that certainly
/// fail are dropped.
pub fn select(r: &AuRelation, theta: &Expr) -> Result<AuRelation> {
    let mut out = AuRelation::new(r.schema().clone());
    for (tuple, ann) in r.rows() {
        let cond = eval_range(theta, &r.env_for(tuple))?.as_bools()?;
        out.insert(tuple.clone(), ann.scale_by(cond))?;
    }
    Ok(out)
}

/// Generalized projection: evaluate each target expression per row and merge
/// equal projected tuples by triple addition.
pub fn project(r: &AuRelation, targets: &[(Expr, String)]) -> Result<AuRelation> {
    let schema = Schema::new(
        targets
            .iter()
            .map(|(e, name)| Ok((name.clone(), infer_kind(e, r.schema())?)))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let mut out = AuRelation::new(schema);
    for (tuple, ann) in r.rows() {
        let env = r.env_for(tuple);
        let values = targets
            .iter()
            .map(|(e, _)| eval_range(e, &env))
            .collect::<Result<Vec<_>>>()?;
        out.insert(RangeTuple(values), *ann)?;
    }
    Ok(out)
}

/// θ-join: cross product with componentwise triple multiplication, then the
/// predicate applied as a selection. Attribute names must not collide.
pub fn join(r1: &AuRelation, r2: &AuRelation, theta: Option<&Expr>) -> Result<AuRelation> {
    let mut attrs = r1.schema().attrs().to_vec();
    attrs.extend(r2.schema().attrs().to_vec());
    let schema = Schema::new(attrs)?;
    let mut out = AuRelation::new(schema);
    for (t1, a1) in r1.rows() {
        for (t2, a2) in r2.rows() {
            let mut values = t1.values().to_vec();
            values.extend(t2.values().to_vec());
            out.insert(RangeTuple(values), a1.mul(a2))?;
        }
    }
    match theta {
        Some(theta) => select(&out, theta),
        None => Ok(out),
    }
}

/// Bag union: triples of equal tuples add. Schemas must match exactly.
pub fn union(r1: &AuRelation, r2: &AuRelation) -> Result<AuRelation> {
    if r1.schema() != r2.schema() {
        return Err(Error::SchemaMismatch {
            detail: "union requires identical schemas".into(),
        });
    }
    let mut out = r1.clone();
    for (tuple, ann) in r2.rows() {
        out.insert(tuple.clone(), *ann)?;
    }
    Ok(out)
}

/// Aggregation functions. All operate on real-valued attributes; `count`
/// ignores its attribute argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggFunc {
    Sum,
    Count,
    Min,
    Max,
    Avg,
}

impl AggFunc {
    fn monoid(&self) -> Monoid {
        match self {
            AggFunc::Sum | AggFunc::Count | AggFunc::Avg => Monoid::Sum,
            AggFunc::Min => Monoid::Min,
            AggFunc::Max => Monoid::Max,
        }
    }
}

/// One group during aggregation: the rows assigned to its sg key.
struct Group<'a> {
    rows: Vec<(&'a RangeTuple, &'a MultTriple)>,
    /// Merged per-attribute bounds over assigned rows (sg = the group key).
    bounds: Vec<RangeValue>,
}

fn scalar_min(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    Ok(if a.le(b)? { a.clone() } else { b.clone() })
}

fn scalar_max(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    Ok(if a.le(b)? { b.clone() } else { a.clone() })
}

/// A row's group membership is uncertain if any group-by value is uncertain
/// or the row need not exist.
fn uncertain_group(g_values: &[RangeValue], ann: &MultTriple) -> bool {
    ann.lb() == 0 || g_values.iter().any(|v| !v.is_certain())
}

/// Closed-interval overlap on every group-by attribute.
fn boxes_overlap(a: &[RangeValue], b: &[RangeValue]) -> Result<bool> {
    for (va, vb) in a.iter().zip(b) {
        if !(va.lb().le(vb.ub())? && vb.lb().le(va.ub())?) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn clamp(v: f64, lo: f64, hi: f64) -> f64 {
    v.max(lo).min(hi)
}

/// Group-by aggregation (or full-relation aggregation when `group_by` is
/// empty). The output schema is the group-by attributes followed by `output`.
pub fn aggregate(
    r: &AuRelation,
    group_by: &[String],
    f: AggFunc,
    attr: Option<&str>,
    output: &str,
) -> Result<AuRelation> {
    let g_idx = group_by
        .iter()
        .map(|name| r.schema().index_of(name))
        .collect::<Result<Vec<_>>>()?;
    let a_idx = match (f, attr) {
        (AggFunc::Count, _) => None,
        (_, Some(name)) => {
            let idx = r.schema().index_of(name)?;
            if r.schema().kind(idx) != Kind::Real {
                return Err(Error::TypeMismatch {
                    expected: Kind::Real,
                    found: r.schema().kind(idx),
                });
            }
            Some(idx)
        }
        (_, None) => {
            return Err(Error::InvalidArgument {
                detail: format!("{f:?} requires an aggregation attribute"),
            })
        }
    };

    let mut attrs: Vec<(String, Kind)> = g_idx
        .iter()
        .map(|&i| r.schema().attrs()[i].clone())
        .collect();
    attrs.push((output.to_owned(), Kind::Real));
    let schema = Schema::new(attrs)?;
    let mut out = AuRelation::new(schema);

    // The value a row feeds into the aggregate: its attribute, or a certain 1
    // for count.
    let agg_input = |tuple: &RangeTuple| -> RangeValue {
        match a_idx {
            Some(i) => tuple.values()[i].clone(),
            None => RangeValue::certain(Scalar::Real(1.0)),
        }
    };

    if group_by.is_empty() {
        // Single output row that always exists with multiplicity (1, 1, 1).
        let triple = aggregate_values(
            r.rows().collect::<Vec<_>>().as_slice(),
            f,
            &agg_input,
            &|_, ann| ann.lb() == 0,
        )?;
        out.insert(RangeTuple(vec![triple]), MultTriple::ONE)?;
        return Ok(out);
    }

    // Assign rows to groups by their sg group-by values and merge bounds.
    let mut groups: BTreeMap<Vec<Scalar>, Group> = BTreeMap::new();
    for (tuple, ann) in r.rows() {
        let g_values: Vec<RangeValue> = g_idx.iter().map(|&i| tuple.values()[i].clone()).collect();
        let key: Vec<Scalar> = g_values.iter().map(|v| v.sg().clone()).collect();
        let group = groups.entry(key).or_insert_with(|| Group {
            rows: Vec::new(),
            bounds: g_values.clone(),
        });
        for (bound, v) in group.bounds.iter_mut().zip(&g_values) {
            *bound = RangeValue::new(
                scalar_min(bound.lb(), v.lb())?,
                bound.sg().clone(),
                scalar_max(bound.ub(), v.ub())?,
            )?;
        }
        group.rows.push((tuple, ann));
    }

    // Uncertain-group rows may fall into any group whose merged bounds their
    // own group-by box overlaps; collect them once.
    let floating: Vec<(&RangeTuple, &MultTriple, Vec<RangeValue>)> = r
        .rows()
        .filter_map(|(tuple, ann)| {
            let g_values: Vec<RangeValue> =
                g_idx.iter().map(|&i| tuple.values()[i].clone()).collect();
            if g_values.iter().any(|v| !v.is_certain()) {
                Some((tuple, ann, g_values))
            } else {
                None
            }
        })
        .collect();

    for group in groups.values() {
        // Contributors: certainly-keyed rows of this group plus overlapping
        // uncertain-keyed rows (which may or may not end up in the group).
        let mut contributors: Vec<(&RangeTuple, &MultTriple)> = Vec::new();
        for &(tuple, ann) in &group.rows {
            let certain_key = g_idx.iter().all(|&i| tuple.values()[i].is_certain());
            if certain_key {
                contributors.push((tuple, ann));
            }
        }
        for (tuple, ann, g_values) in &floating {
            if boxes_overlap(g_values, &group.bounds)? {
                contributors.push((tuple, ann));
            }
        }

        let uncertain = |tuple: &RangeTuple, ann: &MultTriple| {
            let g_values: Vec<RangeValue> =
                g_idx.iter().map(|&i| tuple.values()[i].clone()).collect();
            uncertain_group(&g_values, ann)
        };
        let mut value = aggregate_values(&contributors, f, &agg_input, &uncertain)?;
        // The sg aggregate comes from the rows actually assigned here.
        let sg_value = sg_aggregate(&group.rows, f, &agg_input)?;
        value = finalize_group_value(value, sg_value, f)?;

        let ann = group_annotation(&group.rows, &g_idx);
        let mut values = group.bounds.clone();
        values.push(value);
        out.insert(RangeTuple(values), ann)?;
    }
    Ok(out)
}

/// Bounds of the aggregate over a contributor set: rows with uncertain group
/// membership contribute at least/at most the monoid's neutral element.
fn aggregate_values(
    rows: &[(&RangeTuple, &MultTriple)],
    f: AggFunc,
    agg_input: &dyn Fn(&RangeTuple) -> RangeValue,
    uncertain: &dyn Fn(&RangeTuple, &MultTriple) -> bool,
) -> Result<RangeValue> {
    if f == AggFunc::Avg {
        let sum = aggregate_values(rows, AggFunc::Sum, agg_input, uncertain)?;
        let cnt = aggregate_values(rows, AggFunc::Count, agg_input, uncertain)?;
        return divide_intervals(&sum, &cnt);
    }
    let monoid = f.monoid();
    let (mut lb, mut sg, mut ub) = (monoid.neutral(), monoid.neutral(), monoid.neutral());
    for &(tuple, ann) in rows {
        let m = if f == AggFunc::Count {
            RangeValue::certain(Scalar::Real(1.0))
        } else {
            agg_input(tuple)
        };
        let (clb, csg, cub) = combine(ann, &m, monoid)?.as_reals()?;
        if uncertain(tuple, ann) {
            lb = monoid.add(lb, clb.min(monoid.neutral()));
            ub = monoid.add(ub, cub.max(monoid.neutral()));
        } else {
            lb = monoid.add(lb, clb);
            ub = monoid.add(ub, cub);
        }
        if ann.sg() > 0 {
            sg = monoid.add(sg, csg);
        }
    }
    RangeValue::new(
        Scalar::Real(lb),
        Scalar::Real(clamp(sg, lb, ub)),
        Scalar::Real(ub),
    )
}

/// The deterministic aggregate over the selected-guess members of a group, or
/// `None` when the group is absent from the selected-guess world.
fn sg_aggregate(
    rows: &[(&RangeTuple, &MultTriple)],
    f: AggFunc,
    agg_input: &dyn Fn(&RangeTuple) -> RangeValue,
) -> Result<Option<f64>> {
    if f == AggFunc::Avg {
        let (Some(sum), Some(cnt)) = (
            sg_aggregate(rows, AggFunc::Sum, agg_input)?,
            sg_aggregate(rows, AggFunc::Count, agg_input)?,
        ) else {
            return Ok(None);
        };
        return Ok(Some(sum / cnt));
    }
    let monoid = f.monoid();
    let mut acc = None;
    for &(tuple, ann) in rows {
        if ann.sg() == 0 {
            continue;
        }
        let m = if f == AggFunc::Count {
            1.0
        } else {
            agg_input(tuple).as_reals()?.1
        };
        let v = monoid.base(ann.sg(), m);
        acc = Some(match acc {
            None => v,
            Some(a) => monoid.add(a, v),
        });
    }
    Ok(acc)
}

/// Pin the sg component to the group's deterministic aggregate and apply the
/// count-specific lower bound: a group output only exists in worlds where the
/// group is non-empty, so its count is at least one.
fn finalize_group_value(value: RangeValue, sg_value: Option<f64>, f: AggFunc) -> Result<RangeValue> {
    let (mut lb, mut sg, ub) = value.as_reals()?;
    if f == AggFunc::Count {
        lb = lb.max(1.0);
    }
    if let Some(v) = sg_value {
        sg = v;
    }
    RangeValue::new(
        Scalar::Real(lb),
        Scalar::Real(clamp(sg, lb, ub)),
        Scalar::Real(ub),
    )
}

/// Interval division for avg; the count interval is clamped to be at least
/// one since a group output only exists when the group has a member.
pub(crate) fn divide_intervals(sum: &RangeValue, cnt: &RangeValue) -> Result<RangeValue> {
    let (slb, ssg, sub) = sum.as_reals()?;
    let (clb, csg, cub) = cnt.as_reals()?;
    let clb = clb.max(1.0);
    let cub = cub.max(clb);
    let csg = clamp(csg, clb, cub);
    let lb = (slb / clb).min(slb / cub);
    let ub = (sub / clb).max(sub / cub);
    RangeValue::new(
        Scalar::Real(lb),
        Scalar::Real(clamp(ssg / csg, lb, ub)),
        Scalar::Real(ub),
    )
}

/// Multiplicity triple of one group output row.
///
/// Certain lower bound: the row exists when some certainly-grouped member
/// certainly exists (collapsed to one by duplicate elimination). Upper bound:
/// all certainly-keyed members form one group; each uncertainly-keyed member
/// may form its own groups, up to its multiplicity.
fn group_annotation(rows: &[(&RangeTuple, &MultTriple)], g_idx: &[usize]) -> MultTriple {
    let mut lb_sum = 0u64;
    let mut sg_sum = 0u64;
    let mut naive_ub = 0u64;
    let mut has_certain_key = false;
    let mut uncertain_ub = 0u64;
    for &(tuple, ann) in rows {
        let g_values: Vec<RangeValue> = g_idx.iter().map(|&i| tuple.values()[i].clone()).collect();
        let certain_key = g_values.iter().all(RangeValue::is_certain);
        if !uncertain_group(&g_values, ann) {
            lb_sum += ann.lb();
        }
        sg_sum += ann.sg();
        naive_ub += ann.ub();
        if certain_key {
            has_certain_key = true;
        } else {
            uncertain_ub += ann.ub();
        }
    }
    let refined_ub = (uncertain_ub + u64::from(has_certain_key)).min(naive_ub);
    MultTriple::new(
        lb_sum.min(1),
        sg_sum.min(1).min(refined_ub),
        refined_ub,
    )
    .expect("lb ≤ sg ≤ ub by construction")
}
