//! Native one-pass engine for uncertain sorting, top-k, and row-based
//! windowed aggregation.
//!
//! The reference operators compare every pair of rows; the engine here sweeps
//! the rows once in order of their earliest possible position. The key
//! observation is that the lifted comparisons reduce to total lexicographic
//! comparisons between per-row *order-lower* and *order-upper* key tuples:
//! a row possibly precedes another exactly when its lower key precedes the
//! other's upper key, and certainly precedes it exactly when its upper key
//! precedes the other's lower key. Position bounds then follow from running
//! counters and prefix sums over arrivals, and windows are aggregated from a
//! small set of live structures — the open rows, the certainly existing rows
//! by position, and a connected heap of possible window members ordered by
//! expiry and by aggregation value.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};

use crate::algebra::{select, AggFunc};
use crate::expr::Expr;
use crate::heap::ConnectedHeap;
use crate::ordering::{Dir, SortSpec};
use crate::relation::{AuRelation, RangeTuple};
use crate::value::{Kind, MultTriple, RangeValue, Scalar};
use crate::window::{
    aggregate_window, flatten, fresh_name, membership, Contribution, WindowMembership, WindowSpec,
};
use crate::{Error, Result};

/// Per-row order keys: the scalars a row contributes at each sort level when
/// it sorts as early as possible (`lb`), in the selected-guess world (`sg`),
/// and as late as possible (`ub`). Descending levels swap the interval ends
/// so "early" is always directionally smallest.
struct Keys {
    lb: Vec<Scalar>,
    sg: Vec<Scalar>,
    ub: Vec<Scalar>,
}

fn order_keys(t: &RangeTuple, order: &[(usize, Dir)]) -> Keys {
    let mut lb = Vec::with_capacity(order.len());
    let mut sg = Vec::with_capacity(order.len());
    let mut ub = Vec::with_capacity(order.len());
    for &(i, dir) in order {
        let v = &t.values()[i];
        let (lo, hi) = match dir {
            Dir::Asc => (v.lb(), v.ub()),
            Dir::Desc => (v.ub(), v.lb()),
        };
        lb.push(lo.clone());
        ub.push(hi.clone());
        sg.push(v.sg().clone());
    }
    Keys { lb, sg, ub }
}

/// Lexicographic key comparison with each level's direction applied. Keys at
/// the same level come from the same attribute, so the scalar comparison
/// cannot fail.
fn key_cmp(a: &[Scalar], b: &[Scalar], order: &[(usize, Dir)]) -> Ordering {
    for (k, &(_, dir)) in order.iter().enumerate() {
        let ord = a[k].compare(&b[k]).expect("keys share the schema kind");
        let ord = match dir {
            Dir::Asc => ord,
            Dir::Desc => ord.reverse(),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// One-pass position bounds for every row: `(lb, sg, ub)` counting the
/// multiplicity of other rows certainly / selected-guess / possibly
/// preceding it. With `k` set, rows that arrive after the certain rank has
/// already reached `k` return `None`: they certainly sort at position `k` or
/// later. Their multiplicities still feed the prefix sums, so the bounds of
/// surviving rows are unaffected.
fn sweep_positions(
    keys: &[Keys],
    anns: &[MultTriple],
    order: &[(usize, Dir)],
    k: Option<u64>,
) -> Vec<Option<(u64, u64, u64)>> {
    let n = keys.len();
    let stride = order.len();
    let total = 3 * n;
    // Dense ranks over the combined multiset of lower, selected-guess, and
    // upper keys turn every later comparison into an integer comparison.
    // Each level is ranked independently first — with a tight primitive
    // sort for real-valued levels — so the combined lexicographic sort
    // touches only contiguous integer ranks.
    let scalar_at = |e: usize, lvl: usize| -> &Scalar {
        let key = &keys[e / 3];
        match e % 3 {
            0 => &key.lb[lvl],
            1 => &key.sg[lvl],
            _ => &key.ub[lvl],
        }
    };
    let mut level_rank: Vec<u32> = vec![0; total * stride];
    let mut idx: Vec<u32> = (0..total as u32).collect();
    for (lvl, &(_, dir)) in order.iter().enumerate() {
        let reals: Option<Vec<f64>> = (0..total)
            .map(|e| match scalar_at(e, lvl) {
                // Canonicalize the negative zero so ranks agree with the
                // scalar comparison.
                Scalar::Real(v) => Some(if *v == 0.0 { 0.0 } else { *v }),
                _ => None,
            })
            .collect();
        let flip = |ord: Ordering| match dir {
            Dir::Asc => ord,
            Dir::Desc => ord.reverse(),
        };
        let level_cmp: Box<dyn Fn(usize, usize) -> Ordering> = match &reals {
            Some(vals) => Box::new(move |a, b| flip(vals[a].total_cmp(&vals[b]))),
            None => Box::new(move |a, b| {
                flip(scalar_at(a, lvl)
                    .compare(scalar_at(b, lvl))
                    .expect("keys share the schema kind"))
            }),
        };
        idx.sort_unstable_by(|&a, &b| level_cmp(a as usize, b as usize));
        let mut rank = 0u32;
        for j in 0..total {
            if j > 0 && level_cmp(idx[j - 1] as usize, idx[j] as usize) == Ordering::Less {
                rank += 1;
            }
            level_rank[idx[j] as usize * stride + lvl] = rank;
        }
    }
    let rank_key = |e: u32| &level_rank[e as usize * stride..(e as usize + 1) * stride];
    let mut combined: Vec<u32> = (0..total as u32).collect();
    combined.sort_unstable_by(|&a, &b| rank_key(a).cmp(rank_key(b)));
    let mut lb_rank = vec![0usize; n];
    let mut sg_rank = vec![0usize; n];
    let mut ub_rank = vec![0usize; n];
    let mut rank = 0usize;
    for (j, &e) in combined.iter().enumerate() {
        if j > 0 && rank_key(combined[j - 1]) < rank_key(e) {
            rank += 1;
        }
        match e as usize % 3 {
            0 => lb_rank[e as usize / 3] = rank,
            1 => sg_rank[e as usize / 3] = rank,
            _ => ub_rank[e as usize / 3] = rank,
        }
    }

    let mut arrival: Vec<usize> = (0..n).collect();
    arrival.sort_unstable_by_key(|&i| (lb_rank[i], ub_rank[i], i));

    // Prefix sums of possible multiplicity by lower rank, appended in arrival
    // order (hence sorted); a strict-rank query gives the possible
    // multiplicity of rows that can precede a given upper key.
    let mut prefix: Vec<(usize, u64)> = Vec::with_capacity(n);
    let mut cum = 0u64;
    let mut todo: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
    let mut pos_lb = vec![0u64; n];
    let mut pos_ub = vec![0u64; n];
    let mut emitted = vec![false; n];
    let mut rank_lb = 0u64;
    let mut drain = false;

    let finish =
        |j: usize, prefix: &[(usize, u64)], pos_ub: &mut [u64], emitted: &mut [bool]| {
            let cut = prefix.partition_point(|&(lr, _)| lr < ub_rank[j]);
            let mut ub = if cut == 0 { 0 } else { prefix[cut - 1].1 };
            if lb_rank[j] < ub_rank[j] {
                // The strict prefix includes the row itself whenever its own
                // position is uncertain; preceding rows exclude it.
                ub -= anns[j].ub();
            }
            pos_ub[j] = ub;
            emitted[j] = true;
        };

    for &i in &arrival {
        if !drain {
            while let Some(&Reverse((ur, j))) = todo.peek() {
                if ur >= lb_rank[i] {
                    break;
                }
                todo.pop();
                finish(j, &prefix, &mut pos_ub, &mut emitted);
                rank_lb += anns[j].lb();
            }
            if k.is_some_and(|kv| rank_lb >= kv) {
                // Every not-yet-arrived row certainly sorts at rank k or
                // later; stop tracking them but keep counting their
                // multiplicity for the upper bounds of open rows.
                drain = true;
            } else {
                pos_lb[i] = rank_lb;
                todo.push(Reverse((ub_rank[i], i)));
            }
        }
        cum += anns[i].ub();
        prefix.push((lb_rank[i], cum));
    }
    while let Some(Reverse((_, j))) = todo.pop() {
        finish(j, &prefix, &mut pos_ub, &mut emitted);
    }

    // Selected-guess ranks: the sg multiplicity of rows strictly before each
    // group of equal sg keys in the deterministic order.
    let mut by_sg: Vec<usize> = (0..n).collect();
    by_sg.sort_unstable_by_key(|&i| (sg_rank[i], i));
    let mut pos_sg = vec![0u64; n];
    let mut cum_sg = 0u64;
    let mut g = 0usize;
    while g < n {
        let mut e = g + 1;
        while e < n && sg_rank[by_sg[g]] == sg_rank[by_sg[e]] {
            e += 1;
        }
        let group_sg: u64 = by_sg[g..e].iter().map(|&i| anns[i].sg()).sum();
        for &i in &by_sg[g..e] {
            pos_sg[i] = cum_sg;
        }
        cum_sg += group_sg;
        g = e;
    }

    (0..n)
        .map(|i| emitted[i].then_some((pos_lb[i], pos_sg[i], pos_ub[i])))
        .collect()
}

/// One-pass uncertain sort, optionally truncated to the top `k` positions.
///
/// Produces exactly the result of the reference sort (and, with `k`, of the
/// reference top-k): each duplicate of each row extended with its position
/// triple under `spec`, positions 0-based. Internally the rows are visited
/// once in order of earliest possible position; a pending heap holds rows
/// whose latest possible position is still unresolved.
pub fn onepass_sort(
    r: &AuRelation,
    spec: &SortSpec,
    k: Option<u64>,
    tau: &str,
) -> Result<AuRelation> {
    let order = spec.resolve_full(r.schema())?;
    let schema = r.schema().extend(tau, Kind::Real)?;
    let rows: Vec<(&RangeTuple, &MultTriple)> = r.rows().collect();
    let keys: Vec<Keys> = rows.iter().map(|(t, _)| order_keys(t, &order)).collect();
    let anns: Vec<MultTriple> = rows.iter().map(|&(_, m)| *m).collect();
    let pos = sweep_positions(&keys, &anns, &order, k);

    // Appending the position column keeps distinct input rows distinct and
    // orders duplicates by position, so the output can be bulk-built.
    let mut built: Vec<(RangeTuple, MultTriple)> = Vec::new();
    for (ri, &(tuple, ann)) in rows.iter().enumerate() {
        let Some((lb, sg, ub)) = pos[ri] else {
            continue;
        };
        for i in 0..ann.ub() {
            let dup_ann = if i < ann.lb() {
                MultTriple::ONE
            } else if i < ann.sg() {
                MultTriple::new(0, 1, 1).unwrap()
            } else {
                MultTriple::new(0, 0, 1).unwrap()
            };
            let mut values = tuple.values().to_vec();
            values.push(RangeValue::new(
                Scalar::Real((lb + i) as f64),
                Scalar::Real((sg + i) as f64),
                Scalar::Real((ub + i) as f64),
            )?);
            built.push((RangeTuple(values), dup_ann));
        }
    }
    let out = AuRelation::from_valid_rows(schema, built);
    match k {
        Some(kv) => select(&out, &Expr::lt(Expr::var(tau), Expr::real(kv as f64))),
        None => Ok(out),
    }
}

/// A row still awaiting its window result.
struct OpenRec {
    idx: usize,
    t_lb: i64,
    t_ub: i64,
}

/// A row that may still fall into the window of a not-yet-emitted row,
/// carrying its position interval and aggregation-attribute bounds.
struct PossRec {
    idx: usize,
    t_ub: i64,
    a_lb: f64,
    a_ub: f64,
}

/// Walk one component of the possible-member heap in comparator order,
/// adding up to `limit` window members of the row at `p` to `contribs`.
/// `bound` short-circuits the walk: once a member fails it, no later member
/// in this component's order can contribute to the bound being computed.
#[allow(clippy::too_many_arguments)]
fn walk_possible(
    poss: &ConnectedHeap<PossRec>,
    component: usize,
    limit: usize,
    bound: Option<&dyn Fn(&PossRec) -> bool>,
    p: (i64, i64, i64),
    l: i64,
    u: i64,
    pos: &[(i64, i64, i64)],
    anns: &[MultTriple],
    avals: &[(f64, f64, f64)],
    seen: &mut HashSet<usize>,
    contribs: &mut Vec<Contribution>,
) {
    if limit == 0 {
        return;
    }
    let mut taken = 0usize;
    for rec in poss.sorted(component) {
        if seen.contains(&rec.idx) {
            continue;
        }
        let mut m = membership(p, pos[rec.idx], &anns[rec.idx], l, u, false);
        m.sg = 0;
        debug_assert_eq!(m.cert, 0, "certain members are collected beforehand");
        if m.poss_extra == 0 {
            continue;
        }
        if let Some(pred) = bound {
            if !pred(rec) {
                break;
            }
        }
        let (a_lb, a_sg, a_ub) = avals[rec.idx];
        contribs.push(Contribution { lb: a_lb, sg: a_sg, ub: a_ub, memb: m });
        seen.insert(rec.idx);
        taken += 1;
        if taken == limit {
            return;
        }
    }
}

/// One-pass row-based windowed aggregation without partitioning.
///
/// Produces exactly the result of the reference windowed aggregation for
/// `spec` with an empty `partition_by`. Rows are flattened, ranked by the
/// position sweep, and visited once in order of earliest possible position.
/// A row's window closes as soon as a row arrives whose earliest position
/// lies beyond the window's latest possible coverage; its bounds are then
/// assembled from the certainly existing rows indexed by position, the
/// connected heap of possible members, and a position-indexed map of
/// selected-guess values.
pub fn onepass_window(r: &AuRelation, spec: &WindowSpec) -> Result<AuRelation> {
    if !spec.partition_by.is_empty() {
        return Err(Error::InvalidArgument {
            detail: "the one-pass window engine does not support partitioning".into(),
        });
    }
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
    let dup = fresh_name(r.schema(), "#dup");
    let flat = flatten(r, &dup)?;
    let order = spec.order.resolve_full(flat.schema())?;
    let rows: Vec<(RangeTuple, MultTriple)> =
        flat.rows().map(|(t, m)| (t.clone(), *m)).collect();
    let n = rows.len();
    let keys: Vec<Keys> = rows.iter().map(|(t, _)| order_keys(t, &order)).collect();
    let anns: Vec<MultTriple> = rows.iter().map(|(_, m)| *m).collect();
    let pos: Vec<(i64, i64, i64)> = sweep_positions(&keys, &anns, &order, None)
        .into_iter()
        .map(|p| {
            let (a, b, c) = p.expect("all rows emitted without k");
            (a as i64, b as i64, c as i64)
        })
        .collect();
    let avals: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|(t, _)| match a_idx {
            Some(a) => t.values()[a].as_reals(),
            None => Ok((1.0, 1.0, 1.0)),
        })
        .collect::<Result<Vec<_>>>()?;
    let (l, u, w) = (spec.l, spec.u, spec.size());

    let mut arrival: Vec<usize> = (0..n).collect();
    arrival.sort_by_key(|&i| (pos[i].0, pos[i].2, i));

    let mut openw: ConnectedHeap<OpenRec> = ConnectedHeap::new(vec![
        Box::new(|a: &OpenRec, b: &OpenRec| (a.t_ub, a.idx).cmp(&(b.t_ub, b.idx))),
        Box::new(|a: &OpenRec, b: &OpenRec| (a.t_lb, a.idx).cmp(&(b.t_lb, b.idx))),
    ]);
    let mut poss: ConnectedHeap<PossRec> = ConnectedHeap::new(vec![
        Box::new(|a: &PossRec, b: &PossRec| (a.t_ub, a.idx).cmp(&(b.t_ub, b.idx))),
        Box::new(|a: &PossRec, b: &PossRec| {
            a.a_lb.total_cmp(&b.a_lb).then(a.idx.cmp(&b.idx))
        }),
        Box::new(|a: &PossRec, b: &PossRec| {
            b.a_ub.total_cmp(&a.a_ub).then(a.idx.cmp(&b.idx))
        }),
    ]);
    // Certainly existing rows, indexed by earliest position, each bucket
    // ordered by latest position for the containment scan.
    let mut cert: BTreeMap<i64, BTreeSet<(i64, usize)>> = BTreeMap::new();
    // Selected-guess position → selected-guess aggregation values; rows
    // whose selected-guess order keys tie completely share a position.
    let mut sgmap: BTreeMap<i64, Vec<f64>> = BTreeMap::new();

    let schema = r.schema().extend(&spec.output, Kind::Real)?;
    let mut out = AuRelation::new(schema);

    let emit = |s_idx: usize,
                    cert: &BTreeMap<i64, BTreeSet<(i64, usize)>>,
                    sgmap: &BTreeMap<i64, Vec<f64>>,
                    poss: &ConnectedHeap<PossRec>,
                    out: &mut AuRelation|
     -> Result<()> {
        let p = pos[s_idx];
        let ann_s = anns[s_idx];
        let mut contribs: Vec<Contribution> = Vec::new();
        let mut seen: HashSet<usize> = HashSet::new();
        let strip = |mut m: WindowMembership| {
            m.sg = 0;
            m
        };
        let (a_lb, a_sg, a_ub) = avals[s_idx];
        contribs.push(Contribution {
            lb: a_lb,
            sg: a_sg,
            ub: a_ub,
            memb: strip(membership(p, p, &ann_s, l, u, true)),
        });
        seen.insert(s_idx);
        // Certain members: earliest position inside the certain coverage,
        // latest position not past it.
        if p.2 + l <= p.0 + u {
            for (_, bucket) in cert.range((p.2 + l)..=(p.0 + u)) {
                for &(o_ub, o_idx) in bucket {
                    if o_ub > p.0 + u {
                        break;
                    }
                    if !seen.insert(o_idx) {
                        continue;
                    }
                    let m = strip(membership(p, pos[o_idx], &anns[o_idx], l, u, false));
                    let (b_lb, b_sg, b_ub) = avals[o_idx];
                    contribs.push(Contribution { lb: b_lb, sg: b_sg, ub: b_ub, memb: m });
                }
            }
        }
        let cert_total: u64 = contribs.iter().map(|c| c.memb.cert).sum();
        let cap = w.saturating_sub(cert_total) as usize;
        // Possible members that can move each bound, walked by value.
        let neg = |rec: &PossRec| rec.a_lb < 0.0;
        let posv = |rec: &PossRec| rec.a_ub > 0.0;
        let mut walk = |component: usize, limit: usize, bound: Option<&dyn Fn(&PossRec) -> bool>| {
            walk_possible(
                poss, component, limit, bound, p, l, u, &pos, &anns, &avals, &mut seen,
                &mut contribs,
            )
        };
        match spec.f {
            AggFunc::Sum => {
                walk(1, cap, Some(&neg));
                walk(2, cap, Some(&posv));
            }
            AggFunc::Count => walk(0, cap, None),
            AggFunc::Min => walk(1, 1, None),
            AggFunc::Max => walk(2, 1, None),
            AggFunc::Avg => {
                walk(1, cap, Some(&neg));
                walk(2, cap, Some(&posv));
                walk(0, cap, None);
            }
        }
        // Selected-guess members by position, decoupled from the bounds.
        for (_, vs) in sgmap.range((p.1 + l)..=(p.1 + u)) {
            for &v in vs {
                contribs.push(Contribution {
                    lb: v,
                    sg: v,
                    ub: v,
                    memb: WindowMembership { cert: 0, sg: 1, poss_extra: 0 },
                });
            }
        }
        let agg = aggregate_window(&contribs, spec.f, w)?;
        let tuple = &rows[s_idx].0;
        let mut values = tuple.values()[..tuple.arity() - 1].to_vec();
        values.push(agg);
        out.insert(RangeTuple(values), ann_s)
    };

    for &i in &arrival {
        openw.insert(OpenRec { idx: i, t_lb: pos[i].0, t_ub: pos[i].2 });
        if anns[i].lb() > 0 {
            cert.entry(pos[i].0).or_default().insert((pos[i].2, i));
        }
        if anns[i].sg() > 0 {
            sgmap.entry(pos[i].1).or_default().push(avals[i].1);
        }
        while openw.peek(0).is_some_and(|s| s.t_ub + u < pos[i].0) {
            let s = openw.pop(0).unwrap();
            cert = cert.split_off(&(s.t_ub + l));
            emit(s.idx, &cert, &sgmap, &poss, &mut out)?;
            // Rows whose latest position expires before every still-open or
            // future window can reach them are gone for good.
            let horizon = pos[i].0.min(openw.peek(1).map_or(i64::MAX, |m| m.t_lb));
            while poss.peek(0).is_some_and(|rec| rec.t_ub < horizon + l) {
                poss.pop(0);
            }
            sgmap = sgmap.split_off(&(horizon + l));
        }
        poss.insert(PossRec {
            idx: i,
            t_ub: pos[i].2,
            a_lb: avals[i].0,
            a_ub: avals[i].2,
        });
    }
    while let Some(s) = openw.pop(0) {
        cert = cert.split_off(&(s.t_ub + l));
        emit(s.idx, &cert, &sgmap, &poss, &mut out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{sort, topk};
    use crate::relation::Schema;
    use crate::window::window_aggregate;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ann(lb: u64, sg: u64, ub: u64) -> MultTriple {
        MultTriple::new(lb, sg, ub).unwrap()
    }

    fn ranking_example() -> AuRelation {
        AuRelation::from_rows(
            Schema::new(vec![("A".into(), Kind::Real), ("B".into(), Kind::Real)]).unwrap(),
            vec![
                (
                    RangeTuple(vec![
                        RangeValue::reals(1.0, 1.0, 1.0),
                        RangeValue::reals(1.0, 1.0, 3.0),
                    ]),
                    ann(1, 1, 2),
                ),
                (
                    RangeTuple(vec![
                        RangeValue::reals(2.0, 3.0, 3.0),
                        RangeValue::reals(15.0, 15.0, 15.0),
                    ]),
                    ann(0, 1, 1),
                ),
                (
                    RangeTuple(vec![
                        RangeValue::reals(1.0, 1.0, 2.0),
                        RangeValue::reals(2.0, 2.0, 2.0),
                    ]),
                    ann(1, 1, 1),
                ),
            ],
        )
        .unwrap()
    }

    /// Four sales terms, two with uncertain sales figures.
    fn sales_example() -> AuRelation {
        AuRelation::from_rows(
            Schema::new(vec![("Term".into(), Kind::Real), ("Sales".into(), Kind::Real)]).unwrap(),
            vec![
                (
                    RangeTuple(vec![RangeValue::reals(1.0, 1.0, 1.0), RangeValue::reals(2.0, 2.0, 3.0)]),
                    ann(1, 1, 1),
                ),
                (
                    RangeTuple(vec![RangeValue::reals(2.0, 2.0, 2.0), RangeValue::reals(2.0, 3.0, 3.0)]),
                    ann(1, 1, 1),
                ),
                (
                    RangeTuple(vec![RangeValue::reals(3.0, 3.0, 5.0), RangeValue::reals(4.0, 7.0, 7.0)]),
                    ann(1, 1, 1),
                ),
                (
                    RangeTuple(vec![RangeValue::reals(4.0, 4.0, 4.0), RangeValue::reals(4.0, 4.0, 7.0)]),
                    ann(1, 1, 1),
                ),
            ],
        )
        .unwrap()
    }

    fn random_relation(rng: &mut StdRng, max_rows: usize) -> AuRelation {
        let schema =
            Schema::new(vec![("A".into(), Kind::Real), ("B".into(), Kind::Real)]).unwrap();
        let mut r = AuRelation::new(schema);
        let rows = rng.gen_range(1..=max_rows);
        for _ in 0..rows {
            let val = |rng: &mut StdRng| {
                let lo = rng.gen_range(-3..=3) as f64;
                let width = rng.gen_range(0..=2) as f64;
                let sg = lo + rng.gen_range(0..=width as i64) as f64;
                RangeValue::reals(lo, sg, lo + width)
            };
            let a = val(rng);
            let b = val(rng);
            let lb = rng.gen_range(0..=1u64);
            let sg = lb + rng.gen_range(0..=1u64);
            let ub = (sg + rng.gen_range(0..=1u64)).max(1);
            r.insert(RangeTuple(vec![a, b]), ann(lb, sg, ub)).unwrap();
        }
        r
    }

    #[test]
    fn onepass_sort_matches_reference_on_golden_table() {
        let r = ranking_example();
        let spec = SortSpec::asc(&["A", "B"]);
        let native = onepass_sort(&r, &spec, None, "pos").unwrap();
        assert_eq!(native, sort(&r, &spec, "pos").unwrap());
        // Spot-check one duplicate-split pair.
        let first = RangeTuple(vec![
            RangeValue::reals(1.0, 1.0, 1.0),
            RangeValue::reals(1.0, 1.0, 3.0),
            RangeValue::reals(0.0, 0.0, 1.0),
        ]);
        assert_eq!(native.get(&first), Some(&ann(1, 1, 1)));
    }

    #[test]
    fn onepass_topk_matches_reference_on_sales() {
        let r = sales_example();
        let spec = SortSpec::new(vec![("Sales".into(), Dir::Desc)]);
        let native = onepass_sort(&r, &spec, Some(2), "pos").unwrap();
        assert_eq!(native, topk(&r, &spec, 2, "pos").unwrap());
        // The two certain-sales terms cannot reach the top two positions.
        for (tuple, _) in native.rows() {
            let term = tuple.values()[0].as_reals().unwrap().0;
            assert!(term >= 3.0, "term {term} should have been pruned");
        }
        assert_eq!(native.len(), 2);
    }

    #[test]
    fn onepass_sort_differential_random() {
        let mut rng = StdRng::seed_from_u64(11);
        for round in 0..60 {
            let r = random_relation(&mut rng, 8);
            let spec = if round % 2 == 0 {
                SortSpec::asc(&["A"])
            } else {
                SortSpec::new(vec![("B".into(), Dir::Desc), ("A".into(), Dir::Asc)])
            };
            assert_eq!(
                onepass_sort(&r, &spec, None, "pos").unwrap(),
                sort(&r, &spec, "pos").unwrap(),
                "sort mismatch on {r:?}"
            );
            for k in [0, 1, 2, 5] {
                assert_eq!(
                    onepass_sort(&r, &spec, Some(k), "pos").unwrap(),
                    topk(&r, &spec, k, "pos").unwrap(),
                    "top-{k} mismatch on {r:?}"
                );
            }
        }
    }

    #[test]
    fn onepass_window_matches_reference_on_sales_following_frame() {
        let r = sales_example();
        let spec = WindowSpec::new(
            AggFunc::Sum,
            Some("Sales"),
            "X",
            &[],
            SortSpec::asc(&["Term"]),
            0,
            1,
        )
        .unwrap();
        let native = onepass_window(&r, &spec).unwrap();
        assert_eq!(native, window_aggregate(&r, &spec).unwrap());
        // First term: itself plus the certain successor.
        let first = native
            .rows()
            .find(|(t, _)| t.values()[0] == RangeValue::reals(1.0, 1.0, 1.0))
            .unwrap();
        assert_eq!(first.0.values()[2].as_reals().unwrap(), (4.0, 5.0, 6.0));
    }

    #[test]
    fn onepass_window_differential_random() {
        let mut rng = StdRng::seed_from_u64(23);
        let frames = [(-1, 0), (-2, 0), (0, 0), (0, 1), (-1, 1)];
        let fs = [AggFunc::Sum, AggFunc::Count, AggFunc::Min, AggFunc::Max, AggFunc::Avg];
        for round in 0..40 {
            let r = random_relation(&mut rng, 6);
            let f = fs[round % fs.len()];
            let (l, u) = frames[round % frames.len()];
            let attr = if f == AggFunc::Count { None } else { Some("B") };
            let spec =
                WindowSpec::new(f, attr, "X", &[], SortSpec::asc(&["A"]), l, u).unwrap();
            assert_eq!(
                onepass_window(&r, &spec).unwrap(),
                window_aggregate(&r, &spec).unwrap(),
                "window {f:?} [{l},{u}] mismatch on {r:?}"
            );
        }
    }

    #[test]
    fn onepass_window_rejects_partitioning() {
        let r = sales_example();
        let spec = WindowSpec::new(
            AggFunc::Sum,
            Some("Sales"),
            "X",
            &["Term"],
            SortSpec::asc(&["Term"]),
            -1,
            0,
        )
        .unwrap();
        assert!(matches!(
            onepass_window(&r, &spec),
            Err(Error::InvalidArgument { .. })
        ));
    }
}
