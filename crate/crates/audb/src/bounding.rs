//! Bounding checks between AU relations and deterministic worlds.
//!
//! An AU relation bounds a world if the world's tuple multiplicities can be
//! fully allocated to AU rows (edges only where the row's ranges contain the
//! tuple) with every row's received total inside its `[lb, ub]` multiplicity
//! interval. This is a transportation feasibility problem, solved as a
//! max-flow with lower bounds via the standard circulation reduction.

use crate::relation::{tuple_bounded, AuRelation, BagRelation};
use crate::{Error, Result};

/// Array-backed Dinic's algorithm; sizes here are small, so no scaling.
struct Dinic {
    // (to, capacity, index of reverse edge)
    edges: Vec<Vec<(usize, u64, usize)>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            edges: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: u64) {
        let from_idx = self.edges[from].len();
        let to_idx = self.edges[to].len();
        self.edges[from].push((to, cap, to_idx));
        self.edges[to].push((from, 0, from_idx));
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &(to, cap, _) in &self.edges[v] {
                if cap > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[v] + 1;
                    queue.push_back(to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, f: u64) -> u64 {
        if v == t {
            return f;
        }
        while self.iter[v] < self.edges[v].len() {
            let (to, cap, rev) = self.edges[v][self.iter[v]];
            if cap > 0 && self.level[v] < self.level[to] {
                let d = self.dfs(to, t, f.min(cap));
                if d > 0 {
                    self.edges[v][self.iter[v]].1 -= d;
                    self.edges[to][rev].1 += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut flow = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, u64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }
}

/// True iff a tuple matching exists allocating all of `world`'s multiplicity
/// to rows of `r` with per-row totals in `[lb, ub]`.
pub fn bounds_world(r: &AuRelation, world: &BagRelation) -> Result<bool> {
    if r.schema() != world.schema() {
        return Err(Error::SchemaMismatch {
            detail: "bounds_world requires identical schemas".into(),
        });
    }
    let world_rows: Vec<(&Vec<_>, u64)> = world.rows().map(|(t, &m)| (t, m)).collect();
    let au_rows: Vec<_> = r.rows().collect();

    // Nodes: 0 = source, 1 = sink, 2 = super-source, 3 = super-sink,
    // then world tuples, then AU rows.
    let wt_base = 4;
    let au_base = wt_base + world_rows.len();
    let n = au_base + au_rows.len();
    let (s, t, ss, tt) = (0, 1, 2, 3);
    let mut dinic = Dinic::new(n);
    let mut demand = 0u64;

    // source → world tuple, lower = upper = multiplicity.
    for (j, &(_, m)) in world_rows.iter().enumerate() {
        dinic.add_edge(ss, wt_base + j, m);
        dinic.add_edge(s, tt, m);
        demand += m;
    }
    // world tuple → AU row where the ranges contain the tuple.
    let total: u64 = world_rows.iter().map(|&(_, m)| m).sum();
    for (j, &(tuple, _)) in world_rows.iter().enumerate() {
        for (i, (t_hat, _)) in au_rows.iter().enumerate() {
            if tuple_bounded(tuple, t_hat)? {
                dinic.add_edge(wt_base + j, au_base + i, total);
            }
        }
    }
    // AU row → sink, lower = lb, upper = ub.
    for (i, (_, ann)) in au_rows.iter().enumerate() {
        let (lb, ub) = (ann.lb(), ann.ub());
        dinic.add_edge(au_base + i, t, ub - lb);
        if lb > 0 {
            dinic.add_edge(ss, t, lb);
            dinic.add_edge(au_base + i, tt, lb);
            demand += lb;
        }
    }
    // Close the circulation.
    dinic.add_edge(t, s, u64::MAX / 4);

    Ok(dinic.max_flow(ss, tt) == demand)
}

/// Exhaustive allocation search; exponential, for cross-checking the flow
/// reduction on tiny instances only.
pub fn bounds_world_exhaustive(r: &AuRelation, world: &BagRelation) -> Result<bool> {
    if r.schema() != world.schema() {
        return Err(Error::SchemaMismatch {
            detail: "bounds_world requires identical schemas".into(),
        });
    }
    let world_rows: Vec<(&Vec<_>, u64)> = world.rows().map(|(t, &m)| (t, m)).collect();
    let au_rows: Vec<_> = r.rows().collect();
    // allowed[j][i]: world tuple j may be allocated to AU row i.
    let mut allowed = vec![vec![false; au_rows.len()]; world_rows.len()];
    for (j, &(tuple, _)) in world_rows.iter().enumerate() {
        for (i, (t_hat, _)) in au_rows.iter().enumerate() {
            allowed[j][i] = tuple_bounded(tuple, t_hat)?;
        }
    }

    fn search(
        j: usize,
        world_rows: &[(&Vec<crate::value::Scalar>, u64)],
        allowed: &[Vec<bool>],
        received: &mut Vec<u64>,
        au_ub: &[u64],
        au_lb: &[u64],
    ) -> bool {
        if j == world_rows.len() {
            return received
                .iter()
                .zip(au_lb)
                .all(|(&got, &lb)| got >= lb);
        }
        // Distribute world_rows[j].1 units over allowed rows.
        fn distribute(
            j: usize,
            i: usize,
            remaining: u64,
            world_rows: &[(&Vec<crate::value::Scalar>, u64)],
            allowed: &[Vec<bool>],
            received: &mut Vec<u64>,
            au_ub: &[u64],
            au_lb: &[u64],
        ) -> bool {
            if i == received.len() {
                return remaining == 0
                    && search(j + 1, world_rows, allowed, received, au_ub, au_lb);
            }
            if !allowed[j][i] {
                return distribute(j, i + 1, remaining, world_rows, allowed, received, au_ub, au_lb);
            }
            let room = au_ub[i].saturating_sub(received[i]);
            for take in 0..=remaining.min(room) {
                received[i] += take;
                if distribute(
                    j,
                    i + 1,
                    remaining - take,
                    world_rows,
                    allowed,
                    received,
                    au_ub,
                    au_lb,
                ) {
                    received[i] -= take;
                    return true;
                }
                received[i] -= take;
            }
            false
        }
        distribute(
            j,
            0,
            world_rows[j].1,
            world_rows,
            allowed,
            received,
            au_ub,
            au_lb,
        )
    }

    let au_lb: Vec<u64> = au_rows.iter().map(|(_, a)| a.lb()).collect();
    let au_ub: Vec<u64> = au_rows.iter().map(|(_, a)| a.ub()).collect();
    let mut received = vec![0u64; au_rows.len()];
    Ok(search(0, &world_rows, &allowed, &mut received, &au_ub, &au_lb))
}

/// True iff `r` bounds every world and the selected-guess world of `r` is one
/// of the worlds (bag equality of merged representations).
pub fn bounds_incomplete(r: &AuRelation, worlds: &[BagRelation]) -> Result<bool> {
    if worlds.is_empty() {
        return Err(Error::InvalidArgument {
            detail: "bounds_incomplete requires a non-empty world list".into(),
        });
    }
    for world in worlds {
        if !bounds_world(r, world)? {
            return Ok(false);
        }
    }
    let sg = r.sg_world();
    Ok(worlds.iter().any(|w| *w == sg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::{RangeTuple, Schema};
    use crate::value::{Kind, MultTriple, RangeValue, Scalar};

    fn schema_a() -> Schema {
        Schema::new(vec![("A".into(), Kind::Real)]).unwrap()
    }

    fn au(rows: Vec<((f64, f64, f64), (u64, u64, u64))>) -> AuRelation {
        AuRelation::from_rows(
            schema_a(),
            rows.into_iter().map(|((lb, sg, ub), (ml, ms, mu))| {
                (
                    RangeTuple(vec![RangeValue::reals(lb, sg, ub)]),
                    MultTriple::new(ml, ms, mu).unwrap(),
                )
            }),
        )
        .unwrap()
    }

    fn world(rows: Vec<(f64, u64)>) -> BagRelation {
        BagRelation::from_rows(
            schema_a(),
            rows.into_iter().map(|(v, m)| (vec![Scalar::Real(v)], m)),
        )
    }

    #[test]
    fn certain_row_requires_presence() {
        let r = au(vec![((1.0, 1.0, 1.0), (1, 1, 1))]);
        assert!(!bounds_world(&r, &world(vec![])).unwrap());
        assert!(bounds_world(&r, &world(vec![(1.0, 1)])).unwrap());
    }

    #[test]
    fn both_duplicates_fit_one_row() {
        let r = au(vec![((1.0, 1.0, 2.0), (0, 1, 2))]);
        assert!(bounds_world(&r, &world(vec![(1.0, 1), (2.0, 1)])).unwrap());
        assert!(!bounds_world(&r, &world(vec![(1.0, 2), (2.0, 1)])).unwrap());
    }

    #[test]
    fn sg_world_is_always_bounded() {
        let r = au(vec![
            ((1.0, 2.0, 3.0), (1, 2, 2)),
            ((0.0, 0.0, 5.0), (0, 1, 3)),
        ]);
        assert!(bounds_world(&r, &r.sg_world()).unwrap());
    }

    #[test]
    fn bounds_incomplete_requires_sg_world_among_worlds() {
        let r = au(vec![((1.0, 1.0, 2.0), (1, 1, 1))]);
        let w1 = world(vec![(1.0, 1)]);
        let w2 = world(vec![(2.0, 1)]);
        assert!(bounds_incomplete(&r, &[w1.clone(), w2.clone()]).unwrap());
        assert!(!bounds_incomplete(&r, &[w2]).unwrap());
        assert!(bounds_incomplete(&r, &[w1]).unwrap());
    }

    #[test]
    fn exhaustive_matches_flow_on_small_instances() {
        let cases = vec![
            (
                au(vec![((1.0, 1.0, 2.0), (0, 1, 2)), ((2.0, 2.0, 3.0), (1, 1, 1))]),
                world(vec![(2.0, 2), (3.0, 1)]),
            ),
            (
                au(vec![((1.0, 1.0, 2.0), (2, 2, 2))]),
                world(vec![(1.0, 1), (2.0, 1)]),
            ),
            (
                au(vec![((1.0, 1.0, 1.0), (1, 1, 1)), ((1.0, 1.0, 1.0), (1, 1, 1))]),
                world(vec![(1.0, 1)]),
            ),
        ];
        for (r, w) in cases {
            assert_eq!(
                bounds_world(&r, &w).unwrap(),
                bounds_world_exhaustive(&r, &w).unwrap()
            );
        }
    }
}
