//! Possible-worlds oracle: enumerate the finite worlds of a compactly
//! described incomplete database, compute exact tight bounds of a query
//! across them, check that an uncertain result bounds every world, and score
//! how tight an uncertain bound is against the exact one.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::bounding::bounds_world;
use crate::plan::{Engine, Plan};
use crate::relation::{AuRelation, BagRelation, RangeTuple, Schema};
use crate::value::{Kind, MultTriple, RangeValue, Scalar};
use crate::{Error, Result};

/// A compact description of a finite set of possible bag-relation worlds.
///
/// By default each template row independently picks one scalar per attribute
/// from its candidate list and one multiplicity from its candidate list; a
/// world is one such choice for every row, with equal tuples merged, so the
/// world count is the product of all choice counts.
///
/// With `linked` set, the choices are correlated instead: every candidate
/// list has either one entry or a shared length `L`, a single scenario index
/// `k < L` picks the `k`-th entry of every non-singleton list, and the spec
/// denotes exactly `L` worlds. This expresses databases whose rows vary
/// together, such as a fixed set of fully specified worlds.
///
/// The `sg_*` indices designate the selected-guess choice per row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IncompleteSpec {
    /// Attribute names and kinds.
    pub attrs: Vec<(String, Kind)>,
    pub rows: Vec<TemplateRow>,
    /// Correlate all choices through one shared scenario index.
    #[serde(default)]
    pub linked: bool,
}

/// One template row of an [`IncompleteSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TemplateRow {
    /// Candidate scalars per attribute; all lists non-empty.
    pub choices: Vec<Vec<Scalar>>,
    /// Index of the selected-guess candidate per attribute.
    pub sg_choice: Vec<usize>,
    /// Candidate multiplicities; non-empty.
    pub mults: Vec<u64>,
    /// Index of the selected-guess multiplicity.
    pub sg_mult: usize,
}

impl IncompleteSpec {
    pub fn schema(&self) -> Result<Schema> {
        Schema::new(self.attrs.clone())
    }

    fn validate(&self) -> Result<()> {
        let arity = self.attrs.len();
        for (i, row) in self.rows.iter().enumerate() {
            let ok = row.choices.len() == arity
                && row.sg_choice.len() == arity
                && !row.mults.is_empty()
                && row.sg_mult < row.mults.len()
                && row
                    .choices
                    .iter()
                    .zip(&row.sg_choice)
                    .zip(&self.attrs)
                    .all(|((cs, &sg), (_, kind))| {
                        !cs.is_empty() && sg < cs.len() && cs.iter().all(|c| c.kind() == *kind)
                    });
            if !ok {
                return Err(Error::Oracle {
                    detail: format!("malformed template row {i}"),
                });
            }
        }
        Ok(())
    }

    /// The shared scenario count of a linked spec: the one non-unit length
    /// among all candidate lists, or 1 when every list is a singleton.
    fn link_len(&self) -> Result<usize> {
        let mut l = 1usize;
        for (i, row) in self.rows.iter().enumerate() {
            for len in row.choices.iter().map(Vec::len).chain([row.mults.len()]) {
                if len == 1 {
                    continue;
                }
                if l == 1 {
                    l = len;
                } else if len != l {
                    return Err(Error::Oracle {
                        detail: format!(
                            "linked spec mixes candidate list lengths {l} and {len} (row {i})"
                        ),
                    });
                }
            }
        }
        Ok(l)
    }

    /// The number of worlds this description denotes.
    pub fn world_count(&self) -> u128 {
        if self.linked {
            return self.link_len().map(|l| l as u128).unwrap_or(0);
        }
        self.rows
            .iter()
            .map(|row| {
                row.choices.iter().map(|c| c.len() as u128).product::<u128>()
                    * row.mults.len() as u128
            })
            .product()
    }

    /// All worlds: the Cartesian product of every row's choices, or the `L`
    /// scenarios of a linked spec, with equal tuples merged per world.
    /// Errors when the world count exceeds `cap`.
    pub fn enumerate_worlds(&self, cap: u64) -> Result<Vec<BagRelation>> {
        self.validate()?;
        if self.linked {
            return self.enumerate_linked(cap);
        }
        let count = self.world_count();
        if count > cap as u128 {
            return Err(Error::Oracle {
                detail: format!("world count {count} exceeds cap {cap}"),
            });
        }
        let schema = self.schema()?;
        let mut worlds = vec![BagRelation::new(schema)];
        for row in &self.rows {
            let mut tuples: Vec<Vec<Scalar>> = vec![Vec::new()];
            for cs in &row.choices {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        cs.iter().map(move |c| {
                            let mut t = t.clone();
                            t.push(c.clone());
                            t
                        })
                    })
                    .collect();
            }
            // Every (tuple, multiplicity) realization of this row.
            let realizations: Vec<(Vec<Scalar>, u64)> = tuples
                .into_iter()
                .flat_map(|t| row.mults.iter().map(move |&m| (t.clone(), m)))
                .collect();
            worlds = worlds
                .into_iter()
                .flat_map(|w| {
                    realizations.iter().map(move |(t, m)| {
                        let mut w = w.clone();
                        if *m > 0 {
                            w.insert(t.clone(), *m);
                        }
                        w
                    })
                })
                .collect();
        }
        Ok(worlds)
    }

    fn enumerate_linked(&self, cap: u64) -> Result<Vec<BagRelation>> {
        let l = self.link_len()?;
        if l as u64 > cap {
            return Err(Error::Oracle {
                detail: format!("world count {l} exceeds cap {cap}"),
            });
        }
        let schema = self.schema()?;
        let pick = |k: usize, len: usize| if len == 1 { 0 } else { k };
        let mut worlds = Vec::with_capacity(l);
        for k in 0..l {
            let mut world = BagRelation::new(schema.clone());
            for row in &self.rows {
                let tuple: Vec<Scalar> = row
                    .choices
                    .iter()
                    .map(|cs| cs[pick(k, cs.len())].clone())
                    .collect();
                world.insert(tuple, row.mults[pick(k, row.mults.len())]);
            }
            worlds.push(world);
        }
        Ok(worlds)
    }

    /// The uncertain relation bounding every world: per attribute the
    /// candidate minimum/maximum with the designated selected guess, and the
    /// multiplicity triple likewise. Rows that can never appear are dropped.
    pub fn to_au(&self) -> Result<AuRelation> {
        self.validate()?;
        let mut out = AuRelation::new(self.schema()?);
        for row in &self.rows {
            let ub_mult = *row.mults.iter().max().unwrap();
            if ub_mult == 0 {
                continue;
            }
            let mut values = Vec::with_capacity(row.choices.len());
            for (cs, &sg) in row.choices.iter().zip(&row.sg_choice) {
                let mut lo = cs[0].clone();
                let mut hi = cs[0].clone();
                for c in &cs[1..] {
                    if c.le(&lo)? {
                        lo = c.clone();
                    }
                    if hi.le(c)? {
                        hi = c.clone();
                    }
                }
                values.push(RangeValue::new(lo, cs[sg].clone(), hi)?);
            }
            let ann = MultTriple::new(
                *row.mults.iter().min().unwrap(),
                row.mults[row.sg_mult],
                ub_mult,
            )?;
            out.insert(RangeTuple(values), ann)?;
        }
        Ok(out)
    }
}

/// Exact extrema of a query across all worlds: per result tuple the
/// minimum/maximum multiplicity, and optionally per anchor key the
/// minimum/maximum of a designated numeric column.
#[derive(Clone, Debug, Default)]
pub struct TightBounds {
    /// Result tuple → (certain multiplicity, possible multiplicity).
    pub mult: BTreeMap<Vec<Scalar>, (u64, u64)>,
    /// Anchor-key projection → extrema of the designated column over the
    /// worlds in which the key appears.
    pub values: BTreeMap<Vec<Scalar>, (f64, f64)>,
}

/// Evaluate `eval` in every world and fold the results into tight bounds.
///
/// `anchor` names attributes forming a key of each world's result (an error
/// reports the first world where it does not), and `column` the numeric
/// column whose per-key extrema are collected; both may be empty/absent when
/// only multiplicity bounds are wanted.
pub fn tight_bounds(
    worlds: &[BagRelation],
    eval: impl Fn(&BagRelation) -> Result<BagRelation>,
    anchor: &[String],
    column: Option<&str>,
) -> Result<TightBounds> {
    let mut results = Vec::with_capacity(worlds.len());
    for world in worlds {
        results.push(eval(world)?);
    }
    let mut out = TightBounds::default();
    // Multiplicity extrema: minimum includes absences (multiplicity 0).
    for result in &results {
        for (tuple, _) in result.rows() {
            out.mult.entry(tuple.clone()).or_insert((u64::MAX, 0));
        }
    }
    for (tuple, entry) in &mut out.mult {
        for result in &results {
            let m = result.multiplicity(tuple);
            entry.0 = entry.0.min(m);
            entry.1 = entry.1.max(m);
        }
    }
    if let Some(col) = column {
        for (wi, result) in results.iter().enumerate() {
            let a_idx = anchor
                .iter()
                .map(|name| result.schema().index_of(name))
                .collect::<Result<Vec<_>>>()?;
            let c_idx = result.schema().index_of(col)?;
            let mut keys_here: BTreeMap<Vec<Scalar>, f64> = BTreeMap::new();
            for (tuple, _) in result.rows() {
                let key: Vec<Scalar> = a_idx.iter().map(|&i| tuple[i].clone()).collect();
                let v = tuple[c_idx].as_real()?;
                if keys_here.insert(key.clone(), v).is_some() {
                    return Err(Error::Oracle {
                        detail: format!("anchor {anchor:?} is not a key in world {wi}"),
                    });
                }
            }
            for (key, v) in keys_here {
                let entry = out
                    .values
                    .entry(key)
                    .or_insert((f64::INFINITY, f64::NEG_INFINITY));
                entry.0 = entry.0.min(v);
                entry.1 = entry.1.max(v);
            }
        }
    }
    Ok(out)
}

/// Outcome of a bound-preservation check; `detail` carries the first
/// witnessed violation.
#[derive(Clone, Debug)]
pub struct Report {
    pub pass: bool,
    pub detail: Option<String>,
}

/// Check that an uncertain result bounds the result of every world and that
/// its selected-guess world is among them (bag equality of merged
/// representations).
pub fn check_preservation(
    au_result: &AuRelation,
    world_results: &[BagRelation],
) -> Result<Report> {
    if world_results.is_empty() {
        return Err(Error::Oracle {
            detail: "preservation check requires at least one world".into(),
        });
    }
    for (wi, world) in world_results.iter().enumerate() {
        if !bounds_world(au_result, world)? {
            return Ok(Report {
                pass: false,
                detail: Some(format!("world {wi} is not bounded: {world:?}")),
            });
        }
    }
    let sg = au_result.sg_world();
    if !world_results.contains(&sg) {
        return Ok(Report {
            pass: false,
            detail: Some(format!(
                "selected-guess world is not among the world results: {sg:?}"
            )),
        });
    }
    Ok(Report { pass: true, detail: None })
}

/// Recall of an approximate bound `[a,b]` against the tight bound `[c,d]`:
/// the fraction of the tight interval covered, clamped to `[0,1]`. A
/// degenerate tight interval counts as fully recalled iff it is covered.
pub fn bound_recall(approx: (f64, f64), tight: (f64, f64)) -> f64 {
    let (a, b) = approx;
    let (c, d) = tight;
    if c == d {
        return if a <= c && c <= b { 1.0 } else { 0.0 };
    }
    ((b.min(d) - a.max(c)) / (d - c)).clamp(0.0, 1.0)
}

/// Accuracy of an approximate bound against the tight bound: the ratio of
/// the united to the intersected extent — 1 for a perfect bound, larger the
/// looser the approximation. Negative when the intervals are disjoint.
pub fn bound_accuracy(approx: (f64, f64), tight: (f64, f64)) -> f64 {
    let (a, b) = approx;
    let (c, d) = tight;
    (b.max(d) - a.min(c)) / (b.min(d) - a.max(c))
}

/// A random small incomplete database for bound-preservation fuzzing.
///
/// Schema `K, A, B` (all real): `K` is a certain, distinct per-row key — it
/// keeps selected-guess tuples distinct so order-based operators assign them
/// distinct positions — while `A` and `B` draw up to three small integer
/// candidates each and multiplicities come from subsets of `{0, 1, 2}`.
/// Candidate counts are weighted to keep the world count small.
pub fn random_spec(rng: &mut impl rand::Rng, max_rows: usize) -> IncompleteSpec {
    fn choices<R: rand::Rng>(rng: &mut R) -> Vec<Scalar> {
        let n = match rng.gen_range(0..10) {
            0..=4 => 1,
            5..=8 => 2,
            _ => 3,
        };
        (0..n)
            .map(|_| Scalar::Real(rng.gen_range(-3..=3) as f64))
            .collect()
    }
    let rows = (0..rng.gen_range(0..=max_rows))
        .map(|i| {
            let a = choices(rng);
            let b = choices(rng);
            let mults: Vec<u64> = match rng.gen_range(0..10) {
                0..=3 => vec![1],
                4..=5 => vec![0, 1],
                6..=7 => vec![1, 2],
                8 => vec![0, 2],
                _ => vec![2],
            };
            TemplateRow {
                sg_choice: vec![
                    0,
                    rng.gen_range(0..a.len()),
                    rng.gen_range(0..b.len()),
                ],
                choices: vec![vec![Scalar::Real(i as f64)], a, b],
                sg_mult: rng.gen_range(0..mults.len()),
                mults,
            }
        })
        .collect();
    IncompleteSpec {
        attrs: vec![
            ("K".into(), Kind::Real),
            ("A".into(), Kind::Real),
            ("B".into(), Kind::Real),
        ],
        rows,
        linked: false,
    }
}

/// The operator suite exercised against random specs: one plan per relevant
/// operator over the table `t` with the `K, A, B` schema of [`random_spec`].
pub fn operator_plans() -> Vec<(String, Plan)> {
    use crate::algebra::AggFunc;
    use crate::expr::Expr;
    use crate::ordering::Dir;
    use crate::plan::Target;

    let scan = || Box::new(Plan::Scan { table: "t".into() });
    let order = || vec![("A".to_string(), Dir::Asc), ("K".to_string(), Dir::Asc)];
    let mut plans = vec![
        (
            "select".to_string(),
            Plan::Select {
                input: scan(),
                predicate: Expr::le(Expr::var("A"), Expr::real(0.0)),
            },
        ),
        (
            "project".to_string(),
            Plan::Project {
                input: scan(),
                targets: vec![
                    Target { name: "K".into(), expr: Expr::var("K") },
                    Target {
                        name: "S".into(),
                        expr: Expr::add(Expr::var("A"), Expr::var("B")),
                    },
                ],
            },
        ),
        (
            "join".to_string(),
            Plan::Join {
                left: scan(),
                right: Box::new(Plan::Project {
                    input: scan(),
                    targets: vec![
                        Target { name: "K2".into(), expr: Expr::var("K") },
                        Target { name: "C".into(), expr: Expr::var("B") },
                    ],
                }),
                on: Some(Expr::eq(Expr::var("K"), Expr::var("K2"))),
            },
        ),
        (
            "aggregate".to_string(),
            Plan::Aggregate {
                input: scan(),
                group_by: vec![],
                func: AggFunc::Sum,
                attr: Some("A".into()),
                output: "S".into(),
            },
        ),
        (
            "sort".to_string(),
            Plan::Sort {
                input: scan(),
                order: order(),
                output: "pos".into(),
                engine: Engine::Reference,
            },
        ),
        (
            "topk".to_string(),
            Plan::Topk {
                input: scan(),
                order: order(),
                k: 2,
                output: "pos".into(),
                engine: Engine::Reference,
            },
        ),
    ];
    for func in [AggFunc::Sum, AggFunc::Min, AggFunc::Max, AggFunc::Count] {
        for n in [1i64, 2] {
            plans.push((
                format!("window-{func:?}-{n}").to_lowercase(),
                Plan::Window {
                    input: scan(),
                    func,
                    attr: (func != AggFunc::Count).then(|| "A".to_string()),
                    output: "X".into(),
                    partition_by: vec![],
                    order: order(),
                    frame: (1 - n, 0),
                    engine: Engine::Reference,
                },
            ));
        }
    }
    plans
}

/// Run every plan against a spec: evaluate the plan over the spec's
/// uncertain relation and deterministically in every enumerated world, then
/// check preservation. Returns the first failing operator's name and report,
/// or `None` when all pass.
pub fn check_spec(
    spec: &IncompleteSpec,
    plans: &[(String, Plan)],
    world_cap: u64,
    engine: Engine,
) -> Result<Option<(String, Report)>> {
    let worlds = spec.enumerate_worlds(world_cap)?;
    let au = spec.to_au()?;
    for (name, plan) in plans {
        let mut plan = plan.clone();
        plan.set_engine(engine);
        let tables = HashMap::from([("t".to_string(), au.clone())]);
        let au_result = plan.eval(&tables)?;
        let world_results = worlds
            .iter()
            .map(|w| plan.eval_world(&HashMap::from([("t".to_string(), w.clone())])))
            .collect::<Result<Vec<_>>>()?;
        let report = check_preservation(&au_result, &world_results)?;
        if !report.pass {
            return Ok(Some((name.clone(), report)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{det_sort, det_window, topk, SortSpec};
    use crate::algebra::AggFunc;

    fn real(v: f64) -> Scalar {
        Scalar::Real(v)
    }

    /// An uncertain sales database with exactly three linked worlds. The
    /// scenario columns read, per term, the sales figures of worlds
    /// D₁ = {(1,2),(2,3),(3,7),(4,4)}, D₂ = {(1,3),(2,2),(3,4),(4,6)}, and
    /// D₃ = {(1,2),(2,2),(5,4),(4,7)}; the selected guess is D₁.
    fn sales_spec() -> IncompleteSpec {
        let row = |terms: &[f64], sales: &[f64]| TemplateRow {
            choices: vec![
                terms.iter().copied().map(real).collect(),
                sales.iter().copied().map(real).collect(),
            ],
            sg_choice: vec![0, 0],
            mults: vec![1],
            sg_mult: 0,
        };
        IncompleteSpec {
            attrs: vec![("Term".into(), Kind::Real), ("Sales".into(), Kind::Real)],
            rows: vec![
                row(&[1.0], &[2.0, 3.0, 2.0]),
                row(&[2.0], &[3.0, 2.0, 2.0]),
                row(&[3.0, 3.0, 5.0], &[7.0, 4.0, 4.0]),
                row(&[4.0], &[4.0, 6.0, 7.0]),
            ],
            linked: true,
        }
    }

    #[test]
    fn world_counts() {
        // A linked spec denotes exactly its scenario count.
        let spec = sales_spec();
        assert_eq!(spec.world_count(), 3);
        let worlds = spec.enumerate_worlds(100).unwrap();
        assert_eq!(worlds.len(), 3);
        assert!(spec.enumerate_worlds(2).is_err());
        let d1 = BagRelation::from_rows(
            spec.schema().unwrap(),
            [(1.0, 2.0), (2.0, 3.0), (3.0, 7.0), (4.0, 4.0)]
                .map(|(t, s)| (vec![real(t), real(s)], 1)),
        );
        assert_eq!(worlds[0], d1);

        // Independent choices multiply: 2 rows × 2 value choices → 4 worlds.
        let pair = IncompleteSpec {
            attrs: vec![("A".into(), Kind::Real)],
            rows: (0..2)
                .map(|i| TemplateRow {
                    choices: vec![vec![real(i as f64), real(i as f64 + 10.0)]],
                    sg_choice: vec![0],
                    mults: vec![1],
                    sg_mult: 0,
                })
                .collect(),
            linked: false,
        };
        assert_eq!(pair.enumerate_worlds(10).unwrap().len(), 4);

        let singleton = IncompleteSpec {
            attrs: vec![("A".into(), Kind::Real)],
            rows: vec![TemplateRow {
                choices: vec![vec![real(1.0)]],
                sg_choice: vec![0],
                mults: vec![2],
                sg_mult: 0,
            }],
            linked: false,
        };
        assert_eq!(singleton.enumerate_worlds(10).unwrap().len(), 1);

        // Linked specs reject mixed non-unit list lengths.
        let mut bad = sales_spec();
        bad.rows[0].choices[1].push(real(9.0));
        assert!(bad.enumerate_worlds(100).is_err());
    }

    #[test]
    fn au_derivation_bounds_every_world() {
        let spec = sales_spec();
        let au = spec.to_au().unwrap();
        let worlds = spec.enumerate_worlds(100).unwrap();
        let report = check_preservation(&au, &worlds).unwrap();
        assert!(report.pass, "{:?}", report.detail);
        // The designated selected-guess world is enumerated.
        assert!(worlds.contains(&au.sg_world()));
    }

    #[test]
    fn rolling_sum_tight_bounds_example() {
        // sum(Sales) over the two-term frame starting at each term, per
        // world; the first term's tight bounds across worlds are [4,5].
        let spec = sales_spec();
        let worlds = spec.enumerate_worlds(100).unwrap();
        let bounds = tight_bounds(
            &worlds,
            |w| {
                det_window(
                    w,
                    AggFunc::Sum,
                    Some("Sales"),
                    "X",
                    &[],
                    &SortSpec::asc(&["Term"]),
                    0,
                    1,
                )
            },
            &["Term".to_string()],
            Some("X"),
        )
        .unwrap();
        assert_eq!(bounds.values[&vec![real(1.0)]], (4.0, 5.0));
    }

    #[test]
    fn topk_certain_and_possible_terms() {
        // Top-2 terms by sales across the worlds: term 4 is in every world's
        // answer; terms 3 and 5 (the uncertain term) appear in some.
        let spec = sales_spec();
        let worlds = spec.enumerate_worlds(100).unwrap();
        let term_only = Schema::new(vec![("Term".into(), Kind::Real)]).unwrap();
        let bounds = tight_bounds(
            &worlds,
            |w| {
                let top = det_sort(
                    w,
                    &SortSpec::new(vec![("Sales".into(), crate::ordering::Dir::Desc)]),
                    "pos",
                )?;
                // Keep the top two rows and project onto the term label.
                let mut out = BagRelation::new(term_only.clone());
                for (t, &m) in top.rows() {
                    if t.last().unwrap().as_real()? < 2.0 {
                        out.insert(vec![t[0].clone()], m);
                    }
                }
                Ok(out)
            },
            &[],
            None,
        )
        .unwrap();
        let term = |v: f64| vec![real(v)];
        // Possible answers {3, 4, 5}; certain answer {4}.
        assert_eq!(bounds.mult.len(), 3);
        assert_eq!(bounds.mult[&term(4.0)], (1, 1));
        assert_eq!(bounds.mult[&term(3.0)], (0, 1));
        assert_eq!(bounds.mult[&term(5.0)], (0, 1));
    }

    #[test]
    fn rolling_sum_bounds_are_loose_but_recalled() {
        // The rolling sum over the derived uncertain relation gives term 1
        // the bounds [4, 6]; the worlds only realize [4, 5]. The looseness
        // shows up as accuracy 2 at full recall.
        use crate::window::{window_aggregate, WindowSpec};
        let spec = sales_spec();
        let au = window_aggregate(
            &spec.to_au().unwrap(),
            &WindowSpec {
                f: AggFunc::Sum,
                attr: Some("Sales".into()),
                output: "X".into(),
                partition_by: vec![],
                order: SortSpec::asc(&["Term"]),
                l: 0,
                u: 1,
            },
        )
        .unwrap();
        let term1 = au
            .rows()
            .find(|(t, _)| t.values()[0] == RangeValue::reals(1.0, 1.0, 1.0))
            .map(|(t, _)| t.clone())
            .unwrap();
        let x = &term1.values()[2];
        let approx = (x.lb().as_real().unwrap(), x.ub().as_real().unwrap());
        assert_eq!(approx, (4.0, 6.0));
        assert_eq!(bound_recall(approx, (4.0, 5.0)), 1.0);
        assert_eq!(bound_accuracy(approx, (4.0, 5.0)), 2.0);
    }

    #[test]
    fn preservation_detects_corruption() {
        let spec = sales_spec();
        let worlds = spec.enumerate_worlds(100).unwrap();
        // Shrink an upper multiplicity: drop the always-present first term.
        let au = spec.to_au().unwrap();
        let mut rows: Vec<_> = au.rows().map(|(t, m)| (t.clone(), *m)).collect();
        rows.retain(|(t, _)| t.values()[0] != RangeValue::reals(1.0, 1.0, 1.0));
        let corrupted = AuRelation::from_rows(au.schema().clone(), rows).unwrap();
        let report = check_preservation(&corrupted, &worlds).unwrap();
        assert!(!report.pass);
        assert!(report.detail.unwrap().contains("not bounded"));
    }

    #[test]
    fn preservation_of_empty_relation() {
        let schema = Schema::new(vec![("A".into(), Kind::Real)]).unwrap();
        let au = AuRelation::new(schema.clone());
        let world = BagRelation::new(schema);
        assert!(check_preservation(&au, &[world]).unwrap().pass);
    }

    #[test]
    fn sort_over_spec_preserves_bounds() {
        let spec = sales_spec();
        let worlds = spec.enumerate_worlds(100).unwrap();
        let order = SortSpec::asc(&["Sales", "Term"]);
        let au_sorted = crate::ordering::sort(&spec.to_au().unwrap(), &order, "pos").unwrap();
        let world_results: Vec<BagRelation> = worlds
            .iter()
            .map(|w| det_sort(w, &order, "pos"))
            .collect::<Result<_>>()
            .unwrap();
        let report = check_preservation(&au_sorted, &world_results).unwrap();
        assert!(report.pass, "{:?}", report.detail);
        // And the uncertain top-k also bounds each world's top-k.
        let au_top = topk(&spec.to_au().unwrap(), &order, 2, "pos").unwrap();
        let world_tops: Vec<BagRelation> = worlds
            .iter()
            .map(|w| {
                let sorted = det_sort(w, &order, "pos")?;
                let mut out = BagRelation::new(sorted.schema().clone());
                for (t, &m) in sorted.rows() {
                    if t.last().unwrap().as_real()? < 2.0 {
                        out.insert(t.clone(), m);
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()
            .unwrap();
        let report = check_preservation(&au_top, &world_tops).unwrap();
        assert!(report.pass, "{:?}", report.detail);
    }

    #[test]
    fn random_specs_pass_the_operator_suite() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let plans = operator_plans();
        for _ in 0..25 {
            let spec = random_spec(&mut rng, 3);
            let failure = check_spec(&spec, &plans, 100_000, Engine::Reference).unwrap();
            assert!(failure.is_none(), "{failure:?} on {spec:?}");
        }
    }

    #[test]
    fn recall_and_accuracy_formulas() {
        assert_eq!(bound_recall((4.0, 6.0), (4.0, 5.0)), 1.0);
        assert_eq!(bound_accuracy((4.0, 6.0), (4.0, 5.0)), 2.0);
        assert_eq!(bound_recall((4.0, 5.0), (4.0, 5.0)), 1.0);
        assert_eq!(bound_accuracy((4.0, 5.0), (4.0, 5.0)), 1.0);
        assert_eq!(bound_recall((6.0, 7.0), (4.0, 5.0)), 0.0);
        // Degenerate tight interval: recalled iff covered.
        assert_eq!(bound_recall((3.0, 5.0), (4.0, 4.0)), 1.0);
        assert_eq!(bound_recall((5.0, 6.0), (4.0, 4.0)), 0.0);
    }
}
