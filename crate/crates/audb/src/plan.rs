//! Logical query plans: a JSON-serializable operator tree evaluated over
//! named uncertain relations, with a per-operator engine switch between the
//! reference and native one-pass implementations of the order-based
//! operators.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{self, AggFunc};
use crate::expr::Expr;
use crate::native;
use crate::ordering::{self, Dir, SortSpec};
use crate::relation::{AuRelation, BagRelation};
use crate::window::{self, WindowSpec};
use crate::{Error, Result};

/// Which implementation evaluates an order-based operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Reference,
    Native,
}

/// One projection target: an expression and its output attribute name.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Target {
    pub name: String,
    pub expr: Expr,
}

/// An operator tree. The JSON form tags each node with `"op"`; see the
/// repository documentation for the full schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Plan {
    Scan {
        table: String,
    },
    Select {
        input: Box<Plan>,
        predicate: Expr,
    },
    Project {
        input: Box<Plan>,
        targets: Vec<Target>,
    },
    Join {
        left: Box<Plan>,
        right: Box<Plan>,
        #[serde(default)]
        on: Option<Expr>,
    },
    Union {
        left: Box<Plan>,
        right: Box<Plan>,
    },
    Aggregate {
        input: Box<Plan>,
        #[serde(default)]
        group_by: Vec<String>,
        func: AggFunc,
        #[serde(default)]
        attr: Option<String>,
        output: String,
    },
    Sort {
        input: Box<Plan>,
        order: Vec<(String, Dir)>,
        output: String,
        #[serde(default)]
        engine: Engine,
    },
    Topk {
        input: Box<Plan>,
        order: Vec<(String, Dir)>,
        k: u64,
        output: String,
        #[serde(default)]
        engine: Engine,
    },
    Window {
        input: Box<Plan>,
        func: AggFunc,
        #[serde(default)]
        attr: Option<String>,
        output: String,
        #[serde(default)]
        partition_by: Vec<String>,
        order: Vec<(String, Dir)>,
        /// Row-based frame `[lower, upper]` relative to the current row.
        frame: (i64, i64),
        #[serde(default)]
        engine: Engine,
    },
}

impl Plan {
    /// Parse a plan from its JSON form and validate it.
    pub fn from_json(text: &str) -> Result<Plan> {
        let plan: Plan = serde_json::from_str(text).map_err(|e| Error::Plan {
            detail: format!("invalid plan JSON: {e}"),
        })?;
        plan.validate()?;
        Ok(plan)
    }

    /// Structural validation independent of input schemas: top-k asks for at
    /// least one row, frames are non-empty, native windows are unpartitioned,
    /// sort orders name at least one key.
    pub fn validate(&self) -> Result<()> {
        match self {
            Plan::Scan { .. } => Ok(()),
            Plan::Select { input, .. } | Plan::Project { input, .. } => input.validate(),
            Plan::Join { left, right, .. } | Plan::Union { left, right } => {
                left.validate()?;
                right.validate()
            }
            Plan::Aggregate { input, .. } => input.validate(),
            Plan::Sort { input, order, .. } => {
                if order.is_empty() {
                    return Err(Error::Plan {
                        detail: "sort requires at least one order key".into(),
                    });
                }
                input.validate()
            }
            Plan::Topk { input, order, k, .. } => {
                if *k == 0 {
                    return Err(Error::Plan {
                        detail: "topk requires k >= 1".into(),
                    });
                }
                if order.is_empty() {
                    return Err(Error::Plan {
                        detail: "topk requires at least one order key".into(),
                    });
                }
                input.validate()
            }
            Plan::Window {
                input,
                order,
                frame,
                partition_by,
                engine,
                ..
            } => {
                if order.is_empty() {
                    return Err(Error::Plan {
                        detail: "window requires at least one order key".into(),
                    });
                }
                if frame.0 > frame.1 {
                    return Err(Error::Plan {
                        detail: format!("empty window frame [{}, {}]", frame.0, frame.1),
                    });
                }
                if *engine == Engine::Native && !partition_by.is_empty() {
                    return Err(Error::Plan {
                        detail: "the native window engine does not support partitioning".into(),
                    });
                }
                input.validate()
            }
        }
    }

    /// Force every order-based operator in the tree onto one engine.
    pub fn set_engine(&mut self, engine: Engine) {
        match self {
            Plan::Scan { .. } => {}
            Plan::Select { input, .. }
            | Plan::Project { input, .. }
            | Plan::Aggregate { input, .. } => input.set_engine(engine),
            Plan::Join { left, right, .. } | Plan::Union { left, right } => {
                left.set_engine(engine);
                right.set_engine(engine);
            }
            Plan::Sort { input, engine: e, .. }
            | Plan::Topk { input, engine: e, .. }
            | Plan::Window { input, engine: e, .. } => {
                *e = engine;
                input.set_engine(engine);
            }
        }
    }

    /// The tables this plan scans, in first-occurrence order without
    /// duplicates.
    pub fn tables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_tables(&mut out);
        out
    }

    fn collect_tables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Plan::Scan { table } => {
                if !out.contains(&table.as_str()) {
                    out.push(table);
                }
            }
            Plan::Select { input, .. }
            | Plan::Project { input, .. }
            | Plan::Aggregate { input, .. }
            | Plan::Sort { input, .. }
            | Plan::Topk { input, .. }
            | Plan::Window { input, .. } => input.collect_tables(out),
            Plan::Join { left, right, .. } | Plan::Union { left, right } => {
                left.collect_tables(out);
                right.collect_tables(out);
            }
        }
    }

    /// Evaluate over named uncertain relations.
    pub fn eval(&self, tables: &HashMap<String, AuRelation>) -> Result<AuRelation> {
        match self {
            Plan::Scan { table } => tables.get(table).cloned().ok_or_else(|| Error::Plan {
                detail: format!("unknown table `{table}`"),
            }),
            Plan::Select { input, predicate } => {
                algebra::select(&input.eval(tables)?, predicate)
            }
            Plan::Project { input, targets } => {
                let targets: Vec<(Expr, String)> = targets
                    .iter()
                    .map(|t| (t.expr.clone(), t.name.clone()))
                    .collect();
                algebra::project(&input.eval(tables)?, &targets)
            }
            Plan::Join { left, right, on } => {
                algebra::join(&left.eval(tables)?, &right.eval(tables)?, on.as_ref())
            }
            Plan::Union { left, right } => {
                algebra::union(&left.eval(tables)?, &right.eval(tables)?)
            }
            Plan::Aggregate {
                input,
                group_by,
                func,
                attr,
                output,
            } => algebra::aggregate(
                &input.eval(tables)?,
                group_by,
                *func,
                attr.as_deref(),
                output,
            ),
            Plan::Sort {
                input,
                order,
                output,
                engine,
            } => {
                let r = input.eval(tables)?;
                let spec = SortSpec::new(order.clone());
                match engine {
                    Engine::Reference => ordering::sort(&r, &spec, output),
                    Engine::Native => native::onepass_sort(&r, &spec, None, output),
                }
            }
            Plan::Topk {
                input,
                order,
                k,
                output,
                engine,
            } => {
                let r = input.eval(tables)?;
                let spec = SortSpec::new(order.clone());
                match engine {
                    Engine::Reference => ordering::topk(&r, &spec, *k, output),
                    Engine::Native => native::onepass_sort(&r, &spec, Some(*k), output),
                }
            }
            Plan::Window {
                input,
                func,
                attr,
                output,
                partition_by,
                order,
                frame,
                engine,
            } => {
                let r = input.eval(tables)?;
                let spec = WindowSpec {
                    f: *func,
                    attr: attr.clone(),
                    output: output.clone(),
                    partition_by: partition_by.clone(),
                    order: SortSpec::new(order.clone()),
                    l: frame.0,
                    u: frame.1,
                };
                match engine {
                    Engine::Reference => window::window_aggregate(&r, &spec),
                    Engine::Native => native::onepass_window(&r, &spec),
                }
            }
        }
    }

    /// Evaluate deterministically over one possible world per table: lift
    /// each world to an all-certain uncertain relation, evaluate, and read
    /// the selected-guess world back off. On all-certain inputs every
    /// operator coincides with ordinary deterministic bag semantics.
    pub fn eval_world(&self, worlds: &HashMap<String, BagRelation>) -> Result<BagRelation> {
        let tables: HashMap<String, AuRelation> = worlds
            .iter()
            .map(|(name, w)| (name.clone(), w.to_au()))
            .collect();
        Ok(self.eval(&tables)?.sg_world())
    }
}
