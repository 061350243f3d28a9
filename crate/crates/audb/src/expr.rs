//! Expressions over scalars and their bound-preserving range evaluation.
//!
//! The core grammar is variables, constants, `+`, `·`, `¬`, `∧`, `∨`, `=`,
//! `≤`, and `if-then-else`. Derived operators (`−`, `<`, `>`, `≥`, `≠`)
//! desugar into the core. Range evaluation ([`eval_range`]) returns a
//! [`RangeValue`] whose bounds contain the deterministic result for every
//! point valuation drawn from the input ranges, and whose selected guess is
//! the deterministic evaluation over the selected-guess inputs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::value::{RangeBool, RangeValue, Scalar};
use crate::{Error, Result};

/// An expression tree. See the module docs for the grammar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expr {
    Var(String),
    Const(Scalar),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Le(Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn real(v: f64) -> Expr {
        Expr::Const(Scalar::Real(v))
    }

    pub fn text(v: impl Into<String>) -> Expr {
        Expr::Const(Scalar::Text(v.into()))
    }

    pub fn boolean(v: bool) -> Expr {
        Expr::Const(Scalar::Bool(v))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(a.into(), b.into())
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(a.into(), b.into())
    }

    pub fn not(a: Expr) -> Expr {
        Expr::Not(a.into())
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(a.into(), b.into())
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(a.into(), b.into())
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::Eq(a.into(), b.into())
    }

    pub fn le(a: Expr, b: Expr) -> Expr {
        Expr::Le(a.into(), b.into())
    }

    pub fn ite(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::If(c.into(), t.into(), e.into())
    }

    /// `a − b`, desugared to `a + (−1)·b`.
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(a, Expr::mul(Expr::real(-1.0), b))
    }

    /// `a < b`, desugared to `¬(b ≤ a)`.
    pub fn lt(a: Expr, b: Expr) -> Expr {
        Expr::not(Expr::le(b, a))
    }

    /// `a > b`, desugared to `¬(a ≤ b)`.
    pub fn gt(a: Expr, b: Expr) -> Expr {
        Expr::not(Expr::le(a, b))
    }

    /// `a ≥ b`, desugared to `b ≤ a`.
    pub fn ge(a: Expr, b: Expr) -> Expr {
        Expr::le(b, a)
    }

    /// `a ≠ b`, desugared to `¬(a = b)`.
    pub fn ne(a: Expr, b: Expr) -> Expr {
        Expr::not(Expr::eq(a, b))
    }
}

/// Deterministic evaluation under a point valuation.
pub fn eval_det(e: &Expr, env: &HashMap<String, Scalar>) -> Result<Scalar> {
    match e {
        Expr::Var(name) => env
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable { name: name.clone() }),
        Expr::Const(c) => Ok(c.clone()),
        Expr::Add(a, b) => Ok(Scalar::Real(
            eval_det(a, env)?.as_real()? + eval_det(b, env)?.as_real()?,
        )),
        Expr::Mul(a, b) => Ok(Scalar::Real(
            eval_det(a, env)?.as_real()? * eval_det(b, env)?.as_real()?,
        )),
        Expr::Not(a) => Ok(Scalar::Bool(!eval_det(a, env)?.as_bool()?)),
        Expr::And(a, b) => Ok(Scalar::Bool(
            eval_det(a, env)?.as_bool()? && eval_det(b, env)?.as_bool()?,
        )),
        Expr::Or(a, b) => Ok(Scalar::Bool(
            eval_det(a, env)?.as_bool()? || eval_det(b, env)?.as_bool()?,
        )),
        Expr::Eq(a, b) => {
            let (va, vb) = (eval_det(a, env)?, eval_det(b, env)?);
            check_same_kind(&va, &vb)?;
            Ok(Scalar::Bool(va == vb))
        }
        Expr::Le(a, b) => Ok(Scalar::Bool(eval_det(a, env)?.le(&eval_det(b, env)?)?)),
        Expr::If(c, t, e) => {
            if eval_det(c, env)?.as_bool()? {
                eval_det(t, env)
            } else {
                eval_det(e, env)
            }
        }
    }
}

fn check_same_kind(a: &Scalar, b: &Scalar) -> Result<()> {
    if a.kind() != b.kind() {
        return Err(Error::KindMismatch {
            left: a.kind(),
            right: b.kind(),
        });
    }
    Ok(())
}

/// Bound-preserving range evaluation under a range valuation.
pub fn eval_range(e: &Expr, env: &HashMap<String, RangeValue>) -> Result<RangeValue> {
    match e {
        Expr::Var(name) => env
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable { name: name.clone() }),
        Expr::Const(c) => Ok(RangeValue::certain(c.clone())),
        Expr::Add(a, b) => {
            let (alb, asg, aub) = eval_range(a, env)?.as_reals()?;
            let (blb, bsg, bub) = eval_range(b, env)?.as_reals()?;
            RangeValue::new(
                Scalar::Real(alb + blb),
                Scalar::Real(asg + bsg),
                Scalar::Real(aub + bub),
            )
        }
        Expr::Mul(a, b) => {
            let (alb, asg, aub) = eval_range(a, env)?.as_reals()?;
            let (blb, bsg, bub) = eval_range(b, env)?.as_reals()?;
            let combos = [alb * blb, alb * bub, aub * blb, aub * bub];
            RangeValue::new(
                Scalar::Real(combos.iter().copied().fold(f64::INFINITY, f64::min)),
                Scalar::Real(asg * bsg),
                Scalar::Real(combos.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            )
        }
        Expr::Not(a) => {
            let v = eval_range(a, env)?.as_bools()?;
            Ok(RangeBool::new(!v.ub, !v.sg, !v.lb)?.into())
        }
        Expr::And(a, b) => {
            let va = eval_range(a, env)?.as_bools()?;
            let vb = eval_range(b, env)?.as_bools()?;
            Ok(RangeBool::new(va.lb && vb.lb, va.sg && vb.sg, va.ub && vb.ub)?.into())
        }
        Expr::Or(a, b) => {
            let va = eval_range(a, env)?.as_bools()?;
            let vb = eval_range(b, env)?.as_bools()?;
            Ok(RangeBool::new(va.lb || vb.lb, va.sg || vb.sg, va.ub || vb.ub)?.into())
        }
        Expr::Eq(a, b) => {
            let va = eval_range(a, env)?;
            let vb = eval_range(b, env)?;
            Ok(RangeValue::from(range_eq(&va, &vb)?))
        }
        Expr::Le(a, b) => {
            let va = eval_range(a, env)?;
            let vb = eval_range(b, env)?;
            Ok(RangeValue::from(range_le(&va, &vb)?))
        }
        Expr::If(c, t, e) => {
            let vc = eval_range(c, env)?.as_bools()?;
            if vc.is_certain() {
                if vc.sg {
                    eval_range(t, env)
                } else {
                    eval_range(e, env)
                }
            } else {
                let vt = eval_range(t, env)?;
                let ve = eval_range(e, env)?;
                check_same_kind(vt.lb(), ve.lb())?;
                let lb = if vt.lb().le(ve.lb())? { vt.lb() } else { ve.lb() }.clone();
                let ub = if ve.ub().le(vt.ub())? { vt.ub() } else { ve.ub() }.clone();
                let sg = if vc.sg { vt.sg() } else { ve.sg() }.clone();
                RangeValue::new(lb, sg, ub)
            }
        }
    }
}

/// Uncertain equality: certainly equal iff both operands are certain and
/// coincide; possibly equal iff the intervals overlap.
pub fn range_eq(a: &RangeValue, b: &RangeValue) -> Result<RangeBool> {
    check_same_kind(a.lb(), b.lb())?;
    let lb = a.ub().le(b.lb())? && b.ub().le(a.lb())?;
    let sg = a.sg() == b.sg();
    let ub = a.lb().le(b.ub())? && b.lb().le(a.ub())?;
    RangeBool::new(lb, sg, ub)
}

/// Uncertain `≤`: certain iff it holds for the worst pairing of the bounds.
pub fn range_le(a: &RangeValue, b: &RangeValue) -> Result<RangeBool> {
    check_same_kind(a.lb(), b.lb())?;
    let lb = a.ub().le(b.lb())?;
    let sg = a.sg().le(b.sg())?;
    let ub = a.lb().le(b.ub())?;
    RangeBool::new(lb, sg, ub)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det_env(pairs: &[(&str, Scalar)]) -> HashMap<String, Scalar> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    fn range_env(pairs: &[(&str, RangeValue)]) -> HashMap<String, RangeValue> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn eval_det_examples() {
        let e = Expr::add(Expr::var("x"), Expr::var("y"));
        let env = det_env(&[("x", Scalar::Real(1.0)), ("y", Scalar::Real(4.0))]);
        assert_eq!(eval_det(&e, &env).unwrap(), Scalar::Real(5.0));

        let e = Expr::not(Expr::boolean(true));
        assert_eq!(eval_det(&e, &det_env(&[])).unwrap(), Scalar::Bool(false));

        let e = Expr::ite(
            Expr::le(Expr::real(1.0), Expr::real(2.0)),
            Expr::real(10.0),
            Expr::real(20.0),
        );
        assert_eq!(eval_det(&e, &det_env(&[])).unwrap(), Scalar::Real(10.0));
    }

    #[test]
    fn eval_range_comparison_example() {
        // ⟨1,1,3⟩ < ⟨2,2,2⟩ → ⟨⊥,⊤,⊤⟩
        let e = Expr::lt(Expr::var("a"), Expr::var("b"));
        let env = range_env(&[
            ("a", RangeValue::reals(1.0, 1.0, 3.0)),
            ("b", RangeValue::reals(2.0, 2.0, 2.0)),
        ]);
        let v = eval_range(&e, &env).unwrap().as_bools().unwrap();
        assert_eq!(v, RangeBool::new(false, true, true).unwrap());
    }

    #[test]
    fn eval_range_addition_example() {
        let e = Expr::add(Expr::var("a"), Expr::var("b"));
        let env = range_env(&[
            ("a", RangeValue::reals(1.0, 1.0, 2.0)),
            ("b", RangeValue::reals(4.0, 4.0, 5.0)),
        ]);
        assert_eq!(eval_range(&e, &env).unwrap(), RangeValue::reals(5.0, 5.0, 7.0));
    }

    #[test]
    fn eval_range_uncertain_condition_example() {
        let e = Expr::ite(Expr::var("c"), Expr::real(1.0), Expr::real(5.0));
        let env = range_env(&[(
            "c",
            RangeValue::from(RangeBool::new(false, true, true).unwrap()),
        )]);
        assert_eq!(eval_range(&e, &env).unwrap(), RangeValue::reals(1.0, 1.0, 5.0));
    }

    #[test]
    fn eval_range_multiplication_example() {
        let e = Expr::mul(Expr::var("a"), Expr::var("b"));
        let env = range_env(&[
            ("a", RangeValue::reals(-1.0, 0.0, 1.0)),
            ("b", RangeValue::reals(-1.0, 0.0, 1.0)),
        ]);
        assert_eq!(eval_range(&e, &env).unwrap(), RangeValue::reals(-1.0, 0.0, 1.0));
    }

    #[test]
    fn eval_range_degenerates_to_det_on_certain_inputs() {
        let e = Expr::ite(
            Expr::lt(Expr::var("x"), Expr::real(3.0)),
            Expr::mul(Expr::var("x"), Expr::real(2.0)),
            Expr::sub(Expr::var("x"), Expr::real(1.0)),
        );
        let renv = range_env(&[("x", RangeValue::certain(Scalar::Real(2.0)))]);
        let denv = det_env(&[("x", Scalar::Real(2.0))]);
        let rv = eval_range(&e, &renv).unwrap();
        assert!(rv.is_certain());
        assert_eq!(rv.sg(), &eval_det(&e, &denv).unwrap());
    }
}
