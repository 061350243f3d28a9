//! Scalar values, range-annotated values, and multiplicity triples.
//!
//! A [`RangeValue`] is a triple `⟨lb, sg, ub⟩` of scalars from one totally
//! ordered domain: a lower bound, a *selected-guess* value (the value in one
//! distinguished possible world), and an upper bound, with `lb ≤ sg ≤ ub`.
//! A [`MultTriple`] is the analogous triple of tuple multiplicities in ℕ.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The scalar kinds supported by the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Real,
    Text,
    Bool,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Real => write!(f, "real"),
            Kind::Text => write!(f, "text"),
            Kind::Bool => write!(f, "bool"),
        }
    }
}

/// A deterministic scalar value.
///
/// Each kind is totally ordered: reals numerically, text by code point,
/// booleans with `false < true`. Comparing scalars of different kinds is a
/// type error ([`Scalar::compare`]); the derived [`Ord`] instance is a
/// *storage* order (kind tag first) used only to keep relations in
/// deterministic map order and must not be used for query semantics.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scalar {
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Scalar {
    pub fn kind(&self) -> Kind {
        match self {
            Scalar::Real(_) => Kind::Real,
            Scalar::Text(_) => Kind::Text,
            Scalar::Bool(_) => Kind::Bool,
        }
    }

    pub fn as_real(&self) -> Result<f64> {
        match self {
            Scalar::Real(v) => Ok(*v),
            other => Err(Error::TypeMismatch {
                expected: Kind::Real,
                found: other.kind(),
            }),
        }
    }

    pub fn as_bool(&self) -> Result<bool> {
        match self {
            Scalar::Bool(v) => Ok(*v),
            other => Err(Error::TypeMismatch {
                expected: Kind::Bool,
                found: other.kind(),
            }),
        }
    }

    /// Semantic comparison within one kind; cross-kind comparison is an error.
    pub fn compare(&self, other: &Scalar) -> Result<Ordering> {
        match (self, other) {
            (Scalar::Real(a), Scalar::Real(b)) => {
                Ok(canonical_real(*a).total_cmp(&canonical_real(*b)))
            }
            (Scalar::Text(a), Scalar::Text(b)) => Ok(a.cmp(b)),
            (Scalar::Bool(a), Scalar::Bool(b)) => Ok(a.cmp(b)),
            _ => Err(Error::KindMismatch {
                left: self.kind(),
                right: other.kind(),
            }),
        }
    }

    /// `self ≤ other` under the semantic order.
    pub fn le(&self, other: &Scalar) -> Result<bool> {
        Ok(self.compare(other)? != Ordering::Greater)
    }

    fn storage_rank(&self) -> u8 {
        match self {
            Scalar::Real(_) => 0,
            Scalar::Text(_) => 1,
            Scalar::Bool(_) => 2,
        }
    }
}

/// Collapse `-0.0` into `0.0` so the two zeros are one value for equality,
/// hashing, and ordering (arithmetic like `0 · -3` produces `-0.0`).
fn canonical_real(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            // Bitwise equality: inputs are exact decimals at desk scale.
            (Scalar::Real(a), Scalar::Real(b)) => {
                canonical_real(*a).to_bits() == canonical_real(*b).to_bits()
            }
            (Scalar::Text(a), Scalar::Text(b)) => a == b,
            (Scalar::Bool(a), Scalar::Bool(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.storage_rank().hash(state);
        match self {
            Scalar::Real(v) => canonical_real(*v).to_bits().hash(state),
            Scalar::Text(v) => v.hash(state),
            Scalar::Bool(v) => v.hash(state),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    /// Canonical storage order: kind rank, then in-kind order. Not for
    /// query semantics; see [`Scalar::compare`].
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Real(a), Scalar::Real(b)) => {
                canonical_real(*a).total_cmp(&canonical_real(*b))
            }
            (Scalar::Text(a), Scalar::Text(b)) => a.cmp(b),
            (Scalar::Bool(a), Scalar::Bool(b)) => a.cmp(b),
            _ => self.storage_rank().cmp(&other.storage_rank()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Real(v) => write!(f, "{v}"),
            Scalar::Text(v) => write!(f, "{v}"),
            Scalar::Bool(v) => write!(f, "{v}"),
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Real(v)
    }
}

impl From<bool> for Scalar {
    fn from(v: bool) -> Self {
        Scalar::Bool(v)
    }
}

impl From<&str> for Scalar {
    fn from(v: &str) -> Self {
        Scalar::Text(v.to_owned())
    }
}

/// A range-annotated value `⟨lb, sg, ub⟩` with `lb ≤ sg ≤ ub`, all of one kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RangeValue {
    lb: Scalar,
    sg: Scalar,
    ub: Scalar,
}

impl RangeValue {
    pub fn new(lb: Scalar, sg: Scalar, ub: Scalar) -> Result<Self> {
        if lb.kind() != sg.kind() || sg.kind() != ub.kind() {
            return Err(Error::KindMismatch {
                left: lb.kind(),
                right: if lb.kind() != sg.kind() { sg.kind() } else { ub.kind() },
            });
        }
        if lb.compare(&sg)? == Ordering::Greater || sg.compare(&ub)? == Ordering::Greater {
            return Err(Error::InvalidRange {
                detail: format!("⟨{lb}, {sg}, {ub}⟩ violates lb ≤ sg ≤ ub"),
            });
        }
        Ok(RangeValue { lb, sg, ub })
    }

    /// A certain value `⟨c, c, c⟩`.
    pub fn certain(c: Scalar) -> Self {
        RangeValue {
            lb: c.clone(),
            sg: c.clone(),
            ub: c,
        }
    }

    /// Convenience constructor for real triples; panics on invalid order
    /// (intended for literals in tests and generators).
    pub fn reals(lb: f64, sg: f64, ub: f64) -> Self {
        RangeValue::new(Scalar::Real(lb), Scalar::Real(sg), Scalar::Real(ub))
            .expect("real triple out of order")
    }

    pub fn lb(&self) -> &Scalar {
        &self.lb
    }

    pub fn sg(&self) -> &Scalar {
        &self.sg
    }

    pub fn ub(&self) -> &Scalar {
        &self.ub
    }

    pub fn kind(&self) -> Kind {
        self.lb.kind()
    }

    pub fn is_certain(&self) -> bool {
        self.lb == self.sg && self.sg == self.ub
    }

    /// True iff `lb ≤ c ≤ ub` under the semantic order.
    pub fn bounds(&self, c: &Scalar) -> Result<bool> {
        Ok(self.lb.le(c)? && c.le(&self.ub)?)
    }

    /// The three real components, or a type error for other kinds.
    pub fn as_reals(&self) -> Result<(f64, f64, f64)> {
        Ok((self.lb.as_real()?, self.sg.as_real()?, self.ub.as_real()?))
    }

    pub fn as_bools(&self) -> Result<RangeBool> {
        Ok(RangeBool {
            lb: self.lb.as_bool()?,
            sg: self.sg.as_bool()?,
            ub: self.ub.as_bool()?,
        })
    }
}

impl fmt::Display for RangeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_certain() {
            write!(f, "{}", self.sg)
        } else {
            write!(f, "⟨{}, {}, {}⟩", self.lb, self.sg, self.ub)
        }
    }
}

/// A boolean range value. Only the four triples with `lb ⇒ sg ⇒ ub` exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RangeBool {
    pub lb: bool,
    pub sg: bool,
    pub ub: bool,
}

impl RangeBool {
    pub const CERTAIN_TRUE: RangeBool = RangeBool {
        lb: true,
        sg: true,
        ub: true,
    };
    pub const CERTAIN_FALSE: RangeBool = RangeBool {
        lb: false,
        sg: false,
        ub: false,
    };

    pub fn new(lb: bool, sg: bool, ub: bool) -> Result<Self> {
        if (lb && !sg) || (sg && !ub) {
            return Err(Error::InvalidRange {
                detail: format!("⟨{lb}, {sg}, {ub}⟩ violates lb ≤ sg ≤ ub"),
            });
        }
        Ok(RangeBool { lb, sg, ub })
    }

    pub fn is_certain(&self) -> bool {
        self.lb == self.ub
    }
}

impl From<RangeBool> for RangeValue {
    fn from(b: RangeBool) -> Self {
        RangeValue {
            lb: Scalar::Bool(b.lb),
            sg: Scalar::Bool(b.sg),
            ub: Scalar::Bool(b.ub),
        }
    }
}

/// A tuple multiplicity triple `(lb, sg, ub) ∈ ℕ³` with `lb ≤ sg ≤ ub`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultTriple {
    lb: u64,
    sg: u64,
    ub: u64,
}

impl MultTriple {
    pub const ZERO: MultTriple = MultTriple { lb: 0, sg: 0, ub: 0 };
    pub const ONE: MultTriple = MultTriple { lb: 1, sg: 1, ub: 1 };

    pub fn new(lb: u64, sg: u64, ub: u64) -> Result<Self> {
        if lb > sg || sg > ub {
            return Err(Error::InvalidRange {
                detail: format!("({lb}, {sg}, {ub}) violates lb ≤ sg ≤ ub"),
            });
        }
        Ok(MultTriple { lb, sg, ub })
    }

    pub fn lb(&self) -> u64 {
        self.lb
    }

    pub fn sg(&self) -> u64 {
        self.sg
    }

    pub fn ub(&self) -> u64 {
        self.ub
    }

    pub fn is_zero(&self) -> bool {
        self.ub == 0
    }

    /// Componentwise addition (bag union / projection merge).
    pub fn add(&self, other: &MultTriple) -> MultTriple {
        MultTriple {
            lb: self.lb + other.lb,
            sg: self.sg + other.sg,
            ub: self.ub + other.ub,
        }
    }

    /// Componentwise multiplication (join).
    pub fn mul(&self, other: &MultTriple) -> MultTriple {
        MultTriple {
            lb: self.lb * other.lb,
            sg: self.sg * other.sg,
            ub: self.ub * other.ub,
        }
    }

    /// Scale by the indicator triple of a boolean condition: each component
    /// is kept where the corresponding condition component holds.
    pub fn scale_by(&self, cond: RangeBool) -> MultTriple {
        MultTriple {
            lb: if cond.lb { self.lb } else { 0 },
            sg: if cond.sg { self.sg } else { 0 },
            ub: if cond.ub { self.ub } else { 0 },
        }
    }
}

impl fmt::Display for MultTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.lb, self.sg, self.ub)
    }
}

/// Aggregation monoids over the reals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monoid {
    Sum,
    Min,
    Max,
}

impl Monoid {
    /// The monoid's neutral element.
    pub fn neutral(&self) -> f64 {
        match self {
            Monoid::Sum => 0.0,
            Monoid::Min => f64::INFINITY,
            Monoid::Max => f64::NEG_INFINITY,
        }
    }

    /// The monoid's addition.
    pub fn add(&self, a: f64, b: f64) -> f64 {
        match self {
            Monoid::Sum => a + b,
            Monoid::Min => a.min(b),
            Monoid::Max => a.max(b),
        }
    }

    /// `k ∘ m`: combine one multiplicity with one value. For sum this is
    /// `k · m`; for min/max the value survives iff the tuple exists.
    pub fn base(&self, k: u64, m: f64) -> f64 {
        match self {
            Monoid::Sum => k as f64 * m,
            Monoid::Min | Monoid::Max => {
                if k != 0 {
                    m
                } else {
                    0.0
                }
            }
        }
    }
}

/// `k ⊛_M m`: combine a multiplicity triple with a real-valued range value.
///
/// The bounds are the min/max of `k ∘ m` over the four bound combinations and
/// the selected guess is `k.sg ∘ m.sg`. The result bounds `k' ∘ m'` for every
/// `k' ∈ [k.lb, k.ub]` and `m' ∈ [m.lb, m.ub]`.
pub fn combine(k: &MultTriple, m: &RangeValue, monoid: Monoid) -> Result<RangeValue> {
    let (mlb, msg, mub) = m.as_reals()?;
    let combos = [
        monoid.base(k.lb(), mlb),
        monoid.base(k.lb(), mub),
        monoid.base(k.ub(), mlb),
        monoid.base(k.ub(), mub),
    ];
    let lb = combos.iter().copied().fold(f64::INFINITY, f64::min);
    let ub = combos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sg = monoid.base(k.sg(), msg);
    RangeValue::new(Scalar::Real(lb), Scalar::Real(sg), Scalar::Real(ub))
}
