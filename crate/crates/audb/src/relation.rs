//! Relations: schemas, range-annotated (AU) relations, and deterministic bag
//! relations.
//!
//! An [`AuRelation`] maps range-annotated tuples to multiplicity triples; a
//! [`BagRelation`] is one deterministic possible world. Rows are kept in a
//! canonical order so iteration and serialization are deterministic.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;

use crate::value::{Kind, MultTriple, RangeValue, Scalar};
use crate::{Error, Result};

/// An ordered list of named, kinded attributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    attrs: Vec<(String, Kind)>,
}

impl Schema {
    pub fn new(attrs: Vec<(String, Kind)>) -> Result<Self> {
        if attrs.is_empty() {
            return Err(Error::InvalidSchema {
                detail: "schema must have at least one attribute".into(),
            });
        }
        for (i, (name, _)) in attrs.iter().enumerate() {
            if attrs[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::InvalidSchema {
                    detail: format!("duplicate attribute name `{name}`"),
                });
            }
        }
        Ok(Schema { attrs })
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn attrs(&self) -> &[(String, Kind)] {
        &self.attrs
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.attrs.iter().map(|(n, _)| n.as_str())
    }

    pub fn kind(&self, idx: usize) -> Kind {
        self.attrs[idx].1
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.attrs
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::UnknownAttribute { name: name.into() })
    }

    /// Extend with one more attribute (e.g. a sort position or aggregate).
    pub fn extend(&self, name: impl Into<String>, kind: Kind) -> Result<Schema> {
        let mut attrs = self.attrs.clone();
        attrs.push((name.into(), kind));
        Schema::new(attrs)
    }
}

/// A tuple of range-annotated values, one per schema attribute.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RangeTuple(pub Vec<RangeValue>);

impl RangeTuple {
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[RangeValue] {
        &self.0
    }

    /// The tuple of selected-guess scalars.
    pub fn sg_tuple(&self) -> Vec<Scalar> {
        self.0.iter().map(|v| v.sg().clone()).collect()
    }

    /// All attributes certain.
    pub fn is_certain(&self) -> bool {
        self.0.iter().all(RangeValue::is_certain)
    }

    /// Projection onto the given attribute indices.
    pub fn project(&self, idxs: &[usize]) -> RangeTuple {
        RangeTuple(idxs.iter().map(|&i| self.0[i].clone()).collect())
    }
}

impl fmt::Display for RangeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// True iff every attribute of `t` lies within the corresponding range of `t̂`.
pub fn tuple_bounded(t: &[Scalar], t_hat: &RangeTuple) -> Result<bool> {
    if t.len() != t_hat.arity() {
        return Err(Error::SchemaMismatch {
            detail: format!("arity {} vs {}", t.len(), t_hat.arity()),
        });
    }
    for (c, v) in t.iter().zip(t_hat.values()) {
        if !v.bounds(c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An AU relation: a finite map from range-annotated tuples to multiplicity
/// triples. No row is annotated `(0,0,0)`; inserting an existing tuple merges
/// annotations by componentwise addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuRelation {
    schema: Schema,
    rows: BTreeMap<RangeTuple, MultTriple>,
}

impl AuRelation {
    pub fn new(schema: Schema) -> Self {
        AuRelation {
            schema,
            rows: BTreeMap::new(),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&RangeTuple, &MultTriple)> {
        self.rows.iter()
    }

    pub fn get(&self, t: &RangeTuple) -> Option<&MultTriple> {
        self.rows.get(t)
    }

    /// Insert a row, merging with an existing identical tuple. Zero
    /// annotations are dropped.
    pub fn insert(&mut self, tuple: RangeTuple, ann: MultTriple) -> Result<()> {
        self.check_tuple(&tuple)?;
        if ann.is_zero() {
            return Ok(());
        }
        let slot = self.rows.entry(tuple).or_insert(MultTriple::ZERO);
        *slot = slot.add(&ann);
        Ok(())
    }

    fn check_tuple(&self, tuple: &RangeTuple) -> Result<()> {
        if tuple.arity() != self.schema.len() {
            return Err(Error::SchemaMismatch {
                detail: format!(
                    "tuple arity {} vs schema arity {}",
                    tuple.arity(),
                    self.schema.len()
                ),
            });
        }
        for (i, v) in tuple.values().iter().enumerate() {
            if v.kind() != self.schema.kind(i) {
                return Err(Error::SchemaMismatch {
                    detail: format!(
                        "attribute `{}` expects {}, got {}",
                        self.schema.attrs()[i].0,
                        self.schema.kind(i),
                        v.kind()
                    ),
                });
            }
        }
        Ok(())
    }

    /// Build a relation from rows, merging duplicates.
    pub fn from_rows<I>(schema: Schema, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (RangeTuple, MultTriple)>,
    {
        let mut r = AuRelation::new(schema);
        for (t, m) in rows {
            r.insert(t, m)?;
        }
        Ok(r)
    }

    /// Bulk-build from rows already known to conform to `schema` and to
    /// have pairwise distinct tuples — e.g. rows derived from an existing
    /// relation. Skips per-row validation and duplicate merging.
    pub(crate) fn from_valid_rows<I>(schema: Schema, rows: I) -> Self
    where
        I: IntoIterator<Item = (RangeTuple, MultTriple)>,
    {
        AuRelation { schema, rows: rows.into_iter().collect() }
    }

    /// The selected-guess world: project every row to its sg scalars with
    /// multiplicity sg, merging identical projections.
    pub fn sg_world(&self) -> BagRelation {
        let mut world = BagRelation::new(self.schema.clone());
        for (t, ann) in &self.rows {
            if ann.sg() > 0 {
                world.insert(t.sg_tuple(), ann.sg());
            }
        }
        world
    }

    /// Variable environment for evaluating expressions over one row.
    pub fn env_for(&self, tuple: &RangeTuple) -> HashMap<String, RangeValue> {
        self.schema
            .names()
            .zip(tuple.values())
            .map(|(n, v)| (n.to_owned(), v.clone()))
            .collect()
    }
}

/// A deterministic bag relation: one possible world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BagRelation {
    schema: Schema,
    rows: BTreeMap<Vec<Scalar>, u64>,
}

impl BagRelation {
    pub fn new(schema: Schema) -> Self {
        BagRelation {
            schema,
            rows: BTreeMap::new(),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.rows.values().sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&Vec<Scalar>, &u64)> {
        self.rows.iter()
    }

    pub fn multiplicity(&self, t: &[Scalar]) -> u64 {
        self.rows.get(t).copied().unwrap_or(0)
    }

    pub fn insert(&mut self, tuple: Vec<Scalar>, mult: u64) {
        if mult == 0 {
            return;
        }
        *self.rows.entry(tuple).or_insert(0) += mult;
    }

    pub fn from_rows<I>(schema: Schema, rows: I) -> Self
    where
        I: IntoIterator<Item = (Vec<Scalar>, u64)>,
    {
        let mut r = BagRelation::new(schema);
        for (t, m) in rows {
            r.insert(t, m);
        }
        r
    }

    /// Variable environment for evaluating expressions over one row.
    pub fn env_for(&self, tuple: &[Scalar]) -> HashMap<String, Scalar> {
        self.schema
            .names()
            .zip(tuple.iter())
            .map(|(n, v)| (n.to_owned(), v.clone()))
            .collect()
    }

    /// Embed as an all-certain AU relation.
    pub fn to_au(&self) -> AuRelation {
        let mut r = AuRelation::new(self.schema.clone());
        for (t, &m) in &self.rows {
            let tuple = RangeTuple(t.iter().cloned().map(RangeValue::certain).collect());
            let ann = MultTriple::new(m, m, m).expect("constant triple");
            r.insert(tuple, ann).expect("schema matches by construction");
        }
        r
    }
}
