//! Query processing over attribute-annotated uncertain databases.
//!
//! Values carry a `⟨lower, selected-guess, upper⟩` range, tuples carry a
//! `(lb, sg, ub)` multiplicity triple, and every operator — selection,
//! projection, join, union, aggregation, sorting, top-k, and windowed
//! aggregation — preserves those bounds: every deterministic world bounded by
//! the input is bounded by the output, and the selected-guess world evolves
//! under ordinary deterministic semantics.
//!
//! The crate offers two engines with identical observable behaviour: a
//! reference engine that follows the definitions directly, and a native
//! one-pass engine for sorting, top-k, and windowed aggregation. An
//! enumeration oracle over small incomplete databases checks both against
//! ground truth.

pub mod algebra;
pub mod bounding;
pub mod csv_io;
pub mod expr;
pub mod heap;
pub mod native;
pub mod oracle;
pub mod ordering;
pub mod plan;
pub mod synth;
pub mod relation;
pub mod value;
pub mod window;

pub use relation::{AuRelation, BagRelation, RangeTuple, Schema};
pub use value::{Kind, Monoid, MultTriple, RangeValue, Scalar};

/// Errors produced by relation construction, evaluation, and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: Kind, found: Kind },
    #[error("kind mismatch: {left} vs {right}")]
    KindMismatch { left: Kind, right: Kind },
    #[error("invalid range: {detail}")]
    InvalidRange { detail: String },
    #[error("invalid schema: {detail}")]
    InvalidSchema { detail: String },
    #[error("unknown attribute `{name}`")]
    UnknownAttribute { name: String },
    #[error("schema mismatch: {detail}")]
    SchemaMismatch { detail: String },
    #[error("unbound variable `{name}`")]
    UnboundVariable { name: String },
    #[error("invalid argument: {detail}")]
    InvalidArgument { detail: String },
    #[error("csv error: {detail}")]
    Csv { detail: String },
    #[error("plan error: {detail}")]
    Plan { detail: String },
    #[error("oracle error: {detail}")]
    Oracle { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
