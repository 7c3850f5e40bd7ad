//! Root-count bounds for lacunary polynomials over finite fields.

pub mod bounds;
pub mod cli;
pub mod constructions;
pub mod field;
pub mod iteration;
pub mod numtheory;
pub mod poly;
pub mod redei;
pub mod sweep;
pub mod verify;

pub use bounds::{bound_all, BoundError, BoundOutcome, LacunaryForm, LacunaryShape, Method, Witness};
pub use field::{Element, FieldCtx, FieldError};
pub use poly::{PolyError, RootReport, RootStrategy, SparsePoly};
