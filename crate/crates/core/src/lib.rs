//! Congruence workbench: computations on finite algebras given by
//! operation tables.
//!
//! The crate covers congruence lattices and monoliths, the center and the
//! upper central series, free-algebra term catalogs (Mal'tsev terms,
//! commutator words), the congruence formulas used for definable principal
//! subcongruences, and desk-scale enumeration of subdirectly irreducible
//! members of a variety.

pub mod algebra;
pub mod bitset;
pub mod catalog;
pub mod centrality;
mod closure;
pub mod congruence;
pub mod corpus;
pub mod error;
pub mod factor;
pub mod formulas;
pub mod free;
pub mod hypotheses;
pub mod par;
pub mod partition;
pub mod term;

pub use algebra::{Budget, FiniteAlgebra};
pub use congruence::{SIWitness, UnaryPolynomialWitness};
pub use error::{Error, Result};
pub use partition::Partition;
pub use term::{OpSymbol, Signature, Term, VarStyle};
