//! Exact combinatorics of tuples of lattice supports.

pub mod atlas;
pub mod classify;
pub mod corpus;
pub mod degree;
pub mod document;
pub mod error;
mod euler;
pub mod exact;
pub mod lattice;
pub mod oracle;
pub mod poset;
pub mod random;
pub mod support;
pub mod volume;

pub use error::{AtlasError, Result};
pub use lattice::{IntMatrix, SmithForm, Sublattice};
pub use support::{IndexSubset, Normalization, Support, SupportTuple};
pub use volume::Face;
pub use classify::{TupleClass, TupleKind};
pub use poset::{BkPoset, IrrClass, PosetElement};
pub use degree::DegreeValue;
pub use atlas::{Atlas, Codim, Component, DiscriminantKind, DiscriminantReport, Structure};
