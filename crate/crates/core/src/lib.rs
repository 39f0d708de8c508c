//! Exact computation in quantum cluster algebras from unpunctured marked surfaces.
//!
//! The crate has two independent routes to the same quantum cluster variable and
//! exists to check that they agree coefficient by coefficient:
//!
//! - [`seed`] mutates quantum seeds in the based quantum torus ([`qtorus`]) and
//!   expresses every reachable cluster variable as a Laurent polynomial in the
//!   initial variables (the mutation oracle).
//! - [`expansion`] assembles the same variable as a weighted sum over canonical
//!   submodules of a string module: the string of an arc ([`strings`]) over the
//!   gentle algebra of a triangulation ([`surface`]), its index vector ([`index`]),
//!   and half-integer weights transported across flips.
//!
//! All arithmetic is exact; `q^{1/2}` is the atomic unit throughout.

pub mod expansion;
pub mod index;
pub mod linalg;
pub mod qtorus;
pub mod seed;
pub mod strings;
pub mod surface;

pub use expansion::{CaseBijection, Frame, WeightedExpansion};
pub use qtorus::{QCoeff, QTElement, SkewForm};
pub use seed::{CompatiblePair, QuantumSeed};
pub use strings::StringWord;
pub use surface::{QuiverWithRelations, Triangulation};
