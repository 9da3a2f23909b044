//! Exact computations with polynomial differential forms on `R^m`.
//!
//! The crate covers the invariant operators `d`, `d*`, `x`, `x*` and friends,
//! bases of the homogeneous solution spaces `H^s_k` of the Hodge-de Rham
//! system `dP = 0, d*P = 0`, and the Fischer decomposition of arbitrary forms
//! into pieces `w H^s_k` for alternating words `w` over `{x, x*}`, together
//! with its monogenic refinement. Everything is exact rational arithmetic and
//! every decomposition is checked by reconstruction.

pub mod decomposition;
pub mod linalg;
pub mod operators;
pub mod polyform;
pub mod random;
pub mod spaces;
pub mod verify;

/// Arbitrary-precision rational, the scalar type of the whole crate.
pub type Rational = num_rational::BigRational;

pub use decomposition::{
    fischer_decompose, harmonic_decompose, ker_project, monogenic_decompose, monogenic_refine,
    reconstruct, DecompositionError, FischerComponents, HarmonicLayers, KerBlocks,
    MonogenicLayers,
};
pub use linalg::{solve_in_span, RatMatrix, SpanSolver};
pub use operators::{Letter, OmegaWord, Operator};
pub use polyform::{GradedSlot, OrthogonalMatrix, PolyForm};
pub use spaces::{SpaceBasis, SpaceError, SpaceKind};
