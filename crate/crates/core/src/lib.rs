//! Exact extremality tests for couplings with fixed marginals that are
//! invariant under a finite group acting diagonally on two finite spaces.
//!
//! - [`arith`]: rationals and exact row reduction.
//! - [`symmetry`]: group closure and orbit decomposition.
//! - [`coupling`]: the coupling set, graphic couplings, independent extension.
//! - [`extremality`]: the kernel test with perturbation certificates.
//! - [`enumeration`]: all vertices of small instances, support-size checks.
//! - [`dyadic`]: the two-point nongraphic construction and `F_p`.
//! - [`io`]: JSON instances and report fragments.

pub mod arith;
pub mod coupling;
pub mod dyadic;
pub mod enumeration;
pub mod extremality;
pub mod io;
pub mod symmetry;

pub use arith::{parse_rational, RatMatrix, Rational};
pub use coupling::{
    extend_with_independent, graphic_coupling, is_graphic, marginals, validate, Coupling, GraphicKind, GraphicVerdict,
    Marginal,
};
pub use enumeration::{enumerate_extreme, verify_birkhoff, VertexSet};
pub use extremality::{test_extreme, Certificate, ExtremalityVerdict};
pub use symmetry::{close_group, decompose_orbits, ActionGenerator, GroupClosure, OrbitDecomposition};
