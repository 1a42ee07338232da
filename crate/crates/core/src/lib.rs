//! Desk-scale verification tools for periodic diagonal orbits, best
//! approximations of algebraic vectors and p-adic good functions.

pub mod bestapprox;
pub mod error;
pub mod interval;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod nubest;
pub mod numfield;
pub mod orbitflow;
pub mod padic;
pub mod poly;
pub mod rng;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use interval::{Dyadic, Interval};
pub use lattice::{LatticeBasis, LatticeObservables, Norm};
pub use numfield::{AlgebraicNumber, OrbitMatrix, TotallyRealField};
pub use scalar::{Rational, RealScalar, Scalar};

/// Float lattice basis, the working type for orbit observables.
pub type Lattice = LatticeBasis<f64>;
/// Exact rational lattice basis.
pub type ExactLattice = LatticeBasis<Rational>;
