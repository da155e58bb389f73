//! Computational companion for almost-prime values of `|E(F_p)|`.
//!
//! The crate covers the full chain from curve data to empirical statistics:
//!
//! * [`arith`]: prime streams, 64-bit factorization, arithmetic functions, `li`/`li2`.
//! * [`ec`]: Weierstrass models over `Q`, reduction mod `p`, point counting.
//! * [`gl2`]: the matrix sets `C(n)` and `Omega(m)` inside `GL2(Z/nZ)`.
//! * [`koblitz`]: Euler products for the twin-prime and Koblitz constants.
//! * [`sieve_theory`]: Greaves weights, `alpha`, `beta`, `J` and the theorem constants.
//! * [`census`]: a streaming, checkpointable census of primes `p <= x`.

pub mod arith;
pub mod census;
pub mod ec;
mod error;
pub mod gl2;
pub mod koblitz;
pub mod quad;
pub mod sieve_theory;

pub use error::{Error, Result};

pub use arith::FactoredInteger;
pub use census::{CensusConfig, CensusReport};
pub use ec::{CurveModel, FrobeniusRecord};
pub use gl2::{GaloisImageSpec, ImageMode, MatrixModN};
pub use koblitz::ConstantEstimate;
pub use sieve_theory::SieveParams;

/// Exact rationals used for densities and identities.
pub type Rational = num_rational::Ratio<i128>;
