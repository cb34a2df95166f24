//! Discrete-time TASEP with particle- and time-inhomogeneous Bernoulli jump
//! rates, built from its combinatorial foundations up to Fredholm
//! determinants:
//!
//! - [`combinatorics`]: partitions, tableaux, interlacing chains, Schur/h/e
//!   polynomials;
//! - [`drsk`]: the dual column Robinson–Schensted–Knuth bijection;
//! - [`dynamics`]: the particle system itself, plus exhaustive
//!   transition-probability oracles;
//! - [`operators`]: local Toeplitz operators, non-intersecting-path kernels
//!   and the intertwined transition kernel;
//! - [`dpp`]: the determinantal point process, biorthogonal correlation
//!   kernel and Fredholm determinants;
//! - [`hitting`]: the boundary-value problem and the random-walk-hitting
//!   form of the correlation kernel;
//! - [`harness`]: configuration, reports, and the identity verification
//!   suite driving all of the above.
//!
//! Every kernel identity is checked against independent brute-force
//! enumeration at desk scale; see the `verify` CLI subcommand and the
//! acceptance test suite.

pub mod combinatorics;
pub mod dpp;
pub mod drsk;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod hitting;
pub mod linalg;
pub mod operators;
pub mod oracles;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;
