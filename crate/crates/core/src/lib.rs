//! Exact-arithmetic toolkit for total positivity of combinatorial triangles.
//!
//! The crate builds lower-triangular matrices (Pascal, Stirling, Lah, Whitney,
//! n-recursive families, Eulerian), their left production matrices, reversals
//! and Toeplitz blocks, realizes them on weighted planar networks, and certifies
//! total positivity and real-rootedness with exhaustive exact checks.
//!
//! Modules, bottom up:
//! - [`exact`]: rational scalars, polynomials, Sturm root counting
//! - [`series`]: truncated formal power series
//! - [`trimat`]: lazy triangles, finite matrices, minors, TP sweeps
//! - [`production`]: left production matrices and the main theorems as checks
//! - [`network`]: planar networks, path matrices, LGV oracle, composite views
//! - [`riordan`]: ordinary and exponential Riordan arrays, Whitney matrices
//! - [`nrec`]: n-recursive triangles and their closed-form production matrices
//! - [`catalog`]: named triangle registry with bundled fixtures

pub mod catalog;
pub mod error;
pub mod exact;
pub mod network;
pub mod nrec;
pub mod production;
pub mod riordan;
pub mod series;
pub mod trimat;

pub use error::{Error, Result};
pub use exact::{Poly, Scalar};
pub use series::PowerSeries;
pub use trimat::{FiniteMatrix, RowSequence, TriMatrix};
