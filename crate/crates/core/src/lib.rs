//! Local correction of Boolean functions known up to a relabeling of their
//! variables.
//!
//! Correctors read a corrupted function `g` only through a query-counting
//! [`oracle::NoisyOracle`] and return the value of the uncorrupted function at a
//! requested point:
//!
//! * [`correctors::cube_sum_correct`]: degree-`k` polynomials, `2^(k+1) - 1` queries.
//! * [`correctors::influence_correct`]: `k`-juntas with every relevant influence
//!   at least 1/50, `O(k log k)` queries.
//! * [`correctors::symmetric_correct`]: symmetric functions, no queries.
//!
//! [`lowerbound`] builds the instances on which correction needs exponentially
//! many queries or is impossible, and [`harness`] runs seeded experiments.

pub mod analysis;
pub mod bench;
pub mod boolfn;
pub mod correctors;
pub mod error;
pub mod exact;
pub mod harness;
pub mod lowerbound;
pub mod oracle;
pub mod point;
pub mod rng;

pub use boolfn::{AnfPolynomial, BooleanFunction, JuntaSpec, SymmetricFunction, TruthTable};
pub use error::{Error, Result};
pub use oracle::{CorruptionModel, NoisyOracle};
pub use point::Point;
