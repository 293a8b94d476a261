//! Exact arithmetic for a family of elliptic curves over rational function
//! fields in positive characteristic: y^2 = x^3 + t^q - t over F_r(t), with
//! q = p^f and r = p^nu powers of the same prime p > 3.
//!
//! The crate computes the full analytic side of the BSD formula for these
//! curves without floating point: the L-function as an integer polynomial in
//! T = r^{-s} (by two independent character-sum routes plus a point-counting
//! oracle), the analytic rank, the leading value L*, the product
//! Reg * |Sha| it determines, the F_p-dimension of Sha, and the
//! Brauer-Siegel ratio.
//!
//! Module map:
//! - `ff`: finite-field tower inside one ambient field (Frobenius, trace,
//!   norm, discrete logs, cube tests);
//! - `cyclo`: exact Z[zeta_{6p}] arithmetic and rational valuations;
//! - `characters`: multiplicative and additive characters with values in the
//!   cyclotomic ring, norm/trace compatible across the tower;
//! - `char_sums`: Gauss and Jacobi sums, their orbit versions, Stickelberger
//!   digit valuations, and the power decomposition of orbit Gauss sums;
//! - `orbits`: the index-orbit spaces the Euler factors are parametrized by;
//! - `lfunction`: the two product formulas for L, rank and leading value;
//! - `oracle`: an independent point-count check on the Taylor expansion of
//!   log L, kept deliberately free of the character machinery;
//! - `bsd`: invariants of the BSD formula and the Brauer-Siegel ratio;
//! - `sha`: the digit-combinatorics model computing dim Sha;
//! - `report`, `verify`: dossier serialization and the named check suites.

pub mod arith;
pub mod bsd;
pub mod char_sums;
pub mod characters;
pub mod cyclo;
pub mod lfunction;
pub mod oracle;
pub mod orbits;
pub mod report;
pub mod sha;
pub mod verify;
pub mod ff;
mod dd;
pub mod error;

pub use error::{Error, Result};
