//! Exact and arbitrary-precision toolkit for the associated linear problem
//! of q-P_V.
//!
//! - [`exact`]: big rationals, polynomials, canonical rational functions and
//!   2x2 matrices; structural equality is the identity test.
//! - [`qfun`]: q-Pochhammer symbols, theta functions, q-characters, basic
//!   hypergeometric series and Jackson integrals at arbitrary precision.
//! - [`linprob`]: the parameterized 2x2 linear problem Y(qx) = A(x)Y(x) and
//!   the affine-Weyl parameter dictionary.
//! - [`deform`]: connection-preserving deformations with explicit R matrices,
//!   word composition and an exact compatibility verifier.
//! - [`ortho`]: the generalized big q-Laguerre orthogonal-polynomial pipeline
//!   producing Hankel-determinant solutions of q-P_V.

pub mod error;
pub mod exact;
pub mod qfun;
pub mod linprob;
pub mod deform;
pub mod ortho;
pub mod sample;

pub use error::{Error, Result};
