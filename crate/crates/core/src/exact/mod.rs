//! Exact arithmetic kernel: big rationals, dense univariate polynomials,
//! canonical rational functions and 2x2 rational-function matrices.
//!
//! Everything here is exact; equality of canonical forms is the identity
//! test used by the deformation verifier.

mod poly;
mod ratfunc;
mod mat2;

pub use mat2::Mat2;
pub use poly::Poly;
pub use ratfunc::RatFunc;

/// Arbitrary-size rational number, always in canonical form
/// (gcd-reduced, positive denominator).
pub type BigRat = rug::Rational;

/// Parse a rational from `"p/q"` or `"p"` decimal notation.
pub fn parse_rat(s: &str) -> crate::Result<BigRat> {
    let t = s.trim();
    t.parse::<BigRat>()
        .map_err(|e| crate::Error::Parse(format!("invalid rational {t:?}: {e}")))
}

/// `p/q` when q != 1, plain `p` otherwise. This is the wire format used in
/// all JSON and CSV output.
pub fn format_rat(r: &BigRat) -> String {
    r.to_string()
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> BigRat {
    BigRat::from((n, d))
}

#[cfg(test)]
pub(crate) fn rat_i(n: i64) -> BigRat {
    BigRat::from(n)
}
