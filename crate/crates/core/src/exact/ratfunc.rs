use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{BigRat, Poly};
use crate::{Error, Result};

/// Rational function in canonical form: gcd(num, den) = 1 and den monic.
///
/// Canonical form makes structural equality an exact identity test, which is
/// what the compatibility verifier relies on.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Canonicalize num/den: reduce by the gcd and normalize den monic.
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RatFunc {
                num: Poly::zero(),
                den: Poly::one(),
            });
        }
        let g = Poly::gcd(&num, &den);
        let (mut n, r1) = num.divrem(&g)?;
        debug_assert!(r1.is_zero());
        let (mut d, r2) = den.divrem(&g)?;
        debug_assert!(r2.is_zero());
        let lc = d.leading().expect("nonzero denominator").clone();
        let inv = BigRat::from(lc.recip_ref());
        n = n.scale(&inv);
        d = d.scale(&inv);
        Ok(RatFunc { num: n, den: d })
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: BigRat) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn zero() -> RatFunc {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn one() -> RatFunc {
        RatFunc::from_poly(Poly::one())
    }

    pub fn x() -> RatFunc {
        RatFunc::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self == &RatFunc::one()
    }

    /// True when the canonical denominator is 1.
    pub fn is_polynomial(&self) -> bool {
        self.den == Poly::one()
    }

    pub fn eval(&self, x: &BigRat) -> Result<BigRat> {
        let d = self.den.eval(x);
        if d.cmp0() == std::cmp::Ordering::Equal {
            return Err(Error::Domain(format!("pole at x = {x}")));
        }
        Ok(BigRat::from(self.num.eval(x) / d))
    }

    /// Substitute x -> q x and re-canonicalize.
    pub fn q_shift(&self, q: &BigRat) -> Result<RatFunc> {
        if q.cmp0() == std::cmp::Ordering::Equal {
            return Err(Error::Domain("q_shift requires q != 0".into()));
        }
        RatFunc::new(self.num.dilate(q), self.den.dilate(q))
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero rational function".into()));
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// Multiply by a rational constant (stays canonical).
    pub fn scale_rat(&self, c: &BigRat) -> RatFunc {
        if c.cmp0() == std::cmp::Ordering::Equal {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFunc::new(num, den).expect("nonzero denominators")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        let num = &(&self.num * &rhs.den) - &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFunc::new(num, den).expect("nonzero denominators")
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        let num = &self.num * &rhs.num;
        let den = &self.den * &rhs.den;
        RatFunc::new(num, den).expect("nonzero denominators")
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        let num = &self.num * &rhs.den;
        let den = &self.den * &rhs.num;
        RatFunc::new(num, den).expect("division by zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}
