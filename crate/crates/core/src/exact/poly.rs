use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::BigRat;
use crate::{Error, Result};

/// Dense univariate polynomial over exact rationals.
///
/// Coefficients are stored ascending (index = power of x) with trailing
/// zeros stripped, so the zero polynomial is the empty vector and
/// `degree = len - 1` otherwise.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<BigRat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRat::from(1))
    }

    pub fn x() -> Self {
        Poly::from_coeffs(vec![BigRat::new(), BigRat::from(1)])
    }

    pub fn constant(c: BigRat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// Build from ascending coefficients, stripping trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.cmp0() == std::cmp::Ordering::Equal) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Monic product of (x - r) over the given roots.
    pub fn from_roots(roots: &[BigRat]) -> Self {
        let mut p = Poly::one();
        for r in roots {
            let lin = Poly::from_coeffs(vec![BigRat::from(-r.clone()), BigRat::from(1)]);
            p = &p * &lin;
        }
        p
    }

    /// c0 + c1 x for a quick affine builder.
    pub fn affine(c0: BigRat, c1: BigRat) -> Self {
        Poly::from_coeffs(vec![c0, c1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRat> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> BigRat {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigRat) -> BigRat {
        let mut acc = BigRat::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn scale(&self, c: &BigRat) -> Poly {
        if c.cmp0() == std::cmp::Ordering::Equal {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| BigRat::from(a * c)).collect(),
        }
    }

    /// Substitute x -> q x: coefficient i picks up a factor q^i.
    pub fn dilate(&self, q: &BigRat) -> Poly {
        let mut pw = BigRat::from(1);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(BigRat::from(c * &pw));
            pw *= q;
        }
        Poly::from_coeffs(out)
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lc) => {
                let inv = BigRat::from(lc.recip_ref());
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division; panics only if d is zero (callers guard).
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or_else(|| Error::Domain("division by zero polynomial".into()))?;
        let lc = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return Ok((Poly::zero(), self.clone()));
        }
        let qlen = rem.len() - dd;
        let mut quot = vec![BigRat::new(); qlen];
        for i in (0..qlen).rev() {
            let top = rem[i + dd].clone();
            if top.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            let f = BigRat::from(&top / &lc);
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = BigRat::from(dc * &f);
                rem[i + j] -= t;
            }
            quot[i] = f;
        }
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    /// Monic gcd via the rational Euclidean algorithm.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut f = a.clone();
        let mut g = b.clone();
        while !g.is_zero() {
            let (_, r) = f.divrem(&g).expect("gcd divisor nonzero");
            f = g;
            g = r;
        }
        f.monic()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = self.coeffs.get(i).cloned().unwrap_or_default();
            if let Some(r) = rhs.coeffs.get(i) {
                c += r;
            }
            out.push(c);
        }
        Poly::from_coeffs(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = self.coeffs.get(i).cloned().unwrap_or_default();
            if let Some(r) = rhs.coeffs.get(i) {
                c -= r;
            }
            out.push(c);
        }
        Poly::from_coeffs(out)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRat::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let t = BigRat::from(a * b);
                out[i + j] += t;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| BigRat::from(-c.clone())).collect(),
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn divrem_roundtrip() {
        let a = Poly::from_coeffs(vec![rat(1, 1), rat(0, 1), rat(-3, 2), rat(1, 1)]);
        let d = Poly::from_coeffs(vec![rat(-1, 1), rat(1, 1)]);
        let (q, r) = a.divrem(&d).unwrap();
        let back = &(&q * &d) + &r;
        assert_eq!(back, a);
    }

    #[test]
    fn gcd_common_factor() {
        // (x^2 - 1, x - 1) share (x - 1)
        let a = Poly::from_coeffs(vec![rat(-1, 1), rat(0, 1), rat(1, 1)]);
        let b = Poly::from_coeffs(vec![rat(-1, 1), rat(1, 1)]);
        let g = Poly::gcd(&a, &b);
        assert_eq!(g, b.monic());
    }

    #[test]
    fn dilate_monomial() {
        // x^2 under x -> 2x becomes 4x^2
        let p = Poly::from_coeffs(vec![rat(0, 1), rat(0, 1), rat(1, 1)]);
        let d = p.dilate(&rat(2, 1));
        assert_eq!(d.coeff(2), rat(4, 1));
        assert_eq!(d.degree(), Some(2));
    }
}
