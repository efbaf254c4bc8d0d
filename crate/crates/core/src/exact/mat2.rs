use std::fmt;
use std::ops::Mul;

use super::{BigRat, RatFunc};
use crate::{Error, Result};

/// 2x2 matrix of canonical rational functions.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub e: [[RatFunc; 2]; 2],
}

impl Mat2 {
    pub fn new(e11: RatFunc, e12: RatFunc, e21: RatFunc, e22: RatFunc) -> Mat2 {
        Mat2 {
            e: [[e11, e12], [e21, e22]],
        }
    }

    pub fn identity() -> Mat2 {
        Mat2::new(RatFunc::one(), RatFunc::zero(), RatFunc::zero(), RatFunc::one())
    }

    pub fn zero() -> Mat2 {
        Mat2::new(RatFunc::zero(), RatFunc::zero(), RatFunc::zero(), RatFunc::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|row| row.iter().all(RatFunc::is_zero))
    }

    pub fn is_identity(&self) -> bool {
        self == &Mat2::identity()
    }

    pub fn det(&self) -> RatFunc {
        &(&self.e[0][0] * &self.e[1][1]) - &(&self.e[0][1] * &self.e[1][0])
    }

    pub fn trace(&self) -> RatFunc {
        &self.e[0][0] + &self.e[1][1]
    }

    pub fn inv(&self) -> Result<Mat2> {
        let d = self.det();
        if d.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let dinv = d.inv()?;
        Ok(Mat2::new(
            &self.e[1][1] * &dinv,
            &(-&self.e[0][1]) * &dinv,
            &(-&self.e[1][0]) * &dinv,
            &self.e[0][0] * &dinv,
        ))
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            &self.e[0][0] - &rhs.e[0][0],
            &self.e[0][1] - &rhs.e[0][1],
            &self.e[1][0] - &rhs.e[1][0],
            &self.e[1][1] - &rhs.e[1][1],
        )
    }

    pub fn scale(&self, f: &RatFunc) -> Mat2 {
        Mat2::new(
            &self.e[0][0] * f,
            &self.e[0][1] * f,
            &self.e[1][0] * f,
            &self.e[1][1] * f,
        )
    }

    /// Substitute x -> q x in every entry.
    pub fn q_shift(&self, q: &BigRat) -> Result<Mat2> {
        Ok(Mat2::new(
            self.e[0][0].q_shift(q)?,
            self.e[0][1].q_shift(q)?,
            self.e[1][0].q_shift(q)?,
            self.e[1][1].q_shift(q)?,
        ))
    }

    pub fn eval(&self, x: &BigRat) -> Result<[[BigRat; 2]; 2]> {
        Ok([
            [self.e[0][0].eval(x)?, self.e[0][1].eval(x)?],
            [self.e[1][0].eval(x)?, self.e[1][1].eval(x)?],
        ])
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        let p = |i: usize, j: usize| -> RatFunc {
            &(&self.e[i][0] * &rhs.e[0][j]) + &(&self.e[i][1] * &rhs.e[1][j])
        };
        Mat2::new(p(0, 0), p(0, 1), p(1, 0), p(1, 1))
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:?}, {:?}], [{:?}, {:?}]]",
            self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1]
        )
    }
}
