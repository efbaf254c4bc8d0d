//! Arbitrary-precision q-special functions: q-Pochhammer symbols, the Jacobi
//! theta function, q-characters, generalized basic hypergeometric series and
//! Jackson integrals.
//!
//! Truncation policy for infinite sums/products: stop once the current term's
//! deviation from its limit is below `tail_eps` and a decay ratio < 1/2 has
//! been observed for 5 consecutive terms. A conservative double condition
//! avoids premature truncation when |q| is close to 1.

use rug::ops::{CompleteRound, Pow};
use rug::Float;

use crate::exact::BigRat;
use crate::{Error, Result};

pub type QReal = Float;

const LOG2_10: f64 = 3.321928094887362;
const MAX_TERMS: usize = 400_000;

/// Working precision context: decimal digits plus a derived truncation
/// threshold `tail_eps = 10^-(digits+10)`.
#[derive(Clone, Debug)]
pub struct PrecisionCtx {
    digits: u32,
    prec: u32,
}

impl PrecisionCtx {
    pub fn new(digits: u32) -> Result<PrecisionCtx> {
        if digits < 15 {
            return Err(Error::Domain(format!("digits must be >= 15, got {digits}")));
        }
        let prec = (((digits + 25) as f64) * LOG2_10).ceil() as u32;
        Ok(PrecisionCtx { digits, prec })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn prec_bits(&self) -> u32 {
        self.prec
    }

    /// Series/product truncation threshold, 10^-(digits+10).
    pub fn tail_eps(&self) -> Float {
        Float::with_val(self.prec, 10).pow(-((self.digits + 10) as i32))
    }

    /// A context with extra guard digits, same policy.
    pub fn with_guard(&self, extra: u32) -> PrecisionCtx {
        PrecisionCtx::new(self.digits + extra).expect("guarded digits >= 15")
    }

    pub fn rat(&self, r: &BigRat) -> Float {
        Float::with_val(self.prec, r)
    }

    pub fn int(&self, v: i64) -> Float {
        Float::with_val(self.prec, v)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.prec)
    }

    /// Numeric-zero test at working precision: |v| <= scale * 2^(10-prec).
    pub fn is_negligible(&self, v: &Float, scale: &Float) -> bool {
        if v.is_zero() {
            return true;
        }
        let thresh = Float::with_val(self.prec, scale.clone().abs() + 1u32)
            * Float::with_val(self.prec, 2).pow(-(self.prec as i32) + 10);
        v.clone().abs() < thresh
    }
}

/// Order of a q-Pochhammer symbol.
#[derive(Clone, Copy, Debug)]
pub enum PochOrder {
    Finite(u64),
    Infinite,
}

/// (a; q)_k, finite or infinite. The infinite product requires |q| < 1.
pub fn qpoch(a: &Float, q: &Float, k: PochOrder, ctx: &PrecisionCtx) -> Result<Float> {
    match k {
        PochOrder::Finite(k) => {
            let mut p = Float::with_val(ctx.prec, 1);
            let mut aq = a.clone();
            for _ in 0..k {
                let f = (1u32 - &aq).complete(ctx.prec);
                p *= f;
                aq *= q;
            }
            Ok(p)
        }
        PochOrder::Infinite => qpoch_inf(a, q, ctx),
    }
}

/// (a; q)_inf for |q| < 1.
pub fn qpoch_inf(a: &Float, q: &Float, ctx: &PrecisionCtx) -> Result<Float> {
    if !(q.clone().abs() < 1u32) {
        return Err(Error::Domain("(a;q)_inf requires |q| < 1".into()));
    }
    let eps = ctx.tail_eps() * (1u32 - q.clone().abs());
    let mut p = Float::with_val(ctx.prec, 1);
    let mut term = a.clone();
    let mut decayed = 0usize;
    for n in 0..MAX_TERMS {
        let mag = term.clone().abs();
        if mag.is_zero() || (mag < eps && decayed >= 5) {
            break;
        }
        let next = (&term * q).complete(ctx.prec);
        if next.clone().abs() < mag {
            decayed += 1;
        } else {
            decayed = 0;
        }
        let f = (1u32 - &term).complete(ctx.prec);
        p *= f;
        term = next;
        if n + 1 == MAX_TERMS {
            return Err(Error::Convergence("(a;q)_inf did not converge".into()));
        }
    }
    Ok(p)
}

/// Exact finite q-Pochhammer over rationals.
pub fn qpoch_rat(a: &BigRat, q: &BigRat, k: u64) -> BigRat {
    let mut p = BigRat::from(1);
    let mut aq = a.clone();
    for _ in 0..k {
        let f = BigRat::from(1) - &aq;
        p *= f;
        aq *= q;
    }
    p
}

/// Jacobi theta function, theta_q(x) = (-qx, -1/x, q; q)_inf.
///
/// The product satisfies theta_q(x) = qx * theta_q(qx) exactly.
pub fn theta(x: &Float, q: &Float, ctx: &PrecisionCtx) -> Result<Float> {
    if x.is_zero() {
        return Err(Error::Domain("theta_q(0) undefined".into()));
    }
    if q.is_zero() || !(q.clone().abs() < 1u32) {
        return Err(Error::Domain("theta_q requires 0 < |q| < 1".into()));
    }
    let mqx = -(x * q).complete(ctx.prec);
    let minvx = -x.clone().recip();
    let p1 = qpoch_inf(&mqx, q, ctx)?;
    let p2 = qpoch_inf(&minvx, q, ctx)?;
    let p3 = qpoch_inf(q, q, ctx)?;
    Ok(p1 * p2 * p3)
}

/// Bilateral series form of theta_q: sum_k x^k q^(k(k+1)/2).
///
/// Used as an independent cross-check of the triple product.
pub fn theta_series(x: &Float, q: &Float, ctx: &PrecisionCtx) -> Result<Float> {
    if x.is_zero() {
        return Err(Error::Domain("theta_q(0) undefined".into()));
    }
    let eps = ctx.tail_eps();
    let mut total = Float::new(ctx.prec);
    // k >= 0: term_k = x^k q^(k(k+1)/2); ratio term_{k+1}/term_k = x q^(k+1)
    let mut term = Float::with_val(ctx.prec, 1);
    for k in 0..MAX_TERMS {
        total += &term;
        let r = x.clone() * q.clone().pow((k + 1) as u32);
        term *= r;
        if term.clone().abs() < eps && k > 4 {
            break;
        }
    }
    // k <= -1: term_k = x^k q^(k(k+1)/2); at k = -1 the exponent is 0.
    let xinv = x.clone().recip();
    let mut term = xinv.clone();
    for m in 1..MAX_TERMS {
        total += &term;
        // from k = -m to k = -(m+1): factor x^-1 q^m
        let r = xinv.clone() * q.clone().pow(m as u32);
        term *= r;
        if term.clone().abs() < eps && m > 4 {
            break;
        }
    }
    Ok(total)
}

/// q-character e_{q,c}(x) = theta_q(x) theta_q(1/c) / theta_q(x/c).
///
/// Satisfies e_{q,c}(x) = c e_{q,c}(qx) and e_{q,c}(x) = x e_{q,qc}(x).
pub fn q_char(c: &Float, x: &Float, q: &Float, ctx: &PrecisionCtx) -> Result<Float> {
    if c.is_zero() || x.is_zero() {
        return Err(Error::Domain("e_{q,c} requires c, x != 0".into()));
    }
    let tx = theta(x, q, ctx)?;
    let tc = theta(&c.clone().recip(), q, ctx)?;
    let txc = theta(&(x / c).complete(ctx.prec), q, ctx)?;
    if ctx.is_negligible(&txc, &Float::with_val(ctx.prec, 1)) {
        return Err(Error::Domain("e_{q,c}: theta_q(x/c) vanishes".into()));
    }
    Ok(tx * tc / txc)
}

/// Generalized basic hypergeometric series r_phi_s(upper; lower; q; z).
///
/// Implements the sign convention (-1)^((1+s-r)k) q^((1+s-r) C(k,2)) exactly.
/// Terminates after n+1 terms when an upper parameter equals q^-n; a lower
/// parameter hitting q^-m before termination is a pole (domain error).
pub fn phi_rs(
    upper: &[Float],
    lower: &[Float],
    q: &Float,
    z: &Float,
    ctx: &PrecisionCtx,
) -> Result<Float> {
    Ok(phi_rs_terms(upper, lower, q, z, ctx)?.0)
}

/// As `phi_rs`, additionally returning the number of terms summed.
pub fn phi_rs_terms(
    upper: &[Float],
    lower: &[Float],
    q: &Float,
    z: &Float,
    ctx: &PrecisionCtx,
) -> Result<(Float, usize)> {
    if !(q.clone().abs() < 1u32) {
        return Err(Error::Domain("phi_rs requires |q| < 1".into()));
    }
    let excess = 1 + lower.len() as i64 - upper.len() as i64;
    let eps = ctx.tail_eps();
    let one = Float::with_val(ctx.prec, 1);

    let mut total = Float::new(ctx.prec);
    let mut term = Float::with_val(ctx.prec, 1);
    let mut qk = Float::with_val(ctx.prec, 1); // q^k
    let mut decayed = 0usize;
    let mut scale = Float::with_val(ctx.prec, 1);
    for k in 0..MAX_TERMS {
        total += &term;
        if term.clone().abs() > scale {
            scale = term.clone().abs();
        }

        // factor term_{k+1}/term_k
        let mut ratio = z.clone();
        let mut terminated = false;
        for u in upper {
            let f = &one - (u * &qk).complete(ctx.prec);
            if ctx.is_negligible(&f, &one) {
                terminated = true;
            }
            ratio *= f;
        }
        if terminated {
            return Ok((total, k + 1));
        }
        for l in lower {
            let f = &one - (l * &qk).complete(ctx.prec);
            if ctx.is_negligible(&f, &one) {
                return Err(Error::Domain(format!(
                    "phi_rs: lower parameter pole at k = {k}"
                )));
            }
            ratio /= f;
        }
        let fq = &one - (q * &qk).complete(ctx.prec); // (q;q)_k factor
        ratio /= fq;
        if excess != 0 {
            // extra (-1)^k-type factor: (-q^k)^(1+s-r) per step
            let mut extra = -qk.clone();
            if excess < 0 {
                extra = extra.recip();
            }
            for _ in 0..excess.unsigned_abs() {
                ratio *= &extra;
            }
        }

        let next = (&term * &ratio).complete(ctx.prec);
        if next.is_zero() {
            return Ok((total, k + 1));
        }
        if next.clone().abs() < term.clone().abs() {
            decayed += 1;
        } else {
            decayed = 0;
        }
        term = next;
        qk *= q;

        let bound = (&eps * &scale).complete(ctx.prec) * (1u32 - q.clone().abs());
        if term.clone().abs() < bound && decayed >= 5 {
            return Ok((total, k + 1));
        }
        if !term.is_finite() || term.clone().abs() > Float::with_val(ctx.prec, 2).pow(ctx.prec) {
            return Err(Error::Convergence(
                "phi_rs terms diverge in this parameter regime".into(),
            ));
        }
    }
    Err(Error::Convergence("phi_rs did not converge".into()))
}

/// One-sided Jackson integral int_0^z f(t) d_q t = z(1-q) sum f(z q^n) q^n.
pub fn jackson_primitive<F>(f: F, z: &Float, q: &Float, ctx: &PrecisionCtx) -> Result<Float>
where
    F: Fn(&Float) -> Result<Float>,
{
    if q.is_zero() || !(q.clone().abs() < 1u32) {
        return Err(Error::Domain("Jackson integral requires 0 < |q| < 1".into()));
    }
    if z.is_zero() {
        return Ok(Float::new(ctx.prec));
    }
    let eps = ctx.tail_eps();
    let mut total = Float::new(ctx.prec);
    let mut pw = Float::with_val(ctx.prec, 1); // q^n
    let mut scale = Float::with_val(ctx.prec, 1);
    let mut decayed = 0usize;
    let mut prev_mag: Option<Float> = None;
    for n in 0..MAX_TERMS {
        let t = (z * &pw).complete(ctx.prec);
        let term = f(&t)? * &pw;
        total += &term;
        let mag = term.clone().abs();
        if mag > scale {
            scale = mag.clone();
        }
        if let Some(p) = &prev_mag {
            if &mag < p {
                decayed += 1;
            } else {
                decayed = 0;
            }
        }
        let bound = (&eps * &scale).complete(ctx.prec) * (1u32 - q.clone().abs());
        if mag < bound && decayed >= 5 && n > 10 {
            let z1q = z * (1u32 - q).complete(ctx.prec);
            return Ok(total * z1q);
        }
        prev_mag = Some(mag);
        pw *= q;
    }
    Err(Error::Convergence(
        "Jackson integral tail did not decay within the term budget".into(),
    ))
}

/// Jackson integral int_a^b f d_q t = int_0^b - int_0^a.
pub fn jackson_integral<F>(f: F, a: &Float, b: &Float, q: &Float, ctx: &PrecisionCtx) -> Result<Float>
where
    F: Fn(&Float) -> Result<Float>,
{
    if a == b {
        return Ok(Float::new(ctx.prec));
    }
    let ib = jackson_primitive(&f, b, q, ctx)?;
    let ia = jackson_primitive(&f, a, q, ctx)?;
    Ok(ib - ia)
}

/// Jackson q-integral representation of 2phi1(a, b; c; q; z), used as an
/// independent oracle against the series route:
///
/// (b, c/b; q)_inf / ((1-q)(c, q; q)_inf) * int_0^1 x^(log_q b - 1)
///   (x z a, x q; q)_inf / ((x z, x c / b; q)_inf) d_q x
pub fn phi21_jackson_rep(
    a: &Float,
    b: &Float,
    c: &Float,
    z: &Float,
    q: &Float,
    ctx: &PrecisionCtx,
) -> Result<Float> {
    if !(b.clone().abs() > 0u32) || b < &Float::new(ctx.prec) {
        return Err(Error::Domain(
            "Jackson representation needs b > 0 for x^(log_q b - 1)".into(),
        ));
    }
    let logq_b_m1 = (b.clone().ln() / q.clone().ln()) - 1u32;
    let integrand = |x: &Float| -> Result<Float> {
        let p = x.clone().pow(&logq_b_m1);
        let n1 = qpoch_inf(&(x * z).complete(ctx.prec).mul_add(a, &Float::new(ctx.prec)), q, ctx)?;
        let n2 = qpoch_inf(&(x * q).complete(ctx.prec), q, ctx)?;
        let d1 = qpoch_inf(&(x * z).complete(ctx.prec), q, ctx)?;
        let d2 = qpoch_inf(&((x * c).complete(ctx.prec) / b), q, ctx)?;
        Ok(p * n1 * n2 / (d1 * d2))
    };
    let one = Float::with_val(ctx.prec, 1);
    let integral = jackson_primitive(integrand, &one, q, ctx)?;
    let pref_num = qpoch_inf(b, q, ctx)? * qpoch_inf(&(c / b).complete(ctx.prec), q, ctx)?;
    let pref_den =
        (1u32 - q).complete(ctx.prec) * qpoch_inf(c, q, ctx)? * qpoch_inf(q, q, ctx)?;
    Ok(pref_num / pref_den * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(60).unwrap()
    }

    fn f(c: &PrecisionCtx, n: i64, d: i64) -> Float {
        c.rat(&rat(n, d))
    }

    #[test]
    fn qpoch_zero_order_is_one() {
        let c = ctx();
        let v = qpoch(&f(&c, 7, 3), &f(&c, 1, 5), PochOrder::Finite(0), &c).unwrap();
        assert_eq!(v, 1);
    }

    #[test]
    fn qpoch_at_zero_argument() {
        let c = ctx();
        let v = qpoch(&c.zero(), &f(&c, 1, 3), PochOrder::Infinite, &c).unwrap();
        assert_eq!(v, 1);
    }

    #[test]
    fn qpoch_half_half_two() {
        // (1/2; 1/2)_2 = (1 - 1/2)(1 - 1/4) = 3/8
        let c = ctx();
        let v = qpoch(&f(&c, 1, 2), &f(&c, 1, 2), PochOrder::Finite(2), &c).unwrap();
        assert_eq!(v, f(&c, 3, 8));
    }

    #[test]
    fn qpoch_rat_recursion() {
        let a = rat(3, 7);
        let q = rat(2, 5);
        for k in 0..6u64 {
            let lhs = qpoch_rat(&a, &q, k + 1);
            let mut qk = BigRat::from(1);
            for _ in 0..k {
                qk *= &q;
            }
            let rhs = qpoch_rat(&a, &q, k) * (BigRat::from(1) - BigRat::from(&a * &qk));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn qpoch_inf_requires_q_inside_disk() {
        let c = ctx();
        assert!(qpoch(&f(&c, 1, 2), &f(&c, 3, 2), PochOrder::Infinite, &c).is_err());
    }

    #[test]
    fn theta_vanishes_at_minus_one() {
        let c = ctx();
        let v = theta(&f(&c, -1, 1), &f(&c, 1, 3), &c).unwrap();
        assert!(v.clone().abs() < c.tail_eps());
    }

    #[test]
    fn theta_functional_equation() {
        // theta_q(x) = q x theta_q(q x) at x = 2, q = 1/3
        let c = ctx();
        let x = f(&c, 2, 1);
        let q = f(&c, 1, 3);
        let lhs = theta(&x, &q, &c).unwrap();
        let rhs = (&q * &x).complete(c.prec_bits()) * theta(&(&q * &x).complete(c.prec_bits()), &q, &c).unwrap();
        let tol = Float::with_val(c.prec_bits(), 10).pow(-((c.digits() - 5) as i32));
        assert!((lhs - rhs).abs() < tol);
    }

    #[test]
    fn theta_product_matches_series() {
        let c = ctx();
        let x = f(&c, 3, 2);
        let q = f(&c, 1, 4);
        let p = theta(&x, &q, &c).unwrap();
        let s = theta_series(&x, &q, &c).unwrap();
        let tol = Float::with_val(c.prec_bits(), 10).pow(-((c.digits() - 5) as i32));
        assert!((p - s).abs() < tol);
    }

    #[test]
    fn q_char_at_c_one_is_theta_one() {
        let c = ctx();
        let q = f(&c, 1, 5);
        let t1 = theta(&f(&c, 1, 1), &q, &c).unwrap();
        for xv in [f(&c, 3, 1), f(&c, 7, 2), f(&c, -5, 3)] {
            let e = q_char(&f(&c, 1, 1), &xv, &q, &c).unwrap();
            let tol = Float::with_val(c.prec_bits(), 10).pow(-((c.digits() - 5) as i32));
            assert!((e - &t1).abs() < tol);
        }
    }

    #[test]
    fn q_char_functional_equations() {
        // e_{q,c}(x) = c e_{q,c}(qx) and e_{q,c}(x) = x e_{q,qc}(x)
        // at (c, x, q) = (2, 3, 1/5).
        let c = ctx();
        let q = f(&c, 1, 5);
        let cc = f(&c, 2, 1);
        let x = f(&c, 3, 1);
        let tol = Float::with_val(c.prec_bits(), 10).pow(-((c.digits() - 5) as i32));
        let e = q_char(&cc, &x, &q, &c).unwrap();
        let eq = q_char(&cc, &(&q * &x).complete(c.prec_bits()), &q, &c).unwrap();
        assert!((e.clone() - &cc * eq).abs() < tol);
        let eqc = q_char(&(&q * &cc).complete(c.prec_bits()), &x, &q, &c).unwrap();
        assert!((e - &x * eqc).abs() < tol);
    }

    #[test]
    fn phi_rs_at_zero_argument() {
        let c = ctx();
        let v = phi_rs(
            &[f(&c, 1, 2), f(&c, 1, 3)],
            &[f(&c, 1, 4)],
            &f(&c, 1, 5),
            &c.zero(),
            &c,
        )
        .unwrap();
        assert_eq!(v, 1);
    }

    #[test]
    fn phi_rs_unit_upper_parameter() {
        // 2phi1(1, b; c; q; z) = 1 since (1;q)_k = 0 for k >= 1
        let c = ctx();
        let (v, terms) = phi_rs_terms(
            &[f(&c, 1, 1), f(&c, 2, 7)],
            &[f(&c, 1, 4)],
            &f(&c, 1, 5),
            &f(&c, 1, 3),
            &c,
        )
        .unwrap();
        assert_eq!(v, 1);
        assert_eq!(terms, 1);
    }

    #[test]
    fn phi_rs_terminates_on_q_negative_power() {
        let c = ctx();
        let q = f(&c, 1, 5);
        for n in [0u32, 1, 3, 6] {
            let qmn = q.clone().pow(-(n as i32));
            let (_, terms) = phi_rs_terms(
                &[qmn, c.zero(), f(&c, 1, 2)],
                &[f(&c, 2, 3), f(&c, 3, 4)],
                &q,
                &q.clone(),
                &c,
            )
            .unwrap();
            assert_eq!(terms, (n + 1) as usize);
        }
    }

    #[test]
    fn phi21_matches_jackson_representation() {
        let c = ctx();
        let (a, b, cc, z, q) = (f(&c, 1, 2), f(&c, 1, 3), f(&c, 1, 4), f(&c, 1, 5), f(&c, 1, 6));
        let series = phi_rs(&[a.clone(), b.clone()], &[cc.clone()], &q, &z, &c).unwrap();
        let rep = phi21_jackson_rep(&a, &b, &cc, &z, &q, &c).unwrap();
        let tol = Float::with_val(c.prec_bits(), 10).pow(-((c.digits() - 10) as i32));
        assert!((series - rep).abs() < tol);
    }

    #[test]
    fn jackson_basics() {
        let c = ctx();
        let q = f(&c, 1, 4);
        // int_0^z 1 d_q t = z
        let v = jackson_primitive(|_| Ok(Float::with_val(c.prec_bits(), 1)), &f(&c, 5, 7), &q, &c)
            .unwrap();
        let tol = c.tail_eps();
        assert!((v - f(&c, 5, 7)).abs() < tol);
        // int_0^1 t d_q t = 1/(1+q)
        let v = jackson_primitive(|t| Ok(t.clone()), &f(&c, 1, 1), &q, &c).unwrap();
        assert!((v - f(&c, 4, 5)).abs() < tol);
        // equal limits
        let v = jackson_integral(|t| Ok(t.clone()), &f(&c, 2, 3), &f(&c, 2, 3), &q, &c).unwrap();
        assert!(v.is_zero());
    }
}
