//! Orthogonal-polynomial pipeline for the generalized big q-Laguerre weight
//!
//! ```text
//! w(x) = x^sigma (x/a1, x/a3; q)_inf / (x/a2; q)_inf,   support [q a1, q a3]
//! ```
//!
//! Moments, Hankel determinants, recurrence data, spectral data, the Lax
//! matrices in the monic gauge, Freud-Laguerre residuals, weight deformations
//! and the Hankel-determinant special solutions of q-P_V.
//!
//! All matrices are stored in the monic normalization (conjugation by
//! diag(1/rho_n, 1/rho_{n-1})), whose entries are rational in a_n^2; the
//! moment form is indefinite for generic positive parameters, so rho_n
//! itself may be imaginary while every identity checked here stays real.

mod deformation;
mod fpoly;

pub use deformation::{
    correspondence_check, qpv_deformation, transfer_data, weight_deformation, CorrespondenceRow,
    CorrespondenceVerdict, DefId, TransferData, WeightDeformation,
};
pub use fpoly::FPoly;

use rug::ops::{CompleteRound, Pow};
use rug::Float;

use crate::exact::BigRat;
use crate::qfun::{self, PrecisionCtx};
use crate::{Error, Result};

/// Parameters of the generalized big q-Laguerre weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightParams {
    pub a: [BigRat; 3],
    pub sigma: BigRat,
    pub q: BigRat,
}

impl WeightParams {
    pub fn new(a: [BigRat; 3], sigma: BigRat, q: BigRat) -> Result<WeightParams> {
        for (name, v) in [("a1", &a[0]), ("a2", &a[1]), ("a3", &a[2])] {
            if v.cmp0() == std::cmp::Ordering::Equal {
                return Err(Error::Domain(format!("{name} must be nonzero")));
            }
        }
        if a[0] == a[2] {
            return Err(Error::Domain("support endpoints q a1, q a3 must differ".into()));
        }
        if q.cmp0() == std::cmp::Ordering::Equal || q.clone().abs() >= 1u32 {
            return Err(Error::Domain("weight requires 0 < |q| < 1".into()));
        }
        if !sigma.is_integer() {
            // fractional power of the support variable
            if q.cmp0() != std::cmp::Ordering::Greater {
                return Err(Error::Domain("fractional sigma requires q > 0".into()));
            }
            for (name, v) in [("a1", &a[0]), ("a3", &a[2])] {
                if v.cmp0() != std::cmp::Ordering::Greater {
                    return Err(Error::Domain(format!(
                        "fractional sigma requires {name} > 0 (positive support)"
                    )));
                }
            }
        }
        Ok(WeightParams { a, sigma, q })
    }

    /// The q-P_V companion parameters (q a1, q a2, a3, sigma).
    pub fn qpv_shifted(&self) -> Result<WeightParams> {
        WeightParams::new(
            [
                BigRat::from(&self.q * &self.a[0]),
                BigRat::from(&self.q * &self.a[1]),
                self.a[2].clone(),
            ],
            self.sigma.clone(),
            self.q.clone(),
        )
    }
}

/// x^e for rational e; integer exponents work for any sign of x,
/// fractional ones require x > 0.
pub fn pow_rat(x: &Float, e: &BigRat, prec: u32) -> Result<Float> {
    if e.is_integer() {
        let n = e
            .numer()
            .to_i32()
            .ok_or_else(|| Error::Domain("exponent too large".into()))?;
        return Ok(x.clone().pow(n));
    }
    if !(x.clone() > 0u32) {
        return Err(Error::Domain(format!(
            "fractional power of non-positive value {x}"
        )));
    }
    let ef = Float::with_val(prec, e);
    Ok(x.clone().pow(ef))
}

/// Cached per-k moment values with the closed-form cross-check.
#[derive(Clone, Debug)]
pub struct MomentTable {
    /// Primary route: direct Jackson sums over the weight.
    pub mu: Vec<Float>,
    /// Cross-check route derived from the 2phi1 integral representation.
    pub mu_cross: Vec<Float>,
    /// |mu - mu_cross| per k.
    pub discrepancy: Vec<Float>,
}

/// The full pipeline state for one parameter set.
pub struct Pipeline {
    pub params: WeightParams,
    pub n_max: usize,
    /// User-facing precision (tolerances derive from this).
    pub digits: u32,
    /// Internal guarded context everything is evaluated in.
    pub wctx: PrecisionCtx,
    pub prec: u32,
    pub q: Float,
    pub sigma: Float,
    pub a: [Float; 3],
    pub moments: MomentTable,
    /// Hankel determinants Delta_0 ..= Delta_{n_max+2}.
    pub delta: Vec<Float>,
    /// Shifted Hankel determinants Sigma_0 ..= Sigma_{n_max+2}.
    pub sigma_det: Vec<Float>,
    /// a_n^2 for n = 0 ..= n_max+1 (a_0^2 = 0).
    pub an2: Vec<Float>,
    /// b_n for n = 0 ..= n_max+1.
    pub bn: Vec<Float>,
    /// Gamma_n = Sigma_n / Delta_n for n = 0 ..= n_max+2.
    pub gamma: Vec<Float>,
    /// rho_n^2 = Delta_n / Delta_{n+1} (signed!) for n = 0 ..= n_max+1.
    pub rho2: Vec<Float>,
    /// Monic polynomial coefficient vectors P_0 ..= P_{n_max+1}.
    pub monic: Vec<Vec<Float>>,
}

/// Surface state extracted from the pipeline at index n (float-valued:
/// the entries are genuinely irrational for fractional sigma).
#[derive(Clone, Debug)]
pub struct FState {
    pub a: [Float; 3],
    pub kappa: [Float; 2],
    pub lambda: [Float; 2],
    pub q: Float,
    pub y: Float,
    pub z: Float,
    pub w: Float,
}

impl Pipeline {
    pub fn new(params: &WeightParams, n_max: usize, ctx: &PrecisionCtx) -> Result<Pipeline> {
        // Hankel elimination loses roughly 4 digits per row here; guard
        // accordingly and double-check below at +20 digits.
        let guard = 30 + 4 * n_max as u32;
        let wctx = ctx.with_guard(guard);
        let prec = wctx.prec_bits();
        let k_max = 2 * n_max + 6;

        let q = wctx.rat(&params.q);
        let sigma = wctx.rat(&params.sigma);
        let a = [
            wctx.rat(&params.a[0]),
            wctx.rat(&params.a[1]),
            wctx.rat(&params.a[2]),
        ];

        let moments = compute_moments(params, k_max, ctx, &wctx)?;

        let (delta, sigma_det) = hankel_data(&moments.mu, n_max + 2, prec)?;
        {
            // condition monitor: recompute at +20 digits and compare. A value
            // indistinguishable from its own numerical error is treated as a
            // vanishing Hankel determinant (moment-problem degeneracy).
            let wctx2 = wctx.with_guard(20);
            let mu2 = moment_jackson_route(params, k_max, &wctx2)?;
            let (delta2, _) = hankel_data(&mu2, n_max + 2, wctx2.prec_bits())?;
            let tol = Float::with_val(prec, 10).pow(-(ctx.digits() as i32));
            for n in 0..delta.len() {
                let err_est = (&delta[n] - &delta2[n]).complete(prec).abs();
                if !err_est.is_zero() && delta[n].clone().abs() < 10u32 * err_est.clone() {
                    return Err(Error::MomentDegeneracy(n));
                }
                let scale = delta[n].clone().abs();
                if err_est > (&tol * &scale).complete(prec) {
                    return Err(Error::Consistency(format!(
                        "Hankel determinant Delta_{n} unstable between working precisions"
                    )));
                }
            }
        }

        let mut an2 = vec![Float::new(prec)];
        for n in 1..=n_max + 1 {
            an2.push(
                (&delta[n - 1] * &delta[n + 1]).complete(prec) / (&delta[n] * &delta[n]).complete(prec),
            );
        }
        let mut bn = Vec::new();
        for n in 0..=n_max + 1 {
            bn.push(
                (&sigma_det[n + 1] / &delta[n + 1]).complete(prec)
                    - (&sigma_det[n] / &delta[n]).complete(prec),
            );
        }
        let gamma: Vec<Float> = (0..=n_max + 2)
            .map(|n| (&sigma_det[n] / &delta[n]).complete(prec))
            .collect();
        let rho2: Vec<Float> = (0..=n_max + 1)
            .map(|n| (&delta[n] / &delta[n + 1]).complete(prec))
            .collect();

        // monic coefficient vectors by the three-term recurrence
        let mut monic: Vec<Vec<Float>> = Vec::with_capacity(n_max + 2);
        monic.push(vec![Float::with_val(prec, 1)]);
        monic.push(vec![-bn[0].clone(), Float::with_val(prec, 1)]);
        for n in 1..=n_max {
            let mut next = vec![Float::new(prec); n + 2];
            for (i, c) in monic[n].iter().enumerate() {
                next[i + 1] += c;
                next[i] -= (c * &bn[n]).complete(prec);
            }
            for (i, c) in monic[n - 1].iter().enumerate() {
                next[i] -= (c * &an2[n]).complete(prec);
            }
            monic.push(next);
        }

        Ok(Pipeline {
            params: params.clone(),
            n_max,
            digits: ctx.digits(),
            wctx,
            prec,
            q,
            sigma,
            a,
            moments,
            delta,
            sigma_det,
            an2,
            bn,
            gamma,
            rho2,
            monic,
        })
    }

    /// 10^-(digits - offset), the tolerance scale of the spec checks.
    pub fn tol(&self, offset: u32) -> Float {
        Float::with_val(self.prec, 10).pow(-((self.digits.saturating_sub(offset)) as i32))
    }

    /// kappa1 = -q^n/a2, kappa2 = 1/(a1 a3 q^(n+sigma)).
    pub fn kappa(&self, n: usize) -> Result<(Float, Float)> {
        let qn = self.q.clone().pow(n as u32);
        let k1 = -(qn.clone() / &self.a[1]);
        let qs = pow_rat(&self.q, &self.params.sigma, self.prec)?;
        let k2 = ((&self.a[0] * &self.a[2]).complete(self.prec) * qn * qs).recip();
        Ok((k1, k2))
    }

    /// lambda1 = 1, lambda2 = q^-sigma.
    pub fn lambda(&self) -> Result<(Float, Float)> {
        let qs = pow_rat(&self.q, &self.params.sigma, self.prec)?;
        Ok((Float::with_val(self.prec, 1), qs.recip()))
    }

    /// Spectral data polynomial W = x(1-q)(x-a1)(x-a3) a2.
    pub fn w_poly(&self) -> FPoly {
        let p = self.prec;
        let one_m_q = (1u32 - &self.q).complete(p);
        let a2 = &self.a[1];
        let c1 = (&self.a[0] * &self.a[2]).complete(p) * &one_m_q * a2;
        let c2 = -((&self.a[0] + &self.a[2]).complete(p) * &one_m_q * a2);
        let c3 = one_m_q * a2;
        FPoly::new(vec![Float::new(p), c1, c2, c3])
    }

    /// Spectral data polynomial V = ((x-a1)(x-a3) a2 + q^sigma a1 a3 (x-a2))/2.
    pub fn v_poly(&self) -> Result<FPoly> {
        let p = self.prec;
        let qs = pow_rat(&self.q, &self.params.sigma, p)?;
        let a13 = (&self.a[0] * &self.a[2]).complete(p);
        let a2 = &self.a[1];
        let c0 = ((&a13 * a2).complete(p) - (&a13 * &qs).complete(p) * a2) / 2u32;
        let c1 = (-((&self.a[0] + &self.a[2]).complete(p) * a2) + (&a13 * &qs).complete(p)) / 2u32;
        let c2 = (a2 / 2u32).complete(p);
        Ok(FPoly::new(vec![c0, c1, c2]))
    }

    /// Theta_n = (a2/q^(n+1)) x + q^(n+sigma) a1 a3
    ///           - (a2/q^(n+2)) (q Gamma_n + q a1 + q a3 - Gamma_{n+1}).
    pub fn theta_poly(&self, n: usize) -> Result<FPoly> {
        let p = self.prec;
        let qs = pow_rat(&self.q, &self.params.sigma, p)?;
        let qn1 = self.q.clone().pow((n + 1) as u32);
        let qn2 = self.q.clone().pow((n + 2) as u32);
        let c1 = (&self.a[1] / &qn1).complete(p);
        let inner = (&self.q * &self.gamma[n]).complete(p)
            + (&self.q * &self.a[0]).complete(p)
            + (&self.q * &self.a[2]).complete(p)
            - &self.gamma[n + 1];
        let c0 = self.q.clone().pow(n as u32) * qs * (&self.a[0] * &self.a[2]).complete(p)
            - (&self.a[1] / &qn2).complete(p) * inner;
        Ok(FPoly::new(vec![c0, c1]))
    }

    /// Omega_n with the sign-corrected x coefficient:
    ///
    /// ```text
    /// Omega_n = (a2/2) x^2 - (x/2)(a2 a3 + a1(a2 + a3 q^sigma (1 - 2 q^n)))
    ///   + (1/2) q^(-n-1) (a1 a3 q^n (a2 q (q^sigma + 1)
    ///       - 2 q^(n+sigma)((1-q) Gamma_n + a2 q)) + 2 a2 a_n^2)
    /// ```
    pub fn omega_poly(&self, n: usize) -> Result<FPoly> {
        let p = self.prec;
        let qs = pow_rat(&self.q, &self.params.sigma, p)?;
        let qn = self.q.clone().pow(n as u32);
        let a1 = &self.a[0];
        let a2 = &self.a[1];
        let a3 = &self.a[2];
        let c2 = (a2 / 2u32).complete(p);
        let c1 = -((a2 * a3).complete(p)
            + a1.clone() * (a2 + (a3 * &qs).complete(p) * (1u32 - (2u32 * &qn).complete(p))))
            / 2u32;
        let an2_n = if n == 0 { Float::new(p) } else { self.an2[n].clone() };
        let inner = (a2 * &self.q).complete(p) * ((&qs + 1u32).complete(p))
            - 2u32 * qn.clone() * &qs * ((1u32 - &self.q).complete(p) * &self.gamma[n] + (a2 * &self.q).complete(p));
        let c0 = (self.q.clone().pow(-((n + 1) as i32)))
            * ((a1 * a3).complete(p) * qn * inner + 2u32 * (a2 * &an2_n).complete(p))
            / 2u32;
        Ok(FPoly::new(vec![c0, c1, c2]))
    }

    /// Residual coefficient max-norms of the two Freud-Laguerre equations
    ///
    /// ```text
    /// Omega_{n+1}(x-b_n) - Omega_n(qx-b_n) + x(1-q)V - W
    ///     = a_{n+1}^2 Theta_{n+1} - a_n^2 Theta_{n-1}
    /// Theta_n(qx-b_n) + Theta_{n-1}(b_{n-1}-x) = Omega_{n+1} - Omega_{n-1}
    /// ```
    pub fn freud_residuals(&self, n: usize) -> Result<(Float, Float)> {
        if n < 1 || n + 1 > self.n_max + 1 {
            return Err(Error::Domain(format!("freud_residuals needs 1 <= n <= n_max, got {n}")));
        }
        let p = self.prec;
        let one = Float::with_val(p, 1);
        let om_n1 = self.omega_poly(n + 1)?;
        let om_n = self.omega_poly(n)?;
        let om_m = self.omega_poly(n - 1)?;
        let th_n1 = self.theta_poly(n + 1)?;
        let th_n = self.theta_poly(n)?;
        let th_m = self.theta_poly(n - 1)?;
        let w = self.w_poly();
        let v = self.v_poly()?;

        let mut f1 = om_n1.mul_affine(&-self.bn[n].clone(), &one);
        f1 = f1.add(&om_n.mul_affine(&-self.bn[n].clone(), &self.q).neg());
        f1 = f1.add(&v.mul_affine(&Float::new(p), &(1u32 - &self.q).complete(p)));
        f1 = f1.add(&w.neg());
        f1 = f1.add(&th_n1.scale(&-self.an2[n + 1].clone()));
        f1 = f1.add(&th_m.scale(&self.an2[n]));

        let mut f2 = th_n.mul_affine(&-self.bn[n].clone(), &self.q);
        f2 = f2.add(&th_m.mul_affine(&self.bn[n - 1], &-one.clone()));
        f2 = f2.add(&om_n1.neg());
        f2 = f2.add(&om_m);

        Ok((f1.max_abs_coeff(), f2.max_abs_coeff()))
    }

    /// A_n(x) = (1 - x/a2) I - N(x)/(q^sigma a1 a2 a3) in the monic gauge,
    /// where N is the bracket matrix of the q-differential system.
    pub fn a_matrix(&self, n: usize, x: &Float) -> Result<[[Float; 2]; 2]> {
        let p = self.prec;
        let v = self.v_poly()?.eval(x);
        let n11 = self.omega_poly(n)?.eval(x) - &v;
        let n12 = -(self.an2[n].clone() * self.theta_poly(n)?.eval(x));
        let n21 = self.theta_poly(n - 1)?.eval(x);
        let n22 = self.omega_poly(n - 1)?.eval(x) - &v
            - (x - &self.bn[n - 1]).complete(p) * self.theta_poly(n - 1)?.eval(x);
        let qs = pow_rat(&self.q, &self.params.sigma, p)?;
        let pref = qs * (&self.a[0] * &self.a[1]).complete(p) * &self.a[2];
        let diag = 1u32 - (x / &self.a[1]).complete(p);
        Ok([
            [diag.clone() - n11 / &pref, -(n12 / &pref)],
            [-(n21 / &pref), diag - n22 / &pref],
        ])
    }

    /// L_n(x) = A_n(x)/(1 - x/a2), the x-shift matrix of the monic system.
    pub fn l_matrix(&self, n: usize, x: &Float) -> Result<[[Float; 2]; 2]> {
        let d = 1u32 - (x / &self.a[1]).complete(self.prec);
        if d.is_zero() {
            return Err(Error::Domain("L_n has a pole at x = a2".into()));
        }
        let a = self.a_matrix(n, x)?;
        Ok([
            [a[0][0].clone() / &d, a[0][1].clone() / &d],
            [a[1][0].clone() / &d, a[1][1].clone() / &d],
        ])
    }

    /// M_n(x) = [[x - b_n, -a_n^2], [1, 0]] in the monic gauge.
    pub fn m_matrix(&self, n: usize, x: &Float) -> [[Float; 2]; 2] {
        let p = self.prec;
        [
            [(x - &self.bn[n]).complete(p), -self.an2[n].clone()],
            [Float::with_val(p, 1), Float::new(p)],
        ]
    }

    /// Max-abs entry of L_{n+1}(x) M_n(x) - M_n(qx) L_n(x).
    pub fn lax_compat_residual(&self, n: usize, x: &Float) -> Result<Float> {
        let p = self.prec;
        let l1 = self.l_matrix(n + 1, x)?;
        let m = self.m_matrix(n, x);
        let qx = (&self.q * x).complete(p);
        let mq = self.m_matrix(n, &qx);
        let l = self.l_matrix(n, x)?;
        let mut worst = Float::new(p);
        for i in 0..2 {
            for j in 0..2 {
                let lhs = (&l1[i][0] * &m[0][j]).complete(p) + (&l1[i][1] * &m[1][j]).complete(p);
                let rhs = (&mq[i][0] * &l[0][j]).complete(p) + (&mq[i][1] * &l[1][j]).complete(p);
                let d = (lhs - rhs).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        Ok(worst)
    }

    /// Monic P_n(x) by the forward three-term recurrence.
    pub fn monic_p(&self, n: usize, x: &Float) -> Float {
        let p = self.prec;
        let mut acc = Float::new(p);
        for c in self.monic[n].iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// L applied to a polynomial given by its coefficient vector.
    pub fn linear_form(&self, coeffs: &[Float]) -> Float {
        let p = self.prec;
        let mut acc = Float::new(p);
        for (k, c) in coeffs.iter().enumerate() {
            acc += (c * &self.moments.mu[k]).complete(p);
        }
        acc
    }

    /// L(P_i P_j) over the monic family.
    pub fn linear_form_pp(&self, i: usize, j: usize) -> Float {
        let p = self.prec;
        let (pi, pj) = (&self.monic[i], &self.monic[j]);
        let mut prod = vec![Float::new(p); pi.len() + pj.len() - 1];
        for (r, cr) in pi.iter().enumerate() {
            for (s, cs) in pj.iter().enumerate() {
                prod[r + s] += (cr * cs).complete(p);
            }
        }
        self.linear_form(&prod)
    }

    /// Signature of the moment form at n: sign of Delta_{n+1}/Delta_n, so
    /// L(p_n^2) = signature(n) for the real-normalized family.
    pub fn signature(&self, n: usize) -> i32 {
        let sgn = |f: &Float| -> i32 {
            match f.cmp0() {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            }
        };
        sgn(&self.delta[n]) * sgn(&self.delta[n + 1])
    }

    /// |rho_n| = sqrt(|Delta_n / Delta_{n+1}|); real normalization of the
    /// orthonormal family (orthonormal up to the signature).
    pub fn rho_abs(&self, n: usize) -> Float {
        self.rho2[n].clone().abs().sqrt()
    }

    /// Real-normalized p_n(x) = |rho_n| P_n(x).
    pub fn orthonormal_p(&self, n: usize, x: &Float) -> Float {
        self.rho_abs(n) * self.monic_p(n, x)
    }

    /// The (y_n, z_n, w_n) dictionary at index n, with the connection data
    /// kappa1 = -q^n/a2, kappa2 = 1/(a1 a3 q^(n+sigma)), lambda = (1, q^-sigma).
    pub fn extract_state(&self, n: usize) -> Result<FState> {
        let p = self.prec;
        let (k1, k2) = self.kappa(n)?;
        let (l1, l2) = self.lambda()?;
        let y = (&self.a[0] + &self.a[2]).complete(p)
            - (&self.bn[n] + &self.gamma[n]).complete(p) / &self.q
            + &self.gamma[n]
            + (&self.q * &k1).complete(p) / &k2;
        let w = (&self.an2[n] / &self.q).complete(p);
        let z1 = (&self.a[0] - &self.a[1]).complete(p) + &self.a[2]
            - (&self.bn[n] + (2u32 * &self.gamma[n]).complete(p)) / &self.q
            + (2u32 * &self.gamma[n]).complete(p)
            + (&self.q * &k1).complete(p) / &k2
            - (&w * &k2).complete(p) / &k1;
        if z1.is_zero() {
            return Err(Error::Degenerate("z_{1,n} = 0 in the state extraction".into()));
        }
        let z = ((&self.a[0] - &y).complete(p) * (&self.a[1] - &y).complete(p)) / z1;
        Ok(FState {
            a: self.a.clone(),
            kappa: [k1, k2],
            lambda: [l1, l2],
            q: self.q.clone(),
            y,
            z,
            w,
        })
    }

    /// Hankel-determinant special solution:
    ///
    /// ```text
    /// y_n = a1 + a3 - Sigma_{n+1}/(q Delta_{n+1}) + Sigma_n/Delta_n + q k1/k2
    /// z_n = q k1 Delta_n^2 (y_n-a1)(y_n-a2)
    ///       / (k1 Delta_n (q Delta_n (y_n-a2) + (q-1) Sigma_n)
    ///          - k2 Delta_{n-1} Delta_{n+1})
    /// ```
    pub fn special_solution(&self, n: usize) -> Result<(Float, Float)> {
        if n < 1 {
            return Err(Error::Domain("special_solution needs n >= 1".into()));
        }
        let p = self.prec;
        let (k1, k2) = self.kappa(n)?;
        let y = (&self.a[0] + &self.a[2]).complete(p)
            - (&self.sigma_det[n + 1] / &(&self.q * &self.delta[n + 1]).complete(p)).complete(p)
            + (&self.sigma_det[n] / &self.delta[n]).complete(p)
            + (&self.q * &k1).complete(p) / &k2;
        let num = (&self.q * &k1).complete(p)
            * (&self.delta[n] * &self.delta[n]).complete(p)
            * (y.clone() - &self.a[0])
            * (y.clone() - &self.a[1]);
        let den = k1.clone()
            * &self.delta[n]
            * ((&self.q * &self.delta[n]).complete(p) * (y.clone() - &self.a[1])
                + (&self.q - 1u32).complete(p) * &self.sigma_det[n])
            - k2.clone() * (&self.delta[n - 1] * &self.delta[n + 1]).complete(p);
        if den.is_zero() {
            return Err(Error::MomentDegeneracy(n));
        }
        Ok((y, num / den))
    }

    /// Inverse of the dictionary: (a_n^2, b_n, Gamma_n) from (y, z, w).
    pub fn invert_state(&self, st: &FState, _n: usize) -> Result<(Float, Float, Float)> {
        let p = self.prec;
        let an2 = (&st.q * &st.w).complete(p);
        let z1 = ((&st.a[0] - &st.y).complete(p) * (&st.a[1] - &st.y).complete(p)) / &st.z;
        // Gamma from the y and z1 displays combined
        let gam = (&st.q
            * &(z1.clone() - &st.y + st.a[1].clone()
                + (&st.w * &st.kappa[1]).complete(p) / &st.kappa[0]))
            .complete(p)
            / (&st.q - 1u32).complete(p);
        let b = st.q.clone()
            * ((&st.a[0] + &st.a[2]).complete(p) + &gam
                + (&st.q * &st.kappa[0]).complete(p) / &st.kappa[1]
                - &st.y)
            - &gam;
        Ok((an2, b, gam))
    }

    /// The moment table (primary + cross-check routes).
    pub fn moment_table(&self) -> &MomentTable {
        &self.moments
    }
}

/// Evaluate the weight at a point (x on the positive support ladders for
/// fractional sigma).
pub fn weight_value(params: &WeightParams, x: &Float, ctx: &PrecisionCtx) -> Result<Float> {
    let prec = ctx.prec_bits();
    let q = ctx.rat(&params.q);
    let a1 = ctx.rat(&params.a[0]);
    let a2 = ctx.rat(&params.a[1]);
    let a3 = ctx.rat(&params.a[2]);
    let xs = pow_rat(x, &params.sigma, prec)?;
    let p1 = qfun::qpoch_inf(&(x / &a1).complete(prec), &q, ctx)?;
    let p3 = qfun::qpoch_inf(&(x / &a3).complete(prec), &q, ctx)?;
    let p2 = qfun::qpoch_inf(&(x / &a2).complete(prec), &q, ctx)?;
    if p2.is_zero() {
        return Err(Error::Domain("weight pole: (x/a2; q)_inf vanishes".into()));
    }
    Ok(xs * p1 * p3 / p2)
}

/// Primary route: mu_k = int_{q a1}^{q a3} x^k w(x) d_q x as direct Jackson
/// ladder sums.
fn moment_jackson_route(
    params: &WeightParams,
    k_max: usize,
    wctx: &PrecisionCtx,
) -> Result<Vec<Float>> {
    let q = wctx.rat(&params.q);
    let qa1 = q.clone() * wctx.rat(&params.a[0]);
    let qa3 = q.clone() * wctx.rat(&params.a[2]);
    let mut mu = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let f = |t: &Float| -> Result<Float> {
            Ok(t.clone().pow(k as u32) * weight_value(params, t, wctx)?)
        };
        mu.push(qfun::jackson_integral(f, &qa1, &qa3, &q, wctx)?);
    }
    Ok(mu)
}

/// Cross-check route: the c = 0 reduction of the 2phi1 integral
/// representation, one terminating-free series per endpoint:
///
/// ```text
/// J(q a_e) = (q a_e)^(sigma+k+1) (1-q)(q;q)_inf
///            ((q a_e/a_o; q)_inf / (q a_e/a2; q)_inf)
///            sum_n ((q a_e/a2; q)_n / ((q a_e/a_o; q)_n (q;q)_n)) q^(n(sigma+k+1))
/// mu_k = J(q a3) - J(q a1)
/// ```
fn moment_cross_route(params: &WeightParams, k: usize, wctx: &PrecisionCtx) -> Result<Float> {
    let prec = wctx.prec_bits();
    let q = wctx.rat(&params.q);
    let a2 = wctx.rat(&params.a[1]);
    let eps = wctx.tail_eps();

    let j = |a_end: &BigRat, a_oth: &BigRat| -> Result<Float> {
        let ae = wctx.rat(a_end);
        let ao = wctx.rat(a_oth);
        let qae = (&q * &ae).complete(prec);
        let expo = BigRat::from(&params.sigma + &BigRat::from((k as i64) + 1));
        let pref_pow = pow_rat(&qae, &expo, prec)?;
        let aa = (&qae / &a2).complete(prec); // (q a_e / a2)
        let bb = (&qae / &ao).complete(prec); // (q a_e / a_o)
        let w = pow_rat(&q, &expo, prec)?; // q^(sigma+k+1)
        // sum_n (aa;q)_n / ((bb;q)_n (q;q)_n) w^n
        let mut total = Float::new(prec);
        let mut term = Float::with_val(prec, 1);
        let mut qn = Float::with_val(prec, 1);
        for _ in 0..100_000 {
            total += &term;
            let fa = 1u32 - (&aa * &qn).complete(prec);
            let fb = 1u32 - (&bb * &qn).complete(prec);
            let fq = 1u32 - (&q * &qn).complete(prec);
            if fb.is_zero() || fq.is_zero() {
                return Err(Error::Domain("moment cross-check hit a Pochhammer zero".into()));
            }
            term = term * fa / fb / fq * &w;
            qn *= &q;
            if term.clone().abs() < eps {
                total += &term;
                break;
            }
        }
        let pref = pref_pow
            * (1u32 - &q).complete(prec)
            * qfun::qpoch_inf(&q, &q, wctx)?
            * qfun::qpoch_inf(&bb, &q, wctx)?
            / qfun::qpoch_inf(&aa, &q, wctx)?;
        Ok(pref * total)
    };
    Ok(j(&params.a[2], &params.a[0])? - j(&params.a[0], &params.a[2])?)
}

/// Both moment routes with the consistency check at 10^-(digits-10).
pub fn compute_moments(
    params: &WeightParams,
    k_max: usize,
    ctx: &PrecisionCtx,
    wctx: &PrecisionCtx,
) -> Result<MomentTable> {
    let prec = wctx.prec_bits();
    let mu = moment_jackson_route(params, k_max, wctx)?;
    let mut mu_cross = Vec::with_capacity(k_max + 1);
    let mut discrepancy = Vec::with_capacity(k_max + 1);
    let tol = Float::with_val(prec, 10).pow(-((ctx.digits().saturating_sub(10)) as i32));
    for (k, m) in mu.iter().enumerate() {
        let c = moment_cross_route(params, k, wctx)?;
        let d = (m - &c).complete(prec).abs();
        let scale = m.clone().abs().max(&Float::with_val(prec, 1));
        if d > (&tol * &scale).complete(prec) {
            return Err(Error::Consistency(format!(
                "moment mu_{k}: Jackson and 2phi1 routes disagree by {d}"
            )));
        }
        mu_cross.push(c);
        discrepancy.push(d);
    }
    Ok(MomentTable { mu, mu_cross, discrepancy })
}

/// Standalone moment computation per the spec operation.
pub fn moments(params: &WeightParams, k_max: usize, ctx: &PrecisionCtx) -> Result<MomentTable> {
    let wctx = ctx.with_guard(20);
    compute_moments(params, k_max, ctx, &wctx)
}

/// Hankel determinants Delta_0..Delta_n and the shifted Sigma_0..Sigma_n by
/// fraction-free (Bareiss) elimination. The Bareiss pivots of the big Hankel
/// matrix are exactly the leading principal minors Delta_k.
fn hankel_data(mu: &[Float], n: usize, prec: u32) -> Result<(Vec<Float>, Vec<Float>)> {
    let deltas = {
        let mut m = vec![vec![Float::new(prec); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = mu[i + j].clone();
            }
        }
        bareiss_minors(m, prec)?
    };
    let mut sigmas = vec![Float::new(prec), mu[1].clone()];
    for k in 2..=n {
        let mut m = vec![vec![Float::new(prec); k]; k];
        for i in 0..k {
            for j in 0..k - 1 {
                m[i][j] = mu[i + j].clone();
            }
            m[i][k - 1] = mu[i + k].clone();
        }
        let minors = bareiss_minors(m, prec)?;
        sigmas.push(minors.last().unwrap().clone());
    }
    Ok((deltas, sigmas))
}

/// All leading principal minors (Delta_0 = 1 first) of a square matrix by
/// Bareiss elimination; errors out on a vanishing pivot.
fn bareiss_minors(mut m: Vec<Vec<Float>>, prec: u32) -> Result<Vec<Float>> {
    let n = m.len();
    let mut minors = vec![Float::with_val(prec, 1)];
    let mut prev = Float::with_val(prec, 1);
    for k in 0..n {
        let piv = m[k][k].clone();
        minors.push(piv.clone());
        if piv.is_zero() {
            // exact zero pivot; genuine degeneracy is otherwise detected by
            // the dual-precision monitor in Pipeline::new
            return Err(Error::MomentDegeneracy(k + 1));
        }
        if k + 1 == n {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = ((&piv * &m[i][j]).complete(prec) - (&m[i][k] * &m[k][j]).complete(prec))
                    / &prev;
                m[i][j] = t;
            }
        }
        prev = piv;
    }
    Ok(minors)
}

/// Monic big q-Laguerre value by the terminating 3phi2 sum normalized by its
/// closed-form leading coefficient. Returns (monic value, raw 3phi2 value).
pub fn big_q_laguerre(
    a: &BigRat,
    b: &BigRat,
    n: usize,
    x: &Float,
    q: &BigRat,
    ctx: &PrecisionCtx,
) -> Result<(Float, Float)> {
    let prec = ctx.prec_bits();
    let qf = ctx.rat(q);
    let aq = ctx.rat(&BigRat::from(a * q));
    let bq = ctx.rat(&BigRat::from(b * q));
    let qmn = qf.clone().pow(-(n as i32));

    // terminating sum: sum_{k=0}^n (q^-n;q)_k (x;q)_k / ((aq;q)_k (bq;q)_k (q;q)_k) q^k
    let mut total = Float::new(prec);
    let mut term = Float::with_val(prec, 1);
    let mut qk = Float::with_val(prec, 1);
    for k in 0..=n {
        total += &term;
        if k == n {
            break;
        }
        let f_up1 = 1u32 - (&qmn * &qk).complete(prec);
        let f_x = 1u32 - (x * &qk).complete(prec);
        let f_a = 1u32 - (&aq * &qk).complete(prec);
        let f_b = 1u32 - (&bq * &qk).complete(prec);
        let f_q = 1u32 - (&qf * &qk).complete(prec);
        if f_a.is_zero() || f_b.is_zero() || f_q.is_zero() {
            return Err(Error::Domain("big q-Laguerre lower-parameter pole".into()));
        }
        term = term * f_up1 * f_x / (f_a * f_b * f_q) * &qf;
        qk *= &qf;
    }

    // leading coefficient of the 3phi2 in x:
    // (q^-n;q)_n q^n (-1)^n q^C(n,2) / ((aq;q)_n (bq;q)_n (q;q)_n)
    let pk = |arg: &Float| -> Float {
        let mut p = Float::with_val(prec, 1);
        let mut t = arg.clone();
        for _ in 0..n {
            p *= (1u32 - &t).complete(prec);
            t *= &qf;
        }
        p
    };
    let sign = if n % 2 == 0 { 1i32 } else { -1i32 };
    let lc = pk(&qmn) * qf.clone().pow(n as u32) * sign
        * qf.clone().pow(((n * (n.saturating_sub(1))) / 2) as u32)
        / (pk(&aq) * pk(&bq) * pk(&qf));
    if lc.is_zero() {
        return Err(Error::Domain("big q-Laguerre leading coefficient vanishes".into()));
    }
    Ok(((&total / &lc).complete(prec), total))
}

/// Residuals of Theorem 1's relations between the Hankel solutions of the
/// base parameters and the (q a1, q a2)-shifted parameters at the same n.
#[derive(Clone, Debug)]
pub struct QpvResidual {
    pub n: usize,
    pub res_y: Float,
    pub res_z: Float,
}

/// Compute (y_n, z_n) for `params` and its q-P_V companion, and evaluate the
/// Theorem-1 relations as residuals for n = 1..=n_max.
pub fn verify_special_step(
    params: &WeightParams,
    n_max: usize,
    ctx: &PrecisionCtx,
) -> Result<Vec<QpvResidual>> {
    let pipe = Pipeline::new(params, n_max + 1, ctx)?;
    let shifted = params.qpv_shifted()?;
    let pipe_t = Pipeline::new(&shifted, n_max + 1, ctx)?;
    qpv_residuals(&pipe, &pipe_t, n_max)
}

/// Residuals given both pipelines (shared by the CLI and the tests).
pub fn qpv_residuals(pipe: &Pipeline, pipe_t: &Pipeline, n_max: usize) -> Result<Vec<QpvResidual>> {
    let p = pipe.prec;
    let mut out = Vec::new();
    for n in 1..=n_max {
        let (y, z) = pipe.special_solution(n)?;
        let (yt, zt) = pipe_t.special_solution(n)?;
        let (k1, k2) = pipe.kappa(n)?;
        let (l1, l2) = pipe.lambda()?;
        let r = (&pipe.q * &k1).complete(p) / &k2;
        let a1 = &pipe.a[0];
        let a2 = &pipe.a[1];
        let a3 = &pipe.a[2];

        let res_z = (zt.clone() * &z
            - r.clone() * (y.clone() - a1) * (y.clone() - a2) / (y.clone() - a3))
            .abs();
        let f1 = zt.clone() + (&pipe.q * &l1).complete(p) / (&k2 * a3).complete(p);
        let f2 = zt.clone() + (&pipe.q * &l2).complete(p) / (&k2 * a3).complete(p);
        let res_y = (yt.clone() * &y - a3.clone() * f1 * f2 / (zt.clone() - &r)).abs();
        out.push(QpvResidual { n, res_y, res_z });
    }
    Ok(out)
}

/// build_a over floats for the extracted state (the same formulas as the
/// exact linprob::build_a, used to tie the pipeline back to the linear
/// problem).
pub fn build_a_float(st: &FState, x: &Float, prec: u32) -> [[Float; 2]; 2] {
    let [a1, a2, a3] = &st.a;
    let [k1, k2] = &st.kappa;
    let [l1, l2] = &st.lambda;
    let (y, z, w) = (&st.y, &st.z, &st.w);
    let z1 = ((a1 - y).complete(prec) * (a2 - y).complete(prec)) / z;
    let z2 = (y - a3).complete(prec) * z;
    let alpha = ((l1 + l2).complete(prec) + (k1 * y).complete(prec)
        - (k1 * &z1).complete(prec)
        - (k2 * &z2).complete(prec))
        / (k2 * y).complete(prec);
    let gamma = (a1 + a2).complete(prec) + a3 - 2u32 * y.clone() + &z1 - &alpha;
    let delta = ((l1 * l2).complete(prec) / (k1 * k2).complete(prec)
        - (z1.clone() - y) * ((&alpha * y).complete(prec) + &z2))
        / y;
    [
        [
            k1.clone() * ((x - y).complete(prec) + &z1),
            (k2 * w).complete(prec) * (x - y).complete(prec),
        ],
        [
            k1.clone() * ((&gamma * x).complete(prec) + &delta) / w,
            k2.clone() * ((x - &alpha).complete(prec) * (x - y).complete(prec) + &z2),
        ],
    ]
}
