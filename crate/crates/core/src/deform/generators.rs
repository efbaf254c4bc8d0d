//! The three generator translations and the q-P_V step: connection-data
//! actions, the birational (y, z) maps in both directions, and the R-matrix
//! numerators. Everything here is exact.

use crate::exact::{BigRat, Mat2, Poly, RatFunc};
use crate::linprob::{AuxValues, ConnectionData, SurfaceState};
use crate::{Error, Result};

/// The three generator translations of the connection data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    /// kappa1, lambda1 -> q kappa1, q lambda1
    K1L1,
    /// kappa2, lambda2 -> q kappa2, q lambda2
    K2L2,
    /// a1, lambda1 -> q a1, q lambda1
    A1L1,
}

impl Gen {
    pub fn tag(&self) -> &'static str {
        match self {
            Gen::K1L1 => "Tk1l1",
            Gen::K2L2 => "Tk2l2",
            Gen::A1L1 => "Ta1l1",
        }
    }
}

fn nz(v: BigRat, what: &str) -> Result<BigRat> {
    if v.cmp0() == std::cmp::Ordering::Equal {
        Err(Error::Degenerate(format!("vanishing factor: {what}")))
    } else {
        Ok(v)
    }
}

/// Forward connection-data action of a generator (exponent +1).
pub fn gen_data_forward(g: Gen, m: &ConnectionData) -> Result<ConnectionData> {
    let q = &m.q;
    let mut a = m.a.clone();
    let mut kappa = m.kappa.clone();
    let mut lambda = m.lambda.clone();
    match g {
        Gen::K1L1 => {
            kappa[0] *= q;
            lambda[0] *= q;
        }
        Gen::K2L2 => {
            kappa[1] *= q;
            lambda[1] *= q;
        }
        Gen::A1L1 => {
            a[0] *= q;
            lambda[0] *= q;
        }
    }
    ConnectionData::new(a, kappa, lambda, q.clone())
}

/// Inverse connection-data action (exponent -1).
pub fn gen_data_backward(g: Gen, m: &ConnectionData) -> Result<ConnectionData> {
    let q = &m.q;
    let mut a = m.a.clone();
    let mut kappa = m.kappa.clone();
    let mut lambda = m.lambda.clone();
    match g {
        Gen::K1L1 => {
            kappa[0] /= q;
            lambda[0] /= q;
        }
        Gen::K2L2 => {
            kappa[1] /= q;
            lambda[1] /= q;
        }
        Gen::A1L1 => {
            a[0] /= q;
            lambda[0] /= q;
        }
    }
    ConnectionData::new(a, kappa, lambda, q.clone())
}

/// Forward (y, z) map of a generator, using the source data `m`.
pub fn gen_map_forward(g: Gen, m: &ConnectionData, s: &SurfaceState) -> Result<(BigRat, BigRat)> {
    let [a1, a2, a3] = &m.a;
    let [k1, k2] = &m.kappa;
    let [l1, l2] = &m.lambda;
    let q = &m.q;
    let (y, z) = (&s.y, &s.z);
    let one = BigRat::from(1);
    let _ = one;

    match g {
        Gen::K1L1 => {
            let c = nz(
                BigRat::from(a1 * a2) * k1.clone() - z.clone() * l1,
                "a1 a2 k1 - z l1",
            )?;
            let ym = BigRat::from(a1 * a2) * k2.clone() - q.clone() * l1;
            let top = a3.clone() * y.clone() * y.clone() * k1.clone() * ym.clone() / c.clone()
                - a3.clone() * q.clone() * k1.clone() * (y.clone() - a1) * (y.clone() - a2)
                    / z.clone()
                + q.clone() * l1.clone() * (a3.clone() - y);
            let bot = nz(
                y.clone() * y.clone() * k1.clone() * ym / c
                    + y.clone() * k2.clone() * (a3.clone() - y),
                "Tk1l1 map denominator",
            )?;
            let yt = top / bot;
            let den = nz(
                k2.clone()
                    * (z.clone() * l1.clone() * (a3.clone() - y) * yt.clone()
                        + BigRat::from(a1 * a2) * a3.clone() * k1.clone() * (y.clone() - &yt)),
                "Tk1l1 z-map denominator",
            )?;
            let zt = -(q.clone() * y.clone() * k1.clone() * l1.clone()
                * (yt.clone() - a1)
                * (yt.clone() - a2))
                / den;
            Ok((yt, nz(zt, "z tilde")?))
        }
        Gen::K2L2 => {
            let d1 = nz(
                k1.clone() * (a3.clone() * z.clone() * k2.clone() + l1),
                "k1(a3 z k2 + l1)",
            )?;
            let top = -(y.clone() * y.clone() * k2.clone() * l1.clone()
                * (a3.clone() * k1.clone() + l2))
                / d1
                + l1.clone() * (y.clone() - a1) * (y.clone() - a2) / z.clone()
                + BigRat::from(a1 * a2) * k2.clone() * (a3.clone() - y);
            let d2 = nz(
                a3.clone() * k1.clone() * z.clone()
                    * (a3.clone() * z.clone() * k2.clone() + l1),
                "a3 k1 z (a3 z k2 + l1)",
            )?;
            let bot = nz(
                l1.clone()
                    * (a3.clone() * k1.clone() * k2.clone() * (y.clone() - a1) * (y.clone() - a2)
                        + l1.clone() * (y.clone() * k1.clone() + l2))
                    / d2
                    - l1.clone() * (y.clone() * k1.clone() + l2)
                        / (a3.clone() * k1.clone() * z.clone()),
                "Tk2l2 map denominator",
            )?;
            let yt = top / bot / y.clone();
            let den = nz(
                k2.clone()
                    * yt.clone()
                    * (a3.clone() * z.clone() - y.clone() * (yt.clone() + z)
                        + y.clone() * y.clone())
                    + l1.clone() * (yt.clone() - y),
                "Tk2l2 z-map denominator",
            )?;
            let zt = -(y.clone() * k1.clone() * (yt.clone() - a1) * (yt.clone() - a2)) / den;
            Ok((yt, nz(zt, "z tilde")?))
        }
        Gen::A1L1 => {
            let c = nz(
                BigRat::from(a1 * a2) * k1.clone() - z.clone() * l1,
                "a1 a2 k1 - z l1",
            )?;
            let d = a1.clone() * (y.clone() - a1) * c.clone();
            let t1 = k1.clone()
                * (a1.clone() * q.clone() * l1.clone()
                    + a2.clone() * a3.clone() * z.clone() * k2.clone())
                / (a1.clone() * y.clone());
            let t2 = a2.clone() * k1.clone() * l1.clone()
                * (z.clone() * k2.clone() - q.clone() * k1.clone())
                / c.clone();
            let t3 = a2.clone() * (a3.clone() - a1) * z.clone() * z.clone() * k1.clone()
                * k2.clone()
                * l1.clone()
                / d.clone();
            let b1 = (a3.clone() - a1) * z.clone() * z.clone() * k2.clone() * l1.clone()
                * l1.clone()
                / d;
            let b2 = a3.clone() * k2.clone()
                * (z.clone() * l1.clone() - BigRat::from(a1 * a2) * k1.clone())
                / (a1.clone() * y.clone());
            let b3 = a2.clone() * k1.clone() * k2.clone()
                * (a2.clone() * a3.clone() * k1.clone() - z.clone() * l1.clone())
                / c;
            let bot = nz(b1 + b2 + b3, "Ta1l1 z-map denominator")?;
            let zt = nz(y.clone() * (t1 + t2 + t3) / bot, "z tilde")?;
            let den = nz(
                l1.clone()
                    * (q.clone() * y.clone() * k1.clone() * (y.clone() - a1)
                        + z.clone() * k2.clone() * (a3.clone() - y) * zt.clone())
                    + a2.clone() * a3.clone() * k1.clone() * k2.clone() * (y.clone() - a1)
                        * zt.clone(),
                "Ta1l1 y-map denominator",
            )?;
            let yt = a2.clone() * y.clone() * k1.clone() * (y.clone() - a1)
                * (a3.clone() * k2.clone() * zt.clone() + q.clone() * l1.clone())
                / den;
            Ok((yt, zt))
        }
    }
}

/// Inverse (y, z) map: given the image (yt, zt), recover (y, z). The
/// parameters are those of the SOURCE (untilded) connection data.
pub fn gen_map_backward(
    g: Gen,
    m_src: &ConnectionData,
    yt: &BigRat,
    zt: &BigRat,
) -> Result<(BigRat, BigRat)> {
    let [a1, a2, a3] = &m_src.a;
    let [k1, k2] = &m_src.kappa;
    let [l1, l2] = &m_src.lambda;
    let _ = l2;
    let q = &m_src.q;

    match g {
        Gen::K1L1 => {
            let d1 = nz(
                a3.clone() * k2.clone() * zt.clone() + q.clone() * l1.clone(),
                "a3 k2 zt + q l1",
            )?;
            let ym = BigRat::from(a1 * a2) * k2.clone() - q.clone() * l1;
            let top = a3.clone() * k2.clone() * yt.clone() * yt.clone() * ym.clone() / d1.clone()
                + q.clone() * l1.clone() * (a1.clone() - yt) * (a2.clone() - yt) / zt.clone()
                + BigRat::from(a1 * a2) * k2.clone() * (a3.clone() - yt);
            let bot = nz(
                k2.clone() * yt.clone() * yt.clone()
                    * (a3.clone() * k2.clone()
                        * (a1.clone() + a2.clone() - yt.clone())
                        - q.clone() * l1.clone())
                    / d1
                    + k2.clone() * yt.clone() * (a1.clone() - yt) * (a2.clone() - yt)
                        / zt.clone(),
                "Tk1l1 inverse denominator",
            )?;
            let y = top / bot;
            let den = nz(
                k2.clone() * l1.clone() * (y.clone() - a3) * yt.clone() * zt.clone(),
                "k2 l1 (y - a3) yt zt",
            )?;
            let z = k1.clone()
                * (q.clone() * y.clone() * l1.clone() * (yt.clone() - a1) * (yt.clone() - a2)
                    + BigRat::from(a1 * a2) * a3.clone() * k2.clone() * (y.clone() - yt)
                        * zt.clone())
                / den;
            Ok((y, nz(z, "z")?))
        }
        Gen::K2L2 => {
            let d1 = nz(
                zt.clone() * l1.clone() - BigRat::from(a1 * a2) * k1.clone(),
                "zt l1 - a1 a2 k1",
            )?;
            let lm = l1.clone() - BigRat::from(a1 * a2) * k2.clone();
            let top = a3.clone() * yt.clone() * yt.clone() * k1.clone() * lm.clone() / d1.clone()
                - a3.clone() * k1.clone() * (yt.clone() - a1) * (yt.clone() - a2) / zt.clone()
                + l1.clone() * (a3.clone() - yt);
            let bot = nz(
                yt.clone() * k1.clone() * lm / d1 + k2.clone() * (a3.clone() - yt),
                "Tk2l2 inverse denominator",
            )?;
            let y = top / bot / yt.clone();
            let den = nz(
                yt.clone() * k2.clone() * (y.clone() - a3) * zt.clone(),
                "yt k2 (y - a3) zt",
            )?;
            let z = (y.clone()
                * (k1.clone() * (yt.clone() - a1) * (yt.clone() - a2)
                    + yt.clone() * zt.clone() * k2.clone() * (y.clone() - yt))
                + zt.clone() * l1.clone() * (yt.clone() - y.clone()))
                / den;
            Ok((y, nz(z, "z")?))
        }
        Gen::A1L1 => {
            let d1 = nz(
                a3.clone() * k2.clone() * zt.clone() + q.clone() * l1.clone(),
                "a3 k2 zt + q l1",
            )?;
            let t1 = a2.clone() * a3.clone() * k2.clone() * k2.clone() * yt.clone() * yt.clone()
                * (a3.clone() * k1.clone() + l1)
                / d1.clone();
            let t2 = (a2.clone() - yt)
                * (a2.clone() * a3.clone() * k1.clone() * k2.clone() * yt.clone()
                    + q.clone() * l1.clone() * l1.clone())
                / zt.clone();
            let t3 = a2.clone() * k2.clone() * l1.clone() * (a3.clone() - yt);
            let b1 = q.clone() * k1.clone() * l1.clone() * (a2.clone() - yt)
                * (a2.clone() - yt)
                / zt.clone();
            let b2 = -(q.clone() * k2.clone() * l1.clone() * yt.clone() * yt.clone()
                * (a3.clone() * k1.clone() + l1))
                / d1;
            let b3 = a2.clone() * k2.clone()
                * (a2.clone() * a3.clone() * k1.clone() + l1.clone() * yt.clone());
            let bot = nz(b1 + b2 + b3, "Ta1l1 inverse denominator")?;
            let y = zt.clone() * (t1 + t2 + t3) / bot;
            let den = nz(
                k2.clone() * l1.clone() * (y.clone() - a3) * yt.clone() * zt.clone(),
                "k2 l1 (y - a3) yt zt",
            )?;
            let z = k1.clone() * (y.clone() - a1)
                * (q.clone() * y.clone() * l1.clone() * (yt.clone() - a2)
                    + a2.clone() * a3.clone() * k2.clone() * (yt.clone() - y.clone()) * zt.clone())
                / den;
            Ok((y, nz(z, "z")?))
        }
    }
}

/// The pieces of the generator R matrix that the gauge solve needs:
/// r12 = r12_c + wt * r12_l, plus the w-free r11 and r22.
pub(crate) struct RParts {
    pub r11: RatFunc,
    pub r22: RatFunc,
    pub r12_c: RatFunc,
    pub r12_l: RatFunc,
}

pub(crate) fn r_parts(
    g: Gen,
    m: &ConnectionData,
    s: &SurfaceState,
    aux: &AuxValues,
    _mt: &ConnectionData,
    yt: &BigRat,
    auxt: &AuxValues,
) -> Result<RParts> {
    let q = &m.q;
    let qm1 = BigRat::from(q.clone() - BigRat::from(1));
    let poly = |p: Poly| RatFunc::from_poly(p);

    match g {
        Gen::K1L1 => {
            // r11 = x + q(yt - z1t + gt - y + z1 - g)/(q - 1); r12 = -q w; r22 = 1
            let c = q.clone()
                * (yt.clone() - &auxt.z1 + auxt.gamma.clone() - &s.y + aux.z1.clone()
                    - &aux.gamma)
                / qm1;
            Ok(RParts {
                r11: poly(Poly::affine(c, BigRat::from(1))),
                r22: RatFunc::one(),
                r12_c: RatFunc::constant(-(q.clone() * &s.w)),
                r12_l: RatFunc::zero(),
            })
        }
        Gen::K2L2 => {
            // r11 = 1; r12 = q wt; r22 = x + q(yt - y + at - a)/(q - 1)
            let c = q.clone() * (yt.clone() - &s.y + auxt.alpha.clone() - &aux.alpha) / qm1;
            Ok(RParts {
                r11: RatFunc::one(),
                r22: poly(Poly::affine(c, BigRat::from(1))),
                r12_c: RatFunc::zero(),
                r12_l: RatFunc::constant(q.clone()),
            })
        }
        Gen::A1L1 => {
            // everything over (x - q a1), diagonal monic-affine numerators
            let qa1 = BigRat::from(q * &m.a[0]);
            let den = Poly::affine(-qa1.clone(), BigRat::from(1));
            let d = yt.clone() + &auxt.alpha - s.y.clone() - &aux.alpha;
            let c11 = -(q.clone() * d.clone()) / qm1.clone();
            let c22 = q.clone() * d / qm1 - qa1;
            Ok(RParts {
                r11: RatFunc::new(Poly::affine(c11, BigRat::from(1)), den.clone())?,
                r22: RatFunc::new(Poly::affine(c22, BigRat::from(1)), den.clone())?,
                r12_c: RatFunc::new(Poly::constant(-(q.clone() * &s.w)), den.clone())?,
                r12_l: RatFunc::new(Poly::constant(q.clone()), den)?,
            })
        }
    }
}

/// Full generator R matrix once the tilde gauge wt is known.
pub(crate) fn build_r_gen(
    g: Gen,
    m: &ConnectionData,
    s: &SurfaceState,
    aux: &AuxValues,
    _mt: &ConnectionData,
    _yt: &BigRat,
    auxt: &AuxValues,
    wt: &BigRat,
) -> Result<Mat2> {
    let parts = r_parts(g, m, s, aux, _mt, _yt, auxt)?;
    let r12 = &parts.r12_c + &parts.r12_l.scale_rat(wt);
    let [k1, k2] = &m.kappa;
    let r21 = match g {
        Gen::K1L1 => RatFunc::constant(
            -(m.q.clone() * k1 * auxt.gamma.clone()) / BigRat::from(k2 * wt),
        ),
        Gen::K2L2 => {
            RatFunc::constant(BigRat::from(&aux.gamma * k1) / BigRat::from(&s.w * k2))
        }
        Gen::A1L1 => {
            let qa1 = BigRat::from(&m.q * &m.a[0]);
            let num = k1.clone()
                * (aux.gamma.clone() * wt - s.w.clone() * &auxt.gamma)
                / (BigRat::from(&s.w * k2) * wt.clone());
            RatFunc::new(
                Poly::constant(num),
                Poly::affine(-qa1, BigRat::from(1)),
            )?
        }
    };
    Ok(Mat2::new(parts.r11, r12, r21, parts.r22))
}

/// Forward q-P_V step on the Painleve variables and the gauge:
/// zt z = (q k1/k2)(y-a1)(y-a2)/(y-a3), then yt from the printed relation,
/// then wt/w = (q k1/k2)/((q k1/k2) - zt).
pub fn qpv_map(m: &ConnectionData, s: &SurfaceState) -> Result<(ConnectionData, SurfaceState)> {
    s.validate(m)?;
    let [a1, a2, a3] = &m.a;
    let [k1, k2] = &m.kappa;
    let [l1, l2] = &m.lambda;
    let q = &m.q;
    let r = BigRat::from(q * k1) / k2.clone();

    let den = nz(
        (s.y.clone() - a3) * s.z.clone(),
        "(y - a3) z in the z-step",
    )?;
    let zt = nz(
        r.clone() * (s.y.clone() - a1) * (s.y.clone() - a2) / den,
        "z tilde",
    )?;
    let yden = nz((zt.clone() - &r) * s.y.clone(), "(zt - q k1/k2) y")?;
    let f1 = zt.clone() + q.clone() * l1.clone() / BigRat::from(k2 * a3);
    let f2 = zt.clone() + q.clone() * l2.clone() / BigRat::from(k2 * a3);
    let yt = a3.clone() * f1 * f2 / yden;
    let wden = nz(r.clone() - &zt, "q k1/k2 - z tilde")?;
    let wt = s.w.clone() * r / wden;

    let mt = ConnectionData::new(
        [
            BigRat::from(q * a1),
            BigRat::from(q * a2),
            a3.clone(),
        ],
        [BigRat::from(k1 / q), BigRat::from(k2 / q)],
        m.lambda.clone(),
        q.clone(),
    )?;
    let st = SurfaceState::new(yt, zt, wt);
    st.validate(&mt)
        .map_err(|e| Error::step("QPV", format!("image state degenerate: {e}")))?;
    Ok((mt, st))
}

/// Inverse q-P_V step.
pub fn qpv_map_inverse(
    m_img: &ConnectionData,
    s_img: &SurfaceState,
) -> Result<(ConnectionData, SurfaceState)> {
    let q = &m_img.q;
    let m_src = ConnectionData::new(
        [
            BigRat::from(&m_img.a[0] / q),
            BigRat::from(&m_img.a[1] / q),
            m_img.a[2].clone(),
        ],
        [
            BigRat::from(&m_img.kappa[0] * q),
            BigRat::from(&m_img.kappa[1] * q),
        ],
        m_img.lambda.clone(),
        q.clone(),
    )?;
    let [a1, a2, a3] = &m_src.a;
    let [k1, k2] = &m_src.kappa;
    let [l1, l2] = &m_src.lambda;
    let r = BigRat::from(q * k1) / k2.clone();
    let (yt, zt) = (&s_img.y, &s_img.z);

    let yden = nz((zt.clone() - &r) * yt.clone(), "(zt - q k1/k2) yt")?;
    let f1 = zt.clone() + q.clone() * l1.clone() / BigRat::from(k2 * a3);
    let f2 = zt.clone() + q.clone() * l2.clone() / BigRat::from(k2 * a3);
    let y = a3.clone() * f1 * f2 / yden;
    let zden = nz((y.clone() - a3) * zt.clone(), "(y - a3) zt")?;
    let z = r.clone() * (y.clone() - a1) * (y.clone() - a2) / zden;
    let w = s_img.w.clone() * nz(r.clone() - zt, "q k1/k2 - zt")? / r;

    let s_src = SurfaceState::new(y, z, w);
    s_src
        .validate(&m_src)
        .map_err(|e| Error::step("QPV^-1", format!("preimage state degenerate: {e}")))?;
    Ok((m_src, s_src))
}

/// R matrix of the q-P_V step: (x I + R0)/((x - q a1)(x - q a2)) with
///
/// ```text
/// R0 = [ q d/(1-q)                 q(wt - w)              ]
///      [ (k1/k2)(g/w - gt/wt)      -q d/(1-q) - q(a1+a2)  ]
/// ```
///
/// where d = yt - y + alphat - alpha. det R0 = q^2 a1 a2 and
/// tr R0 = -q(a1 + a2), so det R = 1/((x - q a1)(x - q a2)) exactly.
pub fn build_r_qpv(
    m: &ConnectionData,
    s: &SurfaceState,
    mt: &ConnectionData,
    st: &SurfaceState,
) -> Result<Mat2> {
    let aux = crate::linprob::derive_aux(m, s)?;
    let auxt = crate::linprob::derive_aux(mt, st)?;
    let q = &m.q;
    let one_m_q = BigRat::from(1) - q.clone();
    let d = st.y.clone() - &s.y + auxt.alpha.clone() - &aux.alpha;

    let r11 = BigRat::from(q * &d) / one_m_q.clone();
    let r12 = q.clone() * (st.w.clone() - &s.w);
    let r21 = BigRat::from(&m.kappa[0] / &m.kappa[1])
        * (BigRat::from(&aux.gamma / &s.w) - BigRat::from(&auxt.gamma / &st.w));
    let r22 = -BigRat::from(q * &d) / one_m_q
        - q.clone() * (m.a[0].clone() + &m.a[1]);

    let den = Poly::from_roots(&[BigRat::from(q * &m.a[0]), BigRat::from(q * &m.a[1])]);
    let entry = |c0: BigRat, c1: BigRat| RatFunc::new(Poly::affine(c0, c1), den.clone());
    Ok(Mat2::new(
        entry(r11, BigRat::from(1))?,
        entry(r12, BigRat::new())?,
        entry(r21, BigRat::new())?,
        entry(r22, BigRat::from(1))?,
    ))
}
