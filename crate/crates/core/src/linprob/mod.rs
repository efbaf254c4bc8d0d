//! The parameterized 2x2 linear problem Y(qx) = A(x) Y(x): connection data,
//! the polynomial matrix A(x), auxiliary quantities, the first term of the
//! expansion at infinity, and the dictionary to the affine-Weyl parameters.

use serde::{Deserialize, Serialize};

use crate::exact::{format_rat, parse_rat, BigRat, Mat2, Poly, RatFunc};
use crate::{Error, Result};

/// The septuple {a1, a2, a3; kappa1, kappa2, lambda1, lambda2} together with q,
/// subject to lambda1 lambda2 = -kappa1 kappa2 a1 a2 a3.
#[derive(Clone, PartialEq, Eq)]
pub struct ConnectionData {
    pub a: [BigRat; 3],
    pub kappa: [BigRat; 2],
    pub lambda: [BigRat; 2],
    pub q: BigRat,
}

impl ConnectionData {
    pub fn new(
        a: [BigRat; 3],
        kappa: [BigRat; 2],
        lambda: [BigRat; 2],
        q: BigRat,
    ) -> Result<ConnectionData> {
        for (name, v) in [
            ("a1", &a[0]),
            ("a2", &a[1]),
            ("a3", &a[2]),
            ("kappa1", &kappa[0]),
            ("kappa2", &kappa[1]),
            ("lambda1", &lambda[0]),
            ("lambda2", &lambda[1]),
            ("q", &q),
        ] {
            if v.cmp0() == std::cmp::Ordering::Equal {
                return Err(Error::Domain(format!("{name} must be nonzero")));
            }
        }
        if a[0] == a[1] || a[0] == a[2] || a[1] == a[2] {
            return Err(Error::Domain("a1, a2, a3 must be pairwise distinct".into()));
        }
        if q == 1u32 || q == -1i32 {
            return Err(Error::Domain("q must not be a root of unity".into()));
        }
        let lhs = BigRat::from(&lambda[0] * &lambda[1]);
        let rhs = -BigRat::from(&kappa[0] * &kappa[1])
            * BigRat::from(&a[0] * &a[1])
            * a[2].clone();
        if lhs != rhs {
            return Err(Error::Domain(
                "constraint lambda1 lambda2 = -kappa1 kappa2 a1 a2 a3 violated".into(),
            ));
        }
        Ok(ConnectionData { a, kappa, lambda, q })
    }

    /// Reconstructs lambda2 from the constraint; handy for samplers.
    pub fn with_lambda2_solved(
        a: [BigRat; 3],
        kappa: [BigRat; 2],
        lambda1: BigRat,
        q: BigRat,
    ) -> Result<ConnectionData> {
        if lambda1.cmp0() == std::cmp::Ordering::Equal {
            return Err(Error::Domain("lambda1 must be nonzero".into()));
        }
        let lambda2 = -BigRat::from(&kappa[0] * &kappa[1])
            * BigRat::from(&a[0] * &a[1])
            * BigRat::from(&a[2] / &lambda1);
        ConnectionData::new(a, kappa, [lambda1, lambda2], q)
    }
}

impl std::fmt::Debug for ConnectionData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{{a: [{}, {}, {}]; kappa: [{}, {}]; lambda: [{}, {}]; q: {}}}",
            self.a[0], self.a[1], self.a[2], self.kappa[0], self.kappa[1],
            self.lambda[0], self.lambda[1], self.q
        )
    }
}

/// The Painleve variables (y, z) with the gauge parameter w.
#[derive(Clone, PartialEq, Eq)]
pub struct SurfaceState {
    pub y: BigRat,
    pub z: BigRat,
    pub w: BigRat,
}

impl std::fmt::Debug for SurfaceState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(y: {}, z: {}, w: {})", self.y, self.z, self.w)
    }
}

impl SurfaceState {
    pub fn new(y: BigRat, z: BigRat, w: BigRat) -> SurfaceState {
        SurfaceState { y, z, w }
    }

    /// Generic-position checks against a given connection data.
    pub fn validate(&self, m: &ConnectionData) -> Result<()> {
        if self.z.cmp0() == std::cmp::Ordering::Equal {
            return Err(Error::Degenerate("z = 0".into()));
        }
        if self.w.cmp0() == std::cmp::Ordering::Equal {
            return Err(Error::Degenerate("w = 0".into()));
        }
        if self.y.cmp0() == std::cmp::Ordering::Equal {
            return Err(Error::Degenerate("y = 0".into()));
        }
        for (i, a) in m.a.iter().enumerate() {
            if &self.y == a {
                return Err(Error::Degenerate(format!("y = a{}", i + 1)));
            }
        }
        Ok(())
    }
}

/// z1, z2 and the alpha, gamma, delta entries of the parameterization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxValues {
    pub z1: BigRat,
    pub z2: BigRat,
    pub alpha: BigRat,
    pub gamma: BigRat,
    pub delta: BigRat,
}

/// Derive the auxiliary values from the defining conditions:
/// trace A(0) = lambda1 + lambda2, the x^2 coefficient of det A, and
/// det A(0) = lambda1 lambda2, with z1, z2 from the z-factorization.
pub fn derive_aux(m: &ConnectionData, s: &SurfaceState) -> Result<AuxValues> {
    s.validate(m)?;
    let [a1, a2, a3] = &m.a;
    let [k1, k2] = &m.kappa;
    let [l1, l2] = &m.lambda;
    let (y, z) = (&s.y, &s.z);

    let z1 = BigRat::from(a1 - y) * BigRat::from(a2 - y) / z.clone();
    let z2 = BigRat::from(y - a3) * z.clone();

    // trace A(0) = k1(z1 - y) + k2(alpha y + z2) = l1 + l2
    let alpha = (BigRat::from(l1 + l2) + BigRat::from(k1 * y)
        - BigRat::from(k1 * &z1)
        - BigRat::from(k2 * &z2))
        / BigRat::from(k2 * y);

    // x^2 coefficient of det A matches -(a1 + a2 + a3)
    let gamma = BigRat::from(a1 + a2) + a3.clone() - BigRat::from(2) * y.clone() + z1.clone()
        - alpha.clone();

    // det A(0) = l1 l2
    let delta = (BigRat::from(l1 * l2) / BigRat::from(k1 * k2)
        - BigRat::from(&z1 - y) * (BigRat::from(&alpha * y) + z2.clone()))
        / y.clone();

    Ok(AuxValues { z1, z2, alpha, gamma, delta })
}

/// The polynomial matrix A(x) of the linear problem:
///
/// ```text
/// [ k1 (x - y + z1)        k2 w (x - y)              ]
/// [ k1 (gamma x + delta)/w k2 ((x - alpha)(x - y) + z2) ]
/// ```
///
/// with det A(x) = k1 k2 (x - a1)(x - a2)(x - a3) as an exact identity.
pub fn build_a(m: &ConnectionData, s: &SurfaceState) -> Result<Mat2> {
    let aux = derive_aux(m, s)?;
    Ok(build_a_with_aux(m, s, &aux))
}

pub(crate) fn build_a_with_aux(m: &ConnectionData, s: &SurfaceState, aux: &AuxValues) -> Mat2 {
    let [k1, k2] = &m.kappa;
    let (y, w) = (&s.y, &s.w);

    let e11 = Poly::affine(BigRat::from(&aux.z1 - y), BigRat::from(1)).scale(k1);
    let e12 = Poly::affine(-y.clone(), BigRat::from(1)).scale(&BigRat::from(k2 * w));
    let e21 = Poly::affine(aux.delta.clone(), aux.gamma.clone())
        .scale(&(k1.clone() / w.clone()));
    // (x - alpha)(x - y) + z2
    let quad = &Poly::from_roots(&[aux.alpha.clone(), y.clone()])
        + &Poly::constant(aux.z2.clone());
    let e22 = quad.scale(k2);

    Mat2::new(
        RatFunc::from_poly(e11),
        RatFunc::from_poly(e12),
        RatFunc::from_poly(e21),
        RatFunc::from_poly(e22),
    )
}

/// Target determinant k1 k2 (x-a1)(x-a2)(x-a3).
pub fn det_a_target(m: &ConnectionData) -> Poly {
    Poly::from_roots(&m.a).scale(&BigRat::from(&m.kappa[0] * &m.kappa[1]))
}

/// Coefficient of 1/x in the expansion of Y_inf(x) (before the exponential
/// part): [[q(y - z1 + gamma)/(q-1), q w], [-gamma k1/(w k2), q(y + alpha)/(q-1)]].
pub fn first_term_yinf(m: &ConnectionData, s: &SurfaceState) -> Result<[[BigRat; 2]; 2]> {
    if m.q == 1u32 {
        return Err(Error::Domain("first term requires q != 1".into()));
    }
    let aux = derive_aux(m, s)?;
    let q = &m.q;
    let qm1 = BigRat::from(q - &BigRat::from(1));
    let e11 = BigRat::from(q * &(BigRat::from(&s.y - &aux.z1) + aux.gamma.clone())) / qm1.clone();
    let e12 = BigRat::from(q * &s.w);
    let e21 = -BigRat::from(&aux.gamma * &m.kappa[0]) / BigRat::from(&s.w * &m.kappa[1]);
    let e22 = BigRat::from(q * &(BigRat::from(&s.y + &aux.alpha))) / qm1;
    Ok([[e11, e12], [e21, e22]])
}

/// The affine-Weyl parameters (b0..b4; f, g) attached to (M, s).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylParams {
    pub b: [BigRat; 5],
    pub f: BigRat,
    pub g: BigRat,
}

/// Dictionary to the Weyl parameters:
/// b0 = a3/a1, b1 = a1/a2, b2 = -a2 k2/l2, b3 = l2/l1, b4 = -l1/(a3 q k1),
/// y = -l1 g/(a3 k2), z = -l1/(a3 k2 f).
pub fn weyl_params(m: &ConnectionData, s: &SurfaceState) -> Result<WeylParams> {
    let [a1, a2, a3] = &m.a;
    let [k1, k2] = &m.kappa;
    let [l1, l2] = &m.lambda;
    let b0 = BigRat::from(a3 / a1);
    let b1 = BigRat::from(a1 / a2);
    let b2 = -BigRat::from(a2 * k2) / l2.clone();
    let b3 = BigRat::from(l2 / l1);
    let b4 = -l1.clone() / (BigRat::from(a3 * &m.q) * k1.clone());
    // y = -l1 g/(a3 k2)  =>  g = -a3 k2 y / l1
    let g = -BigRat::from(a3 * k2) * BigRat::from(&s.y / l1);
    // z = -l1/(a3 k2 f)  =>  f = -l1/(a3 k2 z)
    let f = -l1.clone() / (BigRat::from(a3 * k2) * s.z.clone());
    Ok(WeylParams { b: [b0, b1, b2, b3, b4], f, g })
}

/// Inverse of the (f, g) half of the dictionary: recover (y, z).
pub fn weyl_to_state(m: &ConnectionData, wp: &WeylParams) -> Result<(BigRat, BigRat)> {
    let a3 = &m.a[2];
    let k2 = &m.kappa[1];
    let l1 = &m.lambda[0];
    if wp.f.cmp0() == std::cmp::Ordering::Equal {
        return Err(Error::Domain("f must be nonzero".into()));
    }
    let y = -BigRat::from(l1 * &wp.g) / BigRat::from(a3 * k2);
    let z = -l1.clone() / (BigRat::from(a3 * k2) * wp.f.clone());
    Ok((y, z))
}

/// Product b0 b1 b2 b3 b4 under the printed dictionary; evaluates to
/// kappa2/(q kappa1), which matches 1/q only modulo the trivial scaling.
pub fn weyl_b_product(m: &ConnectionData) -> BigRat {
    BigRat::from(&m.kappa[1] / &m.kappa[0]) / m.q.clone()
}

/// Variant of b2 with kappa1 in place of kappa2. With this entry the product
/// b0..b4 is exactly 1/q and the lattice table is consistent; kept alongside
/// the printed dictionary for the table checks.
pub fn weyl_b2_corrected(m: &ConnectionData) -> BigRat {
    -BigRat::from(&m.a[1] * &m.kappa[0]) / m.lambda[1].clone()
}

/// JSON wire form of (M, s); rationals as "p/q" strings.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ProblemJson {
    pub q: String,
    pub a: [String; 3],
    pub kappa: [String; 2],
    pub lambda: [String; 2],
    #[serde(default)]
    pub y: Option<String>,
    #[serde(default)]
    pub z: Option<String>,
    #[serde(default)]
    pub w: Option<String>,
    #[serde(default)]
    pub sigma: Option<String>,
}

pub fn problem_to_json(m: &ConnectionData, s: &SurfaceState) -> ProblemJson {
    ProblemJson {
        q: format_rat(&m.q),
        a: [format_rat(&m.a[0]), format_rat(&m.a[1]), format_rat(&m.a[2])],
        kappa: [format_rat(&m.kappa[0]), format_rat(&m.kappa[1])],
        lambda: [format_rat(&m.lambda[0]), format_rat(&m.lambda[1])],
        y: Some(format_rat(&s.y)),
        z: Some(format_rat(&s.z)),
        w: Some(format_rat(&s.w)),
        sigma: None,
    }
}

/// Parse and revalidate (the lambda-constraint is checked on load).
pub fn problem_from_json(j: &ProblemJson) -> Result<(ConnectionData, SurfaceState)> {
    let m = ConnectionData::new(
        [parse_rat(&j.a[0])?, parse_rat(&j.a[1])?, parse_rat(&j.a[2])?],
        [parse_rat(&j.kappa[0])?, parse_rat(&j.kappa[1])?],
        [parse_rat(&j.lambda[0])?, parse_rat(&j.lambda[1])?],
        parse_rat(&j.q)?,
    )?;
    let get = |o: &Option<String>, name: &str| -> Result<BigRat> {
        o.as_deref()
            .ok_or_else(|| Error::Parse(format!("missing field {name}")))
            .and_then(parse_rat)
    };
    let s = SurfaceState::new(get(&j.y, "y")?, get(&j.z, "z")?, get(&j.w, "w")?);
    s.validate(&m)?;
    Ok((m, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::sample;
    use rand::SeedableRng;

    #[test]
    fn constraint_enforced() {
        let bad = ConnectionData::new(
            [rat(1, 1), rat(2, 1), rat(3, 1)],
            [rat(1, 1), rat(1, 1)],
            [rat(1, 1), rat(5, 1)],
            rat(1, 2),
        );
        assert!(bad.is_err());
        let good = ConnectionData::with_lambda2_solved(
            [rat(1, 1), rat(2, 1), rat(3, 1)],
            [rat(1, 1), rat(1, 1)],
            rat(1, 1),
            rat(1, 2),
        )
        .unwrap();
        assert_eq!(good.lambda[1], rat(-6, 1));
    }

    #[test]
    fn z1_vanishes_as_y_approaches_a1() {
        // z1 = (a1-y)(a2-y)/z has an explicit (a1 - y) factor
        let m = ConnectionData::with_lambda2_solved(
            [rat(1, 1), rat(2, 1), rat(3, 1)],
            [rat(1, 1), rat(1, 1)],
            rat(1, 1),
            rat(1, 2),
        )
        .unwrap();
        let s = SurfaceState::new(rat(1001, 1000), rat(1, 1), rat(1, 1));
        let aux = derive_aux(&m, &s).unwrap();
        assert_eq!(aux.z1, rat(-1, 1000) * rat(999, 1000));
    }

    #[test]
    fn aux_and_det_identities_on_random_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let (m, s) = sample::sample_problem(&mut rng);
            let aux = derive_aux(&m, &s).unwrap();
            // z1 z2 = (y - a1)(y - a2)(y - a3)
            let prod = BigRat::from(&aux.z1 * &aux.z2);
            let target = BigRat::from(&s.y - &m.a[0])
                * BigRat::from(&s.y - &m.a[1])
                * BigRat::from(&s.y - &m.a[2]);
            assert_eq!(prod, target);

            let a = build_a(&m, &s).unwrap();
            // exact determinant identity
            assert_eq!(a.det(), RatFunc::from_poly(det_a_target(&m)));
            // trace A(0) = l1 + l2 and det A(0) = l1 l2
            let at0 = a.eval(&rat(0, 1)).unwrap();
            let tr = BigRat::from(&at0[0][0] + &at0[1][1]);
            assert_eq!(tr, BigRat::from(&m.lambda[0] + &m.lambda[1]));
            let det0 = BigRat::from(&at0[0][0] * &at0[1][1])
                - BigRat::from(&at0[0][1] * &at0[1][0]);
            assert_eq!(det0, BigRat::from(&m.lambda[0] * &m.lambda[1]));
            // a12(y) = 0
            assert!(a.e[0][1].eval(&s.y).unwrap().cmp0() == std::cmp::Ordering::Equal);
        }
    }

    #[test]
    fn weyl_roundtrip_and_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let (m, s) = sample::sample_problem(&mut rng);
            let wp = weyl_params(&m, &s).unwrap();
            // b3 = l2/l1
            assert_eq!(wp.b[3], BigRat::from(&m.lambda[1] / &m.lambda[0]));
            // g = -a3 k2 y / l1
            let g = -BigRat::from(&m.a[2] * &m.kappa[1]) * BigRat::from(&s.y / &m.lambda[0]);
            assert_eq!(wp.g, g);
            let (y, z) = weyl_to_state(&m, &wp).unwrap();
            assert_eq!((y, z), (s.y.clone(), s.z.clone()));
            // printed dictionary: product = k2/(q k1)
            let prod = wp.b.iter().fold(BigRat::from(1), |acc, b| acc * b.clone());
            assert_eq!(prod, weyl_b_product(&m));
            // corrected b2 makes the product exactly 1/q
            let prod2 = BigRat::from(&wp.b[0] * &wp.b[1])
                * weyl_b2_corrected(&m)
                * BigRat::from(&wp.b[3] * &wp.b[4]);
            assert_eq!(prod2, BigRat::from(1) / m.q.clone());
        }
    }

    #[test]
    fn json_roundtrip_revalidates() {
        let m = ConnectionData::with_lambda2_solved(
            [rat(1, 2), rat(2, 1), rat(3, 1)],
            [rat(1, 3), rat(2, 1)],
            rat(1, 1),
            rat(2, 5),
        )
        .unwrap();
        let s = SurfaceState::new(rat(5, 7), rat(1, 2), rat(3, 1));
        let j = problem_to_json(&m, &s);
        let text = serde_json::to_string(&j).unwrap();
        let j2: ProblemJson = serde_json::from_str(&text).unwrap();
        let (m2, s2) = problem_from_json(&j2).unwrap();
        assert_eq!(m2, m);
        assert_eq!(s2, s);

        let mut bad = problem_to_json(&m, &s);
        bad.lambda[0] = "7".into();
        assert!(problem_from_json(&bad).is_err());
    }
}
