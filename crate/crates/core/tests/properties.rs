//! Property tests for the exact kernel: canonical-form uniqueness, the
//! q-shift ring homomorphism, and the 2x2 matrix identities.

use proptest::prelude::*;

use qpv_core::exact::{BigRat, Mat2, Poly, RatFunc};

fn rat_strategy() -> impl Strategy<Value = BigRat> {
    (-20i64..=20, 1i64..=20).prop_map(|(n, d)| BigRat::from((n, d)))
}

fn nonzero_rat() -> impl Strategy<Value = BigRat> {
    rat_strategy().prop_filter("nonzero", |r| r.cmp0() != std::cmp::Ordering::Equal)
}

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = Poly> {
    proptest::collection::vec(rat_strategy(), 0..=max_deg + 1).prop_map(Poly::from_coeffs)
}

fn nonzero_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    poly_strategy(max_deg).prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfunc_strategy() -> impl Strategy<Value = RatFunc> {
    (poly_strategy(3), nonzero_poly(2))
        .prop_map(|(n, d)| RatFunc::new(n, d).expect("nonzero denominator"))
}

fn mat_strategy() -> impl Strategy<Value = Mat2> {
    (ratfunc_strategy(), ratfunc_strategy(), ratfunc_strategy(), ratfunc_strategy())
        .prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonicalize_kills_common_factors(
        p in poly_strategy(3),
        q in nonzero_poly(2),
        g in nonzero_poly(2),
    ) {
        let direct = RatFunc::new(p.clone(), q.clone()).unwrap();
        let blown = RatFunc::new(&p * &g, &q * &g).unwrap();
        prop_assert_eq!(direct, blown);
    }

    #[test]
    fn canonical_form_is_stable(f in ratfunc_strategy(), g in ratfunc_strategy()) {
        // re-canonicalizing a product of canonical forms is a no-op
        let prod = &f * &g;
        let again = RatFunc::new(prod.num().clone(), prod.den().clone()).unwrap();
        prop_assert_eq!(prod, again);
    }

    #[test]
    fn q_shift_is_ring_homomorphism(
        f in ratfunc_strategy(),
        g in ratfunc_strategy(),
        q in nonzero_rat(),
    ) {
        let sum = (&f + &g).q_shift(&q).unwrap();
        let sum2 = &f.q_shift(&q).unwrap() + &g.q_shift(&q).unwrap();
        prop_assert_eq!(sum, sum2);
        let prod = (&f * &g).q_shift(&q).unwrap();
        let prod2 = &f.q_shift(&q).unwrap() * &g.q_shift(&q).unwrap();
        prop_assert_eq!(prod, prod2);
    }

    #[test]
    fn q_shift_roundtrip(f in ratfunc_strategy(), q in nonzero_rat()) {
        let qinv = BigRat::from(q.recip_ref());
        let back = f.q_shift(&q).unwrap().q_shift(&qinv).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn det_is_multiplicative(a in mat_strategy(), b in mat_strategy()) {
        let lhs = (&a * &b).det();
        let rhs = &a.det() * &b.det();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn matmul_is_associative(a in mat_strategy(), b in mat_strategy(), c in mat_strategy()) {
        let lhs = &(&a * &b) * &c;
        let rhs = &a * &(&b * &c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_identity(a in mat_strategy()) {
        if !a.det().is_zero() {
            let inv = a.inv().unwrap();
            prop_assert!((&a * &inv).is_identity());
            prop_assert!((&inv * &a).is_identity());
        }
    }
}
