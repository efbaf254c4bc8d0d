//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p qpv-core --test acceptance -- --nocapture` to see
//! the per-criterion lines.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::ops::{CompleteRound, Pow};
use rug::Float;

use qpv_core::deform::{
    apply_word_map, build_r_qpv, compose_word, parse_word, qpv_map, verify_compat, Step, TagKind,
};
use qpv_core::exact::{BigRat, Poly, RatFunc};
use qpv_core::linprob::{build_a, det_a_target, ConnectionData, SurfaceState};
use qpv_core::ortho::{
    big_q_laguerre, qpv_deformation, qpv_residuals, transfer_data, weight_deformation, DefId,
    Pipeline, WeightParams,
};
use qpv_core::qfun::{self, PrecisionCtx};
use qpv_core::sample;

fn rat(n: i64, d: i64) -> BigRat {
    BigRat::from((n, d))
}

fn tol_f(ctx: &PrecisionCtx, digits: i32) -> Float {
    Float::with_val(ctx.prec_bits(), 10).pow(-digits)
}

fn canonical_params() -> WeightParams {
    WeightParams::new([rat(1, 1), rat(2, 1), rat(3, 1)], rat(1, 2), rat(1, 5)).unwrap()
}

/// Criterion 1: exact q-P_V Lax verification on >= 25 random rational
/// states, zero tolerance, within 10 seconds.
#[test]
fn criterion_01_exact_qpv_lax() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..25 {
        let step = sample::sample_until(&mut rng, |m, s| {
            compose_word(&[Step::new(TagKind::Qpv, 1)], m, s).ok()
        });
        let rep = step.verify().unwrap();
        assert!(rep.ok, "q-P_V compatibility failed exactly");
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:?}, budget 10 s");
    println!("[criterion 01] exact q-P_V Lax verification, 25 trials, zero tolerance: PASS ({dt:?})");
}

/// Criterion 2: exact generator verification (and inverses via round trip)
/// for Tk1l1, Tk2l2, Ta1l1, >= 25 trials each.
#[test]
fn criterion_02_exact_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for kind in [TagKind::Tk1l1, TagKind::Tk2l2, TagKind::Ta1l1] {
        for _ in 0..25 {
            let (fwd, back) = sample::sample_until(&mut rng, |m, s| {
                let f = compose_word(&[Step::new(kind, 1)], m, s).ok()?;
                let b = compose_word(&[Step::new(kind, -1)], &f.after.0, &f.after.1).ok()?;
                Some((f, b))
            });
            assert!(fwd.verify().unwrap().ok, "{kind:?} forward compatibility");
            assert!(back.verify().unwrap().ok, "{kind:?} inverse compatibility");
            assert_eq!(back.after.1.y, fwd.before.1.y, "{kind:?} round trip y");
            assert_eq!(back.after.1.z, fwd.before.1.z, "{kind:?} round trip z");
            assert_eq!(back.after.0, fwd.before.0, "{kind:?} round trip data");
        }
    }
    println!("[criterion 02] exact generator verification (3 generators x 25 trials + inverses): PASS");
}

/// Criterion 3: determinant identities, exact in every trial.
#[test]
fn criterion_03_determinant_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..25 {
        let (m, s) = sample::sample_problem(&mut rng);
        let a = build_a(&m, &s).unwrap();
        assert_eq!(a.det(), RatFunc::from_poly(det_a_target(&m)));
    }
    for _ in 0..10 {
        // det R_qpv = 1/((x - q a1)(x - q a2))
        let step = sample::sample_until(&mut rng, |m, s| {
            compose_word(&[Step::new(TagKind::Qpv, 1)], m, s).ok()
        });
        let m = &step.before.0;
        let den = Poly::from_roots(&[
            BigRat::from(&m.q * &m.a[0]),
            BigRat::from(&m.q * &m.a[1]),
        ]);
        assert_eq!(step.r.det(), RatFunc::new(Poly::one(), den).unwrap());
        // det R_{a1 l1} = x/(x - q a1)
        let step = sample::sample_until(&mut rng, |m, s| {
            compose_word(&[Step::new(TagKind::Ta1l1, 1)], m, s).ok()
        });
        let m = &step.before.0;
        let expect = RatFunc::new(
            Poly::x(),
            Poly::affine(-BigRat::from(&m.q * &m.a[0]), BigRat::from(1)),
        )
        .unwrap();
        assert_eq!(step.r.det(), expect);
    }
    println!("[criterion 03] determinant identities det A, det R_qpv, det R_a1l1: PASS (exact)");
}

/// Criterion 4: the word T0 T1 T2 T3 T4 fixes (y, z) and scales all kappa,
/// lambda by q; >= 10 random states, exact.
#[test]
fn criterion_04_trivial_element() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let word = parse_word("T0 T1 T2 T3 T4").unwrap();
    for _ in 0..10 {
        let (m, s, out) = sample::sample_until(&mut rng, |m, s| {
            apply_word_map(&word, m, s).ok().map(|o| (m.clone(), s.clone(), o))
        });
        let (mt, st) = out;
        assert_eq!(st.y, s.y, "y fixed");
        assert_eq!(st.z, s.z, "z fixed");
        assert_eq!(mt.a, m.a, "a fixed");
        for i in 0..2 {
            assert_eq!(mt.kappa[i], BigRat::from(&m.q * &m.kappa[i]));
            assert_eq!(mt.lambda[i], BigRat::from(&m.q * &m.lambda[i]));
        }
    }
    println!("[criterion 04] trivial element T0 T1 T2 T3 T4 fixes (y, z), scales kappa/lambda by q: PASS");
}

/// Criterion 5: the factorization Ta1l1 . Ta2l2 . Tk1l1^-1 . Tk2l2^-1
/// reproduces the q-P_V step exactly on (y, z); >= 10 states.
#[test]
fn criterion_05_factorization() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let word = parse_word("Ta1l1 Ta2l2 Tk1l1^-1 Tk2l2^-1").unwrap();
    for _ in 0..10 {
        let (direct, via_word) = sample::sample_until(&mut rng, |m, s| {
            let d = qpv_map(m, s).ok()?;
            let w = apply_word_map(&word, m, s).ok()?;
            Some((d, w))
        });
        assert_eq!(via_word.1.y, direct.1.y, "factorization y");
        assert_eq!(via_word.1.z, direct.1.z, "factorization z");
        assert_eq!(via_word.0, direct.0, "factorization connection data");
    }
    println!("[criterion 05] q-P_V = Ta1l1 . Ta2l2 . Tk1l1^-1 . Tk2l2^-1 on (y, z): PASS (exact)");
}

/// Criterion 6: theta and e_{q,c} functional equations and the 2phi1 Jackson
/// integral representation, each within 1e-50 at 60 digits on 10 randomized
/// points; doubling the digits improves each by >= 10 orders.
#[test]
fn criterion_06_q_special_functions() {
    let run = |digits: u32| -> (Float, Float, Float) {
        let ctx = PrecisionCtx::new(digits).unwrap();
        let p = ctx.prec_bits();
        let mut rng = ChaCha8Rng::seed_from_u64(606);
        let mut worst_theta = Float::new(p);
        let mut worst_e = Float::new(p);
        let mut worst_phi = Float::new(p);
        for _ in 0..10 {
            use rand::Rng;
            let q = ctx.rat(&rat(rng.random_range(1..=4), rng.random_range(5..=10)));
            let x = ctx.rat(&rat(rng.random_range(1..=9), rng.random_range(1..=4)));
            let c = ctx.rat(&rat(rng.random_range(1..=7), rng.random_range(1..=5)));
            // theta_q(x) = q x theta_q(q x)  (the equation the triple product
            // satisfies; the paper's display inverts it)
            let t = qfun::theta(&x, &q, &ctx).unwrap();
            let tq = qfun::theta(&(&q * &x).complete(p), &q, &ctx).unwrap();
            let r = (t.clone() - (&q * &x).complete(p) * tq).abs() / t.clone().abs();
            if r > worst_theta {
                worst_theta = r;
            }
            // e_{q,c}(x) = c e_{q,c}(qx) and e_{q,c}(x) = x e_{q,qc}(x)
            let e = qfun::q_char(&c, &x, &q, &ctx).unwrap();
            let eq = qfun::q_char(&c, &(&q * &x).complete(p), &q, &ctx).unwrap();
            let r1 = (e.clone() - c.clone() * eq).abs() / e.clone().abs();
            let eqc = qfun::q_char(&(&q * &c).complete(p), &x, &q, &ctx).unwrap();
            let r2 = (e.clone() - x.clone() * eqc).abs() / e.clone().abs();
            let r = r1.max(&r2);
            if r > worst_e {
                worst_e = r;
            }
            // 2phi1 series vs its Jackson integral representation
            let aa = ctx.rat(&rat(rng.random_range(1..=3), 7));
            let bb = ctx.rat(&rat(rng.random_range(1..=3), 5));
            let cc = ctx.rat(&rat(rng.random_range(1..=2), 9));
            let zz = ctx.rat(&rat(rng.random_range(1..=2), 7));
            let series = qfun::phi_rs(&[aa.clone(), bb.clone()], &[cc.clone()], &q, &zz, &ctx).unwrap();
            let rep = qfun::phi21_jackson_rep(&aa, &bb, &cc, &zz, &q, &ctx).unwrap();
            let r = (series.clone() - rep).abs() / series.abs();
            if r > worst_phi {
                worst_phi = r;
            }
        }
        (worst_theta, worst_e, worst_phi)
    };
    let (t60, e60, p60) = run(60);
    let bound = Float::with_val(256, 10).pow(-50i32);
    assert!(t60 < bound, "theta functional equation at 60 digits: {t60}");
    assert!(e60 < bound, "e_{{q,c}} functional equations at 60 digits: {e60}");
    assert!(p60 < bound, "2phi1 vs Jackson representation at 60 digits: {p60}");
    let (t120, e120, p120) = run(120);
    let gain = Float::with_val(256, 10).pow(-10i32);
    assert!(t120 < t60.clone() * gain.clone(), "theta: no 10-order gain");
    assert!(e120 < e60.clone() * gain.clone(), "e: no 10-order gain");
    assert!(p120 < p60.clone() * gain, "phi: no 10-order gain");
    println!(
        "[criterion 06] q-special suite at 60 digits (worst theta {:.1e}, e {:.1e}, 2phi1 {:.1e}); doubling digits gains >= 10 orders: PASS",
        t60.to_f64(), e60.to_f64(), p60.to_f64()
    );
}

/// Criterion 7: orthogonal-polynomial suite at (1, 2, 3, 1/2, 1/5), 60
/// digits: two-route moments k <= 12 within 1e-50; orthonormality (up to the
/// signature of the indefinite form) within 1e-45 for i, j <= 6; big
/// q-Laguerre 3phi2-vs-recurrence within 1e-50 for n <= 10.
#[test]
fn criterion_07_orthogonal_polynomials() {
    let ctx = PrecisionCtx::new(60).unwrap();
    let pipe = Pipeline::new(&canonical_params(), 8, &ctx).unwrap();
    let p = pipe.prec;

    let tol_mom = tol_f(&ctx, 50);
    let mut worst_mom = Float::new(p);
    for k in 0..=12usize {
        let d = pipe.moments.discrepancy[k].clone();
        assert!(d < tol_mom, "moment two-route at k = {k}: {d}");
        if d > worst_mom {
            worst_mom = d;
        }
    }

    let tol_orth = tol_f(&ctx, 45);
    for i in 0..=6usize {
        for j in 0..=6usize {
            let v = pipe.linear_form_pp(i, j) * pipe.rho_abs(i) * pipe.rho_abs(j);
            if i == j {
                let sig = Float::with_val(p, pipe.signature(i));
                assert!(
                    (v - sig).abs() < tol_orth,
                    "orthonormality diagonal at {i} (signature {})",
                    pipe.signature(i)
                );
            } else {
                assert!(v.abs() < tol_orth, "orthogonality at ({i},{j})");
            }
        }
    }

    // big q-Laguerre: monic recurrence vs normalized 3phi2 at
    // (a, 1, b, sigma = 0) = (2, 1, 3), q = 1/4
    let lag_params =
        WeightParams::new([rat(2, 1), rat(1, 1), rat(3, 1)], rat(0, 1), rat(1, 4)).unwrap();
    let lag = Pipeline::new(&lag_params, 10, &ctx).unwrap();
    let tol_lag = tol_f(&ctx, 50);
    for n in 0..=10usize {
        let x = Float::with_val(lag.prec, 1) / 2u32;
        let direct = lag.monic_p(n, &x);
        let (via_phi, _) = big_q_laguerre(&rat(2, 1), &rat(3, 1), n, &x, &rat(1, 4), &lag.wctx).unwrap();
        assert!(
            (direct - via_phi).abs() < tol_lag,
            "big q-Laguerre two-route at n = {n}"
        );
    }
    println!(
        "[criterion 07] moments two-route k<=12 (worst {:.1e}); signature-orthonormality i,j<=6; big q-Laguerre n<=10: PASS",
        worst_mom.to_f64()
    );
}

/// Criterion 8: Lax/Freud suite, all residuals < 1e-45 for n <= 8, within
/// 60 seconds.
#[test]
fn criterion_08_lax_freud() {
    let start = Instant::now();
    let ctx = PrecisionCtx::new(60).unwrap();
    let pipe = Pipeline::new(&canonical_params(), 8, &ctx).unwrap();
    let p = pipe.prec;
    let tol = tol_f(&ctx, 45);
    let qs = qpv_core::ortho::pow_rat(&pipe.q, &pipe.params.sigma, p).unwrap();

    let mut worst = Float::new(p);
    for n in 1..=8usize {
        let (f1, f2) = pipe.freud_residuals(n).unwrap();
        assert!(f1 < tol, "Freud 1 at n = {n}: {f1}");
        assert!(f2 < tol, "Freud 2 at n = {n}: {f2}");
        worst = worst.max(&f1).max(&f2);

        // det L_n at 10 sample points
        let w = pipe.w_poly();
        let v = pipe.v_poly().unwrap();
        for i in 0..10 {
            let x = Float::with_val(p, 2 * i + 3) / 8u32; // 0.375 .. 2.625, avoids a2
            let l = pipe.l_matrix(n, &x).unwrap();
            let det = (&l[0][0] * &l[1][1]).complete(p) - (&l[0][1] * &l[1][0]).complete(p);
            let wv = w.eval(&x);
            let target = wv.clone() / (wv - 2u32 * (x.clone() * (1u32 - &pipe.q).complete(p)) * v.eval(&x));
            let r = (det - target).abs();
            assert!(r < tol, "det L_{n} at sample {i}: {r}");
            worst = worst.max(&r);
        }

        // tr A_{0,n} = 1 + q^-sigma
        let a0 = pipe.a_matrix(n, &Float::new(p)).unwrap();
        let tr = ((&a0[0][0] + &a0[1][1]).complete(p) - 1u32 - qs.clone().recip()).abs();
        assert!(tr < tol, "trace A_0 at n = {n}: {tr}");
        worst = worst.max(&tr);

        // det A_n identity
        for xv in [-1i32, 1, 4] {
            let x = Float::with_val(p, xv) * 7u32 / 10u32;
            let a = pipe.a_matrix(n, &x).unwrap();
            let det = (&a[0][0] * &a[1][1]).complete(p) - (&a[0][1] * &a[1][0]).complete(p);
            let num = (x.clone() - &pipe.a[0]) * (x.clone() - &pipe.a[1]) * (x.clone() - &pipe.a[2]);
            let target = -(num / (qs.clone() * (&pipe.a[0] * &pipe.a[1]).complete(p) * &pipe.a[2]));
            let r = (det - target).abs();
            assert!(r < tol, "det A_{n}: {r}");
            worst = worst.max(&r);
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "took {dt:?}, budget 60 s");
    println!(
        "[criterion 08] Freud residuals, det L_n, tr A_0n, det A_n for n<=8 (worst {:.1e}): PASS ({dt:?})",
        worst.to_f64()
    );
}

/// Criterion 9: Hankel special-solution residuals of Theorem 1 across the
/// (q a1, q a2) weight shift, < 1e-40 for n <= 6 at 60 digits; going to 120
/// digits shrinks them by >= 10 orders.
#[test]
fn criterion_09_special_solution_residuals() {
    let run = |digits: u32| -> Float {
        let ctx = PrecisionCtx::new(digits).unwrap();
        let params = canonical_params();
        let pipe = Pipeline::new(&params, 7, &ctx).unwrap();
        let pipe_t = Pipeline::new(&params.qpv_shifted().unwrap(), 7, &ctx).unwrap();
        let mut worst = Float::new(pipe.prec);
        for r in qpv_residuals(&pipe, &pipe_t, 6).unwrap() {
            worst = worst.max(&r.res_y).max(&r.res_z);
        }
        worst
    };
    let w60 = run(60);
    let bound = Float::with_val(256, 10).pow(-40i32);
    assert!(w60 < bound, "worst residual at 60 digits: {w60}");
    let w120 = run(120);
    let gain = Float::with_val(256, 10).pow(-10i32);
    assert!(
        w120 < w60.clone() * gain,
        "no 10-order gain: 60 digits {w60}, 120 digits {w120}"
    );
    println!(
        "[criterion 09] Theorem-1 residuals of the Hankel solutions n<=6 (worst {:.1e} at 60 digits, {:.1e} at 120): PASS",
        w60.to_f64(), w120.to_f64()
    );
}

/// Criterion 10: Table-1 bookkeeping. Connection-data deltas match Table 1
/// exactly; det R_n = a_n R/(a~_n S) (monic form det R_hat = s_{n-1} R/S)
/// within 1e-45 at 5 sample points; the q-P_V deformation's leading matrix
/// R_{1,n} is diagonal with the column-asymptotics normalization -q a2 (the
/// paper's literal "R_{1,n} = q a2 I" drops a cross term; see the lattice
/// report for the as-stated figures).
#[test]
fn criterion_10_table1_bookkeeping() {
    let ctx = PrecisionCtx::new(60).unwrap();
    let params = canonical_params();
    let pipe = Pipeline::new(&params, 7, &ctx).unwrap();
    let p = pipe.prec;
    let tol = tol_f(&ctx, 45);

    // deltas exactly as printed in Table 1
    assert_eq!(DefId::Sigma.table_delta(), [0, 0, 0, 0, -1, -1, 0]);
    assert_eq!(DefId::A1.table_delta(), [1, 0, 0, 0, -1, 0, 0]);
    assert_eq!(DefId::A3.table_delta(), [0, 0, 1, 0, -1, 0, 0]);
    assert_eq!(DefId::A2.table_delta(), [0, 1, 0, -1, 0, 0, 0]);
    assert_eq!(DefId::N.table_delta(), [0, 0, 0, 1, -1, 0, 0]);

    for def in [DefId::Sigma, DefId::A1, DefId::A3, DefId::A2] {
        let wd = weight_deformation(def, &params, p).unwrap();
        let pipe_t = Pipeline::new(&wd.new_params, 7, &ctx).unwrap();
        let r = wd.r_poly.clone().unwrap();
        let s = wd.s_poly.clone().unwrap();
        for n in [3usize, 5] {
            let td = transfer_data(&pipe, &pipe_t, &r, &s, n).unwrap();
            for i in 0..5 {
                let x = Float::with_val(p, 2 * i as i32 + 1) / 2u32 - 1u32; // -0.5..3.5
                if td.s.eval(&x).clone().abs() < Float::with_val(p, 1e-3) {
                    continue;
                }
                let dr = td.det_residual(&r, &x).unwrap();
                assert!(dr < tol, "{def:?} det R_hat at n = {n}: {dr}");
                let tr = td.transfer_residual(&pipe, &pipe_t, n, &x).unwrap();
                assert!(tr < tol, "{def:?} transfer at n = {n}: {tr}");
            }
        }
    }

    // q-P_V composite deformation
    let (new_params, r, s) = qpv_deformation(&params, p).unwrap();
    let pipe_t = Pipeline::new(&new_params, 7, &ctx).unwrap();
    for n in [3usize, 5] {
        let td = transfer_data(&pipe, &pipe_t, &r, &s, n).unwrap();
        for i in 0..5 {
            let x = Float::with_val(p, 2 * i as i32 + 1) / 2u32 - 1u32;
            let dr = td.det_residual(&r, &x).unwrap();
            assert!(dr < tol, "qpv det R_hat at n = {n}: {dr}");
        }
        // R_{1,n}: diagonal, (1,1) entry -q a2, and the column-asymptotics
        // identity (R1)_22 - q N21 = -q a2
        let r1 = td.y_frame_leading(&pipe.q);
        assert!(r1[0][1].clone().abs() < tol && r1[1][0].clone().abs() < tol);
        let m_qa2 = -((&pipe.q * &pipe.a[1]).complete(p));
        assert!((r1[0][0].clone() - &m_qa2).abs() < tol);
        let combo = r1[1][1].clone() - pipe.q.clone() * td.n21_const();
        assert!((combo - &m_qa2).abs() < tol);
    }
    println!("[criterion 10] Table-1 deltas exact; det R_hat = s_(n-1) R/S; q-P_V leading matrix structure: PASS");
}

/// Bonus structural check used by criteria 1-5's machinery: a long mixed
/// word keeps exact compatibility through every intermediate state.
#[test]
fn mixed_word_exact_compatibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let word = parse_word("T2 Ta3l1 QPV^-1 Tk2l1 r1 Ta2l2^-1 QPV").unwrap();
    let step = sample::sample_until(&mut rng, |m, s| compose_word(&word, m, s).ok());
    let a = build_a(&step.before.0, &step.before.1).unwrap();
    let at = build_a(&step.after.0, &step.after.1).unwrap();
    let rep = verify_compat(&a, &at, &step.r, &step.before.0.q).unwrap();
    assert!(rep.ok);
    // and R is invertible, as every deformation matrix must be
    assert!(!step.r.det().is_zero());
    let _ = build_r_qpv; // re-exported surface exercised elsewhere
    println!("[extra] mixed 7-letter word keeps exact compatibility: PASS");
}
