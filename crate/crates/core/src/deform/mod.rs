//! The lattice of connection-preserving deformations: the q-P_V step,
//! generator translations with explicit R matrices, symmetries, derived
//! translations by conjugation, word composition and the exact
//! compatibility verifier.
//!
//! Every step satisfies Atilde(x) R(x) = R(qx) A(x) as an identity of
//! canonical rational-function matrices; `verify_compat` checks this with
//! zero tolerance.

mod generators;

use serde::Serialize;

use crate::exact::{format_rat, BigRat, Mat2, Poly, RatFunc};
use crate::linprob::{build_a, derive_aux, ConnectionData, SurfaceState};
use crate::{Error, Result};

pub use generators::{
    build_r_qpv, gen_data_backward, gen_data_forward, gen_map_backward, gen_map_forward,
    qpv_map, qpv_map_inverse, Gen,
};

/// Tags of the deformation lattice exposed to words and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TagKind {
    Qpv,
    Tk1l1,
    Tk2l2,
    Ta1l1,
    Ta2l1,
    Ta3l1,
    Ta2l2,
    Ta3l2,
    Tk1l2,
    Tk2l1,
    T0,
    T1,
    T2,
    T3,
    T4,
    R0,
    R1,
    R2,
}

impl TagKind {
    pub fn name(&self) -> &'static str {
        match self {
            TagKind::Qpv => "QPV",
            TagKind::Tk1l1 => "Tk1l1",
            TagKind::Tk2l2 => "Tk2l2",
            TagKind::Ta1l1 => "Ta1l1",
            TagKind::Ta2l1 => "Ta2l1",
            TagKind::Ta3l1 => "Ta3l1",
            TagKind::Ta2l2 => "Ta2l2",
            TagKind::Ta3l2 => "Ta3l2",
            TagKind::Tk1l2 => "Tk1l2",
            TagKind::Tk2l1 => "Tk2l1",
            TagKind::T0 => "T0",
            TagKind::T1 => "T1",
            TagKind::T2 => "T2",
            TagKind::T3 => "T3",
            TagKind::T4 => "T4",
            TagKind::R0 => "r0",
            TagKind::R1 => "r1",
            TagKind::R2 => "r2",
        }
    }

    pub fn all_translations() -> &'static [TagKind] {
        &[
            TagKind::Qpv,
            TagKind::Tk1l1,
            TagKind::Tk2l2,
            TagKind::Ta1l1,
            TagKind::Ta2l1,
            TagKind::Ta3l1,
            TagKind::Ta2l2,
            TagKind::Ta3l2,
            TagKind::Tk1l2,
            TagKind::Tk2l1,
            TagKind::T0,
            TagKind::T1,
            TagKind::T2,
            TagKind::T3,
            TagKind::T4,
        ]
    }
}

/// One word letter: a tag with exponent +1 or -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub kind: TagKind,
    pub exp: i8,
}

impl Step {
    pub fn new(kind: TagKind, exp: i8) -> Step {
        Step { kind, exp }
    }
}

impl std::fmt::Display for Step {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.exp == 1 {
            write!(f, "{}", self.kind.name())
        } else {
            write!(f, "{}^{}", self.kind.name(), self.exp)
        }
    }
}

/// Parse a word like "T0 T3^-1 Tk1l1". Composition order: the rightmost
/// letter acts first, matching the usual reading of `f . g`.
pub fn parse_word(text: &str) -> Result<Vec<Step>> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        let (name, exp) = match token.split_once('^') {
            None => (token, 1i32),
            Some((n, e)) => (
                n,
                e.parse::<i32>()
                    .map_err(|_| Error::Parse(format!("bad exponent in {token:?}")))?,
            ),
        };
        let kind = match name {
            "QPV" | "qpv" => TagKind::Qpv,
            "Tk1l1" => TagKind::Tk1l1,
            "Tk2l2" => TagKind::Tk2l2,
            "Ta1l1" => TagKind::Ta1l1,
            "Ta2l1" => TagKind::Ta2l1,
            "Ta3l1" => TagKind::Ta3l1,
            "Ta2l2" => TagKind::Ta2l2,
            "Ta3l2" => TagKind::Ta3l2,
            "Tk1l2" => TagKind::Tk1l2,
            "Tk2l1" => TagKind::Tk2l1,
            "T0" => TagKind::T0,
            "T1" => TagKind::T1,
            "T2" => TagKind::T2,
            "T3" => TagKind::T3,
            "T4" => TagKind::T4,
            "r0" | "R0" => TagKind::R0,
            "r1" | "R1" => TagKind::R1,
            "r2" | "R2" => TagKind::R2,
            _ => return Err(Error::Parse(format!("unknown tag {name:?}"))),
        };
        if exp == 0 {
            return Err(Error::Parse(format!("zero exponent in {token:?}")));
        }
        let sign = if exp > 0 { 1i8 } else { -1i8 };
        for _ in 0..exp.unsigned_abs() {
            out.push(Step::new(kind, sign));
        }
    }
    Ok(out)
}

/// Elementary executable moves: a symmetry, a generator step, or the
/// q-P_V step, each with direction.
#[derive(Clone, Copy, Debug)]
enum Elem {
    Sym(u8),
    Gen(Gen, i8),
    Qpv(i8),
}

/// Expand a tag into elementary moves in EXECUTION order (first applied
/// first). Derived translations expand via the symmetry conjugations; the
/// lattice basis T0..T4 expands into generator words found by matching
/// exponent vectors (bounded exponents <= 2).
fn expand(step: Step) -> Vec<Elem> {
    let e = step.exp;
    // syms lists the conjugating word left-to-right in composition order
    // (e.g. [2, 1, 0] for r2 r1 r0 T r0 r1 r2); execution applies the
    // rightmost letter first, so the prefix runs in the given order and the
    // suffix reversed.
    let conj = |syms: &[u8], g: Gen| -> Vec<Elem> {
        let mut v: Vec<Elem> = syms.iter().map(|s| Elem::Sym(*s)).collect();
        v.push(Elem::Gen(g, e));
        v.extend(syms.iter().rev().map(|s| Elem::Sym(*s)));
        v
    };
    match step.kind {
        TagKind::Qpv => vec![Elem::Qpv(e)],
        TagKind::Tk1l1 => vec![Elem::Gen(Gen::K1L1, e)],
        TagKind::Tk2l2 => vec![Elem::Gen(Gen::K2L2, e)],
        TagKind::Ta1l1 => vec![Elem::Gen(Gen::A1L1, e)],
        // conjugation table: T_{a2,l1} = r0 T_{a1,l1} r0 and friends
        TagKind::Ta2l1 => conj(&[0], Gen::A1L1),
        TagKind::Ta3l1 => conj(&[1, 0], Gen::A1L1),
        TagKind::Ta2l2 => conj(&[2, 0], Gen::A1L1),
        TagKind::Ta3l2 => conj(&[2, 1, 0], Gen::A1L1),
        TagKind::Tk1l2 => conj(&[2], Gen::K1L1),
        TagKind::Tk2l1 => conj(&[2], Gen::K2L2),
        TagKind::R0 => vec![Elem::Sym(0)],
        TagKind::R1 => vec![Elem::Sym(1)],
        TagKind::R2 => vec![Elem::Sym(2)],
        TagKind::T0 | TagKind::T1 | TagKind::T2 | TagKind::T3 | TagKind::T4 => {
            // words in the derived tags, composition order
            let word: &[Step] = match step.kind {
                TagKind::T0 => &[Step::new(TagKind::Ta2l1, 1), Step::new(TagKind::Ta3l2, 1)],
                TagKind::T1 => &[
                    Step::new(TagKind::Tk2l2, 1),
                    Step::new(TagKind::Tk2l2, 1),
                    Step::new(TagKind::Ta3l2, -1),
                    Step::new(TagKind::Ta2l2, -1),
                    Step::new(TagKind::Ta2l2, -1),
                    Step::new(TagKind::Ta1l1, -1),
                ],
                TagKind::T2 => &[Step::new(TagKind::Tk2l2, -1)],
                TagKind::T3 => &[Step::new(TagKind::Tk1l2, 1)],
                TagKind::T4 => &[Step::new(TagKind::Ta1l1, 1), Step::new(TagKind::Ta2l2, 1)],
                _ => unreachable!(),
            };
            let mut elems = Vec::new();
            if e == 1 {
                for s in word.iter().rev() {
                    elems.extend(expand(*s));
                }
            } else {
                for s in word.iter() {
                    elems.extend(expand(Step::new(s.kind, -s.exp)));
                }
            }
            elems
        }
    }
}

/// Apply one of the symmetries r0, r1, r2 of A(x). All three leave A(x)
/// literally invariant, so R = I.
pub fn symmetry(
    which: u8,
    m: &ConnectionData,
    s: &SurfaceState,
) -> Result<(ConnectionData, SurfaceState)> {
    let mut a = m.a.clone();
    let mut lambda = m.lambda.clone();
    let mut st = s.clone();
    match which {
        0 => a.swap(0, 1),
        1 => {
            if s.y == m.a[1] {
                return Err(Error::Degenerate("r1 requires y != a2".into()));
            }
            a.swap(1, 2);
            // z -> z (y - a3)/(y - a2), written in the source labels
            let num = BigRat::from(&s.y - &m.a[2]);
            let den = BigRat::from(&s.y - &m.a[1]);
            st.z = st.z * num / den;
        }
        2 => lambda.swap(0, 1),
        _ => return Err(Error::Domain(format!("no symmetry r{which}"))),
    }
    let mt = ConnectionData::new(a, m.kappa.clone(), lambda, m.q.clone())?;
    st.validate(&mt)?;
    Ok((mt, st))
}

/// Solve the tilde gauge for a generator step from the (1,2) entry of the
/// compatibility identity, which is linear in wt: E12(wt) = P + wt Q.
fn solve_wtilde(
    g: Gen,
    m: &ConnectionData,
    s: &SurfaceState,
    mt: &ConnectionData,
    yt: &BigRat,
    zt: &BigRat,
) -> Result<BigRat> {
    let aux = derive_aux(m, s)?;
    let st_probe = SurfaceState::new(yt.clone(), zt.clone(), BigRat::from(1));
    let auxt = derive_aux(mt, &st_probe)?;
    let parts = generators::r_parts(g, m, s, &aux, mt, yt, &auxt)?;
    let a = crate::linprob::build_a_with_aux(m, s, &aux);
    let q = &m.q;

    // atilde entries that E12 needs: at11 (w-free) and at12 = wt * g12
    let at11 = RatFunc::from_poly(
        Poly::affine(BigRat::from(&auxt.z1 - yt), BigRat::from(1)).scale(&mt.kappa[0]),
    );
    let g12 = RatFunc::from_poly(
        Poly::affine(-yt.clone(), BigRat::from(1)).scale(&mt.kappa[1]),
    );

    let r11_q = parts.r11.q_shift(q)?;
    let r12c_q = parts.r12_c.q_shift(q)?;
    let r12l_q = parts.r12_l.q_shift(q)?;
    let a12 = &a.e[0][1];
    let a22 = &a.e[1][1];

    let p = &(&at11 * &parts.r12_c) - &(&(&r11_q * a12) + &(&r12c_q * a22));
    let qq = &(&(&at11 * &parts.r12_l) + &(&g12 * &parts.r22)) - &(&r12l_q * a22);

    if qq.is_zero() {
        return Err(Error::step(g.tag(), "gauge equation degenerate (Q = 0)"));
    }
    // clear denominators: numerator U + wt V
    let u = p.num() * qq.den();
    let v = qq.num() * p.den();
    let top = u.degree().unwrap_or(0).max(v.degree().unwrap_or(0));
    let mut wt: Option<BigRat> = None;
    for i in (0..=top).rev() {
        let vc = v.coeff(i);
        if vc.cmp0() != std::cmp::Ordering::Equal {
            wt = Some(-BigRat::from(u.coeff(i) / vc));
            break;
        }
    }
    let wt = wt.ok_or_else(|| Error::step(g.tag(), "gauge equation has no wt coefficient"))?;
    if wt.cmp0() == std::cmp::Ordering::Equal {
        return Err(Error::step(g.tag(), "solved gauge wt = 0"));
    }
    // the remaining coefficients must agree; E12 must vanish identically
    let residual = &p + &qq.scale_rat(&wt);
    if !residual.is_zero() {
        return Err(Error::step(
            g.tag(),
            "gauge equation inconsistent; map formulas do not satisfy compatibility",
        ));
    }
    Ok(wt)
}

/// Apply one elementary move, returning the image and its R matrix.
fn apply_elem(
    e: Elem,
    m: &ConnectionData,
    s: &SurfaceState,
    with_r: bool,
) -> Result<(ConnectionData, SurfaceState, Mat2)> {
    match e {
        Elem::Sym(k) => {
            let (mt, st) = symmetry(k, m, s)?;
            Ok((mt, st, Mat2::identity()))
        }
        Elem::Qpv(1) => {
            let (mt, st) = qpv_map(m, s)?;
            let r = if with_r {
                build_r_qpv(m, s, &mt, &st)?
            } else {
                Mat2::identity()
            };
            Ok((mt, st, r))
        }
        Elem::Qpv(_) => {
            let (mv, sv) = qpv_map_inverse(m, s)?;
            let r = if with_r {
                build_r_qpv(&mv, &sv, m, s)?
                    .inv()
                    .map_err(|_| Error::step("QPV^-1", "forward R is singular"))?
            } else {
                Mat2::identity()
            };
            Ok((mv, sv, r))
        }
        Elem::Gen(g, 1) => {
            let mt = gen_data_forward(g, m)?;
            let (yt, zt) =
                gen_map_forward(g, m, s).map_err(|err| Error::step(g.tag(), err.to_string()))?;
            let wt = solve_wtilde(g, m, s, &mt, &yt, &zt)?;
            let st = SurfaceState::new(yt.clone(), zt.clone(), wt.clone());
            st.validate(&mt)
                .map_err(|err| Error::step(g.tag(), format!("image degenerate: {err}")))?;
            let r = if with_r {
                let aux = derive_aux(m, s)?;
                let auxt = derive_aux(&mt, &st)?;
                generators::build_r_gen(g, m, s, &aux, &mt, &yt, &auxt, &wt)?
            } else {
                Mat2::identity()
            };
            Ok((mt, st, r))
        }
        Elem::Gen(g, _) => {
            // inverse: data action inverted, (y,z) via the printed inverse map,
            // w via linearity of the forward gauge.
            let mv = gen_data_backward(g, m)?;
            let (yv, zv) = gen_map_backward(g, &mv, &s.y, &s.z)
                .map_err(|err| Error::step(g.tag(), format!("inverse map: {err}")))?;
            let sv_unit = SurfaceState::new(yv.clone(), zv.clone(), BigRat::from(1));
            sv_unit
                .validate(&mv)
                .map_err(|err| Error::step(g.tag(), format!("preimage degenerate: {err}")))?;
            let rho = solve_wtilde(g, &mv, &sv_unit, m, &s.y, &s.z)?;
            let wv = BigRat::from(&s.w / &rho);
            let sv = SurfaceState::new(yv.clone(), zv.clone(), wv);
            let r = if with_r {
                let aux = derive_aux(&mv, &sv)?;
                let auxt = derive_aux(m, s)?;
                generators::build_r_gen(g, &mv, &sv, &aux, m, &s.y, &auxt, &s.w)?
                    .inv()
                    .map_err(|_| Error::step(g.tag(), "forward R is singular"))?
            } else {
                Mat2::identity()
            };
            Ok((mv, sv, r))
        }
    }
}

/// Result of an exact compatibility check.
#[derive(Debug, Clone)]
pub struct CompatReport {
    pub ok: bool,
    /// (row, col, residual) for every nonzero entry of Atilde R - R(qx) A.
    pub nonzero: Vec<(usize, usize, String)>,
}

/// Exact check of Atilde(x) R(x) = R(qx) A(x); false is a value, not an error.
pub fn verify_compat(a: &Mat2, atilde: &Mat2, r: &Mat2, q: &BigRat) -> Result<CompatReport> {
    let rq = r.q_shift(q)?;
    let diff = (&(atilde * r)).sub(&(&rq * a));
    let mut nonzero = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            if !diff.e[i][j].is_zero() {
                nonzero.push((i, j, format!("{:?}", diff.e[i][j])));
            }
        }
    }
    Ok(CompatReport { ok: nonzero.is_empty(), nonzero })
}

/// A verified deformation step: states on both sides plus the R matrix.
#[derive(Clone, Debug)]
pub struct DeformStep {
    pub word: Vec<Step>,
    pub before: (ConnectionData, SurfaceState),
    pub after: (ConnectionData, SurfaceState),
    pub r: Mat2,
}

impl DeformStep {
    /// The compatibility report for this step (always ok by construction).
    pub fn verify(&self) -> Result<CompatReport> {
        let a = build_a(&self.before.0, &self.before.1)?;
        let at = build_a(&self.after.0, &self.after.1)?;
        verify_compat(&a, &at, &self.r, &self.before.0.q)
    }
}

/// Apply a single tag (with exponent) as a verified step.
pub fn translate(step: Step, m: &ConnectionData, s: &SurfaceState) -> Result<DeformStep> {
    compose_word(&[step], m, s)
}

/// Apply a word (rightmost letter first). The accumulated R matrix is the
/// product of the per-step matrices, each evaluated at its own intermediate
/// state; compatibility of every elementary step and of the final product
/// is verified exactly. A failing step aborts with the successful prefix
/// length in the error.
pub fn compose_word(word: &[Step], m: &ConnectionData, s: &SurfaceState) -> Result<DeformStep> {
    let mut cur_m = m.clone();
    let mut cur_s = s.clone();
    let mut r_acc = Mat2::identity();
    let mut done = 0usize;
    for step in word.iter().rev() {
        for elem in expand(*step) {
            let (mt, st, r) = apply_elem(elem, &cur_m, &cur_s, true).map_err(|e| {
                Error::step(
                    format!("{step}"),
                    format!("after {done} completed letters: {e}"),
                )
            })?;
            let a = build_a(&cur_m, &cur_s)?;
            let at = build_a(&mt, &st)?;
            let rep = verify_compat(&a, &at, &r, &cur_m.q)?;
            if !rep.ok {
                return Err(Error::step(
                    format!("{step}"),
                    format!("elementary compatibility failed at letter {done}"),
                ));
            }
            r_acc = &r * &r_acc;
            cur_m = mt;
            cur_s = st;
        }
        done += 1;
    }
    let out = DeformStep {
        word: word.to_vec(),
        before: (m.clone(), s.clone()),
        after: (cur_m, cur_s),
        r: r_acc,
    };
    let rep = out.verify()?;
    if !rep.ok {
        return Err(Error::step("word", "accumulated compatibility failed"));
    }
    Ok(out)
}

/// Map-level application of a word: no R matrices, no verification.
pub fn apply_word_map(
    word: &[Step],
    m: &ConnectionData,
    s: &SurfaceState,
) -> Result<(ConnectionData, SurfaceState)> {
    let mut cur_m = m.clone();
    let mut cur_s = s.clone();
    for step in word.iter().rev() {
        for elem in expand(*step) {
            let (mt, st, _) = apply_elem(elem, &cur_m, &cur_s, false)?;
            cur_m = mt;
            cur_s = st;
        }
    }
    Ok((cur_m, cur_s))
}

/// The q-P_V step on (M, s), exposed at map level.
pub fn qpv_step(m: &ConnectionData, s: &SurfaceState) -> Result<(ConnectionData, SurfaceState)> {
    qpv_map(m, s)
}

/// Serialized form of a step trace: matrices as entry-wise num/den
/// coefficient lists of "p/q" strings.
#[derive(Serialize)]
pub struct RatFuncJson {
    pub num: Vec<String>,
    pub den: Vec<String>,
}

#[derive(Serialize)]
pub struct DeformStepJson {
    pub word: String,
    pub before: crate::linprob::ProblemJson,
    pub after: crate::linprob::ProblemJson,
    pub r: [[RatFuncJson; 2]; 2],
}

pub fn step_to_json(step: &DeformStep) -> DeformStepJson {
    let conv = |f: &RatFunc| RatFuncJson {
        num: f.num().coeffs().iter().map(format_rat).collect(),
        den: f.den().coeffs().iter().map(format_rat).collect(),
    };
    let word = step
        .word
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    DeformStepJson {
        word,
        before: crate::linprob::problem_to_json(&step.before.0, &step.before.1),
        after: crate::linprob::problem_to_json(&step.after.0, &step.after.1),
        r: [
            [conv(&step.r.e[0][0]), conv(&step.r.e[0][1])],
            [conv(&step.r.e[1][0]), conv(&step.r.e[1][1])],
        ],
    }
}

/// Exponent vector of a tag's declared connection-data action, over
/// (a1, a2, a3, kappa1, kappa2, lambda1, lambda2). Used by the lattice
/// bookkeeping checks and the weight-deformation correspondence.
pub fn data_exponents(step: Step) -> [i32; 7] {
    let base: [i32; 7] = match step.kind {
        TagKind::Qpv => [1, 1, 0, -1, -1, 0, 0],
        TagKind::Tk1l1 => [0, 0, 0, 1, 0, 1, 0],
        TagKind::Tk2l2 => [0, 0, 0, 0, 1, 0, 1],
        TagKind::Ta1l1 => [1, 0, 0, 0, 0, 1, 0],
        TagKind::Ta2l1 => [0, 1, 0, 0, 0, 1, 0],
        TagKind::Ta3l1 => [0, 0, 1, 0, 0, 1, 0],
        TagKind::Ta2l2 => [0, 1, 0, 0, 0, 0, 1],
        TagKind::Ta3l2 => [0, 0, 1, 0, 0, 0, 1],
        TagKind::Tk1l2 => [0, 0, 0, 1, 0, 0, 1],
        TagKind::Tk2l1 => [0, 0, 0, 0, 1, 1, 0],
        TagKind::T0 => [0, 1, 1, 0, 0, 1, 1],
        TagKind::T1 => [-1, -2, -1, 0, 2, -1, -1],
        TagKind::T2 => [0, 0, 0, 0, -1, 0, -1],
        TagKind::T3 => [0, 0, 0, 1, 0, 0, 1],
        TagKind::T4 => [1, 1, 0, 0, 0, 1, 1],
        TagKind::R0 | TagKind::R1 | TagKind::R2 => [0; 7],
    };
    if step.exp == 1 {
        base
    } else {
        base.map(|v| -v)
    }
}
