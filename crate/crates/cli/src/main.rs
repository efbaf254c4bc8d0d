//! qpv: verification suites, orbit iteration, special solutions and
//! q-special-function evaluation for the q-P_V linear-problem toolkit.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/parse error.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::ops::{CompleteRound, Pow};
use rug::Float;

use qpv_core::deform::{
    apply_word_map, compose_word, parse_word, verify_compat, Step, TagKind,
};
use qpv_core::exact::{format_rat, parse_rat, BigRat, RatFunc};
use qpv_core::linprob::{build_a, problem_from_json, ConnectionData, ProblemJson, SurfaceState};
use qpv_core::ortho::{
    self, big_q_laguerre, correspondence_check, qpv_deformation, qpv_residuals, transfer_data,
    weight_deformation, DefId, Pipeline, WeightParams,
};
use qpv_core::qfun::{self, PochOrder, PrecisionCtx};
use qpv_core::sample;

#[derive(Parser)]
#[command(
    name = "qpv",
    about = "Exact and arbitrary-precision toolkit for the associated linear problem of q-P_V",
    long_about = "Verification suites for connection-preserving deformations, orbit iteration, \
                  big q-Laguerre special solutions and q-special-function evaluation.\n\
                  Words compose right-to-left: in \"Ta1l1 Tk1l1^-1\" the rightmost letter acts first."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Decimal working precision (defaults to QPV_DIGITS or 60)
    #[arg(long, global = true)]
    digits: Option<u32>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<String>,
    /// Output format
    #[arg(long, global = true, default_value = "text", value_parser = ["json", "csv", "text"])]
    format: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Randomized exact compatibility checks for every translation tag
    Compat {
        /// Number of random trials per tag
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        /// RNG seed (deterministic)
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Inject a fault: flip one R entry and expect failure
        #[arg(long)]
        corrupt: bool,
    },
    /// Iterate the q-P_V step (or a word) from an initial state
    Orbit {
        /// JSON file with {"q", "a", "kappa", "lambda", "y", "z", "w"}
        #[arg(long)]
        params: Option<String>,
        /// Number of steps
        #[arg(long, default_value_t = 5)]
        n_max: u32,
        /// Word to iterate instead of the default q-P_V step
        #[arg(long)]
        word: Option<String>,
        /// Emit a JSON array of verified deformation steps (with R matrices)
        /// instead of the state table
        #[arg(long)]
        trace: bool,
    },
    /// Hankel special solutions with Freud and q-P_V residual columns
    Special {
        /// JSON file with {"q", "a", "sigma"} weight parameters
        #[arg(long)]
        params: Option<String>,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
    },
    /// Lax / Freud identity suite for the big q-Laguerre pipeline
    Freud {
        #[arg(long)]
        params: Option<String>,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
    },
    /// Lattice verification: trivial element, factorization, b-table report
    Lattice {
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Evaluate q-special functions
    Eval {
        #[command(subcommand)]
        what: EvalCmd,
    },
}

#[derive(Subcommand)]
enum EvalCmd {
    /// q-Pochhammer (a; q)_k, k a nonnegative integer or "inf"
    Qpoch {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value = "inf")]
        k: String,
    },
    /// Jacobi theta function theta_q(x) = (-qx, -1/x, q; q)_inf
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// q-character e_{q,c}(x)
    Qchar {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Generalized basic hypergeometric r_phi_s(upper; lower; q; z)
    Phi {
        /// Comma-separated upper parameters
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        upper: String,
        /// Comma-separated lower parameters
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        lower: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Jackson integral of t^k over [a, b]
    JacksonMonomial {
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Monic big q-Laguerre polynomial value
    BigQLaguerre {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                qpv_core::Error::Parse(_) | qpv_core::Error::Domain(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn digits_of(c: &CommonOpts) -> u32 {
    c.digits
        .or_else(|| std::env::var("QPV_DIGITS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(60)
}

fn emit(common: &CommonOpts, text: &str) -> qpv_core::Result<()> {
    match &common.out {
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
        Some(path) => fs::write(path, text)
            .map_err(|e| qpv_core::Error::Parse(format!("cannot write {path}: {e}"))),
    }
}

/// Significant-figure formatting for arbitrary-precision floats.
fn fmt_sig(f: &Float, digits: u32) -> String {
    if f.is_zero() {
        return "0".into();
    }
    format!("{:.*e}", digits.saturating_sub(1) as usize, f)
}

fn load_problem(path: &Option<String>) -> qpv_core::Result<(ConnectionData, SurfaceState)> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| qpv_core::Error::Parse(format!("cannot read {p}: {e}")))?;
            let j: ProblemJson = serde_json::from_str(&text)
                .map_err(|e| qpv_core::Error::Parse(format!("bad JSON in {p}: {e}")))?;
            problem_from_json(&j)
        }
        None => {
            let m = ConnectionData::with_lambda2_solved(
                [BigRat::from((1, 2)), BigRat::from(2), BigRat::from(3)],
                [BigRat::from((1, 3)), BigRat::from(2)],
                BigRat::from(1),
                BigRat::from((2, 5)),
            )?;
            let s = SurfaceState::new(BigRat::from((5, 7)), BigRat::from((1, 2)), BigRat::from(3));
            Ok((m, s))
        }
    }
}

fn load_weight(path: &Option<String>) -> qpv_core::Result<WeightParams> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| qpv_core::Error::Parse(format!("cannot read {p}: {e}")))?;
            let j: ProblemJson = serde_json::from_str(&text)
                .map_err(|e| qpv_core::Error::Parse(format!("bad JSON in {p}: {e}")))?;
            let sigma = j
                .sigma
                .as_deref()
                .ok_or_else(|| qpv_core::Error::Parse("missing field sigma".into()))
                .and_then(parse_rat)?;
            WeightParams::new(
                [parse_rat(&j.a[0])?, parse_rat(&j.a[1])?, parse_rat(&j.a[2])?],
                sigma,
                parse_rat(&j.q)?,
            )
        }
        None => WeightParams::new(
            [BigRat::from(1), BigRat::from(2), BigRat::from(3)],
            BigRat::from((1, 2)),
            BigRat::from((1, 5)),
        ),
    }
}

fn run(cli: Cli) -> qpv_core::Result<ExitCode> {
    let common = cli.common;
    match cli.cmd {
        Cmd::Compat { trials, seed, corrupt } => cmd_compat(common, trials, seed, corrupt),
        Cmd::Orbit { params, n_max, word, trace } => cmd_orbit(common, params, n_max, word, trace),
        Cmd::Special { params, n_max } => cmd_special(common, params, n_max),
        Cmd::Freud { params, n_max } => cmd_freud(common, params, n_max),
        Cmd::Lattice { trials, seed } => cmd_lattice(common, trials, seed),
        Cmd::Eval { what } => cmd_eval(common, what),
    }
}

fn cmd_compat(common: CommonOpts, trials: u32, seed: u64, corrupt: bool) -> qpv_core::Result<ExitCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::new();
    let mut all_ok = true;
    for kind in TagKind::all_translations() {
        let mut pass = 0u32;
        for _ in 0..trials {
            let step = sample::sample_until(&mut rng, |m, s| {
                compose_word(&[Step::new(*kind, 1)], m, s).ok()
            });
            let mut r = step.r.clone();
            if corrupt {
                r.e[0][1] = &r.e[0][1] + &RatFunc::one();
            }
            let a = build_a(&step.before.0, &step.before.1)?;
            let at = build_a(&step.after.0, &step.after.1)?;
            let rep = verify_compat(&a, &at, &r, &step.before.0.q)?;
            if rep.ok {
                pass += 1;
            }
        }
        if pass != trials {
            all_ok = false;
        }
        lines.push((kind.name().to_string(), pass, trials));
    }
    let text = match common.format.as_str() {
        "json" => {
            let rows: Vec<serde_json::Value> = lines
                .iter()
                .map(|(tag, pass, total)| {
                    serde_json::json!({"tag": tag, "pass": pass, "trials": total})
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows).unwrap())
        }
        "csv" => {
            let mut t = String::from("tag,pass,trials\n");
            for (tag, pass, total) in &lines {
                t.push_str(&format!("{tag},{pass},{total}\n"));
            }
            t
        }
        _ => {
            let mut t = String::new();
            for (tag, pass, total) in &lines {
                t.push_str(&format!("{tag:<7} {pass}/{total} exact compatibility checks passed\n"));
            }
            t.push_str(if all_ok { "all tags PASS\n" } else { "FAIL\n" });
            t
        }
    };
    emit(&common, &text)?;
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_orbit(
    common: CommonOpts,
    params: Option<String>,
    n_max: u32,
    word: Option<String>,
    trace: bool,
) -> qpv_core::Result<ExitCode> {
    let (mut m, mut s) = load_problem(&params)?;
    let word_steps = match &word {
        Some(w) => parse_word(w)?,
        None => vec![Step::new(TagKind::Qpv, 1)],
    };
    if trace {
        let mut steps = Vec::new();
        let mut failed_at: Option<(u32, String)> = None;
        for n in 1..=n_max {
            match compose_word(&word_steps, &m, &s) {
                Ok(step) => {
                    (m, s) = step.after.clone();
                    steps.push(qpv_core::deform::step_to_json(&step));
                }
                Err(e) => {
                    failed_at = Some((n, e.to_string()));
                    break;
                }
            }
        }
        emit(&common, &format!("{}\n", serde_json::to_string_pretty(&steps).unwrap()))?;
        return match failed_at {
            Some((n, e)) => {
                eprintln!("orbit degenerated at step {n}: {e}");
                Ok(ExitCode::from(1))
            }
            None => Ok(ExitCode::SUCCESS),
        };
    }
    let mut rows: Vec<[String; 8]> = Vec::new();
    let push_row = |rows: &mut Vec<[String; 8]>, n: u32, m: &ConnectionData, s: &SurfaceState| {
        rows.push([
            n.to_string(),
            format_rat(&s.y),
            format_rat(&s.z),
            format_rat(&s.w),
            format_rat(&m.a[0]),
            format_rat(&m.a[1]),
            format_rat(&m.kappa[0]),
            format_rat(&m.kappa[1]),
        ]);
    };
    push_row(&mut rows, 0, &m, &s);
    let mut failed_at: Option<(u32, String)> = None;
    for n in 1..=n_max {
        match apply_word_map(&word_steps, &m, &s) {
            Ok((mt, st)) => {
                m = mt;
                s = st;
                push_row(&mut rows, n, &m, &s);
            }
            Err(e) => {
                failed_at = Some((n, e.to_string()));
                break;
            }
        }
    }
    let header = ["n", "y", "z", "w", "a1", "a2", "kappa1", "kappa2"];
    let text = match common.format.as_str() {
        "json" => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let mut o = serde_json::Map::new();
                    for (h, v) in header.iter().zip(r.iter()) {
                        o.insert(h.to_string(), serde_json::Value::String(v.clone()));
                    }
                    serde_json::Value::Object(o)
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&items).unwrap())
        }
        _ => {
            let mut t = header.join(",");
            t.push('\n');
            for r in &rows {
                t.push_str(&r.join(","));
                t.push('\n');
            }
            t
        }
    };
    emit(&common, &text)?;
    match failed_at {
        Some((n, e)) => {
            eprintln!("orbit degenerated at step {n}: {e}");
            Ok(ExitCode::from(1))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

fn cmd_special(common: CommonOpts, params: Option<String>, n_max: u32) -> qpv_core::Result<ExitCode> {
    let digits = digits_of(&common);
    let ctx = PrecisionCtx::new(digits)?;
    let wp = load_weight(&params)?;
    let n_max = n_max as usize;
    let pipe = Pipeline::new(&wp, n_max + 1, &ctx)?;
    let pipe_t = Pipeline::new(&wp.qpv_shifted()?, n_max + 1, &ctx)?;
    let res = qpv_residuals(&pipe, &pipe_t, n_max)?;
    let d = digits;

    let mut rows = Vec::new();
    for n in 1..=n_max {
        let st = pipe.extract_state(n)?;
        let (f1, f2) = pipe.freud_residuals(n)?;
        let r = &res[n - 1];
        rows.push(vec![
            n.to_string(),
            fmt_sig(&pipe.delta[n], d),
            fmt_sig(&pipe.sigma_det[n], d),
            fmt_sig(&pipe.an2[n], d),
            fmt_sig(&pipe.bn[n], d),
            fmt_sig(&pipe.gamma[n], d),
            fmt_sig(&st.y, d),
            fmt_sig(&st.z, d),
            fmt_sig(&st.w, d),
            fmt_sig(&f1, 3),
            fmt_sig(&f2, 3),
            fmt_sig(&r.res_y, 3),
            fmt_sig(&r.res_z, 3),
        ]);
    }
    let header = [
        "n", "Delta_n", "Sigma_n", "an2", "bn", "Gamma_n", "y_n", "z_n", "w_n",
        "freud_residual_1", "freud_residual_2", "qpv_residual_y", "qpv_residual_z",
    ];
    let text = match common.format.as_str() {
        "json" => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let mut o = serde_json::Map::new();
                    for (h, v) in header.iter().zip(r.iter()) {
                        o.insert(h.to_string(), serde_json::Value::String(v.clone()));
                    }
                    serde_json::Value::Object(o)
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&items).unwrap())
        }
        _ => {
            let mut t = header.join(",");
            t.push('\n');
            for r in &rows {
                t.push_str(&r.join(","));
                t.push('\n');
            }
            t
        }
    };
    emit(&common, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_freud(common: CommonOpts, params: Option<String>, n_max: u32) -> qpv_core::Result<ExitCode> {
    let digits = digits_of(&common);
    let ctx = PrecisionCtx::new(digits)?;
    let wp = load_weight(&params)?;
    let n_max = n_max as usize;
    let pipe = Pipeline::new(&wp, n_max.max(3), &ctx)?;
    let p = pipe.prec;
    let tol = pipe.tol(15);
    let mut out = String::new();
    let mut ok = true;
    let qs = ortho::pow_rat(&pipe.q, &pipe.params.sigma, p)?;

    out.push_str(&format!(
        "Lax/Freud suite at a = ({}, {}, {}), sigma = {}, q = {}, {} digits\n",
        wp.a[0], wp.a[1], wp.a[2], wp.sigma, wp.q, digits
    ));
    for n in 1..=n_max {
        let (f1, f2) = pipe.freud_residuals(n)?;
        let a0 = pipe.a_matrix(n, &Float::new(p))?;
        let tr = ((&a0[0][0] + &a0[1][1]).complete(p) - 1u32 - qs.clone().recip()).abs();
        let x = Float::with_val(p, 7) / 8u32;
        let l = pipe.l_matrix(n, &x)?;
        let det_l = (&l[0][0] * &l[1][1]).complete(p) - (&l[0][1] * &l[1][0]).complete(p);
        let w = pipe.w_poly();
        let v = pipe.v_poly()?;
        let wv = w.eval(&x);
        let det_l_res = (det_l
            - wv.clone() / (wv - 2u32 * (x.clone() * (1u32 - &pipe.q).complete(p)) * v.eval(&x)))
        .abs();
        let line_ok = f1 < tol && f2 < tol && tr < tol && det_l_res < tol;
        ok &= line_ok;
        out.push_str(&format!(
            "n = {n}: freud1 = {}, freud2 = {}, tr A0 - (1+q^-sigma) = {}, det L residual = {} [{}]\n",
            fmt_sig(&f1, 3), fmt_sig(&f2, 3), fmt_sig(&tr, 3), fmt_sig(&det_l_res, 3),
            if line_ok { "ok" } else { "FAIL" }
        ));
    }

    // q-P_V weight deformation structure, including the as-printed R1 figure
    let pipe_t = Pipeline::new(&wp.qpv_shifted()?, n_max.max(3), &ctx)?;
    let (_, r, s) = qpv_deformation(&wp, p)?;
    for n in [2usize, 3] {
        let td = transfer_data(&pipe, &pipe_t, &r, &s, n)?;
        let x = Float::with_val(p, 4) / 5u32;
        let dr = td.det_residual(&r, &x)?;
        let r1 = td.y_frame_leading(&pipe.q);
        let m_qa2 = -((&pipe.q * &pipe.a[1]).complete(p));
        let as_stated = (r1[0][0].clone() - (&pipe.q * &pipe.a[1]).complete(p))
            .abs()
            .max(&(r1[1][1].clone() - (&pipe.q * &pipe.a[1]).complete(p)).abs());
        let corrected = (r1[0][0].clone() - &m_qa2)
            .abs()
            .max(&(r1[1][1].clone() - pipe.q.clone() * td.n21_const() - &m_qa2).abs());
        let line_ok = dr < tol && corrected < tol;
        ok &= line_ok;
        out.push_str(&format!(
            "qpv deformation n = {n}: det R residual = {}, R1 column-asymptotics residual = {} [{}]\n  (|R1 - q a2 I| as printed = {}; the printed claim drops the (2,1) cross term)\n",
            fmt_sig(&dr, 3), fmt_sig(&corrected, 3),
            if line_ok { "ok" } else { "FAIL" },
            fmt_sig(&as_stated, 3)
        ));
    }

    // Table 1 deformations
    for def in [DefId::Sigma, DefId::A1, DefId::A3, DefId::A2] {
        let wd = weight_deformation(def, &wp, p)?;
        let pt = Pipeline::new(&wd.new_params, 4, &ctx)?;
        let r = wd.r_poly.clone().unwrap();
        let s = wd.s_poly.clone().unwrap();
        let td = transfer_data(&pipe, &pt, &r, &s, 3)?;
        let x = Float::with_val(p, 4) / 5u32;
        let tr_res = td.transfer_residual(&pipe, &pt, 3, &x)?;
        let line_ok = tr_res < tol;
        ok &= line_ok;
        out.push_str(&format!(
            "{} delta {:?}: transfer residual = {} [{}]\n",
            def.name(), wd.delta, fmt_sig(&tr_res, 3),
            if line_ok { "ok" } else { "FAIL" }
        ));
    }

    // correspondence report
    for row in correspondence_check() {
        out.push_str(&format!(
            "correspondence {}: weight {:?} vs lattice {:?} -> {:?}{}\n",
            row.name, row.weight_side, row.lattice_side, row.verdict,
            if row.note.is_empty() { String::new() } else { format!(" ({})", row.note) }
        ));
    }
    out.push_str(if ok { "suite PASS\n" } else { "suite FAIL\n" });
    emit(&common, &out)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_lattice(common: CommonOpts, trials: u32, seed: u64) -> qpv_core::Result<ExitCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let mut ok = true;

    // trivial element
    let word = parse_word("T0 T1 T2 T3 T4")?;
    for _ in 0..trials {
        let (m, s, res) = sample::sample_until(&mut rng, |m, s| {
            apply_word_map(&word, m, s).ok().map(|r| (m.clone(), s.clone(), r))
        });
        let (mt, st) = res;
        let fine = st.y == s.y
            && st.z == s.z
            && (0..2).all(|i| {
                mt.kappa[i] == BigRat::from(&m.q * &m.kappa[i])
                    && mt.lambda[i] == BigRat::from(&m.q * &m.lambda[i])
            });
        ok &= fine;
    }
    out.push_str(&format!(
        "trivial element T0 T1 T2 T3 T4 fixes (y, z), scales kappa/lambda by q: {}\n",
        if ok { "PASS" } else { "FAIL" }
    ));

    // factorization
    let word = parse_word("Ta1l1 Ta2l2 Tk1l1^-1 Tk2l2^-1")?;
    let mut fact_ok = true;
    for _ in 0..trials {
        let (d, w) = sample::sample_until(&mut rng, |m, s| {
            let d = qpv_core::deform::qpv_map(m, s).ok()?;
            let w = apply_word_map(&word, m, s).ok()?;
            Some((d, w))
        });
        fact_ok &= d.1.y == w.1.y && d.1.z == w.1.z && d.0 == w.0;
    }
    ok &= fact_ok;
    out.push_str(&format!(
        "factorization QPV = Ta1l1 Ta2l2 Tk1l1^-1 Tk2l2^-1 on (y, z): {}\n",
        if fact_ok { "PASS" } else { "FAIL" }
    ));

    // b-table ratio report through the Weyl dictionary
    let (m, _s) = sample::sample_problem(&mut rng);
    out.push_str("b-table ratios per lattice generator (printed table in brackets):\n");
    let printed: [[&str; 5]; 5] = [
        ["q", "1/q", "1", "1", "1"],
        ["1", "q", "1/q", "1", "1"],
        ["1", "1", "q", "1/q", "1"],
        ["1", "1", "1", "q", "1/q"],
        ["1/q", "1", "1", "1", "q"],
    ];
    type BFn = Box<dyn Fn(&ConnectionData) -> BigRat>;
    let fs: [BFn; 5] = [
        Box::new(|m| BigRat::from(&m.a[2] / &m.a[0])),
        Box::new(|m| BigRat::from(&m.a[0] / &m.a[1])),
        Box::new(|m| -BigRat::from(&m.a[1] * &m.kappa[1]) / m.lambda[1].clone()),
        Box::new(|m| BigRat::from(&m.lambda[1] / &m.lambda[0])),
        Box::new(|m| -m.lambda[0].clone() / (BigRat::from(&m.a[2] * &m.q) * m.kappa[0].clone())),
    ];
    let ratio_name = |r: BigRat, q: &BigRat| -> String {
        if r == 1u32 {
            "1".into()
        } else if &r == q {
            "q".into()
        } else if r == BigRat::from(q.recip_ref()) {
            "1/q".into()
        } else {
            format!("{r}")
        }
    };
    for (ti, kind) in [TagKind::T0, TagKind::T1, TagKind::T2, TagKind::T3, TagKind::T4]
        .iter()
        .enumerate()
    {
        // the data action is state-independent; retry states for the fixed m
        // until the word applies
        let mt = loop {
            let s2 = sample::sample_state(&mut rng, &m);
            if let Ok((mt, _)) = apply_word_map(&[Step::new(*kind, 1)], &m, &s2) {
                break mt;
            }
        };
        let mut row = format!("  T{ti}:");
        for (bi, f) in fs.iter().enumerate() {
            let r = BigRat::from(f(&mt) / f(&m));
            row.push_str(&format!(" b{bi} x{} [{}]", ratio_name(r, &m.q), printed[ti][bi]));
        }
        let b2c = |mm: &ConnectionData| qpv_core::linprob::weyl_b2_corrected(mm);
        let rc = BigRat::from(b2c(&mt) / b2c(&m));
        row.push_str(&format!("  (corrected b2 x{})", ratio_name(rc, &m.q)));
        out.push_str(&row);
        out.push('\n');
    }
    out.push_str(
        "note: with the printed b2 = -a2 kappa2/lambda2 the T1/T2/T3 b2 cells disagree with the\n\
         printed table (and T3(b3) is printed as q b4); with b2 = -a2 kappa1/lambda2 the table\n\
         matches throughout and b0 b1 b2 b3 b4 = 1/q exactly.\n",
    );
    out.push_str(if ok { "lattice suite PASS\n" } else { "lattice suite FAIL\n" });
    emit(&common, &out)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_eval(common: CommonOpts, what: EvalCmd) -> qpv_core::Result<ExitCode> {
    let digits = digits_of(&common);
    let ctx = PrecisionCtx::new(digits)?;
    let pr = |s: &str| -> qpv_core::Result<Float> { Ok(ctx.rat(&parse_rat(s)?)) };
    let v = match what {
        EvalCmd::Qpoch { a, q, k } => {
            let order = if k == "inf" {
                PochOrder::Infinite
            } else {
                PochOrder::Finite(
                    k.parse::<u64>()
                        .map_err(|_| qpv_core::Error::Parse(format!("bad order {k:?}")))?,
                )
            };
            qfun::qpoch(&pr(&a)?, &pr(&q)?, order, &ctx)?
        }
        EvalCmd::Theta { x, q } => qfun::theta(&pr(&x)?, &pr(&q)?, &ctx)?,
        EvalCmd::Qchar { c, x, q } => qfun::q_char(&pr(&c)?, &pr(&x)?, &pr(&q)?, &ctx)?,
        EvalCmd::Phi { upper, lower, q, z } => {
            let parse_list = |s: &str| -> qpv_core::Result<Vec<Float>> {
                s.split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| pr(t.trim()))
                    .collect()
            };
            qfun::phi_rs(&parse_list(&upper)?, &parse_list(&lower)?, &pr(&q)?, &pr(&z)?, &ctx)?
        }
        EvalCmd::JacksonMonomial { k, a, b, q } => {
            let f = |t: &Float| -> qpv_core::Result<Float> { Ok(t.clone().pow(k)) };
            qfun::jackson_integral(f, &pr(&a)?, &pr(&b)?, &pr(&q)?, &ctx)?
        }
        EvalCmd::BigQLaguerre { a, b, n, x, q } => {
            big_q_laguerre(&parse_rat(&a)?, &parse_rat(&b)?, n as usize, &pr(&x)?, &parse_rat(&q)?, &ctx)?.0
        }
    };
    emit(&common, &format!("{}\n", fmt_sig(&v, digits)))?;
    Ok(ExitCode::SUCCESS)
}
