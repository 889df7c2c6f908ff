//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use serde_json::Value;

use sbo_core::conformal::{check_brackets_conf, check_restriction, subalgebra_basis};
use sbo_core::gegenbauer::{alpha_symbol, gegenbauer, gegenbauer_renorm, inflate, renorm_length};
use sbo_core::juhl::verify_juhl_equivariance;
use sbo_core::kernel::{numeric_equivariance_many, refinement_sequence, KernelConfig, TestFunction};
use sbo_core::rankin_cohen::{
    cg_decompose, cg_ranks, derivative_basis, omega_classify, operator_rank, rc_operator, rc_symbolic, singular_basis,
    verify_intertwining, BiDiffOp, OmegaClass, PARAMS,
};
use sbo_core::tables::{bb_query, complex_form_lookup, list_families, pp_query, FamilyFilter};
use sbo_core::{ParamPoly, Poly, Rational, Ring};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn singular_points() -> Vec<(Rational, Rational, u32)> {
    let mut out = Vec::new();
    for l1 in -6..=6 {
        for l2 in -6..=6 {
            for a in 0..=6u32 {
                let l3 = q(l1 + l2 + 2 * a as i64);
                if omega_classify(&q(l1), &q(l2), &l3) == OmegaClass::OmegaSingular {
                    out.push((q(l1), q(l2), a));
                }
            }
        }
    }
    out
}

fn c1_vanishing_locus() -> Outcome {
    let mut points = 0;
    let mut singular = 0;
    for l1 in -6..=6 {
        for l2 in -6..=6 {
            for a in 0..=6u32 {
                let (r1, r2) = (q(l1), q(l2));
                let l3 = q(l1 + l2 + 2 * a as i64);
                let vanishes = rc_operator(&r1, &r2, a).is_zero();
                let sing = omega_classify(&r1, &r2, &l3) == OmegaClass::OmegaSingular;
                ensure(vanishes == sing, || format!("({l1},{l2},a={a}): zero={vanishes} singular={sing}"))?;
                points += 1;
                singular += sing as usize;
            }
        }
    }
    Ok(format!("{points} points, {singular} singular"))
}

fn c2_intertwining() -> Outcome {
    let l1 = ParamPoly::var(&PARAMS, PARAMS[0]).unwrap();
    let l2 = ParamPoly::var(&PARAMS, PARAMS[1]).unwrap();
    let mut checked = 0;
    for a in 0..=6u32 {
        let l3 = &(&l1 + &l2) + &ParamPoly::from_int(2 * a as i64);
        let r = verify_intertwining(&rc_symbolic(a), &l1, &l2, &l3, 8).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("symbolic a={a}: {:?}", r.failures.first()))?;
        checked += r.checked;
    }
    // Deterministic rational sample: numerators and denominators from a small LCG.
    let mut state: u64 = 0x2545_f491;
    let mut next = |m: u64| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) % m
    };
    for k in 0..50 {
        let r1 = Rational::new(next(41) as i64 - 20, next(7) as i64 + 1);
        let r2 = Rational::new(next(41) as i64 - 20, next(7) as i64 + 1);
        let a = (k % 7) as u32;
        let l3 = &(&r1 + &r2) + &q(2 * a as i64);
        let r = verify_intertwining(&rc_operator(&r1, &r2, a), &r1, &r2, &l3, 8).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("({r1},{r2},a={a}): {:?}", r.failures.first()))?;
        checked += r.checked;
    }
    Ok(format!("7 symbolic orders + 50 rational points, {checked} identities"))
}

fn c3_singular_bases() -> Outcome {
    let pts = singular_points();
    for (l1, l2, a) in &pts {
        let l3 = &(l1 + l2) + &q(2 * *a as i64);
        let s = singular_basis(l1, l2, &l3).map_err(|e| format!("({l1},{l2},{l3}): {e}"))?;
        let d = derivative_basis(l1, l2, &l3).map_err(|e| format!("({l1},{l2},{l3}): {e}"))?;
        ensure(operator_rank(&s) == 2, || format!("({l1},{l2},a={a}): singular rank {}", operator_rank(&s)))?;
        ensure(operator_rank(&d) == 2, || format!("({l1},{l2},a={a}): derivative rank {}", operator_rank(&d)))?;
        let all: Vec<BiDiffOp<Rational>> = s.iter().chain(d.iter()).cloned().collect();
        ensure(operator_rank(&all) == 2, || format!("({l1},{l2},a={a}): spans differ"))?;
        for op in &all {
            let r = verify_intertwining(op, l1, l2, &l3, 8).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("({l1},{l2},a={a}): {:?}", r.failures.first()))?;
        }
    }
    Ok(format!("{} singular points", pts.len()))
}

fn c4_clebsch_gordan() -> Outcome {
    for m in 0..=6u32 {
        for n in 0..=6u32 {
            let comps = cg_decompose(m, n);
            let ranks = cg_ranks(m, n);
            let mut total = 0;
            for (c, rank) in comps.iter().zip(&ranks.image_ranks) {
                ensure(!c.projector.is_zero(), || format!("m={m} n={n} a={}: zero projector", c.a))?;
                let expected = m + n - 2 * c.a + 1;
                ensure(c.target_dim == expected && *rank == expected as usize, || {
                    format!("m={m} n={n} a={}: dim {} rank {rank}, expected {expected}", c.a, c.target_dim)
                })?;
                total += c.target_dim;
            }
            ensure(total == (m + 1) * (n + 1), || format!("m={m} n={n}: dims sum to {total}"))?;
            ensure(ranks.joint_rank == ((m + 1) * (n + 1)) as usize, || format!("m={m} n={n}: joint rank {}", ranks.joint_rank))?;
        }
    }
    Ok("49 pairs (m, n)".into())
}

fn c5_conformal() -> Outcome {
    let lambda = ParamPoly::var(&["lambda"], "lambda").unwrap();
    let mut checked = 0;
    for n in 2..=4 {
        let r = check_brackets_conf(n, &lambda, 8).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("brackets n={n}: {:?}", r.failures.first()))?;
        let s = check_restriction(n, &lambda, 8).map_err(|e| e.to_string())?;
        ensure(s.passed(), || format!("restriction n={n}: {:?}", s.failures.first()))?;
        checked += r.checked + s.checked;
    }
    Ok(format!("n = 2, 3, 4, {checked} identities"))
}

fn c6_juhl() -> Outcome {
    let lambdas = [q(-3), q(-2), q(-1), Rational::new(-1, 2), q(0), Rational::new(1, 2), q(1), q(2)];
    let mut jobs = Vec::new();
    for n in 2..=4usize {
        for gap in [0, 2, 4, 6] {
            for l in &lambdas {
                jobs.push((n, l.clone(), l + &q(gap)));
            }
        }
    }
    let results: Vec<Result<(), String>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(n, l, nu)| {
                s.spawn(move || {
                    let r = verify_juhl_equivariance(*n, l, nu, 8).map_err(|e| e.to_string())?;
                    ensure(r.passed(), || format!("n={n} λ={l} ν={nu}: {:?}", r.failures.first()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    results.into_iter().collect::<Result<Vec<()>, String>>()?;
    Ok(format!("{} parameter points", jobs.len()))
}

fn c7_gegenbauer() -> Outcome {
    for l in 0..=10u32 {
        let m = renorm_length(l) as i64;
        for twice in -16..=16 {
            let alpha = Rational::new(twice, 2);
            let zero = gegenbauer(l, &alpha).is_zero();
            let expected = l >= 1 && alpha.is_integer() && twice <= 0 && twice / 2 > -m;
            ensure(zero == expected, || format!("C_{l}^{alpha}: zero={zero}, expected {expected}"))?;
            ensure(!gegenbauer_renorm(l, &alpha).is_zero(), || format!("renormalized C_{l}^{alpha} vanishes"))?;
        }
    }
    let a = alpha_symbol();
    let uv = ["u", "v"];
    ensure(inflate(0, &a) == Poly::constant(&uv, ParamPoly::one()), || "C̃_0 != 1".into())?;
    ensure(inflate(1, &a) == Poly::monomial(&uv, &[0, 1], ParamPoly::from_int(2)), || "C̃_1 != 2v".into())?;
    let two_a1 = (&a + &ParamPoly::from_int(1)).scale(&q(2));
    let c2 = Poly::from_terms(&uv, vec![(vec![0, 2], two_a1), (vec![1, 0], ParamPoly::from_int(-1))]);
    ensure(inflate(2, &a) == c2, || "C̃_2 != 2(α+1)v² − u".into())?;
    Ok("l ≤ 10 on 33 half-integers, C̃_0..C̃_2 exact".into())
}

fn c8_kernel() -> Outcome {
    let cfg = KernelConfig::new(2, 4.0, 0.5);
    let f = TestFunction::unit(2);
    let seq = refinement_sequence(&cfg, &f, &[0.0], 3).map_err(|e| e.to_string())?;
    let diffs: Vec<f64> = seq.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let ratios: Vec<f64> = diffs.windows(2).map(|w| w[1] / w[0]).collect();
    let rel = diffs[diffs.len() - 1] / seq[seq.len() - 1].abs();
    ensure(ratios.iter().all(|r| *r < 0.5), || format!("ratios {ratios:?}"))?;
    ensure(rel < 1e-4, || format!("final relative change {rel:e}"))?;
    let basis = subalgebra_basis(2).map_err(|e| e.to_string())?;
    let res = numeric_equivariance_many(&cfg, &basis, &f).map_err(|e| e.to_string())?;
    let worst = res.iter().cloned().fold(0.0, f64::max);
    ensure(worst < 1e-3, || format!("residuals {res:?}"))?;
    Ok(format!(
        "value {:.12}, ratios [{}], rel change {rel:.1e}, max residual {worst:.1e}",
        seq[seq.len() - 1],
        ratios.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>().join(", ")
    ))
}

fn c9_tables() -> Outcome {
    let tags = |f| list_families(f).into_iter().map(|r| r.tag).collect::<Vec<_>>();
    let bb = tags(FamilyFilter::Bb);
    let pp = tags(FamilyFilter::Pp);
    ensure(bb == ["A", "B", "F1", "F2", "F3", "F4", "F5"], || format!("bb {bb:?}"))?;
    let expected_pp = "A B C D E1 E2 E3 E4 F1 F2 F3 F4 F5 G1 G2 H1 H2 H3 H4 H5";
    ensure(pp.join(" ") == expected_pp, || format!("pp {pp:?}"))?;
    ensure(bb.iter().all(|t| pp.contains(t)), || "bb not contained in pp".into())?;
    ensure(tags(FamilyFilter::All) == pp, || "all != pp".into())?;

    let e = |x: sbo_core::Error| x.to_string();
    ensure(pp_query("(sl(4,R), gl(3,R))").map_err(e)? == (Some("F3".into()), true), || "F3 example".into())?;
    ensure(pp_query("(o(4,1)+o(4,1), diag o(4,1))").map_err(e)? == (Some("G2".into()), true), || "G2 example".into())?;
    ensure(pp_query("(sl(3,R), so(1,2))").map_err(e)? == (None, false), || "no-match example".into())?;
    ensure(bb_query("(su(3,2), u(2,2))").map_err(e)?, || "F4 bounded example".into())?;
    ensure(!bb_query("(o(4,1)+o(4,1), diag o(4,1))").map_err(e)?, || "G2 bounded example".into())?;
    ensure(!bb_query("(o(6,2), u(3,1))").map_err(e)?, || "H1 bounded example".into())?;
    let row = |g: &str| -> Result<Option<(String, String, String)>, String> {
        Ok(complex_form_lookup(g).map_err(e)?.map(|r| {
            let i = &r.instances[0];
            (i.g.clone(), i.k.clone(), i.g_real.clone())
        }))
    };
    let triple = |a: &str, b: &str, c: &str| Some((a.to_string(), b.to_string(), c.to_string()));
    ensure(row("sl(4,C)")? == triple("sl(4,C)", "sp(2,C)", "su*(4)"), || "sl(4,C) row".into())?;
    ensure(row("so(7,C)")? == triple("so(7,C)", "so(6,C)", "so(6,1)"), || "so(7,C) row".into())?;
    ensure(row("sl(3,C)")?.is_none(), || "sl(3,C) should not match".into())?;
    Ok(format!("{} pp families, {} bb families, 9 query examples", pp.len(), bb.len()))
}

fn cli(args: &[&str]) -> (i32, String) {
    sbo_cli::run(std::iter::once("sbo").chain(args.iter().copied()))
}

fn c10_cli() -> Outcome {
    // Round-trip: operators printed by `sl2 rc`, parsed back, act exactly as in-process ones.
    let cases: [(&str, &str, u32, &str); 4] =
        [("1/2", "3", 3, "generic"), ("-7/3", "5/2", 4, "generic"), ("0", "-1", 2, "singular"), ("-2", "0", 3, "derivative")];
    let zz = ["z1", "z2"];
    let tests: Vec<Poly<Rational>> = vec![
        Poly::from_terms(&zz, vec![(vec![5, 3], q(3)), (vec![2, 6], Rational::new(-1, 7)), (vec![0, 1], q(1))]),
        Poly::from_terms(&zz, vec![(vec![4, 4], Rational::new(5, 2)), (vec![7, 0], q(-2))]),
    ];
    for (l1, l2, a, basis) in cases {
        let a_str = a.to_string();
        let (code, out) = cli(&["sl2", "rc", "--l1", l1, "--l2", l2, "--a", &a_str, "--basis", basis]);
        ensure(code == 0, || format!("sl2 rc {l1} {l2} {a} {basis}: exit {code}: {out}"))?;
        let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let parsed: Vec<BiDiffOp<Rational>> = serde_json::from_value(v["operators"].clone()).map_err(|e| e.to_string())?;
        let (r1, r2): (Rational, Rational) = (l1.parse().unwrap(), l2.parse().unwrap());
        let l3 = &(&r1 + &r2) + &q(2 * a as i64);
        let direct: Vec<BiDiffOp<Rational>> = match basis {
            "generic" => vec![rc_operator(&r1, &r2, a)],
            "singular" => singular_basis(&r1, &r2, &l3).map_err(|e| e.to_string())?.to_vec(),
            _ => derivative_basis(&r1, &r2, &l3).map_err(|e| e.to_string())?.to_vec(),
        };
        ensure(parsed == direct, || format!("{basis} ({l1},{l2},a={a}): parsed operators differ"))?;
        for (p, d) in parsed.iter().zip(&direct) {
            for t in &tests {
                let (x, y) = (p.apply(t).map_err(|e| e.to_string())?, d.apply(t).map_err(|e| e.to_string())?);
                ensure(x == y, || format!("{basis} ({l1},{l2},a={a}): application differs"))?;
            }
        }
    }

    let (_, out) = cli(&["sl2", "rc", "--l1", "6/4", "--l2", "-10/15", "--a", "1"]);
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(v["l1"] == "3/2" && v["l2"] == "-2/3", || format!("rationals not reduced: {out}"))?;
    let (code, out) = cli(&["sl2", "dim", "--l1", "0", "--l2", "0", "--l3", "2", "--frobnicate", "1"]);
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(code == 2 && v["error"].is_string() && v["hint"].is_string(), || format!("unknown flag: exit {code}, {out}"))?;

    let expectations: [(&[&str], &str); 3] = [
        (&["sl2", "dim", "--l1", "0", "--l2", "0", "--l3", "2"], r#"{"class":"omega_singular","dim":2}"#),
        (&["conf", "dim", "--lambda", "1", "--nu", "1"], r#"{"dim":1,"l_even":false}"#),
        (&["sl2", "dim", "--l1", "2", "--l2", "2", "--l3", "5"], r#"{"class":"not_in_omega","dim":0}"#),
    ];
    for (args, want) in expectations {
        let (code, out) = cli(args);
        let got: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let want: Value = serde_json::from_str(want).unwrap();
        ensure(code == 0 && got == want, || format!("{}: {out}", args.join(" ")))?;
    }

    let commands: Vec<Vec<&str>> = vec![
        vec!["sl2", "rc", "--l1", "1/3", "--l2", "-5/2", "--a", "4"],
        vec!["sl2", "verify", "--l1", "1", "--l2", "2", "--a", "2", "--max-degree", "5"],
        vec!["sl2", "cg", "--m", "3", "--n", "4"],
        vec!["conf", "juhl", "--n", "4", "--lambda", "-1/2", "--nu", "7/2"],
        vec!["conf", "verify", "--n", "3", "--lambda", "0", "--nu", "2", "--max-degree", "4"],
        vec!["conf", "kernel", "--n", "2", "--lambda", "4", "--nu", "0.5"],
        vec!["pairs", "query", "--pair", "(sl(n+1,R), gl(n,R))", "--set", "n=3"],
        vec!["pairs", "list", "--filter", "all"],
        vec!["conf", "juhl", "--n", "3", "--lambda", "1", "--nu", "2"],
    ];
    for args in &commands {
        let first = cli(args);
        let second = cli(args);
        ensure(first == second, || format!("nondeterministic: {}", args.join(" ")))?;
    }
    Ok(format!("4 round-trips, {} commands byte-identical", commands.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("vanishing locus of RC equals the singular set", c1_vanishing_locus, 10),
        ("RC intertwining, symbolic and sampled", c2_intertwining, 60),
        ("singular and derivative bases", c3_singular_bases, 60),
        ("Clebsch-Gordan decomposition", c4_clebsch_gordan, 30),
        ("conformal brackets and restriction", c5_conformal, 60),
        ("Juhl equivariance", c6_juhl, 120),
        ("Gegenbauer vanishing and renormalization", c7_gegenbauer, 5),
        ("kernel convergence and equivariance", c8_kernel, 60),
        ("pair tables", c9_tables, 1),
        ("CLI round-trip and determinism", c10_cli, 5),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (status, detail) = match &outcome {
            Ok(d) if !over => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over the {budget} s budget")),
            Err(e) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} [{:.2} s] {name}: {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
