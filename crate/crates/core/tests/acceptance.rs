//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use regpolar::cli::selftest::commutation_polynomials;
use regpolar::funbackend::{shifted_x, DiagOperator, Domain1D, Q};
use regpolar::hilbmod::OperatorMatrix;
use regpolar::matalg::{BlockProfile, CMat};
use regpolar::polar::{
    adjoint_polar_check, closed_range_suite, cor32_check, verify_thm31, Operator,
};
use regpolar::random;
use regpolar::regular::{
    btransform, graded_report, inverse_btransform, remark22_residuals, GradedOperator,
    RegularOperator,
};
use regpolar::Tolerances;

const SEED: u64 = 20_240_601;
const CORPUS: usize = 200;
const FAMILY: usize = 60;

type Outcome = Result<String, String>;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(
        0.0,
        |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) },
    )
}

const REQUIRED_KEYS: [&str; 8] = [
    "V*V=ran t*",
    "VV*=ran t",
    "V*t=|t|",
    "VV*t=t",
    "tst=t",
    "sts=s",
    "(ts)*=ts",
    "(st)*=st",
];

fn criterion1(corpus: &[OperatorMatrix], tol: &Tolerances) -> Outcome {
    let start = Instant::now();
    let mut max_res = 0.0f64;
    for (i, t) in corpus.iter().enumerate() {
        let r = verify_thm31(&t.clone().into(), tol).map_err(|e| format!("instance {i}: {e}"))?;
        if !(r.cond_i && r.cond_ii && r.cond_iii) {
            return Err(format!(
                "instance {i}: verdicts {} {} {}",
                r.cond_i, r.cond_ii, r.cond_iii
            ));
        }
        for key in REQUIRED_KEYS {
            let v = *r
                .residuals
                .get(key)
                .ok_or(format!("instance {i}: missing {key}"))?;
            if v.is_nan() || v > 1e-8 {
                return Err(format!("instance {i}: {key} = {v:e}"));
            }
        }
        max_res = max_res.max(r.max_residual());
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        return Err(format!("runtime {elapsed:.2}s"));
    }
    Ok(format!(
        "{} operators, worst residual {max_res:.1e}, {elapsed:.2}s",
        corpus.len()
    ))
}

fn criterion2(corpus: &[OperatorMatrix], tol: &Tolerances) -> Outcome {
    let (mut rel, mut adj) = (0.0f64, 0.0f64);
    for (i, t) in corpus.iter().enumerate() {
        let run = || -> regpolar::Result<(f64, f64)> {
            let f = btransform(&t.clone().into(), tol)?;
            let back = inverse_btransform(&f, tol)?.explicit(tol)?;
            let f_adj = btransform(&t.adjoint().into(), tol)?;
            Ok((
                back.distance(t) / (1.0 + t.norm()),
                f.adjoint().distance(&f_adj),
            ))
        };
        let (r, a) = run().map_err(|e| format!("instance {i}: {e}"))?;
        if r.is_nan() || r > 1e-8 || a.is_nan() || a > 1e-10 {
            return Err(format!("instance {i}: round trip {r:e}, adjoint {a:e}"));
        }
        rel = rel.max(r);
        adj = adj.max(a);
    }
    Ok(format!(
        "round trip {rel:.1e} (relative), adjoint {adj:.1e}"
    ))
}

fn criterion3(corpus: &[OperatorMatrix], tol: &Tolerances) -> Outcome {
    let polys = commutation_polynomials();
    let mut max_res = 0.0f64;
    for (i, t) in corpus.iter().enumerate() {
        let rt: RegularOperator = t.clone().into();
        for p in &polys {
            let (a, b) =
                remark22_residuals(&rt, p, tol).map_err(|e| format!("instance {i}: {e}"))?;
            let r = worst([a, b]);
            if r > 1e-8 {
                return Err(format!("instance {i}, p = {:?}: {r:e}", p.coefficients()));
            }
            max_res = max_res.max(r);
        }
    }
    Ok(format!(
        "{} polynomials, worst residual {max_res:.1e}",
        polys.len()
    ))
}

fn criterion4(corpus: &[OperatorMatrix], tol: &Tolerances) -> Outcome {
    let (mut dual, mut graph) = (0.0f64, 0.0f64);
    for (i, t) in corpus.iter().enumerate() {
        let r = verify_thm31(&t.clone().into(), tol).map_err(|e| format!("instance {i}: {e}"))?;
        let d = *r
            .residuals
            .get("s dual agreement")
            .ok_or("missing dual residual")?;
        let g = *r
            .residuals
            .get("graph decomposition")
            .ok_or("missing graph residual")?;
        if worst([d, g]) > 1e-8 {
            return Err(format!("instance {i}: dual {d:e}, graph {g:e}"));
        }
        dual = dual.max(d);
        graph = graph.max(g);
    }
    Ok(format!(
        "dual agreement {dual:.1e}, graph decomposition {graph:.1e}"
    ))
}

fn criterion5(tol: &Tolerances) -> Outcome {
    let unit = Domain1D::interval(q(0), q(1)).map_err(|e| e.to_string())?;
    let mult = |r: i64| -> Operator {
        DiagOperator::new(unit.clone(), vec![shifted_x(&unit, q(r))])
            .expect("real entry")
            .into()
    };

    let r = verify_thm31(&mult(0), tol).map_err(|e| e.to_string())?;
    if r.cond_i || r.cond_ii || r.cond_iii {
        return Err("x on [0,1] was accepted".into());
    }
    match &r.certificate {
        Some(c) if c.point == q(0) => {}
        other => return Err(format!("x on [0,1]: certificate {other:?}")),
    }

    let r = verify_thm31(&mult(2), tol).map_err(|e| e.to_string())?;
    if !(r.cond_i && r.cond_ii && r.cond_iii) {
        return Err("x-2 on [0,1] was rejected".into());
    }
    if let Some((k, v)) = r.residuals.iter().find(|(_, &v)| v != 0.0) {
        return Err(format!("x-2 on [0,1]: {k} = {v:e}"));
    }

    let mut rng = random::rng(SEED ^ 0xf00d);
    for i in 0..FAMILY {
        let d = random::rooted_diag(&mut rng);
        let r = verify_thm31(&d.into(), tol).map_err(|e| format!("rooted {i}: {e}"))?;
        if r.cond_i || r.cond_ii || r.cond_iii || r.certificate.is_none() {
            return Err(format!("rooted instance {i} accepted"));
        }
    }
    for i in 0..FAMILY {
        let d = random::clopen_diag(&mut rng);
        let r = verify_thm31(&d.into(), tol).map_err(|e| format!("clopen {i}: {e}"))?;
        if !(r.cond_i && r.cond_ii && r.cond_iii) {
            return Err(format!("clopen instance {i} rejected"));
        }
        if r.residuals.values().any(|&v| v != 0.0) {
            return Err(format!("clopen instance {i}: nonzero exact residual"));
        }
    }
    Ok(format!(
        "x rejected at 0, x-2 exact, {FAMILY} rooted rejected, {FAMILY} clopen accepted"
    ))
}

fn inverse_family(tol: &Tolerances) -> regpolar::Result<GradedOperator> {
    let one =
        OperatorMatrix::from_blocks(BlockProfile::scalar(), 1, 1, vec![CMat::identity(1, 1)])?;
    GradedOperator::family(
        &one.into(),
        50,
        |n| BigRational::new(1.into(), n.into()),
        tol,
    )
}

fn criterion6(tol: &Tolerances) -> Outcome {
    let g = inverse_family(tol).map_err(|e| e.to_string())?;
    let report = graded_report(&g, tol).map_err(|e| e.to_string())?;
    if report.components.len() != 50 {
        return Err(format!("{} components", report.components.len()));
    }
    for (i, c) in report.components.iter().enumerate() {
        let n = (i + 1) as f64;
        if c.inverse_norm != n {
            return Err(format!("component {}: |s| = {}", i + 1, c.inverse_norm));
        }
        if (c.isometry_norm - 1.0).abs() > 1e-12 {
            return Err(format!("component {}: |V| = {}", i + 1, c.isometry_norm));
        }
        if c.transform_norm >= 1.0 {
            return Err(format!("component {}: |F| = {}", i + 1, c.transform_norm));
        }
    }
    if !(report.unbounded_inverse && report.range_not_uniformly_closed) {
        return Err("growth flags not set".into());
    }
    let c = closed_range_suite(&g.into(), tol).map_err(|e| e.to_string())?;
    if !c.consistent {
        return Err(format!("closed-range suite inconsistent: {c:?}"));
    }
    Ok(format!(
        "|s_n| = n, |V_n| = 1, sup |F| = {:.4}, flags set",
        report.sup_transform_norm
    ))
}

fn function_instances() -> Vec<Operator> {
    let unit = Domain1D::interval(q(0), q(1)).expect("interval");
    let mut out: Vec<Operator> = [0, 2]
        .iter()
        .map(|&r| {
            DiagOperator::new(unit.clone(), vec![shifted_x(&unit, q(r))])
                .expect("real")
                .into()
        })
        .collect();
    let mut rng = random::rng(SEED ^ 0xcafe);
    for _ in 0..10 {
        out.push(random::rooted_diag(&mut rng).into());
        out.push(random::clopen_diag(&mut rng).into());
    }
    out
}

fn criterion7(corpus: &[OperatorMatrix], tol: &Tolerances) -> Outcome {
    let (mut cor, mut adj) = (0.0f64, 0.0f64);
    for (i, t) in corpus.iter().enumerate() {
        let op: Operator = t.clone().into();
        let c = cor32_check(&op, tol).map_err(|e| format!("instance {i}: {e}"))?;
        let a = adjoint_polar_check(&op, tol).map_err(|e| format!("instance {i}: {e}"))?;
        if worst([c, a]) > 1e-8 {
            return Err(format!("instance {i}: cor32 {c:e}, adjoint polar {a:e}"));
        }
        let cr = closed_range_suite(&op, tol).map_err(|e| format!("instance {i}: {e}"))?;
        if !cr.consistent {
            return Err(format!("instance {i}: closed-range inconsistent"));
        }
        cor = cor.max(c);
        adj = adj.max(a);
    }
    let graded = inverse_family(tol).map_err(|e| e.to_string())?;
    if !closed_range_suite(&graded.into(), tol)
        .map_err(|e| e.to_string())?
        .consistent
    {
        return Err("graded closed-range inconsistent".into());
    }
    let functions = function_instances();
    for (i, op) in functions.iter().enumerate() {
        let cr = closed_range_suite(op, tol).map_err(|e| format!("function {i}: {e}"))?;
        if !cr.consistent {
            return Err(format!("function {i}: closed-range inconsistent {cr:?}"));
        }
    }
    Ok(format!(
        "cor32 {cor:.1e}, adjoint polar {adj:.1e}, closed range consistent on {} matrix, 1 graded, {} function",
        corpus.len(),
        functions.len()
    ))
}

fn criterion8() -> Outcome {
    let schema = common::schema();
    let mut reports = 0;
    for (name, cmds) in common::GOLDEN_CASES {
        let problem = format!("problems/{name}.json");
        for cmd in *cmds {
            let (first, code) = common::run(&[cmd, &problem, "--format", "json"]);
            if code != 0 {
                return Err(format!("{name} {cmd}: exit {code}"));
            }
            let v = common::violations(&schema, &first);
            if !v.is_empty() {
                return Err(format!("{name} {cmd}: {v:?}"));
            }
            let (second, _) = common::run(&[cmd, &problem, "--format", "json"]);
            if first != second {
                return Err(format!("{name} {cmd}: not byte-stable"));
            }
            let golden = std::fs::read_to_string(common::golden_path(name, cmd))
                .map_err(|e| format!("{name} {cmd}: {e}"))?;
            if golden != first {
                return Err(format!("{name} {cmd}: differs from stored report"));
            }
            reports += 1;
        }
    }
    let expectations: [(&[&str], i32); 5] = [
        (&["verify-thm31", "problems/mult_x.json"], 0),
        (&["btransform", "problems/mult_x.json"], 2),
        (&["polar", "problems/missing.json"], 2),
        (&["polar", "problems/nilpotent2.json", "--tol", "nan"], 2),
        (&["selftest", "--count", "3", "--seed", "1"], 0),
    ];
    for (args, want) in expectations {
        let (_, code) = common::run(args);
        if code != want {
            return Err(format!("{args:?}: exit {code}, expected {want}"));
        }
    }
    Ok(format!(
        "{reports} reports stable and schema-valid, exit codes as documented"
    ))
}

fn main() {
    let tol = Tolerances::default();
    let corpus = random::corpus(SEED, CORPUS);
    let results: Vec<(usize, Outcome)> = vec![
        (1, criterion1(&corpus, &tol)),
        (2, criterion2(&corpus, &tol)),
        (3, criterion3(&corpus, &tol)),
        (4, criterion4(&corpus, &tol)),
        (5, criterion5(&tol)),
        (6, criterion6(&tol)),
        (7, criterion7(&corpus, &tol)),
        (8, criterion8()),
    ];
    let mut failed = 0;
    for (n, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({why})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
