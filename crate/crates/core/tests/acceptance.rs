//! Acceptance criteria: one line per criterion with its verdict, the measured
//! runtime and the runtime limit. Every criterion must pass.

mod common;

use std::time::{Duration, Instant};

use common::*;
use nash_approx::approx::{ApproxConfig, ApproxProblem, ApproxResult, ResultJson};
use nash_approx::elim::{eliminate, groebner_basis, VarietyJson};
use nash_approx::genericity::{find_proper_position, form_is_admissible};
use nash_approx::jet::{
    polydisc_samples, sup_on_samples, tougeron_correct, weierstrass_divide, weierstrass_prepare, JetPoly, TougeronConfig,
    ZPoly,
};
use nash_approx::poly::{discriminant, resultant};
use nash_approx::{approximate_into_variety, verify_result, Cx, Jet, JetCtx, MonomialOrder, MultiPoly, UniOverPoly, VarietySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest admissible coefficient of every residual in criteria 2 and 3.
const RESIDUAL_TOL: f64 = 1e-9;
/// Identity residual of the root correction and the Weierstrass suites.
const IDENTITY_TOL: f64 = 1e-10;
/// Size of each injected fault.
const FAULT: f64 = 1e-3;
const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn poly(text: &str, vars: &[&str]) -> MultiPoly {
    polys(&[text], &names(vars)).remove(0)
}

fn random_unitary(rng: &mut ChaCha8Rng, m: usize, e: u32) -> UniOverPoly {
    let n = m + 1;
    let z = MultiPoly::var(n, m);
    let mut p = z.pow(e);
    for k in 0..e {
        let mut c = MultiPoly::from_int(n, rng.gen_range(-3..=3));
        for j in 0..m {
            c = &c + &MultiPoly::var(n, j).scale(&rat(rng.gen_range(-3..=3), 1));
        }
        p = &p + &(&c * &z.pow(k));
    }
    UniOverPoly::from_multi(&p, m).unwrap()
}

fn t_system() -> Outcome {
    let p = UniOverPoly::from_multi(&poly("z^2 - y", &["y", "z"]), 1).unwrap();
    let sys = nash_approx::approx::build_t_system(&p, 1, 1).unwrap();
    let coeffs = sys.coefficient_symbols().to_vec();
    let expect = ["2*c0*c1 - b1_0 - 2*a1*c0^2", "c1^2 - b1_1 - a1^2*c0^2", "2*c1 - 2*a1*c0"];
    let hand = sys.equations().iter().zip(expect).all(|(eq, t)| eq == &polys(&[t], &coeffs)[0]);
    let (a, b) = t_identity_defects(&p, 1, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut random_ok = 0;
    for _ in 0..5 {
        let m = rng.gen_range(1..=2);
        let d = rng.gen_range(1..=2);
        let e = rng.gen_range(1..=3);
        let q = random_unitary(&mut rng, m, e);
        let (x, y) = t_identity_defects(&q, m, d);
        if x.is_zero() && y.is_zero() {
            random_ok += 1;
        }
    }
    outcome(hand && a.is_zero() && b.is_zero() && random_ok == 5, format!("hand division {hand}, random identities {random_ok}/5"))
}

fn end_to_end(p: &ApproxProblem, reference: &Jet) -> (Outcome, ApproxResult) {
    let r = approximate_into_variety(p).unwrap();
    let report = verify_result(p, &r);
    let variety = report.per_nu.iter().map(|n| n.variety_residual).fold(0.0, f64::max);
    let ann = report.per_nu.iter().flat_map(|n| n.annihilator_residuals.iter().cloned()).fold(0.0, f64::max);
    let errors: Vec<f64> = r.approximations.iter().map(|a| a.functions[0].branch.max_abs_diff(reference)).collect();
    let monotone = errors.windows(2).all(|w| w[1] <= w[0]);
    let passed = variety <= RESIDUAL_TOL && ann <= RESIDUAL_TOL && monotone && r.degrees_stable() && report.passed;
    let errs: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
    let detail = format!(
        "variety {variety:.1e}, annihilators {ann:.1e}, errors [{}], degrees {:?}",
        errs.join(", "),
        r.degree_table().first().cloned().unwrap_or_default()
    );
    (outcome(passed, detail), r)
}

fn hyperbola_run() -> Outcome {
    end_to_end(&hyperbola(), &exp_jet(1)).0
}

fn circle_run() -> Outcome {
    end_to_end(&circle(), &cos_jet()).0
}

fn trivial_run() -> Outcome {
    let p = free_target();
    let r = approximate_into_variety(&p).unwrap();
    let input = exp_jet(1);
    let ok = r.approximations.iter().all(|a| {
        let f = &a.functions[0];
        f.degree() == 1 && f.branch.max_abs_diff(&input.taylor_truncate(a.nu)) == 0.0
    });
    outcome(ok, "outputs equal Taylor truncations, annihilators of degree 1")
}

fn x_jet(coeffs: &[f64]) -> Jet {
    let terms: Vec<(Vec<u32>, f64)> = coeffs.iter().enumerate().map(|(k, c)| (vec![k as u32], *c)).collect();
    Jet::from_f64_terms(1, ORDER, JetCtx::default(), &terms)
}

/// Residual of the corrected root and whether the shift bound holds at every sample.
fn correction_case(a: &ZPoly, alpha: &Jet, c: &Jet) -> Result<(f64, bool), String> {
    let cfg = TougeronConfig::default();
    let out = tougeron_correct(a, alpha, c, &cfg).map_err(|e| e.to_string())?;
    let samples = polydisc_samples(alpha.nvars(), 0.5, 100);
    let bound = 2.0 * sup_on_samples(&(c * &a.derivative().eval(alpha)), &samples);
    let shift = &out.b - alpha;
    Ok((a.eval(&out.b).max_abs(), samples.iter().all(|p| shift.eval_f64(p).norm() <= bound)))
}

fn tougeron_suite() -> Outcome {
    let defect = |a: &ZPoly, alpha: &Jet| {
        let slope = a.derivative().eval(alpha);
        &a.eval(alpha) * &(&slope * &slope).invert_unit(1e-12).unwrap()
    };
    let a = ZPoly::new(vec![x_jet(&[-1.0, -1.0]), x_jet(&[0.0]), x_jet(&[1.0])]);
    let alpha = x_jet(&[1.0, 0.5]);
    let mut worst = 0.0f64;
    let mut bounds = true;
    let mut failures = Vec::new();
    match correction_case(&a, &alpha, &defect(&a, &alpha)) {
        Ok((r, b)) => {
            worst = worst.max(r);
            bounds &= b;
        }
        Err(e) => failures.push(e),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    for _ in 0..50 {
        // A = z^2 + p z − q with a simple root near alpha(0).
        let root = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let q: Vec<f64> = (0..3).map(|k| if k == 0 { root * root + p[0] * root } else { rng.gen_range(-0.5..0.5) }).collect();
        let a = ZPoly::new(vec![x_jet(&q).scale(&Cx::from_f64(-1.0, 0.0, 128)), x_jet(&p), x_jet(&[1.0])]);
        let alpha = x_jet(&[root, rng.gen_range(-0.3..0.3), rng.gen_range(-0.1..0.1)]);
        match correction_case(&a, &alpha, &defect(&a, &alpha)) {
            Ok((r, b)) => {
                worst = worst.max(r);
                bounds &= b;
            }
            Err(e) => failures.push(e),
        }
    }
    outcome(worst <= IDENTITY_TOL && bounds && failures.is_empty(), format!("worst residual {worst:.1e}, bounds hold {bounds}, failures {}", failures.len()))
}

/// Brute-force Sylvester determinant by cofactor expansion along the first column.
fn sylvester_det(f: &MultiPoly, g: &MultiPoly, var: usize) -> MultiPoly {
    let n = f.nvars();
    let (cf, cg) = (f.coeffs_in(var), g.coeffs_in(var));
    let (p, q) = (cf.len() - 1, cg.len() - 1);
    let size = p + q;
    let mut rows: Vec<Vec<MultiPoly>> = Vec::with_capacity(size);
    for (coeffs, shifts) in [(&cf, q), (&cg, p)] {
        let deg = coeffs.len() - 1;
        for s in 0..shifts {
            let mut row = vec![MultiPoly::zero(n); size];
            for (k, c) in coeffs.iter().enumerate() {
                row[s + deg - k] = c.clone();
            }
            rows.push(row);
        }
    }
    fn det(m: &[Vec<MultiPoly>], cols: &[usize], n: usize) -> MultiPoly {
        let Some((&first, rest)) = cols.split_first() else { return MultiPoly::one(n) };
        let mut total = MultiPoly::zero(n);
        for (i, row) in m.iter().enumerate() {
            if row[first].is_zero() {
                continue;
            }
            let minor: Vec<Vec<MultiPoly>> = m.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
            let term = &row[first] * &det(&minor, rest, n);
            total = if i % 2 == 0 { &total + &term } else { &total - &term };
        }
        total
    }
    let cols: Vec<usize> = (0..size).collect();
    det(&rows, &cols, n)
}

fn exact_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let random = |rng: &mut ChaCha8Rng| {
        let deg = rng.gen_range(1..=4);
        let mut f = MultiPoly::zero(2);
        for k in 0..=deg {
            let c = &MultiPoly::from_int(2, rng.gen_range(-4..=4)) + &MultiPoly::var(2, 0).scale(&rat(rng.gen_range(-2..=2), 1));
            let c = if k == deg && c.is_zero() { MultiPoly::one(2) } else { c };
            f = &f + &(&c * &MultiPoly::var(2, 1).pow(k));
        }
        f
    };
    let mut agree = 0;
    for _ in 0..50 {
        let (f, g) = (random(&mut rng), random(&mut rng));
        if resultant(&f, &g, 1).unwrap() == sylvester_det(&f, &g, 1) {
            agree += 1;
        }
    }
    let v = ["a", "b", "c", "z"];
    let disc = |t: &str| discriminant(&UniOverPoly::from_multi(&poly(t, &v), 3).unwrap()).unwrap();
    let quad = disc("a*z^2 + b*z + c") == poly("b^2 - 4*a*c", &v);
    let cubic = disc("z^3 + a*z + b") == poly("-4*a^3 - 27*b^2", &v);
    let tv = ["t", "u", "v"];
    let gb = groebner_basis(&[poly("u - t^2", &tv), poly("v - t^3", &tv)], &MonomialOrder::Lex).unwrap();
    let el = eliminate(&gb, &[0]).unwrap();
    let twisted = el.generators().len() == 1 && el.generators()[0].make_monic() == poly("v^2 - u^3", &tv).make_monic();
    outcome(
        agree == 50 && quad && cubic && twisted,
        format!("sylvester {agree}/50, quadratic {quad}, cubic {cubic}, eliminant {twisted}"),
    )
}

fn weierstrass_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let ctx = JetCtx::default();
    let mut worst = 0.0f64;
    let mut degrees_ok = true;
    let mut errors = 0;
    for _ in 0..100 {
        let d: u32 = rng.gen_range(1..=3);
        let mut terms = vec![(vec![0, d], 1.0), (vec![0, 0], 0.0)];
        // Unit times a Weierstrass polynomial, plus a term above x2^d.
        for k in 0..d {
            for e in 1..=3 {
                terms.push((vec![e, k], rng.gen_range(-1.0..1.0)));
            }
        }
        terms.push((vec![1, d], rng.gen_range(-1.0..1.0)));
        terms.push((vec![0, d + 1], rng.gen_range(-1.0..1.0)));
        let u = Jet::from_f64_terms(2, ORDER, ctx, &terms).scale(&Cx::from_f64(rng.gen_range(0.5..2.0), 0.0, 128));
        let p = match weierstrass_prepare(&u, 1e-12) {
            Ok(p) => p,
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        degrees_ok &= p.d == d;
        worst = worst.max((&(&p.unit * &p.w.to_jet()) - &u).max_abs_upto(ORDER - d));
        let power = rng.gen_range(1..=2u32);
        if power * d > ORDER {
            continue;
        }
        let f_terms: Vec<(Vec<u32>, f64)> =
            (0..12).map(|_| (vec![rng.gen_range(0..=4), rng.gen_range(0..=4)], rng.gen_range(-1.0..1.0))).collect();
        let f = Jet::from_f64_terms(2, ORDER, ctx, &f_terms);
        let w: JetPoly = p.w.clone();
        match weierstrass_divide(&f, &w, power) {
            Ok((h, r)) => {
                let gap = (&(&(&h * &w.to_jet().pow(power)) + &r.to_jet()) - &f).max_abs_upto(r.valid_order());
                worst = worst.max(gap);
                degrees_ok &= (r.degree().unwrap_or(0) as u32) < power * d;
            }
            Err(_) => errors += 1,
        }
    }
    outcome(worst <= IDENTITY_TOL && degrees_ok && errors == 0, format!("worst identity residual {worst:.1e}, remainder degrees {degrees_ok}, errors {errors}"))
}

fn variety(base: &[&str], fiber: &[&str], gens: &[&str]) -> VarietySpec {
    VarietySpec::from_json(&VarietyJson {
        base_vars: names(base),
        fiber_vars: names(fiber),
        declared_dim: base.len(),
        generators: gens.iter().map(|s| s.to_string()).collect(),
    })
    .unwrap()
}

fn genericity_and_descent() -> Outcome {
    let hyper = variety(&["y"], &["v"], &["y*v - 1"]);
    let (rec, moved) = find_proper_position(&hyper, SEED, 16, 0).unwrap();
    let (rec2, _) = find_proper_position(&hyper, SEED, 16, 0).unwrap();
    let repaired = !rec.is_identity() && nash_approx::elim::properness_check(&moved).certified && rec == rec2;

    let pair = variety(&["y"], &["v1", "v2"], &["v1^2 - y", "v2 - v1"]);
    let bad = !form_is_admissible(&pair, &[rat(1, 1), rat(-1, 1)], 2).unwrap();
    let good = form_is_admissible(&pair, &[rat(1, 1), rat(0, 1)], 2).unwrap();

    let square = variety(&["y"], &["v"], &["v^2 - y^2"]);
    let zero = Jet::zero(1, ORDER, JetCtx::default());
    let run = || {
        let p = ApproxProblem::new(square.clone(), names(&["x"]), vec![zero.clone(), zero.clone()], vec![1, 2], ApproxConfig::default()).unwrap();
        approximate_into_variety(&p).unwrap()
    };
    let (r1, r2) = (run(), run());
    let same = ResultJson::from_result(&r1).to_text() == ResultJson::from_result(&r2).to_text();
    let descended = r1.trace.descents.len() == 1 && same;
    outcome(
        repaired && bad && good && descended,
        format!("repair {repaired}, L=v1-v2 rejected {bad}, L=v1 accepted {good}, one deterministic descent {descended}"),
    )
}

fn bump(j: &Jet, exp: u32) -> Jet {
    let delta = Jet::from_f64_terms(1, j.order(), j.ctx(), &[(vec![exp], FAULT)]);
    (j + &delta).with_valid_order(j.valid_order())
}

fn fault_injection() -> Outcome {
    let mut injected = 0;
    let mut missed = Vec::new();
    for (name, p) in [("hyperbola", hyperbola()), ("circle", circle()), ("trivial", free_target())] {
        let r = approximate_into_variety(&p).unwrap();
        for k in 0..r.approximations.len() {
            for c in 0..r.approximations[k].functions.len() {
                for exp in 0..=ORDER {
                    let mut bad = r.clone();
                    let f = &mut bad.approximations[k].functions[c];
                    f.branch = bump(&f.branch, exp);
                    injected += 1;
                    if verify_result(&p, &bad).passed {
                        missed.push(format!("{name} nu#{k} c{c} x^{exp}"));
                    }
                }
            }
        }
    }
    outcome(missed.is_empty(), format!("{} of {injected} faults detected {}", injected - missed.len(), missed.join(" ")))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("symbolic division-system identity", t_system, 10),
        ("end-to-end uv = 1", hyperbola_run, 60),
        ("end-to-end circle", circle_run, 60),
        ("trivial-variety degeneration", trivial_run, 5),
        ("root-correction suite", tougeron_suite, 30),
        ("exact-kernel oracles", exact_kernel, 30),
        ("Weierstrass suite", weierstrass_suite, 30),
        ("genericity and descent", genericity_and_descent, 10),
        ("fault injection", fault_injection, 120),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let passed = out.passed && in_time;
        println!(
            "criterion {}: {} {name} ({:.2} s, limit {limit} s): {}",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            out.detail
        );
        if !passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
