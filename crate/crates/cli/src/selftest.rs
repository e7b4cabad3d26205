//! The `selftest` subcommand: small bundled checks of each layer, plus stored
//! problem/result fixtures that are re-verified.

use std::io::Write;
use std::path::{Path, PathBuf};

use nash_approx::approx::{approximate_solution, ApproxConfig, ProblemJson, ResultJson};
use nash_approx::elim::{eliminate, groebner_basis};
use nash_approx::jet::{
    polydisc_samples, sup_on_samples, tougeron_correct, weierstrass_divide, weierstrass_prepare, TougeronConfig, ZPoly,
};
use nash_approx::poly::{discriminant, parse_poly, resultant};
use nash_approx::{verify_result, GaussRat, Jet, JetCtx, MonomialOrder, MultiPoly, UniOverPoly};
use serde::{Deserialize, Serialize};

use crate::Exit;

pub const SUITES: &[&str] = &["exact-poly", "elimination", "weierstrass", "tougeron", "pipeline", "fixture"];

/// A problem together with a stored result for it.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub problem: ProblemJson,
    pub result: ResultJson,
}

struct Check {
    name: String,
    passed: bool,
    detail: String,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.to_string(), passed, detail: detail.into() }
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn poly(s: &str, n: &[String]) -> MultiPoly {
    parse_poly(s, n).expect("bundled polynomials parse")
}

fn exact_poly() -> Vec<Check> {
    let n = names(&["a", "b", "c", "z"]);
    let quad = UniOverPoly::from_multi(&poly("a*z^2 + b*z + c", &n), 3).expect("valid");
    let monic_quad = UniOverPoly::from_multi(&poly("z^2 + b*z + c", &n), 3).expect("valid");
    let cubic = UniOverPoly::from_multi(&poly("z^3 + a*z + b", &n), 3).expect("valid");
    let d2 = discriminant(&monic_quad);
    let d3 = discriminant(&cubic);
    let res = resultant(&poly("(z - a)*(z - b)", &n), &poly("z - c", &n), 3);
    let lead = quad.leading_coeff().clone();
    vec![
        check("quadratic discriminant", d2.as_ref().ok() == Some(&poly("b^2 - 4*c", &n)), format!("{d2:?}")),
        check("cubic discriminant", d3.as_ref().ok() == Some(&poly("-4*a^3 - 27*b^2", &n)), format!("{d3:?}")),
        check("resultant of linear factors", res.as_ref().ok() == Some(&poly("(a - c)*(b - c)", &n)), format!("{res:?}")),
        check("leading coefficient", lead == poly("a", &n), ""),
        check(
            "gaussian arithmetic",
            &GaussRat::from_ratio(1, 3) + &GaussRat::from_ratio(2, 3) == GaussRat::from_int(1),
            "",
        ),
    ]
}

fn elimination() -> Vec<Check> {
    let n = names(&["t", "u", "v"]);
    let gb = groebner_basis(&[poly("u - t^2", &n), poly("v - t^3", &n)], &MonomialOrder::Lex);
    let el = gb.as_ref().map_err(|e| e.to_string()).and_then(|g| eliminate(g, &[0]).map_err(|e| e.to_string()));
    let ok = matches!(&el, Ok(b) if b.generators() == [poly("u^3 - v^2", &n)]);
    let unit = groebner_basis(&[poly("t*u - 1", &n), poly("t", &n)], &MonomialOrder::GrLex);
    vec![
        check("twisted cubic eliminant", ok, format!("{:?}", el.map(|b| b.generators().len()))),
        check("inconsistent system gives the unit ideal", matches!(&unit, Ok(b) if b.is_unit()), ""),
    ]
}

fn jet2(order: u32, terms: &[(Vec<u32>, f64)]) -> Jet {
    Jet::from_f64_terms(2, order, JetCtx::default(), terms)
}

fn weierstrass() -> Vec<Check> {
    let order = 8;
    // (1 + x1 + x2^2)(x2^2 - x1 + x1*x2)
    let unit = jet2(order, &[(vec![0, 0], 1.0), (vec![1, 0], 1.0), (vec![0, 2], 1.0)]);
    let w = jet2(order, &[(vec![0, 2], 1.0), (vec![1, 0], -1.0), (vec![1, 1], 1.0)]);
    let u = &unit * &w;
    let mut out = Vec::new();
    match weierstrass_prepare(&u, 1e-12) {
        Ok(p) => {
            let back = (&p.unit * &p.w.to_jet()).max_abs_diff(&u);
            out.push(check("preparation degree", p.d == 2, format!("d = {}", p.d)));
            out.push(check("preparation identity", back <= 1e-10, format!("{back:e}")));
            let f = jet2(order, &[(vec![0, 5], 1.0), (vec![2, 1], 3.0), (vec![1, 0], -2.0)]);
            match weierstrass_divide(&f, &p.w, 1) {
                Ok((h, r)) => {
                    let rebuilt = &(&h * &p.w.to_jet()) + &r.to_jet();
                    let gap = (&rebuilt - &f).max_abs_upto(r.valid_order());
                    out.push(check("division identity", gap <= 1e-10, format!("{gap:e}")));
                    let deg = r.degree().unwrap_or(0);
                    out.push(check("remainder degree below d", deg < 2, format!("degree {deg}")));
                }
                Err(e) => out.push(check("division identity", false, e.to_string())),
            }
        }
        Err(e) => out.push(check("preparation identity", false, e.to_string())),
    }
    out
}

fn x_jet(order: u32, coeffs: &[f64]) -> Jet {
    let terms: Vec<(Vec<u32>, f64)> = coeffs.iter().enumerate().map(|(k, c)| (vec![k as u32], *c)).collect();
    Jet::from_f64_terms(1, order, JetCtx::default(), &terms)
}

fn tougeron() -> Vec<Check> {
    let order = 8;
    let a = ZPoly::new(vec![x_jet(order, &[-1.0, -1.0]), x_jet(order, &[0.0]), x_jet(order, &[1.0])]);
    let alpha = x_jet(order, &[1.0, 0.5]);
    let slope = a.derivative().eval(&alpha);
    let c = match (&slope * &slope).invert_unit(1e-12) {
        Ok(inv) => &a.eval(&alpha) * &inv,
        Err(e) => return vec![check("defect", false, e.to_string())],
    };
    let cfg = TougeronConfig::default();
    match tougeron_correct(&a, &alpha, &c, &cfg) {
        Ok(o) => {
            let residual = a.eval(&o.b).max_abs();
            let samples = polydisc_samples(1, cfg.radius, 100);
            let shift = sup_on_samples(&(&o.b - &alpha), &samples);
            let bound = 2.0 * sup_on_samples(&(&c * &slope), &samples);
            vec![
                check("corrected root is a root", residual <= 1e-10, format!("{residual:e}")),
                check("shift bound", shift <= bound, format!("{shift:e} <= {bound:e}")),
            ]
        }
        Err(e) => vec![check("corrected root is a root", false, e.to_string())],
    }
}

fn exp_jet(order: u32, sign: f64) -> Jet {
    let mut coeffs = Vec::new();
    let mut c = 1.0;
    for k in 0..=order {
        coeffs.push(c);
        c *= sign / (k + 1) as f64;
    }
    x_jet(order, &coeffs)
}

fn pipeline() -> Vec<Check> {
    let all = names(&["x", "u", "v"]);
    let q = [poly("u*v - 1", &all)];
    let jets = [exp_jet(6, 1.0), exp_jet(6, -1.0)];
    let cfg = ApproxConfig::default();
    let run = || approximate_solution(&q, &all[..1], &all[1..], &jets, None, vec![1, 2, 3], cfg.clone());
    match (run(), run()) {
        (Ok(a), Ok(b)) => {
            let ta = ResultJson::from_result(&a).to_text();
            let tb = ResultJson::from_result(&b).to_text();
            let problem = nash_approx::approx::graph_problem(&q, &all[..1], &all[1..], &jets, None, vec![1, 2, 3], cfg.clone());
            let report = problem.map(|p| verify_result(&p, &a));
            vec![
                check("hyperbola verifies", matches!(&report, Ok(r) if r.passed), ""),
                check("repeated runs serialize identically", ta == tb, ""),
            ]
        }
        (Err(e), _) | (_, Err(e)) => vec![check("hyperbola verifies", false, e.to_string())],
    }
}

/// Loads a fixture file.
pub fn load_fixture(path: &Path) -> Result<Fixture, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: malformed fixture: {e}", path.display()))
}

fn fixture_checks(path: &Path, fx: &Fixture) -> Check {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let problem = match fx.problem.build() {
        Ok(p) => p,
        Err(e) => return check(&name, false, e.to_string()),
    };
    let result = match fx.result.to_result(problem.config.jet_ctx()) {
        Ok(r) => r,
        Err(e) => return check(&name, false, e),
    };
    let report = verify_result(&problem, &result);
    let failed: Vec<String> = report.failures().iter().map(|(_, v)| v.check.clone()).collect();
    check(&name, report.passed, failed.join(", "))
}

/// Runs the bundled suites, or only `filter`, and re-verifies each fixture.
pub fn selftest(filter: Option<&str>, fixtures: &[PathBuf], out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    if let Some(f) = filter {
        if !SUITES.contains(&f) {
            let _ = writeln!(err, "input error: unknown suite '{f}' (known: {})", SUITES.join(", "));
            return Exit::Input;
        }
    }
    let mut loaded = Vec::new();
    for path in fixtures {
        match load_fixture(path) {
            Ok(fx) => loaded.push((path.clone(), fx)),
            Err(e) => {
                let _ = writeln!(err, "input error: {e}");
                return Exit::Input;
            }
        }
    }
    let mut failed = 0;
    let mut total = 0;
    for &suite in SUITES {
        if filter.is_some_and(|f| f != suite) {
            continue;
        }
        let checks = match suite {
            "exact-poly" => exact_poly(),
            "elimination" => elimination(),
            "weierstrass" => weierstrass(),
            "tougeron" => tougeron(),
            "pipeline" => pipeline(),
            _ => loaded.iter().map(|(p, fx)| fixture_checks(p, fx)).collect(),
        };
        for c in checks {
            total += 1;
            if !c.passed {
                failed += 1;
            }
            let detail = if c.passed || c.detail.is_empty() { String::new() } else { format!(" ({})", c.detail) };
            let _ = writeln!(out, "{} {suite}: {}{detail}", if c.passed { "PASS" } else { "FAIL" }, c.name);
        }
    }
    let _ = writeln!(out, "{} of {total} checks passed", total - failed);
    if failed == 0 {
        Exit::Pass
    } else {
        Exit::VerifyFailed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_suites_pass() {
        for suite in [exact_poly(), elimination(), weierstrass(), tougeron()] {
            for c in suite {
                assert!(c.passed, "{}: {}", c.name, c.detail);
            }
        }
    }

    #[test]
    fn unknown_filter_is_rejected() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(selftest(Some("nothing"), &[], &mut out, &mut err), Exit::Input);
    }
}
