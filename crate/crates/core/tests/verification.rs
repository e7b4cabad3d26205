//! Verification of pipeline results: clean runs pass, injected faults fail,
//! and reports survive a JSON round trip of the result.

mod common;

use common::*;
use nash_approx::approx::{ApproxProblem, ApproxResult, ResultJson};
use nash_approx::verify::convergence_table;
use nash_approx::{approximate_into_variety, verify_result, Jet, JetCtx};

fn run(p: &ApproxProblem) -> ApproxResult {
    approximate_into_variety(p).unwrap()
}

fn bump(j: &Jet, exp: u32) -> Jet {
    let delta = Jet::from_f64_terms(1, j.order(), j.ctx(), &[(vec![exp], 1e-3)]);
    (j + &delta).with_valid_order(j.valid_order())
}

#[test]
fn clean_runs_pass() {
    for p in [hyperbola(), circle(), free_target()] {
        let r = run(&p);
        let report = verify_result(&p, &r);
        assert!(report.passed, "{}", report.to_text());
        assert_eq!(report.per_nu.len(), 6);
    }
}

#[test]
fn free_target_residuals_are_exactly_zero() {
    let p = free_target();
    let report = verify_result(&p, &run(&p));
    for r in &report.per_nu {
        assert_eq!(r.variety_residual, 0.0);
        assert!(r.annihilator_residuals.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn hyperbola_errors_do_not_increase() {
    let p = hyperbola();
    let report = verify_result(&p, &run(&p));
    let errors: Vec<f64> = report.convergence.iter().map(|c| c.errors[0]).collect();
    assert_eq!(errors.len(), 6);
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");
    assert!(errors[5] < errors[0]);
}

#[test]
fn verdicts_agree_with_pipeline_diagnostics() {
    for p in [hyperbola(), circle(), free_target()] {
        let r = run(&p);
        let report = verify_result(&p, &r);
        for (a, v) in r.approximations.iter().zip(&report.per_nu) {
            let tol = p.config.tolerance;
            assert_eq!(a.diagnostics.variety_residual <= tol, v.variety_residual <= tol);
            for (x, y) in a.diagnostics.annihilator_residuals.iter().zip(&v.annihilator_residuals) {
                assert_eq!(*x <= tol, *y <= tol);
            }
            if let Some(key) = v.key_identity_residual {
                assert_eq!(a.diagnostics.key_identity_residual <= tol, key <= tol);
            }
            assert_eq!(a.diagnostics.tougeron.bound_holds, v.tougeron_margin.is_none_or(|m| m >= 0.0));
        }
    }
}

#[test]
fn every_single_coefficient_fault_is_caught() {
    for p in [hyperbola(), circle(), free_target()] {
        let r = run(&p);
        for k in 0..r.approximations.len() {
            for c in 0..r.approximations[k].functions.len() {
                for exp in 0..=ORDER {
                    let mut bad = r.clone();
                    let f = &mut bad.approximations[k].functions[c];
                    f.branch = bump(&f.branch, exp);
                    let report = verify_result(&p, &bad);
                    assert!(!report.passed, "undetected fault at ν index {k}, component {c}, degree {exp}");
                }
            }
        }
    }
}

#[test]
fn annihilator_faults_are_caught() {
    let p = hyperbola();
    let r = run(&p);
    let mut bad = r.clone();
    let f = &mut bad.approximations[2].functions[1];
    let mut m = f.annihilator.to_multi();
    m = &m + &nash_approx::MultiPoly::constant(m.nvars(), rat(1, 1000));
    f.annihilator = nash_approx::UniOverPoly::from_multi(&m, 1).unwrap();
    let report = verify_result(&p, &bad);
    assert!(!report.passed);
    assert!(!report.check_passed("annihilator_residual"));
}

#[test]
fn reports_survive_a_json_round_trip() {
    for p in [hyperbola(), circle(), free_target()] {
        let r = run(&p);
        let js = ResultJson::from_result(&r);
        let text = js.to_text();
        let back: ResultJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, js);
        let parsed = back.to_result(p.config.jet_ctx()).unwrap();
        assert_eq!(verify_result(&p, &parsed).to_json(), verify_result(&p, &r).to_json());
    }
}

#[test]
fn convergence_table_shapes() {
    let p = free_target();
    let mut r = run(&p);
    let reference = &p.solution_jet[1..];
    assert_eq!(convergence_table(&r, reference, 0.5).unwrap().len(), 6);
    r.approximations.truncate(1);
    let rows = convergence_table(&r, reference, 0.5).unwrap();
    assert_eq!(rows.len(), 1);
    // Against its own outputs the table is all zero.
    let own: Vec<Jet> = r.approximations[0].functions.iter().map(|f| f.branch.clone()).collect();
    let rows = convergence_table(&r, &own, 0.5).unwrap();
    assert_eq!(rows[0].max_error, 0.0);
    assert!(convergence_table(&r, &[Jet::zero(1, 3, JetCtx::default())], 0.5).is_err());
}
