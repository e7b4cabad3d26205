//! End-to-end runs of the approximation pipeline on one-variable problems.

mod common;

use common::*;
use nash_approx::approx::{approximate_solution, ApproxConfig, ApproxProblem};
use nash_approx::elim::{VarietyJson, VarietySpec};
use nash_approx::poly::parse_poly;
use nash_approx::{approximate_into_variety, Jet, JetCtx};

#[test]
fn hyperbola_in_theorem_mode() {
    let all = names(&["x", "u", "v"]);
    let q = polys(&["u*v - 1"], &all);
    let r = approximate_solution(&q, &all[..1], &all[1..], &[exp_jet(1), exp_jet(-1)], None, nus(), ApproxConfig::default())
        .unwrap();
    assert!(!r.composed);
    assert!(r.degrees_stable());
    let reference = exp_jet(1);
    let mut last = f64::INFINITY;
    for a in &r.approximations {
        let (u, v) = (&a.functions[0].branch, &a.functions[1].branch);
        let one = Jet::one(1, ORDER, JetCtx::default());
        assert!((&(u * v) - &one).max_abs() <= 1e-9);
        for f in &a.functions {
            assert!(f.is_unitary());
            assert!(f.residual() <= 1e-9, "{}", f.residual());
        }
        let err = u.max_abs_diff(&reference);
        assert!(err <= last + 1e-30);
        last = err;
    }
}

#[test]
fn hyperbola_in_variety_mode() {
    let v = VarietySpec::from_json(&VarietyJson {
        base_vars: names(&["u"]),
        fiber_vars: names(&["v"]),
        declared_dim: 1,
        generators: vec!["u*v - 1".into()],
    })
    .unwrap();
    let p = ApproxProblem::new(v, names(&["x"]), vec![exp_jet(1), exp_jet(-1)], nus(), ApproxConfig::default()).unwrap();
    let r = approximate_into_variety(&p).unwrap();
    assert_eq!(r.approximations.len(), 6);
    for a in &r.approximations {
        assert!(a.diagnostics.variety_residual <= 1e-9);
        for f in &a.functions {
            assert!(f.residual() <= 1e-9);
        }
    }
}

#[test]
fn circle_in_theorem_mode() {
    let all = names(&["x", "c", "s"]);
    let q = polys(&["c^2 + s^2 - 1"], &all);
    let r = approximate_solution(&q, &all[..1], &all[1..], &[cos_jet(), sin_jet()], None, nus(), ApproxConfig::default())
        .unwrap();
    assert!(r.degrees_stable());
    for a in &r.approximations {
        assert!(a.diagnostics.variety_residual <= 1e-9);
        for f in &a.functions {
            assert!(f.residual() <= 1e-9);
        }
    }
}

#[test]
fn free_target_gives_taylor_truncations() {
    let all = names(&["x", "y"]);
    let r = approximate_solution(&[], &all[..1], &all[1..], &[exp_jet(1)], None, nus(), ApproxConfig::default()).unwrap();
    for a in &r.approximations {
        let f = &a.functions[0];
        assert_eq!(f.degree(), 1);
        assert_eq!(f.branch, exp_jet(1).taylor_truncate(a.nu).with_valid_order(f.valid_order()));
    }
}

#[test]
fn square_root_hypersurface() {
    let root = sqrt_jet();
    let all = names(&["x", "z"]);
    let q = polys(&["z^2 - 1 - x"], &all);
    let r = approximate_solution(&q, &all[..1], &all[1..], std::slice::from_ref(&root), None, nus(), ApproxConfig::default()).unwrap();
    let errors: Vec<f64> = r.approximations.iter().map(|a| a.functions[0].branch.max_abs_diff(&root)).collect();
    assert!(errors.windows(2).all(|w| w[1] <= w[0] + 1e-30), "{errors:?}");
    for a in &r.approximations {
        assert!(a.functions[0].residual() <= 1e-9);
    }
}

#[test]
fn polynomial_solutions_are_reproduced() {
    let all = names(&["x", "y"]);
    let q = polys(&["y - x^2 - 3*x"], &all);
    let f = Jet::from_poly(&parse_poly("x^2 + 3*x", &all[..1]).unwrap(), ORDER, JetCtx::default());
    let r = approximate_solution(&q, &all[..1], &all[1..], std::slice::from_ref(&f), None, nus(), ApproxConfig::default()).unwrap();
    for a in &r.approximations {
        assert_eq!(a.functions[0].branch.max_abs_diff(&f), 0.0);
        assert_eq!(a.functions[0].residual(), 0.0);
    }
}

#[test]
fn vanishing_discriminant_descends() {
    let v = VarietySpec::from_json(&VarietyJson {
        base_vars: names(&["y"]),
        fiber_vars: names(&["v"]),
        declared_dim: 1,
        generators: vec!["v^2 - y^2".into()],
    })
    .unwrap();
    let zero = Jet::zero(1, ORDER, JetCtx::default());
    let p = ApproxProblem::new(v, names(&["x"]), vec![zero.clone(), zero.clone()], vec![1, 2], ApproxConfig::default())
        .unwrap();
    let r = approximate_into_variety(&p).unwrap();
    assert_eq!(r.trace.descents.len(), 1);
    for a in &r.approximations {
        for f in &a.functions {
            assert!(f.branch.is_zero());
            assert!(f.is_unitary());
        }
    }
}

#[test]
fn two_variables_recurse_through_the_division_system() {
    let v = VarietySpec::from_json(&VarietyJson {
        base_vars: names(&["y"]),
        fiber_vars: names(&["v"]),
        declared_dim: 1,
        generators: vec!["v^2 - y".into()],
    })
    .unwrap();
    let xs = names(&["x1", "x2"]);
    let s = Jet::from_poly(&parse_poly("x1 + x2 + x1*x2", &xs).unwrap(), 6, JetCtx::default());
    let p = ApproxProblem::new(v, xs, vec![&s * &s, s.clone()], vec![1, 2, 3], ApproxConfig::default()).unwrap();
    let r = approximate_into_variety(&p).unwrap();
    assert_eq!(r.trace.weierstrass_degree, 1);
    assert!(r.trace.recursion.is_some());
    for a in &r.approximations {
        assert_eq!(a.diagnostics.variety_residual, 0.0);
        assert!(a.functions.iter().all(|f| f.is_unitary() && f.residual() == 0.0));
        // Agreement with the input through degree ν.
        assert!((&a.functions[1].branch - &s).taylor_truncate(a.nu).max_abs() < 1e-30);
    }
}
