//! Property tests of the division system and of the approximation pipeline on
//! random one-variable problems.

mod common;

use common::{names, t_identity_defects};
use nash_approx::approx::{approximate_solution, ApproxConfig};
use nash_approx::poly::parse_poly;
use nash_approx::{verify_result, GaussRat, Jet, JetCtx, MultiPoly, UniOverPoly};
use proptest::prelude::*;

/// Unitary `z^e + Σ_{k<e} p_k(y) z^k` in `m + 1` variables, `p_k` of degree ≤ 1.
fn unitary(m: usize) -> impl Strategy<Value = UniOverPoly> {
    (1usize..=3).prop_flat_map(move |e| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, m + 1), e).prop_map(move |rows| {
            let n = m + 1;
            let z = MultiPoly::var(n, m);
            let mut p = z.pow(e as u32);
            for (k, row) in rows.iter().enumerate() {
                let mut c = MultiPoly::from_int(n, row[0]);
                for (j, &a) in row[1..].iter().enumerate() {
                    c = &c + &MultiPoly::var(n, j).scale(&GaussRat::from_int(a));
                }
                p = &p + &(&c * &z.pow(k as u32));
            }
            UniOverPoly::from_multi(&p, m).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn division_system_identities_hold_exactly((m, d, p) in (1usize..=2, 1usize..=2).prop_flat_map(|(m, d)| (Just(m), Just(d), unitary(m)))) {
        prop_assume!(p.degree() + 2 * d * m <= 12);
        let (a, b) = t_identity_defects(&p, m, d);
        prop_assert!(a.is_zero());
        prop_assert!(b.is_zero());
    }
}

fn sqrt_jet(a: f64, b: f64, order: u32) -> Jet {
    let ctx = JetCtx::default();
    let r = Jet::from_f64_terms(1, order, ctx, &[(vec![0], 1.0), (vec![1], a), (vec![2], b)]);
    let half = GaussRat::from_ratio(1, 2);
    let mut s = Jet::one(1, order, ctx);
    for _ in 0..8 {
        s = (&s + &(&r * &s.invert_unit(1e-12).unwrap())).scale_gauss(&half);
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn polynomial_graphs_are_reproduced_exactly(coeffs in prop::collection::vec(-4i64..=4, 4)) {
        let all = names(&["x", "y"]);
        let text = format!("{} + {}*x + {}*x^2 + {}*x^3", coeffs[0], coeffs[1], coeffs[2], coeffs[3]);
        let f = parse_poly(&text, &all[..1]).unwrap();
        let q = [&MultiPoly::var(2, 1) - &f.remap(2, &[0])];
        let jet = Jet::from_poly(&f, 6, JetCtx::default());
        let r = approximate_solution(&q, &all[..1], &all[1..], std::slice::from_ref(&jet), None, vec![1, 2, 3], ApproxConfig::default()).unwrap();
        for a in &r.approximations {
            prop_assert_eq!(a.functions[0].branch.max_abs_diff(&jet), 0.0);
            prop_assert_eq!(a.functions[0].residual(), 0.0);
        }
    }

    #[test]
    fn square_roots_satisfy_the_pipeline_invariants(a in -0.9f64..0.9, b in -0.5f64..0.5) {
        let all = names(&["x", "z"]);
        let a_r = GaussRat::from_rational(num_rational(a));
        let b_r = GaussRat::from_rational(num_rational(b));
        let rhs = &(&MultiPoly::one(2) + &MultiPoly::var(2, 0).scale(&a_r)) + &MultiPoly::var(2, 0).pow(2).scale(&b_r);
        let q = [&MultiPoly::var(2, 1).pow(2) - &rhs];
        let root = sqrt_jet(rounded(a), rounded(b), 8);
        let problem = nash_approx::approx::graph_problem(&q, &all[..1], &all[1..], std::slice::from_ref(&root), None, (1..=6).collect(), ApproxConfig::default()).unwrap();
        let r = nash_approx::approximate_into_variety(&problem).unwrap();
        let report = verify_result(&problem, &r);
        prop_assert!(report.passed, "{}", report.to_text());
        prop_assert!(r.degrees_stable());
        let errors: Vec<f64> = report.convergence.iter().map(|c| c.max_error).collect();
        prop_assert!(errors.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)), "{errors:?}");
        for n in &report.per_nu {
            prop_assert!(n.variety_residual <= 1e-9);
            prop_assert!(n.annihilator_residuals.iter().all(|&v| v <= 1e-9));
        }
    }
}

/// Rounds to a short decimal so the equation and the jet share exact coefficients.
fn num_rational(v: f64) -> num::BigRational {
    num::BigRational::new(((v * 64.0).round() as i64).into(), 64.into())
}

fn rounded(v: f64) -> f64 {
    (v * 64.0).round() / 64.0
}
