//! Series oracles and problem builders shared by the integration tests.
#![allow(dead_code)]

use nash_approx::approx::{graph_problem, ApproxConfig, ApproxProblem};
use nash_approx::poly::{parse_poly, GaussRat, MultiPoly, UniOverPoly};
use nash_approx::{Jet, JetCtx};
use num::{BigInt, BigRational};

pub const ORDER: u32 = 8;

pub fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn rat(p: i64, q: i64) -> GaussRat {
    GaussRat::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
}

pub fn factorial(k: u32) -> i64 {
    (1..=k as i64).product()
}

/// Taylor coefficients of `exp(sign·x)`.
pub fn exp_jet(sign: i64) -> Jet {
    let c: Vec<GaussRat> = (0..=ORDER).map(|k| rat(sign.pow(k), factorial(k))).collect();
    Jet::univariate_from_gauss(ORDER, JetCtx::default(), &c)
}

pub fn cos_jet() -> Jet {
    let c: Vec<GaussRat> =
        (0..=ORDER).map(|k| if k % 2 == 1 { rat(0, 1) } else { rat((-1i64).pow(k / 2), factorial(k)) }).collect();
    Jet::univariate_from_gauss(ORDER, JetCtx::default(), &c)
}

pub fn sin_jet() -> Jet {
    let c: Vec<GaussRat> =
        (0..=ORDER).map(|k| if k % 2 == 0 { rat(0, 1) } else { rat((-1i64).pow(k / 2), factorial(k)) }).collect();
    Jet::univariate_from_gauss(ORDER, JetCtx::default(), &c)
}

pub fn polys(texts: &[&str], vars: &[String]) -> Vec<MultiPoly> {
    texts.iter().map(|t| parse_poly(t, vars).unwrap()).collect()
}

pub fn nus() -> Vec<u32> {
    (1..=6).collect()
}

/// Binomial series of `sqrt(1 + x)`.
pub fn sqrt_jet() -> Jet {
    let mut c = vec![rat(1, 1)];
    for k in 1..=ORDER as i64 {
        let prev = c[k as usize - 1].clone();
        c.push(&prev * &rat(3 - 2 * k, 2 * k));
    }
    Jet::univariate_from_gauss(ORDER, JetCtx::default(), &c)
}

/// `Q(x, y) = 0` with the jets of a solution, as a graph problem.
pub fn theorem_problem(vars: &[&str], q: &[&str], jets: Vec<Jet>) -> ApproxProblem {
    let all = names(vars);
    graph_problem(&polys(q, &all), &all[..1], &all[1..], &jets, None, nus(), ApproxConfig::default()).unwrap()
}

pub fn hyperbola() -> ApproxProblem {
    theorem_problem(&["x", "u", "v"], &["u*v - 1"], vec![exp_jet(1), exp_jet(-1)])
}

pub fn circle() -> ApproxProblem {
    theorem_problem(&["x", "c", "s"], &["c^2 + s^2 - 1"], vec![cos_jet(), sin_jet()])
}

pub fn free_target() -> ApproxProblem {
    theorem_problem(&["x", "y"], &[], vec![exp_jet(1)])
}

/// Both defining identities, rebuilt from the symbol names.
pub fn t_identity_defects(p: &UniOverPoly, m: usize, d: usize) -> (MultiPoly, MultiPoly) {
    let sys = nash_approx::approx::build_t_system(p, m, d).unwrap();
    let sy = sys.symbols().to_vec();
    let n = sy.len();
    let term = |t: String| parse_poly(&t, &sy).unwrap();
    let mut c = format!("xn^{d}");
    for k in 1..=d {
        c += &format!(" + a{k}*xn^{}", d - k);
    }
    let remainder = |prefix: &str| {
        let parts: Vec<String> = (0..2 * d).map(|k| format!("{prefix}{k}*xn^{}", 2 * d - 1 - k)).collect();
        term(parts.join(" + "))
    };
    let c = term(c);
    let c2 = &c * &c;
    let mut alpha: Vec<MultiPoly> =
        (1..=m).map(|j| &(&c2 * &term(format!("S{j}"))) + &remainder(&format!("b{j}_"))).collect();
    alpha.push(&(&c2 * &term("St".into())) + &remainder("c"));
    let ncoef = sys.coefficient_count();
    let embed: Vec<usize> = (1..=ncoef).collect();
    let xn = term("xn".into());
    let t = |k: usize| sys.equations()[k - 1].remap(n, &embed);
    let mut lhs = &p.to_multi().compose(&alpha) - &(sys.square_quotient() * &c2);
    for k in 1..=2 * d {
        lhs = &lhs - &(&xn.pow((2 * d - k) as u32) * &t(k));
    }
    let mut lhs_d = &p.derivative().compose(&alpha) - &(sys.derivative_quotient() * &c);
    for k in 1..=d {
        lhs_d = &lhs_d - &(&xn.pow((d - k) as u32) * &t(2 * d + k));
    }
    (lhs, lhs_d)
}
