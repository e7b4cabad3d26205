//! Reassembly of approximate roots from approximated division coefficients,
//! exact correction of the root of `P_L` and lifting to the fiber coordinates.

use crate::elim::{coordinate_form, optimal_polynomial_unchecked};
use crate::jet::{eval_poly_at_jets_like, newton_solve, tougeron_correct, Jet, JetSystem, ZPoly};
use crate::poly::MultiPoly;

use super::division::DivisionData;
use super::reduce::Reduction;
use super::{ApproxConfig, ApproxError, AtStage, Stage, TSystem, TougeronSummary};

/// Reassembled data at one ν, in the moved source coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidates {
    pub nu: u32,
    /// `f_j^ν = H_j^ν·W_ν² + r_{j,ν}`.
    pub base_values: Vec<Jet>,
    /// `f̄^ν = H̃^ν·W_ν² + r̃_ν`.
    pub approximate_root: Jet,
    /// `R^ν = W̃/W̄²` evaluated on the approximations.
    pub defect: Jet,
    /// `W_ν`.
    pub weierstrass: Jet,
    /// Truncated quotients `H_j^ν`, exact polynomials.
    pub quotients: Vec<Jet>,
    pub tilde_quotient: Jet,
    /// Largest coefficient of `P_L(f^ν, f̄^ν) − R^ν·(∂P_L/∂z(f^ν, f̄^ν))²`.
    pub key_identity_residual: f64,
}

/// Truncates the quotients at degree `nu`, rebuilds `W_ν` and the remainders from
/// `coeffs` (jets in all but the last source variable) and forms `R^ν`.
pub fn assemble_candidates(
    sys: &TSystem,
    div: &DivisionData,
    coeffs: &[Jet],
    nu: u32,
    cfg: &ApproxConfig,
    depth: usize,
) -> Result<Candidates, ApproxError> {
    let stage = Stage::Assembly;
    let shape = &div.form_value;
    let (n, order, ctx) = (shape.nvars(), shape.order(), shape.ctx());
    let (d, m) = (sys.degree(), sys.base_dim());
    if coeffs.len() != sys.coefficient_count() {
        return Err(ApproxError::at(stage, depth, "coefficient count does not match the division system"));
    }
    let lift: Vec<usize> = (0..n - 1).collect();
    let exact_valid = coeffs.iter().map(|c| c.valid_order()).min().unwrap_or(order);
    let embedded: Vec<Jet> = coeffs.iter().map(|c| c.remap(n, &lift).with_valid_order(exact_valid)).collect();
    let xn = Jet::var(n, order, ctx, n - 1);
    let mut w = xn.pow(d as u32);
    for k in 1..=d {
        w = &w + &(&embedded[k - 1] * &xn.pow((d - k) as u32));
    }
    let remainder = |offset: usize| -> Jet {
        let mut r = Jet::zero(n, order, ctx);
        for k in 0..2 * d {
            r = &r + &(&embedded[offset + k] * &xn.pow((2 * d - 1 - k) as u32));
        }
        r
    };
    let truncate = |h: &Jet| h.taylor_truncate(nu).with_valid_order(order);
    let w2 = &w * &w;
    let quotients: Vec<Jet> = div.quotients.iter().map(truncate).collect();
    let tilde_quotient = truncate(&div.tilde_quotient);
    let finish = |j: Jet| j.with_valid_order(exact_valid);
    let base_values: Vec<Jet> =
        (0..m).map(|j| finish(&(&quotients[j] * &w2) + &remainder(d + 2 * d * j))).collect();
    let approximate_root = finish(&(&tilde_quotient * &w2) + &remainder(d + 2 * d * m));

    let mut args = vec![xn.clone()];
    args.extend(embedded.iter().cloned());
    args.extend(quotients.iter().cloned());
    args.push(tilde_quotient.clone());
    let wt = eval_poly_at_jets_like(sys.square_quotient(), &args, &xn);
    let wb = eval_poly_at_jets_like(sys.derivative_quotient(), &args, &xn);
    let inv = wb.invert_unit(cfg.tolerance).map_err(|_| {
        ApproxError::at(
            stage,
            depth,
            format!("the derivative quotient is not a unit at ν = {nu}; raise ν or the jet order"),
        )
    })?;
    let defect = finish(&wt * &(&inv * &inv));

    let a = ZPoly::from_multipoly_like(&sys.optimal_polynomial().to_multi(), m, &base_values, shape);
    let value = a.eval(&approximate_root);
    let slope = a.derivative().eval(&approximate_root);
    let key = &value - &(&defect * &(&slope * &slope));
    Ok(Candidates {
        nu,
        base_values,
        approximate_root,
        defect,
        weierstrass: w,
        quotients,
        tilde_quotient,
        key_identity_residual: key.max_abs_upto(exact_valid),
    })
}

/// Polynomials of the lifting system in `(y_1…y_m, w, v_1…v_s)`: the generators of
/// the working variety, the squarefree coordinate eliminants of the fiber
/// coordinates (which keep the Jacobian regular on non-reduced ideals) and `L(v) − w`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftSystem {
    pub base_dim: usize,
    pub fiber_dim: usize,
    pub polys: Vec<MultiPoly>,
}

impl LiftSystem {
    pub fn new(red: &Reduction) -> Result<LiftSystem, ApproxError> {
        let (m, s) = (red.base_dim(), red.fiber_dim());
        if s == 0 {
            return Ok(LiftSystem { base_dim: m, fiber_dim: 0, polys: Vec::new() });
        }
        let total = m + 1 + s;
        let ambient: Vec<usize> = (0..m).chain(m + 1..total).collect();
        let mut polys: Vec<MultiPoly> = red.variety.generators().iter().map(|g| g.remap(total, &ambient)).collect();
        for j in 0..s {
            let p = optimal_polynomial_unchecked(&red.variety, &coordinate_form(s, j))
                .map_err(|e| ApproxError::internal(e.to_string()))?;
            let map: Vec<usize> = (0..m).chain(std::iter::once(m + 1 + j)).collect();
            let e = p.to_multi().remap(total, &map);
            if !polys.contains(&e) {
                polys.push(e);
            }
        }
        let mut lin = MultiPoly::var(total, m).scale(&crate::poly::GaussRat::from_int(-1));
        for (j, c) in red.form.iter().enumerate() {
            lin = &lin + &MultiPoly::var(total, m + 1 + j).scale(c);
        }
        polys.push(lin);
        Ok(LiftSystem { base_dim: m, fiber_dim: s, polys })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lifted {
    /// `f̃^ν`, an exact root of `P_L(f^ν, z)`.
    pub corrected_root: Jet,
    /// `G^ν` with `L(G^ν) = f̃^ν`, on the variety over `f^ν`.
    pub fiber_values: Vec<Jet>,
    pub tougeron: TougeronSummary,
    pub newton_iterations: usize,
    pub newton_residual: f64,
}

/// Corrects `f̄^ν` to a root of `P_L(f^ν, z)` and lifts it to the fiber
/// coordinates by Newton iteration started at the input fiber jets.
pub fn correct_and_lift(
    red: &Reduction,
    div: &DivisionData,
    cand: &Candidates,
    lift: &LiftSystem,
    cfg: &ApproxConfig,
    depth: usize,
) -> Result<Lifted, ApproxError> {
    let m = red.base_dim();
    let shape = &div.form_value;
    let a = ZPoly::from_multipoly_like(&red.optimal.to_multi(), m, &cand.base_values, shape);
    let out = tougeron_correct(&a, &cand.approximate_root, &cand.defect, &cfg.tougeron()).at(Stage::Correction, depth)?;
    let tougeron = TougeronSummary {
        iterations: out.iterations,
        residual: out.residual,
        hypothesis_residual: out.hypothesis_residual,
        sup_shift: out.sup_shift,
        sup_bound: out.sup_bound,
        bound_holds: out.bound_holds,
        contraction_estimate: out.contraction_estimate,
    };
    if lift.fiber_dim == 0 {
        return Ok(Lifted {
            corrected_root: out.b,
            fiber_values: Vec::new(),
            tougeron,
            newton_iterations: 0,
            newton_residual: 0.0,
        });
    }
    let mut known = cand.base_values.clone();
    known.push(out.b.clone());
    let system = JetSystem::from_polys(&lift.polys, &known, lift.fiber_dim);
    let newton = newton_solve(&system, &div.jets[m..], &cfg.newton()).at(Stage::Lift, depth)?;
    let valid = out.b.valid_order();
    let fiber_values = newton.solution.into_iter().map(|j| { let v = valid.min(j.valid_order()); j.with_valid_order(v) }).collect();
    Ok(Lifted {
        corrected_root: out.b,
        fiber_values,
        tougeron,
        newton_iterations: newton.iterations,
        newton_residual: newton.residual,
    })
}
