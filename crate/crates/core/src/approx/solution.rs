//! Solutions of `Q(x, y) = 0`: the graph `x ↦ (x, f(x))` is approximated as a
//! map into the zero set of `Q`, then the source components are inverted away.

use crate::elim::{groebner_basis_in, projection_eliminant, ElimError, MonomialOrder, VarietySpec};
use crate::jet::{solve_jet_linear, Jet};
use crate::poly::{MultiPoly, UniOverPoly};

use super::{
    annihilator_residual, approximate_into_variety, generator_residual, ApproxConfig, ApproxError, ApproxProblem,
    ApproxResult, LevelNu, Stage,
};

/// Source components closer than this to the coordinate functions are taken as exact.
const IDENTITY_THRESHOLD: f64 = 1e-20;

/// Builds the graph problem of `f` in `x × y`-space. The declared dimension
/// defaults to the Krull dimension of the ideal of `Q`.
pub fn graph_problem(
    q: &[MultiPoly],
    x_names: &[String],
    y_names: &[String],
    f_jets: &[Jet],
    declared_dim: Option<usize>,
    nu_list: Vec<u32>,
    config: ApproxConfig,
) -> Result<ApproxProblem, ApproxError> {
    let n = x_names.len();
    let names: Vec<String> = x_names.iter().chain(y_names).cloned().collect();
    if n == 0 {
        return Err(ApproxError::input("at least one source variable is required"));
    }
    if f_jets.len() != y_names.len() {
        return Err(ApproxError::input(format!("{} jets for {} unknowns", f_jets.len(), y_names.len())));
    }
    let Some(shape) = f_jets.first() else {
        return Err(ApproxError::input("at least one unknown is required"));
    };
    if f_jets.iter().any(|j| j.nvars() != n || j.order() != shape.order()) {
        return Err(ApproxError::input("all jets need the source variables and one common order"));
    }
    let mut gens: Vec<MultiPoly> = Vec::new();
    for p in q {
        if p.nvars() != names.len() {
            return Err(ApproxError::input(format!("polynomial in {} variables, expected {}", p.nvars(), names.len())));
        }
        if !p.is_zero() && !gens.contains(p) {
            gens.push(p.clone());
        }
    }
    let dim = match declared_dim {
        Some(d) => d,
        None if gens.is_empty() => names.len(),
        None => {
            let gb = groebner_basis_in(names.len(), &gens, &MonomialOrder::GrLex)
                .map_err(|e| ApproxError::input(e.to_string()))?;
            if gb.is_unit() {
                return Err(ApproxError::input("the system has no solutions"));
            }
            gb.krull_dimension().ok_or_else(|| ApproxError::input("could not determine the dimension"))?
        }
    };
    let variety = VarietySpec::new(names, gens, dim).map_err(|e| ApproxError::input(e.to_string()))?;
    let mut jets: Vec<Jet> = (0..n).map(|i| Jet::var(n, shape.order(), shape.ctx(), i)).collect();
    jets.extend(f_jets.iter().cloned());
    let problem = ApproxProblem {
        variety,
        source_names: x_names.to_vec(),
        solution_jet: jets,
        nu_list,
        config,
        graph_dims: n,
    };
    problem.validate()?;
    Ok(problem)
}

/// Approximates a solution `f` of `Q(x, f(x)) = 0` by Nash solutions.
pub fn approximate_solution(
    q: &[MultiPoly],
    x_names: &[String],
    y_names: &[String],
    f_jets: &[Jet],
    declared_dim: Option<usize>,
    nu_list: Vec<u32>,
    config: ApproxConfig,
) -> Result<ApproxResult, ApproxError> {
    approximate_into_variety(&graph_problem(q, x_names, y_names, f_jets, declared_dim, nu_list, config)?)
}

/// Compositional inverse of a jet map `C^n → C^n` fixing the origin, by Newton
/// iteration on `map ∘ h = id`.
pub fn invert_jet_map(map: &[Jet], tol: f64) -> Result<Vec<Jet>, ApproxError> {
    let stage = Stage::Inversion;
    let n = map.len();
    let Some(shape) = map.first() else {
        return Ok(Vec::new());
    };
    let (order, ctx) = (shape.order(), shape.ctx());
    if map.iter().any(|j| j.nvars() != n) {
        return Err(ApproxError::at(stage, 0, "the map must be square"));
    }
    if map.iter().any(|j| j.constant_term().abs() > tol) {
        return Err(ApproxError::at(stage, 0, "the map does not fix the origin"));
    }
    let valid = map.iter().map(|j| j.valid_order()).min().unwrap_or(order);
    let map: Vec<Jet> = map.iter().map(|j| j.add_constant(&j.constant_term().scale_i64(-1))).collect();
    let ids: Vec<Jet> = (0..n).map(|i| Jet::var(n, order, ctx, i)).collect();
    let partials: Vec<Vec<Jet>> = map.iter().map(|f| (0..n).map(|j| f.derivative(j)).collect()).collect();
    let floor = 2f64.powi(16 - ctx.prec as i32);
    // Start from the inverse of the linear part; each Newton step then doubles the order.
    let linear: Vec<Vec<Jet>> = partials
        .iter()
        .map(|row| row.iter().map(|p| Jet::constant(n, order, ctx, p.constant_term())).collect())
        .collect();
    let mut h = solve_jet_linear(linear, ids.clone(), tol).map_err(|e| ApproxError::at(stage, 0, e))?;
    let steps = 32 - order.max(1).leading_zeros() + 2;
    for _ in 0..steps {
        let residual: Vec<Jet> = map.iter().zip(&ids).map(|(f, x)| &f.compose(&h) - x).collect();
        if residual.iter().all(|r| r.max_abs() <= floor) {
            break;
        }
        let jac: Vec<Vec<Jet>> = partials.iter().map(|row| row.iter().map(|p| p.compose(&h)).collect()).collect();
        let step = solve_jet_linear(jac, residual, tol).map_err(|e| ApproxError::at(stage, 0, e))?;
        h = h.iter().zip(&step).map(|(a, b)| a - b).collect();
    }
    Ok(h.into_iter().map(|j| j.with_valid_order(valid)).collect())
}

/// Replaces the graph components of `level` by `y ∘ h`, where `h` inverts the
/// approximated source components, when those differ from the coordinates.
/// Returns whether a composition took place.
pub(crate) fn normalize_graph(level: &mut LevelNu, problem: &ApproxProblem) -> Result<bool, ApproxError> {
    let n = problem.graph_dims;
    let shape = &level.values[0];
    let ids: Vec<Jet> = (0..n).map(|i| Jet::var(n, shape.order(), shape.ctx(), i)).collect();
    let gap = level.values[..n].iter().zip(&ids).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
    if gap <= IDENTITY_THRESHOLD {
        return Ok(false);
    }
    let stage = Stage::Inversion;
    let cfg = &problem.config;
    let inverse = invert_jet_map(&level.values[..n], cfg.tolerance)?;
    let big_n = level.values.len();
    let base: Vec<usize> = (n..2 * n).collect();
    let mut values = ids;
    let mut annihilators: Vec<UniOverPoly> =
        (0..n).map(|i| UniOverPoly::from_multi(&(&MultiPoly::var(n + 1, n) - &MultiPoly::var(n + 1, i)), n)).collect::<Result<_, _>>().map_err(|e| ApproxError::at(stage, 0, e))?;
    for k in n..big_n {
        values.push(level.values[k].compose(&inverse));
        let p = projection_eliminant(n + big_n, &level.ideal, &base, n + k).map_err(|e| match e {
            ElimError::NoMonicEliminant => {
                ApproxError::at(stage, 0, "the composed component has no unitary annihilator over the source")
            }
            other => ApproxError::at(stage, 0, other),
        })?;
        annihilators.push(p);
    }
    level.diagnostics.variety_residual = generator_residual(problem.variety.generators(), &values);
    level.diagnostics.annihilator_residuals =
        annihilators.iter().zip(&values).map(|(p, v)| annihilator_residual(p, v)).collect();
    level.values = values;
    level.annihilators = annihilators;
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetCtx;
    use crate::poly::parse_poly;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn inverse_of_a_quadratic_map() {
        let ctx = JetCtx::default();
        let x = Jet::var(2, 6, ctx, 0);
        let y = Jet::var(2, 6, ctx, 1);
        let map = vec![&x + &(&y * &y), &(&y - &(&x * &y)) + &x.scale_gauss(&crate::poly::GaussRat::from_int(2))];
        let h = invert_jet_map(&map, 1e-9).unwrap();
        let back: Vec<Jet> = map.iter().map(|f| f.compose(&h)).collect();
        assert!(back[0].max_abs_diff(&x) < 1e-30, "{}", back[0].max_abs_diff(&x));
        assert!(back[1].max_abs_diff(&y) < 1e-30);
    }

    #[test]
    fn graph_dimension_defaults_to_krull_dimension() {
        let ctx = JetCtx::default();
        let all = names(&["x", "u", "v"]);
        let q = vec![parse_poly("u*v - 1", &all).unwrap()];
        let one = Jet::one(1, 4, ctx);
        let p = graph_problem(&q, &all[..1], &all[1..], &[one.clone(), one], None, vec![1], ApproxConfig::default())
            .unwrap();
        assert_eq!(p.variety.declared_dim(), 2);
        assert_eq!(p.graph_dims, 1);
        assert_eq!(p.output_names(), &all[1..]);
    }

    #[test]
    fn inconsistent_systems_are_rejected() {
        let ctx = JetCtx::default();
        let all = names(&["x", "u"]);
        let q = vec![parse_poly("1", &all).unwrap()];
        let err = graph_problem(&q, &all[..1], &all[1..], &[Jet::one(1, 4, ctx)], None, vec![1], ApproxConfig::default())
            .unwrap_err();
        assert!(err.is_input());
    }
}
