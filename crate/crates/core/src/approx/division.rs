//! Weierstrass data of `∂P_L/∂z` along the jet and the recursive approximation
//! of the division coefficients.

use crate::elim::{groebner_basis_in, MonomialOrder, VarietySpec};
use crate::genericity::{find_regular_direction, ChangeRecord};
use crate::jet::{eval_poly_at_jets_like, weierstrass_divide, weierstrass_prepare, Jet, JetPoly};
use crate::poly::{GaussRat, MultiPoly, UniOverPoly};

use super::reduce::form_value;
use super::{solve_level, ApproxConfig, ApproxError, AtStage, LevelTrace, Stage, TSystem};

/// Division of the jet components by `W²`, in the moved source coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisionData {
    /// Source change making `∂P_L/∂z(F̃, f̃)` regular in the last variable.
    pub source_change: ChangeRecord,
    /// Weierstrass degree.
    pub d: usize,
    /// Unit factor of `∂P_L/∂z(F̃, f̃)`.
    pub unit: Jet,
    pub weierstrass: JetPoly,
    /// `H_j` for the base components.
    pub quotients: Vec<Jet>,
    /// `r_j` for the base components, of degree below `2d` in the last variable.
    pub remainders: Vec<JetPoly>,
    pub tilde_quotient: Jet,
    pub tilde_remainder: JetPoly,
    /// Ambient jets (working coordinates) after the source change.
    pub jets: Vec<Jet>,
    /// `f̃ = L(G)` after the source change.
    pub form_value: Jet,
}

impl DivisionData {
    pub fn source_dim(&self) -> usize {
        self.form_value.nvars()
    }

    pub fn order(&self) -> u32 {
        self.form_value.order()
    }

    pub fn base_dim(&self) -> usize {
        self.quotients.len()
    }

    /// Coefficients of `W`, the `r_j` and `r̃`, in the order of the division
    /// system's coefficient variables; jets in all but the last source variable.
    pub fn coefficient_jets(&self) -> Vec<Jet> {
        let d = self.d;
        if d == 0 {
            return Vec::new();
        }
        let mut out: Vec<Jet> = (1..=d).map(|k| self.weierstrass.coeff(d - k)).collect();
        for r in self.remainders.iter().chain(std::iter::once(&self.tilde_remainder)) {
            out.extend((0..2 * d).map(|k| r.coeff(2 * d - 1 - k)));
        }
        out
    }
}

/// Finds a regular direction for `u = ∂P_L/∂z(F̃, f̃)`, prepares it and divides
/// every base component and `f̃` by `W²`.
pub fn prepare_division_data(
    optimal: &UniOverPoly,
    jets: &[Jet],
    form: &[GaussRat],
    cfg: &ApproxConfig,
    depth: usize,
) -> Result<DivisionData, ApproxError> {
    let stage = Stage::Preparation;
    let m = optimal.nvars() - 1;
    let shape = &jets[0];
    let ftilde = form_value(form, &jets[m..], shape);
    let mut args: Vec<Jet> = jets[..m].to_vec();
    args.push(ftilde.clone());
    let u = eval_poly_at_jets_like(&optimal.derivative(), &args, shape);
    let valid = u.valid_order();
    if u.max_abs_upto(valid) <= cfg.tolerance {
        return Err(ApproxError::at(stage, depth, "∂P_L/∂z vanishes on the jet although the discriminant does not"));
    }
    let (change, moved_u, d) = find_regular_direction(&u, cfg.seed, cfg.max_tries, cfg.tolerance).at(stage, depth)?;
    let moved = |j: &Jet| if change.is_identity() { j.clone() } else { change.forward_jet(j) };
    let jets: Vec<Jet> = jets.iter().map(moved).collect();
    let ftilde = moved(&ftilde);
    let prepared = weierstrass_prepare(&moved_u, cfg.tolerance).at(stage, depth)?;
    let d = d as usize;
    let order = shape.order();
    if d > 0 && (order as usize) < 2 * d + 2 {
        return Err(ApproxError::at(
            stage,
            depth,
            format!("order {order} is below 2d + 2 = {} for Weierstrass degree {d}", 2 * d + 2),
        ));
    }
    let n = shape.nvars();
    let w = prepared.w;
    let zero_rem = JetPoly::new(n - 1, n, order, shape.ctx(), Vec::new());
    let divide = |f: &Jet| -> Result<(Jet, JetPoly), ApproxError> {
        if d == 0 {
            Ok((f.clone(), zero_rem.clone()))
        } else {
            weierstrass_divide(f, &w, 2).at(stage, depth)
        }
    };
    let mut quotients = Vec::with_capacity(m);
    let mut remainders = Vec::with_capacity(m);
    for f in &jets[..m] {
        let (h, r) = divide(f)?;
        quotients.push(h);
        remainders.push(r);
    }
    let (tilde_quotient, tilde_remainder) = divide(&ftilde)?;
    Ok(DivisionData {
        source_change: change,
        d,
        unit: prepared.unit,
        weierstrass: w,
        quotients,
        remainders,
        tilde_quotient,
        tilde_remainder,
        jets,
        form_value: ftilde,
    })
}

/// Approximations of the division coefficients for each ν.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientApprox {
    /// `values[k][c]`: coefficient `c` at the `k`-th ν, a jet in `n − 1` variables.
    pub values: Vec<Vec<Jet>>,
    /// Annihilators in the `n − 1` source variables and `t` (last).
    pub annihilators: Vec<Vec<UniOverPoly>>,
    /// Largest division-system residual on the exact coefficients.
    pub admission_residual: f64,
    pub trace: Option<LevelTrace>,
}

/// Constants pass through unchanged for a one-dimensional source; otherwise
/// the division system is solved one dimension lower by the full pipeline.
pub fn recurse_or_base(
    sys: &TSystem,
    div: &DivisionData,
    nus: &[u32],
    cfg: &ApproxConfig,
    depth: usize,
) -> Result<CoefficientApprox, ApproxError> {
    let stage = Stage::Recursion;
    let g = div.coefficient_jets();
    if g.is_empty() {
        return Ok(CoefficientApprox {
            values: vec![Vec::new(); nus.len()],
            annihilators: vec![Vec::new(); nus.len()],
            admission_residual: 0.0,
            trace: None,
        });
    }
    let valid = g.iter().map(|j| j.valid_order()).min().unwrap_or(0);
    let residual = sys
        .equations()
        .iter()
        .map(|t| eval_poly_at_jets_like(t, &g, &g[0]).max_abs_upto(valid))
        .fold(0.0, f64::max);
    if residual > cfg.tolerance {
        return Err(ApproxError::at(
            stage,
            depth,
            format!("division coefficients leave a residual of {residual:e} in the division system"),
        ));
    }
    let n = div.source_dim();
    if n == 1 {
        let anns: Vec<UniOverPoly> = g
            .iter()
            .map(|c| {
                let value = MultiPoly::constant(1, c.constant_term().to_gauss());
                let p = &MultiPoly::var(1, 0) - &value;
                UniOverPoly::from_multi(&p, 0).expect("linear in t")
            })
            .collect();
        return Ok(CoefficientApprox {
            values: vec![g; nus.len()],
            annihilators: vec![anns; nus.len()],
            admission_residual: residual,
            trace: None,
        });
    }
    let names = sys.coefficient_symbols().to_vec();
    let mut gens: Vec<MultiPoly> = Vec::new();
    for t in sys.equations() {
        if !t.is_zero() && !gens.contains(t) {
            gens.push(t.clone());
        }
    }
    let dim = if gens.is_empty() {
        names.len()
    } else {
        let basis = groebner_basis_in(names.len(), &gens, &MonomialOrder::GrLex).at(stage, depth)?;
        if basis.is_unit() {
            return Err(ApproxError::at(stage, depth, "the division system has no solutions"));
        }
        basis.krull_dimension().unwrap_or(n - 1)
    };
    let variety = VarietySpec::new(names, gens, dim).at(stage, depth)?;
    let source: Vec<String> = (1..n).map(|i| format!("x{i}")).collect();
    let out = solve_level(&variety, &source, &g, nus, cfg, depth + 1, 0).at(stage, depth)?;
    let (values, annihilators) = out.per_nu.into_iter().map(|l| (l.values, l.annihilators)).unzip();
    Ok(CoefficientApprox { values, annihilators, admission_residual: residual, trace: Some(out.trace) })
}
