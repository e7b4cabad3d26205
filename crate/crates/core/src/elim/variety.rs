use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::poly::{discriminant, parse_poly, substitute_linear_rat, GaussRat, Monomial, MultiPoly, RatMatrix, UniOverPoly};

use super::{groebner_basis_in, ElimError, IdealBasis, MonomialOrder};

/// Half-width of the integer box base points are drawn from.
pub const BASE_POINT_BOUND: i64 = 997;
/// Default number of base points tried before giving up.
pub const DEFAULT_FIBER_RETRIES: usize = 32;

/// An algebraic set in `C^m × C^s` given by generators, with base dimension `m`.
///
/// Variables are ordered base first (`y_1…y_m`), then fiber (`v_1…v_s`).
#[derive(Clone, Debug, PartialEq)]
pub struct VarietySpec {
    names: Vec<String>,
    generators: Vec<MultiPoly>,
    declared_dim: usize,
}

/// JSON form: `{"base_vars":[…], "fiber_vars":[…], "declared_dim":m, "generators":["…"]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarietyJson {
    pub base_vars: Vec<String>,
    pub fiber_vars: Vec<String>,
    pub declared_dim: usize,
    pub generators: Vec<String>,
}

impl VarietySpec {
    pub fn new(names: Vec<String>, generators: Vec<MultiPoly>, declared_dim: usize) -> Result<Self, ElimError> {
        if declared_dim > names.len() {
            return Err(ElimError::Spec(format!("declared dimension {declared_dim} exceeds {} variables", names.len())));
        }
        for g in &generators {
            if g.nvars() != names.len() {
                return Err(ElimError::VarCount { expected: names.len(), found: g.nvars() });
            }
            if g.is_zero() {
                return Err(ElimError::Spec("zero generator".into()));
            }
        }
        Ok(VarietySpec { names, generators, declared_dim })
    }

    pub fn from_json(js: &VarietyJson) -> Result<Self, ElimError> {
        let names: Vec<String> = js.base_vars.iter().chain(&js.fiber_vars).cloned().collect();
        let generators = js.generators.iter().map(|t| parse_poly(t, &names)).collect::<Result<Vec<_>, _>>()?;
        VarietySpec::new(names, generators, js.declared_dim)
    }

    pub fn to_json(&self) -> VarietyJson {
        VarietyJson {
            base_vars: self.base_names().to_vec(),
            fiber_vars: self.fiber_names().to_vec(),
            declared_dim: self.declared_dim,
            generators: self.generators.iter().map(|g| g.to_text(&self.names)).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn base_names(&self) -> &[String] {
        &self.names[..self.declared_dim]
    }

    pub fn fiber_names(&self) -> &[String] {
        &self.names[self.declared_dim..]
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn declared_dim(&self) -> usize {
        self.declared_dim
    }

    pub fn base_count(&self) -> usize {
        self.declared_dim
    }

    pub fn fiber_count(&self) -> usize {
        self.names.len() - self.declared_dim
    }

    /// `V ∩ {extra = 0}` with the last base variable moved to the fiber.
    pub fn descend(&self, extra: MultiPoly) -> Result<Self, ElimError> {
        if self.declared_dim == 0 {
            return Err(ElimError::Spec("cannot descend below dimension 0".into()));
        }
        let mut generators = self.generators.clone();
        if !extra.is_zero() && !generators.contains(&extra) {
            generators.push(extra);
        }
        VarietySpec::new(self.names.clone(), generators, self.declared_dim - 1)
    }

    /// The variety in new coordinates `w` where old coordinates are `matrix · w`.
    pub fn transformed(&self, matrix: &RatMatrix) -> Result<Self, ElimError> {
        let generators = self
            .generators
            .iter()
            .map(|g| substitute_linear_rat(g, matrix))
            .collect::<Result<Vec<_>, _>>()?;
        VarietySpec::new(self.names.clone(), generators, self.declared_dim)
    }

    fn fiber_index(&self, j: usize) -> usize {
        self.declared_dim + j
    }
}

/// Outcome of the properness test over the base variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Properness {
    pub certified: bool,
    /// For each fiber variable that passed, the basis element monic in it.
    pub witnesses: Vec<MultiPoly>,
    /// First fiber variable (0-based among the fiber variables) without a witness.
    pub failing: Option<usize>,
    pub basis: IdealBasis,
}

/// Block order with `v_s ≫ … ≫ v_1 ≫ (base, graded lex)`.
pub fn properness_order(v: &VarietySpec) -> MonomialOrder {
    let mut blocks: Vec<Vec<usize>> = (0..v.fiber_count()).rev().map(|j| vec![v.fiber_index(j)]).collect();
    if v.base_count() > 0 {
        blocks.push((0..v.base_count()).collect());
    }
    MonomialOrder::Block(blocks)
}

fn pure_power_of(m: &Monomial, var: usize) -> bool {
    m.0[var] > 0 && m.0.iter().enumerate().all(|(w, &e)| w == var || e == 0)
}

/// Noether-position test: every fiber variable `v_j` needs a Gröbner basis
/// element whose leading monomial is a pure power of `v_j`. In the block order
/// such an element is monic in `v_j` and free of `v_{j+1}…v_s`.
pub fn properness_check(v: &VarietySpec) -> Properness {
    let order = properness_order(v);
    let basis = groebner_basis_in(v.nvars(), &v.generators, &order).expect("valid order");
    let mut witnesses = Vec::new();
    if basis.is_unit() {
        return Properness { certified: true, witnesses: vec![MultiPoly::one(v.nvars()); v.fiber_count()], failing: None, basis };
    }
    for j in 0..v.fiber_count() {
        let var = v.fiber_index(j);
        let w = basis
            .generators()
            .iter()
            .filter(|g| basis.leading_monomial(g).is_some_and(|m| pure_power_of(&m, var)))
            .min_by_key(|g| g.degree_in(var));
        match w {
            Some(g) => witnesses.push(g.clone()),
            None => return Properness { certified: false, witnesses, failing: Some(j), basis },
        }
    }
    Properness { certified: true, witnesses, failing: None, basis }
}

fn check_form(v: &VarietySpec, form: &[GaussRat]) -> Result<(), ElimError> {
    if form.len() != v.fiber_count() {
        return Err(ElimError::FormLength { expected: v.fiber_count(), found: form.len() });
    }
    Ok(())
}

/// Monic squarefree `P_L(y, z)` describing the image of `V` under `(y, v) ↦ (y, L(v))`.
///
/// The result lives in `m + 1` variables with `z` last.
pub fn optimal_polynomial(v: &VarietySpec, form: &[GaussRat]) -> Result<UniOverPoly, ElimError> {
    check_form(v, form)?;
    let prop = properness_check(v);
    if !prop.certified {
        return Err(ElimError::NotProper { fiber: prop.failing.unwrap_or(0) });
    }
    optimal_polynomial_unchecked(v, form)
}

pub(crate) fn optimal_polynomial_unchecked(v: &VarietySpec, form: &[GaussRat]) -> Result<UniOverPoly, ElimError> {
    let (m, s) = (v.base_count(), v.fiber_count());
    let n = m + s + 1;
    let z = m + s;
    let ident: Vec<usize> = (0..m + s).collect();
    let mut gens: Vec<MultiPoly> = v.generators.iter().map(|g| g.remap(n, &ident)).collect();
    let mut lin = MultiPoly::var(n, z);
    for (j, c) in form.iter().enumerate() {
        lin = &lin - &MultiPoly::var(n, m + j).scale(c);
    }
    gens.push(lin);
    let mut blocks = Vec::new();
    if s > 0 {
        blocks.push((m..m + s).collect::<Vec<_>>());
    }
    blocks.push(vec![z]);
    if m > 0 {
        blocks.push((0..m).collect());
    }
    let basis = groebner_basis_in(n, &gens, &MonomialOrder::Block(blocks))?;
    if basis.is_unit() {
        return Err(ElimError::EmptyVariety);
    }
    let best = basis
        .generators()
        .iter()
        .filter(|g| (m..m + s).all(|w| !g.involves(w)))
        .filter(|g| basis.leading_monomial(g).is_some_and(|lm| pure_power_of(&lm, z)))
        .min_by_key(|g| g.degree_in(z))
        .ok_or(ElimError::NoMonicEliminant)?;
    let mut map: Vec<usize> = (0..m).collect();
    map.extend(std::iter::repeat_n(0, s));
    map.push(m);
    let p = best.remap(m + 1, &map);
    let uni = UniOverPoly::from_multi(&p, m)?;
    Ok(uni.squarefree_part()?)
}

/// Monic squarefree generator of least degree in `target` of the elimination ideal
/// of `gens` onto `base ∪ {target}`, returned in `base.len() + 1` variables with
/// the target last.
///
/// Fails with [`ElimError::NoMonicEliminant`] when the projection onto `base` is
/// not finite over `target` (no Gröbner element has a pure power of it as leading monomial).
pub fn projection_eliminant(
    nvars: usize,
    gens: &[MultiPoly],
    base: &[usize],
    target: usize,
) -> Result<UniOverPoly, ElimError> {
    if target >= nvars || base.iter().any(|&b| b >= nvars || b == target) {
        return Err(ElimError::BadOrder("projection variables out of range".into()));
    }
    let others: Vec<usize> = (0..nvars).filter(|v| *v != target && !base.contains(v)).collect();
    let mut blocks = Vec::new();
    if !others.is_empty() {
        blocks.push(others.clone());
    }
    blocks.push(vec![target]);
    if !base.is_empty() {
        blocks.push(base.to_vec());
    }
    let basis = groebner_basis_in(nvars, gens, &MonomialOrder::Block(blocks))?;
    if basis.is_unit() {
        return Err(ElimError::EmptyVariety);
    }
    let best = basis
        .generators()
        .iter()
        .filter(|g| others.iter().all(|&w| !g.involves(w)))
        .filter(|g| basis.leading_monomial(g).is_some_and(|lm| pure_power_of(&lm, target)))
        .min_by_key(|g| g.degree_in(target))
        .ok_or(ElimError::NoMonicEliminant)?;
    let mut map = vec![0; nvars];
    for (i, &b) in base.iter().enumerate() {
        map[b] = i;
    }
    map[target] = base.len();
    let p = best.remap(base.len() + 1, &map);
    Ok(UniOverPoly::from_multi(&p, base.len())?.squarefree_part()?)
}

/// The coordinate form selecting fiber variable `j`.
pub fn coordinate_form(s: usize, j: usize) -> Vec<GaussRat> {
    (0..s).map(|k| if k == j { GaussRat::one() } else { GaussRat::zero() }).collect()
}

/// Number of points in a generic fiber over the base.
///
/// Draws integer base points from `[−997, 997]^m` until none of the
/// discriminants of the coordinate optimal polynomials vanishes there, then
/// counts standard monomials of the specialized ideal, made radical by adding
/// the (then squarefree) coordinate eliminants.
pub fn generic_fiber_count(v: &VarietySpec, seed: u64, max_retries: usize) -> Result<usize, ElimError> {
    let prop = properness_check(v);
    if !prop.certified {
        return Err(ElimError::NotProper { fiber: prop.failing.unwrap_or(0) });
    }
    if prop.basis.is_unit() {
        return Ok(0);
    }
    let (m, s) = (v.base_count(), v.fiber_count());
    if s == 0 {
        return Ok(1);
    }
    let mut eliminants = Vec::with_capacity(s);
    let mut discs = Vec::with_capacity(s);
    for j in 0..s {
        let p = optimal_polynomial_unchecked(v, &coordinate_form(s, j))?;
        discs.push(discriminant(&p)?);
        eliminants.push(p.to_multi());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_retries.max(1) {
        let point: Vec<GaussRat> =
            (0..m).map(|_| GaussRat::from_int(rng.gen_range(-BASE_POINT_BOUND..=BASE_POINT_BOUND))).collect();
        let mut at_point = point.clone();
        at_point.push(GaussRat::zero());
        if discs.iter().any(|d| d.eval(&at_point).is_zero()) {
            continue;
        }
        let fiber_vars: Vec<MultiPoly> = (0..s).map(|j| MultiPoly::var(s, j)).collect();
        let consts: Vec<MultiPoly> = point.iter().map(|c| MultiPoly::constant(s, c.clone())).collect();
        let args: Vec<MultiPoly> = consts.iter().chain(&fiber_vars).cloned().collect();
        let mut gens: Vec<MultiPoly> = v.generators.iter().map(|g| g.compose(&args)).collect();
        for (j, e) in eliminants.iter().enumerate() {
            let mut a = consts.clone();
            a.push(fiber_vars[j].clone());
            gens.push(e.compose(&a));
        }
        let basis = groebner_basis_in(s, &gens, &MonomialOrder::GrLex)?;
        return basis.standard_monomial_count().ok_or(ElimError::NotProper { fiber: 0 });
    }
    Err(ElimError::RetriesExhausted(max_retries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elim::reduce_mod;

    fn spec(base: &[&str], fiber: &[&str], gens: &[&str]) -> VarietySpec {
        VarietySpec::from_json(&VarietyJson {
            base_vars: base.iter().map(|s| s.to_string()).collect(),
            fiber_vars: fiber.iter().map(|s| s.to_string()).collect(),
            declared_dim: base.len(),
            generators: gens.iter().map(|s| s.to_string()).collect(),
        })
        .unwrap()
    }

    fn yz() -> Vec<String> {
        vec!["y".into(), "z".into()]
    }

    #[test]
    fn projection_eliminants() {
        let names: Vec<String> = ["x", "u", "v"].iter().map(|s| s.to_string()).collect();
        let gens: Vec<MultiPoly> =
            ["u*v - 1", "v^2 + x*v - 1"].iter().map(|t| parse_poly(t, &names).unwrap()).collect();
        let p = projection_eliminant(3, &gens, &[0], 1).unwrap();
        let xz: Vec<String> = ["x", "z"].iter().map(|s| s.to_string()).collect();
        assert_eq!(p.to_multi(), parse_poly("z^2 - x*z - 1", &xz).unwrap());
        // u alone is not finite over nothing once v is free.
        let free = vec![parse_poly("u*v - 1", &names).unwrap()];
        assert_eq!(projection_eliminant(3, &free, &[0], 1).unwrap_err(), ElimError::NoMonicEliminant);
        // Squarefree reduction.
        let sq = vec![parse_poly("u^2", &names).unwrap()];
        assert_eq!(projection_eliminant(3, &sq, &[0], 1).unwrap().to_multi(), parse_poly("z", &xz).unwrap());
    }

    #[test]
    fn properness_examples() {
        let p = properness_check(&spec(&["y"], &["v"], &["v^2 - y"]));
        assert!(p.certified);
        assert_eq!(p.witnesses[0], parse_poly("v^2 - y", &["y".into(), "v".into()]).unwrap());
        let p = properness_check(&spec(&["y"], &["v"], &["y*v - 1"]));
        assert!(!p.certified);
        assert_eq!(p.failing, Some(0));
        assert!(properness_check(&spec(&["y"], &["v"], &["v"])).certified);
        assert!(!properness_check(&spec(&["y"], &["v"], &[])).certified);
    }

    #[test]
    fn optimal_polynomial_examples() {
        let one = [GaussRat::one()];
        let p = optimal_polynomial(&spec(&["y"], &["v"], &["v^2 - y"]), &one).unwrap();
        assert_eq!(p.to_multi(), parse_poly("z^2 - y", &yz()).unwrap());
        let p = optimal_polynomial(&spec(&["y"], &["v"], &["v - y"]), &one).unwrap();
        assert_eq!(p.to_multi(), parse_poly("z - y", &yz()).unwrap());
        let v = spec(&["y"], &["v1", "v2"], &["v1^2 - y", "v2 - v1"]);
        let p = optimal_polynomial(&v, &[GaussRat::one(), GaussRat::one()]).unwrap();
        assert_eq!(p.to_multi(), parse_poly("z^2 - 4*y", &yz()).unwrap());
        let p = optimal_polynomial(&v, &[GaussRat::one(), -GaussRat::one()]).unwrap();
        assert_eq!(p.to_multi(), parse_poly("z", &yz()).unwrap());
        assert!(matches!(
            optimal_polynomial(&spec(&["y"], &["v"], &["y*v - 1"]), &one),
            Err(ElimError::NotProper { fiber: 0 })
        ));
    }

    #[test]
    fn optimal_polynomial_vanishes_on_variety() {
        let v = spec(&["y"], &["v1", "v2"], &["v1^2 - y", "v2^2 - v1 - 1"]);
        let form = [GaussRat::from_int(2), GaussRat::from_int(-1)];
        let p = optimal_polynomial(&v, &form).unwrap();
        let n = v.nvars();
        let lin = &MultiPoly::var(n, 1).scale(&form[0]) + &MultiPoly::var(n, 2).scale(&form[1]);
        let pulled = p.to_multi().compose(&[MultiPoly::var(n, 0), lin]);
        let basis = properness_check(&v).basis;
        assert!(reduce_mod(&basis, &pulled).is_zero());
        assert!(!discriminant(&p).unwrap().is_zero());
        assert_eq!(p.degree(), 4);
    }

    #[test]
    fn fiber_counts() {
        for seed in 0..5 {
            assert_eq!(generic_fiber_count(&spec(&["y"], &["v"], &["v^2 - y"]), seed, 32).unwrap(), 2);
            assert_eq!(generic_fiber_count(&spec(&["y"], &["v"], &["v - y"]), seed, 32).unwrap(), 1);
            assert_eq!(generic_fiber_count(&spec(&["y"], &["v1", "v2"], &["v1^2 - y", "v2 - v1"]), seed, 32).unwrap(), 2);
        }
    }

    #[test]
    fn json_round_trip_and_descent() {
        let v = spec(&["y"], &["v"], &["v^2 - y^2"]);
        assert_eq!(VarietySpec::from_json(&v.to_json()).unwrap(), v);
        let d = v.descend(parse_poly("4*y^2", v.names()).unwrap()).unwrap();
        assert_eq!(d.declared_dim(), 0);
        assert_eq!(d.fiber_names(), &["y".to_string(), "v".to_string()]);
        assert_eq!(d.generators().len(), 2);
    }
}
