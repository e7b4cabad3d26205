//! Seeded linear coordinate changes and linear forms, each validated by an
//! explicit check and retried on failure.

use num::rational::BigRational;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elim::{
    coordinate_form, generic_fiber_count, optimal_polynomial, properness_check, ElimError, VarietySpec,
    DEFAULT_FIBER_RETRIES,
};
use crate::jet::{xn_regular_order, Jet, JetError};
use crate::number::Cx;
use crate::poly::{
    identity_matrix, int_matrix_inverse, parse_rational, substitute_linear, substitute_linear_rat, GaussRat, MultiPoly,
    PolyError, RatMatrix,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenericityError {
    #[error("{what}: no valid choice in {attempts} attempts ({})", .failures.join("; "))]
    Exhausted { what: &'static str, attempts: usize, failures: Vec<String> },
    #[error("the jet vanishes to its order")]
    ZeroJet,
    #[error(transparent)]
    Elim(#[from] ElimError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeScope {
    /// Coordinates of the ambient space of the variety.
    Ambient,
    /// Coordinates of the source space of the jets.
    Source,
}

/// An invertible integer change of coordinates: `old = matrix · new`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangeRecord {
    pub matrix: Vec<Vec<i64>>,
    #[serde(with = "rat_matrix_text")]
    pub inverse: RatMatrix,
    pub scope: ChangeScope,
    pub seed_used: u64,
    pub attempts: usize,
}

mod rat_matrix_text {
    use num::rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
        let text: Vec<Vec<String>> = Vec::deserialize(d)?;
        text.iter()
            .map(|r| {
                r.iter()
                    .map(|v| super::parse_rational(v).ok_or_else(|| serde::de::Error::custom(format!("bad rational '{v}'"))))
                    .collect()
            })
            .collect()
    }
}

impl ChangeRecord {
    pub fn new(matrix: Vec<Vec<i64>>, scope: ChangeScope, seed_used: u64, attempts: usize) -> Result<Self, PolyError> {
        let inverse = int_matrix_inverse(&matrix)?;
        Ok(ChangeRecord { matrix, inverse, scope, seed_used, attempts })
    }

    pub fn identity(n: usize, scope: ChangeScope, seed_used: u64) -> Self {
        ChangeRecord::new(identity_matrix(n), scope, seed_used, 1).expect("identity is invertible")
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == identity_matrix(self.dim())
    }

    /// `self` followed by `next`: old = M_self · M_next · newest.
    pub fn then(&self, next: &ChangeRecord) -> Result<ChangeRecord, PolyError> {
        let matrix = crate::poly::mat_mul_int(&self.matrix, &next.matrix);
        ChangeRecord::new(matrix, self.scope, next.seed_used, self.attempts + next.attempts)
    }

    /// Polynomial in old coordinates rewritten in new ones.
    pub fn forward_poly(&self, p: &MultiPoly) -> Result<MultiPoly, PolyError> {
        substitute_linear(p, &self.matrix)
    }

    /// Polynomial in new coordinates rewritten in old ones.
    pub fn backward_poly(&self, p: &MultiPoly) -> Result<MultiPoly, PolyError> {
        substitute_linear_rat(p, &self.inverse)
    }

    /// Values (jets) of the old coordinates expressed as new coordinates: `M⁻¹·values`.
    pub fn forward_values(&self, values: &[Jet]) -> Vec<Jet> {
        combine(&self.inverse, values)
    }

    /// Values of the new coordinates expressed as old ones: `M·values`.
    pub fn backward_values(&self, values: &[Jet]) -> Vec<Jet> {
        let m: RatMatrix = self.matrix.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect();
        combine(&m, values)
    }

    /// A jet of the source variables, precomposed with `x_old = M·x_new`.
    pub fn forward_jet(&self, j: &Jet) -> Jet {
        j.compose(&linear_jets(&int_rat(&self.matrix), j))
    }

    /// Inverse of [`ChangeRecord::forward_jet`].
    pub fn backward_jet(&self, j: &Jet) -> Jet {
        j.compose(&linear_jets(&self.inverse, j))
    }
}

fn int_rat(m: &[Vec<i64>]) -> RatMatrix {
    m.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect()
}

fn rat_cx(r: &BigRational, prec: usize) -> Cx {
    Cx::from_rationals(r, &BigRational::zero(), prec)
}

fn combine(m: &RatMatrix, values: &[Jet]) -> Vec<Jet> {
    assert_eq!(m.len(), values.len(), "matrix and value count differ");
    m.iter()
        .map(|row| {
            let mut acc = Jet::zero(values[0].nvars(), values[0].order(), values[0].ctx());
            let mut valid = u32::MAX;
            for (c, v) in row.iter().zip(values) {
                if !c.is_zero() {
                    acc = &acc + &v.scale(&rat_cx(c, v.prec()));
                    valid = valid.min(v.valid_order());
                }
            }
            if valid != u32::MAX {
                acc.set_valid_order(valid.min(acc.valid_order()));
            }
            acc
        })
        .collect()
}

/// Jets of `Σ_j M[i][j] x_j` in the shape of `like`.
fn linear_jets(m: &RatMatrix, like: &Jet) -> Vec<Jet> {
    let vars: Vec<Jet> = (0..like.nvars()).map(|i| Jet::var(like.nvars(), like.order(), like.ctx(), i)).collect();
    combine(m, &vars)
}

fn widen(attempt: usize, max_tries: usize) -> i64 {
    if attempt * 2 >= max_tries {
        9
    } else {
        3
    }
}

/// Random invertible matrix that is the identity on the first `keep` coordinates.
fn random_matrix(rng: &mut ChaCha8Rng, n: usize, keep: usize, bound: i64) -> Option<Vec<Vec<i64>>> {
    let mut m = identity_matrix(n);
    for row in m.iter_mut().skip(keep) {
        for v in row.iter_mut().skip(keep) {
            *v = rng.gen_range(-bound..=bound);
        }
    }
    int_matrix_inverse(&m).ok().map(|_| m)
}

/// Finds `old = M·new` after which the projection onto the first `m`
/// coordinates is proper. Tries the identity, then shears `base_i += fiber_j`,
/// then random matrices. Coordinates below `keep` are never changed.
pub fn find_proper_position(
    v: &VarietySpec,
    seed: u64,
    max_tries: usize,
    keep: usize,
) -> Result<(ChangeRecord, VarietySpec), GenericityError> {
    let n = v.nvars();
    let m = v.base_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5052_4f50);
    let mut failures = Vec::new();
    let shears: Vec<(usize, usize)> = (keep..m).flat_map(|i| (m..n).map(move |j| (i, j))).collect();
    for attempt in 0..max_tries {
        let matrix = if attempt == 0 {
            identity_matrix(n)
        } else if attempt <= shears.len() {
            let (i, j) = shears[attempt - 1];
            let mut mat = identity_matrix(n);
            mat[i][j] = 1;
            mat
        } else {
            match random_matrix(&mut rng, n, keep, widen(attempt, max_tries)) {
                Some(mat) => mat,
                None => {
                    failures.push(format!("attempt {}: singular draw", attempt + 1));
                    continue;
                }
            }
        };
        let record = ChangeRecord::new(matrix, ChangeScope::Ambient, seed, attempt + 1)?;
        let moved = v.transformed(&int_rat(&record.matrix))?;
        let prop = properness_check(&moved);
        if prop.certified {
            return Ok((record, moved));
        }
        let var = prop.failing.map(|j| moved.fiber_names()[j].clone()).unwrap_or_default();
        failures.push(format!("attempt {}: no monic witness for {var}", attempt + 1));
    }
    Err(GenericityError::Exhausted { what: "proper position", attempts: max_tries, failures })
}

/// Linear form on the fiber variables with its acceptance data.
#[derive(Clone, Debug, PartialEq)]
pub struct FormChoice {
    pub form: Vec<GaussRat>,
    pub fiber_count: usize,
    pub image_degree: usize,
    pub attempts: usize,
    pub rejected: Vec<Vec<GaussRat>>,
}

/// Whether the image of `V` under `L` has as many sheets as `V` itself.
pub fn form_is_admissible(v: &VarietySpec, form: &[GaussRat], fiber_count: usize) -> Result<bool, GenericityError> {
    Ok(optimal_polynomial(v, form)?.degree() == fiber_count)
}

/// Chooses `L` with `deg_z P_L` equal to the generic fiber count: coordinate
/// forms first, then random small-integer combinations.
pub fn choose_linear_form(v: &VarietySpec, seed: u64, max_tries: usize) -> Result<FormChoice, GenericityError> {
    let s = v.fiber_count();
    let count = generic_fiber_count(v, seed, DEFAULT_FIBER_RETRIES)?;
    if s == 0 {
        return Ok(FormChoice { form: vec![], fiber_count: count, image_degree: 1, attempts: 1, rejected: vec![] });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x464f_524d);
    let mut rejected = Vec::new();
    for attempt in 0..max_tries {
        let form: Vec<GaussRat> = if attempt < s {
            coordinate_form(s, attempt)
        } else {
            let bound = widen(attempt, max_tries);
            let draw: Vec<i64> = (0..s).map(|_| rng.gen_range(-bound..=bound)).collect();
            if draw.iter().all(|&c| c == 0) {
                continue;
            }
            draw.into_iter().map(GaussRat::from_int).collect()
        };
        let degree = optimal_polynomial(v, &form)?.degree();
        if degree == count {
            return Ok(FormChoice { form, fiber_count: count, image_degree: degree, attempts: attempt + 1, rejected });
        }
        rejected.push(form);
    }
    let failures = rejected.iter().map(|f| format!("{f:?}")).collect();
    Err(GenericityError::Exhausted { what: "linear form", attempts: max_tries, failures })
}

/// Lowest total degree carrying a coefficient above `tol`.
pub fn jet_order(u: &Jet, tol: f64) -> Option<u32> {
    u.terms().filter(|(_, c)| c.abs() > tol).map(|(m, _)| m.degree()).min()
}

/// Linear change of the source variables after which `u` is regular in the
/// last variable with order as small as found: identity, then shears
/// `x_i += x_n`, then random matrices. Stops once the order equals the order of `u`.
pub fn find_regular_direction(
    u: &Jet,
    seed: u64,
    max_tries: usize,
    tol: f64,
) -> Result<(ChangeRecord, Jet, u32), GenericityError> {
    let n = u.nvars();
    let target = jet_order(u, tol).ok_or(GenericityError::ZeroJet)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5245_4755);
    let mut best: Option<(ChangeRecord, Jet, u32)> = None;
    let mut failures = Vec::new();
    let tries = if n <= 1 { 1 } else { max_tries };
    for attempt in 0..tries {
        let matrix = if attempt == 0 {
            identity_matrix(n)
        } else if attempt < n {
            let mut mat = identity_matrix(n);
            mat[attempt - 1][n - 1] = 1;
            mat
        } else if attempt == n {
            let mut mat = identity_matrix(n);
            for row in mat.iter_mut().take(n - 1) {
                row[n - 1] = 1;
            }
            mat
        } else {
            match random_matrix(&mut rng, n, 0, widen(attempt, max_tries)) {
                Some(mat) => mat,
                None => continue,
            }
        };
        let record = ChangeRecord::new(matrix, ChangeScope::Source, seed, attempt + 1)?;
        let moved = if record.is_identity() { u.clone() } else { record.forward_jet(u) };
        match xn_regular_order(&moved, tol) {
            Ok(d) => {
                if best.as_ref().is_none_or(|b| d < b.2) {
                    best = Some((record, moved, d));
                }
                if d == target {
                    break;
                }
            }
            Err(e) => failures.push(format!("attempt {}: {e}", attempt + 1)),
        }
    }
    best.ok_or(GenericityError::Exhausted { what: "regular direction", attempts: tries, failures })
}

/// Exact identity check used by tests and verification.
pub fn inverse_is_exact(record: &ChangeRecord) -> bool {
    let prod = crate::poly::rat_mat_mul(&int_rat(&record.matrix), &record.inverse);
    prod.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, v)| *v == if i == j { BigRational::one() } else { BigRational::zero() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elim::VarietyJson;
    use crate::jet::JetCtx;
    use crate::poly::parse_poly;

    fn spec(base: &[&str], fiber: &[&str], gens: &[&str]) -> VarietySpec {
        VarietySpec::from_json(&VarietyJson {
            base_vars: base.iter().map(|s| s.to_string()).collect(),
            fiber_vars: fiber.iter().map(|s| s.to_string()).collect(),
            declared_dim: base.len(),
            generators: gens.iter().map(|s| s.to_string()).collect(),
        })
        .unwrap()
    }

    #[test]
    fn proper_position_repairs_hyperbola() {
        let v = spec(&["y"], &["v"], &["y*v - 1"]);
        let (rec, moved) = find_proper_position(&v, 7, 10, 0).unwrap();
        assert_eq!(rec.matrix, vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(moved.generators()[0], parse_poly("v^2 + y*v - 1", v.names()).unwrap());
        assert!(inverse_is_exact(&rec));
    }

    #[test]
    fn proper_position_identity_and_exhaustion() {
        let v = spec(&["y"], &["v"], &["v^2 - y"]);
        let (rec, _) = find_proper_position(&v, 1, 10, 0).unwrap();
        assert!(rec.is_identity());
        let empty = spec(&["y"], &["v"], &[]);
        assert!(matches!(find_proper_position(&empty, 1, 6, 0), Err(GenericityError::Exhausted { .. })));
    }

    #[test]
    fn linear_form_rejects_collapsing_combination() {
        let v = spec(&["y"], &["v1", "v2"], &["v1^2 - y", "v2 - v1"]);
        assert!(!form_is_admissible(&v, &[GaussRat::one(), -GaussRat::one()], 2).unwrap());
        assert!(form_is_admissible(&v, &coordinate_form(2, 0), 2).unwrap());
        let choice = choose_linear_form(&v, 3, 10).unwrap();
        assert_eq!(choice.form, coordinate_form(2, 0));
        assert_eq!(choice.fiber_count, 2);
        let single = choose_linear_form(&spec(&["y"], &["v"], &["v^2 - y"]), 3, 10).unwrap();
        assert_eq!((single.form, single.image_degree), (vec![GaussRat::one()], 2));
    }

    #[test]
    fn regular_direction_examples() {
        let ctx = JetCtx::default();
        let u = Jet::from_f64_terms(2, 6, ctx, &[(vec![1, 1], 1.0)]);
        let (rec, moved, d) = find_regular_direction(&u, 0, 10, 1e-12).unwrap();
        assert_eq!(d, 2);
        assert_eq!(rec.matrix, vec![vec![1, 1], vec![0, 1]]);
        let expect = Jet::from_f64_terms(2, 6, ctx, &[(vec![1, 1], 1.0), (vec![0, 2], 1.0)]);
        assert!(moved.max_abs_diff(&expect) < 1e-30);
        assert!(rec.backward_jet(&moved).max_abs_diff(&u) < 1e-30);

        let regular = Jet::from_f64_terms(2, 6, ctx, &[(vec![0, 1], 1.0), (vec![1, 0], 3.0)]);
        let (rec, moved, d) = find_regular_direction(&regular, 0, 10, 1e-12).unwrap();
        assert!(rec.is_identity());
        assert_eq!((moved, d), (regular, 1));

        assert!(matches!(find_regular_direction(&Jet::zero(2, 4, ctx), 0, 5, 1e-12), Err(GenericityError::ZeroJet)));
    }

    #[test]
    fn change_round_trips() {
        let rec = ChangeRecord::new(vec![vec![2, 1], vec![1, 1]], ChangeScope::Ambient, 0, 1).unwrap();
        let names = vec!["a".to_string(), "b".to_string()];
        let p = parse_poly("a^2*b - 3*b + 1/2", &names).unwrap();
        assert_eq!(rec.backward_poly(&rec.forward_poly(&p).unwrap()).unwrap(), p);
        let ctx = JetCtx::default();
        let vals = vec![Jet::from_f64_terms(1, 3, ctx, &[(vec![1], 1.0)]), Jet::one(1, 3, ctx)];
        let back = rec.backward_values(&rec.forward_values(&vals));
        assert!(back[0].max_abs_diff(&vals[0]) < 1e-30 && back[1].max_abs_diff(&vals[1]) < 1e-30);
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(serde_json::from_str::<ChangeRecord>(&json).unwrap(), rec);
    }
}
