//! Annihilators of the output components: integral-closure constructions for
//! the base components and elimination for everything else.

use crate::elim::projection_eliminant;
use crate::jet::Jet;
use crate::poly::{resultant, substitute_linear_rat, MultiPoly, PolyError, RatMatrix, UniOverPoly};

use num::rational::BigRational;
use num::{One, Zero};

use super::assemble::{Candidates, Lifted};
use super::division::DivisionData;
use super::reduce::Reduction;
use super::{ApproxError, AtStage, Stage};

/// Annihilator over `C[x]` of `h·W² + r`, where `W = x_n^d + Σ a_k x_n^{d−k}`,
/// `r = Σ b_k x_n^{2d−1−k}`, `h` is a polynomial and each `a_k`, `b_k` is a
/// function of `x_1…x_{n−1}` with the given annihilator (last variable `t`).
///
/// Linear annihilators are substituted; the others are eliminated by resultants.
/// The result is squarefree, monic in `z`, in `n + 1` variables with `z` last.
pub fn closure_annihilator(
    quotient: &MultiPoly,
    d: usize,
    weierstrass_coeffs: &[UniOverPoly],
    remainder_coeffs: &[UniOverPoly],
) -> Result<UniOverPoly, PolyError> {
    let n = quotient.nvars();
    assert_eq!(weierstrass_coeffs.len(), d);
    assert_eq!(remainder_coeffs.len(), 2 * d);
    let slots = 3 * d;
    let total = n + slots + 1;
    let z = total - 1;
    let xs: Vec<usize> = (0..n).collect();
    let h = quotient.remap(total, &xs);
    let xn = MultiPoly::var(total, n - 1);
    let mut w = xn.pow(d as u32);
    for k in 1..=d {
        w = &w + &(&MultiPoly::var(total, n + k - 1) * &xn.pow((d - k) as u32));
    }
    let mut r = MultiPoly::zero(total);
    for k in 0..2 * d {
        r = &r + &(&MultiPoly::var(total, n + d + k) * &xn.pow((2 * d - 1 - k) as u32));
    }
    let mut acc = &MultiPoly::var(total, z) - &(&(&h * &(&w * &w)) + &r);
    let anns: Vec<&UniOverPoly> = weierstrass_coeffs.iter().chain(remainder_coeffs).collect();
    let slot_map = |slot: usize| -> Vec<usize> { (0..n - 1).chain(std::iter::once(n + slot)).collect() };
    let embed = |q: &UniOverPoly, slot: usize| q.to_multi().remap(total, &slot_map(slot));
    let mut pending = Vec::new();
    for (slot, q) in anns.iter().enumerate() {
        if !acc.involves(n + slot) {
            continue;
        }
        if q.degree() == 1 && q.is_monic() {
            // q = t + q0(x') gives t = −q0.
            let value = q.coeff(0).remap(total, &slot_map(slot)).scale(&crate::poly::GaussRat::from_int(-1));
            acc = acc.substitute(n + slot, &value);
        } else {
            pending.push(slot);
        }
    }
    for slot in pending {
        if acc.involves(n + slot) {
            acc = resultant(&embed(anns[slot], slot), &acc, n + slot)?;
        }
    }
    if (n..z).any(|v| acc.involves(v)) {
        return Err(PolyError::VarOutOfRange { var: n, nvars: n + 1 });
    }
    let mut map: Vec<usize> = (0..total).map(|v| v.min(n)).collect();
    map[z] = n;
    let p = acc.remap(n + 1, &map);
    let u = UniOverPoly::from_multi(&p, n)?.squarefree_part()?;
    if !u.is_monic() {
        return Err(PolyError::NotMonic(n));
    }
    Ok(u)
}

/// Level data shared by all ν: the elimination ideal in `(x, z)` (original
/// ambient coordinates) and the maps between coordinate systems.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnihilatorData {
    source_dim: usize,
    ambient_dim: usize,
    base_dim: usize,
    d: usize,
    /// Working variety in original coordinates, in `n + N` variables.
    variety_gens: Vec<MultiPoly>,
    /// `(M⁻¹ z)_i` for the base coordinates, in `n + N` variables.
    base_forms: Vec<MultiPoly>,
    /// `diag(J⁻¹, 1)` undoing the source change on `(x, z)`; `None` for the identity.
    source_undo: Option<RatMatrix>,
    ambient_identity: bool,
}

impl AnnihilatorData {
    pub fn new(red: &Reduction, div: &DivisionData) -> Result<Self, PolyError> {
        let n = div.source_dim();
        let big_n = red.variety.nvars();
        let m = red.base_dim();
        let total = n + big_n;
        let zs: Vec<usize> = (n..total).collect();
        let variety_gens = red
            .variety
            .generators()
            .iter()
            .map(|g| Ok(red.change.backward_poly(g)?.remap(total, &zs)))
            .collect::<Result<Vec<_>, PolyError>>()?;
        let base_forms = (0..m)
            .map(|i| {
                let mut f = MultiPoly::zero(total);
                for (k, c) in red.change.inverse[i].iter().enumerate() {
                    if !c.is_zero() {
                        let g = crate::poly::GaussRat::from_rational(c.clone());
                        f = &f + &MultiPoly::var(total, n + k).scale(&g);
                    }
                }
                f
            })
            .collect();
        let source_undo = if div.source_change.is_identity() {
            None
        } else {
            let mut mat = vec![vec![BigRational::zero(); n + 1]; n + 1];
            for i in 0..n {
                mat[i][..n].clone_from_slice(&div.source_change.inverse[i]);
            }
            mat[n][n] = BigRational::one();
            Some(mat)
        };
        Ok(AnnihilatorData {
            source_dim: n,
            ambient_dim: big_n,
            base_dim: m,
            d: div.d,
            variety_gens,
            base_forms,
            source_undo,
            ambient_identity: red.change.is_identity(),
        })
    }

    fn undo_source(&self, p: UniOverPoly) -> Result<UniOverPoly, PolyError> {
        match &self.source_undo {
            None => Ok(p),
            Some(mat) => UniOverPoly::from_multi(&substitute_linear_rat(&p.to_multi(), mat)?, self.source_dim),
        }
    }

    /// Elimination ideal generators with the given base annihilators (working coordinates).
    pub fn ideal(&self, base: &[UniOverPoly]) -> Vec<MultiPoly> {
        let n = self.source_dim;
        let total = n + self.ambient_dim;
        let mut gens = self.variety_gens.clone();
        for (i, p) in base.iter().enumerate() {
            let mut args: Vec<MultiPoly> = (0..n).map(|v| MultiPoly::var(total, v)).collect();
            args.push(self.base_forms[i].clone());
            let e = p.to_multi().compose(&args);
            if !e.is_zero() && !gens.contains(&e) {
                gens.push(e);
            }
        }
        gens
    }

    /// Annihilator of ambient component `k` (original coordinates) by elimination.
    pub fn eliminant(&self, gens: &[MultiPoly], k: usize) -> Result<UniOverPoly, ApproxError> {
        let n = self.source_dim;
        let base: Vec<usize> = (0..n).collect();
        projection_eliminant(n + self.ambient_dim, gens, &base, n + k)
            .map_err(|e| ApproxError::internal(format!("eliminant of component {k}: {e}")))
    }

    pub fn ambient_identity(&self) -> bool {
        self.ambient_identity
    }
}

/// Output of [`compute_annihilators`].
#[derive(Clone, Debug, PartialEq)]
pub struct Annihilated {
    /// All ambient components, original coordinates.
    pub values: Vec<Jet>,
    pub annihilators: Vec<UniOverPoly>,
    /// Annihilators of the base components in working coordinates.
    pub base_annihilators: Vec<UniOverPoly>,
    /// Generators in `(x, z)`, original coordinates, vanishing on the graph of `values`.
    pub ideal: Vec<MultiPoly>,
}

/// Undoes the coordinate changes on the jets and attaches annihilators.
/// `coeff_annihilators` are the annihilators of the division coefficients at this ν.
pub fn compute_annihilators(
    red: &Reduction,
    div: &DivisionData,
    coeff_annihilators: &[UniOverPoly],
    cand: &Candidates,
    lifted: &Lifted,
    data: &AnnihilatorData,
    depth: usize,
) -> Result<Annihilated, ApproxError> {
    let stage = Stage::Annihilators;
    let (m, d) = (data.base_dim, data.d);
    let mut moved: Vec<Jet> = cand.base_values.clone();
    moved.extend(lifted.fiber_values.iter().cloned());
    let working: Vec<Jet> = if div.source_change.is_identity() {
        moved
    } else {
        moved.iter().map(|j| div.source_change.backward_jet(j)).collect()
    };
    let values = red.change.backward_values(&working);
    let mut base = Vec::with_capacity(m);
    for j in 0..m {
        let (wc, rc): (Vec<UniOverPoly>, Vec<UniOverPoly>) = if d == 0 {
            (Vec::new(), Vec::new())
        } else {
            let offset = d + 2 * d * j;
            (coeff_annihilators[..d].to_vec(), coeff_annihilators[offset..offset + 2 * d].to_vec())
        };
        let p = closure_annihilator(&cand.quotients[j].to_poly(), d, &wc, &rc).at(stage, depth)?;
        base.push(data.undo_source(p).at(stage, depth)?);
    }
    let gens = data.ideal(&base);
    let mut annihilators = Vec::with_capacity(data.ambient_dim);
    for k in 0..data.ambient_dim {
        if data.ambient_identity && k < m {
            annihilators.push(base[k].clone());
        } else {
            annihilators.push(data.eliminant(&gens, k).at(stage, depth)?);
        }
    }
    Ok(Annihilated { values, annihilators, base_annihilators: base, ideal: gens })
}
