use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};

use crate::poly::{GaussRat, Monomial, MultiPoly};

use super::{ElimError, MonomialOrder};

/// Polynomial stored by order key, so the last entry is the leading term.
#[derive(Clone, Debug)]
struct KeyedPoly {
    terms: BTreeMap<Vec<u32>, GaussRat>,
}

impl KeyedPoly {
    fn from_poly(p: &MultiPoly, order: &MonomialOrder) -> Self {
        KeyedPoly { terms: p.terms().map(|(m, c)| (order.key(m), c.clone())).collect() }
    }

    fn to_poly(&self, order: &MonomialOrder, nvars: usize) -> MultiPoly {
        MultiPoly::from_terms(nvars, self.terms.iter().map(|(k, c)| (order.monomial(k, nvars).0, c.clone())))
    }

    fn lead(&self) -> Option<(&Vec<u32>, &GaussRat)> {
        self.terms.last_key_value()
    }

    fn make_monic(&mut self) {
        if let Some((_, lc)) = self.lead() {
            let inv = lc.inv().expect("nonzero leading coefficient");
            for c in self.terms.values_mut() {
                *c *= &inv;
            }
        }
    }

    /// `self −= c · x^shift · g` over the non-leading terms of `g`.
    fn sub_tail_multiple(&mut self, c: &GaussRat, shift: &[u32], g: &KeyedPoly) {
        for (k, gc) in g.terms.iter().rev().skip(1) {
            let key: Vec<u32> = k.iter().zip(shift).map(|(a, b)| a + b).collect();
            let delta = c * gc;
            match self.terms.entry(key) {
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() -= &delta;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(-delta);
                }
            }
        }
    }
}

fn key_divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn key_diff(a: &[u32], b: &[u32]) -> Vec<u32> {
    b.iter().zip(a).map(|(y, x)| y - x).collect()
}

/// Full reduction of `f` by monic `basis` elements.
fn normal_form(mut p: KeyedPoly, basis: &[&KeyedPoly]) -> KeyedPoly {
    let mut rem = BTreeMap::new();
    while let Some((k, c)) = p.terms.pop_last() {
        let divisor = basis.iter().find(|g| key_divides(g.lead().expect("nonzero").0, &k));
        match divisor {
            Some(g) => {
                let shift = key_diff(g.lead().expect("nonzero").0, &k);
                p.sub_tail_multiple(&c, &shift, g);
            }
            None => {
                rem.insert(k, c);
            }
        }
    }
    KeyedPoly { terms: rem }
}

/// A generating set together with the order it was computed in.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealBasis {
    nvars: usize,
    generators: Vec<MultiPoly>,
    order: MonomialOrder,
    reduced: bool,
}

impl IdealBasis {
    /// Wraps generators without any Gröbner computation (`reduced` is false).
    pub fn from_generators(nvars: usize, generators: Vec<MultiPoly>, order: MonomialOrder) -> Self {
        IdealBasis { nvars, generators, order, reduced: false }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.is_constant() && !g.is_zero())
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.generators.is_empty()
    }

    /// Leading monomial of a generator in this basis's order.
    pub fn leading_monomial(&self, p: &MultiPoly) -> Option<Monomial> {
        leading_monomial(p, &self.order)
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.generators.iter().filter_map(|g| self.leading_monomial(g)).collect()
    }

    pub fn contains(&self, f: &MultiPoly) -> bool {
        reduce_mod(self, f).is_zero()
    }

    /// Dimension of the zero set (`None` for the unit ideal), from the leading monomials.
    ///
    /// The largest set of variables containing the support of no leading monomial.
    pub fn krull_dimension(&self) -> Option<usize> {
        if self.is_unit() {
            return None;
        }
        let supports: Vec<u64> = self
            .leading_monomials()
            .iter()
            .map(|m| m.0.iter().enumerate().filter(|(_, &e)| e > 0).fold(0u64, |acc, (v, _)| acc | (1 << v)))
            .collect();
        assert!(self.nvars <= 24, "dimension search supports at most 24 variables");
        let mut best = 0;
        for set in 0u64..(1u64 << self.nvars) {
            let size = set.count_ones() as usize;
            if size > best && supports.iter().all(|&s| s & !set != 0) {
                best = size;
            }
        }
        Some(best)
    }

    /// Number of standard monomials, when the ideal is zero-dimensional.
    pub fn standard_monomial_count(&self) -> Option<usize> {
        if self.is_unit() {
            return Some(0);
        }
        let lms = self.leading_monomials();
        let mut bounds = Vec::with_capacity(self.nvars);
        for v in 0..self.nvars {
            let pure = lms
                .iter()
                .filter(|m| m.0.iter().enumerate().all(|(w, &e)| w == v || e == 0) && m.0[v] > 0)
                .map(|m| m.0[v])
                .min()?;
            bounds.push(pure);
        }
        let mut count = 0;
        let mut e = vec![0u32; self.nvars];
        'outer: loop {
            let m = Monomial(e.clone());
            if !lms.iter().any(|l| l.divides(&m)) {
                count += 1;
            }
            for v in 0..self.nvars {
                e[v] += 1;
                if e[v] < bounds[v] {
                    continue 'outer;
                }
                e[v] = 0;
            }
            break;
        }
        Some(count)
    }
}

pub(crate) fn leading_monomial(p: &MultiPoly, order: &MonomialOrder) -> Option<Monomial> {
    p.terms().max_by(|a, b| order.cmp(a.0, b.0)).map(|(m, _)| m.clone())
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

/// Reduced Gröbner basis by Buchberger's algorithm with sugar selection and
/// the product and chain criteria. Zero generators are ignored; the unit ideal
/// gives `{1}`.
pub fn groebner_basis(gens: &[MultiPoly], order: &MonomialOrder) -> Result<IdealBasis, ElimError> {
    let nvars = match gens.first() {
        Some(g) => g.nvars(),
        None => return Err(ElimError::EmptyInput),
    };
    groebner_basis_in(nvars, gens, order)
}

/// As [`groebner_basis`], with the variable count given so an empty list is allowed.
pub fn groebner_basis_in(nvars: usize, gens: &[MultiPoly], order: &MonomialOrder) -> Result<IdealBasis, ElimError> {
    order.validate(nvars)?;
    if let Some(g) = gens.iter().find(|g| g.nvars() != nvars) {
        return Err(ElimError::VarCount { expected: nvars, found: g.nvars() });
    }
    let mut basis: Vec<KeyedPoly> = Vec::new();
    let mut lms: Vec<Monomial> = Vec::new();
    let mut sugars: Vec<u32> = Vec::new();
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let unit = || IdealBasis { nvars, generators: vec![MultiPoly::one(nvars)], order: order.clone(), reduced: true };

    let add = |h: KeyedPoly,
                   sugar: u32,
                   basis: &mut Vec<KeyedPoly>,
                   lms: &mut Vec<Monomial>,
                   sugars: &mut Vec<u32>,
                   pending: &mut BTreeSet<(usize, usize)>,
                   pairs: &mut Vec<Pair>| {
        let lm = order.monomial(h.lead().expect("nonzero").0, nvars);
        let t = basis.len();
        for i in 0..t {
            let lcm = lms[i].lcm(&lm);
            let s = (sugars[i] + lcm.degree() - lms[i].degree()).max(sugar + lcm.degree() - lm.degree());
            pending.insert((i, t));
            pairs.push(Pair { i, j: t, lcm, sugar: s });
        }
        basis.push(h);
        lms.push(lm);
        sugars.push(sugar);
    };

    for g in gens.iter().filter(|g| !g.is_zero()) {
        let refs: Vec<&KeyedPoly> = basis.iter().collect();
        let mut h = normal_form(KeyedPoly::from_poly(g, order), &refs);
        if h.terms.is_empty() {
            continue;
        }
        h.make_monic();
        if h.terms.len() == 1 && h.lead().expect("nonzero").0.iter().all(|&e| e == 0) {
            return Ok(unit());
        }
        let sugar = g.total_degree().unwrap_or(0);
        add(h, sugar, &mut basis, &mut lms, &mut sugars, &mut pending, &mut pairs);
    }

    while !pairs.is_empty() {
        let best = (0..pairs.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&pairs[a], &pairs[b]);
                pa.sugar.cmp(&pb.sugar).then_with(|| order.cmp(&pa.lcm, &pb.lcm)).then_with(|| (pa.i, pa.j).cmp(&(pb.i, pb.j)))
            })
            .expect("nonempty");
        let Pair { i, j, lcm, sugar } = pairs.swap_remove(best);
        pending.remove(&(i, j));

        let coprime = lms[i].0.iter().zip(&lms[j].0).all(|(a, b)| *a == 0 || *b == 0);
        if coprime {
            continue;
        }
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && lms[k].divides(&lcm)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }

        let mut s = KeyedPoly { terms: BTreeMap::new() };
        let si = order.key(&lms[i].quotient_of(&lcm));
        let sj = order.key(&lms[j].quotient_of(&lcm));
        s.sub_tail_multiple(&-GaussRat::one(), &si, &basis[i]);
        s.sub_tail_multiple(&GaussRat::one(), &sj, &basis[j]);
        let refs: Vec<&KeyedPoly> = basis.iter().collect();
        let mut h = normal_form(s, &refs);
        if h.terms.is_empty() {
            continue;
        }
        h.make_monic();
        if h.terms.len() == 1 && h.lead().expect("nonzero").0.iter().all(|&e| e == 0) {
            return Ok(unit());
        }
        add(h, sugar, &mut basis, &mut lms, &mut sugars, &mut pending, &mut pairs);
    }

    // Minimalize, then interreduce.
    let mut keep: Vec<usize> = Vec::new();
    for (t, lm) in lms.iter().enumerate() {
        let redundant = lms.iter().enumerate().any(|(u, other)| u != t && other.divides(lm) && (other != lm || u < t));
        if !redundant {
            keep.push(t);
        }
    }
    let minimal: Vec<KeyedPoly> = keep.iter().map(|&t| basis[t].clone()).collect();
    let mut reduced: Vec<KeyedPoly> = Vec::with_capacity(minimal.len());
    for (t, g) in minimal.iter().enumerate() {
        let others: Vec<&KeyedPoly> = minimal.iter().enumerate().filter(|(u, _)| *u != t).map(|(_, p)| p).collect();
        let (lk, lc) = g.lead().expect("nonzero");
        let mut tail = g.clone();
        tail.terms.pop_last();
        let mut h = normal_form(tail, &others);
        h.terms.insert(lk.clone(), lc.clone());
        reduced.push(h);
    }
    reduced.sort_by(|a, b| a.lead().expect("nonzero").0.cmp(b.lead().expect("nonzero").0));
    Ok(IdealBasis {
        nvars,
        generators: reduced.iter().map(|p| p.to_poly(order, nvars)).collect(),
        order: order.clone(),
        reduced: true,
    })
}

/// Normal form of `f` with respect to the basis (zero iff `f` is in the ideal
/// when the basis is a Gröbner basis).
pub fn reduce_mod(basis: &IdealBasis, f: &MultiPoly) -> MultiPoly {
    let order = &basis.order;
    let keyed: Vec<KeyedPoly> = basis
        .generators
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let mut k = KeyedPoly::from_poly(g, order);
            k.make_monic();
            k
        })
        .collect();
    let refs: Vec<&KeyedPoly> = keyed.iter().collect();
    normal_form(KeyedPoly::from_poly(f, order), &refs).to_poly(order, basis.nvars)
}

/// Generators of the elimination ideal: the basis elements free of `drop`.
///
/// The basis order must rank every dropped variable above every kept one.
pub fn eliminate(basis: &IdealBasis, drop: &[usize]) -> Result<IdealBasis, ElimError> {
    if drop.is_empty() {
        return Ok(basis.clone());
    }
    let blocks = basis.order.blocks(basis.nvars);
    let mut covered: Vec<usize> = Vec::new();
    let mut ok = false;
    for b in &blocks {
        if b.iter().any(|v| !drop.contains(v)) {
            break;
        }
        covered.extend(b);
        if covered.len() == drop.len() && drop.iter().all(|v| covered.contains(v)) {
            ok = true;
            break;
        }
    }
    if !ok {
        return Err(ElimError::OrderMismatch(drop.to_vec()));
    }
    let generators = basis.generators.iter().filter(|g| drop.iter().all(|&v| !g.involves(v))).cloned().collect();
    Ok(IdealBasis { nvars: basis.nvars, generators, order: basis.order.clone(), reduced: basis.reduced })
}

/// S-polynomial of two polynomials in the given order (exposed for invariant checks).
pub fn s_polynomial(f: &MultiPoly, g: &MultiPoly, order: &MonomialOrder) -> MultiPoly {
    let (lf, lg) = match (leading_monomial(f, order), leading_monomial(g, order)) {
        (Some(a), Some(b)) => (a, b),
        _ => return MultiPoly::zero(f.nvars()),
    };
    let lcm = lf.lcm(&lg);
    let cf = f.coeff(&lf).inv().expect("nonzero");
    let cg = g.coeff(&lg).inv().expect("nonzero");
    &f.mul_monomial(&lf.quotient_of(&lcm), &cf) - &g.mul_monomial(&lg.quotient_of(&lcm), &cg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn p(s: &str, n: &[String]) -> MultiPoly {
        parse_poly(s, n).unwrap()
    }

    #[test]
    fn twisted_cubic_elimination() {
        let n = names(&["t", "u", "v"]);
        let gb = groebner_basis(&[p("u - t^2", &n), p("v - t^3", &n)], &MonomialOrder::Lex).unwrap();
        assert!(gb.generators().contains(&p("u^3 - v^2", &n)), "{:?}", gb.generators());
        let el = eliminate(&gb, &[0]).unwrap();
        assert_eq!(el.generators(), &[p("u^3 - v^2", &n)]);
    }

    #[test]
    fn trivial_bases() {
        let n = names(&["x", "y"]);
        let gb = groebner_basis(&[p("3", &n)], &MonomialOrder::GrLex).unwrap();
        assert_eq!(gb.generators(), &[MultiPoly::one(2)]);
        let gb = groebner_basis(&[p("2*x^2 - 4*y", &n)], &MonomialOrder::GrLex).unwrap();
        assert_eq!(gb.generators(), &[p("x^2 - 2*y", &n)]);
        let gb = groebner_basis(&[p("x*y - 1", &n), p("x", &n)], &MonomialOrder::GrLex).unwrap();
        assert!(gb.is_unit());
    }

    #[test]
    fn normal_forms() {
        let n = names(&["v", "y"]);
        let gb = groebner_basis(&[p("v^2 - y", &n)], &MonomialOrder::eliminating(2, &[0])).unwrap();
        assert!(reduce_mod(&gb, &p("v^2 - y", &n)).is_zero());
        assert_eq!(reduce_mod(&gb, &p("v^4", &n)), p("y^2", &n));
        let unit = groebner_basis(&[MultiPoly::one(2)], &MonomialOrder::GrLex).unwrap();
        assert!(reduce_mod(&unit, &p("v^7 + y", &n)).is_zero());
    }

    #[test]
    fn elimination_edge_cases() {
        let n = names(&["v", "y"]);
        let gb = groebner_basis(&[p("v - y", &n)], &MonomialOrder::eliminating(2, &[0])).unwrap();
        assert!(eliminate(&gb, &[0]).unwrap().is_zero_ideal());
        assert_eq!(eliminate(&gb, &[]).unwrap(), gb);
        assert!(matches!(eliminate(&gb, &[1]), Err(ElimError::OrderMismatch(_))));
    }

    #[test]
    fn s_polynomials_reduce_to_zero() {
        let n = names(&["x", "y", "z"]);
        let gens = [p("x^2 + y*z - 1", &n), p("x*y - z^2", &n), p("y^3 - x + 2*z", &n)];
        for order in [MonomialOrder::GrLex, MonomialOrder::Lex] {
            let gb = groebner_basis(&gens, &order).unwrap();
            for g in &gens {
                assert!(reduce_mod(&gb, g).is_zero());
            }
            for a in gb.generators() {
                for b in gb.generators() {
                    assert!(reduce_mod(&gb, &s_polynomial(a, b, &order)).is_zero());
                }
            }
        }
    }

    #[test]
    fn dimension_and_standard_monomials() {
        let n = names(&["x", "y", "z"]);
        let gb = groebner_basis(&[p("x^2 - y", &n), p("z", &n)], &MonomialOrder::GrLex).unwrap();
        assert_eq!(gb.krull_dimension(), Some(1));
        let pts = groebner_basis(&[p("x^2 - 1", &n), p("y - x", &n), p("z^3 - z", &n)], &MonomialOrder::GrLex).unwrap();
        assert_eq!(pts.krull_dimension(), Some(0));
        assert_eq!(pts.standard_monomial_count(), Some(6));
        assert_eq!(gb.standard_monomial_count(), None);
    }
}
