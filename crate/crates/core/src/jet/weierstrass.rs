//! Weierstrass preparation and division for jets in the last variable `x_n`.

use std::collections::BTreeMap;

use crate::number::Cx;
use crate::poly::Monomial;

use super::{Jet, JetCtx, JetError};

/// Polynomial in the distinguished variable with jet coefficients in the other variables.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoly {
    var_index: usize,
    nvars: usize,
    order: u32,
    ctx: JetCtx,
    /// `coeffs[k]` multiplies `x_var^k`; each is a jet in `nvars − 1` variables.
    coeffs: Vec<Jet>,
}

impl JetPoly {
    pub fn new(var_index: usize, nvars: usize, order: u32, ctx: JetCtx, coeffs: Vec<Jet>) -> Self {
        for c in &coeffs {
            assert_eq!(c.nvars(), nvars - 1, "coefficient jets live in the remaining variables");
            assert_eq!(c.order(), order, "coefficient jets share one order");
        }
        let mut p = JetPoly { var_index, nvars, order, ctx, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn from_jet(j: &Jet, var: usize) -> Self {
        JetPoly::new(var, j.nvars(), j.order(), j.ctx(), j.coeffs_in_var(var))
    }

    /// The monic polynomial `x_var^d` (for `d = 0`, the constant 1).
    pub fn monomial(var: usize, nvars: usize, order: u32, ctx: JetCtx, d: usize) -> Self {
        let mut coeffs = vec![Jet::zero(nvars - 1, order, ctx); d + 1];
        coeffs[d] = Jet::one(nvars - 1, order, ctx);
        JetPoly::new(var, nvars, order, ctx, coeffs)
    }

    pub fn var_index(&self) -> usize {
        self.var_index
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Degree in the distinguished variable; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Coefficients, lowest power first.
    pub fn coeffs(&self) -> &[Jet] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Jet {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Jet::zero(self.nvars - 1, self.order, self.ctx))
    }

    pub fn is_monic(&self) -> bool {
        match self.coeffs.last() {
            Some(lc) => (lc - &Jet::one(self.nvars - 1, self.order, self.ctx)).is_zero(),
            None => false,
        }
    }

    /// Monic with all lower coefficients vanishing at the origin (within `tol`).
    pub fn is_weierstrass(&self, tol: f64) -> bool {
        self.is_monic() && self.coeffs[..self.coeffs.len() - 1].iter().all(|c| c.constant_term().abs() <= tol)
    }

    pub fn to_jet(&self) -> Jet {
        Jet::from_var_coeffs(&self.coeffs, self.var_index, self.nvars, self.order, self.ctx)
    }

    pub fn valid_order(&self) -> u32 {
        self.coeffs.iter().map(|c| c.valid_order()).min().unwrap_or(self.order)
    }
}

/// Smallest `k` such that `u(0,…,0,x_n)` has a coefficient above `tol` on `x_n^k`.
pub fn xn_regular_order(u: &Jet, tol: f64) -> Result<u32, JetError> {
    let n = u.nvars();
    for k in 0..=u.order() {
        let mut e = vec![0; n];
        e[n - 1] = k;
        if u.coeff(&e).abs() > tol {
            return Ok(k);
        }
    }
    Err(JetError::NotRegular(u.order()))
}

/// Result of Weierstrass preparation: `u ≡ unit·w`.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub unit: Jet,
    pub w: JetPoly,
    pub d: u32,
    /// Order to which `unit` and `w` agree with the exact factorization of the germ.
    pub valid_order: u32,
}

fn poly_mul_trunc(a: &[Cx], b: &[Cx], max_deg: usize, prec: usize) -> Vec<Cx> {
    let mut out = vec![Cx::zero(prec); max_deg + 1];
    for (i, x) in a.iter().enumerate() {
        if i > max_deg || x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j > max_deg {
                break;
            }
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// All exponent vectors in `nv` variables with total degree exactly `deg`.
fn monomials_of_degree(nv: usize, deg: u32) -> Vec<Vec<u32>> {
    if nv == 0 {
        return if deg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in monomials_of_degree(nv - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Weierstrass preparation in `x_n` by x'-adic Hensel lifting.
///
/// Writes `u = E·W` with `W = x_n^d + Σ_{k<d} a_k(x') x_n^k`, `a_k(0) = 0`, and
/// `E` a unit. The computed factors reproduce `u` through total degree `D`; they
/// approximate the exact factors of the germ through degree `D − d`.
pub fn weierstrass_prepare(u: &Jet, tol: f64) -> Result<Prepared, JetError> {
    let n = u.nvars();
    let order = u.order();
    let ctx = u.ctx();
    let prec = ctx.prec;
    let d = xn_regular_order(u, tol)?;
    if d > order {
        return Err(JetError::OrderBudget { needed: d, have: order });
    }
    let dd = d as usize;
    let dmax = order as usize;

    // Slices of u by x'-monomial: x' exponents -> coefficients in x_n.
    let mut slices: BTreeMap<Vec<u32>, Vec<Cx>> = BTreeMap::new();
    for (m, c) in u.terms() {
        let key = m.0[..n - 1].to_vec();
        let k = m.0[n - 1] as usize;
        let entry = slices.entry(key).or_insert_with(|| vec![Cx::zero(prec); dmax + 1]);
        entry[k] = c.clone();
    }
    let zero_key = vec![0u32; n - 1];
    let u0 = slices.get(&zero_key).cloned().unwrap_or_else(|| vec![Cx::zero(prec); dmax + 1]);
    let e: Vec<Cx> = u0[dd..].to_vec();
    // Inverse of e as a series in x_n, needed modulo x_n^d.
    let mut einv = vec![Cx::zero(prec); dd.max(1)];
    let e0inv = e[0].inv().ok_or(JetError::NotRegular(order))?;
    einv[0] = e0inv.clone();
    for k in 1..dd {
        let mut s = Cx::zero(prec);
        for i in 1..=k {
            if i < e.len() {
                s = &s + &(&e[i] * &einv[k - i]);
            }
        }
        einv[k] = -&(&s * &e0inv);
    }

    let mut unit_parts: BTreeMap<Vec<u32>, Vec<Cx>> = BTreeMap::new();
    let mut w_parts: BTreeMap<Vec<u32>, Vec<Cx>> = BTreeMap::new();
    unit_parts.insert(zero_key.clone(), e.clone());

    for deg in 1..=order {
        for mu in monomials_of_degree(n - 1, deg) {
            let maxk = (order - deg) as usize;
            let mut g: Vec<Cx> = match slices.get(&mu) {
                Some(s) => s[..=maxk].to_vec(),
                None => vec![Cx::zero(prec); maxk + 1],
            };
            for (mu2, wv) in &w_parts {
                if !Monomial(mu2.clone()).divides(&Monomial(mu.clone())) || *mu2 == mu {
                    continue;
                }
                let mu1: Vec<u32> = mu.iter().zip(mu2).map(|(a, b)| a - b).collect();
                if let Some(ev) = unit_parts.get(&mu1) {
                    let prod = poly_mul_trunc(ev, wv, maxk, prec);
                    for (gk, pk) in g.iter_mut().zip(prod.iter()) {
                        *gk = &*gk - pk;
                    }
                }
            }
            // W_mu = (g·e^{-1}) mod x_n^d, E_mu = (g − e·W_mu)/x_n^d.
            let wmu = if dd > 0 { poly_mul_trunc(&g, &einv, dd - 1, prec) } else { Vec::new() };
            if maxk + 1 > dd {
                let ew = poly_mul_trunc(&e, &wmu, maxk, prec);
                let emu: Vec<Cx> = (dd..=maxk).map(|k| &g[k] - &ew[k]).collect();
                if emu.iter().any(|c| !c.is_zero()) {
                    unit_parts.insert(mu.clone(), emu);
                }
            }
            if wmu.iter().any(|c| !c.is_zero()) {
                w_parts.insert(mu, wmu);
            }
        }
    }

    let mut unit = Jet::zero(n, order, ctx);
    for (mu, coeffs) in &unit_parts {
        for (k, c) in coeffs.iter().enumerate() {
            let mut ex = mu.clone();
            ex.push(k as u32);
            unit.add_term(Monomial(ex), c);
        }
    }
    let valid = order - d;
    unit.set_valid_order(valid.min(u.valid_order()));
    let mut wcoeffs = vec![Jet::zero(n - 1, order, ctx); dd + 1];
    for (mu, coeffs) in &w_parts {
        for (k, c) in coeffs.iter().enumerate() {
            wcoeffs[k].add_term(Monomial(mu.clone()), c);
        }
    }
    wcoeffs[dd] = Jet::one(n - 1, order, ctx);
    for c in wcoeffs.iter_mut() {
        c.set_valid_order(valid.min(u.valid_order()));
    }
    let w = JetPoly::new(n - 1, n, order, ctx, wcoeffs);
    Ok(Prepared { unit, w, d, valid_order: valid.min(u.valid_order()) })
}

/// Division `f = H·W^power + r` with `deg_{x_n} r < power·deg W`.
///
/// The identity holds through total degree `D`; `H` and `r` approximate the
/// exact Weierstrass quotient and remainder through degree `D − power·d`.
pub fn weierstrass_divide(f: &Jet, w: &JetPoly, power: u32) -> Result<(Jet, JetPoly), JetError> {
    if f.nvars() != w.nvars() || f.order() != w.order() {
        return Err(JetError::ShapeMismatch(f.nvars(), f.order(), w.nvars(), w.order()));
    }
    if !w.is_weierstrass(1e-12) {
        return Err(JetError::NotWeierstrass);
    }
    let var = w.var_index();
    let d = w.degree().expect("monic") as u32;
    let pd = power * d;
    if pd > f.order() {
        return Err(JetError::OrderBudget { needed: pd, have: f.order() });
    }
    let valid = (f.order() - pd).min(f.valid_order()).min(w.valid_order());
    let n = f.nvars();
    let (order, ctx) = (f.order(), f.ctx());
    let divisor = w.to_jet().pow(power);
    let mut rem = f.clone();
    let mut quot = Jet::zero(n, order, ctx);
    if pd == 0 {
        quot = f.clone();
        rem = Jet::zero(n, order, ctx);
    } else {
        let mut k = f.terms().map(|(m, _)| m.0[var]).max().unwrap_or(0);
        while k >= pd {
            let mut c = Jet::zero(n, order, ctx);
            for (m, v) in rem.terms() {
                if m.0[var] == k {
                    let mut e = m.0.clone();
                    e[var] = k - pd;
                    c.add_term(Monomial(e), v);
                }
            }
            if !c.is_zero() {
                quot = &quot + &c;
                rem = &rem - &(&c * &divisor);
            }
            k -= 1;
        }
    }
    quot.set_valid_order(valid);
    rem.set_valid_order(valid);
    let mut r = JetPoly::from_jet(&rem, var);
    for c in r.coeffs.iter_mut() {
        c.set_valid_order(valid);
    }
    Ok((quot, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> JetCtx {
        JetCtx::default()
    }

    fn jet(order: u32, terms: &[(Vec<u32>, f64)]) -> Jet {
        Jet::from_f64_terms(2, order, ctx(), terms)
    }

    #[test]
    fn regular_order_examples() {
        let u = jet(5, &[(vec![0, 2], 1.0), (vec![1, 0], -1.0)]);
        assert_eq!(xn_regular_order(&u, 1e-12).unwrap(), 2);
        assert_eq!(xn_regular_order(&Jet::one(2, 5, ctx()), 1e-12).unwrap(), 0);
        let v = jet(5, &[(vec![1, 1], 1.0)]);
        assert!(matches!(xn_regular_order(&v, 1e-12), Err(JetError::NotRegular(5))));
    }

    #[test]
    fn prepare_examples() {
        let u = jet(6, &[(vec![0, 2], 1.0), (vec![1, 0], -1.0)]);
        let p = weierstrass_prepare(&u, 1e-12).unwrap();
        assert_eq!(p.d, 2);
        assert!(p.unit.max_abs_diff(&Jet::one(2, 6, ctx())) < 1e-30);
        assert!(p.w.to_jet().max_abs_diff(&u) < 1e-30);

        // (1+x1)(x2−x1)
        let u = jet(6, &[(vec![0, 1], 1.0), (vec![1, 0], -1.0), (vec![1, 1], 1.0), (vec![2, 0], -1.0)]);
        let p = weierstrass_prepare(&u, 1e-12).unwrap();
        assert_eq!(p.d, 1);
        assert!(p.unit.max_abs_diff(&jet(6, &[(vec![0, 0], 1.0), (vec![1, 0], 1.0)])) < 1e-30);
        assert!(p.w.to_jet().max_abs_diff(&jet(6, &[(vec![0, 1], 1.0), (vec![1, 0], -1.0)])) < 1e-30);

        let unit = jet(4, &[(vec![0, 0], 2.0), (vec![1, 1], 1.0)]);
        let p = weierstrass_prepare(&unit, 1e-12).unwrap();
        assert_eq!(p.d, 0);
        assert_eq!(p.unit, unit);
        assert_eq!(p.w.degree(), Some(0));
    }

    #[test]
    fn divide_examples() {
        let w = JetPoly::from_jet(&jet(6, &[(vec![0, 2], 1.0), (vec![1, 0], -1.0)]), 1);
        let f = jet(6, &[(vec![0, 4], 1.0)]);
        let (h, r) = weierstrass_divide(&f, &w, 2).unwrap();
        assert!(h.max_abs_diff(&Jet::one(2, 6, ctx())) < 1e-30);
        let expect = jet(6, &[(vec![1, 2], 2.0), (vec![2, 0], -1.0)]);
        assert!(r.to_jet().max_abs_diff(&expect) < 1e-30);

        let low = jet(6, &[(vec![0, 3], 1.0), (vec![2, 1], 5.0)]);
        let (h, r) = weierstrass_divide(&low, &w, 2).unwrap();
        assert!(h.is_zero());
        assert_eq!(r.to_jet().max_abs_diff(&low), 0.0);
        assert_eq!(r.valid_order(), 2);

        let w2 = w.to_jet().pow(2);
        let (h, r) = weierstrass_divide(&w2, &w, 2).unwrap();
        assert!(h.max_abs_diff(&Jet::one(2, 6, ctx())) < 1e-30);
        assert!(r.to_jet().max_abs() < 1e-30);
    }

    #[test]
    fn divide_budget() {
        let w = JetPoly::from_jet(&jet(3, &[(vec![0, 2], 1.0), (vec![1, 0], -1.0)]), 1);
        let f = jet(3, &[(vec![0, 1], 1.0)]);
        assert!(matches!(weierstrass_divide(&f, &w, 2), Err(JetError::OrderBudget { needed: 4, have: 3 })));
    }
}
