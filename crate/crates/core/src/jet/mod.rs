//! Truncated multivariate power series (jets) with approximate complex coefficients.

mod json;
mod newton;
mod sample;
mod tougeron;
mod weierstrass;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::number::{Cx, DEFAULT_PRECISION};
use crate::poly::{GaussRat, Monomial, MultiPoly};

pub use json::{jet_from_json, jet_to_json, JetJson, JetTermJson};
pub(crate) use newton::solve_jet_linear;
pub use newton::{newton_solve, select_square_subsystem, JetEquation, JetSystem, NewtonConfig, NewtonOutcome};
pub use sample::{polydisc_samples, sup_on_samples};
pub use tougeron::{tougeron_correct, TougeronConfig, TougeronOutcome, ZPoly};
pub use weierstrass::{weierstrass_divide, weierstrass_prepare, xn_regular_order, JetPoly, Prepared};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet shape mismatch: ({0} vars, order {1}) vs ({2} vars, order {3})")]
    ShapeMismatch(usize, u32, usize, u32),
    #[error("not a unit: constant term modulus {0:e} below tolerance")]
    NotUnit(f64),
    #[error("jet is not x_n-regular to order {0}")]
    NotRegular(u32),
    #[error("order budget too small: need {needed}, have {have}")]
    OrderBudget { needed: u32, have: u32 },
    #[error("divisor is not a Weierstrass polynomial")]
    NotWeierstrass,
    #[error("correction iteration did not contract after {iterations} iterations (last change {last_change:e})")]
    ContractionFailure { iterations: usize, last_change: f64 },
    #[error("singular Jacobian at base point (pivot modulus {0:e})")]
    SingularJacobian(f64),
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("system has {equations} equations for {unknowns} unknowns")]
    Underdetermined { equations: usize, unknowns: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Precision and hard-zero threshold carried by every jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetCtx {
    pub prec: usize,
    pub hard_zero: f64,
}

impl Default for JetCtx {
    fn default() -> Self {
        JetCtx { prec: DEFAULT_PRECISION, hard_zero: 1e-30 }
    }
}

impl JetCtx {
    pub fn new(prec: usize, hard_zero: f64) -> Self {
        JetCtx { prec, hard_zero }
    }

    fn drop_log2(&self) -> isize {
        if self.hard_zero <= 0.0 {
            isize::MIN
        } else {
            self.hard_zero.log2().floor() as isize
        }
    }
}

/// Power series in `nvars` variables truncated at total degree `order`.
///
/// `valid_order` records up to which total degree the coefficients are
/// trustworthy approximations of the underlying germ; it never exceeds `order`.
#[derive(Clone, PartialEq)]
pub struct Jet {
    nvars: usize,
    order: u32,
    valid_order: u32,
    ctx: JetCtx,
    coeffs: BTreeMap<Monomial, Cx>,
}

impl Jet {
    pub fn zero(nvars: usize, order: u32, ctx: JetCtx) -> Self {
        Jet { nvars, order, valid_order: order, ctx, coeffs: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, order: u32, ctx: JetCtx, c: Cx) -> Self {
        let mut j = Jet::zero(nvars, order, ctx);
        j.insert(Monomial::one(nvars), c);
        j
    }

    pub fn one(nvars: usize, order: u32, ctx: JetCtx) -> Self {
        Self::constant(nvars, order, ctx, Cx::one(ctx.prec))
    }

    pub fn var(nvars: usize, order: u32, ctx: JetCtx, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut j = Jet::zero(nvars, order, ctx);
        j.insert(Monomial(e), Cx::one(ctx.prec));
        j
    }

    /// Lifts an exact polynomial, dropping terms above the truncation order.
    pub fn from_poly(p: &MultiPoly, order: u32, ctx: JetCtx) -> Self {
        let mut j = Jet::zero(p.nvars(), order, ctx);
        for (m, c) in p.terms() {
            if m.degree() <= order {
                j.insert(m.clone(), Cx::from_gauss(c, ctx.prec));
            }
        }
        j
    }

    /// Builds a jet from `(exponents, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms<I>(nvars: usize, order: u32, ctx: JetCtx, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Cx)>,
    {
        let mut j = Jet::zero(nvars, order, ctx);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length mismatch");
            j.add_term(Monomial(e), &c);
        }
        j
    }

    /// Real-coefficient jet from `(exponents, value)` pairs given as f64.
    pub fn from_f64_terms(nvars: usize, order: u32, ctx: JetCtx, terms: &[(Vec<u32>, f64)]) -> Self {
        Self::from_terms(nvars, order, ctx, terms.iter().map(|(e, v)| (e.clone(), Cx::real(*v, ctx.prec))))
    }

    /// Univariate jet with the given coefficients (index = power), exact rationals.
    pub fn univariate_from_gauss(order: u32, ctx: JetCtx, coeffs: &[GaussRat]) -> Self {
        Self::from_terms(
            1,
            order,
            ctx,
            coeffs.iter().enumerate().map(|(k, c)| (vec![k as u32], Cx::from_gauss(c, ctx.prec))),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn valid_order(&self) -> u32 {
        self.valid_order
    }

    pub fn set_valid_order(&mut self, v: u32) {
        self.valid_order = v.min(self.order);
    }

    pub fn with_valid_order(mut self, v: u32) -> Self {
        self.set_valid_order(v);
        self
    }

    pub fn ctx(&self) -> JetCtx {
        self.ctx
    }

    pub fn prec(&self) -> usize {
        self.ctx.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Cx)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Cx {
        self.coeffs.get(&Monomial(exps.to_vec())).cloned().unwrap_or_else(|| Cx::zero(self.ctx.prec))
    }

    pub fn constant_term(&self) -> Cx {
        self.coeff(&vec![0; self.nvars])
    }

    fn negligible(&self, c: &Cx) -> bool {
        match c.log2_bound() {
            None => true,
            Some(k) => k <= self.ctx.drop_log2(),
        }
    }

    pub(crate) fn insert(&mut self, m: Monomial, c: Cx) {
        if m.degree() > self.order {
            return;
        }
        if self.negligible(&c) {
            self.coeffs.remove(&m);
        } else {
            self.coeffs.insert(m, c);
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &Cx) {
        if m.degree() > self.order || c.is_zero() {
            return;
        }
        let sum = match self.coeffs.get(&m) {
            Some(old) => old + c,
            None => c.clone(),
        };
        self.insert(m, sum);
    }

    pub fn same_shape(&self, o: &Jet) -> Result<(), JetError> {
        if self.nvars != o.nvars || self.order != o.order {
            return Err(JetError::ShapeMismatch(self.nvars, self.order, o.nvars, o.order));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Jet) -> Result<Jet, JetError> {
        self.same_shape(o)?;
        let mut out = self.clone();
        for (m, c) in &o.coeffs {
            out.add_term(m.clone(), c);
        }
        out.valid_order = self.valid_order.min(o.valid_order);
        Ok(out)
    }

    pub fn try_sub(&self, o: &Jet) -> Result<Jet, JetError> {
        self.same_shape(o)?;
        let mut out = self.clone();
        for (m, c) in &o.coeffs {
            out.add_term(m.clone(), &-c);
        }
        out.valid_order = self.valid_order.min(o.valid_order);
        Ok(out)
    }

    pub fn try_mul(&self, o: &Jet) -> Result<Jet, JetError> {
        self.same_shape(o)?;
        let mut out = Jet::zero(self.nvars, self.order, self.ctx);
        let mut acc: BTreeMap<Monomial, Cx> = BTreeMap::new();
        for (ma, ca) in &self.coeffs {
            let da = ma.degree();
            for (mb, cb) in &o.coeffs {
                if da + mb.degree() > self.order {
                    continue;
                }
                let m = ma.mul(mb);
                let p = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v = &*v + &p,
                    None => {
                        acc.insert(m, p);
                    }
                }
            }
        }
        for (m, c) in acc {
            out.insert(m, c);
        }
        out.valid_order = self.valid_order.min(o.valid_order);
        Ok(out)
    }

    pub fn scale(&self, c: &Cx) -> Jet {
        let mut out = Jet::zero(self.nvars, self.order, self.ctx);
        for (m, a) in &self.coeffs {
            out.insert(m.clone(), a * c);
        }
        out.valid_order = self.valid_order;
        out
    }

    pub fn scale_gauss(&self, c: &GaussRat) -> Jet {
        self.scale(&Cx::from_gauss(c, self.ctx.prec))
    }

    pub fn add_constant(&self, c: &Cx) -> Jet {
        let mut out = self.clone();
        out.add_term(Monomial::one(self.nvars), c);
        out
    }

    pub fn pow(&self, mut e: u32) -> Jet {
        let mut acc = Jet::one(self.nvars, self.order, self.ctx).with_valid_order(self.valid_order);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse of a unit (constant term modulus above `tol`).
    pub fn invert_unit(&self, tol: f64) -> Result<Jet, JetError> {
        let c0 = self.constant_term();
        if c0.abs() <= tol {
            return Err(JetError::NotUnit(c0.abs()));
        }
        let inv0 = c0.inv().expect("nonzero");
        // 1/u = inv0 · Σ_k (−n)^k with n = u·inv0 − 1, which has zero constant term.
        let one = Jet::one(self.nvars, self.order, self.ctx);
        let n = &self.scale(&inv0) - &one;
        let neg_n = -&n;
        let mut acc = one.clone();
        let mut power = one;
        for _ in 0..self.order {
            power = &power * &neg_n;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        let mut out = acc.scale(&inv0);
        out.valid_order = self.valid_order;
        Ok(out)
    }

    /// Keeps only terms of total degree ≤ `deg` (the Taylor polynomial); order is unchanged.
    pub fn taylor_truncate(&self, deg: u32) -> Jet {
        let mut out = self.clone();
        out.coeffs.retain(|m, _| m.degree() <= deg);
        out
    }

    /// Same coefficients at a lower truncation order.
    pub fn with_order(&self, order: u32) -> Jet {
        let mut out = self.taylor_truncate(order);
        out.order = order;
        out.valid_order = self.valid_order.min(order);
        out
    }

    pub fn derivative(&self, var: usize) -> Jet {
        let mut out = Jet::zero(self.nvars, self.order, self.ctx);
        for (m, c) in &self.coeffs {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.0[var] -= 1;
            out.insert(nm, c.scale_i64(e as i64));
        }
        out.valid_order = self.valid_order.saturating_sub(1);
        out
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient modulus among terms of total degree ≤ `deg`.
    pub fn max_abs_upto(&self, deg: u32) -> f64 {
        self.coeffs.iter().filter(|(m, _)| m.degree() <= deg).map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }

    /// `Σ |a_α| r^{|α|}`, an upper bound for the sup-norm on the polydisc of radius `r`.
    pub fn weighted_norm(&self, r: f64) -> f64 {
        self.coeffs.iter().map(|(m, c)| c.abs() * r.powi(m.degree() as i32)).sum()
    }

    /// Evaluates the truncated series at a complex point in double precision.
    pub fn eval_f64(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.coeffs {
            let (re, im) = c.to_f64_pair();
            let mut t = Complex64::new(re, im);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= point[i].powu(e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Re-embeds into `new_nvars` variables, sending variable `i` to `map[i]`.
    pub fn remap(&self, new_nvars: usize, map: &[usize]) -> Jet {
        assert_eq!(map.len(), self.nvars);
        let mut out = Jet::zero(new_nvars, self.order, self.ctx);
        for (m, c) in &self.coeffs {
            let mut e = vec![0; new_nvars];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    e[map[i]] += k;
                }
            }
            out.add_term(Monomial(e), c);
        }
        out.valid_order = self.valid_order;
        out
    }

    /// Coefficients of `var^k` (lowest first) as jets in the remaining variables.
    /// All share this jet's order.
    pub fn coeffs_in_var(&self, var: usize) -> Vec<Jet> {
        let max = self.coeffs.keys().map(|m| m.0[var]).max().unwrap_or(0) as usize;
        let mut out = vec![Jet::zero(self.nvars - 1, self.order, self.ctx); max + 1];
        for (m, c) in &self.coeffs {
            let k = m.0[var] as usize;
            let mut e = m.0.clone();
            e.remove(var);
            out[k].insert(Monomial(e), c.clone());
        }
        for j in out.iter_mut() {
            j.valid_order = self.valid_order;
        }
        out
    }

    /// Inverse of [`Jet::coeffs_in_var`]: `Σ_k coeffs[k]·var^k` in `nvars` variables.
    pub fn from_var_coeffs(coeffs: &[Jet], var: usize, nvars: usize, order: u32, ctx: JetCtx) -> Jet {
        let mut out = Jet::zero(nvars, order, ctx);
        let mut valid = order;
        for (k, cj) in coeffs.iter().enumerate() {
            valid = valid.min(cj.valid_order);
            for (m, c) in &cj.coeffs {
                let mut e = m.0.clone();
                e.insert(var, k as u32);
                out.add_term(Monomial(e), c);
            }
        }
        out.valid_order = valid;
        out
    }

    /// Substitutes jets for the variables (truncated polynomial composition).
    /// Meaningful as series composition when the substituted jets vanish at 0.
    pub fn compose(&self, inner: &[Jet]) -> Jet {
        assert_eq!(inner.len(), self.nvars);
        let (n, order, ctx) = (inner[0].nvars, inner[0].order, inner[0].ctx);
        let mut powers: Vec<Vec<Jet>> = inner.iter().map(|j| vec![Jet::one(n, order, ctx), j.clone()]).collect();
        let mut out = Jet::zero(n, order, ctx);
        for (m, c) in &self.coeffs {
            let mut t = Jet::constant(n, order, ctx, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &inner[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        out.valid_order = inner.iter().map(|j| j.valid_order).min().unwrap_or(order).min(self.valid_order);
        out
    }

    /// Exact rational values of the stored coefficients, as a polynomial.
    pub fn to_poly(&self) -> MultiPoly {
        MultiPoly::from_terms(self.nvars, self.coeffs.iter().map(|(m, c)| (m.0.clone(), c.to_gauss())))
    }

    /// Largest coefficient modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        (self - other).max_abs()
    }
}

/// Evaluates an exact polynomial at jet arguments.
pub fn eval_poly_at_jets(p: &MultiPoly, args: &[Jet]) -> Jet {
    assert!(!args.is_empty(), "at least one argument jet fixes the shape");
    eval_poly_at_jets_like(p, args, &args[0])
}

/// As [`eval_poly_at_jets`], with the result shaped like `shape`; `args` may be empty.
pub fn eval_poly_at_jets_like(p: &MultiPoly, args: &[Jet], shape: &Jet) -> Jet {
    assert_eq!(p.nvars(), args.len(), "one jet per polynomial variable");
    let (n, order, ctx) = (shape.nvars, shape.order, shape.ctx);
    let mut powers: Vec<Vec<Jet>> = args.iter().map(|j| vec![Jet::one(n, order, ctx), j.clone()]).collect();
    let mut out = Jet::zero(n, order, ctx);
    for (m, c) in p.terms() {
        let mut t: Option<Jet> = None;
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            while powers[i].len() <= e as usize {
                let next = &powers[i][powers[i].len() - 1] * &args[i];
                powers[i].push(next);
            }
            t = Some(match t {
                None => powers[i][e as usize].clone(),
                Some(acc) => &acc * &powers[i][e as usize],
            });
        }
        let cx = Cx::from_gauss(c, ctx.prec);
        let term = match t {
            None => Jet::constant(n, order, ctx, cx),
            Some(j) => j.scale(&cx),
        };
        out = &out + &term;
    }
    out.valid_order = args.iter().map(|j| j.valid_order).min().unwrap_or(shape.valid_order);
    out
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[{} vars, order {}, valid {}]{{", self.nvars, self.order, self.valid_order)?;
        for (k, (m, c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}: {:?}", m.0, c)?;
        }
        write!(f, "}}")
    }
}

macro_rules! jet_binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl<'a> std::ops::$tr<&'a Jet> for &'a Jet {
            type Output = Jet;
            fn $method(self, o: &Jet) -> Jet {
                self.$try(o).expect("jet shapes differ")
            }
        }
        impl std::ops::$tr for Jet {
            type Output = Jet;
            fn $method(self, o: Jet) -> Jet {
                self.$try(&o).expect("jet shapes differ")
            }
        }
    };
}

jet_binop!(Add, add, try_add);
jet_binop!(Sub, sub, try_sub);
jet_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -&*c;
        }
        out
    }
}

impl std::ops::Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> JetCtx {
        JetCtx::default()
    }

    /// exp(s·x) to order d from the factorial recursion.
    fn exp_jet(s: i64, d: u32) -> Jet {
        let mut coeffs = Vec::new();
        let mut c = GaussRat::from_int(1);
        for k in 0..=d {
            coeffs.push(c.clone());
            c = &(&c * &GaussRat::from_int(s)) / &GaussRat::from_int(k as i64 + 1);
        }
        Jet::univariate_from_gauss(d, ctx(), &coeffs)
    }

    #[test]
    fn exp_times_exp_minus() {
        let p = &exp_jet(1, 4) * &exp_jet(-1, 4);
        assert!((p.constant_term().abs() - 1.0).abs() < 1e-30);
        assert!(p.terms().filter(|(m, _)| m.degree() > 0).all(|(_, c)| c.abs() <= 1e-15));
    }

    #[test]
    fn identity_and_truncation() {
        let j = exp_jet(1, 4);
        assert_eq!(&j + &Jet::zero(1, 4, ctx()), j);
        let x = Jet::var(1, 1, ctx(), 0);
        assert!((&x * &x).is_zero());
    }

    #[test]
    fn invert_unit_examples() {
        let one_minus_x = Jet::from_f64_terms(1, 6, ctx(), &[(vec![0], 1.0), (vec![1], -1.0)]);
        let inv = one_minus_x.invert_unit(1e-12).unwrap();
        for k in 0..=6 {
            assert!((inv.coeff(&[k]).abs() - 1.0).abs() < 1e-30);
        }
        let one = Jet::one(2, 3, ctx());
        assert_eq!(one.invert_unit(1e-12).unwrap(), one);
        let x = Jet::var(1, 3, ctx(), 0);
        assert!(matches!(x.invert_unit(1e-12), Err(JetError::NotUnit(_))));
    }

    #[test]
    fn shape_mismatch() {
        let a = Jet::one(1, 3, ctx());
        let b = Jet::one(1, 4, ctx());
        assert!(matches!(a.try_add(&b), Err(JetError::ShapeMismatch(1, 3, 1, 4))));
    }

    #[test]
    fn split_and_rebuild() {
        let j = Jet::from_f64_terms(2, 4, ctx(), &[(vec![1, 2], 3.0), (vec![0, 1], -1.0), (vec![2, 0], 0.5)]);
        let parts = j.coeffs_in_var(1);
        assert_eq!(parts.len(), 3);
        let back = Jet::from_var_coeffs(&parts, 1, 2, 4, ctx());
        assert_eq!(back, j);
    }
}
