//! Polynomials viewed in one distinguished variable: division, resultants,
//! discriminants, gcds and squarefree parts.

use num::One;

use super::{GaussRat, MultiPoly, PolyError};

/// A polynomial viewed as univariate in `var_index` over the ring of the
/// remaining variables.
///
/// Coefficients keep the full variable count of the ambient ring (so they can
/// be recombined without re-indexing) but never involve `var_index`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UniOverPoly {
    var_index: usize,
    nvars: usize,
    /// Highest degree first; `coeffs[0]` is nonzero.
    coeffs: Vec<MultiPoly>,
}

impl UniOverPoly {
    pub fn from_multi(p: &MultiPoly, var: usize) -> Result<Self, PolyError> {
        if var >= p.nvars() {
            return Err(PolyError::VarOutOfRange { var, nvars: p.nvars() });
        }
        if p.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut coeffs = p.coeffs_in(var);
        coeffs.reverse();
        Ok(UniOverPoly { var_index: var, nvars: p.nvars(), coeffs })
    }

    /// Builds from coefficients given highest degree first; leading zeros are stripped.
    pub fn from_coeffs(var: usize, nvars: usize, coeffs: Vec<MultiPoly>) -> Result<Self, PolyError> {
        let p = Self::assemble(var, nvars, &coeffs);
        Self::from_multi(&p, var)
    }

    fn assemble(var: usize, nvars: usize, coeffs: &[MultiPoly]) -> MultiPoly {
        let x = MultiPoly::var(nvars, var);
        let mut acc = MultiPoly::zero(nvars);
        for c in coeffs {
            acc = &(&acc * &x) + c;
        }
        acc
    }

    pub fn to_multi(&self) -> MultiPoly {
        Self::assemble(self.var_index, self.nvars, &self.coeffs)
    }

    pub fn var_index(&self) -> usize {
        self.var_index
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients, highest degree first.
    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    /// Coefficient of `var^k`.
    pub fn coeff(&self, k: usize) -> MultiPoly {
        let d = self.degree();
        if k > d {
            MultiPoly::zero(self.nvars)
        } else {
            self.coeffs[d - k].clone()
        }
    }

    pub fn leading_coeff(&self) -> &MultiPoly {
        &self.coeffs[0]
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs[0].is_one()
    }

    pub fn derivative(&self) -> MultiPoly {
        self.to_multi().derivative(self.var_index)
    }

    /// Divides by the leading coefficient when it is a nonzero constant.
    pub fn make_monic(&self) -> Option<Self> {
        let lc = &self.coeffs[0];
        if !lc.is_constant() {
            return None;
        }
        let inv = lc.constant_term().inv()?;
        Some(UniOverPoly {
            var_index: self.var_index,
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|c| c.scale(&inv)).collect(),
        })
    }

    pub fn discriminant(&self) -> Result<MultiPoly, PolyError> {
        discriminant(self)
    }

    pub fn squarefree_part(&self) -> Result<Self, PolyError> {
        squarefree_part(self)
    }
}

fn check_var(p: &MultiPoly, var: usize) -> Result<(), PolyError> {
    if var >= p.nvars() {
        return Err(PolyError::VarOutOfRange { var, nvars: p.nvars() });
    }
    Ok(())
}

fn deg(p: &MultiPoly, var: usize) -> i64 {
    p.degree_in(var).map(|d| d as i64).unwrap_or(-1)
}

fn var_power(nvars: usize, var: usize, e: u32) -> super::Monomial {
    let mut v = vec![0; nvars];
    v[var] = e;
    super::Monomial(v)
}

/// Division with remainder by a divisor monic in `var`: `f = q·g + r`, `deg_var r < deg_var g`.
pub fn divmod_in_var(f: &MultiPoly, g: &MultiPoly, var: usize) -> Result<(MultiPoly, MultiPoly), PolyError> {
    check_var(f, var)?;
    check_var(g, var)?;
    if f.nvars() != g.nvars() {
        return Err(PolyError::VarCountMismatch(f.nvars(), g.nvars()));
    }
    if g.is_zero() || !g.is_monic_in(var) {
        return Err(PolyError::NotMonic(var));
    }
    let n = f.nvars();
    let dg = deg(g, var);
    let mut q = MultiPoly::zero(n);
    let mut r = f.clone();
    while deg(&r, var) >= dg {
        let dr = deg(&r, var);
        let lc = r.leading_coeff_in(var);
        let shift = MultiPoly::monomial(n, var_power(n, var, (dr - dg) as u32).0, GaussRat::one());
        let t = &lc * &shift;
        r = &r - &(&t * g);
        q = &q + &t;
    }
    Ok((q, r))
}

/// Pseudo-remainder: `lc(g)^(deg f − deg g + 1)·f mod g` in `var`.
pub fn pseudo_remainder(f: &MultiPoly, g: &MultiPoly, var: usize) -> MultiPoly {
    let n = f.nvars();
    let dg = deg(g, var);
    assert!(dg >= 0, "pseudo-division by zero");
    let df = deg(f, var);
    if df < dg {
        return f.clone();
    }
    let lg = g.leading_coeff_in(var);
    let mut e = df - dg + 1;
    let mut r = f.clone();
    while deg(&r, var) >= dg {
        let dr = deg(&r, var);
        let lr = r.leading_coeff_in(var);
        let shift = MultiPoly::monomial(n, var_power(n, var, (dr - dg) as u32).0, GaussRat::one());
        r = &(&lg * &r) - &(&(&lr * &shift) * g);
        e -= 1;
    }
    if e > 0 {
        r = &r * &lg.pow(e as u32);
    }
    r
}

/// Determinant by fraction-free Bareiss elimination with row pivoting.
pub(crate) fn bareiss_det(mut m: Vec<Vec<MultiPoly>>, nvars: usize) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one(nvars);
    }
    let mut negate = false;
    let mut prev = MultiPoly::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return MultiPoly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = MultiPoly::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Sylvester matrix of `f` and `g` in `var`: `deg g` rows of `f` coefficients followed
/// by `deg f` rows of `g` coefficients, highest degree first.
pub(crate) fn sylvester_matrix(f: &MultiPoly, g: &MultiPoly, var: usize) -> Vec<Vec<MultiPoly>> {
    let n = f.nvars();
    let df = deg(f, var).max(0) as usize;
    let dg = deg(g, var).max(0) as usize;
    let size = df + dg;
    let mut fc = f.coeffs_in(var);
    fc.reverse();
    let mut gc = g.coeffs_in(var);
    gc.reverse();
    let mut rows = Vec::with_capacity(size);
    for i in 0..dg {
        let mut row = vec![MultiPoly::zero(n); size];
        for (k, c) in fc.iter().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..df {
        let mut row = vec![MultiPoly::zero(n); size];
        for (k, c) in gc.iter().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Resultant in `var`: the determinant of the Sylvester matrix.
pub fn resultant(f: &MultiPoly, g: &MultiPoly, var: usize) -> Result<MultiPoly, PolyError> {
    check_var(f, var)?;
    check_var(g, var)?;
    if f.nvars() != g.nvars() {
        return Err(PolyError::VarCountMismatch(f.nvars(), g.nvars()));
    }
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let df = deg(f, var);
    let dg = deg(g, var);
    if df + dg == 0 {
        return Err(PolyError::ConstantInVar(var));
    }
    if df == 0 {
        return Ok(f.pow(dg as u32));
    }
    if dg == 0 {
        return Ok(g.pow(df as u32));
    }
    Ok(bareiss_det(sylvester_matrix(f, g, var), f.nvars()))
}

/// `(−1)^{d(d−1)/2}·res(f, f')/lc(f)`.
pub fn discriminant(f: &UniOverPoly) -> Result<MultiPoly, PolyError> {
    let d = f.degree();
    if d == 0 {
        return Err(PolyError::DegreeZero);
    }
    let p = f.to_multi();
    let var = f.var_index();
    if d == 1 {
        return Ok(MultiPoly::one(p.nvars()));
    }
    let r = resultant(&p, &p.derivative(var), var)?;
    let q = r.div_exact(f.leading_coeff()).expect("leading coefficient divides the resultant");
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}

fn content_in(p: &MultiPoly, var: usize) -> MultiPoly {
    let mut g = MultiPoly::zero(p.nvars());
    for c in p.coeffs_in(var) {
        if c.is_zero() {
            continue;
        }
        g = poly_gcd(&g, &c);
        if g.is_constant() {
            return MultiPoly::one(p.nvars());
        }
    }
    g
}

fn gcd_with_coeffs(a: &MultiPoly, b: &MultiPoly, var: usize) -> MultiPoly {
    let mut g = a.clone();
    for c in b.coeffs_in(var) {
        if c.is_zero() {
            continue;
        }
        g = poly_gcd(&g, &c);
        if g.is_constant() {
            return MultiPoly::one(a.nvars());
        }
    }
    g.make_monic()
}

/// Subresultant remainder sequence on primitive inputs; returns a polynomial
/// associate of the gcd (possibly with extra content in the other variables).
fn subresultant_gcd(a: &MultiPoly, b: &MultiPoly, var: usize) -> MultiPoly {
    let n = a.nvars();
    let (mut a, mut b) = if deg(a, var) >= deg(b, var) { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    let mut g = MultiPoly::one(n);
    let mut h = MultiPoly::one(n);
    loop {
        let delta = (deg(&a, var) - deg(&b, var)) as u32;
        let r = pseudo_remainder(&a, &b, var);
        if r.is_zero() {
            return b;
        }
        if deg(&r, var) == 0 {
            return MultiPoly::one(n);
        }
        a = b;
        let divisor = &g * &h.pow(delta);
        b = r.div_exact(&divisor).expect("subresultant division is exact");
        g = a.leading_coeff_in(var);
        if delta > 0 {
            h = g.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant h update is exact");
        }
    }
}

/// Greatest common divisor in the multivariate ring, normalized to graded-lex
/// leading coefficient one (zero only if both inputs are zero).
pub fn poly_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    assert_eq!(a.nvars(), b.nvars());
    let n = a.nvars();
    if a.is_zero() {
        return b.make_monic();
    }
    if b.is_zero() {
        return a.make_monic();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(n);
    }
    let var = match (0..n).find(|&v| a.involves(v) || b.involves(v)) {
        Some(v) => v,
        None => return MultiPoly::one(n),
    };
    if !a.involves(var) {
        return gcd_with_coeffs(a, b, var);
    }
    if !b.involves(var) {
        return gcd_with_coeffs(b, a, var);
    }
    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = subresultant_gcd(&pa, &pb, var);
    let pg = g.div_exact(&content_in(&g, var)).expect("content divides");
    (&poly_gcd(&ca, &cb) * &pg).make_monic()
}

/// `f / gcd(f, ∂f/∂var)`, normalized monic when its leading coefficient is constant.
pub fn squarefree_part(f: &UniOverPoly) -> Result<UniOverPoly, PolyError> {
    let p = f.to_multi();
    let var = f.var_index();
    if f.degree() == 0 {
        return Ok(f.clone());
    }
    let g = poly_gcd(&p, &p.derivative(var));
    let q = if g.involves(var) { p.div_exact(&g).expect("gcd divides") } else { p };
    let u = UniOverPoly::from_multi(&q, var)?;
    Ok(match u.make_monic() {
        Some(m) => m,
        None => UniOverPoly::from_multi(&q.make_monic(), var)?,
    })
}

/// Whether `deg_var gcd(f, f') == 0`, i.e. `f` is squarefree as a polynomial in `var`.
pub fn is_squarefree_in(f: &MultiPoly, var: usize) -> bool {
    !poly_gcd(f, &f.derivative(var)).involves(var)
}
