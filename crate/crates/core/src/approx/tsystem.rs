//! Symbolic division of `P_L(C²S + w, C²S̃ + w̃)` by `C²` and of its
//! `z`-derivative by `C`, where `C` is a generic monic polynomial of degree `d`
//! in `x_n` and `w_j`, `w̃` are generic polynomials of degree `2d − 1`.
//!
//! The remainders have coefficients free of `S`, `S̃`; they are the equations a
//! choice of Weierstrass polynomial and remainders must satisfy.

use crate::poly::{divmod_in_var, MultiPoly, PolyError, UniOverPoly};

use super::ApproxError;

/// The equations on the division coefficients together with the two quotients.
///
/// Ring layout (`ring_nvars` variables): `x_n`, then `a_1…a_d`, then
/// `b_{j,0}…b_{j,2d−1}` for each base coordinate `j`, then `c_0…c_{2d−1}`, then
/// `S_1…S_m`, `S̃`. The equations live in the coefficient variables alone.
#[derive(Clone, Debug, PartialEq)]
pub struct TSystem {
    d: usize,
    m: usize,
    optimal: UniOverPoly,
    symbols: Vec<String>,
    equations: Vec<MultiPoly>,
    square_quotient: MultiPoly,
    derivative_quotient: MultiPoly,
}

/// Builds the system for `d ≥ 1`. `p_l` lives in `m + 1` variables with `z` last.
pub fn build_t_system(p_l: &UniOverPoly, m: usize, d: usize) -> Result<TSystem, ApproxError> {
    if d == 0 {
        return Err(ApproxError::input("the division system needs a Weierstrass degree of at least 1"));
    }
    TSystem::build(p_l, m, d)
}

impl TSystem {
    /// As [`build_t_system`], also accepting `d = 0` (no equations, `C = 1`).
    pub(crate) fn build(p_l: &UniOverPoly, m: usize, d: usize) -> Result<TSystem, ApproxError> {
        if p_l.nvars() != m + 1 || p_l.var_index() != m {
            return Err(ApproxError::input(format!(
                "optimal polynomial must live in {} variables with z last",
                m + 1
            )));
        }
        let mut sys = TSystem {
            d,
            m,
            optimal: p_l.clone(),
            symbols: Vec::new(),
            equations: Vec::new(),
            square_quotient: MultiPoly::zero(1),
            derivative_quotient: MultiPoly::zero(1),
        };
        sys.symbols = sys.make_symbols();
        let n = sys.ring_nvars();
        let c = sys.monic_poly();
        let c2 = &c * &c;
        let mut alpha: Vec<MultiPoly> = (0..m)
            .map(|j| &(&c2 * &MultiPoly::var(n, sys.quotient_var(j))) + &sys.remainder_poly(j))
            .collect();
        alpha.push(&(&c2 * &MultiPoly::var(n, sys.tilde_quotient_var())) + &sys.tilde_remainder_poly());
        let value = p_l.to_multi().compose(&alpha);
        let deriv = p_l.derivative().compose(&alpha);
        if d == 0 {
            sys.square_quotient = value;
            sys.derivative_quotient = deriv;
            return Ok(sys);
        }
        let (wt, rem) = divmod_in_var(&value, &c2, 0).map_err(poly_err)?;
        let (wb, rem_d) = divmod_in_var(&deriv, &c, 0).map_err(poly_err)?;
        let lows = rem.coeffs_in(0);
        let lows_d = rem_d.coeffs_in(0);
        let at = |v: &[MultiPoly], k: usize| v.get(k).cloned().unwrap_or_else(|| MultiPoly::zero(n));
        let ncoef = sys.coefficient_count();
        // Slots outside the coefficient block map to 0; they are checked to be absent.
        let map: Vec<usize> = (0..n).map(|v| if (1..=ncoef).contains(&v) { v - 1 } else { 0 }).collect();
        let project = |p: MultiPoly| -> Result<MultiPoly, ApproxError> {
            if (ncoef + 1..n).any(|v| p.involves(v)) {
                return Err(ApproxError::internal("division remainder depends on the quotient symbols"));
            }
            Ok(p.remap(ncoef, &map))
        };
        let mut eqs = Vec::with_capacity(3 * d);
        for k in 1..=2 * d {
            eqs.push(project(at(&lows, 2 * d - k))?);
        }
        for k in 1..=d {
            eqs.push(project(at(&lows_d, d - k))?);
        }
        sys.equations = eqs;
        sys.square_quotient = wt;
        sys.derivative_quotient = wb;
        Ok(sys)
    }

    fn make_symbols(&self) -> Vec<String> {
        let (d, m) = (self.d, self.m);
        let mut s = vec!["xn".to_string()];
        s.extend((1..=d).map(|k| format!("a{k}")));
        for j in 1..=m {
            s.extend((0..2 * d).map(|k| format!("b{j}_{k}")));
        }
        s.extend((0..2 * d).map(|k| format!("c{k}")));
        s.extend((1..=m).map(|j| format!("S{j}")));
        s.push("St".to_string());
        s
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn base_dim(&self) -> usize {
        self.m
    }

    pub fn optimal_polynomial(&self) -> &UniOverPoly {
        &self.optimal
    }

    /// Names of all ring variables.
    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Names of the coefficient variables, in the order used by [`TSystem::equations`].
    pub fn coefficient_symbols(&self) -> &[String] {
        &self.symbols[1..1 + self.coefficient_count()]
    }

    pub fn coefficient_count(&self) -> usize {
        self.d + 2 * self.d * (self.m + 1)
    }

    pub fn ring_nvars(&self) -> usize {
        1 + self.coefficient_count() + self.m + 1
    }

    /// The `3d` equations, in the coefficient variables.
    pub fn equations(&self) -> &[MultiPoly] {
        &self.equations
    }

    /// Quotient of the value by `C²`, in the full ring.
    pub fn square_quotient(&self) -> &MultiPoly {
        &self.square_quotient
    }

    /// Quotient of the `z`-derivative by `C`, in the full ring.
    pub fn derivative_quotient(&self) -> &MultiPoly {
        &self.derivative_quotient
    }

    /// Ring index of `a_k`, `1 ≤ k ≤ d`.
    pub fn monic_coeff_var(&self, k: usize) -> usize {
        assert!((1..=self.d).contains(&k));
        k
    }

    /// Ring index of `b_{j,k}`, `j < m`, `k < 2d`.
    pub fn remainder_coeff_var(&self, j: usize, k: usize) -> usize {
        assert!(j < self.m && k < 2 * self.d);
        1 + self.d + 2 * self.d * j + k
    }

    /// Ring index of `c_k`, `k < 2d`.
    pub fn tilde_coeff_var(&self, k: usize) -> usize {
        assert!(k < 2 * self.d);
        1 + self.d + 2 * self.d * self.m + k
    }

    pub fn quotient_var(&self, j: usize) -> usize {
        assert!(j < self.m);
        1 + self.coefficient_count() + j
    }

    pub fn tilde_quotient_var(&self) -> usize {
        1 + self.coefficient_count() + self.m
    }

    /// `C = x_n^d + Σ a_k x_n^{d−k}`.
    pub fn monic_poly(&self) -> MultiPoly {
        let n = self.ring_nvars();
        let x = MultiPoly::var(n, 0);
        let mut c = x.pow(self.d as u32);
        for k in 1..=self.d {
            c = &c + &(&MultiPoly::var(n, self.monic_coeff_var(k)) * &x.pow((self.d - k) as u32));
        }
        c
    }

    fn generic_remainder(&self, var: impl Fn(usize) -> usize) -> MultiPoly {
        let n = self.ring_nvars();
        let x = MultiPoly::var(n, 0);
        let mut w = MultiPoly::zero(n);
        for k in 0..2 * self.d {
            w = &w + &(&MultiPoly::var(n, var(k)) * &x.pow((2 * self.d - 1 - k) as u32));
        }
        w
    }

    /// `w_j = Σ b_{j,k} x_n^{2d−1−k}`.
    pub fn remainder_poly(&self, j: usize) -> MultiPoly {
        self.generic_remainder(|k| self.remainder_coeff_var(j, k))
    }

    /// `w̃ = Σ c_k x_n^{2d−1−k}`.
    pub fn tilde_remainder_poly(&self) -> MultiPoly {
        self.generic_remainder(|k| self.tilde_coeff_var(k))
    }

    /// Equation `k` (0-based) embedded in the full ring.
    pub fn embedded_equation(&self, k: usize) -> MultiPoly {
        let map: Vec<usize> = (0..self.coefficient_count()).map(|i| i + 1).collect();
        self.equations[k].remap(self.ring_nvars(), &map)
    }

    /// Exact differences of both sides of the two defining identities; both are zero.
    pub fn identity_defects(&self) -> (MultiPoly, MultiPoly) {
        let n = self.ring_nvars();
        let x = MultiPoly::var(n, 0);
        let c = self.monic_poly();
        let c2 = &c * &c;
        let mut alpha: Vec<MultiPoly> = (0..self.m)
            .map(|j| &(&c2 * &MultiPoly::var(n, self.quotient_var(j))) + &self.remainder_poly(j))
            .collect();
        alpha.push(&(&c2 * &MultiPoly::var(n, self.tilde_quotient_var())) + &self.tilde_remainder_poly());
        let mut lhs = &self.optimal.to_multi().compose(&alpha) - &(&self.square_quotient * &c2);
        let mut lhs_d = &self.optimal.derivative().compose(&alpha) - &(&self.derivative_quotient * &c);
        let d = self.d;
        for k in 1..=2 * d {
            lhs = &lhs - &(&x.pow((2 * d - k) as u32) * &self.embedded_equation(k - 1));
        }
        for k in 1..=d {
            lhs_d = &lhs_d - &(&x.pow((d - k) as u32) * &self.embedded_equation(2 * d + k - 1));
        }
        (lhs, lhs_d)
    }
}

fn poly_err(e: PolyError) -> ApproxError {
    ApproxError::internal(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn square_root_system_matches_hand_division() {
        let p = parse_poly("z^2 - y", &names(&["y", "z"])).unwrap();
        let sys = build_t_system(&UniOverPoly::from_multi(&p, 1).unwrap(), 1, 1).unwrap();
        let coeffs = sys.coefficient_symbols().to_vec();
        assert_eq!(coeffs, names(&["a1", "b1_0", "b1_1", "c0", "c1"]));
        let expect = ["2*c0*c1 - b1_0 - 2*a1*c0^2", "c1^2 - b1_1 - a1^2*c0^2", "2*c1 - 2*a1*c0"];
        for (eq, text) in sys.equations().iter().zip(expect) {
            assert_eq!(eq, &parse_poly(text, &coeffs).unwrap());
        }
        let (a, b) = sys.identity_defects();
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn low_degree_values_give_raw_coefficients() {
        // z − y: value w̃ − w has x_n-degree 1 < 2, so the quotient vanishes.
        let p = parse_poly("z - y", &names(&["y", "z"])).unwrap();
        let sys = build_t_system(&UniOverPoly::from_multi(&p, 1).unwrap(), 1, 1).unwrap();
        let coeffs = sys.coefficient_symbols().to_vec();
        assert_eq!(sys.equations()[0], parse_poly("c0 - b1_0", &coeffs).unwrap());
        assert_eq!(sys.equations()[1], parse_poly("c1 - b1_1", &coeffs).unwrap());
        assert!(!sys.square_quotient().is_zero());
        let (a, b) = sys.identity_defects();
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn unit_case_and_errors() {
        let p = parse_poly("z^2 + y*z - 1", &names(&["y", "z"])).unwrap();
        let u = UniOverPoly::from_multi(&p, 1).unwrap();
        assert!(build_t_system(&u, 1, 0).is_err());
        assert!(build_t_system(&u, 2, 1).is_err());
        let sys = TSystem::build(&u, 1, 0).unwrap();
        assert!(sys.equations().is_empty());
        assert_eq!(sys.symbols(), &names(&["xn", "S1", "St"])[..]);
        let expect = parse_poly("St^2 + S1*St - 1", sys.symbols()).unwrap();
        assert_eq!(sys.square_quotient(), &expect);
    }

    #[test]
    fn two_base_coordinates_degree_two() {
        let p = parse_poly("z^3 + y1*z - y2", &names(&["y1", "y2", "z"])).unwrap();
        let sys = build_t_system(&UniOverPoly::from_multi(&p, 2).unwrap(), 2, 2).unwrap();
        assert_eq!(sys.equations().len(), 6);
        assert_eq!(sys.coefficient_count(), 2 + 4 * 3);
        let (a, b) = sys.identity_defects();
        assert!(a.is_zero() && b.is_zero());
    }
}
