//! Correction of an approximate root `α` of `A(z)` with defect `A(α) = c·A'(α)²`.

use crate::number::Cx;
use crate::poly::MultiPoly;

use super::{eval_poly_at_jets_like, polydisc_samples, sup_on_samples, Jet, JetError};

/// Polynomial in one dependent variable `z` with jet coefficients, lowest power first.
#[derive(Clone, Debug, PartialEq)]
pub struct ZPoly {
    coeffs: Vec<Jet>,
}

impl ZPoly {
    pub fn new(coeffs: Vec<Jet>) -> Self {
        assert!(!coeffs.is_empty(), "at least one coefficient");
        ZPoly { coeffs }
    }

    /// `P(args, z)` where `z` is variable `zvar` of `p` and `args` fill the other
    /// variables in order.
    pub fn from_multipoly(p: &MultiPoly, zvar: usize, args: &[Jet]) -> Self {
        assert!(!args.is_empty(), "at least one argument jet fixes the shape");
        Self::from_multipoly_like(p, zvar, args, &args[0])
    }

    /// As [`ZPoly::from_multipoly`], with coefficients shaped like `shape`; `args` may be empty.
    pub fn from_multipoly_like(p: &MultiPoly, zvar: usize, args: &[Jet], shape: &Jet) -> Self {
        assert_eq!(args.len() + 1, p.nvars());
        // Coefficients are free of z, so the z slot may map anywhere.
        let map: Vec<usize> = (0..p.nvars())
            .map(|v| match v.cmp(&zvar) {
                std::cmp::Ordering::Less => v,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => v - 1,
            })
            .collect();
        let coeffs = p.coeffs_in(zvar).iter().map(|c| eval_poly_at_jets_like(&c.remap(p.nvars() - 1, &map), args, shape)).collect();
        ZPoly::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Jet] {
        &self.coeffs
    }

    pub fn eval(&self, z: &Jet) -> Jet {
        let mut acc = self.coeffs[self.coeffs.len() - 1].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &(&acc * z) + c;
        }
        acc
    }

    /// `A^{(k)}/k!` (divided derivative), computed symbolically in `z`.
    pub fn divided_derivative(&self, k: usize) -> ZPoly {
        let n = &self.coeffs[0];
        if k > self.degree() {
            return ZPoly::new(vec![Jet::zero(n.nvars(), n.order(), n.ctx())]);
        }
        let coeffs = (k..=self.degree())
            .map(|i| self.coeffs[i].scale(&Cx::real(binomial(i, k), n.prec())))
            .collect();
        ZPoly::new(coeffs)
    }

    pub fn derivative(&self) -> ZPoly {
        self.divided_derivative(1)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TougeronConfig {
    /// Polydisc radius for norm estimates and sampling.
    pub radius: f64,
    /// Bound on the sup-norms of the coefficients of `A` and of `α` (checked, reported).
    pub bound: f64,
    /// Stop when successive corrections differ by less than this (max coefficient modulus).
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Number of polydisc sample points for the a-posteriori bound.
    pub samples: usize,
}

impl Default for TougeronConfig {
    fn default() -> Self {
        TougeronConfig { radius: 0.5, bound: 1e6, tolerance: 1e-12, max_iterations: 200, samples: 128 }
    }
}

impl TougeronConfig {
    pub fn validate(&self) -> Result<(), JetError> {
        if !(self.radius > 0.0 && self.bound > 0.0 && self.tolerance > 0.0) {
            return Err(JetError::Config("radius, bound and tolerance must be positive".into()));
        }
        if self.samples < 100 {
            return Err(JetError::Config("at least 100 sample points are required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TougeronOutcome {
    pub b: Jet,
    /// The fixed point `ε` with `b = α + ε·A'(α)`.
    pub epsilon: Jet,
    pub iterations: usize,
    /// max |coeff(A∘b)|.
    pub residual: f64,
    /// max |coeff(A∘α − c·A'(α)²)|, the hypothesis defect.
    pub hypothesis_residual: f64,
    /// sup over samples of |b − α|.
    pub sup_shift: f64,
    /// 2·sup over samples of |c·A'(α)|.
    pub sup_bound: f64,
    pub bound_holds: bool,
    /// A-priori Lipschitz estimate of the fixed-point map on the weighted-norm ball.
    pub contraction_estimate: f64,
    /// Whether the coefficients of `A` and `α` stay below `cfg.bound` in weighted norm.
    pub within_bound: bool,
}

/// Finds `b` with `A∘b ≡ 0` near `α` given `A∘α = c·(A'∘α)²`.
///
/// Solves `ε = −c − Σ_{k≥2} q_k ε^k`, `q_k = (A^{(k)}∘α)/k!·(A'∘α)^{k−2}`, by fixed-point
/// iteration and returns `b = α + ε·(A'∘α)`.
pub fn tougeron_correct(a: &ZPoly, alpha: &Jet, c: &Jet, cfg: &TougeronConfig) -> Result<TougeronOutcome, JetError> {
    cfg.validate()?;
    alpha.same_shape(c)?;
    for co in a.coeffs() {
        alpha.same_shape(co)?;
    }
    let a1 = a.derivative().eval(alpha);
    let deg = a.degree();
    let mut q: Vec<Jet> = Vec::new();
    let mut a1_pow = Jet::one(alpha.nvars(), alpha.order(), alpha.ctx());
    for k in 2..=deg {
        q.push(&a.divided_derivative(k).eval(alpha) * &a1_pow);
        a1_pow = &a1_pow * &a1;
    }
    let hypothesis = &a.eval(alpha) - &(c * &(&a1 * &a1));

    let r = cfg.radius;
    let cn = c.weighted_norm(r);
    let rho = 2.0 * cn;
    let contraction_estimate: f64 =
        q.iter().enumerate().map(|(i, qk)| (i + 2) as f64 * qk.weighted_norm(r) * rho.powi(i as i32 + 1)).sum();
    let within_bound =
        a.coeffs().iter().all(|co| co.weighted_norm(r) < cfg.bound) && alpha.weighted_norm(r) < cfg.bound;

    let neg_c = -c;
    let step = |eps: &Jet| -> Jet {
        let mut acc = neg_c.clone();
        let mut p = eps * eps;
        for qk in &q {
            acc = &acc - &(qk * &p);
            p = &p * eps;
        }
        acc
    };
    let mut eps = neg_c.clone();
    let mut iterations = 0;
    let mut last_change = f64::INFINITY;
    loop {
        if q.is_empty() {
            break;
        }
        if iterations >= cfg.max_iterations {
            return Err(JetError::ContractionFailure { iterations, last_change });
        }
        let next = step(&eps);
        iterations += 1;
        let change = next.max_abs_diff(&eps);
        eps = next;
        if !change.is_finite() || change > 1e50 || eps.max_abs() > 1e50 {
            return Err(JetError::ContractionFailure { iterations, last_change: change });
        }
        last_change = change;
        if change < cfg.tolerance {
            break;
        }
    }
    let mut b = alpha + &(&eps * &a1);
    b.set_valid_order(alpha.valid_order().min(c.valid_order()));
    let residual = a.eval(&b).max_abs();
    let samples = polydisc_samples(alpha.nvars(), r, cfg.samples);
    let sup_shift = sup_on_samples(&(&b - alpha), &samples);
    let sup_bound = 2.0 * sup_on_samples(&(c * &a1), &samples);
    let bound_holds = sup_shift <= sup_bound * (1.0 + 1e-12) + 1e-300;
    Ok(TougeronOutcome {
        b,
        epsilon: eps,
        iterations,
        residual,
        hypothesis_residual: hypothesis.max_abs(),
        sup_shift,
        sup_bound,
        bound_holds,
        contraction_estimate,
        within_bound,
    })
}
