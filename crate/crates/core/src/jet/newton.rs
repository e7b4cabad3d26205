//! Newton iteration for polynomial systems whose coefficients are jets.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::poly::MultiPoly;

use super::{eval_poly_at_jets, Jet, JetError};

/// `Σ coeff · y^exp` over the unknowns `y`.
#[derive(Clone, Debug)]
pub struct JetEquation {
    pub terms: Vec<(Vec<u32>, Jet)>,
}

#[derive(Clone, Debug)]
pub struct JetSystem {
    pub unknowns: usize,
    pub equations: Vec<JetEquation>,
}

impl JetSystem {
    /// Builds a system from polynomials in `(known_0, …, known_{k−1}, y_0, …, y_{u−1})`
    /// by substituting jets for the known variables.
    pub fn from_polys(polys: &[MultiPoly], known: &[Jet], unknowns: usize) -> Self {
        assert!(!known.is_empty(), "at least one known jet fixes the shape");
        let k = known.len();
        let equations = polys
            .iter()
            .map(|p| {
                assert_eq!(p.nvars(), k + unknowns);
                let mut by_exp: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
                for (m, c) in p.terms() {
                    let entry = by_exp.entry(m.0[k..].to_vec()).or_insert_with(|| MultiPoly::zero(k));
                    *entry = &*entry + &MultiPoly::monomial(k, m.0[..k].to_vec(), c.clone());
                }
                JetEquation {
                    terms: by_exp.into_iter().map(|(ye, cp)| (ye, eval_poly_at_jets(&cp, known))).collect(),
                }
            })
            .collect();
        JetSystem { unknowns, equations }
    }

    fn powers(y: &[Jet], max: &[u32]) -> Vec<Vec<Jet>> {
        y.iter()
            .zip(max)
            .map(|(j, &m)| {
                let mut v = vec![Jet::one(j.nvars(), j.order(), j.ctx())];
                for _ in 0..m {
                    let next = &v[v.len() - 1] * j;
                    v.push(next);
                }
                v
            })
            .collect()
    }

    fn max_exps(&self) -> Vec<u32> {
        let mut max = vec![0; self.unknowns];
        for eq in &self.equations {
            for (e, _) in &eq.terms {
                for (m, &k) in max.iter_mut().zip(e) {
                    *m = (*m).max(k);
                }
            }
        }
        max
    }

    fn eval_with(eq: &JetEquation, pw: &[Vec<Jet>], shape: &Jet) -> Jet {
        let mut acc = Jet::zero(shape.nvars(), shape.order(), shape.ctx());
        for (e, c) in &eq.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &pw[i][k as usize];
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn eval(&self, y: &[Jet]) -> Vec<Jet> {
        let pw = Self::powers(y, &self.max_exps());
        self.equations.iter().map(|eq| Self::eval_with(eq, &pw, &y[0])).collect()
    }

    /// ∂E_i/∂y_j for the listed equations.
    pub fn jacobian(&self, y: &[Jet], rows: &[usize]) -> Vec<Vec<Jet>> {
        let pw = Self::powers(y, &self.max_exps());
        let shape = &y[0];
        rows.iter()
            .map(|&r| {
                let eq = &self.equations[r];
                (0..self.unknowns)
                    .map(|j| {
                        let mut acc = Jet::zero(shape.nvars(), shape.order(), shape.ctx());
                        for (e, c) in &eq.terms {
                            if e[j] == 0 {
                                continue;
                            }
                            let mut t = c.scale(&crate::number::Cx::real(e[j] as f64, shape.prec()));
                            for (i, &k) in e.iter().enumerate() {
                                let k = if i == j { k - 1 } else { k };
                                if k > 0 {
                                    t = &t * &pw[i][k as usize];
                                }
                            }
                            acc = &acc + &t;
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    /// Stop once the selected residual falls below this.
    pub tol: f64,
    /// Residual accepted when iteration stalls.
    pub accept: f64,
    pub max_iterations: usize,
    /// Smallest admissible pivot modulus in the constant Jacobian.
    pub pivot_tol: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig { tol: 1e-28, accept: 1e-12, max_iterations: 60, pivot_tol: 1e-12 }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub solution: Vec<Jet>,
    /// Equations forming the square subsystem that was solved.
    pub selected: Vec<usize>,
    pub iterations: usize,
    /// max coefficient modulus over the selected equations.
    pub selected_residual: f64,
    /// max coefficient modulus over all equations.
    pub residual: f64,
}

/// Chooses `cols` rows of `m` by greedy full pivoting (largest remaining entry first).
pub fn select_square_subsystem(m: &[Vec<Complex64>], cols: usize, pivot_tol: f64) -> Result<Vec<usize>, JetError> {
    if m.len() < cols {
        return Err(JetError::Underdetermined { equations: m.len(), unknowns: cols });
    }
    let mut a: Vec<Vec<Complex64>> = m.to_vec();
    let mut rows_left: Vec<usize> = (0..m.len()).collect();
    let mut cols_left: Vec<usize> = (0..cols).collect();
    let mut chosen = Vec::new();
    for _ in 0..cols {
        let mut best = (0usize, 0usize, -1.0f64);
        for (ri, &r) in rows_left.iter().enumerate() {
            for (ci, &c) in cols_left.iter().enumerate() {
                let v = a[r][c].norm();
                if v > best.2 {
                    best = (ri, ci, v);
                }
            }
        }
        if best.2 < pivot_tol {
            return Err(JetError::SingularJacobian(best.2.max(0.0)));
        }
        let pr = rows_left.remove(best.0);
        let pc = cols_left.remove(best.1);
        let piv = a[pr][pc];
        for &r in &rows_left {
            let f = a[r][pc] / piv;
            for c in 0..cols {
                let delta = f * a[pr][c];
                a[r][c] -= delta;
            }
        }
        chosen.push(pr);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Solves `J·x = b` over jets by Gaussian elimination with pivots chosen by constant-term modulus.
pub(crate) fn solve_jet_linear(mut j: Vec<Vec<Jet>>, mut b: Vec<Jet>, pivot_tol: f64) -> Result<Vec<Jet>, JetError> {
    let n = b.len();
    let mut inv_piv = Vec::with_capacity(n);
    for k in 0..n {
        let (p, v) = (k..n)
            .map(|i| (i, j[i][k].constant_term().abs()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if v < pivot_tol {
            return Err(JetError::SingularJacobian(v.max(0.0)));
        }
        j.swap(k, p);
        b.swap(k, p);
        let inv = j[k][k].invert_unit(pivot_tol)?;
        for i in k + 1..n {
            if j[i][k].is_zero() {
                continue;
            }
            let f = &j[i][k] * &inv;
            for c in k..n {
                let delta = &f * &j[k][c];
                j[i][c] = &j[i][c] - &delta;
            }
            let delta = &f * &b[k];
            b[i] = &b[i] - &delta;
        }
        inv_piv.push(inv);
    }
    let mut x: Vec<Option<Jet>> = vec![None; n];
    for k in (0..n).rev() {
        let mut acc = b[k].clone();
        for c in k + 1..n {
            let xc = x[c].as_ref().expect("solved");
            acc = &acc - &(&j[k][c] * xc);
        }
        x[k] = Some(&acc * &inv_piv[k]);
    }
    Ok(x.into_iter().map(|v| v.expect("solved")).collect())
}

fn max_abs_all(v: &[Jet]) -> f64 {
    v.iter().map(|j| j.max_abs()).fold(0.0, f64::max)
}

/// Newton iteration on jets from `initial`, on the square subsystem picked at the base point.
pub fn newton_solve(system: &JetSystem, initial: &[Jet], cfg: &NewtonConfig) -> Result<NewtonOutcome, JetError> {
    assert_eq!(initial.len(), system.unknowns, "one initial jet per unknown");
    let all_rows: Vec<usize> = (0..system.equations.len()).collect();
    let jac0 = system.jacobian(initial, &all_rows);
    let jac0c: Vec<Vec<Complex64>> = jac0
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let (a, b) = e.constant_term().to_f64_pair();
                    Complex64::new(a, b)
                })
                .collect()
        })
        .collect();
    let selected = select_square_subsystem(&jac0c, system.unknowns, cfg.pivot_tol)?;
    let mut y: Vec<Jet> = initial.to_vec();
    let mut iterations = 0;
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    loop {
        let vals = system.eval(&y);
        let sel: Vec<Jet> = selected.iter().map(|&r| vals[r].clone()).collect();
        let res = max_abs_all(&sel);
        if res <= cfg.tol {
            break;
        }
        if res < best * 0.5 {
            best = res;
            stalled = 0;
        } else {
            stalled += 1;
        }
        if iterations >= cfg.max_iterations || stalled >= 6 {
            if res <= cfg.accept {
                break;
            }
            return Err(JetError::NoConvergence { iterations, residual: res });
        }
        let jac = system.jacobian(&y, &selected);
        let delta = solve_jet_linear(jac, sel, cfg.pivot_tol)?;
        for (yi, di) in y.iter_mut().zip(delta.iter()) {
            *yi = &*yi - di;
        }
        iterations += 1;
    }
    let vals = system.eval(&y);
    let selected_residual = max_abs_all(&selected.iter().map(|&r| vals[r].clone()).collect::<Vec<_>>());
    let residual = max_abs_all(&vals);
    let valid = initial.iter().map(|j| j.order()).min().unwrap_or(0);
    let min_coeff_valid = system
        .equations
        .iter()
        .flat_map(|e| e.terms.iter().map(|(_, c)| c.valid_order()))
        .min()
        .unwrap_or(valid);
    for yi in y.iter_mut() {
        yi.set_valid_order(valid.min(min_coeff_valid));
    }
    Ok(NewtonOutcome { solution: y, selected, iterations, selected_residual, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetCtx;
    use crate::number::Cx;
    use crate::poly::parse_poly;

    fn ctx() -> JetCtx {
        JetCtx::default()
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn inverts_quadratic_map() {
        // Solve y1 + y1^2 = x1, y2 = x2.
        let d = 6;
        let n = names(&["x1", "x2", "y1", "y2"]);
        let polys = vec![parse_poly("y1 + y1^2 - x1", &n).unwrap(), parse_poly("y2 - x2", &n).unwrap()];
        let known = vec![Jet::var(2, d, ctx(), 0), Jet::var(2, d, ctx(), 1)];
        let sys = JetSystem::from_polys(&polys, &known, 2);
        let init = vec![Jet::zero(2, d, ctx()), Jet::zero(2, d, ctx())];
        let out = newton_solve(&sys, &init, &NewtonConfig::default()).unwrap();
        // Lagrange inversion: y1 = Σ (−1)^{k−1} Catalan(k−1) x1^k.
        let catalan = [1.0, 1.0, 2.0, 5.0, 14.0, 42.0];
        for k in 1..=6u32 {
            let expect = if k % 2 == 1 { catalan[k as usize - 1] } else { -catalan[k as usize - 1] };
            let got = out.solution[0].coeff(&[k, 0]);
            assert!((&got - &Cx::real(expect, 128)).abs() < 1e-25, "k={} got {:?}", k, got);
        }
        assert!(out.solution[1].max_abs_diff(&Jet::var(2, d, ctx(), 1)) < 1e-30);
    }

    #[test]
    fn singular_base_point() {
        let n = names(&["x", "y"]);
        let polys = vec![parse_poly("y^2 - x", &n).unwrap()];
        let known = vec![Jet::var(1, 4, ctx(), 0)];
        let sys = JetSystem::from_polys(&polys, &known, 1);
        let err = newton_solve(&sys, &[Jet::zero(1, 4, ctx())], &NewtonConfig::default()).unwrap_err();
        assert!(matches!(err, JetError::SingularJacobian(_)));
    }

    #[test]
    fn greedy_selection_picks_best_conditioned_rows() {
        let m = vec![
            vec![Complex64::new(1e-3, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(3.0, 0.0)],
        ];
        assert_eq!(select_square_subsystem(&m, 2, 1e-12).unwrap(), vec![1, 2]);
    }
}
