//! Linear changes of variables with integer matrices and exact rational inverses.

use num::rational::BigRational;
use num::{BigInt, One, Zero};

use super::{GaussRat, MultiPoly, PolyError};

/// Dense matrix of exact rationals, row-major.
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn identity_matrix(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn int_matrix_to_rat(m: &[Vec<i64>]) -> RatMatrix {
    m.iter()
        .map(|row| row.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect()
}

pub fn mat_mul_int(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let k = b.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

pub(crate) fn rat_mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(BigRational::zero(), |acc, t| acc + &a[i][t] * &b[t][j]))
                .collect()
        })
        .collect()
}

/// Exact inverse by Gauss–Jordan elimination over the rationals.
pub fn rat_matrix_inverse(m: &RatMatrix) -> Result<RatMatrix, PolyError> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(PolyError::SingularMatrix);
    }
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(PolyError::SingularMatrix)?;
        a.swap(col, piv);
        let inv = BigRational::one() / &a[col][col];
        for v in a[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn int_matrix_inverse(m: &[Vec<i64>]) -> Result<RatMatrix, PolyError> {
    rat_matrix_inverse(&int_matrix_to_rat(m))
}

/// Composes `f` with the change of variables `old_i = Σ_j m[i][j]·new_j`.
pub fn substitute_linear_rat(f: &MultiPoly, m: &RatMatrix) -> Result<MultiPoly, PolyError> {
    let n = f.nvars();
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(PolyError::MatrixShape { rows: m.len(), cols: m.first().map(|r| r.len()).unwrap_or(0), nvars: n });
    }
    rat_matrix_inverse(m)?;
    let images: Vec<MultiPoly> = m
        .iter()
        .map(|row| {
            MultiPoly::from_terms(
                n,
                row.iter().enumerate().map(|(j, c)| {
                    let mut e = vec![0; n];
                    e[j] = 1;
                    (e, GaussRat::from_rational(c.clone()))
                }),
            )
        })
        .collect();
    Ok(f.compose(&images))
}

/// Integer-matrix version of [`substitute_linear_rat`]; rejects singular matrices.
pub fn substitute_linear(f: &MultiPoly, m: &[Vec<i64>]) -> Result<MultiPoly, PolyError> {
    substitute_linear_rat(f, &int_matrix_to_rat(m))
}

#[cfg(test)]
mod tests {
    use super::super::parse_poly;
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn examples() {
        let n = names(&["x", "y"]);
        let f = parse_poly("x*y", &n).unwrap();
        let g = substitute_linear(&f, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(g, parse_poly("(x+y)*y", &n).unwrap());
        assert_eq!(substitute_linear(&f, &identity_matrix(2)).unwrap(), f);
        let nz = names(&["x", "z"]);
        let h = parse_poly("z^2 - x", &nz).unwrap();
        let h2 = substitute_linear(&h, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(h2, parse_poly("z^2 - x - z", &nz).unwrap());
    }

    #[test]
    fn singular_rejected() {
        let f = MultiPoly::var(2, 0);
        assert_eq!(substitute_linear(&f, &[vec![1, 2], vec![2, 4]]), Err(PolyError::SingularMatrix));
    }

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![2, 1, 0], vec![1, -1, 3], vec![0, 1, 1]];
        let inv = int_matrix_inverse(&m).unwrap();
        let prod = rat_mat_mul(&int_matrix_to_rat(&m), &inv);
        for (i, row) in prod.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, if i == j { BigRational::one() } else { BigRational::zero() });
            }
        }
        let n = names(&["a", "b", "c"]);
        let f = parse_poly("a^2*b - 3*c + a*b*c", &n).unwrap();
        let back = substitute_linear_rat(&substitute_linear(&f, &m).unwrap(), &inv).unwrap();
        assert_eq!(back, f);
    }
}
