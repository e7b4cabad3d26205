use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::poly::Monomial;

use super::ElimError;

/// Monomial order over the variables of a polynomial ring.
///
/// `Block` lists groups of variable indices; blocks are compared one after
/// another and each block is compared by graded lex with its variables in the
/// listed order (first listed is largest). `GrLex` is a single block over all
/// variables and `Lex` uses one block per variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonomialOrder {
    GrLex,
    Lex,
    Block(Vec<Vec<usize>>),
}

impl MonomialOrder {
    /// Elimination order: the variables of `drop` (graded lex) above the rest (graded lex).
    pub fn eliminating(nvars: usize, drop: &[usize]) -> MonomialOrder {
        let keep: Vec<usize> = (0..nvars).filter(|v| !drop.contains(v)).collect();
        MonomialOrder::Block(vec![drop.to_vec(), keep].into_iter().filter(|b| !b.is_empty()).collect())
    }

    /// The blocks this order uses on `nvars` variables.
    pub fn blocks(&self, nvars: usize) -> Vec<Vec<usize>> {
        match self {
            MonomialOrder::GrLex => vec![(0..nvars).collect()],
            MonomialOrder::Lex => (0..nvars).map(|v| vec![v]).collect(),
            MonomialOrder::Block(b) => b.clone(),
        }
    }

    pub fn validate(&self, nvars: usize) -> Result<(), ElimError> {
        if let MonomialOrder::Block(blocks) = self {
            let mut seen = vec![false; nvars];
            for &v in blocks.iter().flatten() {
                if v >= nvars || seen[v] {
                    return Err(ElimError::BadOrder(format!("{blocks:?} is not a partition of {nvars} variables")));
                }
                seen[v] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(ElimError::BadOrder(format!("{blocks:?} does not cover all {nvars} variables")));
            }
        }
        Ok(())
    }

    /// Sort key: comparing keys lexicographically compares monomials in this order.
    pub(crate) fn key(&self, m: &Monomial) -> Vec<u32> {
        match self {
            MonomialOrder::GrLex => {
                let mut k = Vec::with_capacity(m.0.len() + 1);
                k.push(m.degree());
                k.extend_from_slice(&m.0);
                k
            }
            MonomialOrder::Lex => m.0.clone(),
            MonomialOrder::Block(blocks) => {
                let mut k = Vec::with_capacity(m.0.len() + blocks.len());
                for b in blocks {
                    k.push(b.iter().map(|&v| m.0[v]).sum());
                    k.extend(b.iter().map(|&v| m.0[v]));
                }
                k
            }
        }
    }

    /// Inverse of [`MonomialOrder::key`].
    pub(crate) fn monomial(&self, key: &[u32], nvars: usize) -> Monomial {
        match self {
            MonomialOrder::GrLex => Monomial(key[1..].to_vec()),
            MonomialOrder::Lex => Monomial(key.to_vec()),
            MonomialOrder::Block(blocks) => {
                let mut e = vec![0; nvars];
                let mut pos = 0;
                for b in blocks {
                    pos += 1;
                    for &v in b {
                        e[v] = key[pos];
                        pos += 1;
                    }
                }
                Monomial(e)
            }
        }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial(e.to_vec())
    }

    #[test]
    fn orders_compare_as_documented() {
        assert_eq!(MonomialOrder::Lex.cmp(&m(&[1, 0]), &m(&[0, 5])), Ordering::Greater);
        assert_eq!(MonomialOrder::GrLex.cmp(&m(&[1, 0]), &m(&[0, 5])), Ordering::Less);
        let block = MonomialOrder::Block(vec![vec![2], vec![0, 1]]);
        assert_eq!(block.cmp(&m(&[0, 0, 1]), &m(&[3, 3, 0])), Ordering::Greater);
        assert_eq!(block.cmp(&m(&[0, 2, 1]), &m(&[1, 0, 1])), Ordering::Greater);
        assert_eq!(block.cmp(&m(&[1, 1, 1]), &m(&[2, 0, 1])), Ordering::Less);
    }

    #[test]
    fn key_round_trip() {
        let mono = m(&[3, 1, 4]);
        for o in [MonomialOrder::GrLex, MonomialOrder::Lex, MonomialOrder::Block(vec![vec![1], vec![2, 0]])] {
            assert_eq!(o.monomial(&o.key(&mono), 3), mono);
        }
    }

    #[test]
    fn validation() {
        assert!(MonomialOrder::Block(vec![vec![0], vec![0]]).validate(2).is_err());
        assert!(MonomialOrder::Block(vec![vec![0]]).validate(2).is_err());
        assert!(MonomialOrder::eliminating(3, &[1]).validate(3).is_ok());
    }
}
