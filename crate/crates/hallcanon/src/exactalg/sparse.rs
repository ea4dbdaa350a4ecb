use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AlgError, LaurentRat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Triangle {
    /// Nonzero entries only at `(i, j)` with `i <= j`.
    Upper,
    /// Nonzero entries only at `(i, j)` with `i >= j`.
    Lower,
}

/// Square sparse matrix over `LaurentRat`, indexed by `0..n` in the
/// supplied order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub n: usize,
    pub triangle: Triangle,
    entries: BTreeMap<(usize, usize), LaurentRat>,
}

impl SparseMatrix {
    pub fn new(n: usize, triangle: Triangle) -> Self {
        SparseMatrix { n, triangle, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize, triangle: Triangle) -> Self {
        let mut m = Self::new(n, triangle);
        for i in 0..n {
            m.set(i, i, LaurentRat::one());
        }
        m
    }

    pub fn set(&mut self, i: usize, j: usize, c: LaurentRat) {
        if c.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), c);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> LaurentRat {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &LaurentRat)> {
        self.entries.iter()
    }

    /// Checks the flag: unit diagonal and zeros on the other side.
    pub fn check_unitriangular(&self) -> Result<(), AlgError> {
        for i in 0..self.n {
            if !self.get(i, i).is_one() {
                return Err(AlgError::NonUnitDiagonal(i));
            }
        }
        for (&(i, j), _) in &self.entries {
            let bad = match self.triangle {
                Triangle::Upper => i > j,
                Triangle::Lower => i < j,
            };
            if bad {
                return Err(AlgError::NotTriangular(i, j));
            }
        }
        Ok(())
    }

    pub fn mul_vec(&self, x: &[LaurentRat]) -> Vec<LaurentRat> {
        let mut out = vec![LaurentRat::zero(); self.n];
        for (&(i, j), c) in &self.entries {
            out[i] += &(c * &x[j]);
        }
        out
    }
}

/// Solves `M x = rhs` by back or forward substitution.
pub fn solve_unitriangular(m: &SparseMatrix, rhs: &[LaurentRat]) -> Result<Vec<LaurentRat>, AlgError> {
    if rhs.len() != m.n {
        return Err(AlgError::DimensionMismatch(m.n, rhs.len()));
    }
    m.check_unitriangular()?;
    let n = m.n;
    let mut rows: Vec<Vec<(usize, &LaurentRat)>> = vec![Vec::new(); n];
    for (&(i, j), c) in m.entries() {
        if i != j {
            rows[i].push((j, c));
        }
    }
    let mut x = vec![LaurentRat::zero(); n];
    let order: Vec<usize> = match m.triangle {
        Triangle::Upper => (0..n).rev().collect(),
        Triangle::Lower => (0..n).collect(),
    };
    for i in order {
        let mut acc = rhs[i].clone();
        for &(j, c) in &rows[i] {
            acc -= &(c * &x[j]);
        }
        x[i] = acc;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> LaurentRat {
        LaurentRat::v_pow(1)
    }

    #[test]
    fn identity_returns_rhs() {
        let m = SparseMatrix::identity(3, Triangle::Upper);
        let r = vec![LaurentRat::from_int(2), v(), LaurentRat::zero()];
        assert_eq!(solve_unitriangular(&m, &r).unwrap(), r);
    }

    #[test]
    fn zero_propagates() {
        let mut m = SparseMatrix::identity(2, Triangle::Upper);
        m.set(0, 1, v());
        let x = solve_unitriangular(&m, &[LaurentRat::one(), LaurentRat::zero()]).unwrap();
        assert_eq!(x, vec![LaurentRat::one(), LaurentRat::zero()]);
    }

    #[test]
    fn back_substitution() {
        let mut m = SparseMatrix::identity(2, Triangle::Upper);
        m.set(0, 1, v());
        let a = LaurentRat::from_ints(0, &[3, 1]);
        let b = LaurentRat::from_ints(-1, &[2]);
        let x = solve_unitriangular(&m, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(x[0], &a - &(&v() * &b));
        assert_eq!(x[1], b);
        assert_eq!(m.mul_vec(&x), vec![a, LaurentRat::from_ints(-1, &[2])]);
    }

    #[test]
    fn rejects_non_unit_diagonal() {
        let mut m = SparseMatrix::identity(2, Triangle::Lower);
        m.set(1, 1, LaurentRat::from_int(2));
        assert_eq!(
            solve_unitriangular(&m, &[LaurentRat::one(), LaurentRat::one()]),
            Err(AlgError::NonUnitDiagonal(1))
        );
    }

    #[test]
    fn rejects_wrong_side() {
        let mut m = SparseMatrix::identity(2, Triangle::Lower);
        m.set(0, 1, v());
        assert_eq!(
            solve_unitriangular(&m, &[LaurentRat::one(), LaurentRat::one()]),
            Err(AlgError::NotTriangular(0, 1))
        );
    }
}
