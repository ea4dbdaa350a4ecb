//! Exact coefficient arithmetic: Laurent polynomials in `v` over the
//! rationals, quantum integers and sparse unitriangular solving.

mod laurent;
mod linalg;
mod sparse;

pub use laurent::{rat, rint, LaurentRat};
pub use linalg::{rank_over_qv, rank_rational, solve_rational, RatFunc};
pub use sparse::{solve_unitriangular, SparseMatrix, Triangle};

pub(crate) use laurent::pow_rat;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("cannot specialize at v = 0")]
    ZeroSpecialization,
    #[error("diagonal entry at index {0} is not 1")]
    NonUnitDiagonal(usize),
    #[error("entry ({0}, {1}) lies on the wrong side of the diagonal")]
    NotTriangular(usize, usize),
    #[error("dimension mismatch: matrix {0}, vector {1}")]
    DimensionMismatch(usize, usize),
}

/// The quantum integer `[n] = v^{n-1} + v^{n-3} + ... + v^{1-n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QInt(pub u32);

impl QInt {
    pub fn value(self) -> LaurentRat {
        let n = self.0 as i32;
        LaurentRat::from_terms((0..n).map(|k| (n - 1 - 2 * k, rint(1))))
    }
}

/// `[n]! = [1][2]...[n]`.
pub fn q_factorial(n: u32) -> LaurentRat {
    (1..=n).fold(LaurentRat::one(), |acc, k| &acc * &QInt(k).value())
}

/// Termwise `v -> v^{-1}`.
pub fn bar_coeff(c: &LaurentRat) -> LaurentRat {
    c.bar()
}

/// Exact evaluation of `c` at `v = v_value`.
pub fn specialize(c: &LaurentRat, v_value: &num_rational::BigRational) -> Result<num_rational::BigRational, AlgError> {
    c.specialize(v_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quantum_integers() {
        assert!(QInt(0).value().is_zero());
        assert!(QInt(1).value().is_one());
        assert_eq!(QInt(3).value(), LaurentRat::from_ints(-2, &[1, 0, 1, 0, 1]));
    }

    #[test]
    fn factorial_examples() {
        assert!(q_factorial(0).is_one());
        assert_eq!(q_factorial(2), LaurentRat::from_ints(-1, &[1, 0, 1]));
        assert_eq!(q_factorial(3), LaurentRat::from_ints(-3, &[1, 0, 2, 0, 2, 0, 1]));
    }

    #[test]
    fn factorials_are_bar_invariant() {
        for n in 0..=20 {
            assert!(q_factorial(n).is_bar_invariant(), "n = {n}");
        }
    }

    fn laurent_strategy() -> impl Strategy<Value = LaurentRat> {
        (-4i32..4, prop::collection::vec((-5i64..6, 1i64..4), 0..5)).prop_map(|(low, cs)| {
            LaurentRat::from_terms(cs.into_iter().enumerate().map(|(i, (n, d))| (low + i as i32, rat(n, d))))
        })
    }

    proptest! {
        #[test]
        fn bar_is_involutive(a in laurent_strategy()) {
            prop_assert_eq!(bar_coeff(&bar_coeff(&a)), a);
        }

        #[test]
        fn bar_is_multiplicative(a in laurent_strategy(), b in laurent_strategy()) {
            prop_assert_eq!(bar_coeff(&(&a * &b)), &bar_coeff(&a) * &bar_coeff(&b));
        }

        #[test]
        fn specialize_is_ring_map(a in laurent_strategy(), b in laurent_strategy(), n in 1i64..5, d in 1i64..5) {
            let x = rat(n, d);
            let sa = specialize(&a, &x).unwrap();
            let sb = specialize(&b, &x).unwrap();
            prop_assert_eq!(specialize(&(&a + &b), &x).unwrap(), &sa + &sb);
            prop_assert_eq!(specialize(&(&a * &b), &x).unwrap(), &sa * &sb);
        }
    }
}
