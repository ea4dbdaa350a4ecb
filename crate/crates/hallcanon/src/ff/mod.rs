//! Small finite fields, polynomials and dense linear algebra over them.

pub mod mat;
pub mod poly;

pub use mat::{
    all_vectors, gaussian_binomial, identity, is_invertible, kernel, mat_mul, mat_vec, rank, rref, span_contains,
    subspaces, Mat,
};
pub use poly::{companion, monic_irreducibles, poly_eval_mat, Poly};

use std::sync::OnceLock;

use thiserror::Error;

/// Field sizes with built-in tables.
pub const SUPPORTED_Q: &[u32] = &[2, 3, 4, 5, 7, 8, 9];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported field size {0}")]
    Unsupported(u32),
}

/// `F_q` with elements `0..q`; for `q = p^k` an element encodes the base-`p`
/// digits of a polynomial in the generator.
#[derive(Debug)]
pub struct Field {
    pub q: u32,
    pub p: u32,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

fn build(q: u32) -> Field {
    let (p, modulus): (u32, &[u32]) = match q {
        2 | 3 | 5 | 7 => (q, &[]),
        4 => (2, &[1, 1, 1]),
        8 => (2, &[1, 1, 0, 1]),
        9 => (3, &[1, 0, 1]),
        _ => unreachable!("checked by caller"),
    };
    let k = if modulus.is_empty() { 1 } else { modulus.len() - 1 };
    let digits = |x: u32| -> Vec<u32> { (0..k).map(|i| (x / p.pow(i as u32)) % p).collect() };
    let encode = |d: &[u32]| -> u32 { d.iter().enumerate().map(|(i, &c)| c * p.pow(i as u32)).sum() };
    let n = q as usize;
    let mut add = vec![0u8; n * n];
    let mut mul = vec![0u8; n * n];
    for a in 0..q {
        for b in 0..q {
            let (da, db) = (digits(a), digits(b));
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            add[(a * q + b) as usize] = encode(&s) as u8;
            let mut prod = vec![0u32; 2 * k];
            for i in 0..k {
                for j in 0..k {
                    prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                }
            }
            if k > 1 {
                for deg in (k..2 * k - 1).rev() {
                    let c = prod[deg];
                    if c != 0 {
                        for (i, &m) in modulus.iter().enumerate() {
                            let idx = deg - k + i;
                            prod[idx] = (prod[idx] + (p - (c * m) % p)) % p;
                        }
                    }
                }
            }
            mul[(a * q + b) as usize] = encode(&prod[..k]) as u8;
        }
    }
    let neg = (0..q).map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap() as u8).collect();
    let inv = (0..q)
        .map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap() as u8 })
        .collect();
    Field { q, p, add, mul, neg, inv }
}

impl Field {
    pub fn get(q: u32) -> Result<&'static Field, FieldError> {
        static FIELDS: OnceLock<Vec<Field>> = OnceLock::new();
        let fields = FIELDS.get_or_init(|| SUPPORTED_Q.iter().map(|&q| build(q)).collect());
        fields.iter().find(|f| f.q == q).ok_or(FieldError::Unsupported(q))
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.q as u8
    }

    pub fn units(&self) -> impl Iterator<Item = u8> {
        1..self.q as u8
    }
}

/// `|GL_n(F_q)|`.
pub fn gl_order(n: u32, q: u64) -> u128 {
    let qn = (q as u128).pow(n);
    (0..n).map(|i| qn - (q as u128).pow(i)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms() {
        for &q in SUPPORTED_Q {
            let f = Field::get(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
        assert!(Field::get(6).is_err());
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, 2), 6);
        assert_eq!(gl_order(1, 3), 2);
        assert_eq!(gl_order(2, 3), 48);
    }
}
