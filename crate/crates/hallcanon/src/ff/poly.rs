use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::mat::{mat_mul, Mat};
use super::Field;

/// Polynomial over `F_q`, coefficients from degree 0 upward, no trailing
/// zeros (the zero polynomial is empty).
pub type Poly = Vec<u8>;

pub(crate) fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

pub fn degree(p: &Poly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn add(f: &Field, a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| f.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect())
}

pub fn mul(f: &Field, a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

pub fn scale(f: &Field, a: &Poly, c: u8) -> Poly {
    trim(a.iter().map(|&x| f.mul(x, c)).collect())
}

/// Quotient and remainder; panics on a zero divisor.
pub fn divrem(f: &Field, a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = f.inv(b[db]);
    let mut r = a.clone();
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut quo = vec![0u8; r.len() - db];
    for i in (db..r.len()).rev() {
        let c = f.mul(r[i], lead_inv);
        if c == 0 {
            continue;
        }
        quo[i - db] = c;
        for (j, &y) in b.iter().enumerate() {
            let idx = i - db + j;
            r[idx] = f.sub(r[idx], f.mul(c, y));
        }
    }
    (trim(quo), trim(r))
}

/// Monic greatest common divisor (zero if both are zero).
pub fn gcd(f: &Field, a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = divrem(f, &x, &y).1;
        x = y;
        y = r;
    }
    match degree(&x) {
        None => x,
        Some(d) => scale(f, &x, f.inv(x[d])),
    }
}

/// Multiplicity of the irreducible `p` in `a` (`a` nonzero).
pub fn valuation(f: &Field, a: &Poly, p: &Poly) -> u32 {
    let mut a = a.clone();
    let mut k = 0;
    loop {
        let (q, r) = divrem(f, &a, p);
        if !r.is_empty() {
            return k;
        }
        a = q;
        k += 1;
    }
}

/// Monic polynomials of exact degree `d`.
fn monics(f: &Field, d: usize) -> impl Iterator<Item = Poly> + '_ {
    super::mat::all_vectors(f, d).map(move |mut v| {
        v.push(1);
        v
    })
}

pub fn is_irreducible(f: &Field, p: &Poly) -> bool {
    let Some(d) = degree(p) else { return false };
    if d == 0 {
        return false;
    }
    (1..=d / 2).all(|k| monics(f, k).all(|g| !divrem(f, p, &g).1.is_empty()))
}

/// Monic irreducible polynomials of degree `d` over `F_q`, cached.
pub fn monic_irreducibles(f: &Field, d: usize) -> Arc<Vec<Poly>> {
    static C: OnceLock<Mutex<HashMap<(u32, usize), Arc<Vec<Poly>>>>> = OnceLock::new();
    let map = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().expect("cache poisoned").get(&(f.q, d)) {
        return v.clone();
    }
    let v: Arc<Vec<Poly>> = Arc::new(monics(f, d).filter(|p| is_irreducible(f, p)).collect());
    map.lock().expect("cache poisoned").entry((f.q, d)).or_insert(v).clone()
}

/// Companion matrix of a monic polynomial, acting on column vectors in the
/// basis `1, z, ..., z^{d-1}` (multiplication by `z`).
pub fn companion(f: &Field, p: &Poly) -> Mat {
    let d = degree(p).expect("nonzero");
    let mut m = vec![vec![0u8; d]; d];
    for i in 1..d {
        m[i][i - 1] = 1;
    }
    for (i, row) in m.iter_mut().enumerate() {
        row[d - 1] = f.neg(p[i]);
    }
    m
}

/// `p(A)` for a square matrix `A`.
pub fn poly_eval_mat(f: &Field, p: &Poly, a: &Mat) -> Mat {
    let n = a.len();
    let mut acc = vec![vec![0u8; n]; n];
    for &c in p.iter().rev() {
        acc = mat_mul(f, &acc, a);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] = f.add(row[i], c);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducible_counts() {
        // Necklace counts: q=2 -> 2,1,2,3; q=3 -> 3,3,8; q=4 -> 4,6,20.
        let f2 = Field::get(2).unwrap();
        let c2: Vec<usize> = (1..=4).map(|d| monic_irreducibles(f2, d).len()).collect();
        assert_eq!(c2, vec![2, 1, 2, 3]);
        let f3 = Field::get(3).unwrap();
        let c3: Vec<usize> = (1..=3).map(|d| monic_irreducibles(f3, d).len()).collect();
        assert_eq!(c3, vec![3, 3, 8]);
        let f4 = Field::get(4).unwrap();
        let c4: Vec<usize> = (1..=3).map(|d| monic_irreducibles(f4, d).len()).collect();
        assert_eq!(c4, vec![4, 6, 20]);
    }

    #[test]
    fn division_and_gcd() {
        let f = Field::get(3).unwrap();
        let a = vec![2, 0, 1]; // z^2 - 1
        let b = vec![1, 1]; // z + 1
        let (q, r) = divrem(f, &a, &b);
        assert_eq!(q, vec![2, 1]);
        assert!(r.is_empty());
        assert_eq!(gcd(f, &a, &vec![2, 1]), vec![2, 1]);
        assert_eq!(valuation(f, &mul(f, &a, &b), &b), 2);
    }

    #[test]
    fn companion_satisfies_polynomial() {
        let f = Field::get(2).unwrap();
        let p = vec![1, 1, 0, 1];
        let c = companion(f, &p);
        let z = poly_eval_mat(f, &p, &c);
        assert!(z.iter().all(|r| r.iter().all(|&x| x == 0)));
    }
}
