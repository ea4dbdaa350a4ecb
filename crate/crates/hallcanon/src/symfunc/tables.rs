//! Transition data between bases, computed once per degree and cached.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::partition::{partitions_of, Partition};
use crate::exactalg::LaurentRat;

/// Partitions of one degree with their index map.
pub struct Degree {
    pub parts: Vec<Partition>,
    pub index: HashMap<Partition, usize>,
}

impl Degree {
    fn new(n: u32) -> Self {
        let parts = partitions_of(n);
        let index = parts.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Degree { parts, index }
    }
}

type Cache<K, V> = OnceLock<Mutex<HashMap<K, Arc<V>>>>;

fn cached<K, V, F>(cell: &'static Cache<K, V>, key: K, build: F) -> Arc<V>
where
    K: std::hash::Hash + Eq + Clone,
    F: FnOnce() -> V,
{
    let map = cell.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().expect("cache poisoned").get(&key) {
        return v.clone();
    }
    // Built outside the lock so that independent degrees do not serialize.
    let v = Arc::new(build());
    map.lock().expect("cache poisoned").entry(key).or_insert(v).clone()
}

pub fn degree(n: u32) -> Arc<Degree> {
    static C: Cache<u32, Degree> = OnceLock::new();
    cached(&C, n, || Degree::new(n))
}

/// Beta-set form of Murnaghan-Nakayama: removing a rim hook of length `k`
/// moves one bead from `b` to `b - k`; the sign counts beads jumped over.
fn mn(beta: &mut Vec<u32>, mu: &[u32], memo: &mut HashMap<(Vec<u32>, Vec<u32>), BigInt>) -> BigInt {
    if mu.is_empty() {
        return BigInt::one();
    }
    let key = (beta.clone(), mu.to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let k = mu[0];
    let mut total = BigInt::zero();
    for i in 0..beta.len() {
        let b = beta[i];
        if b < k || beta.contains(&(b - k)) {
            continue;
        }
        let jumped = beta.iter().filter(|&&c| c > b - k && c < b).count();
        beta[i] = b - k;
        let sub = mn(beta, &mu[1..], memo);
        beta[i] = b;
        if jumped % 2 == 0 {
            total += sub;
        } else {
            total -= sub;
        }
    }
    memo.insert(key, total.clone());
    total
}

fn beta_set(lambda: &Partition) -> Vec<u32> {
    let l = lambda.len() as u32;
    lambda.parts().iter().enumerate().map(|(i, &p)| p + l - 1 - i as u32).collect()
}

/// The irreducible character value `chi^lambda(mu)`.
pub fn character(lambda: &Partition, mu: &Partition) -> BigInt {
    if lambda.size() != mu.size() {
        return BigInt::zero();
    }
    let t = character_table(lambda.size());
    let d = degree(lambda.size());
    t[d.index[lambda]][d.index[mu]].clone()
}

/// `table[lambda][mu] = chi^lambda(mu)`, indexed as in `degree(n)`.
pub fn character_table(n: u32) -> Arc<Vec<Vec<BigInt>>> {
    static C: Cache<u32, Vec<Vec<BigInt>>> = OnceLock::new();
    cached(&C, n, || {
        let d = degree(n);
        let mut memo = HashMap::new();
        d.parts
            .iter()
            .map(|l| {
                let mut beta = beta_set(l);
                d.parts.iter().map(|m| mn(&mut beta, m.parts(), &mut memo)).collect()
            })
            .collect()
    })
}

/// Integral bases expanded in the monomial basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntBasis {
    P,
    S,
    E,
    H,
}

#[derive(Clone, Copy)]
enum RowRule {
    /// A row is placed whole into one column.
    Whole,
    /// A row spreads with at most one unit per column.
    ZeroOne,
    /// A row spreads freely.
    Free,
}

/// Number of matrices with row sums `rows`, column sums `cols` and rows
/// filled per `rule`.
fn count_matrices(rows: &[u32], cols: &[u32], rule: RowRule) -> BigInt {
    fn go(
        r: usize,
        rows: &[u32],
        rem: &mut Vec<u32>,
        rule: RowRule,
        memo: &mut HashMap<(usize, Vec<u32>), BigInt>,
    ) -> BigInt {
        if r == rows.len() {
            return if rem.iter().all(|&c| c == 0) { BigInt::one() } else { BigInt::zero() };
        }
        let key = (r, rem.clone());
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let mut total = BigInt::zero();
        match rule {
            RowRule::Whole => {
                for j in 0..rem.len() {
                    if rem[j] >= rows[r] {
                        rem[j] -= rows[r];
                        total += go(r + 1, rows, rem, rule, memo);
                        rem[j] += rows[r];
                    }
                }
            }
            RowRule::ZeroOne | RowRule::Free => {
                fn spread(
                    j: usize,
                    left: u32,
                    r: usize,
                    rows: &[u32],
                    rem: &mut Vec<u32>,
                    rule: RowRule,
                    memo: &mut HashMap<(usize, Vec<u32>), BigInt>,
                ) -> BigInt {
                    if j == rem.len() {
                        return if left == 0 { go(r + 1, rows, rem, rule, memo) } else { BigInt::zero() };
                    }
                    let cap = match rule {
                        RowRule::ZeroOne => rem[j].min(1).min(left),
                        _ => rem[j].min(left),
                    };
                    let mut acc = BigInt::zero();
                    for x in 0..=cap {
                        rem[j] -= x;
                        acc += spread(j + 1, left - x, r, rows, rem, rule, memo);
                        rem[j] += x;
                    }
                    acc
                }
                total = spread(0, rows[r], r, rows, rem, rule, memo);
            }
        }
        memo.insert(key, total.clone());
        total
    }
    let mut rem = cols.to_vec();
    go(0, rows, &mut rem, rule, &mut HashMap::new())
}

/// Enumerates horizontal strips `lambda / mu` of size `k` inside `bound`.
fn horizontal_strips(mu: &Partition, k: u32, bound: &Partition) -> Vec<Partition> {
    fn go(i: usize, left: u32, mu: &Partition, bound: &Partition, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if i > mu.len() {
            if left == 0 {
                out.push(Partition::new(cur.clone()));
            }
            return;
        }
        let lo = mu.part(i);
        let hi_strip = if i == 0 { lo + left } else { mu.part(i - 1) };
        let hi = hi_strip.min(bound.part(i)).min(lo + left);
        if hi < lo {
            return;
        }
        for p in lo..=hi {
            cur.push(p);
            go(i + 1, left - (p - lo), mu, bound, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, mu, bound, &mut Vec::new(), &mut out);
    out
}

/// `psi_{lambda/mu}(t)` as a polynomial in a formal variable.
fn psi(lambda: &Partition, mu: &Partition) -> LaurentRat {
    let lc = lambda.conjugate();
    let mc = mu.conjugate();
    let theta = |j: u32| lc.part(j as usize - 1) - mc.part(j as usize - 1);
    let mut out = LaurentRat::one();
    for j in 1..=lambda.part(0) {
        if theta(j) == 0 && theta(j + 1) == 1 {
            let m = mu.multiplicity(j) as i32;
            out *= &(&LaurentRat::one() - &LaurentRat::v_pow(m));
        }
    }
    out
}

/// Sum over semistandard tableaux of shape `lambda` and content `mu` of the
/// weight `psi_T(t)`; the weight `1` gives Kostka numbers.
fn tableau_sum(lambda: &Partition, mu: &Partition, hl: bool) -> LaurentRat {
    fn go(shape: &Partition, i: usize, lambda: &Partition, mu: &Partition, hl: bool) -> LaurentRat {
        if i == mu.len() {
            return if shape == lambda { LaurentRat::one() } else { LaurentRat::zero() };
        }
        let mut acc = LaurentRat::zero();
        for next in horizontal_strips(shape, mu.part(i), lambda) {
            let rest = go(&next, i + 1, lambda, mu, hl);
            if rest.is_zero() {
                continue;
            }
            if hl {
                acc += &(&psi(&next, shape) * &rest);
            } else {
                acc += &rest;
            }
        }
        acc
    }
    go(&Partition::empty(), 0, lambda, mu, hl)
}

/// `table[lambda][mu]` = coefficient of `m_mu` in `b_lambda`.
pub fn to_monomial(basis: IntBasis, n: u32) -> Arc<Vec<Vec<BigInt>>> {
    static C: Cache<(IntBasis, u32), Vec<Vec<BigInt>>> = OnceLock::new();
    cached(&C, (basis, n), || {
        let d = degree(n);
        d.parts
            .iter()
            .map(|l| {
                d.parts
                    .iter()
                    .map(|m| match basis {
                        IntBasis::P => count_matrices(l.parts(), m.parts(), RowRule::Whole),
                        IntBasis::E => count_matrices(l.parts(), m.parts(), RowRule::ZeroOne),
                        IntBasis::H => count_matrices(l.parts(), m.parts(), RowRule::Free),
                        IntBasis::S => {
                            let k = tableau_sum(l, m, false);
                            k.coeff(0).to_integer()
                        }
                    })
                    .collect()
            })
            .collect()
    })
}

/// Inverse of `to_monomial(basis, n)` over the rationals.
pub fn from_monomial(basis: IntBasis, n: u32) -> Arc<Vec<Vec<BigRational>>> {
    static C: Cache<(IntBasis, u32), Vec<Vec<BigRational>>> = OnceLock::new();
    cached(&C, (basis, n), || {
        let m = to_monomial(basis, n);
        invert(&m.iter().map(|r| r.iter().map(|x| BigRational::from(x.clone())).collect()).collect::<Vec<_>>())
    })
}

/// Hall-Littlewood `P_lambda = sum_mu K(t)[lambda][mu] m_mu` with `t` kept
/// formal (stored as the variable of `LaurentRat`).
pub fn hl_to_monomial(n: u32) -> Arc<Vec<Vec<LaurentRat>>> {
    static C: Cache<u32, Vec<Vec<LaurentRat>>> = OnceLock::new();
    cached(&C, n, || {
        let d = degree(n);
        d.parts.iter().map(|l| d.parts.iter().map(|m| tableau_sum(l, m, true)).collect()).collect()
    })
}

/// Substitutes `t` into a polynomial stored in the formal variable.
pub fn substitute(poly: &LaurentRat, t: &LaurentRat) -> LaurentRat {
    let Some(top) = poly.max_exp() else { return LaurentRat::zero() };
    assert!(poly.min_exp().unwrap_or(0) >= 0, "substitution needs a polynomial");
    let mut acc = LaurentRat::zero();
    for e in (0..=top).rev() {
        acc = &acc * t;
        acc += &LaurentRat::constant(poly.coeff(e));
    }
    acc
}

fn invert(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).expect("transition matrix is invertible");
        m.swap(c, p);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let d = &f * &m[c][j];
                    m[i][j] -= d;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Coefficient of `m_nu` in `m_lambda * m_mu`: number of ways to write the
/// exponent vector `nu` as a rearrangement of `lambda` plus one of `mu`.
pub fn monomial_product_coeff(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if lambda.size() + mu.size() != nu.size() || lambda.len() > nu.len() {
        return 0;
    }
    let mut avail: Vec<(u32, u32)> = Vec::new();
    for &p in lambda.parts() {
        match avail.last_mut() {
            Some((q, c)) if *q == p => *c += 1,
            _ => avail.push((p, 1)),
        }
    }
    let zeros = (nu.len() - lambda.len()) as u32;
    avail.push((0, zeros));
    fn go(i: usize, nu: &Partition, avail: &mut Vec<(u32, u32)>, rest: &mut Vec<u32>, mu: &Partition) -> u64 {
        if i == nu.len() {
            return u64::from(Partition::new(rest.clone()) == *mu);
        }
        let mut acc = 0;
        for k in 0..avail.len() {
            let (p, c) = avail[k];
            if c == 0 || p > nu.part(i) {
                continue;
            }
            avail[k].1 -= 1;
            rest.push(nu.part(i) - p);
            acc += go(i + 1, nu, avail, rest, mu);
            rest.pop();
            avail[k].1 += 1;
        }
        acc
    }
    go(0, nu, &mut avail, &mut Vec::new(), mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn small_characters() {
        assert_eq!(character(&p(&[2]), &p(&[2])), BigInt::from(1));
        assert_eq!(character(&p(&[1, 1]), &p(&[2])), BigInt::from(-1));
        assert_eq!(character(&p(&[2, 1]), &p(&[1, 1, 1])), BigInt::from(2));
        assert_eq!(character(&p(&[2, 1]), &p(&[3])), BigInt::from(-1));
        assert_eq!(character(&p(&[2, 2]), &p(&[2, 2])), BigInt::from(2));
    }

    #[test]
    fn column_orthogonality() {
        for n in 1..=7 {
            let d = degree(n);
            let t = character_table(n);
            for (j, mu) in d.parts.iter().enumerate() {
                let s: BigInt = (0..d.parts.len()).map(|i| &t[i][j] * &t[i][j]).sum();
                assert_eq!(s, mu.z(), "n={n} mu={mu}");
            }
        }
    }

    #[test]
    fn kostka_and_hl_small() {
        let k = to_monomial(IntBasis::S, 3);
        // s_21 = m_21 + 2 m_111
        assert_eq!(k[1], vec![BigInt::from(0), BigInt::from(1), BigInt::from(2)]);
        let hl = hl_to_monomial(3);
        // P_21 = m_21 + (2 - t - t^2) m_111
        assert_eq!(hl[1][2], LaurentRat::from_ints(0, &[2, -1, -1]));
        // coefficient of m_111 in P_3 is (1-t)^2
        assert_eq!(hl[0][2], LaurentRat::from_ints(0, &[1, -2, 1]));
    }

    #[test]
    fn monomial_products() {
        assert_eq!(monomial_product_coeff(&p(&[1]), &p(&[1]), &p(&[2])), 1);
        assert_eq!(monomial_product_coeff(&p(&[1]), &p(&[1]), &p(&[1, 1])), 2);
        assert_eq!(monomial_product_coeff(&p(&[1, 1]), &p(&[1]), &p(&[1, 1, 1])), 3);
        assert_eq!(monomial_product_coeff(&p(&[2]), &p(&[1]), &p(&[2, 1])), 1);
    }
}
