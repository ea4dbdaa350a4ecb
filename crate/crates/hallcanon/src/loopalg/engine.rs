//! Normal-form engine on plain words `E_{w_1} ... E_{w_r} xi_mu` with `w`
//! nondecreasing and `xi_mu` a monomial in the commuting `xi_l`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::monomial::PBWMonomial;
use crate::exactalg::{LaurentRat, QInt};
use crate::symfunc::{Basis, Partition, SymFunc, XI_BASIS};

pub(crate) type Word = Vec<i32>;

pub(crate) fn add_into<K: Ord>(map: &mut BTreeMap<K, LaurentRat>, key: K, c: LaurentRat) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn cache<K, V>(cell: &'static OnceLock<Mutex<HashMap<K, Arc<V>>>>) -> &'static Mutex<HashMap<K, Arc<V>>> {
    cell.get_or_init(|| Mutex::new(HashMap::new()))
}

fn lookup<K: std::hash::Hash + Eq + Clone, V>(
    cell: &'static OnceLock<Mutex<HashMap<K, Arc<V>>>>,
    key: &K,
    build: impl FnOnce() -> V,
) -> Arc<V> {
    if let Some(v) = cache(cell).lock().expect("cache poisoned").get(key) {
        return v.clone();
    }
    // Built without holding the lock: construction recurses into the cache.
    let v = Arc::new(build());
    cache(cell).lock().expect("cache poisoned").entry(key.clone()).or_insert(v).clone()
}

/// Coefficients `c_k` in `xi_l E_t = sum_k c_k E_{t+k} xi_{l-k}`, obtained as
/// the series `exp(sum_l a_l x^l)` with `a_l = (v^l + v^{-l}) / l`.
pub fn xi_shift_coeffs(n: usize) -> Arc<Vec<LaurentRat>> {
    static C: OnceLock<Mutex<HashMap<usize, Arc<Vec<LaurentRat>>>>> = OnceLock::new();
    lookup(&C, &n, || {
        // k c_k = sum_{j=1}^k (j a_j) c_{k-j}, and j a_j = v^j + v^{-j}.
        let mut c = vec![LaurentRat::one()];
        for k in 1..=n {
            let mut acc = LaurentRat::zero();
            for j in 1..=k {
                let ja = &LaurentRat::v_pow(j as i32) + &LaurentRat::v_pow(-(j as i32));
                acc += &ja * &c[k - j];
            }
            c.push(acc.scale(&BigRational::new(BigInt::from(1), BigInt::from(k))));
        }
        c
    })
}

/// The coefficient `[k+1]` in closed form, for cross-checking the series.
pub fn xi_shift_closed_form(k: u32) -> LaurentRat {
    QInt(k + 1).value()
}

fn shifted(w: &[i32], s: i32) -> Word {
    w.iter().map(|&x| x + s).collect()
}

type InsertResult = Vec<(Word, LaurentRat)>;

/// Normal form of `E_a * E_w` for a sorted word `w`.
pub(crate) fn insert_e(a: i32, w: &[i32]) -> Arc<InsertResult> {
    if w.first().map_or(true, |&b| a <= b) {
        let mut u = Vec::with_capacity(w.len() + 1);
        u.push(a);
        u.extend_from_slice(w);
        return Arc::new(vec![(u, LaurentRat::one())]);
    }
    static C: OnceLock<Mutex<HashMap<(i32, Word), Arc<InsertResult>>>> = OnceLock::new();
    let s = w[0];
    let key = (a - s, shifted(w, -s));
    let base = lookup(&C, &key, || insert_e_raw(key.0, &key.1));
    if s == 0 {
        base
    } else {
        Arc::new(base.iter().map(|(u, c)| (shifted(u, s), c.clone())).collect())
    }
}

fn insert_e_raw(a: i32, w: &[i32]) -> InsertResult {
    let b = w[0];
    let rest = &w[1..];
    let vm2 = LaurentRat::v_pow(-2);
    let mut acc: BTreeMap<Word, LaurentRat> = BTreeMap::new();
    // v^{-2} E_b (E_a rest): letters of the tail stay >= b, so prepend.
    for (u, c) in insert_e(a, rest).iter() {
        let mut k = Vec::with_capacity(u.len() + 1);
        k.push(b);
        k.extend_from_slice(u);
        add_into(&mut acc, k, &vm2 * c);
    }
    if a > b + 1 {
        // v^{-2} E_{a-1} (E_{b+1} rest) - E_{b+1} (E_{a-1} rest)
        for (u, c) in insert_e(b + 1, rest).iter() {
            for (u2, c2) in insert_e(a - 1, u).iter() {
                add_into(&mut acc, u2.clone(), &(&vm2 * c) * c2);
            }
        }
        for (u, c) in insert_e(a - 1, rest).iter() {
            for (u2, c2) in insert_e(b + 1, u).iter() {
                add_into(&mut acc, u2.clone(), -(c * c2));
            }
        }
    }
    for (u, _) in &acc {
        assert!(u[0] >= b && u.last() <= Some(&a.max(*w.last().unwrap())), "rewrite left the letter range");
    }
    acc.into_iter().collect()
}

type XiResult = Vec<(Word, u32, LaurentRat)>;

/// Normal form of `xi_l * E_w`: terms `E_u xi_{l'}`.
pub(crate) fn xi_through(l: u32, w: &[i32]) -> Arc<XiResult> {
    if l == 0 || w.is_empty() {
        return Arc::new(vec![(w.to_vec(), l, LaurentRat::one())]);
    }
    static C: OnceLock<Mutex<HashMap<(u32, Word), Arc<XiResult>>>> = OnceLock::new();
    let s = w[0];
    let key = (l, shifted(w, -s));
    let base = lookup(&C, &key, || xi_through_raw(l, &key.1));
    if s == 0 {
        base
    } else {
        Arc::new(base.iter().map(|(u, r, c)| (shifted(u, s), *r, c.clone())).collect())
    }
}

fn xi_through_raw(l: u32, w: &[i32]) -> XiResult {
    let b = w[0];
    let rest = &w[1..];
    let cs = xi_shift_coeffs(l as usize);
    let mut acc: BTreeMap<(Word, u32), LaurentRat> = BTreeMap::new();
    for k in 0..=l {
        for (u, r, c) in xi_through(l - k, rest).iter() {
            for (u2, c2) in insert_e(b + k as i32, u).iter() {
                add_into(&mut acc, (u2.clone(), *r), &(&cs[k as usize] * c) * c2);
            }
        }
    }
    acc.into_iter().map(|((u, r), c)| (u, r, c)).collect()
}

pub(crate) type PlainForm = BTreeMap<(Word, Partition), LaurentRat>;

/// `(E_wx xi_mx) * (E_wy xi_my)` on plain words, `xi_mu` a product of `xi`s.
pub(crate) fn mul_plain(wx: &[i32], mx: &Partition, wy: &[i32], my: &Partition) -> PlainForm {
    let mut state: PlainForm = BTreeMap::new();
    state.insert((wy.to_vec(), my.clone()), LaurentRat::one());
    for &l in mx.parts() {
        let mut next = BTreeMap::new();
        for ((w, nu), c) in state {
            for (u, r, c2) in xi_through(l, &w).iter() {
                let nu2 = if *r > 0 { nu.with_part_added(*r) } else { nu.clone() };
                add_into(&mut next, (u.clone(), nu2), &c * c2);
            }
        }
        state = next;
    }
    for &a in wx.iter().rev() {
        let mut next = BTreeMap::new();
        for ((w, nu), c) in state {
            for (u, c2) in insert_e(a, &w).iter() {
                add_into(&mut next, (u.clone(), nu.clone()), &c * c2);
            }
        }
        state = next;
    }
    state
}

/// `(E_wx xi_mx) * E_wy`, cached up to a common shift of all letters.
fn mul_plain_cached(wx: &[i32], mx: &Partition, wy: &[i32]) -> Arc<PlainForm> {
    static C: OnceLock<Mutex<HashMap<(Word, Partition, Word), Arc<PlainForm>>>> = OnceLock::new();
    let s = wx.first().or(wy.first()).copied().unwrap_or(0);
    let key = (shifted(wx, -s), mx.clone(), shifted(wy, -s));
    let base = lookup(&C, &key, || mul_plain(&key.0, &key.1, &key.2, &Partition::empty()));
    if s == 0 {
        base
    } else {
        Arc::new(base.iter().map(|((u, nu), c)| ((shifted(u, s), nu.clone()), c.clone())).collect())
    }
}

/// Product of plain forms, dropping words with a letter below `window`.
pub(crate) fn plain_product(x: &PlainForm, y: &PlainForm, window: i32) -> PlainForm {
    let mut out = BTreeMap::new();
    for ((wx, mx), cx) in x {
        for ((wy, my), cy) in y {
            let c = cx * cy;
            for ((u, nu), k) in mul_plain_cached(wx, mx, wy).iter() {
                if u.first().map_or(true, |&a| a >= window) {
                    add_into(&mut out, (u.clone(), nu.union(my)), &c * k);
                }
            }
        }
    }
    out
}

/// A PBW monomial as a plain form, up to the factor `1 / [d]!` of its divided
/// powers, with the Schur label expanded in products of `xi`s.
pub(crate) fn pbw_to_plain(m: &PBWMonomial) -> PlainForm {
    let w = m.word();
    schur_to_xi(m.torsion()).iter().map(|(mu, c)| ((w.clone(), mu.clone()), LaurentRat::constant(c.clone()))).collect()
}

fn constant_terms(f: &SymFunc) -> Vec<(Partition, BigRational)> {
    f.terms().map(|(mu, c)| (mu.clone(), c.coeff(0))).collect()
}

/// `s_lambda` as a polynomial in the `xi_l = h_l` (Jacobi-Trudi).
pub(crate) fn schur_to_xi(lambda: &Partition) -> Arc<Vec<(Partition, BigRational)>> {
    static C: OnceLock<Mutex<HashMap<Partition, Arc<Vec<(Partition, BigRational)>>>>> = OnceLock::new();
    lookup(&C, lambda, || {
        let f = SymFunc::basis_element(Basis::S, lambda.clone()).convert(&XI_BASIS).expect("degree within bound");
        constant_terms(&f)
    })
}

/// `xi_nu = h_nu = sum_lambda K_{lambda nu} s_lambda`.
pub(crate) fn xi_to_schur(nu: &Partition) -> Arc<Vec<(Partition, BigRational)>> {
    static C: OnceLock<Mutex<HashMap<Partition, Arc<Vec<(Partition, BigRational)>>>>> = OnceLock::new();
    lookup(&C, nu, || {
        let f = SymFunc::basis_element(XI_BASIS, nu.clone()).convert(&Basis::S).expect("degree within bound");
        constant_terms(&f)
    })
}

/// Converts a plain form (with `xi`-monomial torsion) to divided PBW monomials
/// with Schur-labelled torsion, dividing every coefficient by `denominator`.
pub(crate) fn plain_to_pbw(plain: &PlainForm, denominator: &LaurentRat) -> BTreeMap<PBWMonomial, LaurentRat> {
    let mut out: BTreeMap<PBWMonomial, LaurentRat> = BTreeMap::new();
    for ((w, nu), c) in plain {
        let shape = PBWMonomial::from_sorted_word(w, Partition::empty());
        let c = c * &shape.divided_factor();
        for (lambda, k) in xi_to_schur(nu).iter() {
            add_into(&mut out, shape.with_torsion(lambda.clone()), c.scale(k));
        }
    }
    for (m, c) in out.iter_mut() {
        *c = c
            .div_exact(denominator)
            .unwrap_or_else(|| panic!("coefficient of {m} is not divisible by the divided-power factor"));
    }
    out
}

/// Exact product of two PBW monomials, cached.
pub(crate) fn monomial_product(x: &PBWMonomial, y: &PBWMonomial) -> Arc<BTreeMap<PBWMonomial, LaurentRat>> {
    static C: OnceLock<Mutex<HashMap<(PBWMonomial, PBWMonomial), Arc<BTreeMap<PBWMonomial, LaurentRat>>>>> =
        OnceLock::new();
    let key = (x.clone(), y.clone());
    lookup(&C, &key, || {
        let (wx, wy) = (x.word(), y.word());
        let right = schur_to_xi(y.torsion());
        let mut plain: PlainForm = BTreeMap::new();
        for (mx, ax) in schur_to_xi(x.torsion()).iter() {
            for ((u, nu), c) in mul_plain_cached(&wx, mx, &wy).iter() {
                for (my, ay) in right.iter() {
                    add_into(&mut plain, (u.clone(), nu.union(my)), c.scale(&(ax * ay)));
                }
            }
        }
        plain_to_pbw(&plain, &(&x.divided_factor() * &y.divided_factor()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_series_is_quantum_integer() {
        let cs = xi_shift_coeffs(10);
        for k in 0..=10u32 {
            assert_eq!(cs[k as usize], xi_shift_closed_form(k), "k = {k}");
        }
    }

    #[test]
    fn adjacent_and_gap_two() {
        let r = insert_e(1, &[0]);
        assert_eq!(r.as_slice(), &[(vec![0, 1], LaurentRat::v_pow(-2))]);
        let r = insert_e(2, &[0]);
        let expect = vec![(vec![0, 2], LaurentRat::v_pow(-2)), (vec![1, 1], &LaurentRat::v_pow(-2) - &LaurentRat::one())];
        let mut got = r.as_ref().clone();
        got.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(got, expect);
    }

    #[test]
    fn translation_invariance() {
        let a = insert_e(4, &[0, 1]);
        let b = insert_e(7, &[3, 4]);
        let shifted: Vec<_> = a.iter().map(|(u, c)| (u.iter().map(|x| x + 3).collect::<Vec<_>>(), c.clone())).collect();
        assert_eq!(shifted, b.as_ref().clone());
    }

    #[test]
    fn letters_stay_in_range() {
        for a in -3..4 {
            for w in [vec![-2, 0], vec![-3, -3, 1], vec![0, 0, 0]] {
                let lo = a.min(w[0]);
                let hi = a.max(*w.last().unwrap());
                for (u, _) in insert_e(a, &w).iter() {
                    assert!(u.iter().all(|&x| lo <= x && x <= hi));
                    assert!(u.windows(2).all(|p| p[0] <= p[1]));
                }
            }
        }
    }
}
