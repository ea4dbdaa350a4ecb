use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{kappa_twist, CanonError};
use crate::exactalg::{q_factorial, LaurentRat};
use crate::loopalg::{pbw_to_plain, plain_product, plain_to_pbw, theta, theta_xi, AlgElement, PBWMonomial, PlainForm};

/// Largest rank for which window truncation of bar images is exact here.
pub const MAX_BAR_RANK: i32 = 2;

/// `bar(E_t) = sum_k E_{t-k} c_k` with `sum c_k s^k = xi(vs) / xi(v^{-1}s)`,
/// truncated to `window`. The coefficients are `c_k = bar(theta_k)`.
pub fn bar_generator(t: i32, window: i32) -> AlgElement {
    let mut out = AlgElement::zero(crate::cohp1_oracle::KClass::line(t), window);
    for k in 0..=(t - window).max(-1) {
        let term = AlgElement::e(t - k, window).multiply(&theta(k as u32).bar_coeffs());
        out = out.add(&term);
    }
    out
}

/// The series `E_t + sum_n (-1)^{n+1} sum v^{l_1 - l_2 - ... - l_n} E_{t - sum l}
/// xi_{l_1} ... xi_{l_n}` taken literally; kept to show it is not an involution.
pub fn bar_generator_literal(t: i32, window: i32) -> AlgElement {
    use crate::symfunc::{Partition, SymFunc, XI_BASIS};
    let mut out = AlgElement::e(t, window);
    fn compositions(n: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for a in 1..=n {
            cur.push(a);
            compositions(n - a, cur, out);
            cur.pop();
        }
    }
    for k in 1..=(t - window).max(0) as u32 {
        let mut comps = Vec::new();
        compositions(k, &mut Vec::new(), &mut comps);
        let mut f = SymFunc::zero(XI_BASIS);
        for c in comps {
            let e = c[0] as i32 - c[1..].iter().map(|&x| x as i32).sum::<i32>();
            let sign = if c.len() % 2 == 1 { 1 } else { -1 };
            f.add_term(Partition::new(c), &LaurentRat::v_pow(e).scale(&crate::exactalg::rint(sign)));
        }
        let tors = AlgElement::from_symfunc(&f, k).expect("degree within bound");
        out = out.add(&AlgElement::e(t - k as i32, window).multiply(&tors));
    }
    out
}

/// Bar image of one PBW monomial truncated to `window` (rank at most 2).
pub fn bar_monomial(m: &PBWMonomial, window: i32) -> Result<AlgElement, CanonError> {
    if m.rank() > MAX_BAR_RANK {
        return Err(CanonError::RankTooLarge(m.rank()));
    }
    if m.rank() == 0 {
        return Ok(AlgElement::monomial(m.clone(), window));
    }
    static C: OnceLock<Mutex<HashMap<PBWMonomial, Arc<AlgElement>>>> = OnceLock::new();
    let map = C.get_or_init(|| Mutex::new(HashMap::new()));
    let key = m.shift(-window);
    let hit = map.lock().expect("cache poisoned").get(&key).cloned();
    let base = match hit {
        Some(b) => b,
        None => {
            let b = Arc::new(bar_monomial_raw(&key, 0));
            map.lock().expect("cache poisoned").entry(key).or_insert(b).clone()
        }
    };
    Ok(kappa_twist(&base, window))
}

/// `bar(E_t)` truncated to `window` as a plain form.
fn generator_plain(t: i32, window: i32) -> PlainForm {
    let mut out = PlainForm::new();
    for k in 0..=(t - window).max(-1) {
        for (mu, c) in theta_xi(k as u32).terms() {
            out.insert((vec![t - k], mu.clone()), c.bar());
        }
    }
    out
}

fn bar_monomial_raw(m: &PBWMonomial, window: i32) -> AlgElement {
    let word = m.word();
    // A rank-one left factor of class (1, a) needs its right cofactor one
    // window deeper by a - N, which keeps truncation exact up to rank two.
    let mut depths = vec![window];
    for &a in &word {
        let n = *depths.last().unwrap();
        depths.push(2 * n - a);
    }
    let mut y = pbw_to_plain(&PBWMonomial::schur(m.torsion().clone()));
    for (i, &a) in word.iter().enumerate().rev() {
        y = plain_product(&generator_plain(a, depths[i]), &y, depths[i]);
    }
    let mut out = AlgElement::zero(m.class(), window);
    for (mono, c) in plain_to_pbw(&y, &m.divided_factor()) {
        out.add_term(mono, c);
    }
    out
}

/// Semilinear bar involution on the window space of `x`.
pub fn bar_window(x: &AlgElement) -> Result<AlgElement, CanonError> {
    let n = x.window();
    let mut out = AlgElement::zero(x.class(), n);
    for (m, c) in x.terms() {
        let b = bar_monomial(m, n)?;
        out = out.add(&b.scale(&c.bar()));
    }
    Ok(out)
}

/// `bar(E_t^{(m)})` as `bar(E_t)^m / [m]!` computed directly, for tests.
pub fn bar_divided_power(t: i32, m: u32, window: i32) -> AlgElement {
    let mut y = AlgElement::one();
    let mut n = window;
    let mut depths = Vec::new();
    for _ in 0..m {
        depths.push(n);
        n = 2 * n - t;
    }
    for &d in depths.iter().rev() {
        y = bar_generator(t, d).multiply(&y);
    }
    let f = q_factorial(m);
    let mut out = AlgElement::zero(y.class(), window);
    for (mono, c) in y.truncate(window).terms() {
        out.add_term(mono.clone(), c.div_exact(&f).expect("divisible"));
    }
    out
}
