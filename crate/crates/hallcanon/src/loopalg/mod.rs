//! The loop algebra in PBW form: divided powers of `E_t` on the left, a
//! Schur-labelled Heisenberg sector on the right.

mod element;
mod engine;
mod monomial;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

pub use element::{AlgElement, UNBOUNDED};
pub use engine::{xi_shift_closed_form, xi_shift_coeffs};
pub(crate) use engine::{pbw_to_plain, plain_product, plain_to_pbw, PlainForm};
pub use monomial::{window_monomials, PBWMonomial};

use crate::cohp1_oracle::KClass;
use crate::exactalg::LaurentRat;
use crate::symfunc::{partitions_of, Basis, Partition, SymFunc, XI_BASIS};

/// A generator token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    E(i32),
    Xi(u32),
    H(u32),
}

impl Gen {
    pub fn class(self) -> KClass {
        match self {
            Gen::E(t) => KClass::line(t),
            Gen::Xi(l) | Gen::H(l) => KClass::torsion(l as i32),
        }
    }

    /// The generator as an element (all twists allowed).
    pub fn element(self) -> AlgElement {
        match self {
            Gen::E(t) => AlgElement::e(t, UNBOUNDED),
            Gen::Xi(l) => AlgElement::xi(l),
            Gen::H(l) => heisenberg(l),
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::E(t) => write!(f, "E({t})"),
            Gen::Xi(l) => write!(f, "XI({l})"),
            Gen::H(l) => write!(f, "H({l})"),
        }
    }
}

/// A word in the generators, read as a left-to-right product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenWord(pub Vec<Gen>);

impl GenWord {
    pub fn class(&self) -> KClass {
        self.0.iter().fold(KClass::ZERO, |acc, g| acc + g.class())
    }

    pub fn min_twist(&self) -> Option<i32> {
        self.0.iter().filter_map(|g| if let Gen::E(t) = g { Some(*t) } else { None }).min()
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for GenWord {
    type Err = String;

    /// Parses tokens such as `E(1) XI(2) H(1)`, separated by spaces or `*`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            let (name, rest) = tok.split_once('(').ok_or_else(|| format!("bad token `{tok}`"))?;
            let arg = rest.strip_suffix(')').ok_or_else(|| format!("bad token `{tok}`"))?;
            let g = match name.to_ascii_uppercase().as_str() {
                "E" => Gen::E(arg.parse().map_err(|e| format!("bad twist in `{tok}`: {e}"))?),
                "XI" => Gen::Xi(arg.parse().map_err(|e| format!("bad index in `{tok}`: {e}"))?),
                "H" => Gen::H(arg.parse().map_err(|e| format!("bad index in `{tok}`: {e}"))?),
                _ => return Err(format!("unknown generator `{name}`")),
            };
            out.push(g);
        }
        Ok(GenWord(out))
    }
}

/// PBW normal form of a word, truncated to `window`.
pub fn straighten(w: &GenWord, window: i32) -> AlgElement {
    // Below-window terms span a right ideal, so truncating after each left
    // multiplication is exact.
    let mut acc = AlgElement::one().truncate(window);
    for g in w.0.iter().rev() {
        acc = g.element().multiply(&acc).truncate(window);
    }
    acc
}

/// Torsion-free part of `xi_l * x` for a torsion-free `x`. No truncation:
/// the window of `x` is kept.
pub fn pure_xi_action(l: u32, x: &AlgElement) -> AlgElement {
    let mut out = AlgElement::zero(x.class() + KClass::torsion(l as i32), x.window());
    for (m, c) in x.terms() {
        assert!(m.torsion().size() == 0, "pure_xi_action needs a torsion-free element");
        let mut plain = engine::PlainForm::new();
        for (u, r, k) in engine::xi_through(l, &m.word()).iter() {
            if *r == 0 {
                engine::add_into(&mut plain, (u.clone(), Partition::empty()), k.clone());
            }
        }
        for (n, k) in engine::plain_to_pbw(&plain, &m.divided_factor()) {
            out.add_term(n, c * &k);
        }
    }
    out
}

/// Product; delegates to [`AlgElement::multiply`].
pub fn multiply(x: &AlgElement, y: &AlgElement) -> AlgElement {
    x.multiply(y)
}

/// Coefficients of `xi_mu` in `H_l` from `log(1 + sum xi_j s^j)`.
fn heisenberg_poly(l: u32) -> SymFunc {
    let mut f = SymFunc::zero(XI_BASIS);
    for mu in partitions_of(l) {
        // Compositions rearranging mu: len! / prod m_i!.
        let len = mu.len() as u32;
        let mut count = factorial(len);
        for i in 1..=l {
            count /= factorial(mu.multiplicity(i));
        }
        let sign = if len % 2 == 1 { 1 } else { -1 };
        let c = BigRational::new(count * sign, BigInt::from(len));
        f.add_term(mu, &LaurentRat::constant(c));
    }
    f
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `H_(l)` as an element of the torsion sector.
pub fn heisenberg(l: u32) -> AlgElement {
    assert!(l > 0, "H(0) is not a generator");
    AlgElement::from_symfunc(&heisenberg_poly(l), l).expect("degree within bound")
}

fn chi_poly(n: u32) -> SymFunc {
    if n == 0 {
        return SymFunc::one(XI_BASIS);
    }
    let mut f = SymFunc::zero(XI_BASIS);
    for mu in partitions_of(n) {
        let len = mu.len() as u32;
        let mut count = factorial(len);
        for i in 1..=n {
            count /= factorial(mu.multiplicity(i));
        }
        if len % 2 == 1 {
            count = -count;
        }
        f.add_term(mu, &LaurentRat::constant(BigRational::from_integer(count)));
    }
    f
}

/// `chi_n`, the inverse series of `1 + sum xi_l s^l`.
pub fn chi(n: u32) -> AlgElement {
    AlgElement::from_symfunc(&chi_poly(n), n).expect("degree within bound")
}

/// `theta_l = sum_k v^{2k-l} xi_{l-k} chi_k`.
pub fn theta(l: u32) -> AlgElement {
    AlgElement::from_symfunc(&theta_xi(l), l).expect("degree within bound")
}

/// `theta_l` as a polynomial in the `xi`s.
pub(crate) fn theta_xi(l: u32) -> SymFunc {
    let mut f = SymFunc::zero(XI_BASIS);
    for k in 0..=l {
        let xi = if k == l { SymFunc::one(XI_BASIS) } else { crate::symfunc::xi_of(&[l - k]) };
        let term = crate::symfunc::multiply(&xi, &chi_poly(k)).scale(&LaurentRat::v_pow(2 * k as i32 - l as i32));
        f = f.add(&term);
    }
    f
}

/// `x(l, t) = l^2 - sum_{i <= j} l_i l_j (t_j - t_i + 1)` for blocks `(t_i, l_i)`.
pub fn current_exponent(blocks: &[(i32, u32)]) -> i32 {
    let l: i32 = blocks.iter().map(|&(_, m)| m as i32).sum();
    let mut x = l * l;
    for i in 0..blocks.len() {
        for j in i..blocks.len() {
            x -= (blocks[i].1 * blocks[j].1) as i32 * (blocks[j].0 - blocks[i].0 + 1);
        }
    }
    x
}

/// The `z^t` coefficient of `:E(z)^l:`, restricted to twists `>= window`.
pub fn normally_ordered_current_coeff(l: u32, t: i32, window: i32) -> AlgElement {
    assert!(l >= 1, "current power must be positive");
    fn go(min_t: i32, left: u32, target: i32, cur: &mut Vec<(i32, u32)>, out: &mut Vec<Vec<(i32, u32)>>) {
        if left == 0 {
            if target == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for m in 1..=left {
            let mut s = min_t;
            loop {
                // Later blocks have twists >= s + 1.
                let least = m as i32 * s + (left - m) as i32 * (s + 1);
                if least > target {
                    break;
                }
                if left > m || m as i32 * s == target {
                    cur.push((s, m));
                    go(s + 1, left - m, target - m as i32 * s, cur, out);
                    cur.pop();
                }
                s += 1;
            }
        }
    }
    let mut blocks = Vec::new();
    go(window, l, t, &mut Vec::new(), &mut blocks);
    let mut out = AlgElement::zero(KClass::new(l as i32, t), window);
    for b in blocks {
        let x = current_exponent(&b);
        out.add_term(PBWMonomial::new(b, Partition::empty()), LaurentRat::v_pow(x));
    }
    out
}

/// Outcome of the `xi_l` recursion at a point with no branch factors.
#[derive(Clone, Debug, Serialize)]
pub struct XiRecursionReport {
    pub l: u32,
    /// `xi_l` in the Schur basis.
    pub element: AlgElement,
    /// The symmetric function `xi_l` maps to; expected `h_l`.
    pub image: SymFunc,
    pub matches_complete: bool,
    /// `xi_l` is the single Schur function `s_(l)`.
    pub matches_schur: bool,
}

impl XiRecursionReport {
    pub fn consistent(&self) -> bool {
        self.matches_complete && self.matches_schur
    }
}

/// With no branch factors the recursion reduces to `xi_l` itself; checks
/// that the resulting element is `h_l = s_(l)`.
pub fn xi_recursion_check(l: u32) -> XiRecursionReport {
    let element = AlgElement::xi(l);
    let s = element.to_symfunc();
    let image = s.convert(&Basis::H).expect("degree within bound");
    let expected = SymFunc::basis_element(Basis::H, if l == 0 { Partition::empty() } else { Partition::new(vec![l]) });
    let matches_complete = image == expected;
    let schur = SymFunc::basis_element(Basis::S, if l == 0 { Partition::empty() } else { Partition::new(vec![l]) });
    let matches_schur = s == schur;
    XiRecursionReport { l, element, image, matches_complete, matches_schur }
}

/// Number of PBW monomials of `class` in `window`.
pub fn graded_dimension(class: KClass, window: i32) -> usize {
    window_monomials(class, window).len()
}

/// `sum_{i+j=l} xi_i chi_j` as a symmetric function (zero for `l > 0`).
pub fn xi_chi_convolution(l: u32) -> SymFunc {
    let mut f = SymFunc::zero(XI_BASIS);
    for i in 0..=l {
        let xi = if i == 0 { SymFunc::one(XI_BASIS) } else { crate::symfunc::xi_of(&[i]) };
        f = f.add(&crate::symfunc::multiply(&xi, &chi_poly(l - i)));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_xi_action_is_the_torsion_free_part() {
        let x = AlgElement::e(-1, -3)
            .multiply(&AlgElement::e(0, -3))
            .add(&AlgElement::e(-2, -3).multiply(&AlgElement::e(1, -3)))
            .add(&AlgElement::e(-3, -3).multiply(&AlgElement::e(2, -3)));
        for l in 1..=3 {
            let full = AlgElement::xi(l).multiply(&x);
            let mut pure = AlgElement::zero(full.class(), -3);
            for (m, c) in full.terms().filter(|(m, _)| m.torsion().size() == 0) {
                pure.add_term(m.clone(), c.clone());
            }
            assert_eq!(pure_xi_action(l, &x), pure, "l = {l}");
        }
    }

    fn vm(e: i32) -> LaurentRat {
        LaurentRat::v_pow(e)
    }

    fn q(n: u32) -> LaurentRat {
        crate::exactalg::QInt(n).value()
    }

    fn w(s: &str) -> GenWord {
        s.parse().unwrap()
    }

    fn mono(e: &[(i32, u32)], l: &[u32]) -> PBWMonomial {
        PBWMonomial::new(e.to_vec(), Partition::new(l.to_vec()))
    }

    #[test]
    fn adjacent_swap() {
        for t in -2..3 {
            let x = straighten(&GenWord(vec![Gen::E(t + 1), Gen::E(t)]), t);
            let mut expect = AlgElement::zero(KClass::new(2, 2 * t + 1), t);
            expect.add_term(mono(&[(t, 1), (t + 1, 1)], &[]), vm(-2));
            assert_eq!(x, expect);
        }
    }

    #[test]
    fn heisenberg_commutator() {
        let x = straighten(&w("H(1) E(0)"), 0);
        let mut expect = AlgElement::zero(KClass::new(1, 1), 0);
        expect.add_term(mono(&[(0, 1)], &[1]), LaurentRat::one());
        expect.add_term(mono(&[(1, 1)], &[]), q(2));
        assert_eq!(x, expect);
        // [H_2, E_t] = (v^2 + v^-2)/2 E_{t+2}
        let lhs = straighten(&w("H(2) E(0)"), 0).sub(&straighten(&w("E(0) H(2)"), 0));
        let mut expect = AlgElement::zero(KClass::new(1, 2), 0);
        expect.add_term(mono(&[(2, 1)], &[]), (&vm(2) + &vm(-2)).scale(&BigRational::new(1.into(), 2.into())));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn equal_twists_divided_power() {
        let x = straighten(&w("E(3) E(3)"), 0);
        assert_eq!(x.len(), 1);
        assert_eq!(x.coeff(&mono(&[(3, 2)], &[])), q(2));
    }

    #[test]
    fn xi_two_through_e() {
        let x = straighten(&w("XI(2) E(0)"), 0);
        let xi2 = AlgElement::xi(2);
        let lead = AlgElement::e(0, 0).multiply(&xi2);
        let mid = AlgElement::e(1, 0).multiply(&AlgElement::xi(1)).scale(&q(2));
        let top = AlgElement::e(2, 0).scale(&q(3));
        assert_eq!(x, lead.add(&mid).add(&top));
    }

    #[test]
    fn xi_e_commutator() {
        let a = AlgElement::e(0, 0).multiply(&AlgElement::xi(1));
        let b = AlgElement::xi(1).multiply(&AlgElement::e(0, 0));
        assert_eq!(b.sub(&a), AlgElement::e(1, 0).scale(&q(2)));
    }

    #[test]
    fn unit_and_associativity() {
        let x = straighten(&w("E(2) E(0) XI(1)"), -1);
        assert_eq!(AlgElement::one().multiply(&x), x);
        let e = |t| AlgElement::e(t, -1);
        assert_eq!(e(0).multiply(&e(1)).multiply(&e(2)), e(0).multiply(&e(1).multiply(&e(2))));
        assert_eq!(e(2).multiply(&e(0)).multiply(&e(1)), e(2).multiply(&e(0).multiply(&e(1))));
    }

    #[test]
    fn theta_and_chi() {
        assert_eq!(theta(0), AlgElement::one());
        assert_eq!(theta(1), AlgElement::xi(1).scale(&(&vm(-1) - &vm(1))));
        for l in 1..5 {
            assert!(xi_chi_convolution(l).is_zero());
        }
        assert_eq!(chi(1), AlgElement::xi(1).scale(&LaurentRat::from_int(-1)));
    }

    #[test]
    fn theta_generating_series() {
        // sum theta_l s^l = xi(v^{-1} s) / xi(v s), i.e. theta(s) xi(vs) = xi(v^{-1}s).
        for l in 0..5u32 {
            let mut lhs = SymFunc::zero(XI_BASIS);
            for k in 0..=l {
                let th = theta(k).to_symfunc().convert(&XI_BASIS).unwrap();
                let xi = if l == k { SymFunc::one(XI_BASIS) } else { crate::symfunc::xi_of(&[l - k]) };
                lhs = lhs.add(&crate::symfunc::multiply(&th, &xi).scale(&vm((l - k) as i32)));
            }
            let rhs = if l == 0 { SymFunc::one(XI_BASIS) } else { crate::symfunc::xi_of(&[l]).scale(&vm(-(l as i32))) };
            assert_eq!(lhs, rhs, "l = {l}");
        }
    }

    #[test]
    fn currents() {
        let c = normally_ordered_current_coeff(2, 0, -3);
        assert_eq!(c.coeff(&mono(&[(0, 2)], &[])), LaurentRat::one());
        let c = normally_ordered_current_coeff(2, 1, -3);
        assert_eq!(c.coeff(&mono(&[(0, 1), (1, 1)], &[])), LaurentRat::one());
        let c = normally_ordered_current_coeff(1, 4, 0);
        assert_eq!(c, AlgElement::e(4, 0));
        assert_eq!(current_exponent(&[(-1, 1), (1, 1)]), 4 - (1 + 1 + 3));
    }

    #[test]
    fn xi_recursion() {
        assert_eq!(xi_recursion_check(0).element, AlgElement::one());
        for l in 0..6 {
            assert!(xi_recursion_check(l).consistent(), "l = {l}");
        }
    }

    #[test]
    fn gen_word_parse() {
        let g = w("E(-1)*XI(2) H(3)");
        assert_eq!(g.0, vec![Gen::E(-1), Gen::Xi(2), Gen::H(3)]);
        assert_eq!(g.to_string(), "E(-1) XI(2) H(3)");
        assert!("F(1)".parse::<GenWord>().is_err());
    }

    /// Independent rewriting system: random redex choice, plain tokens.
    mod naive {
        use super::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        use std::collections::BTreeMap;

        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
        pub(super) enum T {
            E(i32),
            X(u32),
        }

        fn step(word: &[T], i: usize) -> Vec<(Vec<T>, LaurentRat)> {
            let mk = |mid: Vec<T>| -> Vec<T> {
                let mut v = word[..i].to_vec();
                v.extend(mid);
                v.extend_from_slice(&word[i + 2..]);
                v
            };
            match (word[i], word[i + 1]) {
                (T::X(l), T::E(t)) => {
                    let cs = xi_shift_coeffs(l as usize);
                    (0..=l)
                        .map(|k| {
                            let mut mid = vec![T::E(t + k as i32)];
                            if k < l {
                                mid.push(T::X(l - k));
                            }
                            (mk(mid), cs[k as usize].clone())
                        })
                        .collect()
                }
                (T::E(a), T::E(b)) if a > b => {
                    // v^2 E_a E_b - E_b E_a = E_{a-1} E_{b+1} - v^2 E_{b+1} E_{a-1}
                    let mut out = vec![(mk(vec![T::E(b), T::E(a)]), vm(-2))];
                    if a > b + 1 {
                        out.push((mk(vec![T::E(a - 1), T::E(b + 1)]), vm(-2)));
                        out.push((mk(vec![T::E(b + 1), T::E(a - 1)]), LaurentRat::from_int(-1)));
                    }
                    out
                }
                (T::X(a), T::X(b)) if a > b => vec![(mk(vec![T::X(b), T::X(a)]), LaurentRat::one())],
                _ => unreachable!(),
            }
        }

        fn redexes(word: &[T]) -> Vec<usize> {
            (0..word.len().saturating_sub(1))
                .filter(|&i| match (word[i], word[i + 1]) {
                    (T::X(_), T::E(_)) => true,
                    (T::E(a), T::E(b)) => a > b,
                    (T::X(a), T::X(b)) => a > b,
                    _ => false,
                })
                .collect()
        }

        pub(super) fn normal_form(word: Vec<T>, rng: &mut ChaCha8Rng, window: i32, class: KClass) -> AlgElement {
            let mut todo: BTreeMap<Vec<T>, LaurentRat> = BTreeMap::new();
            todo.insert(word, LaurentRat::one());
            let mut done: BTreeMap<Vec<T>, LaurentRat> = BTreeMap::new();
            while let Some((wd, c)) = todo.pop_first() {
                let r = redexes(&wd);
                if r.is_empty() {
                    *done.entry(wd).or_default() += c;
                    continue;
                }
                let i = r[rng.gen_range(0..r.len())];
                for (nw, k) in step(&wd, i) {
                    *todo.entry(nw).or_default() += &c * &k;
                }
                todo.retain(|_, v| !v.is_zero());
            }
            let mut out = AlgElement::zero(class, window);
            for (wd, c) in done {
                let es: Vec<i32> = wd.iter().filter_map(|t| if let T::E(x) = t { Some(*x) } else { None }).collect();
                let xs: Vec<u32> = wd.iter().filter_map(|t| if let T::X(x) = t { Some(*x) } else { None }).collect();
                let shape = PBWMonomial::from_sorted_word(&es, Partition::empty());
                let c = (&c * &shape.divided_factor()).clone();
                let p = SymFunc::from_terms(XI_BASIS, [(Partition::new(xs), c)]);
                let s = p.convert(&Basis::S).unwrap();
                for (lambda, k) in s.terms() {
                    out.add_term(shape.with_torsion(lambda.clone()), k.clone());
                }
            }
            out
        }

        #[test]
        fn confluence_random_words() {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..40 {
                let len = rng.gen_range(1..=4);
                let word: Vec<T> = (0..len)
                    .map(|_| if rng.gen_bool(0.7) { T::E(rng.gen_range(-2..=2)) } else { T::X(rng.gen_range(1..=2)) })
                    .collect();
                let gens = GenWord(
                    word.iter().map(|t| match *t { T::E(x) => Gen::E(x), T::X(l) => Gen::Xi(l) }).collect(),
                );
                let window = gens.min_twist().unwrap_or(0);
                let a = straighten(&gens, window);
                let b = normal_form(word.clone(), &mut rng, window, gens.class());
                let c = normal_form(word, &mut rng, window, gens.class());
                assert_eq!(a, b, "word {gens}");
                assert_eq!(b, c, "word {gens}");
            }
        }
    }
}
