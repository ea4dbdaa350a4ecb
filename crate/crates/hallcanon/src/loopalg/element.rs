use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::engine::{add_into, monomial_product};
use super::monomial::PBWMonomial;
use crate::cohp1_oracle::KClass;
use crate::exactalg::LaurentRat;
use crate::symfunc::{Basis, Partition, SymFunc};

/// Window of elements without any `E` factor: no twist restriction.
pub const UNBOUNDED: i32 = i32::MIN;

/// A homogeneous element truncated to monomials with all twists `>= window`.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgElement {
    class: KClass,
    window: i32,
    coeffs: BTreeMap<PBWMonomial, LaurentRat>,
}

impl AlgElement {
    pub fn zero(class: KClass, window: i32) -> Self {
        AlgElement { class, window, coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(PBWMonomial::unit(), UNBOUNDED)
    }

    pub fn monomial(m: PBWMonomial, window: i32) -> Self {
        let mut x = Self::zero(m.class(), window);
        x.add_term(m, LaurentRat::one());
        x
    }

    /// `E_t`.
    pub fn e(t: i32, window: i32) -> Self {
        Self::monomial(PBWMonomial::e(t), window)
    }

    /// `E_t^{(m)}`.
    pub fn e_divided(t: i32, m: u32, window: i32) -> Self {
        Self::monomial(PBWMonomial::new(vec![(t, m)], Partition::empty()), window)
    }

    /// `xi_l`, the complete symmetric function `h_l` in the torsion sector.
    pub fn xi(l: u32) -> Self {
        if l == 0 {
            return Self::one();
        }
        Self::from_symfunc(&crate::symfunc::xi_of(&[l]), l).expect("degree fits")
    }

    /// Torsion-sector element from a homogeneous symmetric function of degree `l`.
    pub fn from_symfunc(f: &SymFunc, l: u32) -> Result<Self, crate::symfunc::SymError> {
        let s = f.convert(&Basis::S)?;
        let mut x = Self::zero(KClass::torsion(l as i32), UNBOUNDED);
        for (lambda, c) in s.terms() {
            assert_eq!(lambda.size(), l, "symmetric function is not homogeneous of degree {l}");
            x.add_term(PBWMonomial::schur(lambda.clone()), c.clone());
        }
        Ok(x)
    }

    /// The torsion part as a symmetric function in the Schur basis.
    pub fn to_symfunc(&self) -> SymFunc {
        assert!(self.class.rank == 0, "element has E factors");
        SymFunc::from_terms(Basis::S, self.coeffs.iter().map(|(m, c)| (m.torsion().clone(), c.clone())))
    }

    pub fn class(&self) -> KClass {
        self.class
    }

    pub fn window(&self) -> i32 {
        self.window
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: &PBWMonomial) -> LaurentRat {
        self.coeffs.get(m).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PBWMonomial, &LaurentRat)> {
        self.coeffs.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &PBWMonomial> {
        self.coeffs.keys()
    }

    /// Adds `c * m`; below-window monomials are dropped.
    pub fn add_term(&mut self, m: PBWMonomial, c: LaurentRat) {
        assert_eq!(m.class(), self.class, "monomial {m} has the wrong class");
        if m.in_window(self.window) {
            add_into(&mut self.coeffs, m, c);
        }
    }

    /// Restricts to a narrower window.
    pub fn truncate(&self, window: i32) -> Self {
        let window = window.max(self.window);
        AlgElement {
            class: self.class,
            window,
            coeffs: self.coeffs.iter().filter(|(m, _)| m.in_window(window)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &LaurentRat) -> Self {
        let mut out = Self::zero(self.class, self.window);
        if !c.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        }
        out
    }

    pub fn scale_rat(&self, c: &BigRational) -> Self {
        self.scale(&LaurentRat::constant(c.clone()))
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        assert_eq!(self.class, other.class, "adding elements of different classes");
        let mut out = self.truncate(other.window);
        let s = LaurentRat::from_int(sign);
        for (m, c) in &other.coeffs {
            out.add_term(m.clone(), c * &s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    /// Product; below-window monomials of the result are discarded.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.class + other.class, self.window.max(other.window));
        for (mx, cx) in &self.coeffs {
            for (my, cy) in &other.coeffs {
                let c = cx * cy;
                for (m, k) in monomial_product(mx, my).iter() {
                    out.add_term(m.clone(), &c * k);
                }
            }
        }
        out
    }

    /// Termwise bar of the coefficients only.
    pub fn bar_coeffs(&self) -> Self {
        AlgElement {
            class: self.class,
            window: self.window,
            coeffs: self.coeffs.iter().map(|(m, c)| (m.clone(), c.bar())).collect(),
        }
    }

    /// Specializes coefficients at `v = v_value`.
    pub fn specialize(&self, v: &BigRational) -> BTreeMap<PBWMonomial, BigRational> {
        self.coeffs.iter().map(|(m, c)| (m.clone(), c.specialize(v).expect("v != 0"))).collect()
    }

    /// Terms in the deterministic export order: HN type descending, then
    /// lexicographic.
    pub fn sorted_terms(&self) -> Vec<(&PBWMonomial, &LaurentRat)> {
        let mut t: Vec<_> = self.coeffs.iter().collect();
        t.sort_by(|a, b| crate::canonical::monomial_order(b.0, a.0).then_with(|| a.0.cmp(b.0)));
        t
    }
}

impl fmt::Display for AlgElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.sorted_terms().iter().map(|(m, c)| format!("({c}) {m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for AlgElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgElement[{} @ {}]: {self}", self.class, self.window)
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    class: KClass,
    window: i32,
    terms: Vec<(Vec<(i32, u32)>, Partition, LaurentRat)>,
}

impl Serialize for AlgElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire {
            class: self.class,
            window: self.window,
            terms: self
                .sorted_terms()
                .into_iter()
                .map(|(m, c)| (m.e_part().to_vec(), m.torsion().clone(), c.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = Wire::deserialize(d)?;
        let mut x = AlgElement::zero(w.class, w.window);
        for (e_part, lambda, c) in w.terms {
            if e_part.iter().any(|&(_, m)| m == 0) || e_part.windows(2).any(|p| p[0].0 >= p[1].0) {
                return Err(D::Error::custom("malformed e_part"));
            }
            let m = PBWMonomial::new(e_part, lambda);
            if m.class() != w.class {
                return Err(D::Error::custom(format!("monomial {m} does not have class {}", w.class)));
            }
            if !m.in_window(w.window) {
                return Err(D::Error::custom(format!("monomial {m} lies below window {}", w.window)));
            }
            if c.is_zero() {
                return Err(D::Error::custom("zero coefficient"));
            }
            x.add_term(m, c);
        }
        Ok(x)
    }
}
