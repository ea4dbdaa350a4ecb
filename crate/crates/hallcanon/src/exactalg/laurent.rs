//! Laurent polynomials in `v` with exact rational coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AlgError;

/// A Laurent polynomial `sum c_e v^e` with `c_e` rational.
///
/// Stored densely from the lowest nonzero exponent; the first and last
/// stored coefficients are nonzero, and the zero polynomial has no storage.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentRat {
    low: i32,
    coeffs: Vec<BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl LaurentRat {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(0, c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(rint(n))
    }

    /// `c * v^e`.
    pub fn term(e: i32, c: BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentRat { low: e, coeffs: vec![c] }
    }

    /// `v^e`.
    pub fn v_pow(e: i32) -> Self {
        Self::term(e, BigRational::one())
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I: IntoIterator<Item = (i32, BigRational)>>(terms: I) -> Self {
        let mut out = LaurentRat::zero();
        for (e, c) in terms {
            out.add_term(e, &c);
        }
        out
    }

    /// Integer coefficient list starting at exponent `low`.
    pub fn from_ints(low: i32, cs: &[i64]) -> Self {
        let mut p = LaurentRat { low, coeffs: cs.iter().map(|&c| rint(c)).collect() };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.low = 0;
            }
            Some(i) => {
                if i > 0 {
                    self.coeffs.drain(..i);
                    self.low += i as i32;
                }
                while self.coeffs.last().map_or(false, |c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn min_exp(&self) -> Option<i32> {
        if self.is_zero() { None } else { Some(self.low) }
    }

    pub fn max_exp(&self) -> Option<i32> {
        if self.is_zero() { None } else { Some(self.low + self.coeffs.len() as i32 - 1) }
    }

    pub fn coeff(&self, e: i32) -> BigRational {
        let i = e - self.low;
        if i < 0 || i as usize >= self.coeffs.len() {
            BigRational::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.low + i as i32, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms().count()
    }

    pub fn add_term(&mut self, e: i32, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        if self.is_zero() {
            self.low = e;
            self.coeffs = vec![c.clone()];
            return;
        }
        if e < self.low {
            let pad = (self.low - e) as usize;
            let mut v = vec![BigRational::zero(); pad];
            v.append(&mut self.coeffs);
            self.coeffs = v;
            self.low = e;
        }
        let i = (e - self.low) as usize;
        if i >= self.coeffs.len() {
            self.coeffs.resize(i + 1, BigRational::zero());
        }
        self.coeffs[i] += c;
        if self.coeffs[i].is_zero() {
            self.normalize();
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentRat { low: self.low, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplies by `v^k`.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentRat { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    /// The semilinear involution `v -> v^{-1}`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let hi = self.max_exp().unwrap();
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        LaurentRat { low: -hi, coeffs }
    }

    /// Exact evaluation at a nonzero rational `v`.
    pub fn specialize(&self, v: &BigRational) -> Result<BigRational, AlgError> {
        if v.is_zero() {
            return Err(AlgError::ZeroSpecialization);
        }
        let mut acc = BigRational::zero();
        // Horner on the polynomial part, then multiply by v^low.
        for c in self.coeffs.iter().rev() {
            acc = acc * v + c;
        }
        Ok(acc * pow_rat(v, self.low))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// True iff in `v Z[v]`.
    pub fn in_v_zv(&self) -> bool {
        self.is_zero() || (self.low >= 1 && self.is_integral())
    }

    /// True iff in `N[v, v^{-1}]`.
    pub fn is_nonneg_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer() && !c.is_negative())
    }

    pub fn is_bar_invariant(&self) -> bool {
        self.bar() == *self
    }

    /// Part with strictly positive exponents.
    pub fn positive_part(&self) -> Self {
        LaurentRat::from_terms(self.terms().filter(|(e, _)| *e > 0).map(|(e, c)| (e, c.clone())))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = LaurentRat::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact division; `None` if `d` does not divide `self` in `Q[v, v^{-1}]`.
    pub fn div_exact(&self, d: &LaurentRat) -> Option<LaurentRat> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dl = d.low;
        let dc = &d.coeffs;
        let dlead = dc.last().unwrap();
        let mut rem: Vec<BigRational> = self.coeffs.clone();
        let n = rem.len();
        if n < dc.len() {
            return None;
        }
        let qlen = n - dc.len() + 1;
        let mut quot = vec![BigRational::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = &rem[k + dc.len() - 1] / dlead;
            if !c.is_zero() {
                for (j, dj) in dc.iter().enumerate() {
                    rem[k + j] -= &c * dj;
                }
            }
            quot[k] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        let mut q = LaurentRat { low: self.low - dl, coeffs: quot };
        q.normalize();
        Some(q)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = num_integer::lcm(l, c.denom().clone());
        }
        l
    }
}

pub(crate) fn pow_rat(v: &BigRational, e: i32) -> BigRational {
    let mut base = if e < 0 { v.recip() } else { v.clone() };
    let mut k = e.unsigned_abs();
    let mut acc = BigRational::one();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    acc
}

impl PartialOrd for LaurentRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary but deterministic total order (used for canonical sorting only).
impl Ord for LaurentRat {
    fn cmp(&self, other: &Self) -> Ordering {
        let a: Vec<_> = self.terms().collect();
        let b: Vec<_> = other.terms().collect();
        a.cmp(&b)
    }
}

impl<'a, 'b> Add<&'b LaurentRat> for &'a LaurentRat {
    type Output = LaurentRat;
    fn add(self, rhs: &'b LaurentRat) -> LaurentRat {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let low = self.low.min(rhs.low);
        let high = self.max_exp().unwrap().max(rhs.max_exp().unwrap());
        let mut coeffs = vec![BigRational::zero(); (high - low + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - low) as usize + i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[(rhs.low - low) as usize + i] += c;
        }
        let mut p = LaurentRat { low, coeffs };
        p.normalize();
        p
    }
}

impl<'a> Neg for &'a LaurentRat {
    type Output = LaurentRat;
    fn neg(self) -> LaurentRat {
        LaurentRat { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for LaurentRat {
    type Output = LaurentRat;
    fn neg(self) -> LaurentRat {
        -&self
    }
}

impl<'a, 'b> Sub<&'b LaurentRat> for &'a LaurentRat {
    type Output = LaurentRat;
    fn sub(self, rhs: &'b LaurentRat) -> LaurentRat {
        self + &(-rhs)
    }
}

impl<'a, 'b> Mul<&'b LaurentRat> for &'a LaurentRat {
    type Output = LaurentRat;
    fn mul(self, rhs: &'b LaurentRat) -> LaurentRat {
        if self.is_zero() || rhs.is_zero() {
            return LaurentRat::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        let mut p = LaurentRat { low: self.low + rhs.low, coeffs };
        p.normalize();
        p
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentRat> for LaurentRat {
            type Output = LaurentRat;
            fn $m(self, rhs: LaurentRat) -> LaurentRat {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a LaurentRat> for LaurentRat {
            type Output = LaurentRat;
            fn $m(self, rhs: &'a LaurentRat) -> LaurentRat {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<LaurentRat> for &'a LaurentRat {
            type Output = LaurentRat;
            fn $m(self, rhs: LaurentRat) -> LaurentRat {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<'a> AddAssign<&'a LaurentRat> for LaurentRat {
    fn add_assign(&mut self, rhs: &'a LaurentRat) {
        if rhs.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = rhs.clone();
            return;
        }
        // In-place when the support of rhs fits.
        if rhs.low >= self.low && rhs.max_exp() <= self.max_exp() {
            let off = (rhs.low - self.low) as usize;
            for (i, c) in rhs.coeffs.iter().enumerate() {
                self.coeffs[off + i] += c;
            }
            self.normalize();
        } else {
            *self = &*self + rhs;
        }
    }
}

impl AddAssign<LaurentRat> for LaurentRat {
    fn add_assign(&mut self, rhs: LaurentRat) {
        *self += &rhs;
    }
}

impl<'a> SubAssign<&'a LaurentRat> for LaurentRat {
    fn sub_assign(&mut self, rhs: &'a LaurentRat) {
        *self += &(-rhs);
    }
}

impl<'a> MulAssign<&'a LaurentRat> for LaurentRat {
    fn mul_assign(&mut self, rhs: &'a LaurentRat) {
        *self = &*self * rhs;
    }
}

impl Zero for LaurentRat {
    fn zero() -> Self {
        LaurentRat::zero()
    }
    fn is_zero(&self) -> bool {
        LaurentRat::is_zero(self)
    }
}

impl One for LaurentRat {
    fn one() -> Self {
        LaurentRat::one()
    }
}

impl From<i64> for LaurentRat {
    fn from(n: i64) -> Self {
        LaurentRat::from_int(n)
    }
}

impl From<BigRational> for LaurentRat {
    fn from(c: BigRational) -> Self {
        LaurentRat::constant(c)
    }
}

impl fmt::Display for LaurentRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = !a.is_one() || e == 0;
            if show_coeff {
                write!(f, "{}", a)?;
            }
            match e {
                0 => {}
                1 => write!(f, "v")?,
                _ => write!(f, "v^{}", e)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentRat({})", self)
    }
}

impl Serialize for LaurentRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let triples: Vec<(i32, String, String)> = self
            .terms()
            .map(|(e, c)| (e, c.numer().to_string(), c.denom().to_string()))
            .collect();
        triples.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let triples: Vec<(i32, String, String)> = Vec::deserialize(d)?;
        let mut out = LaurentRat::zero();
        for (e, n, den) in triples {
            let n: BigInt = n.parse().map_err(D::Error::custom)?;
            let den: BigInt = den.parse().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            out.add_term(e, &BigRational::new(n, den));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(low: i32, cs: &[i64]) -> LaurentRat {
        LaurentRat::from_ints(low, cs)
    }

    #[test]
    fn arithmetic_basics() {
        let a = lp(-1, &[1, 0, 1]); // v^-1 + v
        let sq = &a * &a;
        assert_eq!(sq, lp(-2, &[1, 0, 2, 0, 1]));
        assert!((&a - &a).is_zero());
        assert_eq!(format!("{}", lp(-1, &[-1, 0, 0, 1])), "v^2 - v^-1");
    }

    #[test]
    fn bar_examples() {
        assert_eq!(lp(-1, &[-1, 0, 0, 1]).bar(), lp(-2, &[1, 0, 0, -1]));
        assert_eq!(LaurentRat::one().bar(), LaurentRat::one());
        let q3 = lp(-2, &[1, 0, 1, 0, 1]);
        assert_eq!(q3.bar(), q3);
    }

    #[test]
    fn specialize_examples() {
        let half = rat(1, 2);
        assert_eq!(LaurentRat::v_pow(-2).specialize(&half).unwrap(), rint(4));
        assert_eq!(lp(-1, &[1, 0, 1]).specialize(&half).unwrap(), rat(5, 2));
        assert_eq!(LaurentRat::zero().specialize(&rat(3, 7)).unwrap(), rint(0));
        assert!(LaurentRat::one().specialize(&rint(0)).is_err());
    }

    #[test]
    fn exact_division() {
        let two = lp(-1, &[1, 0, 1]);
        let p = &two * &lp(0, &[3, 1, -2]);
        assert_eq!(p.div_exact(&two).unwrap(), lp(0, &[3, 1, -2]));
        assert!(lp(0, &[1]).div_exact(&two).is_none());
    }

    #[test]
    fn json_round_trip() {
        let p = LaurentRat::from_terms([(-3, rat(1, 2)), (4, rint(-7))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[[-3,"1","2"],[4,"-7","1"]]"#);
        let back: LaurentRat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
