use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::CanonError;
use crate::cohp1_oracle::KClass;
use crate::loopalg::PBWMonomial;

/// `num / den` in lowest terms with `den >= 0`; `1/0` is the slope of torsion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slope {
    num: i64,
    den: i64,
}

impl Slope {
    pub const INFINITY: Slope = Slope { num: 1, den: 0 };

    /// Panics on `0/0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(num != 0 || den != 0, "0/0 is not a slope");
        if den == 0 {
            return Self::INFINITY;
        }
        let g = num.gcd(&den);
        let s = if den < 0 { -1 } else { 1 };
        Slope { num: s * num / g, den: s * den / g }
    }

    /// `degree / rank`.
    pub fn of(c: KClass) -> Self {
        Self::new(c.degree as i64, c.rank as i64)
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }
}

impl Ord for Slope {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self.is_infinite(), o.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (self.num * o.den).cmp(&(o.num * self.den)),
        }
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// `(a + c) / (b + d)`.
pub fn farey_mediant(a: Slope, b: Slope) -> Slope {
    Slope::new(a.num + b.num, a.den + b.den)
}

/// `a/b, c/d` are consecutive when `ad - bc = -1`.
pub fn farey_consecutive(a: Slope, b: Slope) -> bool {
    a.num * b.den - a.den * b.num == -1
}

/// The primitive class `(b, a)` of slope `a/b`.
pub fn delta_mu(mu: Slope) -> KClass {
    if mu.is_infinite() {
        KClass::DELTA
    } else {
        KClass::new(mu.den as i32, mu.num as i32)
    }
}

/// Size `|alpha|`: rank for positive rank, degree for torsion.
pub fn class_size(c: KClass) -> i32 {
    if c.rank > 0 {
        c.rank
    } else {
        c.degree
    }
}

/// Harder-Narasimhan type: nonzero segments of strictly decreasing slope.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HNType {
    segments: Vec<KClass>,
}

impl HNType {
    pub fn new(segments: Vec<KClass>) -> Result<Self, CanonError> {
        if segments.iter().any(|s| *s == KClass::ZERO || !s.is_effective()) {
            return Err(CanonError::InvalidHNType("segments must be nonzero effective classes".into()));
        }
        if segments.windows(2).any(|w| Slope::of(w[0]) <= Slope::of(w[1])) {
            return Err(CanonError::InvalidHNType("slopes must strictly decrease".into()));
        }
        Ok(HNType { segments })
    }

    pub fn segments(&self) -> &[KClass] {
        &self.segments
    }

    pub fn total(&self) -> KClass {
        self.segments.iter().fold(KClass::ZERO, |a, &b| a + b)
    }
}

impl fmt::Display for HNType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.segments.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// Torsion first, then the blocks `(d_i, d_i t_i)` by decreasing twist.
pub fn hn_type_of_monomial(m: &PBWMonomial) -> HNType {
    let mut segments = Vec::new();
    let l = m.torsion().size() as i32;
    if l > 0 {
        segments.push(KClass::torsion(l));
    }
    for &(t, d) in m.e_part().iter().rev() {
        segments.push(KClass::new(d as i32, d as i32 * t));
    }
    HNType { segments }
}

/// `Greater` means `a` is above `b`: at the first difference `a` has the
/// smaller slope, or equal slope and smaller size.
pub fn hn_compare(a: &HNType, b: &HNType) -> Result<Ordering, CanonError> {
    if a.total() != b.total() {
        return Err(CanonError::ClassMismatch(a.total(), b.total()));
    }
    Ok(hn_cmp_unchecked(a, b))
}

fn hn_cmp_unchecked(a: &HNType, b: &HNType) -> Ordering {
    for (x, y) in a.segments.iter().zip(&b.segments) {
        if x == y {
            continue;
        }
        let (sx, sy) = (Slope::of(*x), Slope::of(*y));
        if sx != sy {
            return sy.cmp(&sx);
        }
        return class_size(*y).cmp(&class_size(*x));
    }
    b.segments.len().cmp(&a.segments.len())
}

/// Total order on monomials of one class: HN type, then the torsion
/// partition (lexicographic, which refines dominance), then the monomial.
pub fn monomial_order(a: &PBWMonomial, b: &PBWMonomial) -> Ordering {
    hn_cmp_unchecked(&hn_type_of_monomial(a), &hn_type_of_monomial(b))
        .then_with(|| a.torsion().cmp(b.torsion()))
        .then_with(|| a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::Partition;

    fn hn(v: &[(i32, i32)]) -> HNType {
        HNType::new(v.iter().map(|&(r, d)| KClass::new(r, d)).collect()).unwrap()
    }

    #[test]
    fn monomial_types() {
        let m = PBWMonomial::new(vec![(1, 1), (3, 1)], Partition::empty());
        assert_eq!(hn_type_of_monomial(&m), hn(&[(1, 3), (1, 1)]));
        let m = PBWMonomial::new(vec![(0, 2)], Partition::new(vec![1, 1]));
        assert_eq!(hn_type_of_monomial(&m), hn(&[(0, 2), (2, 0)]));
        let m = PBWMonomial::schur(Partition::new(vec![3, 1]));
        assert_eq!(hn_type_of_monomial(&m), hn(&[(0, 4)]));
    }

    #[test]
    fn order_examples() {
        assert_eq!(hn_compare(&hn(&[(1, 1)]), &hn(&[(0, 1), (1, 0)])).unwrap(), Ordering::Greater);
        assert_eq!(hn_compare(&hn(&[(1, 1)]), &hn(&[(1, 1)])).unwrap(), Ordering::Equal);
        assert_eq!(hn_compare(&hn(&[(1, 2), (1, 0)]), &hn(&[(1, 3), (1, -1)])).unwrap(), Ordering::Greater);
        assert!(hn_compare(&hn(&[(1, 2)]), &hn(&[(1, 3)])).is_err());
        // Semistable (2,2) is above the split type [(1,2),(1,0)].
        assert_eq!(hn_compare(&hn(&[(2, 2)]), &hn(&[(1, 2), (1, 0)])).unwrap(), Ordering::Greater);
    }

    #[test]
    fn order_is_antisymmetric_and_total() {
        let ms = crate::loopalg::window_monomials(KClass::new(2, 0), -2);
        for a in &ms {
            for b in &ms {
                assert_eq!(monomial_order(a, b), monomial_order(b, a).reverse());
                if a != b {
                    assert_ne!(monomial_order(a, b), Ordering::Equal);
                }
            }
        }
    }

    #[test]
    fn farey() {
        let m = farey_mediant(Slope::new(0, 1), Slope::INFINITY);
        assert_eq!(m, Slope::new(1, 1));
        assert!(farey_consecutive(Slope::new(1, 2), Slope::new(1, 1)));
        assert!(!farey_consecutive(Slope::new(1, 1), Slope::new(1, 2)));
        let a = Slope::new(1, 2);
        let b = Slope::new(1, 1);
        assert_eq!(delta_mu(a) + delta_mu(b), delta_mu(farey_mediant(a, b)));
        assert_eq!(delta_mu(farey_mediant(a, b)), KClass::new(3, 2));
        assert_eq!(Slope::new(2, -4), Slope::new(-1, 2));
        assert!(Slope::INFINITY > Slope::new(100, 1));
    }
}
