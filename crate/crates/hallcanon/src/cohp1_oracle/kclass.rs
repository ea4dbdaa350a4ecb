use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A class in `K(P^1)`: rank and degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct KClass {
    pub rank: i32,
    pub degree: i32,
}

impl KClass {
    pub const ZERO: KClass = KClass { rank: 0, degree: 0 };
    /// The class of a degree-one point.
    pub const DELTA: KClass = KClass { rank: 0, degree: 1 };

    pub fn new(rank: i32, degree: i32) -> Self {
        KClass { rank, degree }
    }

    /// `[O(t)]`.
    pub fn line(t: i32) -> Self {
        KClass { rank: 1, degree: t }
    }

    pub fn torsion(l: i32) -> Self {
        KClass { rank: 0, degree: l }
    }

    pub fn is_torsion(&self) -> bool {
        self.rank == 0
    }

    /// Classes of actual sheaves: rank >= 0 and torsion classes of degree >= 0.
    pub fn is_effective(&self) -> bool {
        self.rank > 0 || (self.rank == 0 && self.degree >= 0)
    }

    pub fn scale(self, k: i32) -> Self {
        KClass { rank: self.rank * k, degree: self.degree * k }
    }
}

/// `<a, b> = r_a r_b + (r_a d_b - d_a r_b)`.
pub fn euler_form(a: KClass, b: KClass) -> i32 {
    a.rank * b.rank + (a.rank * b.degree - a.degree * b.rank)
}

/// `(a, b) = <a, b> + <b, a>`.
pub fn symmetric_form(a: KClass, b: KClass) -> i32 {
    euler_form(a, b) + euler_form(b, a)
}

impl Add for KClass {
    type Output = KClass;
    fn add(self, o: KClass) -> KClass {
        KClass { rank: self.rank + o.rank, degree: self.degree + o.degree }
    }
}

impl Sub for KClass {
    type Output = KClass;
    fn sub(self, o: KClass) -> KClass {
        KClass { rank: self.rank - o.rank, degree: self.degree - o.degree }
    }
}

impl Neg for KClass {
    type Output = KClass;
    fn neg(self) -> KClass {
        KClass { rank: -self.rank, degree: -self.degree }
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.rank, self.degree)
    }
}

impl FromStr for KClass {
    type Err = String;
    /// Parses `r,d`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut it = s.split(',');
        let (Some(r), Some(d), None) = (it.next(), it.next(), it.next()) else {
            return Err(format!("expected `rank,degree`, got `{s}`"));
        };
        let r = r.trim().parse().map_err(|e| format!("bad rank: {e}"))?;
        let d = d.trim().parse().map_err(|e| format!("bad degree: {e}"))?;
        Ok(KClass::new(r, d))
    }
}

impl Serialize for KClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.rank, self.degree].serialize(s)
    }
}

impl<'de> Deserialize<'de> for KClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [r, deg] = <[i32; 2]>::deserialize(d)?;
        Ok(KClass::new(r, deg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_form_examples() {
        assert_eq!(euler_form(KClass::line(0), KClass::line(0)), 1);
        for a in -3..3 {
            for b in -3..3 {
                assert_eq!(euler_form(KClass::line(a), KClass::line(b)), b - a + 1);
            }
        }
        assert_eq!(euler_form(KClass::line(0), KClass::DELTA), 1);
        assert_eq!(euler_form(KClass::DELTA, KClass::line(0)), -1);
        assert_eq!(euler_form(KClass::DELTA, KClass::DELTA), 0);
    }

    #[test]
    fn parse_and_serialize() {
        let k: KClass = "2,-3".parse().unwrap();
        assert_eq!(k, KClass::new(2, -3));
        assert_eq!(serde_json::to_string(&k).unwrap(), "[2,-3]");
        assert!("1".parse::<KClass>().is_err());
    }
}
