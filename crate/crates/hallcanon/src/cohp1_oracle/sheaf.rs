//! Closed points, isomorphism classes of coherent sheaves and their
//! enumeration.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{KClass, OracleError};
use crate::ff::{self, Field, Poly};
use crate::symfunc::{partitions_of, Partition};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointKind {
    Infinity,
    /// Monic irreducible in the affine coordinate, coefficients low to high.
    Finite(Poly),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedPoint {
    pub q: u32,
    pub kind: PointKind,
}

impl ClosedPoint {
    pub fn infinity(q: u32) -> Self {
        ClosedPoint { q, kind: PointKind::Infinity }
    }

    /// The rational point `z = a`.
    pub fn rational(q: u32, a: u8) -> Result<Self, OracleError> {
        let f = Field::get(q).map_err(OracleError::Field)?;
        if a as u32 >= q {
            return Err(OracleError::Parse(format!("{a} is not an element of F_{q}")));
        }
        Ok(ClosedPoint { q, kind: PointKind::Finite(vec![f.neg(a), 1]) })
    }

    pub fn finite(q: u32, p: Poly) -> Result<Self, OracleError> {
        let f = Field::get(q).map_err(OracleError::Field)?;
        if p.last() != Some(&1) || !ff::poly::is_irreducible(f, &p) {
            return Err(OracleError::Parse(format!("{p:?} is not monic irreducible over F_{q}")));
        }
        Ok(ClosedPoint { q, kind: PointKind::Finite(p) })
    }

    pub fn degree(&self) -> usize {
        match &self.kind {
            PointKind::Infinity => 1,
            PointKind::Finite(p) => p.len() - 1,
        }
    }
}

impl fmt::Display for ClosedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PointKind::Infinity => write!(f, "inf"),
            PointKind::Finite(p) => {
                let cs: Vec<String> = p.iter().map(|c| c.to_string()).collect();
                write!(f, "[{}]", cs.join(","))
            }
        }
    }
}

/// All closed points of degree at most `bound`, infinity first.
pub fn points_up_to(q: u32, bound: usize) -> Result<Vec<ClosedPoint>, OracleError> {
    let f = Field::get(q).map_err(OracleError::Field)?;
    let mut out = Vec::new();
    if bound >= 1 {
        out.push(ClosedPoint::infinity(q));
    }
    for d in 1..=bound {
        for p in ff::monic_irreducibles(f, d).iter() {
            out.push(ClosedPoint { q, kind: PointKind::Finite(p.clone()) });
        }
    }
    Ok(out)
}

/// `(+)_i O(vb_i) (+) (+)_x T_x`; the twists are kept sorted and the
/// torsion map has no empty partitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SheafIso {
    vb: Vec<i32>,
    torsion: BTreeMap<ClosedPoint, Partition>,
}

impl SheafIso {
    pub fn new(mut vb: Vec<i32>, torsion: BTreeMap<ClosedPoint, Partition>) -> Self {
        vb.sort_unstable();
        let torsion = torsion.into_iter().filter(|(_, l)| !l.is_empty()).collect();
        SheafIso { vb, torsion }
    }

    pub fn zero() -> Self {
        SheafIso { vb: Vec::new(), torsion: BTreeMap::new() }
    }

    pub fn line(t: i32) -> Self {
        SheafIso { vb: vec![t], torsion: BTreeMap::new() }
    }

    pub fn bundle(vb: Vec<i32>) -> Self {
        SheafIso::new(vb, BTreeMap::new())
    }

    pub fn point(x: ClosedPoint, lambda: Partition) -> Self {
        SheafIso::new(Vec::new(), BTreeMap::from([(x, lambda)]))
    }

    pub fn vb(&self) -> &[i32] {
        &self.vb
    }

    pub fn torsion(&self) -> &BTreeMap<ClosedPoint, Partition> {
        &self.torsion
    }

    pub fn torsion_at(&self, x: &ClosedPoint) -> Option<&Partition> {
        self.torsion.get(x)
    }

    pub fn rank(&self) -> i32 {
        self.vb.len() as i32
    }

    pub fn torsion_degree(&self) -> u32 {
        self.torsion.iter().map(|(x, l)| x.degree() as u32 * l.size()).sum()
    }

    pub fn class(&self) -> KClass {
        KClass::new(self.rank(), self.vb.iter().sum::<i32>() + self.torsion_degree() as i32)
    }

    pub fn is_zero(&self) -> bool {
        self.vb.is_empty() && self.torsion.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.vb.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn vb_part(&self) -> SheafIso {
        SheafIso { vb: self.vb.clone(), torsion: BTreeMap::new() }
    }

    pub fn torsion_part(&self) -> SheafIso {
        SheafIso { vb: Vec::new(), torsion: self.torsion.clone() }
    }

    /// Field size of the torsion points, if any.
    pub fn field(&self) -> Option<u32> {
        self.torsion.keys().next().map(|x| x.q)
    }

    pub fn direct_sum(&self, other: &SheafIso) -> SheafIso {
        let mut vb = self.vb.clone();
        vb.extend_from_slice(&other.vb);
        let mut torsion = self.torsion.clone();
        for (x, l) in &other.torsion {
            let e = torsion.entry(x.clone()).or_insert_with(Partition::empty);
            *e = e.union(l);
        }
        SheafIso::new(vb, torsion)
    }

    /// Parses sums such as `O+O(-1)+T(inf;2,1)+T(0;1)+T([1,1,1];1)`. A bare
    /// integer names the rational point `z = a`.
    pub fn parse(text: &str, q: u32) -> Result<SheafIso, OracleError> {
        let err = |m: &str| OracleError::Parse(format!("{m} in {text:?}"));
        let mut vb = Vec::new();
        let mut torsion: BTreeMap<ClosedPoint, Partition> = BTreeMap::new();
        let text = text.replace(' ', "");
        if text == "0" {
            return Ok(SheafIso::zero());
        }
        for tok in split_top(&text) {
            if tok == "O" {
                vb.push(0);
            } else if let Some(inner) = tok.strip_prefix("O(").and_then(|s| s.strip_suffix(')')) {
                vb.push(inner.parse().map_err(|_| err("bad twist"))?);
            } else if let Some(inner) = tok.strip_prefix("T(").and_then(|s| s.strip_suffix(')')) {
                let (pt, parts) = inner.split_once(';').ok_or_else(|| err("torsion needs point;partition"))?;
                let x = if pt == "inf" {
                    ClosedPoint::infinity(q)
                } else if let Some(list) = pt.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                    let p: Result<Vec<u8>, _> = list.split(',').map(|c| c.parse::<u8>()).collect();
                    ClosedPoint::finite(q, p.map_err(|_| err("bad polynomial"))?)?
                } else {
                    ClosedPoint::rational(q, pt.parse().map_err(|_| err("bad point"))?)?
                };
                let ps: Result<Vec<u32>, _> = parts.split(',').map(|c| c.parse::<u32>()).collect();
                let lambda = Partition::new(ps.map_err(|_| err("bad partition"))?);
                let e = torsion.entry(x).or_insert_with(Partition::empty);
                *e = e.union(&lambda);
            } else {
                return Err(err(&format!("unknown summand {tok:?}")));
            }
        }
        Ok(SheafIso::new(vb, torsion))
    }
}

fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch == '+' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out
}

impl fmt::Display for SheafIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.vb.iter().map(|&t| if t == 0 { "O".into() } else { format!("O({t})") }).collect();
        for (x, l) in &self.torsion {
            let ps: Vec<String> = l.parts().iter().map(|p| p.to_string()).collect();
            parts.push(format!("T({x};{})", ps.join(",")));
        }
        write!(f, "{}", parts.join("+"))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Named(String),
    Poly(Vec<u8>),
}

#[derive(Serialize, Deserialize)]
struct SheafRepr {
    vb: Vec<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<u32>,
    #[serde(default)]
    torsion: Vec<(PointRepr, Partition)>,
}

impl Serialize for SheafIso {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let torsion = self
            .torsion
            .iter()
            .map(|(x, l)| {
                let p = match &x.kind {
                    PointKind::Infinity => PointRepr::Named("inf".into()),
                    PointKind::Finite(p) => PointRepr::Poly(p.clone()),
                };
                (p, l.clone())
            })
            .collect();
        SheafRepr { vb: self.vb.clone(), q: self.field(), torsion }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SheafIso {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = SheafRepr::deserialize(d)?;
        let mut torsion = BTreeMap::new();
        for (p, l) in r.torsion {
            let q = r.q.ok_or_else(|| D::Error::custom("torsion needs the field size q"))?;
            let x = match p {
                PointRepr::Named(n) if n == "inf" => ClosedPoint::infinity(q),
                PointRepr::Named(n) => return Err(D::Error::custom(format!("unknown point {n}"))),
                PointRepr::Poly(p) => ClosedPoint::finite(q, p).map_err(D::Error::custom)?,
            };
            if torsion.insert(x, l).is_some() {
                return Err(D::Error::custom("repeated torsion point"));
            }
        }
        Ok(SheafIso::new(r.vb, torsion))
    }
}

/// All torsion sheaves of degree `n` supported on points of degree at most
/// `bound`.
pub fn torsion_sheaves(q: u32, n: u32, bound: usize) -> Result<Vec<SheafIso>, OracleError> {
    let pts = points_up_to(q, bound.min(n as usize))?;
    let mut out = Vec::new();
    fn rec(pts: &[ClosedPoint], rest: u32, cur: &mut BTreeMap<ClosedPoint, Partition>, out: &mut Vec<SheafIso>) {
        if rest == 0 {
            out.push(SheafIso::new(Vec::new(), cur.clone()));
            return;
        }
        let Some((x, tail)) = pts.split_first() else { return };
        rec(tail, rest, cur, out);
        let d = x.degree() as u32;
        for k in 1..=rest / d {
            for lambda in partitions_of(k) {
                cur.insert(x.clone(), lambda);
                rec(tail, rest - k * d, cur, out);
            }
        }
        cur.remove(x);
    }
    rec(&pts, n, &mut BTreeMap::new(), &mut out);
    Ok(out)
}

/// Nondecreasing twist sequences of length `r`, each at least `low`, summing to `d`.
pub fn bundles(r: usize, d: i32, low: i32) -> Vec<Vec<i32>> {
    fn rec(r: usize, d: i32, low: i32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if r == 0 {
            if d == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut t = low;
        while t * r as i32 <= d {
            cur.push(t);
            rec(r - 1, d - t, t, cur, out);
            cur.pop();
            t += 1;
        }
    }
    let mut out = Vec::new();
    rec(r, d, low, &mut Vec::new(), &mut out);
    out
}

/// Every sheaf of a torsion class with support degree at most `bound`.
pub fn enumerate_sheaves(class: KClass, q: u32, bound: usize) -> Result<Vec<SheafIso>, OracleError> {
    if class.rank != 0 {
        return Err(OracleError::Unsupported(format!("class {class} needs a twist window")));
    }
    if class.degree < 0 {
        return Ok(Vec::new());
    }
    torsion_sheaves(q, class.degree as u32, bound)
}

/// Every sheaf of `class` whose line bundle twists are at least `window`.
pub fn enumerate_sheaves_in_window(class: KClass, q: u32, bound: usize, window: i32) -> Result<Vec<SheafIso>, OracleError> {
    if class.rank < 0 {
        return Ok(Vec::new());
    }
    if class.rank == 0 {
        return enumerate_sheaves(class, q, bound);
    }
    let mut out = Vec::new();
    let mut k = 0;
    while class.degree - k >= class.rank * window {
        let tors = torsion_sheaves(q, k as u32, bound)?;
        for vb in bundles(class.rank as usize, class.degree - k, window) {
            for t in &tors {
                out.push(SheafIso::bundle(vb.clone()).direct_sum(t));
            }
        }
        k += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_sheaves(KClass::torsion(1), 2, 1).unwrap().len(), 3);
        assert_eq!(enumerate_sheaves(KClass::torsion(2), 2, 2).unwrap().len(), 10);
        assert_eq!(enumerate_sheaves_in_window(KClass::line(0), 2, 4, 0).unwrap(), vec![SheafIso::line(0)]);
        let all = enumerate_sheaves_in_window(KClass::new(2, 1), 3, 3, -1).unwrap();
        let set: std::collections::BTreeSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(|s| s.class() == KClass::new(2, 1)));
    }

    #[test]
    fn parse_display_round_trip() {
        for text in ["O+O(-1)", "O(2)+T(inf;2,1)", "T(0;1)+T([1,1,1];1)", "0"] {
            let s = SheafIso::parse(text, 2).unwrap();
            assert_eq!(SheafIso::parse(&s.to_string(), 2).unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<SheafIso>(&json).unwrap(), s);
        }
        assert!(SheafIso::parse("T([0,0,1];1)", 2).is_err());
        assert!(SheafIso::parse("O(x)", 2).is_err());
    }
}
