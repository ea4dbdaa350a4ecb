//! Symmetric functions in the bases p, s, m, e, h and Hall-Littlewood P,
//! with exact transitions and products.

mod partition;
mod tables;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use partition::{partition_count, partitions_of, Partition};
pub use tables::character;

use crate::exactalg::{pow_rat, LaurentRat, SparseMatrix, Triangle};
use tables::{degree, IntBasis};

/// Largest homogeneous degree accepted by conversions.
pub const DEFAULT_DEGREE_BOUND: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymError {
    #[error("degree {degree} exceeds the bound {bound}")]
    DegreeBound { degree: u32, bound: u32 },
    #[error("sizes do not add up: |lambda| + |mu| = {0}, |nu| = {1}")]
    SizeMismatch(u32, u32),
}

/// A basis of the ring of symmetric functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    P,
    S,
    M,
    E,
    H,
    /// Hall-Littlewood `P_lambda(t)` at the given parameter.
    HL(LaurentRat),
}

impl Basis {
    fn tag(&self) -> &'static str {
        match self {
            Basis::P => "p",
            Basis::S => "s",
            Basis::M => "m",
            Basis::E => "e",
            Basis::H => "h",
            Basis::HL(_) => "HL",
        }
    }

    fn int(&self) -> Option<IntBasis> {
        match self {
            Basis::P => Some(IntBasis::P),
            Basis::S => Some(IntBasis::S),
            Basis::E => Some(IntBasis::E),
            Basis::H => Some(IntBasis::H),
            _ => None,
        }
    }
}

/// A finite linear combination of basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymFunc {
    basis: Basis,
    coeffs: BTreeMap<Partition, LaurentRat>,
}

impl SymFunc {
    pub fn zero(basis: Basis) -> Self {
        SymFunc { basis, coeffs: BTreeMap::new() }
    }

    pub fn one(basis: Basis) -> Self {
        Self::basis_element(basis, Partition::empty())
    }

    pub fn basis_element(basis: Basis, lambda: Partition) -> Self {
        let mut f = Self::zero(basis);
        f.add_term(lambda, &LaurentRat::one());
        f
    }

    pub fn from_terms<I: IntoIterator<Item = (Partition, LaurentRat)>>(basis: Basis, terms: I) -> Self {
        let mut f = Self::zero(basis);
        for (l, c) in terms {
            f.add_term(l, &c);
        }
        f
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn coeff(&self, lambda: &Partition) -> LaurentRat {
        self.coeffs.get(lambda).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &LaurentRat)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, lambda: Partition, c: &LaurentRat) {
        if c.is_zero() {
            return;
        }
        let zero = {
            let e = self.coeffs.entry(lambda.clone()).or_default();
            *e += c;
            e.is_zero()
        };
        if zero {
            self.coeffs.remove(&lambda);
        }
    }

    pub fn scale(&self, c: &LaurentRat) -> Self {
        SymFunc::from_terms(self.basis.clone(), self.coeffs.iter().map(|(l, x)| (l.clone(), x * c)))
    }

    /// Sum of two elements in the same basis.
    pub fn add(&self, other: &SymFunc) -> SymFunc {
        assert_eq!(self.basis, other.basis, "adding across bases");
        let mut out = self.clone();
        for (l, c) in &other.coeffs {
            out.add_term(l.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &SymFunc) -> SymFunc {
        self.add(&other.scale(&-LaurentRat::one()))
    }

    pub fn max_degree(&self) -> u32 {
        self.coeffs.keys().map(|l| l.size()).max().unwrap_or(0)
    }

    pub fn convert(&self, target: &Basis) -> Result<SymFunc, SymError> {
        convert_bounded(self, target, DEFAULT_DEGREE_BOUND)
    }
}

fn by_degree(f: &SymFunc) -> BTreeMap<u32, Vec<(&Partition, &LaurentRat)>> {
    let mut out: BTreeMap<u32, Vec<_>> = BTreeMap::new();
    for (l, c) in &f.coeffs {
        out.entry(l.size()).or_default().push((l, c));
    }
    out
}

/// Converts `f` into `target`, degree by degree.
pub fn convert(f: &SymFunc, target: &Basis) -> Result<SymFunc, SymError> {
    convert_bounded(f, target, DEFAULT_DEGREE_BOUND)
}

pub fn convert_bounded(f: &SymFunc, target: &Basis, bound: u32) -> Result<SymFunc, SymError> {
    if &f.basis == target {
        return Ok(f.clone());
    }
    let mut out = SymFunc::zero(target.clone());
    for (n, terms) in by_degree(f) {
        if n > bound {
            return Err(SymError::DegreeBound { degree: n, bound });
        }
        for (l, c) in convert_degree(&f.basis, target, n, &terms) {
            out.add_term(l, &c);
        }
    }
    Ok(out)
}

fn convert_degree(
    src: &Basis,
    tgt: &Basis,
    n: u32,
    terms: &[(&Partition, &LaurentRat)],
) -> Vec<(Partition, LaurentRat)> {
    let d = degree(n);
    let k = d.parts.len();
    let mut acc = vec![LaurentRat::zero(); k];
    match (src, tgt) {
        (Basis::P, Basis::S) => {
            let chi = tables::character_table(n);
            for (mu, c) in terms {
                let j = d.index[*mu];
                for (i, a) in acc.iter_mut().enumerate() {
                    if !chi[i][j].is_zero() {
                        *a += &c.scale(&BigRational::from(chi[i][j].clone()));
                    }
                }
            }
        }
        (Basis::S, Basis::P) => {
            let chi = tables::character_table(n);
            for (lam, c) in terms {
                let i = d.index[*lam];
                for (j, a) in acc.iter_mut().enumerate() {
                    if !chi[i][j].is_zero() {
                        let w = BigRational::new(chi[i][j].clone(), d.parts[j].z());
                        *a += &c.scale(&w);
                    }
                }
            }
        }
        _ => {
            let m = to_m(src, n, terms);
            acc = from_m(tgt, n, &m);
        }
    }
    acc.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (d.parts[i].clone(), c)).collect()
}

fn hl_matrix(n: u32, t: &LaurentRat) -> Vec<Vec<LaurentRat>> {
    let poly = tables::hl_to_monomial(n);
    poly.iter().map(|r| r.iter().map(|x| tables::substitute(x, t)).collect()).collect()
}

fn to_m(src: &Basis, n: u32, terms: &[(&Partition, &LaurentRat)]) -> Vec<LaurentRat> {
    let d = degree(n);
    let mut m = vec![LaurentRat::zero(); d.parts.len()];
    match src {
        Basis::M => {
            for (l, c) in terms {
                m[d.index[*l]] += *c;
            }
        }
        Basis::HL(t) => {
            let mat = hl_matrix(n, t);
            for (l, c) in terms {
                for (j, x) in mat[d.index[*l]].iter().enumerate() {
                    if !x.is_zero() {
                        m[j] += &(*c * x);
                    }
                }
            }
        }
        b => {
            let mat = tables::to_monomial(b.int().expect("integral basis"), n);
            for (l, c) in terms {
                for (j, x) in mat[d.index[*l]].iter().enumerate() {
                    if !x.is_zero() {
                        m[j] += &c.scale(&BigRational::from(x.clone()));
                    }
                }
            }
        }
    }
    m
}

fn from_m(tgt: &Basis, n: u32, m: &[LaurentRat]) -> Vec<LaurentRat> {
    let k = m.len();
    match tgt {
        Basis::M => m.to_vec(),
        Basis::HL(t) => {
            // P_lambda = m_lambda + lower terms: rows are lexicographically
            // decreasing, so the transposed system is lower unitriangular.
            let mat = hl_matrix(n, t);
            let mut sm = SparseMatrix::new(k, Triangle::Lower);
            for (i, row) in mat.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    sm.set(j, i, x.clone());
                }
            }
            crate::exactalg::solve_unitriangular(&sm, m).expect("Hall-Littlewood transition is unitriangular")
        }
        b => {
            let inv = tables::from_monomial(b.int().expect("integral basis"), n);
            let mut out = vec![LaurentRat::zero(); k];
            for (nu, c) in m.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (i, x) in inv[nu].iter().enumerate() {
                    if !x.is_zero() {
                        out[i] += &c.scale(x);
                    }
                }
            }
            out
        }
    }
}

/// Product expanded in `f`'s basis. The multiplicative bases `p`, `h`, `e`
/// multiply by concatenation; the others go through the monomial expansion.
pub fn multiply(f: &SymFunc, g: &SymFunc) -> SymFunc {
    if f.basis == g.basis && matches!(f.basis, Basis::P | Basis::H | Basis::E) {
        let mut out = SymFunc::zero(f.basis.clone());
        for (a, x) in &f.coeffs {
            for (b, y) in &g.coeffs {
                out.add_term(a.union(b), &(x * y));
            }
        }
        return out;
    }
    let bound = f.max_degree() + g.max_degree();
    let fm = convert_bounded(f, &Basis::M, bound).expect("within bound");
    let gm = convert_bounded(g, &Basis::M, bound).expect("within bound");
    let mut prod = SymFunc::zero(Basis::M);
    for (a, x) in &fm.coeffs {
        for (b, y) in &gm.coeffs {
            let xy = x * y;
            let n = a.size() + b.size();
            for nu in &degree(n).parts {
                let c = tables::monomial_product_coeff(a, b, nu);
                if c > 0 {
                    prod.add_term(nu.clone(), &xy.scale(&BigRational::from(BigInt::from(c))));
                }
            }
        }
    }
    convert_bounded(&prod, &f.basis, bound).expect("within bound")
}

/// `P_lambda(t)` expanded in the monomial basis.
pub fn hall_littlewood_p(lambda: &Partition, t: &LaurentRat) -> SymFunc {
    SymFunc::basis_element(Basis::HL(t.clone()), lambda.clone()).convert(&Basis::M).expect("within bound")
}

/// Classical Hall number `g^nu_{lambda mu}(q) = q^{n(nu)-n(lambda)-n(mu)} f^nu_{lambda mu}(1/q)`,
/// where `f` is the structure constant of `P_lambda P_mu` at `t = 1/q`.
pub fn hl_structure_constant(
    lambda: &Partition,
    mu: &Partition,
    nu: &Partition,
    q: &BigRational,
) -> Result<BigRational, SymError> {
    if lambda.size() + mu.size() != nu.size() {
        return Err(SymError::SizeMismatch(lambda.size() + mu.size(), nu.size()));
    }
    let t = LaurentRat::constant(q.recip());
    let b = Basis::HL(t);
    let prod = multiply(&SymFunc::basis_element(b.clone(), lambda.clone()), &SymFunc::basis_element(b, mu.clone()));
    let f = prod.coeff(nu).coeff(0);
    let e = nu.n_value() as i64 - lambda.n_value() as i64 - mu.n_value() as i64;
    Ok(f * pow_rat(q, e as i32))
}

impl fmt::Display for SymFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.coeffs.iter().rev().map(|(l, c)| format!("({c})*{}[{l}]", self.basis.tag())).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct SymFuncRepr {
    basis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<LaurentRat>,
    terms: Vec<(Partition, LaurentRat)>,
}

impl Serialize for SymFunc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let t = match &self.basis {
            Basis::HL(t) => Some(t.clone()),
            _ => None,
        };
        SymFuncRepr {
            basis: self.basis.tag().to_string(),
            t,
            terms: self.coeffs.iter().map(|(l, c)| (l.clone(), c.clone())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = SymFuncRepr::deserialize(d)?;
        let basis = match (r.basis.as_str(), r.t) {
            ("p", _) => Basis::P,
            ("s", _) => Basis::S,
            ("m", _) => Basis::M,
            ("e", _) => Basis::E,
            ("h", _) => Basis::H,
            ("HL", Some(t)) => Basis::HL(t),
            ("HL", None) => return Err(D::Error::custom("HL basis needs a parameter t")),
            (b, _) => return Err(D::Error::custom(format!("unknown basis {b}"))),
        };
        Ok(SymFunc::from_terms(basis, r.terms))
    }
}

/// Convenience: `p_lambda` for a part list.
pub fn p_of(parts: &[u32]) -> SymFunc {
    SymFunc::basis_element(Basis::P, Partition::new(parts.to_vec()))
}

/// Basis in which a product `xi_mu` of torsion generators is written:
/// `xi_l` is the complete symmetric function `h_l`.
pub const XI_BASIS: Basis = Basis::H;

/// `xi_mu` for a part list, as a symmetric function.
pub fn xi_of(parts: &[u32]) -> SymFunc {
    SymFunc::basis_element(XI_BASIS, Partition::new(parts.to_vec()))
}

/// Convenience: `s_lambda` for a part list.
pub fn s_of(parts: &[u32]) -> SymFunc {
    SymFunc::basis_element(Basis::S, Partition::new(parts.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rint};
    use proptest::prelude::*;

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    fn c(n: i64) -> LaurentRat {
        LaurentRat::from_int(n)
    }

    #[test]
    fn power_sums_to_schur() {
        assert_eq!(p_of(&[1]).convert(&Basis::S).unwrap(), s_of(&[1]));
        let p2 = p_of(&[2]).convert(&Basis::S).unwrap();
        assert_eq!(p2, SymFunc::from_terms(Basis::S, [(part(&[2]), c(1)), (part(&[1, 1]), c(-1))]));
        let s11 = s_of(&[1, 1]).convert(&Basis::P).unwrap();
        let half = LaurentRat::constant(rat(1, 2));
        assert_eq!(s11, SymFunc::from_terms(Basis::P, [(part(&[1, 1]), half.clone()), (part(&[2]), -half)]));
    }

    #[test]
    fn schur_products() {
        assert_eq!(multiply(&s_of(&[1]), &s_of(&[1])), s_of(&[2]).add(&s_of(&[1, 1])));
        assert_eq!(multiply(&s_of(&[2]), &s_of(&[1])), s_of(&[3]).add(&s_of(&[2, 1])));
        assert_eq!(multiply(&p_of(&[1]), &p_of(&[3])), p_of(&[3, 1]));
    }

    #[test]
    fn schur_product_matches_power_sum_route() {
        for (a, b) in [(vec![2, 1], vec![1]), (vec![2], vec![2]), (vec![1, 1], vec![2, 1])] {
            let direct = multiply(&s_of(&a), &s_of(&b));
            let pa = s_of(&a).convert(&Basis::P).unwrap();
            let pb = s_of(&b).convert(&Basis::P).unwrap();
            let via_p = multiply(&pa, &pb).convert(&Basis::S).unwrap();
            assert_eq!(direct, via_p);
        }
    }

    #[test]
    fn hall_littlewood_examples() {
        let t = LaurentRat::v_pow(1);
        assert_eq!(hall_littlewood_p(&part(&[1]), &t), SymFunc::basis_element(Basis::M, part(&[1])));
        assert_eq!(hall_littlewood_p(&part(&[1, 1]), &t), SymFunc::basis_element(Basis::M, part(&[1, 1])));
        let p2 = hall_littlewood_p(&part(&[2]), &t);
        assert_eq!(
            p2,
            SymFunc::from_terms(Basis::M, [(part(&[2]), c(1)), (part(&[1, 1]), LaurentRat::from_ints(0, &[1, -1]))])
        );
    }

    #[test]
    fn hall_littlewood_at_zero_is_schur() {
        for n in 0..=6 {
            for l in partitions_of(n) {
                let hl = hall_littlewood_p(&l, &LaurentRat::zero());
                let s = SymFunc::basis_element(Basis::S, l.clone()).convert(&Basis::M).unwrap();
                assert_eq!(hl, s, "lambda = {l}");
            }
        }
    }

    #[test]
    fn hall_littlewood_at_one_is_monomial() {
        for l in partitions_of(4) {
            assert_eq!(hall_littlewood_p(&l, &LaurentRat::one()), SymFunc::basis_element(Basis::M, l));
        }
    }

    #[test]
    fn classical_hall_numbers() {
        let q = rint(2);
        let one = part(&[1]);
        assert_eq!(hl_structure_constant(&one, &one, &part(&[1, 1]), &q).unwrap(), rint(3));
        assert_eq!(hl_structure_constant(&one, &one, &part(&[2]), &q).unwrap(), rint(1));
        assert_eq!(hl_structure_constant(&one, &Partition::empty(), &one, &q).unwrap(), rint(1));
        assert!(hl_structure_constant(&one, &one, &one, &q).is_err());
    }

    #[test]
    fn path_independence_all_bases() {
        let t = LaurentRat::from_ints(0, &[0, 0, 1]);
        let bases = [Basis::P, Basis::S, Basis::M, Basis::E, Basis::H, Basis::HL(t)];
        for n in 0..=6 {
            for l in partitions_of(n) {
                for a in &bases {
                    let f = SymFunc::basis_element(a.clone(), l.clone());
                    let fm = f.convert(&Basis::M).unwrap();
                    for b in &bases {
                        let g = f.convert(b).unwrap();
                        assert_eq!(g.convert(&Basis::M).unwrap(), fm, "{a:?} -> {b:?} at {l}");
                        assert_eq!(g.convert(a).unwrap(), f);
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let f = SymFunc::from_terms(Basis::HL(LaurentRat::v_pow(2)), [(part(&[2, 1]), c(3))]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<SymFunc>(&s).unwrap(), f);
        let g = s_of(&[3, 1]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"basis":"s","terms":[[[3,1],[[0,"1","1"]]]]}"#);
    }

    fn element(basis: Basis) -> impl Strategy<Value = SymFunc> {
        prop::collection::vec((0u32..4, 0usize..5, -3i64..4), 1..4).prop_map(move |ts| {
            SymFunc::from_terms(
                basis.clone(),
                ts.into_iter().map(|(n, k, x)| {
                    let ps = partitions_of(n);
                    (ps[k % ps.len()].clone(), LaurentRat::from_int(x))
                }),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn product_commutative(a in element(Basis::S), b in element(Basis::S)) {
            prop_assert_eq!(multiply(&a, &b), multiply(&b, &a));
        }

        #[test]
        fn product_associative(a in element(Basis::S), b in element(Basis::E), c in element(Basis::H)) {
            let left = multiply(&multiply(&a, &b), &c);
            let right = multiply(&a, &multiply(&b, &c).convert(&Basis::S).unwrap());
            prop_assert_eq!(left, right);
        }
    }
}
