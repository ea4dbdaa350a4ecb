//! Hall numbers, the Hall product and the Green coproduct.
//!
//! Counts are organized by the quotient: the subsheaves `L <= C` with
//! `L ~ B` and `C/L ~ A` are in bijection with surjections `C -> A` with
//! kernel `~ B`, modulo `Aut A`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::aut::aut_count;
use super::local::{line_cokernels, local_hall_number, local_surjections};
use super::sheaf::{torsion_sheaves, ClosedPoint, SheafIso};
use super::{euler_form, KClass, OracleError};
use crate::exactalg::LaurentRat;
use crate::ff::{self, Field};
use crate::symfunc::{partitions_of, Partition};

/// Pairs of binary forms of degrees `m1, m2` (a negative degree forces the
/// zero form) without a common zero on `P^1`.
pub fn coprime_form_pairs(q: u32, m1: i32, m2: i32) -> u128 {
    static C: OnceLock<Mutex<HashMap<(u32, i32, i32), u128>>> = OnceLock::new();
    let (m1, m2) = (m1.min(m2), m1.max(m2));
    if m2 < 0 {
        return 0;
    }
    if m1 < 0 {
        return if m2 == 0 { q as u128 - 1 } else { 0 };
    }
    let map = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&n) = map.lock().expect("cache poisoned").get(&(q, m1, m2)) {
        return n;
    }
    // Every nonzero pair is D (H1, H2) for a unique class of gcd D up to
    // scalars and a coprime pair (H1, H2).
    let qq = q as u128;
    let mut n = qq.pow((m1 + m2 + 2) as u32) - 1;
    for k in 1..=m2 {
        let classes = (qq.pow(k as u32 + 1) - 1) / (qq - 1);
        n -= classes * coprime_form_pairs(q, m1 - k, m2 - k);
    }
    map.lock().expect("cache poisoned").insert((q, m1, m2), n);
    n
}

/// Same count by enumerating all pairs.
pub fn coprime_form_pairs_bruteforce(q: u32, m1: i32, m2: i32) -> u128 {
    let f = Field::get(q).expect("supported field");
    let forms = |m: i32| -> Vec<Vec<u8>> {
        if m < 0 {
            vec![Vec::new()]
        } else {
            ff::all_vectors(f, m as usize + 1).collect()
        }
    };
    let (g1s, g2s) = (forms(m1), forms(m2));
    let mut n = 0;
    for g1 in &g1s {
        for g2 in &g2s {
            // Coefficient k multiplies x^k y^(m-k); infinity is (1:0).
            let top = |g: &Vec<u8>| g.last().copied().unwrap_or(0);
            if top(g1) == 0 && top(g2) == 0 {
                continue;
            }
            let h = ff::poly::gcd(f, &trim(g1), &trim(g2));
            if ff::poly::degree(&h) == Some(0) {
                n += 1;
            }
        }
    }
    n
}

fn trim(p: &[u8]) -> Vec<u8> {
    let mut v = p.to_vec();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn torsion_union_support(a: &SheafIso, b: &SheafIso) -> Vec<ClosedPoint> {
    let mut pts: Vec<ClosedPoint> = a.torsion().keys().chain(b.torsion().keys()).cloned().collect();
    pts.sort();
    pts.dedup();
    pts
}

/// All `nu` with nonzero local Hall number for quotient `lambda` and sub `mu`.
fn local_extensions(q: u32, d: usize, lambda: &Partition, mu: &Partition) -> Vec<(Partition, u128)> {
    if lambda.is_empty() {
        return vec![(mu.clone(), 1)];
    }
    if mu.is_empty() {
        return vec![(lambda.clone(), 1)];
    }
    partitions_of(lambda.size() + mu.size())
        .into_iter()
        .filter_map(|nu| {
            let g = local_hall_number(q, d, &nu, lambda, mu);
            (g > 0).then_some((nu, g))
        })
        .collect()
}

fn cartesian<T: Clone>(options: &[Vec<(T, u128)>]) -> Vec<(Vec<T>, u128)> {
    let mut acc: Vec<(Vec<T>, u128)> = vec![(Vec::new(), 1)];
    for opts in options {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for (prefix, n) in &acc {
            for (x, m) in opts {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push((p, n * m));
            }
        }
        acc = next;
    }
    acc
}

/// Every `C` with `g^C_{A,B} != 0` (quotient `A`, sub `B`) and its Hall number.
pub fn extensions(a: &SheafIso, b: &SheafIso, q: u32) -> Result<Vec<(SheafIso, u128)>, OracleError> {
    static C: OnceLock<Mutex<HashMap<(SheafIso, SheafIso, u32), Vec<(SheafIso, u128)>>>> = OnceLock::new();
    let key = (a.clone(), b.clone(), q);
    let map = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().expect("cache poisoned").get(&key) {
        return Ok(v.clone());
    }
    let v = extensions_raw(a, b, q)?;
    map.lock().expect("cache poisoned").insert(key, v.clone());
    Ok(v)
}

fn extensions_raw(a: &SheafIso, b: &SheafIso, q: u32) -> Result<Vec<(SheafIso, u128)>, OracleError> {
    if a.is_zero() {
        return Ok(vec![(b.clone(), 1)]);
    }
    if b.is_zero() {
        return Ok(vec![(a.clone(), 1)]);
    }
    if b.is_torsion() {
        // B sits in the torsion of C, so C = vb(A) + T with T / B ~ T_A.
        let pts = torsion_union_support(a, b);
        let empty = Partition::empty();
        let options: Vec<Vec<(Partition, u128)>> = pts
            .iter()
            .map(|x| {
                let la = a.torsion_at(x).unwrap_or(&empty);
                let mu = b.torsion_at(x).unwrap_or(&empty);
                local_extensions(q, x.degree(), la, mu)
            })
            .collect();
        return Ok(cartesian(&options)
            .into_iter()
            .map(|(nus, n)| {
                let tors = pts.iter().cloned().zip(nus).collect();
                (SheafIso::new(a.vb().to_vec(), tors), n)
            })
            .collect());
    }
    if a.is_torsion() && b.rank() == 1 && b.is_torsion_free() {
        return Ok(torsion_quotient_of_line(a, b.vb()[0], q));
    }
    if a.is_torsion() && b.rank() == 1 {
        return torsion_quotient_of_rank_one(a, b, q);
    }
    if a.rank() == 1 && a.is_torsion_free() && b.rank() == 1 {
        let (t, s) = (a.vb()[0], b.vb()[0]);
        let mut out = Vec::new();
        let mut c1 = t.min(s);
        while 2 * c1 <= t + s {
            let c2 = t + s - c1;
            let n = coprime_form_pairs(q, t - c1, t - c2);
            if n > 0 {
                assert_eq!(n % (q as u128 - 1), 0);
                out.push((SheafIso::bundle(vec![c1, c2]).direct_sum(&b.torsion_part()), n / (q as u128 - 1)));
            }
            c1 += 1;
        }
        return Ok(out);
    }
    Err(OracleError::Unsupported(format!("extensions of {a} by {b}")))
}

/// Injections `O(b) -> O(c) + T_C` with torsion cokernel `A`, modulo
/// scalars. The form part is fixed up to scalars by its valuations `k_x`;
/// the section part is counted point by point.
fn torsion_quotient_of_line(a: &SheafIso, b: i32, q: u32) -> Vec<(SheafIso, u128)> {
    let pts: Vec<ClosedPoint> = a.torsion().keys().cloned().collect();
    let options: Vec<Vec<((u32, Partition), u128)>> = pts
        .iter()
        .map(|x| {
            let ax = &a.torsion()[x];
            let mut opts = Vec::new();
            for size in 0..=ax.size() {
                for nu in partitions_of(size) {
                    let k = ax.size() - size;
                    if let Some(&n) = line_cokernels(q, x.degree(), k, &nu).get(ax) {
                        opts.push(((k, nu), n));
                    }
                }
            }
            opts
        })
        .collect();
    cartesian(&options)
        .into_iter()
        .map(|(choice, n)| {
            let c = b + pts.iter().zip(&choice).map(|(x, (k, _))| (*k as usize * x.degree()) as i32).sum::<i32>();
            let tors = pts.iter().cloned().zip(choice.into_iter().map(|(_, nu)| nu)).collect();
            (SheafIso::new(vec![c], tors), n)
        })
        .collect()
}

/// `C = O(c) + T_C` surjecting onto torsion `A` with kernel `B = O(b) + T_B`.
/// Surjections are pairs (section of `A`, map `T_C -> A`) point by point.
fn torsion_quotient_of_rank_one(a: &SheafIso, b: &SheafIso, q: u32) -> Result<Vec<(SheafIso, u128)>, OracleError> {
    let pts = torsion_union_support(a, b);
    let empty = Partition::empty();
    let mut options: Vec<Vec<(Partition, u128)>> = Vec::new();
    for x in &pts {
        let ax = a.torsion_at(x).unwrap_or(&empty);
        let bx = b.torsion_at(x).unwrap_or(&empty);
        if ax.is_empty() {
            options.push(vec![(bx.clone(), 1)]);
            continue;
        }
        let mut opts = Vec::new();
        for size in bx.size()..=ax.size() + bx.size() {
            for nu in partitions_of(size) {
                let surj = local_surjections(q, x.degree(), &nu, ax, true);
                if let Some(&n) = surj.get(bx) {
                    opts.push((nu, n));
                }
            }
        }
        options.push(opts);
    }
    let aut_a = aut_count(a, q);
    let total = a.class().degree + b.class().degree;
    let mut out = Vec::new();
    for (nus, n) in cartesian(&options) {
        let tors: BTreeMap<ClosedPoint, Partition> = pts.iter().cloned().zip(nus).collect();
        let t = SheafIso::new(Vec::new(), tors);
        let c = total - t.torsion_degree() as i32;
        if n % aut_a != 0 {
            return Err(OracleError::Internal(format!("surjection count {n} not divisible by |Aut {a}| = {aut_a}")));
        }
        out.push((SheafIso::line(c).direct_sum(&t), n / aut_a));
    }
    Ok(out)
}

/// Number of subsheaves `G <= C` with `G ~ B` and `C/G ~ A`.
pub fn hall_number(c: &SheafIso, a: &SheafIso, b: &SheafIso, q: u32) -> Result<u128, OracleError> {
    let (ca, cb) = (a.class(), b.class());
    if c.class() != KClass::new(ca.rank + cb.rank, ca.degree + cb.degree) {
        return Ok(0);
    }
    Ok(extensions(a, b, q)?.into_iter().find(|(x, _)| x == c).map_or(0, |(_, n)| n))
}

/// Which factor of a product is the quotient, and the Euler-form twist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Twist {
    /// `+1` or `-1`.
    pub sign: i32,
    /// Arguments of the Euler form: `true` for `<quotient, sub>`.
    pub quotient_first: bool,
}

impl Twist {
    pub fn exponent(&self, quotient: KClass, sub: KClass) -> i32 {
        let e = if self.quotient_first { euler_form(quotient, sub) } else { euler_form(sub, quotient) };
        self.sign * e
    }

    pub fn candidates() -> Vec<Twist> {
        let mut out = Vec::new();
        for sign in [-1, 1] {
            for quotient_first in [true, false] {
                out.push(Twist { sign, quotient_first });
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductConvention {
    /// The left factor of `f * g` is evaluated on the quotient.
    pub left_is_quotient: bool,
    pub twist: Twist,
}

impl ProductConvention {
    pub fn candidates() -> Vec<ProductConvention> {
        let mut out = Vec::new();
        for left_is_quotient in [true, false] {
            for twist in Twist::candidates() {
                out.push(ProductConvention { left_is_quotient, twist });
            }
        }
        out
    }
}

/// `v^e` as an element of the value ring: a rational constant for square
/// `q`, a formal power otherwise.
pub fn v_power(q: u32, e: i32) -> LaurentRat {
    match sqrt_exact(q) {
        Some(r) => {
            let v = BigRational::new(1.into(), (r as i64).into());
            LaurentRat::constant(pow_rat(&v, e))
        }
        None => LaurentRat::v_pow(e),
    }
}

/// Normal form in `Q(v)` with `v^2 = 1/q`: a rational constant for square
/// `q`, otherwise `a + b v`. Evaluation at `v = q^{-1/2}` is injective on
/// normal forms.
pub fn normalize_value(q: u32, c: &LaurentRat) -> LaurentRat {
    let qr = BigRational::from_integer((q as i64).into());
    if let Some(r) = sqrt_exact(q) {
        let v = BigRational::new(1.into(), (r as i64).into());
        return LaurentRat::constant(c.specialize(&v).unwrap_or_else(|_| BigRational::zero()));
    }
    let (mut a, mut b) = (BigRational::zero(), BigRational::zero());
    for (e, x) in c.terms() {
        // v^e = q^{-floor(e/2)} v^{e mod 2}
        let k = e.div_euclid(2);
        let w = x * pow_rat(&qr, -k);
        if e.rem_euclid(2) == 0 {
            a += w;
        } else {
            b += w;
        }
    }
    LaurentRat::from_terms([(0, a), (1, b)])
}

/// Inverse of a nonzero normal form.
pub fn invert_value(q: u32, c: &LaurentRat) -> Option<LaurentRat> {
    let c = normalize_value(q, c);
    if c.is_zero() {
        return None;
    }
    let (a, b) = (c.coeff(0), c.coeff(1));
    let qr = BigRational::from_integer((q as i64).into());
    let n = &a * &a - &b * &b / &qr;
    Some(LaurentRat::from_terms([(0, &a / &n), (1, -(&b / &n))]))
}

fn pow_rat(x: &BigRational, e: i32) -> BigRational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn sqrt_exact(q: u32) -> Option<u32> {
    (1..=q).find(|r| r * r == q)
}

/// A function on isomorphism classes of one K-class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallFn {
    pub q: u32,
    pub class: KClass,
    pub values: BTreeMap<SheafIso, LaurentRat>,
}

impl HallFn {
    pub fn zero(q: u32, class: KClass) -> Self {
        HallFn { q, class, values: BTreeMap::new() }
    }

    pub fn unit(q: u32) -> Self {
        HallFn::delta(q, SheafIso::zero(), LaurentRat::one())
    }

    pub fn delta(q: u32, s: SheafIso, c: LaurentRat) -> Self {
        let class = s.class();
        let mut f = HallFn::zero(q, class);
        f.add_value(s, &c);
        f
    }

    pub fn get(&self, s: &SheafIso) -> LaurentRat {
        self.values.get(s).cloned().unwrap_or_else(LaurentRat::zero)
    }

    pub fn add_value(&mut self, s: SheafIso, c: &LaurentRat) {
        assert_eq!(s.class(), self.class, "value outside the class");
        let e = self.values.entry(s).or_insert_with(LaurentRat::zero);
        *e = normalize_value(self.q, &(&*e + c));
        if e.is_zero() {
            self.values.retain(|_, c| !c.is_zero());
        }
    }

    pub fn support(&self) -> impl Iterator<Item = &SheafIso> {
        self.values.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&self, other: &HallFn) -> HallFn {
        assert_eq!((self.q, self.class), (other.q, other.class), "mismatched Hall functions");
        let mut out = self.clone();
        for (s, c) in &other.values {
            out.add_value(s.clone(), c);
        }
        out
    }

    /// The single value taken on every sheaf of `sheaves`, if nonzero and common.
    pub fn constant_on(&self, sheaves: &[SheafIso]) -> Option<LaurentRat> {
        let first = self.get(sheaves.first()?);
        (!first.is_zero() && sheaves.iter().all(|s| self.get(s) == first)).then_some(first)
    }

    pub fn scale(&self, c: &LaurentRat) -> HallFn {
        let mut out = HallFn::zero(self.q, self.class);
        for (s, x) in &self.values {
            out.add_value(s.clone(), &(x * c));
        }
        out
    }

    pub fn sub(&self, other: &HallFn) -> HallFn {
        self.add(&other.scale(&-LaurentRat::one()))
    }

    /// Values at `v = q^{-1/2}`; needs a square `q`.
    pub fn specialize(&self) -> Result<BTreeMap<SheafIso, BigRational>, OracleError> {
        let r = sqrt_exact(self.q).ok_or_else(|| OracleError::Unsupported(format!("q = {} is not a square", self.q)))?;
        let v = BigRational::new(1.into(), (r as i64).into());
        let mut out = BTreeMap::new();
        for (s, c) in &self.values {
            let x = c.specialize(&v).map_err(|e| OracleError::Internal(e.to_string()))?;
            if !x.is_zero() {
                out.insert(s.clone(), x);
            }
        }
        Ok(out)
    }
}

/// `(f * g)(C) = sum v^{twist} f(.) g(.) g^C_{quotient, sub}`.
pub fn hall_product(f: &HallFn, g: &HallFn, conv: &ProductConvention) -> Result<HallFn, OracleError> {
    if f.q != g.q {
        return Err(OracleError::Unsupported("Hall functions over different fields".into()));
    }
    let q = f.q;
    let mut out = HallFn::zero(q, KClass::new(f.class.rank + g.class.rank, f.class.degree + g.class.degree));
    for (x, fx) in &f.values {
        for (y, gy) in &g.values {
            let (quot, sub) = if conv.left_is_quotient { (x, y) } else { (y, x) };
            let tw = v_power(q, conv.twist.exponent(quot.class(), sub.class()));
            let w = &(fx * gy) * &tw;
            for (c, n) in extensions(quot, sub, q)? {
                out.add_value(c, &w.scale(&BigRational::from_integer((n as i64).into())));
            }
        }
    }
    Ok(out)
}

/// A function on pairs `(A, B)`, `A` the quotient factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoproductFn {
    pub q: u32,
    pub values: BTreeMap<(SheafIso, SheafIso), LaurentRat>,
}

impl CoproductFn {
    pub fn new(q: u32) -> Self {
        CoproductFn { q, values: BTreeMap::new() }
    }

    pub fn add_value(&mut self, a: SheafIso, b: SheafIso, c: &LaurentRat) {
        let e = self.values.entry((a, b)).or_insert_with(LaurentRat::zero);
        *e = normalize_value(self.q, &(&*e + c));
        if e.is_zero() {
            self.values.retain(|_, c| !c.is_zero());
        }
    }

    /// Adds `f (x) g`.
    pub fn add_tensor(&mut self, f: &HallFn, g: &HallFn) {
        for (a, x) in &f.values {
            for (b, y) in &g.values {
                self.add_value(a.clone(), b.clone(), &(x * y));
            }
        }
    }

    pub fn sub(&self, other: &CoproductFn) -> CoproductFn {
        let mut out = self.clone();
        for ((a, b), c) in &other.values {
            out.add_value(a.clone(), b.clone(), &-c.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Components whose quotient factor has torsion degree at most `bound`.
    pub fn truncated(&self, bound: u32) -> CoproductFn {
        let values = self.values.iter().filter(|((a, _), _)| a.torsion_degree() <= bound).map(|(k, v)| (k.clone(), v.clone())).collect();
        CoproductFn { q: self.q, values }
    }
}

/// Subsheaf candidates of a torsion module: per point, every type of size
/// at most the given one.
fn sub_torsion_candidates(t: &SheafIso) -> Vec<SheafIso> {
    let pts: Vec<&ClosedPoint> = t.torsion().keys().collect();
    let options: Vec<Vec<(Partition, u128)>> = pts
        .iter()
        .map(|x| {
            let n = t.torsion_at(x).map_or(0, |l| l.size());
            (0..=n).flat_map(partitions_of).map(|p| (p, 1)).collect()
        })
        .collect();
    cartesian(&options)
        .into_iter()
        .map(|(ps, _)| SheafIso::new(Vec::new(), pts.iter().map(|x| (*x).clone()).zip(ps).collect()))
        .collect()
}

/// `Delta(f)(A, B) = v^{twist} sum_C f(C) g^C_{A,B} |Aut A| |Aut B| / |Aut C|`,
/// for `f` supported in rank at most one, keeping quotients `A` whose
/// torsion degree is at most `bound`.
pub fn green_coproduct(f: &HallFn, twist: &Twist, bound: u32) -> Result<CoproductFn, OracleError> {
    let q = f.q;
    let mut out = CoproductFn::new(q);
    for (c, fc) in &f.values {
        if c.rank() > 1 {
            return Err(OracleError::Unsupported(format!("coproduct of {c}")));
        }
        let mut pairs: Vec<(SheafIso, SheafIso)> = vec![(c.clone(), SheafIso::zero())];
        let subs = sub_torsion_candidates(&c.torsion_part());
        // Torsion quotients: B has the rank of C and torsion inside T_C.
        for k in 0..=bound {
            for a in torsion_sheaves(q, k, k as usize)? {
                if c.rank() == 0 {
                    for tb in &subs {
                        pairs.push((a.clone(), tb.clone()));
                    }
                    continue;
                }
                for tb in &subs {
                    let d = c.class().degree - k as i32 - tb.torsion_degree() as i32;
                    pairs.push((a.clone(), SheafIso::line(d).direct_sum(tb)));
                }
            }
        }
        // Torsion subs of a rank-one C: the quotient keeps the bundle part.
        if c.rank() == 1 {
            for tb in subs.iter().filter(|s| !s.is_zero()) {
                for ta in sub_torsion_candidates(&c.torsion_part()) {
                    if ta.torsion_degree() + tb.torsion_degree() == c.torsion_degree() {
                        pairs.push((c.vb_part().direct_sum(&ta), tb.clone()));
                    }
                }
            }
        }
        pairs.sort();
        pairs.dedup();
        let aut_c = BigRational::from_integer((aut_count(c, q) as i64).into());
        for (a, b) in pairs {
            if a.torsion_degree() > bound {
                continue;
            }
            let n = hall_number(c, &a, &b, q)?;
            if n == 0 {
                continue;
            }
            let w = BigRational::from_integer(((n * aut_count(&a, q) * aut_count(&b, q)) as i64).into()) / &aut_c;
            let tw = v_power(q, twist.exponent(a.class(), b.class()));
            out.add_value(a, b, &(&(fc * &tw)).scale(&w));
        }
    }
    Ok(out)
}

/// Hall number of Jordan-type modules at a rational point, for comparison
/// with the classical Hall polynomials.
pub fn jordan_hall_number(q: u32, nu: &Partition, lambda: &Partition, mu: &Partition) -> u128 {
    local_hall_number(q, 1, nu, lambda, mu)
}
