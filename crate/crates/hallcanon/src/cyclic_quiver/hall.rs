//! Brute-force Hall product and coproduct on orbit functions.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rep::{bracket, CyclicDim, Multisegment, NilRep};
use super::QuiverError;
use crate::cohp1_oracle::{normalize_value, v_power};
use crate::exactalg::LaurentRat;
use crate::ff::{self, Field};

/// A function on the orbits of one dimension vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitFn {
    pub q: u32,
    pub dims: CyclicDim,
    pub values: BTreeMap<Multisegment, LaurentRat>,
}

impl OrbitFn {
    pub fn zero(q: u32, dims: CyclicDim) -> Self {
        OrbitFn { q, dims, values: BTreeMap::new() }
    }

    pub fn unit(q: u32, n: usize) -> Self {
        Self::delta(q, Multisegment::empty(n), LaurentRat::one())
    }

    pub fn delta(q: u32, m: Multisegment, c: LaurentRat) -> Self {
        let mut f = Self::zero(q, m.dim());
        f.add_value(m, &c);
        f
    }

    pub fn get(&self, m: &Multisegment) -> LaurentRat {
        self.values.get(m).cloned().unwrap_or_else(LaurentRat::zero)
    }

    pub fn add_value(&mut self, m: Multisegment, c: &LaurentRat) {
        let e = self.values.entry(m.clone()).or_insert_with(LaurentRat::zero);
        *e = normalize_value(self.q, &(&*e + c));
        if e.is_zero() {
            self.values.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.values {
            out.add_value(m.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: &LaurentRat) -> Self {
        let mut out = Self::zero(self.q, self.dims.clone());
        for (m, x) in &self.values {
            out.add_value(m.clone(), &(x * c));
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&LaurentRat::from_int(-1)))
    }
}

/// A function on pairs (quotient orbit, sub orbit).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitPairFn {
    pub q: u32,
    pub values: BTreeMap<(Multisegment, Multisegment), LaurentRat>,
}

impl OrbitPairFn {
    pub fn tensor(f: &OrbitFn, g: &OrbitFn) -> Self {
        let mut values = BTreeMap::new();
        for (a, x) in &f.values {
            for (b, y) in &g.values {
                let c = normalize_value(f.q, &(x * y));
                if !c.is_zero() {
                    values.insert((a.clone(), b.clone()), c);
                }
            }
        }
        OrbitPairFn { q: f.q, values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// `c` with `self = c * other`, when such a constant exists.
    pub fn ratio(&self, other: &Self) -> Option<LaurentRat> {
        let (k, x) = self.values.iter().next()?;
        let y = other.values.get(k)?;
        let c = normalize_value(self.q, &(x * &crate::cohp1_oracle::invert_value(self.q, y)?));
        let same = self.values.len() == other.values.len()
            && other.values.iter().all(|(k, y)| self.values.get(k).is_some_and(|x| normalize_value(self.q, &(y * &c)) == *x));
        same.then_some(c)
    }
}

/// Which factor lives on the subrepresentation, and the sign `s` of the
/// twist `v^{s {d_left, d_right}}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverConvention {
    pub left_on_sub: bool,
    pub sign: i32,
}

impl QuiverConvention {
    /// `q^{{d', d''}/2}` with the left factor on the subrepresentation.
    pub const LITERAL: QuiverConvention = QuiverConvention { left_on_sub: true, sign: -1 };

    pub fn candidates() -> [QuiverConvention; 4] {
        [
            Self::LITERAL,
            QuiverConvention { left_on_sub: true, sign: 1 },
            QuiverConvention { left_on_sub: false, sign: -1 },
            QuiverConvention { left_on_sub: false, sign: 1 },
        ]
    }
}

type CensusKey = (u32, Multisegment, CyclicDim);
type Census = Arc<BTreeMap<(Multisegment, Multisegment), u128>>;

/// Counts of subrepresentations of dimension `sub` of the standard
/// representation of `m`, by (sub orbit, quotient orbit).
pub fn subrep_census(q: u32, m: &Multisegment, sub: &CyclicDim) -> Result<Census, QuiverError> {
    static C: OnceLock<Mutex<HashMap<CensusKey, Census>>> = OnceLock::new();
    let key = (q, m.clone(), sub.clone());
    let cache = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("cache poisoned").get(&key) {
        return Ok(v.clone());
    }
    let rep = NilRep::from_multisegment(q, m)?;
    let f = Field::get(q)?;
    let n = rep.dim.n;
    let choices: Vec<Vec<ff::Mat>> = (0..n).map(|i| ff::subspaces(f, rep.dim.dims[i] as usize, sub.dims[i] as usize)).collect();
    let stable = |i: usize, s: &ff::Mat, target: &ff::Mat| rep.apply(i, s).iter().all(|w| ff::span_contains(f, target, w));
    // Chosen subspaces for vertices 0..=i; x_i must map V'_i into V'_{i-1}.
    let mut out = BTreeMap::new();
    let mut chosen: Vec<ff::Mat> = Vec::with_capacity(n);
    fn rec(
        i: usize,
        n: usize,
        choices: &[Vec<ff::Mat>],
        chosen: &mut Vec<ff::Mat>,
        stable: &dyn Fn(usize, &ff::Mat, &ff::Mat) -> bool,
        visit: &mut dyn FnMut(&[ff::Mat]),
    ) {
        if i == n {
            if stable(0, &chosen[0], &chosen[n - 1]) {
                visit(chosen);
            }
            return;
        }
        for s in &choices[i] {
            if i > 0 && !stable(i, s, &chosen[i - 1]) {
                continue;
            }
            chosen.push(s.clone());
            rec(i + 1, n, choices, chosen, stable, visit);
            chosen.pop();
        }
    }
    let mut visit = |subs: &[ff::Mat]| {
        let key = (sub_orbit(&rep, subs), quotient_orbit(&rep, subs));
        *out.entry(key).or_insert(0u128) += 1;
    };
    rec(0, n, &choices, &mut chosen, &stable, &mut visit);
    let v = Arc::new(out);
    Ok(cache.lock().expect("cache poisoned").entry(key).or_insert(v).clone())
}

fn path_dims(rep: &NilRep, start: &[Vec<Vec<u8>>], modulo: Option<&[ff::Mat]>) -> Vec<Vec<u32>> {
    let f = Field::get(rep.q).expect("valid field");
    let n = rep.dim.n;
    let bound = rep.path_bound() as usize + 1;
    (0..n)
        .map(|i| {
            let total = start[i].len() as u32;
            // The empty path has kernel V'_i in V_i.
            let mut out = vec![modulo.map_or(0, |m| m[i].len() as u32)];
            let mut v = start[i].clone();
            let mut at = i;
            for _ in 1..=bound {
                v = rep.apply(at, &v);
                at = (at + n - 1) % n;
                let r = match modulo {
                    None => ff::rank(f, &v),
                    Some(m) => {
                        let mut rows = v.clone();
                        rows.extend(m[at].iter().cloned());
                        ff::rank(f, &rows) - m[at].len()
                    }
                };
                out.push(total - r as u32);
            }
            out
        })
        .collect()
}

fn sub_orbit(rep: &NilRep, subs: &[ff::Mat]) -> Multisegment {
    Multisegment::from_kernel_dims(&path_dims(rep, subs, None)).expect("subrepresentation")
}

fn quotient_orbit(rep: &NilRep, subs: &[ff::Mat]) -> Multisegment {
    let basis: Vec<Vec<Vec<u8>>> = rep.dim.dims.iter().map(|&d| ff::identity(d as usize)).collect();
    let d = path_dims(rep, &basis, Some(subs));
    let d: Vec<Vec<u32>> = d.into_iter().zip(subs).map(|(row, s)| row.into_iter().map(|x| x - s.len() as u32).collect()).collect();
    Multisegment::from_kernel_dims(&d).expect("quotient representation")
}

/// Hall algebra of nilpotent representations of the cyclic quiver on
/// `n` vertices over `F_q`.
#[derive(Clone, Debug)]
pub struct CyclicHall {
    pub q: u32,
    pub n: usize,
    pub conv: QuiverConvention,
    /// Largest total dimension enumerated.
    pub budget: u32,
}

impl CyclicHall {
    pub fn new(q: u32, n: usize, conv: QuiverConvention) -> Result<Self, QuiverError> {
        Field::get(q)?;
        if n == 0 {
            return Err(QuiverError::Shape("a cyclic quiver needs at least one vertex".into()));
        }
        Ok(CyclicHall { q, n, conv, budget: default_budget(q) })
    }

    pub fn with_budget(mut self, budget: u32) -> Self {
        self.budget = budget;
        self
    }

    fn check_budget(&self, d: &CyclicDim) -> Result<(), QuiverError> {
        if d.total() > self.budget {
            return Err(QuiverError::Budget(format!("total dimension {} exceeds {}", d.total(), self.budget)));
        }
        Ok(())
    }

    pub fn unit(&self) -> OrbitFn {
        OrbitFn::unit(self.q, self.n)
    }

    pub fn product(&self, f: &OrbitFn, g: &OrbitFn) -> Result<OrbitFn, QuiverError> {
        let d = f.dims.add(&g.dims);
        self.check_budget(&d)?;
        let (sub_fn, quot_fn) = if self.conv.left_on_sub { (f, g) } else { (g, f) };
        let tw = v_power(self.q, self.conv.sign * bracket(&f.dims, &g.dims));
        let targets = Multisegment::all_of_dim(&d);
        let rows: Vec<(Multisegment, LaurentRat)> = targets
            .into_par_iter()
            .map(|x| -> Result<_, QuiverError> {
                let mut s = LaurentRat::zero();
                for ((a, b), &cnt) in subrep_census(self.q, &x, &sub_fn.dims)?.iter() {
                    let (fa, gb) = (sub_fn.get(a), quot_fn.get(b));
                    if !fa.is_zero() && !gb.is_zero() {
                        s = &s + &(&fa * &gb).scale(&BigRational::from_integer((cnt as i64).into()));
                    }
                }
                Ok((x, s))
            })
            .collect::<Result<_, _>>()?;
        let mut out = OrbitFn::zero(self.q, d);
        for (x, s) in rows {
            out.add_value(x, &(&s * &tw));
        }
        Ok(out)
    }

    pub fn product_all(&self, fs: &[&OrbitFn]) -> Result<OrbitFn, QuiverError> {
        let mut acc = self.unit();
        for f in fs {
            acc = self.product(&acc, f)?;
        }
        Ok(acc)
    }

    /// `Delta_{d'', d'}(f) = v^{{d', d''}} kappa_! iota^* f` for the split
    /// with quotient `quot` and sub `d - quot`.
    pub fn coproduct(&self, f: &OrbitFn, quot: &CyclicDim) -> Result<OrbitPairFn, QuiverError> {
        self.check_budget(&f.dims)?;
        let sub = f.dims.checked_sub(quot).ok_or_else(|| QuiverError::Shape("split exceeds the dimension".into()))?;
        let field = Field::get(self.q)?;
        let tw = v_power(self.q, bracket(&sub, quot));
        let n = self.n;
        let pairs: Vec<(Multisegment, Multisegment)> = Multisegment::all_of_dim(quot)
            .into_iter()
            .flat_map(|a| Multisegment::all_of_dim(&sub).into_iter().map(move |b| (a.clone(), b)))
            .collect();
        let rows: Vec<((Multisegment, Multisegment), LaurentRat)> = pairs
            .into_par_iter()
            .map(|(a, b)| -> Result<_, QuiverError> {
                let (ra, rb) = (NilRep::from_multisegment(self.q, &a)?, NilRep::from_multisegment(self.q, &b)?);
                // x_i = [[b_i, phi_i], [0, a_i]] on V'_i + V''_i, phi_i : V''_i -> V'_{i-1}.
                let shape: Vec<(usize, usize)> = (0..n).map(|i| (sub.dims[(i + n - 1) % n] as usize, quot.dims[i] as usize)).collect();
                let free: usize = shape.iter().map(|(r, c)| r * c).sum();
                let mut s = LaurentRat::zero();
                for phi in ff::all_vectors(field, free) {
                    let mut o = 0;
                    let mut maps = Vec::with_capacity(n);
                    for i in 0..n {
                        let (r1, c2) = shape[i];
                        let (c1, r2) = (sub.dims[i] as usize, quot.dims[(i + n - 1) % n] as usize);
                        let mut m = vec![vec![0u8; c1 + c2]; r1 + r2];
                        for (r, row) in rb.maps[i].iter().enumerate() {
                            m[r][..c1].copy_from_slice(row);
                        }
                        for (r, row) in ra.maps[i].iter().enumerate() {
                            m[r1 + r][c1..].copy_from_slice(row);
                        }
                        for r in 0..r1 {
                            for c in 0..c2 {
                                m[r][c1 + c] = phi[o];
                                o += 1;
                            }
                        }
                        maps.push(m);
                    }
                    let rep = NilRep { q: self.q, dim: f.dims.clone(), maps };
                    s = &s + &f.get(&rep.orbit());
                }
                Ok(((a, b), normalize_value(self.q, &(&s * &tw))))
            })
            .collect::<Result<_, _>>()?;
        Ok(OrbitPairFn { q: self.q, values: rows.into_iter().filter(|(_, c)| !c.is_zero()).collect() })
    }
}

/// Default enumeration budget on the total dimension.
pub fn default_budget(q: u32) -> u32 {
    match q {
        2 => 6,
        3 => 5,
        4 => 4,
        _ => 3,
    }
}
