//! Dimension vectors, multisegments and nilpotent representations.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::QuiverError;
use crate::ff::{self, Field, Mat};

/// Dimension vector on the vertices `1..=n` (stored at indices `0..n`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CyclicDim {
    pub n: usize,
    pub dims: Vec<u32>,
}

impl CyclicDim {
    pub fn new(dims: Vec<u32>) -> Result<Self, QuiverError> {
        if dims.is_empty() {
            return Err(QuiverError::Shape("a cyclic quiver needs at least one vertex".into()));
        }
        Ok(CyclicDim { n: dims.len(), dims })
    }

    pub fn zero(n: usize) -> Self {
        CyclicDim { n, dims: vec![0; n] }
    }

    /// `epsilon_i` for a vertex `i` in `1..=n`.
    pub fn simple(n: usize, i: usize) -> Self {
        let mut d = Self::zero(n);
        d.dims[(i - 1) % n] = 1;
        d
    }

    /// `(r, ..., r)`.
    pub fn delta(n: usize, r: u32) -> Self {
        CyclicDim { n, dims: vec![r; n] }
    }

    pub fn total(&self) -> u32 {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }

    pub fn add(&self, o: &Self) -> Self {
        CyclicDim { n: self.n, dims: self.dims.iter().zip(&o.dims).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, k: u32) -> Self {
        CyclicDim { n: self.n, dims: self.dims.iter().map(|a| a * k).collect() }
    }

    pub fn checked_sub(&self, o: &Self) -> Option<Self> {
        let dims = self.dims.iter().zip(&o.dims).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>()?;
        Some(CyclicDim { n: self.n, dims })
    }

    /// All `d'` with `0 <= d' <= self` componentwise.
    pub fn below(&self) -> Vec<CyclicDim> {
        let mut out = vec![Vec::new()];
        for &d in &self.dims {
            out = out.into_iter().flat_map(|v: Vec<u32>| (0..=d).map(move |k| [v.clone(), vec![k]].concat())).collect();
        }
        out.into_iter().map(|dims| CyclicDim { n: self.n, dims }).collect()
    }
}

/// `{a, b} = sum a_i b_i - sum a_i b_{i+1}`.
pub fn bracket(a: &CyclicDim, b: &CyclicDim) -> i32 {
    let n = a.n;
    (0..n).map(|i| (a.dims[i] * b.dims[i]) as i32 - (a.dims[i] * b.dims[(i + 1) % n]) as i32).sum()
}

/// Segment multiplicities `m_{i,l}`: a segment `(i, l)` has its top at
/// vertex `i` and occupies `i, i - 1, ..., i - l + 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multisegment {
    n: usize,
    mult: BTreeMap<(usize, u32), u32>,
}

impl Multisegment {
    pub fn empty(n: usize) -> Self {
        Multisegment { n, mult: BTreeMap::new() }
    }

    pub fn new(n: usize, entries: impl IntoIterator<Item = ((usize, u32), u32)>) -> Result<Self, QuiverError> {
        let mut m = Self::empty(n);
        for ((i, l), k) in entries {
            if i == 0 || i > n || l == 0 {
                return Err(QuiverError::Shape(format!("segment ({i}, {l}) on {n} vertices")));
            }
            if k > 0 {
                *m.mult.entry((i, l)).or_insert(0) += k;
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, l: u32) -> u32 {
        self.mult.get(&(i, l)).copied().unwrap_or(0)
    }

    pub fn segments(&self) -> impl Iterator<Item = ((usize, u32), u32)> + '_ {
        self.mult.iter().map(|(&k, &m)| (k, m))
    }

    pub fn is_empty(&self) -> bool {
        self.mult.is_empty()
    }

    fn vertex(&self, top: usize, p: u32) -> usize {
        ((top - 1) as i64 - p as i64).rem_euclid(self.n as i64) as usize
    }

    pub fn dim(&self) -> CyclicDim {
        let mut d = CyclicDim::zero(self.n);
        for (&(i, l), &m) in &self.mult {
            for p in 0..l {
                d.dims[self.vertex(i, p)] += m;
            }
        }
        d
    }

    /// `d_i^k`: the dimension of the kernel of the length-`k` path out of
    /// vertex `i` (1-based).
    pub fn kernel_dim(&self, i: usize, k: u32) -> u32 {
        let mut s = 0;
        for (&(j, l), &m) in &self.mult {
            for p in 0..l {
                if self.vertex(j, p) == i - 1 && l - p <= k {
                    s += m;
                }
            }
        }
        s
    }

    /// Inverse of [`Multisegment::kernel_dim`]; `d[i][k]` for `k = 0..` must
    /// have stabilized by its last entry.
    pub fn from_kernel_dims(d: &[Vec<u32>]) -> Result<Self, QuiverError> {
        let n = d.len();
        let len = d[0].len();
        let at = |i: usize, k: usize| -> i64 { d[i % n][k.min(len - 1)] as i64 };
        let mut m = Self::empty(n);
        for i in 0..n {
            for l in 1..len {
                let x = at(i, l) - at(i, l - 1) + at(i + 1, l) - at(i + 1, l + 1);
                if x < 0 {
                    return Err(QuiverError::Internal("negative segment multiplicity".into()));
                }
                if x > 0 {
                    m.mult.insert((i + 1, l as u32), x as u32);
                }
            }
        }
        Ok(m)
    }

    /// For every length some vertex carries no segment of that length.
    pub fn is_aperiodic(&self) -> bool {
        let lengths: std::collections::BTreeSet<u32> = self.mult.keys().map(|k| k.1).collect();
        lengths.into_iter().all(|t| (1..=self.n).any(|i| self.get(i, t) == 0))
    }

    /// The orbit with `x_2, ..., x_n` invertible and cycle type `lambda`.
    pub fn cycle_orbit(n: usize, lambda: &crate::symfunc::Partition) -> Self {
        let mut m = Self::empty(n);
        for &part in lambda.parts() {
            *m.mult.entry((n, part * n as u32)).or_insert(0) += 1;
        }
        m
    }

    /// Every multisegment of the given dimension.
    pub fn all_of_dim(d: &CyclicDim) -> Vec<Multisegment> {
        let n = d.n;
        let kinds: Vec<(usize, u32)> = (1..=n).flat_map(|i| (1..=d.total()).map(move |l| (i, l))).collect();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(
            n: usize,
            kinds: &[(usize, u32)],
            k: usize,
            rest: &mut Vec<u32>,
            cur: &mut Vec<((usize, u32), u32)>,
            out: &mut Vec<Multisegment>,
        ) {
            if rest.iter().all(|&r| r == 0) {
                out.push(Multisegment::new(n, cur.iter().cloned()).expect("valid segments"));
                return;
            }
            if k == kinds.len() {
                return;
            }
            let (i, l) = kinds[k];
            let cover: Vec<usize> = (0..l).map(|p| ((i - 1) as i64 - p as i64).rem_euclid(n as i64) as usize).collect();
            let mut m = 0;
            loop {
                rec(n, kinds, k + 1, rest, cur, out);
                let fits = {
                    let mut need = vec![0u32; n];
                    for &v in &cover {
                        need[v] += 1;
                    }
                    (0..n).all(|v| rest[v] >= need[v])
                };
                if !fits {
                    break;
                }
                for &v in &cover {
                    rest[v] -= 1;
                }
                m += 1;
                cur.push(((i, l), 1));
            }
            for _ in 0..m {
                cur.pop();
            }
            for &v in &cover {
                rest[v] += m;
            }
        }
        rec(n, &kinds, 0, &mut d.dims.clone(), &mut cur, &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for Multisegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, (&(i, l), &m)) in self.mult.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({i},{l})")?;
            if m > 1 {
                write!(f, "^{m}")?;
            }
        }
        write!(f, "]")
    }
}

impl Serialize for Multisegment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[u32; 3]> = self.mult.iter().map(|(&(i, l), &m)| [i as u32, l, m]).collect();
        (self.n, v).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Multisegment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (n, v): (usize, Vec<[u32; 3]>) = Deserialize::deserialize(d)?;
        Multisegment::new(n, v.into_iter().map(|[i, l, m]| ((i as usize, l), m))).map_err(serde::de::Error::custom)
    }
}

/// A representation `x_i : V_i -> V_{i-1}` over `F_q`; `maps[i - 1]` is
/// `x_i` as a `dims[i-2] x dims[i-1]` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilRep {
    pub q: u32,
    pub dim: CyclicDim,
    pub maps: Vec<Mat>,
}

impl NilRep {
    pub fn new(q: u32, dim: CyclicDim, maps: Vec<Mat>) -> Result<Self, QuiverError> {
        Field::get(q)?;
        let n = dim.n;
        if maps.len() != n {
            return Err(QuiverError::Shape(format!("{} maps for {n} vertices", maps.len())));
        }
        for (i, m) in maps.iter().enumerate() {
            let (rows, cols) = (dim.dims[(i + n - 1) % n] as usize, dim.dims[i] as usize);
            if m.len() != rows || m.iter().any(|r| r.len() != cols) || m.iter().flatten().any(|&x| x as u32 >= q) {
                return Err(QuiverError::Shape(format!("x_{} must be a {rows} x {cols} matrix over F_{q}", i + 1)));
            }
        }
        let r = NilRep { q, dim, maps };
        if !r.is_nilpotent() {
            return Err(QuiverError::NotNilpotent);
        }
        Ok(r)
    }

    fn field(&self) -> &'static Field {
        Field::get(self.q).expect("checked at construction")
    }

    /// The standard representation of a multisegment.
    pub fn from_multisegment(q: u32, m: &Multisegment) -> Result<Self, QuiverError> {
        Field::get(q)?;
        let n = m.n();
        let dim = m.dim();
        let mut maps: Vec<Mat> = (0..n)
            .map(|i| vec![vec![0u8; dim.dims[i] as usize]; dim.dims[(i + n - 1) % n] as usize])
            .collect();
        let mut next = vec![0usize; n];
        for ((top, l), k) in m.segments() {
            for _ in 0..k {
                let pos: Vec<(usize, usize)> = (0..l)
                    .map(|p| {
                        let v = ((top - 1) as i64 - p as i64).rem_euclid(n as i64) as usize;
                        next[v] += 1;
                        (v, next[v] - 1)
                    })
                    .collect();
                for w in pos.windows(2) {
                    let ((v, a), (_, b)) = (w[0], w[1]);
                    maps[v][b][a] = 1;
                }
            }
        }
        Ok(NilRep { q, dim, maps })
    }

    /// Images of `vecs` (vectors in `V_i`, 0-based `i`) under `x`.
    pub(crate) fn apply(&self, i: usize, vecs: &[Vec<u8>]) -> Vec<Vec<u8>> {
        let n = self.dim.n;
        let rows = self.dim.dims[(i + n - 1) % n] as usize;
        vecs.iter()
            .map(|v| if rows == 0 { Vec::new() } else { ff::mat_vec(self.field(), &self.maps[i], v) })
            .collect()
    }

    fn basis(&self, i: usize) -> Vec<Vec<u8>> {
        ff::identity(self.dim.dims[i] as usize)
    }

    /// Upper bound on the length of a nonzero path.
    pub(crate) fn path_bound(&self) -> u32 {
        self.dim.total() + 1
    }

    pub fn is_nilpotent(&self) -> bool {
        let n = self.dim.n;
        (0..n).all(|i| {
            let mut v = self.basis(i);
            let mut at = i;
            for _ in 0..self.path_bound() {
                v = self.apply(at, &v);
                at = (at + n - 1) % n;
            }
            v.iter().flatten().all(|&x| x == 0)
        })
    }

    /// Orbit invariant computed from kernel dimensions of paths.
    pub fn orbit(&self) -> Multisegment {
        let f = self.field();
        let n = self.dim.n;
        let bound = self.path_bound() as usize + 1;
        let d: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut out = vec![0u32];
                let mut v = self.basis(i);
                let mut at = i;
                for _ in 1..=bound {
                    v = self.apply(at, &v);
                    at = (at + n - 1) % n;
                    out.push(self.dim.dims[i] - ff::rank(f, &v) as u32);
                }
                out
            })
            .collect();
        Multisegment::from_kernel_dims(&d).expect("kernel dimensions of a representation")
    }

    /// Base change `x_i -> g_{i-1} x_i g_i^{-1}`.
    pub fn conjugate(&self, g: &[Mat]) -> Result<NilRep, QuiverError> {
        let f = self.field();
        let n = self.dim.n;
        let inv: Vec<Mat> = g.iter().map(|m| invert(f, m).ok_or(QuiverError::Shape("singular base change".into()))).collect::<Result<_, _>>()?;
        let maps = (0..n)
            .map(|i| {
                let (r, c) = (self.dim.dims[(i + n - 1) % n], self.dim.dims[i]);
                if r == 0 || c == 0 {
                    return self.maps[i].clone();
                }
                ff::mat_mul(f, &ff::mat_mul(f, &g[(i + n - 1) % n], &self.maps[i]), &inv[i])
            })
            .collect();
        NilRep::new(self.q, self.dim.clone(), maps)
    }
}

fn invert(f: &Field, m: &Mat) -> Option<Mat> {
    let n = m.len();
    let aug: Vec<Vec<u8>> = m.iter().enumerate().map(|(i, r)| [r.clone(), ff::identity(n)[i].clone()].concat()).collect();
    let (red, piv) = ff::rref(f, &aug);
    if red.len() < n || piv.iter().take(n).enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::Partition;

    fn ms(n: usize, e: &[(usize, u32, u32)]) -> Multisegment {
        Multisegment::new(n, e.iter().map(|&(i, l, m)| ((i, l), m))).unwrap()
    }

    #[test]
    fn orbit_examples() {
        let d = CyclicDim::new(vec![1, 1]).unwrap();
        let r = NilRep::new(2, d, vec![vec![vec![0]], vec![vec![0]]]).unwrap();
        assert_eq!(r.orbit(), ms(2, &[(1, 1, 1), (2, 1, 1)]));
        let j = NilRep::new(2, CyclicDim::new(vec![2]).unwrap(), vec![vec![vec![0, 0], vec![1, 0]]]).unwrap();
        assert_eq!(j.orbit(), ms(1, &[(1, 2, 1)]));
        let z = NilRep::new(3, CyclicDim::zero(3), vec![vec![], vec![], vec![]]).unwrap();
        assert!(z.orbit().is_empty());
    }

    #[test]
    fn non_nilpotent_is_rejected() {
        let d = CyclicDim::new(vec![1]).unwrap();
        assert_eq!(NilRep::new(2, d, vec![vec![vec![1]]]), Err(QuiverError::NotNilpotent));
    }

    #[test]
    fn aperiodicity_examples() {
        assert!(!ms(2, &[(1, 1, 1), (2, 1, 1)]).is_aperiodic());
        assert!(ms(2, &[(1, 1, 1)]).is_aperiodic());
        assert!(Multisegment::empty(2).is_aperiodic());
    }

    #[test]
    fn standard_representations_round_trip() {
        for n in 1..=3 {
            for d in CyclicDim::delta(n, 2).below() {
                for m in Multisegment::all_of_dim(&d) {
                    let r = NilRep::from_multisegment(3, &m).unwrap();
                    assert!(r.is_nilpotent());
                    assert_eq!(r.orbit(), m);
                    assert_eq!(m.dim(), d);
                    let d = (1..=n).map(|j| (0..8).map(|k| m.kernel_dim(j, k)).collect()).collect::<Vec<_>>();
                    assert_eq!(Multisegment::from_kernel_dims(&d).unwrap(), m);
                }
            }
        }
    }

    #[test]
    fn orbit_counts() {
        // n = 1: orbits of dimension 3 are partitions of 3.
        assert_eq!(Multisegment::all_of_dim(&CyclicDim::new(vec![3]).unwrap()).len(), 3);
        // n = 2, (1, 1): two simples, or one of the two length-2 segments.
        assert_eq!(Multisegment::all_of_dim(&CyclicDim::new(vec![1, 1]).unwrap()).len(), 3);
    }

    #[test]
    fn cycle_orbit_has_invertible_arrows() {
        let m = Multisegment::cycle_orbit(3, &Partition::new(vec![2, 1]));
        assert_eq!(m.dim(), CyclicDim::delta(3, 3));
        let r = NilRep::from_multisegment(2, &m).unwrap();
        let f = Field::get(2).unwrap();
        assert!(ff::is_invertible(f, &r.maps[1]) && ff::is_invertible(f, &r.maps[2]));
    }
}
