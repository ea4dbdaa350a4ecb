//! Torsion modules over the local ring at a closed point, as `F_q`-spaces
//! with the action of a uniformizer, and brute-force counts over them.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::ff::{self, mat_mul, Field, Mat, Poly};
use crate::symfunc::Partition;

/// The local model at a point of degree `d`: `z` for `d = 1`, otherwise the
/// first monic irreducible of degree `d`. The count only depends on `(q, d)`.
fn local_poly(f: &Field, d: usize) -> Poly {
    if d == 1 {
        vec![0, 1]
    } else {
        ff::monic_irreducibles(f, d)[0].clone()
    }
}

fn poly_pow(f: &Field, p: &Poly, k: u32) -> Poly {
    (0..k).fold(vec![1], |acc, _| ff::poly::mul(f, &acc, p))
}

fn block_diag(blocks: &[Mat]) -> Mat {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut m = vec![vec![0u8; n]; n];
    let mut o = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m[o + i][o + j] = x;
            }
        }
        o += b.len();
    }
    m
}

/// Action of `z` on `(+)_i F_q[z]/(p^{lambda_i})`.
pub(crate) fn module_matrix(f: &Field, p: &Poly, lambda: &Partition) -> Mat {
    let blocks: Vec<Mat> = lambda.parts().iter().map(|&k| ff::companion(f, &poly_pow(f, p, k))).collect();
    block_diag(&blocks)
}

fn transpose(a: &Mat, ncols: usize) -> Mat {
    (0..ncols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Basis of `{X : X A = B X}` for `X` of shape `rows(B) x rows(A)`.
pub(crate) fn intertwiners(f: &Field, a: &Mat, b: &Mat) -> Vec<Mat> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return Vec::new();
    }
    // Unknown X[i][j] at index i * n + j.
    let mut eqs = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let mut row = vec![0u8; m * n];
            for k in 0..n {
                row[i * n + k] = f.add(row[i * n + k], a[k][j]);
            }
            for k in 0..m {
                row[k * n + j] = f.sub(row[k * n + j], b[i][k]);
            }
            eqs.push(row);
        }
    }
    ff::kernel(f, &eqs, m * n)
        .into_iter()
        .map(|v| (0..m).map(|i| v[i * n..(i + 1) * n].to_vec()).collect())
        .collect()
}

/// All linear combinations of `basis` (each an `m x n` matrix).
fn span_elements<'a>(f: &'a Field, basis: &'a [Mat], m: usize, n: usize) -> impl Iterator<Item = Mat> + 'a {
    ff::all_vectors(f, basis.len()).map(move |c| {
        let mut x = vec![vec![0u8; n]; m];
        for (coef, b) in c.iter().zip(basis) {
            if *coef == 0 {
                continue;
            }
            for i in 0..m {
                for j in 0..n {
                    x[i][j] = f.add(x[i][j], f.mul(*coef, b[i][j]));
                }
            }
        }
        x
    })
}

/// Type of the submodule `ker X` of the module with `z`-matrix `za`.
fn kernel_type(f: &Field, x: &Mat, powers: &[Mat], n: usize, d: usize) -> Partition {
    // dim ker(X) cap ker(p(z)^k) = d * sum_i min(mu_i, k).
    let mut dims = vec![0usize];
    for pk in powers {
        let mut rows: Vec<Vec<u8>> = x.clone();
        rows.extend(pk.iter().cloned());
        dims.push(n - ff::rank(f, &rows));
    }
    let mut conj = Vec::new();
    for k in 1..dims.len() {
        let c = (dims[k] - dims[k - 1]) / d;
        if c == 0 {
            break;
        }
        conj.push(c as u32);
    }
    Partition::new(conj).conjugate()
}

type SurjKey = (u32, usize, Partition, Partition, bool);

/// For modules `T` (type `t`) and `A` (type `a`) at a point of degree `d`:
/// counts pairs `(s, psi)` with `s in A` (only `s = 0` unless `with_section`)
/// and `psi: T -> A` such that `O s + psi(T) = A`, by the type of `ker psi`.
pub(crate) fn local_surjections(q: u32, d: usize, t: &Partition, a: &Partition, with_section: bool) -> Arc<BTreeMap<Partition, u128>> {
    static C: OnceLock<Mutex<HashMap<SurjKey, Arc<BTreeMap<Partition, u128>>>>> = OnceLock::new();
    let key = (q, d, t.clone(), a.clone(), with_section);
    let map = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().expect("cache poisoned").get(&key) {
        return v.clone();
    }
    let v = Arc::new(local_surjections_raw(q, d, t, a, with_section));
    map.lock().expect("cache poisoned").entry(key).or_insert(v).clone()
}

fn local_surjections_raw(q: u32, d: usize, t: &Partition, a: &Partition, with_section: bool) -> BTreeMap<Partition, u128> {
    let f = Field::get(q).expect("supported field");
    let p = local_poly(f, d);
    let zt = module_matrix(f, &p, t);
    let za = module_matrix(f, &p, a);
    let (nt, na) = (zt.len(), za.len());
    let mut out = BTreeMap::new();
    if na == 0 {
        out.insert(t.clone(), 1);
        return out;
    }
    let homs = intertwiners(f, &zt, &za);
    let work = (q as u128).pow((homs.len() + if with_section { na } else { 0 }) as u32);
    assert!(work <= 50_000_000, "local surjection enumeration of size {work}");
    let mut powers = Vec::new();
    let pz = ff::poly_eval_mat(f, &p, &zt);
    let mut acc = ff::identity(nt);
    for _ in 0..t.part(0) {
        acc = mat_mul(f, &acc, &pz);
        powers.push(acc.clone());
    }
    let sections: Vec<Vec<u8>> = if with_section { ff::all_vectors(f, na).collect() } else { vec![vec![0u8; na]] };
    // Krylov spaces of each section, as rows.
    let krylov: Vec<Mat> = sections
        .iter()
        .map(|s| {
            let mut rows = Vec::with_capacity(na);
            let mut cur = s.clone();
            for _ in 0..na {
                rows.push(cur.clone());
                cur = ff::mat_vec(f, &za, &cur);
            }
            rows
        })
        .collect();
    let hom_list: Vec<Mat> = if homs.is_empty() { vec![vec![vec![0u8; nt]; na]] } else { span_elements(f, &homs, na, nt).collect() };
    for x in &hom_list {
        let cols = transpose(x, nt);
        let img_rank = ff::rank(f, &cols);
        let mut ktype: Option<Partition> = None;
        for kr in &krylov {
            let surjective = if img_rank == na {
                true
            } else {
                let mut rows = cols.clone();
                rows.extend(kr.iter().cloned());
                ff::rank(f, &rows) == na
            };
            if surjective {
                let kt = ktype.get_or_insert_with(|| if nt == 0 { Partition::empty() } else { kernel_type(f, x, &powers, nt, d) });
                *out.entry(kt.clone()).or_insert(0) += 1;
            }
        }
    }
    out
}

/// `|Aut|` of the torsion module of type `lambda` at a point of degree `d`,
/// by enumerating the endomorphism ring.
pub(crate) fn aut_bruteforce(q: u32, d: usize, lambda: &Partition) -> u128 {
    let f = Field::get(q).expect("supported field");
    let p = local_poly(f, d);
    let z = module_matrix(f, &p, lambda);
    let n = z.len();
    if n == 0 {
        return 1;
    }
    let basis = intertwiners(f, &z, &z);
    span_elements(f, &basis, n, n).filter(|x| ff::is_invertible(f, x)).count() as u128
}

/// Largest subspace enumeration attempted per module.
const SUBSPACE_BUDGET: u128 = 4_000_000;

/// `dim pi^j (M / S)` for `j = 0, 1, ...` until it vanishes, as a type.
fn cotype(f: &Field, pz: &Mat, sub: &Mat, n: usize, d: usize) -> Partition {
    let k = sub.len();
    let mut dims = Vec::new();
    let mut pj = ff::identity(n);
    loop {
        let mut rows = transpose(&pj, n);
        rows.extend(sub.iter().cloned());
        let dim = ff::rank(f, &rows) - k;
        dims.push(dim);
        if dim == 0 {
            break;
        }
        pj = mat_mul(f, pz, &pj);
    }
    let conj: Vec<u32> = dims.windows(2).map(|w| ((w[0] - w[1]) / d) as u32).filter(|&c| c > 0).collect();
    Partition::new(conj).conjugate()
}

/// Type of the submodule spanned by the rows of `sub`.
fn subtype(f: &Field, pz: &Mat, sub: &Mat, d: usize) -> Partition {
    let k = sub.len();
    let mut dims = vec![0usize];
    let mut images: Vec<Vec<u8>> = sub.clone();
    while *dims.last().unwrap() < k {
        images = images.iter().map(|v| ff::mat_vec(f, pz, v)).collect();
        dims.push(k - ff::rank(f, &images));
    }
    let conj: Vec<u32> = dims.windows(2).map(|w| ((w[1] - w[0]) / d) as u32).filter(|&c| c > 0).collect();
    Partition::new(conj).conjugate()
}

type SubKey = (u32, usize, Partition, u32);

/// For the module of type `nu`, counts submodules of size `k` by
/// (sub type, quotient type).
fn submodule_census(q: u32, d: usize, nu: &Partition, k: u32) -> Arc<BTreeMap<(Partition, Partition), u128>> {
    static C: OnceLock<Mutex<HashMap<SubKey, Arc<BTreeMap<(Partition, Partition), u128>>>>> = OnceLock::new();
    let key = (q, d, nu.clone(), k);
    let map = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().expect("cache poisoned").get(&key) {
        return v.clone();
    }
    let f = Field::get(q).expect("supported field");
    let p = local_poly(f, d);
    let z = module_matrix(f, &p, nu);
    let pz = ff::poly_eval_mat(f, &p, &z);
    let n = z.len();
    let dim = d * k as usize;
    let mut out = BTreeMap::new();
    for sub in ff::subspaces(f, n, dim) {
        let stable = sub.iter().all(|row| {
            let mut rows = sub.clone();
            rows.push(ff::mat_vec(f, &z, row));
            ff::rank(f, &rows) == dim
        });
        if stable {
            let key = (subtype(f, &pz, &sub, d), cotype(f, &pz, &sub, n, d));
            *out.entry(key).or_insert(0) += 1;
        }
    }
    let v = Arc::new(out);
    map.lock().expect("cache poisoned").entry(key).or_insert(v).clone()
}

/// Number of submodules of the type-`nu` module with sub type `mu` and
/// quotient type `lambda`: by enumeration when the Grassmannian is small,
/// otherwise from the Hall polynomial.
pub(crate) fn local_hall_number(q: u32, d: usize, nu: &Partition, lambda: &Partition, mu: &Partition) -> u128 {
    if nu.size() != lambda.size() + mu.size() {
        return 0;
    }
    let n = d as u32 * nu.size();
    if ff::gaussian_binomial(n, d as u32 * mu.size(), q as u64) <= SUBSPACE_BUDGET {
        return local_hall_number_enumerated(q, d, nu, lambda, mu);
    }
    let big_q = num_rational::BigRational::from_integer((q as i64).pow(d as u32).into());
    let g = crate::symfunc::hl_structure_constant(lambda, mu, nu, &big_q).expect("sizes match");
    assert!(g.is_integer(), "Hall polynomial value is not an integer");
    u128::try_from(g.to_integer()).expect("nonnegative Hall number")
}

pub(crate) fn local_hall_number_enumerated(q: u32, d: usize, nu: &Partition, lambda: &Partition, mu: &Partition) -> u128 {
    if nu.size() != lambda.size() + mu.size() {
        return 0;
    }
    submodule_census(q, d, nu, mu.size()).get(&(mu.clone(), lambda.clone())).copied().unwrap_or(0)
}

type LineKey = (u32, usize, u32, Partition);

/// For `R -> R + T` sending `1` to `(pi^k, sigma)`, counts `sigma in T` by
/// the type of the cokernel.
pub(crate) fn line_cokernels(q: u32, d: usize, k: u32, nu: &Partition) -> Arc<BTreeMap<Partition, u128>> {
    static C: OnceLock<Mutex<HashMap<LineKey, Arc<BTreeMap<Partition, u128>>>>> = OnceLock::new();
    let key = (q, d, k, nu.clone());
    let map = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().expect("cache poisoned").get(&key) {
        return v.clone();
    }
    let f = Field::get(q).expect("supported field");
    let p = local_poly(f, d);
    // N > k + nu_1 gives pi^N R inside R (pi^k, sigma), so R / pi^N suffices.
    let big_n = k + nu.part(0) + 1;
    let mut out = BTreeMap::new();
    let free = Partition::new(vec![big_n]);
    let m = block_diag(&[module_matrix(f, &p, &free), module_matrix(f, &p, nu)]);
    let n = m.len();
    let pz = ff::poly_eval_mat(f, &p, &m);
    let mut head = poly_pow(f, &p, k);
    head.resize(d * big_n as usize, 0);
    for sigma in ff::all_vectors(f, d * nu.size() as usize) {
        let mut w = head.clone();
        w.extend_from_slice(&sigma);
        let mut rows = Vec::new();
        let mut cur = w;
        for _ in 0..n {
            rows.push(cur.clone());
            cur = ff::mat_vec(f, &m, &cur);
        }
        let (basis, _) = ff::rref(f, &rows);
        let basis: Mat = basis.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
        *out.entry(cotype(f, &pz, &basis, n, d)).or_insert(0) += 1;
    }
    let v = Arc::new(out);
    map.lock().expect("cache poisoned").entry(key).or_insert(v).clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn classical_small_hall_numbers() {
        // (11) has q + 1 lines; (2) has the single submodule z M.
        assert_eq!(local_hall_number(2, 1, &p(&[1, 1]), &p(&[1]), &p(&[1])), 3);
        assert_eq!(local_hall_number(2, 1, &p(&[2]), &p(&[1]), &p(&[1])), 1);
        // (1, a) generates a copy of (2) for each a; (z, b) with b != 0 has cyclic cokernel.
        assert_eq!(local_hall_number(3, 1, &p(&[2, 1]), &p(&[1]), &p(&[2])), 3);
        assert_eq!(local_hall_number(3, 1, &p(&[2, 1]), &p(&[2]), &p(&[1])), 3);
        assert_eq!(local_hall_number(2, 2, &p(&[1, 1]), &p(&[1]), &p(&[1])), 5);
    }

    #[test]
    fn enumeration_matches_surjection_count() {
        for nu in crate::symfunc::partitions_of(3) {
            for k in 1..3 {
                for mu in crate::symfunc::partitions_of(k) {
                    for lambda in crate::symfunc::partitions_of(3 - k) {
                        let surj = local_surjections(2, 1, &nu, &lambda, false);
                        let n = surj.get(&mu).copied().unwrap_or(0);
                        let aut = super::super::aut::torsion_aut(2, 1, &lambda);
                        assert_eq!(n / aut, local_hall_number_enumerated(2, 1, &nu, &lambda, &mu));
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_hall_polynomial() {
        for q in [2u32, 3] {
            for n in 1..=4 {
                for nu in crate::symfunc::partitions_of(n) {
                    for k in 0..=n {
                        for mu in crate::symfunc::partitions_of(k) {
                            for lambda in crate::symfunc::partitions_of(n - k) {
                                let big_q = num_rational::BigRational::from_integer((q as i64).into());
                                let g = crate::symfunc::hl_structure_constant(&lambda, &mu, &nu, &big_q).unwrap();
                                let e = local_hall_number_enumerated(q, 1, &nu, &lambda, &mu);
                                assert_eq!(g, num_rational::BigRational::from_integer(e.into()), "{nu:?} {lambda:?} {mu:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn line_cokernel_examples() {
        // R -> R with 1 -> pi^2 has cokernel of type (2).
        assert_eq!(line_cokernels(3, 1, 2, &Partition::empty()).get(&p(&[2])), Some(&1));
        // R -> R + R/pi: sigma = 0 gives (1, 1), sigma != 0 gives (2).
        let c = line_cokernels(3, 1, 1, &p(&[1]));
        assert_eq!(c.get(&p(&[1, 1])), Some(&1));
        assert_eq!(c.get(&p(&[2])), Some(&2));
        assert_eq!(line_cokernels(3, 1, 0, &p(&[2])).get(&p(&[2])), Some(&9));
    }

    #[test]
    fn aut_matches_formula() {
        for &q in &[2u32, 3] {
            for n in 1..=3 {
                for lambda in crate::symfunc::partitions_of(n) {
                    assert_eq!(aut_bruteforce(q, 1, &lambda), super::super::aut::torsion_aut(q as u128, 1, &lambda));
                }
            }
        }
        assert_eq!(aut_bruteforce(2, 2, &p(&[1])), 3);
    }
}
