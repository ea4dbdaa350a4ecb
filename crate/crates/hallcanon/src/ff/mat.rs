use super::Field;

/// Dense matrix over `F_q` as a list of rows.
pub type Mat = Vec<Vec<u8>>;

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| u8::from(i == j)).collect()).collect()
}

pub fn mat_mul(f: &Field, a: &Mat, b: &Mat) -> Mat {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![0u8; m];
            for (k, &x) in row.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (o, &y) in out.iter_mut().zip(&b[k]) {
                    *o = f.add(*o, f.mul(x, y));
                }
            }
            out
        })
        .collect()
}

/// `a * x` for a column vector `x`.
pub fn mat_vec(f: &Field, a: &Mat, x: &[u8]) -> Vec<u8> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(0u8, |acc, (&r, &c)| f.add(acc, f.mul(r, c))))
        .collect()
}

/// Reduced row echelon form; returns the nonzero rows and pivot columns.
pub fn rref(f: &Field, rows: &[Vec<u8>]) -> (Mat, Vec<usize>) {
    let mut a: Mat = rows.to_vec();
    let n = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, p);
        let inv = f.inv(a[r][c]);
        for x in a[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let k = a[i][c];
                for j in 0..n {
                    let d = f.mul(k, a[r][j]);
                    a[i][j] = f.sub(a[i][j], d);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(f: &Field, rows: &[Vec<u8>]) -> usize {
    rref(f, rows).1.len()
}

pub fn is_invertible(f: &Field, a: &Mat) -> bool {
    a.len() == a.first().map_or(0, |r| r.len()) && rank(f, a) == a.len()
}

/// Basis of `{x : a x = 0}` for `a` with `ncols` columns.
pub fn kernel(f: &Field, a: &[Vec<u8>], ncols: usize) -> Mat {
    let (r, pivots) = rref(f, a);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![0u8; ncols];
            x[fc] = 1;
            for (row, &pc) in r.iter().zip(&pivots) {
                x[pc] = f.neg(row[fc]);
            }
            x
        })
        .collect()
}

/// Whether `v` lies in the row span of `basis`.
pub fn span_contains(f: &Field, basis: &[Vec<u8>], v: &[u8]) -> bool {
    let mut rows = basis.to_vec();
    let r0 = rank(f, &rows);
    rows.push(v.to_vec());
    rank(f, &rows) == r0
}

/// All vectors of `F_q^n` in lexicographic order of their digit encoding.
pub fn all_vectors(f: &Field, n: usize) -> impl Iterator<Item = Vec<u8>> + '_ {
    let q = f.q as u64;
    let total = q.pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0u8; n];
        for x in v.iter_mut() {
            *x = (idx % q) as u8;
            idx /= q;
        }
        v
    })
}

/// Number of `k`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}

/// All `k`-dimensional subspaces of `F_q^n`, each as its reduced echelon
/// basis (`k` rows).
pub fn subspaces(f: &Field, n: usize, k: usize) -> Vec<Mat> {
    fn combos(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            combos(n, k, c + 1, cur, out);
            cur.pop();
        }
    }
    let mut pivot_sets = Vec::new();
    combos(n, k, 0, &mut Vec::new(), &mut pivot_sets);
    let mut out = Vec::new();
    for pivots in pivot_sets {
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| {
                let p = &pivots;
                ((p[i] + 1)..n).filter(move |c| !p.contains(c)).map(move |c| (i, c))
            })
            .collect();
        for vals in all_vectors(f, free.len()) {
            let mut m = vec![vec![0u8; n]; k];
            for (i, &p) in pivots.iter().enumerate() {
                m[i][p] = 1;
            }
            for (&(i, c), &x) in free.iter().zip(&vals) {
                m[i][c] = x;
            }
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_counts() {
        for &q in &[2u32, 3, 4] {
            let f = Field::get(q).unwrap();
            for n in 0..=4usize {
                for k in 0..=n {
                    let s = subspaces(f, n, k);
                    assert_eq!(s.len() as u128, gaussian_binomial(n as u32, k as u32, q as u64));
                    for m in &s {
                        assert_eq!(rank(f, m), k);
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_is_annihilated() {
        let f = Field::get(3).unwrap();
        let a = vec![vec![1, 2, 0], vec![0, 1, 1]];
        let k = kernel(f, &a, 3);
        assert_eq!(k.len(), 1);
        assert_eq!(mat_vec(f, &a, &k[0]), vec![0, 0]);
    }

    #[test]
    fn invertibility() {
        let f = Field::get(2).unwrap();
        assert!(is_invertible(f, &vec![vec![1, 1], vec![0, 1]]));
        assert!(!is_invertible(f, &vec![vec![1, 1], vec![1, 1]]));
        let inv_count = all_vectors(f, 4)
            .filter(|v| is_invertible(f, &vec![v[0..2].to_vec(), v[2..4].to_vec()]))
            .count();
        assert_eq!(inv_count, 6);
    }
}
