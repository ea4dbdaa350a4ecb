//! Dense exact elimination over `Q` and over `Q(v)`.

use num_rational::BigRational;
use num_traits::Zero;

use super::LaurentRat;

/// Rank of a rational matrix given by rows.
pub fn rank_rational(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    eliminate(&mut a)
}

fn eliminate(a: &mut [Vec<BigRational>]) -> usize {
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for j in c..n {
            let x = &a[r][j] / &piv;
            a[r][j] = x;
        }
        for i in 0..m {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..n {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// Solves `A x = b` for `A` given by rows; `None` if inconsistent.
pub fn solve_rational(rows: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = rows.len();
    let n = if m == 0 { 0 } else { rows[0].len() };
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().zip(b).map(|(r, bi)| r.iter().cloned().chain(std::iter::once(bi.clone())).collect()).collect();
    if m == 0 {
        return Some(Vec::new());
    }
    eliminate(&mut a);
    let mut x = vec![BigRational::zero(); n];
    for row in &a {
        match (0..n).find(|&j| !row[j].is_zero()) {
            Some(j) => x[j] = row[n].clone(),
            None => {
                if !row[n].is_zero() {
                    return None;
                }
            }
        }
    }
    Some(x)
}

/// Rank over the field `Q(v)` via fraction-free (Bareiss) elimination in
/// `Q[v, v^{-1}]`.
pub fn rank_over_qv(rows: &[Vec<LaurentRat>]) -> usize {
    let mut a: Vec<Vec<LaurentRat>> = rows.to_vec();
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut prev = LaurentRat::one();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for i in r + 1..m {
            let f = a[i][c].clone();
            for j in c + 1..n {
                let num = &(&piv * &a[i][j]) - &(&f * &a[r][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss quotient is exact");
            }
            a[i][c] = LaurentRat::zero();
        }
        prev = piv;
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// A rational function `num / den` in `v`, used for occasional exact
/// comparisons of ratios.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: LaurentRat,
    pub den: LaurentRat,
}

impl RatFunc {
    pub fn new(num: LaurentRat, den: LaurentRat) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        RatFunc { num, den }
    }

    /// Cross-multiplied equality.
    pub fn same_as(&self, other: &RatFunc) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rint;

    #[test]
    fn rational_rank_and_solve() {
        let rows = vec![vec![rint(1), rint(2)], vec![rint(2), rint(4)]];
        assert_eq!(rank_rational(&rows), 1);
        assert!(solve_rational(&rows, &[rint(1), rint(2)]).is_some());
        assert!(solve_rational(&rows, &[rint(1), rint(3)]).is_none());
    }

    #[test]
    fn rank_over_function_field() {
        let v = LaurentRat::v_pow(1);
        let one = LaurentRat::one();
        // [[1, v], [v, v^2]] has rank 1; [[1, v], [v, 1]] has rank 2.
        assert_eq!(rank_over_qv(&[vec![one.clone(), v.clone()], vec![v.clone(), &v * &v]]), 1);
        assert_eq!(rank_over_qv(&[vec![one.clone(), v.clone()], vec![v.clone(), one.clone()]]), 2);
        let z = LaurentRat::zero();
        assert_eq!(
            rank_over_qv(&[vec![z.clone(), one.clone(), v.clone()], vec![z.clone(), v.clone(), &v * &v], vec![one, z.clone(), z]]),
            2
        );
    }
}
