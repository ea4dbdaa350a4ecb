//! Hom and Ext dimensions and automorphism counts.

use super::sheaf::SheafIso;
use super::{euler_form, OracleError};
use crate::ff::{self, Field};
use crate::symfunc::Partition;

/// `dim Hom(A, B)`.
pub fn hom_dim(a: &SheafIso, b: &SheafIso) -> u64 {
    let mut h = 0u64;
    for &x in a.vb() {
        for &y in b.vb() {
            h += (y - x + 1).max(0) as u64;
        }
    }
    h += a.rank() as u64 * b.torsion_degree() as u64;
    for (pt, lambda) in a.torsion() {
        if let Some(mu) = b.torsion_at(pt) {
            h += pt.degree() as u64 * overlap(lambda, mu);
        }
    }
    h
}

/// `dim Ext^1(A, B)`.
pub fn ext_dim(a: &SheafIso, b: &SheafIso) -> u64 {
    let e = hom_dim(a, b) as i64 - euler_form(a.class(), b.class()) as i64;
    debug_assert!(e >= 0);
    e as u64
}

fn overlap(lambda: &Partition, mu: &Partition) -> u64 {
    lambda.parts().iter().map(|&a| mu.parts().iter().map(|&b| a.min(b) as u64).sum::<u64>()).sum()
}

/// `|Aut|` of the module of type `lambda` over a local ring with residue
/// field of size `q^d`.
pub fn torsion_aut(q: u128, d: u32, lambda: &Partition) -> u128 {
    let big_q = q.pow(d);
    let mut e = lambda.size() as i64 + 2 * lambda.n_value() as i64;
    let mut prod = 1u128;
    let mut i = 1;
    while i <= lambda.part(0) {
        let m = lambda.multiplicity(i);
        e -= (m * (m + 1) / 2) as i64;
        for k in 1..=m {
            prod *= big_q.pow(k) - 1;
        }
        i += 1;
    }
    prod * big_q.pow(e as u32)
}

/// `|Aut|` of `(+)_i O(t_i)`.
pub fn vb_aut(q: u128, vb: &[i32]) -> u128 {
    let mut blocks: Vec<(i32, u32)> = Vec::new();
    for &t in vb {
        match blocks.last_mut() {
            Some((s, m)) if *s == t => *m += 1,
            _ => blocks.push((t, 1)),
        }
    }
    let mut n = 1u128;
    for (i, &(a, ma)) in blocks.iter().enumerate() {
        n *= ff::gl_order(ma, q as u64);
        for &(b, mb) in &blocks[i + 1..] {
            n *= q.pow(ma * mb * (b - a + 1) as u32);
        }
    }
    n
}

/// `|Aut F|`: the vector-bundle and torsion parts times the unipotent
/// `Hom(vb, torsion)`.
pub fn aut_count(f: &SheafIso, q: u32) -> u128 {
    let q = q as u128;
    let mut n = vb_aut(q, f.vb());
    for (pt, lambda) in f.torsion() {
        n *= torsion_aut(q, pt.degree() as u32, lambda);
    }
    n * q.pow((f.rank() as u32) * f.torsion_degree())
}

/// `|Aut F|` by enumerating endomorphisms. A matrix of binary forms on the
/// vector-bundle part has constant determinant, so it is invertible iff its
/// value at `(1:0)` is.
pub fn aut_count_bruteforce(f: &SheafIso, q: u32) -> Result<u128, OracleError> {
    let field = Field::get(q).map_err(OracleError::Field)?;
    let vb = f.vb();
    // slot (i, j) holds a form of degree vb[j] - vb[i]: Hom(O(vb[i]), O(vb[j]))
    let r = vb.len();
    let mut slots = Vec::new();
    for i in 0..r {
        for j in 0..r {
            let dg = vb[j] - vb[i];
            if dg >= 0 {
                slots.push((i, j, dg as usize));
            }
        }
    }
    let dim: usize = slots.iter().map(|s| s.2 + 1).sum();
    if dim > 12 {
        return Err(OracleError::Budget(format!("endomorphism space of dimension {dim}")));
    }
    let mut vb_count = 0u128;
    for c in ff::all_vectors(field, dim) {
        // Value at (x:y) = (1:0) picks the x^deg coefficient.
        let mut m = vec![vec![0u8; r]; r];
        let mut o = 0;
        for &(i, j, dg) in &slots {
            m[j][i] = c[o + dg];
            o += dg + 1;
        }
        if ff::is_invertible(field, &m) {
            vb_count += 1;
        }
    }
    let mut n = vb_count;
    for (pt, lambda) in f.torsion() {
        n *= super::local::aut_bruteforce(q, pt.degree(), lambda);
    }
    Ok(n * (q as u128).pow((f.rank() as u32) * f.torsion_degree()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str, q: u32) -> SheafIso {
        SheafIso::parse(text, q).unwrap()
    }

    #[test]
    fn hom_ext_examples() {
        assert_eq!(hom_dim(&s("O", 2), &s("O(2)", 2)), 3);
        assert_eq!(ext_dim(&s("O(2)", 2), &s("O", 2)), 1);
        assert_eq!(hom_dim(&s("T(0;1)", 2), &s("O", 2)), 0);
        assert_eq!(hom_dim(&s("O", 2), &s("T(0;1)", 2)), 1);
        assert_eq!(ext_dim(&s("T(0;1)", 2), &s("T(0;1)", 2)), 1);
        assert_eq!(ext_dim(&s("T(0;1)", 2), &s("O", 2)), 1);
    }

    #[test]
    fn aut_examples() {
        assert_eq!(aut_count(&s("O+O", 2), 2), 6);
        assert_eq!(aut_count(&s("O(1)+O", 2), 2), 4);
        assert_eq!(aut_count(&s("T(0;1)", 3), 3), 2);
    }

    #[test]
    fn aut_bruteforce_agrees() {
        for text in ["O+O", "O(1)+O", "O+O(2)", "O(-1)+T(0;1)", "O+T(inf;2)", "T(0;1)+T(1;1,1)"] {
            for q in [2, 3] {
                let f = s(text, q);
                assert_eq!(aut_count_bruteforce(&f, q).unwrap(), aut_count(&f, q), "{text} q={q}");
            }
        }
    }
}
