//! Bar involution, Harder-Narasimhan order and the canonical basis of the
//! window spaces.

mod bar;
mod hn;
mod solver;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bar::{bar_divided_power, bar_generator, bar_generator_literal, bar_monomial, bar_window, MAX_BAR_RANK};
pub use hn::{
    class_size, delta_mu, farey_consecutive, farey_mediant, hn_compare, hn_type_of_monomial, monomial_order, HNType,
    Slope,
};
pub use solver::{
    canonical_bases, canonical_basis, expand_in_basis, ordered_monomials, transition_matrix, CanonicalElement,
};

use crate::cohp1_oracle::KClass;
use crate::exactalg::LaurentRat;
use crate::loopalg::{AlgElement, PBWMonomial, UNBOUNDED};
use crate::symfunc::Partition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("HN types of different classes {0} and {1}")]
    ClassMismatch(KClass, KClass),
    #[error("invalid HN type: {0}")]
    InvalidHNType(String),
    #[error("rank {0} is beyond the supported rank 2")]
    RankTooLarge(i32),
    #[error("bar image of {monomial} in class {class} is not unitriangular")]
    NotTriangular { class: KClass, monomial: String },
    #[error("bar correction at {monomial} in class {class} is not antisymmetric")]
    NotInvolutive { class: KClass, monomial: String },
    #[error("triangular solve for class {0} did not converge")]
    NoConvergence(KClass),
}

/// Shifts every twist by `k`; the torsion sector is fixed.
pub fn kappa_twist(x: &AlgElement, k: i32) -> AlgElement {
    let c = x.class();
    let window = if x.window() == UNBOUNDED { UNBOUNDED } else { x.window() + k };
    let mut out = AlgElement::zero(KClass::new(c.rank, c.degree + c.rank * k), window);
    for (m, a) in x.terms() {
        out.add_term(m.shift(k), a.clone());
    }
    out
}

/// `E_t + sum_{l>0} v^l E_{t-l} xi_l`, truncated.
pub fn closed_form_rank1(t: i32, window: i32) -> AlgElement {
    let mut out = AlgElement::e(t, window);
    for l in 1..=(t - window).max(0) {
        let term = AlgElement::e(t - l, window).multiply(&AlgElement::xi(l as u32)).scale(&LaurentRat::v_pow(l));
        out = out.add(&term);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rank2Kind {
    /// `O(t) + O(t)`.
    Equal,
    /// `O(t) + O(t+1)`.
    Adjacent,
}

/// The rank-two sums with exponents `2 t_2` and `-1 + t_2 - t_1 + 2 t_3`;
/// in the adjacent case the leading monomial appears once.
pub fn closed_form_rank2(t: i32, kind: Rank2Kind, window: i32) -> AlgElement {
    let total = match kind {
        Rank2Kind::Equal => 2 * t,
        Rank2Kind::Adjacent => 2 * t + 1,
    };
    let lead = match kind {
        Rank2Kind::Equal => PBWMonomial::new(vec![(t, 2)], Partition::empty()),
        Rank2Kind::Adjacent => PBWMonomial::new(vec![(t, 1), (t + 1, 1)], Partition::empty()),
    };
    let mut out = AlgElement::monomial(lead.clone(), window);
    let xi_term = |m: PBWMonomial, l: i32, e: i32| -> AlgElement {
        AlgElement::monomial(m, window).multiply(&AlgElement::xi(l as u32)).scale(&LaurentRat::v_pow(e))
    };
    // 2 t_1 + t_2 = total, t_2 > 0
    let mut t1 = window;
    while 2 * t1 < total {
        let t2 = total - 2 * t1;
        out = out.add(&xi_term(PBWMonomial::new(vec![(t1, 2)], Partition::empty()), t2, 2 * t2));
        t1 += 1;
    }
    // t_1 < t_2, t_3 >= 0, t_1 + t_2 + t_3 = total
    let mut t1 = window;
    while 2 * t1 < total {
        for t2 in (t1 + 1)..=(total - t1) {
            let t3 = total - t1 - t2;
            let m = PBWMonomial::new(vec![(t1, 1), (t2, 1)], Partition::empty());
            if m == lead {
                continue;
            }
            out = out.add(&xi_term(m, t3, -1 + t2 - t1 + 2 * t3));
        }
        t1 += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::{partitions_of, Basis, SymFunc};

    fn vm(e: i32) -> LaurentRat {
        LaurentRat::v_pow(e)
    }

    #[test]
    fn bar_generator_depth_two() {
        let b = bar_generator(0, -2);
        let expect = AlgElement::e(0, -2)
            .add(&AlgElement::e(-1, -2).multiply(&AlgElement::xi(1)).scale(&(&vm(1) - &vm(-1))))
            .add(&AlgElement::e(-2, -2).multiply(&AlgElement::xi(2)).scale(&(&vm(2) - &vm(-2))))
            .add(
                &AlgElement::e(-2, -2)
                    .multiply(&AlgElement::xi(1).multiply(&AlgElement::xi(1)))
                    .scale(&(&vm(-2) - &LaurentRat::one())),
            );
        assert_eq!(b, expect);
    }

    #[test]
    fn bar_is_involutive_on_generators() {
        for depth in 0..4 {
            let b = bar_generator(0, -depth);
            assert_eq!(bar_window(&b).unwrap(), AlgElement::e(0, -depth));
        }
    }

    #[test]
    fn literal_series_is_not_involutive() {
        let b = bar_generator_literal(0, -1);
        assert_ne!(bar_window(&b).unwrap(), AlgElement::e(0, -1));
    }

    #[test]
    fn bar_divided_power_matches_monomial_bar() {
        let m = PBWMonomial::new(vec![(0, 2)], Partition::empty());
        assert_eq!(bar_monomial(&m, -2).unwrap(), bar_divided_power(0, 2, -2));
    }

    #[test]
    fn torsion_basis_is_schur() {
        for l in 0..=5u32 {
            let basis = canonical_basis(KClass::torsion(l as i32), 0).unwrap();
            assert_eq!(basis.len(), partitions_of(l).len());
            for b in &basis {
                assert_eq!(b.element, AlgElement::monomial(b.index.clone(), 0));
                let s = b.element.to_symfunc();
                assert_eq!(s, SymFunc::basis_element(Basis::S, b.index.torsion().clone()));
            }
        }
    }

    #[test]
    fn rank_one_closed_form() {
        for t in [-1, 0, 2] {
            for depth in 0..=3 {
                let basis = canonical_basis(KClass::line(t), t - depth).unwrap();
                let top = basis.last().unwrap();
                assert_eq!(top.index, PBWMonomial::e(t));
                assert_eq!(top.element, closed_form_rank1(t, t - depth), "t = {t}, depth = {depth}");
            }
        }
    }

    #[test]
    fn rank_one_spelled_out() {
        let b = closed_form_rank1(0, -2);
        let m = |t: i32, l: &[u32]| PBWMonomial::new(vec![(t, 1)], Partition::new(l.to_vec()));
        assert_eq!(b.coeff(&m(0, &[])), LaurentRat::one());
        assert_eq!(b.coeff(&m(-1, &[1])), vm(1));
        assert_eq!(b.coeff(&m(-2, &[2])), vm(2));
        assert!(b.coeff(&m(-2, &[1, 1])).is_zero());
    }

    #[test]
    fn canonical_elements_triangular_and_fixed() {
        for class in [KClass::new(1, 0), KClass::new(2, 0), KClass::new(2, 1)] {
            let basis = canonical_basis(class, -1).unwrap();
            for b in &basis {
                assert!(b.is_triangular(), "{}", b.element);
                assert_eq!(bar_window(&b.element).unwrap(), b.element);
            }
            transition_matrix(&basis).check_unitriangular().unwrap();
        }
    }

    #[test]
    fn kappa_inverse() {
        let x = closed_form_rank1(1, -1).multiply(&AlgElement::xi(2));
        assert_eq!(kappa_twist(&kappa_twist(&x, 3), -3), x);
        assert_eq!(kappa_twist(&AlgElement::e(0, 0), 1), AlgElement::e(1, 1));
        assert_eq!(kappa_twist(&AlgElement::xi(2), 5), AlgElement::xi(2));
    }

    #[test]
    fn rank_two_exponent_example() {
        let b = closed_form_rank2(0, Rank2Kind::Equal, -1);
        let m = PBWMonomial::new(vec![(-1, 1), (1, 1)], Partition::empty());
        assert_eq!(b.coeff(&m), vm(1));
        let a = closed_form_rank2(0, Rank2Kind::Adjacent, 0);
        assert_eq!(a.coeff(&PBWMonomial::new(vec![(0, 1), (1, 1)], Partition::empty())), LaurentRat::one());
    }
}
