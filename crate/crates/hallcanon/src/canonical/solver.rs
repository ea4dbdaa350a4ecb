use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use super::bar::bar_monomial;
use super::hn::monomial_order;
use super::{kappa_twist, CanonError};
use crate::cohp1_oracle::KClass;
use crate::exactalg::{LaurentRat, SparseMatrix, Triangle};
use crate::loopalg::{window_monomials, AlgElement, PBWMonomial};

/// A canonical basis element with its PBW index (the leading monomial).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalElement {
    pub index: PBWMonomial,
    pub element: AlgElement,
    pub window: i32,
}

impl CanonicalElement {
    /// Leading coefficient is exactly 1 and all others lie in `v Z[v]`.
    pub fn is_triangular(&self) -> bool {
        self.element.terms().all(|(m, c)| if *m == self.index { c.is_one() } else { c.in_v_zv() })
    }

    pub fn kappa(&self, k: i32) -> CanonicalElement {
        CanonicalElement { index: self.index.shift(k), element: kappa_twist(&self.element, k), window: self.window + k }
    }
}

/// The window monomials of `class` in increasing order.
pub fn ordered_monomials(class: KClass, window: i32) -> Vec<PBWMonomial> {
    let mut ms = window_monomials(class, window);
    ms.sort_by(monomial_order);
    ms
}

/// Canonical basis of the window space, ascending in the monomial order.
pub fn canonical_basis(class: KClass, window: i32) -> Result<Vec<CanonicalElement>, CanonError> {
    if class.rank > super::bar::MAX_BAR_RANK {
        return Err(CanonError::RankTooLarge(class.rank));
    }
    if class.rank == 0 {
        // Twists do not occur; the result does not depend on the window.
        return canonical_basis_raw(class, window);
    }
    // Normalize with the Picard twist to window 0.
    static C: OnceLock<Mutex<HashMap<KClass, Arc<Vec<CanonicalElement>>>>> = OnceLock::new();
    let map = C.get_or_init(|| Mutex::new(HashMap::new()));
    let key = KClass::new(class.rank, class.degree - class.rank * window);
    let hit = map.lock().expect("cache poisoned").get(&key).cloned();
    let base = match hit {
        Some(b) => b,
        None => {
            let b = Arc::new(canonical_basis_raw(key, 0)?);
            map.lock().expect("cache poisoned").entry(key).or_insert(b).clone()
        }
    };
    Ok(base.iter().map(|b| b.kappa(window)).collect())
}

/// Canonical bases for several classes in parallel.
pub fn canonical_bases(classes: &[KClass], window: i32) -> Vec<Result<Vec<CanonicalElement>, CanonError>> {
    classes.par_iter().map(|&c| canonical_basis(c, window)).collect()
}

fn canonical_basis_raw(class: KClass, window: i32) -> Result<Vec<CanonicalElement>, CanonError> {
    let monos = ordered_monomials(class, window);
    let pos: BTreeMap<PBWMonomial, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut basis: Vec<AlgElement> = Vec::with_capacity(monos.len());
    for (i, m) in monos.iter().enumerate() {
        let image = bar_monomial(m, window)?;
        if !image.coeff(m).is_one() {
            return Err(CanonError::NotTriangular { class, monomial: m.to_string() });
        }
        let mut rest = image.sub(&AlgElement::monomial(m.clone(), window));
        if rest.monomials().any(|x| pos[x] >= i) {
            return Err(CanonError::NotTriangular { class, monomial: m.to_string() });
        }
        // bar(M_i) - M_i = sum_j r_j b_j with r_j antisymmetric under bar.
        let mut b = AlgElement::monomial(m.clone(), window);
        let mut steps = 0usize;
        while let Some(top) = rest.monomials().max_by_key(|x| pos[*x]).cloned() {
            steps += 1;
            if steps > monos.len() {
                return Err(CanonError::NoConvergence(class));
            }
            let j = pos[&top];
            let r = rest.coeff(&top);
            if !(&r.bar() + &r).is_zero() {
                return Err(CanonError::NotInvolutive { class, monomial: top.to_string() });
            }
            rest = rest.sub(&basis[j].scale(&r));
            let p = r.positive_part();
            if !p.is_zero() {
                b = b.add(&basis[j].scale(&p));
            }
        }
        basis.push(b);
    }
    Ok(monos
        .into_iter()
        .zip(basis)
        .map(|(index, element)| CanonicalElement { index, element, window })
        .collect())
}

/// Rows: canonical elements; columns: PBW monomials, both in ascending order.
pub fn transition_matrix(basis: &[CanonicalElement]) -> SparseMatrix {
    let pos: BTreeMap<&PBWMonomial, usize> = basis.iter().enumerate().map(|(i, b)| (&b.index, i)).collect();
    let mut t = SparseMatrix::new(basis.len(), Triangle::Lower);
    for (i, b) in basis.iter().enumerate() {
        for (m, c) in b.element.terms() {
            match pos.get(m) {
                Some(&j) => t.set(i, j, c.clone()),
                None => panic!("monomial {m} is not indexed by the basis"),
            }
        }
    }
    t
}

/// Coefficients of `x` in the canonical basis `basis` of its class and window.
pub fn expand_in_basis(x: &AlgElement, basis: &[CanonicalElement]) -> Result<Vec<(PBWMonomial, LaurentRat)>, CanonError> {
    let pos: BTreeMap<&PBWMonomial, usize> = basis.iter().enumerate().map(|(i, b)| (&b.index, i)).collect();
    let mut rest = x.truncate(basis.first().map_or(x.window(), |b| b.window));
    let mut out = Vec::new();
    while let Some(top) = rest.monomials().max_by(|a, b| monomial_order(a, b)).cloned() {
        let j = *pos.get(&top).ok_or_else(|| CanonError::NotTriangular { class: x.class(), monomial: top.to_string() })?;
        let c = rest.coeff(&top);
        rest = rest.sub(&basis[j].element.scale(&c));
        out.push((top, c));
    }
    out.sort_by(|a, b| monomial_order(&a.0, &b.0));
    Ok(out)
}
