//! The specialization map from the algebra to Hall functions, its frozen
//! normalization, and the relation checks built on it.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::hall::{green_coproduct, hall_product, invert_value, normalize_value, v_power};
use super::sheaf::{bundles, torsion_sheaves, SheafIso};
use super::{CoproductFn, HallFn, KClass, OracleError, ProductConvention, Twist};
use crate::exactalg::{rint, LaurentRat};
use crate::loopalg::{heisenberg, theta, AlgElement, PBWMonomial};
use crate::symfunc::{partition_count, Basis, Partition, SymFunc, XI_BASIS};

/// Location of the frozen calibration shipped with the crate.
pub const DEFAULT_GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/golden/v1/calibration.json");

/// `sign * v^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VPower {
    pub sign: i32,
    pub exponent: i32,
}

impl VPower {
    pub const ONE: VPower = VPower { sign: 1, exponent: 0 };

    pub fn value(&self, q: u32) -> LaurentRat {
        v_power(q, self.exponent).scale(&rint(self.sign as i64))
    }

    /// Reads `c` as `+-q^{-e/2}`.
    fn recognize(q: u32, c: &BigRational) -> Option<VPower> {
        let sign = if c.is_zero() {
            return None;
        } else if *c > BigRational::zero() {
            1
        } else {
            -1
        };
        let a = if sign > 0 { c.clone() } else { -c.clone() };
        (-24..=24).find_map(|e| {
            let x = normalize_value(q, &LaurentRat::v_pow(e));
            (x == LaurentRat::constant(a.clone())).then_some(VPower { sign, exponent: e })
        })
    }
}

/// Conventions fixed once against the relations and then frozen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calibration {
    pub format_version: u32,
    pub calibrated_at_q: u32,
    pub product: ProductConvention,
    pub coproduct: Twist,
    /// `E_t -> e_generator * 1_{O(t)}`.
    pub e_generator: VPower,
    /// `xi_l -> xi_generators[l-1] * (sum of 1_T over torsion T of degree l)`.
    pub xi_generators: Vec<VPower>,
}

impl Calibration {
    pub fn load(path: &Path) -> Result<Calibration, OracleError> {
        let text = std::fs::read_to_string(path).map_err(|e| OracleError::Golden(format!("{}: {e}", path.display())))?;
        let c: Calibration = serde_json::from_str(&text).map_err(|e| OracleError::Golden(format!("{}: {e}", path.display())))?;
        if c.format_version != 1 {
            return Err(OracleError::Golden(format!("unknown format version {}", c.format_version)));
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<(), OracleError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| OracleError::Golden(e.to_string()))?;
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| OracleError::Golden(e.to_string()))?;
        }
        std::fs::write(path, text + "\n").map_err(|e| OracleError::Golden(format!("{}: {e}", path.display())))
    }

    fn trial(product: ProductConvention, coproduct: Twist, xi: Vec<VPower>, q: u32) -> Calibration {
        Calibration {
            format_version: 1,
            calibrated_at_q: q,
            product,
            coproduct,
            e_generator: VPower { sign: 1, exponent: -1 },
            xi_generators: xi,
        }
    }
}

/// The map to Hall functions over `F_q` under a calibration.
pub struct Psi {
    pub q: u32,
    pub cal: Calibration,
    xi_monomials: Mutex<HashMap<Partition, HallFn>>,
}

impl Psi {
    pub fn new(q: u32, cal: Calibration) -> Result<Psi, OracleError> {
        crate::ff::Field::get(q)?;
        Ok(Psi { q, cal, xi_monomials: Mutex::new(HashMap::new()) })
    }

    pub fn product(&self, f: &HallFn, g: &HallFn) -> Result<HallFn, OracleError> {
        hall_product(f, g, &self.cal.product)
    }

    pub fn coproduct(&self, f: &HallFn, bound: u32) -> Result<CoproductFn, OracleError> {
        green_coproduct(f, &self.cal.coproduct, bound)
    }

    pub fn e(&self, t: i32) -> HallFn {
        HallFn::delta(self.q, SheafIso::line(t), self.cal.e_generator.value(self.q))
    }

    pub fn xi(&self, l: u32) -> Result<HallFn, OracleError> {
        if l == 0 {
            return Ok(HallFn::unit(self.q));
        }
        let c = self
            .cal
            .xi_generators
            .get(l as usize - 1)
            .ok_or_else(|| OracleError::Budget(format!("no normalization for xi_{l}")))?
            .value(self.q);
        let mut f = HallFn::zero(self.q, KClass::torsion(l as i32));
        for t in torsion_sheaves(self.q, l, l as usize)? {
            f.add_value(t, &c);
        }
        Ok(f)
    }

    /// Image of `xi_mu`.
    pub fn xi_monomial(&self, mu: &Partition) -> Result<HallFn, OracleError> {
        if let Some(f) = self.xi_monomials.lock().expect("cache poisoned").get(mu) {
            return Ok(f.clone());
        }
        let mut f = HallFn::unit(self.q);
        for &part in mu.parts() {
            f = self.product(&self.xi(part)?, &f)?;
        }
        self.xi_monomials.lock().expect("cache poisoned").insert(mu.clone(), f.clone());
        Ok(f)
    }

    pub fn torsion(&self, f: &SymFunc, degree: u32) -> Result<HallFn, OracleError> {
        let x = f.convert(&XI_BASIS).map_err(|e| OracleError::Internal(e.to_string()))?;
        let mut out = HallFn::zero(self.q, KClass::torsion(degree as i32));
        for (mu, c) in x.terms() {
            out = out.add(&self.xi_monomial(mu)?.scale(c));
        }
        Ok(out)
    }

    pub fn monomial(&self, m: &PBWMonomial) -> Result<HallFn, OracleError> {
        let lambda = m.torsion();
        let mut f = self.torsion(&SymFunc::basis_element(Basis::S, lambda.clone()), lambda.size())?;
        for &(t, mult) in m.e_part().iter().rev() {
            for _ in 0..mult {
                f = self.product(&self.e(t), &f)?;
            }
        }
        let d = invert_value(self.q, &m.divided_factor()).ok_or_else(|| OracleError::Internal("[m]! vanishes".into()))?;
        Ok(f.scale(&d))
    }

    pub fn image(&self, x: &AlgElement) -> Result<HallFn, OracleError> {
        let mut out = HallFn::zero(self.q, x.class());
        for (m, c) in x.terms() {
            out = out.add(&self.monomial(m)?.scale(c));
        }
        Ok(out)
    }

    /// `E_{k+1} E_l - v^{-2} E_l E_{k+1} - v^{-2} E_k E_{l+1} + E_{l+1} E_k`.
    pub fn quadratic_defect(&self, k: i32, l: i32) -> Result<HallFn, OracleError> {
        let vm2 = v_power(self.q, -2);
        let p = |a: i32, b: i32| self.product(&self.e(a), &self.e(b));
        Ok(p(k + 1, l)?.sub(&p(l, k + 1)?.scale(&vm2)).sub(&p(k, l + 1)?.scale(&vm2)).add(&p(l + 1, k)?))
    }

    /// `[H_l, E_t] - (v^l + v^{-l}) / l E_{t+l}`.
    pub fn heisenberg_defect(&self, l: u32, t: i32) -> Result<HallFn, OracleError> {
        let h = self.image(&heisenberg(l))?;
        let e = self.e(t);
        let kappa = (&LaurentRat::v_pow(l as i32) + &LaurentRat::v_pow(-(l as i32))).scale(&BigRational::new(1.into(), (l as i64).into()));
        Ok(self.product(&h, &e)?.sub(&self.product(&e, &h)?).sub(&self.e(t + l as i32).scale(&kappa)))
    }

    /// `Delta(E_0) - E_0 (x) 1 - sum_{l <= bound} theta_l (x) E_{-l}` on
    /// components with quotient torsion degree at most `bound`.
    pub fn coproduct_defect(&self, bound: u32) -> Result<CoproductFn, OracleError> {
        let lhs = self.coproduct(&self.e(0), bound)?;
        let mut rhs = CoproductFn::new(self.q);
        rhs.add_tensor(&self.e(0), &HallFn::unit(self.q));
        for l in 0..=bound {
            rhs.add_tensor(&self.image(&theta(l))?, &self.e(-(l as i32)));
        }
        Ok(lhs.sub(&rhs.truncated(bound)))
    }

    /// `psi(x y) - psi(x) psi(y)`.
    pub fn multiplicativity_defect(&self, x: &AlgElement, y: &AlgElement) -> Result<HallFn, OracleError> {
        Ok(self.image(&x.multiply(y))?.sub(&self.product(&self.image(x)?, &self.image(y)?)?))
    }
}

fn first_nonzero(f: &HallFn) -> Option<(SheafIso, LaurentRat)> {
    f.values.iter().next().map(|(s, c)| (s.clone(), c.clone()))
}

/// Fixes the product convention, the torsion normalizations and the
/// coproduct twist at `q` (a square), in that order.
pub fn calibrate(q: u32, max_xi: u32) -> Result<Calibration, OracleError> {
    if !normalize_value(q, &LaurentRat::v_pow(1)).coeff(1).is_zero() {
        return Err(OracleError::Calibration(format!("q = {q} must be a square")));
    }
    let default_twist = Twist { sign: -1, quotient_first: true };
    let mut product = None;
    'conv: for conv in ProductConvention::candidates() {
        let psi = Psi::new(q, Calibration::trial(conv, default_twist, vec![VPower::ONE], q))?;
        for k in -1..=1 {
            for l in -1..=1 {
                if !psi.quadratic_defect(k, l)?.is_zero() {
                    continue 'conv;
                }
            }
        }
        if psi.heisenberg_defect(1, 0)?.is_zero() {
            product = Some(conv);
            break;
        }
    }
    let product = product.ok_or_else(|| OracleError::Calibration("no product convention satisfies the relations".into()))?;

    let mut xi = Vec::new();
    for l in 1..=max_xi {
        let with = |c: VPower| -> Result<HallFn, OracleError> {
            let mut gens = xi.clone();
            gens.push(c);
            Psi::new(q, Calibration::trial(product, default_twist, gens, q))?.heisenberg_defect(l, 0)
        };
        let d0 = with(VPower { sign: 1, exponent: 0 })?;
        let d1 = with(VPower { sign: -1, exponent: 0 })?;
        // The defect is affine in the scale c: d(c) = a + c b with d(1) = d0, d(-1) = d1.
        let b = d0.sub(&d1).scale(&LaurentRat::constant(BigRational::new(1.into(), 2.into())));
        let a = d0.sub(&b);
        let (s, bs) = first_nonzero(&b).ok_or_else(|| OracleError::Calibration(format!("xi_{l} does not enter its relation")))?;
        let c = -(a.get(&s).coeff(0) / bs.coeff(0));
        let vp = VPower::recognize(q, &c)
            .ok_or_else(|| OracleError::Calibration(format!("xi_{l} normalization {c} is not a power of v")))?;
        if !with(vp)?.is_zero() {
            return Err(OracleError::Calibration(format!("no scalar normalization of xi_{l} satisfies the relation")));
        }
        xi.push(vp);
    }

    let mut coproduct = None;
    for tw in Twist::candidates() {
        let psi = Psi::new(q, Calibration::trial(product, tw, xi.clone(), q))?;
        if psi.coproduct_defect(1)?.is_zero() {
            coproduct = Some(tw);
            break;
        }
    }
    let coproduct = coproduct.ok_or_else(|| OracleError::Calibration("no coproduct twist matches".into()))?;
    Ok(Calibration::trial(product, coproduct, xi, q))
}

/// Number of pairs (vector bundle with twists at least `window`, partition)
/// of total class `class`.
pub fn vb_partition_pair_count(class: KClass, window: i32) -> usize {
    if class.rank == 0 {
        return if class.degree >= 0 { partition_count(class.degree as u32) } else { 0 };
    }
    let mut n = 0;
    let mut k = 0;
    while class.degree - k >= class.rank * window {
        n += bundles(class.rank as usize, class.degree - k, window).len() * partition_count(k as u32);
        k += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loopalg::UNBOUNDED;

    fn golden() -> Calibration {
        Calibration::load(Path::new(DEFAULT_GOLDEN)).unwrap()
    }

    #[test]
    fn golden_matches_recalibration() {
        let fresh = calibrate(4, 2).unwrap();
        assert_eq!(fresh.xi_generators[..], golden().xi_generators[..2]);
        assert_eq!(fresh.product, golden().product);
        assert_eq!(fresh.coproduct, golden().coproduct);
        assert_eq!(fresh.e_generator, golden().e_generator);
    }

    #[test]
    fn xi_one_is_the_sum_over_points() {
        let psi = Psi::new(2, golden()).unwrap();
        let xi = psi.xi(1).unwrap();
        assert_eq!(xi.support().count(), 3);
        for s in xi.support() {
            assert!(xi.get(s).is_one());
        }
    }

    #[test]
    fn image_is_multiplicative() {
        let psi = Psi::new(4, golden()).unwrap();
        let pairs = [
            (AlgElement::e(0, UNBOUNDED), AlgElement::e(1, UNBOUNDED)),
            (AlgElement::e(1, UNBOUNDED), AlgElement::e(-1, UNBOUNDED)),
            (AlgElement::xi(1), AlgElement::e(-1, UNBOUNDED)),
            (AlgElement::e(0, UNBOUNDED), AlgElement::xi(2)),
        ];
        for (x, y) in &pairs {
            assert!(psi.multiplicativity_defect(x, y).unwrap().is_zero());
        }
    }

    #[test]
    fn pair_counts() {
        assert_eq!(vb_partition_pair_count(KClass::new(0, 3), 0), 3);
        // O(1), O + T with T of degree 1.
        assert_eq!(vb_partition_pair_count(KClass::new(1, 1), 0), 2);
        // O+O only.
        assert_eq!(vb_partition_pair_count(KClass::new(2, 0), 0), 1);
    }
}
