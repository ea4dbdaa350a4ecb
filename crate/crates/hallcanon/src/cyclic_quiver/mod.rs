//! Nilpotent representations of the cyclic quiver over small finite
//! fields, their Hall algebra by enumeration, and the distinguished
//! elements `zeta_l`, `h_l`, `u_l`.

mod hall;
mod rep;

use std::path::Path;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use hall::{default_budget, subrep_census, CyclicHall, OrbitFn, OrbitPairFn, QuiverConvention};
pub use rep::{bracket, CyclicDim, Multisegment, NilRep};

use crate::cohp1_oracle::normalize_value;
use crate::exactalg::{rank_rational, LaurentRat};
use crate::symfunc::partitions_of;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuiverError {
    #[error(transparent)]
    Field(#[from] crate::ff::FieldError),
    #[error("representation is not nilpotent")]
    NotNilpotent,
    #[error("shape: {0}")]
    Shape(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl CyclicHall {
    /// `E_i^{(l)}`, the characteristic function of the point `N_{l e_i}`.
    pub fn e_power(&self, i: usize, l: u32) -> OrbitFn {
        OrbitFn::delta(self.q, Multisegment::new(self.n, [((i, 1), l)]).expect("vertex in range"), LaurentRat::one())
    }

    /// `1_{N_{(r, ..., r)}}`.
    pub fn one_all(&self, r: u32) -> OrbitFn {
        let d = CyclicDim::delta(self.n, r);
        let mut f = OrbitFn::zero(self.q, d.clone());
        for m in Multisegment::all_of_dim(&d) {
            f.add_value(m, &LaurentRat::one());
        }
        f
    }

    pub fn zeta(&self, l: u32) -> OrbitFn {
        let mut f = OrbitFn::zero(self.q, CyclicDim::delta(self.n, l));
        for lambda in partitions_of(l) {
            f.add_value(Multisegment::cycle_orbit(self.n, &lambda), &LaurentRat::one());
        }
        f
    }

    /// `h_l = (1/l) sum_lambda n(l(lambda) - 1) 1_{O_lambda}` with
    /// `n(k) = prod_{i <= k} (1 - v^{-2i})`.
    pub fn h(&self, l: u32) -> OrbitFn {
        let mut f = OrbitFn::zero(self.q, CyclicDim::delta(self.n, l));
        let inv_l = LaurentRat::constant(BigRational::new(1.into(), (l as i64).into()));
        for lambda in partitions_of(l) {
            let mut c = inv_l.clone();
            for i in 1..lambda.parts().len() {
                c = &c * &(&LaurentRat::one() - &LaurentRat::v_pow(-2 * i as i32));
            }
            f.add_value(Multisegment::cycle_orbit(self.n, &lambda), &c);
        }
        f
    }

    /// `u_1, ..., u_r` from `1_l = zeta_l + zeta_{l-1} u_1 + ... + u_l`.
    pub fn u_sequence(&self, r: u32) -> Result<Vec<OrbitFn>, QuiverError> {
        let mut us: Vec<OrbitFn> = vec![self.unit()];
        for l in 1..=r {
            let mut u = self.one_all(l);
            for (j, uj) in us.iter().enumerate() {
                u = u.sub(&self.product(&self.zeta(l - j as u32), uj)?);
            }
            us.push(u);
        }
        us.remove(0);
        Ok(us)
    }

    /// Whether `f` lies in the span of `E_i g` over all vertices `i` and all
    /// orbit functions `g`.
    pub fn check_in_eh(&self, f: &OrbitFn) -> Result<bool, QuiverError> {
        if f.is_zero() {
            return Ok(true);
        }
        let mut gens = Vec::new();
        for i in 1..=self.n {
            let Some(rest) = f.dims.checked_sub(&CyclicDim::simple(self.n, i)) else { continue };
            for m in Multisegment::all_of_dim(&rest) {
                gens.push(self.product(&self.e_power(i, 1), &OrbitFn::delta(self.q, m, LaurentRat::one()))?);
            }
        }
        let orbits = Multisegment::all_of_dim(&f.dims);
        let split = |g: &OrbitFn| -> (Vec<BigRational>, Vec<BigRational>) {
            let vals: Vec<LaurentRat> = orbits.iter().map(|m| g.get(m)).collect();
            (vals.iter().map(|c| c.coeff(0)).collect(), vals.iter().map(|c| c.coeff(1)).collect())
        };
        // Over Q(v) = Q + Q v, a vector a + b v has Q-coordinates (a, b), and
        // v (a + b v) = b / q + a v.
        let square = normalize_value(self.q, &LaurentRat::v_pow(1)).coeff(1).is_zero();
        let qr = BigRational::from_integer((self.q as i64).into());
        let embed = |a: &[BigRational], b: &[BigRational]| -> Vec<BigRational> { a.iter().chain(b).cloned().collect() };
        let mut rows = Vec::new();
        for g in &gens {
            let (a, b) = split(g);
            rows.push(embed(&a, &b));
            if !square {
                let bq: Vec<BigRational> = b.iter().map(|x| x / &qr).collect();
                rows.push(embed(&bq, &a));
            }
        }
        let base = rank_rational(&rows);
        let (a, b) = split(f);
        rows.push(embed(&a, &b));
        Ok(rank_rational(&rows) == base)
    }

    /// `E_i^2 E_j - [2] E_i E_j E_i + E_j E_i^2` for adjacent `i, j`.
    pub fn serre_defect(&self, i: usize, j: usize) -> Result<OrbitFn, QuiverError> {
        let (ei, ej) = (self.e_power(i, 1), self.e_power(j, 1));
        let two = normalize_value(self.q, &(&LaurentRat::v_pow(1) + &LaurentRat::v_pow(-1)));
        let a = self.product_all(&[&ei, &ei, &ej])?;
        let b = self.product_all(&[&ei, &ej, &ei])?;
        let c = self.product_all(&[&ej, &ei, &ei])?;
        Ok(a.sub(&b.scale(&two)).add(&c))
    }

    /// `E_i E_i - [2] E_i^{(2)}`.
    pub fn divided_power_defect(&self, i: usize) -> Result<OrbitFn, QuiverError> {
        let e = self.e_power(i, 1);
        let two = &LaurentRat::v_pow(1) + &LaurentRat::v_pow(-1);
        Ok(self.product(&e, &e)?.sub(&self.e_power(i, 2).scale(&two)))
    }

    /// `sum_{a + b = l} zeta_a zeta_b`-type check of `1 + sum zeta_l s^l =
    /// exp(sum h_l s^l)` in degree `l`.
    pub fn exp_defect(&self, l: u32) -> Result<OrbitFn, QuiverError> {
        // Sum over partitions mu of l of prod h_{mu_i} / prod m_i!.
        let mut rhs = OrbitFn::zero(self.q, CyclicDim::delta(self.n, l));
        for mu in partitions_of(l) {
            let hs: Vec<OrbitFn> = mu.parts().iter().map(|&p| self.h(p)).collect();
            let refs: Vec<&OrbitFn> = hs.iter().collect();
            let mut denom = BigRational::one();
            for k in 1..=l {
                for j in 1..=mu.multiplicity(k) {
                    denom *= BigRational::from_integer((j as i64).into());
                }
            }
            rhs = rhs.add(&self.product_all(&refs)?.scale(&LaurentRat::constant(denom.recip())));
        }
        Ok(self.zeta(l).sub(&rhs))
    }

    /// Restriction of `Delta(f)` to the split with quotient `(l, ..., l)`.
    pub fn diagonal_coproduct(&self, f: &OrbitFn, l: u32) -> Result<OrbitPairFn, QuiverError> {
        self.coproduct(f, &CyclicDim::delta(self.n, l))
    }
}

/// Location of the frozen product convention shipped with the crate.
pub const DEFAULT_GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/golden/v1/cyclic_calibration.json");

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct QuiverCalibration {
    pub format_version: u32,
    pub calibrated_at_q: u32,
    pub convention: QuiverConvention,
}

impl QuiverCalibration {
    pub fn load(path: &Path) -> Result<Self, QuiverError> {
        let text = std::fs::read_to_string(path).map_err(|e| QuiverError::Calibration(format!("{}: {e}", path.display())))?;
        let c: Self = serde_json::from_str(&text).map_err(|e| QuiverError::Calibration(format!("{}: {e}", path.display())))?;
        if c.format_version != 1 {
            return Err(QuiverError::Calibration(format!("unknown format version {}", c.format_version)));
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<(), QuiverError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| QuiverError::Calibration(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| QuiverError::Calibration(e.to_string()))
    }
}

/// First convention under which `E_i E_i = [2] E_i^{(2)}` and the quantum
/// Serre relations hold at `n = 3`.
pub fn calibrate(q: u32) -> Result<QuiverConvention, QuiverError> {
    'conv: for conv in QuiverConvention::candidates() {
        let h = CyclicHall::new(q, 3, conv)?;
        if !h.divided_power_defect(1)?.is_zero() {
            continue;
        }
        for (i, j) in [(1, 2), (2, 1)] {
            if !h.serre_defect(i, j)?.is_zero() {
                continue 'conv;
            }
        }
        return Ok(conv);
    }
    Err(QuiverError::Calibration("no product convention satisfies the Ringel relations".into()))
}

/// All conventions passing the checks of [`calibrate`].
pub fn passing_conventions(q: u32) -> Result<Vec<QuiverConvention>, QuiverError> {
    let mut out = Vec::new();
    for conv in QuiverConvention::candidates() {
        let h = CyclicHall::new(q, 3, conv)?;
        if h.divided_power_defect(1)?.is_zero() && h.serre_defect(1, 2)?.is_zero() && h.serre_defect(2, 1)?.is_zero() {
            out.push(conv);
        }
    }
    Ok(out)
}

/// One line of the appendix suite.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AppendixCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// `1_r - zeta_r` lies in `sum_i E_i H_p` for `r <= r_max`, and
/// `Delta_{l, r - l}(u_r)` is a scalar multiple of `u_l (x) u_{r-l}`.
pub fn appendix_checks(h: &CyclicHall, r_max: u32) -> Result<Vec<AppendixCheck>, QuiverError> {
    let mut out = Vec::new();
    for r in 1..=r_max {
        let f = h.one_all(r).sub(&h.zeta(r));
        let pass = h.check_in_eh(&f)?;
        out.push(AppendixCheck { name: format!("1_{r} - zeta_{r} in E H"), pass, detail: String::new() });
    }
    let us = h.u_sequence(r_max)?;
    for r in 2..=r_max {
        for l in 1..r {
            let lhs = h.diagonal_coproduct(&us[r as usize - 1], l)?;
            let rhs = OrbitPairFn::tensor(&us[l as usize - 1], &us[(r - l) as usize - 1]);
            let ratio = lhs.ratio(&rhs);
            let detail = match &ratio {
                Some(c) => format!("ratio {c}"),
                None => lhs
                    .values
                    .iter()
                    .map(|((a, b), c)| format!("{a}|{b}: {c} (expected proportional to {})", rhs.values.get(&(a.clone(), b.clone())).map_or("0".into(), |x| x.to_string())))
                    .collect::<Vec<_>>()
                    .join("; "),
            };
            out.push(AppendixCheck { name: format!("Delta_{{{l},{}}}(u_{r}) = u_{l} (x) u_{}", r - l, r - l), pass: ratio.is_some(), detail });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn golden() -> QuiverConvention {
        QuiverCalibration::load(Path::new(DEFAULT_GOLDEN)).unwrap().convention
    }

    fn hall(q: u32, n: usize) -> CyclicHall {
        CyclicHall::new(q, n, golden()).unwrap()
    }

    #[test]
    fn calibration_is_unique_and_frozen() {
        assert_eq!(passing_conventions(2).unwrap(), vec![golden()]);
        assert_eq!(calibrate(4).unwrap(), golden());
        let literal = CyclicHall::new(2, 2, QuiverConvention::LITERAL).unwrap();
        assert!(!literal.divided_power_defect(1).unwrap().is_zero());
    }

    #[test]
    fn square_of_a_simple() {
        let h = hall(2, 2);
        let e = h.e_power(1, 1);
        let sq = h.product(&e, &e).unwrap();
        let m = Multisegment::new(2, [((1, 1), 2)]).unwrap();
        // (1 + q) lines, times v^{{e_1, e_1}} = v.
        assert_eq!(sq.get(&m), normalize_value(2, &LaurentRat::from_ints(1, &[3])));
        assert_eq!(sq.values.len(), 1);
    }

    #[test]
    fn unit_is_neutral() {
        let h = hall(2, 2);
        let f = h.zeta(1);
        assert_eq!(h.product(&h.unit(), &f).unwrap(), f);
        assert_eq!(h.product(&f, &h.unit()).unwrap(), f);
        let d = h.coproduct(&h.unit(), &CyclicDim::zero(2)).unwrap();
        assert_eq!(d, OrbitPairFn::tensor(&h.unit(), &h.unit()));
    }

    #[test]
    fn jordan_quiver_matches_hall_polynomials() {
        for q in [2, 3] {
            let h = hall(q, 1);
            for n in 1..=4u32 {
                for k in 1..n {
                    for lambda in partitions_of(n - k) {
                        for mu in partitions_of(k) {
                            let f = OrbitFn::delta(q, Multisegment::cycle_orbit(1, &lambda), LaurentRat::one());
                            let g = OrbitFn::delta(q, Multisegment::cycle_orbit(1, &mu), LaurentRat::one());
                            let p = h.product(&f, &g).unwrap();
                            let qr = BigRational::from_integer((q as i64).into());
                            for nu in partitions_of(n) {
                                let want = crate::symfunc::hl_structure_constant(&lambda, &mu, &nu, &qr).unwrap();
                                let got = p.get(&Multisegment::cycle_orbit(1, &nu));
                                assert_eq!(got, LaurentRat::constant(want), "{lambda:?} {mu:?} {nu:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn associativity_small() {
        let h = hall(2, 2);
        let mut gens = Vec::new();
        for d in CyclicDim::delta(2, 1).below() {
            for m in Multisegment::all_of_dim(&d) {
                if !m.is_empty() {
                    gens.push(OrbitFn::delta(2, m, LaurentRat::one()));
                }
            }
        }
        for a in &gens {
            for b in &gens {
                for c in &gens {
                    let d = a.dims.add(&b.dims).add(&c.dims);
                    if d.dims.iter().any(|&x| x > 2) {
                        continue;
                    }
                    let l = h.product(&h.product(a, b).unwrap(), c).unwrap();
                    let r = h.product(a, &h.product(b, c).unwrap()).unwrap();
                    assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn orbit_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = crate::ff::Field::get(3).unwrap();
        for m in Multisegment::all_of_dim(&CyclicDim::new(vec![2, 1, 1]).unwrap()) {
            let r = NilRep::from_multisegment(3, &m).unwrap();
            for _ in 0..5 {
                let g: Vec<crate::ff::Mat> = r
                    .dim
                    .dims
                    .iter()
                    .map(|&d| loop {
                        let m: crate::ff::Mat = (0..d).map(|_| (0..d).map(|_| rng.gen_range(0..3u8)).collect()).collect();
                        if d == 0 || crate::ff::is_invertible(f, &m) {
                            break m;
                        }
                    })
                    .collect();
                assert_eq!(r.conjugate(&g).unwrap().orbit(), m);
            }
        }
    }

    #[test]
    fn h_and_zeta_satisfy_the_exponential_relation() {
        let h = hall(2, 2);
        assert_eq!(h.h(1), h.zeta(1));
        for l in 1..=2 {
            assert!(h.exp_defect(l).unwrap().is_zero());
        }
        let j = hall(2, 1);
        for l in 1..=3 {
            assert!(j.exp_defect(l).unwrap().is_zero());
        }
    }

    #[test]
    fn u_one_and_membership() {
        let h = hall(2, 2);
        let u = h.u_sequence(1).unwrap();
        assert_eq!(u[0], h.one_all(1).sub(&h.zeta(1)));
        assert!(h.check_in_eh(&u[0]).unwrap());
        assert!(!h.check_in_eh(&h.zeta(1)).unwrap());
        assert!(h.check_in_eh(&OrbitFn::zero(2, CyclicDim::delta(2, 1))).unwrap());
    }

    #[test]
    fn diagonal_coproducts_of_one_and_zeta() {
        let h = hall(2, 2);
        let q2 = LaurentRat::from_int(4);
        let d1 = h.diagonal_coproduct(&h.one_all(2), 1).unwrap();
        assert_eq!(d1.ratio(&OrbitPairFn::tensor(&h.one_all(1), &h.one_all(1))), Some(q2.clone()));
        let dz = h.diagonal_coproduct(&h.zeta(2), 1).unwrap();
        assert_eq!(dz.ratio(&OrbitPairFn::tensor(&h.zeta(1), &h.zeta(1))), Some(q2));
    }

    #[test]
    fn structure_constants_are_polynomial_in_q() {
        // Untwisted count of E_1 E_2 E_1 at the split orbit, a polynomial of degree <= 2.
        let count = |q: u32| -> BigRational {
            let h = CyclicHall::new(q, 2, QuiverConvention { left_on_sub: false, sign: 0 }).unwrap();
            let p = h.product_all(&[&h.e_power(1, 1), &h.e_power(2, 1), &h.e_power(1, 1)]).unwrap();
            p.get(&Multisegment::new(2, [((1, 1), 2), ((2, 1), 1)]).unwrap()).coeff(0)
        };
        let pts: Vec<(i64, BigRational)> = [2, 3, 4, 5, 7].iter().map(|&q| (q as i64, count(q))).collect();
        let lagrange = |x: i64| -> BigRational {
            let mut s = BigRational::zero();
            for i in 0..3 {
                let mut t = pts[i].1.clone();
                for j in 0..3 {
                    if i != j {
                        t = t * BigRational::new((x - pts[j].0).into(), (pts[i].0 - pts[j].0).into());
                    }
                }
                s += t;
            }
            s
        };
        for (x, y) in &pts[3..] {
            assert_eq!(&lagrange(*x), y);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let h = hall(2, 2).with_budget(2);
        assert!(matches!(h.product(&h.one_all(1), &h.one_all(1)), Err(QuiverError::Budget(_))));
    }
}
