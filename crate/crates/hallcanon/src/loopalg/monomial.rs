use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cohp1_oracle::KClass;
use crate::exactalg::{q_factorial, LaurentRat};
use crate::symfunc::Partition;

/// `E_{t_1}^{(d_1)} ... E_{t_r}^{(d_r)} s_lambda(xi)` with `t_1 < ... < t_r`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PBWMonomial {
    e_part: Vec<(i32, u32)>,
    torsion: Partition,
}

impl PBWMonomial {
    /// Panics unless twists strictly increase and multiplicities are positive.
    pub fn new(e_part: Vec<(i32, u32)>, torsion: Partition) -> Self {
        assert!(e_part.iter().all(|&(_, m)| m > 0), "multiplicities must be positive");
        assert!(e_part.windows(2).all(|w| w[0].0 < w[1].0), "twists must strictly increase");
        PBWMonomial { e_part, torsion }
    }

    pub fn unit() -> Self {
        Self::default()
    }

    pub fn e(t: i32) -> Self {
        PBWMonomial { e_part: vec![(t, 1)], torsion: Partition::empty() }
    }

    pub fn schur(lambda: Partition) -> Self {
        PBWMonomial { e_part: Vec::new(), torsion: lambda }
    }

    /// Groups a nondecreasing word of twists into divided-power blocks.
    pub fn from_sorted_word(word: &[i32], torsion: Partition) -> Self {
        let mut e_part: Vec<(i32, u32)> = Vec::new();
        for &t in word {
            match e_part.last_mut() {
                Some((s, m)) if *s == t => *m += 1,
                Some((s, _)) => {
                    assert!(*s < t, "word must be sorted");
                    e_part.push((t, 1));
                }
                None => e_part.push((t, 1)),
            }
        }
        PBWMonomial { e_part, torsion }
    }

    pub fn e_part(&self) -> &[(i32, u32)] {
        &self.e_part
    }

    pub fn torsion(&self) -> &Partition {
        &self.torsion
    }

    pub fn rank(&self) -> i32 {
        self.e_part.iter().map(|&(_, m)| m as i32).sum()
    }

    pub fn degree(&self) -> i32 {
        self.e_part.iter().map(|&(t, m)| t * m as i32).sum::<i32>() + self.torsion.size() as i32
    }

    pub fn class(&self) -> KClass {
        KClass::new(self.rank(), self.degree())
    }

    pub fn min_twist(&self) -> Option<i32> {
        self.e_part.first().map(|&(t, _)| t)
    }

    /// The plain word `t_1^{d_1} ... t_r^{d_r}`.
    pub fn word(&self) -> Vec<i32> {
        self.e_part.iter().flat_map(|&(t, m)| std::iter::repeat(t).take(m as usize)).collect()
    }

    /// `prod [d_i]!`, the factor between plain and divided powers.
    pub fn divided_factor(&self) -> LaurentRat {
        self.e_part.iter().fold(LaurentRat::one(), |acc, &(_, m)| &acc * &q_factorial(m))
    }

    pub fn shift(&self, k: i32) -> Self {
        PBWMonomial { e_part: self.e_part.iter().map(|&(t, m)| (t + k, m)).collect(), torsion: self.torsion.clone() }
    }

    pub fn with_torsion(&self, torsion: Partition) -> Self {
        PBWMonomial { e_part: self.e_part.clone(), torsion }
    }

    pub fn in_window(&self, window: i32) -> bool {
        self.min_twist().map_or(true, |t| t >= window)
    }
}

impl fmt::Display for PBWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .e_part
            .iter()
            .map(|&(t, m)| if m == 1 { format!("E[{t}]") } else { format!("E[{t}]^({m})") })
            .collect();
        if !self.torsion.is_empty() {
            parts.push(format!("s[{}]", self.torsion));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

impl fmt::Debug for PBWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for PBWMonomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.e_part, &self.torsion).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PBWMonomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let (e_part, torsion): (Vec<(i32, u32)>, Partition) = Deserialize::deserialize(d)?;
        if e_part.iter().any(|&(_, m)| m == 0) || e_part.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(D::Error::custom("e_part must have strictly increasing twists and positive multiplicities"));
        }
        Ok(PBWMonomial { e_part, torsion })
    }
}

/// All PBW monomials of `class` with twists `>= window`.
pub fn window_monomials(class: KClass, window: i32) -> Vec<PBWMonomial> {
    let mut out = Vec::new();
    if class.rank < 0 || (class.rank == 0 && class.degree < 0) {
        return out;
    }
    // Nondecreasing words of length `rank` with letters >= window and sum
    // <= degree; the remainder is the torsion size.
    fn go(left: i32, min: i32, budget: i32, window: i32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        let _ = window;
        // Remaining letters are all >= t, so t * left <= budget.
        let mut t = min;
        while t * left <= budget {
            cur.push(t);
            go(left - 1, t, budget - t, window, cur, out);
            cur.pop();
            t += 1;
        }
    }
    let mut words = Vec::new();
    go(class.rank, window, class.degree, window, &mut Vec::new(), &mut words);
    for w in words {
        let rest = class.degree - w.iter().sum::<i32>();
        for lambda in crate::symfunc::partitions_of(rest as u32) {
            out.push(PBWMonomial::from_sorted_word(&w, lambda));
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_and_word() {
        let m = PBWMonomial::new(vec![(0, 2), (3, 1)], Partition::new(vec![2, 1]));
        assert_eq!(m.class(), KClass::new(3, 6));
        assert_eq!(m.word(), vec![0, 0, 3]);
        assert_eq!(PBWMonomial::from_sorted_word(&[0, 0, 3], Partition::new(vec![2, 1])), m);
        assert_eq!(m.to_string(), "E[0]^(2) E[3] s[21]");
    }

    #[test]
    #[should_panic]
    fn rejects_unsorted() {
        PBWMonomial::new(vec![(2, 1), (1, 1)], Partition::empty());
    }

    #[test]
    fn window_counts() {
        // class (1,0), window -2: E_0, E_-1 s_1, E_-2 {s_2, s_11}
        assert_eq!(window_monomials(KClass::new(1, 0), -2).len(), 4);
        assert_eq!(window_monomials(KClass::new(1, 0), 1).len(), 0);
        assert_eq!(window_monomials(KClass::new(0, 4), 0).len(), 5);
        // class (2,0), window -1: words (-1,1) and (0,0) pure, (-1,0) with s_1, (-1,-1) with s_2, s_11
        assert_eq!(window_monomials(KClass::new(2, 0), -1).len(), 5);
    }

    #[test]
    fn json_shape() {
        let m = PBWMonomial::new(vec![(-1, 1)], Partition::new(vec![1]));
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[[-1,1]],[1]]");
        let back: PBWMonomial = serde_json::from_str("[[[-1,1]],[1]]").unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<PBWMonomial>("[[[1,1],[0,1]],[]]").is_err());
    }
}
