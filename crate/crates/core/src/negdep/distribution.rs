use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{SubsetMask, MAX_GROUND};
use crate::matroid::WeightedComplex;
use crate::rational::{self, int, Ratio};

/// A distribution on subsets of `{0, .., n-1}`, i.e. on `{0,1}^n`.
/// Only positive masses are stored, so the key set is the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanDistribution {
    n: usize,
    mass: BTreeMap<SubsetMask, Ratio>,
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    n: usize,
    mass: BTreeMap<String, String>,
}

impl BooleanDistribution {
    /// Masses need not sum to one; zero masses are dropped.
    pub fn new(n: usize, mass: BTreeMap<SubsetMask, Ratio>) -> Result<Self> {
        if n == 0 || n > MAX_GROUND {
            return Err(Error::InvalidArgument(format!("ground size {n} outside 1..={MAX_GROUND}")));
        }
        let full = SubsetMask::full(n);
        let mut kept = BTreeMap::new();
        for (s, m) in mass {
            if !s.is_subset_of(full) {
                return Err(Error::InvalidArgument(format!("{s} is not a subset of a {n}-element ground set")));
            }
            if m < Ratio::zero() {
                return Err(Error::InvalidWeight(format!("negative mass {m} on {s}")));
            }
            if !m.is_zero() {
                kept.insert(s, m);
            }
        }
        Ok(BooleanDistribution { n, mass: kept })
    }

    /// `pi_r`, the normalised basis weights of a complex.
    pub fn from_complex(wc: &WeightedComplex) -> Self {
        let z = wc.z(wc.rank()).clone();
        let mass = wc.basis_weights().into_iter().map(|(b, w)| (b, w / &z)).collect();
        BooleanDistribution { n: wc.ground_size(), mass }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self) -> &BTreeMap<SubsetMask, Ratio> {
        &self.mass
    }

    pub fn get(&self, s: SubsetMask) -> Ratio {
        self.mass.get(&s).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        self.mass.keys().copied()
    }

    pub fn total(&self) -> Ratio {
        rational::sum(self.mass.values())
    }

    pub fn is_normalized(&self) -> bool {
        self.total().is_one()
    }

    pub fn normalize(mut self) -> Result<Self> {
        let t = self.total();
        if t.is_zero() {
            return Err(Error::InvalidDistribution("all masses are zero".into()));
        }
        for m in self.mass.values_mut() {
            *m /= &t;
        }
        Ok(self)
    }

    /// Common support size, if every support set has the same size.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut sizes = self.mass.keys().map(|s| s.len());
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }

    /// `Pr(i in X)` for every coordinate.
    pub fn marginals(&self) -> Vec<Ratio> {
        let mut out = vec![Ratio::zero(); self.n];
        for (s, m) in &self.mass {
            for e in s.elements() {
                out[e] += m;
            }
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawDistribution = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut mass = BTreeMap::new();
        for (k, v) in &raw.mass {
            let key = SubsetMask::parse_key(k, raw.n)?;
            if mass.insert(key, rational::parse(v)?).is_some() {
                return Err(Error::Parse(format!("duplicate set {k:?}")));
            }
        }
        Self::new(raw.n, mass)
    }

    pub fn to_json(&self) -> String {
        let raw = RawDistribution {
            n: self.n,
            mass: self.mass.iter().map(|(s, m)| (s.key(), rational::format(m))).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("string maps always serialise")
    }
}

/// The multiaffine polynomial `sum_S mass(S) prod_{i in S} x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingPolynomial {
    n: usize,
    terms: BTreeMap<SubsetMask, Ratio>,
}

impl GeneratingPolynomial {
    pub fn new(mu: &BooleanDistribution) -> Self {
        GeneratingPolynomial { n: mu.n, terms: mu.mass.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<SubsetMask, Ratio> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut sizes = self.terms.keys().map(|s| s.len());
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }

    /// `d^|I| / prod_{i in I} dx_i`.
    pub fn partial(&self, base: SubsetMask) -> GeneratingPolynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(s, _)| base.is_subset_of(**s))
            .map(|(s, c)| (s.difference(base), c.clone()))
            .collect();
        GeneratingPolynomial { n: self.n, terms }
    }

    pub fn evaluate(&self, x: &[Ratio]) -> Ratio {
        self.terms.iter().fold(Ratio::zero(), |acc, (s, c)| acc + c * monomial(*s, x))
    }

    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(s, c)| rational::to_f64(c) * s.elements().map(|e| x[e]).product::<f64>())
            .sum()
    }
}

pub(crate) fn monomial(s: SubsetMask, x: &[Ratio]) -> Ratio {
    s.elements().fold(Ratio::one(), |acc, e| acc * &x[e])
}

/// The rank-2 family on four elements with masses
/// `{0,1}: theta, {0,2}: 2` and `1` on the other four pairs, normalised.
pub fn theta_family(theta: &Ratio) -> Result<BooleanDistribution> {
    if *theta < Ratio::zero() {
        return Err(Error::InvalidArgument(format!("theta must be non-negative, got {theta}")));
    }
    let pairs = [
        ([0, 1], theta.clone()),
        ([0, 2], int(2)),
        ([0, 3], int(1)),
        ([1, 2], int(1)),
        ([1, 3], int(1)),
        ([2, 3], int(1)),
    ];
    let mass = pairs.into_iter().map(|(s, m)| (SubsetMask::from_elements(s), m)).collect();
    BooleanDistribution::new(4, mass)?.normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::build_uniform;
    use crate::rational::frac;

    fn s(e: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(e.iter().copied())
    }

    #[test]
    fn theta_one_masses() {
        let mu = theta_family(&int(1)).unwrap();
        assert_eq!(mu.get(s(&[0, 1])), frac(1, 7));
        assert_eq!(mu.get(s(&[0, 2])), frac(2, 7));
        assert_eq!(mu.get(s(&[2, 3])), frac(1, 7));
        assert!(mu.is_normalized());
        assert_eq!(mu.homogeneous_degree(), Some(2));
        let zero = theta_family(&int(0)).unwrap();
        assert_eq!(zero.support().count(), 5);
        assert!(theta_family(&int(-1)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mu = theta_family(&frac(1, 10)).unwrap();
        let back = BooleanDistribution::from_json(&mu.to_json()).unwrap();
        assert_eq!(mu, back);
        let parsed = BooleanDistribution::from_json(r#"{"n": 2, "mass": {"0": "1/2", "1": "1/2"}}"#).unwrap();
        assert_eq!(parsed.marginals(), vec![frac(1, 2), frac(1, 2)]);
        assert!(BooleanDistribution::from_json(r#"{"n": 2, "mass": {"5": "1"}}"#).is_err());
        assert!(BooleanDistribution::from_json(r#"{"n": 2, "mass": {"0": "-1"}}"#).is_err());
        assert!(BooleanDistribution::from_json("nope").is_err());
    }

    #[test]
    fn polynomial_partials() {
        let wc = WeightedComplex::uniform(build_uniform(3, 2).unwrap()).unwrap();
        let mu = BooleanDistribution::from_complex(&wc);
        let g = GeneratingPolynomial::new(&mu);
        assert_eq!(g.evaluate(&[int(1), int(1), int(1)]), int(1));
        let d0 = g.partial(s(&[0]));
        assert_eq!(d0.evaluate(&[int(5), int(2), int(3)]), frac(5, 3));
        assert!(g.partial(s(&[0, 1, 2])).is_zero());
        assert!((g.evaluate_f64(&[2.0, 1.0, 1.0]) - 5.0 / 3.0).abs() < 1e-15);
    }
}
