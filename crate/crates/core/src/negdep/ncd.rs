use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::rational::Ratio;

use super::distribution::BooleanDistribution;

pub const NCD_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CylinderKind {
    /// `E prod X_i <= prod E X_i`.
    Inclusion,
    /// `E prod (1 - X_i) <= prod E (1 - X_i)`.
    Exclusion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NcdWitness {
    pub set: SubsetMask,
    pub kind: CylinderKind,
    #[serde(serialize_with = "crate::negdep::serialize_ratio")]
    pub lhs: Ratio,
    #[serde(serialize_with = "crate::negdep::serialize_ratio")]
    pub rhs: Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NcdReport {
    pub sets_checked: u64,
    /// First violation in subset order (inclusion before exclusion).
    pub witness: Option<NcdWitness>,
    pub passed: bool,
}

/// Negative cylinder dependence over every index set, exactly. Joint
/// inclusion and exclusion probabilities come from superset and subset sums
/// over the whole cube.
pub fn ncd_check(mu: &BooleanDistribution) -> Result<NcdReport> {
    let n = mu.n();
    if n > NCD_MAX_N {
        return Err(Error::SizeCap(format!("ground size {n} exceeds {NCD_MAX_N} for the cylinder check")));
    }
    let mu = mu.clone().normalize()?;
    let size = 1usize << n;
    let mut cube = vec![Ratio::zero(); size];
    for (s, m) in mu.mass() {
        cube[s.0 as usize] = m.clone();
    }
    // up[S] = Pr(S subset of X), down[S] = Pr(X subset of S)
    let mut up = cube.clone();
    let mut down = cube;
    for i in 0..n {
        let bit = 1usize << i;
        for s in 0..size {
            if s & bit == 0 {
                let hi = up[s | bit].clone();
                up[s] += hi;
            } else {
                let lo = down[s & !bit].clone();
                down[s] += lo;
            }
        }
    }
    let p: Vec<Ratio> = (0..n).map(|i| up[1 << i].clone()).collect();
    let full = size - 1;
    let mut prod_in = vec![Ratio::one(); size];
    let mut prod_out = vec![Ratio::one(); size];
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        prod_in[s] = &prod_in[rest] * &p[low];
        prod_out[s] = &prod_out[rest] * (Ratio::one() - &p[low]);
    }
    for s in 0..size {
        let inclusion = &up[s];
        if *inclusion > prod_in[s] {
            return Ok(violation(s, CylinderKind::Inclusion, inclusion.clone(), prod_in[s].clone()));
        }
        // no element of s present: X inside the complement of s
        let exclusion = &down[full & !s];
        if *exclusion > prod_out[s] {
            return Ok(violation(s, CylinderKind::Exclusion, exclusion.clone(), prod_out[s].clone()));
        }
    }
    Ok(NcdReport { sets_checked: size as u64, witness: None, passed: true })
}

fn violation(s: usize, kind: CylinderKind, lhs: Ratio, rhs: Ratio) -> NcdReport {
    NcdReport {
        sets_checked: s as u64 + 1,
        witness: Some(NcdWitness { set: SubsetMask(s as u32), kind, lhs, rhs }),
        passed: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{build_uniform, WeightedComplex};
    use crate::negdep::theta_family;
    use crate::rational::{frac, int};
    use std::collections::BTreeMap;

    /// Direct evaluation of both sides for one set.
    fn sides(mu: &BooleanDistribution, s: SubsetMask) -> (Ratio, Ratio, Ratio, Ratio) {
        let marg = mu.marginals();
        let mut inc = Ratio::zero();
        let mut exc = Ratio::zero();
        for (t, m) in mu.mass() {
            if s.is_subset_of(*t) {
                inc += m;
            }
            if s.intersection(*t).is_empty() {
                exc += m;
            }
        }
        let pi: Ratio = s.elements().map(|e| marg[e].clone()).product();
        let po: Ratio = s.elements().map(|e| Ratio::one() - &marg[e]).product();
        (inc, pi, exc, po)
    }

    #[test]
    fn matroid_bases_pass() {
        let wc = WeightedComplex::uniform(build_uniform(3, 2).unwrap()).unwrap();
        let mu = BooleanDistribution::from_complex(&wc);
        let r = ncd_check(&mu).unwrap();
        assert!(r.passed);
        assert_eq!(r.sets_checked, 8);
        let (inc, pi, exc, po) = sides(&mu, SubsetMask::from_elements([0, 1]));
        assert_eq!((inc, pi), (frac(1, 3), frac(4, 9)));
        assert_eq!((exc, po), (int(0), frac(1, 9)));
    }

    #[test]
    fn product_is_tight() {
        let p = [frac(1, 3), frac(1, 2), frac(3, 4)];
        let mass = (0u32..8)
            .map(|s| {
                let m: Ratio = (0..3).map(|i| if s >> i & 1 == 1 { p[i].clone() } else { Ratio::one() - &p[i] }).product();
                (SubsetMask(s), m)
            })
            .collect();
        let mu = BooleanDistribution::new(3, mass).unwrap();
        assert!(ncd_check(&mu).unwrap().passed);
        for s in 0u32..8 {
            let (inc, pi, exc, po) = sides(&mu, SubsetMask(s));
            assert_eq!(inc, pi);
            assert_eq!(exc, po);
        }
    }

    #[test]
    fn positive_correlation_fails() {
        // two perfectly correlated coins
        let mu = BooleanDistribution::new(
            2,
            BTreeMap::from([(SubsetMask::EMPTY, frac(1, 2)), (SubsetMask::from_elements([0, 1]), frac(1, 2))]),
        )
        .unwrap();
        let r = ncd_check(&mu).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.set, SubsetMask::from_elements([0, 1]));
        assert_eq!(w.kind, CylinderKind::Inclusion);
        assert_eq!((w.lhs, w.rhs), (frac(1, 2), frac(1, 4)));
    }

    #[test]
    fn theta_family_matches_direct() {
        for t in [int(0), frac(1, 10), int(1), int(6), int(20)] {
            let mu = theta_family(&t).unwrap();
            let r = ncd_check(&mu).unwrap();
            let direct = (0u32..16).all(|s| {
                let (inc, pi, exc, po) = sides(&mu, SubsetMask(s));
                inc <= pi && exc <= po
            });
            assert_eq!(r.passed, direct, "theta = {t}");
        }
    }
}
