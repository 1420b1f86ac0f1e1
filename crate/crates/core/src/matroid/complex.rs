use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::rational::{self, factorial, Ratio};

use super::{contract_matroid, Matroid};

/// Cap on the size of any single level set.
pub const MAX_LEVEL_SIZE: usize = 20_000;

/// The independent sets of a matroid stratified by size, with the
/// recursive weights `w(I) = sum of w over one-element extensions`.
#[derive(Debug, Clone)]
pub struct WeightedComplex {
    matroid: Matroid,
    rank: usize,
    levels: Vec<Vec<SubsetMask>>,
    index: Vec<HashMap<SubsetMask, usize>>,
    weights: Vec<Vec<Ratio>>,
    z: Vec<Ratio>,
}

fn enumerate_levels(m: &Matroid) -> Result<Vec<Vec<SubsetMask>>> {
    let n = m.ground_size();
    let mut levels = vec![vec![SubsetMask::EMPTY]];
    if !m.is_independent(SubsetMask::EMPTY) {
        return Err(Error::InvalidSupport("empty set is not independent".into()));
    }
    loop {
        let prev = levels.last().unwrap();
        // every set is generated exactly once, from itself minus its largest element
        let mut next = Vec::new();
        for &set in prev {
            let start = set.elements().last().map_or(0, |e| e + 1);
            for e in start..n {
                let cand = set.with(e);
                if m.is_independent(cand) {
                    next.push(cand);
                }
            }
            if next.len() > MAX_LEVEL_SIZE {
                return Err(Error::SizeCap(format!(
                    "level {} has more than {MAX_LEVEL_SIZE} sets",
                    levels.len()
                )));
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        levels.push(next);
    }
    Ok(levels)
}

impl WeightedComplex {
    /// Builds the complex from weights on the bases. Every basis must carry
    /// a strictly positive weight; `Z_r` is the sum of the given weights.
    pub fn build(matroid: Matroid, basis_weights: &BTreeMap<SubsetMask, Ratio>) -> Result<Self> {
        let levels = enumerate_levels(&matroid)?;
        let rank = levels.len() - 1;
        let index: Vec<HashMap<SubsetMask, usize>> = levels
            .iter()
            .map(|lvl| lvl.iter().enumerate().map(|(i, &s)| (s, i)).collect())
            .collect();

        for (set, w) in basis_weights {
            if !matroid.is_independent(*set) {
                return Err(Error::InvalidSupport(format!("weight given for dependent set {set}")));
            }
            if set.len() != rank {
                return Err(Error::InvalidSupport(format!(
                    "weight given for non-maximal set {set} (rank is {rank})"
                )));
            }
            if *w <= Ratio::zero() {
                return Err(Error::InvalidWeight(format!("weight {w} on {set} is not positive")));
            }
        }
        let mut top = Vec::with_capacity(levels[rank].len());
        for b in &levels[rank] {
            match basis_weights.get(b) {
                Some(w) => top.push(w.clone()),
                None => return Err(Error::InvalidSupport(format!("basis {b} has no weight"))),
            }
        }

        let n = matroid.ground_size();
        let mut weights: Vec<Vec<Ratio>> = vec![Vec::new(); rank + 1];
        weights[rank] = top;
        for k in (0..rank).rev() {
            let (lower, upper) = weights.split_at_mut(k + 1);
            let up = &upper[0];
            lower[k] = levels[k]
                .iter()
                .map(|&set| {
                    let mut acc = Ratio::zero();
                    for e in 0..n {
                        if set.contains(e) {
                            continue;
                        }
                        if let Some(&j) = index[k + 1].get(&set.with(e)) {
                            acc += &up[j];
                        }
                    }
                    acc
                })
                .collect();
        }
        let z = weights.iter().map(rational::sum).collect();
        Ok(WeightedComplex { matroid, rank, levels, index, weights, z })
    }

    /// All bases weighted 1 (the uniform distribution over bases).
    pub fn uniform(matroid: Matroid) -> Result<Self> {
        let levels = enumerate_levels(&matroid)?;
        let bases = levels.last().unwrap();
        let weights = bases.iter().map(|&b| (b, Ratio::one())).collect();
        Self::build(matroid, &weights)
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ground_size(&self) -> usize {
        self.matroid.ground_size()
    }

    pub fn level(&self, k: usize) -> &[SubsetMask] {
        &self.levels[k]
    }

    pub fn level_weights(&self, k: usize) -> &[Ratio] {
        &self.weights[k]
    }

    pub fn index_of(&self, set: SubsetMask) -> Option<usize> {
        self.index.get(set.len()).and_then(|m| m.get(&set).copied())
    }

    /// `w(set)`, zero for dependent sets.
    pub fn weight(&self, set: SubsetMask) -> Ratio {
        match self.index_of(set) {
            Some(i) => self.weights[set.len()][i].clone(),
            None => Ratio::zero(),
        }
    }

    pub fn z(&self, k: usize) -> &Ratio {
        &self.z[k]
    }

    pub fn bases(&self) -> &[SubsetMask] {
        &self.levels[self.rank]
    }

    pub fn basis_weights(&self) -> BTreeMap<SubsetMask, Ratio> {
        self.bases().iter().copied().zip(self.weights[self.rank].iter().cloned()).collect()
    }

    pub(crate) fn check_level(&self, k: usize) -> Result<()> {
        if k > self.rank {
            return Err(Error::InvalidArgument(format!("level {k} exceeds rank {}", self.rank)));
        }
        Ok(())
    }

    pub(crate) fn check_independent(&self, set: SubsetMask) -> Result<()> {
        if self.index_of(set).is_none() {
            return Err(Error::InvalidArgument(format!("{set} is not independent")));
        }
        Ok(())
    }

    /// `pi_k(I) = w(I) / Z_k`.
    pub fn level_distribution(&self, k: usize) -> Result<LevelDistribution> {
        self.check_level(k)?;
        let p = self.weights[k].iter().map(|w| w / &self.z[k]).collect();
        Ok(LevelDistribution { level: k, states: self.levels[k].clone(), p })
    }

    /// `pi_{I,k}`, laid out over all of `M(k + |I|)`:
    /// `k! w(J) / w(I)` on supersets `J` of `I`, zero elsewhere.
    pub fn conditional_distribution(&self, base: SubsetMask, k: usize) -> Result<LevelDistribution> {
        self.check_independent(base)?;
        if base.len() + k > self.rank {
            return Err(Error::InvalidArgument(format!(
                "level {k} above {base} exceeds rank {}",
                self.rank
            )));
        }
        let top = base.len() + k;
        let scale = factorial(k) / self.weight(base);
        let p: Vec<Ratio> = self.levels[top]
            .iter()
            .zip(&self.weights[top])
            .map(|(&j, w)| if base.is_subset_of(j) { w * &scale } else { Ratio::zero() })
            .collect();
        debug_assert!(rational::sum(&p).is_one(), "normaliser of pi_(I,k) must be w(I)/k!");
        Ok(LevelDistribution { level: top, states: self.levels[top].clone(), p })
    }

    /// Contraction by an independent set, keeping the original element labels.
    pub fn contract(&self, base: SubsetMask) -> Result<WeightedComplex> {
        self.check_independent(base)?;
        if base.len() >= self.rank && self.rank > 0 {
            return Err(Error::InvalidArgument(format!(
                "contraction by {base} leaves rank 0 (need |I| <= r-1)"
            )));
        }
        if base.is_empty() {
            return Ok(self.clone());
        }
        let m = contract_matroid(&self.matroid, base)?;
        let weights: BTreeMap<SubsetMask, Ratio> = self
            .bases()
            .iter()
            .zip(&self.weights[self.rank])
            .filter(|(b, _)| base.is_subset_of(**b))
            .map(|(b, w)| (b.difference(base), w.clone()))
            .collect();
        WeightedComplex::build(m, &weights)
    }

    /// `W_I[u][v] = w(I + u + v)` over `E \ I`.
    pub fn pair_weight_matrix(&self, base: SubsetMask) -> Result<PairWeightMatrix> {
        self.check_independent(base)?;
        if base.len() + 2 > self.rank {
            return Err(Error::InvalidArgument(format!(
                "pair-weight matrix needs |I| <= r-2, got |I| = {} with r = {}",
                base.len(),
                self.rank
            )));
        }
        let elements: Vec<usize> = (0..self.ground_size()).filter(|&e| !base.contains(e)).collect();
        let m = elements.len();
        let mut entries = vec![vec![Ratio::zero(); m]; m];
        for a in 0..m {
            for b in (a + 1)..m {
                let w = self.weight(base.with(elements[a]).with(elements[b]));
                entries[a][b] = w.clone();
                entries[b][a] = w;
            }
        }
        Ok(PairWeightMatrix { base, elements, entries })
    }

    /// Smallest stationary probability at level `k`.
    pub fn pi_min(&self, k: usize) -> Result<Ratio> {
        self.check_level(k)?;
        let wmin = self.weights[k].iter().min().cloned().unwrap_or_else(Ratio::zero);
        Ok(wmin / &self.z[k])
    }

    /// Exact check of the structural identities of the weight table.
    pub fn structure_report(&self) -> StructureReport {
        let n = self.ground_size();
        let mut recursion_ok = true;
        for k in 0..self.rank {
            for (i, &set) in self.levels[k].iter().enumerate() {
                let s = (0..n)
                    .filter(|&e| !set.contains(e))
                    .map(|e| self.weight(set.with(e)))
                    .fold(Ratio::zero(), |a, b| a + b);
                if s != self.weights[k][i] {
                    recursion_ok = false;
                }
            }
        }
        let mut closed_form_ok = true;
        for k in 0..=self.rank {
            let f = factorial(self.rank - k);
            for (i, &set) in self.levels[k].iter().enumerate() {
                let s = self
                    .bases()
                    .iter()
                    .zip(&self.weights[self.rank])
                    .filter(|(b, _)| set.is_subset_of(**b))
                    .fold(Ratio::zero(), |a, (_, w)| a + w);
                if &f * s != self.weights[k][i] {
                    closed_form_ok = false;
                }
            }
        }
        let z0 = &self.z[0];
        let normalizers_ok = (0..=self.rank).all(|k| &(factorial(k) * &self.z[k]) == z0)
            && *z0 == self.weight(SubsetMask::EMPTY);
        let positive = self.weights.iter().flatten().all(|w| *w > Ratio::zero());
        StructureReport { recursion_ok, closed_form_ok, normalizers_ok, positive }
    }
}

/// Outcome of [`WeightedComplex::structure_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureReport {
    pub recursion_ok: bool,
    pub closed_form_ok: bool,
    pub normalizers_ok: bool,
    pub positive: bool,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.recursion_ok && self.closed_form_ok && self.normalizers_ok && self.positive
    }
}

/// A distribution on one level set, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelDistribution {
    pub level: usize,
    pub states: Vec<SubsetMask>,
    pub p: Vec<Ratio>,
}

impl LevelDistribution {
    pub fn to_f64(&self) -> Vec<f64> {
        self.p.iter().map(rational::to_f64).collect()
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn total(&self) -> Ratio {
        rational::sum(&self.p)
    }
}

/// `W_I` with rows and columns indexed by `elements` (the complement of `base`).
#[derive(Debug, Clone, PartialEq)]
pub struct PairWeightMatrix {
    pub base: SubsetMask,
    pub elements: Vec<usize>,
    pub entries: Vec<Vec<Ratio>>,
}

impl PairWeightMatrix {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn is_symmetric(&self) -> bool {
        let m = self.dim();
        (0..m).all(|a| (0..m).all(|b| self.entries[a][b] == self.entries[b][a]))
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |a, b| rational::to_f64(&self.entries[a][b]))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_dmatrix()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Number of eigenvalues above `tol` after scaling to unit max-abs entry.
    pub fn positive_eigenvalue_count(&self, tol: f64) -> usize {
        crate::linalg::positive_eigenvalue_count(&self.to_dmatrix(), tol)
    }

    /// `f^T W f` for `f` indexed like `elements`.
    pub fn quadratic_form(&self, f: &[f64]) -> f64 {
        let m = self.dim();
        let mut acc = 0.0;
        for a in 0..m {
            for b in 0..m {
                acc += f[a] * rational::to_f64(&self.entries[a][b]) * f[b];
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{build_from_bases, build_graphic, build_partition, build_uniform};
    use crate::rational::{frac, int};

    fn s(e: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(e.iter().copied())
    }

    fn u23() -> WeightedComplex {
        WeightedComplex::uniform(build_uniform(3, 2).unwrap()).unwrap()
    }

    #[test]
    fn u23_weights() {
        let wc = u23();
        assert_eq!(wc.rank(), 2);
        for e in 0..3 {
            assert_eq!(wc.weight(s(&[e])), int(2));
        }
        assert_eq!(wc.weight(SubsetMask::EMPTY), int(6));
        assert_eq!(wc.z(1), &int(6));
        assert_eq!(wc.z(2), &int(3));
        assert_eq!(wc.weight(s(&[0, 1, 2])), int(0));
        assert!(wc.structure_report().passed());
    }

    #[test]
    fn single_basis() {
        let m = build_from_bases(2, &[s(&[0, 1])]).unwrap();
        let wc = WeightedComplex::uniform(m).unwrap();
        assert_eq!(wc.weight(s(&[0])), int(1));
        assert_eq!(wc.weight(s(&[1])), int(1));
        assert_eq!(wc.weight(SubsetMask::EMPTY), int(2));
    }

    #[test]
    fn graphic_counts() {
        let k3 = WeightedComplex::uniform(build_graphic(&[(0, 1), (1, 2), (0, 2)]).unwrap()).unwrap();
        assert_eq!(k3.bases().len(), 3);
        let k4_edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let k4 = WeightedComplex::uniform(build_graphic(&k4_edges).unwrap()).unwrap();
        assert_eq!(k4.rank(), 3);
        // brute force: acyclic 3-edge subsets of K4
        let brute = (0u32..64)
            .filter(|b| b.count_ones() == 3)
            .filter(|&b| {
                let mut parent = [0usize, 1, 2, 3];
                fn root(p: &mut [usize; 4], mut x: usize) -> usize {
                    while p[x] != x {
                        x = p[x];
                    }
                    x
                }
                for e in SubsetMask(b).elements() {
                    let (u, v) = k4_edges[e];
                    let (a, c) = (root(&mut parent, u), root(&mut parent, v));
                    if a == c {
                        return false;
                    }
                    parent[a] = c;
                }
                true
            })
            .count();
        assert_eq!(brute, 16);
        assert_eq!(k4.bases().len(), 16);
    }

    #[test]
    fn doubled_path_bases() {
        let m = build_graphic(&[(0, 1), (0, 1), (1, 2), (1, 2)]).unwrap();
        let wc = WeightedComplex::uniform(m).unwrap();
        assert_eq!(wc.bases(), &[s(&[0, 2]), s(&[1, 2]), s(&[0, 3]), s(&[1, 3])]);
    }

    #[test]
    fn build_rejects_bad_support() {
        let m = build_uniform(3, 2).unwrap();
        let mut w = BTreeMap::new();
        w.insert(s(&[0]), int(1));
        assert!(matches!(WeightedComplex::build(m.clone(), &w), Err(Error::InvalidSupport(_))));
        let mut w = BTreeMap::new();
        w.insert(s(&[0, 1, 2]), int(1));
        assert!(matches!(WeightedComplex::build(m.clone(), &w), Err(Error::InvalidSupport(_))));
        let mut w: BTreeMap<_, _> = [s(&[0, 1]), s(&[0, 2]), s(&[1, 2])].iter().map(|&b| (b, int(1))).collect();
        w.insert(s(&[1, 2]), int(0));
        assert!(matches!(WeightedComplex::build(m.clone(), &w), Err(Error::InvalidWeight(_))));
        w.remove(&s(&[1, 2]));
        assert!(matches!(WeightedComplex::build(m, &w), Err(Error::InvalidSupport(_))));
    }

    #[test]
    fn level_and_conditional_distributions() {
        let wc = u23();
        let third = frac(1, 3);
        assert_eq!(wc.level_distribution(2).unwrap().p, vec![third.clone(); 3]);
        assert_eq!(wc.level_distribution(1).unwrap().p, vec![third; 3]);
        let c = wc.conditional_distribution(s(&[0]), 1).unwrap();
        assert_eq!(c.states, vec![s(&[0, 1]), s(&[0, 2]), s(&[1, 2])]);
        assert_eq!(c.p, vec![frac(1, 2), frac(1, 2), int(0)]);
        let point = wc.conditional_distribution(s(&[1]), 0).unwrap();
        assert_eq!(point.p, vec![int(0), int(1), int(0)]);
        assert!(wc.conditional_distribution(s(&[0]), 2).is_err());
        assert!(wc.level_distribution(3).is_err());
    }

    #[test]
    fn contraction() {
        let wc = u23();
        let same = wc.contract(SubsetMask::EMPTY).unwrap();
        assert_eq!(same.levels, wc.levels);
        assert_eq!(same.weights, wc.weights);
        let c = wc.contract(s(&[0])).unwrap();
        assert_eq!(c.rank(), 1);
        assert_eq!(c.level(1), &[s(&[1]), s(&[2])]);
        assert_eq!(c.weight(s(&[1])), int(1));
        assert_eq!(c.weight(s(&[2])), int(1));
        assert!(wc.contract(s(&[0, 1])).is_err());
    }

    #[test]
    fn pair_weights_u23() {
        let wc = u23();
        let w = wc.pair_weight_matrix(SubsetMask::EMPTY).unwrap();
        assert!(w.is_symmetric());
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(w.entries[a][b], if a == b { int(0) } else { int(1) });
            }
        }
        let ev = w.eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] + 1.0).abs() < 1e-12 && (ev[2] - 2.0).abs() < 1e-12);
        assert_eq!(w.positive_eigenvalue_count(1e-9), 1);
        assert!(wc.pair_weight_matrix(s(&[0])).is_err());
    }

    #[test]
    fn pair_weight_row_sums_at_top() {
        let wc = WeightedComplex::uniform(build_partition(&[vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap()).unwrap();
        for &base in wc.level(1) {
            let w = wc.pair_weight_matrix(base).unwrap();
            for (a, &u) in w.elements.iter().enumerate() {
                let row = rational::sum(&w.entries[a]);
                assert_eq!(row, wc.weight(base.with(u)));
            }
        }
    }
}
