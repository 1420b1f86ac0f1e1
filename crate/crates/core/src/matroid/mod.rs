//! Matroids given by independence oracles, their weighted complexes and contractions.

mod axioms;
mod complex;
pub mod descriptor;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

pub use axioms::{verify_axioms, AxiomReport, AXIOM_CHECK_MAX_N};
pub use complex::{
    LevelDistribution, PairWeightMatrix, StructureReport, WeightedComplex, MAX_LEVEL_SIZE,
};

use crate::error::{Error, Result};
use crate::mask::{GroundSet, SubsetMask, MAX_GROUND};

/// Membership test for the independent sets of a set system on `0..n`.
pub trait IndependenceOracle: Send + Sync + fmt::Debug {
    fn ground_size(&self) -> usize;
    fn is_independent(&self, set: SubsetMask) -> bool;
}

/// Which constructor produced a matroid. Kept around so that
/// kind-specific observables (e.g. spanning-tree statistics) can be built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatroidKind {
    Uniform { n: usize, rank: usize },
    Partition { blocks: Vec<Vec<usize>> },
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
    Explicit,
    Contraction { base: SubsetMask },
}

/// An independence oracle tagged with its kind.
#[derive(Debug, Clone)]
pub struct Matroid {
    kind: MatroidKind,
    oracle: Arc<dyn IndependenceOracle>,
}

impl Matroid {
    pub fn new(kind: MatroidKind, oracle: Arc<dyn IndependenceOracle>) -> Self {
        Matroid { kind, oracle }
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    pub fn oracle(&self) -> &Arc<dyn IndependenceOracle> {
        &self.oracle
    }

    pub fn ground_size(&self) -> usize {
        self.oracle.ground_size()
    }

    pub fn is_independent(&self, set: SubsetMask) -> bool {
        set.is_subset_of(SubsetMask::full(self.ground_size())) && self.oracle.is_independent(set)
    }

    /// Greedy rank of the whole ground set.
    pub fn rank(&self) -> usize {
        let mut set = SubsetMask::EMPTY;
        for e in 0..self.ground_size() {
            if self.is_independent(set.with(e)) {
                set = set.with(e);
            }
        }
        set.len()
    }
}

#[derive(Debug)]
struct Uniform {
    n: usize,
    rank: usize,
}

impl IndependenceOracle for Uniform {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn is_independent(&self, set: SubsetMask) -> bool {
        set.len() <= self.rank
    }
}

#[derive(Debug)]
struct Partition {
    n: usize,
    blocks: Vec<SubsetMask>,
}

impl IndependenceOracle for Partition {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn is_independent(&self, set: SubsetMask) -> bool {
        self.blocks.iter().all(|b| set.intersection(*b).len() <= 1)
    }
}

#[derive(Debug)]
struct Graphic {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl IndependenceOracle for Graphic {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }
    fn is_independent(&self, set: SubsetMask) -> bool {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        for e in set.elements() {
            let (u, v) = self.edges[e];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return false;
            }
            parent[ru] = rv;
        }
        true
    }
}

/// A family given by an explicit list of sets. Not necessarily a matroid.
#[derive(Debug)]
struct Explicit {
    n: usize,
    family: HashSet<SubsetMask>,
}

impl IndependenceOracle for Explicit {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn is_independent(&self, set: SubsetMask) -> bool {
        self.family.contains(&set)
    }
}

#[derive(Debug)]
struct Contracted {
    inner: Arc<dyn IndependenceOracle>,
    base: SubsetMask,
}

impl IndependenceOracle for Contracted {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn is_independent(&self, set: SubsetMask) -> bool {
        set.intersection(self.base).is_empty() && self.inner.is_independent(set.union(self.base))
    }
}

/// `U(r, n)`: every set of size at most `r` is independent.
pub fn build_uniform(n: usize, rank: usize) -> Result<Matroid> {
    GroundSet::new(n)?;
    if rank == 0 || rank > n {
        return Err(Error::InvalidParameters(format!("rank {rank} outside 1..={n}")));
    }
    Ok(Matroid::new(MatroidKind::Uniform { n, rank }, Arc::new(Uniform { n, rank })))
}

/// Partition matroid: at most one element from each block.
pub fn build_partition(blocks: &[Vec<usize>]) -> Result<Matroid> {
    let n: usize = blocks.iter().map(Vec::len).sum();
    GroundSet::new(n)?;
    let mut seen = SubsetMask::EMPTY;
    let mut masks = Vec::with_capacity(blocks.len());
    for block in blocks {
        if block.is_empty() {
            return Err(Error::InvalidParameters("empty block".into()));
        }
        let mut m = SubsetMask::EMPTY;
        for &e in block {
            if e >= n {
                return Err(Error::InvalidParameters(format!(
                    "element {e} outside 0..{n}: blocks must partition the ground set"
                )));
            }
            if seen.contains(e) {
                return Err(Error::InvalidParameters(format!("element {e} in two blocks")));
            }
            seen = seen.with(e);
            m = m.with(e);
        }
        masks.push(m);
    }
    if seen != SubsetMask::full(n) {
        return Err(Error::InvalidParameters("blocks do not cover 0..n".into()));
    }
    Ok(Matroid::new(
        MatroidKind::Partition { blocks: blocks.to_vec() },
        Arc::new(Partition { n, blocks: masks }),
    ))
}

/// Cycle matroid of a connected multigraph; bases are spanning trees.
pub fn build_graphic(edges: &[(usize, usize)]) -> Result<Matroid> {
    if edges.is_empty() || edges.len() > MAX_GROUND {
        return Err(Error::InvalidParameters(format!(
            "graphic matroid needs 1..={MAX_GROUND} edges, got {}",
            edges.len()
        )));
    }
    let vertices = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0) + 1;
    let mut parent: Vec<usize> = (0..vertices).collect();
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        parent[ru] = rv;
    }
    let root = find(&mut parent, 0);
    if (0..vertices).any(|v| find(&mut parent, v) != root) {
        return Err(Error::InvalidParameters("graph is disconnected".into()));
    }
    Ok(Matroid::new(
        MatroidKind::Graphic { vertices, edges: edges.to_vec() },
        Arc::new(Graphic { vertices, edges: edges.to_vec() }),
    ))
}

/// An arbitrary family of sets, taken verbatim. Useful for axiom checks.
pub fn build_explicit_family(n: usize, family: &[SubsetMask]) -> Result<Matroid> {
    GroundSet::new(n)?;
    let full = SubsetMask::full(n);
    if let Some(bad) = family.iter().find(|s| !s.is_subset_of(full)) {
        return Err(Error::InvalidParameters(format!("{bad} not inside 0..{n}")));
    }
    Ok(Matroid::new(
        MatroidKind::Explicit,
        Arc::new(Explicit { n, family: family.iter().copied().collect() }),
    ))
}

/// The downward closure of a list of bases.
pub fn build_from_bases(n: usize, bases: &[SubsetMask]) -> Result<Matroid> {
    GroundSet::new(n)?;
    if bases.is_empty() {
        return Err(Error::InvalidParameters("no bases given".into()));
    }
    let full = SubsetMask::full(n);
    let mut family = HashSet::new();
    for &b in bases {
        if !b.is_subset_of(full) {
            return Err(Error::InvalidParameters(format!("{b} not inside 0..{n}")));
        }
        // enumerate all subsets of b
        let mut sub = b.0;
        loop {
            family.insert(SubsetMask(sub));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & b.0;
        }
    }
    Ok(Matroid::new(MatroidKind::Explicit, Arc::new(Explicit { n, family })))
}

/// Contraction `M / base`. Elements of `base` become loops.
pub fn contract_matroid(m: &Matroid, base: SubsetMask) -> Result<Matroid> {
    if !m.is_independent(base) {
        return Err(Error::InvalidArgument(format!("{base} is dependent")));
    }
    if base.is_empty() {
        return Ok(m.clone());
    }
    Ok(Matroid::new(
        MatroidKind::Contraction { base },
        Arc::new(Contracted { inner: m.oracle.clone(), base }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(e: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(e.iter().copied())
    }

    #[test]
    fn uniform_queries() {
        let m = build_uniform(4, 2).unwrap();
        assert!(m.is_independent(s(&[1, 3])));
        assert!(!m.is_independent(s(&[0, 1, 2])));
        assert_eq!(m.rank(), 2);
        assert!(build_uniform(3, 4).is_err());
        assert!(build_uniform(31, 2).is_err());
    }

    #[test]
    fn partition_queries() {
        let m = build_partition(&[vec![0, 1], vec![2, 3]]).unwrap();
        assert!(m.is_independent(s(&[0, 2])));
        assert!(!m.is_independent(s(&[0, 1])));
        assert_eq!(m.rank(), 2);
        assert!(build_partition(&[vec![0, 1], vec![1, 2]]).is_err());
        assert!(build_partition(&[vec![0, 1], vec![3]]).is_err());
    }

    #[test]
    fn graphic_queries() {
        let k3 = build_graphic(&[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(k3.is_independent(s(&[0, 1])));
        assert!(!k3.is_independent(s(&[0, 1, 2])));
        assert_eq!(k3.rank(), 2);
        assert!(build_graphic(&[(0, 1), (2, 3)]).is_err());
        // doubled path: parallel edges are dependent pairs
        let path = build_graphic(&[(0, 1), (0, 1), (1, 2), (1, 2)]).unwrap();
        assert!(!path.is_independent(s(&[0, 1])));
        assert!(path.is_independent(s(&[0, 3])));
    }

    #[test]
    fn contraction_oracle() {
        let m = build_uniform(3, 2).unwrap();
        let c = contract_matroid(&m, s(&[0])).unwrap();
        assert!(c.is_independent(s(&[1])));
        assert!(!c.is_independent(s(&[0])));
        assert!(!c.is_independent(s(&[1, 2])));
        assert!(contract_matroid(&m, s(&[0, 1, 2])).is_err());
    }
}
