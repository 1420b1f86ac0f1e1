//! Sub-Gaussian tails for Lipschitz observables of the bases-exchange walk.

use serde::Serialize;

use crate::entropy::{expectation, MAX_MIXING_STATES};
use crate::error::{Error, Result};
use crate::matroid::{MatroidKind, WeightedComplex};
use crate::par;
use crate::walks::TransitionKernel;

/// Step of the evaluation grid for tail probabilities.
pub const TAIL_GRID_STEP: f64 = 0.25;
const TAIL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableKind {
    /// Elements of the basis inside the first `ceil(n/2)` ground elements.
    SubsetCount,
    /// Leaves of the spanning tree.
    LeafCount,
    /// Vertices of odd degree in the spanning tree.
    OddDegreeCount,
}

impl ObservableKind {
    pub fn name(self) -> &'static str {
        match self {
            ObservableKind::SubsetCount => "subset-count",
            ObservableKind::LeafCount => "leaf-count",
            ObservableKind::OddDegreeCount => "odd-degree-count",
        }
    }

    pub fn lipschitz(self) -> f64 {
        match self {
            ObservableKind::SubsetCount => 1.0,
            ObservableKind::LeafCount => 2.0,
            ObservableKind::OddDegreeCount => 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observable {
    pub name: String,
    pub level: usize,
    pub values: Vec<f64>,
    pub lipschitz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzCheck {
    pub declared: Option<f64>,
    /// Largest `|f(x) - f(y)|` over transitions `x -> y` of the kernel.
    pub observed: f64,
    pub pass: bool,
}

impl Observable {
    pub fn new(name: &str, level: usize, values: Vec<f64>, lipschitz: Option<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("observable values must be finite".into()));
        }
        Ok(Observable { name: name.to_string(), level, values, lipschitz })
    }

    fn check_kernel(&self, p: &TransitionKernel) -> Result<()> {
        if p.len() != self.values.len() || p.level().is_some_and(|k| k != self.level) {
            return Err(Error::InvalidFunction(format!(
                "observable on level {} with {} values does not match the kernel",
                self.level,
                self.values.len()
            )));
        }
        Ok(())
    }

    pub fn verify_lipschitz(&self, p: &TransitionKernel) -> Result<LipschitzCheck> {
        self.check_kernel(p)?;
        let f = &self.values;
        let observed = (0..p.len())
            .flat_map(|x| p.matrix().row_f64(x).iter().map(move |(y, _)| (f[x] - f[*y]).abs()))
            .fold(0.0, f64::max);
        Ok(LipschitzCheck { declared: self.lipschitz, observed, pass: self.lipschitz.is_none_or(|c| observed <= c) })
    }
}

/// `v(f) = max_x sum_y P(x,y) (f(x) - f(y))^2`.
pub fn one_step_variance(p: &TransitionKernel, f: &Observable) -> Result<f64> {
    f.check_kernel(p)?;
    let v = &f.values;
    Ok((0..p.len())
        .map(|x| p.matrix().row_f64(x).iter().map(|(y, pxy)| pxy * (v[x] - v[*y]).powi(2)).sum::<f64>())
        .fold(0.0, f64::max))
}

/// `Pr(f - E f >= a) <= exp(-rho a^2 / (2 v))`.
pub fn herbst_bound(a: f64, rho: f64, v: f64) -> Result<f64> {
    if !(a >= 0.0) || !(rho > 0.0) || !(v >= 0.0) {
        return Err(Error::InvalidArgument(format!("need a >= 0, rho > 0, v >= 0; got a={a}, rho={rho}, v={v}")));
    }
    if v == 0.0 {
        return Ok(if a == 0.0 { 1.0 } else { 0.0 });
    }
    Ok((-rho * a * a / (2.0 * v)).exp())
}

/// `min(1, 2 exp(-a^2 / (2 r v)))`, the two-sided bound with `rho = 1/r`.
pub fn herbst_two_sided(a: f64, rank: usize, v: f64) -> Result<f64> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    Ok((2.0 * herbst_bound(a, 1.0 / rank as f64, v)?).min(1.0))
}

/// `Pr_pi(|f - E f| >= a)` by enumeration.
pub fn exact_tail(pi: &[f64], f: &Observable, a: f64) -> Result<f64> {
    if pi.len() != f.values.len() {
        return Err(Error::InvalidFunction("observable and distribution differ in length".into()));
    }
    if pi.len() > MAX_MIXING_STATES {
        return Err(Error::SizeCap(format!("{} states exceeds {MAX_MIXING_STATES}", pi.len())));
    }
    let mean = expectation(pi, &f.values);
    Ok(pi.iter().zip(&f.values).filter(|(_, v)| (*v - mean).abs() >= a - TAIL_SLACK).map(|(p, _)| p).sum())
}

fn graph_edges(wc: &WeightedComplex) -> Option<(usize, &[(usize, usize)])> {
    match wc.matroid().kind() {
        MatroidKind::Graphic { vertices, edges } => Some((*vertices, edges)),
        _ => None,
    }
}

/// The observable of `kind` on the bases of `wc`.
pub fn example_observable(wc: &WeightedComplex, kind: ObservableKind) -> Result<Observable> {
    let r = wc.rank();
    let values: Vec<f64> = match kind {
        ObservableKind::SubsetCount => {
            let half = wc.ground_size().div_ceil(2);
            wc.bases().iter().map(|b| b.elements().filter(|&e| e < half).count() as f64).collect()
        }
        ObservableKind::LeafCount | ObservableKind::OddDegreeCount => {
            let (vertices, edges) = graph_edges(wc).ok_or_else(|| {
                Error::Unsupported(format!("{} needs a graphic matroid", kind.name()))
            })?;
            wc.bases()
                .iter()
                .map(|b| {
                    let mut deg = vec![0usize; vertices];
                    for e in b.elements() {
                        deg[edges[e].0] += 1;
                        deg[edges[e].1] += 1;
                    }
                    let hit = |d: usize| match kind {
                        ObservableKind::LeafCount => d == 1,
                        _ => d % 2 == 1,
                    };
                    deg.into_iter().filter(|&d| hit(d)).count() as f64
                })
                .collect()
        }
    };
    Observable::new(kind.name(), r, values, Some(kind.lipschitz()))
}

/// Every example observable that applies to `wc`.
pub fn example_observables(wc: &WeightedComplex) -> Vec<Observable> {
    let mut kinds = vec![ObservableKind::SubsetCount];
    if graph_edges(wc).is_some() {
        kinds.extend([ObservableKind::LeafCount, ObservableKind::OddDegreeCount]);
    }
    kinds.into_iter().filter_map(|k| example_observable(wc, k).ok()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub a: f64,
    pub exact_tail: f64,
    pub herbst_two_sided: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub observable: String,
    pub rank: usize,
    pub v: f64,
    pub lipschitz: LipschitzCheck,
    pub variance_within_c2: bool,
    pub rows: Vec<TailRow>,
    pub passed: bool,
}

/// Exact two-sided tails against the sub-Gaussian bound on the grid
/// `0, 0.25, ...` up to the largest deviation from the mean, for the
/// bases-exchange kernel `p` of a rank-`rank` complex.
pub fn tail_report(p: &TransitionKernel, rank: usize, f: &Observable) -> Result<TailReport> {
    let lipschitz = f.verify_lipschitz(p)?;
    let v = one_step_variance(p, f)?;
    let pi = p.pi_f64();
    let mean = expectation(pi, &f.values);
    let max_dev = f.values.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    let steps = (max_dev / TAIL_GRID_STEP + TAIL_SLACK).floor() as usize;
    let rows = par::map_range(steps + 1, |i| {
        let a = i as f64 * TAIL_GRID_STEP;
        let exact = exact_tail(pi, f, a)?;
        let bound = herbst_two_sided(a, rank, v)?;
        Ok(TailRow { a, exact_tail: exact, herbst_two_sided: bound, pass: exact <= bound + TAIL_SLACK })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let variance_within_c2 = f.lipschitz.is_none_or(|c| v <= c * c + TAIL_SLACK);
    let passed = lipschitz.pass && variance_within_c2 && rows.iter().all(|r| r.pass);
    Ok(TailReport { observable: f.name.clone(), rank, v, lipschitz, variance_within_c2, rows, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{build_graphic, build_partition, build_uniform};
    use crate::walks::bases_exchange;

    fn k4() -> WeightedComplex {
        WeightedComplex::uniform(build_graphic(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()).unwrap()
    }

    #[test]
    fn herbst_values() {
        assert_eq!(herbst_bound(0.0, 0.5, 1.0).unwrap(), 1.0);
        assert_eq!(herbst_two_sided(0.0, 2, 1.0).unwrap(), 1.0);
        assert!((herbst_two_sided(2.0, 2, 1.0).unwrap() - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(herbst_bound(1.0, 0.5, 0.0).unwrap(), 0.0);
        assert_eq!(herbst_bound(0.0, 0.5, 0.0).unwrap(), 1.0);
        assert!(herbst_bound(-1.0, 0.5, 1.0).is_err());
        let xs: Vec<f64> = (0..20).map(|i| herbst_two_sided(i as f64 * 0.5, 3, 1.0).unwrap()).collect();
        assert!(xs.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn u23_variance_by_hand() {
        let wc = WeightedComplex::uniform(build_uniform(3, 2).unwrap()).unwrap();
        let p = bases_exchange(&wc).unwrap();
        // bases {0,1}, {0,2}, {1,2}; f = |S ∩ {0}| = (1, 1, 0); off-diagonal P = 1/4
        let f = Observable::new("has-0", 2, vec![1.0, 1.0, 0.0], Some(1.0)).unwrap();
        assert!((one_step_variance(&p, &f).unwrap() - 0.5).abs() < 1e-15);
        let c = Observable::new("const", 2, vec![3.0; 3], None).unwrap();
        assert_eq!(one_step_variance(&p, &c).unwrap(), 0.0);
    }

    #[test]
    fn hypercube_binomial_tail() {
        let blocks: Vec<Vec<usize>> = (0..4).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let wc = WeightedComplex::uniform(build_partition(&blocks).unwrap()).unwrap();
        let pi = wc.level_distribution(4).unwrap().to_f64();
        let weight: Vec<f64> = wc.bases().iter().map(|b| b.elements().filter(|e| e % 2 == 0).count() as f64).collect();
        let f = Observable::new("hamming", 4, weight, Some(1.0)).unwrap();
        // Binomial(4, 1/2) has mean 2: |X - 2| >= 2 iff X in {0, 4}
        assert!((exact_tail(&pi, &f, 2.0).unwrap() - 2.0 / 16.0).abs() < 1e-15);
        assert!((exact_tail(&pi, &f, 1.0).unwrap() - 10.0 / 16.0).abs() < 1e-15);
        assert!((exact_tail(&pi, &f, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(exact_tail(&pi, &f, 2.5).unwrap(), 0.0);
    }

    #[test]
    fn k4_observables() {
        let wc = k4();
        let p = bases_exchange(&wc).unwrap();
        let obs = example_observables(&wc);
        assert_eq!(obs.len(), 3);
        for f in &obs {
            let r = tail_report(&p, wc.rank(), f).unwrap();
            assert!(r.passed, "{r:?}");
            assert!(r.lipschitz.observed <= f.lipschitz.unwrap());
        }
        // a path has two leaves, a star three
        assert!(obs[1].values.iter().all(|&l| l == 2.0 || l == 3.0));
        let u = WeightedComplex::uniform(build_uniform(4, 2).unwrap()).unwrap();
        assert!(matches!(example_observable(&u, ObservableKind::LeafCount), Err(Error::Unsupported(_))));
        assert_eq!(example_observables(&u).len(), 1);
    }
}
