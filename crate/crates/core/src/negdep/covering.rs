use std::collections::{BTreeMap, VecDeque};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::par;
use crate::rational::{self, Ratio};

use super::distribution::BooleanDistribution;

/// Largest ground set for the exhaustive covering-property check.
pub const SCP_MAX_N: usize = 12;
/// At most this many skipped pairs are listed individually.
pub const SKIPPED_LIST_CAP: usize = 1000;

struct Edge {
    to: usize,
    cap: Ratio,
    rev: usize,
}

/// Edmonds-Karp maximum flow with exact capacities.
struct FlowNetwork {
    adj: Vec<Vec<Edge>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork { adj: (0..nodes).map(|_| Vec::new()).collect() }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: Ratio) {
        let rf = self.adj[to].len();
        let rt = self.adj[from].len();
        self.adj[from].push(Edge { to, cap, rev: rf });
        self.adj[to].push(Edge { to: from, cap: Ratio::zero(), rev: rt });
    }

    fn max_flow(&mut self, s: usize, t: usize) -> Ratio {
        let mut total = Ratio::zero();
        loop {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for (i, e) in self.adj[u].iter().enumerate() {
                    if e.to != s && prev[e.to].is_none() && e.cap > Ratio::zero() {
                        prev[e.to] = Some((u, i));
                        queue.push_back(e.to);
                    }
                }
            }
            if prev[t].is_none() {
                return total;
            }
            let mut bottleneck: Option<Ratio> = None;
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                let c = &self.adj[u][i].cap;
                if bottleneck.as_ref().is_none_or(|b| c < b) {
                    bottleneck = Some(c.clone());
                }
                v = u;
            }
            let b = bottleneck.expect("augmenting path has at least one edge");
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                self.adj[u][i].cap -= &b;
                let rev = self.adj[u][i].rev;
                self.adj[v][rev].cap += &b;
                v = u;
            }
            total += b;
        }
    }
}

/// `x` covers `y`: equal, or `x` is `y` with one extra element.
pub fn covers(x: SubsetMask, y: SubsetMask) -> bool {
    y.is_subset_of(x) && x.difference(y).len() <= 1
}

/// Whether a coupling of `mu` and `nu` (same total mass) puts all its mass
/// on covering pairs.
fn covering_coupling_exists(mu: &[(SubsetMask, Ratio)], nu: &[(SubsetMask, Ratio)]) -> bool {
    let total = rational::sum(mu.iter().map(|(_, m)| m));
    if total != rational::sum(nu.iter().map(|(_, m)| m)) {
        return false;
    }
    let (a, b) = (mu.len(), nu.len());
    let (source, sink) = (a + b, a + b + 1);
    let mut net = FlowNetwork::new(a + b + 2);
    for (i, (x, m)) in mu.iter().enumerate() {
        net.add_edge(source, i, m.clone());
        for (j, (y, _)) in nu.iter().enumerate() {
            if covers(*x, *y) {
                net.add_edge(i, a + j, m.clone());
            }
        }
    }
    for (j, (_, m)) in nu.iter().enumerate() {
        net.add_edge(a + j, sink, m.clone());
    }
    net.max_flow(source, sink) == total
}

/// `mu` stochastically covers `nu`. Both are normalised first.
pub fn stochastic_covering(mu: &BooleanDistribution, nu: &BooleanDistribution) -> Result<bool> {
    if mu.n() != nu.n() {
        return Err(Error::InvalidArgument(format!("ground sizes differ: {} and {}", mu.n(), nu.n())));
    }
    let mu = mu.clone().normalize()?;
    let nu = nu.clone().normalize()?;
    let a: Vec<(SubsetMask, Ratio)> = mu.mass().iter().map(|(s, m)| (*s, m.clone())).collect();
    let b: Vec<(SubsetMask, Ratio)> = nu.mass().iter().map(|(s, m)| (*s, m.clone())).collect();
    Ok(covering_coupling_exists(&a, &b))
}

/// A conditioning pair: `x` and `y` are the patterns on `set`, `x` covers `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScpPair {
    pub set: SubsetMask,
    pub x: SubsetMask,
    pub y: SubsetMask,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScpReport {
    pub pairs_checked: u64,
    /// Pairs where at least one conditioning event has probability zero.
    pub pairs_skipped: u64,
    /// Skipped pairs where exactly one of the two events has positive
    /// probability, in order, at most [`SKIPPED_LIST_CAP`] of them.
    pub skipped: Vec<ScpPair>,
    pub failure: Option<ScpPair>,
    pub passed: bool,
}

struct SetOutcome {
    checked: u64,
    skipped_total: u64,
    skipped: Vec<ScpPair>,
    failure: Option<ScpPair>,
}

fn check_set(mu: &BooleanDistribution, set: SubsetMask) -> SetOutcome {
    let mut groups: BTreeMap<SubsetMask, Vec<(SubsetMask, Ratio)>> = BTreeMap::new();
    for (t, m) in mu.mass() {
        groups.entry(t.intersection(set)).or_default().push((t.difference(set), m.clone()));
    }
    let normalized: BTreeMap<SubsetMask, Vec<(SubsetMask, Ratio)>> = groups
        .into_iter()
        .map(|(x, v)| {
            let p = rational::sum(v.iter().map(|(_, m)| m));
            (x, v.into_iter().map(|(s, m)| (s, m / &p)).collect())
        })
        .collect();
    let k = set.len() as u64;
    let all_pairs = if k == 0 { 0 } else { k << (k - 1) };
    let mut out = SetOutcome { checked: 0, skipped_total: 0, skipped: Vec::new(), failure: None };
    // pairs with x present; pairs with only y present are collected below
    for (&x, cond_x) in &normalized {
        for i in x.elements() {
            let y = x.without(i);
            match normalized.get(&y) {
                Some(cond_y) => {
                    out.checked += 1;
                    if out.failure.is_none() && !covering_coupling_exists(cond_y, cond_x) {
                        out.failure = Some(ScpPair { set, x, y });
                    }
                }
                None => out.skipped.push(ScpPair { set, x, y }),
            }
        }
    }
    for &y in normalized.keys() {
        for i in set.difference(y).elements() {
            let x = y.with(i);
            if !normalized.contains_key(&x) {
                out.skipped.push(ScpPair { set, x, y });
            }
        }
    }
    out.skipped.sort_by_key(|p| (p.x, p.y));
    out.skipped_total = all_pairs - out.checked;
    out
}

/// Stochastic covering property: for every `S` and patterns `x` covering `y`
/// on `S`, the conditional law given `y` covers the one given `x`, both as
/// laws of the coordinates outside `S`. Pairs with a null conditioning
/// event are skipped and counted.
pub fn scp_check(mu: &BooleanDistribution) -> Result<ScpReport> {
    let n = mu.n();
    if n > SCP_MAX_N {
        return Err(Error::SizeCap(format!("ground size {n} exceeds {SCP_MAX_N} for the covering check")));
    }
    let mu = mu.clone().normalize()?;
    let outcomes = par::map_range(1usize << n, |s| check_set(&mu, SubsetMask(s as u32)));
    let mut report =
        ScpReport { pairs_checked: 0, pairs_skipped: 0, skipped: Vec::new(), failure: None, passed: true };
    for o in outcomes {
        report.pairs_checked += o.checked;
        report.pairs_skipped += o.skipped_total;
        let room = SKIPPED_LIST_CAP - report.skipped.len();
        report.skipped.extend(o.skipped.into_iter().take(room));
        if report.failure.is_none() {
            report.failure = o.failure;
        }
    }
    report.passed = report.failure.is_none();
    Ok(report)
}
