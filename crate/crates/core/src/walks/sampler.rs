use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::matroid::WeightedComplex;
use crate::rational::Ratio;

use super::WalkKind;

/// Picks among `candidates` with probability proportional to `weights`,
/// by inverse CDF over the given (ascending mask) order with an exact
/// rational threshold drawn from 64 random bits.
fn pick<R: Rng + ?Sized>(candidates: &[SubsetMask], weights: &[Ratio], rng: &mut R) -> SubsetMask {
    debug_assert!(!candidates.is_empty());
    let total: Ratio = weights.iter().fold(Ratio::zero(), |a, w| a + w);
    let u = Ratio::new(BigInt::from(rng.gen::<u64>()), BigInt::from(1u128 << 64));
    let threshold = u * total;
    let mut acc = Ratio::zero();
    for (c, w) in candidates.iter().zip(weights) {
        acc += w;
        if acc > threshold {
            return *c;
        }
    }
    *candidates.last().unwrap()
}

/// One step of the chosen walk from `current`, using only the oracle and
/// weight lookups (the transition matrix is never built).
pub fn sample_step<R: Rng + ?Sized>(
    wc: &WeightedComplex,
    kind: WalkKind,
    k: usize,
    current: SubsetMask,
    rng: &mut R,
) -> Result<SubsetMask> {
    let valid_level = match kind {
        WalkKind::UpDown => k >= 1 && k < wc.rank(),
        WalkKind::DownUp => k >= 2 && k <= wc.rank(),
    };
    if !valid_level {
        return Err(Error::InvalidArgument(format!("{kind} walk undefined at level {k}")));
    }
    if current.len() != k || wc.index_of(current).is_none() {
        return Err(Error::InvalidState(format!("{current} is not in M({k})")));
    }
    let n = wc.ground_size();
    let m = wc.matroid();
    match kind {
        WalkKind::UpDown => {
            let candidates: Vec<SubsetMask> =
                (0..n).filter(|&e| !current.contains(e)).map(|e| current.with(e)).filter(|s| m.is_independent(*s)).collect();
            let weights: Vec<Ratio> = candidates.iter().map(|&s| wc.weight(s)).collect();
            let up = pick(&candidates, &weights, rng);
            let elems: Vec<usize> = up.elements().collect();
            Ok(up.without(elems[rng.gen_range(0..elems.len())]))
        }
        WalkKind::DownUp => {
            let elems: Vec<usize> = current.elements().collect();
            let down = current.without(elems[rng.gen_range(0..elems.len())]);
            let candidates: Vec<SubsetMask> =
                (0..n).filter(|&e| !down.contains(e)).map(|e| down.with(e)).filter(|s| m.is_independent(*s)).collect();
            let weights: Vec<Ratio> = candidates.iter().map(|&s| wc.weight(s)).collect();
            Ok(pick(&candidates, &weights, rng))
        }
    }
}

/// A walker with its own RNG state.
#[derive(Debug, Clone)]
pub struct Sampler<'a, R> {
    wc: &'a WeightedComplex,
    kind: WalkKind,
    level: usize,
    state: SubsetMask,
    rng: R,
}

impl<'a, R: Rng> Sampler<'a, R> {
    pub fn new(wc: &'a WeightedComplex, kind: WalkKind, level: usize, start: SubsetMask, rng: R) -> Result<Self> {
        if wc.index_of(start).is_none() || start.len() != level {
            return Err(Error::InvalidState(format!("{start} is not in M({level})")));
        }
        Ok(Sampler { wc, kind, level, state: start, rng })
    }

    pub fn state(&self) -> SubsetMask {
        self.state
    }

    pub fn step(&mut self) -> Result<SubsetMask> {
        self.state = sample_step(self.wc, self.kind, self.level, self.state, &mut self.rng)?;
        Ok(self.state)
    }
}
