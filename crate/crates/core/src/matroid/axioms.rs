use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::par;

use super::Matroid;

/// Largest ground set for which the exhaustive axiom check runs.
pub const AXIOM_CHECK_MAX_N: usize = 16;

/// Per-axiom verdicts. Witnesses are `(S, T)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub contains_empty: bool,
    /// `S` independent, `T` a subset of `S` that is not.
    pub downward_violation: Option<(SubsetMask, SubsetMask)>,
    /// `S`, `T` independent with `|S| > |T|` and no augmenting element.
    pub augmentation_violation: Option<(SubsetMask, SubsetMask)>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.contains_empty && self.downward_violation.is_none() && self.augmentation_violation.is_none()
    }
}

/// Exhaustive check of the three matroid axioms over all `2^n` subsets.
pub fn verify_axioms(m: &Matroid) -> Result<AxiomReport> {
    let n = m.ground_size();
    if n > AXIOM_CHECK_MAX_N {
        return Err(Error::SizeCap(format!(
            "exhaustive axiom check limited to n <= {AXIOM_CHECK_MAX_N}, got {n}"
        )));
    }
    let independent: Vec<SubsetMask> = (0u32..(1u32 << n))
        .map(SubsetMask)
        .filter(|&s| m.is_independent(s))
        .collect();
    let contains_empty = m.is_independent(SubsetMask::EMPTY);

    let downward_violation = independent.iter().find_map(|&s| {
        s.elements().map(|e| s.without(e)).find(|&t| !m.is_independent(t)).map(|t| (s, t))
    });

    // With downward closure, |S| = |T| + 1 suffices; otherwise check every size gap.
    let adjacent_only = downward_violation.is_none();
    let found = par::map_slice(&independent, |&s| {
        independent.iter().find_map(|&t| {
            let gap_ok = if adjacent_only { s.len() == t.len() + 1 } else { s.len() > t.len() };
            if !gap_ok {
                return None;
            }
            let augmentable = s.difference(t).elements().any(|i| m.is_independent(t.with(i)));
            (!augmentable).then_some((s, t))
        })
    });
    let augmentation_violation = found.into_iter().flatten().next();

    Ok(AxiomReport { contains_empty, downward_violation, augmentation_violation })
}
