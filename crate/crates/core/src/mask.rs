use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_GROUND: usize = 30;

/// A subset of the ground set `0..n` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn singleton(e: usize) -> Self {
        SubsetMask(1 << e)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elems: I) -> Self {
        SubsetMask(elems.into_iter().fold(0u32, |m, e| m | (1 << e)))
    }

    /// Full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            SubsetMask(u32::MAX)
        } else {
            SubsetMask((1u32 << n) - 1)
        }
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, e: usize) -> bool {
        self.0 >> e & 1 == 1
    }

    #[inline]
    pub fn with(self, e: usize) -> Self {
        SubsetMask(self.0 | (1 << e))
    }

    #[inline]
    pub fn without(self, e: usize) -> Self {
        SubsetMask(self.0 & !(1 << e))
    }

    #[inline]
    pub fn union(self, other: Self) -> Self {
        SubsetMask(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Self) -> Self {
        SubsetMask(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Self) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    #[inline]
    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Elements in ascending order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    /// Comma-separated sorted element list, e.g. `"0,2"`; empty set is `""`.
    pub fn key(self) -> String {
        self.elements().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_key(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(SubsetMask::EMPTY);
        }
        let mut m = SubsetMask::EMPTY;
        for part in s.split(',') {
            let e: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad element {part:?} in {s:?}")))?;
            if e >= n {
                return Err(Error::Parse(format!("element {e} outside ground set of size {n}")));
            }
            m = m.with(e);
        }
        Ok(m)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// Validated ground-set size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundSet(usize);

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_GROUND {
            return Err(Error::InvalidParameters(format!(
                "ground set size {n} outside 1..={MAX_GROUND}"
            )));
        }
        Ok(GroundSet(n))
    }

    pub fn size(self) -> usize {
        self.0
    }

    pub fn full(self) -> SubsetMask {
        SubsetMask::full(self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basics() {
        let m = SubsetMask::from_elements([0, 3]);
        assert_eq!(m.len(), 2);
        assert!(m.contains(3) && !m.contains(1));
        assert_eq!(m.key(), "0,3");
        assert_eq!(SubsetMask::parse_key("3,0", 4).unwrap(), m);
        assert!(SubsetMask::parse_key("4", 4).is_err());
        assert_eq!(SubsetMask::parse_key("", 4).unwrap(), SubsetMask::EMPTY);
        assert!(GroundSet::new(31).is_err());
        assert!(GroundSet::new(0).is_err());
    }

    proptest! {
        #[test]
        fn key_roundtrip(bits in 0u32..(1 << 20)) {
            let m = SubsetMask(bits);
            prop_assert_eq!(SubsetMask::parse_key(&m.key(), 20).unwrap(), m);
            prop_assert_eq!(m.elements().count(), m.len());
        }
    }
}
