//! The truncated dyadic grid on `[0, 1)`.
//!
//! Intervals are addressed by `(level, position)` and stored level-contiguously:
//! node `(k, j)` lives at flat offset `2^k - 1 + j`. Levels `0..depth` carry Haar
//! functions; level `depth` holds the leaves.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported depth. `2^24` leaves is far beyond anything the
/// experiments need, and keeps every offset inside `u32`-sized arrays.
pub const MAX_DEPTH: u32 = 24;

/// The dyadic interval `[position * 2^-level, (position + 1) * 2^-level)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicIndex {
    pub level: u32,
    pub position: u64,
}

impl DyadicIndex {
    pub const ROOT: DyadicIndex = DyadicIndex {
        level: 0,
        position: 0,
    };

    pub fn new(level: u32, position: u64) -> Result<Self> {
        let index = DyadicIndex { level, position };
        if level > MAX_DEPTH {
            return Err(Error::InvalidIndex {
                index,
                depth: MAX_DEPTH,
                reason: "level exceeds the maximal supported depth",
            });
        }
        if position >= 1u64 << level {
            return Err(Error::InvalidIndex {
                index,
                depth: level,
                reason: "position must be below 2^level",
            });
        }
        Ok(index)
    }

    /// Length `2^-level`.
    pub fn length(self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn left_child(self) -> DyadicIndex {
        DyadicIndex {
            level: self.level + 1,
            position: 2 * self.position,
        }
    }

    pub fn right_child(self) -> DyadicIndex {
        DyadicIndex {
            level: self.level + 1,
            position: 2 * self.position + 1,
        }
    }

    /// Dyadic parent, `None` at the root.
    pub fn parent(self) -> Option<DyadicIndex> {
        (self.level > 0).then(|| DyadicIndex {
            level: self.level - 1,
            position: self.position / 2,
        })
    }

    /// Parent with the convention `pi(root) = root`.
    pub fn parent_or_self(self) -> DyadicIndex {
        self.parent().unwrap_or(self)
    }

    /// Ancestor at `level` (which must not exceed `self.level`).
    pub fn ancestor_at(self, level: u32) -> DyadicIndex {
        debug_assert!(level <= self.level);
        DyadicIndex {
            level,
            position: self.position >> (self.level - level),
        }
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(self, other: DyadicIndex) -> bool {
        self.level >= other.level && self.ancestor_at(other.level) == other
    }

    /// `self ⊊ other`.
    pub fn is_strict_subset_of(self, other: DyadicIndex) -> bool {
        self.level > other.level && self.ancestor_at(other.level) == other
    }

    pub fn is_disjoint_from(self, other: DyadicIndex) -> bool {
        !self.is_subset_of(other) && !other.is_subset_of(self)
    }

    pub fn is_left_child(self) -> bool {
        self.level > 0 && self.position.is_multiple_of(2)
    }

    /// Left endpoint as a real number.
    pub fn start(self) -> f64 {
        self.position as f64 * self.length()
    }

    /// Flat level-contiguous offset.
    pub fn offset(self) -> usize {
        ((1usize << self.level) - 1) + self.position as usize
    }

    /// Inverse of [`DyadicIndex::offset`].
    pub fn from_offset(offset: usize) -> DyadicIndex {
        let level = usize::BITS - (offset + 1).leading_zeros() - 1;
        DyadicIndex {
            level,
            position: (offset + 1 - (1usize << level)) as u64,
        }
    }
}

impl fmt::Display for DyadicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.position)
    }
}

/// A truncated dyadic grid with `2^depth` leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    depth: u32,
}

impl Grid {
    pub fn new(depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Parameter(
                "grid depth must be at least 1 (no Haar functions otherwise)".into(),
            ));
        }
        if depth > MAX_DEPTH {
            return Err(Error::Resource(format!(
                "grid depth {depth} exceeds the maximum {MAX_DEPTH}"
            )));
        }
        Ok(Grid { depth })
    }

    pub fn depth(self) -> u32 {
        self.depth
    }

    pub fn leaf_count(self) -> usize {
        1usize << self.depth
    }

    /// Number of Haar-bearing intervals (levels `0..depth`), i.e. `2^depth - 1`.
    pub fn haar_count(self) -> usize {
        self.leaf_count() - 1
    }

    /// Number of intervals at all levels `0..=depth`.
    pub fn node_count(self) -> usize {
        2 * self.leaf_count() - 1
    }

    /// Exact leaf-cell length `2^-depth`.
    pub fn cell(self) -> f64 {
        (-(self.depth as f64)).exp2()
    }

    pub fn contains(self, index: DyadicIndex) -> bool {
        index.level <= self.depth && index.position < (1u64 << index.level)
    }

    pub fn is_haar_bearing(self, index: DyadicIndex) -> bool {
        index.level < self.depth && self.contains(index)
    }

    pub fn check(self, index: DyadicIndex) -> Result<()> {
        if self.contains(index) {
            Ok(())
        } else {
            Err(Error::InvalidIndex {
                index,
                depth: self.depth,
                reason: "interval is not part of the grid",
            })
        }
    }

    pub fn check_haar(self, index: DyadicIndex) -> Result<()> {
        self.check(index)?;
        if index.level == self.depth {
            return Err(Error::InvalidIndex {
                index,
                depth: self.depth,
                reason: "leaf-level intervals carry no Haar function",
            });
        }
        Ok(())
    }

    /// Range of leaf indices covered by `index`.
    pub fn leaf_range(self, index: DyadicIndex) -> std::ops::Range<usize> {
        let shift = self.depth - index.level;
        let start = (index.position as usize) << shift;
        start..start + (1usize << shift)
    }

    /// All intervals, level by level.
    pub fn intervals(self) -> impl Iterator<Item = DyadicIndex> {
        (0..self.node_count()).map(DyadicIndex::from_offset)
    }

    /// Haar-bearing intervals, level by level.
    pub fn haar_intervals(self) -> impl Iterator<Item = DyadicIndex> {
        (0..self.haar_count()).map(DyadicIndex::from_offset)
    }

    pub fn level(self, level: u32) -> impl Iterator<Item = DyadicIndex> {
        (0..1u64 << level).map(move |position| DyadicIndex { level, position })
    }

    pub(crate) fn same(self, other: Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.depth,
                right: other.depth,
            })
        }
    }
}
