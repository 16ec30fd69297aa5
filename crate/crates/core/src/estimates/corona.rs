use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grid::DyadicIndex;
use crate::weights::Weight;

pub const DEFAULT_GAMMA: f64 = 2.0;

/// Stopping intervals of the Calderón–Zygmund construction on `w` below a
/// root interval `L`.
#[derive(Debug, Clone)]
pub struct CoronaDecomposition {
    pub root: DyadicIndex,
    pub gamma: f64,
    /// `generations[k]` lists generation `k`, ordered by position.
    pub generations: Vec<Vec<DyadicIndex>>,
    /// stopping interval → the stopping interval it was selected from
    pub stopping_parent: BTreeMap<DyadicIndex, DyadicIndex>,
}

/// Top-down stopping time: below each stopping interval `G`, the maximal
/// subintervals `Q` with `⟨w⟩_Q > γ⟨w⟩_G` form the next generation.
pub fn corona(w: &Weight, root: DyadicIndex, gamma: f64) -> Result<CoronaDecomposition> {
    let grid = w.grid();
    grid.check(root)?;
    if !(gamma > 1.0) {
        return Err(Error::Parameter(format!("gamma must exceed 1, got {gamma}")));
    }
    let mut generations = vec![vec![root]];
    let mut stopping_parent = BTreeMap::new();
    loop {
        let mut next = Vec::new();
        for &g in generations.last().unwrap() {
            let threshold = gamma * w.avg().get(g);
            let mut stack = vec![g];
            while let Some(k) = stack.pop() {
                if k.level == grid.depth() {
                    continue;
                }
                // push right first so that the left subtree is explored first
                for child in [k.right_child(), k.left_child()] {
                    if w.avg().get(child) > threshold {
                        next.push(child);
                        stopping_parent.insert(child, g);
                    } else {
                        stack.push(child);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort();
        generations.push(next);
    }
    Ok(CoronaDecomposition {
        root,
        gamma,
        generations,
        stopping_parent,
    })
}

impl CoronaDecomposition {
    pub fn stopping_intervals(&self) -> impl Iterator<Item = DyadicIndex> + '_ {
        self.generations.iter().flatten().copied()
    }

    /// The smallest stopping interval containing `k`, i.e. the top of the
    /// corona that `k` belongs to. `None` when `k ⊄ L`.
    pub fn corona_top(&self, k: DyadicIndex) -> Option<DyadicIndex> {
        if !k.is_subset_of(self.root) {
            return None;
        }
        (self.root.level..=k.level)
            .rev()
            .map(|level| k.ancestor_at(level))
            .find(|a| *a == self.root || self.stopping_parent.contains_key(a))
    }

    /// `Σ_G ⟨w⟩_G² w⁻¹(G)` over all stopping intervals.
    pub fn corona_sum(&self, w: &Weight) -> f64 {
        self.stopping_intervals()
            .map(|g| w.avg().get(g).powi(2) * w.inv_mass(g))
            .sum()
    }

    /// Checks nesting, disjointness, maximality and the growth of averages
    /// along stopping chains. Returns a description of the first violation.
    pub fn validate(&self, w: &Weight) -> std::result::Result<(), String> {
        if self.generations.first().map(Vec::as_slice) != Some(&[self.root][..]) {
            return Err("generation 0 is not {L}".into());
        }
        for (k, generation) in self.generations.iter().enumerate().skip(1) {
            for (a, &q) in generation.iter().enumerate() {
                let Some(&p) = self.stopping_parent.get(&q) else {
                    return Err(format!("{q} has no stopping parent"));
                };
                if !self.generations[k - 1].contains(&p) {
                    return Err(format!("parent {p} of {q} is not in generation {}", k - 1));
                }
                if !q.is_strict_subset_of(p) {
                    return Err(format!("{q} is not inside its parent {p}"));
                }
                let (aq, ap) = (w.avg().get(q), w.avg().get(p));
                if !(aq > self.gamma * ap) {
                    return Err(format!("average on {q} does not exceed gamma times that on {p}"));
                }
                // maximality: no interval strictly between q and p already stops
                for level in p.level + 1..q.level {
                    let mid = q.ancestor_at(level);
                    if w.avg().get(mid) > self.gamma * ap {
                        return Err(format!("{q} is not maximal: {mid} already stops"));
                    }
                }
                for &r in &generation[a + 1..] {
                    if !q.is_disjoint_from(r) {
                        return Err(format!("{q} and {r} overlap in generation {k}"));
                    }
                }
            }
        }
        Ok(())
    }
}
