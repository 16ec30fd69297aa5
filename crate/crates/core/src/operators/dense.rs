use rayon::prelude::*;

use super::{check_input, DyadicOperator};
use crate::error::{Error, Result};
use crate::grid::{DyadicIndex, Grid};
use crate::haar::LeafFunction;

/// Largest depth for which operators are materialized.
pub const MAX_DENSE_DEPTH: u32 = 10;

/// An explicit `2ⁿ × 2ⁿ` matrix acting on leaf values.
///
/// Because the `L²` inner product is a constant multiple of the Euclidean one
/// on leaf values, the adjoint is the transpose and the spectral norm of this
/// matrix is the `L²` operator norm.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    grid: Grid,
    label: String,
    /// row-major, `data[i * size + j] = (T e_j)[i]`
    data: Vec<f64>,
}

impl DenseOperator {
    pub fn from_matrix(grid: Grid, label: impl Into<String>, data: Vec<f64>) -> Result<Self> {
        let size = grid.leaf_count();
        if data.len() != size * size {
            return Err(Error::Parameter(format!(
                "expected a {size}x{size} matrix, got {} entries",
                data.len()
            )));
        }
        Ok(DenseOperator {
            grid,
            label: label.into(),
            data,
        })
    }

    /// Materializes `op` by applying it to every leaf indicator.
    pub fn materialize(op: &dyn DyadicOperator) -> Result<Self> {
        let grid = op.grid();
        if grid.depth() > MAX_DENSE_DEPTH {
            return Err(Error::Resource(format!(
                "dense materialization is capped at depth {MAX_DENSE_DEPTH}, got {}",
                grid.depth()
            )));
        }
        let size = grid.leaf_count();
        let columns: Vec<Vec<f64>> = (0..size)
            .into_par_iter()
            .map(|j| {
                let e = LeafFunction::from_fn(grid, |k| if k == j { 1.0 } else { 0.0 });
                op.apply(&e).into_values()
            })
            .collect();
        let mut data = vec![0.0; size * size];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                data[i * size + j] = *v;
            }
        }
        Ok(DenseOperator {
            grid,
            label: op.label().to_string(),
            data,
        })
    }

    pub fn size(&self) -> usize {
        self.grid.leaf_count()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size() + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl DyadicOperator for DenseOperator {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        let n = self.size();
        let x = f.values();
        LeafFunction::from_fn(self.grid, |i| {
            self.data[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum()
        })
    }

    fn adjoint_apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        let n = self.size();
        let mut out = vec![0.0; n];
        for (i, &xi) in f.values().iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(&self.data[i * n..(i + 1) * n]) {
                *o += a * xi;
            }
        }
        LeafFunction::new(self.grid, out).expect("leaf count")
    }
}

/// A Haar function `h_I` or an averaging function `h_I¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    Haar(DyadicIndex),
    Avg(DyadicIndex),
}

impl Atom {
    fn index(self) -> DyadicIndex {
        match self {
            Atom::Haar(i) | Atom::Avg(i) => i,
        }
    }

    /// `⟨f, atom⟩`.
    fn pair(self, grid: Grid, f: &LeafFunction) -> f64 {
        let range = grid.leaf_range(self.index());
        let vals = &f.values()[range.clone()];
        let cell = grid.cell();
        match self {
            Atom::Avg(i) => cell * vals.iter().sum::<f64>() / i.length(),
            Atom::Haar(i) => {
                let half = vals.len() / 2;
                let diff: f64 = vals[..half].iter().sum::<f64>() - vals[half..].iter().sum::<f64>();
                cell * diff / i.length().sqrt()
            }
        }
    }

    /// `out += s · atom`.
    fn add_to(self, grid: Grid, s: f64, out: &mut [f64]) {
        let range = grid.leaf_range(self.index());
        match self {
            Atom::Avg(i) => {
                let v = s / i.length();
                out[range].iter_mut().for_each(|o| *o += v);
            }
            Atom::Haar(i) => {
                let v = s / i.length().sqrt();
                let mid = range.start + range.len() / 2;
                out[range.start..mid].iter_mut().for_each(|o| *o += v);
                out[mid..range.end].iter_mut().for_each(|o| *o -= v);
            }
        }
    }
}

/// `Σ_k c_k ⟨·, in_k⟩ out_k`, applied term by term.
#[derive(Debug, Clone)]
pub struct RankSum {
    grid: Grid,
    label: String,
    terms: Vec<(f64, Atom, Atom)>,
}

impl RankSum {
    /// Terms are `(coefficient, output atom, input atom)`.
    pub fn new(grid: Grid, label: impl Into<String>, terms: Vec<(f64, Atom, Atom)>) -> Result<Self> {
        for &(_, out, inp) in &terms {
            for atom in [out, inp] {
                match atom {
                    Atom::Haar(i) => grid.check_haar(i)?,
                    Atom::Avg(i) => grid.check(i)?,
                }
            }
        }
        Ok(RankSum {
            grid,
            label: label.into(),
            terms,
        })
    }

    pub fn terms(&self) -> &[(f64, Atom, Atom)] {
        &self.terms
    }
}

impl DyadicOperator for RankSum {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        let mut out = vec![0.0; self.grid.leaf_count()];
        for &(c, o, i) in &self.terms {
            o.add_to(self.grid, c * i.pair(self.grid, f), &mut out);
        }
        LeafFunction::new(self.grid, out).expect("leaf count")
    }

    fn adjoint_apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        let mut out = vec![0.0; self.grid.leaf_count()];
        for &(c, o, i) in &self.terms {
            i.add_to(self.grid, c * o.pair(self.grid, f), &mut out);
        }
        LeafFunction::new(self.grid, out).expect("leaf count")
    }
}
