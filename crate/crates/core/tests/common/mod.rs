#![allow(dead_code)]

use haarshift::grid::{DyadicIndex, Grid};
use haarshift::haar::{HaarSymbol, LeafFunction};
use haarshift::operators::{DenseOperator, DyadicOperator};
use haarshift::weights::Weight;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(n: u32) -> Grid {
    Grid::new(n).unwrap()
}

pub fn idx(level: u32, position: u64) -> DyadicIndex {
    DyadicIndex::new(level, position).unwrap()
}

pub fn random_function(grid: Grid, rng: &mut ChaCha8Rng) -> LeafFunction {
    LeafFunction::from_fn(grid, |_| rng.random_range(-1.0..1.0))
}

pub fn random_symbol(grid: Grid, rng: &mut ChaCha8Rng) -> HaarSymbol {
    let mean = rng.random_range(-1.0..1.0);
    HaarSymbol::from_fn(grid, mean, |_| rng.random_range(-1.0..1.0))
}

/// Log-uniform positive leaf values spanning a factor `spread`.
pub fn random_weight(grid: Grid, rng: &mut ChaCha8Rng, spread: f64) -> Weight {
    let s = spread.ln();
    Weight::new(LeafFunction::from_fn(grid, |_| (rng.random_range(-0.5..0.5) * s).exp())).unwrap()
}

pub fn to_matrix(op: &dyn DyadicOperator) -> DMatrix<f64> {
    let d = DenseOperator::materialize(op).unwrap();
    let n = d.size();
    DMatrix::from_row_slice(n, n, d.data())
}

/// Matrix of `f ↦ ⟨f, inp⟩ out` on leaf values.
pub fn outer(out: &LeafFunction, inp: &LeafFunction) -> DMatrix<f64> {
    let n = out.values().len();
    let cell = out.grid().cell();
    DMatrix::from_fn(n, n, |i, j| out.values()[i] * inp.values()[j] * cell)
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, b| a.max(b.abs()))
}

pub fn apply_matrix(m: &DMatrix<f64>, f: &LeafFunction) -> LeafFunction {
    let v = m * nalgebra::DVector::from_column_slice(f.values());
    LeafFunction::new(f.grid(), v.as_slice().to_vec()).unwrap()
}
