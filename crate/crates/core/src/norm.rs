//! Operator norms: seeded power iteration for matrix-free operators and a
//! dense oracle for small grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::haar::LeafFunction;
use crate::operators::{DenseOperator, DyadicOperator};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 20_000;
pub const DEFAULT_SEED: u64 = 1;

/// Rayleigh quotients at or below this value are reported as an exact zero.
/// Operators whose output is identically zero (for instance every piece with
/// a vanishing symbol) would otherwise iterate on round-off.
pub const ZERO_FLOOR: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormResult {
    pub value: f64,
    pub iterations: usize,
    /// relative change of the Rayleigh quotient in the last step
    pub residual: f64,
    pub converged: bool,
}

/// Settings for [`operator_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: DEFAULT_SEED,
        }
    }
}

/// Largest eigenvalue of a symmetric positive semidefinite map by power
/// iteration. `history`, when given, receives every Rayleigh quotient.
pub fn dominant_eigenvalue(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    start: Vec<f64>,
    tol: f64,
    max_iter: usize,
    mut history: Option<&mut Vec<f64>>,
) -> NormResult {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut v = start;
    let norm = dot(&v, &v).sqrt();
    if norm == 0.0 {
        return NormResult { value: 0.0, iterations: 0, residual: 0.0, converged: true };
    }
    v.iter_mut().for_each(|x| *x /= norm);
    let mut previous = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut previous_delta = f64::INFINITY;
    for iteration in 1..=max_iter.max(1) {
        let z = apply(&v);
        let lambda = dot(&z, &v);
        if let Some(h) = history.as_deref_mut() {
            h.push(lambda);
        }
        if lambda <= ZERO_FLOOR {
            return NormResult { value: lambda.max(0.0), iterations: iteration, residual: 0.0, converged: true };
        }
        if previous.is_finite() {
            let delta = (lambda - previous).abs();
            residual = delta / lambda;
            // A small step alone is not enough when the top of the spectrum is
            // clustered: the iterates then creep. Also require the geometric
            // tail delta * rho / (1 - rho) to be below tolerance.
            if residual <= tol {
                let rho = delta / previous_delta; // infinite on the first step
                if delta <= 4.0 * f64::EPSILON * lambda || (rho.is_finite() && rho < 1.0 && delta * rho / (1.0 - rho) <= tol * lambda) {
                    return NormResult { value: lambda, iterations: iteration, residual, converged: true };
                }
            }
            previous_delta = delta;
        }
        previous = lambda;
        let zn = dot(&z, &z).sqrt();
        if zn == 0.0 {
            return NormResult { value: 0.0, iterations: iteration, residual: 0.0, converged: true };
        }
        v = z.into_iter().map(|x| x / zn).collect();
    }
    NormResult { value: previous, iterations: max_iter, residual, converged: false }
}

/// Seeded start vector, uniform in `[-1, 1]` per leaf.
pub fn start_vector(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// `‖T‖_{L²→L²}` by power iteration on `T*T`. The value approaches the true
/// norm from below. If `T` annihilates constants the start vector is centred.
pub fn operator_norm(op: &dyn DyadicOperator, opts: NormOptions) -> NormResult {
    operator_norm_traced(op, opts, None)
}

pub fn operator_norm_traced(op: &dyn DyadicOperator, opts: NormOptions, history: Option<&mut Vec<f64>>) -> NormResult {
    let grid = op.grid();
    let mut start = start_vector(grid.leaf_count(), opts.seed);
    if op.apply(&LeafFunction::constant(grid, 1.0)).max_abs() <= 1e-14 {
        let mean = start.iter().sum::<f64>() / start.len() as f64;
        start.iter_mut().for_each(|x| *x -= mean);
    }
    let apply = |v: &[f64]| {
        let f = LeafFunction::new(grid, v.to_vec()).expect("leaf count");
        op.adjoint_apply(&op.apply(&f)).into_values()
    };
    let r = dominant_eigenvalue(apply, start, opts.tol, opts.max_iter, history);
    NormResult { value: r.value.sqrt(), ..r }
}

fn gram(dense: &DenseOperator) -> Vec<f64> {
    let n = dense.size();
    let a = dense.data();
    // columns of A as rows of the transpose
    let mut at = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            at[j * n + i] = a[i * n + j];
        }
    }
    let mut g = vec![0.0; n * n];
    g.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let ci = &at[i * n..(i + 1) * n];
        for (j, out) in row.iter_mut().enumerate() {
            *out = ci.iter().zip(&at[j * n..(j + 1) * n]).map(|(x, y)| x * y).sum();
        }
    });
    g
}

fn square_normalized(m: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for k in 0..n {
            let a = m[i * n + k];
            if a == 0.0 {
                continue;
            }
            for (o, b) in row.iter_mut().zip(&m[k * n..(k + 1) * n]) {
                *o += a * b;
            }
        }
    });
    let scale = out.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale > 0.0 {
        out.iter_mut().for_each(|x| *x /= scale);
    }
    out
}

/// Top singular value of the materialized matrix of `op`.
///
/// The Gram matrix is squared repeatedly to isolate its dominant eigenspace;
/// power iteration on the squared matrix finds it, and a confirming run on
/// the Gram matrix itself (relative change `1e-12`) gives the eigenvalue.
pub fn dense_norm(op: &dyn DyadicOperator) -> Result<f64> {
    let dense = DenseOperator::materialize(op)?;
    let n = dense.size();
    let g = gram(&dense);
    if g.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let squarings = if n <= 256 { 8 } else { 3 };
    let mut p = g.clone();
    for _ in 0..squarings {
        p = square_normalized(&p, n);
    }
    // A single column of `p` can miss a localized top eigenvector entirely,
    // so push a random vector through it instead.
    let matvec = |m: &[f64], v: &[f64]| -> Vec<f64> {
        m.chunks(n).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    };
    let unit = |mut v: Vec<f64>| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    };
    let mut v = unit(matvec(&p, &start_vector(n, DEFAULT_SEED)));
    // one step on `p` is 2^squarings steps on the Gram matrix
    for _ in 0..20_000 {
        let next = unit(matvec(&p, &v));
        let moved = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if moved <= 1e-15 {
            break;
        }
    }
    let r = dominant_eigenvalue(|x| matvec(&g, x), v, 1e-12, 200_000, None);
    Ok(r.value.max(0.0).sqrt())
}
