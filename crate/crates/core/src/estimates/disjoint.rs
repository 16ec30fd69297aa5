use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::haar::analyze;
use crate::norm::{dominant_eigenvalue, start_vector, DEFAULT_MAX_ITER, DEFAULT_SEED};
use crate::operators::{shift_kernel_row, ShiftKind, MAX_DENSE_DEPTH};
use crate::weights::Weight;

/// Row-major matrix over Haar-bearing pairs, entry `(L, J)` equal to
/// `ŵ^{1/2}(L) ⟨S h_J¹, h_L¹⟩ ŵ^{-1/2}(J)` when `J ∩ L = ∅` and zero
/// otherwise (half shift).
pub fn disjoint_block_matrix(w: &Weight) -> Result<Vec<f64>> {
    let grid = w.grid();
    if grid.depth() > MAX_DENSE_DEPTH {
        return Err(Error::Resource(format!(
            "the disjoint block is materialized densely and capped at depth {MAX_DENSE_DEPTH}"
        )));
    }
    let m = grid.haar_count();
    let hat_half = analyze(w.half());
    let hat_inv_half = analyze(w.inv_half());
    let columns: Vec<Vec<f64>> = grid
        .haar_intervals()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|j| {
            let row = shift_kernel_row(grid, j, ShiftKind::Half).expect("interval on grid");
            grid.haar_intervals()
                .map(|l| {
                    if l.is_disjoint_from(j) {
                        hat_half.get(l) * row.get(l) * hat_inv_half.get(j)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let mut data = vec![0.0; m * m];
    for (j, col) in columns.iter().enumerate() {
        for (l, v) in col.iter().enumerate() {
            data[l * m + j] = *v;
        }
    }
    Ok(data)
}

/// Spectral norm of [`disjoint_block_matrix`], by power iteration on `AᵀA`.
pub fn disjoint_block_norm(w: &Weight, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let a = disjoint_block_matrix(w)?;
    let m = w.grid().haar_count();
    let apply = |x: &[f64]| -> Vec<f64> {
        let y: Vec<f64> = a.chunks(m).map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect();
        let mut z = vec![0.0; m];
        for (r, yl) in a.chunks(m).zip(&y) {
            for (zj, p) in z.iter_mut().zip(r) {
                *zj += p * yl;
            }
        }
        z
    };
    let r = dominant_eigenvalue(apply, start_vector(m, DEFAULT_SEED), tol, DEFAULT_MAX_ITER, None);
    if !r.converged {
        return Err(Error::Convergence {
            iterations: r.iterations,
            estimate: r.value.sqrt(),
            residual: r.residual,
        });
    }
    Ok(r.value.sqrt())
}
