use crate::error::{Error, Result};
use crate::grid::{DyadicIndex, Grid};
use crate::haar::{HaarSymbol, LeafFunction};
use crate::weights::{weighted_average, Weight};

/// `Σ_{J⊆I} t_J` for every interval `I` of the grid, where `t` is indexed by
/// Haar-bearing intervals. Leaves get `0`.
pub fn subtree_sums(grid: Grid, terms: &[f64]) -> Vec<f64> {
    assert_eq!(terms.len(), grid.haar_count());
    let mut tail = vec![0.0; grid.node_count()];
    for offset in (0..grid.haar_count()).rev() {
        let i = DyadicIndex::from_offset(offset);
        tail[offset] = terms[offset] + tail[i.left_child().offset()] + tail[i.right_child().offset()];
    }
    tail
}

/// `sup_I |a_I|` over Haar-bearing intervals.
pub fn ell_inf_norm(a: &HaarSymbol) -> f64 {
    a.coefficients().iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `‖a‖_CM = (sup_I |I|⁻¹ Σ_{J⊆I} a_J²)^{1/2}`.
pub fn cm_norm(a: &HaarSymbol) -> f64 {
    let grid = a.grid();
    let squares: Vec<f64> = a.coefficients().iter().map(|x| x * x).collect();
    let tail = subtree_sums(grid, &squares);
    grid.haar_intervals()
        .map(|i| tail[i.offset()] / i.length())
        .fold(0.0, f64::max)
        .sqrt()
}

/// `sup_I v(I)⁻¹ Σ_{J⊆I} α_J ⟨v⟩_J²`.
pub fn carleson_embedding_constant(alpha: &HaarSymbol, v: &Weight) -> Result<f64> {
    let grid = alpha.grid();
    grid.same(v.grid())?;
    if let Some(x) = alpha.coefficients().iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::Parameter(format!("embedding masses must be nonnegative, got {x}")));
    }
    let terms: Vec<f64> = grid
        .haar_intervals()
        .zip(alpha.coefficients())
        .map(|(j, a)| a * v.avg().get(j).powi(2))
        .collect();
    let tail = subtree_sums(grid, &terms);
    Ok(grid.intervals().map(|i| tail[i.offset()] / v.mass(i)).fold(0.0, f64::max))
}

/// `Σ_I α_I 𝔼_I^v(f)²`.
pub fn embedding_sum(alpha: &HaarSymbol, v: &Weight, f: &LeafFunction) -> Result<f64> {
    let grid = alpha.grid();
    grid.same(v.grid())?;
    let weighted = f.pointwise_mul(v.w());
    let num = crate::haar::averages(&weighted);
    let mut total = 0.0;
    for (i, a) in grid.haar_intervals().zip(alpha.coefficients()) {
        let e = num.get(i) / v.avg().get(i);
        total += a * e * e;
    }
    debug_assert!({
        let i = DyadicIndex::ROOT;
        (weighted_average(f, v, i).unwrap() - num.get(i) / v.avg().get(i)).abs() < 1e-9 * (1.0 + num.get(i).abs())
    });
    Ok(total)
}

/// `𝔰(J) = √2 Σ_{K: K-⊋J} |K|⁻¹`.
pub fn s_coefficient(j: DyadicIndex) -> f64 {
    let mut total = 0.0;
    for level in 0..j.level.saturating_sub(1) {
        let k = j.ancestor_at(level);
        if j.is_strict_subset_of(k.left_child()) {
            total += k.length().recip();
        }
    }
    std::f64::consts::SQRT_2 * total
}
