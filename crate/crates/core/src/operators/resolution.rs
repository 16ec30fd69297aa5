//! The weighted resolution of `M_{w^{1/2}} S M_{w^{-1/2}}` into compositions
//! of paraproducts around the shift.

use std::sync::Arc;

use super::dense::{Atom, RankSum};
use super::paraproduct::{multiplier, paraproduct, ParaproductType};
use super::shift::{haar_shift, ShiftKind};
use super::{Composition, OperatorSum, SharedOperator};
use crate::error::{Error, Result};
use crate::haar::{analyze, HaarSymbol};
use crate::weights::Weight;

/// Stable labels of the reported terms: the nine compositions, the full
/// conjugated shift, and the sum of all pieces that involve a mean term.
pub const TERM_LABELS: [&str; 11] = [
    "Q_01_01", "Q_01_10", "Q_01_00", "Q_10_01", "Q_10_10", "Q_10_00", "Q_00_01", "Q_00_10", "Q_00_00",
    "M_conj", "mean_cross",
];

const CANONICAL: [ParaproductType; 3] = [ParaproductType::P01, ParaproductType::P10, ParaproductType::P00];

fn symbol_for(kind: ParaproductType, hat: &HaarSymbol, avg: HaarSymbol) -> Result<HaarSymbol> {
    match kind {
        ParaproductType::P01 | ParaproductType::P10 | ParaproductType::Mean => Ok(hat.clone()),
        ParaproductType::P00 => Ok(avg),
        ParaproductType::P11 => Err(Error::Parameter(
            "type (1,1) does not occur in the multiplier decomposition".into(),
        )),
    }
}

fn piece_label(left: ParaproductType, right: ParaproductType) -> String {
    format!("Q_{}_{}", left.code(), right.code())
}

/// `P_{w^{1/2}}^{left} ∘ S ∘ P_{w^{-1/2}}^{right}`, using Haar coefficients of
/// `w^{±1/2}` as symbol for types `01`, `10` and averages for `00`.
pub fn q_operator(w: &Weight, shift: ShiftKind, left: ParaproductType, right: ParaproductType) -> Result<Composition> {
    let grid = w.grid();
    let left_symbol = symbol_for(left, &analyze(w.half()), HaarSymbol::from_averages(w.avg_half()))?;
    let right_symbol = symbol_for(right, &analyze(w.inv_half()), HaarSymbol::from_averages(w.avg_inv_half()))?;
    Ok(Composition::new(
        piece_label(left, right),
        vec![
            Arc::new(paraproduct(left_symbol, left)),
            Arc::new(haar_shift(shift, grid)),
            Arc::new(paraproduct(right_symbol, right)),
        ],
    ))
}

/// One of the sixteen pieces of the resolution.
pub struct ResolutionPiece {
    pub left: ParaproductType,
    pub right: ParaproductType,
    pub op: SharedOperator,
}

impl ResolutionPiece {
    pub fn involves_mean(&self) -> bool {
        self.left == ParaproductType::Mean || self.right == ParaproductType::Mean
    }

    pub fn label(&self) -> &str {
        self.op.label()
    }
}

/// All sixteen pieces: the nine canonical compositions in [`TERM_LABELS`]
/// order, followed by the seven pieces with a mean factor.
pub fn resolution_pieces(w: &Weight, shift: ShiftKind) -> Vec<ResolutionPiece> {
    let mut pairs = Vec::with_capacity(16);
    for left in CANONICAL {
        for right in CANONICAL {
            pairs.push((left, right));
        }
    }
    for other in CANONICAL {
        pairs.push((ParaproductType::Mean, other));
    }
    for other in CANONICAL {
        pairs.push((other, ParaproductType::Mean));
    }
    pairs.push((ParaproductType::Mean, ParaproductType::Mean));
    pairs
        .into_iter()
        .map(|(left, right)| ResolutionPiece {
            left,
            right,
            op: Arc::new(q_operator(w, shift, left, right).expect("canonical types")),
        })
        .collect()
}

/// `M_{w^{1/2}} ∘ S ∘ M_{w^{-1/2}}`.
pub fn conjugated_shift(w: &Weight, shift: ShiftKind) -> Composition {
    Composition::new(
        "M_conj",
        vec![
            Arc::new(multiplier(w.half().clone())),
            Arc::new(haar_shift(shift, w.grid())),
            Arc::new(multiplier(w.inv_half().clone())),
        ],
    )
}

/// The sum of the seven pieces that contain a mean factor.
pub fn mean_cross(w: &Weight, shift: ShiftKind) -> OperatorSum {
    let terms = resolution_pieces(w, shift)
        .into_iter()
        .filter(|p| p.involves_mean())
        .map(|p| p.op)
        .collect();
    OperatorSum::new("mean_cross", w.grid(), terms)
}

/// Closed rank-sum forms of `Q_10_01`, `Q_10_00`, `Q_00_01`, `Q_00_00` for
/// the half shift, in that order. With `I` running over levels `0..n-2`:
///
/// * `Q_10_01 = Σ ŵ^{1/2}(I-) ŵ^{-1/2}(I)   h¹_{I-} ⊗ h¹_I`
/// * `Q_10_00 = Σ ŵ^{1/2}(I-) ⟨w^{-1/2}⟩_I  h¹_{I-} ⊗ h_I`
/// * `Q_00_01 = Σ ⟨w^{1/2}⟩_{I-} ŵ^{-1/2}(I) h_{I-} ⊗ h¹_I`
/// * `Q_00_00 = Σ ⟨w^{1/2}⟩_{I-} ⟨w^{-1/2}⟩_I h_{I-} ⊗ h_I`
pub fn composed_identity_forms(w: &Weight) -> Vec<RankSum> {
    let grid = w.grid();
    let hat_half = analyze(w.half());
    let hat_inv_half = analyze(w.inv_half());
    let inner: Vec<_> = grid
        .haar_intervals()
        .filter(|i| i.level + 1 < grid.depth())
        .collect();
    let build = |label: &str, f: &dyn Fn(crate::grid::DyadicIndex) -> (f64, Atom, Atom)| {
        RankSum::new(grid, label, inner.iter().map(|&i| f(i)).collect()).expect("Haar-bearing atoms")
    };
    vec![
        build("Q_10_01", &|i| {
            let m = i.left_child();
            (hat_half.get(m) * hat_inv_half.get(i), Atom::Avg(m), Atom::Avg(i))
        }),
        build("Q_10_00", &|i| {
            let m = i.left_child();
            (hat_half.get(m) * w.avg_inv_half().get(i), Atom::Avg(m), Atom::Haar(i))
        }),
        build("Q_00_01", &|i| {
            let m = i.left_child();
            (w.avg_half().get(m) * hat_inv_half.get(i), Atom::Haar(m), Atom::Avg(i))
        }),
        build("Q_00_00", &|i| {
            let m = i.left_child();
            (w.avg_half().get(m) * w.avg_inv_half().get(i), Atom::Haar(m), Atom::Haar(i))
        }),
    ]
}
