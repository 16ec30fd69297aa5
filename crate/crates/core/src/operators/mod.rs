//! Matrix-free linear operators on leaf functions.
//!
//! Every operator exposes `apply` and `adjoint_apply`, where the adjoint is
//! taken with respect to the unweighted `L²([0,1))` inner product.

mod dense;
mod paraproduct;
mod resolution;
mod shift;

use std::sync::Arc;

use crate::grid::Grid;
use crate::haar::LeafFunction;

pub use dense::{Atom, DenseOperator, RankSum, MAX_DENSE_DEPTH};
pub(crate) use paraproduct::averaging_synthesis;
pub use paraproduct::{multiplier, paraproduct, Multiplier, Paraproduct, ParaproductType};
pub use resolution::{
    composed_identity_forms, conjugated_shift, mean_cross, q_operator, resolution_pieces,
    ResolutionPiece, TERM_LABELS,
};
pub use shift::{haar_shift, shift_kernel, shift_kernel_closed_form, shift_kernel_row, HaarShift, ShiftKind};

/// A linear map on [`LeafFunction`]s of one grid, with its adjoint.
pub trait DyadicOperator: Send + Sync {
    fn grid(&self) -> Grid;
    fn label(&self) -> &str;
    fn apply(&self, f: &LeafFunction) -> LeafFunction;
    fn adjoint_apply(&self, f: &LeafFunction) -> LeafFunction;
}

pub type SharedOperator = Arc<dyn DyadicOperator>;

fn check_input(op: &dyn DyadicOperator, f: &LeafFunction) {
    assert_eq!(
        op.grid(),
        f.grid(),
        "operator `{}` applied to a function on a different grid",
        op.label()
    );
}

/// `T₁ ∘ T₂ ∘ … ∘ T_k`; the last factor acts first.
pub struct Composition {
    label: String,
    factors: Vec<SharedOperator>,
}

impl Composition {
    pub fn new(label: impl Into<String>, factors: Vec<SharedOperator>) -> Self {
        assert!(!factors.is_empty(), "empty composition");
        let grid = factors[0].grid();
        assert!(factors.iter().all(|f| f.grid() == grid), "composition across grids");
        Composition {
            label: label.into(),
            factors,
        }
    }

    pub fn factors(&self) -> &[SharedOperator] {
        &self.factors
    }
}

impl DyadicOperator for Composition {
    fn grid(&self) -> Grid {
        self.factors[0].grid()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        let mut iter = self.factors.iter().rev();
        let mut out = iter.next().unwrap().apply(f);
        for op in iter {
            out = op.apply(&out);
        }
        out
    }

    fn adjoint_apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        let mut iter = self.factors.iter();
        let mut out = iter.next().unwrap().adjoint_apply(f);
        for op in iter {
            out = op.adjoint_apply(&out);
        }
        out
    }
}

/// `T₁ + … + T_k`.
pub struct OperatorSum {
    label: String,
    grid: Grid,
    terms: Vec<SharedOperator>,
}

impl OperatorSum {
    pub fn new(label: impl Into<String>, grid: Grid, terms: Vec<SharedOperator>) -> Self {
        assert!(terms.iter().all(|t| t.grid() == grid), "sum across grids");
        OperatorSum {
            label: label.into(),
            grid,
            terms,
        }
    }

    pub fn terms(&self) -> &[SharedOperator] {
        &self.terms
    }
}

impl DyadicOperator for OperatorSum {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        let mut out = LeafFunction::zeros(self.grid);
        for t in &self.terms {
            out.add_assign(&t.apply(f));
        }
        out
    }

    fn adjoint_apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        let mut out = LeafFunction::zeros(self.grid);
        for t in &self.terms {
            out.add_assign(&t.adjoint_apply(f));
        }
        out
    }
}

/// `T*`.
pub struct Adjoint {
    label: String,
    inner: SharedOperator,
}

impl Adjoint {
    pub fn new(inner: SharedOperator) -> Self {
        Adjoint {
            label: format!("{}*", inner.label()),
            inner,
        }
    }
}

impl DyadicOperator for Adjoint {
    fn grid(&self) -> Grid {
        self.inner.grid()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn apply(&self, f: &LeafFunction) -> LeafFunction {
        self.inner.adjoint_apply(f)
    }

    fn adjoint_apply(&self, f: &LeafFunction) -> LeafFunction {
        self.inner.apply(f)
    }
}

/// Identity map, mostly useful in tests and as a neutral factor.
pub struct IdentityOperator {
    grid: Grid,
}

impl IdentityOperator {
    pub fn new(grid: Grid) -> Self {
        IdentityOperator { grid }
    }
}

impl DyadicOperator for IdentityOperator {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn label(&self) -> &str {
        "identity"
    }

    fn apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        f.clone()
    }

    fn adjoint_apply(&self, f: &LeafFunction) -> LeafFunction {
        self.apply(f)
    }
}
