use std::fmt;
use std::str::FromStr;

use super::{check_input, DyadicOperator};
use crate::error::{Error, Result};
use crate::grid::{DyadicIndex, Grid};
use crate::haar::{analyze, averages, averaging_function, synthesize, HaarSymbol, LeafFunction, MultiscaleAverages};

/// Which Haar shift to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftKind {
    /// `h_I ↦ h_I`
    Identity,
    /// `h_I ↦ h_{I-}`
    Half,
    /// `h_I ↦ h_{I-} − h_{I+}`
    Full,
}

impl ShiftKind {
    pub const ALL: [ShiftKind; 3] = [ShiftKind::Identity, ShiftKind::Half, ShiftKind::Full];

    pub fn name(self) -> &'static str {
        match self {
            ShiftKind::Identity => "identity",
            ShiftKind::Half => "half",
            ShiftKind::Full => "full",
        }
    }
}

impl fmt::Display for ShiftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShiftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(ShiftKind::Identity),
            "half" => Ok(ShiftKind::Half),
            "full" => Ok(ShiftKind::Full),
            _ => Err(Error::Parameter(format!("unknown shift kind `{s}` (half|full|identity)"))),
        }
    }
}

/// A Haar shift on one grid. Intervals at the last Haar-bearing level have
/// no children with Haar functions, so the shifting kinds send them to zero;
/// every kind annihilates constants.
#[derive(Debug, Clone, Copy)]
pub struct HaarShift {
    kind: ShiftKind,
    grid: Grid,
}

impl HaarShift {
    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    /// The shift acting on Haar coefficients (the mean is dropped).
    pub fn apply_coefficients(&self, input: &HaarSymbol) -> HaarSymbol {
        let n = self.grid.depth();
        let c = input.coefficients();
        let mut out = vec![0.0; c.len()];
        match self.kind {
            ShiftKind::Identity => out.copy_from_slice(c),
            ShiftKind::Half | ShiftKind::Full => {
                for level in 0..n.saturating_sub(1) {
                    let start = (1usize << level) - 1;
                    let child = (1usize << (level + 1)) - 1;
                    for j in 0..1usize << level {
                        out[child + 2 * j] = c[start + j];
                        if self.kind == ShiftKind::Full {
                            out[child + 2 * j + 1] = -c[start + j];
                        }
                    }
                }
            }
        }
        HaarSymbol::new(self.grid, out, 0.0).expect("symbol length")
    }

    pub fn adjoint_coefficients(&self, input: &HaarSymbol) -> HaarSymbol {
        let n = self.grid.depth();
        let c = input.coefficients();
        let mut out = vec![0.0; c.len()];
        match self.kind {
            ShiftKind::Identity => out.copy_from_slice(c),
            ShiftKind::Half | ShiftKind::Full => {
                for level in 0..n.saturating_sub(1) {
                    let start = (1usize << level) - 1;
                    let child = (1usize << (level + 1)) - 1;
                    for j in 0..1usize << level {
                        out[start + j] = c[child + 2 * j];
                        if self.kind == ShiftKind::Full {
                            out[start + j] -= c[child + 2 * j + 1];
                        }
                    }
                }
            }
        }
        HaarSymbol::new(self.grid, out, 0.0).expect("symbol length")
    }
}

impl DyadicOperator for HaarShift {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn label(&self) -> &str {
        self.kind.name()
    }

    fn apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        synthesize(&self.apply_coefficients(&analyze(f)))
    }

    fn adjoint_apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        synthesize(&self.adjoint_coefficients(&analyze(f)))
    }
}

pub fn haar_shift(kind: ShiftKind, grid: Grid) -> HaarShift {
    HaarShift { kind, grid }
}

/// `⟨S h_J¹, h_L¹⟩`, by shifting the Haar expansion of `h_J¹` and pairing.
pub fn shift_kernel(grid: Grid, j: DyadicIndex, l: DyadicIndex, kind: ShiftKind) -> Result<f64> {
    grid.check(l)?;
    Ok(shift_kernel_row(grid, j, kind)?.get(l))
}

/// `L ↦ ⟨S h_J¹, h_L¹⟩` for every interval `L` of the grid at once: these are
/// the multiscale averages of `S h_J¹`.
pub fn shift_kernel_row(grid: Grid, j: DyadicIndex, kind: ShiftKind) -> Result<MultiscaleAverages> {
    let h1 = averaging_function(grid, j)?;
    Ok(averages(&haar_shift(kind, grid).apply(&h1)))
}

/// Value of `h_K` on a subinterval `J ⊊ K`.
fn haar_value_on(k: DyadicIndex, j: DyadicIndex) -> f64 {
    f64::from(crate::haar::delta_sign(j, k)) / k.length().sqrt()
}

/// Term-by-term evaluation of `⟨S h_J¹, h_L¹⟩` from
/// `h_J¹ = 1 + Σ_{K⊋J} h_K(J) h_K`, without forming any function:
/// for the half shift this is `Σ_{K⊋J, K-⊋L} h_K(J) h_{K-}(L)`.
pub fn shift_kernel_closed_form(grid: Grid, j: DyadicIndex, l: DyadicIndex, kind: ShiftKind) -> Result<f64> {
    grid.check(j)?;
    grid.check(l)?;
    let mut total = 0.0;
    for level in 0..j.level {
        let k = j.ancestor_at(level);
        let coeff = haar_value_on(k, j);
        match kind {
            ShiftKind::Identity => {
                if l.is_strict_subset_of(k) {
                    total += coeff * haar_value_on(k, l);
                }
            }
            ShiftKind::Half | ShiftKind::Full => {
                if k.level + 1 >= grid.depth() {
                    continue;
                }
                let minus = k.left_child();
                if l.is_strict_subset_of(minus) {
                    total += coeff * haar_value_on(minus, l);
                }
                let plus = k.right_child();
                if kind == ShiftKind::Full && l.is_strict_subset_of(plus) {
                    total -= coeff * haar_value_on(plus, l);
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::haar_function;

    #[test]
    fn half_shift_examples() {
        let grid = Grid::new(4).unwrap();
        let s = haar_shift(ShiftKind::Half, grid);
        let out = s.apply(&haar_function(grid, DyadicIndex::ROOT).unwrap());
        let expected = haar_function(grid, DyadicIndex::new(1, 0).unwrap()).unwrap();
        assert!(out.max_abs_diff(&expected) < 1e-15);
        let bottom = haar_function(grid, DyadicIndex::new(3, 5).unwrap()).unwrap();
        assert_eq!(s.apply(&bottom).max_abs(), 0.0);
        assert_eq!(s.apply(&LeafFunction::constant(grid, 3.0)).max_abs(), 0.0);
    }

    #[test]
    fn kernel_hand_values() {
        let grid = Grid::new(4).unwrap();
        let idx = |l, p| DyadicIndex::new(l, p).unwrap();
        let r2 = 2f64.sqrt();
        // level-one brothers
        let v = shift_kernel(grid, idx(1, 1), idx(1, 0), ShiftKind::Half).unwrap();
        assert!(v.abs() < 1e-14);
        let v = shift_kernel(grid, idx(2, 2), idx(2, 1), ShiftKind::Half).unwrap();
        assert!((v - r2).abs() < 1e-13, "{v}");
        // J = [0,1/4), L = [0,1/8): both ancestors contribute
        let v = shift_kernel(grid, idx(2, 0), idx(3, 0), ShiftKind::Half).unwrap();
        assert!((v - 3.0 * r2).abs() < 1e-13, "{v}");
    }

    #[test]
    fn kernel_routes_agree() {
        let grid = Grid::new(5).unwrap();
        for kind in ShiftKind::ALL {
            for j in grid.intervals() {
                let row = shift_kernel_row(grid, j, kind).unwrap();
                for l in grid.intervals() {
                    let closed = shift_kernel_closed_form(grid, j, l, kind).unwrap();
                    assert!((row.get(l) - closed).abs() < 1e-11, "{kind} J={j} L={l}");
                }
            }
        }
    }
}
