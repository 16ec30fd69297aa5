use std::fmt;
use std::str::FromStr;

use super::{check_input, DyadicOperator};
use crate::error::Error;
use crate::grid::Grid;
use crate::haar::{analyze, averages, synthesize, HaarSymbol, LeafFunction};

/// The type `(α, β)` of `Σ b_I ⟨f, h_I^β⟩ h_I^α`, plus the rank-one mean
/// term `f ↦ ⟨b⟩⟨f⟩ 1` needed to close the multiplier decomposition on `[0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParaproductType {
    P01,
    P10,
    P00,
    P11,
    Mean,
}

impl ParaproductType {
    /// Short code used in operator labels.
    pub fn code(self) -> &'static str {
        match self {
            ParaproductType::P01 => "01",
            ParaproductType::P10 => "10",
            ParaproductType::P00 => "00",
            ParaproductType::P11 => "11",
            ParaproductType::Mean => "mean",
        }
    }

    pub fn adjoint(self) -> ParaproductType {
        match self {
            ParaproductType::P01 => ParaproductType::P10,
            ParaproductType::P10 => ParaproductType::P01,
            other => other,
        }
    }
}

impl fmt::Display for ParaproductType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for ParaproductType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "01" => ParaproductType::P01,
            "10" => ParaproductType::P10,
            "00" => ParaproductType::P00,
            "11" => ParaproductType::P11,
            "mean" => ParaproductType::Mean,
            _ => return Err(Error::Parameter(format!("unknown paraproduct type `{s}`"))),
        })
    }
}

/// `Σ_I c_I h_I¹` over Haar-bearing `I`, by one downward sweep.
pub(crate) fn averaging_synthesis(grid: Grid, c: &[f64]) -> LeafFunction {
    let n = grid.depth();
    let mut current = vec![c[0]];
    let mut next = Vec::with_capacity(grid.leaf_count());
    for level in 1..n {
        let start = (1usize << level) - 1;
        let inv_len = (1u64 << level) as f64;
        next.clear();
        for (j, &v) in current.iter().enumerate() {
            next.push(v + c[start + 2 * j] * inv_len);
            next.push(v + c[start + 2 * j + 1] * inv_len);
        }
        std::mem::swap(&mut current, &mut next);
    }
    let values = current.iter().flat_map(|&v| [v, v]).collect();
    LeafFunction::new(grid, values).expect("leaf count")
}

/// A paraproduct with a fixed symbol.
#[derive(Debug, Clone)]
pub struct Paraproduct {
    kind: ParaproductType,
    symbol: HaarSymbol,
    label: String,
}

impl Paraproduct {
    pub fn kind(&self) -> ParaproductType {
        self.kind
    }

    pub fn symbol(&self) -> &HaarSymbol {
        &self.symbol
    }

    fn run(&self, kind: ParaproductType, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        let grid = self.symbol.grid();
        let b = self.symbol.coefficients();
        match kind {
            ParaproductType::P01 => {
                let avg = averages(f);
                let coeff = b.iter().zip(avg.as_slice()).map(|(b, a)| b * a).collect();
                synthesize(&HaarSymbol::new(grid, coeff, 0.0).expect("symbol length"))
            }
            ParaproductType::P10 => {
                let hat = analyze(f);
                let c: Vec<f64> = b.iter().zip(hat.coefficients()).map(|(b, x)| b * x).collect();
                averaging_synthesis(grid, &c)
            }
            ParaproductType::P00 => {
                let mut hat = analyze(f);
                for (x, b) in hat.coefficients_mut().iter_mut().zip(b) {
                    *x *= b;
                }
                hat.set_mean(0.0);
                synthesize(&hat)
            }
            ParaproductType::P11 => {
                let avg = averages(f);
                let c: Vec<f64> = b.iter().zip(avg.as_slice()).map(|(b, a)| b * a).collect();
                averaging_synthesis(grid, &c)
            }
            ParaproductType::Mean => LeafFunction::constant(grid, self.symbol.mean() * f.integral()),
        }
    }
}

impl DyadicOperator for Paraproduct {
    fn grid(&self) -> Grid {
        self.symbol.grid()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn apply(&self, f: &LeafFunction) -> LeafFunction {
        self.run(self.kind, f)
    }

    fn adjoint_apply(&self, f: &LeafFunction) -> LeafFunction {
        self.run(self.kind.adjoint(), f)
    }
}

/// `P_b^{(α,β)}`. The coefficients of `symbol` are the `b_I`; for
/// [`ParaproductType::Mean`] only `symbol.mean()` is used.
pub fn paraproduct(symbol: HaarSymbol, kind: ParaproductType) -> Paraproduct {
    Paraproduct {
        kind,
        symbol,
        label: format!("P{}", kind.code()),
    }
}

/// Pointwise multiplication `M_b`.
#[derive(Debug, Clone)]
pub struct Multiplier {
    b: LeafFunction,
}

impl Multiplier {
    pub fn symbol(&self) -> &LeafFunction {
        &self.b
    }
}

impl DyadicOperator for Multiplier {
    fn grid(&self) -> Grid {
        self.b.grid()
    }

    fn label(&self) -> &str {
        "M"
    }

    fn apply(&self, f: &LeafFunction) -> LeafFunction {
        check_input(self, f);
        self.b.pointwise_mul(f)
    }

    fn adjoint_apply(&self, f: &LeafFunction) -> LeafFunction {
        self.apply(f)
    }
}

pub fn multiplier(b: LeafFunction) -> Multiplier {
    Multiplier { b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DyadicIndex;
    use crate::haar::averaging_function;

    #[test]
    fn averaging_synthesis_matches_direct_sum() {
        let grid = Grid::new(4).unwrap();
        let c: Vec<f64> = (0..grid.haar_count()).map(|k| (k as f64 * 0.7).cos()).collect();
        let fast = averaging_synthesis(grid, &c);
        let mut slow = LeafFunction::zeros(grid);
        for (k, &ck) in c.iter().enumerate() {
            slow.add_assign(&averaging_function(grid, DyadicIndex::from_offset(k)).unwrap().scale(ck));
        }
        assert!(fast.max_abs_diff(&slow) < 1e-12);
    }

    #[test]
    fn p01_on_constant_returns_centered_symbol() {
        let grid = Grid::new(5).unwrap();
        let b = LeafFunction::from_fn(grid, |j| (j as f64).sqrt());
        let p = paraproduct(analyze(&b), ParaproductType::P01);
        let out = p.apply(&LeafFunction::constant(grid, 1.0));
        let mut centered = b.clone();
        centered.remove_mean();
        assert!(out.max_abs_diff(&centered) < 1e-12);
    }
}
