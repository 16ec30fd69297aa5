//! Leaf-resolved functions, multiscale averages and the Haar transform.
//!
//! A [`LeafFunction`] is piecewise constant on the `2^n` finest cells, so every
//! integral in the model is an exact finite sum. Analysis and synthesis are
//! single tree sweeps.

use crate::error::{Error, Result};
use crate::grid::{DyadicIndex, Grid};

/// A real function that is constant on each leaf cell of `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl LeafFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.leaf_count() {
            return Err(Error::Parameter(format!(
                "expected {} leaf values, got {}",
                grid.leaf_count(),
                values.len()
            )));
        }
        Ok(LeafFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        LeafFunction {
            grid,
            values: vec![value; grid.leaf_count()],
        }
    }

    /// Builds a function from its per-leaf values, `leaf -> value`.
    pub fn from_fn(grid: Grid, f: impl FnMut(usize) -> f64) -> Self {
        LeafFunction {
            grid,
            values: (0..grid.leaf_count()).map(f).collect(),
        }
    }

    /// Indicator `1_I`.
    pub fn indicator(grid: Grid, index: DyadicIndex) -> Result<Self> {
        grid.check(index)?;
        let range = grid.leaf_range(index);
        Ok(Self::from_fn(grid, |j| if range.contains(&j) { 1.0 } else { 0.0 }))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `∫ f` over `[0, 1)`.
    pub fn integral(&self) -> f64 {
        self.grid.cell() * self.values.iter().sum::<f64>()
    }

    /// `∫_I f`.
    pub fn integral_over(&self, index: DyadicIndex) -> f64 {
        self.grid.cell() * self.values[self.grid.leaf_range(index)].iter().sum::<f64>()
    }

    /// Unweighted `L²([0,1))` inner product.
    pub fn inner(&self, other: &LeafFunction) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.grid.cell()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    /// Inner product in `L²(σ)`.
    pub fn weighted_inner(&self, other: &LeafFunction, sigma: &LeafFunction) -> f64 {
        self.grid.cell()
            * self
                .values
                .iter()
                .zip(&other.values)
                .zip(&sigma.values)
                .map(|((a, b), s)| a * b * s)
                .sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &LeafFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> LeafFunction {
        LeafFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &LeafFunction, f: impl Fn(f64, f64) -> f64) -> LeafFunction {
        debug_assert_eq!(self.grid, other.grid);
        LeafFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn pointwise_mul(&self, other: &LeafFunction) -> LeafFunction {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &LeafFunction) -> LeafFunction {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &LeafFunction) -> LeafFunction {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> LeafFunction {
        self.map(|v| s * v)
    }

    pub fn add_assign(&mut self, other: &LeafFunction) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    /// Removes the global mean, leaving a function orthogonal to constants.
    pub fn remove_mean(&mut self) {
        let mean = self.integral();
        for v in &mut self.values {
            *v -= mean;
        }
    }
}

/// Averages `⟨f⟩_I` over every interval of the grid, levels `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiscaleAverages {
    grid: Grid,
    avg: Vec<f64>,
}

impl MultiscaleAverages {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn get(&self, index: DyadicIndex) -> f64 {
        self.avg[index.offset()]
    }

    /// Flat level-contiguous storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.avg
    }
}

/// A sequence indexed by Haar-bearing intervals, plus the coefficient of the
/// constant function.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarSymbol {
    grid: Grid,
    coeff: Vec<f64>,
    mean: f64,
}

impl HaarSymbol {
    pub fn zeros(grid: Grid) -> Self {
        HaarSymbol {
            grid,
            coeff: vec![0.0; grid.haar_count()],
            mean: 0.0,
        }
    }

    pub fn new(grid: Grid, coeff: Vec<f64>, mean: f64) -> Result<Self> {
        if coeff.len() != grid.haar_count() {
            return Err(Error::Parameter(format!(
                "expected {} Haar coefficients, got {}",
                grid.haar_count(),
                coeff.len()
            )));
        }
        Ok(HaarSymbol { grid, coeff, mean })
    }

    /// Builds a symbol from a per-interval rule over Haar-bearing intervals.
    pub fn from_fn(grid: Grid, mean: f64, mut f: impl FnMut(DyadicIndex) -> f64) -> Self {
        HaarSymbol {
            grid,
            coeff: grid.haar_intervals().map(&mut f).collect(),
            mean,
        }
    }

    /// The average sequence `{⟨b⟩_I}` restricted to Haar-bearing `I`, with the
    /// global average as `mean`.
    pub fn from_averages(averages: &MultiscaleAverages) -> Self {
        let grid = averages.grid;
        HaarSymbol {
            grid,
            coeff: averages.avg[..grid.haar_count()].to_vec(),
            mean: averages.avg[0],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn get(&self, index: DyadicIndex) -> f64 {
        self.coeff[index.offset()]
    }

    pub fn set(&mut self, index: DyadicIndex, value: f64) {
        self.coeff[index.offset()] = value;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn set_mean(&mut self, mean: f64) {
        self.mean = mean;
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeff
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coeff
    }

    /// `mean² + Σ coeff²`, the squared `L²` norm of the synthesized function.
    pub fn energy(&self) -> f64 {
        self.mean * self.mean + self.coeff.iter().map(|c| c * c).sum::<f64>()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> HaarSymbol {
        HaarSymbol {
            grid: self.grid,
            coeff: self.coeff.iter().map(|&c| f(c)).collect(),
            mean: f(self.mean),
        }
    }
}

/// `h_I = |I|^{-1/2} (1_{I-} - 1_{I+})`.
pub fn haar_function(grid: Grid, index: DyadicIndex) -> Result<LeafFunction> {
    grid.check_haar(index)?;
    let height = index.length().recip().sqrt();
    let range = grid.leaf_range(index);
    let mid = range.start + range.len() / 2;
    Ok(LeafFunction::from_fn(grid, |j| {
        if !range.contains(&j) {
            0.0
        } else if j < mid {
            height
        } else {
            -height
        }
    }))
}

/// `h_I¹ = |I|^{-1} 1_I`.
pub fn averaging_function(grid: Grid, index: DyadicIndex) -> Result<LeafFunction> {
    grid.check(index)?;
    Ok(LeafFunction::indicator(grid, index)?.scale(index.length().recip()))
}

/// Fills `avg` (length `node_count`) bottom-up; returns the number of node updates.
fn upward_sweep(grid: Grid, leaves: &[f64], avg: &mut [f64]) -> usize {
    let n = grid.depth();
    let leaf_start = grid.haar_count();
    avg[leaf_start..].copy_from_slice(leaves);
    let mut ops = 0;
    for level in (0..n).rev() {
        let start = (1usize << level) - 1;
        let child_start = (1usize << (level + 1)) - 1;
        for j in 0..1usize << level {
            avg[start + j] = 0.5 * (avg[child_start + 2 * j] + avg[child_start + 2 * j + 1]);
            ops += 1;
        }
    }
    ops
}

/// Multiscale averages of `f` by one upward sweep.
pub fn averages(f: &LeafFunction) -> MultiscaleAverages {
    let grid = f.grid;
    let mut avg = vec![0.0; grid.node_count()];
    upward_sweep(grid, &f.values, &mut avg);
    MultiscaleAverages { grid, avg }
}

/// Haar coefficients `f̂(I) = ⟨f, h_I⟩` together with the global mean.
pub fn analyze(f: &LeafFunction) -> HaarSymbol {
    analyze_counted(f).0
}

/// [`analyze`], also returning the number of elementary sweep steps taken.
pub fn analyze_counted(f: &LeafFunction) -> (HaarSymbol, usize) {
    let grid = f.grid;
    let mut avg = vec![0.0; grid.node_count()];
    let mut ops = upward_sweep(grid, &f.values, &mut avg);
    let mut coeff = vec![0.0; grid.haar_count()];
    for level in 0..grid.depth() {
        let start = (1usize << level) - 1;
        let child_start = (1usize << (level + 1)) - 1;
        // f̂(I) = (√|I| / 2) (⟨f⟩_{I-} − ⟨f⟩_{I+})
        let half_root = 0.5 * (-(level as f64) / 2.0).exp2();
        for j in 0..1usize << level {
            coeff[start + j] = half_root * (avg[child_start + 2 * j] - avg[child_start + 2 * j + 1]);
            ops += 1;
        }
    }
    (
        HaarSymbol {
            grid,
            coeff,
            mean: avg[0],
        },
        ops,
    )
}

/// Inverse of [`analyze`]: `mean + Σ coeff[I] h_I`.
pub fn synthesize(symbol: &HaarSymbol) -> LeafFunction {
    synthesize_counted(symbol).0
}

pub fn synthesize_counted(symbol: &HaarSymbol) -> (LeafFunction, usize) {
    let grid = symbol.grid;
    let mut current = Vec::with_capacity(grid.leaf_count());
    let mut next = Vec::with_capacity(grid.leaf_count());
    current.push(symbol.mean);
    let mut ops = 0;
    for level in 0..grid.depth() {
        let start = (1usize << level) - 1;
        let height = (level as f64 / 2.0).exp2();
        next.clear();
        for (j, &v) in current.iter().enumerate() {
            let c = symbol.coeff[start + j] * height;
            next.push(v + c);
            next.push(v - c);
            ops += 1;
        }
        std::mem::swap(&mut current, &mut next);
    }
    (
        LeafFunction {
            grid,
            values: current,
        },
        ops,
    )
}

/// `δ(J, I)`: `+1` if `J ⊆ I-`, `-1` if `J ⊆ I+`, `0` otherwise.
pub fn delta_sign(j: DyadicIndex, i: DyadicIndex) -> i8 {
    if !j.is_strict_subset_of(i) {
        return 0;
    }
    if j.ancestor_at(i.level + 1) == i.left_child() {
        1
    } else {
        -1
    }
}

/// Haar coefficient of a product through the product formula
/// `Σ_{J⊊I} f̂(J)ĝ(J)δ(J,I)/√|I| + f̂(I)⟨g⟩_I + ĝ(I)⟨f⟩_I`.
///
/// Reuses the analyses of both factors across intervals.
#[derive(Debug, Clone)]
pub struct ProductFormula {
    f_hat: HaarSymbol,
    g_hat: HaarSymbol,
    f_avg: MultiscaleAverages,
    g_avg: MultiscaleAverages,
}

impl ProductFormula {
    pub fn new(f: &LeafFunction, g: &LeafFunction) -> Result<Self> {
        f.grid.same(g.grid)?;
        Ok(ProductFormula {
            f_hat: analyze(f),
            g_hat: analyze(g),
            f_avg: averages(f),
            g_avg: averages(g),
        })
    }

    pub fn coeff(&self, i: DyadicIndex) -> Result<f64> {
        let grid = self.f_hat.grid;
        grid.check_haar(i)?;
        let mut nested = 0.0;
        for level in i.level + 1..grid.depth() {
            let width = 1u64 << (level - i.level);
            let first = i.position * width;
            for position in first..first + width {
                let j = DyadicIndex { level, position };
                let sign = if position < first + width / 2 { 1.0 } else { -1.0 };
                nested += sign * self.f_hat.get(j) * self.g_hat.get(j);
            }
        }
        Ok(nested / i.length().sqrt()
            + self.f_hat.get(i) * self.g_avg.get(i)
            + self.g_hat.get(i) * self.f_avg.get(i))
    }
}

pub fn product_formula_coeff(f: &LeafFunction, g: &LeafFunction, i: DyadicIndex) -> Result<f64> {
    ProductFormula::new(f, g)?.coeff(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(grid: Grid, seed: u64) -> LeafFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        LeafFunction::from_fn(grid, |_| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn haar_function_at_root_and_below() {
        let g1 = Grid::new(1).unwrap();
        assert_eq!(haar_function(g1, DyadicIndex::ROOT).unwrap().values(), &[1.0, -1.0]);
        let g2 = Grid::new(2).unwrap();
        let h = haar_function(g2, DyadicIndex::new(1, 0).unwrap()).unwrap();
        let r2 = 2f64.sqrt();
        assert_eq!(h.values(), &[r2, -r2, 0.0, 0.0]);
    }

    #[test]
    fn haar_function_rejects_leaves() {
        let grid = Grid::new(3).unwrap();
        let err = haar_function(grid, DyadicIndex::new(3, 1).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InvalidIndex { .. }));
        assert!(averaging_function(grid, DyadicIndex::new(3, 1).unwrap()).is_ok());
    }

    #[test]
    fn gram_matrix_is_identity() {
        // Brute force over leaf values, independent of the sweeps.
        for depth in 1..=6 {
            let grid = Grid::new(depth).unwrap();
            let mut basis = vec![LeafFunction::constant(grid, 1.0)];
            basis.extend(grid.haar_intervals().map(|i| haar_function(grid, i).unwrap()));
            for (a, fa) in basis.iter().enumerate() {
                for (b, fb) in basis.iter().enumerate() {
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert!((fa.inner(fb) - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn analyze_constant_and_single_haar() {
        let grid = Grid::new(5).unwrap();
        let s = analyze(&LeafFunction::constant(grid, 2.5));
        assert!(s.coefficients().iter().all(|&c| c.abs() < 1e-15));
        assert_eq!(s.mean(), 2.5);
        let k = DyadicIndex::new(3, 6).unwrap();
        let s = analyze(&haar_function(grid, k).unwrap());
        for i in grid.haar_intervals() {
            let expected = if i == k { 1.0 } else { 0.0 };
            assert!((s.get(i) - expected).abs() < 1e-14);
        }
        assert!(s.mean().abs() < 1e-15);
    }

    #[test]
    fn round_trip_depth_eight() {
        let grid = Grid::new(8).unwrap();
        for seed in 0..10 {
            let f = random(grid, seed);
            assert!(synthesize(&analyze(&f)).max_abs_diff(&f) < 1e-12);
        }
    }

    #[test]
    fn parseval() {
        let grid = Grid::new(8).unwrap();
        for seed in 0..100 {
            let f = random(grid, seed);
            let lhs = f.inner(&f);
            let rhs = analyze(&f).energy();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }
    }

    #[test]
    fn averages_match_direct_summation() {
        let grid = Grid::new(8).unwrap();
        let f = random(grid, 3);
        let avg = averages(&f);
        for i in grid.intervals() {
            let direct = f.integral_over(i) / i.length();
            assert!((avg.get(i) - direct).abs() < 1e-13);
            if i.level < grid.depth() {
                let mid = 0.5 * (avg.get(i.left_child()) + avg.get(i.right_child()));
                assert!((avg.get(i) - mid).abs() < 1e-15);
            }
        }
        let c = averages(&LeafFunction::constant(grid, -1.5));
        assert!(c.as_slice().iter().all(|&v| v == -1.5));
        let half = LeafFunction::indicator(grid, DyadicIndex::new(1, 0).unwrap()).unwrap();
        assert_eq!(averages(&half).get(DyadicIndex::ROOT), 0.5);
    }

    #[test]
    fn delta_sign_conventions() {
        let root = DyadicIndex::ROOT;
        assert_eq!(delta_sign(DyadicIndex::new(2, 0).unwrap(), root), 1);
        assert_eq!(delta_sign(DyadicIndex::new(2, 3).unwrap(), root), -1);
        assert_eq!(delta_sign(root, root), 0);
        // Pointwise sign of h_I on J, all pairs at n = 4.
        let grid = Grid::new(4).unwrap();
        for i in grid.haar_intervals() {
            let h = haar_function(grid, i).unwrap();
            for j in grid.intervals() {
                let leaf = grid.leaf_range(j).start;
                let expected = if j.is_strict_subset_of(i) {
                    (h.values()[leaf] * i.length().sqrt()).round() as i8
                } else {
                    0
                };
                assert_eq!(delta_sign(j, i), expected, "J={j} I={i}");
            }
        }
    }

    #[test]
    fn product_formula_matches_pointwise_product() {
        let grid = Grid::new(8).unwrap();
        let f = random(grid, 11);
        let g = random(grid, 12);
        let direct = analyze(&f.pointwise_mul(&g));
        let pf = ProductFormula::new(&f, &g).unwrap();
        for i in grid.haar_intervals() {
            assert!((pf.coeff(i).unwrap() - direct.get(i)).abs() < 1e-12, "I={i}");
        }
    }

    #[test]
    fn product_formula_special_cases() {
        let grid = Grid::new(6).unwrap();
        let g = random(grid, 5);
        let one = LeafFunction::constant(grid, 1.0);
        let g_hat = analyze(&g);
        let k = DyadicIndex::new(2, 1).unwrap();
        assert!((product_formula_coeff(&one, &g, k).unwrap() - g_hat.get(k)).abs() < 1e-14);
        let h = haar_function(grid, k).unwrap();
        assert!(product_formula_coeff(&h, &h, k).unwrap().abs() < 1e-12);
    }

    #[test]
    fn transforms_are_linear_time() {
        let small = Grid::new(9).unwrap();
        let large = Grid::new(12).unwrap();
        let (_, ops_small) = analyze_counted(&random(small, 1));
        let (_, ops_large) = analyze_counted(&random(large, 1));
        let ratio = ops_large as f64 / ops_small as f64;
        assert!((ratio - 8.0).abs() < 0.05, "ratio {ratio}");
        let (_, syn_small) = synthesize_counted(&HaarSymbol::zeros(small));
        let (_, syn_large) = synthesize_counted(&HaarSymbol::zeros(large));
        assert!((syn_large as f64 / syn_small as f64 - 8.0).abs() < 0.05);
    }
}
