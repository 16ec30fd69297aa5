//! Weights, their `A₂` characteristic, and the parameterized families used to
//! drive experiments.
//!
//! Cascade weights draw one sign per internal node from `ChaCha8Rng`
//! (`seed_from_u64(seed)`), visiting nodes level by level, left to right. A
//! `true` draw gives the left child the factor `1 + ε`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{DyadicIndex, Grid};
use crate::haar::{averages, LeafFunction, MultiscaleAverages};

/// A strictly positive leaf function with its pointwise powers
/// `w⁻¹`, `w^{1/2}`, `w^{-1/2}` and their multiscale averages.
#[derive(Debug, Clone)]
pub struct Weight {
    w: LeafFunction,
    w_inv: LeafFunction,
    w_half: LeafFunction,
    w_inv_half: LeafFunction,
    avg: MultiscaleAverages,
    avg_inv: MultiscaleAverages,
    avg_half: MultiscaleAverages,
    avg_inv_half: MultiscaleAverages,
}

impl Weight {
    pub fn new(w: LeafFunction) -> Result<Self> {
        if let Some((j, v)) = w
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::Parameter(format!(
                "weight must be finite and strictly positive; leaf {j} has value {v}"
            )));
        }
        let w_inv = w.map(f64::recip);
        let w_half = w.map(f64::sqrt);
        let w_inv_half = w_half.map(f64::recip);
        Ok(Weight {
            avg: averages(&w),
            avg_inv: averages(&w_inv),
            avg_half: averages(&w_half),
            avg_inv_half: averages(&w_inv_half),
            w,
            w_inv,
            w_half,
            w_inv_half,
        })
    }

    pub fn grid(&self) -> Grid {
        self.w.grid()
    }

    pub fn w(&self) -> &LeafFunction {
        &self.w
    }

    pub fn inv(&self) -> &LeafFunction {
        &self.w_inv
    }

    pub fn half(&self) -> &LeafFunction {
        &self.w_half
    }

    pub fn inv_half(&self) -> &LeafFunction {
        &self.w_inv_half
    }

    pub fn avg(&self) -> &MultiscaleAverages {
        &self.avg
    }

    pub fn avg_inv(&self) -> &MultiscaleAverages {
        &self.avg_inv
    }

    pub fn avg_half(&self) -> &MultiscaleAverages {
        &self.avg_half
    }

    pub fn avg_inv_half(&self) -> &MultiscaleAverages {
        &self.avg_inv_half
    }

    /// `w(I) = ∫_I w`.
    pub fn mass(&self, index: DyadicIndex) -> f64 {
        self.avg.get(index) * index.length()
    }

    /// `w⁻¹(I)`.
    pub fn inv_mass(&self, index: DyadicIndex) -> f64 {
        self.avg_inv.get(index) * index.length()
    }

    /// The dual weight `w⁻¹`.
    pub fn dual(&self) -> Weight {
        Weight {
            w: self.w_inv.clone(),
            w_inv: self.w.clone(),
            w_half: self.w_inv_half.clone(),
            w_inv_half: self.w_half.clone(),
            avg: self.avg_inv.clone(),
            avg_inv: self.avg.clone(),
            avg_half: self.avg_inv_half.clone(),
            avg_inv_half: self.avg_half.clone(),
        }
    }
}

/// A weight family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    Constant { c: f64 },
    Power { alpha: f64 },
    Cascade { eps: f64, seed: u64 },
    Step { a: f64, b: f64, split: f64 },
}

impl WeightSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightSpec::Constant { c } if !(c.is_finite() && c > 0.0) => {
                Err(Error::Parameter(format!("constant weight needs c > 0, got {c}")))
            }
            WeightSpec::Power { alpha } if !(alpha > -1.0 && alpha < 1.0) => Err(
                Error::Parameter(format!("power weight needs -1 < alpha < 1, got {alpha}")),
            ),
            WeightSpec::Cascade { eps, .. } if !(0.0..1.0).contains(&eps) => Err(
                Error::Parameter(format!("cascade weight needs 0 <= eps < 1, got {eps}")),
            ),
            WeightSpec::Step { a, b, .. } if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) => {
                Err(Error::Parameter(format!("step weight needs a, b > 0, got a={a}, b={b}")))
            }
            WeightSpec::Step { split, .. } if !(0.0..=1.0).contains(&split) => Err(
                Error::Parameter(format!("step split must lie in [0, 1], got {split}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            WeightSpec::Constant { .. } => "constant",
            WeightSpec::Power { .. } => "power",
            WeightSpec::Cascade { .. } => "cascade",
            WeightSpec::Step { .. } => "step",
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Constant { c } => write!(f, "constant:c={c}"),
            WeightSpec::Power { alpha } => write!(f, "power:alpha={alpha}"),
            WeightSpec::Cascade { eps, seed } => write!(f, "cascade:eps={eps},seed={seed}"),
            WeightSpec::Step { a, b, split } => write!(f, "step:a={a},b={b},split={split}"),
        }
    }
}

/// Parses a dyadic rational written either as `p/q` or as a decimal.
pub fn parse_rational(text: &str) -> Result<f64> {
    let bad = || Error::Parameter(format!("cannot parse `{text}` as a rational number"));
    match text.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            Ok(p / q)
        }
        None => text.trim().parse().map_err(|_| bad()),
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (family, params) = text
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("weight spec `{text}` lacks `family:`")))?;
        let mut pairs = Vec::new();
        for item in params.split(',').filter(|s| !s.trim().is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("expected key=value, got `{item}`")))?;
            pairs.push((key.trim(), value.trim()));
        }
        let lookup = |key: &str| -> Result<&str> {
            pairs
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Parameter(format!("{family} weight needs `{key}=`")))
        };
        let real = |key: &str| -> Result<f64> {
            let value = lookup(key)?;
            value
                .parse()
                .map_err(|_| Error::Parameter(format!("`{key}={value}` is not a real number")))
        };
        let allowed: &[&str] = match family.trim() {
            "constant" => &["c"],
            "power" => &["alpha"],
            "cascade" => &["eps", "seed"],
            "step" => &["a", "b", "split"],
            other => return Err(Error::Parameter(format!("unknown weight family `{other}`"))),
        };
        if let Some((k, _)) = pairs.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::Parameter(format!("unexpected key `{k}` for {family} weight")));
        }
        let spec = match family.trim() {
            "constant" => WeightSpec::Constant { c: real("c")? },
            "power" => WeightSpec::Power { alpha: real("alpha")? },
            "cascade" => {
                let seed = lookup("seed")?;
                WeightSpec::Cascade {
                    eps: real("eps")?,
                    seed: seed
                        .parse()
                        .map_err(|_| Error::Parameter(format!("`seed={seed}` is not a u64")))?,
                }
            }
            _ => WeightSpec::Step {
                a: real("a")?,
                b: real("b")?,
                split: parse_rational(lookup("split")?)?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Exact cell average of `x^alpha` over `[a, b)`.
fn power_cell_average(alpha: f64, a: f64, b: f64) -> f64 {
    if alpha == 0.0 {
        return 1.0;
    }
    let p = alpha + 1.0;
    (b.powf(p) - a.powf(p)) / (p * (b - a))
}

pub fn make_weight(spec: &WeightSpec, grid: Grid) -> Result<Weight> {
    spec.validate()?;
    let cell = grid.cell();
    let values = match *spec {
        WeightSpec::Constant { c } => vec![c; grid.leaf_count()],
        WeightSpec::Power { alpha } => (0..grid.leaf_count())
            .map(|j| power_cell_average(alpha, j as f64 * cell, (j + 1) as f64 * cell))
            .collect(),
        WeightSpec::Cascade { eps, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut level = vec![1.0];
            for _ in 0..grid.depth() {
                let mut next = Vec::with_capacity(2 * level.len());
                for &v in &level {
                    let (left, right) = if rng.random::<bool>() {
                        (v * (1.0 + eps), v * (1.0 - eps))
                    } else {
                        (v * (1.0 - eps), v * (1.0 + eps))
                    };
                    next.push(left);
                    next.push(right);
                }
                level = next;
            }
            level
        }
        WeightSpec::Step { a, b, split } => (0..grid.leaf_count())
            .map(|j| if (j + 1) as f64 * cell <= split { a } else { b })
            .collect(),
    };
    Weight::new(LeafFunction::new(grid, values)?)
}

/// `[w]_{A₂} = max_I ⟨w⟩_I ⟨w⁻¹⟩_I` over every interval of the grid.
pub fn a2_characteristic(w: &Weight) -> f64 {
    a2_attained(w).0
}

/// The characteristic together with an interval attaining it.
pub fn a2_attained(w: &Weight) -> (f64, DyadicIndex) {
    // c * (1/c) can land an ulp off 1
    let leaves = w.w.values();
    if leaves.iter().all(|&v| v == leaves[0]) {
        return (1.0, DyadicIndex::ROOT);
    }
    w.avg
        .as_slice()
        .iter()
        .zip(w.avg_inv.as_slice())
        .enumerate()
        .map(|(k, (a, b))| (a * b, DyadicIndex::from_offset(k)))
        .fold((f64::NEG_INFINITY, DyadicIndex::ROOT), |best, cur| {
            if cur.0 > best.0 {
                cur
            } else {
                best
            }
        })
}

/// `𝔼_K^σ(f) = σ(K)⁻¹ ∫_K f σ`.
pub fn weighted_average(f: &LeafFunction, sigma: &Weight, k: DyadicIndex) -> Result<f64> {
    f.grid().same(sigma.grid())?;
    f.grid().check(k)?;
    let range = f.grid().leaf_range(k);
    let num: f64 = f.values()[range.clone()]
        .iter()
        .zip(&sigma.w.values()[range.clone()])
        .map(|(a, s)| a * s)
        .sum();
    let den: f64 = sigma.w.values()[range].iter().sum();
    Ok(num / den)
}

/// Coefficients relating `h_K` to the `L²(σ)`-normalized Haar function:
/// `h_K = C_K h_K^σ + D_K h_K¹`.
#[derive(Debug, Clone)]
pub struct Disbalanced {
    pub c: f64,
    pub d: f64,
    pub h_sigma: LeafFunction,
}

pub fn disbalanced_data(sigma: &Weight, k: DyadicIndex) -> Result<Disbalanced> {
    let grid = sigma.grid();
    grid.check_haar(k)?;
    let avg = sigma.avg.get(k);
    let c = (sigma.avg.get(k.left_child()) * sigma.avg.get(k.right_child()) / avg).sqrt();
    let sigma_hat = 0.5 * k.length().sqrt() * (sigma.avg.get(k.left_child()) - sigma.avg.get(k.right_child()));
    let d = sigma_hat / avg;
    let h = crate::haar::haar_function(grid, k)?;
    let h1 = crate::haar::averaging_function(grid, k)?;
    let h_sigma = h.sub(&h1.scale(d)).scale(c.recip());
    Ok(Disbalanced { c, d, h_sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{analyze, averaging_function, haar_function};

    fn grid(n: u32) -> Grid {
        Grid::new(n).unwrap()
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("constant:c=3".parse::<WeightSpec>().unwrap(), WeightSpec::Constant { c: 3.0 });
        assert_eq!(
            "cascade:eps=0.4,seed=9".parse::<WeightSpec>().unwrap(),
            WeightSpec::Cascade { eps: 0.4, seed: 9 }
        );
        assert_eq!(
            "step:a=4,b=1,split=1/2".parse::<WeightSpec>().unwrap(),
            WeightSpec::Step { a: 4.0, b: 1.0, split: 0.5 }
        );
        for bad in [
            "power:alpha=1",
            "power:alpha=-1.5",
            "cascade:eps=1,seed=1",
            "step:a=0,b=1,split=1/2",
            "step:a=1,b=-2,split=1/2",
            "power",
            "gauss:s=1",
            "power:beta=0.3",
        ] {
            assert!(bad.parse::<WeightSpec>().is_err(), "{bad}");
        }
        let spec = WeightSpec::Cascade { eps: 0.25, seed: 3 };
        assert_eq!(spec.to_string().parse::<WeightSpec>().unwrap(), spec);
    }

    #[test]
    fn trivial_families() {
        let g = grid(6);
        let w = make_weight(&WeightSpec::Power { alpha: 0.0 }, g).unwrap();
        assert!(w.w().values().iter().all(|&v| v == 1.0));
        let w = make_weight(&WeightSpec::Cascade { eps: 0.0, seed: 42 }, g).unwrap();
        assert!(w.w().values().iter().all(|&v| v == 1.0));
        let w = make_weight(&WeightSpec::Step { a: 4.0, b: 1.0, split: 0.5 }, grid(1)).unwrap();
        assert_eq!(w.w().values(), &[4.0, 1.0]);
    }

    #[test]
    fn power_leaf_values_are_cell_averages() {
        let g = grid(5);
        let alpha = -0.6;
        let w = make_weight(&WeightSpec::Power { alpha }, g).unwrap();
        // midpoint-rule quadrature with many sub-samples per cell
        for (j, &v) in w.w().values().iter().enumerate() {
            let (a, b) = (j as f64 * g.cell(), (j + 1) as f64 * g.cell());
            let m = 200_000;
            let q: f64 = (0..m)
                .map(|k| (a + (k as f64 + 0.5) * (b - a) / m as f64).powf(alpha))
                .sum::<f64>()
                / m as f64;
            let tol = if j == 0 { 1e-2 } else { 1e-9 };
            assert!((q - v).abs() <= tol * v, "leaf {j}: {q} vs {v}");
        }
    }

    #[test]
    fn a2_examples() {
        let w = make_weight(&WeightSpec::Constant { c: 7.0 }, grid(6)).unwrap();
        assert_eq!(a2_characteristic(&w), 1.0);
        let w = make_weight(&WeightSpec::Step { a: 4.0, b: 1.0, split: 0.5 }, grid(1)).unwrap();
        assert!((a2_characteristic(&w) - 1.5625).abs() < 1e-15);
        let g = grid(10);
        let low = make_weight(&WeightSpec::Power { alpha: 0.5 }, g).unwrap();
        let high = make_weight(&WeightSpec::Power { alpha: 0.8 }, g).unwrap();
        assert!(a2_characteristic(&low) < a2_characteristic(&high));
    }

    #[test]
    fn a2_is_symmetric_and_at_least_one() {
        let g = grid(8);
        for seed in 0..10 {
            let w = make_weight(&WeightSpec::Cascade { eps: 0.5, seed }, g).unwrap();
            let a2 = a2_characteristic(&w);
            assert_eq!(a2, a2_characteristic(&w.dual()));
            assert!(a2 > 1.0);
            for i in g.intervals() {
                assert!(w.avg().get(i) * w.avg_inv().get(i) >= 1.0 - 1e-12);
                let h = w.avg_half().get(i);
                assert!(h * h <= w.avg().get(i) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn cascade_is_deterministic() {
        let g = grid(9);
        let spec = WeightSpec::Cascade { eps: 0.4, seed: 17 };
        let a = make_weight(&spec, g).unwrap();
        let b = make_weight(&spec, g).unwrap();
        let bits = |w: &Weight| w.w().values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let c = make_weight(&WeightSpec::Cascade { eps: 0.4, seed: 18 }, g).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn weighted_average_cases() {
        let g = grid(6);
        let sigma = make_weight(&WeightSpec::Cascade { eps: 0.3, seed: 2 }, g).unwrap();
        let f = LeafFunction::from_fn(g, |j| (j as f64).sin());
        let k = DyadicIndex::new(2, 1).unwrap();
        let c = LeafFunction::constant(g, 2.0);
        assert!((weighted_average(&c, &sigma, k).unwrap() - 2.0).abs() < 1e-14);
        let one = make_weight(&WeightSpec::Constant { c: 1.0 }, g).unwrap();
        let plain = averages(&f).get(k);
        assert!((weighted_average(&f, &one, k).unwrap() - plain).abs() < 1e-14);
        // dense quadrature: ∫ f σ 1_K / ∫ σ 1_K
        let ind = LeafFunction::indicator(g, k).unwrap();
        let num = f.weighted_inner(&ind, sigma.w());
        let den = ind.inner(sigma.w());
        assert!((weighted_average(&f, &sigma, k).unwrap() - num / den).abs() < 1e-13);
    }

    #[test]
    fn disbalanced_examples() {
        let g = grid(4);
        let one = make_weight(&WeightSpec::Constant { c: 1.0 }, g).unwrap();
        let k = DyadicIndex::new(1, 1).unwrap();
        let data = disbalanced_data(&one, k).unwrap();
        assert!((data.c - 1.0).abs() < 1e-15);
        assert!(data.d.abs() < 1e-15);
        assert!(data.h_sigma.max_abs_diff(&haar_function(g, k).unwrap()) < 1e-14);

        let step = make_weight(&WeightSpec::Step { a: 4.0, b: 1.0, split: 0.5 }, grid(1)).unwrap();
        let data = disbalanced_data(&step, DyadicIndex::ROOT).unwrap();
        assert!((data.c - (8.0f64 / 5.0).sqrt()).abs() < 1e-15);
        assert!((data.d - 0.6).abs() < 1e-15);
        assert!((analyze(step.w()).get(DyadicIndex::ROOT) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn disbalanced_reconstruction_and_normalization() {
        let g = grid(6);
        let sigma = make_weight(&WeightSpec::Cascade { eps: 0.6, seed: 5 }, g).unwrap();
        for k in g.haar_intervals() {
            let data = disbalanced_data(&sigma, k).unwrap();
            let h = haar_function(g, k).unwrap();
            let h1 = averaging_function(g, k).unwrap();
            let rebuilt = data.h_sigma.scale(data.c).add(&h1.scale(data.d));
            assert!(rebuilt.max_abs_diff(&h) < 1e-12);
            let norm = data.h_sigma.weighted_inner(&data.h_sigma, sigma.w());
            assert!((norm - 1.0).abs() < 1e-12, "K={k}: {norm}");
            assert!(data.h_sigma.inner(sigma.w()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let g = grid(2);
        let f = LeafFunction::new(g, vec![1.0, 0.0, 2.0, 3.0]).unwrap();
        assert!(Weight::new(f).is_err());
    }
}
