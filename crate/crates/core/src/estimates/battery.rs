use std::fmt;

use rayon::prelude::*;

use super::sequences::subtree_sums;
use crate::grid::{DyadicIndex, Grid};
use crate::haar::analyze;
use crate::weights::Weight;

/// Row labels in report order.
pub const BATTERY_ROWS: [&str; 9] = ["a", "b", "c", "d", "e", "f", "g", "h", "i"];

/// One inequality `Σ_{J⊆I} t_J ≤ C [w]^p N(I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryRow {
    pub label: &'static str,
    /// power `p` of `[w]_{A₂}` on the right-hand side
    pub a2_power: i32,
    /// `max_I Σ_{J⊆I} t_J / N(I)`
    pub c_emp: f64,
    pub attaining: DyadicIndex,
    /// left-hand side at the attaining interval
    pub lhs: f64,
    /// `N(I)` at the attaining interval
    pub normalizer: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub rows: Vec<BatteryRow>,
}

impl InequalityReport {
    pub fn row(&self, label: &str) -> Option<&BatteryRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

impl fmt::Display for InequalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(
                f,
                "{}  {:.16e}  ({},{})  {:.16e}",
                r.label, r.c_emp, r.attaining.level, r.attaining.position, r.normalizer
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Normalizer {
    Length,
    InvMass,
    Mass,
}

impl Normalizer {
    fn value(self, w: &Weight, i: DyadicIndex) -> f64 {
        match self {
            Normalizer::Length => i.length(),
            Normalizer::InvMass => w.inv_mass(i),
            Normalizer::Mass => w.mass(i),
        }
    }
}

struct RowDef {
    label: &'static str,
    power: i32,
    normalizer: Normalizer,
    terms: Vec<f64>,
}

fn row_definitions(w: &Weight) -> Vec<RowDef> {
    let grid = w.grid();
    let n = grid.depth();
    let hat_inv_half = analyze(w.inv_half());
    let hat_inv = analyze(w.inv());
    let hat_w = analyze(w.w());
    let over = |f: &dyn Fn(DyadicIndex) -> f64| -> Vec<f64> { grid.haar_intervals().map(f).collect() };
    let a = |j| hat_inv_half.get(j).powi(2);
    let b = |k| hat_inv.get(k).powi(2);
    // |ŵ⁻¹(K) ŵ(K-)|, defined when K- is Haar-bearing
    let cross = |k: DyadicIndex| {
        if k.level + 1 < n {
            (hat_inv.get(k) * hat_w.get(k.left_child())).abs()
        } else {
            0.0
        }
    };
    let avg = |i| w.avg().get(i);
    let avg_inv = |i| w.avg_inv().get(i);
    vec![
        RowDef { label: "a", power: 2, normalizer: Normalizer::Length, terms: over(&|j| a(j) * avg(j)) },
        RowDef {
            label: "b",
            power: 2,
            normalizer: Normalizer::Length,
            terms: over(&|j| a(j) * w.avg_half().get(j).powi(2)),
        },
        RowDef {
            label: "c",
            power: 2,
            normalizer: Normalizer::Length,
            terms: over(&|j| a(j) * avg(j.parent_or_self())),
        },
        RowDef { label: "d", power: 1, normalizer: Normalizer::Length, terms: over(&|k| b(k) / avg_inv(k).powi(2)) },
        RowDef { label: "e", power: 1, normalizer: Normalizer::InvMass, terms: over(&|k| b(k) / avg_inv(k)) },
        RowDef { label: "f", power: 0, normalizer: Normalizer::Mass, terms: over(&|k| b(k) / avg_inv(k).powi(3)) },
        RowDef { label: "g", power: 1, normalizer: Normalizer::Length, terms: over(&cross) },
        RowDef { label: "h", power: 1, normalizer: Normalizer::Mass, terms: over(&|k| cross(k) / avg_inv(k)) },
        RowDef { label: "i", power: 2, normalizer: Normalizer::Mass, terms: over(&|k| a(k) * avg(k).powi(2)) },
    ]
}

fn evaluate(w: &Weight, grid: Grid, def: RowDef) -> BatteryRow {
    let tail = subtree_sums(grid, &def.terms);
    let mut best = BatteryRow {
        label: def.label,
        a2_power: def.power,
        c_emp: 0.0,
        attaining: DyadicIndex::ROOT,
        lhs: tail[0],
        normalizer: def.normalizer.value(w, DyadicIndex::ROOT),
    };
    for i in grid.intervals() {
        let lhs = tail[i.offset()];
        let norm = def.normalizer.value(w, i);
        let ratio = lhs / norm;
        if ratio > best.c_emp {
            best.c_emp = ratio;
            best.attaining = i;
            best.lhs = lhs;
            best.normalizer = norm;
        }
    }
    best
}

/// Exhaustive empirical constants for rows (a)–(i). Inner sums run over
/// Haar-bearing `J ⊆ I`; outer intervals over the whole grid. The root is
/// its own parent in row (c).
pub fn inequality_battery(w: &Weight) -> InequalityReport {
    let grid = w.grid();
    let rows = row_definitions(w)
        .into_par_iter()
        .map(|def| evaluate(w, grid, def))
        .collect();
    InequalityReport { rows }
}

/// Left-hand side of row (i) at `L`: `Σ_{K⊆L} ŵ^{-1/2}(K)² ⟨w⟩_K²`.
pub fn battery_row_i_lhs(w: &Weight, l: DyadicIndex) -> f64 {
    let def = row_definitions(w).pop().expect("row i");
    subtree_sums(w.grid(), &def.terms)[l.offset()]
}

impl BatteryRow {
    /// `C_emp / [w]^p`.
    pub fn residual(&self, a2: f64) -> f64 {
        self.c_emp / a2.powi(self.a2_power)
    }
}
