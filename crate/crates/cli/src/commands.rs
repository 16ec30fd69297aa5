//! Text reports for `battery`, `corona` and `kernel`.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use haarshift::estimates::{battery_row_i_lhs, corona, inequality_battery, s_coefficient};
use haarshift::operators::{shift_kernel_row, ShiftKind};
use haarshift::weights::{a2_characteristic, make_weight, WeightSpec};
use haarshift::{DyadicIndex, Grid};

pub const MAX_KERNEL_DEPTH: u32 = 7;

pub fn battery_report(spec: &WeightSpec, depth: u32) -> Result<String> {
    let w = make_weight(spec, Grid::new(depth)?)?;
    let mut out = format!("# weight {spec} depth {depth} a2 {:.16e}\n", a2_characteristic(&w));
    out.push_str(&inequality_battery(&w).to_string());
    Ok(out)
}

/// Generation listing and the checks on it. The flag is false when any
/// structural check fails.
pub fn corona_report(spec: &WeightSpec, depth: u32, gamma: f64) -> Result<(String, bool)> {
    let w = make_weight(spec, Grid::new(depth)?)?;
    let c = corona(&w, DyadicIndex::ROOT, gamma)?;
    let mut out = String::new();
    let _ = writeln!(out, "# weight {spec} depth {depth} gamma {gamma}");
    for (k, generation) in c.generations.iter().enumerate() {
        let _ = writeln!(out, "generation {k}: {} interval(s)", generation.len());
        for q in generation {
            let _ = write!(out, "  {q} avg {:.6e}", w.avg().get(*q));
            if let Some(p) = c.stopping_parent.get(q) {
                let _ = write!(out, " parent {p} ratio {:.4}", w.avg().get(*q) / w.avg().get(*p));
            }
            out.push('\n');
        }
    }
    let structure = c.validate(&w);
    let min_ratio = c
        .stopping_parent
        .iter()
        .map(|(q, p)| w.avg().get(*q) / w.avg().get(*p))
        .fold(f64::INFINITY, f64::min);
    match &structure {
        Ok(()) if min_ratio.is_finite() => {
            let _ = writeln!(out, "super-geometric: ok (smallest ratio {min_ratio:.4} > {gamma})");
        }
        Ok(()) => {
            let _ = writeln!(out, "super-geometric: ok (no stopping intervals below the root)");
        }
        Err(e) => {
            let _ = writeln!(out, "super-geometric: FAILED ({e})");
        }
    }
    let lhs = battery_row_i_lhs(&w, DyadicIndex::ROOT);
    let sum = c.corona_sum(&w);
    let _ = writeln!(out, "row (i) at root: {lhs:.6e}; corona sum {sum:.6e}; lhs / corona sum {:.4}", lhs / sum);
    Ok((out, structure.is_ok()))
}

/// `⟨S h_J¹, h_L¹⟩` for every pair of the grid, with a comparison against
/// `𝔰(J)` on nested pairs `L ⊊ J`. The flag is false on any mismatch.
pub fn kernel_report(depth: u32) -> Result<(String, bool)> {
    if depth > MAX_KERNEL_DEPTH {
        return Err(haarshift::Error::Resource(format!("kernel tables are capped at depth {MAX_KERNEL_DEPTH}")).into());
    }
    if depth < 2 {
        bail!("kernel tables need depth at least 2");
    }
    let g = Grid::new(depth)?;
    let mut out = String::new();
    let _ = writeln!(out, "{:<10} {:<10} {:>22} {:>22}  relation", "J", "L", "kernel", "s(J)");
    let (mut nested, mut equal) = (0usize, 0usize);
    let mut worst: f64 = 0.0;
    let mut first_mismatch = None;
    for j in g.intervals() {
        let row = shift_kernel_row(g, j, ShiftKind::Half)?;
        let s = s_coefficient(j);
        for l in g.intervals() {
            let k = row.get(l);
            let relation = if l.is_strict_subset_of(j) {
                nested += 1;
                let dev = (k - s).abs();
                worst = worst.max(dev);
                if dev < 1e-12 {
                    equal += 1;
                    "nested"
                } else {
                    first_mismatch.get_or_insert((j, l, k, s));
                    "nested MISMATCH"
                }
            } else if l.is_disjoint_from(j) {
                "disjoint"
            } else if l == j {
                "equal"
            } else {
                "contains"
            };
            let _ = writeln!(out, "{:<10} {:<10} {:>22.15e} {:>22.15e}  {relation}", j.to_string(), l.to_string(), k, s);
        }
    }
    let _ = writeln!(
        out,
        "nested pairs: {nested}; equal to s(J): {equal}; largest deviation {worst:.6e}"
    );
    if let Some((j, l, k, s)) = first_mismatch {
        let _ = writeln!(out, "first mismatch: J={j} L={l} kernel {k:.15e} s(J) {s:.15e}");
    }
    Ok((out, equal == nested))
}
