//! Operator norms of the resolution terms for one weight or a family of
//! weights.

use std::sync::Arc;

use anyhow::{bail, Result};
use haarshift::norm::{operator_norm, NormOptions};
use haarshift::operators::{conjugated_shift, mean_cross, resolution_pieces, ShiftKind, TERM_LABELS};
use haarshift::weights::{a2_characteristic, make_weight, WeightSpec};
use haarshift::{Grid, SharedOperator, Weight};
use rayon::prelude::*;

use crate::report::SweepRow;

/// Largest depth accepted by `norms` and `sweep`.
pub const MAX_NORM_DEPTH: u32 = 14;

/// The eleven reported operators, in [`TERM_LABELS`] order.
pub fn term_operators(w: &Weight, shift: ShiftKind) -> Vec<SharedOperator> {
    let mut ops: Vec<SharedOperator> = resolution_pieces(w, shift).into_iter().take(9).map(|p| p.op).collect();
    ops.push(Arc::new(conjugated_shift(w, shift)));
    ops.push(Arc::new(mean_cross(w, shift)));
    debug_assert!(ops.iter().map(|o| o.label()).eq(TERM_LABELS));
    ops
}

/// Weight spec for one sweep parameter: `power` → `alpha`, `constant` → `c`,
/// `cascade` → `eps` (with `seed`), `step` → `a` with `b = 1`, `split = 1/2`.
pub fn family_spec(family: &str, param: f64, seed: u64) -> Result<WeightSpec> {
    let spec = match family {
        "power" => WeightSpec::Power { alpha: param },
        "constant" => WeightSpec::Constant { c: param },
        "cascade" => WeightSpec::Cascade { eps: param, seed },
        "step" => WeightSpec::Step { a: param, b: 1.0, split: 0.5 },
        other => bail!("unknown weight family `{other}` (power|constant|cascade|step)"),
    };
    spec.validate()?;
    Ok(spec)
}

/// Spec parameter reported in the `param` column.
pub fn spec_param(spec: &WeightSpec) -> f64 {
    match *spec {
        WeightSpec::Constant { c } => c,
        WeightSpec::Power { alpha } => alpha,
        WeightSpec::Cascade { eps, .. } => eps,
        WeightSpec::Step { a, .. } => a,
    }
}

pub fn check_depth(depth: u32) -> Result<Grid> {
    if depth > MAX_NORM_DEPTH {
        return Err(haarshift::Error::Resource(format!("norm computations are capped at depth {MAX_NORM_DEPTH}, got {depth}")).into());
    }
    Ok(Grid::new(depth)?)
}

/// One row per term for a single weight. Warnings name non-converged terms.
pub fn norm_block(spec: &WeightSpec, depth: u32, shift: ShiftKind, opts: NormOptions) -> Result<(Vec<SweepRow>, Vec<String>)> {
    let grid = check_depth(depth)?;
    let w = make_weight(spec, grid)?;
    let a2 = a2_characteristic(&w);
    let results: Vec<_> = term_operators(&w, shift)
        .par_iter()
        .map(|op| (op.label().to_string(), operator_norm(op.as_ref(), opts)))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    for (term, r) in results {
        if !r.converged {
            warnings.push(format!(
                "warning: {spec} depth {depth} {term}: no convergence after {} iterations (residual {:e})",
                r.iterations, r.residual
            ));
        }
        rows.push(SweepRow {
            family: spec.family().to_string(),
            param: spec_param(spec),
            depth,
            shift: shift.name().to_string(),
            term,
            a2,
            norm: r.value,
            ratio: if r.converged { r.value / a2 } else { f64::NAN },
        });
    }
    Ok((rows, warnings))
}

/// Norm blocks for every parameter. Rows come back in `(param, term)`
/// order irrespective of scheduling.
pub fn sweep_rows(
    family: &str,
    params: &[f64],
    depth: u32,
    shift: ShiftKind,
    opts: NormOptions,
    seed: u64,
) -> Result<(Vec<SweepRow>, Vec<String>)> {
    if params.len() < 3 {
        bail!("a sweep needs at least 3 parameters, got {}", params.len());
    }
    check_depth(depth)?;
    let specs = params
        .iter()
        .map(|&p| family_spec(family, p, seed))
        .collect::<Result<Vec<_>>>()?;
    let blocks = specs
        .par_iter()
        .map(|spec| norm_block(spec, depth, shift, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (r, w) in blocks {
        rows.extend(r);
        warnings.extend(w);
    }
    Ok((rows, warnings))
}

/// Relative change of each norm when the depth drops by two.
pub fn depth_stability(rows: &[SweepRow], family: &str, seed: u64, shift: ShiftKind, opts: NormOptions) -> Result<String> {
    use std::fmt::Write as _;
    let Some(depth) = rows.first().map(|r| r.depth) else {
        return Ok(String::new());
    };
    if depth < 4 {
        bail!("depth-stability needs depth at least 4");
    }
    let mut params: Vec<f64> = Vec::new();
    for r in rows {
        if !params.contains(&r.param) {
            params.push(r.param);
        }
    }
    let (coarse, _) = sweep_rows(family, &params, depth - 2, shift, opts, seed)?;
    let mut out = String::new();
    let _ = writeln!(out, "depth stability: depth {depth} vs {}", depth - 2);
    let _ = writeln!(out, "{:>10} {:<12} {:>14} {:>14} {:>11}", "param", "term", "norm", "norm_coarse", "rel_diff");
    for (fine, c) in rows.iter().zip(&coarse) {
        debug_assert_eq!((fine.param, &fine.term), (c.param, &c.term));
        let rel = if fine.norm == 0.0 { 0.0 } else { (fine.norm - c.norm).abs() / fine.norm };
        let _ = writeln!(
            out,
            "{:>10} {:<12} {:>14.6e} {:>14.6e} {:>11.3e}",
            fine.param, fine.term, fine.norm, c.norm, rel
        );
    }
    Ok(out)
}
