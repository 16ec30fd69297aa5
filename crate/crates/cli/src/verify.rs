//! The exact-identity and norm-law checks behind `haarshift verify`.

use std::fmt;
use std::sync::Arc;

use anyhow::{bail, Result};
use haarshift::estimates::{carleson_embedding_constant, cm_norm, ell_inf_norm, embedding_sum, s_coefficient};
use haarshift::haar::{analyze, averages, averaging_function, haar_function, synthesize, HaarSymbol, LeafFunction, ProductFormula};
use haarshift::norm::{dense_norm, operator_norm, NormOptions};
use haarshift::operators::*;
use haarshift::weights::disbalanced_data;
use haarshift::{DyadicIndex, Grid, SharedOperator, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const IDENTITY_TOL: f64 = 1e-10;
pub const MIN_VERIFY_DEPTH: u32 = 2;
pub const MAX_VERIFY_DEPTH: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckGroup {
    /// exact algebraic identities, compared against [`IDENTITY_TOL`]
    Identity,
    /// sandwich and norm laws; `value` counts violations or is a relative error
    NormLaw,
    /// contract of the half shift
    Shift,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub group: CheckGroup,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}  {:<32} {:.3e}  (limit {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.limit
        )
    }
}

fn below(name: &'static str, group: CheckGroup, value: f64, limit: f64) -> Check {
    Check { name, group, value, limit, passed: value < limit }
}

fn violations(name: &'static str, count: usize) -> Check {
    Check { name, group: CheckGroup::NormLaw, value: count as f64, limit: 0.0, passed: count == 0 }
}

struct Ctx {
    grid: Grid,
    rng: ChaCha8Rng,
    opts: NormOptions,
}

impl Ctx {
    fn function(&mut self, grid: Grid) -> LeafFunction {
        LeafFunction::from_fn(grid, |_| self.rng.random_range(-1.0..1.0))
    }

    fn symbol(&mut self, grid: Grid) -> HaarSymbol {
        let mean = self.rng.random_range(-1.0..1.0);
        HaarSymbol::from_fn(grid, mean, |_| self.rng.random_range(-1.0..1.0))
    }

    fn weight(&mut self, grid: Grid, log_spread: f64) -> Weight {
        Weight::new(LeafFunction::from_fn(grid, |_| (self.rng.random_range(-0.5..0.5) * log_spread).exp())).unwrap()
    }
}

fn orthonormality(grid: Grid) -> f64 {
    let g = Grid::new(grid.depth().min(8)).unwrap();
    let mut basis = vec![LeafFunction::constant(g, 1.0)];
    basis.extend(g.haar_intervals().map(|i| haar_function(g, i).unwrap()));
    let mut worst: f64 = 0.0;
    for (a, fa) in basis.iter().enumerate() {
        for (b, fb) in basis.iter().enumerate().skip(a) {
            let delta = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((fa.inner(fb) - delta).abs());
        }
    }
    worst
}

fn identity_checks(c: &mut Ctx, out: &mut Vec<Check>) {
    let g = c.grid;
    let id = CheckGroup::Identity;
    out.push(below("orthonormality", id, orthonormality(g), IDENTITY_TOL));

    let mut parseval: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for _ in 0..100 {
        let f = c.function(g);
        let hat = analyze(&f);
        let energy = hat.energy();
        parseval = parseval.max((energy - f.inner(&f)).abs() / f.inner(&f));
        round_trip = round_trip.max(synthesize(&hat).max_abs_diff(&f));
    }
    out.push(below("parseval", id, parseval, IDENTITY_TOL));
    out.push(below("analysis_round_trip", id, round_trip, IDENTITY_TOL));

    let mut product: f64 = 0.0;
    for _ in 0..3 {
        let (f, h) = (c.function(g), c.function(g));
        let direct = analyze(&f.pointwise_mul(&h));
        let pf = ProductFormula::new(&f, &h).unwrap();
        for i in g.haar_intervals() {
            product = product.max((pf.coeff(i).unwrap() - direct.get(i)).abs());
        }
    }
    out.push(below("product_formula", id, product, IDENTITY_TOL));

    let sigma = c.weight(g, 4.0);
    let mut disbalanced: f64 = 0.0;
    for k in g.haar_intervals() {
        let d = disbalanced_data(&sigma, k).unwrap();
        let h = haar_function(g, k).unwrap();
        let h1 = averaging_function(g, k).unwrap();
        disbalanced = disbalanced
            .max(d.h_sigma.scale(d.c).add(&h1.scale(d.d)).max_abs_diff(&h))
            .max((d.h_sigma.weighted_inner(&d.h_sigma, sigma.w()) - 1.0).abs())
            .max(d.h_sigma.inner(sigma.w()).abs());
    }
    out.push(below("disbalanced_reconstruction", id, disbalanced, IDENTITY_TOL));

    let b = c.function(g);
    let hat = analyze(&b);
    let avg = HaarSymbol::from_averages(&averages(&b));
    let parts = OperatorSum::new(
        "parts",
        g,
        vec![
            Arc::new(paraproduct(hat.clone(), ParaproductType::P01)),
            Arc::new(paraproduct(hat, ParaproductType::P10)),
            Arc::new(paraproduct(avg.clone(), ParaproductType::P00)),
            Arc::new(paraproduct(avg, ParaproductType::Mean)),
        ],
    );
    let m = multiplier(b);
    let mut decomposition: f64 = 0.0;
    for _ in 0..20 {
        let f = c.function(g);
        decomposition = decomposition.max(parts.apply(&f).max_abs_diff(&m.apply(&f)));
    }
    out.push(below("multiplier_decomposition", id, decomposition, IDENTITY_TOL));

    let w = c.weight(g, 5.0);
    for (shift, name) in [
        (ShiftKind::Half, "resolution_identity_half"),
        (ShiftKind::Full, "resolution_identity_full"),
        (ShiftKind::Identity, "resolution_identity_identity"),
    ] {
        let total = OperatorSum::new("sum", g, resolution_pieces(&w, shift).into_iter().map(|p| p.op).collect());
        let conj = conjugated_shift(&w, shift);
        let mut err: f64 = 0.0;
        for _ in 0..20 {
            let f = c.function(g);
            err = err.max(total.apply(&f).max_abs_diff(&conj.apply(&f)));
        }
        out.push(below(name, id, err, IDENTITY_TOL));
    }

    let symbol = c.symbol(g);
    let mut ops: Vec<SharedOperator> = Vec::new();
    for kind in [ParaproductType::P01, ParaproductType::P10, ParaproductType::P00, ParaproductType::P11, ParaproductType::Mean] {
        ops.push(Arc::new(paraproduct(symbol.clone(), kind)));
    }
    for shift in ShiftKind::ALL {
        ops.push(Arc::new(haar_shift(shift, g)));
        ops.extend(resolution_pieces(&w, shift).into_iter().map(|p| p.op));
        ops.push(Arc::new(conjugated_shift(&w, shift)));
    }
    ops.extend(composed_identity_forms(&w).into_iter().map(|f| Arc::new(f) as SharedOperator));
    let mut adjoint: f64 = 0.0;
    for op in &ops {
        for _ in 0..20 {
            let (f, h) = (c.function(g), c.function(g));
            let lhs = op.apply(&f).inner(&h);
            let rhs = f.inner(&op.adjoint_apply(&h));
            adjoint = adjoint.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        }
    }
    out.push(below("adjoint_consistency", id, adjoint, IDENTITY_TOL));

    // atom-by-atom definitions against the tree-sweep implementations
    let mut definitional: f64 = 0.0;
    let inner_levels: Vec<DyadicIndex> = g.haar_intervals().filter(|i| i.level + 1 < g.depth()).collect();
    let rank = |label: &str, terms: Vec<(f64, Atom, Atom)>| RankSum::new(g, label, terms).unwrap();
    let defs: Vec<(SharedOperator, RankSum)> = vec![
        (
            Arc::new(paraproduct(symbol.clone(), ParaproductType::P01)),
            rank("P01", g.haar_intervals().map(|i| (symbol.get(i), Atom::Haar(i), Atom::Avg(i))).collect()),
        ),
        (
            Arc::new(paraproduct(symbol.clone(), ParaproductType::P10)),
            rank("P10", g.haar_intervals().map(|i| (symbol.get(i), Atom::Avg(i), Atom::Haar(i))).collect()),
        ),
        (
            Arc::new(paraproduct(symbol.clone(), ParaproductType::P00)),
            rank("P00", g.haar_intervals().map(|i| (symbol.get(i), Atom::Haar(i), Atom::Haar(i))).collect()),
        ),
        (
            Arc::new(paraproduct(symbol.clone(), ParaproductType::P11)),
            rank("P11", g.haar_intervals().map(|i| (symbol.get(i), Atom::Avg(i), Atom::Avg(i))).collect()),
        ),
        (
            Arc::new(haar_shift(ShiftKind::Half, g)),
            rank("half", inner_levels.iter().map(|&i| (1.0, Atom::Haar(i.left_child()), Atom::Haar(i))).collect()),
        ),
    ];
    for (op, def) in &defs {
        for _ in 0..5 {
            let f = c.function(g);
            definitional = definitional.max(op.apply(&f).max_abs_diff(&def.apply(&f)));
            definitional = definitional.max(op.adjoint_apply(&f).max_abs_diff(&def.adjoint_apply(&f)));
        }
    }
    let small = Grid::new(g.depth().min(6)).unwrap();
    let ws = c.weight(small, 5.0);
    for piece in resolution_pieces(&ws, ShiftKind::Half) {
        let dense = DenseOperator::materialize(piece.op.as_ref()).unwrap();
        let f = c.function(small);
        definitional = definitional.max(dense.apply(&f).max_abs_diff(&piece.op.apply(&f)));
    }
    out.push(below("dense_oracle_agreement", id, definitional, IDENTITY_TOL));

    let mut easy: f64 = 0.0;
    for form in composed_identity_forms(&w) {
        let (l, r) = form.label()[2..].split_once('_').unwrap();
        let q = q_operator(&w, ShiftKind::Half, l.parse().unwrap(), r.parse().unwrap()).unwrap();
        for _ in 0..50 {
            let f = c.function(g);
            easy = easy.max(form.apply(&f).max_abs_diff(&q.apply(&f)));
        }
    }
    out.push(below("easy_closed_forms", id, easy, IDENTITY_TOL));

    let mut route: f64 = 0.0;
    let mut nested: f64 = 0.0;
    for j in g.intervals() {
        let row = shift_kernel_row(g, j, ShiftKind::Half).unwrap();
        for l in g.intervals() {
            let k = row.get(l);
            route = route.max((k - shift_kernel_closed_form(g, j, l, ShiftKind::Half).unwrap()).abs());
            if l.is_strict_subset_of(j) {
                nested = nested.max((k - s_coefficient(j)).abs());
            }
        }
    }
    out.push(below("shift_kernel_expansion_routes", id, route, IDENTITY_TOL));
    out.push(below("shift_kernel_equals_s_coefficient", id, nested, IDENTITY_TOL));
}

fn norm_law_checks(c: &mut Ctx, out: &mut Vec<Check>) {
    let g = Grid::new(c.grid.depth().min(8)).unwrap();
    let opts = c.opts;

    let mut p00: f64 = 0.0;
    let mut cm_bad = 0;
    let mut p11_bad = 0;
    for _ in 0..50 {
        let a = c.symbol(g);
        let sup = ell_inf_norm(&a);
        // dense: the top two |a_I| can sit closer than power iteration resolves
        let est = dense_norm(&paraproduct(a.clone(), ParaproductType::P00)).unwrap();
        p00 = p00.max((est - sup).abs() / sup);

        let a = c.symbol(g);
        let norm = operator_norm(&paraproduct(a.clone(), ParaproductType::P01), opts).value;
        let cm = cm_norm(&a);
        if !(cm <= norm * (1.0 + 1e-9) && norm <= 2.0 * cm) {
            cm_bad += 1;
        }

        let a = HaarSymbol::from_fn(g, 0.0, |_| c.rng.random_range(0.0..1.0));
        let norm = operator_norm(&paraproduct(a.clone(), ParaproductType::P11), opts).value;
        if norm > 4.0 * cm_norm(&a.map(f64::sqrt)).powi(2) {
            p11_bad += 1;
        }
    }
    out.push(Check { name: "p00_norm_equals_sup", group: CheckGroup::NormLaw, value: p00, limit: 1e-6, passed: p00 <= 1e-6 });
    out.push(violations("p01_cm_sandwich", cm_bad));
    out.push(violations("p11_carleson_bound", p11_bad));

    let mut cet_bad = 0;
    for _ in 0..100 {
        let spread = c.rng.random_range(0.0..5.0);
        let v = c.weight(g, spread);
        let alpha = HaarSymbol::from_fn(g, 0.0, |_| c.rng.random_range(0.0..1.0f64).powi(2));
        let f = c.function(g);
        let constant = carleson_embedding_constant(&alpha, &v).unwrap();
        if embedding_sum(&alpha, &v, &f).unwrap() > 4.0 * constant * f.weighted_inner(&f, v.w()) {
            cet_bad += 1;
        }
    }
    out.push(violations("carleson_embedding_factor_four", cet_bad));
}

fn shift_checks(c: &mut Ctx, out: &mut Vec<Check>) {
    let g = Grid::new(c.grid.depth().min(8)).unwrap();
    let norm = dense_norm(&haar_shift(ShiftKind::Half, g)).unwrap();
    out.push(Check {
        name: "half_shift_dense_norm",
        group: CheckGroup::Shift,
        value: (norm - 1.0).abs(),
        limit: 1e-6,
        passed: (norm - 1.0).abs() <= 1e-6,
    });
    let s = haar_shift(ShiftKind::Half, c.grid);
    let mut err: f64 = 0.0;
    for _ in 0..20 {
        let mut hat = analyze(&c.function(c.grid));
        hat.set_mean(0.0);
        for i in c.grid.level(c.grid.depth() - 1) {
            hat.set(i, 0.0);
        }
        let f = synthesize(&hat);
        err = err.max((s.apply(&f).norm() - f.norm()).abs());
    }
    out.push(below("half_shift_isometry", CheckGroup::Shift, err, IDENTITY_TOL));
}

/// Runs every check with data drawn from `seed`.
pub fn run_checks(depth: u32, seed: u64, tol: f64) -> Result<Vec<Check>> {
    if !(MIN_VERIFY_DEPTH..=MAX_VERIFY_DEPTH).contains(&depth) {
        bail!("verify needs {MIN_VERIFY_DEPTH} <= depth <= {MAX_VERIFY_DEPTH}, got {depth}");
    }
    if !(tol > 0.0) {
        bail!("tolerance must be positive");
    }
    let mut ctx = Ctx {
        grid: Grid::new(depth)?,
        rng: ChaCha8Rng::seed_from_u64(seed),
        opts: NormOptions { tol, seed, ..NormOptions::default() },
    };
    let mut out = Vec::new();
    identity_checks(&mut ctx, &mut out);
    norm_law_checks(&mut ctx, &mut out);
    shift_checks(&mut ctx, &mut out);
    Ok(out)
}
