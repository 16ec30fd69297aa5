use crate::error::{Error, Result};
use crate::haar::{analyze, synthesize, HaarSymbol, LeafFunction};
use crate::norm::{dominant_eigenvalue, start_vector, DEFAULT_MAX_ITER, DEFAULT_SEED};
use crate::operators::averaging_synthesis;
use crate::weights::Weight;

/// `Sf = (Σ_I f̂(I)² h_I¹)^{1/2}`.
pub fn square_function(f: &LeafFunction) -> LeafFunction {
    let hat = analyze(f);
    let squares: Vec<f64> = hat.coefficients().iter().map(|x| x * x).collect();
    averaging_synthesis(f.grid(), &squares).map(|x| x.max(0.0).sqrt())
}

/// `S_π f = (Σ_I f̂(I)² |I|⁻¹ 1_{πI})^{1/2}` with the root as its own parent.
pub fn s_pi(f: &LeafFunction) -> LeafFunction {
    let grid = f.grid();
    let hat = analyze(f);
    // mass placed on P, as a coefficient of h_P¹ = |P|⁻¹ 1_P
    let mut c = vec![0.0; grid.haar_count()];
    for i in grid.haar_intervals() {
        let x = hat.get(i);
        match i.parent() {
            Some(p) => c[p.offset()] += x * x * p.length() / i.length(),
            None => c[0] += x * x,
        }
    }
    averaging_synthesis(grid, &c).map(|x| x.max(0.0).sqrt())
}

/// Diagonal of `D̃_w : h_I ↦ ⟨w⟩_{πI} h_I` in Haar coordinates (`π` of the root
/// is the root).
pub fn tilde_d_diagonal(w: &Weight) -> Vec<f64> {
    w.grid()
        .haar_intervals()
        .map(|i| w.avg().get(i.parent_or_self()))
        .collect()
}

/// `sup ⟨D̃_w φ, φ⟩ / ⟨w φ, φ⟩` over mean-zero `φ`.
///
/// Computed as the top eigenvalue of `D^{1/2} N D^{1/2}` in Haar
/// coordinates, where `N` inverts the compression of `M_w` to mean-zero
/// functions: `N z = w⁻¹ z − w⁻¹ ∫w⁻¹z / ∫w⁻¹`.
pub fn s_pi_sharp_ratio(w: &Weight, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let grid = w.grid();
    let root_d: Vec<f64> = tilde_d_diagonal(w).into_iter().map(f64::sqrt).collect();
    let inv = w.inv();
    let inv_mass = inv.integral();
    let apply = |x: &[f64]| -> Vec<f64> {
        let coeff = x.iter().zip(&root_d).map(|(a, d)| a * d).collect();
        let z = synthesize(&HaarSymbol::new(grid, coeff, 0.0).expect("symbol length"));
        let wz = z.pointwise_mul(inv);
        let c = wz.integral() / inv_mass;
        let y = wz.sub(&inv.scale(c));
        analyze(&y)
            .coefficients()
            .iter()
            .zip(&root_d)
            .map(|(a, d)| a * d)
            .collect()
    };
    let start = start_vector(grid.haar_count(), DEFAULT_SEED);
    let r = dominant_eigenvalue(apply, start, tol, 10 * DEFAULT_MAX_ITER, None);
    if !r.converged {
        return Err(Error::Convergence {
            iterations: r.iterations,
            estimate: r.value,
            residual: r.residual,
        });
    }
    Ok(r.value)
}
