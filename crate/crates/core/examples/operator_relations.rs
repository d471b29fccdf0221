//! Composition rules of the generator terms M_f e_n M_g.
//!
//! The algebra is generated by multiplications M_f and the conditional-
//! expectation projections e_n. Every product of generators collapses back
//! to a single term through a short list of identities (e_n is a
//! projection, e_n e_m = e_max, M_f e_n M_g · M_u e_m M_v recombines with
//! expectations pushed to the deeper level, …). Each identity is verified
//! here on the full finite cylinder basis and reported with its residual.

use num_complex::Complex64;
use ruelle::{
    relation_suite, AlgebraContext, CylinderFunction, Potential, ShiftSpace, DEFAULT_MAX_ITER,
    DEFAULT_POWER_TOL,
};

fn main() -> ruelle::Result<()> {
    let space = ShiftSpace::new(2)?;
    let p = Potential::uniform_jacobian(space);
    let ctx = AlgebraContext::new(p, 4, DEFAULT_POWER_TOL, DEFAULT_MAX_ITER)?;

    let f = CylinderFunction::from_values(
        space,
        1,
        vec![Complex64::new(0.8, 0.3), Complex64::new(-0.2, 1.1)],
    )?;
    let g = CylinderFunction::from_values(
        space,
        1,
        vec![Complex64::new(1.4, -0.5), Complex64::new(0.6, 0.0)],
    )?;

    let report = relation_suite(&ctx, &f, &g, 2)?;
    println!("generator relations on the depth-4 basis (f, g of depth 1, level n = 2):\n");
    for check in &report.checks {
        println!("  {:<52} residual {:.3e}", check.name, check.residual);
    }
    println!("\nmax residual: {:.3e}", report.max_residual());
    Ok(())
}
