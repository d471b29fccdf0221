//! The eigenmeasure characterized without its eigenvalue.
//!
//! ν_β satisfies L*_β ν = λ ν. Dividing out the cocycle Λ_n = λ^{[n]}/H^{β[n]}
//! built from a reference Jacobian p removes λ entirely:
//!
//!   ∫ f dν  =  ∫ Λ_n^{-1} · (L_β^n f)∘T^n dν      for every n ≥ 0.
//!
//! This reconstruction works one level at a time, which is what makes the
//! eigenmeasure recoverable from purely local (conditional) data. Here the
//! identity is checked for indicator and random test functions across n.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ruelle::{
    battery_functions, eigenmeasure_identity_residual, leading_triple, random_cylinder_function,
    Potential, ShiftSpace, DEFAULT_MAX_ITER, DEFAULT_POWER_TOL,
};

fn main() -> ruelle::Result<()> {
    let space = ShiftSpace::new(2)?;
    let h = Potential::from_values(space, 1, vec![1.0, 2.0])?;
    let p = Potential::uniform_jacobian(space);
    let beta = 1.5;
    let depth = 5;

    let weight = h.pow(-beta)?;
    let triple = leading_triple(&weight, depth, DEFAULT_POWER_TOL, DEFAULT_MAX_ITER)?;
    println!("β = {beta},   λ(β) = {:.12}", triple.eigenvalue);

    let mut functions = battery_functions(space)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for j in 0..3 {
        functions.push((
            format!("random#{j}"),
            random_cylinder_function(space, 2, &mut rng)?,
        ));
    }

    println!("\nworst reconstruction residual per level:");
    for n in 0..=4usize {
        let mut worst: (f64, &str) = (0.0, "all exact");
        for (name, f) in &functions {
            let r = eigenmeasure_identity_residual(&p, &h, beta, f, n, &triple)?;
            if r > worst.0 {
                worst = (r, name);
            }
        }
        println!("  n = {n}   {:.3e}   (attained at {})", worst.0, worst.1);
    }
    Ok(())
}
