//! Turning an arbitrary positive weight into a probability Jacobian.
//!
//! The normalization p = w·h / (λ·h∘T) keeps the same Gibbs measure but
//! fixes the constants: L_p 1 = 1 and λ_p = 1, so p(i·x) is a genuine
//! transition probability for the backward random walk. The stationary
//! measure of p is the invariant Gibbs measure at any working depth.

use ruelle::{
    normalize_potential, ruelle_apply_real, stationary_measure, Potential, ShiftSpace, Word,
    DEFAULT_MAX_ITER, DEFAULT_POWER_TOL,
};

fn main() -> ruelle::Result<()> {
    let space = ShiftSpace::new(2)?;
    let weight = Potential::from_values(space, 2, vec![0.7, 1.3, 2.1, 0.4])?;

    let p = normalize_potential(&weight, 4, DEFAULT_POWER_TOL, DEFAULT_MAX_ITER)?;
    println!("normalized Jacobian (depth {}):", p.depth());
    for (j, v) in p.values().iter().enumerate() {
        println!("  p{j} = {v:.12}");
    }

    let image = ruelle_apply_real(&p, &Potential::one(space))?;
    println!(
        "‖L_p 1 − 1‖∞ = {:.3e}",
        image.sup_distance(&Potential::one(space))?
    );

    // branch probabilities at each base point sum to one
    let lifted = p.lift(2)?;
    let k = space.symbol_count();
    let stride = lifted.values().len() / k;
    let mut worst = 0.0f64;
    for x in 0..stride {
        let total: f64 = (0..k).map(|i| lifted.values()[i * stride + x]).sum();
        worst = worst.max((total - 1.0).abs());
    }
    println!("branch sums deviate from 1 by at most {worst:.3e}");

    // the stationary measure of p is shift-invariant: μ(T⁻¹A) = μ(A)
    let mu = stationary_measure(&p, 3, DEFAULT_POWER_TOL, DEFAULT_MAX_ITER)?;
    let a = Potential::indicator(space, &Word::new(vec![1, 2], 2)?)?;
    let pulled = a.lift(2)?.compose_shift()?; // 1_A ∘ T
    let direct = mu.integrate_real(&a)?;
    let pullback = mu.integrate_real(&pulled)?;
    println!(
        "invariance on the cylinder [12]: μ(A) = {direct:.12}, μ(T⁻¹A) = {pullback:.12}, diff = {:.3e}",
        (direct - pullback).abs()
    );
    Ok(())
}
