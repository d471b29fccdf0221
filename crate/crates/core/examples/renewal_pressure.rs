//! A renewal shift with infinitely many cylinder atoms and a pressure plateau.
//!
//! On two symbols, the cylinders B_t = [1…1 2] (t ones, t ≥ 0) partition
//! the space up to the single point 1^∞. With log-weights a_0 = −log ζ(γ)
//! and a_t = γ·log(t/(t+1)), the eigenmeasure has the closed form
//! ν(B_t) = (t+1)^{−γ}/ζ(γ) with eigenvalue 1. The pressure function β ↦
//! P(β) solves a renewal equation for β < 1 and is identically zero for
//! β ≥ 1 — at β = 1 the equilibrium measure coexists with the point mass
//! at 1^∞, both attaining the same (zero) supremum in the variational
//! principle.

use ruelle::{FfModel, FfParams};

fn main() -> ruelle::Result<()> {
    let model = FfModel::new(FfParams::new(3.0))?;

    println!("γ = 3:");
    println!("  ζ(γ)   = {:.15}", model.zeta_gamma());
    println!("  ζ(γ−1) = {:.15}  (= π²/6)", model.zeta_gamma_minus_1());
    println!("  u      = {:.15}  (invariant-measure normalization)", model.normalization());
    println!("  unresolved tail mass beyond the table: {:.3e}", model.mass_deficit());

    println!("\natom masses ν(B_t) and the return-time weights u·T_t:");
    for t in 0..8usize {
        println!(
            "  t = {t}   ν = {:.12}   h̃ = {:>10.6}   μ̃ = {:.12}",
            model.atom_mass(t)?,
            model.eigenfunction(t)?,
            model.invariant_mass(t)?
        );
    }
    println!(
        "  eigen identity L(h̃ν-form) residual over the whole table: {:.3e}",
        model.eigen_identity_residual()
    );

    println!("\npressure along β (renewal equation below 1, plateau above):");
    for beta in [0.0, 0.25, 0.5, 0.75, 0.9, 1.0, 1.5, 3.0] {
        println!("  P({beta:>4}) = {:.12}", model.pressure(beta)?);
    }

    let pair = model.equilibrium_pair()?;
    println!("\nat β = 1 the variational principle is attained twice:");
    println!("  renewal equilibrium: entropy {:.10} + energy {:.10} = {:.3e}",
        pair.gibbs_entropy, pair.gibbs_energy, pair.gibbs_value);
    println!("  point mass at 1^∞:   entropy 0            + energy 0           = {:.3e}",
        pair.delta_value);
    println!("  shared pressure value: {:.3e}", pair.pressure_at_one);

    // finite-depth surrogates approach the renewal model from above:
    // truncating the space at depth d leaves a transfer operator whose
    // eigenvalue decreases to e^{P(1)} = 1 as d grows
    println!("\nfinite-depth surrogate eigenvalues (should decrease toward 1):");
    for d in 3..=7usize {
        let surrogate = model.surrogate_potential(d)?;
        let triple = ruelle::leading_triple(&surrogate, d, 1e-12, ruelle::DEFAULT_MAX_ITER)?;
        println!("  depth {d}: λ = {:.10}", triple.eigenvalue);
    }
    Ok(())
}
