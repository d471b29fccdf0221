//! The modular group σ_t acting on generator terms.
//!
//! A term M_f e_n M_g flows by twisting its symbols with the unitary
//! cocycle of the n-step product B of the positive potential H:
//! σ_t(M_f e_n M_g) = M_{B^{it} f} e_n M_{g B^{−it}}. For real t this is a
//! one-parameter group; analytic continuation to t = iβ is what enters the
//! KMS condition. When H is constant the cocycle is scalar and cancels, the
//! flow freezes, and the Gibbs functional becomes a trace.

use num_complex::Complex64;
use ruelle::{
    gibbs_functional, AlgebraContext, AlgebraElement, CylinderFunction, GeneratorTerm,
    ModularFlow, Potential, ShiftSpace, DEFAULT_MAX_ITER, DEFAULT_POWER_TOL,
};

fn main() -> ruelle::Result<()> {
    let space = ShiftSpace::new(2)?;
    let h = Potential::from_values(space, 1, vec![1.0, 2.0])?;

    let f = CylinderFunction::from_values(
        space,
        1,
        vec![Complex64::new(0.9, -0.4), Complex64::new(0.3, 0.7)],
    )?;
    let g = CylinderFunction::from_values(
        space,
        1,
        vec![Complex64::new(-0.6, 0.2), Complex64::new(1.2, 0.5)],
    )?;
    let a = GeneratorTerm::new(f, 1, g)?;

    // group law σ_{t+s} = σ_t ∘ σ_s, checked on the symbols of the term
    let (t, s) = (0.7, 0.4);
    let once = ModularFlow::at_real_time(h.clone(), t + s)?.apply_term(&a)?;
    let twice = ModularFlow::at_real_time(h.clone(), t)?
        .apply_term(&ModularFlow::at_real_time(h.clone(), s)?.apply_term(&a)?)?;
    println!(
        "group law σ_{{t+s}} vs σ_t∘σ_s:  left {:.3e}, right {:.3e}",
        once.left_symbol().sup_distance(twice.left_symbol())?,
        once.right_symbol().sup_distance(twice.right_symbol())?
    );

    // the flow commutes with the adjoint at real time
    let flowed_adjoint = ModularFlow::at_real_time(h.clone(), t)?.apply_term(&a.adjoint())?;
    let adjoint_flowed = ModularFlow::at_real_time(h.clone(), t)?.apply_term(&a)?.adjoint();
    println!(
        "σ_t(a*) vs σ_t(a)*:             left {:.3e}, right {:.3e}",
        flowed_adjoint
            .left_symbol()
            .sup_distance(adjoint_flowed.left_symbol())?,
        flowed_adjoint
            .right_symbol()
            .sup_distance(adjoint_flowed.right_symbol())?
    );

    // constant H: the flow freezes and ψ becomes tracial
    let h_flat = Potential::constant(space, 1.0);
    let frozen = ModularFlow::at_real_time(h_flat.clone(), 2.3)?.apply_term(&a)?;
    println!(
        "constant H, σ_t(a) vs a:        left {:.3e}, right {:.3e}",
        frozen.left_symbol().sup_distance(a.left_symbol())?,
        frozen.right_symbol().sup_distance(a.right_symbol())?
    );

    let p = Potential::uniform_jacobian(space);
    let ctx = AlgebraContext::new(p, 4, DEFAULT_POWER_TOL, DEFAULT_MAX_ITER)?;
    let psi = gibbs_functional(&ctx, &h_flat, 1.0, DEFAULT_POWER_TOL, DEFAULT_MAX_ITER)?;
    let ea = AlgebraElement::from_term(a.clone());
    let eb = AlgebraElement::from_term(a.adjoint());
    let ab = psi.evaluate(&ea.multiply(&eb, &ctx)?)?;
    let ba = psi.evaluate(&eb.multiply(&ea, &ctx)?)?;
    println!("traciality |ψ(ab) − ψ(ba)|:     {:.3e}", (ab - ba).norm());
    Ok(())
}
