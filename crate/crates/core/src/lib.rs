//! Transfer operators, Gibbs measures, and KMS states on full shift spaces.
//!
//! This crate computes the classical objects of thermodynamic formalism on the
//! one-sided full shift X = {1,…,k}^ℕ — Ruelle transfer operators, their
//! leading eigendata, normalized potentials, pressure and equilibrium states —
//! and uses them to realize and verify the operator algebra generated by
//! multiplication operators and the shift isometry: terms M_f e_n M_g, their
//! product and adjoint rules, the modular flow σ_t attached to a positive
//! potential H, and the associated KMS functional
//!
//! ```text
//! ψ(M_f e_n M_g) = ∫ f·g·λ^{-[n]} dν_β ,   λ^{-[n]} = p·(p∘T)⋯(p∘T^{n-1}).
//! ```
//!
//! Everything is exact finite linear algebra: functions that depend on finitely
//! many coordinates are tables over depth-d cylinders, the transfer operator is
//! a k^D × k^D matrix, and every operator identity can be checked entrywise.
//!
//! A separate module implements a renewal ("intermittent") model on two
//! symbols with polynomial return-time tails, where the eigenmeasure, the
//! eigenfunction, the pressure function and its zero plateau all have closed
//! forms to test against.
//!
//! # Example
//!
//! ```
//! use ruelle::{leading_triple, Potential, ShiftSpace};
//!
//! let space = ShiftSpace::new(2)?;
//! // weights (1, 2) on the two depth-1 cylinders
//! let weight = Potential::from_values(space, 1, vec![1.0, 2.0])?;
//! let triple = leading_triple(&weight, 3, 1e-12, 10_000)?;
//! assert!((triple.eigenvalue - 3.0).abs() < 1e-10);
//! # Ok::<(), ruelle::Error>(())
//! ```

mod error;

pub mod algebra;
pub mod cli;
pub mod ff;
pub mod gibbs;
pub mod shift;
pub mod transfer;

pub use error::{Error, Result};

pub use algebra::{
    battery_functions, expectation_matrix, gibbs_functional, kms_battery, kms_residual,
    random_cylinder_function, random_element, relation_suite, state_axioms_check,
    uniqueness_probe, AlgebraContext, AlgebraElement, BatteryFailure, BatteryReport,
    GeneratorTerm, ModularFlow, ProbeStep, RelationCheck, RelationReport, StateAxiomsReport,
    StateFunctional,
};
pub use ff::{zeta, zeta_truncated, AtomFunction, FfModel, FfParams, TwoEquilibria};
pub use gibbs::{
    cocycles, conditional_expectation, eigenmeasure_identity_residual, equilibrium_state,
    stationary_measure, CocycleBundle, CylinderMeasure, EquilibriumState,
};
pub use shift::{CylinderFunction, Potential, ShiftSpace, Word};
pub use transfer::{
    build_transfer_matrix, convergence_profile, decay_ratio, leading_triple, normalize_potential,
    pressure, pressure_curve, ruelle_apply, ruelle_apply_real, SpectralTriple, TransferMatrix,
    DEFAULT_MAX_ITER, DEFAULT_POWER_TOL,
};
