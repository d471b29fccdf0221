//! Measures on cylinder algebras, conditional expectations, and equilibrium
//! states.
//!
//! A [`CylinderMeasure`] stores one probability mass per depth-D cylinder.
//! Coarser marginals are exact block sums; finer ones are not determined by
//! the data, so any request below the working depth is an error rather than
//! a silent refinement.
//!
//! The dynamical objects here all hinge on a *normalized* weight p
//! (L_p 1 = 1, the Jacobian of a T-invariant measure): `stationary_measure`
//! produces its invariant measure, `conditional_expectation` realizes
//! E_μ(·|T^{-n}𝔅) as αⁿ∘L_pⁿ, and `cocycles` packages the Radon–Nikodym
//! data Λ_n that converts between the β-twisted transfer operator and the
//! normalized one via L_β^n f = L_p^n(Λ_n·f).

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::shift::{CylinderFunction, Potential, ShiftSpace, Word};
use crate::transfer::{leading_triple, ruelle_apply, SpectralTriple};

/// How far a weight may sit from L_p 1 = 1 before it is rejected as a
/// Jacobian.
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// How far cylinder masses may sit from total mass one.
pub const MASS_TOL: f64 = 1e-12;

/// A probability measure resolved on the depth-D cylinder partition:
/// one nonnegative mass per word, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderMeasure {
    space: ShiftSpace,
    depth: usize,
    masses: Vec<f64>,
}

impl CylinderMeasure {
    pub fn from_masses(space: ShiftSpace, depth: usize, masses: Vec<f64>) -> Result<Self> {
        let expected = space.basis_size(depth)?;
        if masses.len() != expected {
            return Err(Error::TableLength {
                depth,
                expected,
                got: masses.len(),
            });
        }
        let mut total = 0.0;
        for &m in &masses {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::BadMass { total: m });
            }
            total += m;
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::BadMass { total });
        }
        Ok(Self {
            space,
            depth,
            masses,
        })
    }

    /// The uniform (maximal-entropy Bernoulli) measure at a given depth.
    pub fn uniform(space: ShiftSpace, depth: usize) -> Result<Self> {
        let n = space.basis_size(depth)?;
        Self::from_masses(space, depth, vec![1.0 / n as f64; n])
    }

    pub fn space(&self) -> ShiftSpace {
        self.space
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Mass of the cylinder [w]. The word may be shorter than the working
    /// depth (a block sum) but not longer.
    pub fn mass_of(&self, word: &Word) -> Result<f64> {
        if word.depth() > self.depth {
            return Err(Error::MeasureDepth {
                measure: self.depth,
                function: word.depth(),
            });
        }
        let block = self.space.basis_size(self.depth - word.depth())?;
        let start = word.index(self.space.symbol_count()) * block;
        Ok(self.masses[start..start + block].iter().sum())
    }

    /// Marginal on the coarser depth-`depth` partition (block sums).
    pub fn marginal(&self, depth: usize) -> Result<Self> {
        if depth > self.depth {
            return Err(Error::MeasureDepth {
                measure: self.depth,
                function: depth,
            });
        }
        let n = self.space.basis_size(depth)?;
        let block = self.masses.len() / n;
        let masses = (0..n)
            .map(|i| self.masses[i * block..(i + 1) * block].iter().sum())
            .collect();
        Self::from_masses(self.space, depth, masses)
    }

    /// ∫ f dμ for a cylinder function no deeper than the measure.
    pub fn integrate(&self, f: &CylinderFunction) -> Result<Complex64> {
        if f.space().symbol_count() != self.space.symbol_count() {
            return Err(Error::SymbolMismatch(
                f.space().symbol_count(),
                self.space.symbol_count(),
            ));
        }
        if f.depth() > self.depth {
            return Err(Error::MeasureDepth {
                measure: self.depth,
                function: f.depth(),
            });
        }
        let lifted = f.lift(self.depth)?;
        Ok(lifted
            .values()
            .iter()
            .zip(&self.masses)
            .map(|(v, m)| v * m)
            .sum())
    }

    /// ∫ f dμ for a real table.
    pub fn integrate_real(&self, f: &Potential) -> Result<f64> {
        if f.space().symbol_count() != self.space.symbol_count() {
            return Err(Error::SymbolMismatch(
                f.space().symbol_count(),
                self.space.symbol_count(),
            ));
        }
        if f.depth() > self.depth {
            return Err(Error::MeasureDepth {
                measure: self.depth,
                function: f.depth(),
            });
        }
        let lifted = f.lift(self.depth)?;
        Ok(lifted
            .values()
            .iter()
            .zip(&self.masses)
            .map(|(v, m)| v * m)
            .sum())
    }

    /// Total variation distance ½·Σ|μ - ν| between measures at the same
    /// working depth.
    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        if self.depth != other.depth {
            return Err(Error::MeasureDepth {
                measure: self.depth,
                function: other.depth,
            });
        }
        if self.space.symbol_count() != other.space.symbol_count() {
            return Err(Error::SymbolMismatch(
                self.space.symbol_count(),
                other.space.symbol_count(),
            ));
        }
        Ok(0.5
            * self
                .masses
                .iter()
                .zip(&other.masses)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }
}

#[derive(Serialize, Deserialize)]
struct CylinderMeasureRepr {
    k: usize,
    depth: usize,
    masses: Vec<f64>,
}

impl Serialize for CylinderMeasure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CylinderMeasureRepr {
            k: self.space.symbol_count(),
            depth: self.depth,
            masses: self.masses.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CylinderMeasure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CylinderMeasureRepr::deserialize(deserializer)?;
        let space = ShiftSpace::new(repr.k).map_err(D::Error::custom)?;
        CylinderMeasure::from_masses(space, repr.depth, repr.masses).map_err(D::Error::custom)
    }
}

fn require_normalized(p: &Potential) -> Result<()> {
    p.require_positive()?;
    let one = Potential::one(p.space());
    let lp1 = crate::transfer::ruelle_apply_real(p, &one)?;
    let err = lp1.sup_distance(&one.lift(lp1.depth())?)?;
    if err > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(err));
    }
    Ok(())
}

/// The T-invariant measure whose Jacobian is the normalized weight p
/// (L_p 1 = 1), resolved at depth `depth`.
pub fn stationary_measure(
    p: &Potential,
    depth: usize,
    tol: f64,
    max_iter: usize,
) -> Result<CylinderMeasure> {
    require_normalized(p)?;
    let solve_depth = depth.max(p.depth().saturating_sub(1)).max(1);
    let triple = leading_triple(p, solve_depth, tol, max_iter)?;
    triple.eigenmeasure.marginal(depth)
}

/// The conditional expectation E_μ(f | T^{-n}𝔅) = αⁿ(L_pⁿ f) onto functions
/// of the coordinates from position n onwards, for the invariant measure μ
/// with Jacobian p.
pub fn conditional_expectation(
    p: &Potential,
    f: &CylinderFunction,
    n: usize,
) -> Result<CylinderFunction> {
    require_normalized(p)?;
    let mut g = f.clone();
    for _ in 0..n {
        g = ruelle_apply(p, &g)?;
    }
    g.compose_shift_n(n)
}

/// Multiplicative cocycle data tying the β-twisted transfer operator to the
/// normalized one: λ^{[n]} (the inverse n-step product of p), H^{β[n]} (the
/// n-step product of H^β) and Λ_n = λ^{[n]} / H^{β[n]}, which satisfy
///
/// ```text
/// L_β^n f = L_p^n (Λ_n · f)      with L_β = L_{H^{-β}}.
/// ```
#[derive(Clone, Debug)]
pub struct CocycleBundle {
    p: Potential,
    h: Potential,
    beta: f64,
    n: usize,
    lambda_n: Potential,
    h_beta_n: Potential,
    big_lambda_n: Potential,
}

impl CocycleBundle {
    pub fn jacobian(&self) -> &Potential {
        &self.p
    }

    pub fn hamiltonian(&self) -> &Potential {
        &self.h
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    /// λ^{[n]} = 1 / (p · p∘T · … · p∘T^{n-1})
    pub fn lambda_n(&self) -> &Potential {
        &self.lambda_n
    }

    /// H^{β[n]} = (H · H∘T · … · H∘T^{n-1})^β
    pub fn h_beta_n(&self) -> &Potential {
        &self.h_beta_n
    }

    /// Λ_n = λ^{[n]} / H^{β[n]}
    pub fn big_lambda_n(&self) -> &Potential {
        &self.big_lambda_n
    }

    /// Residual of the defining identity on a given test function:
    /// ‖L_β^n f − L_p^n(Λ_n f)‖_∞.
    pub fn identity_residual(&self, f: &CylinderFunction) -> Result<f64> {
        let weight = self.h.pow(-self.beta)?;
        let mut twisted = f.clone();
        for _ in 0..self.n {
            twisted = ruelle_apply(&weight, &twisted)?;
        }
        let mut carried = self.big_lambda_n.to_complex().try_mul(f)?;
        for _ in 0..self.n {
            carried = ruelle_apply(&self.p, &carried)?;
        }
        twisted.sup_distance(&carried)
    }
}

/// Build the n-step cocycle bundle for a normalized weight p and a strictly
/// positive potential H at inverse temperature β. The defining identity is
/// verified on a deterministic pseudo-random test function before returning.
pub fn cocycles(p: &Potential, h: &Potential, beta: f64, n: usize) -> Result<CocycleBundle> {
    require_normalized(p)?;
    h.require_positive()?;
    if p.space().symbol_count() != h.space().symbol_count() {
        return Err(Error::SymbolMismatch(
            p.space().symbol_count(),
            h.space().symbol_count(),
        ));
    }
    let lambda_n = p.birkhoff(n)?.recip()?;
    let h_beta_n = h.birkhoff(n)?.pow(beta)?;
    let big_lambda_n = lambda_n.try_mul(&h_beta_n.recip()?)?;
    let bundle = CocycleBundle {
        p: p.clone(),
        h: h.clone(),
        beta,
        n,
        lambda_n,
        h_beta_n,
        big_lambda_n,
    };

    // post-condition: the conversion identity holds on a fixed random probe
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cc0c ^ n as u64);
    let probe_depth = 2.min(bundle.big_lambda_n.depth().max(1));
    let size = p.space().basis_size(probe_depth)?;
    let probe = CylinderFunction::from_values(
        p.space(),
        probe_depth,
        (0..size)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )?;
    let scale = bundle
        .big_lambda_n
        .values()
        .iter()
        .fold(1.0f64, |a, &b| a.max(b.abs()));
    let residual = bundle.identity_residual(&probe)?;
    if residual > 1e-9 * scale.max(1.0) {
        return Err(Error::Tolerance(format!(
            "cocycle conversion identity failed its self-check (residual {residual:.3e})"
        )));
    }
    Ok(bundle)
}

/// Residual of the eigenmeasure reconstruction identity
///
/// ```text
/// ∫ f dν_β  =  ∫ Λ_n^{-1} · αⁿ(L_β^n f) dν_β,
/// ```
///
/// where ν_β is the eigenmeasure of L_β = L_{H^{-β}} delivered in `triple`.
/// This is the finite-depth fingerprint of the fact that ν_β is determined
/// by its conditional structure at every level n.
pub fn eigenmeasure_identity_residual(
    p: &Potential,
    h: &Potential,
    beta: f64,
    f: &CylinderFunction,
    n: usize,
    triple: &SpectralTriple,
) -> Result<f64> {
    let bundle = cocycles(p, h, beta, n)?;
    let weight = h.pow(-beta)?;
    let mut image = f.clone();
    for _ in 0..n {
        image = ruelle_apply(&weight, &image)?;
    }
    let pulled = image.compose_shift_n(n)?;
    let kernel = bundle.big_lambda_n().recip()?.to_complex();
    let integrand = kernel.try_mul(&pulled)?;
    let rhs = triple.eigenmeasure.integrate(&integrand)?;
    let lhs = triple.eigenmeasure.integrate(f)?;
    Ok((lhs - rhs).norm())
}

/// The equilibrium state of the potential −β·log H together with its
/// thermodynamic summary.
#[derive(Clone, Debug)]
pub struct EquilibriumState {
    pub beta: f64,
    /// dμ_β = h_β dν_β, the T-invariant Gibbs measure
    pub measure: CylinderMeasure,
    /// leading eigenvalue λ(β) of L_{H^{-β}}
    pub lambda: f64,
    /// P(β) = log λ(β)
    pub pressure: f64,
    /// ∫ log H dμ_β
    pub energy: f64,
    /// h(μ_β) = P(β) + β·∫ log H dμ_β
    pub entropy: f64,
}

/// Solve for the equilibrium state of −β·log H at working depth `depth`.
///
/// The entropy is recovered from the variational identity
/// h(μ) = P(β) + β·∫log H dμ and validated against the a-priori bounds
/// 0 ≤ h ≤ log k.
pub fn equilibrium_state(
    h: &Potential,
    beta: f64,
    depth: usize,
    tol: f64,
    max_iter: usize,
) -> Result<EquilibriumState> {
    let weight = h.pow(-beta)?;
    let triple = leading_triple(&weight, depth, tol, max_iter)?;
    let raw: Vec<f64> = triple
        .eigenfunction
        .values()
        .iter()
        .zip(triple.eigenmeasure.masses())
        .map(|(hv, m)| hv * m)
        .collect();
    let total: f64 = raw.iter().sum(); // = ∫h dν = 1 up to rounding
    let masses = raw.into_iter().map(|m| m / total).collect();
    let measure = CylinderMeasure::from_masses(h.space(), depth, masses)?;

    let log_h = h.ln()?;
    let energy = measure.integrate_real(&log_h)?;
    let pressure = triple.eigenvalue.ln();
    let entropy = pressure + beta * energy;
    let hmax = h.space().entropy();
    if !(-1e-10..=hmax + 1e-10).contains(&entropy) {
        return Err(Error::Tolerance(format!(
            "entropy {entropy} escapes [0, {hmax}]"
        )));
    }
    Ok(EquilibriumState {
        beta,
        measure,
        lambda: triple.eigenvalue,
        pressure,
        energy,
        entropy,
    })
}
