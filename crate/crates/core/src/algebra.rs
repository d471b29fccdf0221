//! The finitely-generated operator algebra of a normalized weight, its
//! modular flow, and KMS verification.
//!
//! Fix a normalized weight p (L_p 1 = 1) with invariant measure μ. On
//! L²(μ) the shift composition S: η ↦ η∘T is an isometry whose adjoint is
//! L_p, and e_n = Sⁿ(S*)ⁿ is the conditional expectation E_n onto functions
//! of the coordinates from position n on. Every product of multiplication
//! operators M_f and powers of S, S* collapses to a sum of *generator
//! terms*
//!
//! ```text
//! M_f · e_n · M_g : η ↦ f · E_n(g·η),
//! ```
//!
//! and this module implements that normal form: products, adjoints, exact
//! matrices on the depth-D cylinder basis, the modular flow
//! σ_t(M_f e_n M_g) = M_{f·H^{it[n]}} e_n M_{H^{-it[n]}·g} of a positive
//! potential H, and the functional
//!
//! ```text
//! ψ(M_f e_n M_g) = ∫ f·g·p^{[n]} dν ,   p^{[n]} = p·(p∘T)⋯(p∘T^{n-1}),
//! ```
//!
//! which for ν = ν_β (the eigenmeasure of L_{H^{-β}}) is the KMS state of
//! σ at inverse temperature β: ψ(ab) = ψ(b·σ_{iβ}(a)).
//!
//! The verification entry points are [`relation_suite`] (the generator
//! identities, each computed by two independent routes), [`kms_battery`]
//! (the KMS identity over a grid of term pairs), [`state_axioms_check`]
//! (ψ is a state), and [`uniqueness_probe`] (reconstructing ν_β from its
//! level-n conditional data).

use std::collections::HashMap;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gibbs::{conditional_expectation, stationary_measure, CylinderMeasure};
use crate::shift::{decode, encode, CylinderFunction, Potential, ShiftSpace};
use crate::transfer::{leading_triple, ruelle_apply};

/// Shared data for algebra computations: the normalized weight p, its
/// invariant measure μ at the working depth D, and the depth budget that
/// keeps every computed table inside the depth-D space.
#[derive(Clone, Debug)]
pub struct AlgebraContext {
    space: ShiftSpace,
    p: Potential,
    depth: usize,
    mu: CylinderMeasure,
}

impl AlgebraContext {
    /// Build a context at working depth `depth`. The weight must satisfy
    /// L_p 1 = 1; its invariant measure is computed here once.
    pub fn new(p: Potential, depth: usize, tol: f64, max_iter: usize) -> Result<Self> {
        let mu = stationary_measure(&p, depth, tol, max_iter)?;
        Ok(Self {
            space: p.space(),
            p,
            depth,
            mu,
        })
    }

    pub fn space(&self) -> ShiftSpace {
        self.space
    }

    pub fn jacobian(&self) -> &Potential {
        &self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// The invariant measure μ of p at the working depth.
    pub fn measure(&self) -> &CylinderMeasure {
        &self.mu
    }

    pub fn basis_size(&self) -> Result<usize> {
        self.space.basis_size(self.depth)
    }

    fn admit_parts(&self, f_depth: usize, level: usize, g_depth: usize) -> Result<()> {
        let p_reach = self.p.depth().max(1);
        let level_ok = level == 0 || p_reach + level - 1 <= self.depth;
        if f_depth > self.depth || g_depth > self.depth || !level_ok {
            return Err(Error::DepthBudget {
                f_depth,
                level,
                g_depth,
                depth: self.depth,
            });
        }
        Ok(())
    }

    /// Check a term against the depth budget: both symbols must live at
    /// depth ≤ D and the level must satisfy max(depth(p),1) + n − 1 ≤ D, so
    /// that E_n keeps depth-D tables inside the depth-D space.
    pub fn admit(&self, term: &GeneratorTerm) -> Result<()> {
        self.admit_parts(term.f.depth(), term.level, term.g.depth())
    }

    /// E_n = conditional expectation onto σ(x_{n+1}, x_{n+2}, …) for μ.
    pub fn expectation(&self, f: &CylinderFunction, n: usize) -> Result<CylinderFunction> {
        conditional_expectation(&self.p, f, n)
    }
}

/// One normal-form generator term M_f · e_n · M_g.
#[derive(Clone, Debug)]
pub struct GeneratorTerm {
    f: CylinderFunction,
    level: usize,
    g: CylinderFunction,
}

impl GeneratorTerm {
    pub fn new(f: CylinderFunction, level: usize, g: CylinderFunction) -> Result<Self> {
        if f.space().symbol_count() != g.space().symbol_count() {
            return Err(Error::SymbolMismatch(
                f.space().symbol_count(),
                g.space().symbol_count(),
            ));
        }
        Ok(Self { f, level, g })
    }

    /// The multiplication operator M_f = M_f·e_0·M_1.
    pub fn multiplication(f: CylinderFunction) -> Self {
        let one = CylinderFunction::one(f.space());
        Self {
            f,
            level: 0,
            g: one,
        }
    }

    /// The projection e_n = M_1·e_n·M_1.
    pub fn projection(space: ShiftSpace, level: usize) -> Self {
        Self {
            f: CylinderFunction::one(space),
            level,
            g: CylinderFunction::one(space),
        }
    }

    pub fn left_symbol(&self) -> &CylinderFunction {
        &self.f
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn right_symbol(&self) -> &CylinderFunction {
        &self.g
    }

    /// (M_f e_n M_g)* = M_ḡ e_n M_f̄.
    pub fn adjoint(&self) -> Self {
        Self {
            f: self.g.conj(),
            level: self.level,
            g: self.f.conj(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            f: self.f.scale(c),
            level: self.level,
            g: self.g.clone(),
        }
    }

    /// Apply the term to a cylinder function: f·E_n(g·η).
    pub fn apply(&self, ctx: &AlgebraContext, eta: &CylinderFunction) -> Result<CylinderFunction> {
        ctx.admit(self)?;
        let inner = self.g.try_mul(eta)?;
        let projected = ctx.expectation(&inner, self.level)?;
        self.f.try_mul(&projected)
    }
}

impl fmt::Display for GeneratorTerm {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            out,
            "M_(depth {}) e_{} M_(depth {})",
            self.f.depth(),
            self.level,
            self.g.depth()
        )
    }
}

/// A finite sum of generator terms — the dense subalgebra every product,
/// adjoint, and modular image stays inside.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    space: ShiftSpace,
    terms: Vec<GeneratorTerm>,
}

impl AlgebraElement {
    pub fn zero(space: ShiftSpace) -> Self {
        Self {
            space,
            terms: Vec::new(),
        }
    }

    pub fn identity(space: ShiftSpace) -> Self {
        Self::from_term(GeneratorTerm::projection(space, 0))
    }

    pub fn from_term(term: GeneratorTerm) -> Self {
        Self {
            space: term.f.space(),
            terms: vec![term],
        }
    }

    pub fn from_terms(space: ShiftSpace, terms: Vec<GeneratorTerm>) -> Result<Self> {
        for t in &terms {
            if t.f.space().symbol_count() != space.symbol_count() {
                return Err(Error::SymbolMismatch(
                    t.f.space().symbol_count(),
                    space.symbol_count(),
                ));
            }
        }
        Ok(Self { space, terms })
    }

    pub fn space(&self) -> ShiftSpace {
        self.space
    }

    pub fn terms(&self) -> &[GeneratorTerm] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.space.symbol_count() != other.space.symbol_count() {
            return Err(Error::SymbolMismatch(
                self.space.symbol_count(),
                other.space.symbol_count(),
            ));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self {
            space: self.space,
            terms,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            space: self.space,
            terms: self.terms.iter().map(|t| t.scale(c)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            terms: self.terms.iter().map(GeneratorTerm::adjoint).collect(),
        }
    }

    /// Product in normal form. For single terms:
    ///
    /// ```text
    /// (M_f e_n M_g)(M_h e_m M_k) = M_{f·E_n(g·h)} e_m M_k        if n ≤ m,
    ///                             = M_f e_n M_{E_m(g·h)·k}        if n > m,
    /// ```
    ///
    /// using e_n u e_m = E_n(u)·e_m for n ≤ m (and symmetrically), since the
    /// projections decrease: e_n e_m = e_{max(n,m)}.
    pub fn multiply(&self, other: &Self, ctx: &AlgebraContext) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            ctx.admit(a)?;
            for b in &other.terms {
                ctx.admit(b)?;
                let inner = a.g.try_mul(&b.f)?;
                let term = if a.level <= b.level {
                    let pushed = ctx.expectation(&inner, a.level)?;
                    GeneratorTerm {
                        f: a.f.try_mul(&pushed)?,
                        level: b.level,
                        g: b.g.clone(),
                    }
                } else {
                    let pushed = ctx.expectation(&inner, b.level)?;
                    GeneratorTerm {
                        f: a.f.clone(),
                        level: a.level,
                        g: pushed.try_mul(&b.g)?,
                    }
                };
                ctx.admit(&term)?;
                terms.push(term);
            }
        }
        Ok(Self {
            space: self.space,
            terms,
        })
    }

    /// Apply the element to a cylinder function.
    pub fn apply(&self, ctx: &AlgebraContext, eta: &CylinderFunction) -> Result<CylinderFunction> {
        let mut acc = CylinderFunction::zero(self.space);
        for t in &self.terms {
            acc = acc.try_add(&t.apply(ctx, eta)?)?;
        }
        Ok(acc)
    }

    /// The exact matrix of the element on the depth-D cylinder basis:
    /// Σ diag(f) · E_n · diag(g) with the expectation matrices built
    /// column-by-column.
    pub fn to_matrix(&self, ctx: &AlgebraContext) -> Result<Array2<Complex64>> {
        let n = ctx.basis_size()?;
        let mut out = Array2::<Complex64>::zeros((n, n));
        let mut expectations: HashMap<usize, Array2<Complex64>> = HashMap::new();
        for t in &self.terms {
            ctx.admit(t)?;
            if !expectations.contains_key(&t.level) {
                expectations.insert(t.level, expectation_matrix(ctx, t.level)?);
            }
            let e = &expectations[&t.level];
            let fl = t.f.lift(ctx.depth)?;
            let gl = t.g.lift(ctx.depth)?;
            let (fv, gv) = (fl.values(), gl.values());
            for i in 0..n {
                for j in 0..n {
                    out[[i, j]] += fv[i] * e[[i, j]] * gv[j];
                }
            }
        }
        Ok(out)
    }
}

/// The matrix of E_n on the depth-D basis.
pub fn expectation_matrix(ctx: &AlgebraContext, level: usize) -> Result<Array2<Complex64>> {
    ctx.admit_parts(0, level, 0)?;
    let n = ctx.basis_size()?;
    let mut m = Array2::<Complex64>::zeros((n, n));
    for j in 0..n {
        let ej = CylinderFunction::basis_vector(ctx.space, ctx.depth, j)?;
        let col = ctx.expectation(&ej, level)?.lift(ctx.depth)?;
        for (i, v) in col.values().iter().enumerate() {
            m[[i, j]] = *v;
        }
    }
    Ok(m)
}

/// The one-parameter modular flow σ_t of a strictly positive potential H,
/// acting termwise through the n-step products H^{[n]}:
///
/// ```text
/// σ_t(M_f e_n M_g) = M_{f·(H^{[n]})^{it}} e_n M_{(H^{[n]})^{-it}·g}.
/// ```
///
/// The parameter may be complex; t = iβ gives the real factors (H^{[n]})^{∓β}
/// entering the KMS condition.
#[derive(Clone, Debug)]
pub struct ModularFlow {
    h: Potential,
    time: Complex64,
}

impl ModularFlow {
    pub fn new(h: Potential, time: Complex64) -> Result<Self> {
        h.require_positive()?;
        Ok(Self { h, time })
    }

    pub fn at_real_time(h: Potential, t: f64) -> Result<Self> {
        Self::new(h, Complex64::new(t, 0.0))
    }

    /// The analytic continuation to t = iβ used by the KMS condition.
    pub fn at_imaginary_time(h: Potential, beta: f64) -> Result<Self> {
        Self::new(h, Complex64::new(0.0, beta))
    }

    pub fn hamiltonian(&self) -> &Potential {
        &self.h
    }

    pub fn time(&self) -> Complex64 {
        self.time
    }

    pub fn apply_term(&self, term: &GeneratorTerm) -> Result<GeneratorTerm> {
        let block = self.h.birkhoff(term.level)?;
        let exponent = Complex64::i() * self.time;
        let forward = block.powc(exponent)?;
        let backward = block.powc(-exponent)?;
        Ok(GeneratorTerm {
            f: term.f.try_mul(&forward)?,
            level: term.level,
            g: backward.try_mul(&term.g)?,
        })
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        let terms = a
            .terms
            .iter()
            .map(|t| self.apply_term(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgebraElement {
            space: a.space,
            terms,
        })
    }
}

/// The functional ψ(M_f e_n M_g) = ∫ f·g·p^{[n]} dν on generator terms,
/// extended linearly. With ν the eigenmeasure of L_{H^{-β}} this is the
/// (σ, β)-KMS state of the algebra.
#[derive(Clone, Debug)]
pub struct StateFunctional {
    nu: CylinderMeasure,
    p: Potential,
}

impl StateFunctional {
    pub fn new(nu: CylinderMeasure, p: Potential) -> Result<Self> {
        if nu.space().symbol_count() != p.space().symbol_count() {
            return Err(Error::SymbolMismatch(
                nu.space().symbol_count(),
                p.space().symbol_count(),
            ));
        }
        p.require_positive()?;
        Ok(Self { nu, p })
    }

    pub fn measure(&self) -> &CylinderMeasure {
        &self.nu
    }

    pub fn jacobian(&self) -> &Potential {
        &self.p
    }

    pub fn evaluate_term(&self, term: &GeneratorTerm) -> Result<Complex64> {
        let weight = self.p.birkhoff(term.level)?.to_complex();
        let integrand = term.f.try_mul(&term.g)?.try_mul(&weight)?;
        self.nu.integrate(&integrand)
    }

    pub fn evaluate(&self, a: &AlgebraElement) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &a.terms {
            acc += self.evaluate_term(t)?;
        }
        Ok(acc)
    }
}

/// The KMS state candidate at inverse temperature β for the flow of H:
/// ψ built from the eigenmeasure ν_β of L_{H^{-β}} at the context depth.
pub fn gibbs_functional(
    ctx: &AlgebraContext,
    h: &Potential,
    beta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<StateFunctional> {
    let weight = h.pow(-beta)?;
    let triple = leading_triple(&weight, ctx.depth(), tol, max_iter)?;
    StateFunctional::new(triple.eigenmeasure, ctx.jacobian().clone())
}

/// |ψ(ab) − ψ(b·σ_{iβ}(a))| — the KMS defect of ψ on the pair (a, b) for
/// the modular flow of H at inverse temperature β.
pub fn kms_residual(
    psi: &StateFunctional,
    h: &Potential,
    beta: f64,
    a: &AlgebraElement,
    b: &AlgebraElement,
    ctx: &AlgebraContext,
) -> Result<f64> {
    let flow = ModularFlow::at_imaginary_time(h.clone(), beta)?;
    let ab = a.multiply(b, ctx)?;
    let shifted = flow.apply(a)?;
    let b_shifted = b.multiply(&shifted, ctx)?;
    Ok((psi.evaluate(&ab)? - psi.evaluate(&b_shifted)?).norm())
}

/// One named identity check with its sup-norm residual.
#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub name: String,
    pub residual: f64,
}

/// Residuals of the generator relations, each verified over the whole
/// depth-D cylinder basis.
#[derive(Clone, Debug)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.residual)
            .fold(0.0f64, f64::max)
    }
}

/// E_n by the direct branch-average formula
///
/// ```text
/// E_n(u)(x) = Σ_{|w|=n} p^{[n]}(w·T^n x) · u(w·T^n x),
/// ```
///
/// an independent route to the same projection realized elsewhere as αⁿ∘L_pⁿ.
fn expectation_via_branches(
    ctx: &AlgebraContext,
    u: &CylinderFunction,
    n: usize,
) -> Result<CylinderFunction> {
    let depth = ctx.depth();
    let k = ctx.space().symbol_count();
    let size = ctx.basis_size()?;
    let u_lift = u.lift(depth)?;
    let pn_lift = ctx.jacobian().birkhoff(n)?.lift(depth)?;
    let branches = ctx.space().basis_size(n)?;
    let mut values = vec![Complex64::new(0.0, 0.0); size];
    for (x, slot) in values.iter_mut().enumerate() {
        let symbols = decode(x, depth, k);
        let tail = &symbols[n..];
        let mut acc = Complex64::new(0.0, 0.0);
        for w in 0..branches {
            let mut word = decode(w, n, k);
            word.extend_from_slice(tail);
            let idx = encode(&word, k);
            acc += u_lift.values()[idx] * pn_lift.values()[idx];
        }
        *slot = acc;
    }
    CylinderFunction::from_values(ctx.space(), depth, values)
}

/// Verify the generator identities at level n with symbols f and g, every
/// check ranging over all depth-D basis vectors:
///
/// * `isometry` — (S*)ⁿSⁿ = 1,
/// * `transfer_conjugation` — (S*)ⁿ M_f Sⁿ = M_{L_pⁿ f},
/// * `shift_intertwine` — S·M_f = M_{f∘T}·S,
/// * `expectation_routes` — e_n = αⁿ∘L_pⁿ against the branch-average formula,
/// * `projection_idempotent` — e_n² = e_n,
/// * `projection_nesting` — e_n·e_m = e_{max(n,m)},
/// * `level_compression` — e_n M_g e_n = M_{E_n(g)} e_n,
/// * `term_action` — the matrix of M_f e_n M_g against its function action,
/// * `adjoint_matrix` — the matrix of the adjoint term equals the
///   μ-weighted conjugate transpose,
/// * `partition_resolution` — Σ_i M_{u_i}SS*M_{u_i} = 1 for u_i = (1_{[i]}/p)^{1/2},
/// * `level_recursion` — e_n = Σ_i M_{αⁿu_i} e_{n+1} M_{αⁿu_i}.
///
/// Levels n and n+1 must both fit the depth budget.
pub fn relation_suite(
    ctx: &AlgebraContext,
    f: &CylinderFunction,
    g: &CylinderFunction,
    n: usize,
) -> Result<RelationReport> {
    ctx.admit_parts(f.depth(), n, g.depth())?;
    ctx.admit_parts(0, n + 1, 0)?;
    let depth = ctx.depth();
    let k = ctx.space().symbol_count();
    let size = ctx.basis_size()?;
    let p = ctx.jacobian();

    let basis: Vec<CylinderFunction> = (0..size)
        .map(|j| CylinderFunction::basis_vector(ctx.space(), depth, j))
        .collect::<Result<Vec<_>>>()?;

    let lp_n = |u: &CylinderFunction, steps: usize| -> Result<CylinderFunction> {
        let mut v = u.clone();
        for _ in 0..steps {
            v = ruelle_apply(p, &v)?;
        }
        Ok(v)
    };

    let mut checks: Vec<RelationCheck> = Vec::new();
    let mut push = |name: &str, residual: f64| {
        checks.push(RelationCheck {
            name: name.to_string(),
            residual,
        });
    };

    // the square roots of the partition of unity: u_i = (1_{[i]}/p)^{1/2}
    let inv_p = p.recip()?;
    let mut roots = Vec::with_capacity(k);
    for i in 1..=k {
        let cell = Potential::indicator(ctx.space(), &crate::shift::Word::new(vec![i as u32], k)?)?;
        let ratio = cell.try_mul(&inv_p)?;
        let values = ratio.values().iter().map(|v| v.max(0.0).sqrt()).collect();
        roots.push(Potential::from_values(ctx.space(), ratio.depth(), values)?.to_complex());
    }

    let mut r_isometry = 0.0f64;
    let mut r_conj = 0.0f64;
    let mut r_intertwine = 0.0f64;
    let mut r_routes = 0.0f64;
    let mut r_idem = 0.0f64;
    let mut r_nest = 0.0f64;
    let mut r_compress = 0.0f64;
    let mut r_action = 0.0f64;
    let mut r_partition = 0.0f64;
    let mut r_recursion = 0.0f64;

    let term = GeneratorTerm::new(f.clone(), n, g.clone())?;
    let term_matrix = AlgebraElement::from_term(term.clone()).to_matrix(ctx)?;
    let eg = ctx.expectation(g, n)?;

    for (j, e) in basis.iter().enumerate() {
        // (S*)ⁿSⁿ = 1
        let round_trip = lp_n(&e.compose_shift_n(n)?, n)?;
        r_isometry = r_isometry.max(round_trip.sup_distance(e)?);

        // (S*)ⁿ M_f Sⁿ = M_{L_pⁿ f}
        let lhs = lp_n(&f.try_mul(&e.compose_shift_n(n)?)?, n)?;
        let rhs = lp_n(f, n)?.try_mul(e)?;
        r_conj = r_conj.max(lhs.sup_distance(&rhs)?);

        // S M_f = M_{f∘T} S
        let lhs = f.try_mul(e)?.compose_shift()?;
        let rhs = f.compose_shift()?.try_mul(&e.compose_shift()?)?;
        r_intertwine = r_intertwine.max(lhs.sup_distance(&rhs)?);

        // two routes to E_n
        let via_ops = ctx.expectation(e, n)?;
        let via_branches = expectation_via_branches(ctx, e, n)?;
        r_routes = r_routes.max(via_ops.sup_distance(&via_branches)?);

        // e_n² = e_n
        let twice = ctx.expectation(&via_ops, n)?;
        r_idem = r_idem.max(twice.sup_distance(&via_ops)?);

        // e_n e_{n+1} = e_{n+1} (both orders)
        let deeper = ctx.expectation(e, n + 1)?;
        let nest_a = ctx.expectation(&deeper, n)?;
        let nest_b = ctx.expectation(&via_ops, n + 1)?;
        r_nest = r_nest.max(nest_a.sup_distance(&deeper)?);
        r_nest = r_nest.max(nest_b.sup_distance(&deeper)?);

        // e_n M_g e_n = M_{E_n g} e_n
        let lhs = ctx.expectation(&g.try_mul(&via_ops)?, n)?;
        let rhs = eg.try_mul(&via_ops)?;
        r_compress = r_compress.max(lhs.sup_distance(&rhs)?);

        // the term matrix against the function action
        let action = term.apply(ctx, e)?.lift(depth)?;
        let column = term_matrix.column(j);
        let col_err = action
            .values()
            .iter()
            .zip(column.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        r_action = r_action.max(col_err);

        // Σ_i M_{u_i} S S* M_{u_i} = 1
        let mut resolved = CylinderFunction::zero(ctx.space());
        for u in &roots {
            let inner = ruelle_apply(p, &u.try_mul(e)?)?.compose_shift()?;
            resolved = resolved.try_add(&u.try_mul(&inner)?)?;
        }
        r_partition = r_partition.max(resolved.sup_distance(e)?);

        // e_n = Σ_i M_{αⁿ u_i} e_{n+1} M_{αⁿ u_i}
        let mut recursed = CylinderFunction::zero(ctx.space());
        for u in &roots {
            let shifted = u.compose_shift_n(n)?;
            let inner = ctx.expectation(&shifted.try_mul(e)?, n + 1)?;
            recursed = recursed.try_add(&shifted.try_mul(&inner)?)?;
        }
        r_recursion = r_recursion.max(recursed.sup_distance(&via_ops)?);
    }

    // matrix of the adjoint term vs the μ-weighted conjugate transpose
    let adj_matrix = AlgebraElement::from_term(term.adjoint()).to_matrix(ctx)?;
    let weights = ctx.measure().masses();
    let mut r_adjoint = 0.0f64;
    for i in 0..size {
        for j in 0..size {
            if weights[i] <= 0.0 {
                continue;
            }
            let weighted = term_matrix[[j, i]].conj() * weights[j] / weights[i];
            r_adjoint = r_adjoint.max((adj_matrix[[i, j]] - weighted).norm());
        }
    }

    push("isometry", r_isometry);
    push("transfer_conjugation", r_conj);
    push("shift_intertwine", r_intertwine);
    push("expectation_routes", r_routes);
    push("projection_idempotent", r_idem);
    push("projection_nesting", r_nest);
    push("level_compression", r_compress);
    push("term_action", r_action);
    push("adjoint_matrix", r_adjoint);
    push("partition_resolution", r_partition);
    push("level_recursion", r_recursion);
    Ok(RelationReport { checks })
}

/// A battery pair that exceeded the tolerance.
#[derive(Clone, Debug)]
pub struct BatteryFailure {
    pub left: String,
    pub right: String,
    pub left_term: GeneratorTerm,
    pub right_term: GeneratorTerm,
    pub residual: f64,
}

/// Outcome of a KMS battery run.
#[derive(Clone, Debug)]
pub struct BatteryReport {
    pub beta: f64,
    pub pairs: usize,
    pub max_residual: f64,
    pub failures: Vec<BatteryFailure>,
}

/// The standard battery symbols: the constant 1 and all cylinder indicators
/// of depth 1 and 2, with printable labels.
pub fn battery_functions(space: ShiftSpace) -> Result<Vec<(String, CylinderFunction)>> {
    let mut out = vec![("1".to_string(), CylinderFunction::one(space))];
    for depth in [1usize, 2] {
        for word in space.enumerate_cylinders(depth)? {
            out.push((
                format!("1_[{word}]"),
                CylinderFunction::indicator(space, &word)?,
            ));
        }
    }
    Ok(out)
}

/// Check the KMS identity ψ(ab) = ψ(b·σ_{iβ}(a)) over every pair of
/// generator terms with symbols from [`battery_functions`] and levels
/// 0..=`max_level`. Pairs whose residual exceeds `tol` are returned as
/// failures.
pub fn kms_battery(
    ctx: &AlgebraContext,
    h: &Potential,
    beta: f64,
    psi: &StateFunctional,
    max_level: usize,
    tol: f64,
) -> Result<BatteryReport> {
    let functions = battery_functions(ctx.space())?;
    let flow = ModularFlow::at_imaginary_time(h.clone(), beta)?;

    struct Entry {
        label: String,
        term: GeneratorTerm,
        element: AlgebraElement,
        shifted: AlgebraElement,
    }
    let mut entries = Vec::new();
    for (fl, f) in &functions {
        for (gl, g) in &functions {
            for level in 0..=max_level {
                let term = GeneratorTerm::new(f.clone(), level, g.clone())?;
                ctx.admit(&term)?;
                let element = AlgebraElement::from_term(term.clone());
                let shifted = flow.apply(&element)?;
                entries.push(Entry {
                    label: format!("(f={fl}, n={level}, g={gl})"),
                    term,
                    element,
                    shifted,
                });
            }
        }
    }

    let mut max_residual = 0.0f64;
    let mut failures = Vec::new();
    let mut pairs = 0usize;
    for a in &entries {
        for b in &entries {
            let ab = a.element.multiply(&b.element, ctx)?;
            let b_sa = b.element.multiply(&a.shifted, ctx)?;
            let residual = (psi.evaluate(&ab)? - psi.evaluate(&b_sa)?).norm();
            pairs += 1;
            if residual > max_residual {
                max_residual = residual;
            }
            if residual > tol {
                failures.push(BatteryFailure {
                    left: a.label.clone(),
                    right: b.label.clone(),
                    left_term: a.term.clone(),
                    right_term: b.term.clone(),
                    residual,
                });
            }
        }
    }
    Ok(BatteryReport {
        beta,
        pairs,
        max_residual,
        failures,
    })
}

/// Random complex table with entries in the unit square, for probing.
pub fn random_cylinder_function(
    space: ShiftSpace,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CylinderFunction> {
    let n = space.basis_size(depth)?;
    let values = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    CylinderFunction::from_values(space, depth, values)
}

/// Random element with up to `max_terms` terms, symbol depths ≤ `max_depth`
/// and levels ≤ `max_level`.
pub fn random_element(
    space: ShiftSpace,
    rng: &mut ChaCha8Rng,
    max_depth: usize,
    max_level: usize,
    max_terms: usize,
) -> Result<AlgebraElement> {
    let count = rng.gen_range(1..=max_terms.max(1));
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let f = random_cylinder_function(space, rng.gen_range(0..=max_depth), rng)?;
        let g = random_cylinder_function(space, rng.gen_range(0..=max_depth), rng)?;
        terms.push(GeneratorTerm::new(f, rng.gen_range(0..=max_level), g)?);
    }
    AlgebraElement::from_terms(space, terms)
}

/// Results of checking that ψ is a state on random elements.
#[derive(Clone, Debug)]
pub struct StateAxiomsReport {
    pub trials: usize,
    /// |ψ(1) − 1|
    pub unit_residual: f64,
    /// min over trials of Re ψ(aa*) (must be ≥ 0)
    pub min_positivity: f64,
    /// max over trials of |Im ψ(aa*)|
    pub max_imaginary_part: f64,
    /// max over trials of |ψ(a*) − conj ψ(a)|
    pub max_hermitian_residual: f64,
}

/// Verify the state axioms ψ(1) = 1, ψ(aa*) ≥ 0, ψ(a*) = conj ψ(a) on
/// seeded random elements.
pub fn state_axioms_check(
    psi: &StateFunctional,
    ctx: &AlgebraContext,
    trials: usize,
    seed: u64,
) -> Result<StateAxiomsReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = AlgebraElement::identity(ctx.space());
    let unit_residual = (psi.evaluate(&unit)? - Complex64::new(1.0, 0.0)).norm();
    let max_level = ctx.depth().saturating_sub(ctx.jacobian().depth().max(1) - 1).min(2);
    let max_depth = ctx.depth().min(2);

    let mut min_positivity = f64::INFINITY;
    let mut max_imaginary_part = 0.0f64;
    let mut max_hermitian_residual = 0.0f64;
    for _ in 0..trials {
        let a = random_element(ctx.space(), &mut rng, max_depth, max_level, 2)?;
        let aa_star = a.multiply(&a.adjoint(), ctx)?;
        let value = psi.evaluate(&aa_star)?;
        min_positivity = min_positivity.min(value.re);
        max_imaginary_part = max_imaginary_part.max(value.im.abs());
        let hermitian = (psi.evaluate(&a.adjoint())? - psi.evaluate(&a)?.conj()).norm();
        max_hermitian_residual = max_hermitian_residual.max(hermitian);
    }
    Ok(StateAxiomsReport {
        trials,
        unit_residual,
        min_positivity,
        max_imaginary_part,
        max_hermitian_residual,
    })
}

/// One step of the uniqueness probe.
#[derive(Clone, Debug)]
pub struct ProbeStep {
    pub level: usize,
    /// total variation distance between the reconstructed measure and ν_β
    pub tv_distance: f64,
    /// the unnormalized mass Φ_n(1) — equal to 1 at every n exactly when
    /// the starting measure already satisfies the level-n KMS constraints
    pub normalization: f64,
}

/// Reconstruct ν_β from level-n conditional data, starting from an arbitrary
/// probability ρ₀ at the same depth:
///
/// ```text
/// Φ_n(f) = ∫ Λ_n^{-1} · αⁿ(L_β^n f) dρ₀ ,   ρ_n(w) = Φ_n(1_w) / Φ_n(1).
/// ```
///
/// ν_β is the unique fixed point: starting there gives distance 0 and
/// normalization 1 at every level; any other start converges geometrically.
pub fn uniqueness_probe(
    p: &Potential,
    h: &Potential,
    beta: f64,
    rho0: &CylinderMeasure,
    n_max: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<ProbeStep>> {
    let depth = rho0.depth();
    let reach = p.depth().max(h.depth()).max(1);
    if reach + n_max.saturating_sub(1) > depth || n_max > depth {
        return Err(Error::Domain(format!(
            "probe needs max(depth(p), depth(H), 1) + n − 1 ≤ {depth} and n ≤ {depth}, got n = {n_max}"
        )));
    }
    let weight = h.pow(-beta)?;
    let triple = leading_triple(&weight, depth, tol, max_iter)?;
    let size = rho0.space().basis_size(depth)?;
    let mut images: Vec<CylinderFunction> = (0..size)
        .map(|j| CylinderFunction::basis_vector(rho0.space(), depth, j))
        .collect::<Result<Vec<_>>>()?;

    let mut steps = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let kernel = h.birkhoff(n)?.pow(beta)?.try_mul(&p.birkhoff(n)?)?;
        let kernel_c = kernel.to_complex();
        let mut raw = Vec::with_capacity(size);
        for img in &images {
            let pulled = img.compose_shift_n(n)?;
            let integrand = kernel_c.try_mul(&pulled)?;
            raw.push(rho0.integrate(&integrand)?.re);
        }
        let normalization: f64 = raw.iter().sum();
        let masses: Vec<f64> = raw.iter().map(|v| (v / normalization).max(0.0)).collect();
        let total: f64 = masses.iter().sum();
        let masses: Vec<f64> = masses.into_iter().map(|m| m / total).collect();
        let rho_n = CylinderMeasure::from_masses(rho0.space(), depth, masses)?;
        steps.push(ProbeStep {
            level: n,
            tv_distance: rho_n.total_variation(&triple.eigenmeasure)?,
            normalization,
        });
        if n < n_max {
            for img in &mut images {
                *img = ruelle_apply(&weight, img)?;
            }
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::Word;
    use crate::transfer::DEFAULT_MAX_ITER;

    fn space2() -> ShiftSpace {
        ShiftSpace::new(2).unwrap()
    }

    fn bernoulli_ctx(depth: usize) -> AlgebraContext {
        let p = Potential::from_values(space2(), 1, vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        AlgebraContext::new(p, depth, 1e-13, DEFAULT_MAX_ITER).unwrap()
    }

    fn uniform_ctx(depth: usize) -> AlgebraContext {
        let p = Potential::uniform_jacobian(space2());
        AlgebraContext::new(p, depth, 1e-13, DEFAULT_MAX_ITER).unwrap()
    }

    #[test]
    fn depth_budget_is_enforced() {
        let ctx = bernoulli_ctx(3);
        let deep = CylinderFunction::one(space2()).lift(4).unwrap();
        let t = GeneratorTerm::new(deep, 0, CylinderFunction::one(space2())).unwrap();
        assert!(matches!(ctx.admit(&t), Err(Error::DepthBudget { .. })));
        // level 3 at depth 3 with a depth-1 weight: 1 + 3 - 1 = 3 ≤ 3, fine
        assert!(ctx.admit(&GeneratorTerm::projection(space2(), 3)).is_ok());
        // level 4 breaks the budget
        assert!(ctx.admit(&GeneratorTerm::projection(space2(), 4)).is_err());
    }

    #[test]
    fn product_matches_matrix_product() {
        use rand::prelude::*;
        let ctx = bernoulli_ctx(4);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let a = random_element(space2(), &mut rng, 2, 2, 2).unwrap();
            let b = random_element(space2(), &mut rng, 2, 2, 2).unwrap();
            let ab = a.multiply(&b, &ctx).unwrap();
            let ma = a.to_matrix(&ctx).unwrap();
            let mb = b.to_matrix(&ctx).unwrap();
            let mab = ab.to_matrix(&ctx).unwrap();
            let direct = ma.dot(&mb);
            let err = (&mab - &direct)
                .iter()
                .map(|z| z.norm())
                .fold(0.0f64, f64::max);
            assert!(err < 1e-12, "normal form disagrees with matrices: {err}");
        }
    }

    #[test]
    fn projections_multiply_to_deeper_projection() {
        let ctx = bernoulli_ctx(4);
        let e1 = AlgebraElement::from_term(GeneratorTerm::projection(space2(), 1));
        let e2 = AlgebraElement::from_term(GeneratorTerm::projection(space2(), 2));
        let prod = e1.multiply(&e2, &ctx).unwrap();
        assert_eq!(prod.terms().len(), 1);
        assert_eq!(prod.terms()[0].level(), 2);
        let m12 = prod.to_matrix(&ctx).unwrap();
        let m2 = e2.to_matrix(&ctx).unwrap();
        let err = (&m12 - &m2).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn adjoint_matches_weighted_transpose() {
        use rand::prelude::*;
        let ctx = bernoulli_ctx(3);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = random_element(space2(), &mut rng, 2, 2, 2).unwrap();
        let ma = a.to_matrix(&ctx).unwrap();
        let mstar = a.adjoint().to_matrix(&ctx).unwrap();
        let mu = ctx.measure().masses();
        let n = mu.len();
        let mut err = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expected = ma[[j, i]].conj() * mu[j] / mu[i];
                err = err.max((mstar[[i, j]] - expected).norm());
            }
        }
        assert!(err < 1e-12, "adjoint is not the μ-weighted transpose: {err}");
    }

    #[test]
    fn modular_flow_is_a_group() {
        let ctx = bernoulli_ctx(4);
        let h = Potential::from_values(space2(), 1, vec![1.0, 2.0]).unwrap();
        let term = GeneratorTerm::new(
            CylinderFunction::indicator(space2(), &Word::new(vec![1, 2], 2).unwrap()).unwrap(),
            2,
            CylinderFunction::indicator(space2(), &Word::new(vec![2], 2).unwrap()).unwrap(),
        )
        .unwrap();
        let a = AlgebraElement::from_term(term);

        let s = ModularFlow::at_real_time(h.clone(), 0.7).unwrap();
        let t = ModularFlow::at_real_time(h.clone(), -1.9).unwrap();
        let st = ModularFlow::at_real_time(h.clone(), 0.7 - 1.9).unwrap();
        let lhs = s.apply(&t.apply(&a).unwrap()).unwrap().to_matrix(&ctx).unwrap();
        let rhs = st.apply(&a).unwrap().to_matrix(&ctx).unwrap();
        let err = (&lhs - &rhs).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        assert!(err < 1e-13);

        // σ_0 = id
        let zero = ModularFlow::at_real_time(h, 0.0).unwrap();
        let fixed = zero.apply(&a).unwrap().to_matrix(&ctx).unwrap();
        let ma = a.to_matrix(&ctx).unwrap();
        let err = (&fixed - &ma).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        assert!(err < 1e-14);
    }

    #[test]
    fn flow_of_flat_potential_is_trivial_and_state_is_tracial() {
        // H ≡ 1: σ_t = id for all t, and ψ at any β is a trace
        let ctx = uniform_ctx(3);
        let h = Potential::one(space2());
        let psi = gibbs_functional(&ctx, &h, 1.3, 1e-13, DEFAULT_MAX_ITER).unwrap();
        let flow = ModularFlow::at_real_time(h.clone(), 2.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let a = random_element(space2(), &mut rng, 1, 2, 2).unwrap();
            let b = random_element(space2(), &mut rng, 1, 2, 2).unwrap();
            let moved = flow.apply(&a).unwrap().to_matrix(&ctx).unwrap();
            let still = a.to_matrix(&ctx).unwrap();
            let err = (&moved - &still).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            assert!(err < 1e-12);
            let ab = psi.evaluate(&a.multiply(&b, &ctx).unwrap()).unwrap();
            let ba = psi.evaluate(&b.multiply(&a, &ctx).unwrap()).unwrap();
            assert!((ab - ba).norm() < 1e-12, "trace property fails: {ab} vs {ba}");
        }
    }

    #[test]
    fn kms_identity_on_hand_example() {
        // k = 2, p uniform, H = (1, 2), β = 1, ν_1 = (2/3, 1/3):
        // a = e_1, b = M_{1_[1]} — worked through by hand
        let ctx = uniform_ctx(3);
        let h = Potential::from_values(space2(), 1, vec![1.0, 2.0]).unwrap();
        let psi = gibbs_functional(&ctx, &h, 1.0, 1e-13, DEFAULT_MAX_ITER).unwrap();
        let u = CylinderFunction::indicator(space2(), &Word::new(vec![1], 2).unwrap()).unwrap();
        let a = AlgebraElement::from_term(GeneratorTerm::projection(space2(), 1));
        let b = AlgebraElement::from_term(GeneratorTerm::multiplication(u.clone()));
        let r = kms_residual(&psi, &h, 1.0, &a, &b, &ctx).unwrap();
        assert!(r < 1e-13, "residual {r}");
        // and with a genuine two-sided term
        let a2 = AlgebraElement::from_term(GeneratorTerm::new(
            CylinderFunction::one(space2()),
            1,
            u,
        ).unwrap());
        let r2 = kms_residual(&psi, &h, 1.0, &a2, &AlgebraElement::identity(space2()), &ctx)
            .unwrap();
        assert!(r2 < 1e-13, "residual {r2}");
    }

    #[test]
    fn battery_passes_on_gibbs_state_and_rejects_perturbation() {
        let ctx = uniform_ctx(4);
        let h = Potential::from_values(space2(), 1, vec![1.0, 2.0]).unwrap();
        let beta = 1.0;
        let psi = gibbs_functional(&ctx, &h, beta, 1e-13, DEFAULT_MAX_ITER).unwrap();
        let report = kms_battery(&ctx, &h, beta, &psi, 2, 1e-8).unwrap();
        assert!(report.failures.is_empty(), "failures: {:?}", report.failures);
        assert!(report.max_residual < 1e-10, "max {}", report.max_residual);
        assert_eq!(report.pairs, (7 * 7 * 3) * (7 * 7 * 3));

        // moving 10% of the mass between the two depth-1 blocks breaks KMS
        let nu = psi.measure();
        let m1 = nu.marginal(1).unwrap().masses()[0];
        let shift = 0.1;
        let masses: Vec<f64> = nu
            .masses()
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                if i < nu.masses().len() / 2 {
                    m * (m1 - shift) / m1
                } else {
                    m * (1.0 - m1 + shift) / (1.0 - m1)
                }
            })
            .collect();
        let tampered = CylinderMeasure::from_masses(space2(), 4, masses).unwrap();
        let bad_psi = StateFunctional::new(tampered, ctx.jacobian().clone()).unwrap();
        let bad = kms_battery(&ctx, &h, beta, &bad_psi, 2, 1e-8).unwrap();
        assert!(
            bad.max_residual > 1e-4,
            "perturbed state should fail: {}",
            bad.max_residual
        );
        assert!(!bad.failures.is_empty());
    }

    #[test]
    fn relation_suite_is_exact_on_small_instance() {
        use rand::prelude::*;
        let ctx = bernoulli_ctx(4);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let f = random_cylinder_function(space2(), 2, &mut rng).unwrap();
        let g = random_cylinder_function(space2(), 2, &mut rng).unwrap();
        let report = relation_suite(&ctx, &f, &g, 2).unwrap();
        assert_eq!(report.checks.len(), 11);
        for check in &report.checks {
            assert!(
                check.residual < 1e-12,
                "{} residual {}",
                check.name,
                check.residual
            );
        }
    }

    #[test]
    fn relation_suite_rejects_overdeep_levels() {
        let ctx = bernoulli_ctx(3);
        let f = CylinderFunction::one(space2());
        // level 3 needs room for level 4 in the recursion check
        assert!(relation_suite(&ctx, &f, &f, 3).is_err());
        assert!(relation_suite(&ctx, &f, &f, 2).is_ok());
    }

    #[test]
    fn state_axioms_hold_for_gibbs_functional() {
        let ctx = uniform_ctx(4);
        let h = Potential::from_values(space2(), 1, vec![1.0, 2.0]).unwrap();
        let psi = gibbs_functional(&ctx, &h, 0.8, 1e-13, DEFAULT_MAX_ITER).unwrap();
        let report = state_axioms_check(&psi, &ctx, 50, 99).unwrap();
        assert_eq!(report.trials, 50);
        assert!(report.unit_residual < 1e-14);
        assert!(report.min_positivity > -1e-12, "ψ(aa*) went negative: {}", report.min_positivity);
        assert!(report.max_imaginary_part < 1e-12);
        assert!(report.max_hermitian_residual < 1e-12);
    }

    #[test]
    fn probe_fixes_the_eigenmeasure() {
        let space = space2();
        let p = Potential::uniform_jacobian(space);
        let h = Potential::from_values(space, 1, vec![1.0, 2.0]).unwrap();
        let beta = 1.0;
        let triple =
            leading_triple(&h.pow(-beta).unwrap(), 4, 1e-13, DEFAULT_MAX_ITER).unwrap();
        let steps =
            uniqueness_probe(&p, &h, beta, &triple.eigenmeasure, 4, 1e-13, DEFAULT_MAX_ITER)
                .unwrap();
        for step in &steps {
            assert!(
                step.tv_distance < 1e-12,
                "distance {} at level {}",
                step.tv_distance,
                step.level
            );
            assert!(
                (step.normalization - 1.0).abs() < 1e-12,
                "normalization {} at level {}",
                step.normalization,
                step.level
            );
        }
    }

    #[test]
    fn probe_converges_from_uniform_start() {
        let space = space2();
        let p = Potential::uniform_jacobian(space);
        let h = Potential::from_values(space, 1, vec![1.0, 2.0]).unwrap();
        let rho0 = CylinderMeasure::uniform(space, 4).unwrap();
        let steps =
            uniqueness_probe(&p, &h, 1.0, &rho0, 4, 1e-13, DEFAULT_MAX_ITER).unwrap();
        assert!(steps[0].tv_distance > 0.05, "uniform start is not ν_β");
        // depth-1 weights collapse the probe onto ν_β after depth steps
        assert!(
            steps[4].tv_distance < 1e-12,
            "final distance {}",
            steps[4].tv_distance
        );
        for pair in steps.windows(2) {
            assert!(pair[1].tv_distance <= pair[0].tv_distance + 1e-12);
        }
    }
}
