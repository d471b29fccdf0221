//! The Ruelle transfer operator and its leading spectral data.
//!
//! For a strictly positive weight w (think w = e^A for a potential A, or
//! w = H^{-β} for an inverse temperature β) the operator acts on functions by
//!
//! ```text
//! (L_w f)(x) = Σ_{T z = x} w(z) f(z) = Σ_{i=1..k} w(i·x) f(i·x).
//! ```
//!
//! On depth-D cylinder functions this is an exact k^D × k^D matrix, and
//! applying L_w to a depth-d table produces a depth-(d−1) table: the operator
//! gains one coordinate of smoothing per application. The leading eigenvalue
//! λ, the positive eigenfunction h (L_w h = λh) and the eigenmeasure ν
//! (L_w*ν = λν, normalized so ν(X) = 1 and ∫h dν = 1) are produced by plain
//! power iteration — dense eigensolvers appear only as test oracles.
//!
//! All iteration is single-threaded with a fixed summation order, so results
//! are bit-for-bit reproducible for identical inputs.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gibbs::CylinderMeasure;
use crate::shift::{branch_prefix_index, CylinderFunction, Potential};

/// Default relative residual at which power iteration stops.
pub const DEFAULT_POWER_TOL: f64 = 1e-12;
/// Default iteration budget for the power method.
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// One application of the transfer operator with weight `weight`:
/// (L f)(x) = Σ_i weight(i·x)·f(i·x).
///
/// The result depends on one coordinate fewer than the deeper of the two
/// inputs and is returned at that reduced depth (never padded).
pub fn ruelle_apply(weight: &Potential, f: &CylinderFunction) -> Result<CylinderFunction> {
    if weight.space().symbol_count() != f.space().symbol_count() {
        return Err(Error::SymbolMismatch(
            weight.space().symbol_count(),
            f.space().symbol_count(),
        ));
    }
    let k = f.space().symbol_count();
    let out_depth = weight.depth().max(f.depth()).saturating_sub(1);
    let n = f.space().basis_size(out_depth)?;
    let wv = weight.values();
    let fv = f.values();
    let mut values = Vec::with_capacity(n);
    for x in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            let wi = branch_prefix_index(i, x, out_depth, weight.depth(), k);
            let fi = branch_prefix_index(i, x, out_depth, f.depth(), k);
            acc += fv[fi] * wv[wi];
        }
        values.push(acc);
    }
    CylinderFunction::from_values(f.space(), out_depth, values)
}

/// Real-valued variant of [`ruelle_apply`].
pub fn ruelle_apply_real(weight: &Potential, f: &Potential) -> Result<Potential> {
    if weight.space().symbol_count() != f.space().symbol_count() {
        return Err(Error::SymbolMismatch(
            weight.space().symbol_count(),
            f.space().symbol_count(),
        ));
    }
    let k = f.space().symbol_count();
    let out_depth = weight.depth().max(f.depth()).saturating_sub(1);
    let n = f.space().basis_size(out_depth)?;
    let wv = weight.values();
    let fv = f.values();
    let mut values = Vec::with_capacity(n);
    for x in 0..n {
        let mut acc = 0.0;
        for i in 1..=k {
            let wi = branch_prefix_index(i, x, out_depth, weight.depth(), k);
            let fi = branch_prefix_index(i, x, out_depth, f.depth(), k);
            acc += fv[fi] * wv[wi];
        }
        values.push(acc);
    }
    Potential::from_values(f.space(), out_depth, values)
}

/// The transfer operator restricted to depth-`depth` tables, as a dense
/// matrix in the canonical cylinder basis (row = output word, column = input
/// word).
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    weight: Potential,
    depth: usize,
    entries: Array2<f64>,
}

impl TransferMatrix {
    pub fn weight(&self) -> &Potential {
        &self.weight
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    /// L_w as a matrix-vector product. The k nonzero columns of each row
    /// are accumulated in branch order, so rows indexing the same depth-
    /// (D−1) prefix produce bitwise-identical sums — iterates of a
    /// shallow weight stay exactly block-constant and compress losslessly.
    pub fn matvec(&self, v: &Array1<f64>) -> Array1<f64> {
        let k = self.weight.space().symbol_count();
        let n = self.entries.nrows();
        let stride = n / k;
        let mut out = Array1::zeros(n);
        for x in 0..n {
            let mut acc = 0.0;
            for i in 1..=k {
                let col = (i - 1) * stride + x / k;
                acc += self.entries[[x, col]] * v[col];
            }
            out[x] = acc;
        }
        out
    }

    /// The dual action on densities, scattering along the same sparse
    /// branch structure.
    pub fn transpose_matvec(&self, v: &Array1<f64>) -> Array1<f64> {
        let k = self.weight.space().symbol_count();
        let n = self.entries.nrows();
        let stride = n / k;
        let mut out = Array1::zeros(n);
        for x in 0..n {
            for i in 1..=k {
                let col = (i - 1) * stride + x / k;
                out[col] += self.entries[[x, col]] * v[x];
            }
        }
        out
    }
}

/// Assemble the depth-D matrix of L_w. Requires D ≥ 1 and D ≥ depth(w) − 1,
/// so every weight lookup w(i·x) is resolved by the D+1 available symbols.
pub fn build_transfer_matrix(weight: &Potential, depth: usize) -> Result<TransferMatrix> {
    if depth == 0 || depth + 1 < weight.depth() {
        return Err(Error::Domain(format!(
            "transfer matrix needs depth ≥ max(1, {} - 1), got {}",
            weight.depth(),
            depth
        )));
    }
    let k = weight.space().symbol_count();
    let n = weight.space().basis_size(depth)?;
    let stride = n / k; // k^{depth-1}
    let wv = weight.values();
    let mut entries = Array2::<f64>::zeros((n, n));
    for x in 0..n {
        for i in 1..=k {
            // the column is the depth-D prefix of i·x, the weight is w(i·x)
            let col = (i - 1) * stride + x / k;
            let wi = branch_prefix_index(i, x, depth, weight.depth(), k);
            entries[[x, col]] = wv[wi];
        }
    }
    Ok(TransferMatrix {
        weight: weight.clone(),
        depth,
        entries,
    })
}

/// Leading eigendata of a transfer matrix: λ, the positive eigenfunction h
/// with ∫h dν = 1, and the eigenprobability ν with L*ν = λν.
#[derive(Clone, Debug)]
pub struct SpectralTriple {
    pub eigenvalue: f64,
    pub eigenfunction: Potential,
    pub eigenmeasure: CylinderMeasure,
    /// power-iteration steps used (the larger of the two one-sided counts)
    pub iterations: usize,
    /// final relative residual (the larger of the two one-sided residuals)
    pub residual: f64,
}

enum StopRule {
    /// ‖Mv − λv‖_∞ / ‖v‖_∞ ≤ tol — used for the eigenfunction.
    SupRelative,
    /// ‖Mv − λv‖₁ ≤ tol for v normalized to Σv = 1 — used for the measure.
    L1,
}

fn power_iterate(
    matvec: impl Fn(&Array1<f64>) -> Array1<f64>,
    n: usize,
    stop: StopRule,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, Array1<f64>, usize, f64)> {
    let mut v = Array1::from_elem(n, 1.0 / n as f64);
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        let w = matvec(&v);
        let lambda = w.sum(); // ratio of iterates: Σ(Mv)/Σv with Σv = 1
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "power iteration left the positive cone (λ estimate {lambda})"
            )));
        }
        residual = match stop {
            StopRule::SupRelative => {
                let num = v
                    .iter()
                    .zip(w.iter())
                    .map(|(vi, wi)| (wi - lambda * vi).abs())
                    .fold(0.0f64, f64::max);
                let den = v.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
                num / den
            }
            StopRule::L1 => v
                .iter()
                .zip(w.iter())
                .map(|(vi, wi)| (wi - lambda * vi).abs())
                .sum(),
        };
        v = w / lambda;
        if residual <= tol {
            return Ok((lambda, v, iter, residual));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Compute the leading triple (λ, h, ν) of L_w on depth-`depth` tables by
/// power iteration, stopping at relative residual `tol` (measure side: ℓ¹
/// residual). The weight must be strictly positive.
pub fn leading_triple(
    weight: &Potential,
    depth: usize,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralTriple> {
    weight.require_positive()?;
    let matrix = build_transfer_matrix(weight, depth)?;
    let n = matrix.entries.nrows();
    let (lambda, h_vec, it_r, res_r) = power_iterate(
        |v| matrix.matvec(v),
        n,
        StopRule::SupRelative,
        tol,
        max_iter,
    )?;
    let (lambda_l, nu_vec, it_l, res_l) =
        power_iterate(|v| matrix.transpose_matvec(v), n, StopRule::L1, tol, max_iter)?;
    // both iterations estimate the same Perron eigenvalue
    let agreement = (lambda - lambda_l).abs() / lambda.max(1.0);
    if agreement > 1e3 * tol.max(1e-15) {
        return Err(Error::NoConvergence {
            iterations: it_r.max(it_l),
            residual: agreement,
        });
    }

    let masses: Vec<f64> = {
        let total: f64 = nu_vec.sum();
        nu_vec.iter().map(|m| m / total).collect()
    };
    let eigenmeasure = CylinderMeasure::from_masses(weight.space(), depth, masses)?;

    // normalize ∫ h dν = 1
    let pairing: f64 = h_vec
        .iter()
        .zip(eigenmeasure.masses())
        .map(|(h, m)| h * m)
        .sum();
    let h_values: Vec<f64> = h_vec.iter().map(|h| h / pairing).collect();
    let eigenfunction = Potential::from_values(weight.space(), depth, h_values)?;
    eigenfunction.require_positive()?;

    Ok(SpectralTriple {
        eigenvalue: lambda,
        eigenfunction,
        eigenmeasure,
        iterations: it_r.max(it_l),
        residual: res_r.max(res_l),
    })
}

/// Replace a strictly positive weight by its normalized version
///
/// ```text
/// p = w·h / (λ·(h∘T)),
/// ```
///
/// which satisfies L_p 1 = 1 and generates the same equilibrium theory.
/// The output is compressed to its natural depth (at most depth(w) for
/// depth(w) ≥ 1). `depth` is the table depth used for the spectral solve.
pub fn normalize_potential(
    weight: &Potential,
    depth: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Potential> {
    let triple = leading_triple(weight, depth, tol, max_iter)?;
    let h = triple.eigenfunction.compress();
    let h_shift = h.compose_shift()?;
    let numerator = weight.try_mul(&h)?;
    let denominator = h_shift.scale(triple.eigenvalue)?.recip()?;
    Ok(numerator.try_mul(&denominator)?.compress())
}

/// Topological pressure P(β) = log λ(H^{-β}) of the potential −β·log H.
///
/// `h` is the strictly positive potential H; the transfer weight is H^{-β}.
pub fn pressure(h: &Potential, beta: f64, depth: usize, tol: f64) -> Result<f64> {
    let weight = h.pow(-beta)?;
    let triple = leading_triple(&weight, depth, tol, DEFAULT_MAX_ITER)?;
    Ok(triple.eigenvalue.ln())
}

/// Pressure along a β grid: rows (β, P(β), λ(β)).
pub fn pressure_curve(
    h: &Potential,
    betas: &[f64],
    depth: usize,
    tol: f64,
) -> Result<Vec<(f64, f64, f64)>> {
    betas
        .iter()
        .map(|&beta| {
            let weight = h.pow(-beta)?;
            let triple = leading_triple(&weight, depth, tol, DEFAULT_MAX_ITER)?;
            Ok((beta, triple.eigenvalue.ln(), triple.eigenvalue))
        })
        .collect()
}

/// Sup-norm errors ‖L^n f / λ^n − h·∫f dν‖_∞ for n = 0,…,n_max, measured on
/// the depth-`depth` basis. The decay rate of this sequence estimates the
/// spectral gap of the depth-D matrix.
pub fn convergence_profile(
    h: &Potential,
    beta: f64,
    f: &CylinderFunction,
    depth: usize,
    n_max: usize,
    tol: f64,
) -> Result<Vec<(usize, f64)>> {
    if f.depth() > depth {
        return Err(Error::MeasureDepth {
            measure: depth,
            function: f.depth(),
        });
    }
    let weight = h.pow(-beta)?;
    let triple = leading_triple(&weight, depth, tol, DEFAULT_MAX_ITER)?;
    let integral = triple.eigenmeasure.integrate(f)?;
    let limit = triple
        .eigenfunction
        .to_complex()
        .scale(integral)
        .lift(depth)?;
    let mut profile = Vec::with_capacity(n_max + 1);
    let mut g = f.clone();
    for n in 0..=n_max {
        let err = g.lift(depth)?.sup_distance(&limit)?;
        profile.push((n, err));
        if n < n_max {
            g = ruelle_apply(&weight, &g)?.scale(Complex64::new(1.0 / triple.eigenvalue, 0.0));
        }
    }
    Ok(profile)
}

/// Geometric decay ratio fitted to a convergence profile: the mean of the
/// successive error ratios over the steps where the error is still resolved.
/// Returns `None` when fewer than one resolved step exists.
pub fn decay_ratio(profile: &[(usize, f64)]) -> Option<f64> {
    let floor = profile
        .iter()
        .map(|&(_, e)| e)
        .fold(0.0f64, f64::max)
        .max(1.0)
        * 1e-14;
    let mut ratios = Vec::new();
    for pair in profile.windows(2) {
        let (e0, e1) = (pair[0].1, pair[1].1);
        if e0 > floor {
            ratios.push(e1 / e0);
        }
    }
    if ratios.is_empty() {
        None
    } else {
        Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
    }
}
