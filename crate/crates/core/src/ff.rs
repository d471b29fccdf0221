//! A renewal model on two symbols with polynomial return times, where every
//! spectral object has a closed form.
//!
//! Partition the 2-symbol shift by the first passage to the symbol 2: the
//! atom B_t = [1…1 2] (t ones, then a two) for t = 0, 1, 2, …. The shift
//! maps B_t onto B_{t-1} for t ≥ 1 and B_0 onto everything, so a potential
//! that is constant on atoms generates a renewal process. This module uses
//! the log-weights
//!
//! ```text
//! a_0 = −log ζ(γ),   a_t = γ·(log t − log(t+1))   (t ≥ 1),   γ > 2,
//! ```
//!
//! whose partial sums s_t = a_0 + … + a_t give atom masses
//! ν(B_t) = e^{s_t} = (t+1)^{-γ}/ζ(γ) summing exactly to one: ν is the
//! eigenmeasure of the transfer operator with eigenvalue 1. The
//! eigenfunction h̃_t = ν(B_t)^{-1}·Σ_{i≥t}ν(B_i) is unbounded
//! (h̃_t ~ t/(γ−1)), the invariant measure is μ̃(B_t) = u·Σ_{i≥t}ν(B_i)
//! with u = ζ(γ)/ζ(γ−1), and the pressure of β times the potential solves
//! the renewal equation
//!
//! ```text
//! Σ_{t≥0} e^{β·s_t} · e^{-(t+1)·P} = 1       (P = 0 once the sum at P = 0
//!                                             drops below 1, i.e. all β ≥ 1).
//! ```
//!
//! At β = 1 the pressure hits its zero plateau and two distinct invariant
//! measures realize the supremum in the variational principle: μ̃ and the
//! point mass at the fixed point 1∞ — a genuine phase transition, which is
//! also where the associated KMS structure degenerates.
//!
//! Everything is evaluated from truncated series with Euler–Maclaurin tail
//! corrections; the truncation point and target accuracy are tied together
//! by [`FfParams::validate`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shift::{Potential, ShiftSpace};

/// Σ_{n > n_last} n^{-s} by Euler–Maclaurin (four terms; the error is
/// O(n_last^{-s-5})).
fn power_tail(n_last: f64, s: f64) -> f64 {
    let m = n_last + 1.0;
    m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s) + s * m.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * m.powf(-s - 3.0) / 720.0
}

/// Σ_{n > n_last} n^{-s}·log n by Euler–Maclaurin.
fn log_power_tail(n_last: f64, s: f64) -> f64 {
    let m = n_last + 1.0;
    let lm = m.ln();
    m.powf(1.0 - s) * (lm / (s - 1.0) + 1.0 / ((s - 1.0) * (s - 1.0)))
        + 0.5 * m.powf(-s) * lm
        + m.powf(-s - 1.0) * (s * lm - 1.0) / 12.0
}

/// ζ(s) from `terms` direct summands plus an Euler–Maclaurin tail.
/// Requires s > 1 (the series diverges otherwise) and terms ≥ 16.
pub fn zeta_truncated(s: f64, terms: usize) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::SeriesDiverges(s));
    }
    if terms < 16 {
        return Err(Error::Domain(format!(
            "zeta needs at least 16 direct terms, got {terms}"
        )));
    }
    let head: f64 = (1..=terms).map(|n| (n as f64).powf(-s)).sum();
    Ok(head + power_tail(terms as f64, s))
}

/// ζ(s) at the default working precision (256 direct terms; the tail
/// formula leaves an error far below double rounding for s ≥ 1 + 1e-3).
pub fn zeta(s: f64) -> Result<f64> {
    zeta_truncated(s, 256)
}

/// Parameters of the renewal model: the return-time exponent γ, the atom
/// truncation index, and the target tail accuracy.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FfParams {
    /// polynomial decay exponent of the atom masses; must exceed 2 so that
    /// the invariant measure has finite normalization
    pub gamma: f64,
    /// atoms B_0 … B_{k_max} are tabulated; deeper atoms live in the
    /// analytic tail
    pub k_max: usize,
    /// admissible truncation error; validation enforces
    /// (k_max+1)^{1-γ}/(γ-1) ≤ tol
    pub tol: f64,
}

impl Default for FfParams {
    fn default() -> Self {
        Self {
            gamma: 3.0,
            k_max: 100_000,
            tol: 1e-10,
        }
    }
}

impl FfParams {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || self.gamma <= 2.0 {
            return Err(Error::Config(format!(
                "return-time exponent must exceed 2 (got {}): the invariant \
                 measure needs Σ t·ν(B_t) < ∞",
                self.gamma
            )));
        }
        if self.k_max < 8 {
            return Err(Error::Config(format!(
                "k_max = {} is too small to resolve the model",
                self.k_max
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        let bound = ((self.k_max + 1) as f64).powf(1.0 - self.gamma) / (self.gamma - 1.0);
        if bound > self.tol {
            return Err(Error::Config(format!(
                "truncating at k_max = {} leaves a mass tail ≈ {bound:.3e} above \
                 tol = {:.3e}; raise k_max or loosen tol",
                self.k_max, self.tol
            )));
        }
        Ok(())
    }
}

/// A function that is constant on each renewal atom: explicit values on
/// B_0 … B_{len-1} and a single limiting value on every deeper atom.
#[derive(Clone, Debug)]
pub struct AtomFunction {
    values: Vec<f64>,
    tail: f64,
}

impl AtomFunction {
    pub fn new(values: Vec<f64>, tail: f64) -> Self {
        Self { values, tail }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            values: Vec::new(),
            tail: c,
        }
    }

    /// The indicator of a single atom B_t.
    pub fn indicator(t: usize) -> Self {
        let mut values = vec![0.0; t + 1];
        values[t] = 1.0;
        Self { values, tail: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tail_value(&self) -> f64 {
        self.tail
    }

    pub fn value_at(&self, t: usize) -> f64 {
        self.values.get(t).copied().unwrap_or(self.tail)
    }
}

/// Summary of the phase transition at β = 1: two distinct invariant
/// measures both attain the (zero) pressure in the variational principle.
#[derive(Clone, Copy, Debug)]
pub struct TwoEquilibria {
    /// P(1) — zero, the start of the plateau
    pub pressure_at_one: f64,
    /// entropy of the renewal equilibrium μ̃
    pub gibbs_entropy: f64,
    /// ∫ (log-weight) dμ̃ — strictly negative
    pub gibbs_energy: f64,
    /// entropy + energy for μ̃ (must equal the pressure)
    pub gibbs_value: f64,
    /// entropy + energy for the point mass at 1∞ (identically zero)
    pub delta_value: f64,
}

/// The tabulated renewal model.
#[derive(Clone, Debug)]
pub struct FfModel {
    params: FfParams,
    zeta_gamma: f64,
    zeta_gamma_minus_1: f64,
    u: f64,
    /// a_t, the log-weight on atom B_t
    log_weights: Vec<f64>,
    /// ν(B_t)
    nu: Vec<f64>,
    /// Σ_{i≥t} ν(B_i), tail-corrected
    nu_tail: Vec<f64>,
    /// Σ_{t>k_max} ν(B_t)
    mass_deficit: f64,
}

impl FfModel {
    pub fn new(params: FfParams) -> Result<Self> {
        params.validate()?;
        let gamma = params.gamma;
        let k_max = params.k_max;
        let zeta_gamma = zeta(gamma)?;
        let zeta_gamma_minus_1 = zeta(gamma - 1.0)?;
        let u = zeta_gamma / zeta_gamma_minus_1;

        let mut nu = Vec::with_capacity(k_max + 1);
        let mut log_weights = Vec::with_capacity(k_max + 1);
        log_weights.push(-zeta_gamma.ln());
        for t in 0..=k_max {
            nu.push(((t + 1) as f64).powf(-gamma) / zeta_gamma);
            if t >= 1 {
                // a_t = γ·ln(t/(t+1)) = −γ·ln(1 + 1/t); the ln_1p form keeps
                // full relative accuracy where the two logs nearly cancel
                log_weights.push(-gamma * (1.0 / t as f64).ln_1p());
            }
        }
        let mass_deficit = power_tail((k_max + 1) as f64, gamma) / zeta_gamma;
        let mut nu_tail = vec![0.0; k_max + 1];
        let mut acc = mass_deficit;
        for t in (0..=k_max).rev() {
            acc += nu[t];
            nu_tail[t] = acc;
        }

        Ok(Self {
            params,
            zeta_gamma,
            zeta_gamma_minus_1,
            u,
            log_weights,
            nu,
            nu_tail,
            mass_deficit,
        })
    }

    pub fn params(&self) -> FfParams {
        self.params
    }

    pub fn zeta_gamma(&self) -> f64 {
        self.zeta_gamma
    }

    pub fn zeta_gamma_minus_1(&self) -> f64 {
        self.zeta_gamma_minus_1
    }

    /// The normalization u = ζ(γ)/ζ(γ−1) of the invariant measure.
    pub fn normalization(&self) -> f64 {
        self.u
    }

    /// Mass not resolved by the tabulated atoms: Σ_{t>k_max} ν(B_t).
    pub fn mass_deficit(&self) -> f64 {
        self.mass_deficit
    }

    fn check_atom(&self, t: usize) -> Result<()> {
        if t > self.params.k_max {
            return Err(Error::AtomTable {
                got: t,
                max: self.params.k_max,
            });
        }
        Ok(())
    }

    /// The log-weight a_t on atom B_t.
    pub fn log_weight(&self, t: usize) -> Result<f64> {
        self.check_atom(t)?;
        Ok(self.log_weights[t])
    }

    /// The partial sum s_t = a_0 + … + a_t = −log ζ(γ) − γ·log(t+1).
    pub fn log_weight_sum(&self, t: usize) -> f64 {
        -self.zeta_gamma.ln() - self.params.gamma * ((t + 1) as f64).ln()
    }

    /// The flow Hamiltonian H = e^{−a} on atom B_t: H_0 = ζ(γ) and
    /// H_t = ((t+1)/t)^γ ↓ 1.
    pub fn hamiltonian(&self, t: usize) -> Result<f64> {
        Ok((-self.log_weight(t)?).exp())
    }

    /// ν(B_t) = (t+1)^{-γ}/ζ(γ).
    pub fn atom_mass(&self, t: usize) -> Result<f64> {
        self.check_atom(t)?;
        Ok(self.nu[t])
    }

    /// Σ_{i≥t} ν(B_i); beyond the table the analytic tail is used.
    pub fn tail_mass(&self, t: usize) -> f64 {
        if t <= self.params.k_max {
            self.nu_tail[t]
        } else {
            power_tail(t as f64, self.params.gamma) / self.zeta_gamma
        }
    }

    /// The eigenfunction h̃_t = ν(B_t)^{-1}·Σ_{i≥t}ν(B_i) (unbounded,
    /// h̃_t ~ t/(γ−1)).
    pub fn eigenfunction(&self, t: usize) -> Result<f64> {
        self.check_atom(t)?;
        Ok(self.nu_tail[t] / self.nu[t])
    }

    /// The invariant-measure mass μ̃(B_t) = u·Σ_{i≥t}ν(B_i).
    pub fn invariant_mass(&self, t: usize) -> Result<f64> {
        self.check_atom(t)?;
        Ok(self.u * self.nu_tail[t])
    }

    /// ν of the cylinder specified by a word of consecutive atoms:
    /// the atoms are independent under ν, so the mass is Π ν(B_{t_j}).
    pub fn cylinder_mass(&self, atoms: &[usize]) -> Result<f64> {
        let mut mass = 1.0;
        for &t in atoms {
            self.check_atom(t)?;
            mass *= self.nu[t];
        }
        Ok(mass)
    }

    /// Largest relative defect of the eigenvalue-1 identity
    /// e^{a_0}·h̃_0 + e^{a_{t+1}}·h̃_{t+1} = h̃_t over the table.
    pub fn eigen_identity_residual(&self) -> f64 {
        let base = self.log_weights[0].exp() * self.nu_tail[0] / self.nu[0];
        let mut worst = 0.0f64;
        for t in 0..self.params.k_max {
            let here = self.nu_tail[t] / self.nu[t];
            let next = self.log_weights[t + 1].exp() * self.nu_tail[t + 1] / self.nu[t + 1];
            worst = worst.max((base + next - here).abs() / here);
        }
        worst
    }

    /// The normalization u by its two routes: ζ(γ)/ζ(γ−1) and
    /// 1/Σ_t (t+1)·ν(B_t).
    pub fn normalization_routes(&self) -> (f64, f64) {
        let gamma = self.params.gamma;
        let k_max = self.params.k_max;
        // Σ (t+1)ν(B_t) = Σ_{n≤k_max+1} n^{1-γ}/ζ(γ) + tail
        let head: f64 = self.nu.iter().enumerate().map(|(t, &m)| (t + 1) as f64 * m).sum();
        let tail = power_tail((k_max + 1) as f64, gamma - 1.0) / self.zeta_gamma;
        (self.u, 1.0 / (head + tail))
    }

    /// ∫(log-weight) dμ̃ = Σ_t a_t·μ̃(B_t), tail-corrected; strictly
    /// negative.
    pub fn energy(&self) -> f64 {
        let gamma = self.params.gamma;
        let k_max = self.params.k_max;
        let mut sum: f64 = (0..=k_max)
            .map(|t| self.log_weights[t] * self.u * self.nu_tail[t])
            .sum();
        // extend with closed forms, then a final analytic remainder
        let far = 4 * k_max;
        for t in (k_max + 1)..=far {
            let a = -gamma * (1.0 / t as f64).ln_1p();
            sum += a * self.u * self.tail_mass(t);
        }
        // beyond `far`: a_t ≈ −γ/(t+½), Σν tail ≈ (t+1)^{1-γ}/((γ−1)ζ)
        let remainder = -gamma * self.u / ((gamma - 1.0) * self.zeta_gamma)
            * power_tail(far as f64 + 0.75, gamma);
        sum + remainder
    }

    /// Entropy of μ̃ by the return-time formula: h(μ̃) = −u·Σ_t s_t·ν(B_t)
    /// (the per-renewal entropy of the independent atom sequence, divided
    /// by the mean return time).
    pub fn entropy(&self) -> f64 {
        let gamma = self.params.gamma;
        let k_max = self.params.k_max;
        let lz = self.zeta_gamma.ln();
        let mut sum: f64 = (0..=k_max)
            .map(|t| self.log_weight_sum(t) * self.nu[t])
            .sum();
        let far = 4 * k_max;
        for t in (k_max + 1)..=far {
            let s_t = -lz - gamma * ((t + 1) as f64).ln();
            sum += s_t * ((t + 1) as f64).powf(-gamma) / self.zeta_gamma;
        }
        // Σ_{t>far} s_t ν_t = −(log ζ·Σ n^{-γ} + γ·Σ n^{-γ} log n)/ζ over n > far+1
        let n_last = (far + 1) as f64;
        let rem = -(lz * power_tail(n_last, gamma) + gamma * log_power_tail(n_last, gamma))
            / self.zeta_gamma;
        -self.u * (sum + rem)
    }

    /// The two invariant measures attaining the pressure at β = 1.
    pub fn equilibrium_pair(&self) -> Result<TwoEquilibria> {
        let entropy = self.entropy();
        let energy = self.energy();
        Ok(TwoEquilibria {
            pressure_at_one: self.pressure(1.0)?,
            gibbs_entropy: entropy,
            gibbs_energy: energy,
            gibbs_value: entropy + energy,
            delta_value: 0.0,
        })
    }

    /// The renewal sum Σ_t e^{β·s_t}·ρ^{t+1} at ρ = e^{-P}, with a damped
    /// polynomial tail beyond the table. `coeffs` must hold e^{β·s_t}.
    fn renewal_series(&self, beta: f64, coeffs: &[f64], pressure: f64) -> f64 {
        let rho = (-pressure).exp();
        let mut sum = 0.0;
        let mut rp = rho;
        for &c in coeffs {
            sum += c * rp;
            rp *= rho;
            if rp == 0.0 {
                return sum;
            }
        }
        if sum > 1.0 {
            return sum; // already bracketed; the tail only adds more
        }
        let bg = beta * self.params.gamma;
        let k_max = self.params.k_max as f64;
        let c_next = (k_max + 2.0).powf(-bg) / self.zeta_gamma.powf(beta);
        let ratio = ((k_max + 3.0) / (k_max + 2.0)).powf(-bg);
        let denom = 1.0 - rho * ratio;
        if denom <= 0.0 {
            return f64::INFINITY;
        }
        sum + c_next * rp / denom
    }

    /// Topological pressure P(β): the unique root of the renewal equation,
    /// or exactly 0 once the equation's value at P = 0 is ≤ 1 (all β ≥ 1).
    pub fn pressure(&self, beta: f64) -> Result<f64> {
        if !beta.is_finite() {
            return Err(Error::Domain(format!("inverse temperature {beta}")));
        }
        let gamma = self.params.gamma;
        // value at P = 0 decides the plateau
        if beta * gamma > 1.0 {
            let at_zero = zeta(beta * gamma)? / self.zeta_gamma.powf(beta);
            if at_zero <= 1.0 {
                return Ok(0.0);
            }
        }
        let zb = self.zeta_gamma.powf(beta);
        let coeffs: Vec<f64> = (0..=self.params.k_max)
            .map(|t| ((t + 1) as f64).powf(-beta * gamma) / zb)
            .collect();
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut guard = 0;
        while self.renewal_series(beta, &coeffs, hi) > 1.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 64 {
                return Err(Error::NoConvergence {
                    iterations: guard,
                    residual: hi,
                });
            }
        }
        for _ in 0..200 {
            if hi - lo <= 1e-15 * hi.max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.renewal_series(beta, &coeffs, mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Pressure along a β grid: rows (β, P(β)).
    pub fn pressure_curve(&self, betas: &[f64]) -> Result<Vec<(f64, f64)>> {
        betas.iter().map(|&b| Ok((b, self.pressure(b)?))).collect()
    }

    /// The KMS-state value ψ(M_f e_n M_g) = 2^{-n}·∫ f·g dν for functions
    /// constant on atoms (the reference weight is the coin-flip Jacobian
    /// 1/2, so the level cocycle is exactly 2^{-n}).
    pub fn kms_value(&self, f: &AtomFunction, level: usize, g: &AtomFunction) -> Result<f64> {
        let k_max = self.params.k_max;
        if f.len() > k_max + 1 || g.len() > k_max + 1 {
            return Err(Error::AtomTable {
                got: f.len().max(g.len()),
                max: k_max + 1,
            });
        }
        let mut dot = 0.0;
        for t in 0..=k_max {
            dot += f.value_at(t) * g.value_at(t) * self.nu[t];
        }
        dot += f.tail_value() * g.tail_value() * self.mass_deficit;
        Ok(0.5f64.powi(level as i32) * dot)
    }

    /// The depth-d cylinder approximation of the renewal weight on the
    /// 2-symbol shift: e^{a_t} on words with t < d leading ones, and the
    /// fixed-point value 1 on the unresolved word 1^d. Its leading
    /// eigenvalue decreases to 1 as d grows.
    pub fn surrogate_potential(&self, depth: usize) -> Result<Potential> {
        if depth == 0 {
            return Err(Error::Domain(
                "the surrogate needs depth ≥ 1 to see the first symbol".into(),
            ));
        }
        if depth > self.params.k_max {
            return Err(Error::AtomTable {
                got: depth,
                max: self.params.k_max,
            });
        }
        let space = ShiftSpace::new(2)?;
        let size = space.basis_size(depth)?;
        let mut values = vec![0.0; size];
        for (x, slot) in values.iter_mut().enumerate() {
            let symbols = crate::shift::decode(x, depth, 2);
            let ones = symbols.iter().take_while(|&&s| s == 1).count();
            *slot = if ones == depth {
                1.0
            } else {
                self.log_weights[ones].exp()
            };
        }
        Potential::from_values(space, depth, values)
    }
}
