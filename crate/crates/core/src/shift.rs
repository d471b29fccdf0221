//! Cylinder functions on the one-sided full shift.
//!
//! The space is X = {1,…,k}^ℕ with the left shift T(x₀x₁x₂…) = x₁x₂… .
//! A *depth-d* function is one that depends only on the first d coordinates;
//! it is stored as a table of k^d values indexed by the depth-d words in
//! lexicographic order. All of the operator calculus in this crate reduces to
//! exact finite arithmetic on such tables, so depths are bookkept carefully:
//! results are stored at their natural (reduced) depth and lifted on demand.
//!
//! Two table types are provided: [`CylinderFunction`] holds complex values
//! (test functions, algebra coefficients), [`Potential`] holds real values
//! and tracks strict positivity (weights, Jacobians, flow potentials).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The one-sided full shift on k symbols, written 1,…,k.
///
/// Carries the symbol count and a cap on table sizes so that a typo in a
/// depth argument fails fast instead of allocating gigabytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftSpace {
    k: usize,
    basis_cap: usize,
}

/// Default cap on k^d table entries.
pub const DEFAULT_BASIS_CAP: usize = 250_000;

impl ShiftSpace {
    pub fn new(k: usize) -> Result<Self> {
        Self::with_basis_cap(k, DEFAULT_BASIS_CAP)
    }

    pub fn with_basis_cap(k: usize, basis_cap: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::SymbolCount(k));
        }
        Ok(ShiftSpace { k, basis_cap })
    }

    pub fn symbol_count(&self) -> usize {
        self.k
    }

    /// Topological entropy of the shift, log k.
    pub fn entropy(&self) -> f64 {
        (self.k as f64).ln()
    }

    /// Number of depth-`depth` cylinders, k^depth, guarded by the cap.
    pub fn basis_size(&self, depth: usize) -> Result<usize> {
        let mut size: u128 = 1;
        for _ in 0..depth {
            size *= self.k as u128;
            if size > self.basis_cap as u128 {
                return Err(Error::BasisTooLarge {
                    depth,
                    size,
                    cap: self.basis_cap,
                });
            }
        }
        Ok(size as usize)
    }

    /// All depth-`depth` words in lexicographic (canonical) order.
    pub fn enumerate_cylinders(&self, depth: usize) -> Result<Vec<Word>> {
        let n = self.basis_size(depth)?;
        Ok((0..n).map(|i| Word::from_index(self.k, depth, i)).collect())
    }

    fn check_compatible(&self, other: &ShiftSpace) -> Result<()> {
        if self.k != other.k {
            return Err(Error::SymbolMismatch(self.k, other.k));
        }
        Ok(())
    }
}

/// A finite word over the symbols 1,…,k. Indexes a cylinder set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    symbols: Vec<u32>,
}

impl Word {
    pub fn new(symbols: Vec<u32>, k: usize) -> Result<Self> {
        for &s in &symbols {
            if s < 1 || s as usize > k {
                return Err(Error::BadSymbol(s, k));
            }
        }
        Ok(Word { symbols })
    }

    pub fn empty() -> Self {
        Word { symbols: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// Canonical rank among depth-d words: the base-k number with digits
    /// (symbol − 1), most significant first. Lexicographic order ⇔ rank order.
    pub fn index(&self, k: usize) -> usize {
        encode(&self.symbols, k)
    }

    /// Inverse of [`Word::index`].
    pub fn from_index(k: usize, depth: usize, index: usize) -> Self {
        Word {
            symbols: decode(index, depth, k),
        }
    }

    /// The word with `symbol` prepended: indexes the cylinder T⁻¹[self] ∩ [symbol].
    pub fn prepend(&self, symbol: u32) -> Self {
        let mut symbols = Vec::with_capacity(self.symbols.len() + 1);
        symbols.push(symbol);
        symbols.extend_from_slice(&self.symbols);
        Word { symbols }
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.symbols.is_empty() {
            return write!(f, "ε");
        }
        if self.symbols.iter().all(|&s| s <= 9) {
            for s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

pub(crate) fn encode(symbols: &[u32], k: usize) -> usize {
    symbols
        .iter()
        .fold(0usize, |acc, &s| acc * k + (s as usize - 1))
}

pub(crate) fn decode(index: usize, depth: usize, k: usize) -> Vec<u32> {
    let mut symbols = vec![1u32; depth];
    let mut rest = index;
    for j in (0..depth).rev() {
        symbols[j] = (rest % k) as u32 + 1;
        rest /= k;
    }
    symbols
}

/// Rank of the first `depth` symbols of `symbols` (which may be longer).
pub(crate) fn prefix_index(symbols: &[u32], depth: usize, k: usize) -> usize {
    encode(&symbols[..depth], k)
}

/// Value index for the table entry a function of depth `f_depth` takes on the
/// word `(branch, w)` where `w` has rank `w_index` among depth-`w_depth` words.
/// Requires f_depth ≤ w_depth + 1.
pub(crate) fn branch_prefix_index(
    branch: usize,
    w_index: usize,
    w_depth: usize,
    f_depth: usize,
    k: usize,
) -> usize {
    if f_depth == 0 {
        return 0;
    }
    // first symbol contributes (branch−1)·k^{f_depth−1}; the rest is the
    // leading (f_depth−1) symbols of w, i.e. w_index with the trailing
    // (w_depth − f_depth + 1) digits stripped.
    let mut tail = w_index;
    for _ in 0..(w_depth + 1 - f_depth) {
        tail /= k;
    }
    (branch - 1) * k.pow(f_depth as u32 - 1) + tail
}

macro_rules! table_common {
    ($ty:ty, $scalar:ty, $norm:expr) => {
        impl $ty {
            pub fn space(&self) -> ShiftSpace {
                self.space
            }

            pub fn depth(&self) -> usize {
                self.depth
            }

            pub fn values(&self) -> &[$scalar] {
                &self.values
            }

            /// Value on the cylinder of `word`, which must resolve at least
            /// `self.depth()` symbols.
            pub fn value_on(&self, word: &Word) -> Result<$scalar> {
                if word.depth() < self.depth {
                    return Err(Error::WordTooShort {
                        expected: self.depth,
                        got: word.depth(),
                    });
                }
                let idx = prefix_index(word.symbols(), self.depth, self.space.k);
                Ok(self.values[idx])
            }

            /// Re-express at a deeper table. Values are unchanged as a
            /// function on X; each entry is repeated k^{depth−d} times.
            pub fn lift(&self, depth: usize) -> Result<Self> {
                if depth < self.depth {
                    return Err(Error::Domain(format!(
                        "cannot lift a depth-{} table down to depth {}",
                        self.depth, depth
                    )));
                }
                let n = self.space.basis_size(depth)?;
                let block = n / self.values.len();
                let mut values = Vec::with_capacity(n);
                for v in &self.values {
                    values.extend(std::iter::repeat(*v).take(block));
                }
                Ok(self.rebuild(depth, values))
            }

            /// Drop trailing coordinates the table does not actually depend
            /// on (exact, bitwise comparison). Inverse of [`Self::lift`] on
            /// its image.
            pub fn compress(&self) -> Self {
                let k = self.space.k;
                let mut depth = self.depth;
                let mut values = self.values.clone();
                while depth > 0 {
                    let reducible = values
                        .chunks(k)
                        .all(|chunk| chunk.iter().all(|v| *v == chunk[0]));
                    if !reducible {
                        break;
                    }
                    values = values.iter().step_by(k).copied().collect();
                    depth -= 1;
                }
                self.rebuild(depth, values)
            }

            /// Precompose with the shift: returns f∘T at depth d+1,
            /// with (f∘T)(i·w) = f(w) for every symbol i.
            pub fn compose_shift(&self) -> Result<Self> {
                self.space.basis_size(self.depth + 1)?;
                let mut values = Vec::with_capacity(self.values.len() * self.space.k);
                for _ in 0..self.space.k {
                    values.extend_from_slice(&self.values);
                }
                Ok(self.rebuild(self.depth + 1, values))
            }

            /// f∘Tⁿ at depth d+n.
            pub fn compose_shift_n(&self, n: usize) -> Result<Self> {
                let mut out = self.clone();
                for _ in 0..n {
                    out = out.compose_shift()?;
                }
                Ok(out)
            }

            pub fn sup_norm(&self) -> f64 {
                self.values
                    .iter()
                    .map(|v| $norm(*v))
                    .fold(0.0f64, f64::max)
            }

            fn zip_with(
                &self,
                other: &Self,
                op: impl Fn($scalar, $scalar) -> $scalar,
            ) -> Result<Self> {
                self.space.check_compatible(&other.space)?;
                let depth = self.depth.max(other.depth);
                let a = self.lift(depth)?;
                let b = other.lift(depth)?;
                let values = a
                    .values
                    .iter()
                    .zip(b.values.iter())
                    .map(|(x, y)| op(*x, *y))
                    .collect();
                Self::from_values(self.space, depth, values)
            }

            /// Pointwise sum, after lifting both tables to the common depth.
            pub fn try_add(&self, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a + b)
            }

            /// Pointwise difference.
            pub fn try_sub(&self, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a - b)
            }

            /// Pointwise product.
            pub fn try_mul(&self, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a * b)
            }

            /// Sup-norm distance, a convenience for residual checks.
            pub fn sup_distance(&self, other: &Self) -> Result<f64> {
                Ok(self.try_sub(other)?.sup_norm())
            }
        }
    };
}

/// A complex-valued function on X depending on the first `depth` coordinates.
///
/// The table lists one value per depth-d word, in lexicographic word order.
/// Values are immutable after construction; every operation returns a new
/// table.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderFunction {
    space: ShiftSpace,
    depth: usize,
    values: Vec<Complex64>,
}

impl CylinderFunction {
    /// Same function, new table shape. Callers guarantee `values` lists the
    /// same function at the given depth.
    fn rebuild(&self, depth: usize, values: Vec<Complex64>) -> Self {
        CylinderFunction {
            space: self.space,
            depth,
            values,
        }
    }
}

table_common!(CylinderFunction, Complex64, Complex64::norm);

impl CylinderFunction {
    pub fn from_values(space: ShiftSpace, depth: usize, values: Vec<Complex64>) -> Result<Self> {
        let expected = space.basis_size(depth)?;
        if values.len() != expected {
            return Err(Error::TableLength {
                depth,
                expected,
                got: values.len(),
            });
        }
        Ok(CylinderFunction {
            space,
            depth,
            values,
        })
    }

    pub fn constant(space: ShiftSpace, value: Complex64) -> Self {
        CylinderFunction {
            space,
            depth: 0,
            values: vec![value],
        }
    }

    pub fn one(space: ShiftSpace) -> Self {
        Self::constant(space, Complex64::new(1.0, 0.0))
    }

    pub fn zero(space: ShiftSpace) -> Self {
        Self::constant(space, Complex64::new(0.0, 0.0))
    }

    /// Indicator of the cylinder [word].
    pub fn indicator(space: ShiftSpace, word: &Word) -> Result<Self> {
        let n = space.basis_size(word.depth())?;
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        values[word.index(space.k)] = Complex64::new(1.0, 0.0);
        Ok(CylinderFunction {
            space,
            depth: word.depth(),
            values,
        })
    }

    /// The `index`-th standard basis vector of the depth-`depth` table space.
    pub fn basis_vector(space: ShiftSpace, depth: usize, index: usize) -> Result<Self> {
        let n = space.basis_size(depth)?;
        if index >= n {
            return Err(Error::Domain(format!(
                "basis index {index} out of range for {n} cylinders"
            )));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        values[index] = Complex64::new(1.0, 0.0);
        Ok(CylinderFunction {
            space,
            depth,
            values,
        })
    }

    pub fn conj(&self) -> Self {
        CylinderFunction {
            space: self.space,
            depth: self.depth,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        CylinderFunction {
            space: self.space,
            depth: self.depth,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise complex exponential.
    pub fn exp(&self) -> Self {
        CylinderFunction {
            space: self.space,
            depth: self.depth,
            values: self.values.iter().map(|v| v.exp()).collect(),
        }
    }

    /// Pointwise principal logarithm; rejects zeros.
    pub fn ln(&self) -> Result<Self> {
        if self.values.iter().any(|v| v.norm() == 0.0) {
            return Err(Error::Domain(
                "logarithm of a function with zero values".into(),
            ));
        }
        Ok(CylinderFunction {
            space: self.space,
            depth: self.depth,
            values: self.values.iter().map(|v| v.ln()).collect(),
        })
    }

    /// Pointwise reciprocal; rejects zeros.
    pub fn recip(&self) -> Result<Self> {
        if self.values.iter().any(|v| v.norm() == 0.0) {
            return Err(Error::Domain(
                "reciprocal of a function with zero values".into(),
            ));
        }
        Ok(CylinderFunction {
            space: self.space,
            depth: self.depth,
            values: self.values.iter().map(|v| v.inv()).collect(),
        })
    }
}

/// A real-valued table, used for transfer-operator weights, Jacobians and
/// flow potentials. Tracks strict positivity so spectral routines can demand
/// it up front.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    space: ShiftSpace,
    depth: usize,
    values: Vec<f64>,
    strictly_positive: bool,
}

impl Potential {
    /// Same function, new table shape. Lifting, compressing and composing
    /// with the shift all preserve the set of values up to repetition, so
    /// the positivity flag carries over.
    fn rebuild(&self, depth: usize, values: Vec<f64>) -> Self {
        Potential {
            space: self.space,
            depth,
            values,
            strictly_positive: self.strictly_positive,
        }
    }
}

table_common!(Potential, f64, f64::abs);

impl Potential {
    pub fn from_values(space: ShiftSpace, depth: usize, values: Vec<f64>) -> Result<Self> {
        let expected = space.basis_size(depth)?;
        if values.len() != expected {
            return Err(Error::TableLength {
                depth,
                expected,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("potential values must be finite".into()));
        }
        let strictly_positive = values.iter().all(|&v| v > 0.0);
        Ok(Potential {
            space,
            depth,
            values,
            strictly_positive,
        })
    }

    pub fn constant(space: ShiftSpace, value: f64) -> Self {
        Potential {
            space,
            depth: 0,
            values: vec![value],
            strictly_positive: value > 0.0,
        }
    }

    pub fn one(space: ShiftSpace) -> Self {
        Self::constant(space, 1.0)
    }

    /// Indicator of the cylinder [word], as a real table.
    pub fn indicator(space: ShiftSpace, word: &Word) -> Result<Self> {
        let n = space.basis_size(word.depth())?;
        let mut values = vec![0.0; n];
        values[word.index(space.k)] = 1.0;
        Potential::from_values(space, word.depth(), values)
    }

    /// The maximal-entropy Jacobian p ≡ 1/k, the normalized potential whose
    /// stationary measure is the uniform Bernoulli measure.
    pub fn uniform_jacobian(space: ShiftSpace) -> Self {
        Self::constant(space, 1.0 / space.k as f64)
    }

    pub fn strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn require_positive(&self) -> Result<()> {
        if !self.strictly_positive {
            return Err(Error::NotPositive(self.min_value()));
        }
        Ok(())
    }

    pub fn to_complex(&self) -> CylinderFunction {
        CylinderFunction {
            space: self.space,
            depth: self.depth,
            values: self
                .values
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Potential::from_values(
            self.space,
            self.depth,
            self.values.iter().map(|v| v * c).collect(),
        )
    }

    /// Pointwise real power v ↦ v^e; requires strict positivity.
    pub fn pow(&self, e: f64) -> Result<Self> {
        self.require_positive()?;
        Potential::from_values(
            self.space,
            self.depth,
            self.values.iter().map(|v| v.powf(e)).collect(),
        )
    }

    /// Pointwise complex power v ↦ v^z = exp(z·ln v); requires positivity.
    /// With z = it this produces the unimodular cocycle factors of the
    /// modular flow.
    pub fn powc(&self, z: Complex64) -> Result<CylinderFunction> {
        self.require_positive()?;
        let values = self
            .values
            .iter()
            .map(|&v| (z * v.ln()).exp())
            .collect();
        CylinderFunction::from_values(self.space, self.depth, values)
    }

    pub fn recip(&self) -> Result<Self> {
        self.require_positive()?;
        Potential::from_values(
            self.space,
            self.depth,
            self.values.iter().map(|v| 1.0 / v).collect(),
        )
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.pow(0.5)
    }

    /// Pointwise natural logarithm; requires strict positivity.
    pub fn ln(&self) -> Result<Self> {
        self.require_positive()?;
        Potential::from_values(
            self.space,
            self.depth,
            self.values.iter().map(|v| v.ln()).collect(),
        )
    }

    /// Pointwise exponential (always defined, always positive).
    pub fn exp(&self) -> Self {
        Potential {
            space: self.space,
            depth: self.depth,
            values: self.values.iter().map(|v| v.exp()).collect(),
            strictly_positive: true,
        }
    }

    /// The ergodic product f·(f∘T)⋯(f∘T^{n-1}) at depth d+n−1 (depth 0 and
    /// value 1 when n = 0). Satisfies the cocycle law
    /// f^{(n+m)} = f^{(n)} · (f^{(m)}∘Tⁿ).
    pub fn birkhoff(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Ok(Potential::one(self.space));
        }
        let k = self.space.k;
        let depth = self.depth + n - 1;
        let size = self.space.basis_size(depth)?;
        let mut values = Vec::with_capacity(size);
        let mut word = vec![1u32; depth];
        for idx in 0..size {
            decode_into(idx, k, &mut word);
            let mut prod = 1.0;
            for j in 0..n {
                let end = (j + self.depth).min(depth);
                let v_idx = if self.depth == 0 {
                    0
                } else {
                    encode(&word[j..end], k)
                };
                prod *= self.values[v_idx];
            }
            values.push(prod);
        }
        Potential::from_values(self.space, depth, values)
    }
}

pub(crate) fn decode_into(index: usize, k: usize, out: &mut [u32]) {
    let mut rest = index;
    for j in (0..out.len()).rev() {
        out[j] = (rest % k) as u32 + 1;
        rest /= k;
    }
}

// --- serialization -------------------------------------------------------
//
// On disk a complex table is {"k", "depth", "values": [[re, im], …]} and a
// real table is {"k", "depth", "values": [v, …]}, both in canonical order.

#[derive(Serialize, Deserialize)]
struct CylinderFunctionRepr {
    k: usize,
    depth: usize,
    values: Vec<(f64, f64)>,
}

impl Serialize for CylinderFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CylinderFunctionRepr {
            k: self.space.k,
            depth: self.depth,
            values: self.values.iter().map(|v| (v.re, v.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CylinderFunction {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = CylinderFunctionRepr::deserialize(deserializer)?;
        let space = ShiftSpace::new(repr.k).map_err(serde::de::Error::custom)?;
        CylinderFunction::from_values(
            space,
            repr.depth,
            repr.values
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PotentialRepr {
    k: usize,
    depth: usize,
    values: Vec<f64>,
}

impl Serialize for Potential {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PotentialRepr {
            k: self.space.k,
            depth: self.depth,
            values: self.values.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Potential {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = PotentialRepr::deserialize(deserializer)?;
        let space = ShiftSpace::new(repr.k).map_err(serde::de::Error::custom)?;
        Potential::from_values(space, repr.depth, repr.values).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn enumerates_cylinders_in_lexicographic_order() {
        let space = ShiftSpace::new(2).unwrap();
        let words = space.enumerate_cylinders(2).unwrap();
        let rendered: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        assert_eq!(rendered, vec!["11", "12", "21", "22"]);

        let space3 = ShiftSpace::new(3).unwrap();
        let words3 = space3.enumerate_cylinders(2).unwrap();
        assert_eq!(words3.len(), 9);
        assert_eq!(words3[0].to_string(), "11");
        assert_eq!(words3[8].to_string(), "33");

        // depth 0: the single empty word (the whole space)
        let empty = space.enumerate_cylinders(0).unwrap();
        assert_eq!(empty.len(), 1);
        assert_eq!(empty[0].depth(), 0);
    }

    #[test]
    fn basis_cap_is_enforced() {
        let space = ShiftSpace::with_basis_cap(2, 8).unwrap();
        assert!(space.basis_size(3).is_ok());
        assert!(matches!(
            space.basis_size(4),
            Err(Error::BasisTooLarge { .. })
        ));
    }

    #[test]
    fn word_index_round_trip() {
        let k = 3;
        for depth in 0..4 {
            let n = 3usize.pow(depth as u32);
            for idx in 0..n {
                let w = Word::from_index(k, depth, idx);
                assert_eq!(w.index(k), idx);
            }
        }
    }

    #[test]
    fn lift_repeats_blocks() {
        let space = ShiftSpace::new(2).unwrap();
        let w = Word::new(vec![1], 2).unwrap();
        let f = CylinderFunction::indicator(space, &w).unwrap();
        let lifted = f.lift(2).unwrap();
        // 1_{[1]} at depth 2 is (1,1,0,0)
        assert_eq!(
            lifted.values(),
            &[c(1.0), c(1.0), c(0.0), c(0.0)]
        );
        // lifting never changes the function
        let wup = Word::new(vec![1, 2], 2).unwrap();
        assert_eq!(f.value_on(&wup).unwrap(), lifted.value_on(&wup).unwrap());
    }

    #[test]
    fn compress_inverts_lift() {
        let space = ShiftSpace::new(3).unwrap();
        let f = CylinderFunction::from_values(space, 1, vec![c(1.0), c(2.0), c(3.0)]).unwrap();
        let lifted = f.lift(3).unwrap();
        assert_eq!(lifted.compress(), f);
    }

    #[test]
    fn compose_shift_ignores_first_coordinate() {
        let space = ShiftSpace::new(2).unwrap();
        let w1 = Word::new(vec![1], 2).unwrap();
        let f = CylinderFunction::indicator(space, &w1).unwrap();
        let g = f.compose_shift().unwrap();
        // (1_{[1]}∘T)(x) = 1 iff x₁ = 1: table (1,0,1,0)
        assert_eq!(g.values(), &[c(1.0), c(0.0), c(1.0), c(0.0)]);

        // α²(1_{[1]}) looks at the third symbol
        let g2 = f.compose_shift_n(2).unwrap();
        let x = Word::new(vec![2, 2, 1], 2).unwrap();
        assert_eq!(g2.value_on(&x).unwrap(), c(1.0));
        let y = Word::new(vec![1, 1, 2], 2).unwrap();
        assert_eq!(g2.value_on(&y).unwrap(), c(0.0));
    }

    #[test]
    fn birkhoff_products_match_hand_values() {
        let space = ShiftSpace::new(2).unwrap();
        let f = Potential::from_values(space, 1, vec![2.0, 3.0]).unwrap();
        // n = 0: the empty product
        let b0 = f.birkhoff(0).unwrap();
        assert_eq!(b0.depth(), 0);
        assert_eq!(b0.values(), &[1.0]);
        // n = 2 at depth 2: f(x₀)·f(x₁) over 11,12,21,22
        let b2 = f.birkhoff(2).unwrap();
        assert_eq!(b2.values(), &[4.0, 6.0, 6.0, 9.0]);
        // constants: c^n at depth n−1
        let g = Potential::constant(space, 1.5);
        let b3 = g.birkhoff(3).unwrap();
        assert_eq!(b3.depth(), 2);
        assert!(b3.values().iter().all(|v| (v - 3.375).abs() < 1e-15));
    }

    #[test]
    fn pointwise_ops_and_domains() {
        let space = ShiftSpace::new(2).unwrap();
        let f = Potential::from_values(space, 1, vec![1.0, 2.0]).unwrap();
        let product = f.try_mul(&f.recip().unwrap()).unwrap();
        assert!(product.sup_distance(&Potential::one(space)).unwrap() < 1e-15);

        let round_trip = f.ln().unwrap().exp();
        assert!(round_trip.sup_distance(&f).unwrap() < 1e-12);

        let with_zero = Potential::from_values(space, 1, vec![0.0, 1.0]).unwrap();
        assert!(!with_zero.strictly_positive());
        assert!(matches!(with_zero.ln(), Err(Error::NotPositive(_))));
        assert!(matches!(with_zero.pow(0.5), Err(Error::NotPositive(_))));

        // complex powers of a positive table are unimodular for imaginary z
        let phase = f.powc(Complex64::new(0.0, 1.0)).unwrap();
        for v in phase.values() {
            assert!((v.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn mixed_depth_arithmetic_lifts_first() {
        let space = ShiftSpace::new(2).unwrap();
        let shallow = CylinderFunction::constant(space, c(2.0));
        let deep = CylinderFunction::from_values(space, 2, vec![c(1.0), c(2.0), c(3.0), c(4.0)])
            .unwrap();
        let sum = shallow.try_add(&deep).unwrap();
        assert_eq!(sum.depth(), 2);
        assert_eq!(sum.values(), &[c(3.0), c(4.0), c(5.0), c(6.0)]);
    }

    #[test]
    fn serialization_round_trips() {
        let space = ShiftSpace::new(2).unwrap();
        let f = CylinderFunction::from_values(
            space,
            1,
            vec![Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)],
        )
        .unwrap();
        let json = serde_json::to_string(&f).unwrap();
        let back: CylinderFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);

        let p = Potential::from_values(space, 1, vec![1.0, 2.0]).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"k":2,"depth":1,"values":[1.0,2.0]}"#);
        let back: Potential = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// composing with the shift is an algebra morphism: α(f·g) = α(f)·α(g)
        #[test]
        fn compose_shift_is_multiplicative(
            fa in proptest::collection::vec(-2.0f64..2.0, 4),
            fb in proptest::collection::vec(-2.0f64..2.0, 4),
        ) {
            let space = ShiftSpace::new(2).unwrap();
            let f = CylinderFunction::from_values(
                space, 2, fa.iter().map(|&v| c(v)).collect()).unwrap();
            let g = CylinderFunction::from_values(
                space, 2, fb.iter().map(|&v| c(v)).collect()).unwrap();
            let lhs = f.try_mul(&g).unwrap().compose_shift().unwrap();
            let rhs = f.compose_shift().unwrap().try_mul(&g.compose_shift().unwrap()).unwrap();
            prop_assert!(lhs.sup_distance(&rhs).unwrap() == 0.0);
        }

        /// birkhoff obeys the cocycle law f^{(n+m)} = f^{(n)}·(f^{(m)}∘Tⁿ)
        #[test]
        fn birkhoff_cocycle_law(
            vals in proptest::collection::vec(0.25f64..4.0, 2),
            n in 0usize..3,
            m in 0usize..3,
        ) {
            let space = ShiftSpace::new(2).unwrap();
            let f = Potential::from_values(space, 1, vals).unwrap();
            let lhs = f.birkhoff(n + m).unwrap();
            let rhs = f
                .birkhoff(n).unwrap()
                .try_mul(&f.birkhoff(m).unwrap().compose_shift_n(n).unwrap())
                .unwrap();
            prop_assert!(lhs.sup_distance(&rhs).unwrap() < 1e-12);
        }

        /// lifting is faithful: compress ∘ lift = id on already-compressed tables
        #[test]
        fn lift_then_compress_round_trips(
            vals in proptest::collection::vec(-3.0f64..3.0, 4),
            extra in 0usize..3,
        ) {
            let space = ShiftSpace::new(2).unwrap();
            let f = CylinderFunction::from_values(
                space, 2, vals.iter().map(|&v| c(v)).collect()).unwrap();
            let f = f.compress();
            let lifted = f.lift(f.depth() + extra).unwrap();
            prop_assert_eq!(lifted.compress(), f);
        }
    }
}
