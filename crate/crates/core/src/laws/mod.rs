//! Finitely supported laws, their left-continuous quantile functions and
//! the stochastic orders built on tail integrals.
//!
//! Every law is kept in sorted atom form (strictly increasing values,
//! strictly positive probabilities summing to one). Quantile functions are
//! step functions on `(0, 1]` and all integrals against them are computed
//! exactly by summing over breakpoints, left to right.

mod csv;
mod order;
mod step;

pub use self::csv::{ingest_csv, parse_sample_lines};
pub use self::order::{
    convex_order_dominates, convex_order_dominates_tol, ssd_dominated, ssd_dominated_tol,
};
pub use self::step::{integrate_product, merged_breakpoints, partial_integral, QuantileFn, StepFn};

use crate::error::{Error, Result};
use crate::scalar::{cmp, Scalar};

/// A probability law with finitely many atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteLaw<T> {
    values: Vec<T>,
    probs: Vec<T>,
}

impl<T: Scalar> DiscreteLaw<T> {
    /// Builds a law from `(value, probability)` pairs in any order.
    ///
    /// Equal values are merged. Probabilities must be at least
    /// `T::MIN_PROB` and sum to one within `T::SUM_TOL`; the result is
    /// renormalised.
    pub fn new<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, T)>,
    {
        let mut atoms: Vec<(T, T)> = atoms.into_iter().collect();
        if atoms.is_empty() {
            return Err(Error::domain("a law needs at least one atom"));
        }
        for &(v, p) in &atoms {
            if !v.is_finite() {
                return Err(Error::domain(format!("atom value {v} is not finite")));
            }
            if !p.is_finite() || p < T::lit(T::MIN_PROB) {
                return Err(Error::domain(format!(
                    "atom probability {p} at value {v} is below {}",
                    T::MIN_PROB
                )));
            }
        }
        atoms.sort_by(|a, b| cmp(&a.0, &b.0));
        let mut values: Vec<T> = Vec::with_capacity(atoms.len());
        let mut probs: Vec<T> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match values.last() {
                Some(&last) if last == v => {
                    let k = probs.len() - 1;
                    probs[k] = probs[k] + p;
                }
                _ => {
                    values.push(v);
                    probs.push(p);
                }
            }
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::lit(T::SUM_TOL) {
            return Err(Error::domain(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        for p in &mut probs {
            *p = *p / total;
        }
        Ok(DiscreteLaw { values, probs })
    }

    /// Dirac mass at `c`.
    pub fn point(c: T) -> Self {
        assert!(c.is_finite(), "point mass at non-finite value");
        DiscreteLaw {
            values: vec![c],
            probs: vec![T::one()],
        }
    }

    /// Empirical law of `values`, each carrying weight `1/n`.
    pub fn uniform(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("empty sample"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("sample value {v} is not finite")));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(cmp);
        let n = T::from_usize_lossy(sorted.len());
        let mut out_v = Vec::new();
        let mut out_p = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            out_v.push(sorted[i]);
            out_p.push(T::from_usize_lossy(j - i) / n);
            i = j;
        }
        Ok(DiscreteLaw {
            values: out_v,
            probs: out_p,
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn atoms(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    /// Number of distinct atoms.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }

    pub fn mean(&self) -> T {
        self.atoms().fold(T::zero(), |acc, (v, p)| acc + v * p)
    }

    pub fn min_value(&self) -> T {
        self.values[0]
    }

    /// Essential supremum.
    pub fn max_value(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Sup norm `max |x|`.
    pub fn max_abs(&self) -> T {
        self.min_value().abs().max(self.max_value().abs())
    }

    /// Left-continuous quantile `inf{x : P(X <= x) >= s}` for `s` in `(0, 1)`.
    pub fn quantile(&self, s: T) -> Result<T> {
        if !(s > T::zero() && s < T::one()) {
            return Err(Error::domain(format!("quantile level {s} outside (0, 1)")));
        }
        Ok(self.quantile_fn().value(s))
    }

    pub fn quantile_fn(&self) -> QuantileFn<T> {
        QuantileFn::from_law(self)
    }

    /// `∫_p^1 q(s) ds`.
    pub fn tail_integral(&self, p: T) -> Result<T> {
        partial_integral(&self.quantile_fn(), p, T::one())
    }

    /// Law of `scale * X + shift`.
    pub fn affine(&self, scale: T, shift: T) -> Self {
        if scale == T::zero() {
            return Self::point(shift);
        }
        let mut atoms: Vec<(T, T)> = self.atoms().map(|(v, p)| (scale * v + shift, p)).collect();
        if scale < T::zero() {
            atoms.reverse();
        }
        // An affine image keeps probabilities, so no renormalisation.
        let mut values: Vec<T> = Vec::with_capacity(atoms.len());
        let mut probs: Vec<T> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match values.last() {
                Some(&last) if last == v => {
                    let k = probs.len() - 1;
                    probs[k] = probs[k] + p;
                }
                _ => {
                    values.push(v);
                    probs.push(p);
                }
            }
        }
        DiscreteLaw { values, probs }
    }

    /// Law of `-X`.
    pub fn reflected(&self) -> Self {
        self.affine(-T::one(), T::zero())
    }

    pub fn shifted(&self, m: T) -> Self {
        self.affine(T::one(), m)
    }

    /// Multiplicity of each atom on an `n`-point equiprobable space, if
    /// every probability is a multiple of `1/n`.
    pub fn counts_on(&self, n: usize) -> Result<Vec<usize>> {
        if n == 0 {
            return Err(Error::domain("grid size must be positive"));
        }
        let nn = T::from_usize_lossy(n);
        let slack = T::tol() * nn.max(T::one());
        let mut counts = Vec::with_capacity(self.len());
        for (v, p) in self.atoms() {
            let c = p * nn;
            let r = c.round();
            if (c - r).abs() > slack || r < T::one() {
                return Err(Error::domain(format!(
                    "atom {v} with probability {p} is not a multiple of 1/{n}"
                )));
            }
            counts.push(r.to_usize().unwrap_or(0));
        }
        if counts.iter().sum::<usize>() != n {
            return Err(Error::domain(format!(
                "law does not live on a {n}-point equiprobable space"
            )));
        }
        Ok(counts)
    }

    /// The `n` values of the law on an `n`-point equiprobable space, sorted
    /// ascending.
    pub fn expand(&self, n: usize) -> Result<Vec<T>> {
        let counts = self.counts_on(n)?;
        Ok(self
            .values
            .iter()
            .zip(counts)
            .flat_map(|(&v, c)| std::iter::repeat_n(v, c))
            .collect())
    }

    /// Whether two laws agree atom by atom within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.len() == other.len()
            && self
                .atoms()
                .zip(other.atoms())
                .all(|((v1, p1), (v2, p2))| (v1 - v2).abs() <= tol && (p1 - p2).abs() <= tol)
    }
}

/// A random variable on the `n`-point equiprobable space: atom `i` carries
/// value `values[i]` and probability `1/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformSample<T> {
    values: Vec<T>,
}

impl<T: Scalar> UniformSample<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("a sample needs at least one atom"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("sample value {v} is not finite")));
        }
        Ok(UniformSample { values })
    }

    pub fn constant(n: usize, c: T) -> Result<Self> {
        Self::new(vec![c; n])
    }

    /// Arrangement of `law` on `n` atoms, sorted ascending.
    pub fn sorted_from_law(law: &DiscreteLaw<T>, n: usize) -> Result<Self> {
        Self::new(law.expand(n)?)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn law(&self) -> DiscreteLaw<T> {
        DiscreteLaw::uniform(&self.values).expect("sample values are finite and nonempty")
    }

    pub fn mean(&self) -> T {
        let n = T::from_usize_lossy(self.n());
        self.values.iter().copied().sum::<T>() / n
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    /// `E[XY]` on the common equiprobable space.
    pub fn dot(&self, other: &Self) -> Result<T> {
        if self.n() != other.n() {
            return Err(Error::domain(format!(
                "dimension mismatch: {} vs {} atoms",
                self.n(),
                other.n()
            )));
        }
        let n = T::from_usize_lossy(self.n());
        let s: T = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a * b)
            .sum();
        Ok(s / n)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn shifted(&self, m: T) -> Self {
        UniformSample {
            values: self.values.iter().map(|&v| v + m).collect(),
        }
    }

    pub fn scaled(&self, t: T) -> Self {
        UniformSample {
            values: self.values.iter().map(|&v| v * t).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(-T::one())
    }

    /// Sample whose atom `i` carries `self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::domain("permutation length mismatch"));
        }
        let mut seen = vec![false; self.n()];
        for &j in perm {
            if j >= self.n() || std::mem::replace(&mut seen[j], true) {
                return Err(Error::domain("not a permutation"));
            }
        }
        Ok(UniformSample {
            values: perm.iter().map(|&j| self.values[j]).collect(),
        })
    }
}

/// Conditional expectation of `x` given the σ-field generated by
/// `partition`: each block is replaced by its average.
///
/// Blocks hold 0-based atom indices and must be nonempty, disjoint, and
/// cover `0..n`.
pub fn dilate<T: Scalar>(x: &UniformSample<T>, partition: &[Vec<usize>]) -> Result<UniformSample<T>> {
    let n = x.n();
    let mut owner = vec![usize::MAX; n];
    for (b, block) in partition.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::domain(format!("partition block {b} is empty")));
        }
        for &i in block {
            if i >= n {
                return Err(Error::domain(format!("index {i} out of range for {n} atoms")));
            }
            if owner[i] != usize::MAX {
                return Err(Error::domain(format!("index {i} appears in two blocks")));
            }
            owner[i] = b;
        }
    }
    if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::domain(format!("index {i} is not covered by the partition")));
    }
    let mut out = x.values().to_vec();
    for block in partition {
        let avg = block.iter().map(|&i| x.values()[i]).sum::<T>() / T::from_usize_lossy(block.len());
        for &i in block {
            out[i] = avg;
        }
    }
    UniformSample::new(out)
}
