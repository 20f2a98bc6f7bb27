//! Capacities on the `n`-point equiprobable space and their Choquet
//! integrals.
//!
//! Subsets are bitmasks: bit `i` stands for atom `i` (0-based). On an
//! equiprobable space a capacity is law invariant exactly when its value
//! depends on the cardinality of the set alone.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::laws::UniformSample;
use crate::scalar::{cmp, Scalar};

pub type Subset = u64;

/// Atom limit for evaluation (one bit per atom).
pub const MAX_ATOMS: usize = 64;
/// Atom limit for checks that tabulate all `2^n` subsets.
pub const EXHAUSTIVE_MAX_N: usize = 16;

pub fn full_set(n: usize) -> Subset {
    if n >= 64 {
        Subset::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn cardinality(a: Subset) -> usize {
    a.count_ones() as usize
}

/// Nondecreasing piecewise linear map of `[0, 1]` onto itself, fixing 0
/// and 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear<T> {
    knots: Vec<(T, T)>,
}

impl<T: Scalar> PiecewiseLinear<T> {
    pub fn new(knots: Vec<(T, T)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::domain("distortion needs at least two knots"));
        }
        let (first, last) = (knots[0], knots[knots.len() - 1]);
        if first != (T::zero(), T::zero()) || last != (T::one(), T::one()) {
            return Err(Error::domain("distortion must map 0 to 0 and 1 to 1"));
        }
        for w in knots.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::domain("distortion knots must be strictly increasing in u"));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::domain("distortion must be nondecreasing"));
            }
        }
        Ok(PiecewiseLinear { knots })
    }

    pub fn identity() -> Self {
        PiecewiseLinear {
            knots: vec![(T::zero(), T::zero()), (T::one(), T::one())],
        }
    }

    /// Interpolates `f` at the grid `k/n`; exact for every set on an
    /// `n`-point space.
    pub fn sampled(n: usize, f: impl Fn(T) -> T) -> Result<Self> {
        let nn = T::from_usize_lossy(n);
        let knots = (0..=n)
            .map(|k| {
                let u = T::from_usize_lossy(k) / nn;
                let v = if k == 0 {
                    T::zero()
                } else if k == n {
                    T::one()
                } else {
                    f(u)
                };
                (u, v)
            })
            .collect();
        Self::new(knots)
    }

    pub fn knots(&self) -> &[(T, T)] {
        &self.knots
    }

    pub fn eval(&self, u: T) -> T {
        let idx = self.knots.partition_point(|k| k.0 < u);
        if idx == 0 {
            return self.knots[0].1;
        }
        if idx >= self.knots.len() {
            return self.knots[self.knots.len() - 1].1;
        }
        let (u0, v0) = self.knots[idx - 1];
        let (u1, v1) = self.knots[idx];
        if u == u1 {
            return v1;
        }
        v0 + (v1 - v0) * (u - u0) / (u1 - u0)
    }

    /// `u -> 1 - T(1 - u)`.
    pub fn dual(&self) -> Self {
        let knots = self
            .knots
            .iter()
            .rev()
            .map(|&(u, v)| (T::one() - u, T::one() - v))
            .collect();
        PiecewiseLinear { knots }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CapacityKind<T> {
    /// `μ(A) = T(|A| / n)`.
    Distortion(PiecewiseLinear<T>),
    /// Upper envelope `μ(A) = max_d (1/n) Σ_{i ∈ A} d_i` of probability
    /// densities.
    DensityFamily(Vec<Vec<T>>),
    /// `μ = α ν + (1 - α) ν̄` with `ν` a density family.
    Jp { nu: Box<Capacity<T>>, alpha: T },
    /// Full or partial table indexed by bitmask.
    Explicit(Vec<Option<T>>),
    /// `μ̄(A) = 1 - μ(Aᶜ)`.
    Dual(Box<Capacity<T>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Capacity<T> {
    n: usize,
    kind: CapacityKind<T>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ATOMS {
        return Err(Error::SizeLimit {
            what: "capacity atom count",
            got: n,
            max: MAX_ATOMS,
        });
    }
    Ok(())
}

fn check_exhaustive(n: usize) -> Result<()> {
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::SizeLimit {
            what: "atom count for exhaustive checks",
            got: n,
            max: EXHAUSTIVE_MAX_N,
        });
    }
    Ok(())
}

impl<T: Scalar> Capacity<T> {
    pub fn distortion(n: usize, t: PiecewiseLinear<T>) -> Result<Self> {
        check_n(n)?;
        Ok(Capacity {
            n,
            kind: CapacityKind::Distortion(t),
        })
    }

    /// Distortion capacity `A -> f(|A| / n)`.
    pub fn distortion_fn(n: usize, f: impl Fn(T) -> T) -> Result<Self> {
        Self::distortion(n, PiecewiseLinear::sampled(n, f)?)
    }

    /// The reference probability `A -> |A| / n`.
    pub fn probability(n: usize) -> Result<Self> {
        Self::distortion(n, PiecewiseLinear::identity())
    }

    pub fn densities(n: usize, densities: Vec<Vec<T>>) -> Result<Self> {
        check_n(n)?;
        if densities.is_empty() {
            return Err(Error::domain("density family must be nonempty"));
        }
        let nn = T::from_usize_lossy(n);
        for (k, d) in densities.iter().enumerate() {
            if d.len() != n {
                return Err(Error::domain(format!("density {k} has {} entries, expected {n}", d.len())));
            }
            if d.iter().any(|&x| !x.is_finite() || x < T::zero()) {
                return Err(Error::domain(format!("density {k} has a negative entry")));
            }
            let avg = d.iter().copied().sum::<T>() / nn;
            if (avg - T::one()).abs() > T::tol() {
                return Err(Error::domain(format!("density {k} averages to {avg}, expected 1")));
            }
        }
        Ok(Capacity {
            n,
            kind: CapacityKind::DensityFamily(densities),
        })
    }

    /// Jaffray-Philippe capacity `α ν + (1 - α) ν̄`; `ν` must be a density
    /// family and `α ∈ [0, 1] \ {1/2}`.
    pub fn jp(nu: Capacity<T>, alpha: T) -> Result<Self> {
        if !matches!(nu.kind, CapacityKind::DensityFamily(_)) {
            return Err(Error::domain("JP capacity requires a coherent (density family) nu"));
        }
        check_alpha(alpha)?;
        Ok(Capacity {
            n: nu.n,
            kind: CapacityKind::Jp {
                nu: Box::new(nu),
                alpha,
            },
        })
    }

    /// Explicit capacity from `(subset, value)` pairs. Subsets not listed
    /// fail on evaluation; `∅ -> 0` and `Ω -> 1` are required.
    pub fn explicit(n: usize, values: impl IntoIterator<Item = (Subset, T)>) -> Result<Self> {
        check_n(n)?;
        check_exhaustive(n)?;
        let full = full_set(n);
        let mut table = vec![None; 1usize << n];
        for (a, v) in values {
            if a & !full != 0 {
                return Err(Error::domain(format!("subset {a:#b} is not inside {n} atoms")));
            }
            if !v.is_finite() {
                return Err(Error::domain(format!("capacity value at {a:#b} is not finite")));
            }
            table[a as usize] = Some(v);
        }
        let tol = T::tol();
        match (table[0], table[full as usize]) {
            (Some(e), Some(o)) if e.abs() <= tol && (o - T::one()).abs() <= tol => {}
            _ => return Err(Error::domain("explicit capacity needs μ(∅) = 0 and μ(Ω) = 1")),
        }
        Ok(Capacity {
            n,
            kind: CapacityKind::Explicit(table),
        })
    }

    /// Explicit capacity from a full table of `2^n` values.
    pub fn from_table(n: usize, table: Vec<T>) -> Result<Self> {
        if n <= EXHAUSTIVE_MAX_N && table.len() != 1usize << n {
            return Err(Error::domain("table length must be 2^n"));
        }
        Self::explicit(n, table.into_iter().enumerate().map(|(a, v)| (a as Subset, v)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &CapacityKind<T> {
        &self.kind
    }

    pub fn full(&self) -> Subset {
        full_set(self.n)
    }

    pub fn eval(&self, a: Subset) -> Result<T> {
        if a & !self.full() != 0 {
            return Err(Error::domain(format!("subset {a:#b} is not inside {} atoms", self.n)));
        }
        self.eval_inner(a)
    }

    fn eval_inner(&self, a: Subset) -> Result<T> {
        let nn = T::from_usize_lossy(self.n);
        match &self.kind {
            CapacityKind::Distortion(t) => Ok(t.eval(T::from_usize_lossy(cardinality(a)) / nn)),
            CapacityKind::DensityFamily(ds) => Ok(ds
                .iter()
                .map(|d| {
                    d.iter()
                        .enumerate()
                        .filter(|(i, _)| a >> i & 1 == 1)
                        .fold(T::zero(), |acc, (_, &x)| acc + x)
                        / nn
                })
                .fold(T::neg_infinity(), T::max)),
            CapacityKind::Jp { nu, alpha } => {
                let inside = nu.eval_inner(a)?;
                let outside = nu.eval_inner(self.full() & !a)?;
                Ok(*alpha * inside + (T::one() - *alpha) * (T::one() - outside))
            }
            CapacityKind::Explicit(table) => table[a as usize]
                .ok_or_else(|| Error::domain(format!("subset {a:#b} has no value in the table"))),
            CapacityKind::Dual(inner) => Ok(T::one() - inner.eval_inner(self.full() & !a)?),
        }
    }

    /// Dual capacity `A -> 1 - μ(Aᶜ)`. Distortions and JP capacities stay
    /// in their parameterisation; the dual of a dual is the original.
    pub fn dual(&self) -> Capacity<T> {
        let kind = match &self.kind {
            CapacityKind::Distortion(t) => CapacityKind::Distortion(t.dual()),
            CapacityKind::Jp { nu, alpha } => CapacityKind::Jp {
                nu: nu.clone(),
                alpha: T::one() - *alpha,
            },
            CapacityKind::Dual(inner) => return (**inner).clone(),
            CapacityKind::Explicit(table) => {
                let full = self.full() as usize;
                CapacityKind::Explicit(
                    (0..table.len())
                        .map(|a| table[full & !a].map(|v| T::one() - v))
                        .collect(),
                )
            }
            CapacityKind::DensityFamily(_) => CapacityKind::Dual(Box::new(self.clone())),
        };
        Capacity { n: self.n, kind }
    }

    /// All `2^n` values, indexed by bitmask.
    pub fn table(&self) -> Result<Vec<T>> {
        check_exhaustive(self.n)?;
        (0..=self.full()).map(|a| self.eval_inner(a)).collect()
    }

    /// First pair `A ⊂ A ∪ {i}` with `μ(A) > μ(A ∪ {i}) + tol`, if any.
    pub fn monotonicity_violation(&self, tol: T) -> Result<Option<(Subset, Subset)>> {
        let table = self.table()?;
        for a in 0..=self.full() {
            for i in 0..self.n {
                let b = a | (1 << i);
                if b != a && table[a as usize] > table[b as usize] + tol {
                    return Ok(Some((a, b)));
                }
            }
        }
        Ok(None)
    }
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return Err(Error::domain(format!("alpha {alpha} outside [0, 1]")));
    }
    if alpha == T::lit(0.5) {
        return Err(Error::domain("JP polarisation undefined for alpha = 1/2"));
    }
    Ok(())
}

/// Choquet integral together with its layers `(v_j, μ({X >= v_j}))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoquetValue<T> {
    pub value: T,
    pub layer_trace: Vec<(T, T)>,
}

/// Exact Choquet integral by the sorted layer formula
/// `v_1 + Σ_{j >= 2} (v_j - v_{j-1}) μ({X >= v_j})` over the distinct
/// values `v_1 < ... < v_m` of `x`.
pub fn choquet<T: Scalar>(mu: &Capacity<T>, x: &UniformSample<T>) -> Result<ChoquetValue<T>> {
    if x.n() != mu.n() {
        return Err(Error::domain(format!(
            "sample has {} atoms, capacity has {}",
            x.n(),
            mu.n()
        )));
    }
    let xv = x.values();
    let mut order: Vec<usize> = (0..xv.len()).collect();
    order.sort_by(|&i, &j| cmp(&xv[i], &xv[j]));
    let mut upper = mu.full();
    let mut trace = Vec::new();
    let mut value = xv[order[0]];
    let mut prev = value;
    let mut k = 0;
    while k < order.len() {
        let v = xv[order[k]];
        let weight = mu.eval_inner(upper)?;
        if k > 0 {
            value = value + (v - prev) * weight;
        }
        trace.push((v, weight));
        prev = v;
        while k < order.len() && xv[order[k]] == v {
            upper &= !(1 << order[k]);
            k += 1;
        }
    }
    Ok(ChoquetValue {
        value,
        layer_trace: trace,
    })
}

/// The defining formula `∫_{-∞}^0 (μ(X > s) - 1) ds + ∫_0^∞ μ(X > s) ds`,
/// integrated piece by piece over the level sets of `x`. Independent of
/// the layer route in [`choquet`].
pub fn choquet_survival<T: Scalar>(mu: &Capacity<T>, x: &UniformSample<T>) -> Result<T> {
    if x.n() != mu.n() {
        return Err(Error::domain("dimension mismatch"));
    }
    let xv = x.values();
    let mut cuts: Vec<T> = xv.to_vec();
    cuts.push(T::zero());
    cuts.sort_by(cmp);
    cuts.dedup();
    let mut total = T::zero();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        // μ(X > s) is constant for s in [lo, hi).
        let above: Subset = xv
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > lo)
            .fold(0, |acc, (i, _)| acc | (1 << i));
        let s = mu.eval(above)?;
        let len = hi - lo;
        total = if hi <= T::zero() {
            total + (s - T::one()) * len
        } else {
            total + s * len
        };
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Submodularity<T> {
    Submodular,
    /// `μ(A ∪ B) + μ(A ∩ B) - μ(A) - μ(B) = excess > 0`.
    Violated { a: Subset, b: Subset, excess: T },
}

impl<T> Submodularity<T> {
    pub fn holds(&self) -> bool {
        matches!(self, Submodularity::Submodular)
    }
}

/// Exhaustive submodularity check (`n <= 16`).
///
/// Uses the equivalent local form `μ(A+i+j) + μ(A) <= μ(A+i) + μ(A+j)`;
/// a violation there is a violating pair `(A+i, A+j)` of the global form.
pub fn is_submodular<T: Scalar>(mu: &Capacity<T>) -> Result<Submodularity<T>> {
    is_submodular_tol(mu, T::tol())
}

pub fn is_submodular_tol<T: Scalar>(mu: &Capacity<T>, tol: T) -> Result<Submodularity<T>> {
    let table = mu.table()?;
    let n = mu.n();
    for a in 0..=mu.full() {
        for i in (0..n).filter(|&i| a >> i & 1 == 0) {
            for j in (i + 1..n).filter(|&j| a >> j & 1 == 0) {
                let ai = a | 1 << i;
                let aj = a | 1 << j;
                let aij = ai | aj;
                let excess = table[aij as usize] + table[a as usize]
                    - table[ai as usize]
                    - table[aj as usize];
                if excess > tol {
                    return Ok(Submodularity::Violated { a: ai, b: aj, excess });
                }
            }
        }
    }
    Ok(Submodularity::Submodular)
}

/// Whether `μ(A)` depends on `|A|` only (`n <= 16`).
pub fn is_law_invariant<T: Scalar>(mu: &Capacity<T>) -> Result<bool> {
    is_law_invariant_tol(mu, T::tol())
}

pub fn is_law_invariant_tol<T: Scalar>(mu: &Capacity<T>, tol: T) -> Result<bool> {
    let table = mu.table()?;
    let mut by_size: Vec<Option<T>> = vec![None; mu.n() + 1];
    for (a, &v) in table.iter().enumerate() {
        let k = cardinality(a as Subset);
        match by_size[k] {
            None => by_size[k] = Some(v),
            Some(w) if (w - v).abs() > tol => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

/// Polarisation `ν = α/(2α-1) μ - (1-α)/(2α-1) μ̄`, which inverts
/// `μ = α ν + (1 - α) ν̄`.
pub fn jp_recover_nu<T: Scalar>(mu: &Capacity<T>, alpha: T) -> Result<Capacity<T>> {
    check_alpha(alpha)?;
    let table = mu.table()?;
    let full = mu.full() as usize;
    let two = T::lit(2.0);
    let denom = two * alpha - T::one();
    let (c_mu, c_dual) = (alpha / denom, (T::one() - alpha) / denom);
    let values = (0..table.len()).map(|a| {
        let dual = T::one() - table[full & !a];
        (a as Subset, c_mu * table[a] - c_dual * dual)
    });
    Capacity::explicit(mu.n(), values)
}

/// Neo-additive capacity
/// `(1-δ) Q(A) + (1-α) δ 1{A ≠ ∅} + α δ 1{A = Ω}`.
pub fn neo_additive<T: Scalar>(q: &[T], delta: T, alpha: T) -> Result<Capacity<T>> {
    let n = q.len();
    check_n(n)?;
    check_exhaustive(n)?;
    if q.iter().any(|&x| !x.is_finite() || x < T::zero()) {
        return Err(Error::domain("q must be a nonnegative vector"));
    }
    let total: T = q.iter().copied().sum();
    if (total - T::one()).abs() > T::tol() {
        return Err(Error::domain(format!("q sums to {total}, expected 1")));
    }
    for (name, v) in [("delta", delta), ("alpha", alpha)] {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::domain(format!("{name} = {v} outside [0, 1]")));
        }
    }
    let full = full_set(n);
    let values = (0..=full).map(|a| {
        let qa = q
            .iter()
            .enumerate()
            .filter(|(i, _)| a >> i & 1 == 1)
            .fold(T::zero(), |acc, (_, &x)| acc + x);
        let mut v = (T::one() - delta) * qa;
        if a != 0 {
            v = v + (T::one() - alpha) * delta;
        }
        if a == full {
            v = v + alpha * delta;
        }
        (a, v)
    });
    Capacity::explicit(n, values)
}

/// All coordinate permutations of each density, duplicates removed
/// (`n <= 8`). The upper envelope of the result is law invariant.
pub fn permutation_closure<T: Scalar>(densities: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    for d in densities {
        if d.len() > 8 {
            return Err(Error::SizeLimit {
                what: "density length for permutation closure",
                got: d.len(),
                max: 8,
            });
        }
        for perm in (0..d.len()).permutations(d.len()) {
            let p: Vec<T> = perm.iter().map(|&i| d[i]).collect();
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Largest grid the midpoint convexity check enumerates.
pub const MIDPOINT_GRID_MAX: usize = 1024;

/// Searches `grid^n` for a pair violating midpoint convexity
/// `E_μ[(X+Y)/2] <= (E_μ[X] + E_μ[Y]) / 2`.
pub fn midpoint_convexity_violation<T: Scalar>(
    mu: &Capacity<T>,
    grid: &[T],
    tol: T,
) -> Result<Option<(UniformSample<T>, UniformSample<T>)>> {
    let n = mu.n();
    let count = grid.len().checked_pow(n as u32).unwrap_or(usize::MAX);
    if grid.is_empty() || count > MIDPOINT_GRID_MAX {
        return Err(Error::SizeLimit {
            what: "midpoint convexity grid",
            got: count,
            max: MIDPOINT_GRID_MAX,
        });
    }
    let points: Vec<UniformSample<T>> = (0..n)
        .map(|_| grid.iter().copied())
        .multi_cartesian_product()
        .map(UniformSample::new)
        .collect::<Result<_>>()?;
    let values: Vec<T> = points
        .iter()
        .map(|x| choquet(mu, x).map(|c| c.value))
        .collect::<Result<_>>()?;
    let half = T::lit(0.5);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let mid = UniformSample::new(
                points[i]
                    .values()
                    .iter()
                    .zip(points[j].values())
                    .map(|(&a, &b)| (a + b) * half)
                    .collect(),
            )?;
            if choquet(mu, &mid)?.value > (values[i] + values[j]) * half + tol {
                return Ok(Some((points[i].clone(), points[j].clone())));
            }
        }
    }
    Ok(None)
}

/// Builds an explicit capacity from a map keyed by bitmask.
pub fn explicit_from_map<T: Scalar>(n: usize, map: &BTreeMap<Subset, T>) -> Result<Capacity<T>> {
    Capacity::explicit(n, map.iter().map(|(&a, &v)| (a, v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn square(n: usize) -> Capacity<f64> {
        Capacity::distortion_fn(n, |u| u * u).unwrap()
    }

    fn s(v: &[f64]) -> UniformSample<f64> {
        UniformSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let mu = square(2);
        assert_eq!(mu.eval(0).unwrap(), 0.0);
        assert_eq!(mu.eval(0b11).unwrap(), 1.0);
        assert!(close(mu.eval(0b10).unwrap(), 0.25));
        assert!(mu.eval(0b100).is_err());
    }

    #[test]
    fn jp_eval_is_definition() {
        let nu = Capacity::densities(2, vec![vec![1.2, 0.8], vec![0.8, 1.2]]).unwrap();
        let mu = Capacity::jp(nu.clone(), 0.8).unwrap();
        let a = nu.eval(0b01).unwrap();
        let b = nu.eval(0b10).unwrap();
        assert!(close(a, 0.6) && close(b, 0.6));
        assert!(close(mu.eval(0b01).unwrap(), 0.8 * a + 0.2 * (1.0 - b)));
        assert!(close(mu.eval(0b01).unwrap(), 0.56));
    }

    #[test]
    fn duals() {
        let p = Capacity::<f64>::probability(3).unwrap();
        for a in 0..8 {
            assert!(close(p.dual().eval(a).unwrap(), p.eval(a).unwrap()));
        }
        let mu = square(2);
        assert!(close(mu.dual().eval(0b01).unwrap(), 0.75));
        let nu = Capacity::densities(3, vec![vec![1.5, 1.0, 0.5], vec![0.5, 1.0, 1.5]]).unwrap();
        let jp = Capacity::jp(nu.clone(), 0.3).unwrap();
        let flipped = Capacity::jp(nu.clone(), 0.7).unwrap();
        let d = jp.dual();
        for a in 0..8 {
            let expect = 1.0 - jp.eval(0b111 & !a).unwrap();
            assert!(close(d.eval(a).unwrap(), expect));
            assert!(close(flipped.eval(a).unwrap(), expect));
        }
        let dd = nu.dual().dual();
        assert_eq!(dd, nu);
    }

    #[test]
    fn choquet_examples() {
        let mu = square(2);
        let c = choquet(&mu, &s(&[0.0, 1.0])).unwrap();
        assert!(close(c.value, 0.25));
        assert_eq!(c.layer_trace.len(), 2);
        let p = Capacity::probability(4).unwrap();
        let x = s(&[3.0, -1.0, 2.0, 2.0]);
        assert!(close(choquet(&p, &x).unwrap().value, x.mean()));
        assert!(close(choquet(&mu, &s(&[-4.5, -4.5])).unwrap().value, -4.5));
        assert!(choquet(&mu, &x).is_err());
    }

    #[test]
    fn survival_formula_agrees() {
        let mu = square(4);
        for v in [[3.0, -1.0, 2.0, 2.0], [-3.0, -1.0, -2.0, -7.0], [0.5, 0.0, 9.0, 1.0]] {
            let x = s(&v);
            let a = choquet(&mu, &x).unwrap().value;
            let b = choquet_survival(&mu, &x).unwrap();
            assert!(close(a, b), "{a} vs {b}");
        }
    }

    #[test]
    fn submodularity() {
        let concave = Capacity::distortion_fn(5, |u: f64| (2.0 * u).min(1.0)).unwrap();
        assert!(is_submodular(&concave).unwrap().holds());
        match is_submodular(&square(2)).unwrap() {
            Submodularity::Violated { a, b, excess } => {
                assert_eq!((a, b), (0b01, 0b10));
                assert!(close(excess, 0.5));
            }
            Submodularity::Submodular => panic!("u^2 is supermodular"),
        }
        assert!(is_submodular(&Capacity::<f64>::probability(6).unwrap()).unwrap().holds());
        let big = Capacity::<f64>::probability(17).unwrap();
        assert!(matches!(is_submodular(&big), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn law_invariance() {
        assert!(is_law_invariant(&square(5)).unwrap());
        let closed = permutation_closure(&[vec![1.5, 1.0, 0.5]]).unwrap();
        assert_eq!(closed.len(), 6);
        let fam = Capacity::densities(3, closed).unwrap();
        assert!(is_law_invariant(&fam).unwrap());
        let lopsided = Capacity::densities(3, vec![vec![1.5, 1.0, 0.5]]).unwrap();
        assert!(!is_law_invariant(&lopsided).unwrap());
        let e = Capacity::explicit(2, [(0, 0.0), (1, 0.3), (2, 0.6), (3, 1.0)]).unwrap();
        assert!(!is_law_invariant(&e).unwrap());
    }

    #[test]
    fn explicit_validation() {
        assert!(Capacity::explicit(2, [(0, 0.0), (3, 0.9)]).is_err());
        assert!(Capacity::explicit(2, [(0, 0.0), (3, 1.0), (4, 0.5)]).is_err());
        let partial = Capacity::explicit(2, [(0, 0.0), (3, 1.0)]).unwrap();
        assert!(matches!(partial.eval(1), Err(Error::Domain(_))));
    }

    #[test]
    fn polarisation() {
        let p = Capacity::<f64>::probability(3).unwrap();
        let mu = square(3);
        let one = jp_recover_nu(&mu, 1.0).unwrap();
        let zero = jp_recover_nu(&mu, 0.0).unwrap();
        for a in 0..8 {
            assert!(close(one.eval(a).unwrap(), mu.eval(a).unwrap()));
            assert!(close(zero.eval(a).unwrap(), mu.dual().eval(a).unwrap()));
        }
        assert!(matches!(jp_recover_nu(&p, 0.5), Err(Error::Domain(_))));
        let nu = Capacity::densities(3, vec![vec![1.5, 1.0, 0.5], vec![1.0, 0.2, 1.8]]).unwrap();
        let jp = Capacity::jp(nu.clone(), 0.3).unwrap();
        let back = jp_recover_nu(&jp, 0.3).unwrap();
        for a in 0..8 {
            assert!(close(back.eval(a).unwrap(), nu.eval(a).unwrap()));
        }
        assert!(Capacity::jp(nu, 0.5).is_err());
        assert!(Capacity::jp(square(3), 0.3).is_err());
    }

    #[test]
    fn neo_additive_examples() {
        let q = [0.2, 0.3, 0.5];
        let plain = neo_additive(&q, 0.0, 0.4).unwrap();
        assert!(close(plain.eval(0b101).unwrap(), 0.7));
        let extreme = neo_additive(&q, 1.0, 0.0).unwrap();
        assert_eq!(extreme.eval(0).unwrap(), 0.0);
        for a in 1..8 {
            assert!(close(extreme.eval(a).unwrap(), 1.0));
        }
        let half = neo_additive(&[0.5, 0.5], 0.5, 0.5).unwrap();
        assert!(close(half.eval(0b01).unwrap(), 0.5));
        assert!(neo_additive(&[0.5, 0.4], 0.5, 0.5).is_err());
        assert!(neo_additive(&q, 1.5, 0.5).is_err());
    }

    #[test]
    fn neo_additive_is_jp_with_flipped_weight() {
        // ν = (1-δ)Q + δ 1{A ≠ ∅} has the densities n((1-δ)q + δ e_j).
        let (q, delta, alpha) = ([0.2, 0.3, 0.5], 0.4, 0.25);
        let n = q.len();
        let dens = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| n as f64 * ((1.0 - delta) * q[i] + if i == j { delta } else { 0.0 }))
                    .collect()
            })
            .collect();
        let nu = Capacity::densities(n, dens).unwrap();
        let jp = Capacity::jp(nu, 1.0 - alpha).unwrap();
        let neo = neo_additive(&q, delta, alpha).unwrap();
        for a in 0..8 {
            assert!(close(jp.eval(a).unwrap(), neo.eval(a).unwrap()));
        }
    }

    #[test]
    fn midpoint_convexity() {
        let grid = [0.0, 1.0];
        assert!(midpoint_convexity_violation(&square(2), &grid, 1e-12).unwrap().is_some());
        let concave = Capacity::distortion_fn(3, |u: f64| u.sqrt()).unwrap();
        assert!(midpoint_convexity_violation(&concave, &[-1.0, 0.0, 2.0], 1e-12)
            .unwrap()
            .is_none());
        assert!(midpoint_convexity_violation(&square(7), &[0.0, 1.0, 2.0, 3.0], 0.0).is_err());
    }

    #[test]
    fn monotonicity() {
        let table = vec![0.0, 0.7, 0.2, 0.5, 0.1, 0.8, 0.3, 1.0];
        let bad = Capacity::from_table(3, table).unwrap();
        assert_eq!(bad.monotonicity_violation(1e-12).unwrap(), Some((1, 3)));
        assert_eq!(square(4).monotonicity_violation(1e-12).unwrap(), None);
    }

    #[test]
    fn piecewise_linear_eval() {
        let t = PiecewiseLinear::new(vec![(0.0, 0.0), (0.5, 0.8), (1.0, 1.0)]).unwrap();
        assert!(close(t.eval(0.25), 0.4));
        assert!(close(t.eval(0.75), 0.9));
        assert!(close(t.dual().eval(0.5), 0.2));
        assert!(PiecewiseLinear::new(vec![(0.0, 0.0), (0.5, 0.8), (0.5, 0.9), (1.0, 1.0)]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 0.0), (0.5, 0.8), (1.0, 0.7)]).is_err());
    }
}
