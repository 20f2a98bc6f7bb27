//! Expected Shortfall, consistent risk measures in their adjusted-ES form,
//! two reference functionals built from tail integrals, and support
//! functionals of law-invariant convex sets.
//!
//! A consistent risk measure is stored through a finite set of acceptance
//! generators `Y` and evaluated as
//! `min_Y sup_{p ∈ [0,1]} (ES_p(X) - ES_p(Y))`. The true acceptance set is
//! infinite; a finite generator set is a truncation of it, and every
//! evaluation here is exact for the truncated family.

use crate::error::{Error, Result};
use crate::laws::{merged_breakpoints, partial_integral, DiscreteLaw};
use crate::rearrange::hl_upper;
use crate::scalar::Scalar;

/// Expected Shortfall: `(1/(1-p)) ∫_p^1 q_X` for `p < 1`, the essential
/// supremum at `p = 1`.
pub fn es<T: Scalar>(x: &DiscreteLaw<T>, p: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::domain(format!("ES level {p} outside [0, 1]")));
    }
    if p == T::one() {
        return Ok(x.max_value());
    }
    Ok(partial_integral(&x.quantile_fn(), p, T::one())? / (T::one() - p))
}

/// `sup_{p ∈ [0,1]} (ES_p(x) - ES_p(y))`.
///
/// Between consecutive merged breakpoints both tail integrals are linear
/// in `p`, so the difference has the form `(a p + b)/(1 - p)`, which is
/// monotone there. The supremum is therefore attained on the breakpoint
/// set, with `p = 1` contributing `max x - max y`.
pub fn adjusted_es_sup<T: Scalar>(x: &DiscreteLaw<T>, y: &DiscreteLaw<T>) -> T {
    let qx = x.quantile_fn();
    let qy = y.quantile_fn();
    merged_breakpoints(&[qx.as_step(), qy.as_step()])
        .into_iter()
        .map(|p| {
            if p == T::one() {
                x.max_value() - y.max_value()
            } else {
                let w = T::one() - p;
                qx.as_step().integral_unchecked(p, T::one()) / w
                    - qy.as_step().integral_unchecked(p, T::one()) / w
            }
        })
        .fold(T::neg_infinity(), T::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistentRiskMeasure<T> {
    generators: Vec<DiscreteLaw<T>>,
}

impl<T: Scalar> ConsistentRiskMeasure<T> {
    pub fn new(generators: Vec<DiscreteLaw<T>>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::domain("a consistent risk measure needs at least one generator"));
        }
        Ok(ConsistentRiskMeasure { generators })
    }

    /// Generated by `δ_0` alone: `X -> max X`.
    pub fn worst_case() -> Self {
        ConsistentRiskMeasure {
            generators: vec![DiscreteLaw::point(T::zero())],
        }
    }

    pub fn generators(&self) -> &[DiscreteLaw<T>] {
        &self.generators
    }

    /// Value and index of the minimising generator (first on ties).
    pub fn eval_argmin(&self, x: &DiscreteLaw<T>) -> (T, usize) {
        let mut best = (T::infinity(), 0);
        for (i, g) in self.generators.iter().enumerate() {
            let v = adjusted_es_sup(x, g);
            if v < best.0 {
                best = (v, i);
            }
        }
        best
    }

    pub fn eval(&self, x: &DiscreteLaw<T>) -> T {
        self.eval_argmin(x).0
    }
}

pub fn crm_eval<T: Scalar>(phi: &ConsistentRiskMeasure<T>, x: &DiscreteLaw<T>) -> T {
    phi.eval(x)
}

/// `ρ(X) = E[X]/2 + ∫_{1/2}^1 q_X(s) ds`.
pub fn rho_example<T: Scalar>(x: &DiscreteLaw<T>) -> T {
    let half = T::lit(0.5);
    half * x.mean() + x.quantile_fn().as_step().integral_unchecked(half, T::one())
}

/// `φ(X) = ρ(X)` when `ρ(X) < 0`, otherwise `max(E[X], 0)/2`.
///
/// Quasiconvex and law invariant, with sublevel sets `{ρ <= m}` for
/// `m < 0` and `{E[X] <= 2m}` for `m >= 0`.
pub fn phi_example<T: Scalar>(x: &DiscreteLaw<T>) -> T {
    let rho = rho_example(x);
    if rho < T::zero() {
        rho
    } else {
        T::lit(0.5) * x.mean().max(T::zero())
    }
}

/// Law-invariant convex set described by generators (all rearrangements
/// of each generator belong to the set, as does their convex hull),
/// recession directions, and optionally closure under adding nonnegative
/// constants.
#[derive(Clone, Debug, PartialEq)]
pub struct LawInvariantSet<T> {
    generators: Vec<DiscreteLaw<T>>,
    rays: Vec<DiscreteLaw<T>>,
    increasing: bool,
}

impl<T: Scalar> LawInvariantSet<T> {
    pub fn new(generators: Vec<DiscreteLaw<T>>, rays: Vec<DiscreteLaw<T>>, increasing: bool) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::domain("a law-invariant set needs at least one generator"));
        }
        Ok(LawInvariantSet {
            generators,
            rays,
            increasing,
        })
    }

    pub fn generators(&self) -> &[DiscreteLaw<T>] {
        &self.generators
    }

    pub fn rays(&self) -> &[DiscreteLaw<T>] {
        &self.rays
    }

    pub fn increasing(&self) -> bool {
        self.increasing
    }

    /// The directions of unbounded growth, including the constant `+1`
    /// when the set is increasing.
    fn all_rays(&self) -> impl Iterator<Item = DiscreteLaw<T>> + '_ {
        self.rays
            .iter()
            .cloned()
            .chain(self.increasing.then(|| DiscreteLaw::point(T::one())))
    }

    /// Dual membership test: `∫ q_x q_y <= σ_C(y)` for every probe `y`.
    ///
    /// The probe family consists of the constants `±1` and, for every `p`
    /// in the merged breakpoint grid of `x`, the generators and the rays
    /// (and its reflection `1 - p`), the tail indicator law
    /// `{(0, p), (1, 1 - p)}` and its negative. For the hull of a single
    /// generator this is exactly the convex-order test; in general it is
    /// an outer approximation.
    pub fn contains(&self, x: &DiscreteLaw<T>, tol: T) -> bool {
        self.probe_family(x)
            .iter()
            .all(|y| hl_upper(x, y) <= support_functional(self, y) + tol)
    }

    fn probe_family(&self, x: &DiscreteLaw<T>) -> Vec<DiscreteLaw<T>> {
        let qs: Vec<_> = std::iter::once(x)
            .chain(&self.generators)
            .chain(&self.rays)
            .map(|l| l.quantile_fn())
            .collect();
        let steps: Vec<_> = qs.iter().map(|q| q.as_step()).collect();
        let grid = merged_breakpoints(&steps);
        let mut probes = vec![DiscreteLaw::point(T::one()), DiscreteLaw::point(-T::one())];
        let eps = T::lit(T::MERGE_EPS);
        for &b in &grid {
            for p in [b, T::one() - b] {
                if p > eps && p < T::one() - eps {
                    let tail = DiscreteLaw::new([(T::zero(), p), (T::one(), T::one() - p)])
                        .expect("tail indicator is a valid law");
                    probes.push(tail.reflected());
                    probes.push(tail);
                }
            }
        }
        probes
    }
}

/// `σ_C(y) = sup_{X ∈ C} E[XY]`, possibly `+∞`.
pub fn support_functional<T: Scalar>(c: &LawInvariantSet<T>, y: &DiscreteLaw<T>) -> T {
    support_functional_tol(c, y, T::tol())
}

pub fn support_functional_tol<T: Scalar>(c: &LawInvariantSet<T>, y: &DiscreteLaw<T>, tol: T) -> T {
    if c.all_rays().any(|r| hl_upper(&r, y) > tol) {
        return T::infinity();
    }
    c.generators
        .iter()
        .map(|g| hl_upper(g, y))
        .fold(T::neg_infinity(), T::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecessionVerdict<T> {
    /// Some ray is nonconstant with zero mean.
    pub collapsed: bool,
    /// `(-σ_C(-1), σ_C(1))`; either end may be infinite.
    pub bounds: (T, T),
    /// Indices of probe laws whose membership disagrees with the mean
    /// bounds. Only filled when collapsed.
    pub disagreements: Vec<usize>,
}

/// Checks for a centered nonconstant recession direction. When one exists
/// membership must be decided by the mean alone, which is verified on
/// `probes`.
pub fn recession_collapse_check<T: Scalar>(
    c: &LawInvariantSet<T>,
    probes: &[DiscreteLaw<T>],
) -> RecessionVerdict<T> {
    recession_collapse_check_tol(c, probes, T::tol())
}

pub fn recession_collapse_check_tol<T: Scalar>(
    c: &LawInvariantSet<T>,
    probes: &[DiscreteLaw<T>],
    tol: T,
) -> RecessionVerdict<T> {
    let collapsed = c
        .rays
        .iter()
        .any(|r| !r.is_constant() && r.mean().abs() <= tol);
    let upper = support_functional_tol(c, &DiscreteLaw::point(T::one()), tol);
    let lower = -support_functional_tol(c, &DiscreteLaw::point(-T::one()), tol);
    let disagreements = if collapsed {
        probes
            .iter()
            .enumerate()
            .filter(|(_, x)| {
                let m = x.mean();
                let by_mean = m >= lower - tol && m <= upper + tol;
                c.contains(x, tol) != by_mean
            })
            .map(|(i, _)| i)
            .collect()
    } else {
        Vec::new()
    };
    RecessionVerdict {
        collapsed,
        bounds: (lower, upper),
        disagreements,
    }
}
