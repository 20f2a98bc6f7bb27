//! Budget-constrained maximisation `max φ(X)` over `X ∈ C` with
//! `E[DX] = p`, on the `n`-point equiprobable space.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::collapse::{ExpectedShortfall, Expectation, FnFunctional, Functional};
use crate::error::{Error, Result};
use crate::laws::{ssd_dominated_tol, DiscreteLaw, UniformSample};
use crate::rearrange::{couple, is_antimonotone, CouplingKind};
use crate::scalar::{cmp, Scalar};

/// Largest sample size accepted by the exhaustive searches.
pub const EXHAUSTIVE_MAX_N: usize = 7;

#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec<T> {
    /// Laws of the generators, optionally translated: by any real when
    /// `allow_shift`, by nonnegative constants when `increasing`.
    RearrangementClosure {
        generators: Vec<DiscreteLaw<T>>,
        allow_shift: bool,
        increasing: bool,
    },
    /// `a <= X <= b`.
    Interval { a: T, b: T },
    /// `E[X] <= bound`.
    MeanHalfSpace { bound: T },
    /// `X` below `top` in increasing convex order.
    PreferenceBounded { top: DiscreteLaw<T> },
}

impl<T: Scalar> DomainSpec<T> {
    pub fn interval(a: T, b: T) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!("interval needs finite a < b, got [{a}, {b}]")));
        }
        Ok(DomainSpec::Interval { a, b })
    }

    pub fn rearrangement_closure(generators: Vec<DiscreteLaw<T>>, allow_shift: bool, increasing: bool) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::domain("a rearrangement closure needs a generator"));
        }
        Ok(DomainSpec::RearrangementClosure {
            generators,
            allow_shift,
            increasing,
        })
    }

    /// Closed under adding nonnegative constants.
    pub fn is_increasing(&self) -> bool {
        match self {
            DomainSpec::RearrangementClosure {
                allow_shift, increasing, ..
            } => *allow_shift || *increasing,
            _ => false,
        }
    }

    pub fn contains(&self, x: &UniformSample<T>, tol: T) -> bool {
        match self {
            DomainSpec::Interval { a, b } => x.values().iter().all(|&v| v >= *a - tol && v <= *b + tol),
            DomainSpec::MeanHalfSpace { bound } => x.mean() <= *bound + tol,
            _ => self.contains_law(&x.law(), tol),
        }
    }

    pub fn contains_law(&self, x: &DiscreteLaw<T>, tol: T) -> bool {
        match self {
            DomainSpec::RearrangementClosure {
                generators,
                allow_shift,
                increasing,
            } => generators.iter().any(|g| {
                let m = x.mean() - g.mean();
                let shift_ok = if *allow_shift {
                    true
                } else if *increasing {
                    m >= -tol
                } else {
                    m.abs() <= tol
                };
                shift_ok && g.shifted(m).approx_eq(x, tol)
            }),
            DomainSpec::Interval { a, b } => x.min_value() >= *a - tol && x.max_value() <= *b + tol,
            DomainSpec::MeanHalfSpace { bound } => x.mean() <= *bound + tol,
            DomainSpec::PreferenceBounded { top } => ssd_dominated_tol(top, x, tol),
        }
    }
}

/// `(φ, C, D, p)`.
pub struct FeasibleQuadruple<T: Scalar> {
    phi: Box<dyn Functional<T>>,
    domain: DomainSpec<T>,
    d: UniformSample<T>,
    p: T,
}

impl<T: Scalar> fmt::Debug for FeasibleQuadruple<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FeasibleQuadruple")
            .field("phi", &self.phi.name())
            .field("domain", &self.domain)
            .field("d", &self.d)
            .field("p", &self.p)
            .finish()
    }
}

impl<T: Scalar> FeasibleQuadruple<T> {
    pub fn new(phi: Box<dyn Functional<T>>, domain: DomainSpec<T>, d: UniformSample<T>, p: T) -> Result<Self> {
        if !phi.law_invariant() {
            return Err(Error::precondition(format!("{} is not flagged law invariant", phi.name())));
        }
        if !(d.mean() > T::zero()) {
            return Err(Error::domain(format!("pricing density needs E[D] > 0, got {}", d.mean())));
        }
        if !p.is_finite() {
            return Err(Error::domain("budget level must be finite"));
        }
        Ok(FeasibleQuadruple { phi, domain, d, p })
    }

    pub fn phi(&self) -> &dyn Functional<T> {
        self.phi.as_ref()
    }

    pub fn domain(&self) -> &DomainSpec<T> {
        &self.domain
    }

    pub fn d(&self) -> &UniformSample<T> {
        &self.d
    }

    pub fn p(&self) -> T {
        self.p
    }

    fn budget_tol(&self) -> T {
        T::tol() * (T::one() + self.p.abs())
    }

    /// `|E[DX] - p|`.
    pub fn budget_residual(&self, x: &UniformSample<T>) -> Result<T> {
        Ok((x.dot(&self.d)? - self.p).abs())
    }

    pub fn is_feasible(&self, x: &UniformSample<T>, tol: T) -> bool {
        x.n() == self.d.n()
            && self.domain.contains(x, tol)
            && self
                .budget_residual(x)
                .map(|r| r <= self.budget_tol().max(tol))
                .unwrap_or(false)
    }

    /// Shift that moves `x` onto the budget line.
    fn budget_shift(&self, x: &UniformSample<T>) -> Result<T> {
        Ok((self.p - x.dot(&self.d)?) / self.d.mean())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<T> {
    pub solution: UniformSample<T>,
    pub value: T,
    pub antimonotone_with_d: bool,
    /// One entry per generator: its antimonotone, budget-shifted candidate.
    pub improvement_trace: Vec<(UniformSample<T>, T)>,
    pub generator: usize,
}

fn require_increasing<T: Scalar>(q: &FeasibleQuadruple<T>) -> Result<()> {
    if !q.domain.is_increasing() {
        return Err(Error::precondition("antimonotone improvement requires an increasing domain"));
    }
    if !q.phi.weakly_increasing() {
        return Err(Error::precondition(format!("{} is not flagged weakly increasing", q.phi.name())));
    }
    Ok(())
}

/// Replaces `x` by its antimonotone rearrangement with `d`, then adds the
/// constant `m = (E[Dx] - E[Dx']) / E[D] >= 0` that restores the budget.
pub fn antimonotone_improve<T: Scalar>(q: &FeasibleQuadruple<T>, x: &UniformSample<T>, tol: T) -> Result<UniformSample<T>> {
    require_increasing(q)?;
    if x.n() != q.d.n() {
        return Err(Error::domain(format!("x has {} atoms, d has {}", x.n(), q.d.n())));
    }
    let r = q.budget_residual(x)?;
    if r > q.budget_tol().max(tol) {
        return Err(Error::domain(format!("x misses the budget by {r}")));
    }
    if !q.domain.contains(x, tol) {
        return Err(Error::domain("x is not in the domain"));
    }
    let anti = couple(&x.law(), &q.d, CouplingKind::Antimonotone)?;
    let m = (x.dot(&q.d)? - anti.inner_product) / q.d.mean();
    Ok(anti.x_rearranged.shifted(m.max(T::zero())))
}

/// Best antimonotone candidate over the generators of an increasing
/// rearrangement-closed domain. Ties go to the lowest generator index.
pub fn solve<T: Scalar>(q: &FeasibleQuadruple<T>) -> Result<SolveReport<T>> {
    let (generators, allow_shift) = match &q.domain {
        DomainSpec::RearrangementClosure {
            generators,
            allow_shift,
            increasing,
        } if *allow_shift || *increasing => (generators, *allow_shift),
        _ => {
            return Err(Error::precondition(
                "solve needs an increasing rearrangement-closed domain",
            ))
        }
    };
    if !q.phi.weakly_increasing() {
        return Err(Error::precondition(format!("{} is not flagged weakly increasing", q.phi.name())));
    }
    let tol = q.budget_tol();
    let mut trace = Vec::new();
    let mut best: Option<(usize, T)> = None;
    for (i, g) in generators.iter().enumerate() {
        let anti = couple(g, &q.d, CouplingKind::Antimonotone)?.x_rearranged;
        let m = q.budget_shift(&anti)?;
        if !allow_shift && m < -tol {
            continue;
        }
        let cand = anti.shifted(m);
        let v = q.phi.eval_sample(&cand);
        if v == T::infinity() {
            return Err(Error::precondition("the optimal value is not finite"));
        }
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((trace.len(), v));
        }
        trace.push((cand, v, i));
    }
    let (k, value) = best.ok_or_else(|| Error::Infeasible("no generator admits a budget-feasible shift".into()))?;
    let (solution, _, generator) = trace[k].clone();
    Ok(SolveReport {
        antimonotone_with_d: is_antimonotone(&solution, &q.d, T::tol()),
        solution,
        value,
        improvement_trace: trace.into_iter().map(|(c, v, _)| (c, v)).collect(),
        generator,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveOptimum<T> {
    pub value: T,
    /// Every feasible point attaining `value` within tolerance.
    pub optima: Vec<UniformSample<T>>,
    pub candidates: usize,
}

fn distinct_permutations<T: Scalar>(x: &UniformSample<T>) -> Vec<UniformSample<T>> {
    let n = x.n();
    let mut out: Vec<Vec<T>> = (0..n)
        .permutations(n)
        .map(|perm| perm.iter().map(|&j| x.values()[j]).collect())
        .collect();
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(u, v)| cmp(u, v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out.dedup();
    out.into_iter()
        .map(|v| UniformSample::new(v).expect("values come from a valid sample"))
        .collect()
}

/// Enumerates every feasible point of a rearrangement-closed domain: each
/// arrangement of each generator, shifted onto the budget line.
pub fn exhaustive_optimum<T: Scalar>(q: &FeasibleQuadruple<T>, tol: T) -> Result<ExhaustiveOptimum<T>> {
    let n = q.d.n();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::SizeLimit {
            what: "exhaustive optimum sample size",
            got: n,
            max: EXHAUSTIVE_MAX_N,
        });
    }
    let DomainSpec::RearrangementClosure {
        generators,
        allow_shift,
        increasing,
    } = &q.domain
    else {
        return Err(Error::precondition("exhaustive search needs a rearrangement-closed domain"));
    };
    let btol = q.budget_tol();
    let mut feasible = Vec::new();
    for g in generators {
        let base = UniformSample::sorted_from_law(g, n)?;
        for perm in distinct_permutations(&base) {
            let m = q.budget_shift(&perm)?;
            let ok = *allow_shift || (*increasing && m >= -btol) || m.abs() <= btol;
            if ok {
                let c = perm.shifted(if *allow_shift || *increasing { m } else { T::zero() });
                let v = q.phi.eval_sample(&c);
                feasible.push((c, v));
            }
        }
    }
    if feasible.is_empty() {
        return Err(Error::Infeasible("no arrangement meets the budget".into()));
    }
    let value = feasible.iter().map(|(_, v)| *v).fold(T::neg_infinity(), T::max);
    let candidates = feasible.len();
    let optima = feasible
        .into_iter()
        .filter(|(_, v)| *v >= value - tol || *v == value)
        .map(|(c, _)| c)
        .collect();
    Ok(ExhaustiveOptimum {
        value,
        optima,
        candidates,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    /// `C = {E[X] <= 0}`, `φ = E`.
    MeanHalfSpace,
    /// `C = {Z' + m}`, `φ = -|E[X]|` on `C`.
    ShiftClosure,
    /// `C = {a <= X <= b}`, `φ` an upper tail average.
    Interval,
    /// `C = {X below B in increasing convex order}`, `φ = E`.
    PreferenceBounded,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 4] = [
        ScenarioName::MeanHalfSpace,
        ScenarioName::ShiftClosure,
        ScenarioName::Interval,
        ScenarioName::PreferenceBounded,
    ];

    pub fn letter(self) -> char {
        match self {
            ScenarioName::MeanHalfSpace => 'a',
            ScenarioName::ShiftClosure => 'b',
            ScenarioName::Interval => 'c',
            ScenarioName::PreferenceBounded => 'd',
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| {
                let name = serde_json::to_value(n).ok();
                s.len() == 1 && s.starts_with(n.letter()) || name.as_ref().and_then(|v| v.as_str()) == Some(s)
            })
            .ok_or_else(|| Error::domain(format!("unknown scenario {s:?}; expected a, b, c or d")))
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).map_err(|_| fmt::Error)?;
        f.write_str(v.as_str().unwrap_or_default())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedOutcome {
    pub no_antimonotone_optimum: bool,
    pub non_antimonotone_optimum: bool,
}

#[derive(Debug)]
pub struct Scenario<T: Scalar> {
    pub name: ScenarioName,
    pub quadruple: FeasibleQuadruple<T>,
    /// The optimal solution built by the construction; comonotone with `d`.
    pub z: UniformSample<T>,
    pub expected: ExpectedOutcome,
}

/// Builds the counterexample quadruple for a nonconstant pricing density.
pub fn counterexample_scenario<T: Scalar>(name: ScenarioName, d: &UniformSample<T>) -> Result<Scenario<T>> {
    if d.is_constant() {
        return Err(Error::precondition("collapse: pricing rule is the expectation"));
    }
    let md = d.mean();
    if !(md > T::zero()) {
        return Err(Error::domain(format!("pricing density needs E[D] > 0, got {md}")));
    }
    let centered = d.shifted(-md);
    let (phi, domain, z): (Box<dyn Functional<T>>, DomainSpec<T>, UniformSample<T>) = match name {
        ScenarioName::MeanHalfSpace => (
            Box::new(Expectation),
            DomainSpec::MeanHalfSpace { bound: T::zero() },
            centered,
        ),
        ScenarioName::ShiftClosure => {
            let zl = centered.law();
            let domain = DomainSpec::rearrangement_closure(vec![zl], true, false)?;
            let member = domain.clone();
            let phi = FnFunctional::new("minus-abs-mean-on-shifts", move |x: &DiscreteLaw<T>| {
                if member.contains_law(x, T::collapse_tol()) {
                    -x.mean().abs()
                } else {
                    T::infinity()
                }
            });
            (Box::new(phi), domain, centered)
        }
        ScenarioName::Interval => {
            let (a, b) = (T::zero(), T::one());
            let n = d.n();
            let mut levels = d.values().to_vec();
            levels.sort_by(cmp);
            levels.dedup();
            let k = levels[..levels.len() - 1]
                .iter()
                .copied()
                .find(|&k| d.values().iter().filter(|&&v| v <= k).copied().sum::<T>() != T::zero())
                .ok_or_else(|| Error::precondition("no threshold k with E[D 1{D <= k}] != 0"))?;
            let below = d.values().iter().filter(|&&v| v <= k).count();
            let level = T::from_usize_lossy(below) / T::from_usize_lossy(n);
            let z = d.map(|v| if v <= k { a } else { b })?;
            (Box::new(ExpectedShortfall::new(level)?), DomainSpec::interval(a, b)?, z)
        }
        ScenarioName::PreferenceBounded => (
            Box::new(Expectation),
            DomainSpec::PreferenceBounded { top: centered.law() },
            centered,
        ),
    };
    let p = z.dot(d)?;
    Ok(Scenario {
        name,
        quadruple: FeasibleQuadruple::new(phi, domain, d.clone(), p)?,
        z,
        expected: ExpectedOutcome {
            no_antimonotone_optimum: true,
            non_antimonotone_optimum: true,
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioCheck<T> {
    pub outcome: ExpectedOutcome,
    /// Best value found, at least `φ(Z)`.
    pub value: T,
    pub candidates: usize,
    /// An antimonotone candidate attaining the best value, if any.
    pub antimonotone_optimum: Option<UniformSample<T>>,
    pub notes: String,
}

fn value_grid<T: Scalar>(domain: &DomainSpec<T>, z: &UniformSample<T>) -> Vec<T> {
    match domain {
        DomainSpec::Interval { a, b } => (0..5)
            .map(|i| *a + (*b - *a) * T::from_usize_lossy(i) / T::lit(4.0))
            .collect(),
        _ => {
            let s = z.values().iter().fold(T::zero(), |m, v| m.max(v.abs()));
            (-2..=2).map(|i| T::from_i32(i).expect("small integer") * s).collect()
        }
    }
}

/// Antimonotone points of `[a, b]` on the budget line: `b` on the `t`
/// atoms with smallest `d`, `a` above rank `t`, and the value at rank `t`
/// solved from the budget.
fn interval_threshold_candidates<T: Scalar>(q: &FeasibleQuadruple<T>, a: T, b: T) -> Result<Vec<UniformSample<T>>> {
    let d = q.d.values();
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| cmp(&d[i], &d[j]).then(i.cmp(&j)));
    let nn = T::from_usize_lossy(n);
    let mut out = Vec::new();
    for t in 0..n {
        let mut x = vec![a; n];
        let mut rest = T::zero();
        for (r, &i) in order.iter().enumerate() {
            if r < t {
                x[i] = b;
                rest = rest + b * d[i];
            } else if r > t {
                rest = rest + a * d[i];
            }
        }
        let dt = d[order[t]];
        if dt != T::zero() {
            x[order[t]] = (q.p * nn - rest) / dt;
            out.push(UniformSample::new(x)?);
        }
    }
    Ok(out)
}

/// Verifies a scenario's outcome by search.
///
/// Candidates: every arrangement of `Z` and every sorted multiset on a
/// five-point value grid, each in antimonotone and comonotone placement
/// with `d`, shifted onto the budget line. Interval domains add the
/// antimonotone threshold points, which contain an antimonotone optimum
/// whenever one exists.
pub fn check_scenario<T: Scalar>(s: &Scenario<T>, tol: T) -> Result<ScenarioCheck<T>> {
    let q = &s.quadruple;
    let n = q.d.n();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::SizeLimit {
            what: "scenario check sample size",
            got: n,
            max: EXHAUSTIVE_MAX_N,
        });
    }
    let z_value = q.phi.eval_sample(&s.z);
    let z_feasible = q.is_feasible(&s.z, tol);

    let mut bases = distinct_permutations(&s.z);
    for combo in value_grid(&q.domain, &s.z).into_iter().combinations_with_replacement(n) {
        let u = UniformSample::new(combo)?;
        for kind in [CouplingKind::Antimonotone, CouplingKind::Comonotone] {
            bases.push(couple(&u.law(), &q.d, kind)?.x_rearranged);
        }
    }
    let mut points: Vec<UniformSample<T>> = Vec::with_capacity(bases.len());
    for base in &bases {
        points.push(base.shifted(q.budget_shift(base)?));
    }
    if let DomainSpec::Interval { a, b } = q.domain {
        points.extend(interval_threshold_candidates(q, a, b)?);
    }
    let mut best = z_value;
    let mut anti_best: Option<(T, &UniformSample<T>)> = None;
    let mut candidates = 0;
    for c in &points {
        if !q.is_feasible(c, tol) {
            continue;
        }
        candidates += 1;
        let v = q.phi.eval_sample(c);
        best = best.max(v);
        if is_antimonotone(c, &q.d, tol) && anti_best.is_none_or(|(w, _)| v > w) {
            anti_best = Some((v, c));
        }
    }
    let anti_value = anti_best.map_or(T::neg_infinity(), |(v, _)| v);
    let z_optimal = z_feasible && z_value >= best - tol;
    let outcome = ExpectedOutcome {
        no_antimonotone_optimum: anti_value < best - tol,
        non_antimonotone_optimum: z_optimal && !is_antimonotone(&s.z, &q.d, tol),
    };
    let antimonotone_optimum = anti_best
        .filter(|(v, _)| *v >= best - tol)
        .map(|(_, c)| c.clone());
    Ok(ScenarioCheck {
        outcome,
        value: best,
        candidates,
        antimonotone_optimum,
        notes: format!(
            "scenario {} ({}): {} feasible candidates, best antimonotone value {anti_value}",
            s.name.letter(),
            s.name,
            candidates
        ),
    })
}
