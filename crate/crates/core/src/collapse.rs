//! Numeric detectors for the collapse of law-invariant functionals to the
//! expectation.
//!
//! Statements quantified over every random variable can only be probed on
//! finite families here: translation grids, indicator patterns, random
//! mean-preserving spreads. Each verdict records the family it used in
//! its notes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::capacities::{choquet, full_set, is_law_invariant, jp_recover_nu, Capacity, CapacityKind};
use crate::error::{Error, Result};
use crate::laws::{dilate, DiscreteLaw, UniformSample};
use crate::probes;
use crate::rearrange::{hl_lower, hl_upper};
use crate::riskmeasures::{es, phi_example, rho_example, ConsistentRiskMeasure};
use crate::scalar::Scalar;

/// A functional on finite laws with values in `(-∞, ∞]`.
///
/// Capability flags are declared by the implementor; they are not proved.
pub trait Functional<T: Scalar> {
    fn name(&self) -> String;

    fn eval(&self, x: &DiscreteLaw<T>) -> T;

    fn law_invariant(&self) -> bool {
        true
    }

    /// `φ(X + m) >= φ(X)` for `m >= 0`.
    fn weakly_increasing(&self) -> bool {
        false
    }

    /// `φ(X + m) > φ(X)` for `m > 0` whenever `φ(X)` is finite.
    fn increasing(&self) -> bool {
        false
    }

    fn eval_sample(&self, x: &UniformSample<T>) -> T {
        self.eval(&x.law())
    }
}

impl<T: Scalar, F: Functional<T> + ?Sized> Functional<T> for Box<F> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn eval(&self, x: &DiscreteLaw<T>) -> T {
        (**self).eval(x)
    }
    fn law_invariant(&self) -> bool {
        (**self).law_invariant()
    }
    fn weakly_increasing(&self) -> bool {
        (**self).weakly_increasing()
    }
    fn increasing(&self) -> bool {
        (**self).increasing()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Expectation;

impl<T: Scalar> Functional<T> for Expectation {
    fn name(&self) -> String {
        "mean".into()
    }
    fn eval(&self, x: &DiscreteLaw<T>) -> T {
        x.mean()
    }
    fn weakly_increasing(&self) -> bool {
        true
    }
    fn increasing(&self) -> bool {
        true
    }
}

/// `X -> ES_p(X)`; also the tail average `1/(1-p) ∫_p^1 q_X`.
#[derive(Clone, Copy, Debug)]
pub struct ExpectedShortfall<T> {
    pub p: T,
}

impl<T: Scalar> ExpectedShortfall<T> {
    pub fn new(p: T) -> Result<Self> {
        es(&DiscreteLaw::point(T::zero()), p)?;
        Ok(ExpectedShortfall { p })
    }
}

impl<T: Scalar> Functional<T> for ExpectedShortfall<T> {
    fn name(&self) -> String {
        format!("es({})", self.p)
    }
    fn eval(&self, x: &DiscreteLaw<T>) -> T {
        es(x, self.p).expect("level validated at construction")
    }
    fn weakly_increasing(&self) -> bool {
        true
    }
    fn increasing(&self) -> bool {
        true
    }
}

impl<T: Scalar> Functional<T> for ConsistentRiskMeasure<T> {
    fn name(&self) -> String {
        format!("crm[{} generators]", self.generators().len())
    }
    fn eval(&self, x: &DiscreteLaw<T>) -> T {
        ConsistentRiskMeasure::eval(self, x)
    }
    fn weakly_increasing(&self) -> bool {
        true
    }
    fn increasing(&self) -> bool {
        true
    }
}

/// `ρ(X) = E[X]/2 + ∫_{1/2}^1 q_X`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RhoExample;

impl<T: Scalar> Functional<T> for RhoExample {
    fn name(&self) -> String {
        "rho".into()
    }
    fn eval(&self, x: &DiscreteLaw<T>) -> T {
        rho_example(x)
    }
    fn weakly_increasing(&self) -> bool {
        true
    }
    fn increasing(&self) -> bool {
        true
    }
}

/// The quasiconvex functional assembled from `ρ` and the mean.
#[derive(Clone, Copy, Debug, Default)]
pub struct PhiExample;

impl<T: Scalar> Functional<T> for PhiExample {
    fn name(&self) -> String {
        "phi-example".into()
    }
    fn eval(&self, x: &DiscreteLaw<T>) -> T {
        phi_example(x)
    }
    fn weakly_increasing(&self) -> bool {
        true
    }
}

/// `X -> -ρ(-X)`: turns a loss-based risk measure into a gain objective.
#[derive(Clone, Debug)]
pub struct Negated<F>(pub F);

impl<T: Scalar, F: Functional<T>> Functional<T> for Negated<F> {
    fn name(&self) -> String {
        format!("-{}(-X)", self.0.name())
    }
    fn eval(&self, x: &DiscreteLaw<T>) -> T {
        -self.0.eval(&x.reflected())
    }
    fn law_invariant(&self) -> bool {
        self.0.law_invariant()
    }
    fn weakly_increasing(&self) -> bool {
        self.0.weakly_increasing()
    }
    fn increasing(&self) -> bool {
        self.0.increasing()
    }
}

type LawFn<T> = Box<dyn Fn(&DiscreteLaw<T>) -> T + Send + Sync>;

/// Functional defined by a closure on laws.
pub struct FnFunctional<T> {
    name: String,
    f: LawFn<T>,
    law_invariant: bool,
    weakly_increasing: bool,
    increasing: bool,
}

impl<T: Scalar> FnFunctional<T> {
    pub fn new(name: impl Into<String>, f: impl Fn(&DiscreteLaw<T>) -> T + Send + Sync + 'static) -> Self {
        FnFunctional {
            name: name.into(),
            f: Box::new(f),
            law_invariant: true,
            weakly_increasing: false,
            increasing: false,
        }
    }

    pub fn with_flags(mut self, law_invariant: bool, weakly_increasing: bool, increasing: bool) -> Self {
        self.law_invariant = law_invariant;
        self.weakly_increasing = weakly_increasing;
        self.increasing = increasing;
        self
    }
}

impl<T: Scalar> Functional<T> for FnFunctional<T> {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn eval(&self, x: &DiscreteLaw<T>) -> T {
        (self.f)(x)
    }
    fn law_invariant(&self) -> bool {
        self.law_invariant
    }
    fn weakly_increasing(&self) -> bool {
        self.weakly_increasing
    }
    fn increasing(&self) -> bool {
        self.increasing
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness<T> {
    Law(DiscreteLaw<T>),
    Pair(DiscreteLaw<T>, DiscreteLaw<T>),
    Sample(UniformSample<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseVerdict<T> {
    pub collapsed: bool,
    pub witness: Option<Witness<T>>,
    /// Measured violation or slack, never negative.
    pub gap: T,
    pub notes: String,
}

fn require_law_invariant<T: Scalar>(phi: &dyn Functional<T>) -> Result<()> {
    if !phi.law_invariant() {
        return Err(Error::precondition(format!(
            "{} is not flagged law invariant",
            phi.name()
        )));
    }
    Ok(())
}

fn gap_of<T: Scalar>(a: T, b: T) -> T {
    if a == b {
        // Covers +∞ = +∞.
        T::zero()
    } else {
        (a - b).abs()
    }
}

/// Measures `max_t |φ(x0 + tZ) - φ(x0) - a t|` over `t_grid`.
pub fn translation_line_test<T: Scalar>(
    phi: &dyn Functional<T>,
    x0: T,
    z: &DiscreteLaw<T>,
    a: T,
    t_grid: &[T],
    tol: T,
) -> Result<CollapseVerdict<T>> {
    require_law_invariant(phi)?;
    if t_grid.is_empty() {
        return Err(Error::domain("translation grid is empty"));
    }
    let base = phi.eval(&DiscreteLaw::point(x0));
    if !base.is_finite() {
        return Err(Error::precondition("x0 must lie in dom(φ) ∩ R"));
    }
    let mut gap = T::zero();
    let mut worst: Option<DiscreteLaw<T>> = None;
    for &t in t_grid {
        let moved = z.affine(t, x0);
        let g = gap_of(phi.eval(&moved), base + a * t);
        if g > gap || worst.is_none() {
            gap = gap.max(g);
            worst = Some(moved);
        }
    }
    let one_sided = t_grid.iter().all(|&t| t >= T::zero()) || t_grid.iter().all(|&t| t <= T::zero());
    let notes = format!(
        "{} on a {}t-grid of {} points, slope {a}",
        phi.name(),
        if one_sided { "one-sided " } else { "" },
        t_grid.len()
    );
    Ok(CollapseVerdict {
        collapsed: gap <= tol,
        witness: worst.map(Witness::Law),
        gap,
        notes,
    })
}

/// Runs the chain of inequalities that turns linearity along `z` into
/// constancy of any minorant density.
///
/// Hypotheses: `φ` is affine along `z` through the constant `x0` (checked
/// on the grid `-k_max..=k_max`) and `φ(X) >= E[XY] + offset` for every
/// `X`. Then for each `k` the rearrangement spread
/// `hl_upper(z, y) - hl_lower(z, y)` is at most
/// `2 (φ(x0) - offset - x0 E[y]) / k`. The verdict is collapsed when
/// some `k <= k_max` already forces the spread to zero, i.e. a
/// nonconstant `y` is refuted (and returned as witness) or `y` is
/// constant.
pub fn meta_gap_certificate<T: Scalar>(
    phi: &dyn Functional<T>,
    x0: T,
    z: &DiscreteLaw<T>,
    y: &DiscreteLaw<T>,
    offset: T,
    k_max: usize,
    tol: T,
) -> Result<CollapseVerdict<T>> {
    require_law_invariant(phi)?;
    if z.is_constant() {
        return Err(Error::precondition("the translation direction must be a nonconstant Z"));
    }
    if k_max == 0 {
        return Err(Error::domain("k_max must be positive"));
    }
    let base = phi.eval(&DiscreteLaw::point(x0));
    if !base.is_finite() {
        return Err(Error::precondition("x0 must lie in dom(φ) ∩ R"));
    }
    let slope = phi.eval(&z.affine(T::one(), x0)) - base;
    let k = k_max as i64;
    let grid: Vec<T> = (-k..=k).map(|t| T::from_i64(t).expect("small integer")).collect();
    let line = translation_line_test(phi, x0, z, slope, &grid, tol)?;
    if !line.collapsed {
        return Err(Error::precondition(format!(
            "φ is not affine along Z at x0 (deviation {})",
            line.gap
        )));
    }
    let slack = base - offset - x0 * y.mean();
    if slack < -tol {
        return Err(Error::precondition(format!(
            "the minorant E[XY] + offset exceeds φ at x0 by {}",
            -slack
        )));
    }
    if y.is_constant() {
        return Ok(CollapseVerdict {
            collapsed: true,
            witness: None,
            gap: T::zero(),
            notes: "y is constant; nothing to refute".into(),
        });
    }
    let spread = hl_upper(z, y) - hl_lower(z, y);
    let two = T::lit(2.0);
    for k in 1..=k_max {
        let bound = two * slack / T::from_usize_lossy(k);
        if spread > bound + tol {
            return Ok(CollapseVerdict {
                collapsed: true,
                witness: Some(Witness::Law(y.clone())),
                gap: T::zero(),
                notes: format!(
                    "contradiction at k = {k}: spread {spread} exceeds bound {bound}; \
                     a nonconstant y cannot minorise φ"
                ),
            });
        }
    }
    let bound = two * slack / T::from_usize_lossy(k_max);
    Ok(CollapseVerdict {
        collapsed: false,
        witness: None,
        gap: (bound - spread).max(T::zero()),
        notes: format!("bound {bound} at k = {k_max} still covers spread {spread}; increase k_max"),
    })
}

/// `max |φ(X) - φ(Y)|` over the given pairs of equal-mean laws.
pub fn expectation_invariance_pairs<T: Scalar>(
    phi: &dyn Functional<T>,
    pairs: &[(DiscreteLaw<T>, DiscreteLaw<T>)],
    tol: T,
) -> Result<CollapseVerdict<T>> {
    require_law_invariant(phi)?;
    let mut gap = T::zero();
    let mut witness = None;
    for (x, y) in pairs {
        if (x.mean() - y.mean()).abs() > T::tol() * (T::one() + x.max_abs()) {
            return Err(Error::domain("probe pair has different means"));
        }
        let g = gap_of(phi.eval(x), phi.eval(y));
        if g > gap {
            gap = g;
            witness = Some(Witness::Pair(x.clone(), y.clone()));
        }
    }
    Ok(CollapseVerdict {
        collapsed: gap <= tol,
        witness,
        gap,
        notes: format!("{} over {} equal-mean pairs", phi.name(), pairs.len()),
    })
}

/// Probes `E[X] = E[Y] ⟹ φ(X) = φ(Y)` on random mean-preserving
/// contractions: for each trial a random integer sample on 2 to 6 atoms
/// is paired with a random dilatation of itself and with its mean.
pub fn expectation_invariance_probe<T: Scalar>(
    phi: &dyn Functional<T>,
    trials: usize,
    seed: u64,
    tol: T,
) -> Result<CollapseVerdict<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(2 * trials);
    for _ in 0..trials {
        let x: UniformSample<T> = probes::integer_sample(&mut rng, 2, 6, -6, 6);
        let part = probes::random_partition(&mut rng, x.n());
        let y = dilate(&x, &part)?;
        let law = x.law();
        pairs.push((law.clone(), y.law()));
        pairs.push((law, DiscreteLaw::point(x.mean())));
    }
    let mut v = expectation_invariance_pairs(phi, &pairs, tol)?;
    v.notes = format!("{} (seed {seed}, {trials} trials)", v.notes);
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct ChoquetLinearity<T> {
    pub verdict: CollapseVerdict<T>,
    /// The polarisation of `μ`, recovered when a witness was found.
    pub recovered_nu: Option<Capacity<T>>,
}

/// Searches for a nonconstant `Z` with `E_μ[-Z] = -E_μ[Z]` under a
/// law-invariant JP capacity. Candidates are all nonconstant indicator
/// patterns (when `include_indicators`) followed by `extra`; the lowest
/// index wins.
///
/// A witness must force `ν` to be the reference probability; if the
/// recovered `ν` is anything else an [`Error::Inconsistency`] is raised.
pub fn choquet_symmetric_linearity<T: Scalar>(
    mu: &Capacity<T>,
    extra: &[UniformSample<T>],
    include_indicators: bool,
    tol: T,
) -> Result<ChoquetLinearity<T>> {
    let alpha = match mu.kind() {
        CapacityKind::Jp { alpha, .. } => *alpha,
        _ => return Err(Error::precondition("expected a JP capacity")),
    };
    if !is_law_invariant(mu)? {
        return Err(Error::precondition("the JP capacity is not law invariant"));
    }
    let n = mu.n();
    let mut candidates: Vec<UniformSample<T>> = Vec::new();
    if include_indicators {
        for a in 1..full_set(n) {
            let v = (0..n)
                .map(|i| if a >> i & 1 == 1 { T::one() } else { T::zero() })
                .collect();
            candidates.push(UniformSample::new(v)?);
        }
    }
    for z in extra {
        if z.n() != n {
            return Err(Error::domain(format!("candidate has {} atoms, capacity has {n}", z.n())));
        }
        if !z.is_constant() {
            candidates.push(z.clone());
        }
    }
    if candidates.is_empty() {
        return Err(Error::precondition("no nonconstant Z among the candidates"));
    }
    let mut best = (T::infinity(), 0);
    for (i, z) in candidates.iter().enumerate() {
        let asym = (choquet(mu, z)?.value + choquet(mu, &z.neg())?.value).abs();
        if asym < best.0 {
            best = (asym, i);
        }
        if asym <= tol {
            break;
        }
    }
    let (gap, idx) = best;
    let notes_base = format!("{} candidates, alpha {alpha}", candidates.len());
    if gap > tol {
        return Ok(ChoquetLinearity {
            verdict: CollapseVerdict {
                collapsed: false,
                witness: None,
                gap,
                notes: format!("{notes_base}; no symmetric witness"),
            },
            recovered_nu: None,
        });
    }
    let nu = jp_recover_nu(mu, alpha)?;
    let nn = T::from_usize_lossy(n);
    let table = nu.table()?;
    for (a, v) in table.iter().enumerate() {
        let p = T::from_usize_lossy((a as u64).count_ones() as usize) / nn;
        if (*v - p).abs() > tol {
            return Err(Error::Inconsistency(format!(
                "symmetric witness found but recovered nu({a:#b}) = {v} differs from {p}"
            )));
        }
    }
    Ok(ChoquetLinearity {
        verdict: CollapseVerdict {
            collapsed: true,
            witness: Some(Witness::Sample(candidates[idx].clone())),
            gap,
            notes: format!("{notes_base}; witness #{idx}, recovered nu is the reference probability"),
        },
        recovered_nu: Some(nu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(atoms: &[(f64, f64)]) -> DiscreteLaw<f64> {
        DiscreteLaw::new(atoms.iter().copied()).unwrap()
    }

    fn key_z() -> DiscreteLaw<f64> {
        law(&[(-1.0, 2.0 / 3.0), (2.0, 1.0 / 3.0)])
    }

    fn full_grid() -> Vec<f64> {
        (-5..=5).map(f64::from).collect()
    }

    #[test]
    fn mean_is_linear_along_everything() {
        let z = law(&[(-1.0, 0.3), (0.5, 0.2), (4.0, 0.5)]);
        let v = translation_line_test(&Expectation, 1.5, &z, z.mean(), &full_grid(), 1e-7).unwrap();
        assert!(v.collapsed);
        assert!(v.gap < 1e-12);
    }

    #[test]
    fn expected_shortfall_breaks_on_negative_ray() {
        let es_half = ExpectedShortfall::new(0.5).unwrap();
        let z = key_z();
        let a = es(&z, 0.5).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
        let v = translation_line_test(&es_half, 0.0, &z, a, &[-1.0], 1e-7).unwrap();
        assert!(!v.collapsed);
        assert!((v.gap - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rho_is_linear_on_the_positive_ray_only() {
        let z = key_z();
        let pos: Vec<f64> = (0..=5).map(f64::from).collect();
        let v = translation_line_test(&RhoExample, 0.0, &z, 0.5, &pos, 1e-7).unwrap();
        assert!(v.collapsed && v.gap < 1e-12);
        assert!(v.notes.contains("one-sided"));
        let v = translation_line_test(&RhoExample, 0.0, &z, 0.5, &full_grid(), 1e-7).unwrap();
        assert!(!v.collapsed);
    }

    #[test]
    fn line_test_rejects_bad_inputs() {
        let inf = FnFunctional::new("inf", |_: &DiscreteLaw<f64>| f64::INFINITY);
        assert!(matches!(
            translation_line_test(&inf, 0.0, &key_z(), 0.0, &[1.0], 1e-7),
            Err(Error::Precondition(_))
        ));
        let not_li = FnFunctional::new("x", |x: &DiscreteLaw<f64>| x.mean()).with_flags(false, false, false);
        assert!(translation_line_test(&not_li, 0.0, &key_z(), 0.0, &[1.0], 1e-7).is_err());
        assert!(translation_line_test(&Expectation, 0.0, &key_z(), 0.0, &[], 1e-7).is_err());
    }

    #[test]
    fn meta_certificate_examples() {
        let z = law(&[(-1.0, 0.5), (1.0, 0.5)]);
        let y_const = DiscreteLaw::point(3.0);
        let v = meta_gap_certificate(&Expectation, 0.0, &z, &y_const, -1.0, 10, 1e-7).unwrap();
        assert!(v.collapsed && v.gap == 0.0);

        let y = law(&[(0.0, 0.5), (2.0, 0.5)]);
        let v = meta_gap_certificate(&Expectation, 0.0, &z, &y, 0.0, 10, 1e-7).unwrap();
        assert!(v.collapsed);
        assert_eq!(v.witness, Some(Witness::Law(y.clone())));

        // With a loose offset the bound needs large k before it bites.
        let v = meta_gap_certificate(&Expectation, 0.0, &z, &y, -100.0, 10, 1e-7).unwrap();
        assert!(!v.collapsed && v.gap > 0.0);
        let v = meta_gap_certificate(&Expectation, 0.0, &z, &y, -100.0, 1000, 1e-7).unwrap();
        assert!(v.collapsed);

        assert!(matches!(
            meta_gap_certificate(&Expectation, 0.0, &DiscreteLaw::point(1.0), &y, 0.0, 10, 1e-7),
            Err(Error::Precondition(_))
        ));
        let es_half = ExpectedShortfall::new(0.5).unwrap();
        assert!(matches!(
            meta_gap_certificate(&es_half, 0.0, &z, &y, -10.0, 5, 1e-7),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn expectation_invariance() {
        let v = expectation_invariance_probe(&Expectation, 50, 42, 1e-7).unwrap();
        assert!(v.collapsed);
        let g = FnFunctional::new("exp-of-mean", |x: &DiscreteLaw<f64>| x.mean().exp());
        assert!(expectation_invariance_probe(&g, 50, 42, 1e-7).unwrap().collapsed);
        let x = law(&[(-6.0, 0.5), (4.0, 0.5)]);
        let y = DiscreteLaw::point(-1.0);
        let v = expectation_invariance_pairs(&PhiExample, &[(x, y)], 1e-7).unwrap();
        assert!(!v.collapsed);
        assert!(v.gap >= 1.0);
        assert!(!expectation_invariance_probe(&PhiExample, 50, 42, 1e-7).unwrap().collapsed);
    }

    #[test]
    fn choquet_linearity_for_the_probability() {
        let p = Capacity::densities(3, vec![vec![1.0; 3]]).unwrap();
        let mu = Capacity::jp(p, 0.8).unwrap();
        let r = choquet_symmetric_linearity(&mu, &[], true, 1e-7).unwrap();
        assert!(r.verdict.collapsed);
        assert!(r.recovered_nu.is_some());
    }

    #[test]
    fn choquet_linearity_fails_for_ambiguous_nu() {
        let nu = Capacity::<f64>::densities(2, vec![vec![1.2, 0.8], vec![0.8, 1.2]]).unwrap();
        let mu = Capacity::jp(nu, 0.8).unwrap();
        let z = UniformSample::new(vec![1.0, 0.0]).unwrap();
        assert!((choquet(&mu, &z).unwrap().value - 0.56).abs() < 1e-12);
        assert!((choquet(&mu, &z.neg()).unwrap().value + 0.44).abs() < 1e-12);
        let r = choquet_symmetric_linearity(&mu, &[], true, 1e-7).unwrap();
        assert!(!r.verdict.collapsed);
        assert!((r.verdict.gap - 0.12).abs() < 1e-12);
    }

    #[test]
    fn choquet_linearity_guards() {
        let p = Capacity::densities(2, vec![vec![1.0; 2]]).unwrap();
        let mu = Capacity::jp(p, 0.8).unwrap();
        let c = UniformSample::new(vec![2.0, 2.0]).unwrap();
        assert!(matches!(
            choquet_symmetric_linearity(&mu, &[c], false, 1e-7),
            Err(Error::Precondition(_))
        ));
        let plain = Capacity::<f64>::probability(2).unwrap();
        assert!(choquet_symmetric_linearity(&plain, &[], true, 1e-7).is_err());
        let lopsided = Capacity::jp(Capacity::densities(2, vec![vec![1.5, 0.5]]).unwrap(), 0.3).unwrap();
        assert!(matches!(
            choquet_symmetric_linearity(&lopsided, &[], true, 1e-7),
            Err(Error::Precondition(_))
        ));
    }
}
