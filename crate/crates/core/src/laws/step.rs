use crate::error::{Error, Result};
use crate::scalar::{cmp, Scalar};

use super::DiscreteLaw;

/// Piecewise constant function on `(0, 1]`: value `levels[i]` on
/// `(breakpoints[i], breakpoints[i + 1]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFn<T> {
    breakpoints: Vec<T>,
    levels: Vec<T>,
}

impl<T: Scalar> StepFn<T> {
    pub fn new(breakpoints: Vec<T>, levels: Vec<T>) -> Result<Self> {
        if levels.is_empty() || breakpoints.len() != levels.len() + 1 {
            return Err(Error::domain("step function needs k levels and k + 1 breakpoints"));
        }
        if breakpoints[0] != T::zero() || breakpoints[breakpoints.len() - 1] != T::one() {
            return Err(Error::domain("breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("breakpoints must be strictly increasing"));
        }
        if levels.iter().any(|l| !l.is_finite()) {
            return Err(Error::domain("levels must be finite"));
        }
        Ok(StepFn { breakpoints, levels })
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    /// Value at `s` in `(0, 1]`; left-continuous at breakpoints.
    pub fn value(&self, s: T) -> T {
        let idx = self.breakpoints[1..].partition_point(|&b| b < s);
        self.levels[idx.min(self.levels.len() - 1)]
    }

    /// The map `s -> f(1 - s)`, as a step function again.
    pub fn reflected(&self) -> StepFn<T> {
        let mut breakpoints: Vec<T> = self.breakpoints.iter().rev().map(|&b| T::one() - b).collect();
        // Pin the endpoints exactly.
        breakpoints[0] = T::zero();
        let k = breakpoints.len() - 1;
        breakpoints[k] = T::one();
        let levels = self.levels.iter().rev().copied().collect();
        StepFn { breakpoints, levels }
    }

    /// `∫_a^b f(s) ds` for `0 <= a <= b <= 1`, without range checks.
    pub(crate) fn integral_unchecked(&self, a: T, b: T) -> T {
        let mut acc = T::zero();
        for (i, &level) in self.levels.iter().enumerate() {
            let lo = self.breakpoints[i].max(a);
            let hi = self.breakpoints[i + 1].min(b);
            if hi > lo {
                acc = acc + level * (hi - lo);
            }
        }
        acc
    }
}

/// Left-continuous quantile function of a finite law: a nondecreasing
/// step function.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantileFn<T>(StepFn<T>);

impl<T: Scalar> QuantileFn<T> {
    pub fn new(breakpoints: Vec<T>, levels: Vec<T>) -> Result<Self> {
        let step = StepFn::new(breakpoints, levels)?;
        if step.levels.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("quantile levels must be nondecreasing"));
        }
        Ok(QuantileFn(step))
    }

    pub fn from_law(law: &DiscreteLaw<T>) -> Self {
        let mut breakpoints = Vec::with_capacity(law.len() + 1);
        breakpoints.push(T::zero());
        let mut cum = T::zero();
        for &p in law.probs() {
            cum = cum + p;
            breakpoints.push(cum);
        }
        let k = breakpoints.len() - 1;
        breakpoints[k] = T::one();
        QuantileFn(StepFn {
            breakpoints,
            levels: law.values().to_vec(),
        })
    }

    /// Law whose quantile function this is; adjacent equal levels merge.
    pub fn to_law(&self) -> Result<DiscreteLaw<T>> {
        let s = &self.0;
        DiscreteLaw::new(
            s.levels
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, s.breakpoints[i + 1] - s.breakpoints[i])),
        )
    }

    pub fn value(&self, s: T) -> T {
        self.0.value(s)
    }

    pub fn breakpoints(&self) -> &[T] {
        self.0.breakpoints()
    }

    pub fn levels(&self) -> &[T] {
        self.0.levels()
    }

    pub fn as_step(&self) -> &StepFn<T> {
        &self.0
    }

    /// `s -> q(1 - s)`.
    pub fn reflected(&self) -> StepFn<T> {
        self.0.reflected()
    }
}

impl<T> AsRef<StepFn<T>> for QuantileFn<T> {
    fn as_ref(&self) -> &StepFn<T> {
        &self.0
    }
}

/// Exact `∫_a^b q(s) ds` by summation over the pieces of `q`.
pub fn partial_integral<T: Scalar>(q: &QuantileFn<T>, a: T, b: T) -> Result<T> {
    if !(a >= T::zero() && b <= T::one()) {
        return Err(Error::domain(format!("integration range [{a}, {b}] outside [0, 1]")));
    }
    if a > b {
        return Err(Error::domain(format!("integration range reversed: {a} > {b}")));
    }
    Ok(q.0.integral_unchecked(a, b))
}

/// Sorted union of the breakpoints of all `fns`, with points closer than
/// `T::MERGE_EPS` identified. Always starts at 0 and ends at 1.
pub fn merged_breakpoints<T: Scalar>(fns: &[&StepFn<T>]) -> Vec<T> {
    let mut all: Vec<T> = fns.iter().flat_map(|f| f.breakpoints.iter().copied()).collect();
    all.sort_by(cmp);
    let eps = T::lit(T::MERGE_EPS);
    let mut out: Vec<T> = Vec::with_capacity(all.len());
    for b in all {
        match out.last() {
            Some(&last) if b - last <= eps => {}
            _ => out.push(b),
        }
    }
    // Anything snapped onto the right end belongs to it.
    while out.len() > 1 && T::one() - out[out.len() - 1] <= eps {
        out.pop();
    }
    if out.is_empty() {
        out.push(T::zero());
    }
    out[0] = T::zero();
    out.push(T::one());
    out
}

/// Exact `∫_0^1 f(s) g(s) ds` over the merged breakpoint grid.
pub fn integrate_product<T: Scalar>(f: &StepFn<T>, g: &StepFn<T>) -> T {
    let grid = merged_breakpoints(&[f, g]);
    let two = T::lit(2.0);
    grid.windows(2).fold(T::zero(), |acc, w| {
        let mid = (w[0] + w[1]) / two;
        acc + f.value(mid) * g.value(mid) * (w[1] - w[0])
    })
}
