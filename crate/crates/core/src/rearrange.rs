//! Sharp rearrangement bounds for `E[X'Y]` over all `X'` with the law of
//! `X`, the couplings that attain them, and a brute-force oracle.
//!
//! The upper bound is `∫ q_X(s) q_Y(s) ds` (comonotone pairing), the lower
//! bound `∫ q_X(1 - s) q_Y(s) ds` (antimonotone pairing). When both laws
//! are nonconstant, `E[X]E[Y]` lies strictly between them.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::{integrate_product, DiscreteLaw, UniformSample};
use crate::scalar::{cmp, Scalar};

/// Largest sample size the permutation oracle accepts.
pub const ORACLE_MAX_N: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    Comonotone,
    Antimonotone,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingResult<T> {
    pub x_rearranged: UniformSample<T>,
    /// `E[X'Y]` for the returned arrangement.
    pub inner_product: T,
    pub kind: CouplingKind,
}

/// `max_{X' ~ X} E[X'Y]`.
pub fn hl_upper<T: Scalar>(x: &DiscreteLaw<T>, y: &DiscreteLaw<T>) -> T {
    let qx = x.quantile_fn();
    let qy = y.quantile_fn();
    integrate_product(qx.as_step(), qy.as_step())
}

/// `min_{X' ~ X} E[X'Y]`.
pub fn hl_lower<T: Scalar>(x: &DiscreteLaw<T>, y: &DiscreteLaw<T>) -> T {
    let qx = x.quantile_fn();
    let qy = y.quantile_fn();
    integrate_product(&qx.reflected(), qy.as_step())
}

/// `(E[X]E[Y] - hl_lower, hl_upper - E[X]E[Y])`.
pub fn strict_gap<T: Scalar>(x: &DiscreteLaw<T>, y: &DiscreteLaw<T>) -> (T, T) {
    let prod = x.mean() * y.mean();
    (prod - hl_lower(x, y), hl_upper(x, y) - prod)
}

/// Arranges the law `x` on the atoms of `y` so that the pair is comonotone
/// or antimonotone.
///
/// Every probability of `x` must be a multiple of `1/n`. Ties in `y` are
/// broken by atom index, so the result is deterministic.
pub fn couple<T: Scalar>(
    x: &DiscreteLaw<T>,
    y: &UniformSample<T>,
    kind: CouplingKind,
) -> Result<CouplingResult<T>> {
    let n = y.n();
    let sorted_x = x.expand(n)?;
    let yv = y.values();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| cmp(&yv[i], &yv[j]).then(i.cmp(&j)));
    let mut arranged = vec![T::zero(); n];
    for (rank, &atom) in order.iter().enumerate() {
        arranged[atom] = match kind {
            CouplingKind::Comonotone => sorted_x[rank],
            CouplingKind::Antimonotone => sorted_x[n - 1 - rank],
        };
    }
    let x_rearranged = UniformSample::new(arranged)?;
    let inner_product = x_rearranged.dot(y)?;
    Ok(CouplingResult {
        x_rearranged,
        inner_product,
        kind,
    })
}

/// Exhaustive `(min, max)` of `(1/n) Σ x_{π(i)} y_i` over all permutations.
pub fn oracle_extrema<T: Scalar>(x: &UniformSample<T>, y: &UniformSample<T>) -> Result<(T, T)> {
    let n = x.n();
    if y.n() != n {
        return Err(Error::domain(format!("dimension mismatch: {n} vs {}", y.n())));
    }
    if n > ORACLE_MAX_N {
        return Err(Error::SizeLimit {
            what: "oracle sample size",
            got: n,
            max: ORACLE_MAX_N,
        });
    }
    let nn = T::from_usize_lossy(n);
    let (xv, yv) = (x.values(), y.values());
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for perm in (0..n).permutations(n) {
        let s = perm
            .iter()
            .zip(yv)
            .fold(T::zero(), |acc, (&j, &b)| acc + xv[j] * b)
            / nn;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok((lo, hi))
}

/// `(x_i - x_j)(y_i - y_j) >= -tol` for all pairs.
pub fn is_comonotone<T: Scalar>(x: &UniformSample<T>, y: &UniformSample<T>, tol: T) -> bool {
    pairwise_sign(x, y, tol, T::one())
}

/// `(x_i - x_j)(y_i - y_j) <= tol` for all pairs.
pub fn is_antimonotone<T: Scalar>(x: &UniformSample<T>, y: &UniformSample<T>, tol: T) -> bool {
    pairwise_sign(x, y, tol, -T::one())
}

fn pairwise_sign<T: Scalar>(x: &UniformSample<T>, y: &UniformSample<T>, tol: T, sign: T) -> bool {
    if x.n() != y.n() {
        return false;
    }
    let (xv, yv) = (x.values(), y.values());
    (0..xv.len()).tuple_combinations().all(|(i, j)| {
        sign * (xv[i] - xv[j]) * (yv[i] - yv[j]) >= -tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(atoms: &[(f64, f64)]) -> DiscreteLaw<f64> {
        DiscreteLaw::new(atoms.iter().copied()).unwrap()
    }

    fn sample(v: &[f64]) -> UniformSample<f64> {
        UniformSample::new(v.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn oracle_values() {
        let z = sample(&[2.0, -1.0, -1.0]);
        let (lo, hi) = oracle_extrema(&z, &z).unwrap();
        assert!(close(lo, -1.0) && close(hi, 2.0));
        let u = sample(&[1.0, 2.0, 3.0]);
        let (lo, hi) = oracle_extrema(&u, &u).unwrap();
        assert!(close(lo, 10.0 / 3.0) && close(hi, 14.0 / 3.0));
        let one = sample(&[3.0]);
        assert_eq!(oracle_extrema(&one, &sample(&[-2.0])).unwrap(), (-6.0, -6.0));
        let big = sample(&[0.0; 9]);
        assert!(matches!(oracle_extrema(&big, &big), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn bounds_match_oracle_values() {
        let z = law(&[(-1.0, 2.0 / 3.0), (2.0, 1.0 / 3.0)]);
        assert!(close(hl_upper(&z, &z), 2.0));
        assert!(close(hl_lower(&z, &z), -1.0));
        let u = DiscreteLaw::uniform(&[1.0, 2.0, 3.0]).unwrap();
        assert!(close(hl_upper(&u, &u), 14.0 / 3.0));
        assert!(close(hl_lower(&u, &u), 10.0 / 3.0));
    }

    #[test]
    fn constant_factor() {
        let c = DiscreteLaw::point(2.5);
        let y = law(&[(-1.0, 0.2), (0.5, 0.3), (4.0, 0.5)]);
        assert!(close(hl_upper(&c, &y), 2.5 * y.mean()));
        assert!(close(hl_lower(&c, &y), 2.5 * y.mean()));
        let (a, b) = strict_gap(&c, &y);
        assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
    }

    #[test]
    fn strict_gap_examples() {
        let z = law(&[(-1.0, 2.0 / 3.0), (2.0, 1.0 / 3.0)]);
        let (a, b) = strict_gap(&z, &z);
        assert!(close(a, 1.0) && close(b, 2.0));
        let u = DiscreteLaw::uniform(&[1.0, 2.0, 3.0]).unwrap();
        let (a, b) = strict_gap(&u, &u);
        assert!(close(a, 2.0 / 3.0) && close(b, 2.0 / 3.0));
    }

    #[test]
    fn coupling_examples() {
        let y = sample(&[2.0, 1.0, 1.0]);
        let x = DiscreteLaw::uniform(&[3.0, 0.0, 0.0]).unwrap();
        let anti = couple(&x, &y, CouplingKind::Antimonotone).unwrap();
        assert!(close(anti.inner_product, 1.0));
        assert_eq!(anti.x_rearranged.values(), &[0.0, 3.0, 0.0]);
        let co = couple(&x, &y, CouplingKind::Comonotone).unwrap();
        assert!(close(co.inner_product, 2.0));
        assert_eq!(co.x_rearranged.values(), &[3.0, 0.0, 0.0]);
        assert!(is_antimonotone(&anti.x_rearranged, &y, 0.0));
        assert!(is_comonotone(&co.x_rearranged, &y, 0.0));
    }

    #[test]
    fn constant_coupling() {
        let y = sample(&[2.0, 1.0, 1.0, -3.0]);
        for kind in [CouplingKind::Comonotone, CouplingKind::Antimonotone] {
            let r = couple(&DiscreteLaw::point(1.5), &y, kind).unwrap();
            assert!(close(r.inner_product, 1.5 * y.mean()));
        }
    }

    #[test]
    fn coupling_needs_common_grid() {
        let y = sample(&[2.0, 1.0, 1.0]);
        let x = law(&[(0.0, 0.5), (1.0, 0.5)]);
        assert!(matches!(
            couple(&x, &y, CouplingKind::Comonotone),
            Err(Error::Domain(_))
        ));
    }
}
