//! Convex order and increasing convex (second-order) dominance.
//!
//! Both orders reduce to comparisons of the tail integrals
//! `p -> ∫_p^1 q(s) ds`. These are piecewise linear in `p` with kinks only
//! at quantile breakpoints, so comparing them on the merged breakpoint grid
//! is exact.

use crate::scalar::Scalar;

use super::{merged_breakpoints, DiscreteLaw};

fn tails_dominate<T: Scalar>(x: &DiscreteLaw<T>, y: &DiscreteLaw<T>, tol: T) -> bool {
    let qx = x.quantile_fn();
    let qy = y.quantile_fn();
    merged_breakpoints(&[qx.as_step(), qy.as_step()])
        .into_iter()
        .all(|p| {
            let tx = qx.as_step().integral_unchecked(p, T::one());
            let ty = qy.as_step().integral_unchecked(p, T::one());
            tx >= ty - tol
        })
}

/// Whether `x` dominates `y` in convex order: `E[f(X)] >= E[f(Y)]` for every
/// convex `f`.
pub fn convex_order_dominates<T: Scalar>(x: &DiscreteLaw<T>, y: &DiscreteLaw<T>) -> bool {
    convex_order_dominates_tol(x, y, T::tol())
}

pub fn convex_order_dominates_tol<T: Scalar>(x: &DiscreteLaw<T>, y: &DiscreteLaw<T>, tol: T) -> bool {
    (x.mean() - y.mean()).abs() <= tol && tails_dominate(x, y, tol)
}

/// Whether `y` is dominated by `x` in increasing convex order:
/// `E[f(X)] >= E[f(Y)]` for every nondecreasing convex `f`. Read as "`y` is
/// less risky than `x`"; unlike the convex order, means may differ.
pub fn ssd_dominated<T: Scalar>(x: &DiscreteLaw<T>, y: &DiscreteLaw<T>) -> bool {
    ssd_dominated_tol(x, y, T::tol())
}

pub fn ssd_dominated_tol<T: Scalar>(x: &DiscreteLaw<T>, y: &DiscreteLaw<T>, tol: T) -> bool {
    tails_dominate(x, y, tol)
}
