//! Seeded random instances for property tests, probes and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::capacities::{Capacity, PiecewiseLinear};
use crate::laws::{DiscreteLaw, UniformSample};
use crate::scalar::Scalar;

/// Integer-valued sample with `n_min..=n_max` atoms and values in `lo..=hi`.
pub fn integer_sample<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n_min: usize, n_max: usize, lo: i32, hi: i32) -> UniformSample<T> {
    let n = rng.gen_range(n_min..=n_max);
    let v = (0..n).map(|_| T::lit(f64::from(rng.gen_range(lo..=hi)))).collect();
    UniformSample::new(v).expect("integer values are finite")
}

/// Real-valued sample with `n` atoms, uniform on `[lo, hi)`.
pub fn real_sample<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> UniformSample<T> {
    let v = (0..n).map(|_| T::lit(rng.gen_range(lo..hi))).collect();
    UniformSample::new(v).expect("finite values")
}

/// Real-valued sample that is not constant (`n >= 2`).
pub fn nonconstant_sample<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> UniformSample<T> {
    assert!(n >= 2, "a nonconstant sample needs two atoms");
    loop {
        let s = real_sample(rng, n, lo, hi);
        if !s.is_constant() {
            return s;
        }
    }
}

/// Random partition of `0..n` into nonempty blocks.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let blocks = rng.gen_range(1..=n.max(1));
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); blocks];
    for (k, i) in idx.into_iter().enumerate() {
        let b = if k < blocks { k } else { rng.gen_range(0..blocks) };
        out[b].push(i);
    }
    out
}

/// Law with `1..=max_atoms` atoms in `[lo, hi)` and random weights.
pub fn random_law<T: Scalar, R: Rng + ?Sized>(rng: &mut R, max_atoms: usize, lo: f64, hi: f64) -> DiscreteLaw<T> {
    let k = rng.gen_range(1..=max_atoms);
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let atoms = w.iter().map(|&p| (T::lit(rng.gen_range(lo..hi)), T::lit(p / total)));
    DiscreteLaw::new(atoms).expect("weights are normalised")
}

/// Nonconstant law with mean zero.
pub fn centered_law<T: Scalar, R: Rng + ?Sized>(rng: &mut R, max_atoms: usize, scale: f64) -> DiscreteLaw<T> {
    loop {
        let x: DiscreteLaw<T> = random_law(rng, max_atoms.max(2), -scale, scale);
        if x.is_constant() {
            continue;
        }
        let c = x.shifted(-x.mean());
        if !c.is_constant() {
            return c;
        }
    }
}

/// Strictly positive density with average one.
pub fn density<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
    let avg = w.iter().sum::<f64>() / n as f64;
    w.into_iter().map(|x| T::lit(x / avg)).collect()
}

/// Nonconstant density with average one, suitable as a pricing density.
pub fn pricing_density<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> UniformSample<T> {
    assert!(n >= 2, "a nonconstant density needs two atoms");
    loop {
        let w: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(1..=6u8))).collect();
        if w.iter().any(|&v| v != w[0]) {
            let avg = w.iter().sum::<f64>() / n as f64;
            return UniformSample::new(w.into_iter().map(|x| T::lit(x / avg)).collect()).expect("finite");
        }
    }
}

pub fn density_family<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<Vec<T>> {
    (0..k).map(|_| density(rng, n)).collect()
}

/// Random increasing piecewise-linear distortion with `inner` interior
/// knots; concave when `concave` is set.
pub fn distortion<T: Scalar, R: Rng + ?Sized>(rng: &mut R, inner: usize, concave: bool) -> PiecewiseLinear<T> {
    let mut us: Vec<f64> = (0..inner).map(|_| rng.gen_range(0.05..0.95)).collect();
    us.sort_by(f64::total_cmp);
    us.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let mut incs: Vec<f64> = (0..=us.len()).map(|_| rng.gen_range(0.01..1.0)).collect();
    let mut xs = vec![0.0];
    xs.extend(&us);
    xs.push(1.0);
    if concave {
        // Decreasing slopes: sort increments per unit length.
        let mut slopes: Vec<f64> = incs.iter().zip(xs.windows(2)).map(|(d, w)| d / (w[1] - w[0])).collect();
        slopes.sort_by(|a, b| b.total_cmp(a));
        incs = slopes.iter().zip(xs.windows(2)).map(|(s, w)| s * (w[1] - w[0])).collect();
    }
    let total: f64 = incs.iter().sum();
    let mut acc = 0.0;
    let mut knots = vec![(T::zero(), T::zero())];
    for (i, inc) in incs.iter().enumerate() {
        acc += inc / total;
        let y = if i + 1 == incs.len() { 1.0 } else { acc };
        knots.push((T::lit(xs[i + 1]), T::lit(y)));
    }
    PiecewiseLinear::new(knots).expect("knots are increasing from (0,0) to (1,1)")
}

/// Mixed battery of capacities on `n` atoms: distortions, density
/// families and their duals, JP capacities and explicit tables.
pub fn capacity<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Capacity<T> {
    match rng.gen_range(0..5) {
        0 => {
            let concave = rng.gen_bool(0.5);
            Capacity::distortion(n, distortion(rng, 3, concave)).expect("valid distortion")
        }
        1 => {
            let k = rng.gen_range(1..=3);
            Capacity::densities(n, density_family(rng, n, k)).expect("valid densities")
        }
        2 => {
            let k = rng.gen_range(1..=3);
            Capacity::densities(n, density_family(rng, n, k))
                .expect("valid densities")
                .dual()
        }
        3 => {
            let k = rng.gen_range(1..=3);
            let nu = Capacity::densities(n, density_family(rng, n, k)).expect("valid densities");
            let alpha = [0.0, 0.2, 0.8, 1.0][rng.gen_range(0..4)];
            Capacity::jp(nu, T::lit(alpha)).expect("alpha is not one half")
        }
        _ => explicit_capacity(rng, n),
    }
}

/// Monotone explicit capacity: a random nonnegative weight per nonempty
/// subset, with `μ(A)` the normalised sum of the weights of subsets of `A`.
pub fn explicit_capacity<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Capacity<T> {
    let full = crate::capacities::full_set(n);
    let weights: Vec<f64> = (0..=full)
        .map(|a| if a == 0 { 0.0 } else { rng.gen_range(-0.3f64..1.0).max(0.0) })
        .collect();
    let mut values = vec![0.0; weights.len()];
    for a in 0..=full {
        let mut b = a;
        loop {
            values[a as usize] += weights[b as usize];
            if b == 0 {
                break;
            }
            b = (b - 1) & a;
        }
    }
    let top = values[full as usize];
    let table = values
        .into_iter()
        .enumerate()
        .map(|(a, v)| {
            if a as u64 == full {
                T::one()
            } else if top > 0.0 {
                T::lit(v / top)
            } else {
                T::zero()
            }
        })
        .collect();
    Capacity::from_table(n, table).expect("table is monotone and normalised")
}
