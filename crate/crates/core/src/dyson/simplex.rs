//! Time-ordered exponential integrals over the simplex
//! `Δ_n(T) = {0 ≤ s₁ ≤ … ≤ s_n ≤ T}` through divided differences of
//! `x ↦ e^{xT}`.

use crate::scalar::Real;
use num_complex::Complex;

/// Node clusters with `spread·|T|` below this use the Taylor series.
const TAYLOR_SPREAD: f64 = 1.0;
// With spread·|T| < 1 the j-th term is below (T^n/n!)/j!, so 24 terms
// reach double precision.
const TAYLOR_TERMS: usize = 24;

fn taylor_dd<T: Real>(t: T, nodes: &[Complex<T>]) -> Complex<T> {
    let n = nodes.len() - 1;
    let len = T::lit(nodes.len() as f64);
    let center = nodes.iter().copied().sum::<Complex<T>>() / len;
    let deltas: Vec<Complex<T>> = nodes.iter().map(|x| *x - center).collect();
    let mut h = vec![Complex::new(T::zero(), T::zero()); TAYLOR_TERMS + 1];
    h[0] = Complex::new(T::one(), T::zero());
    for d in &deltas {
        for j in 1..=TAYLOR_TERMS {
            let prev = h[j - 1];
            h[j] += *d * prev;
        }
    }
    // coef_j = T^{n+j}/(n+j)!
    let mut coef = T::one();
    for m in 1..=n {
        coef = coef * t / T::lit(m as f64);
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for (j, hj) in h.iter().enumerate() {
        let term = *hj * coef;
        acc += term;
        coef = coef * t / T::lit((n + j + 1) as f64);
    }
    acc * (center * t).exp()
}

fn dd_rec<T: Real>(t: T, nodes: &[Complex<T>], mask: usize, memo: &mut [Option<Complex<T>>]) -> Complex<T> {
    if let Some(v) = memo[mask] {
        return v;
    }
    let idx: Vec<usize> = (0..nodes.len()).filter(|i| mask & (1 << i) != 0).collect();
    let v = if idx.len() == 1 {
        (nodes[idx[0]] * t).exp()
    } else {
        let mut best = (T::zero(), idx[0], idx[1]);
        for (p, &a) in idx.iter().enumerate() {
            for &b in &idx[p + 1..] {
                let d = (nodes[a] - nodes[b]).norm();
                if d > best.0 {
                    best = (d, a, b);
                }
            }
        }
        let (spread, a, b) = best;
        if spread * t.abs() < T::lit(TAYLOR_SPREAD) {
            let sub: Vec<Complex<T>> = idx.iter().map(|&i| nodes[i]).collect();
            taylor_dd(t, &sub)
        } else {
            let without_a = dd_rec(t, nodes, mask & !(1 << a), memo);
            let without_b = dd_rec(t, nodes, mask & !(1 << b), memo);
            (without_a - without_b) / (nodes[b] - nodes[a])
        }
    };
    memo[mask] = Some(v);
    v
}

/// Divided difference `f[x₀, …, x_n]` of `f(x) = e^{xT}`.
///
/// Node sets whose spread times `|T|` is below one are summed as a Taylor
/// series about their mean; wider sets are split on their farthest pair.
pub fn exp_divided_difference<T: Real>(t: T, nodes: &[Complex<T>]) -> Complex<T> {
    assert!(!nodes.is_empty() && nodes.len() < usize::BITS as usize - 1);
    let full = (1usize << nodes.len()) - 1;
    let mut memo = vec![None; full + 1];
    dd_rec(t, nodes, full, &mut memo)
}

/// `∫_{Δ_n(t)} Π_j e^{θ_j s_j} ds`.
///
/// Equal to the divided difference of `e^{xt}` at the partial sums
/// `Σ_{j≥1}θ_j, Σ_{j≥2}θ_j, …, θ_n, 0`.
pub fn simplex_phase_integral<T: Real>(thetas: &[Complex<T>], t: T) -> Complex<T> {
    let n = thetas.len();
    let mut nodes = vec![Complex::new(T::zero(), T::zero()); n + 1];
    for j in (0..n).rev() {
        nodes[j] = nodes[j + 1] + thetas[j];
    }
    exp_divided_difference(t, &nodes)
}
