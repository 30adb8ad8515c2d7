//! Discretized line integrals `∫a(cγ + x)·dγ` under the left, right and
//! midpoint rules, the corrected Itô form of the Stratonovich integral, the
//! closed-form cylinder oscillatory integrals and Gaussian oscillatory
//! moments.

use crate::cameron_martin::GridPath;
use crate::fourier_measure::{VectorField, VectorPotentialFourier};
use crate::scalar::{CVec3, Real, Vec3};
use num_complex::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuadratureRule {
    Left,
    Right,
    Midpoint,
}

/// Scale applied to the Itô-to-Stratonovich correction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CorrectionScale {
    /// `(c/2)∫div a ds`, consistent with the second-order Taylor term.
    #[default]
    WithC,
    /// `(1/2)∫div a ds`, kept to demonstrate the difference numerically.
    Bare,
}

#[inline]
fn embed_point<T: Real>(c: Complex<T>, p: &Vec3<T>, shift: &Vec3<T>) -> CVec3<T> {
    [c * p[0] + shift[0], c * p[1] + shift[1], c * p[2] + shift[2]]
}

#[inline]
fn cdot_real<T: Real>(a: &CVec3<T>, d: &Vec3<T>) -> Complex<T> {
    a[0] * d[0] + a[1] * d[1] + a[2] * d[2]
}

/// Riemann sum over raw grid values (`values[0]` is the start point).
pub fn riemann_sum_values<T: Real, F: VectorField<T> + ?Sized>(
    pot: &F,
    values: &[Vec3<T>],
    rule: QuadratureRule,
    c: Complex<T>,
    shift: &Vec3<T>,
) -> Complex<T> {
    let half = T::lit(0.5);
    let mut acc = Complex::new(T::zero(), T::zero());
    for w in values.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
        let arg = match rule {
            QuadratureRule::Left => embed_point(c, p, shift),
            QuadratureRule::Right => embed_point(c, q, shift),
            QuadratureRule::Midpoint => {
                let m = [(p[0] + q[0]) * half, (p[1] + q[1]) * half, (p[2] + q[2]) * half];
                embed_point(c, &m, shift)
            }
        };
        acc += cdot_real(&pot.eval_c(&arg), &d);
    }
    acc
}

/// `∫₀ᵗ div a(cγ(s) + x) ds` by the trapezoid rule on the path knots.
pub fn divergence_trapezoid<T: Real, F: VectorField<T> + ?Sized>(
    pot: &F,
    values: &[Vec3<T>],
    dt: T,
    c: Complex<T>,
    shift: &Vec3<T>,
) -> Complex<T> {
    let n = values.len() - 1;
    let mut acc = Complex::new(T::zero(), T::zero());
    for (j, p) in values.iter().enumerate() {
        let v = pot.divergence_c(&embed_point(c, p, shift));
        if j == 0 || j == n {
            acc += v * T::lit(0.5);
        } else {
            acc += v;
        }
    }
    acc * dt
}

/// Left sum plus `(c/2)∫div a ds`, both in one pass over the knots.
pub fn stratonovich_values<T: Real, F: VectorField<T> + ?Sized>(
    pot: &F,
    values: &[Vec3<T>],
    dt: T,
    c: Complex<T>,
    shift: &Vec3<T>,
    scale: CorrectionScale,
) -> Complex<T> {
    let n = values.len() - 1;
    let mut left = Complex::new(T::zero(), T::zero());
    let mut div = Complex::new(T::zero(), T::zero());
    for j in 0..=n {
        let z = embed_point(c, &values[j], shift);
        let dv = pot.divergence_c(&z);
        div += if j == 0 || j == n { dv * T::lit(0.5) } else { dv };
        if j < n {
            let p = &values[j];
            let q = &values[j + 1];
            left += cdot_real(&pot.eval_c(&z), &[q[0] - p[0], q[1] - p[1], q[2] - p[2]]);
        }
    }
    let factor = match scale {
        CorrectionScale::WithC => c * T::lit(0.5),
        CorrectionScale::Bare => Complex::new(T::lit(0.5), T::zero()),
    };
    left + factor * div * dt
}

pub fn line_integral_riemann<T: Real, F: VectorField<T> + ?Sized>(
    pot: &F,
    path: &GridPath<T>,
    rule: QuadratureRule,
    c: Complex<T>,
    shift: &Vec3<T>,
) -> Complex<T> {
    riemann_sum_values(pot, path.values(), rule, c, shift)
}

/// The implemented meaning of `∫a(cω + x)∘dω`.
pub fn stratonovich_corrected<T: Real, F: VectorField<T> + ?Sized>(
    pot: &F,
    path: &GridPath<T>,
    c: Complex<T>,
    shift: &Vec3<T>,
) -> Complex<T> {
    stratonovich_values(pot, path.values(), path.dt(), c, shift, CorrectionScale::WithC)
}

pub fn stratonovich_with_scale<T: Real, F: VectorField<T> + ?Sized>(
    pot: &F,
    path: &GridPath<T>,
    c: Complex<T>,
    shift: &Vec3<T>,
    scale: CorrectionScale,
) -> Complex<T> {
    stratonovich_values(pot, path.values(), path.dt(), c, shift, scale)
}

/// Oscillatory integral of the left-point cylinder functions: always 0.
pub fn cylinder_fresnel_left<T: Real>(_pot: &VectorPotentialFourier<T>, _n: usize, _t: T, _hbar: T) -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// `−ħ Σ_j Σ_α Σ_atoms e^{−(iħ/2)t_{j+1}|k|²}·(t_{j+1} − t_j)·k_α·w`.
pub fn cylinder_fresnel_right<T: Real>(pot: &VectorPotentialFourier<T>, n: usize, t: T, hbar: T) -> Complex<T> {
    let dt = t / T::lit(n as f64);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (a, m) in pot.mu().iter().enumerate() {
        for (k, w) in m.atoms() {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let mut s = Complex::new(T::zero(), T::zero());
            for j in 1..=n {
                let tj = dt * T::lit(j as f64);
                s += Complex::new(T::zero(), -hbar * tj * k2 / T::lit(2.0)).exp();
            }
            acc += *w * k[a] * s * dt;
        }
    }
    acc * (-hbar)
}

/// `−ħ Σ_α Σ_atoms w·k_α·∫₀ᵗ e^{−(iħ/2)s|k|²} ds`.
pub fn limit_right<T: Real>(pot: &VectorPotentialFourier<T>, t: T, hbar: T) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (a, m) in pot.mu().iter().enumerate() {
        for (k, w) in m.atoms() {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let integral = if k2 == T::zero() {
                Complex::from(t)
            } else {
                let rate = Complex::new(T::zero(), -hbar * k2 / T::lit(2.0));
                ((rate * t).exp() - T::one()) / rate
            };
            acc += *w * k[a] * integral;
        }
    }
    acc * (-hbar)
}

/// Probabilists' Hermite polynomial `He_n` at a complex point.
pub fn hermite_he<T: Real>(n: usize, x: Complex<T>) -> Complex<T> {
    let mut h0 = Complex::new(T::one(), T::zero());
    if n == 0 {
        return h0;
    }
    let mut h1 = x;
    for m in 1..n {
        let h2 = x * h1 - h0 * T::lit(m as f64);
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `E[e^{i√i ζX}·X^{2k}]` for `X ~ N(0,1)`, equal to
/// `(−1)^k He_{2k}(√i ζ)·e^{−iζ²/2}`.
pub fn gaussian_osc_moment<T: Real>(zeta: Complex<T>, k: usize) -> Complex<T> {
    let a = crate::scalar::sqrt_i::<T>() * zeta;
    let sign = if k % 2 == 0 { T::one() } else { -T::one() };
    hermite_he(2 * k, a) * sign * (-(a * a) * T::lit(0.5)).exp()
}
