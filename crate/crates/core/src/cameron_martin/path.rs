use crate::error::{Error, Result};
use crate::scalar::{cross, Real, Vec3};
use num_complex::Complex;
use std::fmt::{Debug, Write as _};
use num_traits::{One, Zero};
use std::ops::{Add, Mul, Sub};

/// Entry type of a path: a real scalar or a complex one over the same real.
pub trait PathScalar:
    Copy + Debug + PartialEq + Send + Sync + 'static + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    type R: Real;
    fn zero_value() -> Self;
    fn from_real(r: Self::R) -> Self;
    fn scale(self, r: Self::R) -> Self;
    fn re(self) -> Self::R;
    fn im(self) -> Self::R;
    fn to_complex(self) -> Complex<Self::R> {
        Complex::new(self.re(), self.im())
    }
}

macro_rules! real_path_scalar {
    ($t:ty) => {
        impl PathScalar for $t {
            type R = $t;
            fn zero_value() -> Self {
                0.0
            }
            fn from_real(r: $t) -> Self {
                r
            }
            fn scale(self, r: $t) -> Self {
                self * r
            }
            fn re(self) -> $t {
                self
            }
            fn im(self) -> $t {
                0.0
            }
        }
    };
}
real_path_scalar!(f32);
real_path_scalar!(f64);

impl<T: Real> PathScalar for Complex<T> {
    type R = T;
    fn zero_value() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    fn scale(self, r: T) -> Self {
        self * r
    }
    fn re(self) -> T {
        self.re
    }
    fn im(self) -> T {
        self.im
    }
}

/// Path on the uniform grid `t_j = j·t/n`, `j = 0..=n`, starting at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPath<S: PathScalar> {
    horizon: S::R,
    values: Vec<[S; 3]>,
}

fn vsub<S: PathScalar>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn vdot<S: PathScalar>(a: &[S; 3], b: &[S; 3]) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl<S: PathScalar> GridPath<S> {
    pub fn new(horizon: S::R, values: Vec<[S; 3]>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument("a path needs at least one step".into()));
        }
        if !(horizon > S::R::zero()) {
            return Err(Error::InvalidArgument("horizon must be positive".into()));
        }
        if values[0] != [S::zero_value(); 3] {
            return Err(Error::InvalidArgument("path must start at the origin".into()));
        }
        Ok(Self { horizon, values })
    }

    pub fn zeros(horizon: S::R, n: usize) -> Result<Self> {
        Self::new(horizon, vec![[S::zero_value(); 3]; n + 1])
    }

    /// Samples `f` at the grid times; `f(0)` is replaced by exact zero.
    pub fn from_fn(horizon: S::R, n: usize, f: impl Fn(S::R) -> [S; 3]) -> Result<Self> {
        let dt = horizon / S::R::lit(n as f64);
        let mut values = Vec::with_capacity(n + 1);
        values.push([S::zero_value(); 3]);
        for j in 1..=n {
            values.push(f(dt * S::R::lit(j as f64)));
        }
        Self::new(horizon, values)
    }

    pub fn horizon(&self) -> S::R {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> S::R {
        self.horizon / S::R::lit(self.n_steps() as f64)
    }

    pub fn time(&self, j: usize) -> S::R {
        self.dt() * S::R::lit(j as f64)
    }

    pub fn values(&self) -> &[[S; 3]] {
        &self.values
    }

    pub fn end(&self) -> [S; 3] {
        self.values[self.values.len() - 1]
    }

    pub fn increment(&self, j: usize) -> [S; 3] {
        vsub(&self.values[j + 1], &self.values[j])
    }

    fn check_same_grid<S2: PathScalar<R = S::R>>(&self, other: &GridPath<S2>) -> Result<()> {
        if self.n_steps() != other.n_steps() || self.horizon != other.horizon {
            return Err(Error::GridMismatch(format!(
                "({} steps, t = {}) vs ({} steps, t = {})",
                self.n_steps(),
                self.horizon,
                other.n_steps(),
                other.horizon
            )));
        }
        Ok(())
    }

    /// `∫γ̇₁·γ̇₂ ds`, exact for piecewise-linear paths (bilinear, no
    /// conjugation).
    pub fn cm_inner(&self, other: &Self) -> Result<S> {
        self.check_same_grid(other)?;
        let mut acc = S::zero_value();
        for j in 0..self.n_steps() {
            acc = acc + vdot(&self.increment(j), &other.increment(j));
        }
        Ok(acc.scale(S::R::one() / self.dt()))
    }

    /// Piecewise-linear interpolant through the values at `k·t/n`, rendered
    /// on this (fine) grid.
    pub fn project_piecewise_linear(&self, n: usize) -> Result<Self> {
        let coarse = self.coarsen(n)?;
        let fine = self.n_steps();
        let r = fine / n;
        let mut values = Vec::with_capacity(fine + 1);
        for j in 0..=fine {
            let (k, rem) = (j / r, j % r);
            if rem == 0 {
                values.push(coarse.values[k]);
            } else {
                let w = S::R::lit(rem as f64 / r as f64);
                let a = coarse.values[k];
                let b = coarse.values[k + 1];
                let d = vsub(&b, &a);
                values.push([a[0] + d[0].scale(w), a[1] + d[1].scale(w), a[2] + d[2].scale(w)]);
            }
        }
        Self::new(self.horizon, values)
    }

    /// The `n`-step path through the values at `k·t/n`.
    pub fn coarsen(&self, n: usize) -> Result<Self> {
        let fine = self.n_steps();
        if n == 0 || fine % n != 0 {
            return Err(Error::InvalidArgument(format!(
                "fine resolution {fine} is not divisible by {n}"
            )));
        }
        let r = fine / n;
        let values = (0..=n).map(|k| self.values[k * r]).collect();
        Self::new(self.horizon, values)
    }

    /// CSV rows `time,x1,x2,x3[,im1,im2,im3]`.
    pub fn to_csv(&self, with_imag: bool) -> String {
        let mut out = String::from(if with_imag { "time,x1,x2,x3,im1,im2,im3\n" } else { "time,x1,x2,x3\n" });
        for (j, v) in self.values.iter().enumerate() {
            let _ = write!(out, "{}", self.time(j));
            for c in v {
                let _ = write!(out, ",{}", c.re());
            }
            if with_imag {
                for c in v {
                    let _ = write!(out, ",{}", c.im());
                }
            }
            out.push('\n');
        }
        out
    }
}

impl<T: Real> GridPath<T> {
    pub fn cm_norm_sq(&self) -> T {
        self.cm_inner(self).expect("same grid")
    }

    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
            .fold(T::zero(), T::max)
    }

    /// `½∫γ∧γ̇ ds`, exact for the polygon: `½Σ_j γ_j ∧ γ_{j+1}`.
    pub fn area_integral(&self) -> Vec3<T> {
        let mut acc = [T::zero(); 3];
        for j in 0..self.n_steps() {
            let c = cross(&self.values[j], &self.values[j + 1]);
            for i in 0..3 {
                acc[i] += c[i];
            }
        }
        let h = T::lit(0.5);
        [acc[0] * h, acc[1] * h, acc[2] * h]
    }

    /// `c·γ` as a complex path.
    pub fn scaled_complex(&self, c: Complex<T>) -> GridPath<Complex<T>> {
        GridPath {
            horizon: self.horizon,
            values: self.values.iter().map(|v| [c * v[0], c * v[1], c * v[2]]).collect(),
        }
    }

    pub fn linear_combination(terms: &[(T, &Self)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty combination".into()))?
            .1;
        let mut values = vec![[<T as Zero>::zero(); 3]; first.values.len()];
        for (c, p) in terms {
            first.check_same_grid(*p)?;
            for (v, pv) in values.iter_mut().zip(&p.values) {
                for i in 0..3 {
                    v[i] += *c * pv[i];
                }
            }
        }
        Self::new(first.horizon, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_line_has_unit_norm() {
        let p = GridPath::<f64>::from_fn(1.0, 16, |s| [s, 0.0, 0.0]).unwrap();
        assert!((p.cm_norm_sq() - 1.0).abs() < 1e-14);
        assert_eq!(p.area_integral(), [0.0; 3]);
    }

    #[test]
    fn rejects_bad_paths() {
        assert!(GridPath::<f64>::new(1.0, vec![[0.0; 3]]).is_err());
        assert!(GridPath::<f64>::new(1.0, vec![[1.0, 0.0, 0.0], [0.0; 3]]).is_err());
        let a = GridPath::<f64>::zeros(1.0, 4).unwrap();
        let b = GridPath::<f64>::zeros(1.0, 8).unwrap();
        assert!(matches!(a.cm_inner(&b), Err(Error::GridMismatch(_))));
        assert!(b.coarsen(3).is_err());
    }

    #[test]
    fn projection_to_single_segment_is_straight_line() {
        let p = GridPath::<f64>::from_fn(2.0, 8, |s| [s * s, s.sin(), 0.0]).unwrap();
        let q = p.project_piecewise_linear(1).unwrap();
        let e = p.end();
        for (j, v) in q.values().iter().enumerate() {
            let w = j as f64 / 8.0;
            for i in 0..3 {
                assert!((v[i] - w * e[i]).abs() < 1e-14);
            }
        }
        assert_eq!(p.project_piecewise_linear(8).unwrap(), p);
    }

    #[test]
    fn complex_inner_is_bilinear() {
        let p = GridPath::<f64>::from_fn(1.0, 4, |s| [s, 0.0, 0.0]).unwrap();
        let c = Complex::new(0.0, 1.0);
        let pc = p.scaled_complex(c);
        let v = pc.cm_inner(&pc).unwrap();
        assert!((v - Complex::new(-1.0, 0.0)).norm() < 1e-14);
    }
}
