//! Grid propagator for `H = ½(−iħ∇ − λa)²` on a periodic box `[−L, L)^d`.
//!
//! The Hamiltonian is the sum of the axis pieces `H_j = ½(p_j − λa_j)²`.
//! Each `a_j` is split as `b_j + ∂_jχ_j` with `b_j` independent of `x_j`;
//! then `H_j = e^{iλχ_j/ħ}·½(p_j − λb_j)²·e^{−iλχ_j/ħ}` and the inner
//! operator is diagonal along the lines of axis `j` after a 1D FFT, so
//! every axis flow is applied exactly. The axis flows are composed in the
//! symmetric order `A₀(½)…A_{d−2}(½) A_{d−1}(1) A_{d−2}(½)…A₀(½)`.
//!
//! In `d = 2` the potential must not depend on `x₃`; its third component
//! then enters as the multiplication operator `½λ²a₃²`.

pub mod io;

use crate::error::{Error, Result};
use crate::fourier_measure::{PointMassMeasure, VectorPotentialFourier};
use crate::scalar::Vec3;
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

type C64 = Complex<f64>;

/// Bound on `Δt·ħ·k_max²`, the per-step phase of the Nyquist mode.
pub const STEP_PHASE_BOUND: f64 = 64.0;

/// Sampled wave function on the periodic box `[−L, L)^d`, axis 0 fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    pub dim: usize,
    pub n: usize,
    pub half_width: f64,
    pub time: f64,
    pub values: Vec<C64>,
}

impl GridState {
    pub fn from_fn(dim: usize, n: usize, half_width: f64, f: impl Fn(&Vec3<f64>) -> C64) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidArgument(format!("dimension {dim} is not 2 or 3")));
        }
        if !n.is_power_of_two() || n < 4 {
            return Err(Error::InvalidArgument(format!("resolution {n} is not a power of two ≥ 4")));
        }
        if !(half_width > 0.0) {
            return Err(Error::InvalidArgument("box half-width must be positive".into()));
        }
        let mut s = Self { dim, n, half_width, time: 0.0, values: vec![C64::new(0.0, 0.0); n.pow(dim as u32)] };
        for idx in 0..s.values.len() {
            s.values[idx] = f(&s.point(idx));
        }
        Ok(s)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Largest grid wavenumber `π/h`.
    pub fn k_max(&self) -> f64 {
        PI / self.spacing()
    }

    pub fn point(&self, idx: usize) -> Vec3<f64> {
        let h = self.spacing();
        let mut x = [0.0; 3];
        let mut r = idx;
        for xd in x.iter_mut().take(self.dim) {
            *xd = -self.half_width + (r % self.n) as f64 * h;
            r /= self.n;
        }
        x
    }

    fn wavenumber(&self, m: usize) -> f64 {
        let m = if m < self.n / 2 { m as f64 } else { m as f64 - self.n as f64 };
        PI * m / self.half_width
    }

    pub fn norm(&self) -> f64 {
        let cell = self.spacing().powi(self.dim as i32);
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell).sqrt()
    }

    /// Fraction of `‖ψ‖²` within `width` of the box faces.
    pub fn boundary_mass(&self, width: f64) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        let edge: f64 = (0..self.values.len())
            .filter(|&i| {
                let x = self.point(i);
                x.iter().take(self.dim).any(|c| c.abs() > self.half_width - width)
            })
            .map(|i| self.values[i].norm_sqr())
            .sum();
        edge / total
    }

    /// Trigonometric interpolant at an arbitrary point.
    pub fn eval_at(&self, x: &Vec3<f64>) -> C64 {
        let spec = self.spectrum();
        let total = self.values.len();
        let mut acc = C64::new(0.0, 0.0);
        for (idx, s) in spec.iter().enumerate() {
            let mut r = idx;
            let mut phase = 0.0;
            for xd in x.iter().take(self.dim) {
                phase += self.wavenumber(r % self.n) * (xd + self.half_width);
                r /= self.n;
            }
            acc += s * C64::new(0.0, phase).exp();
        }
        acc / total as f64
    }

    /// Values at several points, sharing one transform.
    pub fn eval_many(&self, xs: &[Vec3<f64>]) -> Vec<C64> {
        let spec = self.spectrum();
        let total = self.values.len() as f64;
        xs.iter()
            .map(|x| {
                let mut acc = C64::new(0.0, 0.0);
                for (idx, s) in spec.iter().enumerate() {
                    let mut r = idx;
                    let mut phase = 0.0;
                    for xd in x.iter().take(self.dim) {
                        phase += self.wavenumber(r % self.n) * (xd + self.half_width);
                        r /= self.n;
                    }
                    acc += s * C64::new(0.0, phase).exp();
                }
                acc / total
            })
            .collect()
    }

    fn spectrum(&self) -> Vec<C64> {
        let mut data = self.values.clone();
        let fft = FftPlanner::new().plan_fft_forward(self.n);
        for axis in 0..self.dim {
            for_each_line(self.n, self.dim, axis, |line| {
                let mut buf: Vec<C64> = line.iter().map(|&i| data[i]).collect();
                fft.process(&mut buf);
                for (&i, v) in line.iter().zip(buf) {
                    data[i] = v;
                }
            });
        }
        data
    }

    /// Pointwise `|ψ₁ − ψ₂|` maximum; grids must match.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim || self.n != other.n || self.half_width != other.half_width {
            return Err(Error::GridMismatch("states live on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn map_with_point(&self, f: impl Fn(&Vec3<f64>, C64) -> C64) -> Self {
        let mut out = self.clone();
        for (idx, v) in out.values.iter_mut().enumerate() {
            *v = f(&self.point(idx), *v);
        }
        out
    }
}

/// Calls `f` with the flat indices of every line along `axis`.
fn for_each_line(n: usize, dim: usize, axis: usize, mut f: impl FnMut(&[usize])) {
    let stride = n.pow(axis as u32);
    let total = n.pow(dim as u32);
    let mut line = vec![0usize; n];
    for base in 0..total {
        if (base / stride) % n != 0 {
            continue;
        }
        for (i, l) in line.iter_mut().enumerate() {
            *l = base + i * stride;
        }
        f(&line);
    }
}

/// Vector potential accepted by the solver.
#[derive(Clone, Debug, PartialEq)]
pub enum SolverPotential {
    /// `a(x) = αx + g`.
    Linear { alpha: [[f64; 3]; 3], shift: Vec3<f64> },
    Fourier(VectorPotentialFourier<f64>),
}

impl SolverPotential {
    pub fn linear(alpha: [[f64; 3]; 3]) -> Self {
        SolverPotential::Linear { alpha, shift: [0.0; 3] }
    }

    pub fn eval(&self, x: &Vec3<f64>) -> Vec3<f64> {
        match self {
            SolverPotential::Linear { alpha, shift } => {
                let mut out = *shift;
                for (i, o) in out.iter_mut().enumerate() {
                    *o += alpha[i][0] * x[0] + alpha[i][1] * x[1] + alpha[i][2] * x[2];
                }
                out
            }
            SolverPotential::Fourier(p) => {
                let v = p.eval_real(x);
                [v[0].re, v[1].re, v[2].re]
            }
        }
    }

    /// `(b_j(x), χ_j(x))` with `a_j = b_j + ∂_jχ_j` and `∂_j b_j = 0`.
    fn split(&self, j: usize, x: &Vec3<f64>) -> (f64, f64) {
        match self {
            SolverPotential::Linear { alpha, shift } => {
                let b = shift[j] + (0..3).filter(|&l| l != j).map(|l| alpha[j][l] * x[l]).sum::<f64>();
                (b, 0.5 * alpha[j][j] * x[j] * x[j])
            }
            SolverPotential::Fourier(p) => {
                let mut b = C64::new(0.0, 0.0);
                let mut chi = C64::new(0.0, 0.0);
                for (k, w) in p.mu()[j].atoms() {
                    let e = C64::new(0.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]).exp();
                    if k[j] == 0.0 {
                        b += w * e;
                    } else {
                        chi += w * e / C64::new(0.0, k[j]);
                    }
                }
                (b.re, chi.re)
            }
        }
    }

    fn depends_on_x3(&self) -> bool {
        match self {
            SolverPotential::Linear { alpha, .. } => (0..3).any(|i| alpha[i][2] != 0.0),
            SolverPotential::Fourier(p) => p.mu().iter().any(|m| m.atoms().iter().any(|(k, _)| k[2] != 0.0)),
        }
    }
}

/// Evolution parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveParams {
    pub lambda: f64,
    pub t: f64,
    pub steps: usize,
    pub hbar: f64,
    /// `e^{−tH/ħ}` instead of `e^{−itH/ħ}`; no renormalization per step.
    pub imaginary_time: bool,
}

struct AxisOp {
    axis: usize,
    /// `e^{iλχ_j/ħ}` on the grid, `None` when `χ_j ≡ 0`.
    gauge: Option<Vec<C64>>,
    /// `λb_j` per line, in line enumeration order.
    shift: Vec<f64>,
}

struct Stepper {
    n: usize,
    dim: usize,
    ops: Vec<AxisOp>,
    /// `e^{−τ·½λ²a₃²/ħ}` factors for the half step (`d = 2` only).
    extra_half: Option<Vec<C64>>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    /// Per axis: factors for `τ = Δt/2` and `τ = Δt`, line-major.
    factors: Vec<[Vec<C64>; 2]>,
}

fn flow(tau: f64, energy: f64, hbar: f64, imaginary: bool) -> C64 {
    if imaginary {
        C64::new((-tau * energy / hbar).exp(), 0.0)
    } else {
        C64::new(0.0, -tau * energy / hbar).exp()
    }
}

impl Stepper {
    fn new(state: &GridState, pot: &SolverPotential, p: &EvolveParams, dt: f64) -> Self {
        let (n, dim) = (state.n, state.dim);
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let mut ops = Vec::with_capacity(dim);
        let mut factors = Vec::with_capacity(dim);
        for axis in 0..dim {
            let mut gauge = vec![C64::new(1.0, 0.0); state.values.len()];
            let mut any_chi = false;
            for (idx, g) in gauge.iter_mut().enumerate() {
                let (_, chi) = pot.split(axis, &state.point(idx));
                if chi != 0.0 {
                    any_chi = true;
                }
                *g = C64::new(0.0, p.lambda * chi / p.hbar).exp();
            }
            let mut shift = Vec::new();
            for_each_line(n, dim, axis, |line| {
                let (b, _) = pot.split(axis, &state.point(line[0]));
                shift.push(p.lambda * b);
            });
            let make = |tau: f64| {
                let mut f = Vec::with_capacity(shift.len() * n);
                for s in &shift {
                    for m in 0..n {
                        let q = p.hbar * state.wavenumber(m) - s;
                        f.push(flow(tau, 0.5 * q * q, p.hbar, p.imaginary_time));
                    }
                }
                f
            };
            factors.push([make(0.5 * dt), make(dt)]);
            ops.push(AxisOp { axis, gauge: any_chi.then_some(gauge), shift });
        }
        let extra_half = (dim == 2).then(|| {
            (0..state.values.len())
                .map(|idx| {
                    let a3 = pot.eval(&state.point(idx))[2];
                    flow(0.5 * dt, 0.5 * p.lambda * p.lambda * a3 * a3, p.hbar, p.imaginary_time)
                })
                .collect::<Vec<_>>()
        });
        let extra_half = extra_half.filter(|v| v.iter().any(|c| *c != C64::new(1.0, 0.0)));
        Self { n, dim, ops, extra_half, fft, ifft, factors }
    }

    fn axis_flow(&self, values: &mut [C64], op: &AxisOp, which: usize) {
        let n = self.n;
        let fac = &self.factors[op.axis][which];
        let mut line_no = 0;
        let mut buf = vec![C64::new(0.0, 0.0); n];
        let inv_n = 1.0 / n as f64;
        for_each_line(n, self.dim, op.axis, |line| {
            for (b, &i) in buf.iter_mut().zip(line) {
                *b = match &op.gauge {
                    Some(g) => values[i] * g[i].conj(),
                    None => values[i],
                };
            }
            self.fft.process(&mut buf);
            for (m, b) in buf.iter_mut().enumerate() {
                *b *= fac[line_no * n + m];
            }
            self.ifft.process(&mut buf);
            for (b, &i) in buf.iter().zip(line) {
                values[i] = match &op.gauge {
                    Some(g) => b * inv_n * g[i],
                    None => b * inv_n,
                };
            }
            line_no += 1;
        });
        debug_assert_eq!(line_no, op.shift.len());
    }

    fn step(&self, values: &mut [C64]) {
        if let Some(e) = &self.extra_half {
            values.iter_mut().zip(e).for_each(|(v, f)| *v *= f);
        }
        let last = self.ops.len() - 1;
        for op in &self.ops[..last] {
            self.axis_flow(values, op, 0);
        }
        self.axis_flow(values, &self.ops[last], 1);
        for op in self.ops[..last].iter().rev() {
            self.axis_flow(values, op, 0);
        }
        if let Some(e) = &self.extra_half {
            values.iter_mut().zip(e).for_each(|(v, f)| *v *= f);
        }
    }
}

fn check_resolution(state: &GridState, pot: &SolverPotential, p: &EvolveParams) -> Result<()> {
    let k_max = state.k_max();
    if let SolverPotential::Fourier(f) = pot {
        if !f.is_real() {
            return Err(Error::NonRealPotential);
        }
        let r = f.support_radius();
        if 2.0 * r >= k_max {
            return Err(Error::NyquistExceeded { support: 2.0 * r, nyquist: k_max });
        }
    }
    // the gauge phases λa/ħ must leave room for the state's own spectrum
    let mut sup: f64 = 0.0;
    for idx in 0..state.values.len() {
        let a = pot.eval(&state.point(idx));
        sup = sup.max(a.iter().take(state.dim).fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let phase = p.lambda.abs() * sup / p.hbar;
    if 2.0 * phase >= k_max {
        return Err(Error::NyquistExceeded { support: 2.0 * phase, nyquist: k_max });
    }
    Ok(())
}

/// Propagates `state` to `state.time + t` in `steps` equal steps.
pub fn evolve(state: &GridState, pot: &SolverPotential, p: &EvolveParams) -> Result<GridState> {
    if !(p.t > 0.0) || p.steps == 0 || !(p.hbar > 0.0) {
        return Err(Error::InvalidArgument("need t > 0, steps ≥ 1 and ħ > 0".into()));
    }
    if state.dim == 2 && pot.depends_on_x3() {
        return Err(Error::InvalidArgument("a 2D run needs a potential independent of x₃".into()));
    }
    let dt = p.t / p.steps as f64;
    let bound = STEP_PHASE_BOUND / (p.hbar * state.k_max().powi(2));
    if dt > bound {
        return Err(Error::UnstableStep { dt, bound });
    }
    check_resolution(state, pot, p)?;
    let stepper = Stepper::new(state, pot, p, dt);
    let mut out = state.clone();
    for _ in 0..p.steps {
        stepper.step(&mut out.values);
    }
    out.time += p.t;
    Ok(out)
}

/// Gauge function `χ`.
#[derive(Clone, Debug, PartialEq)]
pub enum GaugeFn {
    /// `χ(x) = ½xᵀQx + g·x` with symmetric `Q`.
    Quadratic { q: [[f64; 3]; 3], g: Vec3<f64> },
    /// `χ(x) = Σ w·e^{ik·x}` (real).
    Fourier(PointMassMeasure<f64>),
}

impl GaugeFn {
    pub fn eval(&self, x: &Vec3<f64>) -> f64 {
        match self {
            GaugeFn::Quadratic { q, g } => {
                let mut v = g[0] * x[0] + g[1] * x[1] + g[2] * x[2];
                for i in 0..3 {
                    for j in 0..3 {
                        v += 0.5 * x[i] * q[i][j] * x[j];
                    }
                }
                v
            }
            GaugeFn::Fourier(m) => m.eval_real(x).re,
        }
    }
}

/// `(e^{iλχ/ħ}ψ, a + ∇χ)`.
pub fn gauge_transform(
    state: &GridState,
    pot: &SolverPotential,
    chi: &GaugeFn,
    lambda: f64,
    hbar: f64,
) -> Result<(GridState, SolverPotential)> {
    let new_pot = match (pot, chi) {
        (SolverPotential::Linear { alpha, shift }, GaugeFn::Quadratic { q, g }) => {
            for i in 0..3 {
                for j in 0..3 {
                    if (q[i][j] - q[j][i]).abs() > 1e-14 {
                        return Err(Error::InvalidArgument("Q must be symmetric".into()));
                    }
                }
            }
            let mut a = *alpha;
            let mut s = *shift;
            for i in 0..3 {
                s[i] += g[i];
                for j in 0..3 {
                    a[i][j] += q[i][j];
                }
            }
            SolverPotential::Linear { alpha: a, shift: s }
        }
        (SolverPotential::Fourier(f), GaugeFn::Quadratic { q, g }) if *q == [[0.0; 3]; 3] => {
            let mut mu = f.mu().clone();
            for (j, m) in mu.iter_mut().enumerate() {
                *m = m.add(&PointMassMeasure::dirac([0.0; 3], C64::new(g[j], 0.0)));
            }
            SolverPotential::Fourier(VectorPotentialFourier::real(mu)?)
        }
        (SolverPotential::Fourier(f), GaugeFn::Fourier(m)) => {
            let mut mu = f.mu().clone();
            for (j, mj) in mu.iter_mut().enumerate() {
                let grad: Vec<_> = m.atoms().iter().map(|(k, w)| (*k, w * C64::new(0.0, k[j]))).collect();
                *mj = mj.add(&PointMassMeasure::new(grad));
            }
            SolverPotential::Fourier(VectorPotentialFourier::real(mu)?)
        }
        _ => {
            return Err(Error::InvalidArgument(
                "gauge function and potential cannot be combined in closed form".into(),
            ))
        }
    };
    let out = state.map_with_point(|x, v| v * C64::new(0.0, lambda * chi.eval(x) / hbar).exp());
    Ok((out, new_pot))
}

/// `e^{−iλχ/ħ}ψ`, undoing the state part of [`gauge_transform`].
pub fn ungauge(state: &GridState, chi: &GaugeFn, lambda: f64, hbar: f64) -> GridState {
    state.map_with_point(|x, v| v * C64::new(0.0, -lambda * chi.eval(x) / hbar).exp())
}
