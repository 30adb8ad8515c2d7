//! Monte Carlo evaluation of Wiener integrals for the magnetic propagator.
//!
//! Paths `ω` are real Brownian paths sampled on a uniform grid; the complex
//! scale `c` (`√(iħ)` in real time, `√ħ` for the heat semigroup) enters only
//! through the integrand. All estimators here work in `f64`.

pub mod engine;
pub mod initial;

pub use engine::{reduce_samples, Moments, BLOCK};
pub use initial::{GaussianPacket, InitialState};

use crate::cameron_martin::normal_increments;
use crate::dyson::{DysonEngine, TailBound, WavePacket};
use crate::error::{Error, Result};
use crate::fourier_measure::{LinearVectorPotential, PhysicalParams, PointMassMeasure, VectorField, VectorPotentialFourier};
use crate::scalar::{CVec3, Vec3};
use crate::stoch_integrals::{riemann_sum_values, stratonovich_values, CorrectionScale, QuadratureRule};
use num_complex::Complex;

type C64 = Complex<f64>;

/// Line-integral rule used by an estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McRule {
    /// Stratonovich: the corrected Itô form for general fields, the exact
    /// midpoint sum for linear fields.
    Corrected,
    Plain(QuadratureRule),
}

impl std::fmt::Display for McRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            McRule::Corrected => write!(f, "corrected"),
            McRule::Plain(QuadratureRule::Left) => write!(f, "left"),
            McRule::Plain(QuadratureRule::Right) => write!(f, "right"),
            McRule::Plain(QuadratureRule::Midpoint) => write!(f, "midpoint"),
        }
    }
}

/// Sampling budget. `threads = None` uses the global rayon pool; the result
/// does not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub n_steps: usize,
    pub n_samples: u64,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl McConfig {
    pub fn new(n_steps: usize, n_samples: u64, seed: u64) -> Result<Self> {
        if n_steps == 0 || n_samples < 2 {
            return Err(Error::InvalidArgument("need n_steps ≥ 1 and n_samples ≥ 2".into()));
        }
        Ok(Self { n_steps, n_samples, seed, threads: None })
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }
}

impl Default for McConfig {
    fn default() -> Self {
        Self { n_steps: 512, n_samples: 100_000, seed: 0, threads: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MCEstimate {
    pub mean: C64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub n_samples: u64,
    pub n_steps: usize,
    pub seed: u64,
    pub rule: McRule,
}

impl MCEstimate {
    fn from_moments(m: &Moments, cfg: &McConfig, rule: McRule) -> Self {
        let (stderr_re, stderr_im) = m.stderr();
        Self { mean: m.mean(), stderr_re, stderr_im, n_samples: m.count, n_steps: cfg.n_steps, seed: cfg.seed, rule }
    }

    /// `√(σ_re² + σ_im²)`, the standard error of the complex mean.
    pub fn stderr(&self) -> f64 {
        self.stderr_re.hypot(self.stderr_im)
    }

    /// `|mean − reference|` in units of [`MCEstimate::stderr`].
    pub fn deviation(&self, reference: C64) -> f64 {
        (self.mean - reference).norm() / self.stderr()
    }
}

/// `Σ_{m≤M} λ^m ψ_m` with the certified Dyson tail.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesEstimate {
    pub estimate: MCEstimate,
    /// Partial sums `S_0, …, S_M` from the same samples.
    pub partial_sums: Vec<MCEstimate>,
    pub tail: TailBound<f64>,
}

/// Path knots `ω(t_j)`, `j = 0..=n`, for one sample index.
pub fn brownian_knots(n_steps: usize, t: f64, seed: u64, sample_index: u64) -> Vec<Vec3<f64>> {
    let sd = (t / n_steps as f64).sqrt();
    let mut out = Vec::with_capacity(n_steps + 1);
    let mut cur = [0.0; 3];
    out.push(cur);
    for xi in normal_increments(n_steps, seed, sample_index) {
        for d in 0..3 {
            cur[d] += sd * xi[d];
        }
        out.push(cur);
    }
    out
}

fn embed(c: C64, p: &Vec3<f64>, x: &Vec3<f64>) -> CVec3<f64> {
    [c * p[0] + x[0], c * p[1] + x[1], c * p[2] + x[2]]
}

/// `∫a(cω + x)·dω` on the knots under `rule`.
pub fn line_integral<F: VectorField<f64> + ?Sized>(
    field: &F,
    knots: &[Vec3<f64>],
    dt: f64,
    c: C64,
    x: &Vec3<f64>,
    rule: McRule,
) -> C64 {
    match rule {
        McRule::Corrected if field.as_linear().is_some() => {
            riemann_sum_values(field, knots, QuadratureRule::Midpoint, c, x)
        }
        McRule::Corrected => stratonovich_values(field, knots, dt, c, x, CorrectionScale::WithC),
        McRule::Plain(r) => riemann_sum_values(field, knots, r, c, x),
    }
}

/// `∫₀ᵗ V(cω + x) ds` by the trapezoid rule.
fn scalar_integral(v: &PointMassMeasure<f64>, knots: &[Vec3<f64>], dt: f64, c: C64, x: &Vec3<f64>) -> C64 {
    let n = knots.len() - 1;
    let mut acc = C64::new(0.0, 0.0);
    for (j, p) in knots.iter().enumerate() {
        let val = v.eval(&embed(c, p, x));
        acc += if j == 0 || j == n { val * 0.5 } else { val };
    }
    acc * dt
}

/// Shared kernel for the moment estimators: for each sample the outputs are
/// `(1/m!)·p^m·(c∫a∘dω + ∫V ds)^m·ψ₀(cω(t) + x)` for `m = 0..=M`.
#[allow(clippy::too_many_arguments)]
fn moments_kernel<F: VectorField<f64> + ?Sized, S: InitialState + ?Sized>(
    big_m: usize,
    field: &F,
    v: Option<&PointMassMeasure<f64>>,
    psi0: &S,
    c: C64,
    pref: C64,
    params: &PhysicalParams<f64>,
    cfg: &McConfig,
    rule: McRule,
) -> Vec<Moments> {
    let dt = params.t / cfg.n_steps as f64;
    reduce_samples(cfg.n_samples, big_m + 1, cfg.threads, |i, out| {
        let knots = brownian_knots(cfg.n_steps, params.t, cfg.seed, i);
        let mut s = c * line_integral(field, &knots, dt, c, &params.x, rule);
        if let Some(v) = v {
            s += scalar_integral(v, &knots, dt, c, &params.x);
        }
        let end = psi0.eval(&embed(c, knots.last().expect("knots"), &params.x));
        let mut acc = end;
        for (m, o) in out.iter_mut().enumerate() {
            if m > 0 {
                acc = acc * pref * s / m as f64;
            }
            *o = acc;
        }
    })
}

fn real_time_scale(params: &PhysicalParams<f64>) -> (C64, C64) {
    (params.c_scale(), C64::new(0.0, -1.0 / params.hbar))
}

/// `ψ_m(t, x)`: `(1/m!)(−i/ħ)^m E[(c∫a∘dω)^m ψ₀(cω(t) + x)]`, `c = √(iħ)`.
pub fn psi_m_mc<F: VectorField<f64> + ?Sized, S: InitialState + ?Sized>(
    m: usize,
    pot: &F,
    psi0: &S,
    params: &PhysicalParams<f64>,
    cfg: &McConfig,
) -> MCEstimate {
    psi_m_with_v(m, pot, None, psi0, params, cfg)
}

/// As [`psi_m_mc`] with the summand `(c∫a∘dω + ∫V ds)^m`.
pub fn psi_m_with_v<F: VectorField<f64> + ?Sized, S: InitialState + ?Sized>(
    m: usize,
    pot: &F,
    v: Option<&PointMassMeasure<f64>>,
    psi0: &S,
    params: &PhysicalParams<f64>,
    cfg: &McConfig,
) -> MCEstimate {
    psi_moments_mc(m, pot, v, psi0, params, cfg, McRule::Corrected).pop().expect("m+1 outputs")
}

/// `ψ_0, …, ψ_M` from common path samples.
pub fn psi_moments_mc<F: VectorField<f64> + ?Sized, S: InitialState + ?Sized>(
    big_m: usize,
    pot: &F,
    v: Option<&PointMassMeasure<f64>>,
    psi0: &S,
    params: &PhysicalParams<f64>,
    cfg: &McConfig,
    rule: McRule,
) -> Vec<MCEstimate> {
    let (c, pref) = real_time_scale(params);
    moments_kernel(big_m, pot, v, psi0, c, pref, params, cfg, rule)
        .iter()
        .map(|m| MCEstimate::from_moments(m, cfg, rule))
        .collect()
}

/// `Σ_{m≤M} λ^m ψ_m(t, x)` with common random numbers across `m`, plus the
/// certified tail of the exact series.
pub fn psi_series_mc(
    lambda: f64,
    big_m: usize,
    pot: &VectorPotentialFourier<f64>,
    psi0: &WavePacket<f64>,
    params: &PhysicalParams<f64>,
    cfg: &McConfig,
) -> Result<SeriesEstimate> {
    let (c, pref) = real_time_scale(params);
    let dt = params.t / cfg.n_steps as f64;
    let moments = reduce_samples(cfg.n_samples, big_m + 1, cfg.threads, |i, out| {
        let knots = brownian_knots(cfg.n_steps, params.t, cfg.seed, i);
        let s = c * line_integral(pot, &knots, dt, c, &params.x, McRule::Corrected);
        let mut term = psi0.eval(&embed(c, knots.last().expect("knots"), &params.x));
        let mut partial = term;
        out[0] = partial;
        for (m, o) in out.iter_mut().enumerate().skip(1) {
            term = term * pref * s * lambda / m as f64;
            partial += term;
            *o = partial;
        }
    });
    let partial_sums: Vec<MCEstimate> =
        moments.iter().map(|m| MCEstimate::from_moments(m, cfg, McRule::Corrected)).collect();
    let tail = DysonEngine::new(pot.clone(), params.hbar)?.tail_bound(lambda, big_m, psi0, params.t);
    Ok(SeriesEstimate { estimate: *partial_sums.last().expect("M+1 sums"), partial_sums, tail })
}

/// `E[ψ₀(cω(t) + x)·exp(p·λ·c∫a∘dω)]` for a general field.
pub fn exp_form_mc<F: VectorField<f64> + ?Sized, S: InitialState + ?Sized>(
    pot: &F,
    psi0: &S,
    c: C64,
    pref: C64,
    params: &PhysicalParams<f64>,
    cfg: &McConfig,
    rule: McRule,
) -> MCEstimate {
    let dt = params.t / cfg.n_steps as f64;
    let m = reduce_samples(cfg.n_samples, 1, cfg.threads, |i, out| {
        let knots = brownian_knots(cfg.n_steps, params.t, cfg.seed, i);
        let s = c * line_integral(pot, &knots, dt, c, &params.x, rule);
        let end = psi0.eval(&embed(c, knots.last().expect("knots"), &params.x));
        out[0] = end * (pref * params.lambda * s).exp();
    });
    MCEstimate::from_moments(&m[0], cfg, rule)
}

/// `E[ψ₀(cω(t) + x)·e^{−(iλ/ħ)c∫a∘dω}]`, `c = √(iħ)`, for a linear field.
///
/// The exponential has finite variance only for `t < t*`.
pub fn psi_exp_mc<S: InitialState + ?Sized>(
    pot: &LinearVectorPotential<f64>,
    psi0: &S,
    params: &PhysicalParams<f64>,
    cfg: &McConfig,
    rule: McRule,
) -> Result<MCEstimate> {
    if params.t >= pot.t_star {
        return Err(Error::BeyondThreshold { t: params.t, t_star: pot.t_star });
    }
    let (c, pref) = real_time_scale(params);
    Ok(exp_form_mc(pot, psi0, c, pref, params, cfg, rule))
}

/// Feynman–Kac–Itô estimate of `e^{−tH/ħ}ψ₀(x)`:
/// `E[ψ₀(√ħω(t) + x)·e^{−(iλ/ħ)√ħ∫a∘dω}]`.
///
/// With `real_time` set the same seeds feed the real-time exponential form
/// (`c = √(iħ)`), which for linear fields is [`psi_exp_mc`].
pub fn heat_fki_mc<F: VectorField<f64> + ?Sized, S: InitialState + ?Sized>(
    pot: &F,
    psi0: &S,
    params: &PhysicalParams<f64>,
    real_time: bool,
    cfg: &McConfig,
) -> Result<MCEstimate> {
    if real_time {
        return match pot.as_linear() {
            Some(lin) => psi_exp_mc(lin, psi0, params, cfg, McRule::Corrected),
            None => {
                let (c, pref) = real_time_scale(params);
                Ok(exp_form_mc(pot, psi0, c, pref, params, cfg, McRule::Corrected))
            }
        };
    }
    let c = C64::new(params.hbar.sqrt(), 0.0);
    let pref = C64::new(0.0, -1.0 / params.hbar);
    Ok(exp_form_mc(pot, psi0, c, pref, params, cfg, McRule::Corrected))
}

/// Heat-semigroup moments `(1/m!)(−i/ħ)^m E[(√ħ∫a∘dω)^m ψ₀(√ħω(t) + x)]`,
/// the coefficients of `λ^m` in [`heat_fki_mc`], from common samples.
pub fn heat_moments_mc<F: VectorField<f64> + ?Sized, S: InitialState + ?Sized>(
    big_m: usize,
    pot: &F,
    psi0: &S,
    params: &PhysicalParams<f64>,
    cfg: &McConfig,
) -> Vec<MCEstimate> {
    let c = C64::new(params.hbar.sqrt(), 0.0);
    let pref = C64::new(0.0, -1.0 / params.hbar);
    moments_kernel(big_m, pot, None, psi0, c, pref, params, cfg, McRule::Corrected)
        .iter()
        .map(|m| MCEstimate::from_moments(m, cfg, McRule::Corrected))
        .collect()
}

/// CSV rows `label,re,im,stderr_re,stderr_im,n_samples,n_steps,seed,rule`.
pub fn estimates_csv(rows: &[(String, MCEstimate)]) -> String {
    let mut s = String::from("label,re,im,stderr_re,stderr_im,n_samples,n_steps,seed,rule\n");
    for (label, e) in rows {
        s.push_str(&format!(
            "{label},{:.12e},{:.12e},{:.6e},{:.6e},{},{},{},{}\n",
            e.mean.re, e.mean.im, e.stderr_re, e.stderr_im, e.n_samples, e.n_steps, e.seed, e.rule
        ));
    }
    s
}
