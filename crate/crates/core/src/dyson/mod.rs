//! Dyson series in Fourier space.
//!
//! With `H = H₀ + λA + λ²B` (`H₀ = −ħ²Δ/2`, `A = iħa·∇`, `B = |a|²/2`) the
//! semigroup `e^{−zH}` is expanded over time-ordered chains. A chain visits
//! frequencies `y₀ → y₁ → … → y_n` and its time integral over the simplex
//! is the divided difference of `u ↦ e^{−uT}` at `u_i = κ|y_i|²`, up to the
//! sign `(−1)^n`. Real time uses `κ = iħ/2`, `T = t` and the prefactor
//! `−i/ħ` per operator; the analytic family uses `κ = zħ²/2`, `T = 1` and
//! `−z`, so `z = it/ħ` is real time again.

pub mod packet;
pub mod simplex;

pub use packet::WavePacket;
pub use simplex::{exp_divided_difference, simplex_phase_integral};

use crate::error::{Error, Result};
use crate::fourier_measure::{PointMassMeasure, VectorPotentialFourier};
use crate::scalar::{Real, Vec3};
use num_complex::Complex;

pub const DEFAULT_ORDER_CAP: usize = 4;

/// Identifies a term of the expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermIndex {
    /// `k` insertions of `A` among `n` operators.
    Nk(usize, usize),
    /// Coefficient of `λ^m`.
    M(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DysonTerm<T: Real> {
    pub index: TermIndex,
    pub state: WavePacket<T>,
    pub bound: T,
}

/// Certified estimate of `Σ_{m>M} |λ|^m ‖φ_m‖`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailBound<T: Real> {
    Converges(T),
    Divergent,
}

impl<T: Real> TailBound<T> {
    pub fn is_convergent(&self) -> bool {
        matches!(self, TailBound::Converges(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialSum<T: Real> {
    pub state: WavePacket<T>,
    /// `φ_0, …, φ_M` without the `λ^m` factor.
    pub terms: Vec<DysonTerm<T>>,
    pub tail: TailBound<T>,
    /// Set when `|λ|` is not below the certified radius.
    pub outside_radius: bool,
    pub radius: T,
}

/// Operators of one chain slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    A,
    B,
}

/// Evaluation time data: `e^{−κ|y|²s}` for `s ∈ [0, T]`, prefactor per
/// operator.
#[derive(Clone, Copy, Debug)]
struct Clock<T: Real> {
    kappa: Complex<T>,
    horizon: T,
    prefactor: Complex<T>,
}

/// Dyson machinery for a fixed Coulomb-gauge potential and optional scalar
/// potential `V` (which then joins every `A` slot as `A + V`).
#[derive(Clone, Debug)]
pub struct DysonEngine<T: Real> {
    pot: VectorPotentialFourier<T>,
    scalar: Option<PointMassMeasure<T>>,
    half_a2: PointMassMeasure<T>,
    hbar: T,
    cap: usize,
    alpha: T,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl<T: Real> DysonEngine<T> {
    pub fn new(pot: VectorPotentialFourier<T>, hbar: T) -> Result<Self> {
        if !(hbar > T::zero()) {
            return Err(Error::InvalidArgument("hbar must be positive".into()));
        }
        let tv = pot.total_variations();
        let alpha = (tv[0] * tv[0] + tv[1] * tv[1] + tv[2] * tv[2]).sqrt();
        let half_a2 = pot.a_squared_measure().scaled(Complex::new(T::lit(0.5), T::zero()));
        Ok(Self { pot, scalar: None, half_a2, hbar, cap: DEFAULT_ORDER_CAP, alpha })
    }

    pub fn with_scalar_potential(mut self, v: PointMassMeasure<T>) -> Self {
        self.scalar = Some(v);
        self
    }

    pub fn with_order_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn order_cap(&self) -> usize {
        self.cap
    }

    pub fn potential(&self) -> &VectorPotentialFourier<T> {
        &self.pot
    }

    /// Certified `α` (total-variation bound on `sup|a|`).
    pub fn alpha(&self) -> T {
        self.alpha
    }

    fn real_time(&self, t: T) -> Clock<T> {
        Clock {
            kappa: Complex::new(T::zero(), self.hbar / T::lit(2.0)),
            horizon: t,
            prefactor: Complex::new(T::zero(), -T::one() / self.hbar),
        }
    }

    fn analytic(&self, z: Complex<T>) -> Clock<T> {
        Clock { kappa: z * (self.hbar * self.hbar / T::lit(2.0)), horizon: T::one(), prefactor: -z }
    }

    /// One step of `A` (plus `V` if present) on a single atom.
    fn push_a(&self, y: &Vec3<T>, w: Complex<T>, out: &mut Vec<(Vec3<T>, Complex<T>)>) {
        for (j, m) in self.pot.mu().iter().enumerate() {
            if y[j] == T::zero() {
                continue;
            }
            let f = w * (-self.hbar * y[j]);
            for (k, c) in m.atoms() {
                out.push(([y[0] + k[0], y[1] + k[1], y[2] + k[2]], f * *c));
            }
        }
        if let Some(v) = &self.scalar {
            for (k, c) in v.atoms() {
                out.push(([y[0] + k[0], y[1] + k[1], y[2] + k[2]], w * *c));
            }
        }
    }

    fn push_b(&self, y: &Vec3<T>, w: Complex<T>, out: &mut Vec<(Vec3<T>, Complex<T>)>) {
        for (k, c) in self.half_a2.atoms() {
            out.push(([y[0] + k[0], y[1] + k[1], y[2] + k[2]], w * *c));
        }
    }

    /// `Aψ` with the support bookkeeping `ρ + R` (or `ρ + max(R, R_V)`).
    pub fn apply_a(&self, state: &WavePacket<T>) -> WavePacket<T> {
        let mut out = Vec::new();
        for (y, w) in state.atoms() {
            self.push_a(y, *w, &mut out);
        }
        let r = self.a_slot_radius();
        WavePacket::from_measure(
            PointMassMeasure::with_radius(out, state.support_radius() + r).expect("support bound"),
        )
    }

    /// `Bψ = ½(μ_{a²} ∗ ψ̂)` with support `ρ + 2R`.
    pub fn apply_b(&self, state: &WavePacket<T>) -> WavePacket<T> {
        let mut out = Vec::new();
        for (y, w) in state.atoms() {
            self.push_b(y, *w, &mut out);
        }
        let r = T::lit(2.0) * self.pot.support_radius();
        WavePacket::from_measure(
            PointMassMeasure::with_radius(out, state.support_radius() + r).expect("support bound"),
        )
    }

    fn a_slot_radius(&self) -> T {
        let r = self.pot.support_radius();
        match &self.scalar {
            Some(v) => r.max(v.support_radius()),
            None => r,
        }
    }

    fn check_cap(&self, n: usize) -> Result<()> {
        if n > self.cap {
            return Err(Error::Capacity { requested: n, cap: self.cap });
        }
        Ok(())
    }

    /// Sum over all slot assignments with `k` A-slots of the chain integrals
    /// (no prefactor).
    fn chain_sum(&self, n: usize, k: usize, psi0: &WavePacket<T>, clock: &Clock<T>) -> WavePacket<T> {
        let mut atoms = Vec::new();
        for slots in slot_patterns(n, k) {
            for (y0, w0) in psi0.atoms() {
                let mut nodes = Vec::with_capacity(n + 1);
                nodes.push(node(clock, y0));
                self.walk(&slots, 0, *y0, *w0, &mut nodes, clock, &mut atoms);
            }
        }
        let radius = psi0.support_radius()
            + self.a_slot_radius() * T::lit(k as f64)
            + T::lit(2.0 * (n - k) as f64) * self.pot.support_radius();
        WavePacket::from_measure(PointMassMeasure::with_radius(atoms, radius).expect("support bound"))
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        slots: &[Slot],
        depth: usize,
        y: Vec3<T>,
        w: Complex<T>,
        nodes: &mut Vec<Complex<T>>,
        clock: &Clock<T>,
        out: &mut Vec<(Vec3<T>, Complex<T>)>,
    ) {
        if depth == slots.len() {
            out.push((y, w * exp_divided_difference(clock.horizon, nodes)));
            return;
        }
        let mut next = Vec::new();
        match slots[depth] {
            Slot::A => self.push_a(&y, w, &mut next),
            Slot::B => self.push_b(&y, w, &mut next),
        }
        for (y1, w1) in next {
            nodes.push(node(clock, &y1));
            self.walk(slots, depth + 1, y1, w1, nodes, clock, out);
            nodes.pop();
        }
    }

    fn nk_bound(&self, n: usize, k: usize, rho: T, horizon: T) -> T {
        let a = self.alpha.to_f64_lossy();
        let hb = self.hbar.to_f64_lossy();
        let r = self.pot.support_radius().to_f64_lossy();
        let ra = self.a_slot_radius().to_f64_lossy();
        let v = self.scalar.as_ref().map_or(0.0, |m| m.total_variation().to_f64_lossy());
        let rho = rho.to_f64_lossy();
        let nb = (n - k) as f64;
        let mut prod = 1.0;
        for j in 0..k {
            prod *= hb * a * (rho + 2.0 * r * nb + j as f64 * ra) + v;
        }
        let b = binom(n, k) * horizon.to_f64_lossy().powi(n as i32) / factorial(n)
            * (a * a / 2.0).powi((n - k) as i32)
            * prod;
        T::lit(b)
    }

    fn phi_nk_with(&self, n: usize, k: usize, psi0: &WavePacket<T>, clock: &Clock<T>) -> Result<DysonTerm<T>> {
        if k > n {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
        }
        self.check_cap(n)?;
        let state = self.chain_sum(n, k, psi0, clock);
        let bound = self.nk_bound(n, k, psi0.support_radius(), clock.horizon) * psi0.norm_surrogate();
        Ok(DysonTerm { index: TermIndex::Nk(n, k), state, bound })
    }

    /// `φ_{n,k}`: time-ordered products with `k` factors `A` and `n − k`
    /// factors `B` integrated over `Δ_n(t)`, without `(−i/ħ)^n`.
    pub fn phi_nk(&self, n: usize, k: usize, psi0: &WavePacket<T>, t: T) -> Result<DysonTerm<T>> {
        self.phi_nk_with(n, k, psi0, &self.real_time(t))
    }

    fn phi_m_with(&self, m: usize, psi0: &WavePacket<T>, clock: &Clock<T>) -> Result<DysonTerm<T>> {
        let mut state = WavePacket::zero();
        let mut bound = T::zero();
        for n in (m + 1) / 2..=m {
            let k = 2 * n - m;
            let term = self.phi_nk_with(n, k, psi0, clock)?;
            let pref = clock.prefactor.powu(n as u32);
            state = state.add(&term.state.scaled(pref));
            bound += term.bound * clock.prefactor.norm().powi(n as i32);
        }
        if m == 0 {
            state = psi0.apply_free(clock.kappa, clock.horizon);
        }
        Ok(DysonTerm { index: TermIndex::M(m), state, bound })
    }

    /// `φ_m = Σ_{2n−k=m} (−i/ħ)^n φ_{n,k}`.
    pub fn phi_m(&self, m: usize, psi0: &WavePacket<T>, t: T) -> Result<DysonTerm<T>> {
        self.phi_m_with(m, psi0, &self.real_time(t))
    }

    /// `r = max(ρ, R)`. With a scalar potential the A slot costs at most
    /// `ħα(ρ' + v/(ħα))` at radius `ρ'`, so `ρ` is shifted by `v/(ħα)`
    /// (`v = TV(μ_V)`) and `R` is replaced by `max(R, R_V)`.
    fn r_of(&self, psi0: &WavePacket<T>) -> T {
        let rho = match &self.scalar {
            Some(v) if self.alpha > T::zero() => psi0.support_radius() + v.total_variation() / (self.hbar * self.alpha),
            _ => psi0.support_radius(),
        };
        rho.max(self.a_slot_radius())
    }

    /// `q = 2α²τ(2r²ħ²τ + 1)` with `τ = |prefactor|·T`; the even terms
    /// obey `‖φ_{2M}‖ ≤ q^M‖ψ₀‖`, the odd ones `‖φ_{2M+1}‖ ≤ 2rαħτ·q^M‖ψ₀‖`.
    fn geometric_ratio(&self, psi0: &WavePacket<T>, clock: &Clock<T>) -> (T, T) {
        let tau = clock.prefactor.norm() * clock.horizon;
        let r = self.r_of(psi0);
        let two = T::lit(2.0);
        let q = two * self.alpha * self.alpha * tau * (two * r * r * self.hbar * self.hbar * tau + T::one());
        let odd = two * r * self.alpha * self.hbar * tau;
        (q, odd)
    }

    /// Certified bound for `Σ_{m>M} |λ|^m ‖φ_m‖`.
    fn tail(&self, lambda: T, big_m: usize, psi0: &WavePacket<T>, clock: &Clock<T>) -> TailBound<T> {
        let l = lambda.abs();
        let norm0 = psi0.norm_surrogate();
        if self.alpha == T::zero() {
            // only V slots survive: ‖φ_m‖ ≤ (τv)^m/m!
            let tau = clock.prefactor.norm() * clock.horizon;
            let v = self.scalar.as_ref().map_or(T::zero(), |m| m.total_variation());
            let x = l * tau * v;
            let mut term = T::one();
            for m in 1..=big_m + 1 {
                term = term * x / T::lit(m as f64);
            }
            return TailBound::Converges(term * x.exp() * norm0);
        }
        let (q, odd) = self.geometric_ratio(psi0, clock);
        let x = l * l * q;
        if x >= T::one() {
            return TailBound::Divergent;
        }
        // Σ over m = 2M'+e > big_m of l^m·c_e·q^{M'}
        let mut total = T::zero();
        for parity in 0..2usize {
            let coef = if parity == 0 { T::one() } else { odd * l };
            // smallest M' with 2M' + parity > big_m
            let first = (big_m + 2 - parity) / 2;
            total += coef * x.powi(first as i32) / (T::one() - x);
        }
        TailBound::Converges(total * norm0)
    }

    fn partial_with(&self, lambda: T, big_m: usize, psi0: &WavePacket<T>, clock: &Clock<T>) -> Result<PartialSum<T>> {
        let mut state = WavePacket::zero();
        let mut terms = Vec::with_capacity(big_m + 1);
        for m in 0..=big_m {
            let term = self.phi_m_with(m, psi0, clock)?;
            state = state.add(&term.state.scaled(Complex::from(lambda.powi(m as i32))));
            terms.push(term);
        }
        let (q, _) = self.geometric_ratio(psi0, clock);
        let radius = if q > T::zero() { q.sqrt().recip() } else { T::infinity() };
        let tail = self.tail(lambda, big_m, psi0, clock);
        Ok(PartialSum { state, terms, outside_radius: !(lambda.abs() < radius), tail, radius })
    }

    /// `Σ_{m≤M} λ^m φ_m` for `e^{−itH/ħ}ψ₀`.
    pub fn dyson_partial_sum(&self, lambda: T, big_m: usize, psi0: &WavePacket<T>, t: T) -> Result<PartialSum<T>> {
        self.partial_with(lambda, big_m, psi0, &self.real_time(t))
    }

    /// Certified bound on the real-time tail `Σ_{m>M} |λ|^m ‖φ_m‖`.
    pub fn tail_bound(&self, lambda: T, big_m: usize, psi0: &WavePacket<T>, t: T) -> TailBound<T> {
        self.tail(lambda, big_m, psi0, &self.real_time(t))
    }

    /// `Σ_{m≤M} λ^m φ_m(z)` for `e^{−zH}ψ₀`, `Re z ≥ 0`.
    pub fn heat_dyson(&self, z: Complex<T>, lambda: T, big_m: usize, psi0: &WavePacket<T>) -> Result<PartialSum<T>> {
        if z.re < T::zero() {
            return Err(Error::InvalidArgument(format!("Re z = {} is negative", z.re)));
        }
        self.partial_with(lambda, big_m, psi0, &self.analytic(z))
    }

    /// Single `φ_m(z)` of the analytic family.
    pub fn phi_m_z(&self, m: usize, psi0: &WavePacket<T>, z: Complex<T>) -> Result<DysonTerm<T>> {
        if z.re < T::zero() {
            return Err(Error::InvalidArgument(format!("Re z = {} is negative", z.re)));
        }
        self.phi_m_with(m, psi0, &self.analytic(z))
    }
}

fn node<T: Real>(clock: &Clock<T>, y: &Vec3<T>) -> Complex<T> {
    let y2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    -clock.kappa * y2
}

/// All slot sequences of length `n` with exactly `k` A's, in time order.
fn slot_patterns(n: usize, k: usize) -> Vec<Vec<Slot>> {
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).map(|i| if mask & (1 << i) != 0 { Slot::A } else { Slot::B }).collect());
        }
    }
    out
}

/// `U₀(s)ψ` with `e^{−iħ|y|²s/2}`.
pub fn apply_u0<T: Real>(state: &WavePacket<T>, s: T, hbar: T) -> WavePacket<T> {
    state.apply_u0(s, hbar)
}

/// `Vψ`: convolution with `μ_V`, support grows by `R_V`.
pub fn apply_v<T: Real>(state: &WavePacket<T>, v: &PointMassMeasure<T>) -> WavePacket<T> {
    WavePacket::from_measure(state.measure().convolve(v))
}
