//! Orthonormal bases of the Cameron–Martin space.
//!
//! TENT is the Schauder system: `s/√t` in each direction, then the
//! integrals of Haar functions level by level. Index `i` is function
//! `i / 3` in direction `i % 3`, so the first `3·2^J` elements span the
//! piecewise-linear paths on `2^J` equal segments.
//!
//! TRIG lives on `[0, 1]`. With `u_k = cos(2πks)/(2πk)` and
//! `v_k = sin(2πks)/(2πk)`, elements are rendered with their value at 0
//! subtracted so that paths start at the origin:
//! `e_{0,d} = s·ê_d`, then for `k ≥ 1`
//! `e_{k,1} = (u,v,0)`, `e_{k,2} = (u,−v,0)`, `e_{k,3} = (v,u,0)`,
//! `e_{k,4} = (v,−u,0)`, `e_{k,5} = √2(0,0,u)`, `e_{k,6} = √2(0,0,v)`.

use super::path::GridPath;
use crate::error::{Error, Result};
use crate::scalar::{cross, Real, Vec3};

/// One scalar profile of a basis element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarFn<T: Real> {
    /// `s·slope`
    Linear { slope: T },
    /// Hat on `[a, b]` with apex `peak` at the midpoint.
    Tent { a: T, b: T, peak: T },
    /// `(cos(2πks) − 1)/(2πk)`
    Cos { k: usize },
    /// `sin(2πks)/(2πk)`
    Sin { k: usize },
}

impl<T: Real> ScalarFn<T> {
    pub fn value(&self, s: T) -> T {
        match *self {
            ScalarFn::Linear { slope } => slope * s,
            ScalarFn::Tent { a, b, peak } => {
                if s <= a || s >= b {
                    T::zero()
                } else {
                    let m = (a + b) / T::lit(2.0);
                    let h = (b - a) / T::lit(2.0);
                    peak * (T::one() - (s - m).abs() / h)
                }
            }
            ScalarFn::Cos { k } => {
                let w = T::lit(2.0 * std::f64::consts::PI * k as f64);
                ((w * s).cos() - T::one()) / w
            }
            ScalarFn::Sin { k } => {
                let w = T::lit(2.0 * std::f64::consts::PI * k as f64);
                (w * s).sin() / w
            }
        }
    }

    /// Derivative; at a kink the right derivative is returned.
    pub fn deriv(&self, s: T) -> T {
        match *self {
            ScalarFn::Linear { slope } => slope,
            ScalarFn::Tent { a, b, peak } => {
                let m = (a + b) / T::lit(2.0);
                let h = (b - a) / T::lit(2.0);
                if s < a || s >= b {
                    T::zero()
                } else if s < m {
                    peak / h
                } else {
                    -peak / h
                }
            }
            ScalarFn::Cos { k } => {
                let w = T::lit(2.0 * std::f64::consts::PI * k as f64);
                -(w * s).sin()
            }
            ScalarFn::Sin { k } => {
                let w = T::lit(2.0 * std::f64::consts::PI * k as f64);
                (w * s).cos()
            }
        }
    }
}

/// Basis element `Σ f_p(s)·d_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement<T: Real> {
    pub terms: Vec<(ScalarFn<T>, Vec3<T>)>,
    pub horizon: T,
}

impl<T: Real> BasisElement<T> {
    pub fn value(&self, s: T) -> Vec3<T> {
        let mut out = [T::zero(); 3];
        for (f, d) in &self.terms {
            let v = f.value(s);
            for i in 0..3 {
                out[i] += v * d[i];
            }
        }
        out
    }

    pub fn deriv(&self, s: T) -> Vec3<T> {
        let mut out = [T::zero(); 3];
        for (f, d) in &self.terms {
            let v = f.deriv(s);
            for i in 0..3 {
                out[i] += v * d[i];
            }
        }
        out
    }

    /// Samples the element on an `n`-step grid.
    pub fn render(&self, n: usize) -> Result<GridPath<T>> {
        GridPath::from_fn(self.horizon, n, |s| self.value(s))
    }

    /// `½∫e∧ė ds` by composite Simpson, doubling the panel count until the
    /// relative change drops below 1e-10 (at most `2^18` panels).
    pub fn area_integral(&self) -> Vec3<T> {
        if self.terms.iter().all(|(f, _)| matches!(f, ScalarFn::Linear { .. } | ScalarFn::Tent { .. }))
            && self.terms.len() == 1
        {
            // e ∥ ė for a single scalar profile
            return [T::zero(); 3];
        }
        let f = |s: T| {
            let c = cross(&self.value(s), &self.deriv(s));
            [c[0] * T::lit(0.5), c[1] * T::lit(0.5), c[2] * T::lit(0.5)]
        };
        let simpson = |panels: usize| {
            let h = self.horizon / T::lit(panels as f64);
            let mut acc = [T::zero(); 3];
            for p in 0..panels {
                let a = h * T::lit(p as f64);
                let (fa, fm, fb) = (f(a), f(a + h / T::lit(2.0)), f(a + h));
                for i in 0..3 {
                    acc[i] += h / T::lit(6.0) * (fa[i] + T::lit(4.0) * fm[i] + fb[i]);
                }
            }
            acc
        };
        let mut panels = 64usize;
        let mut prev = simpson(panels);
        while panels < (1 << 18) {
            panels *= 2;
            let cur = simpson(panels);
            let diff = (0..3).map(|i| (cur[i] - prev[i]).abs()).fold(T::zero(), T::max);
            let mag = (0..3).map(|i| cur[i].abs()).fold(T::zero(), T::max);
            prev = cur;
            if diff <= T::lit(1e-10) * mag || diff <= T::lit(1e-15) {
                break;
            }
        }
        prev
    }
}

/// 3-point Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gl3<T: Real>() -> [(T, T); 3] {
    let x = T::lit((0.6f64).sqrt());
    [(-x, T::lit(5.0 / 9.0)), (T::zero(), T::lit(8.0 / 9.0)), (x, T::lit(5.0 / 9.0))]
}

/// `∫₀ᵗ F(s) ds` by 3-point Gauss–Legendre on `cells` equal cells. Nodes
/// are interior, so kinks at cell boundaries cost nothing.
pub fn gl_integrate<T: Real>(horizon: T, cells: usize, f: impl Fn(T) -> T) -> T {
    let h = horizon / T::lit(cells as f64);
    let nodes = gl3::<T>();
    let mut acc = T::zero();
    for c in 0..cells {
        let mid = h * (T::lit(c as f64) + T::lit(0.5));
        let mut cell = T::zero();
        for (x, w) in nodes {
            cell += w * f(mid + x * h / T::lit(2.0));
        }
        acc += cell * h / T::lit(2.0);
    }
    acc
}

/// Cameron–Martin inner product of two elements by Gauss–Legendre
/// quadrature on `cells` cells.
pub fn cm_inner_quadrature<T: Real>(e1: &BasisElement<T>, e2: &BasisElement<T>, cells: usize) -> T {
    gl_integrate(e1.horizon, cells, |s| {
        let (a, b) = (e1.deriv(s), e2.deriv(s));
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    })
}

/// Which basis family, and for TRIG variants which elements in which order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Tent,
    /// `e_{0,1..3}`, then `e_{k,1..6}` for `k = 1, 2, ...`.
    Trig,
    /// For each `k ≥ 1`, the listed members of `{1..6}`; no `e_{0,·}`.
    TrigSubfamily(Vec<u8>),
    /// `e_{0,1..3}`, then at stage `K` the elements `e_{K,1}, e_{K,4},
    /// e_{K,5}, e_{K,6}`, followed by `e_{m,2}, e_{m,3}` when `K = m²`.
    /// Every element eventually appears, but the positive-area members run
    /// ahead of the negative ones.
    TrigUnbalanced,
}

/// Label of a TRIG element: `(k, j)` with `j ∈ 1..=6`, or `(0, d)`.
pub type TrigLabel = (usize, u8);

#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis<T: Real> {
    kind: BasisKind,
    horizon: T,
}

impl<T: Real> OrthonormalBasis<T> {
    pub fn new(kind: BasisKind, horizon: T) -> Result<Self> {
        if !(horizon > T::zero()) {
            return Err(Error::InvalidArgument("horizon must be positive".into()));
        }
        if kind != BasisKind::Tent && (horizon - T::one()).abs() > T::lit(1e-15) {
            return Err(Error::HorizonUnsupported { basis: "TRIG", horizon: horizon.to_f64_lossy() });
        }
        if let BasisKind::TrigSubfamily(js) = &kind {
            if js.is_empty() || js.iter().any(|j| !(1..=6).contains(j)) {
                return Err(Error::InvalidArgument("subfamily members must lie in 1..=6".into()));
            }
        }
        Ok(Self { kind, horizon })
    }

    pub fn tent(horizon: T) -> Self {
        Self { kind: BasisKind::Tent, horizon }
    }

    pub fn trig() -> Self {
        Self { kind: BasisKind::Trig, horizon: T::one() }
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    /// Labels of the first `n` TRIG elements in enumeration order.
    pub fn trig_labels(&self, n: usize) -> Vec<TrigLabel> {
        let mut out = Vec::with_capacity(n);
        match &self.kind {
            BasisKind::Tent => {}
            BasisKind::Trig => {
                for d in 1..=3u8 {
                    out.push((0, d));
                }
                let mut k = 1;
                while out.len() < n {
                    for j in 1..=6u8 {
                        out.push((k, j));
                    }
                    k += 1;
                }
            }
            BasisKind::TrigSubfamily(js) => {
                let mut k = 1;
                while out.len() < n {
                    for &j in js {
                        out.push((k, j));
                    }
                    k += 1;
                }
            }
            BasisKind::TrigUnbalanced => {
                for d in 1..=3u8 {
                    out.push((0, d));
                }
                let mut stage = 1;
                while out.len() < n {
                    out.extend_from_slice(&Self::unbalanced_stage(stage));
                    stage += 1;
                }
            }
        }
        out.truncate(n);
        out
    }

    fn unbalanced_stage(stage: usize) -> Vec<TrigLabel> {
        let mut v = vec![(stage, 1), (stage, 4), (stage, 5), (stage, 6)];
        let m = (stage as f64).sqrt().round() as usize;
        if m * m == stage {
            v.push((m, 2));
            v.push((m, 3));
        }
        v
    }

    /// Number of elements after `stages` blocks (`k` or `K` up to `stages`).
    pub fn len_through_stage(&self, stages: usize) -> usize {
        match &self.kind {
            BasisKind::Tent => 3 * stages,
            BasisKind::Trig => 3 + 6 * stages,
            BasisKind::TrigSubfamily(js) => js.len() * stages,
            BasisKind::TrigUnbalanced => {
                3 + (1..=stages).map(|s| Self::unbalanced_stage(s).len()).sum::<usize>()
            }
        }
    }

    pub fn element(&self, index: usize) -> BasisElement<T> {
        match self.kind {
            BasisKind::Tent => self.tent_element(index),
            _ => {
                let label = self.trig_labels(index + 1)[index];
                trig_element(label)
            }
        }
    }

    pub fn elements(&self, n: usize) -> Vec<BasisElement<T>> {
        match self.kind {
            BasisKind::Tent => (0..n).map(|i| self.tent_element(i)).collect(),
            _ => self.trig_labels(n).into_iter().map(trig_element).collect(),
        }
    }

    fn tent_element(&self, index: usize) -> BasisElement<T> {
        let t = self.horizon;
        let (f, d) = (index / 3, index % 3);
        let mut dir = [T::zero(); 3];
        dir[d] = T::one();
        let profile = if f == 0 {
            ScalarFn::Linear { slope: T::one() / t.sqrt() }
        } else {
            let m = f - 1;
            let level = usize::BITS - 1 - (m + 1).leading_zeros();
            let k = m + 1 - (1usize << level);
            let width = t / T::lit((1u64 << level) as f64);
            let a = width * T::lit(k as f64);
            // Haar height 2^{j/2}/√t over a half-width of t/2^{j+1}
            let peak = t.sqrt() * T::lit(2f64.powf(-(level as f64) / 2.0 - 1.0));
            ScalarFn::Tent { a, b: a + width, peak }
        };
        BasisElement { terms: vec![(profile, dir)], horizon: t }
    }
}

/// The TRIG element with the given label on `[0, 1]`.
pub fn trig_element<T: Real>(label: TrigLabel) -> BasisElement<T> {
    let (k, j) = label;
    let o = T::one();
    let z = T::zero();
    let terms = if k == 0 {
        let mut dir = [z; 3];
        dir[(j - 1) as usize] = o;
        vec![(ScalarFn::Linear { slope: o }, dir)]
    } else {
        let u = ScalarFn::Cos { k };
        let v = ScalarFn::Sin { k };
        let r2 = T::SQRT_2();
        match j {
            1 => vec![(u, [o, z, z]), (v, [z, o, z])],
            2 => vec![(u, [o, z, z]), (v, [z, -o, z])],
            3 => vec![(v, [o, z, z]), (u, [z, o, z])],
            4 => vec![(v, [o, z, z]), (u, [z, -o, z])],
            5 => vec![(u, [z, z, r2])],
            6 => vec![(v, [z, z, r2])],
            _ => panic!("TRIG member index {j} outside 1..=6"),
        }
    };
    BasisElement { terms, horizon: o }
}

/// Closed form of `∫₀ᵗ f(s)·ġ(s) ds` for line and TRIG profiles, `None`
/// otherwise. TRIG profiles only exist for `t = 1`.
pub fn trig_pair_integral<T: Real>(f: &ScalarFn<T>, g: &ScalarFn<T>, horizon: T) -> Option<T> {
    let w = |k: usize| T::lit(2.0 * std::f64::consts::PI * k as f64);
    use ScalarFn::*;
    Some(match (*f, *g) {
        (Linear { slope: a }, Linear { slope: b }) => a * b * horizon * horizon / T::lit(2.0),
        (Linear { slope: a }, Cos { k }) => a / w(k),
        (Linear { .. }, Sin { .. }) => T::zero(),
        (Cos { k }, Linear { slope: b }) => -b / w(k),
        (Sin { .. }, Linear { .. }) => T::zero(),
        (Cos { .. }, Cos { .. }) | (Sin { .. }, Sin { .. }) => T::zero(),
        (Cos { k }, Sin { k: m }) => {
            if k == m {
                T::one() / (T::lit(2.0) * w(k))
            } else {
                T::zero()
            }
        }
        (Sin { k }, Cos { k: m }) => {
            if k == m {
                -T::one() / (T::lit(2.0) * w(k))
            } else {
                T::zero()
            }
        }
        _ => return None,
    })
}
