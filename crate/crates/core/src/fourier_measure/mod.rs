//! Finite point-mass measures on frequency space and the vector potentials
//! they generate, evaluated on `C³` by analytic continuation.

pub mod io;

use crate::error::{Error, Result};
use crate::scalar::{norm, rdot_c, sub, CVec3, Real, Vec3};
use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex;
use std::cmp::Ordering;

/// Frequencies closer than this (per component) are the same atom.
pub const DEDUP_TOL: f64 = 1e-12;

/// Complex measure given as a finite list of weighted frequency points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMassMeasure<T: Real> {
    atoms: Vec<(Vec3<T>, Complex<T>)>,
    support_radius: T,
}

impl<T: Real> Default for PointMassMeasure<T> {
    fn default() -> Self {
        Self::empty()
    }
}

fn lex_cmp<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Ordering {
    for i in 0..3 {
        match a[i].partial_cmp(&b[i]).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Sorts atoms lexicographically, merges frequencies within [`DEDUP_TOL`]
/// and drops atoms whose merged weight is exactly zero.
pub(crate) fn dedup_atoms<T: Real>(mut atoms: Vec<(Vec3<T>, Complex<T>)>) -> Vec<(Vec3<T>, Complex<T>)> {
    if atoms.len() < 2 {
        atoms.retain(|(_, w)| !(w.re == T::zero() && w.im == T::zero()));
        return atoms;
    }
    let tol = T::lit(DEDUP_TOL);
    atoms.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    let mut out: Vec<(Vec3<T>, Complex<T>)> = Vec::with_capacity(atoms.len());
    for (k, w) in atoms {
        // any mergeable atom has first component within tol, and those sit
        // at the tail of `out` because of the sort
        let mut merged = false;
        for prev in out.iter_mut().rev() {
            if k[0] - prev.0[0] > tol {
                break;
            }
            if (k[1] - prev.0[1]).abs() <= tol && (k[2] - prev.0[2]).abs() <= tol {
                prev.1 += w;
                merged = true;
                break;
            }
        }
        if !merged {
            out.push((k, w));
        }
    }
    out.retain(|(_, w)| !(w.re == T::zero() && w.im == T::zero()));
    out
}

impl<T: Real> PointMassMeasure<T> {
    pub fn empty() -> Self {
        Self { atoms: Vec::new(), support_radius: T::zero() }
    }

    /// Builds a measure from raw atoms; the support radius is the largest
    /// atom frequency norm.
    pub fn new(atoms: Vec<(Vec3<T>, Complex<T>)>) -> Self {
        let atoms = dedup_atoms(atoms);
        let r = atoms.iter().map(|(k, _)| norm(k)).fold(T::zero(), T::max);
        Self { atoms, support_radius: r }
    }

    /// Builds a measure with a declared support radius, which must cover
    /// every atom.
    pub fn with_radius(atoms: Vec<(Vec3<T>, Complex<T>)>, radius: T) -> Result<Self> {
        let mut m = Self::new(atoms);
        if radius < m.support_radius - T::lit(DEDUP_TOL) {
            return Err(Error::InvalidArgument(format!(
                "declared support radius {} is smaller than atom norm {}",
                radius, m.support_radius
            )));
        }
        m.support_radius = m.support_radius.max(radius);
        Ok(m)
    }

    pub fn dirac(k: Vec3<T>, w: Complex<T>) -> Self {
        Self::new(vec![(k, w)])
    }

    /// `amp·cos(k·x)`
    pub fn cosine(k: Vec3<T>, amp: T) -> Self {
        let h = Complex::new(amp / T::lit(2.0), T::zero());
        Self::new(vec![(k, h), ([-k[0], -k[1], -k[2]], h)])
    }

    /// `amp·sin(k·x)`
    pub fn sine(k: Vec3<T>, amp: T) -> Self {
        let h = amp / T::lit(2.0);
        Self::new(vec![
            (k, Complex::new(T::zero(), -h)),
            ([-k[0], -k[1], -k[2]], Complex::new(T::zero(), h)),
        ])
    }

    pub fn atoms(&self) -> &[(Vec3<T>, Complex<T>)] {
        &self.atoms
    }

    pub fn support_radius(&self) -> T {
        self.support_radius
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn total_variation(&self) -> T {
        self.atoms.iter().map(|(_, w)| w.norm()).sum()
    }

    /// Fourier transform `Σ w·e^{ik·z}` at a complex point.
    pub fn eval(&self, z: &CVec3<T>) -> Complex<T> {
        let i = Complex::<T>::i();
        self.atoms.iter().map(|(k, w)| *w * (i * rdot_c(k, z)).exp()).sum()
    }

    pub fn eval_real(&self, x: &Vec3<T>) -> Complex<T> {
        let z = [Complex::from(x[0]), Complex::from(x[1]), Complex::from(x[2])];
        self.eval(&z)
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        let atoms = self.atoms.iter().map(|(k, w)| (*k, *w * s)).collect();
        Self { atoms: dedup_atoms(atoms), support_radius: self.support_radius }
    }

    /// Sum of two measures; the support radius is the larger of the two.
    pub fn add(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Self {
            atoms: dedup_atoms(atoms),
            support_radius: self.support_radius.max(other.support_radius),
        }
    }

    /// Convolution: atoms at `k + k'` with weights `w·w'`.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for (k, w) in &self.atoms {
            for (k2, w2) in &other.atoms {
                atoms.push(([k[0] + k2[0], k[1] + k2[1], k[2] + k2[2]], *w * *w2));
            }
        }
        Self {
            atoms: dedup_atoms(atoms),
            support_radius: self.support_radius + other.support_radius,
        }
    }

    /// True when every atom `(k, w)` has a partner `(−k, w̄)`, i.e. the
    /// transform is real on `R³`.
    pub fn is_conjugate_symmetric(&self) -> bool {
        let tol = T::lit(1e-12) * self.total_variation().max(T::one());
        let ktol = T::lit(DEDUP_TOL);
        self.atoms.iter().all(|(k, w)| {
            let neg = [-k[0], -k[1], -k[2]];
            self.atoms.iter().any(|(k2, w2)| {
                (0..3).all(|i| (k2[i] - neg[i]).abs() <= ktol) && (*w2 - w.conj()).norm() <= tol
            })
        })
    }
}

/// Anything that can be evaluated as a vector field on `C³`.
pub trait VectorField<T: Real>: Sync {
    fn eval_c(&self, z: &CVec3<T>) -> CVec3<T>;

    fn divergence_c(&self, z: &CVec3<T>) -> Complex<T>;

    /// Linear fields get an exact midpoint integral downstream.
    fn as_linear(&self) -> Option<&LinearVectorPotential<T>> {
        None
    }
}

/// `a_j(x) = ∫ e^{ik·x} dμ_j(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorPotentialFourier<T: Real> {
    mu: [PointMassMeasure<T>; 3],
    realness: bool,
}

impl<T: Real> VectorPotentialFourier<T> {
    /// A potential that is checked to be real-valued on `R³`.
    pub fn real(mu: [PointMassMeasure<T>; 3]) -> Result<Self> {
        if !mu.iter().all(|m| m.is_conjugate_symmetric()) {
            return Err(Error::NonRealPotential);
        }
        Ok(Self { mu, realness: true })
    }

    /// A potential with no realness claim.
    pub fn complex(mu: [PointMassMeasure<T>; 3]) -> Self {
        Self { mu, realness: false }
    }

    pub fn zero() -> Self {
        Self { mu: Default::default(), realness: true }
    }

    /// `(amp·cos(k·x), 0, 0)` placed in component `j`.
    pub fn cos_field(j: usize, k: Vec3<T>, amp: T) -> Self {
        let mut mu: [PointMassMeasure<T>; 3] = Default::default();
        mu[j] = PointMassMeasure::cosine(k, amp);
        Self { mu, realness: true }
    }

    pub fn mu(&self) -> &[PointMassMeasure<T>; 3] {
        &self.mu
    }

    pub fn is_real(&self) -> bool {
        self.realness
    }

    pub fn support_radius(&self) -> T {
        self.mu.iter().map(|m| m.support_radius()).fold(T::zero(), T::max)
    }

    pub fn total_variations(&self) -> [T; 3] {
        [self.mu[0].total_variation(), self.mu[1].total_variation(), self.mu[2].total_variation()]
    }

    pub fn eval_potential(&self, z: &CVec3<T>) -> CVec3<T> {
        [self.mu[0].eval(z), self.mu[1].eval(z), self.mu[2].eval(z)]
    }

    pub fn eval_real(&self, x: &Vec3<T>) -> CVec3<T> {
        let z = [Complex::from(x[0]), Complex::from(x[1]), Complex::from(x[2])];
        self.eval_potential(&z)
    }

    /// Fourier measure of `div a`, i.e. `Σ_j i·k_j·μ_j` after cancellation.
    pub fn divergence_measure(&self) -> PointMassMeasure<T> {
        let mut atoms = Vec::new();
        for (j, m) in self.mu.iter().enumerate() {
            for (k, w) in m.atoms() {
                atoms.push((*k, *w * Complex::new(T::zero(), k[j])));
            }
        }
        let mut out = PointMassMeasure::new(atoms);
        // snap rounding residue of exact cancellations
        let tv = self.mu.iter().map(|m| m.total_variation() * m.support_radius()).sum::<T>();
        let tol = T::lit(1e-13) * tv.max(T::one());
        out.atoms.retain(|(_, w)| w.norm() > tol);
        out
    }

    pub fn coulomb_gauge_defect(&self) -> T {
        self.divergence_measure().total_variation()
    }

    /// Fourier measure of `|a|²`, namely `Σ_j μ_j ∗ μ_j`.
    pub fn a_squared_measure(&self) -> PointMassMeasure<T> {
        let mut acc = PointMassMeasure::empty();
        for m in &self.mu {
            acc = acc.add(&m.convolve(m));
        }
        acc.support_radius = T::lit(2.0) * self.support_radius();
        acc
    }

    /// Returns `(alpha_bound, alpha_sampled)`.
    ///
    /// The bound is `√Σ_j TV(μ_j)²`. The sample is the max of `|a(x)|` over
    /// the 33³ uniform grid on `[−πs, πs]³` with `s = max(1, 1/κ)`, where
    /// `κ` is the smallest nonzero atom frequency norm.
    pub fn sup_norm_bound(&self) -> Result<(T, T)> {
        if !self.realness {
            return Err(Error::NonRealPotential);
        }
        let tv = self.total_variations();
        let bound = (tv[0] * tv[0] + tv[1] * tv[1] + tv[2] * tv[2]).sqrt();
        let kmin = self
            .mu
            .iter()
            .flat_map(|m| m.atoms().iter().map(|(k, _)| norm(k)))
            .filter(|r| *r > T::zero())
            .fold(T::infinity(), T::min);
        let s = if kmin.is_finite() { T::one().max(T::one() / kmin) } else { T::one() };
        let g = 33usize;
        let mut best = T::zero();
        let pt = |i: usize| T::PI() * s * (T::lit(2.0 * i as f64 / (g - 1) as f64) - T::one());
        for i in 0..g {
            for j in 0..g {
                for l in 0..g {
                    let a = self.eval_real(&[pt(i), pt(j), pt(l)]);
                    let m = (a[0].re * a[0].re + a[1].re * a[1].re + a[2].re * a[2].re).sqrt();
                    best = best.max(m);
                }
            }
        }
        Ok((bound, best.min(bound)))
    }
}

impl<T: Real> VectorField<T> for VectorPotentialFourier<T> {
    fn eval_c(&self, z: &CVec3<T>) -> CVec3<T> {
        self.eval_potential(z)
    }

    fn divergence_c(&self, z: &CVec3<T>) -> Complex<T> {
        let i = Complex::i();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (j, m) in self.mu.iter().enumerate() {
            for (k, w) in m.atoms() {
                acc += *w * i * k[j] * (i * rdot_c(k, z)).exp();
            }
        }
        acc
    }
}

/// `a(x) = α·x` with `a_i = Σ_j α_ij x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearVectorPotential<T: Real> {
    pub alpha: [[T; 3]; 3],
    pub b_field: Vec3<T>,
    pub a_matrix: [[T; 3]; 3],
    pub eigs_a: [T; 3],
    pub a_bar: T,
    pub t_star: T,
}

impl<T: Real> LinearVectorPotential<T> {
    pub fn derive(alpha: [[T; 3]; 3]) -> Self {
        let al = |i: usize, j: usize| alpha[i][j];
        let b_field = [al(2, 1) - al(1, 2), al(0, 2) - al(2, 0), al(1, 0) - al(0, 1)];
        let mut a_matrix = [[T::zero(); 3]; 3];
        for (i, row) in a_matrix.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..3).map(|l| alpha[l][i] * alpha[l][j]).sum();
            }
        }
        let m = Matrix3::from_fn(|i, j| a_matrix[i][j].to_f64_lossy());
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        let eigs_a = [T::lit(ev[0].max(0.0)), T::lit(ev[1].max(0.0)), T::lit(ev[2].max(0.0))];
        let a_bar = eigs_a[0];
        let t_star = if a_bar > T::zero() {
            T::PI() / (T::lit(4.0) * a_bar.sqrt())
        } else {
            T::infinity()
        };
        Self { alpha, b_field, a_matrix, eigs_a, a_bar, t_star }
    }

    /// `α = [[0,−B/2,0],[B/2,0,0],[0,0,0]]`, field `(0,0,B)`.
    pub fn symmetric_gauge(b: T) -> Self {
        let h = b / T::lit(2.0);
        let z = T::zero();
        Self::derive([[z, -h, z], [h, z, z], [z, z, z]])
    }

    pub fn apply(&self, x: &Vec3<T>) -> Vec3<T> {
        let mut out = [T::zero(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.alpha[i][j] * x[j]).sum();
        }
        out
    }

    pub fn trace(&self) -> T {
        self.alpha[0][0] + self.alpha[1][1] + self.alpha[2][2]
    }

    /// Symmetric part `(α + αᵀ)/2`.
    pub fn symmetric_part(&self) -> [[T; 3]; 3] {
        let mut s = [[T::zero(); 3]; 3];
        for (i, row) in s.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (self.alpha[i][j] + self.alpha[j][i]) / T::lit(2.0);
            }
        }
        s
    }
}

impl<T: Real> VectorField<T> for LinearVectorPotential<T> {
    fn eval_c(&self, z: &CVec3<T>) -> CVec3<T> {
        let mut out = [Complex::new(T::zero(), T::zero()); 3];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, zj) in z.iter().enumerate() {
                *o += *zj * self.alpha[i][j];
            }
        }
        out
    }

    fn divergence_c(&self, _z: &CVec3<T>) -> Complex<T> {
        Complex::from(self.trace())
    }

    fn as_linear(&self) -> Option<&LinearVectorPotential<T>> {
        Some(self)
    }
}

/// Physical constants of one evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams<T: Real> {
    pub hbar: T,
    pub t: T,
    pub lambda: T,
    pub x: Vec3<T>,
}

impl<T: Real> PhysicalParams<T> {
    pub fn new(hbar: T, t: T, lambda: T, x: Vec3<T>) -> Result<Self> {
        if !(hbar > T::zero()) || !(t > T::zero()) {
            return Err(Error::InvalidArgument("hbar and t must be positive".into()));
        }
        Ok(Self { hbar, t, lambda, x })
    }

    /// `√(iħ) = √ħ·e^{iπ/4}`.
    pub fn c_scale(&self) -> Complex<T> {
        crate::scalar::sqrt_i_hbar(self.hbar)
    }
}

fn check_pos<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

/// `λ* = (2α²t/ħ·(2r²tħ + 1))^{−1/2}`.
pub fn lambda_star<T: Real>(alpha: T, r: T, t: T, hbar: T) -> Result<T> {
    check_pos("alpha", alpha)?;
    check_pos("r", r)?;
    check_pos("t", t)?;
    check_pos("hbar", hbar)?;
    let two = T::lit(2.0);
    Ok((two * alpha * alpha * t / hbar * (two * r * r * t * hbar + T::one())).sqrt().recip())
}

/// `λ*(z) = (2α²|z|(2r²ħ²|z| + 1))^{−1/2}`.
pub fn lambda_star_z<T: Real>(alpha: T, r: T, hbar: T, z: Complex<T>) -> Result<T> {
    check_pos("alpha", alpha)?;
    check_pos("r", r)?;
    check_pos("hbar", hbar)?;
    let az = z.norm();
    check_pos("|z|", az)?;
    let two = T::lit(2.0);
    Ok((two * alpha * alpha * az * (two * r * r * hbar * hbar * az + T::one())).sqrt().recip())
}

/// Radius with a scalar potential: `(2α̃²t/ħ·(2r²t/ħ + 1))^{−1/2}`.
pub fn lambda_tilde<T: Real>(alpha_tilde: T, alpha: T, r: T, t: T, hbar: T) -> Result<T> {
    check_pos("alpha_tilde", alpha_tilde)?;
    check_pos("alpha", alpha)?;
    check_pos("r", r)?;
    check_pos("t", t)?;
    check_pos("hbar", hbar)?;
    let two = T::lit(2.0);
    Ok((two * alpha_tilde * alpha_tilde * t / hbar * (two * r * r * t / hbar + T::one()))
        .sqrt()
        .recip())
}

/// Distance between two frequency vectors.
pub fn freq_dist<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    norm(&sub(a, b))
}
