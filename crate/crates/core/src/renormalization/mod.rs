//! Constant magnetic fields: the operator `G(γ)(s) = ∫₀ˢ a(γ(r)) dr` on the
//! Cameron–Martin space, its matrices over TENT and TRIG bases, the
//! renormalization constant `r_n`, the Stokes split of the line integral and
//! the basis-dependence experiment for `h_n = ∫a(ω_n)·ω̇_n − r_n`.

pub mod experiment;

pub use experiment::{hn_convergence_experiment, CrossRow, GapRow, HnExperiment, HnSettings, RenormReport};

use crate::cameron_martin::{gl_integrate, trig_pair_integral, BasisElement, BasisKind, GridPath, OrthonormalBasis};
use crate::error::{Error, Result};
use crate::fourier_measure::LinearVectorPotential;
use crate::scalar::{cross, dot, Vec3};
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

/// Gauss–Legendre cells used for tent quadrature.
pub const WORKING_CELLS: usize = 1 << 11;

fn apply(alpha: &[[f64; 3]; 3], x: &Vec3<f64>) -> Vec3<f64> {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = alpha[i][0] * x[0] + alpha[i][1] * x[1] + alpha[i][2] * x[2];
    }
    out
}

/// `G(γ)` on the same grid: cumulative trapezoid of `a(γ(·))`.
pub fn g_apply(alpha: &LinearVectorPotential<f64>, gamma: &GridPath<f64>) -> Result<GridPath<f64>> {
    let dt = gamma.dt();
    let vals = gamma.values();
    let mut out = Vec::with_capacity(vals.len());
    let mut acc = [0.0; 3];
    out.push(acc);
    for w in vals.windows(2) {
        let (a, b) = (apply(&alpha.alpha, &w[0]), apply(&alpha.alpha, &w[1]));
        for d in 0..3 {
            acc[d] += 0.5 * dt * (a[d] + b[d]);
        }
        out.push(acc);
    }
    GridPath::new(gamma.horizon(), out)
}

fn cells_for(n: usize) -> usize {
    // tents of level j have kinks on the 2^{j+1} grid
    let finest = (n / 3 + 1).next_power_of_two() * 2;
    WORKING_CELLS.max(finest)
}

/// `∫₀ᵗ ė_i·(α e_j) ds`: closed form for TRIG profiles, Gauss–Legendre
/// otherwise.
pub(crate) fn pairing(alpha: &[[f64; 3]; 3], ei: &BasisElement<f64>, ej: &BasisElement<f64>, cells: usize) -> f64 {
    let mut closed = 0.0;
    let mut all_closed = true;
    'outer: for (fp, dp) in &ei.terms {
        for (fq, dq) in &ej.terms {
            let w = dot(dp, &apply(alpha, dq));
            if w == 0.0 {
                continue;
            }
            match trig_pair_integral(fq, fp, ei.horizon) {
                Some(v) => closed += w * v,
                None => {
                    all_closed = false;
                    break 'outer;
                }
            }
        }
    }
    if all_closed {
        return closed;
    }
    gl_integrate(ei.horizon, cells, |s| dot(&ei.deriv(s), &apply(alpha, &ej.value(s))))
}

/// `n×n` matrix of `⟨e_i, G e_j⟩` over the first `n` basis elements.
pub fn gram_matrix_g(alpha: &LinearVectorPotential<f64>, basis: &OrthonormalBasis<f64>, n: usize) -> DMatrix<f64> {
    let els = basis.elements(n);
    let cells = cells_for(n);
    let entries: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|ij| pairing(&alpha.alpha, &els[ij / n], &els[ij % n], cells))
        .collect();
    DMatrix::from_row_slice(n, n, &entries)
}

/// `Tr(P_n G) = Σ_{i<n} ⟨e_i, G e_i⟩`.
pub fn trace_png(alpha: &LinearVectorPotential<f64>, basis: &OrthonormalBasis<f64>, n: usize) -> f64 {
    let cells = cells_for(n);
    basis.elements(n).iter().map(|e| pairing(&alpha.alpha, e, e, cells)).sum()
}

/// `½∫e∧ė ds`, in closed form when every profile pair has one.
pub fn element_area(e: &BasisElement<f64>) -> Vec3<f64> {
    let mut acc = [0.0; 3];
    for (fp, dp) in &e.terms {
        for (fq, dq) in &e.terms {
            let c = cross(dp, dq);
            if c == [0.0; 3] {
                continue;
            }
            match trig_pair_integral(fp, fq, e.horizon) {
                Some(v) => {
                    for d in 0..3 {
                        acc[d] += 0.5 * c[d] * v;
                    }
                }
                None => return e.area_integral(),
            }
        }
    }
    acc
}

/// `r_n = B·½Σ_{k<n}∫e_k∧ė_k ds`.
pub fn renorm_constant(b_field: &Vec3<f64>, basis: &OrthonormalBasis<f64>, n: usize) -> f64 {
    basis.elements(n).iter().map(|e| dot(b_field, &element_area(e))).sum()
}

/// Eigenvalues (descending) of `⟨Ge_i, Ge_j⟩ = ∫(αe_i)·(αe_j) ds` over the
/// TENT elements spanning polygons with `n_basis` segments per direction.
pub fn gdagg_eigs(alpha: &LinearVectorPotential<f64>, t: f64, n_basis: usize) -> Result<Vec<f64>> {
    if n_basis < 8 {
        return Err(Error::InvalidArgument(format!("n_basis = {n_basis} is below 8")));
    }
    let basis = OrthonormalBasis::new(BasisKind::Tent, t)?;
    let n = 3 * n_basis;
    let els = basis.elements(n);
    let cells = cells_for(n);
    let a = &alpha.alpha;
    let entries: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|ij| {
            let (ei, ej) = (&els[ij / n], &els[ij % n]);
            if ij / n > ij % n {
                return f64::NAN;
            }
            gl_integrate(t, cells, |s| dot(&apply(a, &ei.value(s)), &apply(a, &ej.value(s))))
        })
        .collect();
    let m = DMatrix::from_fn(n, n, |i, j| if i <= j { entries[i * n + j] } else { entries[j * n + i] });
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

/// `λ_{m,j} = 4a_j t²/(π²(1+2m)²)` for the eigenvalues `a_j` of `αᵀα`.
pub fn analytic_eig(a_j: f64, m: usize, t: f64) -> f64 {
    let d = std::f64::consts::PI * (1 + 2 * m) as f64;
    4.0 * a_j * t * t / (d * d)
}

/// Splits the midpoint line integral of a polygon into the flux of the
/// antisymmetric part through the loop closed by the chord back to the
/// origin, and the chord term `∫₀¹a(u·ω(t))du·ω(t) = ½ω(t)ᵀαω(t)`.
///
/// Orientation: `midpoint = surface + line`.
pub fn stokes_decompose(alpha: &LinearVectorPotential<f64>, path: &GridPath<f64>) -> (f64, f64) {
    let surface = dot(&alpha.b_field, &path.area_integral());
    let end = path.end();
    let line = 0.5 * dot(&end, &apply(&alpha.alpha, &end));
    (surface, line)
}
