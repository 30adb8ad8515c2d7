//! Monte Carlo study of `h_n` over several bases from common Brownian paths.
//!
//! Each sample draws a fine Brownian polygon with `fine_steps` segments on
//! `[0, t]`. The reference `h_ref` is its midpoint line integral. TENT
//! truncations with `n = 3·2^J` elements are the polygons through the knots
//! at multiples of `t/2^J`, so `∫a(ω_n)·ω̇_n` is the midpoint sum on that
//! coarse polygon. TRIG coefficients `⟨e_k, ω⟩` are Cameron–Martin inner
//! products with the fine polygon, read off one FFT per direction, and
//! `∫a(ω_n)·ω̇_n = cᵀMc` with `M_ij = ⟨e_i, Ge_j⟩` in closed form.

use super::{analytic_eig, gdagg_eigs, pairing, renorm_constant, trace_png};
use crate::cameron_martin::{normal_increments, BasisKind, OrthonormalBasis, ScalarFn};
use crate::error::{Error, Result};
use crate::feynman_mc::{reduce_samples, Moments};
use crate::fourier_measure::LinearVectorPotential;
use num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct HnSettings {
    pub n_samples: u64,
    pub seed: u64,
    pub fine_steps: usize,
    pub threads: Option<usize>,
    /// `n_basis` of the attached eigenvalue table; `None` skips it.
    pub eig_n_basis: Option<usize>,
}

impl Default for HnSettings {
    fn default() -> Self {
        Self { n_samples: 20_000, seed: 0, fine_steps: 1 << 14, threads: None, eig_n_basis: Some(64) }
    }
}

/// Statistics of `h_n − h_ref` (renormalized) and `g_n − h_ref` (raw,
/// `g_n = ∫a(ω_n)·ω̇_n`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapRow {
    pub n: usize,
    pub r_n: f64,
    pub mean: f64,
    pub mean_se: f64,
    pub gap: f64,
    pub gap_se: f64,
    pub raw_mean: f64,
    pub raw_mean_se: f64,
    pub raw_gap: f64,
    pub raw_gap_se: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigRow {
    pub m: usize,
    pub j: usize,
    pub numeric: f64,
    pub analytic: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenormReport {
    pub basis: BasisKind,
    /// Largest truncation in `l2_gaps`.
    pub n: usize,
    pub r_n: f64,
    pub trace_png: f64,
    pub l2_gaps: Vec<GapRow>,
    pub eigencheck: Vec<EigRow>,
}

/// `h_n^b − h_n^0` for basis `b` against the first basis, at the same
/// position in the two truncation lists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossRow {
    pub basis: usize,
    pub n_first: usize,
    pub n_other: usize,
    pub mean_diff: f64,
    pub mean_diff_se: f64,
    pub msq_diff: f64,
    pub msq_diff_se: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HnExperiment {
    pub reports: Vec<RenormReport>,
    pub cross: Vec<CrossRow>,
}

impl RenormReport {
    pub fn gaps_csv(&self) -> String {
        let mut s = String::from("n,r_n,mean,mean_se,gap,gap_se,raw_mean,raw_mean_se,raw_gap,raw_gap_se\n");
        for g in &self.l2_gaps {
            s.push_str(&format!(
                "{},{:.12e},{:.8e},{:.3e},{:.8e},{:.3e},{:.8e},{:.3e},{:.8e},{:.3e}\n",
                g.n, g.r_n, g.mean, g.mean_se, g.gap, g.gap_se, g.raw_mean, g.raw_mean_se, g.raw_gap, g.raw_gap_se
            ));
        }
        s
    }

    pub fn eig_csv(&self) -> String {
        let mut s = String::from("m,j,numeric,analytic,rel_err\n");
        for e in &self.eigencheck {
            s.push_str(&format!("{},{},{:.12e},{:.12e},{:.4e}\n", e.m, e.j, e.numeric, e.analytic, e.rel_err));
        }
        s
    }
}

/// Top `3·m_max` numeric eigenvalues of `G†G` against `λ_{m,j}`.
pub fn eigencheck_table(alpha: &LinearVectorPotential<f64>, t: f64, n_basis: usize, m_max: usize) -> Result<Vec<EigRow>> {
    let numeric = gdagg_eigs(alpha, t, n_basis)?;
    // the top 3·m_max values can reach past mode m_max when the a_j differ
    let mut analytic = Vec::new();
    for m in 0..n_basis {
        for (j, a) in alpha.eigs_a.iter().enumerate() {
            analytic.push((m, j, analytic_eig(*a, m, t)));
        }
    }
    analytic.sort_by(|x, y| y.2.total_cmp(&x.2));
    analytic.truncate(3 * m_max);
    Ok(analytic
        .into_iter()
        .zip(numeric)
        .map(|((m, j, a), v)| EigRow { m, j, numeric: v, analytic: a, rel_err: if a > 0.0 { (v - a).abs() / a } else { v.abs() } })
        .collect())
}

/// Per-basis evaluation plan.
enum Plan {
    /// Coarse knot strides in the fine grid, one per truncation.
    Tent { strides: Vec<usize> },
    Trig {
        /// `(profile, direction)` terms of each element.
        terms: Vec<Vec<(ScalarFn<f64>, [f64; 3])>>,
        /// For element `i`: `(j, M_ij + M_ji)` with `j < i`, and `M_ii`.
        couplings: Vec<(Vec<(usize, f64)>, f64)>,
    },
}

fn plan_for(alpha: &LinearVectorPotential<f64>, basis: &OrthonormalBasis<f64>, ns: &[usize], fine: usize) -> Result<Plan> {
    if *basis.kind() == BasisKind::Tent {
        let mut strides = Vec::with_capacity(ns.len());
        for &n in ns {
            let segs = n / 3;
            if n % 3 != 0 || !segs.is_power_of_two() || fine % segs != 0 {
                return Err(Error::InvalidArgument(format!(
                    "TENT truncation {n} is not 3·2^J with 2^J dividing {fine}"
                )));
            }
            strides.push(fine / segs);
        }
        return Ok(Plan::Tent { strides });
    }
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let els = basis.elements(n_max);
    for e in &els {
        for (f, _) in &e.terms {
            if let ScalarFn::Cos { k } | ScalarFn::Sin { k } = f {
                if 2 * k >= fine {
                    return Err(Error::NyquistExceeded { support: *k as f64, nyquist: fine as f64 / 2.0 });
                }
            }
        }
    }
    let mut couplings = Vec::with_capacity(n_max);
    for i in 0..n_max {
        let mut row = Vec::new();
        for j in 0..i {
            let v = pairing(&alpha.alpha, &els[i], &els[j], 0) + pairing(&alpha.alpha, &els[j], &els[i], 0);
            if v != 0.0 {
                row.push((j, v));
            }
        }
        couplings.push((row, pairing(&alpha.alpha, &els[i], &els[i], 0)));
    }
    Ok(Plan::Trig { terms: els.into_iter().map(|e| e.terms).collect(), couplings })
}

fn midpoint_sum(alpha: &[[f64; 3]; 3], knots: &[[f64; 3]], stride: usize) -> f64 {
    let mut acc = 0.0;
    let mut j = 0;
    while j + stride < knots.len() {
        let (p, q) = (&knots[j], &knots[j + stride]);
        for i in 0..3 {
            let mid: f64 = (0..3).map(|l| alpha[i][l] * 0.5 * (p[l] + q[l])).sum();
            acc += mid * (q[i] - p[i]);
        }
        j += stride;
    }
    acc
}

fn se_of(m: &Moments) -> (f64, f64, f64, f64) {
    let mean = m.mean();
    let (a, b) = m.stderr();
    (mean.re, a, mean.im, b)
}

/// Runs the `h_n` study for `bases[b]` truncated at `n_lists[b]`.
///
/// All bases see the same Brownian paths, so differences between them are
/// paired. TRIG bases require `t = 1`.
pub fn hn_convergence_experiment(
    alpha: &LinearVectorPotential<f64>,
    t: f64,
    bases: &[OrthonormalBasis<f64>],
    n_lists: &[Vec<usize>],
    settings: &HnSettings,
) -> Result<HnExperiment> {
    if bases.is_empty() || bases.len() != n_lists.len() || n_lists.iter().any(|l| l.is_empty()) {
        return Err(Error::InvalidArgument("one non-empty truncation list per basis is required".into()));
    }
    for b in bases {
        if (b.horizon() - t).abs() > 1e-15 {
            return Err(Error::HorizonUnsupported { basis: "basis horizon", horizon: t });
        }
    }
    let fine = settings.fine_steps;
    let plans: Vec<Plan> =
        bases.iter().zip(n_lists).map(|(b, ns)| plan_for(alpha, b, ns, fine)).collect::<Result<_>>()?;
    let r: Vec<Vec<f64>> = bases
        .iter()
        .zip(n_lists)
        .map(|(b, ns)| ns.iter().map(|&n| renorm_constant(&alpha.b_field, b, n)).collect())
        .collect();
    let k_max = plans
        .iter()
        .filter_map(|p| match p {
            Plan::Trig { terms, .. } => terms
                .iter()
                .flatten()
                .filter_map(|(f, _)| match f {
                    ScalarFn::Cos { k } | ScalarFn::Sin { k } => Some(*k),
                    _ => None,
                })
                .max(),
            Plan::Tent { .. } => None,
        })
        .max()
        .unwrap_or(0);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(fine);
    let n_cross = n_lists.iter().skip(1).map(|l| l.len().min(n_lists[0].len())).sum::<usize>();
    let n_gap: usize = n_lists.iter().map(|l| 2 * l.len()).sum();
    let sd = (t / fine as f64).sqrt();
    let a = alpha.alpha;

    let moments = reduce_samples(settings.n_samples, n_gap + n_cross, settings.threads, |idx, out| {
        let incs = normal_increments(fine, settings.seed, idx);
        let mut knots = Vec::with_capacity(fine + 1);
        let mut cur = [0.0; 3];
        knots.push(cur);
        for xi in &incs {
            for d in 0..3 {
                cur[d] += sd * xi[d];
            }
            knots.push(cur);
        }
        let h_ref = midpoint_sum(&a, &knots, 1);

        // (Re, Im) of Σ_j Δω_j e^{2πikj/N}·(e^{2πik/N} − 1), per direction
        let mut spec: Vec<[Complex<f64>; 3]> = Vec::new();
        if k_max > 0 {
            spec = vec![[Complex::new(0.0, 0.0); 3]; k_max + 1];
            let mut buf = vec![Complex::new(0.0, 0.0); fine];
            for d in 0..3 {
                for (b, xi) in buf.iter_mut().zip(&incs) {
                    *b = Complex::new(sd * xi[d], 0.0);
                }
                fft.process(&mut buf);
                for (k, s) in spec.iter_mut().enumerate().skip(1) {
                    let th = 2.0 * PI * k as f64 / fine as f64;
                    s[d] = buf[k].conj() * (Complex::new(th.cos(), th.sin()) - 1.0);
                }
            }
        }
        let coef = |f: &ScalarFn<f64>, d: usize| -> f64 {
            match *f {
                ScalarFn::Linear { slope } => slope * knots[fine][d],
                ScalarFn::Cos { k } => fine as f64 / (2.0 * PI * k as f64) * spec[k][d].re,
                ScalarFn::Sin { k } => fine as f64 / (2.0 * PI * k as f64) * spec[k][d].im,
                ScalarFn::Tent { .. } => unreachable!("tents use the polygon route"),
            }
        };

        let mut slot = 0;
        let mut h_first: Vec<f64> = Vec::new();
        let mut cross_slot = n_gap;
        for (b, plan) in plans.iter().enumerate() {
            let ns = &n_lists[b];
            let g: Vec<f64> = match plan {
                Plan::Tent { strides } => strides.iter().map(|&s| midpoint_sum(&a, &knots, s)).collect(),
                Plan::Trig { terms, couplings } => {
                    let n_max = terms.len();
                    let c: Vec<f64> = terms
                        .iter()
                        .map(|ts| ts.iter().map(|(f, dir)| (0..3).map(|d| dir[d] * coef(f, d)).sum::<f64>()).sum())
                        .collect();
                    let mut prefix = vec![0.0; n_max + 1];
                    for i in 0..n_max {
                        let (row, diag) = &couplings[i];
                        let off: f64 = row.iter().map(|(j, v)| v * c[*j]).sum();
                        prefix[i + 1] = prefix[i] + c[i] * (off + diag * c[i]);
                    }
                    ns.iter().map(|&n| prefix[n]).collect()
                }
            };
            let h: Vec<f64> = g.iter().zip(&r[b]).map(|(g, r)| g - r).collect();
            for (hn, gn) in h.iter().zip(&g) {
                let d = hn - h_ref;
                let e = gn - h_ref;
                out[slot] = Complex::new(d, d * d);
                out[slot + 1] = Complex::new(e, e * e);
                slot += 2;
            }
            if b == 0 {
                h_first = h;
            } else {
                for (x, y) in h.iter().zip(&h_first) {
                    let d = x - y;
                    out[cross_slot] = Complex::new(d, d * d);
                    cross_slot += 1;
                }
            }
        }
    });

    let eigencheck = match settings.eig_n_basis {
        Some(nb) => eigencheck_table(alpha, t, nb, 3)?,
        None => Vec::new(),
    };
    let mut reports = Vec::with_capacity(bases.len());
    let mut slot = 0;
    for (b, basis) in bases.iter().enumerate() {
        let mut rows = Vec::new();
        for (i, &n) in n_lists[b].iter().enumerate() {
            let (mean, mean_se, gap, gap_se) = se_of(&moments[slot]);
            let (raw_mean, raw_mean_se, raw_gap, raw_gap_se) = se_of(&moments[slot + 1]);
            rows.push(GapRow { n, r_n: r[b][i], mean, mean_se, gap, gap_se, raw_mean, raw_mean_se, raw_gap, raw_gap_se });
            slot += 2;
        }
        let n = *n_lists[b].iter().max().expect("non-empty");
        reports.push(RenormReport {
            basis: basis.kind().clone(),
            n,
            r_n: renorm_constant(&alpha.b_field, basis, n),
            trace_png: trace_png(alpha, basis, n),
            l2_gaps: rows,
            eigencheck: eigencheck.clone(),
        });
    }
    let mut cross = Vec::new();
    for b in 1..bases.len() {
        for i in 0..n_lists[b].len().min(n_lists[0].len()) {
            let (mean_diff, mean_diff_se, msq_diff, msq_diff_se) = se_of(&moments[slot]);
            cross.push(CrossRow {
                basis: b,
                n_first: n_lists[0][i],
                n_other: n_lists[b][i],
                mean_diff,
                mean_diff_se,
                msq_diff,
                msq_diff_se,
            });
            slot += 1;
        }
    }
    Ok(HnExperiment { reports, cross })
}
