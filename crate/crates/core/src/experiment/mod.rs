//! Config-driven experiment runs. Every output row carries the config hash
//! and seed; nothing time-dependent is written, so a rerun with the same
//! config reproduces the files byte for byte.

mod config;
mod table;

pub use config::{
    basis_label, parse_basis, BudgetCfg, ExperimentConfig, InitialCfg, ParamsCfg, PotentialCfg, RenormCfg,
    ResolvedPotential, EXPERIMENTS,
};
pub use table::{Cell, Table};

use crate::cameron_martin::{BasisKind, OrthonormalBasis};
use crate::dyson::{DysonEngine, TailBound};
use crate::error::{Error, Result};
use crate::feynman_mc::engine::reduce_samples;
use crate::feynman_mc::{
    brownian_knots, heat_fki_mc, heat_moments_mc, psi_exp_mc, psi_moments_mc, psi_series_mc, McConfig, McRule,
};
use crate::fourier_measure::lambda_star;
use crate::reference_solver::{evolve, EvolveParams, GridState, SolverPotential};
use crate::renormalization::experiment::{hn_convergence_experiment, HnSettings};
use crate::stoch_integrals::{
    cylinder_fresnel_left, cylinder_fresnel_right, limit_right, riemann_sum_values, stratonovich_values,
    CorrectionScale, QuadratureRule,
};
use num_complex::Complex;
use std::path::Path;

type C64 = Complex<f64>;

/// Process exit code for an error: 2 for configuration problems, 3 for
/// numeric preconditions.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::Io(_) | Error::InvalidArgument(_) => 2,
        _ => 3,
    }
}

/// Runs the configured experiment and returns its tables.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    cfg.validate()?;
    match cfg.experiment.as_str() {
        "ito-vs-strat" => ito_vs_strat(cfg),
        "dyson-converge" => dyson_converge(cfg),
        "feynman-map" => feynman_map(cfg),
        "renorm-basis" => renorm_basis(cfg),
        "solver-compare" => solver_compare(cfg),
        "heat-analytic" => heat_analytic(cfg),
        other => Err(Error::Config(format!("unknown experiment {other:?}"))),
    }
}

/// Runs and writes `<out>/<experiment>/<table>.{csv,dat}` plus the
/// canonical config. Returns the output directory.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<std::path::PathBuf> {
    let tables = run(cfg)?;
    let dir = Path::new(&cfg.out).join(&cfg.experiment);
    let hash = cfg.hash();
    for t in &tables {
        t.write(&dir, &hash, cfg.seed)?;
    }
    std::fs::write(dir.join("config.toml"), cfg.canonical_text())?;
    Ok(dir)
}

fn mc_config(cfg: &ExperimentConfig) -> Result<McConfig> {
    let mut mc = McConfig::new(cfg.budget.n_steps, cfg.budget.n_samples, cfg.seed)?;
    mc.threads = cfg.budget.threads;
    Ok(mc)
}

fn c(z: C64) -> [Cell; 2] {
    [Cell::F(z.re), Cell::F(z.im)]
}

fn tail_cells(t: &TailBound<f64>) -> [Cell; 2] {
    match t {
        TailBound::Converges(v) => [Cell::I(1), Cell::F(*v)],
        TailBound::Divergent => [Cell::I(0), Cell::F(f64::INFINITY)],
    }
}

fn ito_vs_strat(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let pot = cfg.fourier_potential()?;
    let (t, hbar) = (cfg.params.t, cfg.params.hbar);
    let limit = limit_right(&pot, t, hbar);
    let mut cyl = Table::new("cylinder", &["n", "left_re", "left_im", "right_re", "right_im", "gap", "gap_ratio"]);
    let mut prev: Option<f64> = None;
    for p in 3..=12 {
        let n = 1usize << p;
        let r = cylinder_fresnel_right(&pot, n, t, hbar);
        let gap = (r - limit).norm();
        let ratio = prev.map_or(f64::NAN, |g| gap / g);
        prev = Some(gap);
        let mut row = vec![Cell::from(n)];
        row.extend(c(cylinder_fresnel_left(&pot, n, t, hbar)));
        row.extend(c(r));
        row.extend([gap.into(), ratio.into()]);
        cyl.push(row);
    }
    let mut lim = Table::new("limit", &["t", "hbar", "right_limit_re", "right_limit_im"]);
    let mut row = vec![Cell::F(t), Cell::F(hbar)];
    row.extend(c(limit));
    lim.push(row);

    // E[c∫a(cω + x)·dω] under each rule, common paths.
    let mc = mc_config(cfg)?;
    let rules: [(&str, Option<QuadratureRule>, CorrectionScale); 5] = [
        ("left", Some(QuadratureRule::Left), CorrectionScale::WithC),
        ("right", Some(QuadratureRule::Right), CorrectionScale::WithC),
        ("midpoint", Some(QuadratureRule::Midpoint), CorrectionScale::WithC),
        ("corrected", None, CorrectionScale::WithC),
        ("corrected-bare", None, CorrectionScale::Bare),
    ];
    let mut mct = Table::new("rules", &["x1", "x2", "x3", "rule", "mean_re", "mean_im", "se_re", "se_im"]);
    let dt = t / mc.n_steps as f64;
    for x in &cfg.params.probes {
        let params = cfg.params_at(*x)?;
        let cs = params.c_scale();
        let m = reduce_samples(mc.n_samples, rules.len(), mc.threads, |i, out| {
            let knots = brownian_knots(mc.n_steps, t, mc.seed, i);
            for (o, (_, rule, scale)) in out.iter_mut().zip(&rules) {
                *o = cs * match rule {
                    Some(r) => riemann_sum_values(&pot, &knots, *r, cs, x),
                    None => stratonovich_values(&pot, &knots, dt, cs, x, *scale),
                };
            }
        });
        for ((name, _, _), mo) in rules.iter().zip(&m) {
            let (se_re, se_im) = mo.stderr();
            let mut row = vec![Cell::F(x[0]), Cell::F(x[1]), Cell::F(x[2]), Cell::from(*name)];
            row.extend(c(mo.mean()));
            row.extend([se_re.into(), se_im.into()]);
            mct.push(row);
        }
    }
    Ok(vec![cyl, lim, mct])
}

fn engine(cfg: &ExperimentConfig) -> Result<DysonEngine<f64>> {
    Ok(DysonEngine::new(cfg.fourier_potential()?, cfg.params.hbar)?.with_order_cap(cfg.budget.order.max(4)))
}

fn dyson_converge(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let eng = engine(cfg)?;
    let psi0 = cfg.packet()?;
    let (t, hbar) = (cfg.params.t, cfg.params.hbar);
    let alpha = eng.alpha();
    let r = eng.potential().support_radius().max(psi0.support_radius());
    let ls = lambda_star(alpha, r, t, hbar)?;
    let mut summary = Table::new("summary", &["alpha", "r", "t", "hbar", "lambda_star"]);
    summary.push(vec![alpha.into(), r.into(), t.into(), hbar.into(), ls.into()]);

    let big_m = cfg.budget.order;
    let mut terms = Table::new("terms", &["lambda_over_star", "lambda", "m", "norm", "bound", "ratio"]);
    let mut tails = Table::new("tail", &["lambda_over_star", "lambda", "M", "convergent", "tail", "outside_radius"]);
    let mut lams = vec![0.25, 0.5, 1.0, 2.0];
    lams.push(cfg.params.lambda / ls);
    for f in lams {
        let lam = f * ls;
        let ps = eng.dyson_partial_sum(lam, big_m, &psi0, t)?;
        let mut prev: Option<f64> = None;
        for (m, term) in ps.terms.iter().enumerate() {
            let scale = lam.abs().powi(m as i32);
            let norm = scale * term.state.norm_surrogate();
            let ratio = prev.map_or(f64::NAN, |p| if p > 0.0 { norm / p } else { f64::NAN });
            prev = Some(norm);
            terms.push(vec![f.into(), lam.into(), m.into(), norm.into(), (scale * term.bound).into(), ratio.into()]);
        }
        let mut row = vec![Cell::F(f), Cell::F(lam), Cell::from(big_m)];
        row.extend(tail_cells(&ps.tail));
        row.push(ps.outside_radius.into());
        tails.push(row);
    }
    Ok(vec![summary, terms, tails])
}

fn feynman_map(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let eng = engine(cfg)?;
    let pot = eng.potential().clone();
    let psi0 = cfg.packet()?;
    let mc = mc_config(cfg)?;
    let (t, lam, big_m) = (cfg.params.t, cfg.params.lambda, cfg.budget.order);
    let phis: Vec<_> = (0..=big_m).map(|m| eng.phi_m(m, &psi0, t)).collect::<Result<_>>()?;
    let exact = eng.dyson_partial_sum(lam, big_m, &psi0, t)?;
    let mut mom = Table::new(
        "moments",
        &["x1", "x2", "x3", "m", "mc_re", "mc_im", "se_re", "se_im", "dyson_re", "dyson_im", "deviation"],
    );
    let mut ser = Table::new(
        "series",
        &["x1", "x2", "x3", "lambda", "M", "mc_re", "mc_im", "se", "dyson_re", "dyson_im", "convergent", "tail"],
    );
    for x in &cfg.params.probes {
        let params = cfg.params_at(*x)?;
        let est = psi_moments_mc(big_m, &pot, None, &psi0, &params, &mc, McRule::Corrected);
        for (m, (e, phi)) in est.iter().zip(&phis).enumerate() {
            let d = phi.state.eval_real(x);
            let mut row = vec![Cell::F(x[0]), Cell::F(x[1]), Cell::F(x[2]), Cell::from(m)];
            row.extend(c(e.mean));
            row.extend([e.stderr_re.into(), e.stderr_im.into()]);
            row.extend(c(d));
            row.push(e.deviation(d).into());
            mom.push(row);
        }
        let s = psi_series_mc(lam, big_m, &pot, &psi0, &params, &mc)?;
        let mut row = vec![Cell::F(x[0]), Cell::F(x[1]), Cell::F(x[2]), Cell::F(lam), Cell::from(big_m)];
        row.extend(c(s.estimate.mean));
        row.push(s.estimate.stderr().into());
        row.extend(c(exact.state.eval_real(x)));
        row.extend(tail_cells(&s.tail));
        ser.push(row);
    }
    Ok(vec![mom, ser])
}

fn renorm_basis(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let lin = cfg.linear_potential()?;
    let t = cfg.params.t;
    let kinds: Vec<BasisKind> = cfg.renorm.bases.iter().map(|b| parse_basis(b)).collect::<Result<_>>()?;
    if kinds.is_empty() || cfg.renorm.stages.is_empty() {
        return Err(Error::Config("renorm.bases and renorm.stages must be non-empty".into()));
    }
    let bases: Vec<OrthonormalBasis<f64>> =
        kinds.iter().map(|k| OrthonormalBasis::new(k.clone(), t)).collect::<Result<_>>()?;
    let mut n_lists = Vec::new();
    for b in &bases {
        let ns = cfg
            .renorm
            .stages
            .iter()
            .map(|&s| match b.kind() {
                BasisKind::Tent if s.is_power_of_two() => Ok(3 * s),
                BasisKind::Tent => Err(Error::Config(format!("TENT stage {s} is not a power of two"))),
                _ => Ok(b.len_through_stage(s)),
            })
            .collect::<Result<Vec<_>>>()?;
        n_lists.push(ns);
    }
    let settings = HnSettings {
        n_samples: cfg.budget.n_samples,
        seed: cfg.seed,
        fine_steps: cfg.budget.fine_steps,
        threads: cfg.budget.threads,
        eig_n_basis: Some(cfg.renorm.eig_n_basis),
    };
    let exp = hn_convergence_experiment(&lin, t, &bases, &n_lists, &settings)?;

    let mut summary = Table::new("summary", &["basis", "n", "r_n", "trace_png"]);
    let mut gaps = Table::new(
        "gaps",
        &[
            "basis", "basis_index", "n", "r_n", "mean", "mean_se", "gap", "gap_se", "raw_mean", "raw_mean_se", "raw_gap",
            "raw_gap_se",
        ],
    );
    let mut tables = Vec::new();
    for (bi, rep) in exp.reports.iter().enumerate() {
        let label = basis_label(&rep.basis);
        summary.push(vec![label.clone().into(), rep.n.into(), rep.r_n.into(), rep.trace_png.into()]);
        for g in &rep.l2_gaps {
            gaps.push(vec![
                label.clone().into(),
                bi.into(),
                g.n.into(),
                g.r_n.into(),
                g.mean.into(),
                g.mean_se.into(),
                g.gap.into(),
                g.gap_se.into(),
                g.raw_mean.into(),
                g.raw_mean_se.into(),
                g.raw_gap.into(),
                g.raw_gap_se.into(),
            ]);
        }
        if bi == 0 && !rep.eigencheck.is_empty() {
            let mut eig = Table::new("eigenvalues", &["m", "j", "numeric", "analytic", "rel_err"]);
            for e in &rep.eigencheck {
                eig.push(vec![e.m.into(), e.j.into(), e.numeric.into(), e.analytic.into(), e.rel_err.into()]);
            }
            tables.push(eig);
        }
    }
    let mut cross = Table::new(
        "cross",
        &["basis", "basis_index", "n_first", "n_other", "mean_diff", "mean_diff_se", "msq_diff", "msq_diff_se"],
    );
    for r in &exp.cross {
        cross.push(vec![
            basis_label(&exp.reports[r.basis].basis).into(),
            r.basis.into(),
            r.n_first.into(),
            r.n_other.into(),
            r.mean_diff.into(),
            r.mean_diff_se.into(),
            r.msq_diff.into(),
            r.msq_diff_se.into(),
        ]);
    }
    tables.splice(0..0, [summary, gaps, cross]);
    Ok(tables)
}

fn solver_compare(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let lin = cfg.linear_potential()?;
    let gp = cfg.gaussian()?;
    let mc = mc_config(cfg)?;
    let b = &cfg.budget;
    let (t, hbar, lam) = (cfg.params.t, cfg.params.hbar, cfg.params.lambda);
    if t >= lin.t_star {
        return Err(Error::BeyondThreshold { t, t_star: lin.t_star });
    }
    let init = GridState::from_fn(2, b.grid_n, b.half_width, |x| gp.eval_real(x))?;
    let pot = SolverPotential::linear(lin.alpha);
    let run = |steps| evolve(&init, &pot, &EvolveParams { lambda: lam, t, steps, hbar, imaginary_time: false });
    let fine = run(b.solver_steps)?;
    let coarse = run(b.solver_steps.div_ceil(2))?;
    let mut summary = Table::new("solver", &["grid_n", "half_width", "steps", "step_halving_diff", "boundary_mass"]);
    summary.push(vec![
        b.grid_n.into(),
        b.half_width.into(),
        b.solver_steps.into(),
        fine.max_abs_diff(&coarse)?.into(),
        fine.boundary_mass(1.0).into(),
    ]);
    let mut cmp = Table::new(
        "compare",
        &[
            "x1", "x2", "x3", "solver_re", "solver_im", "solver_err", "corr_re", "corr_im", "corr_se", "corr_dev", "left_re",
            "left_im", "left_se", "left_dev",
        ],
    );
    for x in &cfg.params.probes {
        let params = cfg.params_at(*x)?;
        let s = fine.eval_at(x);
        let err = (s - coarse.eval_at(x)).norm();
        let e = psi_exp_mc(&lin, &gp, &params, &mc, McRule::Corrected)?;
        let l = psi_exp_mc(&lin, &gp, &params, &mc, McRule::Plain(QuadratureRule::Left))?;
        let mut row = vec![Cell::F(x[0]), Cell::F(x[1]), Cell::F(x[2])];
        row.extend(c(s));
        row.push(err.into());
        row.extend(c(e.mean));
        row.extend([e.stderr().into(), e.deviation(s).into()]);
        row.extend(c(l.mean));
        row.extend([l.stderr().into(), l.deviation(s).into()]);
        cmp.push(row);
    }
    Ok(vec![summary, cmp])
}

fn heat_analytic(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let eng = engine(cfg)?;
    let pot = eng.potential().clone();
    let psi0 = cfg.packet()?;
    let mc = mc_config(cfg)?;
    let (t, hbar, lam, big_m) = (cfg.params.t, cfg.params.hbar, cfg.params.lambda, cfg.budget.order);
    let z = C64::new(t / hbar, 0.0);
    let phis: Vec<_> = (0..=big_m).map(|m| eng.phi_m_z(m, &psi0, z)).collect::<Result<_>>()?;
    let heat = eng.heat_dyson(z, lam, big_m, &psi0)?;
    let real = eng.dyson_partial_sum(lam, big_m, &psi0, t)?;
    let mut mom = Table::new(
        "heat_moments",
        &["x1", "x2", "x3", "m", "mc_re", "mc_im", "se", "dyson_re", "dyson_im", "deviation"],
    );
    let mut full = Table::new(
        "exp_form",
        &["x1", "x2", "x3", "mode", "mc_re", "mc_im", "se", "dyson_re", "dyson_im", "convergent", "tail", "deviation"],
    );
    for x in &cfg.params.probes {
        let params = cfg.params_at(*x)?;
        for (m, (e, phi)) in heat_moments_mc(big_m, &pot, &psi0, &params, &mc).iter().zip(&phis).enumerate() {
            let d = phi.state.eval_real(x);
            let mut row = vec![Cell::F(x[0]), Cell::F(x[1]), Cell::F(x[2]), Cell::from(m)];
            row.extend(c(e.mean));
            row.push(e.stderr().into());
            row.extend(c(d));
            row.push(e.deviation(d).into());
            mom.push(row);
        }
        for (mode, real_time, ps) in [("imaginary", false, &heat), ("real", true, &real)] {
            let e = heat_fki_mc(&pot, &psi0, &params, real_time, &mc)?;
            let d = ps.state.eval_real(x);
            let mut row = vec![Cell::F(x[0]), Cell::F(x[1]), Cell::F(x[2]), Cell::from(mode)];
            row.extend(c(e.mean));
            row.push(e.stderr().into());
            row.extend(c(d));
            row.extend(tail_cells(&ps.tail));
            row.push(e.deviation(d).into());
            full.push(row);
        }
    }
    Ok(vec![mom, full])
}
