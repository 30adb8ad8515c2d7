use magpath::cameron_martin::{
    sample_brownian, trig_element, BasisElement, BasisKind, GridPath, OrthonormalBasis,
};
use magpath::{Error, Path};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Composite Simpson for `∫ė₁·ė₂` on `panels` panels.
fn simpson_inner(e1: &BasisElement<f64>, e2: &BasisElement<f64>, panels: usize) -> f64 {
    let h = e1.horizon / panels as f64;
    let f = |s: f64| {
        let (a, b) = (e1.deriv(s), e2.deriv(s));
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    };
    let mut acc = f(0.0) + f(e1.horizon);
    for i in 1..panels {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn random_path(n: usize) -> impl Strategy<Value = Path> {
    prop::collection::vec(prop::array::uniform3(-1.0f64..1.0), n).prop_map(move |steps| {
        let mut v = vec![[0.0; 3]];
        let mut cur = [0.0; 3];
        for s in steps {
            for i in 0..3 {
                cur[i] += s[i];
            }
            v.push(cur);
        }
        GridPath::new(1.0, v).unwrap()
    })
}

fn max_diff(a: &Path, b: &Path) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .flat_map(|(p, q)| (0..3).map(move |i| (p[i] - q[i]).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn unit_line_and_disjoint_tents() {
    let line = Path::from_fn(1.0, 8, |s| [s, 0.0, 0.0]).unwrap();
    assert!((line.cm_norm_sq() - 1.0).abs() < 1e-15);
    let tent = OrthonormalBasis::tent(1.0);
    // level-1 tents on [0, 1/2] and [1/2, 1], same direction
    let a = tent.element(6).render(64).unwrap();
    let b = tent.element(9).render(64).unwrap();
    assert_eq!(a.cm_inner(&b).unwrap(), 0.0);
}

#[test]
fn tent_gram_is_identity() {
    let basis = OrthonormalBasis::tent(2.5);
    let els: Vec<Path> = basis.elements(30).iter().map(|e| e.render(1 << 12).unwrap()).collect();
    for i in 0..30 {
        for j in 0..30 {
            let g = els[i].cm_inner(&els[j]).unwrap();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g - want).abs() < 1e-10, "({i},{j}) = {g}");
        }
    }
}

#[test]
fn trig_gram_is_identity_by_simpson() {
    for kind in [BasisKind::Trig, BasisKind::TrigUnbalanced, BasisKind::TrigSubfamily(vec![2, 5, 6])] {
        let els = OrthonormalBasis::<f64>::new(kind.clone(), 1.0).unwrap().elements(30);
        let mut worst: f64 = 0.0;
        for i in 0..30 {
            for j in 0..30 {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((simpson_inner(&els[i], &els[j], 1 << 14) - want).abs());
            }
        }
        assert!(worst < 1e-8, "{kind:?}: {worst:e}");
    }
}

#[test]
fn trig_examples() {
    let e01 = trig_element::<f64>((0, 1));
    assert_eq!(e01.value(0.3), [0.3, 0.0, 0.0]);
    assert!((simpson_inner(&e01, &e01, 64) - 1.0).abs() < 1e-14);
    let (e1, e2) = (trig_element::<f64>((3, 1)), trig_element::<f64>((3, 2)));
    assert!(simpson_inner(&e1, &e2, 1 << 12).abs() < 1e-12);
    let bad = OrthonormalBasis::<f64>::new(BasisKind::Trig, 2.0);
    assert!(matches!(bad, Err(Error::HorizonUnsupported { .. })));
}

#[test]
fn tent_areas_vanish() {
    let basis = OrthonormalBasis::<f64>::tent(1.0);
    for e in basis.elements(96) {
        assert_eq!(e.area_integral(), [0.0; 3]);
        // the polygon form agrees
        let a = e.render(256).unwrap().area_integral();
        assert!(a.iter().all(|v| v.abs() < 1e-15));
    }
}

#[test]
fn trig_area_structure() {
    for k in 1..=8 {
        let want = 1.0 / (4.0 * PI * k as f64);
        let a: Vec<[f64; 3]> = (1..=6).map(|j| trig_element::<f64>((k, j)).area_integral()).collect();
        assert!((a[0][2] - want).abs() < 1e-10, "k = {k}: {:?}", a[0]);
        assert!(a[0][0].abs() < 1e-12 && a[0][1].abs() < 1e-12);
        for i in 0..3 {
            assert!((a[0][i] - a[3][i]).abs() < 1e-10);
            assert!((a[0][i] + a[1][i]).abs() < 1e-10);
            assert!((a[0][i] + a[2][i]).abs() < 1e-10);
            assert!(a[4][i].abs() < 1e-12 && a[5][i].abs() < 1e-12);
        }
    }
}

#[test]
fn straight_line_has_no_area() {
    let p = [0.3, -1.2, 2.0];
    let line = Path::from_fn(1.7, 50, |s| [p[0] * s, p[1] * s, p[2] * s]).unwrap();
    assert!(line.area_integral().iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn tent_expansion_reproduces_projection() {
    let fine = 1 << 10;
    let basis = OrthonormalBasis::tent(1.3);
    let els: Vec<Path> = basis.elements(3 * 64).iter().map(|e| e.render(fine).unwrap()).collect();
    for seed in 0..3 {
        let omega = sample_brownian::<f64>(fine, 1.3, 11, seed).unwrap();
        for level in [1usize, 4, 16, 64] {
            let terms: Vec<(f64, &Path)> =
                els[..3 * level].iter().map(|e| (omega.cm_inner(e).unwrap(), e)).collect();
            let expansion = Path::linear_combination(&terms).unwrap();
            let proj = omega.project_piecewise_linear(level).unwrap();
            assert!(max_diff(&expansion, &proj) < 1e-10, "level {level}");
        }
    }
}

#[test]
fn brownian_variance_and_covariance() {
    let (t, n, samples) = (1.7, 16, 100_000u64);
    let (mut s_end, mut s_end2, mut s_cov, mut s_cov2) = ([0.0; 3], [0.0; 3], 0.0, 0.0);
    for i in 0..samples {
        let w = sample_brownian::<f64>(n, t, 3, i).unwrap();
        let end = w.end();
        for d in 0..3 {
            s_end[d] += end[d] * end[d];
            s_end2[d] += end[d].powi(4);
        }
        let c = w.values()[n / 4][0] * end[0];
        s_cov += c;
        s_cov2 += c * c;
    }
    let nf = samples as f64;
    for d in 0..3 {
        let var = s_end[d] / nf;
        let se = ((s_end2[d] / nf - var * var) / nf).sqrt();
        assert!((var - t).abs() < 3.0 * se, "component {d}: {var} vs {t} (se {se})");
    }
    let cov = s_cov / nf;
    let se = ((s_cov2 / nf - cov * cov) / nf).sqrt();
    assert!((cov - t / 4.0).abs() < 3.0 * se, "{cov} vs {}", t / 4.0);
}

#[test]
fn f32_basis_matches_f64() {
    let e64 = trig_element::<f64>((2, 3)).area_integral();
    let e32 = trig_element::<f32>((2, 3)).area_integral();
    for i in 0..3 {
        assert!((e64[i] - e32[i] as f64).abs() < 1e-5);
    }
}

proptest! {
    #[test]
    fn projection_is_idempotent_and_contracts(p in random_path(64), n in prop::sample::select(vec![1usize, 2, 4, 8, 16, 32, 64])) {
        let once = p.project_piecewise_linear(n).unwrap();
        let twice = once.project_piecewise_linear(n).unwrap();
        prop_assert!(max_diff(&once, &twice) < 1e-14);
        prop_assert!(once.cm_norm_sq() <= p.cm_norm_sq() * (1.0 + 1e-12));
        if n == 64 {
            prop_assert_eq!(&once, &p);
        }
    }

    #[test]
    fn projection_is_linear(p in random_path(32), q in random_path(32), a in -2.0f64..2.0) {
        let combo = Path::linear_combination(&[(a, &p), (1.0, &q)]).unwrap();
        let lhs = combo.project_piecewise_linear(8).unwrap();
        let pp = p.project_piecewise_linear(8).unwrap();
        let pq = q.project_piecewise_linear(8).unwrap();
        let rhs = Path::linear_combination(&[(a, &pp), (1.0, &pq)]).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn embedding_bound(p in random_path(40), t in 0.1f64..5.0) {
        let p = GridPath::new(t, p.values().to_vec()).unwrap();
        let sup = p.sup_norm();
        prop_assert!(p.cm_norm_sq() * t >= sup * sup * (1.0 - 1e-12));
    }

    #[test]
    fn brownian_is_keyed(seed in any::<u64>(), idx in any::<u64>(), n in 1usize..64) {
        let a = sample_brownian::<f64>(n, 0.9, seed, idx).unwrap();
        let b = sample_brownian::<f64>(n, 0.9, seed, idx).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.values()[0], [0.0; 3]);
    }

    #[test]
    fn coarse_projection_reads_coarse_knots(seed in any::<u64>(), idx in 0u64..1000, k in 0usize..6) {
        let n = 1usize << k;
        let w = sample_brownian::<f64>(64, 1.0, seed, idx).unwrap();
        let proj = w.project_piecewise_linear(n).unwrap();
        prop_assert_eq!(proj.coarsen(n).unwrap(), w.coarsen(n).unwrap());
    }
}
