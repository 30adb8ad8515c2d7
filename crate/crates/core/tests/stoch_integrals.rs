use magpath::cameron_martin::GridPath;
use magpath::feynman_mc::{brownian_knots, reduce_samples};
use magpath::fourier_measure::{LinearVectorPotential, PointMassMeasure, VectorPotentialFourier};
use magpath::stoch_integrals::{
    cylinder_fresnel_right, divergence_trapezoid, gaussian_osc_moment, limit_right, line_integral_riemann,
    riemann_sum_values, stratonovich_corrected, stratonovich_values, stratonovich_with_scale, CorrectionScale,
    QuadratureRule,
};
use num_complex::Complex;
use proptest::prelude::*;

type C64 = Complex<f64>;

const RULES: [QuadratureRule; 3] = [QuadratureRule::Left, QuadratureRule::Right, QuadratureRule::Midpoint];

fn sqrt_i() -> C64 {
    C64::new(0.0, 1.0).sqrt()
}

fn knots(n: usize) -> impl Strategy<Value = Vec<[f64; 3]>> {
    prop::collection::vec(prop::array::uniform3(-0.5f64..0.5), n).prop_map(|steps| {
        let mut v = vec![[0.0; 3]];
        let mut cur = [0.0; 3];
        for s in steps {
            for i in 0..3 {
                cur[i] += s[i];
            }
            v.push(cur);
        }
        v
    })
}

fn matrix() -> impl Strategy<Value = [[f64; 3]; 3]> {
    prop::array::uniform3(prop::array::uniform3(-2.0f64..2.0))
}

fn real_field() -> impl Strategy<Value = VectorPotentialFourier<f64>> {
    let comp = prop::collection::vec(
        (prop::array::uniform3(-2i32..=2), -1.0f64..1.0, -1.0f64..1.0),
        0..3,
    )
    .prop_map(|atoms| {
        let mut v = Vec::new();
        for (k, re, im) in atoms {
            let k = [k[0] as f64, k[1] as f64, k[2] as f64];
            v.push((k, C64::new(re, im)));
            v.push(([-k[0], -k[1], -k[2]], C64::new(re, -im)));
        }
        PointMassMeasure::new(v)
    });
    prop::array::uniform3(comp).prop_map(|mu| VectorPotentialFourier::real(mu).unwrap())
}

fn sine_field() -> VectorPotentialFourier<f64> {
    let mut mu: [PointMassMeasure<f64>; 3] = Default::default();
    mu[0] = PointMassMeasure::sine([1.0, 0.0, 0.0], 1.0);
    VectorPotentialFourier::real(mu).unwrap()
}

/// `∫_{−L}^{L} f` by the trapezoid rule (spectrally accurate for the
/// Gaussian-damped integrands used here).
fn trapezoid(f: impl Fn(f64) -> C64, half: f64, n: usize) -> C64 {
    let h = 2.0 * half / n as f64;
    let mut acc = (f(-half) + f(half)) * 0.5;
    for i in 1..n {
        acc += f(-half + i as f64 * h);
    }
    acc * h
}

#[test]
fn zero_field_gives_zero() {
    let zero = VectorPotentialFourier::<f64>::zero();
    let w = brownian_knots(64, 1.0, 1, 0);
    for rule in RULES {
        assert_eq!(riemann_sum_values(&zero, &w, rule, sqrt_i(), &[0.3, 0.0, 0.0]), C64::new(0.0, 0.0));
    }
}

#[test]
fn transverse_field_needs_no_correction() {
    let pot = VectorPotentialFourier::cos_field(0, [0.0, 1.0, 0.0], 1.0);
    let w = brownian_knots(128, 1.0, 2, 5);
    let path = GridPath::new(1.0, w.clone()).unwrap();
    let x = [0.1, -0.2, 0.0];
    assert_eq!(divergence_trapezoid(&pot, &w, 1.0 / 128.0, sqrt_i(), &x), C64::new(0.0, 0.0));
    assert_eq!(
        stratonovich_corrected(&pot, &path, sqrt_i(), &x),
        line_integral_riemann(&pot, &path, QuadratureRule::Left, sqrt_i(), &x)
    );
}

#[test]
fn left_sum_is_a_martingale() {
    // a₁ depends on x₂ only, so every left increment has mean zero
    let pot = VectorPotentialFourier::cos_field(0, [0.0, 1.0, 0.0], 1.0);
    let m = reduce_samples(100_000, 1, None, |i, out| {
        let w = brownian_knots(64, 1.0, 21, i);
        out[0] = riemann_sum_values(&pot, &w, QuadratureRule::Left, sqrt_i(), &[0.0; 3]);
    });
    let (se_re, se_im) = m[0].stderr();
    let mean = m[0].mean();
    assert!(mean.re.abs() <= 3.0 * se_re && mean.im.abs() <= 3.0 * se_im, "{mean} ({se_re}, {se_im})");
}

#[test]
fn rules_separate_for_the_sine_field() {
    // right − left → c∫div a(cω) ds; E cos(cω₁(s)) = e^{−is/2} for c = √i
    let pot = sine_field();
    let c = sqrt_i();
    let n = 256;
    let m = reduce_samples(20_000, 1, None, |i, out| {
        let w = brownian_knots(n, 1.0, 22, i);
        out[0] = riemann_sum_values(&pot, &w, QuadratureRule::Right, c, &[0.0; 3])
            - riemann_sum_values(&pot, &w, QuadratureRule::Left, c, &[0.0; 3]);
    });
    let (se_re, se_im) = m[0].stderr();
    let se = se_re.hypot(se_im);
    let mean = m[0].mean();
    assert!(mean.norm() > 5.0 * se, "separation {} vs se {se}", mean.norm());
    let expect = c * C64::new(0.0, 2.0) * ((C64::new(0.0, -0.5)).exp() - 1.0);
    assert!((mean - expect).norm() < 4.0 * se + 0.01, "{mean} vs {expect}");
}

#[test]
fn corrected_and_midpoint_merge() {
    let pot = VectorPotentialFourier::cos_field(0, [0.0, 1.0, 0.0], 1.0);
    let c = sqrt_i();
    let ns: Vec<usize> = (5..=12).map(|p| 1 << p).collect();
    let msq: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let m = reduce_samples(2_000, 1, None, |i, out| {
                let w = brownian_knots(n, 1.0, 23, i);
                let mid = riemann_sum_values(&pot, &w, QuadratureRule::Midpoint, c, &[0.0; 3]);
                let cor = stratonovich_values(&pot, &w, 1.0 / n as f64, c, &[0.0; 3], CorrectionScale::WithC);
                out[0] = C64::new((mid - cor).norm_sqr(), 0.0);
            });
            m[0].mean().re
        })
        .collect();
    assert!(msq.windows(2).all(|w| w[1] < w[0]), "{msq:?}");
    for i in 0..msq.len() - 2 {
        assert!(msq[i] / msq[i + 2] >= 2.0, "n = {}: {msq:?}", ns[i]);
    }
}

#[test]
fn bare_and_scaled_corrections_differ_off_coulomb_gauge() {
    let pot = sine_field();
    let path = GridPath::new(1.0, brownian_knots(64, 1.0, 4, 0)).unwrap();
    let x = [0.2, 0.0, 0.0];
    let with_c = stratonovich_with_scale(&pot, &path, sqrt_i(), &x, CorrectionScale::WithC);
    let bare = stratonovich_with_scale(&pot, &path, sqrt_i(), &x, CorrectionScale::Bare);
    let div = divergence_trapezoid(&pot, path.values(), path.dt(), sqrt_i(), &x);
    let diff = with_c - bare;
    let expect = (sqrt_i() - 1.0) * 0.5 * div;
    assert!((diff - expect).norm() < 1e-13);
    assert!(diff.norm() > 1e-3);
}

#[test]
fn right_limit_against_quadrature() {
    let mut mu: [PointMassMeasure<f64>; 3] = Default::default();
    mu[0] = PointMassMeasure::new(vec![
        ([1.0, 0.0, 0.0], C64::new(1.0, 0.0)),
        ([0.5, 2.0, 0.0], C64::new(0.3, -0.2)),
    ]);
    mu[1] = PointMassMeasure::dirac([0.0, -1.5, 1.0], C64::new(0.0, 0.7));
    let pot = VectorPotentialFourier::complex(mu.clone());
    for (t, hbar) in [(1.0, 1.0), (0.7, 1.9), (2.3, 0.4)] {
        let mut oracle = C64::new(0.0, 0.0);
        for (a, m) in mu.iter().enumerate() {
            for (k, w) in m.atoms() {
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                let steps = 4000;
                let h = t / steps as f64;
                let f = |s: f64| C64::new(0.0, -hbar * s * k2 / 2.0).exp();
                let mut acc = f(0.0) + f(t);
                for i in 1..steps {
                    acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                oracle += -hbar * w * k[a] * acc * h / 3.0;
            }
        }
        let lim = limit_right(&pot, t, hbar);
        assert!((lim - oracle).norm() < 1e-10, "{lim} vs {oracle}");
        let g1 = (cylinder_fresnel_right(&pot, 256, t, hbar) - lim).norm();
        let g2 = (cylinder_fresnel_right(&pot, 512, t, hbar) - lim).norm();
        assert!((g2 / g1 - 0.5).abs() < 0.1, "ratio {}", g2 / g1);
    }
}

#[test]
fn oscillatory_moments_against_quadrature() {
    let phi = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    for zeta in [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(-0.7, 0.4), C64::new(0.3, -1.2)] {
        for k in 0..4 {
            let a = sqrt_i() * zeta;
            let q = trapezoid(|x| (C64::new(0.0, 1.0) * a * x).exp() * x.powi(2 * k as i32) * phi(x), 16.0, 20_000);
            let v = gaussian_osc_moment(zeta, k);
            assert!((v - q).norm() <= 1e-10 * q.norm().max(1.0), "zeta {zeta}, k {k}: {v} vs {q}");
        }
    }
}

#[test]
fn f32_sums_track_f64() {
    let pot64 = VectorPotentialFourier::cos_field(0, [0.0, 1.0, 0.0], 1.0);
    let pot32 = VectorPotentialFourier::<f32>::cos_field(0, [0.0, 1.0, 0.0], 1.0);
    let w = brownian_knots(64, 1.0, 3, 3);
    let w32: Vec<[f32; 3]> = w.iter().map(|p| [p[0] as f32, p[1] as f32, p[2] as f32]).collect();
    let c32 = Complex::<f32>::new(0.0, 1.0).sqrt();
    for rule in RULES {
        let a = riemann_sum_values(&pot64, &w, rule, sqrt_i(), &[0.0; 3]);
        let b = riemann_sum_values(&pot32, &w32, rule, c32, &[0.0; 3]);
        assert!((a.re - b.re as f64).abs() < 1e-4 && (a.im - b.im as f64).abs() < 1e-4);
    }
}

proptest! {
    #[test]
    fn midpoint_minus_left_is_quadratic_variation(
        alpha in matrix(), w in knots(24), cre in -1.0f64..1.0, cim in -1.0f64..1.0, x in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let pot = LinearVectorPotential::derive(alpha);
        let c = C64::new(cre, cim);
        let mid = riemann_sum_values(&pot, &w, QuadratureRule::Midpoint, c, &x);
        let left = riemann_sum_values(&pot, &w, QuadratureRule::Left, c, &x);
        let mut qv = 0.0;
        for s in w.windows(2) {
            let d = [s[1][0] - s[0][0], s[1][1] - s[0][1], s[1][2] - s[0][2]];
            for i in 0..3 {
                for j in 0..3 {
                    qv += d[i] * alpha[i][j] * d[j];
                }
            }
        }
        prop_assert!((mid - left - c * 0.5 * qv).norm() < 1e-12 * (1.0 + mid.norm()));
    }

    #[test]
    fn antisymmetric_left_equals_midpoint(b in prop::array::uniform3(-2.0f64..2.0), w in knots(24)) {
        let alpha = [[0.0, -b[2] / 2.0, b[1] / 2.0], [b[2] / 2.0, 0.0, -b[0] / 2.0], [-b[1] / 2.0, b[0] / 2.0, 0.0]];
        let pot = LinearVectorPotential::derive(alpha);
        let mid = riemann_sum_values(&pot, &w, QuadratureRule::Midpoint, sqrt_i(), &[0.0; 3]);
        let left = riemann_sum_values(&pot, &w, QuadratureRule::Left, sqrt_i(), &[0.0; 3]);
        prop_assert!((mid - left).norm() < 1e-12);
    }

    #[test]
    fn identity_field_correction_is_half_t(w in knots(32), t in 0.1f64..3.0) {
        // a(x) = x₁e₁: corrected − midpoint = ½(t − ΣΔ²)
        let pot = LinearVectorPotential::derive([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let n = w.len() - 1;
        let cor = stratonovich_values(&pot, &w, t / n as f64, C64::new(1.0, 0.0), &[0.0; 3], CorrectionScale::WithC);
        let mid = riemann_sum_values(&pot, &w, QuadratureRule::Midpoint, C64::new(1.0, 0.0), &[0.0; 3]);
        let qv: f64 = w.windows(2).map(|s| (s[1][0] - s[0][0]).powi(2)).sum();
        prop_assert!((cor - mid - C64::new(0.5 * (t - qv), 0.0)).norm() < 1e-12);
        let end = w[n][0];
        prop_assert!((mid.re - end * end / 2.0).abs() < 1e-12);
    }

    #[test]
    fn real_inputs_give_real_sums(pot in real_field(), w in knots(16), x in prop::array::uniform3(-2.0f64..2.0)) {
        let one = C64::new(1.0, 0.0);
        for rule in RULES {
            let v = riemann_sum_values(&pot, &w, rule, one, &x);
            prop_assert!(v.im.abs() <= 1e-12 * v.norm().max(1.0));
        }
        let v = stratonovich_values(&pot, &w, 1.0 / 16.0, one, &x, CorrectionScale::WithC);
        prop_assert!(v.im.abs() <= 1e-12 * v.norm().max(1.0));
    }
}
