use magpath::dyson::{apply_u0, apply_v, simplex_phase_integral, DysonEngine, TailBound, WavePacket};
use magpath::fourier_measure::{lambda_star, PointMassMeasure, VectorPotentialFourier};
use magpath::{Error, Packet};
use num_complex::Complex;
use proptest::prelude::*;

type C64 = Complex<f64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `∫₀ᵗ∫₀^{s₂} e^{θ₁s₁ + θ₂s₂} ds₁ ds₂` with `s₁ = u·s₂` and product Simpson.
fn nested_two(th: [C64; 2], t: f64) -> C64 {
    let n = 1000;
    let w = |i: usize| if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
    let (hs, hu) = (t / n as f64, 1.0 / n as f64);
    let mut acc = c(0.0, 0.0);
    for i in 0..=n {
        let s2 = i as f64 * hs;
        let outer = (th[1] * s2).exp() * s2;
        let mut inner = c(0.0, 0.0);
        for j in 0..=n {
            inner += (th[0] * s2 * (j as f64 * hu)).exp() * w(j);
        }
        acc += outer * inner * w(i);
    }
    acc * hs * hu / 9.0
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn max_atom_norm(p: &Packet) -> f64 {
    p.atoms().iter().map(|(y, _)| (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt()).fold(0.0, f64::max)
}

fn atom_strategy() -> impl Strategy<Value = ([f64; 3], C64)> {
    (prop::array::uniform3(-2i32..=2), -1.0f64..1.0, -1.0f64..1.0)
        .prop_map(|(k, re, im)| ([k[0] as f64 * 0.5, k[1] as f64 * 0.5, k[2] as f64 * 0.5], c(re, im)))
}

fn packet() -> impl Strategy<Value = Packet> {
    prop::collection::vec(atom_strategy(), 1..4).prop_map(WavePacket::new)
}

fn real_pot() -> impl Strategy<Value = VectorPotentialFourier<f64>> {
    let comp = prop::collection::vec(atom_strategy(), 0..2).prop_map(|atoms| {
        let mut v = Vec::new();
        for (k, w) in atoms {
            v.push((k, w));
            v.push(([-k[0], -k[1], -k[2]], w.conj()));
        }
        PointMassMeasure::new(v)
    });
    prop::array::uniform3(comp).prop_map(|mu| VectorPotentialFourier::real(mu).unwrap())
}

#[test]
fn simplex_volumes() {
    assert!((simplex_phase_integral(&[c(0.0, 0.0); 2], 1.0) - c(0.5, 0.0)).norm() < 1e-15);
    for n in 1..8 {
        let t = 1.7;
        let v = simplex_phase_integral(&vec![c(0.0, 0.0); n], t);
        assert!((v.re - t.powi(n as i32) / fact(n)).abs() < 1e-13 && v.im == 0.0);
    }
}

#[test]
fn simplex_against_nested_quadrature() {
    let th = [c(0.0, 1.0), c(0.0, -1.0)];
    let q = nested_two(th, 1.0);
    assert!((simplex_phase_integral(&th, 1.0) - q).norm() < 1e-10);
    // nearly coincident partial sums
    let near = simplex_phase_integral(&[c(0.0, 1.0), c(0.0, -1.0 + 1e-12)], 1.0);
    assert!((near - q).norm() < 1e-10);
    for (th, t) in [
        ([c(0.3, -2.0), c(-1.0, 0.5)], 1.3),
        ([c(0.0, 2.5), c(0.0, 2.5 + 1e-7)], 0.8),
        ([c(-0.4, 0.0), c(0.4, 0.0)], 2.0),
    ] {
        let v = simplex_phase_integral(&th, t);
        let q = nested_two(th, t);
        assert!((v - q).norm() < 1e-9, "{th:?}: {v} vs {q}");
    }
}

#[test]
fn first_order_single_atom() {
    // ψ₀ = δ_y, a = (cos(k·x), 0, 0): A sends y to y ± k with weight −ħy₁/2
    let hbar = 0.8;
    let t = 1.1;
    let y = [0.7, -0.3, 0.2];
    let k = [0.0, 1.0, 0.5];
    let pot = VectorPotentialFourier::cos_field(0, k, 1.0);
    let eng = DysonEngine::new(pot, hbar).unwrap();
    let psi0 = WavePacket::plane_wave(y);
    let got = eng.phi_nk(1, 1, &psi0, t).unwrap().state;
    let sq = |v: [f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let mut expect = Vec::new();
    for sign in [1.0, -1.0] {
        let y1 = [y[0] + sign * k[0], y[1] + sign * k[1], y[2] + sign * k[2]];
        let f = |s: f64| c(0.0, -hbar * (sq(y1) * (t - s) + sq(y) * s) / 2.0).exp();
        let n = 2000;
        let h = t / n as f64;
        let mut acc = f(0.0) + f(t);
        for i in 1..n {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        expect.push((y1, acc * h / 3.0 * (-hbar * y[0] * 0.5)));
    }
    assert!(got.max_weight_diff(&WavePacket::new(expect)) < 1e-12);
    let phi1 = eng.phi_m(1, &psi0, t).unwrap().state;
    assert!(phi1.max_weight_diff(&got.scaled(c(0.0, -1.0 / hbar))) < 1e-15);
}

#[test]
fn aligned_b_reaches_support_edge() {
    let pot = VectorPotentialFourier::cos_field(0, [1.0, 0.0, 0.0], 1.0);
    let eng = DysonEngine::new(pot, 1.0).unwrap();
    let b = eng.apply_b(&WavePacket::plane_wave([1.0, 0.0, 0.0]));
    assert_eq!(b.support_radius(), 3.0);
    assert_eq!(max_atom_norm(&b), 3.0);
    let zero = DysonEngine::new(VectorPotentialFourier::zero(), 1.0).unwrap();
    assert!(zero.apply_b(&WavePacket::plane_wave([1.0, 0.0, 0.0])).atoms().is_empty());
    assert!(eng.apply_a(&WavePacket::plane_wave([0.0; 3])).atoms().is_empty());
}

#[test]
fn lambda_zero_is_free_evolution() {
    let (pot, psi0) = (VectorPotentialFourier::cos_field(0, [0.0, 1.0, 0.0], 1.0), cos_packet());
    let eng = DysonEngine::new(pot, 1.3).unwrap();
    let s = eng.dyson_partial_sum(0.0, 3, &psi0, 0.9).unwrap();
    // same atoms and weights; the bookkept radius still covers the higher orders
    assert_eq!(s.state.atoms(), apply_u0(&psi0, 0.9, 1.3).atoms());
}

#[test]
fn heat_decay_at_lambda_zero() {
    let (pot, psi0) = (VectorPotentialFourier::cos_field(0, [0.0, 1.0, 0.0], 1.0), cos_packet());
    let hbar = 0.6;
    let z = 1.7;
    let eng = DysonEngine::new(pot, hbar).unwrap();
    let s = eng.heat_dyson(c(z, 0.0), 0.0, 2, &psi0).unwrap();
    let expect: Vec<_> = psi0
        .atoms()
        .iter()
        .map(|(y, w)| (*y, w * (-z * hbar * hbar * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / 2.0).exp()))
        .collect();
    assert!(s.state.max_weight_diff(&WavePacket::new(expect)) < 1e-15);
    assert!(matches!(eng.heat_dyson(c(-0.1, 0.0), 0.0, 2, &psi0), Err(Error::InvalidArgument(_))));
}

#[test]
fn analytic_family_on_imaginary_axis() {
    let pot = VectorPotentialFourier::cos_field(0, [0.0, 1.0, 0.0], 1.0);
    let psi0 = cos_packet();
    let (t, hbar) = (0.9, 1.4);
    let eng = DysonEngine::new(pot, hbar).unwrap();
    for m in 0..=4 {
        let real = eng.phi_m(m, &psi0, t).unwrap().state;
        let z = eng.phi_m_z(m, &psi0, c(0.0, t / hbar)).unwrap().state;
        assert!(real.max_weight_diff(&z) < 1e-12, "m = {m}");
    }
}

#[test]
fn scalar_potential_steps() {
    let psi0 = cos_packet();
    let v0 = c(0.4, -0.2);
    let v = apply_v(&psi0, &PointMassMeasure::dirac([0.0; 3], v0));
    assert!(v.max_weight_diff(&psi0.scaled(v0)) < 1e-16);
    let vm = PointMassMeasure::cosine([0.0, 0.0, 1.5], 0.3);
    let out = apply_v(&psi0, &vm);
    assert_eq!(out.support_radius(), psi0.support_radius() + 1.5);
    assert!(max_atom_norm(&out) <= out.support_radius());
    // chain bounds with the scalar slot
    let eng = DysonEngine::new(VectorPotentialFourier::cos_field(0, [0.0, 1.0, 0.0], 1.0), 1.0)
        .unwrap()
        .with_scalar_potential(vm);
    for n in 1..=3 {
        for k in 0..=n {
            let term = eng.phi_nk(n, k, &psi0, 1.0).unwrap();
            assert!(term.state.norm_surrogate() <= term.bound * (1.0 + 1e-12), "({n},{k})");
        }
    }
}

#[test]
fn term_ratios_and_tail_below_radius() {
    let pot = VectorPotentialFourier::cos_field(0, [0.0, 1.0, 0.0], 1.0);
    let psi0 = cos_packet();
    let eng = DysonEngine::new(pot, 1.0).unwrap();
    let ls = lambda_star(1.0, 1.0, 1.0, 1.0).unwrap();
    let lam = 0.5 * ls;
    let s = eng.dyson_partial_sum(lam, 4, &psi0, 1.0).unwrap();
    let norms: Vec<f64> = s.terms.iter().enumerate().map(|(m, t)| lam.powi(m as i32) * t.state.norm_surrogate()).collect();
    assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
    assert!(!s.outside_radius);
    let tails: Vec<f64> = (0..=4)
        .map(|m| match eng.tail_bound(lam, m, &psi0, 1.0) {
            TailBound::Converges(v) => v,
            TailBound::Divergent => f64::INFINITY,
        })
        .collect();
    assert!(tails.windows(2).all(|w| w[1] < w[0]), "{tails:?}");
    assert_eq!(eng.tail_bound(2.0 * ls, 4, &psi0, 1.0), TailBound::Divergent);
    assert!(matches!(eng.phi_m(9, &psi0, 1.0), Err(Error::Capacity { .. })));
}

#[test]
fn f32_terms_track_f64() {
    let p64 = VectorPotentialFourier::cos_field(0, [0.0, 1.0, 0.0], 1.0);
    let p32 = VectorPotentialFourier::<f32>::cos_field(0, [0.0, 1.0, 0.0], 1.0);
    let psi64 = cos_packet();
    let psi32 = WavePacket::<f32>::new(vec![([0.5, 0.0, 0.0], Complex::new(1.0, 0.0)), ([0.0, -0.5, 0.3], Complex::new(0.0, 0.5))]);
    let a = DysonEngine::new(p64, 1.0).unwrap().phi_m(2, &psi64, 1.0).unwrap().state;
    let b = DysonEngine::new(p32, 1.0f32).unwrap().phi_m(2, &psi32, 1.0).unwrap().state;
    let x = [0.3, -0.7, 0.1];
    let va = a.eval_real(&x);
    let vb = b.eval_real(&[0.3f32, -0.7, 0.1]);
    assert!((va.re - vb.re as f64).abs() < 1e-5 && (va.im - vb.im as f64).abs() < 1e-5);
}

fn cos_packet() -> Packet {
    WavePacket::new(vec![([0.5, 0.0, 0.0], c(1.0, 0.0)), ([0.0, -0.5, 0.3], c(0.0, 0.5))])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permutation_sums_factorize(
        raw in prop::collection::vec((-2.0f64..2.0, -3.0f64..3.0), 2..=3),
        t in 0.2f64..2.0,
    ) {
        let th: Vec<C64> = raw.iter().map(|(a, b)| c(*a, *b)).collect();
        for i in 0..th.len() {
            for j in 0..i {
                prop_assume!((th[i] - th[j]).norm() > 0.05);
            }
            prop_assume!(th[i].norm() > 0.05);
        }
        let sum: C64 = permutations(th.len())
            .iter()
            .map(|p| simplex_phase_integral(&p.iter().map(|&i| th[i]).collect::<Vec<_>>(), t))
            .sum();
        let prod: C64 = th.iter().map(|x| ((x * t).exp() - 1.0) / x).product();
        prop_assert!((sum - prod).norm() <= 1e-10 * prod.norm().max(1.0), "{sum} vs {prod}");
    }

    #[test]
    fn chain_norms_obey_the_product_bound(pot in real_pot(), psi0 in packet(), t in 0.2f64..1.5, hbar in 0.5f64..1.5) {
        let eng = DysonEngine::new(pot.clone(), hbar).unwrap().with_order_cap(3);
        let tv = pot.total_variations();
        let alpha = (tv[0] * tv[0] + tv[1] * tv[1] + tv[2] * tv[2]).sqrt();
        let r = pot.support_radius();
        let rho = psi0.support_radius();
        for n in 0..=3 {
            for k in 0..=n {
                let term = eng.phi_nk(n, k, &psi0, t).unwrap();
                let nb = (n - k) as f64;
                let prod: f64 = (0..k).map(|j| rho + 2.0 * r * nb + j as f64 * r).product();
                let bound = binom(n, k) * t.powi(n as i32) / fact(n)
                    * (hbar * alpha).powi(k as i32)
                    * (alpha * alpha / 2.0).powi((n - k) as i32)
                    * prod
                    * psi0.norm_surrogate();
                prop_assert!(term.state.norm_surrogate() <= bound * (1.0 + 1e-10) + 1e-14, "({n},{k})");
                prop_assert!((term.bound - bound).abs() <= 1e-10 * bound.max(1e-300));
                let support = rho + k as f64 * r + 2.0 * r * nb;
                prop_assert!(term.state.support_radius() <= support + 1e-12);
                prop_assert!(max_atom_norm(&term.state) <= support + 1e-12);
            }
        }
    }

    #[test]
    fn single_operator_bounds(pot in real_pot(), psi0 in packet(), hbar in 0.3f64..2.0) {
        let eng = DysonEngine::new(pot.clone(), hbar).unwrap();
        let (alpha, _) = pot.sup_norm_bound().unwrap();
        let rho = psi0.support_radius();
        let r = pot.support_radius();
        let a = eng.apply_a(&psi0);
        prop_assert!(a.norm_surrogate() <= hbar * alpha * rho * psi0.norm_surrogate() * (1.0 + 1e-12) + 1e-14);
        let b = eng.apply_b(&psi0);
        prop_assert!((b.support_radius() - (rho + 2.0 * r)).abs() <= 1e-12);
        prop_assert!(max_atom_norm(&b) <= rho + 2.0 * r + 1e-12);
        prop_assert!(b.norm_surrogate() <= alpha * alpha / 2.0 * psi0.norm_surrogate() * (1.0 + 1e-12) + 1e-14);
        let u = apply_u0(&psi0, 0.7, hbar);
        prop_assert!((u.norm_surrogate() - psi0.norm_surrogate()).abs() <= 1e-14);
    }
}
