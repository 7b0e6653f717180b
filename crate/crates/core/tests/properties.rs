//! Invariants of the special functions, weights, grids, operator and solver,
//! checked on random inputs.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::big_pfq;
use fraclap::grid::{inner, norm_l2, norm_linf, sample, semi_discrete_ft, GridFunction, GridSpec};
use fraclap::operator::{apply_dense, apply_fft, build_operator, dense_matrix};
use fraclap::solver::{solve, solve_dense, EllipticProblem, EllipticSystem, OperatorTerm};
use fraclap::specfun::{bessel_moment_panels, bessel_moment_series, gamma, hyp1f1_safe, hyp2f1_safe, pfq, GaussRule};
use fraclap::weights::{weight, weight_oracle};

fn random_fn(spec: &GridSpec, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..spec.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    GridFunction::from_vec(spec.clone(), data).unwrap()
}

fn grid(extents: &[usize], h: f64) -> GridSpec {
    GridSpec::new(h, extents.to_vec(), vec![0.0; extents.len()]).unwrap()
}

fn rel_l2(a: &GridFunction, b: &GridFunction) -> f64 {
    norm_l2(&a.sub(b).unwrap()) / norm_l2(b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn dense_and_fft_agree(
        shape in prop::sample::select(vec![vec![8usize], vec![64], vec![256], vec![8, 8], vec![16, 16]]),
        alpha in 0.05f64..2.0,
        seed in any::<u64>(),
    ) {
        let spec = grid(&shape, 0.1);
        let op = build_operator(alpha, &spec).unwrap();
        let u = random_fn(&spec, seed);
        let d = apply_dense(&op, &u).unwrap();
        let f = apply_fft(&op, &u).unwrap();
        prop_assert!(rel_l2(&f, &d) <= 1e-12);
    }

    #[test]
    fn operator_is_symmetric(alpha in 0.05f64..2.0, seed in any::<u64>(), two_d in any::<bool>()) {
        let spec = if two_d { grid(&[9, 7], 0.2) } else { grid(&[40], 0.05) };
        let op = build_operator(alpha, &spec).unwrap();
        let u = random_fn(&spec, seed);
        let v = random_fn(&spec, seed ^ 0x9e37);
        let auv = inner(&apply_fft(&op, &u).unwrap(), &v).unwrap();
        let uav = inner(&u, &apply_fft(&op, &v).unwrap()).unwrap();
        prop_assert!((auv - uav).abs() <= 1e-12 * auv.abs().max(norm_l2(&u) * norm_l2(&v)));
    }

    #[test]
    fn scaling_law(alpha in 0.05f64..2.0, d in 1usize..=3, m in 0u64..400, h in 0.01f64..2.0) {
        let w1 = weight(alpha, 1.0, d, m).unwrap();
        let wh = weight(alpha, h, d, m).unwrap();
        prop_assert!((wh - h.powf(-alpha) * w1).abs() <= 1e-12 * wh.abs().max(1e-300));
    }

    #[test]
    fn weight_dual_path(alpha in prop::sample::select(vec![0.3, 0.5, 1.0, 1.7, 2.0]), d in 1usize..=3, m in 0u64..=400) {
        let w = weight(alpha, 1.0, d, m).unwrap();
        let o = weight_oracle(alpha, 1.0, d, m).unwrap();
        // exact zeros (α = 1, even lags in 1D) are measured against the diagonal
        let scale = if w == 0.0 { weight(alpha, 1.0, d, 0).unwrap().abs() } else { w.abs().max(o.abs()) };
        prop_assert!((w - o).abs() <= 1e-9 * scale, "w={w} oracle={o}");
    }

    #[test]
    fn alpha_zero_is_identity(seed in any::<u64>(), two_d in any::<bool>()) {
        let spec = if two_d { grid(&[6, 11], 0.3) } else { grid(&[50], 0.3) };
        let op = build_operator(0.0, &spec).unwrap();
        let u = random_fn(&spec, seed);
        prop_assert_eq!(&apply_fft(&op, &u).unwrap().data, &u.data);
        prop_assert_eq!(&apply_dense(&op, &u).unwrap().data, &u.data);
    }

    #[test]
    fn translation_equivariance(alpha in 0.05f64..2.0, at in 10usize..20, shift in 1usize..10) {
        let spec = grid(&[41], 0.25);
        let op = build_operator(alpha, &spec).unwrap();
        let a = apply_dense(&op, &GridFunction::delta(spec.clone(), &[at])).unwrap();
        let b = apply_dense(&op, &GridFunction::delta(spec.clone(), &[at + shift])).unwrap();
        for k in 0..41 - shift {
            prop_assert_eq!(a.data[k], b.data[k + shift]);
        }
    }

    #[test]
    fn pfq_is_one_at_zero(a in prop::collection::vec(-3.0f64..3.0, 0..3), b in prop::collection::vec(0.1f64..3.0, 0..3)) {
        let r = pfq(&a, &b, 0.0, 1e-15).unwrap();
        prop_assert_eq!(r.value, 1.0);
        prop_assert_eq!(r.terms_used, 1);
    }

    #[test]
    fn hyp2f1_log_identity(z in 0.0f64..=0.5) {
        let v = hyp2f1_safe(1.0, 1.0, 2.0, z).unwrap();
        prop_assert!((v * z + (1.0 - z).ln()).abs() <= 1e-12);
    }

    #[test]
    fn kummer_transform(a in 0.1f64..3.0, b in 0.5f64..3.0, z in -50.0f64..=0.0) {
        let lhs = hyp1f1_safe(a, b, z).unwrap();
        let rhs = z.exp() * hyp1f1_safe(b - a, b, -z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * z.exp().max(lhs.abs()));
    }

    #[test]
    fn gamma_recurrence(x in 0.5f64..30.0) {
        let g = gamma(x).unwrap();
        let g1 = gamma(x + 1.0).unwrap();
        prop_assert!((g1 - x * g).abs() <= 1e-12 * g1);
    }

    #[test]
    fn semi_discrete_ft_linear_and_hermitian(seed in any::<u64>(), c in -3.0f64..3.0, xi in -PI..PI) {
        let spec = GridSpec::new(1.0, vec![5, 4], vec![-2.0, -1.5]).unwrap();
        let u = random_fn(&spec, seed);
        let v = random_fn(&spec, seed.wrapping_add(1));
        let w = GridFunction::from_vec(spec.clone(), u.data.iter().zip(&v.data).map(|(a, b)| a + c * b).collect()).unwrap();
        let x = [xi, -0.4 * xi];
        let fu = semi_discrete_ft(&u, &x).unwrap();
        let fv = semi_discrete_ft(&v, &x).unwrap();
        let fw = semi_discrete_ft(&w, &x).unwrap();
        prop_assert!((fw - (fu + fv * c)).norm() <= 1e-12 * (1.0 + fw.norm()));
        let fm = semi_discrete_ft(&u, &[-x[0], -x[1]]).unwrap();
        prop_assert!((fm - fu.conj()).norm() <= 1e-12 * (1.0 + fu.norm()));
    }

    #[test]
    fn l2_bounded_by_linf(seed in any::<u64>(), h in 0.01f64..1.0, n in 1usize..200) {
        let spec = grid(&[n], h);
        let u = random_fn(&spec, seed);
        let measure = n as f64 * h;
        prop_assert!(norm_l2(&u) <= measure.sqrt() * norm_linf(&u) * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// The closed ₁F₂ form of ∫₀^r ρ^λ J_ν(ρ) dρ, summed in extended
    /// precision, against the panel quadrature.
    #[test]
    fn bessel_moment_dual_path(
        nu in prop::sample::select(vec![-0.5, 0.0, 0.5, 1.0]),
        beta in -0.9f64..6.0,
        r in 1.0f64..100.0,
    ) {
        let lambda = beta - nu;
        // round to dyadic values so the oracle sees exactly the same inputs
        let r = (r * 64.0).round() / 64.0;
        let lambda = (lambda * 1024.0).round() / 1024.0;
        let s = lambda + nu + 1.0;
        let gnu1 = gamma(nu + 1.0).unwrap();
        let series = big_pfq(&[s / 2.0], &[nu + 1.0, s / 2.0 + 1.0], -r * r / 4.0);
        let want = r.powf(s) / (2f64.powf(nu) * s * gnu1) * series;
        let got = bessel_moment_panels(lambda, nu, r).unwrap();
        let scale = want.abs();
        prop_assert!((got - want).abs() <= 1e-9 * scale, "λ={lambda} ν={nu} r={r}: {got} vs {want}");
        if r <= 12.0 {
            let d = bessel_moment_series(lambda, nu, r).unwrap().value;
            prop_assert!((d - want).abs() <= 1e-9 * scale);
        }
    }
}

#[test]
fn parseval_identity() {
    let spec = GridSpec::new(0.25, vec![23], vec![-2.75]).unwrap();
    let u = sample(|x| (-x[0] * x[0]).exp() * (1.0 + x[0]), &spec).unwrap();
    let cut = PI / spec.h;
    let rule = GaussRule::legendre(2048);
    let integral = rule.integrate(-cut, cut, |xi| semi_discrete_ft(&u, &[xi]).unwrap().norm_sqr());
    let lhs = integral / (2.0 * PI);
    let rhs = norm_l2(&u).powi(2);
    assert!((lhs - rhs).abs() <= 1e-8 * rhs, "{lhs} vs {rhs}");
}

#[test]
fn aliasing_formula() {
    // e^{-x²} has transform √π e^{-ξ²/4}
    let h = 0.5;
    let spec = GridSpec::covering(&[-12.0], &[12.0], h).unwrap();
    let u = sample(|x| (-x[0] * x[0]).exp(), &spec).unwrap();
    let hat = |xi: f64| PI.sqrt() * (-xi * xi / 4.0).exp();
    for xi in [0.0, 0.9, 2.5, 5.0, 2.0 * PI - 0.1] {
        let direct = semi_discrete_ft(&u, &[xi]).unwrap();
        let aliased: f64 = (-2..=2).map(|j| hat(xi + 2.0 * PI * j as f64 / h)).sum();
        assert!((direct.re - aliased).abs() <= 1e-10, "ξ={xi}: {} vs {aliased}", direct.re);
        assert!(direct.im.abs() <= 1e-10);
    }
}

fn poisson_1d(alpha: f64, n: usize) -> EllipticProblem {
    let h = 2.0 / (n as f64 + 1.0);
    let domain = GridSpec::interior(&[-1.0], &[1.0], h).unwrap();
    EllipticProblem::poisson(alpha, domain, Arc::new(|x: &[f64]| 1.0 + x[0] - x[0].powi(3)))
}

#[test]
fn spd_dense_matrices() {
    for alpha in [0.5, 1.0, 1.7, 2.0] {
        for n in [1usize, 2, 5, 16, 32] {
            let spec = grid(&[n], 2.0 / (n as f64 + 1.0));
            let op = build_operator(alpha, &spec).unwrap();
            let a = nalgebra::DMatrix::from_row_slice(n, n, &dense_matrix(&op));
            assert!((&a - a.transpose()).amax() <= 1e-12 * a.amax());
            let ev = a.symmetric_eigenvalues();
            assert!(ev.min() > 0.0, "alpha={alpha} n={n}: min eigenvalue {}", ev.min());
        }
    }
}

#[test]
fn mixture_is_positive_definite() {
    let mut p = poisson_1d(0.5, 64);
    p.terms = vec![OperatorTerm { coefficient: 0.5, alpha: 0.5 }, OperatorTerm { coefficient: 0.5, alpha: 2.0 }];
    let a = EllipticSystem::new(&p, None).unwrap().dense().unwrap();
    assert!((&a - a.transpose()).amax() <= 1e-12 * a.amax());
    assert!(a.cholesky().is_some());
}

#[test]
fn cg_matches_cholesky() {
    let p = poisson_1d(1.7, 128);
    let direct = solve_dense(&p).unwrap();
    let report = solve(&p, 1e-12, 2000).unwrap();
    assert!(rel_l2(&report.solution, &direct) <= 1e-10);
}

#[test]
fn zero_rhs_zero_solution() {
    let mut p = poisson_1d(1.3, 100);
    p.rhs = Arc::new(|_: &[f64]| 0.0);
    let r = solve(&p, 1e-12, 100).unwrap();
    assert_eq!(r.iterations, 0);
    assert!(r.solution.data.iter().all(|&v| v == 0.0));
}

#[test]
fn mixture_of_equal_exponents_is_linear() {
    let single = poisson_1d(1.2, 90);
    let mut mixed = poisson_1d(1.2, 90);
    mixed.terms = vec![OperatorTerm { coefficient: 0.3, alpha: 1.2 }, OperatorTerm { coefficient: 0.7, alpha: 1.2 }];
    let a = solve(&single, 1e-12, 2000).unwrap().solution;
    let b = solve(&mixed, 1e-12, 2000).unwrap().solution;
    assert!(rel_l2(&b, &a) <= 1e-10);
}

#[test]
fn halving_tolerance_is_stable() {
    let p = poisson_1d(0.8, 200);
    let mut prev: Option<GridFunction> = None;
    for tol in [1e-6, 5e-7, 2.5e-7, 1.25e-7] {
        let u = solve(&p, tol, 2000).unwrap().solution;
        if let Some(v) = &prev {
            // bounded by the previous tolerance, 2 tol
            assert!(rel_l2(&u, v) <= 2.0 * tol, "tol {tol}: {}", rel_l2(&u, v));
        }
        prev = Some(u);
    }
}
