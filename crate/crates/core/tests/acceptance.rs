//! Acceptance gate: one test per headline guarantee, each printing a single
//! pass line. Run with `cargo test --test acceptance`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crossedlab::algebra::Kernel;
use crossedlab::duality::{plancherel_l2_check, spectral_duality_probe, trace_duality_check};
use crossedlab::dynsys::{DynamicalSystem, PointX};
use crossedlab::eigen;
use crossedlab::presets::{self, GOLDEN};
use crossedlab::repr::{covariance_check, fiber_dual, fiber_x};
use crossedlab::spectral::{ids_bands, ids_shubin, spectral_measure_support_check};
use crossedlab::trace::{shubin_sequence, trace_report, TraceParams};

fn random_pair(rng: &mut ChaCha8Rng) -> (Kernel, Kernel) {
    (
        presets::random_kernel(rng, GOLDEN, 3, 3),
        presets::random_kernel(rng, GOLDEN, 3, 3),
    )
}

#[test]
fn acceptance_1_hilbert_algebra_axioms() {
    let tol = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..200 {
        let (a, b) = random_pair(&mut rng);
        let c = presets::random_kernel(&mut rng, GOLDEN, 3, 3);
        // axiom (i): <a|b> = <b*|a*>
        let lhs = a.inner(&b).unwrap();
        let rhs = b.involve().inner(&a.involve()).unwrap();
        assert!((lhs - rhs).norm() <= tol, "axiom (i), case {case}");
        // axiom (ii): <a*b|c> = <b|a*-conv-c>
        let lhs = a.convolve(&b).unwrap().inner(&c).unwrap();
        let rhs = b.inner(&a.involve().convolve(&c).unwrap()).unwrap();
        assert!((lhs - rhs).norm() <= tol, "axiom (ii), case {case}");
        // associativity
        let ab_c = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let a_bc = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        assert!(ab_c.distance(&a_bc) <= tol, "associativity, case {case}");
        // anti-multiplicativity of *
        let star_ab = a.convolve(&b).unwrap().involve();
        let bstar_astar = b.involve().convolve(&a.involve()).unwrap();
        assert!(star_ab.distance(&bstar_astar) <= tol, "(a*b)* = b*a*, case {case}");
    }
    println!("acceptance 1 Hilbert-algebra axioms (200 random kernels, 1e-10): PASS");
}

#[test]
fn acceptance_2_covariance() {
    for lambda in [1.0, 2.0, 4.0] {
        let a = presets::almost_mathieu(lambda, GOLDEN);
        for i in 0..16 {
            let x = PointX::Torus(vec![i as f64 / 16.0]);
            for t in -3i64..=3 {
                let dev = covariance_check(&a, &x, &[t], 8).unwrap();
                assert!(dev <= 1e-12, "lambda {lambda}, x index {i}, t {t}: dev {dev}");
            }
        }
    }
    println!("acceptance 2 covariance T_t pi(A) T_t* (almost Mathieu, 1e-12): PASS");
}

#[test]
fn acceptance_3_four_trace_functionals() {
    let cases: Vec<(&str, Kernel, f64)> = vec![
        ("unit", presets::unit(DynamicalSystem::torus(vec![GOLDEN])), 1.0),
        ("laplacian", presets::laplacian(DynamicalSystem::torus(vec![GOLDEN])), 2.0),
        ("almost_mathieu(2)", presets::almost_mathieu(2.0, GOLDEN), 4.0),
        ("periodic(0,1)", presets::periodic(&[0.0, 1.0]), 2.5),
    ];
    let params = TraceParams::default();
    for (name, a, expected_tau) in cases {
        let rep = trace_report(&a, &params, 1.0).unwrap();
        assert!(
            (rep.tau_kernel - expected_tau).abs() <= 1e-12,
            "{name}: tau {} vs {expected_tau}",
            rep.tau_kernel
        );
        assert!(rep.lambda_ok, "{name}: lambda {} vs tau {}", rep.lambda_fiber, rep.tau_kernel);
        assert!(rep.delta_ok, "{name}: delta_e {} vs tau {}", rep.delta_e, rep.tau_kernel);
        assert!(rep.mu_ok, "{name}: mu {} vs tau {}", rep.mu_dual, rep.tau_kernel);
    }
    println!("acceptance 3 four-way trace agreement (tau, Lambda, mu, delta_e): PASS");
}

#[test]
fn acceptance_4_shubin_formula() {
    let a = presets::almost_mathieu(2.0, GOLDEN);
    let x = PointX::Torus(vec![0.0]);
    let seq = shubin_sequence(&a, &x, &[320, 640]).unwrap();
    let e320 = (seq[0].value - 4.0).abs();
    let e640 = (seq[1].value - 4.0).abs();
    assert!(e320 <= 0.08, "n=320 error {e320}");
    assert!(e640 <= 0.04, "n=640 error {e640}");
    println!(
        "acceptance 4 Shubin trace formula (errors {:.4} at n=320, {:.4} at n=640): PASS",
        e320, e640
    );
}

#[test]
fn acceptance_5_free_laplacian_ids_oracle() {
    let a = presets::laplacian(DynamicalSystem::point(1));
    let energies: Vec<f64> = (0..513).map(|i| -2.0 + 4.0 * i as f64 / 512.0).collect();
    let curve = ids_shubin(&a, &PointX::Point, 1000, &energies).unwrap();
    let mut worst = 0.0f64;
    for (e, v) in energies.iter().zip(&curve.values) {
        let exact = 1.0 - (e.clamp(-2.0, 2.0) / 2.0).acos() / std::f64::consts::PI;
        worst = worst.max((v - exact).abs());
    }
    assert!(worst <= 0.01, "sup distance {worst}");
    println!("acceptance 5 free-Laplacian IDS vs arccos law (sup {:.5}): PASS", worst);
}

#[test]
fn acceptance_6_periodic_bloch_consistency() {
    let a = presets::periodic(&[0.0, 1.0]);
    let energies: Vec<f64> = (0..513).map(|i| -2.5 + 5.0 * i as f64 / 512.0).collect();
    let x = PointX::Cyclic(vec![0]);
    let box_curve = ids_shubin(&a, &x, 1000, &energies).unwrap();
    let band_curve = ids_bands(&a, 512, &energies).unwrap();
    let sup = box_curve.sup_distance(&band_curve);
    assert!(sup <= 0.02, "sup distance {sup}");

    // gap of Delta + (0,1) potential is (0, 1); IDS exactly 1/2 across it
    for e in [0.1, 0.5, 0.9] {
        let v = ids_bands(&a, 512, &[e]).unwrap().values[0];
        assert_eq!(v, 0.5, "band IDS at {e}");
        let w = ids_shubin(&a, &x, 1000, &[e]).unwrap().values[0];
        assert!((w - 0.5).abs() <= 4.0 / 2001.0, "box IDS at {e}: {w}");
    }

    let rep = spectral_measure_support_check(&a, 200, 512).unwrap();
    for (i, (_, in_gap)) in rep.per_x.iter().enumerate() {
        assert!(*in_gap <= 4, "x index {i}: {in_gap} edge states");
    }
    println!(
        "acceptance 6 periodic Bloch consistency (sup {:.5}, flat gap IDS, <=4 edge states): PASS",
        sup
    );
}

#[test]
fn acceptance_7_fourier_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut kernels = vec![
        presets::unit(DynamicalSystem::torus(vec![GOLDEN])),
        presets::laplacian(DynamicalSystem::torus(vec![GOLDEN])),
        presets::almost_mathieu(2.0, GOLDEN),
    ];
    for _ in 0..100 {
        kernels.push(presets::random_kernel(&mut rng, GOLDEN, 3, 3));
    }
    for (i, a) in kernels.iter().enumerate() {
        let rep = trace_duality_check(a).unwrap();
        assert!(rep.deviation <= 1e-12, "case {i}: trace dev {}", rep.deviation);
        assert!(rep.star_deviation <= 1e-12, "case {i}: star dev {}", rep.star_deviation);
        assert!(
            rep.roundtrip_deviation <= 1e-12,
            "case {i}: roundtrip dev {}",
            rep.roundtrip_deviation
        );
    }
    for i in 0..100 {
        let (a, b) = random_pair(&mut rng);
        let rep = plancherel_l2_check(&a, &b).unwrap();
        assert!(rep.isometry_deviation <= 1e-12, "pair {i}: {}", rep.isometry_deviation);
        assert!(
            rep.multiplicativity_deviation <= 1e-10,
            "pair {i}: {}",
            rep.multiplicativity_deviation
        );
    }
    println!("acceptance 7 Fourier duality (trace, star, round-trip, Plancherel): PASS");
}

#[test]
fn acceptance_8_aubry_probe() {
    let self_dual = spectral_duality_probe(2.0, GOLDEN, 500, 200, 257).unwrap();
    assert!(self_dual.ids_sup_distance <= 0.03, "lambda=2: {}", self_dual.ids_sup_distance);
    assert!(
        self_dual.ritz_matched_fraction >= 0.9,
        "lambda=2 Ritz: {}",
        self_dual.ritz_matched_fraction
    );
    let strong = spectral_duality_probe(4.0, GOLDEN, 500, 200, 257).unwrap();
    assert!(strong.ids_sup_distance <= 0.03, "lambda=4: {}", strong.ids_sup_distance);
    assert!(
        strong.ritz_matched_fraction >= 0.9,
        "lambda=4 Ritz: {}",
        strong.ritz_matched_fraction
    );
    println!(
        "acceptance 8 Aubry duality probe (IDS sup {:.4} / {:.4}, Ritz {:.0}% / {:.0}%): PASS",
        self_dual.ids_sup_distance,
        strong.ids_sup_distance,
        100.0 * self_dual.ritz_matched_fraction,
        100.0 * strong.ritz_matched_fraction
    );
}

#[test]
fn acceptance_9_eigensolver_identities() {
    let mut worst_rel = 0.0f64;
    let mut check = |m: &nalgebra::DMatrix<Complex64>| {
        let vals = eigen::eigenvalues(m).unwrap();
        let res = eigen::sanity_residual(m, &vals);
        let bound = 1e-8 * vals.len() as f64;
        assert!(res <= bound, "residual {res} on dim {}", vals.len());
        worst_rel = worst_rel.max(res / bound);
    };
    for lambda in [0.5, 2.0, 4.0] {
        let a = presets::almost_mathieu(lambda, GOLDEN);
        for i in 0..4 {
            let x = PointX::Torus(vec![i as f64 / 4.0]);
            check(&fiber_x(&a, &x, 40).unwrap().matrix);
            check(&fiber_dual(&a, &[i as f64 / 4.0], 40).unwrap().matrix);
        }
    }
    let p = presets::periodic(&[0.3, -0.7, 1.1]);
    for i in 0..8 {
        check(&fiber_dual(&p, &[i as f64 / 24.0], 0).unwrap().matrix);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let a = presets::random_kernel(&mut rng, GOLDEN, 3, 3);
        let h = a.convolve(&a.involve()).unwrap();
        check(&fiber_x(&h, &PointX::Torus(vec![0.25]), 20).unwrap().matrix);
    }
    println!(
        "acceptance 9 eigensolver trace/Frobenius identities (worst {:.2e} of bound): PASS",
        worst_rel
    );
}
