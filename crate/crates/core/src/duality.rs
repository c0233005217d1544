//! Fourier transform of kernels for rotation systems and the induced
//! dualities: trace invariance, the `L^2` isometry, multiplicativity and
//! the hopping/potential exchange behind Aubry duality for the almost
//! Mathieu family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Kernel;
use crate::coeff::Coeff;
use crate::dynsys::{DynamicalSystem, PointX, SpaceSpec};
use crate::eigen;
use crate::error::{LabError, Result};
use crate::presets;
use crate::repr::{fiber_dual, fiber_x};
use crate::spectral::ids_shubin;

const TAU: f64 = std::f64::consts::TAU;

fn dual_theta(a: &Kernel) -> Result<Vec<f64>> {
    match &a.system().space {
        SpaceSpec::Torus { theta } => Ok(theta.clone()),
        SpaceSpec::Point => Ok(vec![0.0; a.system().rank()]),
        SpaceSpec::FiniteCyclic { .. } => Err(LabError::Unsupported {
            required: "torus or point configuration space".into(),
            got: "finite quotient (use the Bloch decomposition instead)".into(),
        }),
    }
}

/// Fourier transform of a kernel on a rotation system. Group sites and
/// coefficient modes exchange roles:
/// `ahat(k, that) = sum_t a_k(t) e^{2 pi i k.t theta} e^{-2 pi i t.that}`,
/// where `a_k(t)` is the mode-`k` amplitude of `a(t, .)`. The dual system is
/// again the rotation by `theta`, and the transform is exact.
pub fn hat_transform(a: &Kernel) -> Result<Kernel> {
    let theta = dual_theta(a)?;
    let mut out = Kernel::zero(DynamicalSystem::torus(theta.clone()));
    for (t, f) in a.terms() {
        let modes: Vec<(Vec<i64>, Complex64)> = match f {
            Coeff::Point(c) => vec![(vec![0; t.len()], *c)],
            Coeff::Torus(m) => m.iter().map(|(k, c)| (k.clone(), *c)).collect(),
            Coeff::Cyclic { .. } => unreachable!("excluded by dual_theta"),
        };
        let neg_t: Vec<i64> = t.iter().map(|c| -c).collect();
        for (k, c) in modes {
            let phase: f64 = k
                .iter()
                .zip(t)
                .zip(&theta)
                .map(|((&ki, &ti), &th)| ki as f64 * ti as f64 * th)
                .sum();
            let amp = c * Complex64::from_polar(1.0, TAU * phase);
            out.add_term(k, Coeff::torus_mode(neg_t.clone(), amp));
        }
    }
    Ok(out)
}

/// Reflection `(t, x) -> (-t, -x)`: the double Fourier transform returns the
/// reflected kernel, not the original.
pub fn reflect(a: &Kernel) -> Kernel {
    let mut out = Kernel::zero(a.system().clone());
    for (t, f) in a.terms() {
        let neg_t: Vec<i64> = t.iter().map(|c| -c).collect();
        let g = match f {
            Coeff::Torus(m) => Coeff::Torus(
                m.iter().map(|(k, c)| (k.iter().map(|ki| -ki).collect(), *c)).collect(),
            ),
            other => other.clone(),
        };
        out.add_term(neg_t, g);
    }
    out
}

/// Trace and star compatibility of the transform.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDualityReport {
    /// `<a|a>` on the original side.
    pub tau_forward: f64,
    /// `<ahat|ahat>` on the dual side.
    pub tau_backward: f64,
    pub deviation: f64,
    /// Kernel distance between `hat(a*)` and `hat(a)*`.
    pub star_deviation: f64,
    /// Kernel distance between `hat(hat(a))` and the reflection of `a`.
    pub roundtrip_deviation: f64,
}

pub fn trace_duality_check(a: &Kernel) -> Result<TraceDualityReport> {
    let ahat = hat_transform(a)?;
    let tau_forward = a.inner(a)?.re;
    let tau_backward = ahat.inner(&ahat)?.re;
    let star_deviation = hat_transform(&a.involve())?.distance(&ahat.involve());
    let roundtrip_deviation = hat_transform(&ahat)?.distance(&reflect_to_dual(a)?);
    Ok(TraceDualityReport {
        tau_forward,
        tau_backward,
        deviation: (tau_forward - tau_backward).abs(),
        star_deviation,
        roundtrip_deviation,
    })
}

// hat(hat(a)) lives on the dual (torus) system even when a is a point
// kernel; lift the reflection there before comparing.
fn reflect_to_dual(a: &Kernel) -> Result<Kernel> {
    let theta = dual_theta(a)?;
    let sys = DynamicalSystem::torus(theta);
    let mut lifted = Kernel::zero(sys.clone());
    for (t, f) in a.terms() {
        let g = match f {
            Coeff::Point(c) => Coeff::constant(&sys.space, *c),
            other => other.clone(),
        };
        lifted.add_term(t.clone(), g);
    }
    Ok(reflect(&lifted))
}

/// `L^2` isometry and multiplicativity of the transform.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlancherelReport {
    pub inner_forward: Complex64,
    pub inner_dual: Complex64,
    pub isometry_deviation: f64,
    /// Kernel distance between `hat(a * b)` and `ahat * bhat`.
    pub multiplicativity_deviation: f64,
}

pub fn plancherel_l2_check(a: &Kernel, b: &Kernel) -> Result<PlancherelReport> {
    let ahat = hat_transform(a)?;
    let bhat = hat_transform(b)?;
    let inner_forward = a.inner(b)?;
    let inner_dual = ahat.inner(&bhat)?;
    let multiplicativity_deviation =
        hat_transform(&a.convolve(b)?)?.distance(&ahat.convolve(&bhat)?);
    Ok(PlancherelReport {
        inner_forward,
        inner_dual,
        isometry_deviation: (inner_forward - inner_dual).norm(),
        multiplicativity_deviation,
    })
}

/// Numerical comparison of the two sides of Aubry duality for the almost
/// Mathieu kernel: `N_lambda(E) = N_{4/lambda}(2E/lambda)` for the IDS, and
/// the exact identity of the dual fiber at `that` with the rescaled direct
/// fiber at `x = that`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AubryProbe {
    pub lambda: f64,
    pub dual_lambda: f64,
    /// `sup_E |N_lambda(E) - N_{4/lambda}(2E/lambda)|` on the energy grid.
    pub ids_sup_distance: f64,
    /// Fraction of dual-fiber Ritz values matched by the rescaled direct
    /// fiber within `ritz_tol`.
    pub ritz_matched_fraction: f64,
    pub ritz_tol: f64,
}

pub fn spectral_duality_probe(
    lambda: f64,
    theta: f64,
    n: i64,
    mode_cutoff: i64,
    energy_points: usize,
) -> Result<AubryProbe> {
    if lambda <= 0.0 {
        return Err(LabError::InvalidParameter("lambda must be positive".into()));
    }
    let dual_lambda = 4.0 / lambda;
    let a = presets::almost_mathieu(lambda, theta);
    let b = presets::almost_mathieu(dual_lambda, theta);
    let x0 = PointX::Torus(vec![0.0]);

    let r = 2.0 + lambda;
    let energies: Vec<f64> = (0..energy_points)
        .map(|i| -r + 2.0 * r * i as f64 / (energy_points - 1) as f64)
        .collect();
    let mapped: Vec<f64> = energies.iter().map(|e| 2.0 * e / lambda).collect();
    let curve_a = ids_shubin(&a, &x0, n, &energies)?;
    let curve_b = ids_shubin(&b, &x0, n, &mapped)?;
    let ids_sup_distance = curve_a
        .values
        .iter()
        .zip(&curve_b.values)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max);

    let that = 0.0;
    let dual_vals = eigen::eigenvalues(&fiber_dual(&a, &[that], mode_cutoff)?.matrix)?;
    let direct = fiber_x(&b, &PointX::Torus(vec![that]), mode_cutoff)?;
    let direct_vals: Vec<f64> =
        eigen::eigenvalues(&direct.matrix)?.iter().map(|v| v * lambda / 2.0).collect();
    let ritz_tol = 1e-3;
    let matched = dual_vals
        .iter()
        .filter(|&&v| {
            direct_vals
                .iter()
                .any(|&w| (v - w).abs() <= ritz_tol)
        })
        .count();
    Ok(AubryProbe {
        lambda,
        dual_lambda,
        ids_sup_distance,
        ritz_matched_fraction: matched as f64 / dual_vals.len() as f64,
        ritz_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::GOLDEN;
    use rand::SeedableRng;

    #[test]
    fn unit_is_a_fixed_point() {
        let sys = DynamicalSystem::torus(vec![GOLDEN]);
        let e = Kernel::unit(sys);
        let ehat = hat_transform(&e).unwrap();
        assert!(ehat.distance(&e) < 1e-15);
    }

    #[test]
    fn laplacian_hopping_becomes_potential() {
        // hat of the free Laplacian is 2 cos(2 pi that) at the group origin
        let lap = presets::laplacian(DynamicalSystem::torus(vec![GOLDEN]));
        let hat = hat_transform(&lap).unwrap();
        assert_eq!(hat.support().count(), 1);
        let f = hat.coeff(&[0]);
        let v = f.eval(&PointX::Torus(vec![0.2]));
        assert!((v.re - 2.0 * (TAU * 0.2).cos()).abs() < 1e-14);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn almost_mathieu_hat_is_aubry_partner() {
        // hat(Delta + lambda cos) = (lambda/2)(Delta + (4/lambda) cos)
        let lam = 2.5;
        let a = presets::almost_mathieu(lam, GOLDEN);
        let hat = hat_transform(&a).unwrap();
        let partner = presets::almost_mathieu(4.0 / lam, GOLDEN)
            .scale(Complex64::new(lam / 2.0, 0.0));
        assert!(hat.distance(&partner) < 1e-14, "{}", hat.distance(&partner));
    }

    #[test]
    fn trace_and_star_and_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let a = presets::random_kernel(&mut rng, GOLDEN, 3, 2);
            let rep = trace_duality_check(&a).unwrap();
            assert!(rep.deviation < 1e-12, "{}", rep.deviation);
            assert!(rep.star_deviation < 1e-12, "{}", rep.star_deviation);
            assert!(rep.roundtrip_deviation < 1e-12, "{}", rep.roundtrip_deviation);
        }
    }

    #[test]
    fn point_kernels_transform_to_symbols() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = presets::random_point_kernel(&mut rng, 4);
            let rep = trace_duality_check(&a).unwrap();
            assert!(rep.deviation < 1e-12);
            assert!(rep.roundtrip_deviation < 1e-12);
        }
    }

    #[test]
    fn plancherel_and_multiplicativity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let a = presets::random_kernel(&mut rng, GOLDEN, 2, 2);
            let b = presets::random_kernel(&mut rng, GOLDEN, 2, 2);
            let rep = plancherel_l2_check(&a, &b).unwrap();
            assert!(rep.isometry_deviation < 1e-12, "{}", rep.isometry_deviation);
            assert!(
                rep.multiplicativity_deviation < 1e-10,
                "{}",
                rep.multiplicativity_deviation
            );
        }
    }

    #[test]
    fn finite_quotient_rejected() {
        let p = presets::periodic(&[0.0, 1.0]);
        assert!(matches!(hat_transform(&p), Err(LabError::Unsupported { .. })));
    }

    #[test]
    fn self_dual_probe_small() {
        let probe = spectral_duality_probe(2.0, GOLDEN, 120, 40, 129).unwrap();
        assert!(probe.ids_sup_distance < 0.08, "{}", probe.ids_sup_distance);
        assert!(probe.ritz_matched_fraction >= 0.9, "{}", probe.ritz_matched_fraction);
    }

    #[test]
    fn dual_fiber_is_rescaled_direct_fiber() {
        // the matrices themselves agree entrywise, not just the spectra
        let lam = 3.0;
        let a = presets::almost_mathieu(lam, GOLDEN);
        let b = presets::almost_mathieu(4.0 / lam, GOLDEN);
        let that = 0.37;
        let m = 15;
        let dual = fiber_dual(&a, &[that], m).unwrap();
        let direct = fiber_x(&b, &PointX::Torus(vec![that]), m).unwrap();
        let scaled = direct.matrix.scale(lam / 2.0);
        let dev = (&dual.matrix - &scaled).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-13, "{dev}");
    }
}
