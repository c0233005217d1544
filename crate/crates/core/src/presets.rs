//! Named kernel presets and random-kernel generation for property suites.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::Kernel;
use crate::coeff::Coeff;
use crate::dynsys::DynamicalSystem;

/// Golden rotation number `(sqrt 5 - 1)/2`, the flagship Diophantine choice.
pub const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// `delta_0 (x) 1`.
pub fn unit(system: DynamicalSystem) -> Kernel {
    Kernel::unit(system)
}

/// Discrete Laplacian hopping kernel: `a(+-e_i) = 1`, no potential.
pub fn laplacian(system: DynamicalSystem) -> Kernel {
    let d = system.rank();
    let one = Coeff::constant(&system.space, Complex64::ONE);
    let mut k = Kernel::zero(system);
    for i in 0..d {
        for sign in [1i64, -1] {
            let mut t = vec![0i64; d];
            t[i] = sign;
            k.set(t, one.clone());
        }
    }
    k
}

/// Almost Mathieu kernel over the rotation `theta` on the circle:
/// `a(+-1) = 1`, `a(0, x) = lambda cos(2 pi x)`.
pub fn almost_mathieu(lambda: f64, theta: f64) -> Kernel {
    let system = DynamicalSystem::torus(vec![theta]);
    let half = Complex64::new(lambda / 2.0, 0.0);
    let mut cos = Coeff::torus_mode(vec![1], half);
    cos = cos.add(&Coeff::torus_mode(vec![-1], half));
    let mut k = laplacian(system);
    k.set(vec![0], cos);
    k
}

/// Periodic kernel on `Z / pZ`: Laplacian hopping plus the potential vector
/// `v` on the diagonal.
pub fn periodic(potential: &[f64]) -> Kernel {
    let p = potential.len() as i64;
    assert!(p >= 1);
    let system = DynamicalSystem::finite_cyclic(vec![p]);
    let values: Vec<Complex64> = potential.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut k = laplacian(system);
    k.set(vec![0], Coeff::cyclic_values(vec![p], values));
    k
}

/// Description of a preset for catalogs and documentation output.
pub struct PresetInfo {
    pub name: &'static str,
    pub definition: &'static str,
}

pub fn catalog() -> Vec<PresetInfo> {
    vec![
        PresetInfo { name: "unit", definition: "a(0,x) = 1 (delta_0 (x) 1)" },
        PresetInfo { name: "laplacian", definition: "a(+-1) = 1, a(0,x) = 0" },
        PresetInfo {
            name: "almost_mathieu",
            definition: "a(+-1) = 1, a(0,x) = lambda cos(2 pi x) on the theta-rotated circle",
        },
        PresetInfo {
            name: "periodic",
            definition: "a(+-1) = 1, a(0,x) = v_x on Z/pZ for a potential vector (v_0..v_{p-1})",
        },
    ]
}

/// Random kernel on the golden-rotation circle with support radius and
/// coefficient mode degree bounded by the given limits.
pub fn random_kernel<R: Rng>(
    rng: &mut R,
    theta: f64,
    support_radius: i64,
    mode_degree: i64,
) -> Kernel {
    let system = DynamicalSystem::torus(vec![theta]);
    let mut k = Kernel::zero(system.clone());
    for t in -support_radius..=support_radius {
        let mut coeff = Coeff::zero(&system.space);
        for m in -mode_degree..=mode_degree {
            if rng.gen_bool(0.5) {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                coeff = coeff.add(&Coeff::torus_mode(vec![m], c));
            }
        }
        if !coeff.is_negligible(0.0) {
            k.set(vec![t], coeff);
        }
    }
    k
}

/// Random constant-coefficient kernel on the point space.
pub fn random_point_kernel<R: Rng>(rng: &mut R, support_radius: i64) -> Kernel {
    let mut k = Kernel::zero(DynamicalSystem::point(1));
    for t in -support_radius..=support_radius {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        k.set(vec![t], Coeff::Point(c));
    }
    k
}
