//! Eigen-decomposition of fibers, the integrated density of states,
//! Shubin eigenvalue counting, Bloch bands for periodic quotients and
//! spectrum/support cross-checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Kernel;
use crate::dynsys::{BoxBasis, PointX, QuadratureGrid, SpaceSpec};
use crate::eigen;
use crate::error::{LabError, Result};
use crate::repr::{fiber_dual, fiber_x, restrict, FiberLabel, FiberOperator};
use crate::trace::zone_grid;

/// Sorted spectrum with weights of one truncated fiber.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub weights: Vec<f64>,
    pub provenance: String,
}

impl SpectralData {
    /// Weighted count of eigenvalues `<= energy`.
    pub fn fraction_below(&self, energy: f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .filter(|(&ev, _)| ev <= energy)
            .map(|(_, &w)| w)
            .sum()
    }
}

/// Full spectrum of a Hermitian fiber, uniform weights `1/dim`.
pub fn eigensolve(f: &FiberOperator) -> Result<SpectralData> {
    let vals = eigen::eigenvalues(&f.matrix)?;
    let dim = vals.len();
    let label = match &f.label {
        FiberLabel::Space(x) => format!("pi_x fiber at {x:?}, dim {dim}"),
        FiberLabel::Dual(t) => format!("dual fiber at {t:?}, dim {dim}"),
    };
    Ok(SpectralData {
        eigenvalues: vals,
        weights: vec![1.0 / dim as f64; dim],
        provenance: label,
    })
}

/// How an IDS curve was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdsMethod {
    ShubinCounting,
    DualFiber,
    BandIntegration,
}

/// A nondecreasing eigenvalue-counting curve in `[0, 1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdsCurve {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub method: IdsMethod,
}

impl IdsCurve {
    pub fn sup_distance(&self, other: &IdsCurve) -> f64 {
        assert_eq!(self.energies.len(), other.energies.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Uniform energy grid spanning `[-||a||_1, ||a||_1]` (the l1 norm bounds
/// the spectral radius of every fiber).
pub fn energy_grid(a: &Kernel, points: usize) -> Vec<f64> {
    assert!(points >= 2);
    let r = a.l1_norm();
    (0..points)
        .map(|i| -r + 2.0 * r * i as f64 / (points - 1) as f64)
        .collect()
}

fn counting_curve(sorted: &[f64], energies: &[f64], method: IdsMethod) -> IdsCurve {
    let n = sorted.len() as f64;
    let values = energies
        .iter()
        .map(|&e| sorted.partition_point(|&ev| ev <= e) as f64 / n)
        .collect();
    IdsCurve { energies: energies.to_vec(), values, method }
}

fn require_selfadjoint(a: &Kernel) -> Result<()> {
    if !a.is_selfadjoint() {
        return Err(LabError::NotSelfadjoint { dev: a.distance(&a.involve()) });
    }
    Ok(())
}

/// IDS by Shubin counting: eigenvalues of the Dirichlet restriction
/// `B_x|_{box(n)}` divided by the box size.
pub fn ids_shubin(a: &Kernel, x: &PointX, n: i64, energies: &[f64]) -> Result<IdsCurve> {
    require_selfadjoint(a)?;
    let f = fiber_x(a, x, n)?;
    let vals = eigen::eigenvalues(&f.matrix)?;
    Ok(counting_curve(&vals, energies, IdsMethod::ShubinCounting))
}

/// IDS computed fiberwise on the dual side; exact-dimension fibers, so it
/// applies to the point space and finite quotients only.
pub fn ids_dual(a: &Kernel, t_hat_grid: &QuadratureGrid, energies: &[f64]) -> Result<IdsCurve> {
    require_selfadjoint(a)?;
    if matches!(a.system().space, SpaceSpec::Torus { .. }) {
        return Err(LabError::Unsupported {
            required: "point or finite configuration space (use ids_shubin on the torus)".into(),
            got: "torus".into(),
        });
    }
    let per_node: Result<Vec<(f64, Vec<f64>)>> = t_hat_grid
        .nodes
        .par_iter()
        .zip(t_hat_grid.weights.par_iter())
        .map(|(node, &w)| {
            let t_hat = match node {
                PointX::Torus(v) => v.clone(),
                _ => return Err(LabError::InvalidParameter("dual grid must be a torus grid".into())),
            };
            let f = fiber_dual(a, &t_hat, 0)?;
            Ok((w, eigen::eigenvalues(&f.matrix)?))
        })
        .collect();
    let per_node = per_node?;
    let values: Vec<f64> = energies
        .iter()
        .map(|&e| {
            per_node
                .iter()
                .map(|(w, vals)| {
                    w * vals.partition_point(|&ev| ev <= e) as f64 / vals.len() as f64
                })
                .sum()
        })
        .collect();
    Ok(IdsCurve { energies: energies.to_vec(), values, method: IdsMethod::DualFiber })
}

/// Bloch bands of a periodic kernel over the Brillouin zone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandStructure {
    /// Zone nodes (coordinates in the fundamental domain of `Ghat/H-perp`).
    pub zone_nodes: Vec<Vec<f64>>,
    /// Sorted fiber eigenvalues per node.
    pub bands: Vec<Vec<f64>>,
}

impl BandStructure {
    pub fn band_count(&self) -> usize {
        self.bands.first().map(|b| b.len()).unwrap_or(0)
    }

    /// Largest node-to-node jump of any band function (continuity modulus
    /// estimate on the grid).
    pub fn max_jump(&self) -> f64 {
        let mut jump: f64 = 0.0;
        for w in self.bands.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                jump = jump.max((a - b).abs());
            }
        }
        jump
    }

    /// Range `[min, max]` of each band over the zone.
    pub fn band_intervals(&self) -> Vec<(f64, f64)> {
        let p = self.band_count();
        (0..p)
            .map(|j| {
                let lo = self.bands.iter().map(|b| b[j]).fold(f64::INFINITY, f64::min);
                let hi = self.bands.iter().map(|b| b[j]).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            })
            .collect()
    }

    /// Band intervals merged into a disjoint union; adjacent intervals are
    /// glued unless separated by more than `2 * max_jump()` (avoids false
    /// gaps from zone discretization).
    pub fn band_union(&self) -> Vec<(f64, f64)> {
        let mut ints = self.band_intervals();
        ints.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let threshold = 2.0 * self.max_jump();
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in ints {
            match out.last_mut() {
                Some(last) if lo <= last.1 + threshold => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        out
    }
}

/// Assembles and diagonalizes the Bloch fibers over a zone grid.
pub fn bands(a: &Kernel, zone_resolution: usize) -> Result<BandStructure> {
    require_selfadjoint(a)?;
    let periods = match &a.system().space {
        SpaceSpec::FiniteCyclic { periods } => periods.clone(),
        other => return Err(LabError::NotFinite { got: format!("{other:?}") }),
    };
    let grid = zone_grid(&periods, zone_resolution);
    let results: Result<Vec<(Vec<f64>, Vec<f64>)>> = grid
        .nodes
        .par_iter()
        .map(|node| {
            let t_hat = match node {
                PointX::Torus(v) => v.clone(),
                _ => unreachable!(),
            };
            let f = fiber_dual(a, &t_hat, 0)?;
            Ok((t_hat, eigen::eigenvalues(&f.matrix)?))
        })
        .collect();
    let results = results?;
    let (zone_nodes, bands) = results.into_iter().unzip();
    Ok(BandStructure { zone_nodes, bands })
}

/// IDS by Bloch band integration over the zone (periodic systems).
pub fn ids_bands(a: &Kernel, zone_resolution: usize, energies: &[f64]) -> Result<IdsCurve> {
    let bs = bands(a, zone_resolution)?;
    let nodes = bs.bands.len() as f64;
    let p = bs.band_count() as f64;
    let values = energies
        .iter()
        .map(|&e| {
            bs.bands
                .iter()
                .map(|vals| vals.iter().filter(|&&ev| ev <= e).count() as f64 / p)
                .sum::<f64>()
                / nodes
        })
        .collect();
    Ok(IdsCurve { energies: energies.to_vec(), values, method: IdsMethod::BandIntegration })
}

/// Comparison of box spectra against the Bloch band union.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportReport {
    pub band_union: Vec<(f64, f64)>,
    /// Per tested x: (max distance of a box eigenvalue to the band union,
    /// number of eigenvalues falling inside a gap).
    pub per_x: Vec<(f64, usize)>,
    pub max_distance: f64,
    pub edge_states: usize,
}

fn distance_to_union(v: f64, union: &[(f64, f64)]) -> f64 {
    union
        .iter()
        .map(|&(lo, hi)| {
            if v < lo {
                lo - v
            } else if v > hi {
                v - hi
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Checks that box spectra lie in (and fill) the band union; eigenvalues in
/// gaps are reported as edge states, never asserted absent.
pub fn spectral_measure_support_check(
    a: &Kernel,
    n: i64,
    zone_resolution: usize,
) -> Result<SupportReport> {
    require_selfadjoint(a)?;
    let bs = bands(a, zone_resolution)?;
    let union = bs.band_union();
    let grid = crate::dynsys::haar_grid(&a.system().space, 1);
    let mut per_x = Vec::new();
    let mut max_distance: f64 = 0.0;
    let mut edge_states = 0usize;
    for x in &grid.nodes {
        let f = fiber_x(a, x, n)?;
        let vals = eigen::eigenvalues(&f.matrix)?;
        let mut worst: f64 = 0.0;
        let mut in_gap = 0usize;
        for &v in &vals {
            let d = distance_to_union(v, &union);
            worst = worst.max(d);
            if d > 0.0 {
                in_gap += 1;
            }
        }
        max_distance = max_distance.max(worst);
        edge_states += in_gap;
        per_x.push((worst, in_gap));
    }
    Ok(SupportReport { band_union: union, per_x, max_distance, edge_states })
}

/// Restricted vs projected eigenvalue counts for an energy interval
/// `(lo, hi]`, both normalized by the box size. Observational: the open
/// question is whether the difference vanishes in the limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionComparison {
    pub count_restricted: f64,
    pub count_projected: f64,
    pub difference: f64,
}

pub fn shubin_projection_comparison(
    a: &Kernel,
    x: &PointX,
    interval: (f64, f64),
    n: i64,
    pad: i64,
) -> Result<ProjectionComparison> {
    require_selfadjoint(a)?;
    let (lo, hi) = interval;
    let d = a.system().rank();
    let in_interval = |v: f64| v > lo && v <= hi;
    let boxn = BoxBasis::new(d, n);
    let norm = boxn.len() as f64;

    let big = fiber_x(a, x, n + pad)?;
    let small = restrict(&big, n)?;
    let restricted_vals = eigen::eigenvalues(&small.matrix)?;
    let count_restricted =
        restricted_vals.iter().filter(|&&v| in_interval(v)).count() as f64 / norm;

    // chi_I(B) assembled from the padded box decomposition, traced over box(n)
    let (vals, vecs) = eigen::eigen_full(&big.matrix)?;
    let bigbox = BoxBasis::new(d, n + pad);
    let mut projected = 0.0;
    for site in boxn.sites() {
        let row = bigbox.index(&site).expect("inside padded box");
        for (j, &ev) in vals.iter().enumerate() {
            if in_interval(ev) {
                projected += vecs[(row, j)].norm_sqr();
            }
        }
    }
    let count_projected = projected / norm;
    Ok(ProjectionComparison {
        count_restricted,
        count_projected,
        difference: count_projected - count_restricted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{dual_grid, DynamicalSystem};
    use crate::presets::{self, GOLDEN};

    fn laplacian_ids_exact(e: f64) -> f64 {
        if e <= -2.0 {
            0.0
        } else if e >= 2.0 {
            1.0
        } else {
            1.0 - (e / 2.0).acos() / std::f64::consts::PI
        }
    }

    #[test]
    fn eigensolve_identity_and_symbol() {
        let unit = presets::unit(DynamicalSystem::torus(vec![GOLDEN]));
        let f = fiber_x(&unit, &PointX::Torus(vec![0.5]), 2).unwrap();
        let sd = eigensolve(&f).unwrap();
        assert!(sd.eigenvalues.iter().all(|v| (v - 1.0).abs() < 1e-13));
        let lap = presets::laplacian(DynamicalSystem::point(1));
        let th = 0.11;
        let fd = fiber_dual(&lap, &[th], 0).unwrap();
        let sd = eigensolve(&fd).unwrap();
        assert!((sd.eigenvalues[0] - 2.0 * (std::f64::consts::TAU * th).cos()).abs() < 1e-13);
    }

    #[test]
    fn laplacian_box_spectrum_formula() {
        let lap = presets::laplacian(DynamicalSystem::point(1));
        let n = 10i64;
        let f = fiber_x(&lap, &PointX::Point, n).unwrap();
        let sd = eigensolve(&f).unwrap();
        let nn = (2 * n + 1) as usize;
        for (k, v) in (1..=nn).zip(&sd.eigenvalues) {
            let expected =
                2.0 * (std::f64::consts::PI * (nn + 1 - k) as f64 / (nn as f64 + 1.0)).cos();
            assert!((v - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn ids_shubin_laplacian_midpoint() {
        let lap = presets::laplacian(DynamicalSystem::point(1));
        let n = 100i64;
        let curve = ids_shubin(&lap, &PointX::Point, n, &[0.0, 2.0, 3.0]).unwrap();
        assert!((curve.values[0] - 0.5).abs() <= 1.0 / (2.0 * n as f64 + 1.0));
        assert_eq!(curve.values[1], 1.0);
        assert_eq!(curve.values[2], 1.0);
        assert!(curve.is_nondecreasing());
    }

    #[test]
    fn ids_dual_laplacian_matches_arcsine_law() {
        let lap = presets::laplacian(DynamicalSystem::point(1));
        let grid = dual_grid(1, 4096);
        let energies: Vec<f64> = (0..101).map(|i| -2.0 + 0.04 * i as f64).collect();
        let curve = ids_dual(&lap, &grid, &energies).unwrap();
        for (e, v) in energies.iter().zip(&curve.values) {
            assert!((v - laplacian_ids_exact(*e)).abs() < 2e-3, "E = {e}");
        }
    }

    #[test]
    fn ids_dual_rejects_torus() {
        let am = presets::almost_mathieu(2.0, GOLDEN);
        let grid = dual_grid(1, 8);
        assert!(ids_dual(&am, &grid, &[0.0]).is_err());
    }

    #[test]
    fn ids_shubin_rejects_non_selfadjoint() {
        let mut a = presets::laplacian(DynamicalSystem::point(1));
        a.set(vec![1], crate::coeff::Coeff::Point(num_complex::Complex64::new(0.0, 1.0)));
        assert!(ids_shubin(&a, &PointX::Point, 5, &[0.0]).is_err());
    }

    #[test]
    fn free_band_folding() {
        // period-2, V = 0: two bands +-|1 + e^{4 pi i that}| refold the free band
        let p2 = presets::periodic(&[0.0, 0.0]);
        let bs = bands(&p2, 64).unwrap();
        assert_eq!(bs.band_count(), 2);
        for (node, vals) in bs.zone_nodes.iter().zip(&bs.bands) {
            let magnitude = 2.0 * (std::f64::consts::TAU * node[0]).cos().abs();
            assert!((vals[0] + magnitude).abs() < 1e-10);
            assert!((vals[1] - magnitude).abs() < 1e-10);
        }
    }

    #[test]
    fn unit_bands_constant() {
        let unit = presets::unit(DynamicalSystem::finite_cyclic(vec![3]));
        let bs = bands(&unit, 16).unwrap();
        for vals in &bs.bands {
            assert!(vals.iter().all(|v| (v - 1.0).abs() < 1e-13));
        }
    }

    #[test]
    fn period_two_gap_and_flat_ids() {
        let v = 1.0f64;
        let p2 = presets::periodic(&[0.0, v]);
        let bs = bands(&p2, 256).unwrap();
        let union = bs.band_union();
        assert_eq!(union.len(), 2, "union {union:?}");
        // band edges of [[V/2 +- sqrt(V^2/4 + |1+e^{-2 i k}|^2)]] at k = 0, pi/2
        let edge_inner_low = v / 2.0 - (v * v / 4.0).sqrt(); // k = pi/2: 0
        let edge_inner_high = v / 2.0 + (v * v / 4.0).sqrt(); // = V
        assert!((union[0].1 - edge_inner_low).abs() < 1e-6, "{union:?}");
        assert!((union[1].0 - edge_inner_high).abs() < 1e-6, "{union:?}");
        // IDS flat at 1/2 across the gap
        let mid = v / 2.0;
        let curve = ids_bands(&p2, 256, &[mid]).unwrap();
        assert_eq!(curve.values[0], 0.5);
    }

    #[test]
    fn support_check_free_laplacian() {
        let p1 = presets::periodic(&[0.0]);
        let rep = spectral_measure_support_check(&p1, 60, 256).unwrap();
        assert_eq!(rep.band_union.len(), 1);
        assert!((rep.band_union[0].0 + 2.0).abs() < 1e-3);
        assert!((rep.band_union[0].1 - 2.0).abs() < 1e-3);
        // Dirichlet spectrum lies strictly inside [-2, 2]
        assert_eq!(rep.edge_states, 0);
        assert!(rep.max_distance == 0.0);
    }

    #[test]
    fn support_check_unit_kernel() {
        let unit = presets::unit(DynamicalSystem::finite_cyclic(vec![2]));
        let rep = spectral_measure_support_check(&unit, 10, 32).unwrap();
        assert!(rep.max_distance < 1e-12);
    }

    #[test]
    fn projection_comparison_unit() {
        let unit = presets::unit(DynamicalSystem::finite_cyclic(vec![2]));
        let x = PointX::Cyclic(vec![0]);
        let pc = shubin_projection_comparison(&unit, &x, (0.5, 1.5), 6, 4).unwrap();
        assert!((pc.count_restricted - 1.0).abs() < 1e-12);
        assert!((pc.count_projected - 1.0).abs() < 1e-10);
    }

    #[test]
    fn projection_comparison_laplacian_half() {
        let lap = presets::laplacian(DynamicalSystem::point(1));
        let pc = shubin_projection_comparison(
            &lap,
            &PointX::Point,
            (f64::NEG_INFINITY, 0.0),
            60,
            8,
        )
        .unwrap();
        assert!((pc.count_restricted - 0.5).abs() < 0.01);
        assert!((pc.count_projected - 0.5).abs() < 0.02);
        assert!(pc.difference.abs() < 0.02);
    }

    #[test]
    fn eigensolver_sanity_identities() {
        let am = presets::almost_mathieu(2.0, GOLDEN);
        let f = fiber_x(&am, &PointX::Torus(vec![0.2]), 30).unwrap();
        let vals = eigen::eigenvalues(&f.matrix).unwrap();
        assert!(eigen::sanity_residual(&f.matrix, &vals) < 1e-8 * vals.len() as f64);
    }
}
