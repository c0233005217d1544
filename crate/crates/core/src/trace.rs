//! The trace functionals on the crossed product and their agreement:
//! the kernel-norm trace `tau(AA*) = <a|a>`, the averaged-fiber trace
//! `Lambda`, the dual trace `mu`, the discrete `delta_e` formula, and
//! Shubin's large-box limit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Kernel;
use crate::dynsys::{dual_grid, haar_grid, BoxBasis, PointX, QuadratureGrid, SpaceSpec};
use crate::error::{LabError, Result};
use crate::repr::{fiber_dual, fiber_x, FiberBasis};

/// A box-supported weight `g` with `sum_t g(t)^2 = 1`, entering
/// `Lambda(A) = \int_X tr(M_g A_x M_g) dm`.
#[derive(Debug, Clone)]
pub struct BoxWeight {
    pub basis: BoxBasis,
    pub values: Vec<f64>,
}

impl BoxWeight {
    pub fn new(basis: BoxBasis, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), basis.len());
        let norm_sq: f64 = values.iter().map(|v| v * v).sum();
        assert!((norm_sq - 1.0).abs() < 1e-12, "weight must be l2-normalized");
        BoxWeight { basis, values }
    }

    /// Uniform weight on `box(radius)^d`.
    pub fn uniform(dim: usize, radius: i64) -> Self {
        let basis = BoxBasis::new(dim, radius);
        let v = 1.0 / (basis.len() as f64).sqrt();
        BoxWeight { basis, values: vec![v; basis.len()] }
    }

    /// Point mass at the origin.
    pub fn delta(dim: usize) -> Self {
        BoxWeight { basis: BoxBasis::new(dim, 0), values: vec![1.0] }
    }
}

/// `tau(A A*) = <a|a>`, exact mode arithmetic.
pub fn tau_kernel(a: &Kernel) -> f64 {
    let v = a.inner(a).expect("same kernel");
    debug_assert!(v.im.abs() < 1e-12);
    v.re
}

/// `Lambda(A* A)` with `A` the operator with kernel `a`, computed as
/// `\int_X sum_t g(t)^2 (A_x A_x^dagger)[t][t] dm` with fibers on `box(n)`.
pub fn lambda_fiber(
    a: &Kernel,
    g: &BoxWeight,
    grid: &QuadratureGrid,
    n: i64,
) -> Result<f64> {
    let r = a.support_radius();
    if g.basis.radius > n - r {
        return Err(LabError::WeightTooWide { weight: g.basis.radius, max: n - r });
    }
    let d = a.system().rank();
    let boxn = BoxBasis::new(d, n);
    let terms: Vec<f64> = grid
        .nodes
        .par_iter()
        .zip(grid.weights.par_iter())
        .map(|(x, &w)| {
            let f = fiber_x(a, x, n).expect("box large enough");
            let diag = f.gram_diagonal();
            let mut acc = 0.0;
            for (i, site) in g.basis.sites().enumerate() {
                let gi = g.values[i];
                if gi != 0.0 {
                    acc += gi * gi * diag[boxn.index(&site).expect("inside box")];
                }
            }
            w * acc
        })
        .collect();
    Ok(terms.iter().sum())
}

/// `mu(A A*) = \int_Ghat <(A A*)^that 1 | 1> dthat` by quadrature over the
/// dual grid with fibers at the given mode cutoff.
pub fn mu_dual(a: &Kernel, t_hat_grid: &QuadratureGrid, mode_cutoff: i64) -> Result<f64> {
    let d = a.system().rank();
    let terms: Result<Vec<f64>> = t_hat_grid
        .nodes
        .par_iter()
        .zip(t_hat_grid.weights.par_iter())
        .map(|(node, &w)| {
            let t_hat = match node {
                PointX::Torus(v) => v.clone(),
                _ => return Err(LabError::InvalidParameter("dual grid must be a torus grid".into())),
            };
            let f = fiber_dual(a, &t_hat, mode_cutoff)?;
            let val = match &f.basis {
                FiberBasis::Modes(modes) => {
                    // constant function = the 0 mode; <F F^dag 1|1> = ||row_0||^2
                    let i0 = modes.index(&vec![0; d]).expect("0 mode in cutoff");
                    f.matrix.row(i0).iter().map(|c| c.norm_sqr()).sum::<f64>()
                }
                FiberBasis::Points { periods } => {
                    // normalized counting measure: (1/|X|) sum_{x,y} (F F^dag)[x][y]
                    let p: i64 = periods.iter().product();
                    let b = &f.matrix * f.matrix.adjoint();
                    b.iter().map(|c| c.re).sum::<f64>() / p as f64
                }
                FiberBasis::Box(_) => unreachable!(),
            };
            Ok(w * val)
        })
        .collect();
    Ok(terms?.iter().sum())
}

/// Discrete-group formula `tau(A A*) = \int_X <A_x A_x^dagger delta_e | delta_e> dm`.
pub fn trace_delta_e(a: &Kernel, grid: &QuadratureGrid) -> f64 {
    let d = a.system().rank();
    let r = a.support_radius().max(1);
    let boxr = BoxBasis::new(d, r);
    let origin = boxr.index(&vec![0; d]).expect("origin");
    let terms: Vec<f64> = grid
        .nodes
        .par_iter()
        .zip(grid.weights.par_iter())
        .map(|(x, &w)| {
            let f = fiber_x(a, x, r).expect("box covers support");
            w * f.gram_diagonal()[origin]
        })
        .collect();
    terms.iter().sum()
}

/// One point of Shubin's trace formula sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShubinPoint {
    pub n: i64,
    pub box_size: usize,
    pub value: f64,
}

/// `(1/|H_n|) tr(chi_{H_n} A_x A_x^dagger chi_{H_n})` for growing centered
/// cubes; converges to `tau(A A*)` for generic `x`.
pub fn shubin_sequence(a: &Kernel, x: &PointX, ns: &[i64]) -> Result<Vec<ShubinPoint>> {
    let d = a.system().rank();
    let r = a.support_radius();
    ns.par_iter()
        .map(|&n| {
            let f = fiber_x(a, x, n + r)?;
            let big = BoxBasis::new(d, n + r);
            let inner = BoxBasis::new(d, n);
            let diag = f.gram_diagonal();
            let mut tr = 0.0;
            for site in inner.sites() {
                tr += diag[big.index(&site).expect("inside")];
            }
            Ok(ShubinPoint { n, box_size: inner.len(), value: tr / inner.len() as f64 })
        })
        .collect()
}

/// Brillouin-zone grid (fundamental domain of `Ghat / H-perp`) for a finite
/// quotient with the given periods: `resolution^d` nodes, normalized weights.
pub fn zone_grid(periods: &[i64], resolution: usize) -> QuadratureGrid {
    assert!(resolution >= 1);
    let d = periods.len();
    let total = resolution.pow(d as u32);
    let mut nodes = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut coords = Vec::with_capacity(d);
        for &p in periods {
            coords.push((rem % resolution) as f64 / (resolution as f64 * p as f64));
            rem /= resolution;
        }
        nodes.push(PointX::Torus(coords));
    }
    let w = 1.0 / total as f64;
    QuadratureGrid::new(nodes, vec![w; total])
}

/// Zone-integrated trace for periodic systems:
/// `tau(A A*) = \int_{zone} tr((A A*)^shat) / |X| dm(shat)`.
pub fn periodic_desintegration(a: &Kernel, zone_resolution: usize) -> Result<f64> {
    let periods = match &a.system().space {
        SpaceSpec::FiniteCyclic { periods } => periods.clone(),
        other => return Err(LabError::NotFinite { got: format!("{other:?}") }),
    };
    let card: i64 = periods.iter().product();
    let grid = zone_grid(&periods, zone_resolution);
    let terms: Result<Vec<f64>> = grid
        .nodes
        .par_iter()
        .zip(grid.weights.par_iter())
        .map(|(node, &w)| {
            let t_hat = match node {
                PointX::Torus(v) => v.clone(),
                _ => unreachable!(),
            };
            let f = fiber_dual(a, &t_hat, 0)?;
            // tr(F F^dagger) = squared Frobenius norm
            Ok(w * f.frobenius_sq() / card as f64)
        })
        .collect();
    Ok(terms?.iter().sum())
}

/// Resolutions used by a full trace report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceParams {
    pub x_resolution: usize,
    pub dual_resolution: usize,
    pub mode_cutoff: i64,
    pub box_radius: i64,
    pub weight_radius: i64,
    pub shubin_ns: Vec<i64>,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            x_resolution: 64,
            dual_resolution: 128,
            mode_cutoff: 12,
            box_radius: 16,
            weight_radius: 8,
            shubin_ns: vec![10, 20, 40, 80, 160, 320],
        }
    }
}

/// The four trace values for `A A*`, their metadata and agreement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceReport {
    pub tau_kernel: f64,
    pub lambda_fiber: f64,
    pub mu_dual: f64,
    pub delta_e: f64,
    pub shubin: Vec<ShubinPoint>,
    pub agreement: f64,
    pub lambda_tol: f64,
    pub mu_tol: f64,
    pub delta_tol: f64,
    pub lambda_ok: bool,
    pub mu_ok: bool,
    pub delta_ok: bool,
    pub params: TraceParams,
}

/// Computes all four functionals on `A A*` plus the Shubin sequence at
/// `x` = the first grid node (0 on the torus).
pub fn trace_report(a: &Kernel, params: &TraceParams, tolerance_scale: f64) -> Result<TraceReport> {
    let d = a.system().rank();
    let grid = haar_grid(&a.system().space, params.x_resolution);
    let t_hat_grid = dual_grid(d, params.dual_resolution);
    let tau = tau_kernel(a);
    let g = BoxWeight::uniform(d, params.weight_radius);
    let lambda = lambda_fiber(a, &g, &grid, params.box_radius)?;
    let mu = mu_dual(a, &t_hat_grid, params.mode_cutoff)?;
    let delta = trace_delta_e(a, &grid);
    let x0 = grid.nodes[0].clone();
    let shubin = shubin_sequence(a, &x0, &params.shubin_ns)?;
    let agreement = (tau - lambda)
        .abs()
        .max((tau - mu).abs())
        .max((tau - delta).abs());
    let (lt, mt, dt) = (1e-6 * tolerance_scale, 1e-5 * tolerance_scale, 1e-8 * tolerance_scale);
    Ok(TraceReport {
        tau_kernel: tau,
        lambda_fiber: lambda,
        mu_dual: mu,
        delta_e: delta,
        shubin,
        agreement,
        lambda_tol: lt,
        mu_tol: mt,
        delta_tol: dt,
        lambda_ok: (tau - lambda).abs() <= lt,
        mu_ok: (tau - mu).abs() <= mt,
        delta_ok: (tau - delta).abs() <= dt,
        params: params.clone(),
    })
}
