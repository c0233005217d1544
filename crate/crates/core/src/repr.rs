//! Fiber representations: `pi_x(a)` as a truncated banded matrix on
//! `l^2(box)` and the dual fibers `pi^that(a)` on a Fourier-mode cutoff of
//! `L^2(X)` (a finite matrix outright when `X` is finite), plus the
//! covariance relation `T_t pi_{alpha_t(x)}(a) T_t* = pi_x(a)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::Kernel;
use crate::coeff::Coeff;
use crate::dynsys::{BoxBasis, PointX, SpaceSpec};
use crate::error::{LabError, Result};

const TAU: f64 = std::f64::consts::TAU;

/// Index set a fiber matrix lives on.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberBasis {
    /// Lattice sites `{-n..n}^d` of `Z^d`.
    Box(BoxBasis),
    /// Fourier modes `{-m..m}^d` of `L^2(T^d)`.
    Modes(BoxBasis),
    /// The points of a finite quotient, in linearized order.
    Points { periods: Vec<i64> },
}

impl FiberBasis {
    pub fn len(&self) -> usize {
        match self {
            FiberBasis::Box(b) | FiberBasis::Modes(b) => b.len(),
            FiberBasis::Points { periods } => periods.iter().product::<i64>() as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Which fiber of the direct integral the matrix represents.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberLabel {
    /// `x in X` for `pi_x`.
    Space(PointX),
    /// `that in Ghat = T^d` for `pi^that`.
    Dual(Vec<f64>),
}

/// A truncated fiber operator as a dense matrix.
#[derive(Debug, Clone)]
pub struct FiberOperator {
    pub matrix: DMatrix<Complex64>,
    pub basis: FiberBasis,
    pub label: FiberLabel,
    /// Total `|amplitude|` pushed beyond a mode cutoff (dual fibers only).
    pub dropped_mass: f64,
}

impl FiberOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Max entrywise deviation from the conjugate transpose.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Diagonal of `F F^dagger`, i.e. the squared row norms.
    pub fn gram_diagonal(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.matrix.row(i).iter().map(|c| c.norm_sqr()).sum())
            .collect()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn trace_re(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }
}

/// `pi_x(a)` truncated to `box(n)`: `M[t][s] = a(t - s, alpha_t(x))`.
pub fn fiber_x(a: &Kernel, x: &PointX, n: i64) -> Result<FiberOperator> {
    let r = a.support_radius();
    if n < r {
        return Err(LabError::BoxTooSmall { radius: n, support: r });
    }
    let d = a.system().rank();
    let boxb = BoxBasis::new(d, n);
    let dim = boxb.len();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let support: Vec<_> = a.terms().map(|(t, c)| (t.clone(), c.clone())).collect();
    for (row, t) in boxb.sites().enumerate() {
        let xt = a.system().act(&t, x)?;
        for (u, coeff) in &support {
            let s: Vec<i64> = t.iter().zip(u).map(|(ti, ui)| ti - ui).collect();
            if let Some(col) = boxb.index(&s) {
                m[(row, col)] = coeff.eval(&xt);
            }
        }
    }
    Ok(FiberOperator {
        matrix: m,
        basis: FiberBasis::Box(boxb),
        label: FiberLabel::Space(x.clone()),
        dropped_mass: 0.0,
    })
}

/// `pi^that(a)`: `xi -> sum_s a(s,.) (xi o alpha_{-s}) e^{-2 pi i that.s}`.
///
/// On the torus this acts on the modes `{-m..m}^d`; amplitudes pushed
/// beyond the cutoff are dropped and accounted in `dropped_mass`. On a
/// finite quotient the matrix is exact in the point basis; on the point
/// space it is the 1x1 symbol value.
pub fn fiber_dual(a: &Kernel, t_hat: &[f64], mode_cutoff: i64) -> Result<FiberOperator> {
    let d = a.system().rank();
    if t_hat.len() != d {
        return Err(LabError::DimensionMismatch { expected: d, got: t_hat.len() });
    }
    let character = |s: &[i64]| -> Complex64 {
        // (that | -s) = e^{-2 pi i that.s}
        let dot: f64 = t_hat.iter().zip(s).map(|(&th, &si)| th * si as f64).sum();
        Complex64::from_polar(1.0, -TAU * dot)
    };
    match &a.system().space {
        SpaceSpec::Point => {
            let mut v = Complex64::ZERO;
            for (s, coeff) in a.terms() {
                v += coeff.eval(&PointX::Point) * character(s);
            }
            Ok(FiberOperator {
                matrix: DMatrix::from_element(1, 1, v),
                basis: FiberBasis::Points { periods: vec![1; d] },
                label: FiberLabel::Dual(t_hat.to_vec()),
                dropped_mass: 0.0,
            })
        }
        SpaceSpec::FiniteCyclic { periods } => {
            let dim: usize = periods.iter().product::<i64>() as usize;
            let grid = crate::dynsys::haar_grid(&a.system().space, 1);
            let mut m = DMatrix::<Complex64>::zeros(dim, dim);
            for (s, coeff) in a.terms() {
                let chi = character(s);
                for (row, node) in grid.nodes.iter().enumerate() {
                    let x = match node {
                        PointX::Cyclic(c) => c.clone(),
                        _ => unreachable!(),
                    };
                    // column is x - s (mod periods)
                    let y: Vec<i64> = x
                        .iter()
                        .zip(s)
                        .zip(periods)
                        .map(|((&xi, &si), &p)| (xi - si).rem_euclid(p))
                        .collect();
                    let col = grid
                        .nodes
                        .iter()
                        .position(|n| matches!(n, PointX::Cyclic(c) if *c == y))
                        .unwrap();
                    m[(row, col)] += coeff.eval(node) * chi;
                }
            }
            Ok(FiberOperator {
                matrix: m,
                basis: FiberBasis::Points { periods: periods.clone() },
                label: FiberLabel::Dual(t_hat.to_vec()),
                dropped_mass: 0.0,
            })
        }
        SpaceSpec::Torus { theta } => {
            let max_mode = a.max_mode();
            if mode_cutoff < max_mode {
                return Err(LabError::CutoffTooSmall { cutoff: mode_cutoff, support: max_mode });
            }
            let modes = BoxBasis::new(d, mode_cutoff);
            let dim = modes.len();
            let mut m = DMatrix::<Complex64>::zeros(dim, dim);
            let mut dropped = 0.0f64;
            for (s, coeff) in a.terms() {
                let chi = character(s);
                let coeff_modes: Vec<(Vec<i64>, Complex64)> = match coeff {
                    Coeff::Torus(map) => map.iter().map(|(k, c)| (k.clone(), *c)).collect(),
                    _ => unreachable!(),
                };
                for (col, k) in modes.sites().enumerate() {
                    // xi o alpha_{-s} multiplies mode k by e^{-2 pi i k.(s theta)}
                    let dot: f64 = k
                        .iter()
                        .zip(s)
                        .zip(theta)
                        .map(|((&ki, &si), &th)| ki as f64 * si as f64 * th)
                        .sum();
                    let rot = Complex64::from_polar(1.0, -TAU * dot);
                    for (mk, c) in &coeff_modes {
                        let target: Vec<i64> = k.iter().zip(mk).map(|(a, b)| a + b).collect();
                        match modes.index(&target) {
                            Some(row) => m[(row, col)] += c * rot * chi,
                            None => dropped += c.norm(),
                        }
                    }
                }
            }
            Ok(FiberOperator {
                matrix: m,
                basis: FiberBasis::Modes(modes),
                label: FiberLabel::Dual(t_hat.to_vec()),
                dropped_mass: dropped,
            })
        }
    }
}

/// Covariance check (both sides of `T_t pi_{alpha_t(x)}(a) T_t* = pi_x(a)`
/// on `box(n)`, compared on the interior `box(n - |t|)`); returns the max
/// entry deviation.
pub fn covariance_check(a: &Kernel, x: &PointX, t: &[i64], n: i64) -> Result<f64> {
    let r = a.support_radius();
    let t_norm = t.iter().map(|c| c.abs()).max().unwrap_or(0);
    if n < r + t_norm {
        return Err(LabError::BoxTooSmall { radius: n, support: r + t_norm });
    }
    let d = a.system().rank();
    let xt = a.system().act(t, x)?;
    let left = fiber_x(a, &xt, n)?;
    let right = fiber_x(a, x, n)?;
    let boxb = BoxBasis::new(d, n);
    let interior = BoxBasis::new(d, n - t_norm);
    let mut dev: f64 = 0.0;
    for u in interior.sites() {
        let row = boxb.index(&u).unwrap();
        let u_shift: Vec<i64> = u.iter().zip(t).map(|(a, b)| a - b).collect();
        let row_l = boxb.index(&u_shift).unwrap();
        for v in interior.sites() {
            let col = boxb.index(&v).unwrap();
            let v_shift: Vec<i64> = v.iter().zip(t).map(|(a, b)| a - b).collect();
            let col_l = boxb.index(&v_shift).unwrap();
            // (T_t L T_t*)[u][v] = L[u - t][v - t]
            dev = dev.max((left.matrix[(row_l, col_l)] - right.matrix[(row, col)]).norm());
        }
    }
    Ok(dev)
}

/// Principal submatrix of a box fiber on the smaller `box(m)`.
pub fn restrict(f: &FiberOperator, m: i64) -> Result<FiberOperator> {
    let parent = match &f.basis {
        FiberBasis::Box(b) => *b,
        _ => {
            return Err(LabError::Unsupported {
                required: "box basis".into(),
                got: format!("{:?}", f.basis),
            })
        }
    };
    if m > parent.radius {
        return Err(LabError::BoxTooSmall { radius: parent.radius, support: m });
    }
    let sub = BoxBasis::new(parent.dim, m);
    let dim = sub.len();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, si) in sub.sites().enumerate() {
        let pi = parent.index(&si).unwrap();
        for (j, sj) in sub.sites().enumerate() {
            let pj = parent.index(&sj).unwrap();
            out[(i, j)] = f.matrix[(pi, pj)];
        }
    }
    Ok(FiberOperator {
        matrix: out,
        basis: FiberBasis::Box(sub),
        label: f.label.clone(),
        dropped_mass: f.dropped_mass,
    })
}
