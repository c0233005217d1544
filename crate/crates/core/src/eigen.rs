//! Hermitian eigensolvers. Banded fibers with bandwidth 1 take a fast
//! symmetric-tridiagonal QL path (implicit shifts); everything else goes
//! through a dense decomposition. Eigenvalues are always returned sorted
//! ascending.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Hermiticity tolerance for fiber matrices entering an eigensolve.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// All eigenvalues of the real symmetric tridiagonal matrix with the given
/// diagonal and subdiagonal (QL with implicit shifts).
pub fn tridiag_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Vec<f64> {
    let n = d.len();
    assert!(n == 0 || e.len() == n - 1);
    if n == 0 {
        return d;
    }
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal QL did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d
}

fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()).scale(0.5)
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Bandwidth-1 structure: (diagonal, |subdiagonal|), if the matrix is
/// Hermitian tridiagonal. A complex Hermitian tridiagonal matrix is
/// unitarily diagonally equivalent to the real one with `|e_i|` off the
/// diagonal, so this loses nothing for eigenvalues.
fn tridiagonal_parts(m: &DMatrix<Complex64>) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            if (j as i64 - i as i64).abs() > 1 && m[(i, j)].norm() > 0.0 {
                return None;
            }
        }
    }
    let d = (0..n).map(|i| m[(i, i)].re).collect();
    let e = (0..n.saturating_sub(1)).map(|i| m[(i, i + 1)].norm()).collect();
    Some((d, e))
}

fn is_real(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|c| c.im == 0.0)
}

/// All eigenvalues of a Hermitian matrix, sorted ascending.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(LabError::NotHermitian { dev });
    }
    let h = hermitize(m);
    if let Some((d, e)) = tridiagonal_parts(&h) {
        return Ok(tridiag_eigenvalues(d, e));
    }
    let mut vals = if is_real(&h) {
        let real = h.map(|c| c.re);
        SymmetricEigen::new(real).eigenvalues.iter().copied().collect::<Vec<f64>>()
    } else {
        SymmetricEigen::new(h).eigenvalues.iter().copied().collect::<Vec<f64>>()
    };
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

/// Full decomposition (eigenvalues ascending, matching eigenvector columns).
pub fn eigen_full(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(LabError::NotHermitian { dev });
    }
    let h = hermitize(m);
    let (vals, vecs) = if is_real(&h) {
        let real = h.map(|c| c.re);
        let se = SymmetricEigen::new(real);
        (
            se.eigenvalues.iter().copied().collect::<Vec<f64>>(),
            se.eigenvectors.map(|v| Complex64::new(v, 0.0)),
        )
    } else {
        let se = SymmetricEigen::new(h);
        (se.eigenvalues.iter().copied().collect::<Vec<f64>>(), se.eigenvectors)
    };
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let n = vecs.nrows();
    let mut sorted_vecs = DMatrix::<Complex64>::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        sorted_vecs.set_column(col, &vecs.column(i));
    }
    Ok((sorted_vals, sorted_vecs))
}

/// Eigensolver sanity: `sum lambda_i = tr` and `sum lambda_i^2 = ||.||_F^2`,
/// both within `tol_per_dim * dim`. Returns the worse residual.
pub fn sanity_residual(m: &DMatrix<Complex64>, vals: &[f64]) -> f64 {
    let tr: f64 = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
    let fro: f64 = m.iter().map(|c| c.norm_sqr()).sum();
    let s1: f64 = vals.iter().sum();
    let s2: f64 = vals.iter().map(|v| v * v).sum();
    (s1 - tr).abs().max((s2 - fro).abs())
}
