//! Coefficient functions on `X`: trigonometric polynomials on the torus,
//! finite vectors on cyclic quotients, scalars on the point. All algebra
//! (products, rotations, Haar integrals) is exact mode/point arithmetic.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dynsys::{PointX, SpaceSpec};

const TAU: f64 = std::f64::consts::TAU;

/// A finitely supported function on `X`.
#[derive(Debug, Clone, PartialEq)]
pub enum Coeff {
    /// Scalar value (X = point).
    Point(Complex64),
    /// Trigonometric polynomial `x -> sum_k c_k e^{2 pi i k.x}`, keyed by mode.
    Torus(BTreeMap<Vec<i64>, Complex64>),
    /// Values at the points of the finite quotient, linearized per-axis.
    Cyclic { periods: Vec<i64>, values: Vec<Complex64> },
}

fn cyclic_index(periods: &[i64], coords: &[i64]) -> usize {
    let mut idx = 0usize;
    for (&c, &p) in coords.iter().zip(periods).rev() {
        idx = idx * p as usize + c.rem_euclid(p) as usize;
    }
    idx
}

fn cyclic_coords(periods: &[i64], mut idx: usize) -> Vec<i64> {
    let mut coords = Vec::with_capacity(periods.len());
    for &p in periods {
        coords.push((idx % p as usize) as i64);
        idx /= p as usize;
    }
    coords
}

impl Coeff {
    pub fn zero(space: &SpaceSpec) -> Self {
        match space {
            SpaceSpec::Point => Coeff::Point(Complex64::ZERO),
            SpaceSpec::Torus { .. } => Coeff::Torus(BTreeMap::new()),
            SpaceSpec::FiniteCyclic { periods } => {
                let n: i64 = periods.iter().product();
                Coeff::Cyclic { periods: periods.clone(), values: vec![Complex64::ZERO; n as usize] }
            }
        }
    }

    pub fn constant(space: &SpaceSpec, c: Complex64) -> Self {
        match space {
            SpaceSpec::Point => Coeff::Point(c),
            SpaceSpec::Torus { theta } => {
                let mut m = BTreeMap::new();
                if c != Complex64::ZERO {
                    m.insert(vec![0; theta.len()], c);
                }
                Coeff::Torus(m)
            }
            SpaceSpec::FiniteCyclic { periods } => {
                let n: i64 = periods.iter().product();
                Coeff::Cyclic { periods: periods.clone(), values: vec![c; n as usize] }
            }
        }
    }

    /// Single torus mode `c e^{2 pi i k.x}`.
    pub fn torus_mode(k: Vec<i64>, c: Complex64) -> Self {
        let mut m = BTreeMap::new();
        if c != Complex64::ZERO {
            m.insert(k, c);
        }
        Coeff::Torus(m)
    }

    pub fn cyclic_values(periods: Vec<i64>, values: Vec<Complex64>) -> Self {
        let n: i64 = periods.iter().product();
        assert_eq!(values.len(), n as usize);
        Coeff::Cyclic { periods, values }
    }

    pub fn eval(&self, x: &PointX) -> Complex64 {
        match (self, x) {
            (Coeff::Point(c), PointX::Point) => *c,
            (Coeff::Torus(modes), PointX::Torus(v)) => modes
                .iter()
                .map(|(k, c)| {
                    let phase: f64 = k.iter().zip(v).map(|(&ki, &xi)| ki as f64 * xi).sum();
                    c * Complex64::from_polar(1.0, TAU * phase)
                })
                .sum(),
            (Coeff::Cyclic { periods, values }, PointX::Cyclic(coords)) => {
                values[cyclic_index(periods, coords)]
            }
            _ => panic!("coefficient evaluated at a point of the wrong space"),
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Point(a), Coeff::Point(b)) => Coeff::Point(a + b),
            (Coeff::Torus(a), Coeff::Torus(b)) => {
                let mut out = a.clone();
                for (k, c) in b {
                    *out.entry(k.clone()).or_insert(Complex64::ZERO) += c;
                }
                Coeff::Torus(out)
            }
            (
                Coeff::Cyclic { periods, values },
                Coeff::Cyclic { periods: p2, values: v2 },
            ) => {
                assert_eq!(periods, p2);
                Coeff::Cyclic {
                    periods: periods.clone(),
                    values: values.iter().zip(v2).map(|(a, b)| a + b).collect(),
                }
            }
            _ => panic!("coefficient variants differ"),
        }
    }

    pub fn scale(&self, c: Complex64) -> Coeff {
        match self {
            Coeff::Point(a) => Coeff::Point(a * c),
            Coeff::Torus(m) => {
                Coeff::Torus(m.iter().map(|(k, v)| (k.clone(), v * c)).collect())
            }
            Coeff::Cyclic { periods, values } => Coeff::Cyclic {
                periods: periods.clone(),
                values: values.iter().map(|v| v * c).collect(),
            },
        }
    }

    /// Pointwise product; on the torus this is mode convolution, so the
    /// mode support grows additively (never truncated).
    pub fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Point(a), Coeff::Point(b)) => Coeff::Point(a * b),
            (Coeff::Torus(a), Coeff::Torus(b)) => {
                let mut out: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
                for (ka, ca) in a {
                    for (kb, cb) in b {
                        let k: Vec<i64> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                        *out.entry(k).or_insert(Complex64::ZERO) += ca * cb;
                    }
                }
                Coeff::Torus(out)
            }
            (
                Coeff::Cyclic { periods, values },
                Coeff::Cyclic { periods: p2, values: v2 },
            ) => {
                assert_eq!(periods, p2);
                Coeff::Cyclic {
                    periods: periods.clone(),
                    values: values.iter().zip(v2).map(|(a, b)| a * b).collect(),
                }
            }
            _ => panic!("coefficient variants differ"),
        }
    }

    /// `x -> f(alpha_t(x))`: an exact phase on torus modes, a cyclic shift
    /// of the value vector, the identity on the point.
    pub fn composed_with_action(&self, t: &[i64], space: &SpaceSpec) -> Coeff {
        match (self, space) {
            (Coeff::Point(c), SpaceSpec::Point) => Coeff::Point(*c),
            (Coeff::Torus(modes), SpaceSpec::Torus { theta }) => {
                let shift: Vec<f64> = t.iter().zip(theta).map(|(&ti, &th)| ti as f64 * th).collect();
                Coeff::Torus(
                    modes
                        .iter()
                        .map(|(k, c)| {
                            let phase: f64 =
                                k.iter().zip(&shift).map(|(&ki, &si)| ki as f64 * si).sum();
                            (k.clone(), c * Complex64::from_polar(1.0, TAU * phase))
                        })
                        .collect(),
                )
            }
            (Coeff::Cyclic { periods, values }, SpaceSpec::FiniteCyclic { .. }) => {
                let n = values.len();
                let mut out = vec![Complex64::ZERO; n];
                for (idx, slot) in out.iter_mut().enumerate() {
                    let coords = cyclic_coords(periods, idx);
                    let shifted: Vec<i64> =
                        coords.iter().zip(t).map(|(&c, &ti)| c + ti).collect();
                    *slot = values[cyclic_index(periods, &shifted)];
                }
                Coeff::Cyclic { periods: periods.clone(), values: out }
            }
            _ => panic!("coefficient does not match space"),
        }
    }

    pub fn conj(&self) -> Coeff {
        match self {
            Coeff::Point(c) => Coeff::Point(c.conj()),
            Coeff::Torus(modes) => Coeff::Torus(
                modes
                    .iter()
                    .map(|(k, c)| (k.iter().map(|ki| -ki).collect(), c.conj()))
                    .collect(),
            ),
            Coeff::Cyclic { periods, values } => Coeff::Cyclic {
                periods: periods.clone(),
                values: values.iter().map(|v| v.conj()).collect(),
            },
        }
    }

    /// `\int_X f dm` for the normalized Haar measure: the 0-mode on the
    /// torus, the mean on a finite quotient.
    pub fn integral(&self) -> Complex64 {
        match self {
            Coeff::Point(c) => *c,
            Coeff::Torus(modes) => {
                modes.iter().find(|(k, _)| k.iter().all(|&ki| ki == 0)).map(|(_, c)| *c).unwrap_or(Complex64::ZERO)
            }
            Coeff::Cyclic { values, .. } => {
                values.iter().sum::<Complex64>() / values.len() as f64
            }
        }
    }

    /// `\int_X conj(f) g dm`, exact via mode orthonormality.
    pub fn inner(&self, other: &Coeff) -> Complex64 {
        match (self, other) {
            (Coeff::Torus(a), Coeff::Torus(b)) => a
                .iter()
                .filter_map(|(k, ca)| b.get(k).map(|cb| ca.conj() * cb))
                .sum(),
            _ => self.conj().mul(other).integral(),
        }
    }

    /// Largest mode index in sup-norm (torus only; 0 otherwise).
    pub fn max_mode(&self) -> i64 {
        match self {
            Coeff::Torus(modes) => modes
                .keys()
                .flat_map(|k| k.iter().map(|ki| ki.abs()))
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// Supremum of `|f|`; on the torus estimated on a dense uniform grid
    /// with resolution at least 32x the maximum mode.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Coeff::Point(c) => c.norm(),
            Coeff::Cyclic { values, .. } => {
                values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
            Coeff::Torus(modes) => {
                if modes.is_empty() {
                    return 0.0;
                }
                let dim = modes.keys().next().unwrap().len();
                let res = (32 * self.max_mode().max(1)) as usize;
                let mut sup: f64 = 0.0;
                let total = res.pow(dim as u32);
                for idx in 0..total {
                    let mut rem = idx;
                    let mut x = Vec::with_capacity(dim);
                    for _ in 0..dim {
                        x.push((rem % res) as f64 / res as f64);
                        rem /= res;
                    }
                    sup = sup.max(self.eval(&PointX::Torus(x)).norm());
                }
                sup
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Coeff::Point(c) => c.norm(),
            Coeff::Torus(modes) => modes.values().map(|c| c.norm()).fold(0.0, f64::max),
            Coeff::Cyclic { values, .. } => {
                values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// Maximum coefficientwise deviation from `other`.
    pub fn distance(&self, other: &Coeff) -> f64 {
        match (self, other) {
            (Coeff::Torus(a), Coeff::Torus(b)) => {
                let mut d: f64 = 0.0;
                for k in a.keys().chain(b.keys()) {
                    let ca = a.get(k).copied().unwrap_or(Complex64::ZERO);
                    let cb = b.get(k).copied().unwrap_or(Complex64::ZERO);
                    d = d.max((ca - cb).norm());
                }
                d
            }
            _ => {
                let diff = self.add(&other.scale(Complex64::new(-1.0, 0.0)));
                diff.max_abs()
            }
        }
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn torus_mode_eval() {
        let f = Coeff::torus_mode(vec![1], c(1.0, 0.0));
        let v = f.eval(&PointX::Torus(vec![0.25]));
        assert!((v - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn product_is_mode_convolution() {
        let f = Coeff::torus_mode(vec![1], c(2.0, 0.0));
        let g = Coeff::torus_mode(vec![-1], c(0.5, 0.0));
        let h = f.mul(&g);
        assert!((h.integral() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_is_exact_phase() {
        let space = SpaceSpec::torus(vec![0.25]);
        let f = Coeff::torus_mode(vec![1], c(1.0, 0.0));
        let g = f.composed_with_action(&[1], &space);
        let x = PointX::Torus(vec![0.1]);
        let expected = f.eval(&PointX::Torus(vec![0.35]));
        assert!((g.eval(&x) - expected).norm() < 1e-15);
    }

    #[test]
    fn cyclic_shift() {
        let f = Coeff::cyclic_values(vec![3], vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let space = SpaceSpec::finite_cyclic(vec![3]);
        let g = f.composed_with_action(&[1], &space);
        assert!((g.eval(&PointX::Cyclic(vec![0])) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((g.eval(&PointX::Cyclic(vec![2])) - c(0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cos_sup_norm() {
        // 2 cos(2 pi x) = e^{2 pi i x} + e^{-2 pi i x}
        let mut m = BTreeMap::new();
        m.insert(vec![1], c(1.0, 0.0));
        m.insert(vec![-1], c(1.0, 0.0));
        let f = Coeff::Torus(m);
        assert!((f.sup_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inner_mode_orthonormality() {
        let f = Coeff::torus_mode(vec![2], c(3.0, 0.0));
        let g = Coeff::torus_mode(vec![2], c(0.0, 1.0));
        assert!((f.inner(&g) - c(0.0, 3.0)).norm() < 1e-15);
        let h = Coeff::torus_mode(vec![1], c(5.0, 0.0));
        assert!(f.inner(&h).norm() < 1e-15);
    }
}
