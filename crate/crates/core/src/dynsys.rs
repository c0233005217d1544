//! Dynamical systems `(G, alpha, X)` with `G = Z^d` acting by translation
//! on a point, a torus `T^d` (rotation vector) or a finite cyclic quotient,
//! together with quadrature grids realizing the normalized Haar measure.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// A group element of `G = Z^d`.
pub type GroupElem = Vec<i64>;

/// The acting group `Z^d`, optionally with the periodic sublattice
/// `H = p_1 Z x ... x p_d Z` recorded for the quotient construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub rank: usize,
    pub quotient_period: Option<Vec<i64>>,
}

impl GroupSpec {
    pub fn lattice(rank: usize) -> Self {
        assert!(rank >= 1, "rank must be >= 1");
        GroupSpec { rank, quotient_period: None }
    }

    pub fn with_quotient(rank: usize, periods: Vec<i64>) -> Self {
        assert!(rank >= 1 && periods.len() == rank);
        assert!(periods.iter().all(|&p| p >= 1), "period entries must be >= 1");
        GroupSpec { rank, quotient_period: Some(periods) }
    }
}

/// The configuration space `X` with its normalized Haar measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpaceSpec {
    /// One-point space; the crossed product degenerates to `C*(Z^d)`.
    Point,
    /// Torus `T^d` rotated by `theta` (entries taken mod 1).
    Torus { theta: Vec<f64> },
    /// Finite cyclic quotient `Z^d / (p_1 Z x ... x p_d Z)`.
    FiniteCyclic { periods: Vec<i64> },
}

impl SpaceSpec {
    pub fn torus(theta: Vec<f64>) -> Self {
        let theta = theta.into_iter().map(|t| t.rem_euclid(1.0)).collect();
        SpaceSpec::Torus { theta }
    }

    pub fn finite_cyclic(periods: Vec<i64>) -> Self {
        assert!(periods.iter().all(|&p| p >= 1), "periods must be >= 1");
        SpaceSpec::FiniteCyclic { periods }
    }

    /// Number of points when `X` is finite.
    pub fn cardinality(&self) -> Option<usize> {
        match self {
            SpaceSpec::Point => Some(1),
            SpaceSpec::Torus { .. } => None,
            SpaceSpec::FiniteCyclic { periods } => {
                Some(periods.iter().product::<i64>() as usize)
            }
        }
    }
}

/// A point of `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PointX {
    Point,
    Torus(Vec<f64>),
    Cyclic(Vec<i64>),
}

/// The triple `(Z^d, alpha, X)`; the action is `alpha_t(x) = x + j(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicalSystem {
    pub group: GroupSpec,
    pub space: SpaceSpec,
}

impl DynamicalSystem {
    pub fn new(group: GroupSpec, space: SpaceSpec) -> Self {
        if let SpaceSpec::Torus { theta } = &space {
            assert_eq!(theta.len(), group.rank);
        }
        if let SpaceSpec::FiniteCyclic { periods } = &space {
            assert_eq!(periods.len(), group.rank);
        }
        DynamicalSystem { group, space }
    }

    pub fn point(rank: usize) -> Self {
        DynamicalSystem::new(GroupSpec::lattice(rank), SpaceSpec::Point)
    }

    pub fn torus(theta: Vec<f64>) -> Self {
        let rank = theta.len();
        DynamicalSystem::new(GroupSpec::lattice(rank), SpaceSpec::torus(theta))
    }

    pub fn finite_cyclic(periods: Vec<i64>) -> Self {
        let rank = periods.len();
        DynamicalSystem::new(
            GroupSpec::with_quotient(rank, periods.clone()),
            SpaceSpec::finite_cyclic(periods),
        )
    }

    pub fn rank(&self) -> usize {
        self.group.rank
    }

    /// `alpha_t(x) = x + j(t)`: mod 1 on the torus, mod the periods on the
    /// finite quotient, identity on the point.
    pub fn act(&self, t: &[i64], x: &PointX) -> Result<PointX> {
        if t.len() != self.rank() {
            return Err(LabError::DimensionMismatch { expected: self.rank(), got: t.len() });
        }
        match (&self.space, x) {
            (SpaceSpec::Point, PointX::Point) => Ok(PointX::Point),
            (SpaceSpec::Torus { theta }, PointX::Torus(v)) => {
                if v.len() != theta.len() {
                    return Err(LabError::DimensionMismatch { expected: theta.len(), got: v.len() });
                }
                Ok(PointX::Torus(
                    v.iter()
                        .zip(theta)
                        .zip(t)
                        .map(|((&xi, &th), &ti)| (xi + ti as f64 * th).rem_euclid(1.0))
                        .collect(),
                ))
            }
            (SpaceSpec::FiniteCyclic { periods }, PointX::Cyclic(v)) => {
                if v.len() != periods.len() {
                    return Err(LabError::DimensionMismatch { expected: periods.len(), got: v.len() });
                }
                Ok(PointX::Cyclic(
                    v.iter()
                        .zip(periods)
                        .zip(t)
                        .map(|((&xi, &p), &ti)| (xi + ti).rem_euclid(p))
                        .collect(),
                ))
            }
            _ => Err(LabError::InvalidParameter("point does not match space".into())),
        }
    }
}

/// Nodes and weights realizing `\int_X . dm` (or `\int_Ghat . dthat`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub nodes: Vec<PointX>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(nodes: Vec<PointX>, weights: Vec<f64>) -> Self {
        assert_eq!(nodes.len(), weights.len());
        let total: f64 = weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "weights must sum to 1, got {total}");
        QuadratureGrid { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PointX, f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }
}

/// Uniform Haar quadrature over `X`. Exact for trigonometric polynomials
/// of degree below the grid resolution; exact outright on finite spaces.
pub fn haar_grid(space: &SpaceSpec, resolution: usize) -> QuadratureGrid {
    assert!(resolution >= 1);
    match space {
        SpaceSpec::Point => QuadratureGrid::new(vec![PointX::Point], vec![1.0]),
        SpaceSpec::Torus { theta } => {
            let d = theta.len();
            let n = resolution.pow(d as u32);
            let mut nodes = Vec::with_capacity(n);
            for idx in 0..n {
                let mut rem = idx;
                let mut coords = Vec::with_capacity(d);
                for _ in 0..d {
                    coords.push((rem % resolution) as f64 / resolution as f64);
                    rem /= resolution;
                }
                nodes.push(PointX::Torus(coords));
            }
            let w = 1.0 / n as f64;
            QuadratureGrid::new(nodes, vec![w; n])
        }
        SpaceSpec::FiniteCyclic { periods } => {
            let n: i64 = periods.iter().product();
            let mut nodes = Vec::with_capacity(n as usize);
            for idx in 0..n {
                let mut rem = idx;
                let mut coords = Vec::with_capacity(periods.len());
                for &p in periods {
                    coords.push(rem % p);
                    rem /= p;
                }
                nodes.push(PointX::Cyclic(coords));
            }
            let w = 1.0 / n as f64;
            QuadratureGrid::new(nodes, vec![w; n as usize])
        }
    }
}

/// Uniform grid on the dual torus `Ghat = T^d` (mass-1 Haar measure).
pub fn dual_grid(dim: usize, resolution: usize) -> QuadratureGrid {
    haar_grid(&SpaceSpec::Torus { theta: vec![0.0; dim] }, resolution)
}

/// The centered cube `{-n..n}^d` indexing truncated fibers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxBasis {
    pub dim: usize,
    pub radius: i64,
}

impl BoxBasis {
    pub fn new(dim: usize, radius: i64) -> Self {
        assert!(dim >= 1 && radius >= 0);
        BoxBasis { dim, radius }
    }

    /// `(2n+1)^d`
    pub fn len(&self) -> usize {
        (2 * self.radius + 1).pow(self.dim as u32) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn site(&self, index: usize) -> GroupElem {
        let side = (2 * self.radius + 1) as usize;
        let mut rem = index;
        let mut s = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            s.push((rem % side) as i64 - self.radius);
            rem /= side;
        }
        s
    }

    pub fn index(&self, site: &[i64]) -> Option<usize> {
        if site.len() != self.dim || site.iter().any(|&c| c.abs() > self.radius) {
            return None;
        }
        let side = (2 * self.radius + 1) as usize;
        let mut idx = 0usize;
        for &c in site.iter().rev() {
            idx = idx * side + (c + self.radius) as usize;
        }
        Some(idx)
    }

    pub fn sites(&self) -> impl Iterator<Item = GroupElem> + '_ {
        (0..self.len()).map(move |i| self.site(i))
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        site.len() == self.dim && site.iter().all(|&c| c.abs() <= self.radius)
    }
}

/// Centered cubes `H_n = {-n..n}^d`, `n = 1..n_max`, used as the averaging
/// (Folner) sequence for Birkhoff means and Shubin limits.
pub fn birkhoff_boxes(dim: usize, n_max: i64) -> Vec<BoxBasis> {
    assert!(n_max >= 1);
    (1..=n_max).map(|n| BoxBasis::new(dim, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    #[test]
    fn act_torus_rotation() {
        let sys = DynamicalSystem::torus(vec![GOLDEN]);
        let y = sys.act(&[1], &PointX::Torus(vec![0.25])).unwrap();
        match y {
            PointX::Torus(v) => assert!((v[0] - ((0.25 + GOLDEN) % 1.0)).abs() < 1e-15),
            _ => panic!(),
        }
    }

    #[test]
    fn act_identity_element() {
        let sys = DynamicalSystem::torus(vec![0.3]);
        let x = PointX::Torus(vec![0.77]);
        assert_eq!(sys.act(&[0], &x).unwrap(), x);
    }

    #[test]
    fn act_finite_cyclic_wraps() {
        let sys = DynamicalSystem::finite_cyclic(vec![2]);
        let y = sys.act(&[3], &PointX::Cyclic(vec![1])).unwrap();
        assert_eq!(y, PointX::Cyclic(vec![0]));
    }

    #[test]
    fn act_dimension_mismatch() {
        let sys = DynamicalSystem::torus(vec![0.3]);
        assert!(sys.act(&[1, 2], &PointX::Torus(vec![0.0])).is_err());
    }

    #[test]
    fn act_group_law() {
        let sys = DynamicalSystem::torus(vec![GOLDEN, 0.25]);
        let x = PointX::Torus(vec![0.1, 0.9]);
        for (s, t) in [([2, -1], [3, 5]), ([-4, 0], [1, 1])] {
            let lhs = sys.act(&s, &sys.act(&t, &x).unwrap()).unwrap();
            let st: Vec<i64> = s.iter().zip(&t).map(|(a, b)| a + b).collect();
            let rhs = sys.act(&st, &x).unwrap();
            match (lhs, rhs) {
                (PointX::Torus(a), PointX::Torus(b)) => {
                    for (ai, bi) in a.iter().zip(&b) {
                        let mut d = (ai - bi).abs();
                        d = d.min(1.0 - d);
                        assert!(d < 1e-12);
                    }
                }
                _ => panic!(),
            }
        }
    }

    #[test]
    fn haar_grid_point() {
        let g = haar_grid(&SpaceSpec::Point, 7);
        assert_eq!(g.len(), 1);
        assert_eq!(g.weights[0], 1.0);
    }

    #[test]
    fn haar_grid_finite_cyclic() {
        let g = haar_grid(&SpaceSpec::finite_cyclic(vec![2]), 99);
        assert_eq!(g.len(), 2);
        assert!(g.weights.iter().all(|&w| (w - 0.5).abs() < 1e-15));
    }

    #[test]
    fn haar_grid_torus_uniform() {
        let g = haar_grid(&SpaceSpec::torus(vec![0.1]), 4);
        let xs: Vec<f64> = g
            .nodes
            .iter()
            .map(|n| match n {
                PointX::Torus(v) => v[0],
                _ => panic!(),
            })
            .collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75]);
        assert!(g.weights.iter().all(|&w| (w - 0.25).abs() < 1e-15));
    }

    #[test]
    fn birkhoff_boxes_cardinality() {
        let boxes = birkhoff_boxes(1, 3);
        assert_eq!(boxes[0].len(), 3);
        assert_eq!(boxes[2].len(), 7);
        assert_eq!(birkhoff_boxes(2, 1)[0].len(), 9);
    }

    #[test]
    fn box_index_roundtrip() {
        let b = BoxBasis::new(2, 3);
        for i in 0..b.len() {
            assert_eq!(b.index(&b.site(i)), Some(i));
        }
        assert_eq!(b.index(&[4, 0]), None);
    }

    #[test]
    fn birkhoff_average_approaches_integral() {
        // degree-1 trig polynomial f(x) = cos(2 pi x) along the golden rotation
        let sys = DynamicalSystem::torus(vec![GOLDEN]);
        let f = |x: &PointX| match x {
            PointX::Torus(v) => (std::f64::consts::TAU * v[0]).cos(),
            _ => panic!(),
        };
        let x0 = PointX::Torus(vec![0.13]);
        let n_max = 200;
        let bx = BoxBasis::new(1, n_max);
        let mut sum = 0.0;
        for s in bx.sites() {
            sum += f(&sys.act(&s, &x0).unwrap());
        }
        let avg = sum / bx.len() as f64;
        // integral of cos over the torus is 0
        assert!(avg.abs() < 10.0 / n_max as f64, "avg = {avg}");
    }
}
