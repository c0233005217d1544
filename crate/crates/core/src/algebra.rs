//! The kernel algebra `C_c(G x X)`: convolution, involution, the
//! `L^2(G x X)` inner product and the `l^1` norm. Everything here is exact
//! mode/point arithmetic; no sampling error enters this layer.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coeff::Coeff;
use crate::dynsys::{DynamicalSystem, GroupElem, PointX};
use crate::error::{LabError, Result};

/// Per-coefficient tolerance for kernel equality checks.
pub const KERNEL_EQ_TOL: f64 = 1e-12;

/// An element `a` of `C_c(G x X)`: finitely many group sites `t`, each
/// carrying a coefficient function `a(t, .)` on `X`.
#[derive(Debug, Clone)]
pub struct Kernel {
    system: DynamicalSystem,
    coeffs: BTreeMap<GroupElem, Coeff>,
}

impl Kernel {
    pub fn zero(system: DynamicalSystem) -> Self {
        Kernel { system, coeffs: BTreeMap::new() }
    }

    /// The unit kernel `delta_0 (x) 1`.
    pub fn unit(system: DynamicalSystem) -> Self {
        let mut k = Kernel::zero(system);
        let one = Coeff::constant(&k.system.space, Complex64::ONE);
        k.set(vec![0; k.system.rank()], one);
        k
    }

    pub fn system(&self) -> &DynamicalSystem {
        &self.system
    }

    pub fn set(&mut self, t: GroupElem, coeff: Coeff) {
        assert_eq!(t.len(), self.system.rank());
        if coeff.is_negligible(0.0) {
            self.coeffs.remove(&t);
        } else {
            self.coeffs.insert(t, coeff);
        }
    }

    pub fn add_term(&mut self, t: GroupElem, coeff: Coeff) {
        let existing = self.coeff(&t);
        self.set(t, existing.add(&coeff));
    }

    /// `a(t, .)`; the zero coefficient when `t` is outside the support.
    pub fn coeff(&self, t: &[i64]) -> Coeff {
        self.coeffs
            .get(t)
            .cloned()
            .unwrap_or_else(|| Coeff::zero(&self.system.space))
    }

    /// `a(t, x)`.
    pub fn eval(&self, t: &[i64], x: &PointX) -> Complex64 {
        match self.coeffs.get(t) {
            Some(c) => c.eval(x),
            None => Complex64::ZERO,
        }
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElem> {
        self.coeffs.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElem, &Coeff)> {
        self.coeffs.iter()
    }

    /// `max |t|_infty` over the support.
    pub fn support_radius(&self) -> i64 {
        self.coeffs
            .keys()
            .flat_map(|t| t.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Largest coefficient mode index (torus coefficients; 0 otherwise).
    pub fn max_mode(&self) -> i64 {
        self.coeffs.values().map(|c| c.max_mode()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: Complex64) -> Kernel {
        Kernel {
            system: self.system.clone(),
            coeffs: self.coeffs.iter().map(|(t, f)| (t.clone(), f.scale(c))).collect(),
        }
    }

    pub fn add(&self, other: &Kernel) -> Result<Kernel> {
        if self.system != other.system {
            return Err(LabError::SystemMismatch);
        }
        let mut out = self.clone();
        for (t, f) in &other.coeffs {
            out.add_term(t.clone(), f.clone());
        }
        Ok(out)
    }

    /// Convolution `(a * b)(t, x) = sum_s a(s, x) b(t - s, alpha_{-s}(x))`.
    pub fn convolve(&self, other: &Kernel) -> Result<Kernel> {
        if self.system != other.system {
            return Err(LabError::SystemMismatch);
        }
        let space = &self.system.space;
        let mut out = Kernel::zero(self.system.clone());
        for (s, fs) in &self.coeffs {
            let neg_s: GroupElem = s.iter().map(|c| -c).collect();
            for (u, gu) in &other.coeffs {
                let t: GroupElem = s.iter().zip(u).map(|(a, b)| a + b).collect();
                let shifted = gu.composed_with_action(&neg_s, space);
                out.add_term(t, fs.mul(&shifted));
            }
        }
        Ok(out)
    }

    /// Involution `a*(t, x) = conj(a(-t, alpha_{-t}(x)))`.
    pub fn involve(&self) -> Kernel {
        let space = &self.system.space;
        let mut out = Kernel::zero(self.system.clone());
        for (t, f) in &self.coeffs {
            let neg_t: GroupElem = t.iter().map(|c| -c).collect();
            let g = f.composed_with_action(t, space).conj();
            out.set(neg_t, g);
        }
        out
    }

    /// `<a|b> = sum_t \int_X conj(a(t,x)) b(t,x) dm`, exact.
    pub fn inner(&self, other: &Kernel) -> Result<Complex64> {
        if self.system != other.system {
            return Err(LabError::SystemMismatch);
        }
        let mut acc = Complex64::ZERO;
        for (t, f) in &self.coeffs {
            if let Some(g) = other.coeffs.get(t) {
                acc += f.inner(g);
            }
        }
        Ok(acc)
    }

    /// `||a||_1 = sum_t sup_x |a(t, x)|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.sup_norm()).sum()
    }

    /// Maximum coefficientwise deviation from `other`.
    pub fn distance(&self, other: &Kernel) -> f64 {
        let mut d: f64 = 0.0;
        let zero = Coeff::zero(&self.system.space);
        for t in self.coeffs.keys().chain(other.coeffs.keys()) {
            let a = self.coeffs.get(t).unwrap_or(&zero);
            let b = other.coeffs.get(t).unwrap_or(&zero);
            d = d.max(a.distance(b));
        }
        d
    }

    /// Selfadjointness flag: `involve(a) = a` coefficientwise within tol.
    pub fn is_selfadjoint(&self) -> bool {
        self.distance(&self.involve()) <= KERNEL_EQ_TOL
    }
}
