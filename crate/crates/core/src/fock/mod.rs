//! Truncated number-basis engine.
//!
//! Matrices are `D x D` blocks of infinite-dimensional operators. Operators
//! built from ordered products (displacement via Laguerre functions, squeeze,
//! `K(sigma)`, `Pi(s)`) are exact on the block; only vectors leaving the
//! block lose information, and those losses are guarded.

mod kets;
mod operators;
mod phase;
mod reconstruct;

pub use kets::*;
pub use operators::*;
pub use phase::*;
pub use reconstruct::*;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{Axis, PhaseGrid};

/// State vector in the truncated number basis.
pub type Ket = DVector<C64>;

/// Complex-plane lattice `alpha = x + i y`.
pub type AlphaGrid = PhaseGrid;

/// Inclusive lattice `[re_min, re_max] x [im_min, im_max]`; an axis of one
/// point needs `min == max`.
pub fn alpha_grid(re: (f64, f64, usize), im: (f64, f64, usize)) -> Result<AlphaGrid> {
    let axis = |(lo, hi, n): (f64, f64, usize)| {
        if n == 1 && lo == hi {
            Ok(Axis::new(lo, 1.0, 1))
        } else {
            Axis::inclusive(lo, hi, n)
        }
    };
    PhaseGrid::alpha(axis(re)?, axis(im)?)
}

/// Largest norm a displaced state may lose to the cutoff.
pub const LEAKAGE_TOL: f64 = 1e-6;

/// `ln k!` for `k < len`.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(len.max(1));
    t.push(0.0);
    for k in 1..len {
        t.push(t[k - 1] + (k as f64).ln());
    }
    t
}

/// A `D x D` block of an operator in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    mat: DMatrix<C64>,
}

impl FockOperator {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if !mat.is_square() || mat.nrows() < 2 {
            return Err(Error::Config(format!(
                "operator must be square with dim >= 2, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Validation("operator has non-finite entries".into()));
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix(mat: DMatrix<C64>) -> Self {
        Self { mat }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.mat[(n, m)]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_matrix(self.mat.adjoint())
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &FockOperator) -> Self {
        Self::from_matrix(&self.mat * &other.mat)
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn apply(&self, ket: &Ket) -> Ket {
        &self.mat * ket
    }

    /// Max-norm distance on the leading `block x block` corner.
    pub fn block_max_diff(&self, other: &FockOperator, block: usize) -> f64 {
        let b = block.min(self.dim()).min(other.dim());
        let mut d: f64 = 0.0;
        for n in 0..b {
            for m in 0..b {
                d = d.max((self.mat[(n, m)] - other.mat[(n, m)]).norm());
            }
        }
        d
    }
}

/// Hermitian, unit-trace, positive block.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: FockOperator,
}

impl DensityMatrix {
    pub fn new(op: FockOperator) -> Result<Self> {
        let m = op.matrix();
        let herm = (m - m.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if herm > 1e-10 {
            return Err(Error::Validation(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = m.trace();
        if (tr - 1.0).norm() > 1e-10 {
            return Err(Error::Validation(format!("density matrix trace is {tr}")));
        }
        let rho = Self { op };
        let min = rho.min_eigenvalue();
        if min < -1e-8 {
            return Err(Error::Validation(format!("density matrix eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// Skips validation; used for reconstructed matrices whose positivity is
    /// only reported.
    pub fn unchecked(op: FockOperator) -> Self {
        Self { op }
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(ket: &Ket) -> Result<Self> {
        let norm = ket.norm();
        if !(norm > 0.0) {
            return Err(Error::Config("zero state vector".into()));
        }
        let v = ket / C64::new(norm, 0.0);
        // positive by construction; the eigen solver is not needed here and
        // misbehaves on the subnormal tails of large blocks
        Ok(Self {
            op: FockOperator::new(&v * v.adjoint())?,
        })
    }

    /// `sum_k w_k |psi_k><psi_k|` with normalized kets and weights summing to one.
    pub fn mixture(parts: &[(f64, Ket)]) -> Result<Self> {
        let dim = parts
            .first()
            .map(|p| p.1.len())
            .ok_or_else(|| Error::Config("empty mixture".into()))?;
        let mut m = DMatrix::zeros(dim, dim);
        for (w, k) in parts {
            let v = k / C64::new(k.norm(), 0.0);
            m += (&v * v.adjoint()) * C64::new(*w, 0.0);
        }
        Self::new(FockOperator::new(m)?)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &FockOperator {
        &self.op
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.op.matrix()
    }

    fn eigen(&self) -> SymmetricEigen<C64, nalgebra::Dyn> {
        let m = self.op.matrix();
        SymmetricEigen::new((m + m.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Pure-state decomposition `(weight, ket)`, dropping weights below 1e-14.
    pub fn ensemble(&self) -> Vec<(f64, Ket)> {
        let e = self.eigen();
        e.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &w)| w.abs() > 1e-14)
            .map(|(k, &w)| (w, e.eigenvectors.column(k).into_owned()))
            .collect()
    }

    /// `<psi|rho|psi>` for a normalized ket.
    pub fn fidelity_pure(&self, ket: &Ket) -> f64 {
        let v = ket / C64::new(ket.norm(), 0.0);
        (v.adjoint() * self.op.matrix() * &v)[(0, 0)].re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_is_valid() {
        let k = Ket::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)]);
        let rho = DensityMatrix::pure(&k).unwrap();
        assert!((rho.fidelity_pure(&k) - 1.0).abs() < 1e-14);
        assert!(rho.min_eigenvalue() > -1e-14);
        assert_eq!(rho.ensemble().len(), 1);
    }

    #[test]
    fn rejects_invalid_density() {
        let mut m = DMatrix::<C64>::identity(3, 3);
        assert!(DensityMatrix::new(FockOperator::new(m.clone()).unwrap()).is_err());
        m[(0, 0)] = C64::new(1.5, 0.0);
        m[(1, 1)] = C64::new(-0.5, 0.0);
        m[(2, 2)] = C64::new(0.0, 0.0);
        assert!(DensityMatrix::new(FockOperator::new(m).unwrap()).is_err());
        assert!(FockOperator::new(DMatrix::zeros(1, 1)).is_err());
    }
}
