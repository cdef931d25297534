use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::kets::displaced_v;
use super::operators::guard_displacement;
use super::{DensityMatrix, FockOperator};
use crate::error::{Error, Result};
use crate::grid::{PhaseField, Plane};
use crate::parallel;

/// Output of [`reconstruct`]: the post-processed matrix plus the raw
/// quadrature result it came from.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// `(rho + rho^dagger)/2`, trace-normalized. Positivity is not enforced.
    pub density: DensityMatrix,
    pub raw: FockOperator,
    pub raw_trace: C64,
    pub min_eigenvalue: f64,
}

/// Boundary-to-peak ratio above which a warning is logged.
pub const RECONSTRUCTION_EDGE_WARN: f64 = 1e-6;
/// Boundary-to-peak ratio above which the field is rejected.
pub const RECONSTRUCTION_EDGE_FAIL: f64 = 1e-2;

fn check_field(field: &PhaseField) -> Result<()> {
    if !field.kind.is_kirkwood_rihaczek() {
        return Err(Error::Domain(format!(
            "reconstruction needs a K-R field, got {}",
            field.kind
        )));
    }
    let (n, m) = (field.grid.n(), field.grid.m());
    let peak = field.max_abs();
    let mut edge: f64 = 0.0;
    for i in 0..n {
        for j in 0..m {
            if i == 0 || j == 0 || i == n - 1 || j == m - 1 {
                edge = edge.max(field.get(i, j).norm());
            }
        }
    }
    if !(peak > 0.0) || edge > RECONSTRUCTION_EDGE_FAIL * peak {
        return Err(Error::Truncation(format!(
            "K-R field does not vanish on the grid boundary (edge/peak = {:e})",
            edge / peak
        )));
    }
    if edge > RECONSTRUCTION_EDGE_WARN * peak {
        log::warn!("K-R field edge/peak ratio {:e} exceeds {RECONSTRUCTION_EDGE_WARN:e}", edge / peak);
    }
    Ok(())
}

/// `(alpha, K(alpha) d^2 alpha)` for every sample; `(q, p)` fields are mapped
/// through `alpha = (q + i p)/sqrt(2 hbar)`, which preserves `K dq dp`.
fn weighted_points(field: &PhaseField) -> Vec<(C64, C64)> {
    let g = &field.grid;
    let scale = match g.plane {
        Plane::Alpha => 1.0,
        Plane::PositionMomentum => 1.0 / (2.0 * g.hbar).sqrt(),
    };
    let da = g.cell_area();
    let mut out = Vec::with_capacity(g.n() * g.m());
    for i in 0..g.n() {
        for j in 0..g.m() {
            let a = C64::new(g.q.at(i), g.p.at(j)) * scale;
            out.push((a, field.get(i, j) * da));
        }
    }
    out
}

fn quadrature(field: &PhaseField, dim: usize, conjugate: bool) -> Result<DMatrix<C64>> {
    if dim < 2 {
        return Err(Error::Config("dim must be >= 2".into()));
    }
    check_field(field)?;
    let pts = weighted_points(field);
    let chunk = 64;
    let parts = parallel::map_indices(pts.len().div_ceil(chunk), |c| {
        let mut acc = DMatrix::<C64>::zeros(dim, dim);
        for &(a, w) in &pts[c * chunk..((c + 1) * chunk).min(pts.len())] {
            let x = displaced_v(a, false, dim);
            let y = displaced_v(a, true, dim);
            if conjugate {
                // K(alpha,-1) = conj K(alpha,1) against |D v+><D v-|
                acc += (&y * x.adjoint()) * w.conj();
            } else {
                // K(alpha,1) against |D v-><D v+|
                acc += (&x * y.adjoint()) * w;
            }
        }
        acc
    });
    let mut rho = DMatrix::zeros(dim, dim);
    for p in parts {
        rho += p;
    }
    Ok(rho * C64::new(SQRT_2, 0.0))
}

fn finish(raw: DMatrix<C64>) -> Result<Reconstruction> {
    let raw_trace = raw.trace();
    if raw_trace.re.abs() < 1e-12 {
        return Err(Error::Validation("reconstructed trace vanishes".into()));
    }
    let herm = (&raw + raw.adjoint()) * C64::new(0.5 / raw_trace.re, 0.0);
    let density = DensityMatrix::unchecked(FockOperator::new(herm)?);
    let min_eigenvalue = density.min_eigenvalue();
    Ok(Reconstruction {
        density,
        raw: FockOperator::new(raw)?,
        raw_trace,
        min_eigenvalue,
    })
}

/// Density matrix from K-R samples,
/// `rho = sqrt(2) sum K(alpha, 1) [D(alpha) K(1) D^dagger(alpha)]^dagger d^2 alpha`.
pub fn reconstruct(field: &PhaseField, dim: usize) -> Result<Reconstruction> {
    finish(quadrature(field, dim, false)?)
}

/// The equivalent form `rho = sqrt(2) sum K(alpha, -1) D(alpha) K(1) D^dagger(alpha) d^2 alpha`,
/// with `K(alpha, -1) = conj K(alpha, 1)`.
pub fn reconstruct_conjugate(field: &PhaseField, dim: usize) -> Result<Reconstruction> {
    finish(quadrature(field, dim, true)?)
}

/// `Tr[K^dagger(alpha,1) K(beta,1)]` in the truncated basis, where
/// `K(alpha,1) = D(alpha) K(1) D^dagger(alpha)`.
pub fn kr_basis_overlap(alpha: C64, beta: C64, dim: usize) -> Result<C64> {
    guard_displacement(alpha, dim)?;
    guard_displacement(beta, dim)?;
    let a1 = displaced_v(alpha, false, dim);
    let a2 = displaced_v(alpha, true, dim);
    let b1 = displaced_v(beta, true, dim);
    let b2 = displaced_v(beta, false, dim);
    Ok(a2.dotc(&b1) * b2.dotc(&a1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{alpha_grid, coherent_ket, generalized_kr};
    use crate::grid::DistKind;
    use crate::states::CoherentParams;

    fn input(a0: C64) -> (DensityMatrix, PhaseField) {
        let rho = DensityMatrix::pure(&coherent_ket(CoherentParams::new(a0).unwrap(), 96).unwrap()).unwrap();
        let g = alpha_grid((-4.0, 4.0, 81), (-4.0, 4.0, 81)).unwrap();
        let k = generalized_kr(&rho, &g, 1.0).unwrap();
        (rho, k)
    }

    #[test]
    fn vacuum_round_trip() {
        let (_, k) = input(C64::new(0.0, 0.0));
        let r = reconstruct(&k, 32).unwrap();
        assert!(r.density.matrix()[(0, 0)].re > 0.999);
        assert!((r.density.operator().trace() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn conjugate_form_agrees() {
        let (_, k) = input(C64::new(0.5, -0.4));
        let a = reconstruct(&k, 24).unwrap();
        let b = reconstruct_conjugate(&k, 24).unwrap();
        assert!(a.density.operator().block_max_diff(b.density.operator(), 24) < 1e-4);
        assert!(a.raw.adjoint().block_max_diff(&b.raw, 24) < 1e-12);
    }

    #[test]
    fn rejects_wrong_kind_and_truncated_support() {
        let (rho, k) = input(C64::new(0.0, 0.0));
        let w = k.map(DistKind::Wigner, |v| v);
        assert!(matches!(reconstruct(&w, 16), Err(Error::Domain(_))));
        let small = alpha_grid((-1.5, 1.5, 11), (-1.5, 1.5, 11)).unwrap();
        let ks = generalized_kr(&rho, &small, 1.0).unwrap();
        assert!(matches!(reconstruct(&ks, 16), Err(Error::Truncation(_))));
    }

    #[test]
    fn overlap_is_hermitian_pairing() {
        let a = C64::new(0.3, -0.2);
        let b = C64::new(-0.5, 0.4);
        let ab = kr_basis_overlap(a, b, 32).unwrap();
        let ba = kr_basis_overlap(b, a, 32).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-10);
    }
}
