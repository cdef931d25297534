use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::kets::displaced_squeezed_vacuum;
use super::operators::{displacement_block, guard_displacement, parity_ratio};
use super::{ln_factorials, AlphaGrid, DensityMatrix, Ket, LEAKAGE_TOL};
use crate::error::{Error, Result};
use crate::grid::{DistKind, PhaseField, Plane};
use crate::parallel;

fn check_alpha_grid(grid: &AlphaGrid) -> Result<()> {
    if grid.plane != Plane::Alpha {
        return Err(Error::Config("expected a grid over the alpha plane".into()));
    }
    Ok(())
}

/// `Tr[rho D(beta)] = sum_{nm} rho_mn <n|D(beta)|m>`.
pub(crate) fn displaced_trace(rho: &DMatrix<C64>, beta: C64) -> C64 {
    let d = displacement_block(beta, rho.nrows());
    rho.transpose().component_mul(&d).sum()
}

/// `C(beta, sigma) = exp(sigma (beta*^2 - beta^2)/4) Tr[rho D(beta)]`.
pub fn characteristic_sigma(rho: &DensityMatrix, beta: C64, sigma: f64) -> Result<C64> {
    guard_displacement(beta, rho.dim())?;
    let bc = beta.conj();
    let w = (sigma * (bc * bc - beta * beta) / 4.0).exp();
    Ok(w * displaced_trace(rho.matrix(), beta))
}

/// `<Psi| exp(i(p q' - p' q)/hbar) |Psi>` as `Tr[rho D(beta)]`, `beta = -(q' + i p')/sqrt(2 hbar)`.
pub fn ambiguity_expectation(rho: &DensityMatrix, q_lag: f64, p_lag: f64, hbar: f64) -> Result<C64> {
    let beta = -C64::new(q_lag, p_lag) / (2.0 * hbar).sqrt();
    guard_displacement(beta, rho.dim())?;
    Ok(displaced_trace(rho.matrix(), beta))
}

/// `sum_k w_k f(D(-alpha) psi_k)` over the eigen-ensemble of `rho`, guarding
/// the norm the displaced vectors lose to the cutoff.
fn displaced_expectations(
    rho: &DensityMatrix,
    grid: &AlphaGrid,
    f: impl Fn(&Ket) -> C64 + Sync + Send,
) -> Result<Vec<C64>> {
    check_alpha_grid(grid)?;
    let dim = rho.dim();
    let ens = rho.ensemble();
    let m = grid.m();
    let rows = parallel::map_indices(grid.n(), |i| -> Result<Vec<C64>> {
        let x = grid.q.at(i);
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let alpha = C64::new(x, grid.p.at(j));
            let d = displacement_block(-alpha, dim);
            let mut acc = C64::new(0.0, 0.0);
            for (w, psi) in &ens {
                let phi = &d * psi;
                let lost = psi.norm_squared() - phi.norm_squared();
                if lost > LEAKAGE_TOL {
                    return Err(Error::Truncation(format!(
                        "displacement to alpha = {alpha} pushes {lost:e} of the state past dim {dim}"
                    )));
                }
                acc += f(&phi) * *w;
            }
            row.push(acc);
        }
        Ok(row)
    });
    let mut out = Vec::with_capacity(grid.n() * m);
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

/// `exp(c a^2) phi` for real `c`: `sum_j c^j/j! sqrt((k+2j)!/k!) phi_{k+2j}`.
fn exp_annihilation_sq(c: f64, phi: &Ket, lf: &[f64]) -> Ket {
    let dim = phi.len();
    if c == 0.0 {
        return phi.clone();
    }
    let lc = c.abs().ln();
    Ket::from_fn(dim, |k, _| {
        let mut acc = phi[k];
        let mut j = 1;
        while k + 2 * j < dim {
            let mag = (j as f64 * lc - lf[j] + 0.5 * (lf[k + 2 * j] - lf[k])).exp();
            let sign = if c < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
            acc += phi[k + 2 * j] * (sign * mag);
            j += 1;
        }
        acc
    })
}

fn sigma_kind(sigma: f64) -> DistKind {
    if sigma == 0.0 {
        DistKind::Wigner
    } else if sigma == 1.0 {
        DistKind::KirkwoodRihaczek
    } else {
        DistKind::SigmaKr(sigma)
    }
}

/// `K(alpha, sigma) = 2/(pi sqrt(1+sigma^2)) Tr[rho D(alpha) K(sigma) D^dagger(alpha)]`.
pub fn generalized_kr(rho: &DensityMatrix, grid: &AlphaGrid, sigma: f64) -> Result<PhaseField> {
    if !sigma.is_finite() {
        return Err(Error::Config("sigma must be finite".into()));
    }
    let den = 1.0 + sigma * sigma;
    let (c, t) = (sigma / den, (sigma * sigma - 1.0) / den);
    let pref = 2.0 / (PI * den.sqrt());
    let lf = ln_factorials(rho.dim());
    let values = displaced_expectations(rho, grid, |phi| {
        // <phi| e^{c a^dagger^2} t^N e^{-c a^2} |phi> = (e^{c a^2} phi)^dagger t^N (e^{-c a^2} phi)
        let u = exp_annihilation_sq(c, phi, &lf);
        let w = exp_annihilation_sq(-c, phi, &lf);
        let mut acc = C64::new(0.0, 0.0);
        let mut tk = 1.0;
        for (x, y) in u.iter().zip(w.iter()) {
            acc += x.conj() * y * tk;
            tk *= t;
        }
        acc * pref
    })?;
    PhaseField::new(*grid, values, sigma_kind(sigma))
}

/// `W(alpha, s) = 2/(pi (1-s)) Tr[rho D(alpha) Pi(s) D^dagger(alpha)]`, `s < 1`.
pub fn s_ordered(rho: &DensityMatrix, grid: &AlphaGrid, s: f64) -> Result<PhaseField> {
    let r = parity_ratio(s)?;
    let c = 2.0 / (PI * (1.0 - s));
    let values = displaced_expectations(rho, grid, |phi| {
        let mut acc = 0.0;
        let mut w = 1.0;
        for v in phi.iter() {
            acc += w * v.norm_sqr();
            w *= r;
        }
        C64::new(acc * c, 0.0)
    })?;
    PhaseField::new(*grid, values, DistKind::SOrdered(s))
}

/// Quadrature settings of [`omega_transform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaOptions {
    /// Spacing of the square beta lattice.
    pub step: f64,
    /// Integrand magnitude below which the beta disk is cut.
    pub cutoff: f64,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        Self {
            step: 0.1,
            cutoff: 1e-10,
        }
    }
}

/// Radius beyond which `|Omega chi|` stays below the cutoff on 64 rays.
fn integration_radius(
    rho: &DMatrix<C64>,
    omega: &(dyn Fn(C64) -> C64 + Sync),
    opts: OmegaOptions,
) -> f64 {
    let r_max = 2.0 * (rho.nrows() as f64).sqrt() + 8.0;
    let steps = (r_max / opts.step).ceil() as usize;
    let radii = parallel::map_indices(64, |ray| {
        let dir = C64::from_polar(1.0, 2.0 * PI * ray as f64 / 64.0);
        let mut last = 0.0;
        for k in 0..=steps {
            let beta = dir * (k as f64 * opts.step);
            if (omega(beta) * displaced_trace(rho, beta)).norm() >= opts.cutoff {
                last = k as f64 * opts.step;
            }
        }
        last
    });
    radii.into_iter().fold(0.0, f64::max) + 2.0 * opts.step
}

/// Agarwal-Wolf transform
/// `W(alpha, Omega) = pi^-2 integral d^2 beta exp(alpha beta* - alpha* beta) Omega(beta) Tr[rho D(beta)]`.
pub fn omega_transform(
    rho: &DensityMatrix,
    grid: &AlphaGrid,
    omega: &(dyn Fn(C64) -> C64 + Sync),
    opts: OmegaOptions,
) -> Result<PhaseField> {
    check_alpha_grid(grid)?;
    if (omega(C64::new(0.0, 0.0)) - 1.0).norm() > 1e-12 {
        return Err(Error::Validation("Omega(0, 0) must equal 1".into()));
    }
    if !(opts.step > 0.0) {
        return Err(Error::Config("beta step must be positive".into()));
    }
    let r = integration_radius(rho.matrix(), omega, opts);
    let half = (r / opts.step).ceil() as i64;
    let nb = (2 * half + 1) as usize;
    let coord = |k: usize| (k as i64 - half) as f64 * opts.step;
    // f[kx][ky] = Omega chi on the disk
    let cols = parallel::map_indices(nb, |kx| {
        (0..nb)
            .map(|ky| {
                let beta = C64::new(coord(kx), coord(ky));
                if beta.norm() > r {
                    C64::new(0.0, 0.0)
                } else {
                    omega(beta) * displaced_trace(rho.matrix(), beta)
                }
            })
            .collect::<Vec<_>>()
    });
    let f = DMatrix::from_fn(nb, nb, |kx, ky| cols[kx][ky]);
    // exp(alpha beta* - alpha* beta) = exp(2i (y_a x_b - x_a y_b))
    let (na, ma) = (grid.n(), grid.m());
    let ey = DMatrix::from_fn(nb, na, |ky, i| C64::from_polar(1.0, -2.0 * grid.q.at(i) * coord(ky)));
    let ex = DMatrix::from_fn(nb, ma, |kx, j| C64::from_polar(1.0, 2.0 * grid.p.at(j) * coord(kx)));
    // g[kx][i] = sum_ky f[kx][ky] ey[ky][i]; w[i][j] = sum_kx g[kx][i] ex[kx][j]
    let g = &f * &ey;
    let w = g.transpose() * &ex;
    let c = opts.step * opts.step / (PI * PI);
    let mut values = Vec::with_capacity(na * ma);
    for i in 0..na {
        for j in 0..ma {
            values.push(w[(i, j)] * c);
        }
    }
    PhaseField::new(*grid, values, DistKind::Cohen)
}

/// Finite-squeezing approximation of the K-R function,
/// `sqrt(2) cosh(xi)/pi <alpha,xi| rho |alpha,-xi>` with `|alpha,xi> = D(alpha) S(xi)|0>`.
pub fn squeezed_projection_kr(rho: &DensityMatrix, alpha: C64, xi_large: f64) -> Result<C64> {
    let dim = rho.dim();
    if !(0.0..=2.5).contains(&xi_large) || dim < 96 {
        return Err(Error::Truncation(format!(
            "squeezed projection needs 0 <= xi <= 2.5 and dim >= 96, got xi = {xi_large}, dim = {dim}"
        )));
    }
    let mu = xi_large.cosh();
    let tau = C64::new(xi_large.tanh(), 0.0);
    let bra = displaced_squeezed_vacuum(alpha, tau, mu, dim);
    let ket = displaced_squeezed_vacuum(alpha, -tau, mu, dim);
    Ok((bra.adjoint() * rho.matrix() * ket)[(0, 0)] * (SQRT_2 * mu / PI))
}

/// Average of [`squeezed_projection_kr`] and its reversed ordering
/// `<alpha,-xi| rho |alpha,xi>`: the Margenau-Hill (real) part.
pub fn squeezed_projection_kr_re(rho: &DensityMatrix, alpha: C64, xi_large: f64) -> Result<f64> {
    let v = squeezed_projection_kr(rho, alpha, xi_large)?;
    let mu = xi_large.cosh();
    let tau = C64::new(xi_large.tanh(), 0.0);
    let dim = rho.dim();
    let bra = displaced_squeezed_vacuum(alpha, -tau, mu, dim);
    let ket = displaced_squeezed_vacuum(alpha, tau, mu, dim);
    let w = (bra.adjoint() * rho.matrix() * ket)[(0, 0)] * (SQRT_2 * mu / PI);
    Ok(0.5 * (v + w).re)
}
