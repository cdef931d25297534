use num_complex::Complex64 as C64;

use super::{Ket, LEAKAGE_TOL};
use crate::error::{Error, Result};
use crate::states::{cat_normalization, CoherentParams, SqueezeParams};

/// Coefficients of `pref * exp(gamma a^dagger + lambda a^dagger^2 / 2) |0>` style
/// Gaussian kets: `c_{n+1} = (gamma c_n + lambda sqrt(n) c_{n-1}) / sqrt(n+1)`.
pub(crate) fn gaussian_ket(pref: C64, gamma: C64, lambda: C64, dim: usize) -> Ket {
    let mut c = Ket::zeros(dim);
    c[0] = pref;
    if dim > 1 {
        c[1] = gamma * pref;
    }
    for n in 1..dim.saturating_sub(1) {
        let nf = n as f64;
        c[n + 1] = (gamma * c[n] + lambda * nf.sqrt() * c[n - 1]) / (nf + 1.0).sqrt();
    }
    c
}

/// `D(alpha) S(xi) |0>` with `tau = e^{i phi} tanh|xi|`.
pub(crate) fn displaced_squeezed_vacuum(alpha: C64, tau: C64, mu: f64, dim: usize) -> Ket {
    let ac = alpha.conj();
    let pref = (-0.5 * alpha.norm_sqr() - 0.5 * tau * ac * ac).exp() / mu.sqrt();
    gaussian_ket(pref, alpha + tau * ac, -tau, dim)
}

/// `D(alpha) exp(+- a^dagger^2 / 2) |0>`, the unnormalizable vectors spanning `K(1)`.
pub(crate) fn displaced_v(alpha: C64, plus: bool, dim: usize) -> Ket {
    let s = if plus { 1.0 } else { -1.0 };
    let ac = alpha.conj();
    let pref = (-0.5 * alpha.norm_sqr() + 0.5 * s * ac * ac).exp();
    gaussian_ket(pref, alpha - s * ac, C64::new(s, 0.0), dim)
}

fn guard_leakage(ket: Ket, what: &str) -> Result<Ket> {
    let lost = 1.0 - ket.norm_squared();
    if lost > LEAKAGE_TOL {
        return Err(Error::Truncation(format!(
            "{what} loses {lost:e} of its norm to the cutoff at dim {}",
            ket.len()
        )));
    }
    Ok(ket)
}

/// Coherent ket `|alpha0>`.
pub fn coherent_ket(c: CoherentParams, dim: usize) -> Result<Ket> {
    let a = c.alpha0;
    let k = gaussian_ket((-0.5 * a.norm_sqr()).exp().into(), a, C64::new(0.0, 0.0), dim);
    guard_leakage(k, "coherent state")
}

/// Number state `|n>`.
pub fn fock_ket(n: usize, dim: usize) -> Result<Ket> {
    if n >= dim {
        return Err(Error::Truncation(format!("|{n}> does not fit in dim {dim}")));
    }
    let mut k = Ket::zeros(dim);
    k[n] = C64::new(1.0, 0.0);
    Ok(k)
}

/// Even cat `N(|alpha0> + |-alpha0>)`.
pub fn cat_ket(c: CoherentParams, dim: usize) -> Result<Ket> {
    let a = c.alpha0;
    let p = C64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
    let z = C64::new(0.0, 0.0);
    let k = (gaussian_ket(p, a, z, dim) + gaussian_ket(p, -a, z, dim))
        * C64::new(cat_normalization(a), 0.0);
    guard_leakage(k, "cat state")
}

/// Displaced squeezed state `D(alpha0) S(xi) |0>`, any squeeze phase.
pub fn squeezed_coherent_ket(c: CoherentParams, s: SqueezeParams, dim: usize) -> Result<Ket> {
    let tau = s.nu() / s.mu();
    let k = displaced_squeezed_vacuum(c.alpha0, tau, s.mu(), dim);
    guard_leakage(k, "squeezed state")
}

/// `S(xi)|0> + S(-xi)|0>`, normalized.
pub fn squeezed_cat_ket(s: SqueezeParams, dim: usize) -> Result<Ket> {
    let tau = s.nu() / s.mu();
    let z = C64::new(0.0, 0.0);
    let k = displaced_squeezed_vacuum(z, tau, s.mu(), dim) + displaced_squeezed_vacuum(z, -tau, s.mu(), dim);
    // <xi|-xi> = <0|S(-2 xi)|0> = 1/sqrt(cosh 2|xi|)
    let n2 = 2.0 + 2.0 / (2.0 * s.xi_abs).cosh().sqrt();
    guard_leakage(k / C64::new(n2.sqrt(), 0.0), "squeezed cat")
}
