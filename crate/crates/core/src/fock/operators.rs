use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{ln_factorials, FockOperator};
use crate::error::{Error, Result};
use crate::states::SqueezeParams;

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::Config(format!("dim must be >= 2, got {dim}")));
    }
    Ok(())
}

/// Annihilation and creation operators `(a, a^dagger)`.
pub fn ladder_ops(dim: usize) -> Result<(FockOperator, FockOperator)> {
    check_dim(dim)?;
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    Ok((FockOperator::from_matrix(a), FockOperator::from_matrix(ad)))
}

/// `exp(alpha a^dagger - alpha* a)` with the cutoff guard `|alpha|^2 <= dim/4`.
pub fn displacement(alpha: C64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    guard_displacement(alpha, dim)?;
    Ok(FockOperator::from_matrix(displacement_block(alpha, dim)))
}

pub(crate) fn guard_displacement(alpha: C64, dim: usize) -> Result<()> {
    if alpha.norm_sqr() > dim as f64 / 4.0 {
        return Err(Error::Truncation(format!(
            "|alpha|^2 = {} exceeds dim/4 = {}",
            alpha.norm_sqr(),
            dim as f64 / 4.0
        )));
    }
    Ok(())
}

/// Exact leading block of `D(alpha)`:
/// `<m+k|D|m> = e^{ik arg alpha} sqrt(m!/(m+k)!) |alpha|^k e^{-|alpha|^2/2} L_m^k(|alpha|^2)`,
/// built by the three-term Laguerre recurrence on normalized functions.
pub(crate) fn displacement_block(alpha: C64, dim: usize) -> DMatrix<C64> {
    let x = alpha.norm_sqr();
    let theta = alpha.arg();
    let lf = ln_factorials(dim);
    let mut d = DMatrix::zeros(dim, dim);
    let mut f = vec![0.0; dim];
    for k in 0..dim {
        let len = dim - k;
        let kf = k as f64;
        f[0] = if x == 0.0 {
            if k == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (0.5 * (kf * x.ln() - lf[k]) - 0.5 * x).exp()
        };
        if len > 1 {
            f[1] = (1.0 + kf - x) * f[0] / (kf + 1.0).sqrt();
        }
        for m in 1..len.saturating_sub(1) {
            let mf = m as f64;
            f[m + 1] = ((2.0 * mf + 1.0 + kf - x) * f[m] - (mf * (mf + kf)).sqrt() * f[m - 1])
                / ((mf + 1.0) * (mf + kf + 1.0)).sqrt();
        }
        let lower = C64::from_polar(1.0, kf * theta);
        let upper = C64::from_polar(if k % 2 == 0 { 1.0 } else { -1.0 }, -kf * theta);
        for m in 0..len {
            d[(m + k, m)] = lower * f[m];
            if k > 0 {
                d[(m, m + k)] = upper * f[m];
            }
        }
    }
    d
}

/// `exp(alpha a^dagger - alpha* a)` by scaling and squaring of the truncated
/// generator; accurate only away from the cutoff.
pub fn displacement_expm(alpha: C64, dim: usize) -> Result<FockOperator> {
    let (a, ad) = ladder_ops(dim)?;
    let g = ad.matrix() * alpha - a.matrix() * alpha.conj();
    Ok(FockOperator::from_matrix(g.exp()))
}

/// `sum_{n,k} |n><k| c^j / j! sqrt(n!/k!)` with `n = k + 2j`: the block of `exp(c a^dagger^2)`.
fn exp_creation_sq(c: C64, dim: usize, lf: &[f64]) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        m[(k, k)] = C64::new(1.0, 0.0);
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        let mut j = 1;
        while k + 2 * j < dim {
            let n = k + 2 * j;
            let jf = j as f64;
            let mag = (jf * c.norm().ln() - lf[j] + 0.5 * (lf[n] - lf[k])).exp();
            m[(n, k)] = C64::from_polar(mag, jf * c.arg());
            j += 1;
        }
    }
    m
}

/// Block of the normal-ordered product `exp(c a^dagger^2) diag(g(k)) exp(d a^2)`.
/// Exact, since the inner sum never leaves the block.
pub(crate) fn ordered_quadratic(c: C64, diag: impl Fn(usize) -> C64, d: C64, dim: usize) -> DMatrix<C64> {
    let lf = ln_factorials(dim);
    let left = exp_creation_sq(c, dim, &lf);
    // exp(d a^2) = (exp(d* a^dagger^2))^dagger
    let right = exp_creation_sq(d.conj(), dim, &lf).adjoint();
    let mid = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |k, _| diag(k)));
    left * mid * right
}

fn guard_squeeze(s: &SqueezeParams, dim: usize) -> Result<()> {
    if s.xi_abs > 2.0 || dim < 32 {
        return Err(Error::Truncation(format!(
            "squeeze needs |xi| <= 2 and dim >= 32, got |xi| = {} and dim = {dim}",
            s.xi_abs
        )));
    }
    Ok(())
}

/// `S(xi)` in the ordered form
/// `exp(-(nu/2mu) a^dagger^2) (1/mu)^(N+1/2) exp((nu*/2mu) a^2)`.
pub fn squeeze(s: SqueezeParams, dim: usize) -> Result<FockOperator> {
    guard_squeeze(&s, dim)?;
    let mu = s.mu();
    let nu = s.nu();
    let m = ordered_quadratic(
        -nu / (2.0 * mu),
        |k| C64::new(mu.powf(-(k as f64) - 0.5), 0.0),
        nu.conj() / (2.0 * mu),
        dim,
    );
    Ok(FockOperator::from_matrix(m))
}

/// `S(xi) = exp(-xi/2 a^dagger^2 + xi*/2 a^2)` by matrix exponential of the
/// generator on a space three times larger, cut back to `dim`.
pub fn squeeze_expm(s: SqueezeParams, dim: usize) -> Result<FockOperator> {
    guard_squeeze(&s, dim)?;
    let big = 3 * dim;
    let (a, ad) = ladder_ops(big)?;
    let xi = s.xi();
    let a2 = a.matrix() * a.matrix();
    let ad2 = ad.matrix() * ad.matrix();
    let g = ad2 * (-xi * 0.5) + a2 * (xi.conj() * 0.5);
    Ok(FockOperator::from_matrix(g.exp().view((0, 0), (dim, dim)).into_owned()))
}

/// `K(sigma) = exp(sigma a^dagger^2/(1+sigma^2)) ((sigma^2-1)/(1+sigma^2))^N exp(-sigma a^2/(1+sigma^2))`.
pub fn k_sigma_operator(sigma: f64, dim: usize) -> Result<FockOperator> {
    if dim < 16 {
        return Err(Error::Config(format!("K(sigma) needs dim >= 16, got {dim}")));
    }
    if !sigma.is_finite() {
        return Err(Error::Config("sigma must be finite".into()));
    }
    Ok(FockOperator::from_matrix(k_sigma_block(sigma, dim)))
}

pub(crate) fn k_sigma_block(sigma: f64, dim: usize) -> DMatrix<C64> {
    let den = 1.0 + sigma * sigma;
    let c = sigma / den;
    let t = (sigma * sigma - 1.0) / den;
    ordered_quadratic(
        C64::new(c, 0.0),
        |k| C64::new(t.powi(k as i32), 0.0),
        C64::new(-c, 0.0),
        dim,
    )
}

/// `Pi(s) = ((s+1)/(s-1))^N` for `s < 1`.
pub fn parity_s(s: f64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let r = parity_ratio(s)?;
    Ok(FockOperator::from_matrix(DMatrix::from_diagonal(
        &nalgebra::DVector::from_fn(dim, |k, _| C64::new(r.powi(k as i32), 0.0)),
    )))
}

pub(crate) fn parity_ratio(s: f64) -> Result<f64> {
    if !(s < 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("s-ordering requires s < 1, got {s}")));
    }
    Ok((s + 1.0) / (s - 1.0))
}
