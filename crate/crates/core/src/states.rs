//! Wavefunction constructors for the test states and closed-form
//! phase-space values used as oracles.
//!
//! Phase-space convention: `alpha = (q + i p) / sqrt(2 hbar)`, so a coherent
//! state `|alpha0>` is a Gaussian of width `w = sqrt(hbar)` centered at
//! `q0 = sqrt(2) w Re(alpha0)` with mean momentum `p0 = sqrt(2) (hbar/w) Im(alpha0)`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{PositionGrid, WaveField};

/// Displacement `alpha0` of a coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentParams {
    pub alpha0: C64,
}

impl CoherentParams {
    pub fn new(alpha0: C64) -> Result<Self> {
        if !(alpha0.re.is_finite() && alpha0.im.is_finite()) {
            return Err(Error::Config(format!("non-finite alpha0 {alpha0}")));
        }
        Ok(Self { alpha0 })
    }

    pub fn real(a: f64) -> Self {
        Self {
            alpha0: C64::new(a, 0.0),
        }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        Self {
            alpha0: C64::from_polar(r, theta),
        }
    }
}

/// Squeezing `xi = |xi| exp(i phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    pub xi_abs: f64,
    pub phi_xi: f64,
}

impl SqueezeParams {
    pub fn new(xi_abs: f64, phi_xi: f64) -> Result<Self> {
        if !(xi_abs >= 0.0 && xi_abs.is_finite() && phi_xi.is_finite()) {
            return Err(Error::Config(format!(
                "invalid squeezing |xi|={xi_abs}, phi={phi_xi}"
            )));
        }
        Ok(Self { xi_abs, phi_xi })
    }

    /// Real squeezing parameter; negative values mean `phi = pi`.
    pub fn signed(xi: f64) -> Self {
        if xi < 0.0 {
            Self {
                xi_abs: -xi,
                phi_xi: PI,
            }
        } else {
            Self {
                xi_abs: xi,
                phi_xi: 0.0,
            }
        }
    }

    pub fn xi(&self) -> C64 {
        C64::from_polar(self.xi_abs, self.phi_xi)
    }

    /// `cosh |xi|`
    pub fn mu(&self) -> f64 {
        self.xi_abs.cosh()
    }

    /// `exp(i phi) sinh |xi|`
    pub fn nu(&self) -> C64 {
        C64::from_polar(self.xi_abs.sinh(), self.phi_xi)
    }

    /// `+|xi|` for `phi = 0`, `-|xi|` for `phi = pi`; other phases are not
    /// axis-aligned and have no wavefunction constructor here.
    pub fn axis_signed(&self) -> Result<f64> {
        let c = self.phi_xi.cos();
        if (self.phi_xi.sin()).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "wavefunction squeezing supports phi in {{0, pi}}, got {}",
                self.phi_xi
            )));
        }
        Ok(if c > 0.0 { self.xi_abs } else { -self.xi_abs })
    }
}

/// Two Gaussian-windowed plane waves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWavePairParams {
    pub p1: f64,
    pub p2: f64,
    pub window_width: f64,
}

impl PlaneWavePairParams {
    pub fn new(p1: f64, p2: f64, window_width: f64) -> Result<Self> {
        if p1 == p2 {
            return Err(Error::Config("plane-wave momenta must differ".into()));
        }
        if !(window_width > 0.0 && window_width.is_finite()) {
            return Err(Error::Config(format!("invalid window width {window_width}")));
        }
        Ok(Self {
            p1,
            p2,
            window_width,
        })
    }

    pub fn delta_p(&self) -> f64 {
        self.p2 - self.p1
    }

    pub fn mean_p(&self) -> f64 {
        0.5 * (self.p1 + self.p2)
    }
}

/// `alpha = (q + i p) / sqrt(2 hbar)`
pub fn alpha_from_qp(q: f64, p: f64, hbar: f64) -> C64 {
    C64::new(q, p) / (2.0 * hbar).sqrt()
}

/// Inverse of [`alpha_from_qp`].
pub fn qp_from_alpha(alpha: C64, hbar: f64) -> (f64, f64) {
    let s = (2.0 * hbar).sqrt();
    (alpha.re * s, alpha.im * s)
}

/// Density conversion `P(q, p) = P(alpha) / (2 hbar)` from `d^2 alpha = dq dp / (2 hbar)`.
pub fn qp_density_from_alpha(value: C64, hbar: f64) -> C64 {
    value / (2.0 * hbar)
}

fn coherent_samples(alpha0: C64, grid: &PositionGrid) -> Vec<C64> {
    let hbar = grid.hbar();
    let w = hbar.sqrt();
    let q0 = SQRT_2 * w * alpha0.re;
    let p0 = SQRT_2 * (hbar / w) * alpha0.im;
    let amp = (PI * w * w).powf(-0.25);
    grid.positions()
        .iter()
        .map(|&q| {
            let x = q - q0;
            C64::from_polar(
                amp * (-x * x / (2.0 * w * w)).exp(),
                (p0 * q - 0.5 * p0 * q0) / hbar,
            )
        })
        .collect()
}

/// Coherent state `|alpha0>` as a normalized Gaussian wavefunction.
pub fn coherent_wave(params: CoherentParams, grid: &PositionGrid) -> Result<WaveField> {
    WaveField::new(*grid, coherent_samples(params.alpha0, grid))
}

/// Harmonic-oscillator eigenfunction `<q|n>` (unit mass and frequency).
pub fn fock_wave(n: usize, grid: &PositionGrid) -> Result<WaveField> {
    if n > 50 {
        return Err(Error::Config(format!("Fock index {n} exceeds 50")));
    }
    let w = grid.hbar().sqrt();
    let values = grid
        .positions()
        .iter()
        .map(|&q| C64::new(hermite_function(n, q / w) / w.sqrt(), 0.0))
        .collect();
    WaveField::new(*grid, values)
}

/// Normalized Hermite function by the stable three-term recurrence.
fn hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-x * x / 2.0).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `N = (2 + 2 exp(-2 |alpha0|^2))^(-1/2)`
pub fn cat_normalization(alpha0: C64) -> f64 {
    (2.0 + 2.0 * (-2.0 * alpha0.norm_sqr()).exp()).powf(-0.5)
}

/// Even cat state `N (|alpha0> + |-alpha0>)`.
pub fn cat_wave(params: CoherentParams, grid: &PositionGrid) -> Result<WaveField> {
    let n = cat_normalization(params.alpha0);
    let a = coherent_samples(params.alpha0, grid);
    let b = coherent_samples(-params.alpha0, grid);
    let values = a.iter().zip(&b).map(|(x, y)| (x + y) * n).collect();
    WaveField::new(*grid, values)
}

/// `[exp(i p1 q/hbar) + exp(i p2 q/hbar)] exp(-q^2 / (2 L^2))`, normalized.
pub fn plane_wave_pair(params: PlaneWavePairParams, grid: &PositionGrid) -> Result<WaveField> {
    let hbar = grid.hbar();
    let l = params.window_width;
    let fringe = 2.0 * PI * hbar / params.delta_p().abs();
    if l < 5.0 * fringe {
        return Err(Error::Config(format!(
            "window width {l} must be at least 5x the fringe period {fringe:.4}"
        )));
    }
    if grid.span() < 4.0 * l {
        return Err(Error::Config(format!(
            "grid span {} must cover at least 4 window widths ({})",
            grid.span(),
            4.0 * l
        )));
    }
    let values = grid
        .positions()
        .iter()
        .map(|&q| {
            let env = (-q * q / (2.0 * l * l)).exp();
            (C64::from_polar(1.0, params.p1 * q / hbar) + C64::from_polar(1.0, params.p2 * q / hbar))
                * env
        })
        .collect();
    WaveField::new(*grid, values)
}

fn squeezed_samples(alpha0: C64, xi_signed: f64, grid: &PositionGrid) -> Vec<C64> {
    let hbar = grid.hbar();
    let w = hbar.sqrt();
    let ws = w * (-xi_signed).exp();
    let q0 = SQRT_2 * w * alpha0.re;
    let p0 = SQRT_2 * (hbar / w) * alpha0.im;
    let amp = (PI * ws * ws).powf(-0.25);
    grid.positions()
        .iter()
        .map(|&q| {
            let x = q - q0;
            C64::from_polar(
                amp * (-x * x / (2.0 * ws * ws)).exp(),
                (p0 * q - 0.5 * p0 * q0) / hbar,
            )
        })
        .collect()
}

fn check_squeeze(s: &SqueezeParams) -> Result<f64> {
    if s.xi_abs > 3.0 {
        return Err(Error::Truncation(format!(
            "squeezing |xi|={} exceeds the resolvable limit 3",
            s.xi_abs
        )));
    }
    s.axis_signed()
}

/// Displaced squeezed state `D(alpha0) S(xi) |0>` for axis-aligned `xi`:
/// position variance `hbar/2 * exp(-2 xi_signed)`.
pub fn squeezed_coherent_wave(
    c: CoherentParams,
    s: SqueezeParams,
    grid: &PositionGrid,
) -> Result<WaveField> {
    let xs = check_squeeze(&s)?;
    WaveField::new(*grid, squeezed_samples(c.alpha0, xs, grid))
}

/// Superposition of the two perpendicularly squeezed vacua `S(xi)|0> + S(-xi)|0>`,
/// normalized numerically.
pub fn squeezed_cat_wave(s: SqueezeParams, grid: &PositionGrid) -> Result<WaveField> {
    let xs = check_squeeze(&s)?;
    let zero = C64::new(0.0, 0.0);
    let a = squeezed_samples(zero, xs, grid);
    let b = squeezed_samples(zero, -xs, grid);
    WaveField::new(*grid, a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

/// Generalized K-R function of a coherent state over the alpha plane,
/// `2/(pi sqrt(1+s^2)) exp[(s d*^2 - 2|d|^2 - s d^2)/(1+s^2)]`, `d = alpha - alpha0`.
pub fn oracle_generalized_kr_coherent(alpha: C64, alpha0: C64, sigma: f64) -> C64 {
    let d = alpha - alpha0;
    let den = 1.0 + sigma * sigma;
    let e = (sigma * d.conj() * d.conj() - 2.0 * d.norm_sqr() - sigma * d * d) / den;
    e.exp() * (2.0 / (PI * den.sqrt()))
}

/// Generalized K-R function of the even cat `N(|alpha0> + |-alpha0>)`:
/// two coherent lobes plus the two interference terms.
pub fn oracle_kr_cat(alpha: C64, alpha0: C64, sigma: f64) -> C64 {
    let n2 = cat_normalization(alpha0).powi(2);
    let den = 1.0 + sigma * sigma;
    let ac = alpha.conj();
    let a0c = alpha0.conj();
    let lobe = |s: f64| {
        let d = alpha - s * alpha0;
        let dc = ac - s * a0c;
        ((sigma * dc * dc - sigma * d * d - 2.0 * d.norm_sqr()) / den).exp()
    };
    let cross1 = {
        let u = ac + a0c;
        let v = alpha - alpha0;
        ((sigma * u * u - sigma * v * v - 2.0 * u * v) / den).exp()
    };
    let cross2 = {
        let u = ac - a0c;
        let v = alpha + alpha0;
        ((sigma * u * u - sigma * v * v - 2.0 * u * v) / den).exp()
    };
    let overlap = (-2.0 * alpha0.norm_sqr()).exp();
    (lobe(1.0) + lobe(-1.0) + (cross1 + cross2) * overlap) * (2.0 * n2 / (PI * den.sqrt()))
}

/// K-R function of the one-photon Fock state,
/// `sqrt(2)/pi (alpha^2 - alpha*^2) exp(-|alpha|^2 - alpha^2/2 + alpha*^2/2)`.
pub fn oracle_kr_fock1(alpha: C64) -> C64 {
    let a2 = alpha * alpha;
    let ac2 = alpha.conj() * alpha.conj();
    (a2 - ac2) * (-alpha.norm_sqr() - a2 * 0.5 + ac2 * 0.5).exp() * (SQRT_2 / PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> PositionGrid {
        PositionGrid::spanning(-12.0, 12.0, 512).unwrap()
    }

    fn mean_q(psi: &WaveField) -> f64 {
        let g = psi.grid();
        psi.values()
            .iter()
            .enumerate()
            .map(|(i, v)| g.q(i) * v.norm_sqr())
            .sum::<f64>()
            * g.dq()
    }

    fn var_q(psi: &WaveField) -> f64 {
        let g = psi.grid();
        let m = mean_q(psi);
        psi.values()
            .iter()
            .enumerate()
            .map(|(i, v)| (g.q(i) - m).powi(2) * v.norm_sqr())
            .sum::<f64>()
            * g.dq()
    }

    /// `<p>` by a centered finite-difference oracle on `-i hbar d/dq`.
    fn mean_p(psi: &WaveField) -> f64 {
        let g = psi.grid();
        let v = psi.values();
        let mut acc = C64::new(0.0, 0.0);
        for i in 1..v.len() - 1 {
            let d = (v[i + 1] - v[i - 1]) / (2.0 * g.dq());
            acc += v[i].conj() * C64::new(0.0, -g.hbar()) * d;
        }
        (acc * g.dq()).re
    }

    fn max_diff(a: &WaveField, b: &WaveField) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn vacuum_is_centered() {
        let psi = coherent_wave(CoherentParams::real(0.0), &grid()).unwrap();
        assert!(mean_q(&psi).abs() < 1e-9);
        assert!(mean_p(&psi).abs() < 1e-9);
    }

    #[test]
    fn coherent_means() {
        let psi = coherent_wave(CoherentParams::real(3.0), &grid()).unwrap();
        assert!((mean_q(&psi) - 3.0 * SQRT_2).abs() < 1e-6);
        let rot = coherent_wave(CoherentParams::polar(3.0, PI / 4.0), &grid()).unwrap();
        assert!((mean_q(&rot) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn coherent_momentum_from_spectrum() {
        let g = grid();
        let rot = coherent_wave(CoherentParams::polar(3.0, PI / 4.0), &g).unwrap();
        let phi = crate::fourier::forward_fourier(&rot).unwrap();
        let d = phi.density();
        let mp: f64 = d.iter().enumerate().map(|(j, w)| g.p(j) * w).sum::<f64>() * g.dp();
        assert!((mp - 3.0).abs() < 1e-6);
    }

    #[test]
    fn fock_states() {
        let g = grid();
        let f0 = fock_wave(0, &g).unwrap();
        let vac = coherent_wave(CoherentParams::real(0.0), &g).unwrap();
        assert!(max_diff(&f0, &vac) < 1e-10);
        let f1 = fock_wave(1, &g).unwrap();
        // q_{n-i} = -q_i for i >= 1 on this symmetric grid
        let v = f1.values();
        for i in 1..256 {
            assert!((v[i] + v[512 - i]).norm() < 1e-10);
        }
        assert!(f0.inner(&f1).norm() < 1e-9);
        assert!(fock_wave(51, &g).is_err());
    }

    #[test]
    fn fock_family_is_orthonormal() {
        let g = grid();
        let fs: Vec<_> = (0..=10).map(|n| fock_wave(n, &g).unwrap()).collect();
        for (a, fa) in fs.iter().enumerate() {
            for (b, fb) in fs.iter().enumerate() {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((fa.inner(fb) - expect).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn cat_states() {
        let g = grid();
        let c0 = cat_wave(CoherentParams::real(0.0), &g).unwrap();
        let vac = coherent_wave(CoherentParams::real(0.0), &g).unwrap();
        assert!(max_diff(&c0, &vac) < 1e-10);
        let c3 = cat_wave(CoherentParams::real(3.0), &g).unwrap();
        assert!((c3.norm_sqr() - 1.0).abs() < 1e-9);
        assert!(mean_q(&c3).abs() < 1e-9);
        let expected = (2.0 + 2.0 * (-18.0f64).exp()).powf(-0.5);
        assert!((cat_normalization(C64::new(3.0, 0.0)) - expected).abs() < 1e-15);
    }

    #[test]
    fn plane_pair_structure() {
        assert!(PlaneWavePairParams::new(1.0, 1.0, 20.0).is_err());
        let g = PositionGrid::spanning(-128.0, 128.0, 2048).unwrap();
        let params = PlaneWavePairParams::new(-2.0, 2.0, 20.0).unwrap();
        let psi = plane_wave_pair(params, &g).unwrap();
        // position density zeros at q * dp = pi mod 2 pi
        let d = psi.density();
        let dp = params.delta_p();
        for k in -3i32..3 {
            let qz = (PI + 2.0 * PI * k as f64) / dp;
            let i = ((qz - g.q_min()) / g.dq()).round() as usize;
            let local_min = (i - 2..=i + 2).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
            assert!((g.q(local_min) - qz).abs() <= g.dq());
        }
        // momentum peaks at p1, p2
        let phi = crate::fourier::forward_fourier(&psi).unwrap().density();
        let (left, right) = phi.split_at(1024);
        let jl = (0..1024).max_by(|&a, &b| left[a].total_cmp(&left[b])).unwrap();
        let jr = 1024 + (0..1024).max_by(|&a, &b| right[a].total_cmp(&right[b])).unwrap();
        assert!((g.p(jl) + 2.0).abs() <= g.dp());
        assert!((g.p(jr) - 2.0).abs() <= g.dp());
    }

    #[test]
    fn plane_pair_rejects_narrow_window() {
        let g = PositionGrid::spanning(-128.0, 128.0, 2048).unwrap();
        let p = PlaneWavePairParams::new(-0.1, 0.1, 20.0).unwrap();
        assert!(matches!(plane_wave_pair(p, &g), Err(Error::Config(_))));
    }

    #[test]
    fn squeezed_variances() {
        let g = grid();
        let c = CoherentParams::real(0.0);
        let plain = coherent_wave(c, &g).unwrap();
        let s0 = squeezed_coherent_wave(c, SqueezeParams::new(0.0, 0.0).unwrap(), &g).unwrap();
        assert!(max_diff(&plain, &s0) < 1e-10);
        let sq = squeezed_coherent_wave(c, SqueezeParams::new(0.5, 0.0).unwrap(), &g).unwrap();
        assert!((var_q(&sq) - (-1.0f64).exp() / 2.0).abs() < 1e-6);
        let an = squeezed_coherent_wave(c, SqueezeParams::new(0.5, PI).unwrap(), &g).unwrap();
        assert!((var_q(&an) - 1.0f64.exp() / 2.0).abs() < 1e-6);
        assert!(squeezed_coherent_wave(c, SqueezeParams::new(0.5, 1.0).unwrap(), &g).is_err());
        assert!(squeezed_coherent_wave(c, SqueezeParams::new(3.5, 0.0).unwrap(), &g).is_err());
    }

    #[test]
    fn squeezed_cats() {
        let g = grid();
        let vac = coherent_wave(CoherentParams::real(0.0), &g).unwrap();
        let s0 = squeezed_cat_wave(SqueezeParams::new(0.0, 0.0).unwrap(), &g).unwrap();
        assert!(max_diff(&vac, &s0) < 1e-10);
        let s5 = squeezed_cat_wave(SqueezeParams::new(0.5, 0.0).unwrap(), &g).unwrap();
        let v = s5.values();
        for i in 1..256 {
            assert!((v[i] - v[512 - i]).norm() < 1e-9);
        }
        let s9 = squeezed_cat_wave(SqueezeParams::new(0.9, 0.0).unwrap(), &g).unwrap();
        assert!((s9.norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coherent_oracle_values() {
        let a0 = C64::new(0.7, -0.2);
        assert!((oracle_generalized_kr_coherent(a0, a0, 0.0) - 2.0 / PI).norm() < 1e-15);
        let z = C64::new(0.0, 0.0);
        assert!((oracle_generalized_kr_coherent(z, z, 1.0) - SQRT_2 / PI).norm() < 1e-15);
        for x in [-1.5, 0.3, 2.0] {
            let v = oracle_generalized_kr_coherent(C64::new(x, 0.0), z, 1.0);
            assert!((v - SQRT_2 / PI * (-x * x as f64).exp()).norm() < 1e-15);
        }
    }

    #[test]
    fn cat_oracle_degenerates_to_vacuum() {
        let z = C64::new(0.0, 0.0);
        for (x, y, s) in [(0.3, -0.4, 1.0), (1.0, 0.5, 0.5), (-0.2, 0.1, 2.0)] {
            let a = C64::new(x, y);
            let cat = oracle_kr_cat(a, z, s);
            let vac = oracle_generalized_kr_coherent(a, z, s);
            assert!((cat - vac).norm() < 1e-14);
        }
    }

    #[test]
    fn cat_oracle_at_origin() {
        // independent evaluation of the four terms at alpha = 0, alpha0 = 3, sigma = 0:
        // lobes give exp(-18) each; cross terms give exp(-2*9) * exp(2*9) = 1 each
        let a0 = C64::new(3.0, 0.0);
        let n2 = 1.0 / (2.0 + 2.0 * (-18.0f64).exp());
        let expect = 2.0 * n2 / PI * (2.0 * (-18.0f64).exp() + 2.0);
        let got = oracle_kr_cat(C64::new(0.0, 0.0), a0, 0.0);
        assert!((got.re - expect).abs() < 1e-14 && got.im.abs() < 1e-14);
    }

    #[test]
    fn cat_interference_envelope_centers() {
        // |cross term| is largest at (+-sigma alpha0, 0)
        let a0 = C64::new(3.0, 0.0);
        let s = 1.0;
        let lobe_free = |a: C64| {
            oracle_kr_cat(a, a0, s) - oracle_generalized_kr_coherent(a, a0, s) * cat_normalization(a0).powi(2)
                - oracle_generalized_kr_coherent(a, -a0, s) * cat_normalization(a0).powi(2)
        };
        let best = (-60..=60)
            .map(|k| k as f64 * 0.05)
            .max_by(|&x, &y| lobe_free(C64::new(x, 0.0)).norm().total_cmp(&lobe_free(C64::new(y, 0.0)).norm()))
            .unwrap();
        assert!((best.abs() - 3.0).abs() < 0.051);
    }

    #[test]
    fn fock1_oracle() {
        assert!(oracle_kr_fock1(C64::new(1.3, 0.0)).norm() < 1e-15);
        assert!(oracle_kr_fock1(C64::new(0.0, -0.8)).norm() < 1e-15);
        // alpha = (1+i)/sqrt 2: alpha^2 = i, |alpha|^2 = 1, so
        // value = sqrt2/pi * 2i * exp(-1 - i)
        let a = C64::new(1.0, 1.0) / SQRT_2;
        let expect = C64::new(0.0, 2.0) * C64::new(-1.0, -1.0).exp() * (SQRT_2 / PI);
        assert!((oracle_kr_fock1(a) - expect).norm() < 1e-14);
    }

    #[test]
    fn oracle_conjugation_flips_sigma() {
        for (re, im, a0r, a0i, s) in [(0.3, 0.2, 1.0, -0.5, 0.5), (-1.0, 2.0, 0.0, 0.0, 1.0), (0.1, -0.4, 2.0, 1.0, 2.0)] {
            let a = C64::new(re, im);
            let a0 = C64::new(a0r, a0i);
            let v = oracle_generalized_kr_coherent(a, a0, s);
            let w = oracle_generalized_kr_coherent(a, a0, -s);
            assert!((v.conj() - w).norm() < 1e-14);
        }
    }
}
