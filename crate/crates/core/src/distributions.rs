//! Wavefunction-side quasi-distributions.
//!
//! Everything here is built from the lag products
//! `r_k(q_i) = conj(psi(q_i - k dq/2)) psi(q_i + k dq/2)`, `|k| <= n`,
//! where odd lags use band-limited half-grid samples. Lags up to the full
//! window width are kept so that no pair of occupied points is dropped.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fourier::{forward_fourier, refine_2x, SpectralPlan};
use crate::grid::{DistKind, PhaseField, PhaseGrid, PositionGrid, WaveField};
use crate::parallel;

type KernelFn = dyn Fn(f64, f64) -> C64 + Send + Sync;

/// A Cohen-class kernel `Phi(q', p')`.
#[derive(Clone)]
pub struct CohenKernel {
    name: String,
    eval: Arc<KernelFn>,
}

impl fmt::Debug for CohenKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CohenKernel").field("name", &self.name).finish()
    }
}

/// Tolerance of the axis constraint `Phi(q', 0) = 1 = Phi(0, p')`.
pub const KERNEL_AXIS_TOL: f64 = 1e-12;

impl CohenKernel {
    /// Wraps an arbitrary evaluator. The axis constraint is checked when the
    /// kernel is applied to a grid.
    pub fn new(name: impl Into<String>, f: impl Fn(f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, q_lag: f64, p_lag: f64) -> C64 {
        (self.eval)(q_lag, p_lag)
    }

    /// `Phi = 1`: the Wigner function.
    pub fn unity() -> Self {
        Self::new("unity", |_, _| C64::new(1.0, 0.0))
    }

    /// `Phi = exp(-i p' q' / (2 hbar))`: the Kirkwood-Rihaczek function.
    pub fn kirkwood_rihaczek(hbar: f64) -> Self {
        Self::new("kirkwood-rihaczek", move |q, p| {
            C64::from_polar(1.0, -p * q / (2.0 * hbar))
        })
    }

    /// `Phi = cos(p' q' / (2 hbar))`: the Margenau-Hill function.
    pub fn margenau_hill(hbar: f64) -> Self {
        Self::new("margenau-hill", move |q, p| {
            C64::new((p * q / (2.0 * hbar)).cos(), 0.0)
        })
    }

    /// Checks the axis constraint on every sampled lag and frequency.
    pub fn validate(&self, q_lags: &[f64], p_lags: &[f64]) -> Result<()> {
        let one = C64::new(1.0, 0.0);
        for &q in q_lags {
            let v = self.eval(q, 0.0);
            if (v - one).norm() > KERNEL_AXIS_TOL {
                return Err(Error::Validation(format!(
                    "kernel {} has Phi({q}, 0) = {v}, expected 1",
                    self.name
                )));
            }
        }
        for &p in p_lags {
            let v = self.eval(0.0, p);
            if (v - one).norm() > KERNEL_AXIS_TOL {
                return Err(Error::Validation(format!(
                    "kernel {} has Phi(0, {p}) = {v}, expected 1",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Validates against the lags a Cohen transform on `grid` will sample.
    pub fn validate_on(&self, grid: &PositionGrid) -> Result<()> {
        let n = grid.len() as i64;
        let q_lags: Vec<f64> = (-n..=n).map(|k| k as f64 * grid.dq()).collect();
        self.validate(&q_lags, &grid.momenta())
    }
}

/// The sigma-ordered family `Phi_sigma = exp(-i sigma q' p' / (2 hbar))`;
/// sigma = 0 is Wigner, sigma = 1 is Kirkwood-Rihaczek.
pub fn sigma_kernel(sigma: f64, hbar: f64) -> CohenKernel {
    CohenKernel::new(format!("sigma={sigma}"), move |q, p| {
        C64::from_polar(1.0, -sigma * q * p / (2.0 * hbar))
    })
}

/// Ambiguity function samples on `q'_k = (k - n/2) dq`, `p'_l = (l - n/2) dp`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityField {
    pub grid: PhaseGrid,
    pub values: Vec<C64>,
}

impl AmbiguityField {
    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.values[k * self.grid.m() + l]
    }
}

/// Half-grid-refined wavefunction used to form lag products.
struct LagProducts {
    fine: Vec<C64>,
    n: usize,
}

impl LagProducts {
    fn new(psi: &WaveField) -> Self {
        Self {
            fine: refine_2x(psi.values()),
            n: psi.grid().len(),
        }
    }

    #[inline]
    fn at(&self, idx: i64) -> C64 {
        if idx < 0 || idx >= self.fine.len() as i64 {
            C64::new(0.0, 0.0)
        } else {
            self.fine[idx as usize]
        }
    }

    /// `conj(psi(q_i - k dq/2)) psi(q_i + k dq/2)`
    #[inline]
    fn product(&self, i: usize, k: i64) -> C64 {
        let c = 2 * i as i64;
        self.at(c - k).conj() * self.at(c + k)
    }

    fn row(&self, k: i64) -> Vec<C64> {
        (0..self.n).map(|i| self.product(i, k)).collect()
    }
}

fn check_grid(psi: &WaveField, grid: &PhaseGrid) -> Result<usize> {
    grid.conjugate_offset(psi.grid())
}

/// Lays out full-width rows (n momenta) into the windowed field.
fn windowed_field(
    full_rows: Vec<Vec<C64>>,
    grid: &PhaseGrid,
    offset: usize,
    kind: DistKind,
) -> Result<PhaseField> {
    let m = grid.m();
    let mut values = Vec::with_capacity(full_rows.len() * m);
    for row in full_rows {
        values.extend_from_slice(&row[offset..offset + m]);
    }
    PhaseField::new(*grid, values, kind)
}

/// Kirkwood-Rihaczek `K(q,p) = psi(q) exp(-i p q / hbar) conj(psi~(p)) / (2 pi hbar)`.
pub fn kirkwood_rihaczek(psi: &WaveField, grid: &PhaseGrid) -> Result<PhaseField> {
    let offset = check_grid(psi, grid)?;
    let g = psi.grid();
    let hbar = g.hbar();
    let phi = forward_fourier(psi)?;
    let m = grid.m();
    let c = 1.0 / (2.0 * PI * hbar);
    let mut values = vec![C64::new(0.0, 0.0); g.len() * m];
    parallel::for_each_chunk_mut(&mut values, m, |i, row| {
        let q = g.q(i);
        let a = psi.values()[i] * c;
        for (jj, v) in row.iter_mut().enumerate() {
            let j = offset + jj;
            *v = a * C64::from_polar(1.0, -g.p(j) * q / hbar) * phi.values()[j].conj();
        }
    });
    PhaseField::new(*grid, values, DistKind::KirkwoodRihaczek)
}

/// Margenau-Hill: the real part of the K-R function.
pub fn margenau_hill(psi: &WaveField, grid: &PhaseGrid) -> Result<PhaseField> {
    let k = kirkwood_rihaczek(psi, grid)?;
    Ok(k.map(DistKind::MargenauHill, |v| C64::new(v.re, 0.0)))
}

/// Wigner function by one FFT per row over the lag variable.
pub fn wigner(psi: &WaveField, grid: &PhaseGrid) -> Result<PhaseField> {
    let offset = check_grid(psi, grid)?;
    let g = *psi.grid();
    let n = g.len();
    let lags = LagProducts::new(psi);
    let plan = SpectralPlan::new(n);
    let c = 1.0 / (2.0 * PI * g.hbar());
    let rows = parallel::map_indices(n, |i| {
        let mut folded = vec![C64::new(0.0, 0.0); n];
        for k in -(n as i64)..=(n as i64) {
            folded[k.rem_euclid(n as i64) as usize] += lags.product(i, k);
        }
        plan.forward(&mut folded, 0.0, g.dq(), g.hbar());
        folded.iter_mut().for_each(|v| *v *= c);
        folded
    });
    windowed_field(rows, grid, offset, DistKind::Wigner)
}

/// Ambiguity function `A(q', p') = sum_xi exp(-i p' xi / hbar) conj(psi(xi - q'/2)) psi(xi + q'/2) dq`.
pub fn ambiguity(psi: &WaveField) -> Result<AmbiguityField> {
    let g = *psi.grid();
    let n = g.len();
    let lags = LagProducts::new(psi);
    let plan = SpectralPlan::new(n);
    let half = (n / 2) as i64;
    let rows = parallel::map_indices(n, |kk| {
        let mut row = lags.row(kk as i64 - half);
        plan.forward(&mut row, g.q_min(), g.dq(), g.hbar());
        row
    });
    let lag_axis = crate::grid::Axis::new(-(half as f64) * g.dq(), g.dq(), n);
    let grid = PhaseGrid {
        q: lag_axis,
        p: g.momentum_axis(),
        hbar: g.hbar(),
        plane: crate::grid::Plane::PositionMomentum,
    };
    Ok(AmbiguityField {
        grid,
        values: rows.concat(),
    })
}

/// Cohen-class distribution `P = (2 pi hbar)^-2 sum exp(i(p' q - q' p)/hbar) Phi A dq' dp'`.
/// Fails when the kernel violates the axis constraint on this grid.
pub fn cohen(psi: &WaveField, kernel: &CohenKernel, grid: &PhaseGrid) -> Result<PhaseField> {
    kernel.validate_on(psi.grid())?;
    cohen_unvalidated(psi, kernel, grid)
}

/// [`cohen`] without the kernel constraint check, for negative controls.
pub fn cohen_unvalidated(
    psi: &WaveField,
    kernel: &CohenKernel,
    grid: &PhaseGrid,
) -> Result<PhaseField> {
    let offset = check_grid(psi, grid)?;
    let g = *psi.grid();
    let n = g.len();
    let ni = n as i64;
    let lags = LagProducts::new(psi);
    let plan = SpectralPlan::new(n);
    let momenta = g.momenta();
    // smoothed[kk][i] = sum over lags k = kk (mod n) of
    // inverse_p'[ Phi(k dq, p') * forward_q[r_k](p') ](q_i)
    let smoothed = parallel::map_indices(n, |kk| {
        let mut acc = vec![C64::new(0.0, 0.0); n];
        for k in [kk as i64 - ni, kk as i64, kk as i64 + ni] {
            if k < -ni || k > ni {
                continue;
            }
            let mut row = lags.row(k);
            plan.forward(&mut row, g.q_min(), g.dq(), g.hbar());
            let q_lag = k as f64 * g.dq();
            for (v, &p) in row.iter_mut().zip(&momenta) {
                *v *= kernel.eval(q_lag, p);
            }
            plan.inverse(&mut row, g.q_min(), g.dq(), g.hbar());
            for (a, v) in acc.iter_mut().zip(&row) {
                *a += v;
            }
        }
        acc
    });
    let c = 1.0 / (2.0 * PI * g.hbar());
    let rows = parallel::map_indices(n, |i| {
        let mut col: Vec<C64> = smoothed.iter().map(|r| r[i]).collect();
        plan.forward(&mut col, 0.0, g.dq(), g.hbar());
        col.iter_mut().for_each(|v| *v *= c);
        col
    });
    windowed_field(rows, grid, offset, DistKind::Cohen)
}

/// sigma-ordered generalized K-R function through the Cohen transform.
pub fn sigma_kr(psi: &WaveField, sigma: f64, grid: &PhaseGrid) -> Result<PhaseField> {
    let mut f = cohen(psi, &sigma_kernel(sigma, psi.grid().hbar()), grid)?;
    f.kind = DistKind::SigmaKr(sigma);
    Ok(f)
}

/// Product of the marginals, `|psi(q)|^2 |psi~(p)|^2 / (2 pi hbar)`.
pub fn product_distribution(psi: &WaveField, grid: &PhaseGrid) -> Result<PhaseField> {
    let offset = check_grid(psi, grid)?;
    let phi = forward_fourier(psi)?;
    let c = 1.0 / (2.0 * PI * psi.grid().hbar());
    let m = grid.m();
    let mut values = Vec::with_capacity(psi.grid().len() * m);
    for v in psi.values() {
        let a = v.norm_sqr() * c;
        for j in offset..offset + m {
            values.push(C64::new(a * phi.values()[j].norm_sqr(), 0.0));
        }
    }
    PhaseField::new(*grid, values, DistKind::Product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::*;

    fn grid() -> PositionGrid {
        PositionGrid::spanning(-12.0, 12.0, 256).unwrap()
    }

    fn vacuum() -> WaveField {
        coherent_wave(CoherentParams::real(0.0), &grid()).unwrap()
    }

    #[test]
    fn kr_vanishes_where_psi_vanishes() {
        let g = grid();
        let psi = fock_wave(1, &g).unwrap();
        // q = 0 is node index 128 and psi(0) = 0 exactly
        assert_eq!(psi.values()[128], C64::new(0.0, 0.0));
        let k = kirkwood_rihaczek(&psi, &PhaseGrid::conjugate(&g)).unwrap();
        assert!(k.row(128).iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn margenau_hill_is_real_part() {
        let g = grid();
        let psi = cat_wave(CoherentParams::real(2.0), &g).unwrap();
        let pg = PhaseGrid::conjugate(&g);
        let k = kirkwood_rihaczek(&psi, &pg).unwrap();
        let mh = margenau_hill(&psi, &pg).unwrap();
        for (a, b) in k.values.iter().zip(&mh.values) {
            assert_eq!(a.re, b.re);
            assert_eq!(b.im, 0.0);
        }
        let (kq, mq) = (k.position_marginal(), mh.position_marginal());
        for (a, b) in kq.iter().zip(&mq) {
            assert!((a - b).norm() < 1e-10);
        }
        let (kp, mp) = (k.momentum_marginal(), mh.momentum_marginal());
        for (a, b) in kp.iter().zip(&mp) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn vacuum_margenau_hill_changes_sign() {
        let g = grid();
        let mh = margenau_hill(&vacuum(), &PhaseGrid::conjugate(&g)).unwrap();
        let min = mh.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        let max = mh.values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
        assert!(min < -1e-3 && max > 1e-3);
    }

    #[test]
    fn wigner_is_real_and_matches_coherent_oracle() {
        let g = grid();
        let a0 = C64::new(1.2, -0.7);
        let psi = coherent_wave(CoherentParams::new(a0).unwrap(), &g).unwrap();
        let w = wigner(&psi, &PhaseGrid::conjugate(&g)).unwrap();
        assert!(w.max_abs_imag() < 1e-10);
        let mut err: f64 = 0.0;
        for i in 0..g.len() {
            for j in 0..g.len() {
                let o = qp_density_from_alpha(
                    oracle_generalized_kr_coherent(alpha_from_qp(g.q(i), g.p(j), 1.0), a0, 0.0),
                    1.0,
                );
                err = err.max((w.get(i, j) - o).norm());
            }
        }
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn kernel_correspondences() {
        let g = grid();
        let psi = cat_wave(CoherentParams::polar(2.0, 0.3), &g).unwrap();
        let pg = PhaseGrid::conjugate(&g);
        let hbar = g.hbar();
        let w = wigner(&psi, &pg).unwrap();
        let c1 = cohen(&psi, &CohenKernel::unity(), &pg).unwrap();
        assert!(w.sup_diff(&c1) < 1e-6);
        let k = kirkwood_rihaczek(&psi, &pg).unwrap();
        let ck = cohen(&psi, &CohenKernel::kirkwood_rihaczek(hbar), &pg).unwrap();
        assert!(k.sup_diff(&ck) < 1e-6);
        let mh = margenau_hill(&psi, &pg).unwrap();
        let cm = cohen(&psi, &CohenKernel::margenau_hill(hbar), &pg).unwrap();
        assert!(mh.sup_diff(&cm) < 1e-6);
        assert!(w.sup_diff(&sigma_kr(&psi, 0.0, &pg).unwrap()) < 1e-6);
        assert!(k.sup_diff(&sigma_kr(&psi, 1.0, &pg).unwrap()) < 1e-6);
    }

    /// Band-limited interpolant evaluated by direct summation.
    fn interpolate(psi: &WaveField, x: f64) -> C64 {
        let g = psi.grid();
        let n = g.len();
        let h = n as i64 / 2;
        let t = (x - g.q_min()) / (n as f64 * g.dq());
        let mut acc = C64::new(0.0, 0.0);
        for m in -h..=h {
            let w = if m.abs() == h { 0.5 } else { 1.0 };
            let c: C64 = psi
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| v * C64::from_polar(1.0, -2.0 * PI * (m * i as i64) as f64 / n as f64))
                .sum();
            acc += c * C64::from_polar(w, 2.0 * PI * m as f64 * t);
        }
        acc / n as f64
    }

    #[test]
    fn cohen_matches_direct_double_sum() {
        let g = PositionGrid::spanning(-8.0, 8.0, 32).unwrap();
        let psi = cat_wave(CoherentParams::polar(1.5, 0.4), &g).unwrap();
        let n = g.len() as i64;
        let half: Vec<C64> = (0..2 * n - 1)
            .map(|m| interpolate(&psi, g.q_min() + m as f64 * g.dq() / 2.0))
            .collect();
        let sample = |x: f64| {
            let m = ((x - g.q_min()) / (g.dq() / 2.0)).round() as i64;
            if m < 0 || m >= 2 * n - 1 {
                C64::new(0.0, 0.0)
            } else {
                half[m as usize]
            }
        };
        let kernel = sigma_kernel(0.7, 1.0);
        // direct ambiguity on all lags k dq, |k| <= n
        let mut amb = vec![vec![C64::new(0.0, 0.0); n as usize]; (2 * n + 1) as usize];
        for k in -n..=n {
            let ql = k as f64 * g.dq();
            for l in 0..n as usize {
                let pl = g.p(l);
                amb[(k + n) as usize][l] = (0..n as usize)
                    .map(|i| {
                        let x = g.q(i);
                        sample(x - ql / 2.0).conj() * sample(x + ql / 2.0) * C64::from_polar(g.dq(), -pl * x)
                    })
                    .sum();
            }
        }
        let fast = cohen(&psi, &kernel, &PhaseGrid::conjugate(&g)).unwrap();
        let c = g.dq() * g.dp() / (2.0 * PI).powi(2);
        let mut err: f64 = 0.0;
        for i in 0..n as usize {
            for j in 0..n as usize {
                let mut acc = C64::new(0.0, 0.0);
                for k in -n..=n {
                    let ql = k as f64 * g.dq();
                    for l in 0..n as usize {
                        let pl = g.p(l);
                        acc += C64::from_polar(1.0, pl * g.q(i) - ql * g.p(j))
                            * kernel.eval(ql, pl)
                            * amb[(k + n) as usize][l];
                    }
                }
                err = err.max((acc * c - fast.get(i, j)).norm());
            }
        }
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn corrupted_kernel_is_rejected() {
        let g = grid();
        let bad = CohenKernel::new("bad", |q, p| {
            if p == 0.0 && q != 0.0 {
                C64::new(1.1, 0.0)
            } else {
                C64::new(1.0, 0.0)
            }
        });
        let r = cohen(&vacuum(), &bad, &PhaseGrid::conjugate(&g));
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn sigma_half_matches_coherent_oracle() {
        let g = grid();
        let a0 = C64::new(0.5, 1.0);
        let psi = coherent_wave(CoherentParams::new(a0).unwrap(), &g).unwrap();
        let f = sigma_kr(&psi, 0.5, &PhaseGrid::conjugate(&g)).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..g.len() {
            for j in 0..g.len() {
                let o = oracle_generalized_kr_coherent(alpha_from_qp(g.q(i), g.p(j), 1.0), a0, 0.5) / 2.0;
                err = err.max((f.get(i, j) - o).norm());
            }
        }
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn ambiguity_normalization_and_bound() {
        let g = grid();
        let psi = cat_wave(CoherentParams::real(2.0), &g).unwrap();
        let a = ambiguity(&psi).unwrap();
        assert!((a.get(g.len() / 2, g.len() / 2) - 1.0).norm() < 1e-9);
        assert!(a.values.iter().all(|v| v.norm() <= 1.0 + 1e-9));
    }

    #[test]
    fn product_distribution_identity() {
        let g = grid();
        let psi = cat_wave(CoherentParams::real(2.0), &g).unwrap();
        let pg = PhaseGrid::conjugate(&g);
        let p = product_distribution(&psi, &pg).unwrap();
        let k = kirkwood_rihaczek(&psi, &pg).unwrap();
        for (a, b) in p.values.iter().zip(&k.values) {
            assert!(a.re >= 0.0);
            assert!((a.re - b.norm_sqr() * 2.0 * PI).abs() < 1e-8);
        }
        assert!((crate::grid::integrate_2d(&p) - 1.0).norm() < 1e-6);
    }

    #[test]
    fn incompatible_grid_is_rejected() {
        let psi = vacuum();
        let other = PositionGrid::spanning(-10.0, 10.0, 256).unwrap();
        assert!(kirkwood_rihaczek(&psi, &PhaseGrid::conjugate(&other)).is_err());
    }

    #[test]
    fn windowed_output_is_a_slice_of_the_full_field() {
        let g = grid();
        let psi = vacuum();
        let full = wigner(&psi, &PhaseGrid::conjugate(&g)).unwrap();
        let win = PhaseGrid::windowed(&g, -3.0, 3.0).unwrap();
        let part = wigner(&psi, &win).unwrap();
        let off = win.conjugate_offset(&g).unwrap();
        for i in 0..g.len() {
            for j in 0..win.m() {
                assert_eq!(part.get(i, j), full.get(i, off + j));
            }
        }
    }
}
