//! Free-particle time evolution of wavefunctions and of K-R fields.
//!
//! Both paths are spectral and exact on the grid: the wavefunction picks up
//! `exp(-i p^2 t / (2 m hbar))` in momentum space, and every fixed-`p` row of
//! a K-R field is propagated by the closed-form solution of
//! `dK/dt + (p/m) dK/dq = (i hbar / 2m) d^2K/dq^2`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fourier::SpectralPlan;
use crate::grid::{PhaseField, PositionGrid, WaveField, COVERAGE_FAIL, COVERAGE_WARN};
use crate::parallel;

/// Mass and elapsed time of a free evolution; `hbar` comes from the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEvolutionParams {
    pub mass: f64,
    pub t: f64,
}

impl FreeEvolutionParams {
    pub fn new(mass: f64, t: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Config(format!("mass must be finite and positive, got {mass}")));
        }
        if !t.is_finite() {
            return Err(Error::Config(format!("time must be finite, got {t}")));
        }
        Ok(Self { mass, t })
    }

    pub fn at(&self, t: f64) -> Result<Self> {
        Self::new(self.mass, t)
    }
}

/// `psi(t)` by exact propagation in momentum space.
pub fn evolve_wave(psi: &WaveField, params: FreeEvolutionParams) -> Result<WaveField> {
    let g = *psi.grid();
    let plan = SpectralPlan::new(g.len());
    let mut buf = psi.values().to_vec();
    plan.forward(&mut buf, g.q_min(), g.dq(), g.hbar());
    let c = params.t / (2.0 * params.mass * g.hbar());
    for (j, v) in buf.iter_mut().enumerate() {
        let p = g.p(j);
        *v *= C64::from_polar(1.0, -p * p * c);
    }
    plan.inverse(&mut buf, g.q_min(), g.dq(), g.hbar());
    let out = WaveField::from_raw(g, buf)?;
    out.coverage_guard()?;
    Ok(out)
}

/// Position grid underlying a `(q, p)` field, plus the offset of its momentum
/// window in the conjugate axis.
fn row_geometry(field: &PhaseField) -> Result<(PositionGrid, usize)> {
    let g = &field.grid;
    let pos = PositionGrid::new(g.q.min, g.q.step, g.n(), g.hbar)?;
    let off = g.conjugate_offset(&pos)?;
    Ok((pos, off))
}

/// Row-frequency `k` of bin `l` for the row at momentum `p_j`: the
/// wavefunction component `kappa = p_l + p_j` is wrapped into the conjugate
/// axis, so every bin maps to exactly one physical momentum.
fn unwrapped_frequencies(pos: &PositionGrid, j: usize) -> Vec<f64> {
    let n = pos.len() as i64;
    let h = n / 2;
    (0..n)
        .map(|l| {
            let kappa = (l - h) + (j as i64 - h);
            let wrapped = (kappa + h).rem_euclid(n) - h;
            (wrapped - (j as i64 - h)) as f64 * pos.dp()
        })
        .collect()
}

/// Applies `op(k, p)` to every fixed-`p` column in the spatial-frequency
/// domain. Values are stored q-major, so columns are gathered first.
fn apply_row_multiplier<F>(field: &PhaseField, op: F) -> Result<Vec<C64>>
where
    F: Fn(f64, f64) -> C64 + Sync + Send,
{
    let (pos, off) = row_geometry(field)?;
    let (n, m) = (field.grid.n(), field.grid.m());
    let plan = SpectralPlan::new(n);
    let cols = parallel::map_indices(m, |jj| {
        let j = off + jj;
        let p = pos.p(j);
        let mut buf: Vec<C64> = (0..n).map(|i| field.get(i, jj)).collect();
        plan.forward(&mut buf, pos.q_min(), pos.dq(), pos.hbar());
        for (v, k) in buf.iter_mut().zip(unwrapped_frequencies(&pos, j)) {
            *v *= op(k, p);
        }
        plan.inverse(&mut buf, pos.q_min(), pos.dq(), pos.hbar());
        buf
    });
    let mut out = vec![C64::new(0.0, 0.0); n * m];
    for (jj, col) in cols.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            out[i * m + jj] = v;
        }
    }
    Ok(out)
}

fn require_kr(field: &PhaseField) -> Result<()> {
    if !field.kind.is_kirkwood_rihaczek() {
        return Err(Error::Domain(format!(
            "free evolution acts on K-R fields, got {}",
            field.kind
        )));
    }
    Ok(())
}

/// Largest `|K|` on the first and last `q` rows relative to the field peak.
fn q_edge_ratio(field: &PhaseField) -> f64 {
    let peak = field.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let n = field.grid.n();
    let edge = field
        .row(0)
        .iter()
        .chain(field.row(n - 1))
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    edge / peak
}

/// `K(q, p, t)` from `K(q, p, 0)` via `exp[t(-i hbar k^2/(2m) - i k p/m)]` in
/// each row, with `k` in momentum units (`k/hbar` is the wavenumber).
pub fn evolve_kr_field(k0: &PhaseField, params: FreeEvolutionParams) -> Result<PhaseField> {
    require_kr(k0)?;
    let hbar = k0.grid.hbar;
    let (t, m) = (params.t, params.mass);
    let values = apply_row_multiplier(k0, |k, p| {
        C64::from_polar(1.0, -t * (k * k + 2.0 * k * p) / (2.0 * m * hbar))
    })?;
    let out = PhaseField::new(k0.grid, values, k0.kind)?;
    let r = q_edge_ratio(&out);
    if r > COVERAGE_FAIL {
        return Err(Error::Truncation(format!(
            "evolved K-R field wraps around the position window (edge/peak = {r:.3e})"
        )));
    }
    if r > COVERAGE_WARN {
        log::warn!("evolved K-R field edge/peak ratio {r:.3e} exceeds {COVERAGE_WARN:e}");
    }
    Ok(out)
}

fn residual(
    snapshots: [&PhaseField; 3],
    dt: f64,
    params: FreeEvolutionParams,
    diffusion_sign: f64,
) -> Result<f64> {
    let [prev, mid, next] = snapshots;
    if prev.grid != mid.grid || next.grid != mid.grid {
        return Err(Error::Config("snapshots live on different grids".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    let hbar = mid.grid.hbar;
    let mass = params.mass;
    // (p/m) dK/dq - s (i hbar/2m) d^2K/dq^2 with d/dq -> i k/hbar
    let spatial = apply_row_multiplier(mid, |k, p| {
        let ik = C64::new(0.0, k / hbar);
        ik * (p / mass) - C64::new(0.0, diffusion_sign * hbar / (2.0 * mass)) * ik * ik
    })?;
    Ok(prev
        .values
        .iter()
        .zip(&next.values)
        .zip(&spatial)
        .map(|((a, b), s)| ((b - a) / (2.0 * dt) + s).norm())
        .fold(0.0, f64::max))
}

/// Max-norm of `dK/dt + (p/m) dK/dq - (i hbar/2m) d^2K/dq^2` at the middle
/// snapshot, with a centered time difference over `[t - dt, t + dt]` and
/// spectral `q` derivatives.
pub fn residual_of_pde(snapshots: [&PhaseField; 3], dt: f64, params: FreeEvolutionParams) -> Result<f64> {
    residual(snapshots, dt, params, 1.0)
}

/// The same residual with the sign of the diffusion term flipped.
pub fn residual_with_flipped_diffusion(
    snapshots: [&PhaseField; 3],
    dt: f64,
    params: FreeEvolutionParams,
) -> Result<f64> {
    residual(snapshots, dt, params, -1.0)
}
