//! Uniform sampling grids and the complex fields that live on them.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fourier;

/// Edge-to-peak amplitude ratio above which a constructor logs a warning.
pub const COVERAGE_WARN: f64 = 1e-6;
/// Edge-to-peak amplitude ratio above which a constructor refuses the state.
pub const COVERAGE_FAIL: f64 = 1e-3;

/// Uniform 1D position sampling `q_i = q_min + i*dq`, `i < n`, together with
/// the reduced Planck constant that fixes the conjugate momentum grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionGrid {
    q_min: f64,
    dq: f64,
    n: usize,
    hbar: f64,
}

impl PositionGrid {
    pub fn new(q_min: f64, dq: f64, n: usize, hbar: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::Config(format!(
                "grid needs an even number of samples >= 8, got {n}"
            )));
        }
        if !(dq > 0.0 && dq.is_finite()) || !q_min.is_finite() {
            return Err(Error::Config(format!("invalid spacing dq={dq}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Config(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { q_min, dq, n, hbar })
    }

    /// `n` samples covering `[q_min, q_max)` with `hbar = 1`.
    pub fn spanning(q_min: f64, q_max: f64, n: usize) -> Result<Self> {
        if q_max <= q_min {
            return Err(Error::Config(format!("empty range [{q_min}, {q_max})")));
        }
        Self::new(q_min, (q_max - q_min) / n as f64, n, 1.0)
    }

    pub fn with_hbar(self, hbar: f64) -> Result<Self> {
        Self::new(self.q_min, self.dq, self.n, hbar)
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn dq(&self) -> f64 {
        self.dq
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Exclusive upper end of the sampled interval.
    pub fn q_max(&self) -> f64 {
        self.q_min + self.n as f64 * self.dq
    }

    pub fn span(&self) -> f64 {
        self.n as f64 * self.dq
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.dq
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.q(i)).collect()
    }

    /// Momentum spacing of the conjugate grid, `2*pi*hbar / (n*dq)`.
    pub fn dp(&self) -> f64 {
        2.0 * PI * self.hbar / (self.n as f64 * self.dq)
    }

    /// Conjugate momentum `p_j = (j - n/2) dp`, centered on zero.
    pub fn p(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.dp()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.p(j)).collect()
    }

    pub fn position_axis(&self) -> Axis {
        Axis::new(self.q_min, self.dq, self.n)
    }

    pub fn momentum_axis(&self) -> Axis {
        Axis::new(self.p(0), self.dp(), self.n)
    }
}

/// A uniform, strictly increasing axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    pub fn new(min: f64, step: f64, len: usize) -> Self {
        Self { min, step, len }
    }

    /// `len` points from `min` to `max` inclusive.
    pub fn inclusive(min: f64, max: f64, len: usize) -> Result<Self> {
        if len < 2 || !(max > min) {
            return Err(Error::Config(format!(
                "axis needs len >= 2 and max > min, got [{min}, {max}] x {len}"
            )));
        }
        Ok(Self::new(min, (max - min) / (len - 1) as f64, len))
    }

    pub fn at(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }

    pub fn max(&self) -> f64 {
        self.at(self.len.saturating_sub(1))
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.at(i)).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.len == 0 || !(self.step > 0.0) || !self.min.is_finite() {
            return Err(Error::Config(format!("invalid axis {self:?}")));
        }
        Ok(())
    }
}

/// Which plane a [`PhaseGrid`] samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    /// `(q, p)` in physical units.
    PositionMomentum,
    /// `(Re alpha, Im alpha)`, dimensionless.
    Alpha,
}

/// A 2D lattice over either the `(q, p)` plane or the complex `alpha` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub q: Axis,
    pub p: Axis,
    pub hbar: f64,
    pub plane: Plane,
}

impl PhaseGrid {
    /// The full conjugate lattice of a position grid: every `q_i` times every `p_j`.
    pub fn conjugate(grid: &PositionGrid) -> Self {
        Self {
            q: grid.position_axis(),
            p: grid.momentum_axis(),
            hbar: grid.hbar(),
            plane: Plane::PositionMomentum,
        }
    }

    /// The conjugate lattice restricted to momenta in `[p_min, p_max]`.
    pub fn windowed(grid: &PositionGrid, p_min: f64, p_max: f64) -> Result<Self> {
        let dp = grid.dp();
        let n = grid.len();
        let half = (n / 2) as f64;
        let lo = ((p_min / dp).ceil() + half).max(0.0);
        let hi = ((p_max / dp).floor() + half).min(n as f64 - 1.0);
        if !(hi >= lo) {
            return Err(Error::Config(format!(
                "momentum window [{p_min}, {p_max}] contains no conjugate grid point"
            )));
        }
        let (lo, hi) = (lo as usize, hi as usize);
        let m = hi - lo + 1;
        Ok(Self {
            q: grid.position_axis(),
            p: Axis::new(grid.p(lo), dp, m),
            hbar: grid.hbar(),
            plane: Plane::PositionMomentum,
        })
    }

    /// A lattice on the complex plane, `alpha = x + i y`.
    pub fn alpha(re: Axis, im: Axis) -> Result<Self> {
        re.validate()?;
        im.validate()?;
        Ok(Self {
            q: re,
            p: im,
            hbar: 1.0,
            plane: Plane::Alpha,
        })
    }

    pub fn n(&self) -> usize {
        self.q.len
    }

    pub fn m(&self) -> usize {
        self.p.len
    }

    /// Area element of one cell.
    pub fn cell_area(&self) -> f64 {
        self.q.step * self.p.step
    }

    /// Offset of `p.min` in the conjugate axis of `grid`, after checking that
    /// this lattice is a window of that grid's conjugate lattice.
    pub fn conjugate_offset(&self, grid: &PositionGrid) -> Result<usize> {
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300);
        if self.plane != Plane::PositionMomentum
            || self.q.len != grid.len()
            || !rel(self.q.step, grid.dq())
            || (self.q.min - grid.q_min()).abs() > 1e-9 * grid.dq()
            || !rel(self.hbar, grid.hbar())
            || !rel(self.p.step, grid.dp())
        {
            return Err(Error::Config(
                "phase grid is not a window of the wavefunction's conjugate lattice".into(),
            ));
        }
        let off = self.p.min / grid.dp() + (grid.len() / 2) as f64;
        let k = off.round();
        if (off - k).abs() > 1e-6 || k < 0.0 || k as usize + self.p.len > grid.len() {
            return Err(Error::Config(
                "momentum axis is not aligned with the conjugate grid".into(),
            ));
        }
        Ok(k as usize)
    }

    /// True when the momentum axis spans the whole conjugate axis of `grid`.
    pub fn is_full_conjugate(&self, grid: &PositionGrid) -> bool {
        matches!(self.conjugate_offset(grid), Ok(0)) && self.p.len == grid.len()
    }
}

/// Normalized complex wavefunction samples.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: PositionGrid,
    values: Vec<C64>,
}

impl WaveField {
    /// Normalizes `values` (Riemann norm) and applies the coverage guard in
    /// both position and momentum space.
    pub fn new(grid: PositionGrid, values: Vec<C64>) -> Result<Self> {
        let mut field = Self::from_raw(grid, values)?;
        let norm = field.norm_sqr();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Config("wavefunction has zero or non-finite norm".into()));
        }
        let scale = 1.0 / norm.sqrt();
        field.values.iter_mut().for_each(|v| *v *= scale);
        field.coverage_guard()?;
        Ok(field)
    }

    /// Wraps samples without normalization or guards.
    pub fn from_raw(grid: PositionGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &PositionGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// `sum |psi_i|^2 dq`
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dq()
    }

    /// `sum conj(self_i) other_i dq`
    pub fn inner(&self, other: &WaveField) -> C64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.grid.dq()
    }

    /// Position probability density `|psi(q_i)|^2`.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn scaled(&self, a: C64) -> WaveField {
        WaveField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * a).collect(),
        }
    }

    /// Largest edge-to-peak ratios in position and momentum space.
    pub fn edge_ratios(&self) -> (f64, f64) {
        let pos = edge_ratio(&self.values);
        let mom = edge_ratio(fourier::forward_fourier_raw(self).values());
        (pos, mom)
    }

    pub(crate) fn coverage_guard(&self) -> Result<()> {
        let (pos, mom) = self.edge_ratios();
        for (what, r) in [("position", pos), ("momentum", mom)] {
            if r > COVERAGE_FAIL {
                return Err(Error::Truncation(format!(
                    "state is not contained in the {what} window (edge/peak = {r:.3e})"
                )));
            }
            if r > COVERAGE_WARN {
                log::warn!("{what} edge/peak amplitude ratio {r:.3e} exceeds {COVERAGE_WARN:e}");
            }
        }
        Ok(())
    }
}

fn edge_ratio(values: &[C64]) -> f64 {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let edge = values[0].norm().max(values[values.len() - 1].norm());
    edge / peak
}

/// Momentum-space samples `psi~(p_j)` on the conjugate grid of `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumField {
    grid: PositionGrid,
    values: Vec<C64>,
}

impl MomentumField {
    pub fn new(grid: PositionGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "expected {} momentum samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// The position grid whose conjugate this field is sampled on.
    pub fn grid(&self) -> &PositionGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `sum |psi~(p_j)|^2 dp / (2 pi hbar)`
    pub fn norm_sqr(&self) -> f64 {
        let g = &self.grid;
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dp() / (2.0 * PI * g.hbar())
    }

    /// Momentum marginal `|psi~(p_j)|^2 / (2 pi hbar)`.
    pub fn density(&self) -> Vec<f64> {
        let c = 1.0 / (2.0 * PI * self.grid.hbar());
        self.values.iter().map(|v| v.norm_sqr() * c).collect()
    }
}

/// Which quasi-distribution a [`PhaseField`] holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistKind {
    Wigner,
    KirkwoodRihaczek,
    MargenauHill,
    Cohen,
    /// sigma-ordered generalized K-R, carrying sigma.
    SigmaKr(f64),
    /// s-ordered Cahill-Glauber function, carrying s.
    SOrdered(f64),
    Product,
}

impl DistKind {
    /// True for fields that must be real (Wigner and sigma = 0).
    pub fn is_real_kind(&self) -> bool {
        match self {
            DistKind::Wigner | DistKind::MargenauHill | DistKind::Product => true,
            DistKind::SigmaKr(s) => *s == 0.0,
            DistKind::SOrdered(_) => true,
            _ => false,
        }
    }

    /// True for the K-R distribution itself (sigma = 1).
    pub fn is_kirkwood_rihaczek(&self) -> bool {
        match self {
            DistKind::KirkwoodRihaczek => true,
            DistKind::SigmaKr(s) => *s == 1.0,
            _ => false,
        }
    }
}

/// Complex quasi-distribution values on a [`PhaseGrid`], stored q-major:
/// `values[i * m + j]` is the value at `(q_i, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    pub grid: PhaseGrid,
    pub values: Vec<C64>,
    pub kind: DistKind,
}

impl PhaseField {
    pub fn new(grid: PhaseGrid, values: Vec<C64>, kind: DistKind) -> Result<Self> {
        if values.len() != grid.n() * grid.m() {
            return Err(Error::Config(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.n() * grid.m()
            )));
        }
        Ok(Self { grid, values, kind })
    }

    pub fn zeros(grid: PhaseGrid, kind: DistKind) -> Self {
        Self {
            values: vec![C64::new(0.0, 0.0); grid.n() * grid.m()],
            grid,
            kind,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.grid.m() + j]
    }

    /// Row of values at fixed `q_i`.
    pub fn row(&self, i: usize) -> &[C64] {
        let m = self.grid.m();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Sup-norm distance to another field on the same lattice.
    pub fn sup_diff(&self, other: &PhaseField) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "lattice mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `sum_j P(q_i, p_j) dp` for every `q_i`.
    pub fn position_marginal(&self) -> Vec<C64> {
        let dp = self.grid.p.step;
        (0..self.grid.n())
            .map(|i| self.row(i).iter().sum::<C64>() * dp)
            .collect()
    }

    /// `sum_i P(q_i, p_j) dq` for every `p_j`.
    pub fn momentum_marginal(&self) -> Vec<C64> {
        let (n, m) = (self.grid.n(), self.grid.m());
        let dq = self.grid.q.step;
        let mut out = vec![C64::new(0.0, 0.0); m];
        for i in 0..n {
            for (o, v) in out.iter_mut().zip(self.row(i)) {
                *o += v;
            }
        }
        out.iter_mut().for_each(|v| *v *= dq);
        out
    }

    /// Applies `f` pointwise, keeping grid and kind.
    pub fn map(&self, kind: DistKind, f: impl Fn(C64) -> C64) -> PhaseField {
        PhaseField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            kind,
        }
    }

    /// Short identifier stored in file headers, e.g. `kr`, `sigma-kr:0.5`,
    /// `a/s-ordered:-1`. The `a/` prefix marks the alpha plane.
    pub fn tag(&self) -> String {
        let base = match self.kind {
            DistKind::Wigner => "wigner".to_string(),
            DistKind::KirkwoodRihaczek => "kr".to_string(),
            DistKind::MargenauHill => "mh".to_string(),
            DistKind::Cohen => "cohen".to_string(),
            DistKind::SigmaKr(s) => format!("sigma-kr:{s}"),
            DistKind::SOrdered(s) => format!("s-ordered:{s}"),
            DistKind::Product => "product".to_string(),
        };
        match self.grid.plane {
            Plane::PositionMomentum => base,
            Plane::Alpha => format!("a/{base}"),
        }
    }
}

impl fmt::Display for DistKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistKind::Wigner => write!(f, "Wigner"),
            DistKind::KirkwoodRihaczek => write!(f, "Kirkwood-Rihaczek"),
            DistKind::MargenauHill => write!(f, "Margenau-Hill"),
            DistKind::Cohen => write!(f, "Cohen"),
            DistKind::SigmaKr(s) => write!(f, "sigma-K-R (sigma={s})"),
            DistKind::SOrdered(s) => write!(f, "s-ordered (s={s})"),
            DistKind::Product => write!(f, "product"),
        }
    }
}

/// Parses a tag produced by [`PhaseField::tag`] back into plane and kind.
pub fn parse_tag(tag: &str) -> Result<(Plane, DistKind)> {
    let (plane, rest) = match tag.strip_prefix("a/") {
        Some(r) => (Plane::Alpha, r),
        None => (Plane::PositionMomentum, tag),
    };
    let (name, param) = match rest.split_once(':') {
        Some((n, p)) => (
            n,
            Some(
                p.parse::<f64>()
                    .map_err(|_| Error::Format(format!("bad tag parameter in {tag:?}")))?,
            ),
        ),
        None => (rest, None),
    };
    let kind = match (name, param) {
        ("wigner", None) => DistKind::Wigner,
        ("kr", None) => DistKind::KirkwoodRihaczek,
        ("mh", None) => DistKind::MargenauHill,
        ("cohen", None) => DistKind::Cohen,
        ("product", None) => DistKind::Product,
        ("sigma-kr", Some(s)) => DistKind::SigmaKr(s),
        ("s-ordered", Some(s)) => DistKind::SOrdered(s),
        _ => return Err(Error::Format(format!("unknown distribution tag {tag:?}"))),
    };
    Ok((plane, kind))
}

/// Riemann double integral `sum P dq dp`.
pub fn integrate_2d(field: &PhaseField) -> C64 {
    field.values.iter().sum::<C64>() * field.grid.cell_area()
}
