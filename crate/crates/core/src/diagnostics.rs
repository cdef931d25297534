//! Named numerical checks of the defining identities of phase-space
//! distributions, with plain-text and CSV serialization.
//!
//! | check                        | tolerance |
//! |------------------------------|-----------|
//! | marginals (sup-norm)         | 1e-6      |
//! | `|K|^2` pointwise identity   | 1e-8      |
//! | `sum |K|^2 dq dp`            | 1e-5      |
//! | normalization `sum K dq dp`  | 1e-6      |
//! | reality of real kinds        | 1e-10     |
//!
//! Values are calibrated on the reference grid `n = 512`, `q in [-12, 12)`,
//! `hbar = 1`.

use std::f64::consts::PI;
use std::fmt;

use crate::distributions::kirkwood_rihaczek;
use crate::error::Result;
use crate::fourier::forward_fourier;
use crate::grid::{integrate_2d, PhaseField, PhaseGrid, WaveField};

pub mod tolerances {
    pub const MARGINAL: f64 = 1e-6;
    pub const ABS_SQ_POINTWISE: f64 = 1e-8;
    pub const SQUARE_INTEGRAL: f64 = 1e-5;
    pub const NORMALIZATION: f64 = 1e-6;
    pub const REALITY: f64 = 1e-10;
    /// Level of `max |Im|` above which a complex kind is reported as
    /// carrying a genuine imaginary part.
    pub const COMPLEX_SIGNAL: f64 = 1e-3;
}

/// `(check, tolerance)` pairs in the order of the table above.
pub const TOLERANCE_TABLE: [(&str, f64); 5] = [
    ("marginal", tolerances::MARGINAL),
    ("abs-sq-pointwise", tolerances::ABS_SQ_POINTWISE),
    ("square-integral", tolerances::SQUARE_INTEGRAL),
    ("normalization", tolerances::NORMALIZATION),
    ("reality", tolerances::REALITY),
];

/// Outcome of one check; `passed` is `|measured - expected| <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub context: String,
}

impl CheckReport {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        tolerance: f64,
        context: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            measured,
            expected,
            tolerance,
            passed: (measured - expected).abs() <= tolerance,
            context: context.into(),
        }
    }

    pub const CSV_HEADER: &'static str = "name,measured,expected,tolerance,pass";

    /// `name,measured,expected,tolerance,pass` with 17 significant digits.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{}",
            self.name, self.measured, self.expected, self.tolerance, self.passed
        )
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: measured {:.6e}, expected {:.6e}, tolerance {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.expected,
            self.tolerance
        )?;
        if !self.context.is_empty() {
            write!(f, " ({})", self.context)?;
        }
        Ok(())
    }
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// One line per report.
pub fn to_text(reports: &[CheckReport]) -> String {
    reports.iter().map(|r| format!("{r}\n")).collect()
}

/// Header plus one CSV row per report.
pub fn to_csv(reports: &[CheckReport]) -> String {
    let mut s = format!("{}\n", CheckReport::CSV_HEADER);
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

fn sup(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// Position and momentum marginals of `field` against `|psi(q)|^2` and
/// `|psi~(p)|^2 / (2 pi hbar)`.
pub fn check_marginals(field: &PhaseField, psi: &WaveField) -> Result<[CheckReport; 2]> {
    let g = psi.grid();
    let off = field.grid.conjugate_offset(g)?;
    let ctx = format!("{} on n={}", field.kind, g.len());
    let pos = field.position_marginal();
    let dq_err = sup(pos.iter().zip(psi.density()).map(|(a, b)| (a - b).norm()));
    let mom = field.momentum_marginal();
    let phi = forward_fourier(psi)?;
    let dp_err = sup(mom.iter().zip(&phi.density()[off..]).map(|(a, b)| (a - b).norm()));
    Ok([
        CheckReport::new("position-marginal", dq_err, 0.0, tolerances::MARGINAL, ctx.clone()),
        CheckReport::new("momentum-marginal", dp_err, 0.0, tolerances::MARGINAL, ctx),
    ])
}

/// K-R identities of `psi` on `grid`: pointwise `|K|^2 (2 pi hbar)^2 =
/// |psi|^2 |psi~|^2`, `sum |K|^2 = 1/(2 pi hbar)`, and `sum K = 1`.
pub fn check_kr_identities(psi: &WaveField, grid: &PhaseGrid) -> Result<[CheckReport; 3]> {
    let k = kirkwood_rihaczek(psi, grid)?;
    check_kr_identities_of(&k, psi)
}

/// [`check_kr_identities`] for a precomputed field.
pub fn check_kr_identities_of(k: &PhaseField, psi: &WaveField) -> Result<[CheckReport; 3]> {
    let g = psi.grid();
    let off = k.grid.conjugate_offset(g)?;
    let h = 2.0 * PI * g.hbar();
    let phi = forward_fourier(psi)?;
    let pd: Vec<f64> = phi.values()[off..].iter().map(|v| v.norm_sqr()).collect();
    let qd = psi.density();
    let m = k.grid.m();
    let mut pointwise: f64 = 0.0;
    for (i, qv) in qd.iter().enumerate() {
        for j in 0..m {
            let lhs = k.get(i, j).norm_sqr() * h * h;
            pointwise = pointwise.max((lhs - qv * pd[j]).abs());
        }
    }
    let sq = k.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * k.grid.cell_area();
    let total = integrate_2d(k);
    let ctx = format!("n={}", g.len());
    Ok([
        CheckReport::new("abs-sq-pointwise", pointwise, 0.0, tolerances::ABS_SQ_POINTWISE, ctx.clone()),
        CheckReport::new("square-integral", sq, 1.0 / h, tolerances::SQUARE_INTEGRAL, ctx.clone()),
        CheckReport::new(
            "normalization",
            (total - 1.0).norm(),
            0.0,
            tolerances::NORMALIZATION,
            format!("{ctx}, sum = {:.12}{:+.3e}i", total.re, total.im),
        ),
    ])
}

/// `|sum P dq dp - 1|` for any field.
pub fn check_normalization(field: &PhaseField) -> CheckReport {
    let total = integrate_2d(field);
    CheckReport::new(
        "normalization",
        (total - 1.0).norm(),
        0.0,
        tolerances::NORMALIZATION,
        format!("{}", field.kind),
    )
}

/// `max |Im P|`. Real kinds must vanish to 1e-10; complex kinds are only
/// reported, and the context records whether the imaginary part is
/// significant.
pub fn check_reality_wigner(field: &PhaseField) -> CheckReport {
    let im = field.max_abs_imag();
    if field.kind.is_real_kind() {
        CheckReport::new("reality", im, 0.0, tolerances::REALITY, format!("{} must be real", field.kind))
    } else {
        let note = if im > tolerances::COMPLEX_SIGNAL {
            "complex-valued, imaginary part present"
        } else {
            "complex-valued, imaginary part negligible"
        };
        CheckReport::new("reality", im, 0.0, f64::INFINITY, format!("{}: {note}", field.kind))
    }
}

/// Marginals, normalization and reality of `field`, plus the K-R identities
/// of `psi` on the same lattice.
pub fn wavefunction_suite(field: &PhaseField, psi: &WaveField) -> Result<Vec<CheckReport>> {
    let mut out = Vec::with_capacity(7);
    out.extend(check_marginals(field, psi)?);
    out.push(check_normalization(field));
    out.push(check_reality_wigner(field));
    out.extend(check_kr_identities(psi, &field.grid)?);
    Ok(out)
}
