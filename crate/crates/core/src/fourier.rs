//! FFT engine with the physical normalization
//! `psi~(p) = integral dq exp(-i p q / hbar) psi(q)`, discretized on the
//! conjugate grid `p_j = (j - n/2) dp`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{MomentumField, WaveField};

/// Forward and inverse plans of one length, shareable across threads.
#[derive(Clone)]
pub struct SpectralPlan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl SpectralPlan {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In place: `f_i` on `q_i = q_min + i dq` becomes
    /// `F_j = sum_i exp(-i p_j q_i / hbar) f_i dq`.
    pub fn forward(&self, buf: &mut [C64], q_min: f64, dq: f64, hbar: f64) {
        debug_assert_eq!(buf.len(), self.n);
        alternate_signs(buf);
        self.fwd.process(buf);
        let dp = 2.0 * PI * hbar / (self.n as f64 * dq);
        let half = (self.n / 2) as f64;
        for (j, v) in buf.iter_mut().enumerate() {
            let p = (j as f64 - half) * dp;
            *v *= C64::from_polar(dq, -p * q_min / hbar);
        }
    }

    /// Exact inverse of [`SpectralPlan::forward`]:
    /// `f_i = sum_j exp(i p_j q_i / hbar) F_j dp / (2 pi hbar)`.
    pub fn inverse(&self, buf: &mut [C64], q_min: f64, dq: f64, hbar: f64) {
        debug_assert_eq!(buf.len(), self.n);
        let dp = 2.0 * PI * hbar / (self.n as f64 * dq);
        let half = (self.n / 2) as f64;
        for (j, v) in buf.iter_mut().enumerate() {
            let p = (j as f64 - half) * dp;
            *v *= C64::from_polar(1.0, p * q_min / hbar);
        }
        self.inv.process(buf);
        let scale = 1.0 / (self.n as f64 * dq);
        for (i, v) in buf.iter_mut().enumerate() {
            *v *= if i % 2 == 0 { scale } else { -scale };
        }
    }

    /// Plain unnormalized forward DFT.
    pub fn raw_forward(&self, buf: &mut [C64]) {
        self.fwd.process(buf);
    }

    /// Plain unnormalized inverse DFT.
    pub fn raw_inverse(&self, buf: &mut [C64]) {
        self.inv.process(buf);
    }
}

fn alternate_signs(buf: &mut [C64]) {
    buf.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
}

/// Momentum-space wavefunction on the conjugate grid.
pub fn forward_fourier(psi: &WaveField) -> Result<MomentumField> {
    if psi.grid().len() < 8 {
        return Err(Error::Config("grid too small for the transform".into()));
    }
    Ok(forward_fourier_raw(psi))
}

pub(crate) fn forward_fourier_raw(psi: &WaveField) -> MomentumField {
    let g = psi.grid();
    let mut buf = psi.values().to_vec();
    SpectralPlan::new(g.len()).forward(&mut buf, g.q_min(), g.dq(), g.hbar());
    MomentumField::new(*g, buf).expect("length preserved")
}

/// Position-space wavefunction from its conjugate-grid samples.
pub fn inverse_fourier(phi: &MomentumField) -> Result<WaveField> {
    let g = phi.grid();
    if phi.values().len() != g.len() {
        return Err(Error::Config("momentum samples do not match the grid".into()));
    }
    let mut buf = phi.values().to_vec();
    SpectralPlan::new(g.len()).inverse(&mut buf, g.q_min(), g.dq(), g.hbar());
    WaveField::from_raw(*g, buf)
}

/// Band-limited (trigonometric) interpolation onto the 2x refined lattice:
/// element `2i` is sample `i`, element `2i+1` sits at `q_i + dq/2`.
/// The Nyquist coefficient is split evenly between both signs.
pub fn refine_2x(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    let mut spec = values.to_vec();
    SpectralPlan::new(n).raw_forward(&mut spec);
    let mut padded = vec![C64::new(0.0, 0.0); 2 * n];
    let h = n / 2;
    padded[..h].copy_from_slice(&spec[..h]);
    padded[2 * n - h + 1..].copy_from_slice(&spec[h + 1..]);
    padded[h] = spec[h] * 0.5;
    padded[2 * n - h] = spec[h] * 0.5;
    SpectralPlan::new(2 * n).raw_inverse(&mut padded);
    let scale = 1.0 / n as f64;
    padded.iter_mut().for_each(|v| *v *= scale);
    padded
}

/// Parseval residual `|sum |psi|^2 dq - sum |psi~|^2 dp / (2 pi hbar)|`.
pub fn parseval_residual(psi: &WaveField, phi: &MomentumField) -> f64 {
    (psi.norm_sqr() - phi.norm_sqr()).abs()
}
