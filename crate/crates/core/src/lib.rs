//! Phase-space quasi-distributions of one-dimensional quantum states.
//!
//! Two independent engines compute the same objects:
//!
//! * the wavefunction engine ([`distributions`]) samples `psi(q)` on a
//!   uniform grid and builds Kirkwood-Rihaczek, Margenau-Hill, Wigner,
//!   sigma-ordered and arbitrary Cohen-class fields with FFTs;
//! * the Fock engine ([`fock`]) works with density matrices in a truncated
//!   number basis and evaluates sigma- and s-ordered functions through
//!   displaced operator traces, the Agarwal-Wolf transform, and the inverse
//!   map that reconstructs a density matrix from K-R samples.
//!
//! Both planes are linked by `alpha = (q + i p) / sqrt(2 hbar)`.

pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod parallel;
pub mod states;

pub use error::{Error, Result};
pub use grid::{integrate_2d, Axis, DistKind, MomentumField, PhaseField, PhaseGrid, Plane, PositionGrid, WaveField};
pub use num_complex::Complex64 as C64;
