//! Numerical laboratory for Littlewood-Paley analysis and pseudo-spectral
//! evolution of the Camassa-Holm family and the Novikov equation.
//!
//! The crate is organized around a handful of layers:
//!
//! * [`grid`] / [`field`]: a periodic grid standing in for the real line,
//!   real fields, their discrete Fourier representations, and the Fourier
//!   multiplier calculus (derivative, Helmholtz inverse, dealiasing).
//! * [`littlewood_paley`]: the dyadic partition of unity, frequency blocks
//!   `Delta_j`, and discrete Besov norms `B^s_{p,r}`.
//! * [`initial_data`]: the explicit data: a spectral bump, modulated wave
//!   packets, the geometric packet series, and the power-law spectrum datum.
//! * [`models`] / [`evolution`]: nonlocal sources, full tendencies, and a
//!   Runge-Kutta solution map with conservation diagnostics.
//! * [`experiments`]: executable verifications producing structured
//!   reports with measured constants and pass/fail verdicts.

pub mod error;
pub mod evolution;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod initial_data;
pub mod littlewood_paley;
pub mod models;
pub mod testkit;

mod fft;

pub use error::{Error, Result};
pub use field::{Lp, RealField, SpectralField};
pub use grid::Grid;
pub use littlewood_paley::{BesovParams, DyadicPartition};
pub use models::ModelKind;
