//! Periodic sampling grid standing in for the real line.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A periodic grid of `num_points` equispaced samples on `[-L/2, L/2)`.
///
/// The grid owns both the physical layout (`dx = L/N`) and the spectral one:
/// frequencies are `xi_m = m * 2*pi/L` for integer wavenumbers
/// `m in [-N/2, N/2)`, so the largest resolvable frequency is
/// `xi_max = pi * N / L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    length: f64,
    num_points: usize,
}

impl Grid {
    pub fn new(length: f64, num_points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::GridLength(length));
        }
        if num_points < 16 || !num_points.is_power_of_two() {
            return Err(Error::GridSize(num_points));
        }
        Ok(Grid { length, num_points })
    }

    /// Domain length L.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of samples N.
    pub fn num_points(&self) -> usize {
        self.num_points
    }

    /// Sample spacing dx = L/N.
    pub fn dx(&self) -> f64 {
        self.length / self.num_points as f64
    }

    /// Frequency spacing d(xi) = 2*pi/L.
    pub fn freq_resolution(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Largest resolvable frequency xi_max = pi*N/L.
    pub fn max_freq(&self) -> f64 {
        std::f64::consts::PI * self.num_points as f64 / self.length
    }

    /// Physical coordinate of sample `i`: x_i = -L/2 + i*dx.
    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.dx()
    }

    /// Integer wavenumber of the spectral coefficient stored at `idx`
    /// (FFT storage order: 0, 1, ..., N/2-1, -N/2, ..., -1).
    pub fn wavenumber(&self, idx: usize) -> i64 {
        let n = self.num_points as i64;
        let i = idx as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Physical frequency of the coefficient stored at `idx`.
    pub fn freq(&self, idx: usize) -> f64 {
        self.wavenumber(idx) as f64 * self.freq_resolution()
    }

    /// Nearest on-grid frequency to `target` (integer multiple of d(xi)).
    pub fn snap_freq(&self, target: f64) -> f64 {
        self.freq_resolution() * (target / self.freq_resolution()).round()
    }
}
