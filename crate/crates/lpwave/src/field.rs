//! Real fields, their discrete Fourier representations, and the multiplier
//! calculus built on top of them.
//!
//! Transform normalization: the coefficient stored for wavenumber `m`
//! approximates `F f(xi_m) / L`, where `F f(xi) = int e^{-i xi x} f(x) dx`
//! is the continuum transform. Concretely
//!
//! ```text
//!   c_m = (-1)^m / N * sum_i f(x_i) e^{-2 pi i m i / N},
//! ```
//!
//! the `(-1)^m` accounting for the half-domain offset `x_0 = -L/2`. With this
//! choice a constant field has `c_0 = 1`, `cos(xi_m x)` has `c_{+-m} = 1/2`,
//! and the continuum transform is recovered as `L * c_m`. Parseval reads
//! `sum_i f(x_i)^2 dx = L * sum_m |c_m|^2`.

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;
use rustfft::num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Relative tolerance for the Hermitian-symmetry and imaginary-residue guards.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Lebesgue exponent: a finite `p >= 1` or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lp {
    Finite(f64),
    Infinity,
}

impl Lp {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Lp::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Lp::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Lp::Infinity)
    }
}

impl std::str::FromStr for Lp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "oo" => Ok(Lp::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("unreadable exponent {other:?}")))?;
                Lp::new(p)
            }
        }
    }
}

impl std::fmt::Display for Lp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Lp::Finite(p) => write!(f, "{p}"),
            Lp::Infinity => write!(f, "inf"),
        }
    }
}

/// A real-valued function sampled on a [`Grid`].
#[derive(Clone, Debug)]
pub struct RealField {
    grid: Grid,
    samples: Vec<f64>,
}

impl RealField {
    /// Wraps raw samples; rejects wrong lengths and non-finite entries.
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.num_points() {
            return Err(Error::InvalidParameter(format!(
                "sample count {} does not match grid size {}",
                samples.len(),
                grid.num_points()
            )));
        }
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(RealField { grid, samples })
    }

    pub fn zeros(grid: Grid) -> Self {
        RealField {
            grid,
            samples: vec![0.0; grid.num_points()],
        }
    }

    /// Samples `f(x_i)` of a closure on the grid.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let samples = (0..grid.num_points()).map(|i| f(grid.x(i))).collect();
        RealField::new(grid, samples)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Discrete Fourier coefficients under the documented normalization.
    pub fn forward_transform(&self) -> Result<SpectralField> {
        if !self.is_finite() {
            return Err(Error::NonFiniteField);
        }
        let n = self.grid.num_points();
        let mut buf: Vec<Complex64> = self
            .samples
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fft::fft_forward(&mut buf);
        let scale = 1.0 / n as f64;
        for (idx, c) in buf.iter_mut().enumerate() {
            let sign = if self.grid.wavenumber(idx) & 1 == 0 {
                scale
            } else {
                -scale
            };
            *c *= sign;
        }
        Ok(SpectralField {
            grid: self.grid,
            coeffs: buf,
        })
    }

    /// Rectangle-rule L^p norm: `(sum |f(x_i)|^p dx)^(1/p)`, or `max |f|` for
    /// p = infinity.
    pub fn lp_norm(&self, p: Lp) -> f64 {
        match p {
            Lp::Infinity => self.max_abs(),
            Lp::Finite(1.0) => {
                self.samples.iter().map(|v| v.abs()).sum::<f64>() * self.grid.dx()
            }
            Lp::Finite(2.0) => self.l2_norm(),
            Lp::Finite(p) => {
                let s: f64 = self.samples.iter().map(|v| v.abs().powf(p)).sum();
                (s * self.grid.dx()).powf(1.0 / p)
            }
        }
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.samples.iter().map(|v| v * v).sum();
        (s * self.grid.dx()).sqrt()
    }

    /// Pointwise product. Both factors must be bound to the same grid.
    pub fn pointwise_mul(&self, rhs: &RealField) -> RealField {
        assert_eq!(self.grid, rhs.grid, "pointwise product across grids");
        let samples = self
            .samples
            .iter()
            .zip(&rhs.samples)
            .map(|(a, b)| a * b)
            .collect();
        RealField {
            grid: self.grid,
            samples,
        }
    }

    /// `self + a * rhs`, the only compound update the integrator needs.
    pub fn axpy(&self, a: f64, rhs: &RealField) -> RealField {
        assert_eq!(self.grid, rhs.grid, "axpy across grids");
        let samples = self
            .samples
            .iter()
            .zip(&rhs.samples)
            .map(|(u, v)| u + a * v)
            .collect();
        RealField {
            grid: self.grid,
            samples,
        }
    }
}

impl Add for &RealField {
    type Output = RealField;
    fn add(self, rhs: &RealField) -> RealField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &RealField {
    type Output = RealField;
    fn sub(self, rhs: &RealField) -> RealField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &RealField {
    type Output = RealField;
    fn mul(self, a: f64) -> RealField {
        let samples = self.samples.iter().map(|v| a * v).collect();
        RealField {
            grid: self.grid,
            samples,
        }
    }
}

/// Fourier-side representation of a field; coefficients in FFT storage order.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.num_points() {
            return Err(Error::InvalidParameter(format!(
                "coefficient count {} does not match grid size {}",
                coeffs.len(),
                grid.num_points()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.num_points()],
        }
    }

    /// Builds a spectrum by sampling a continuum transform `hat(xi)`; the
    /// stored coefficients are `hat(xi_m) / L` per the crate normalization.
    pub fn from_continuum_hat(grid: Grid, hat: impl Fn(f64) -> f64) -> Result<Self> {
        let l = grid.length();
        let coeffs: Vec<Complex64> = (0..grid.num_points())
            .map(|idx| Complex64::new(hat(grid.freq(idx)) / l, 0.0))
            .collect();
        if !coeffs.iter().all(|c| c.re.is_finite()) {
            return Err(Error::NonFiniteField);
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient for integer wavenumber `m` (negative allowed).
    pub fn coeff(&self, m: i64) -> Complex64 {
        let n = self.grid.num_points() as i64;
        debug_assert!(m >= -n / 2 && m < n / 2);
        let idx = if m >= 0 { m } else { m + n } as usize;
        self.coeffs[idx]
    }

    /// Approximation to the continuum transform at `xi_m`, i.e. `L * c_m`.
    pub fn continuum_coeff(&self, m: i64) -> Complex64 {
        self.coeff(m) * self.grid.length()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc.max(c.norm()))
    }

    /// Spectral-side energy `L * sum |c_m|^2`; equals `sum f(x_i)^2 dx`.
    pub fn energy(&self) -> f64 {
        self.grid.length() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// Largest deviation from Hermitian symmetry, relative to the peak
    /// coefficient magnitude.
    pub fn asymmetry(&self) -> f64 {
        let n = self.grid.num_points();
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = self.coeffs[0].im.abs().max(self.coeffs[n / 2].im.abs());
        for m in 1..n / 2 {
            let dev = (self.coeffs[m] - self.coeffs[n - m].conj()).norm();
            worst = worst.max(dev);
        }
        worst / peak
    }

    /// Synthesis without the symmetry guards, for spectra whose Hermitian
    /// structure is preserved by construction (real even multipliers applied
    /// to an already-validated spectrum). The guarded entry point would
    /// reject noise-level fields whose asymmetry is pure roundoff.
    pub(crate) fn synthesize_unchecked(&self) -> RealField {
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                if self.grid.wavenumber(idx) & 1 == 0 {
                    *c
                } else {
                    -*c
                }
            })
            .collect();
        fft::fft_inverse(&mut buf);
        let samples = buf.iter().map(|c| c.re).collect();
        RealField {
            grid: self.grid,
            samples,
        }
    }

    /// Synthesizes the real samples. Requires Hermitian symmetry within
    /// [`SYMMETRY_TOL`]; the imaginary residue is verified before being
    /// discarded.
    pub fn inverse_transform(&self) -> Result<RealField> {
        let dev = self.asymmetry();
        if dev > SYMMETRY_TOL {
            return Err(Error::Asymmetry(dev));
        }
        let n = self.grid.num_points();
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                if self.grid.wavenumber(idx) & 1 == 0 {
                    *c
                } else {
                    -*c
                }
            })
            .collect();
        fft::fft_inverse(&mut buf);
        // rustfft leaves the inverse unnormalized; our coefficients already
        // carry the 1/N, so the plain sum is the synthesis.
        let mut peak_re: f64 = 0.0;
        let mut peak_im: f64 = 0.0;
        for c in &buf {
            peak_re = peak_re.max(c.re.abs());
            peak_im = peak_im.max(c.im.abs());
        }
        if peak_re > 0.0 && peak_im / peak_re > SYMMETRY_TOL {
            return Err(Error::ImaginaryResidue(peak_im / peak_re));
        }
        let samples = buf.iter().map(|c| c.re).collect();
        debug_assert_eq!(n, self.coeffs.len());
        RealField::new(self.grid, samples)
    }

    /// Scales each coefficient by `symbol(xi_m)`.
    pub fn apply_multiplier(&self, symbol: impl Fn(f64) -> Complex64) -> Result<SpectralField> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (idx, c) in self.coeffs.iter().enumerate() {
            let xi = self.grid.freq(idx);
            let s = symbol(xi);
            if !(s.re.is_finite() && s.im.is_finite()) {
                return Err(Error::NonFiniteSymbol(xi));
            }
            coeffs.push(c * s);
        }
        Ok(SpectralField {
            grid: self.grid,
            coeffs,
        })
    }

    /// Real-symbol variant of [`apply_multiplier`](Self::apply_multiplier).
    pub fn apply_real_multiplier(&self, symbol: impl Fn(f64) -> f64) -> Result<SpectralField> {
        self.apply_multiplier(|xi| Complex64::new(symbol(xi), 0.0))
    }

    /// d/dx as the `i xi` multiplier.
    pub fn derivative(&self) -> SpectralField {
        self.apply_multiplier(|xi| Complex64::new(0.0, xi))
            .expect("i*xi is finite on any grid")
    }

    /// `(1 - d^2/dx^2)^{-1}` as the `(1 + xi^2)^{-1}` multiplier.
    pub fn helmholtz_inverse(&self) -> SpectralField {
        self.apply_real_multiplier(|xi| 1.0 / (1.0 + xi * xi))
            .expect("Helmholtz symbol is finite on any grid")
    }

    /// Zeroes every mode with `|xi_m| > fraction * xi_max`.
    pub fn dealias(&self, fraction: f64) -> Result<SpectralField> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::DealiasFraction(fraction));
        }
        let cutoff = fraction * self.grid.max_freq();
        self.apply_real_multiplier(|xi| if xi.abs() > cutoff { 0.0 } else { 1.0 })
    }

    /// Relative spectral energy strictly above `fraction * xi_max`.
    pub fn energy_above(&self, fraction: f64) -> f64 {
        let cutoff = fraction * self.grid.max_freq();
        let total: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let above: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(idx, _)| self.grid.freq(*idx).abs() > cutoff)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        above / total
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        assert_eq!(self.grid, rhs.grid, "adding spectra across grids");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
        }
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        assert_eq!(self.grid, rhs.grid, "subtracting spectra across grids");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
        }
    }
}
