//! Reference implementations used as oracles in tests: direct `O(N^2)`
//! transforms and spectral convolutions, kept independent of the FFT path.

use crate::field::RealField;
use crate::grid::Grid;
use rustfft::num_complex::Complex64;

/// Direct-summation forward transform under the crate normalization.
pub fn slow_forward(f: &RealField) -> Vec<Complex64> {
    let g = f.grid();
    let n = g.num_points();
    (0..n)
        .map(|idx| {
            let xi = g.freq(idx);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += f.samples()[i] * Complex64::new(0.0, -xi * g.x(i)).exp();
            }
            acc / n as f64
        })
        .collect()
}

/// Direct-summation synthesis; imaginary parts are dropped.
pub fn slow_inverse(grid: &Grid, coeffs: &[Complex64]) -> RealField {
    let n = grid.num_points();
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let x = grid.x(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, c) in coeffs.iter().enumerate() {
                acc += c * Complex64::new(0.0, grid.freq(idx) * x).exp();
            }
            acc.re
        })
        .collect();
    RealField::new(*grid, samples).expect("oracle synthesis produced non-finite samples")
}

/// Circular convolution over integer wavenumbers: the spectrum of the
/// pointwise product of the two synthesized fields.
pub fn convolve(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = grid.num_points();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += a[j] * b[(m + n - j) % n];
        }
        *slot = acc;
    }
    out
}

fn mask(grid: &Grid, fraction: f64, coeffs: &mut [Complex64]) {
    let cutoff = fraction * grid.max_freq();
    for (idx, c) in coeffs.iter_mut().enumerate() {
        if grid.freq(idx).abs() > cutoff {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// The quadratic source evaluated entirely by direct transforms and
/// convolutions.
pub fn source_p_oracle(u: &RealField) -> RealField {
    source_b_oracle(u, 2.0)
}

pub fn source_b_oracle(u: &RealField, b: f64) -> RealField {
    let g = u.grid();
    let fraction = 2.0 / 3.0;
    let mut uhat = slow_forward(u);
    mask(&g, fraction, &mut uhat);
    let uxhat: Vec<Complex64> = uhat
        .iter()
        .enumerate()
        .map(|(idx, c)| c * Complex64::new(0.0, g.freq(idx)))
        .collect();
    let uu = convolve(&g, &uhat, &uhat);
    let dd = convolve(&g, &uxhat, &uxhat);
    let mut out: Vec<Complex64> = (0..g.num_points())
        .map(|idx| {
            let xi = g.freq(idx);
            let q = 0.5 * b * uu[idx] + 0.5 * (3.0 - b) * dd[idx];
            q * Complex64::new(0.0, -xi) / (1.0 + xi * xi)
        })
        .collect();
    mask(&g, fraction, &mut out);
    slow_inverse(&g, &out)
}

/// The cubic source evaluated entirely by direct transforms and convolutions.
pub fn source_q_oracle(u: &RealField) -> RealField {
    let g = u.grid();
    let fraction = 0.5;
    let mut uhat = slow_forward(u);
    mask(&g, fraction, &mut uhat);
    let uxhat: Vec<Complex64> = uhat
        .iter()
        .enumerate()
        .map(|(idx, c)| c * Complex64::new(0.0, g.freq(idx)))
        .collect();
    let uxux = convolve(&g, &uxhat, &uxhat);
    let ux3 = convolve(&g, &uxux, &uxhat);
    let u_uxux = convolve(&g, &uhat, &uxux);
    let uu = convolve(&g, &uhat, &uhat);
    let u3 = convolve(&g, &uu, &uhat);
    let mut out: Vec<Complex64> = (0..g.num_points())
        .map(|idx| {
            let xi = g.freq(idx);
            let inner = 0.5 * ux3[idx]
                + Complex64::new(0.0, xi) * (1.5 * u_uxux[idx] + u3[idx]);
            -inner / (1.0 + xi * xi)
        })
        .collect();
    mask(&g, fraction, &mut out);
    slow_inverse(&g, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralField;

    #[test]
    fn squared_packet_after_dealias_matches_convolution() {
        // a packet at 0.4 xi_max; its square lives at 0.8 xi_max and must be
        // removed by the 2/3 cutoff in both routes
        let g = Grid::new(128.0, 128).unwrap();
        let center = g.snap_freq(0.4 * g.max_freq());
        let width = 4.0 * g.freq_resolution();
        let spec = SpectralField::from_continuum_hat(g, |xi| {
            let d = (xi.abs() - center).abs() / width;
            if d < 1.0 {
                (1.0 - d * d).powi(2)
            } else {
                0.0
            }
        })
        .unwrap();
        let u = spec.inverse_transform().unwrap();
        let sq = u.pointwise_mul(&u);
        let pipeline = sq
            .forward_transform()
            .unwrap()
            .dealias(2.0 / 3.0)
            .unwrap();
        let mut oracle = convolve(&g, &slow_forward(&u), &slow_forward(&u));
        mask(&g, 2.0 / 3.0, &mut oracle);
        let peak = pipeline.max_abs().max(1e-300);
        for (a, b) in pipeline.coeffs().iter().zip(&oracle) {
            assert!((a - b).norm() <= 1e-10 * peak);
        }
        // doubled-frequency content really was above the cutoff
        let retained = pipeline.energy_above(0.5);
        assert!(retained < 1e-20, "content above 0.5 xi_max: {retained}");
        let raw = sq.forward_transform().unwrap().energy_above(2.0 / 3.0);
        assert!(raw > 1e-6, "the square should populate 0.8 xi_max: {raw}");
    }
}
