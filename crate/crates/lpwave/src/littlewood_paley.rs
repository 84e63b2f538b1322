//! Dyadic partition of unity, frequency blocks, and Besov norms.
//!
//! The partition is built from a single low-pass profile `theta`:
//! `theta = 1` on `|xi| <= 3/4`, `theta = 0` on `|xi| >= 4/3`, with a smooth
//! `exp(-1/t)` ramp in between. Then `chi = theta` and
//! `phi(xi) = theta(xi/2) - theta(xi)`, which makes the block sum telescope:
//! `chi(xi) + sum_{j<=J} phi(2^-j xi) = theta(2^-(J+1) xi)`. The telescoping
//! holds exactly in floating point because consecutive levels evaluate
//! `theta` at the identical argument, so the partition residual on the
//! covered band is zero to the last bit. `phi == 1` exactly on
//! `4/3 <= |xi| <= 3/2`.

use crate::error::{Error, Result};
use crate::field::{Lp, RealField, SpectralField};
use crate::grid::Grid;
use rand::Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`, `C^infinity` in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Low-pass profile: 1 on `|a| <= 3/4`, 0 on `|a| >= 4/3`.
fn lowpass(a: f64) -> f64 {
    let a = a.abs();
    if a <= 0.75 {
        1.0
    } else if a >= 4.0 / 3.0 {
        0.0
    } else {
        smooth_step((4.0 / 3.0 - a) / (7.0 / 12.0))
    }
}

/// Low-frequency profile `chi`, supported in `|xi| <= 4/3`.
pub fn chi_profile(xi: f64) -> f64 {
    lowpass(xi)
}

/// Annular profile `phi`, supported in `3/4 <= |xi| <= 8/3` and equal to 1
/// on `4/3 <= |xi| <= 3/2`.
pub fn phi_profile(xi: f64) -> f64 {
    lowpass(xi * 0.5) - lowpass(xi)
}

/// Summary of the partition recorded in every report for reproducibility.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionFingerprint {
    pub profile: String,
    pub j_max: i32,
    pub max_residual: f64,
}

/// The filter bank `(chi, phi(2^-j .))` realized as per-block multiplier
/// tables on a fixed grid. Immutable and freely shareable.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: Grid,
    j_max: i32,
    /// masks[0] is the chi block (j = -1); masks[j+1] is block j.
    masks: Vec<Vec<f64>>,
}

impl DyadicPartition {
    /// Builds the partition; `j_max = floor(log2(xi_max * 3/8))` so the last
    /// block's support still fits the grid band.
    #[allow(clippy::needless_range_loop)] // two mask rows are written per frequency
    pub fn build(grid: &Grid) -> Result<Self> {
        let j_max_f = (grid.max_freq() * 3.0 / 8.0).log2().floor();
        if !j_max_f.is_finite() || j_max_f < 0.0 {
            return Err(Error::Resolution(format!(
                "max frequency {:.3} leaves no room for block 0",
                grid.max_freq()
            )));
        }
        let j_max = j_max_f as i32;
        let n = grid.num_points();
        let mut masks = vec![vec![0.0; n]; (j_max + 2) as usize];
        for idx in 0..n {
            let xi = grid.freq(idx);
            masks[0][idx] = lowpass(xi);
            let mut theta_j = masks[0][idx];
            let mut scale = 0.5;
            for j in 0..=j_max {
                // phi(2^-j xi) = theta(2^-(j+1) xi) - theta(2^-j xi); the
                // halved argument is exact, so the sum telescopes exactly.
                let theta_next = lowpass(xi * scale);
                masks[(j + 1) as usize][idx] = theta_next - theta_j;
                theta_j = theta_next;
                scale *= 0.5;
            }
        }
        Ok(DyadicPartition {
            grid: *grid,
            j_max,
            masks,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Frequencies up to this value are covered by blocks `-1..=j_max`.
    pub fn covered_band(&self) -> f64 {
        0.75 * 2f64.powi(self.j_max)
    }

    /// Multiplier table for block `j` (`-1 <= j <= j_max`).
    pub fn block_mask(&self, j: i32) -> Result<&[f64]> {
        if j > self.j_max {
            return Err(Error::BlockOutOfBand {
                j,
                j_max: self.j_max,
            });
        }
        if j < -1 {
            return Err(Error::BlockOutOfBand {
                j,
                j_max: self.j_max,
            });
        }
        Ok(&self.masks[(j + 1) as usize])
    }

    /// Measured partition-of-unity residual over the covered band, plus the
    /// profile description.
    pub fn fingerprint(&self) -> PartitionFingerprint {
        let band = self.covered_band();
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.num_points() {
            if self.grid.freq(idx).abs() <= band {
                let sum: f64 = self.masks.iter().map(|m| m[idx]).sum();
                worst = worst.max((sum - 1.0).abs());
            }
        }
        PartitionFingerprint {
            profile: "exp(-1/t) smooth step; chi supp |xi|<=4/3, phi ramps on [3/4,4/3] and [3/2,8/3]"
                .to_string(),
            j_max: self.j_max,
            max_residual: worst,
        }
    }
}

/// Applies the block multiplier in frequency space. `j <= -2` gives the zero
/// spectrum by definition; `j > j_max` is an error.
pub fn lp_block_spectral(
    f: &SpectralField,
    j: i32,
    part: &DyadicPartition,
) -> Result<SpectralField> {
    if f.grid() != part.grid() {
        return Err(Error::GridMismatch);
    }
    if j <= -2 {
        return Ok(SpectralField::zeros(f.grid()));
    }
    let mask = part.block_mask(j)?;
    let coeffs = f
        .coeffs()
        .iter()
        .zip(mask)
        .map(|(c, m)| c * m)
        .collect();
    SpectralField::new(f.grid(), coeffs)
}

/// The block `Delta_j u` as a real field. The masks are even and real, so
/// the block inherits the input's Hermitian symmetry and skips the guard
/// (which would misfire on blocks holding only roundoff noise).
pub fn lp_block(u: &RealField, j: i32, part: &DyadicPartition) -> Result<RealField> {
    Ok(lp_block_spectral(&u.forward_transform()?, j, part)?.synthesize_unchecked())
}

/// Besov indices `(s, p, r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovParams {
    pub s: f64,
    pub p: Lp,
    pub r: Lp,
}

impl BesovParams {
    pub fn new(s: f64, p: Lp, r: Lp) -> Self {
        BesovParams { s, p, r }
    }
}

fn block_lp_norm(
    spec: &SpectralField,
    j: i32,
    part: &DyadicPartition,
    p: Lp,
) -> Result<f64> {
    let blk = lp_block_spectral(spec, j, part)?;
    // For p = 2 Parseval gives the norm directly from the masked modes.
    match p {
        Lp::Finite(2.0) => Ok(blk.l2_norm()),
        _ => Ok(blk.synthesize_unchecked().lp_norm(p)),
    }
}

/// Discrete `B^s_{p,r}` norm over blocks `-1..=j_hi`.
pub fn besov_norm_upto(
    spec: &SpectralField,
    bp: &BesovParams,
    part: &DyadicPartition,
    j_hi: i32,
) -> Result<f64> {
    if j_hi > part.j_max() {
        return Err(Error::BlockOutOfBand {
            j: j_hi,
            j_max: part.j_max(),
        });
    }
    let top_edge = 8.0 / 3.0 * 2f64.powi(part.j_max());
    let beyond = spec.energy_above(top_edge / spec.grid().max_freq());
    if beyond > 1e-8 {
        log::warn!(
            "Besov norm of a field with relative energy {beyond:.3e} above the last block; \
             the discrete norm undercounts it"
        );
    }
    let mut sup: f64 = 0.0;
    let mut acc: f64 = 0.0;
    for j in -1..=j_hi {
        let term = 2f64.powf(bp.s * j as f64) * block_lp_norm(spec, j, part, bp.p)?;
        match bp.r {
            Lp::Infinity => sup = sup.max(term),
            Lp::Finite(r) => acc += term.powf(r),
        }
    }
    Ok(match bp.r {
        Lp::Infinity => sup,
        Lp::Finite(r) => acc.powf(1.0 / r),
    })
}

/// Discrete `B^s_{p,r}` norm over every representable block.
pub fn besov_norm_spectral(
    spec: &SpectralField,
    bp: &BesovParams,
    part: &DyadicPartition,
) -> Result<f64> {
    besov_norm_upto(spec, bp, part, part.j_max())
}

/// Physical-side entry point for the Besov norm.
pub fn besov_norm(u: &RealField, bp: &BesovParams, part: &DyadicPartition) -> Result<f64> {
    besov_norm_spectral(&u.forward_transform()?, bp, part)
}

/// A random real field with Hermitian spectrum supported in
/// `|xi| <= band_fraction * xi_max` and coefficients damped like
/// `(1 + |xi|)^(-decay)`.
pub fn random_band_limited(
    grid: &Grid,
    rng: &mut impl Rng,
    band_fraction: f64,
    decay: f64,
) -> Result<RealField> {
    let n = grid.num_points();
    let cutoff = band_fraction * grid.max_freq();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    coeffs[0] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
    for m in 1..n / 2 {
        let xi = m as f64 * grid.freq_resolution();
        if xi > cutoff {
            break;
        }
        let amp = (1.0 + xi).powf(-decay);
        let c = Complex64::new(
            amp * rng.gen_range(-1.0..1.0),
            amp * rng.gen_range(-1.0..1.0),
        );
        coeffs[m] = c;
        coeffs[n - m] = c.conj();
    }
    SpectralField::new(*grid, coeffs)?.inverse_transform()
}

/// Measured constant of one product-estimate sample:
/// `|uv|_{B^{s-2}_{p,r}} / (|u|_{B^{s-2}_{p,r}} |v|_{B^{s-1}_{p,r}})`.
pub fn product_ratio(
    u: &RealField,
    v: &RealField,
    bp: &BesovParams,
    part: &DyadicPartition,
) -> Result<f64> {
    let low = BesovParams::new(bp.s - 2.0, bp.p, bp.r);
    let mid = BesovParams::new(bp.s - 1.0, bp.p, bp.r);
    let nu = besov_norm(u, &low, part)?;
    let nv = besov_norm(v, &mid, part)?;
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    let nuv = besov_norm(&u.pointwise_mul(v), &low, part)?;
    Ok(nuv / (nu * nv))
}

/// Measured constant of one algebra sample:
/// `|uv|_{B^s} / (|u|_{B^s} |v|_inf + |v|_{B^s} |u|_inf)`.
pub fn algebra_ratio(
    u: &RealField,
    v: &RealField,
    bp: &BesovParams,
    part: &DyadicPartition,
) -> Result<f64> {
    let nu = besov_norm(u, bp, part)?;
    let nv = besov_norm(v, bp, part)?;
    let denom = nu * v.max_abs() + nv * u.max_abs();
    if denom == 0.0 {
        return Ok(0.0);
    }
    let nuv = besov_norm(&u.pointwise_mul(v), bp, part)?;
    Ok(nuv / denom)
}

/// Empirical constants from random band-limited pairs. The constants are
/// reported, not asserted against any theoretical value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductProbe {
    pub samples: usize,
    pub max_product_ratio: f64,
    pub max_algebra_ratio: f64,
}

pub fn product_estimate_probe(
    count: usize,
    bp: &BesovParams,
    part: &DyadicPartition,
    seed: u64,
) -> Result<ProductProbe> {
    let p_val = match bp.p {
        Lp::Finite(p) => p,
        Lp::Infinity => f64::INFINITY,
    };
    if bp.s <= (1.0 + 1.0 / p_val).max(1.5) {
        return Err(Error::InvalidParameter(format!(
            "product probe needs s > max(1 + 1/p, 3/2); got s = {}",
            bp.s
        )));
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut probe = ProductProbe {
        samples: count,
        max_product_ratio: 0.0,
        max_algebra_ratio: 0.0,
    };
    for _ in 0..count {
        let u = random_band_limited(&part.grid(), &mut rng, 0.25, bp.s + 0.5)?;
        let v = random_band_limited(&part.grid(), &mut rng, 0.25, bp.s + 0.5)?;
        probe.max_product_ratio = probe.max_product_ratio.max(product_ratio(&u, &v, bp, part)?);
        probe.max_algebra_ratio = probe.max_algebra_ratio.max(algebra_ratio(&u, &v, bp, part)?);
    }
    Ok(probe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn setup() -> (Grid, DyadicPartition) {
        let grid = Grid::new(128.0, 1 << 12).unwrap();
        let part = DyadicPartition::build(&grid).unwrap();
        (grid, part)
    }

    #[test]
    fn partition_of_unity_residual_is_tiny() {
        let (_, part) = setup();
        let fp = part.fingerprint();
        assert!(fp.max_residual <= 1e-12, "residual {}", fp.max_residual);
    }

    #[test]
    fn squared_sum_stays_in_half_one() {
        let (grid, part) = setup();
        let band = part.covered_band();
        for idx in 0..grid.num_points() {
            let xi = grid.freq(idx);
            if xi.abs() > band {
                continue;
            }
            let mut sq = chi_profile(xi).powi(2);
            for j in 0..=part.j_max() {
                sq += phi_profile(xi / 2f64.powi(j)).powi(2);
            }
            assert!((0.5..=1.0 + 1e-12).contains(&sq), "xi={xi} sq={sq}");
        }
        // the spot value named in the construction
        let mut sq1 = chi_profile(1.0).powi(2);
        for j in 0..=part.j_max() {
            sq1 += phi_profile(1.0 / 2f64.powi(j)).powi(2);
        }
        assert!((0.5..=1.0).contains(&sq1));
    }

    #[test]
    fn phi_plateau_is_exact() {
        assert_eq!(phi_profile(1.4), 1.0);
        assert_eq!(phi_profile(4.0 / 3.0), 1.0);
        assert_eq!(phi_profile(1.5), 1.0);
        assert_eq!(phi_profile(-1.45), 1.0);
        // support edges
        assert_eq!(phi_profile(0.7), 0.0);
        assert_eq!(phi_profile(2.7), 0.0);
        assert_eq!(chi_profile(1.34), 0.0);
        assert_eq!(chi_profile(0.5), 1.0);
    }

    #[test]
    fn too_coarse_grid_is_rejected() {
        // xi_max = pi*16/64 < 8/3: no room for block 0
        let grid = Grid::new(64.0, 16).unwrap();
        assert!(matches!(
            DyadicPartition::build(&grid),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn blocks_of_zero_are_zero_and_bad_j_errors() {
        let (grid, part) = setup();
        let zero = RealField::zeros(grid);
        for j in [-3, -1, 0, 3] {
            let b = lp_block(&zero, j, &part).unwrap();
            assert_eq!(b.max_abs(), 0.0);
        }
        assert!(matches!(
            lp_block(&zero, part.j_max() + 1, &part),
            Err(Error::BlockOutOfBand { .. })
        ));
    }

    #[test]
    fn reconstruction_and_quasi_orthogonality() {
        let (grid, part) = setup();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            // keep the band inside the partition's coverage (3/2 * 2^j_max)
            let u = random_band_limited(&grid, &mut rng, 0.3, 1.0).unwrap();
            let spec = u.forward_transform().unwrap();
            let mut sum = RealField::zeros(grid);
            for j in -1..=part.j_max() {
                sum = &sum + &lp_block_spectral(&spec, j, &part).unwrap().inverse_transform().unwrap();
            }
            let err = (&sum - &u).max_abs();
            assert!(err <= 1e-12 * u.max_abs().max(1.0), "err {err}");

            // far-apart blocks have disjoint supports
            for (j, jp) in [(-1, 1), (0, 2), (1, 4), (3, 5)] {
                let bj = lp_block_spectral(&spec, j, &part).unwrap();
                let both = lp_block_spectral(&bj, jp, &part).unwrap();
                assert!(both.max_abs() <= 1e-12 * spec.max_abs());
            }
        }
    }

    #[test]
    fn besov_norm_of_zero_is_zero() {
        let (grid, part) = setup();
        let bp = BesovParams::new(2.0, Lp::Finite(2.0), Lp::Infinity);
        assert_eq!(besov_norm(&RealField::zeros(grid), &bp, &part).unwrap(), 0.0);
    }

    #[test]
    fn single_block_field_has_explicit_norm() {
        let (grid, part) = setup();
        // a pure mode on the plateau of block 4: xi = 1.4 * 16
        let xi = grid.snap_freq(1.4 * 16.0);
        let u = RealField::from_fn(grid, |x| (xi * x).cos()).unwrap();
        let s = 1.7;
        let bp = BesovParams::new(s, Lp::Finite(2.0), Lp::Infinity);
        let norm = besov_norm(&u, &bp, &part).unwrap();
        let expect = 2f64.powf(s * 4.0) * u.lp_norm(Lp::Finite(2.0));
        assert_relative_eq!(norm, expect, max_relative = 1e-10);
    }

    #[test]
    fn p2_path_agrees_with_physical_path() {
        let (grid, part) = setup();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let u = random_band_limited(&grid, &mut rng, 0.5, 1.5).unwrap();
        let spec = u.forward_transform().unwrap();
        for j in -1..=part.j_max() {
            let fast = block_lp_norm(&spec, j, &part, Lp::Finite(2.0)).unwrap();
            let slow = lp_block_spectral(&spec, j, &part)
                .unwrap()
                .inverse_transform()
                .unwrap()
                .l2_norm();
            assert_relative_eq!(fast, slow, max_relative = 1e-11, epsilon = 1e-14);
        }
    }

    #[test]
    fn embedding_for_high_frequency_fields() {
        let (grid, part) = setup();
        // dominant block at j = 4 so the embedding holds without a constant
        let xi = grid.snap_freq(1.45 * 16.0);
        let u = RealField::from_fn(grid, |x| (xi * x).cos() * (-x * x / 100.0).exp()).unwrap();
        let hi = besov_norm(&u, &BesovParams::new(2.5, Lp::Finite(2.0), Lp::Finite(2.0)), &part).unwrap();
        let lo = besov_norm(&u, &BesovParams::new(1.5, Lp::Finite(2.0), Lp::Infinity), &part).unwrap();
        assert!(lo <= hi, "lo {lo} hi {hi}");
    }

    #[test]
    fn b0_22_is_equivalent_to_l2() {
        let (grid, part) = setup();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        let bp = BesovParams::new(0.0, Lp::Finite(2.0), Lp::Finite(2.0));
        for _ in 0..5 {
            let u = random_band_limited(&grid, &mut rng, 0.4, 1.0).unwrap();
            let b = besov_norm(&u, &bp, &part).unwrap();
            let l2 = u.l2_norm();
            assert!(b <= l2 * (1.0 + 1e-10), "b {b} l2 {l2}");
            assert!(b >= l2 / 2f64.sqrt() * (1.0 - 1e-10), "b {b} l2 {l2}");
        }
    }

    #[test]
    fn monotone_in_s_for_high_frequency_fields() {
        let (grid, part) = setup();
        let xi = grid.snap_freq(1.45 * 32.0);
        let u = RealField::from_fn(grid, |x| (xi * x).cos() * (-x * x / 64.0).exp()).unwrap();
        let mut prev = 0.0;
        for s in [0.5, 1.0, 2.0, 3.0] {
            let b = besov_norm(&u, &BesovParams::new(s, Lp::Finite(2.0), Lp::Infinity), &part).unwrap();
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn product_probe_reports_finite_constants() {
        let (grid, part) = setup();
        let bp = BesovParams::new(4.0, Lp::Finite(2.0), Lp::Infinity);
        let probe = product_estimate_probe(100, &bp, &part, 1234).unwrap();
        assert!(probe.max_product_ratio.is_finite() && probe.max_product_ratio > 0.0);
        assert!(probe.max_algebra_ratio.is_finite() && probe.max_algebra_ratio > 0.0);

        // zero factor gives a zero ratio
        let zero = RealField::zeros(grid);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let v = random_band_limited(&grid, &mut rng, 0.25, 4.5).unwrap();
        assert_eq!(product_ratio(&zero, &v, &bp, &part).unwrap(), 0.0);

        // a single low-frequency bump against itself is finite and positive
        let u = RealField::from_fn(grid, |x| (-x * x).exp()).unwrap();
        let r = product_ratio(&u, &u, &bp, &part).unwrap();
        assert!(r.is_finite() && r > 0.0);

        // s below the admissible range is rejected
        let bad = BesovParams::new(1.2, Lp::Finite(2.0), Lp::Infinity);
        assert!(product_estimate_probe(1, &bad, &part, 0).is_err());
    }

    #[test]
    fn probe_constant_is_stable_under_resolution_doubling() {
        // the same spectral data embedded on N and 2N grids; the measured
        // constants should move only at the discretization level
        let coarse = Grid::new(128.0, 1 << 11).unwrap();
        let fine = Grid::new(128.0, 1 << 12).unwrap();
        let pc = DyadicPartition::build(&coarse).unwrap();
        let pf = DyadicPartition::build(&fine).unwrap();
        let bp = BesovParams::new(4.0, Lp::Finite(2.0), Lp::Infinity);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let uc = random_band_limited(&coarse, &mut rng, 0.25, bp.s + 0.5).unwrap();
            let vc = random_band_limited(&coarse, &mut rng, 0.25, bp.s + 0.5).unwrap();
            // embed the identical modes on the fine grid
            let embed = |u: &RealField| {
                let spec = u.forward_transform().unwrap();
                let mut coeffs = vec![Complex64::new(0.0, 0.0); fine.num_points()];
                let nc = coarse.num_points();
                for idx in 0..nc {
                    let m = coarse.wavenumber(idx);
                    let fidx = if m >= 0 {
                        m as usize
                    } else {
                        (m + fine.num_points() as i64) as usize
                    };
                    coeffs[fidx] = spec.coeffs()[idx];
                }
                SpectralField::new(fine, coeffs)
                    .unwrap()
                    .inverse_transform()
                    .unwrap()
            };
            let rc = product_ratio(&uc, &vc, &bp, &pc).unwrap();
            let rf = product_ratio(&embed(&uc), &embed(&vc), &bp, &pf).unwrap();
            worst = worst.max((rf - rc).abs() / rc.max(1e-300));
        }
        assert!(worst < 0.05, "relative drift {worst}");
    }
}
