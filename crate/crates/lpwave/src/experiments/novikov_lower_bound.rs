//! Spectral lower bounds for the power-law datum: pointwise domination of
//! the self-convolutions of `hat u0` and the normalized cubic block norms
//! `rho_j = 2^{sigma j} |Delta_j(u0^3)|_{L^2}`.
//!
//! The domination checks follow the convention `F(u^2) = hat u * hat u`
//! (no 2 pi): the discrete stand-in for the convolution integral is
//! `2 pi L c_m(u0^2)`, and `(2 pi)^2 L c_m(u0^3)` for the triple product.

use super::report::{CheckOutcome, ExperimentReport, SeriesRow};
use super::Thresholds;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::initial_data::{c_sigma, make_novikov_data, tail_energy_ratio, NovikovDataSpec};
use crate::littlewood_paley::{lp_block_spectral, DyadicPartition};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NovikovLowerBoundParams {
    pub sigma: f64,
    pub j_list: Vec<i32>,
}

impl Default for NovikovLowerBoundParams {
    fn default() -> Self {
        NovikovLowerBoundParams {
            sigma: 4.0,
            j_list: vec![4, 5, 6, 7, 8],
        }
    }
}

pub fn exp_novikov_lower_bound(
    grid: &Grid,
    params: &NovikovLowerBoundParams,
    thresholds: &Thresholds,
) -> Result<ExperimentReport> {
    if params.j_list.is_empty() {
        return Err(Error::InvalidParameter("empty block list".into()));
    }
    let part = DyadicPartition::build(grid)?;
    for &j in &params.j_list {
        if j > part.j_max() - 2 {
            return Err(Error::BlockOutOfBand {
                j,
                j_max: part.j_max() - 2,
            });
        }
    }
    let spec = NovikovDataSpec::new(params.sigma)?;
    let u0 = make_novikov_data(&spec, grid)?;
    let c = c_sigma(params.sigma)?;
    let l = grid.length();

    let u2 = u0.pointwise_mul(&u0);
    let u3 = u2.pointwise_mul(&u0);
    let hat2 = u2.forward_transform()?;
    let hat3 = u3.forward_transform()?;

    // pointwise domination on the dealiased bands
    let quad_cut = 2.0 / 3.0 * grid.max_freq();
    let cubic_cut = 0.5 * grid.max_freq();
    let mut dom2_min = f64::INFINITY;
    let mut dom3_min = f64::INFINITY;
    for idx in 0..grid.num_points() {
        let xi = grid.freq(idx).abs();
        if xi <= quad_cut {
            let conv = 2.0 * PI * l * hat2.coeffs()[idx].re;
            let floor = c * (2.0 + xi).powf(-params.sigma - 0.5);
            dom2_min = dom2_min.min(conv / floor);
        }
        if xi <= cubic_cut {
            let conv = (2.0 * PI).powi(2) * l * hat3.coeffs()[idx].re;
            let floor = c * c * (3.0 + xi).powf(-params.sigma - 0.5);
            dom3_min = dom3_min.min(conv / floor);
        }
    }

    // normalized cubic block norms
    let mut rows = Vec::new();
    let mut rho_min = f64::INFINITY;
    let mut rho_max: f64 = 0.0;
    for &j in &params.j_list {
        let rho = 2f64.powf(params.sigma * j as f64)
            * lp_block_spectral(&hat3, j, &part)?.l2_norm();
        rho_min = rho_min.min(rho);
        rho_max = rho_max.max(rho);
        rows.push(SeriesRow {
            index: j as f64,
            measured: rho,
            threshold: Some(thresholds.block_constant_min),
            pass: Some(rho >= thresholds.block_constant_min),
        });
    }
    let variation = if rho_min > 0.0 {
        rho_max / rho_min
    } else {
        f64::INFINITY
    };

    // mode-zero spot check: the convolution integral at xi = 0 is
    // int hat^2 d(eta), evaluated independently by quadrature over the
    // sampled spectrum
    let direct: f64 = (0..grid.num_points())
        .map(|idx| {
            let v = (1.0 + grid.freq(idx).abs()).powf(-params.sigma - 0.5);
            v * v * grid.freq_resolution()
        })
        .sum();
    let conv0 = 2.0 * PI * l * hat2.coeff(0).re;

    let mut report = ExperimentReport::new("novikov-lower-bound", grid);
    report.partition = Some(part.fingerprint());
    report.param("sigma", params.sigma);
    report.param("j_list", &params.j_list);
    report.param("c_sigma", c);
    report.param("thresholds", thresholds);
    report.param("tail_energy_ratio", tail_energy_ratio(&u0));
    report.param("conv_at_zero", conv0);
    report.param("quadrature_at_zero", direct);
    report.series("rho_j", rows);
    report.check(CheckOutcome::ge("quadratic_domination_min_ratio", dom2_min, 1.0));
    report.check(CheckOutcome::ge("cubic_domination_min_ratio", dom3_min, 1.0));
    report.check(CheckOutcome::ge(
        "min_cubic_block_constant",
        rho_min,
        thresholds.block_constant_min,
    ));
    report.check(CheckOutcome::le(
        "cubic_block_variation",
        variation,
        thresholds.cubic_constant_variation,
    ));
    report.check(CheckOutcome::le(
        "self_convolution_vs_quadrature",
        (conv0 - direct).abs() / direct,
        1e-6,
    ));
    report.note(format!(
        "periodization tail of the power-law datum: {:.3e} of total energy",
        tail_energy_ratio(&u0)
    ));
    Ok(report.finalize())
}
