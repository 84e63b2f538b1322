//! Remainder scaling: the fitted order of `|w(t)|_{B^{sigma-2}}` in t must
//! be quadratic, and the first differences `|S_t(u0) - u0|` must be linear
//! in the three neighboring norms.

use super::report::{CheckOutcome, ExperimentReport, SeriesRow};
use super::{log_log_slope, Thresholds};
use crate::error::{Error, Result};
use crate::evolution::{evolve_difference, linear_predictor, EvolutionConfig};
use crate::field::Lp;
use crate::grid::Grid;
use crate::initial_data::{make_bump, make_ch_data, make_novikov_data, CHDataSpec, NovikovDataSpec};
use crate::littlewood_paley::{besov_norm_upto, BesovParams, DyadicPartition};
use crate::models::ModelKind;
use crate::RealField;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RemainderParams {
    pub model: ModelKind,
    pub sigma: f64,
    #[serde(with = "crate::experiments::ch_lower_bound::lp_serde")]
    pub p: Lp,
    /// Packet scale for the quadratic models' series datum.
    pub k: u32,
    pub n_max: u32,
    pub t_list: Vec<f64>,
}

impl RemainderParams {
    pub fn defaults_for(model: ModelKind) -> Self {
        RemainderParams {
            model,
            sigma: 4.0,
            p: Lp::Finite(2.0),
            k: 5,
            n_max: 2,
            t_list: default_t_list(),
        }
    }
}

/// Nine geometric samples spanning two decades.
pub fn default_t_list() -> Vec<f64> {
    (0..9).map(|i| 1e-5 * 10f64.powf(i as f64 / 4.0)).collect()
}

/// Builds the model's datum on the grid.
pub fn model_datum(grid: &Grid, model: ModelKind, sigma: f64, k: u32, n_max: u32) -> Result<RealField> {
    match model {
        ModelKind::Novikov => make_novikov_data(&NovikovDataSpec::new(sigma)?, grid),
        _ => {
            let bump = make_bump(grid)?;
            make_ch_data(&CHDataSpec::new(k, sigma, n_max)?, &bump)
        }
    }
}

pub fn exp_remainder_scaling(
    grid: &Grid,
    params: &RemainderParams,
    thresholds: &Thresholds,
) -> Result<ExperimentReport> {
    if params.t_list.len() < 2 {
        return Err(Error::Config(
            "remainder fit needs at least two sample times".into(),
        ));
    }
    let t_lo = params.t_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_hi = params.t_list.iter().cloned().fold(0.0, f64::max);
    if t_lo.is_nan() || t_lo <= 0.0 || t_hi / t_lo < 99.0 {
        return Err(Error::Config(format!(
            "sample times must span two decades; got [{t_lo:.3e}, {t_hi:.3e}]"
        )));
    }
    let part = DyadicPartition::build(grid)?;
    let u0 = model_datum(grid, params.model, params.sigma, params.k, params.n_max)?;
    let v0 = linear_predictor(&u0, params.model)?;
    // the power-law datum is not band-limited: cap its norms two blocks down
    let j_hi = match params.model {
        ModelKind::Novikov => part.j_max() - 2,
        _ => part.j_max(),
    };
    let cfg = EvolutionConfig {
        t_end: t_hi,
        ..EvolutionConfig::default()
    };

    let norm_of = |z: &RealField, s: f64| -> Result<f64> {
        besov_norm_upto(
            &z.forward_transform()?,
            &BesovParams::new(s, params.p, Lp::Infinity),
            &part,
            j_hi,
        )
    };

    let mut w_norms = Vec::new();
    let mut fd = [Vec::new(), Vec::new(), Vec::new()];
    for &t in &params.t_list {
        let z = evolve_difference(&u0, t, params.model, &cfg)?;
        let w = z.axpy(-t, &v0);
        w_norms.push(norm_of(&w, params.sigma - 2.0)?);
        for (offset, acc) in fd.iter_mut().enumerate() {
            acc.push(norm_of(&z, params.sigma - 3.0 + offset as f64)?);
        }
    }

    let w_slope = log_log_slope(&params.t_list, &w_norms);
    let fd_slopes: Vec<f64> = fd
        .iter()
        .map(|ys| log_log_slope(&params.t_list, ys))
        .collect();

    let mut report = ExperimentReport::new("remainder", grid);
    report.partition = Some(part.fingerprint());
    report.param("model", params.model.label());
    report.param("sigma", params.sigma);
    report.param("p", params.p.to_string());
    report.param("k", params.k);
    report.param("n_max", params.n_max);
    report.param("t_list", &params.t_list);
    report.param("thresholds", thresholds);
    report.param(
        "datum_tail_energy_ratio",
        crate::initial_data::tail_energy_ratio(&u0),
    );
    report.series(
        "remainder_norm",
        params
            .t_list
            .iter()
            .zip(&w_norms)
            .map(|(&t, &v)| SeriesRow {
                index: t,
                measured: v,
                threshold: None,
                pass: None,
            })
            .collect(),
    );
    for (offset, ys) in fd.iter().enumerate() {
        report.series(
            format!("first_difference_s{}", offset as i64 - 3),
            params
                .t_list
                .iter()
                .zip(ys)
                .map(|(&t, &v)| SeriesRow {
                    index: t,
                    measured: v,
                    threshold: None,
                    pass: None,
                })
                .collect(),
        );
    }
    let (lo, hi) = thresholds.remainder_slope;
    report.check(CheckOutcome::within("remainder_slope", w_slope, lo, hi));
    let (flo, fhi) = thresholds.first_difference_slope;
    for (offset, s) in fd_slopes.iter().enumerate() {
        report.check(CheckOutcome::within(
            format!("first_difference_slope_s{}", offset as i64 - 3),
            *s,
            flo,
            fhi,
        ));
    }
    Ok(report.finalize())
}
