//! The discontinuity mechanism: along `t_n = eps * 2^{-kn}` the displacement
//! `S_{t_n}(u0) - u0` keeps a uniform `B^sigma` size of order eps, while a
//! smooth low-frequency control datum relaxes linearly to zero.
//!
//! For the packet-series models the run at scale `n` uses the series
//! truncated at `n`: with a fixed truncation the top block dominates the
//! norm at every earlier scale and masks the per-scale mechanism. For the
//! power-law datum no truncation exists, so the gate is the block-level
//! displacement `2^{j sigma} |Delta_j(S_t(u0) - u0)|_{L^2}` (the exact
//! quantity the estimate bounds from below), with the full norm recorded
//! alongside.

use super::report::{CheckOutcome, ExperimentReport, SeriesRow};
use super::{log_log_slope, Thresholds};
use crate::error::{Error, Result};
use crate::evolution::{evolve_difference, EvolutionConfig};
use crate::field::Lp;
use crate::grid::Grid;
use crate::initial_data::{make_bump, make_ch_data, make_novikov_data, make_packet, CHDataSpec, NovikovDataSpec, PacketSpec};
use crate::littlewood_paley::{besov_norm_upto, lp_block_spectral, BesovParams, DyadicPartition};
use crate::models::ModelKind;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscontinuityParams {
    pub model: ModelKind,
    pub sigma: f64,
    #[serde(with = "crate::experiments::ch_lower_bound::lp_serde")]
    pub p: Lp,
    /// Packet scale step for the series models (ignored for the power law).
    pub k: u32,
    /// Tested scales: packet indices `n` for the series models, block
    /// indices `j` for the power law.
    pub scales: Vec<u32>,
    pub epsilon: f64,
}

impl DiscontinuityParams {
    pub fn defaults_for(model: ModelKind) -> Self {
        match model {
            ModelKind::Novikov => DiscontinuityParams {
                model,
                sigma: 4.0,
                p: Lp::Finite(2.0),
                k: 5,
                scales: vec![6, 8],
                epsilon: 0.05,
            },
            _ => DiscontinuityParams {
                model,
                sigma: 4.0,
                p: Lp::Finite(2.0),
                k: 5,
                scales: vec![1, 2],
                epsilon: 0.05,
            },
        }
    }
}

pub fn exp_discontinuity(
    grid: &Grid,
    params: &DiscontinuityParams,
    thresholds: &Thresholds,
) -> Result<ExperimentReport> {
    if params.scales.is_empty() {
        return Err(Error::InvalidParameter("empty scale list".into()));
    }
    if !(params.epsilon >= 0.0 && params.epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {}",
            params.epsilon
        )));
    }
    if matches!(params.model, ModelKind::Novikov) && params.p != Lp::Finite(2.0) {
        return Err(Error::InvalidParameter(
            "the power-law datum is built for p = 2 only".into(),
        ));
    }
    let part = DyadicPartition::build(grid)?;
    let bump = make_bump(grid)?;
    let eps = params.epsilon;
    let bp = BesovParams::new(params.sigma, params.p, Lp::Infinity);
    let j_hi = match params.model {
        ModelKind::Novikov => part.j_max() - 2,
        _ => part.j_max(),
    };

    let mut gated = Vec::new();
    let mut rows_gated = Vec::new();
    let mut rows_full = Vec::new();
    let mut t_list = Vec::new();
    for &scale in &params.scales {
        let (u0, block) = match params.model {
            ModelKind::Novikov => (
                make_novikov_data(&NovikovDataSpec::new(params.sigma)?, grid)?,
                scale as i32,
            ),
            _ => (
                // the scale-n prefix of the series
                make_ch_data(&CHDataSpec::new(params.k, params.sigma, scale)?, &bump)?,
                (params.k * scale) as i32,
            ),
        };
        if block > j_hi {
            return Err(Error::BlockOutOfBand { j: block, j_max: j_hi });
        }
        let t = eps * 2f64.powi(-block);
        t_list.push(t);
        let cfg = EvolutionConfig {
            t_end: t.max(1e-30),
            ..EvolutionConfig::default()
        };
        let z = evolve_difference(&u0, t, params.model, &cfg)?;
        let z_hat = z.forward_transform()?;
        let d_full = besov_norm_upto(&z_hat, &bp, &part, j_hi)?;
        let d_block = 2f64.powf(params.sigma * block as f64)
            * match params.p {
                Lp::Finite(2.0) => lp_block_spectral(&z_hat, block, &part)?.l2_norm(),
                _ => lp_block_spectral(&z_hat, block, &part)?
                    .synthesize_unchecked()
                    .lp_norm(params.p),
            };
        let d_gated = match params.model {
            ModelKind::Novikov => d_block,
            _ => d_full,
        };
        gated.push(d_gated);
        rows_gated.push(SeriesRow {
            index: scale as f64,
            measured: d_gated,
            threshold: Some(thresholds.displacement_floor * eps),
            pass: Some(d_gated >= thresholds.displacement_floor * eps && eps > 0.0),
        });
        rows_full.push(SeriesRow {
            index: scale as f64,
            measured: d_full,
            threshold: None,
            pass: None,
        });
    }

    let c1 = if eps > 0.0 {
        gated.iter().cloned().fold(f64::INFINITY, f64::min) / eps
    } else {
        0.0
    };
    let worst_ratio = (gated.len() >= 2).then(|| {
        gated
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    });

    // control: a single low-frequency packet must relax linearly; it gets
    // its own halving ladder so the fit is meaningful even for one scale
    let t_top = t_list.iter().cloned().fold(0.0f64, f64::max);
    let mut control = Vec::new();
    let mut control_t = Vec::new();
    if t_top > 0.0 {
        let control_datum = make_packet(&PacketSpec::single(params.k.min(2), 0), &bump)?;
        for halving in 0..4 {
            let t = t_top * 0.5f64.powi(halving);
            let cfg = EvolutionConfig {
                t_end: t,
                ..EvolutionConfig::default()
            };
            let z = evolve_difference(&control_datum, t, params.model, &cfg)?;
            control_t.push(t);
            control.push(besov_norm_upto(&z.forward_transform()?, &bp, &part, j_hi)?);
        }
    }
    let control_slope = if control.len() >= 2 {
        log_log_slope(&control_t, &control)
    } else {
        f64::NAN
    };

    let mut report = ExperimentReport::new("discontinuity", grid);
    report.partition = Some(part.fingerprint());
    report.param("model", params.model.label());
    report.param("sigma", params.sigma);
    report.param("p", params.p.to_string());
    report.param("k", params.k);
    report.param("scales", &params.scales);
    report.param("epsilon", eps);
    report.param("t_list", &t_list);
    report.param("c1", c1);
    report.param("thresholds", thresholds);
    report.series("displacement", rows_gated);
    report.series("displacement_full_norm", rows_full);
    report.series(
        "control_displacement",
        control_t
            .iter()
            .zip(&control)
            .map(|(&t, &v)| SeriesRow {
                index: t,
                measured: v,
                threshold: None,
                pass: None,
            })
            .collect(),
    );
    if eps == 0.0 {
        report.note("degenerate run: eps = 0 forces D = 0 at every scale");
    }
    report.check(CheckOutcome::ge(
        "displacement_constant_c1",
        c1,
        thresholds.displacement_floor,
    ));
    match worst_ratio {
        Some(r) => report.check(CheckOutcome::ge(
            "scale_ratio",
            r,
            thresholds.displacement_decay_ratio,
        )),
        None => report.note("single tested scale: no decay-ratio gate"),
    }
    if control.len() >= 2 {
        let (clo, chi) = thresholds.control_slope;
        report.check(CheckOutcome::within(
            "control_linear_slope",
            control_slope,
            clo,
            chi,
        ));
    } else {
        report.note("degenerate horizon: control run skipped");
    }
    Ok(report.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_epsilon_fails_with_zero_displacement() {
        let grid = Grid::new(128.0, 1 << 11).unwrap();
        let mut params = DiscontinuityParams::defaults_for(ModelKind::CamassaHolm);
        params.k = 2;
        params.epsilon = 0.0;
        let report = exp_discontinuity(&grid, &params, &Thresholds::default()).unwrap();
        assert!(!report.verdict);
        for row in &report.series[0].rows {
            assert_eq!(row.measured, 0.0);
        }
        assert!(report.notes.iter().any(|n| n.contains("degenerate")));
    }

    #[test]
    fn first_scale_quadratic_mechanism_shows_up() {
        // single scale at k = 5 (two-scale uniformity needs the full grid
        // and runs in the acceptance suite)
        let grid = Grid::new(128.0, 1 << 14).unwrap();
        let params = DiscontinuityParams {
            model: ModelKind::CamassaHolm,
            sigma: 4.0,
            p: Lp::Finite(2.0),
            k: 5,
            scales: vec![1],
            epsilon: 0.05,
        };
        let report = exp_discontinuity(&grid, &params, &Thresholds::default()).unwrap();
        assert!(report.verdict, "checks: {:?}", report.checks);
        let c1 = report.parameters["c1"].as_f64().unwrap();
        assert!(c1 > 1e-3, "c1 = {c1}");
    }
}
