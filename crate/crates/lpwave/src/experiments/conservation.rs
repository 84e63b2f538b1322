//! Solver validation: conserved-quantity drift over a run, and the
//! fourth-order signature of the integrator under dt halving.

use super::report::{CheckOutcome, ExperimentReport, SeriesRow};
use super::Thresholds;
use crate::error::Result;
use crate::evolution::{diagnostics, solve, solve_traced, DtPolicy, EvolutionConfig};
use crate::field::{Lp, RealField};
use crate::grid::Grid;
use crate::models::ModelKind;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConservationParams {
    pub model: ModelKind,
    pub sigma: f64,
    pub k: u32,
    pub n_max: u32,
    pub t_end: f64,
}

impl ConservationParams {
    pub fn defaults_for(model: ModelKind) -> Self {
        ConservationParams {
            model,
            sigma: 4.0,
            k: 5,
            n_max: 2,
            t_end: 0.01,
        }
    }
}

/// Drift of the transported mean between two snapshots. The packet series
/// has exactly zero mean, so the drift is normalized by the datum's L^1
/// size rather than the initial value.
fn mass_drift_normalized(u0: &RealField, before: f64, after: f64) -> f64 {
    let scale = before.abs().max(u0.lp_norm(Lp::Finite(1.0)));
    (after - before).abs() / scale.max(1e-300)
}

/// The dt-halving study runs on a dedicated small box with an O(1)-amplitude
/// smooth datum: at desk amplitudes the default-grid drift sits at the
/// roundoff floor where no convergence order is visible.
fn dt_order_study(model: ModelKind) -> Result<Vec<(f64, f64)>> {
    let grid = Grid::new(32.0, 1 << 10)?;
    let band = 10.0;
    // unit-amplitude smooth datum: hat integrates to 2 pi
    let spec = crate::field::SpectralField::from_continuum_hat(grid, |xi| {
        if xi.abs() <= band {
            1.2533 * (-xi * xi / 8.0).exp()
        } else {
            0.0
        }
    })?;
    let u0 = spec.inverse_transform()?;
    let h0 = diagnostics(&u0)?.h1;
    let mut out = Vec::new();
    for dt in [0.02, 0.01, 0.005] {
        let cfg = EvolutionConfig {
            dt: DtPolicy::Fixed(dt),
            t_end: 1.0,
            min_steps: 1,
            ..EvolutionConfig::default()
        };
        let u = solve(&u0, 1.0, model, &cfg)?;
        let drift = ((diagnostics(&u)?.h1 - h0) / h0).abs();
        out.push((dt, drift));
    }
    Ok(out)
}

pub fn exp_conservation(
    grid: &Grid,
    params: &ConservationParams,
    thresholds: &Thresholds,
) -> Result<ExperimentReport> {
    let u0 = super::remainder::model_datum(grid, params.model, params.sigma, params.k, params.n_max)?;
    let d0 = diagnostics(&u0)?;
    let cfg = EvolutionConfig {
        t_end: params.t_end.max(1e-30),
        ..EvolutionConfig::default()
    };
    let (_, track) = solve_traced(&u0, params.t_end, params.model, &cfg, 8)?;

    let mut h1_rows = Vec::new();
    let mut mass_rows = Vec::new();
    for sample in &track {
        h1_rows.push(SeriesRow {
            index: sample.t,
            measured: ((sample.diagnostics.h1 - d0.h1) / d0.h1.max(1e-300)).abs(),
            threshold: None,
            pass: None,
        });
        mass_rows.push(SeriesRow {
            index: sample.t,
            measured: mass_drift_normalized(
                &u0,
                d0.momentum_mean,
                sample.diagnostics.momentum_mean,
            ),
            threshold: None,
            pass: None,
        });
    }
    let final_diag = track.last().expect("trace holds the initial snapshot").diagnostics;
    let h1_drift = ((final_diag.h1 - d0.h1) / d0.h1.max(1e-300)).abs();
    let mass_drift =
        mass_drift_normalized(&u0, d0.momentum_mean, final_diag.momentum_mean);

    let mut report = ExperimentReport::new("conservation", grid);
    report.param("model", params.model.label());
    report.param("sigma", params.sigma);
    report.param("k", params.k);
    report.param("n_max", params.n_max);
    report.param("t_end", params.t_end);
    report.param("thresholds", thresholds);
    report.param(
        "datum_tail_energy_ratio",
        crate::initial_data::tail_energy_ratio(&u0),
    );
    report.series("h1_drift", h1_rows);
    report.series("mass_drift", mass_rows);

    match params.model {
        ModelKind::BFamily { .. } => {
            report.check(CheckOutcome::le(
                "mass_drift",
                mass_drift,
                thresholds.mass_drift,
            ));
            report.param("h1_drift_final", h1_drift);
            report.note("the slope integral is not conserved away from b = 2; only the transported mean is gated");
        }
        _ => {
            report.check(CheckOutcome::le(
                "h1_drift",
                h1_drift,
                thresholds.conservation_drift,
            ));
            report.param("mass_drift_final", mass_drift);
            // order-4 signature on the dedicated diagnostic box
            let study = dt_order_study(params.model)?;
            report.series(
                "dt_refinement",
                study
                    .iter()
                    .map(|&(dt, drift)| SeriesRow {
                        index: dt,
                        measured: drift,
                        threshold: None,
                        pass: None,
                    })
                    .collect(),
            );
            let (lo, hi) = thresholds.dt_refinement_ratio;
            for pair in study.windows(2) {
                let ratio = pair[0].1 / pair[1].1.max(1e-300);
                report.check(CheckOutcome::within(
                    format!("dt_halving_ratio_at_{}", pair[0].0),
                    ratio,
                    lo,
                    hi,
                ));
            }
        }
    }
    Ok(report.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Momentum mean `int (u - u_xx) dx` via the zero mode.
    fn momentum_mean(u: &RealField) -> Result<f64> {
        let hat = u.forward_transform()?;
        Ok(u.grid().length() * hat.coeff(0).re)
    }

    #[test]
    fn zero_horizon_has_zero_drift() {
        let grid = Grid::new(128.0, 1 << 11).unwrap();
        let params = ConservationParams {
            model: ModelKind::BFamily { b: 3.0 },
            sigma: 4.0,
            k: 2,
            n_max: 1,
            t_end: 0.0,
        };
        let report = exp_conservation(&grid, &params, &Thresholds::default()).unwrap();
        assert!(report.verdict, "checks: {:?}", report.checks);
        let last = report.series[1].rows.last().unwrap();
        assert_eq!(last.measured, 0.0);
    }

    #[test]
    fn quadratic_model_conserves_h1_at_desk_scale() {
        let grid = Grid::new(128.0, 1 << 11).unwrap();
        let params = ConservationParams {
            model: ModelKind::CamassaHolm,
            sigma: 4.0,
            k: 2,
            n_max: 2,
            t_end: 0.01,
        };
        let report = exp_conservation(&grid, &params, &Thresholds::default()).unwrap();
        assert!(report.verdict, "checks: {:?}", report.checks);
    }

    #[test]
    fn momentum_mean_matches_direct_quadrature() {
        let grid = Grid::new(128.0, 1 << 10).unwrap();
        let u = RealField::from_fn(grid, |x| (-x * x / 9.0).exp() + 0.1).unwrap();
        let via_mode = momentum_mean(&u).unwrap();
        let direct: f64 = u.samples().iter().sum::<f64>() * grid.dx();
        approx::assert_relative_eq!(via_mode, direct, max_relative = 1e-12);
    }
}
