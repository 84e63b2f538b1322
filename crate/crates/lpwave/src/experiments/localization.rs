//! Packet localization: `Delta_{kn} g = g` with every other block empty,
//! plus the narrower support-containment claim, decided per instance.

use super::report::{CheckOutcome, ExperimentReport, SeriesRow};
use super::Thresholds;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::initial_data::{make_bump, make_packet, snapped_carrier, PacketSpec};
use crate::littlewood_paley::{lp_block_spectral, DyadicPartition};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LocalizationParams {
    pub packet: PacketSpec,
}

impl Default for LocalizationParams {
    fn default() -> Self {
        LocalizationParams {
            packet: PacketSpec::single(5, 2),
        }
    }
}

/// Measures the block-identity residual, the worst off-block leakage, and
/// the spectral support of one packet.
pub fn exp_localization(
    grid: &Grid,
    params: &LocalizationParams,
    thresholds: &Thresholds,
) -> Result<ExperimentReport> {
    let spec = params.packet;
    spec.validate()?;
    let part = DyadicPartition::build(grid)?;
    let bump = make_bump(grid)?;
    let packet = make_packet(&spec, &bump)?;
    let carrier = snapped_carrier(grid, &spec)?;
    let norm = packet.l2_norm();
    if norm == 0.0 {
        return Err(Error::DegenerateInput("packet with zero norm".into()));
    }
    let block = (spec.k * spec.n) as i32;
    if block > part.j_max() {
        return Err(Error::BlockOutOfBand {
            j: block,
            j_max: part.j_max(),
        });
    }

    let hat = packet.forward_transform()?;
    let own = lp_block_spectral(&hat, block, &part)?.inverse_transform()?;
    let residual = (&own - &packet).l2_norm() / norm;

    let mut leakage: f64 = 0.0;
    let mut rows = Vec::new();
    for j in -1..=part.j_max() {
        let level = lp_block_spectral(&hat, j, &part)?.l2_norm() / norm;
        if j != block {
            leakage = leakage.max(level);
        }
        rows.push(SeriesRow {
            index: j as f64,
            measured: level,
            threshold: (j != block).then_some(thresholds.localization_residual),
            pass: (j != block).then_some(level <= thresholds.localization_residual),
        });
    }

    // spectral support scan against the annulus [33/24, 35/24] * 2^{kn}
    let peak = hat.max_abs();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for idx in 0..grid.num_points() {
        if hat.coeffs()[idx].norm() > 1e-10 * peak {
            let a = grid.freq(idx).abs();
            lo = lo.min(a);
            hi = hi.max(a);
        }
    }
    let scale = 2f64.powi(block);
    let contained = lo >= 33.0 / 24.0 * scale && hi <= 35.0 / 24.0 * scale;

    let mut report = ExperimentReport::new("localization", grid);
    report.partition = Some(part.fingerprint());
    report.param("k", spec.k);
    report.param("n", spec.n);
    report.param("i", spec.i);
    report.param("carrier", carrier);
    report.param("block", block);
    report.param("thresholds", thresholds);
    report.series("block_levels", rows);
    report.check(CheckOutcome::le(
        "identity_residual",
        residual,
        thresholds.localization_residual,
    ));
    report.check(CheckOutcome::le(
        "off_block_leakage",
        leakage,
        thresholds.localization_residual,
    ));
    report.param("support_lo", lo);
    report.param("support_hi", hi);
    report.param("support_contained_33_35", contained);
    report.note(format!(
        "support [{lo:.4}, {hi:.4}] vs annulus [{:.4}, {:.4}]: containment {}",
        33.0 / 24.0 * scale,
        35.0 / 24.0 * scale,
        if contained { "holds" } else { "fails" }
    ));
    Ok(report.finalize())
}
