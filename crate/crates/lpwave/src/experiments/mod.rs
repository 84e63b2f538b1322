//! Executable verifications of the quantitative estimates: each experiment
//! measures its constants on a grid, compares them against configured
//! thresholds, and returns a structured [`ExperimentReport`].

mod ch_lower_bound;
mod conservation;
mod discontinuity;
mod localization;
mod novikov_lower_bound;
mod remainder;
mod report;

pub use ch_lower_bound::{exp_ch_lower_bound, ChLowerBoundParams};
pub use conservation::{exp_conservation, ConservationParams};
pub use discontinuity::{exp_discontinuity, DiscontinuityParams};
pub use localization::{exp_localization, LocalizationParams};
pub use novikov_lower_bound::{exp_novikov_lower_bound, NovikovLowerBoundParams};
pub use remainder::{exp_remainder_scaling, RemainderParams};
pub use report::{CheckOutcome, ExperimentReport, GridFingerprint, SeriesRow, SeriesTable};

use serde::{Deserialize, Serialize};

/// Pass/fail thresholds. The underlying estimates are existential, so these
/// are configuration values; the defaults make each asymptotic statement a
/// falsifiable desk-scale check and are echoed in every report.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Thresholds {
    /// Block-identity residual and off-block leakage for packets.
    pub localization_residual: f64,
    /// Lower bound for the normalized squared-data block norms `r_n`.
    pub block_constant_min: f64,
    /// Largest allowed ratio `max r_n / min r_n` across scales.
    pub block_constant_stability: f64,
    /// Margin factor in the cross-term suppression test
    /// `|I2|/|I1| <= margin * 2^(-k sigma)`.
    pub cross_term_margin: f64,
    /// Largest allowed ratio `max rho_j / min rho_j` for the cubic bounds.
    pub cubic_constant_variation: f64,
    /// Window for the fitted remainder order in t.
    pub remainder_slope: (f64, f64),
    /// Window for the fitted first-difference orders in t.
    pub first_difference_slope: (f64, f64),
    /// Relative drift budget for quadratic invariants over a run.
    pub conservation_drift: f64,
    /// Relative drift budget for the transported mean of `u - u_xx`.
    pub mass_drift: f64,
    /// Window for the drift-reduction factor under dt halving.
    pub dt_refinement_ratio: (f64, f64),
    /// Floor for the recorded displacement constant `c1 = min_n D_n / eps`.
    pub displacement_floor: f64,
    /// Smallest allowed ratio `D_{n+1} / D_n` across scales.
    pub displacement_decay_ratio: f64,
    /// Window for the control run's fitted order (linear vanishing).
    pub control_slope: (f64, f64),
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            localization_residual: 1e-10,
            block_constant_min: 1e-3,
            block_constant_stability: 2.0,
            cross_term_margin: 2.0,
            cubic_constant_variation: 4.0,
            remainder_slope: (1.8, 2.2),
            first_difference_slope: (0.9, 1.1),
            conservation_drift: 1e-6,
            mass_drift: 1e-10,
            dt_refinement_ratio: (10.0, 64.0),
            displacement_floor: 1e-6,
            displacement_decay_ratio: 0.5,
            control_slope: (0.9, 1.1),
        }
    }
}

/// Least-squares slope of `log y` against `log x`.
pub(crate) fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.max(1e-300).ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}
