//! Nonlocal sources and full tendencies for the three transport models.
//!
//! All nonlinear products are formed in physical space from dealiased
//! inputs, then the result is dealiased again: fraction 2/3 for the
//! quadratic models, 1/2 for the cubic one. Derivatives use the exact
//! `i xi` multiplier.

use crate::error::{Error, Result};
use crate::field::{RealField, SpectralField};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative spectral energy above the dealias cutoff that triggers an
/// under-resolution warning.
const RESOLUTION_WARN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    CamassaHolm,
    BFamily { b: f64 },
    Novikov,
}

impl ModelKind {
    /// Dealias fraction of the model's nonlinearity: 2/3 quadratic, 1/2 cubic.
    pub fn dealias_fraction(&self) -> f64 {
        match self {
            ModelKind::Novikov => 0.5,
            _ => 2.0 / 3.0,
        }
    }

    /// Advective speed used for the CFL bound.
    pub fn advective_speed(&self, u: &RealField) -> f64 {
        let m = u.max_abs();
        match self {
            ModelKind::Novikov => m * m,
            _ => m,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ModelKind::CamassaHolm => "camassa-holm".into(),
            ModelKind::BFamily { b } => format!("b-family(b={b})"),
            ModelKind::Novikov => "novikov".into(),
        }
    }
}

/// Dealiased spectrum of `u` plus the physical pair `(u, u_x)` rebuilt from
/// it. Warns when the input carries meaningful energy above the cutoff.
fn dealiased_parts(u: &RealField, fraction: f64) -> Result<(SpectralField, RealField, RealField)> {
    let hat = u.forward_transform()?;
    let beyond = hat.energy_above(fraction);
    if beyond > RESOLUTION_WARN {
        log::warn!(
            "nonlinearity input has relative energy {beyond:.3e} above the {fraction:.3} cutoff; \
             result is under-resolved"
        );
    }
    let hat = hat.dealias(fraction)?;
    let u_d = hat.inverse_transform()?;
    let ux = hat.derivative().inverse_transform()?;
    Ok((hat, u_d, ux))
}

/// `-d/dx (1 - d^2/dx^2)^{-1}` applied to a physical field.
fn neg_dx_helmholtz(q: &RealField, fraction: f64) -> Result<RealField> {
    q.forward_transform()?
        .apply_multiplier(|xi| Complex64::new(0.0, -xi) / (1.0 + xi * xi))?
        .dealias(fraction)?
        .inverse_transform()
}

/// The b-family source `-d/dx (1-d^2/dx^2)^{-1} (b/2 u^2 + (3-b)/2 u_x^2)`.
pub fn source_b(u: &RealField, b: f64) -> Result<RealField> {
    if !b.is_finite() {
        return Err(Error::InvalidParameter(format!("coefficient b = {b}")));
    }
    let fraction = 2.0 / 3.0;
    let (_, u_d, ux) = dealiased_parts(u, fraction)?;
    let q = RealField::new(
        u.grid(),
        u_d.samples()
            .iter()
            .zip(ux.samples())
            .map(|(&u, &ux)| 0.5 * b * u * u + 0.5 * (3.0 - b) * ux * ux)
            .collect(),
    )?;
    neg_dx_helmholtz(&q, fraction)
}

/// The quadratic transport source with b = 2.
pub fn source_p(u: &RealField) -> Result<RealField> {
    source_b(u, 2.0)
}

/// The cubic source
/// `-(1-d^2/dx^2)^{-1} (1/2 u_x^3 + d/dx (3/2 u u_x^2 + u^3))`.
pub fn source_q(u: &RealField) -> Result<RealField> {
    let fraction = 0.5;
    let (_, u_d, ux) = dealiased_parts(u, fraction)?;
    let grid = u.grid();
    let a = RealField::new(
        grid,
        ux.samples().iter().map(|&v| 0.5 * v * v * v).collect(),
    )?;
    let c = RealField::new(
        grid,
        u_d.samples()
            .iter()
            .zip(ux.samples())
            .map(|(&u, &ux)| 1.5 * u * ux * ux + u * u * u)
            .collect(),
    )?;
    let hat = &a.forward_transform()? + &c.forward_transform()?.derivative();
    hat.apply_real_multiplier(|xi| -1.0 / (1.0 + xi * xi))?
        .dealias(fraction)?
        .inverse_transform()
}

/// Full right-hand side of the evolution equation for `model`.
pub fn tendency(u: &RealField, model: ModelKind) -> Result<RealField> {
    let fraction = model.dealias_fraction();
    let (_, u_d, ux) = dealiased_parts(u, fraction)?;
    let grid = u.grid();
    match model {
        ModelKind::CamassaHolm | ModelKind::BFamily { .. } => {
            let b = match model {
                ModelKind::BFamily { b } => b,
                _ => 2.0,
            };
            let q = RealField::new(
                grid,
                u_d.samples()
                    .iter()
                    .zip(ux.samples())
                    .map(|(&u, &ux)| 0.5 * b * u * u + 0.5 * (3.0 - b) * ux * ux)
                    .collect(),
            )?;
            let adv = u_d.pointwise_mul(&ux);
            let hat = q
                .forward_transform()?
                .apply_multiplier(|xi| Complex64::new(0.0, -xi) / (1.0 + xi * xi))?;
            let total = &hat - &adv.forward_transform()?;
            total.dealias(fraction)?.inverse_transform()
        }
        ModelKind::Novikov => {
            let a = RealField::new(
                grid,
                ux.samples().iter().map(|&v| 0.5 * v * v * v).collect(),
            )?;
            let c = RealField::new(
                grid,
                u_d.samples()
                    .iter()
                    .zip(ux.samples())
                    .map(|(&u, &ux)| 1.5 * u * ux * ux + u * u * u)
                    .collect(),
            )?;
            let adv = RealField::new(
                grid,
                u_d.samples()
                    .iter()
                    .zip(ux.samples())
                    .map(|(&u, &ux)| u * u * ux)
                    .collect(),
            )?;
            let src = &a.forward_transform()? + &c.forward_transform()?.derivative();
            let src = src.apply_real_multiplier(|xi| -1.0 / (1.0 + xi * xi))?;
            let total = &src - &adv.forward_transform()?;
            total.dealias(fraction)?.inverse_transform()
        }
    }
}
