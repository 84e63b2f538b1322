//! Time stepping for the transport models: the solution map, the linear
//! predictor, and the second-order remainder.
//!
//! The integrator advances the displacement `z(t) = S_t(u0) - u0` through
//! `dz/dt = F(u0 + z)` rather than the state itself. The displacement starts
//! at zero and grows like `t`, so measurements of `S_t(u0) - u0` (and of the
//! remainder after subtracting `t v0`) never pay the cancellation cost of
//! subtracting two O(1) states; the roundoff floor scales with `t` alongside
//! the signal. Adding `u0 + z` back recovers the plain solution map.

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::models::{tendency, ModelKind};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DtPolicy {
    /// Fixed step; the final step is shortened to land on the target time.
    Fixed(f64),
    /// `dt = safety * dx / max(advective speed, floor)`.
    Cfl { safety: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: DtPolicy,
    /// Runtime budget: `solve` refuses targets beyond this horizon.
    pub t_end: f64,
    pub max_steps: usize,
    /// Abort when `max|u|` grows past this multiple of its initial value.
    pub blowup_factor: f64,
    /// Lower bound on the number of steps used to reach any target time.
    pub min_steps: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            dt: DtPolicy::Cfl { safety: 0.3 },
            t_end: 1.0,
            max_steps: 1_000_000,
            blowup_factor: 10.0,
            min_steps: 8,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        match self.dt {
            DtPolicy::Fixed(dt) if !(dt.is_finite() && dt > 0.0) => {
                return Err(Error::Config(format!("fixed dt = {dt} must be positive")));
            }
            DtPolicy::Cfl { safety } if !(safety > 0.0 && safety <= 1.0) => {
                return Err(Error::Config(format!(
                    "cfl safety {safety} must lie in (0, 1]"
                )));
            }
            _ => {}
        }
        if self.t_end.is_nan() || self.t_end < 0.0 {
            return Err(Error::Config(format!("t_end = {} is negative", self.t_end)));
        }
        if self.blowup_factor <= 1.0 {
            return Err(Error::Config("blow-up factor must exceed 1".into()));
        }
        Ok(())
    }
}

/// One classical four-stage Runge-Kutta step.
pub fn step_rk4(u: &RealField, dt: f64, model: ModelKind) -> Result<RealField> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("step size dt = {dt}")));
    }
    let speed = model.advective_speed(u);
    let limit = u.grid().dx() / speed.max(1e-300);
    if dt * speed / u.grid().dx() > 1.0 {
        return Err(Error::CflViolation { dt, limit });
    }
    let k1 = tendency(u, model)?;
    let k2 = tendency(&u.axpy(0.5 * dt, &k1), model)?;
    let k3 = tendency(&u.axpy(0.5 * dt, &k2), model)?;
    let k4 = tendency(&u.axpy(dt, &k3), model)?;
    let combo = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
    let next = u.axpy(dt / 6.0, &combo);
    if !next.is_finite() {
        return Err(Error::BlowUp {
            t: dt,
            reason: "non-finite samples after one step".into(),
        });
    }
    Ok(next)
}

/// Integrates the displacement `z(t) = S_t(u0) - u0`.
pub fn evolve_difference(
    u0: &RealField,
    t: f64,
    model: ModelKind,
    cfg: &EvolutionConfig,
) -> Result<RealField> {
    cfg.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("target time t = {t}")));
    }
    if t > cfg.t_end * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "target time {t} exceeds the configured horizon {}",
            cfg.t_end
        )));
    }
    let grid = u0.grid();
    let mut z = RealField::zeros(grid);
    if t == 0.0 {
        return Ok(z);
    }
    let u0_scale = u0.max_abs().max(1e-12);
    let dt_cap = t / cfg.min_steps.max(1) as f64;
    let mut t_cur = 0.0;
    let mut steps = 0usize;
    while t_cur < t {
        let u = u0 + &z;
        let speed = model.advective_speed(&u);
        let policy_dt = match cfg.dt {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Cfl { safety } => {
                if speed > 0.0 {
                    safety * grid.dx() / speed
                } else {
                    dt_cap
                }
            }
        };
        let mut dt = policy_dt.min(dt_cap);
        if t_cur + dt >= t || (t - t_cur - dt) < 1e-12 * t {
            dt = t - t_cur; // land exactly on the target
        }
        if dt * speed / grid.dx() > 1.0 {
            return Err(Error::CflViolation {
                dt,
                limit: grid.dx() / speed,
            });
        }
        let k1 = tendency(&u, model)?;
        let k2 = tendency(&u.axpy(0.5 * dt, &k1), model)?;
        let k3 = tendency(&u.axpy(0.5 * dt, &k2), model)?;
        let k4 = tendency(&u.axpy(dt, &k3), model)?;
        let combo = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
        z = z.axpy(dt / 6.0, &combo);
        t_cur += dt;
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::MaxSteps(cfg.max_steps));
        }
        if !z.is_finite() {
            return Err(Error::BlowUp {
                t: t_cur,
                reason: "non-finite samples".into(),
            });
        }
        let peak = (u0 + &z).max_abs();
        if peak > cfg.blowup_factor * u0_scale {
            return Err(Error::BlowUp {
                t: t_cur,
                reason: format!("amplitude grew to {peak:.3e} from {u0_scale:.3e}"),
            });
        }
    }
    Ok(z)
}

/// The numerical solution map `S_t(u0)`.
pub fn solve(u0: &RealField, t: f64, model: ModelKind, cfg: &EvolutionConfig) -> Result<RealField> {
    if t == 0.0 {
        return Ok(u0.clone());
    }
    Ok(u0 + &evolve_difference(u0, t, model, cfg)?)
}

/// First-order predictor `v0 = tendency(u0)`; definitional alias.
pub fn linear_predictor(u0: &RealField, model: ModelKind) -> Result<RealField> {
    tendency(u0, model)
}

/// Second-order remainder `w(t, u0) = S_t(u0) - u0 - t v0`.
pub fn remainder(
    u0: &RealField,
    t: f64,
    model: ModelKind,
    cfg: &EvolutionConfig,
) -> Result<RealField> {
    let z = evolve_difference(u0, t, model, cfg)?;
    if t == 0.0 {
        return Ok(z);
    }
    let v0 = linear_predictor(u0, model)?;
    Ok(z.axpy(-t, &v0))
}

/// Conserved-quantity snapshot of a state.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `int (u^2 + u_x^2) dx`.
    pub h1: f64,
    /// `int (u - u_xx) dx`.
    pub momentum_mean: f64,
    pub max_abs: f64,
}

pub fn diagnostics(u: &RealField) -> Result<Diagnostics> {
    let hat = u.forward_transform()?;
    let grid = u.grid();
    let mut h1 = 0.0;
    for idx in 0..grid.num_points() {
        let xi = grid.freq(idx);
        h1 += (1.0 + xi * xi) * hat.coeffs()[idx].norm_sqr();
    }
    Ok(Diagnostics {
        h1: grid.length() * h1,
        momentum_mean: grid.length() * hat.coeff(0).re,
        max_abs: u.max_abs(),
    })
}

/// One stored snapshot along a trajectory.
#[derive(Clone, Debug)]
pub struct TrajectorySample {
    pub t: f64,
    pub field: RealField,
    pub diagnostics: Diagnostics,
}

/// Runs `solve` while recording `samples` evenly spaced snapshots
/// (including the final state).
pub fn solve_traced(
    u0: &RealField,
    t: f64,
    model: ModelKind,
    cfg: &EvolutionConfig,
    samples: usize,
) -> Result<(RealField, Vec<TrajectorySample>)> {
    let samples = samples.max(1);
    let mut out = Vec::with_capacity(samples + 1);
    out.push(TrajectorySample {
        t: 0.0,
        field: u0.clone(),
        diagnostics: diagnostics(u0)?,
    });
    let mut state = u0.clone();
    let mut t_cur = 0.0;
    for i in 1..=samples {
        let target = t * i as f64 / samples as f64;
        let slice = target - t_cur;
        if slice > 0.0 {
            let mut leg = *cfg;
            leg.t_end = cfg.t_end.max(slice);
            state = solve(&state, slice, model, &leg)?;
            t_cur = target;
        }
        out.push(TrajectorySample {
            t: t_cur,
            field: state.clone(),
            diagnostics: diagnostics(&state)?,
        });
    }
    Ok((state, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::initial_data::{make_bump, make_packet, PacketSpec};

    fn small_setup() -> (Grid, RealField) {
        let g = Grid::new(128.0, 1 << 11).unwrap();
        let bump = make_bump(&g).unwrap();
        let u0 = make_packet(&PacketSpec::single(1, 1), &bump).unwrap();
        (g, u0)
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = Grid::new(128.0, 1 << 8).unwrap();
        let z = RealField::zeros(g);
        let stepped = step_rk4(&z, 1e-3, ModelKind::CamassaHolm).unwrap();
        assert_eq!(stepped.max_abs(), 0.0);
        let solved = solve(&z, 0.5, ModelKind::Novikov, &EvolutionConfig::default()).unwrap();
        assert_eq!(solved.max_abs(), 0.0);
    }

    #[test]
    fn time_zero_returns_the_datum_exactly() {
        let (_, u0) = small_setup();
        let cfg = EvolutionConfig::default();
        let s = solve(&u0, 0.0, ModelKind::CamassaHolm, &cfg).unwrap();
        assert_eq!(s.samples(), u0.samples());
        let w = remainder(&u0, 0.0, ModelKind::CamassaHolm, &cfg).unwrap();
        assert_eq!(w.max_abs(), 0.0);
    }

    #[test]
    fn predictor_is_the_tendency_bit_for_bit() {
        let (_, u0) = small_setup();
        for model in [ModelKind::CamassaHolm, ModelKind::Novikov] {
            let a = linear_predictor(&u0, model).unwrap();
            let b = tendency(&u0, model).unwrap();
            assert_eq!(a.samples(), b.samples());
        }
    }

    #[test]
    fn step_rejects_bad_dt_and_cfl_violations() {
        let (g, u0) = small_setup();
        assert!(step_rk4(&u0, -1.0, ModelKind::CamassaHolm).is_err());
        let huge = g.dx() / u0.max_abs() * 10.0;
        assert!(matches!(
            step_rk4(&u0, huge, ModelKind::CamassaHolm),
            Err(Error::CflViolation { .. })
        ));
    }

    #[test]
    fn richardson_local_error_slope_is_five() {
        // |phi_dt - phi_{dt/2} o phi_{dt/2}| ~ C dt^5: halving dt must cut
        // the defect by about 2^5. Needs an O(1)-amplitude state, otherwise
        // the defect sits at the roundoff floor.
        let g = Grid::new(32.0, 1 << 10).unwrap();
        let u0 = crate::field::SpectralField::from_continuum_hat(g, |xi| {
            if xi.abs() <= 10.0 {
                1.2533 * (-xi * xi / 8.0).exp()
            } else {
                0.0
            }
        })
        .unwrap()
        .inverse_transform()
        .unwrap();
        let model = ModelKind::CamassaHolm;
        let mut defects = Vec::new();
        let mut dt = 0.02;
        for _ in 0..3 {
            let one = step_rk4(&u0, dt, model).unwrap();
            let half = step_rk4(&step_rk4(&u0, 0.5 * dt, model).unwrap(), 0.5 * dt, model).unwrap();
            defects.push((&one - &half).l2_norm());
            dt *= 0.5;
        }
        let s1 = (defects[0] / defects[1]).log2();
        let s2 = (defects[1] / defects[2]).log2();
        assert!((4.5..=5.5).contains(&s1), "slope {s1} defects {defects:?}");
        assert!((4.5..=5.5).contains(&s2), "slope {s2} defects {defects:?}");
    }

    #[test]
    fn single_step_h1_drift_is_negligible() {
        let (_, u0) = small_setup();
        let d0 = diagnostics(&u0).unwrap();
        let u1 = step_rk4(&u0, 1e-4, ModelKind::CamassaHolm).unwrap();
        let d1 = diagnostics(&u1).unwrap();
        assert!(((d1.h1 - d0.h1) / d0.h1).abs() <= 1e-10);
    }

    #[test]
    fn flow_property_at_aligned_steps() {
        let (_, u0) = small_setup();
        let cfg = EvolutionConfig {
            dt: DtPolicy::Fixed(1e-3),
            t_end: 1.0,
            min_steps: 1,
            ..EvolutionConfig::default()
        };
        let model = ModelKind::CamassaHolm;
        let direct = solve(&u0, 8e-3, model, &cfg).unwrap();
        let mid = solve(&u0, 5e-3, model, &cfg).unwrap();
        let composed = solve(&mid, 3e-3, model, &cfg).unwrap();
        let err = (&direct - &composed).l2_norm() / direct.l2_norm();
        assert!(err <= 1e-9, "semigroup defect {err}");
    }

    #[test]
    fn solver_self_converges_under_refinement() {
        // same datum embedded at N and 2N; matched fixed dt
        let coarse = Grid::new(128.0, 1 << 10).unwrap();
        let fine = Grid::new(128.0, 1 << 11).unwrap();
        let bc = make_bump(&coarse).unwrap();
        let bf = make_bump(&fine).unwrap();
        let uc = make_packet(&PacketSpec::single(1, 1), &bc).unwrap();
        let uf = make_packet(&PacketSpec::single(1, 1), &bf).unwrap();
        let cfg = EvolutionConfig {
            dt: DtPolicy::Fixed(2e-3),
            t_end: 1.0,
            min_steps: 1,
            ..EvolutionConfig::default()
        };
        let model = ModelKind::CamassaHolm;
        let sc = solve(&uc, 0.1, model, &cfg).unwrap();
        let sf = solve(&uf, 0.1, model, &cfg).unwrap();
        // compare on the shared (coarse) sample points
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..coarse.num_points() {
            let d = sc.samples()[i] - sf.samples()[2 * i];
            num += d * d;
            den += sf.samples()[2 * i].powi(2);
        }
        let rel = (num / den).sqrt();
        assert!(rel <= 1e-8, "refinement defect {rel}");
    }

    #[test]
    fn horizon_and_step_budget_guards_fire() {
        let (_, u0) = small_setup();
        let cfg = EvolutionConfig {
            t_end: 1e-3,
            ..EvolutionConfig::default()
        };
        assert!(solve(&u0, 2e-3, ModelKind::CamassaHolm, &cfg).is_err());
        let starved = EvolutionConfig {
            dt: DtPolicy::Fixed(1e-7),
            t_end: 1.0,
            max_steps: 10,
            ..EvolutionConfig::default()
        };
        assert!(matches!(
            solve(&u0, 0.5, ModelKind::CamassaHolm, &starved),
            Err(Error::MaxSteps(_))
        ));
    }

    #[test]
    fn traced_solve_reports_monotone_times() {
        let (_, u0) = small_setup();
        let cfg = EvolutionConfig::default();
        let (_, track) =
            solve_traced(&u0, 4e-3, ModelKind::CamassaHolm, &cfg, 4).unwrap();
        assert_eq!(track.len(), 5);
        assert_eq!(track[0].t, 0.0);
        for w in track.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].diagnostics.h1.is_finite());
        }
        assert!((track[4].t - 4e-3).abs() < 1e-15);
    }
}
