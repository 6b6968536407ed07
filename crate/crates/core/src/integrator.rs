//! Classical RK4 integration, fixed-step or with step-doubling error
//! control.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::equilibria::Equilibrium;
use crate::error::{Error, Result};
use crate::lyapunov::{w_dot, w_value, LyapunovCoeffs};
use crate::model::{jacobian, vector_field, ModelParams, State};

/// Adaptive steps satisfy `h * ‖J‖∞ <= STABILITY_CAP`, inside the RK4
/// stability interval on the negative real axis (about 2.785).
pub const STABILITY_CAP: f64 = 2.5;

/// Coordinates may dip this far below zero before a step is rejected,
/// whatever `abs_tol` says.
pub const NEGATIVITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationMode {
    #[default]
    FixedRk4,
    AdaptiveRk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationOptions {
    pub t_end: f64,
    /// Step in fixed mode, initial step in adaptive mode.
    pub dt: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub mode: IntegrationMode,
    pub max_steps: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            t_end: 10.0,
            dt: 1e-2,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            mode: IntegrationMode::FixedRk4,
            max_steps: 10_000_000,
        }
    }
}

impl IntegrationOptions {
    pub fn fixed(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            ..Self::default()
        }
    }

    pub fn adaptive(t_end: f64, rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            t_end,
            dt: (t_end * 1e-3).min(1e-2),
            rel_tol,
            abs_tol,
            mode: IntegrationMode::AdaptiveRk4,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidOptions(msg));
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.dt > 0.0 && self.dt <= self.t_end) {
            return bad(format!("dt must lie in (0, t_end], got {}", self.dt));
        }
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {tol}"));
            }
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        Ok(())
    }

    fn dt_min(&self) -> f64 {
        1e-12 * self.t_end
    }

    fn negativity_floor(&self) -> f64 {
        -self.abs_tol.min(NEGATIVITY_SLACK)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSample {
    pub w: f64,
    pub w_dot: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub lyapunov: Option<Vec<LyapunovSample>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, State)> {
        Some((*self.times.last()?, *self.states.last()?))
    }

    fn push(&mut self, t: f64, s: State) {
        self.times.push(t);
        self.states.push(s);
    }

    /// Writes `t,C,I,V` (plus `,W,Wdot` when traced), one row per sample,
    /// with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        match &self.lyapunov {
            None => {
                writeln!(out, "t,C,I,V")?;
                for (t, s) in self.times.iter().zip(&self.states) {
                    writeln!(out, "{t:.16e},{:.16e},{:.16e},{:.16e}", s.c, s.i, s.v)?;
                }
            }
            Some(samples) => {
                writeln!(out, "t,C,I,V,W,Wdot")?;
                for ((t, s), l) in self.times.iter().zip(&self.states).zip(samples) {
                    writeln!(
                        out,
                        "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        s.c, s.i, s.v, l.w, l.w_dot
                    )?;
                }
            }
        }
        Ok(())
    }
}

fn rk4(params: &ModelParams, s: &State, dt: f64) -> State {
    let k1 = vector_field(params, s);
    let k2 = vector_field(params, &s.advanced(k1, 0.5 * dt));
    let k3 = vector_field(params, &s.advanced(k2, 0.5 * dt));
    let k4 = vector_field(params, &s.advanced(k3, dt));
    State::new(
        s.c + dt / 6.0 * (k1.dc + 2.0 * k2.dc + 2.0 * k3.dc + k4.dc),
        s.i + dt / 6.0 * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di),
        s.v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv),
    )
}

/// Empirical sup-norm cap for trajectories started at `s0`:
/// `10 (‖s0‖∞ + 1/b + km/(σ b))` with `b = min(b11, b22)`.
///
/// `1/b` bounds the logistic carrying capacities and `km/(σ b)` the virion
/// level they sustain; the factor 10 absorbs transients. Not a proof of
/// boundedness, only an envelope every tested run stays inside.
pub fn empirical_bound(params: &ModelParams, s0: &State) -> f64 {
    let b = params.b11.min(params.b22);
    10.0 * (s0.norm_inf() + 1.0 / b + params.k * params.m / (params.sigma * b))
}

/// One classical Runge–Kutta step of size `dt`.
pub fn step_rk4(params: &ModelParams, s: &State, dt: f64) -> Result<State> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidOptions(format!(
            "step size must be positive, got {dt}"
        )));
    }
    let next = rk4(params, s, dt);
    if !next.is_finite() {
        return Err(Error::NonFinite { t: dt });
    }
    Ok(next)
}

pub fn integrate(
    params: &ModelParams,
    s0: &State,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    params.validate()?;
    opts.validate()?;
    if !s0.is_finite() || s0.min_coord() < 0.0 {
        return Err(Error::Domain(format!(
            "initial state must be finite and nonnegative, got ({}, {}, {})",
            s0.c, s0.i, s0.v
        )));
    }
    match opts.mode {
        IntegrationMode::FixedRk4 => integrate_fixed(params, s0, opts),
        IntegrationMode::AdaptiveRk4 => integrate_adaptive(params, s0, opts),
    }
}

fn integrate_fixed(
    params: &ModelParams,
    s0: &State,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    let mut traj = Trajectory::default();
    traj.push(0.0, *s0);
    let n = (opts.t_end / opts.dt - 1e-9).ceil().max(1.0) as usize;
    if n > opts.max_steps {
        return Err(Error::MaxStepsExceeded(opts.max_steps));
    }
    let mut s = *s0;
    let mut t = 0.0;
    for idx in 1..=n {
        let t_next = if idx == n {
            opts.t_end
        } else {
            idx as f64 * opts.dt
        };
        s = fixed_substeps(params, s, t, t_next, opts, &mut traj)?;
        t = t_next;
        traj.push(t, s);
    }
    Ok(traj)
}

/// Advances from `t0` to `t1`; a step that leaves the nonnegative octant is
/// split in halves, recording the intermediate points.
fn fixed_substeps(
    params: &ModelParams,
    s: State,
    t0: f64,
    t1: f64,
    opts: &IntegrationOptions,
    traj: &mut Trajectory,
) -> Result<State> {
    let h = t1 - t0;
    let next = step_rk4(params, &s, h).map_err(|_| Error::NonFinite { t: t0 })?;
    if next.min_coord() >= opts.negativity_floor() {
        return Ok(next);
    }
    if h / 2.0 < opts.dt_min() {
        return Err(Error::StepUnderflow { t: t0, dt: h / 2.0 });
    }
    let tm = t0 + h / 2.0;
    let mid = fixed_substeps(params, s, t0, tm, opts, traj)?;
    traj.push(tm, mid);
    fixed_substeps(params, mid, tm, t1, opts, traj)
}

fn integrate_adaptive(
    params: &ModelParams,
    s0: &State,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    const SAFETY: f64 = 0.9;
    const MAX_GROWTH: f64 = 4.0;
    const MIN_SHRINK: f64 = 0.2;

    let mut traj = Trajectory::default();
    traj.push(0.0, *s0);
    let (mut t, mut s, mut dt) = (0.0, *s0, opts.dt);
    let mut accepted = 0usize;

    while t < opts.t_end {
        if accepted >= opts.max_steps {
            return Err(Error::MaxStepsExceeded(opts.max_steps));
        }
        if dt < opts.dt_min() {
            return Err(Error::StepUnderflow { t, dt });
        }
        let jac_norm = jacobian(params, &s)
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        if jac_norm > 0.0 {
            dt = dt.min(STABILITY_CAP / jac_norm);
        }
        let last = t + dt >= opts.t_end;
        let h = if last { opts.t_end - t } else { dt };

        let full = rk4(params, &s, h);
        let half = rk4(params, &s, 0.5 * h);
        let two = rk4(params, &half, 0.5 * h);
        if !(full.is_finite() && two.is_finite()) {
            return Err(Error::NonFinite { t });
        }

        if two.min_coord() < opts.negativity_floor() {
            dt = 0.5 * h;
            continue;
        }

        // Richardson estimate of the local error of the two half steps.
        let err = [two.c - full.c, two.i - full.i, two.v - full.v]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            / 15.0;
        let tol = opts.rel_tol * s.norm_inf().max(two.norm_inf()) + opts.abs_tol;
        let factor = if err == 0.0 {
            MAX_GROWTH
        } else {
            (SAFETY * (tol / err).powf(0.2)).clamp(MIN_SHRINK, MAX_GROWTH)
        };

        if err <= tol {
            t = if last { opts.t_end } else { t + h };
            s = two;
            traj.push(t, s);
            accepted += 1;
            // keep the pre-clipping step so a short final step does not shrink dt
            dt = if last { dt } else { h * factor };
        } else {
            dt = h * factor;
        }
    }
    Ok(traj)
}

/// Integrates and samples `(W, Ẇ)` at every accepted step.
pub fn lyapunov_trace(
    params: &ModelParams,
    coeffs: &LyapunovCoeffs,
    eq: &Equilibrium,
    s0: &State,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    coeffs.validate()?;
    if !s0.is_strictly_positive() {
        return Err(Error::Domain(
            "Lyapunov trace needs a strictly positive initial state".into(),
        ));
    }
    let mut traj = integrate(params, s0, opts)?;
    let samples = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| {
            if !s.is_strictly_positive() {
                return Err(Error::Domain(format!(
                    "trajectory left the positive octant at t = {t}"
                )));
            }
            Ok(LyapunovSample {
                w: w_value(coeffs, eq, s)?,
                w_dot: w_dot(params, coeffs, eq, s)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    traj.lyapunov = Some(samples);
    Ok(traj)
}
