//! Explicit SSP-RK3 method-of-lines integration with CFL-limited steps and
//! blow-up / scheme-failure detection.
//!
//! Nothing is clamped: undershoots of `beta` or `omega` are reported, never
//! repaired.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Norm};
use crate::model::{rhs_beta_form, rhs_toy, Params, State, ToyState};

/// Number of trailing steps over which monotone gradient growth is required
/// before a step-size collapse counts as blow-up.
pub const GROWTH_WINDOW: usize = 100;

const TINY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub cfl_advective: f64,
    pub cfl_diffusive: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Threshold on `||u_x||_inf`.
    pub blowup_grad_threshold: f64,
    pub omega_floor: f64,
    /// Tolerated undershoot of `beta` below zero.
    pub beta_tol: f64,
    /// Project onto odd `u`, even `omega`/`beta` after every step.
    pub symmetry_projection: bool,
    /// Level of `k` at the zero node that counts as loss of the degenerate
    /// point. Only armed when the initial `k` vanishes there; `0` disables.
    pub degeneracy_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl_advective: 0.4,
            cfl_diffusive: 0.4,
            dt_min: 1e-12,
            dt_max: 1e-3,
            blowup_grad_threshold: 1e6,
            omega_floor: 1e-10,
            beta_tol: 1e-8,
            symmetry_projection: false,
            degeneracy_tol: 1e-10,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &'static str, value: f64| {
            if value > 0.0 && value <= 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParam {
                    name,
                    value,
                    reason: "CFL numbers must lie in (0, 1]",
                })
            }
        };
        unit("cfl_advective", self.cfl_advective)?;
        unit("cfl_diffusive", self.cfl_diffusive)?;
        let positive = [
            ("dt_min", self.dt_min),
            ("dt_max", self.dt_max),
            ("blowup_grad_threshold", self.blowup_grad_threshold),
            ("omega_floor", self.omega_floor),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParam {
                    name,
                    value,
                    reason: "must be strictly positive",
                });
            }
        }
        if !(self.degeneracy_tol >= 0.0 && self.degeneracy_tol.is_finite()) {
            return Err(Error::InvalidParam {
                name: "degeneracy_tol",
                value: self.degeneracy_tol,
                reason: "must be nonnegative",
            });
        }
        if !(self.beta_tol >= 0.0) {
            return Err(Error::InvalidParam {
                name: "beta_tol",
                value: self.beta_tol,
                reason: "must be nonnegative",
            });
        }
        if self.dt_min >= self.dt_max {
            return Err(Error::InvalidParam {
                name: "dt_min",
                value: self.dt_min,
                reason: "must be smaller than dt_max",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    BlowupDetected,
    SchemeFailure,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::BlowupDetected => "blowup_detected",
            RunStatus::SchemeFailure => "scheme_failure",
        }
    }
}

/// Terminal outcome of an integration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport<S = State> {
    pub status: RunStatus,
    pub t_end: f64,
    pub reason: String,
    pub final_state: S,
    pub steps_taken: usize,
    /// `||u_x||_inf` of the final state and the node where it is attained.
    pub max_gradient: f64,
    pub max_gradient_x: f64,
    /// Signed `u_x` at the zero node of the final state.
    pub xi: f64,
}

/// Largest stable step for the current state.
pub fn stable_dt(s: &State, p: &Params, c: &StepControl) -> f64 {
    let h = s.grid().spacing();
    let umax = s.u.norm(Norm::Linf).max(TINY);
    let coef_max = s
        .beta
        .values()
        .iter()
        .zip(s.omega.values())
        .fold(0.0_f64, |m, (b, w)| m.max(b * b / w));
    let diff = (p.max_diffusion_prefactor() * coef_max).max(TINY);
    (c.cfl_advective * h / umax)
        .min(c.cfl_diffusive * h * h / (2.0 * diff))
        .min(c.dt_max)
}

/// `(1 - b) x + b (y + c r)`, written as an increment on `x` so that the
/// convex weights cannot bias a steady state by rounding.
fn combine(x: &Field, b: f64, y: &Field, c: f64, r: &Field) -> Field {
    let vals = x
        .values()
        .iter()
        .zip(y.values())
        .zip(r.values())
        .map(|((xv, yv), rv)| xv + b * ((yv + c * rv) - xv))
        .collect();
    Field::new(*x.grid(), vals)
}

fn euler(x: &Field, c: f64, r: &Field) -> Field {
    x.zip_map(r, |xv, rv| xv + c * rv)
}

/// One SSP-RK3 (Shu-Osher) step of the `beta` formulation.
pub fn step(s: &State, p: &Params, dt: f64) -> Result<State> {
    let r0 = rhs_beta_form(s, p)?;
    let s1 = State {
        time: s.time + dt,
        u: euler(&s.u, dt, &r0.du),
        omega: euler(&s.omega, dt, &r0.domega),
        beta: euler(&s.beta, dt, &r0.dbeta),
    };
    let r1 = rhs_beta_form(&s1, p)?;
    let s2 = State {
        time: s.time + 0.5 * dt,
        u: combine(&s.u, 0.25, &s1.u, dt, &r1.du),
        omega: combine(&s.omega, 0.25, &s1.omega, dt, &r1.domega),
        beta: combine(&s.beta, 0.25, &s1.beta, dt, &r1.dbeta),
    };
    let r2 = rhs_beta_form(&s2, p)?;
    let two_thirds = 2.0 / 3.0;
    let out = State {
        time: s.time + dt,
        u: combine(&s.u, two_thirds, &s2.u, dt, &r2.du),
        omega: combine(&s.omega, two_thirds, &s2.omega, dt, &r2.domega),
        beta: combine(&s.beta, two_thirds, &s2.beta, dt, &r2.dbeta),
    };
    if !out.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

/// One SSP-RK3 step of the toy model.
pub fn step_toy(s: &ToyState, dt: f64) -> Result<ToyState> {
    let r0 = rhs_toy(s)?;
    let s1 = ToyState {
        time: s.time + dt,
        u: euler(&s.u, dt, &r0.du),
        gamma: euler(&s.gamma, dt, &r0.dgamma),
    };
    let r1 = rhs_toy(&s1)?;
    let s2 = ToyState {
        time: s.time + 0.5 * dt,
        u: combine(&s.u, 0.25, &s1.u, dt, &r1.du),
        gamma: combine(&s.gamma, 0.25, &s1.gamma, dt, &r1.dgamma),
    };
    let r2 = rhs_toy(&s2)?;
    let two_thirds = 2.0 / 3.0;
    let out = ToyState {
        time: s.time + dt,
        u: combine(&s.u, two_thirds, &s2.u, dt, &r2.du),
        gamma: combine(&s.gamma, two_thirds, &s2.gamma, dt, &r2.dgamma),
    };
    if !(out.u.is_finite() && out.gamma.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

/// Tracks `||u_x||_inf` over the trailing window.
#[derive(Debug, Default)]
struct GrowthMonitor {
    window: VecDeque<f64>,
}

impl GrowthMonitor {
    fn push(&mut self, g: f64) {
        if self.window.len() == GROWTH_WINDOW + 1 {
            self.window.pop_front();
        }
        self.window.push_back(g);
    }

    fn monotone(&self) -> bool {
        self.window.len() == GROWTH_WINDOW + 1
            && self
                .window
                .iter()
                .zip(self.window.iter().skip(1))
                .all(|(a, b)| b >= a)
    }
}

fn gradient_summary(u: &Field) -> (f64, f64, f64) {
    let du = u.deriv1();
    let (mut gmax, mut jmax) = (0.0_f64, 0);
    for (j, v) in du.values().iter().enumerate() {
        if v.abs() > gmax || v.is_nan() {
            gmax = v.abs();
            jmax = j;
        }
    }
    (gmax, u.grid().node(jmax), du.at_zero())
}

fn report<S>(
    status: RunStatus,
    reason: String,
    final_state: S,
    u: &Field,
    t_end: f64,
    steps_taken: usize,
) -> RunReport<S> {
    let (max_gradient, max_gradient_x, xi) = gradient_summary(u);
    RunReport {
        status,
        t_end,
        reason,
        final_state,
        steps_taken,
        max_gradient,
        max_gradient_x,
        xi,
    }
}

fn failure_or_blowup(monitor: &GrowthMonitor, what: &str) -> (RunStatus, String) {
    if monitor.monotone() {
        (
            RunStatus::BlowupDetected,
            format!("{what} after monotone gradient growth over {GROWTH_WINDOW} steps"),
        )
    } else {
        (
            RunStatus::SchemeFailure,
            format!("{what} without sustained gradient growth"),
        )
    }
}

/// Integrate the `beta` formulation up to `t_final` or until a detector fires.
///
/// `observer` is called with the initial state (`dt = 0`) and then with every
/// accepted state and the step that produced it.
pub fn integrate<F>(s0: &State, p: &Params, c: &StepControl, t_final: f64, observer: F) -> RunReport
where
    F: FnMut(&State, f64),
{
    integrate_with_stops(s0, p, c, &[t_final], observer)
}

/// Like [`integrate`], but steps are shortened so that the trajectory lands
/// exactly on every time in `stops` (increasing; the last one is the final
/// time). Runs from different data then share these sample times.
pub fn integrate_with_stops<F>(
    s0: &State,
    p: &Params,
    c: &StepControl,
    stops: &[f64],
    mut observer: F,
) -> RunReport
where
    F: FnMut(&State, f64),
{
    let t_final = stops.last().copied().unwrap_or(s0.time);
    let mut stop_idx = stops.partition_point(|&t| t <= s0.time);
    let mut s = s0.clone();
    let mut monitor = GrowthMonitor::default();
    let mut steps = 0;
    let degenerate_start = c.degeneracy_tol > 0.0 && s.beta.at_zero() == 0.0;
    observer(&s, 0.0);
    monitor.push(gradient_summary(&s.u).0);

    while s.time < t_final {
        let dt_stable = stable_dt(&s, p, c);
        if dt_stable < c.dt_min {
            let (status, reason) =
                failure_or_blowup(&monitor, &format!("step size collapsed to {dt_stable:.3e}"));
            let t = s.time;
            let u = s.u.clone();
            return report(status, reason, s, &u, t, steps);
        }
        let target = stops[stop_idx];
        let dt = dt_stable.min(target - s.time);
        let mut next = match step(&s, p, dt) {
            Ok(next) => next,
            Err(Error::NonFinite) => {
                let (status, reason) = failure_or_blowup(&monitor, "non-finite value");
                let t = s.time;
                let u = s.u.clone();
                return report(status, reason, s, &u, t, steps);
            }
            Err(e) => {
                let t = s.time;
                let u = s.u.clone();
                return report(RunStatus::SchemeFailure, e.to_string(), s, &u, t, steps);
            }
        };
        // land exactly on the stop
        if target - next.time < 1e-14 * target.abs().max(1.0) {
            next.time = target;
            stop_idx += 1;
        }
        if c.symmetry_projection {
            next.project_symmetric();
        }
        steps += 1;
        s = next;
        observer(&s, dt);

        let (gmax, gx, _) = gradient_summary(&s.u);
        monitor.push(gmax);
        if gmax > c.blowup_grad_threshold {
            let t = s.time;
            let u = s.u.clone();
            return report(
                RunStatus::BlowupDetected,
                format!(
                    "gradient threshold: ||u_x||_inf = {gmax:.6e} > {:.3e} at x = {gx:.6}",
                    c.blowup_grad_threshold
                ),
                s,
                &u,
                t,
                steps,
            );
        }
        let wmin = s.omega.extrema();
        let bmin = s.beta.extrema();
        if wmin.min < c.omega_floor {
            let t = s.time;
            let u = s.u.clone();
            return report(
                RunStatus::SchemeFailure,
                format!(
                    "omega fell to {:.6e} below floor {:.3e} at node {}",
                    wmin.min, c.omega_floor, wmin.argmin
                ),
                s,
                &u,
                t,
                steps,
            );
        }
        if bmin.min < -c.beta_tol {
            let t = s.time;
            let u = s.u.clone();
            return report(
                RunStatus::SchemeFailure,
                format!(
                    "beta undershoot {:.6e} below -{:.3e} at node {}",
                    bmin.min, c.beta_tol, bmin.argmin
                ),
                s,
                &u,
                t,
                steps,
            );
        }
        let k0 = s.beta.at_zero().powi(2);
        if degenerate_start && k0 > c.degeneracy_tol {
            let t = s.time;
            let u = s.u.clone();
            return report(
                RunStatus::BlowupDetected,
                format!(
                    "degeneracy loss: k at x = 0 rose to {k0:.6e} > {:.3e}, ||u_x||_inf = {gmax:.6e} at x = {gx:.6}",
                    c.degeneracy_tol
                ),
                s,
                &u,
                t,
                steps,
            );
        }
    }
    let t = s.time;
    let u = s.u.clone();
    report(
        RunStatus::Completed,
        "reached t_final".to_string(),
        s,
        &u,
        t,
        steps,
    )
}

/// Largest stable step for the toy model (unit coefficients).
pub fn stable_dt_toy(s: &ToyState, c: &StepControl) -> f64 {
    let h = s.u.grid().spacing();
    let umax = s.u.norm(Norm::Linf).max(TINY);
    let gmax = s.gamma.norm(Norm::Linf).max(TINY);
    (c.cfl_advective * h / umax)
        .min(c.cfl_diffusive * h * h / (2.0 * gmax))
        .min(c.dt_max)
}

/// Integrate the toy model; `gamma < -beta_tol` is a scheme failure.
pub fn integrate_toy<F>(
    s0: &ToyState,
    c: &StepControl,
    t_final: f64,
    mut observer: F,
) -> RunReport<ToyState>
where
    F: FnMut(&ToyState, f64),
{
    let mut s = s0.clone();
    let mut monitor = GrowthMonitor::default();
    let mut steps = 0;
    observer(&s, 0.0);
    monitor.push(gradient_summary(&s.u).0);
    while s.time < t_final {
        let dt_stable = stable_dt_toy(&s, c);
        if dt_stable < c.dt_min {
            let (status, reason) =
                failure_or_blowup(&monitor, &format!("step size collapsed to {dt_stable:.3e}"));
            let (t, u) = (s.time, s.u.clone());
            return report(status, reason, s, &u, t, steps);
        }
        let dt = dt_stable.min(t_final - s.time);
        let mut next = match step_toy(&s, dt) {
            Ok(next) => next,
            Err(e) => {
                let (t, u) = (s.time, s.u.clone());
                return report(RunStatus::SchemeFailure, e.to_string(), s, &u, t, steps);
            }
        };
        if t_final - next.time < 1e-14 * t_final.max(1.0) {
            next.time = t_final;
        }
        steps += 1;
        s = next;
        observer(&s, dt);
        let (gmax, gx, _) = gradient_summary(&s.u);
        monitor.push(gmax);
        if gmax > c.blowup_grad_threshold {
            let (t, u) = (s.time, s.u.clone());
            return report(
                RunStatus::BlowupDetected,
                format!("gradient threshold: ||u_x||_inf = {gmax:.6e} at x = {gx:.6}"),
                s,
                &u,
                t,
                steps,
            );
        }
        let gmin = s.gamma.extrema();
        if gmin.min < -c.beta_tol {
            let (t, u) = (s.time, s.u.clone());
            return report(
                RunStatus::SchemeFailure,
                format!("gamma undershoot {:.6e} at node {}", gmin.min, gmin.argmin),
                s,
                &u,
                t,
                steps,
            );
        }
    }
    let (t, u) = (s.time, s.u.clone());
    report(
        RunStatus::Completed,
        "reached t_final".to_string(),
        s,
        &u,
        t,
        steps,
    )
}
