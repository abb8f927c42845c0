//! Per-step trajectory audits and two-solution stability quantities.
//!
//! Time integrals are accumulated over accepted steps with the quadratic
//! interpolant through the last three samples (trapezoidal on the first
//! step), which keeps the quadrature error below the RK3 error. The discrete forms of the dissipation and budget terms are the
//! ones the scheme actually conserves (face-based dissipation, advective
//! transport), so residuals measure time-integration error only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{face_dissipation, Field, Norm};
use crate::model::{Params, State};
use crate::oracles::{lambda_exact, mu_exact, OdeEnvelope};

/// Default calibration constant for [`lifespan_lower_bound`].
pub const DEFAULT_C_CAL: f64 = 1e-2;

/// One row of the trajectory audit. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub dt: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub beta_min: f64,
    pub l2_u_sq: f64,
    pub l1_k: f64,
    pub l2_omega_sq: f64,
    pub l2_beta_sq: f64,
    pub e0: f64,
    pub e2: f64,
    pub e_total: f64,
    pub a_cont: f64,
    pub cont_integrand: f64,
    pub xi: f64,
    pub a_ricc: f64,
    pub eps_diss_int: f64,
    pub mean_u: f64,
    pub energy_residual_u: f64,
    pub mass_residual_k: f64,
    pub envelope_violation: f64,
    pub odd_even_drift: f64,
}

impl DiagnosticsRow {
    pub const COLUMNS: [&'static str; 24] = [
        "t",
        "dt",
        "omega_min",
        "omega_max",
        "k_min",
        "k_max",
        "beta_min",
        "l2_u_sq",
        "l1_k",
        "l2_omega_sq",
        "l2_beta_sq",
        "e0",
        "e2",
        "e_total",
        "a_cont",
        "cont_integrand",
        "xi",
        "a_ricc",
        "eps_diss_int",
        "mean_u",
        "energy_residual_u",
        "mass_residual_k",
        "envelope_violation",
        "odd_even_drift",
    ];

    /// Values in column order.
    pub fn values(&self) -> [f64; 24] {
        [
            self.t,
            self.dt,
            self.omega_min,
            self.omega_max,
            self.k_min,
            self.k_max,
            self.beta_min,
            self.l2_u_sq,
            self.l1_k,
            self.l2_omega_sq,
            self.l2_beta_sq,
            self.e0,
            self.e2,
            self.e_total,
            self.a_cont,
            self.cont_integrand,
            self.xi,
            self.a_ricc,
            self.eps_diss_int,
            self.mean_u,
            self.energy_residual_u,
            self.mass_residual_k,
            self.envelope_violation,
            self.odd_even_drift,
        ]
    }
}

/// Running time integral of a sampled quantity.
///
/// Quadratic interpolation through the last three samples, trapezoid on the
/// first interval, compensated summation.
#[derive(Debug, Clone, Default)]
pub struct TimeIntegral {
    t: Option<f64>,
    /// `(h, f)`: step that led to the sample and the sample value.
    last: Vec<(f64, f64)>,
    value: f64,
    carry: f64,
}

impl TimeIntegral {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Adds the sample `f(t)`; samples must come in increasing `t`.
    pub fn push(&mut self, t: f64, f: f64) {
        let h = self.t.map_or(0.0, |t0| t - t0);
        self.t = Some(t);
        self.push_step(h, f);
    }

    /// Adds a sample taken a step `h` after the previous one. Passing the
    /// step actually used avoids the rounding in differences of accumulated
    /// times.
    pub fn push_step(&mut self, h: f64, f: f64) {
        let inc = match self.last.as_slice() {
            [] => 0.0,
            [(_, f1)] => 0.5 * h * (f1 + f),
            [.., (_, f0), (h1, f1)] => {
                let (h1, h2) = (*h1, h);
                if h1 > 0.0 && h2 > 0.0 {
                    h2 / 6.0
                        * (f * (2.0 * h2 + 3.0 * h1) / (h1 + h2) + f1 * (h2 + 3.0 * h1) / h1
                            - f0 * h2 * h2 / (h1 * (h1 + h2)))
                } else {
                    0.5 * h2 * (f1 + f)
                }
            }
        };
        let y = inc - self.carry;
        let sum = self.value + y;
        self.carry = (sum - self.value) - y;
        self.value = sum;
        if self.last.len() == 2 {
            self.last.remove(0);
        }
        self.last.push((h, f));
    }
}

/// Running state of the audit for one trajectory.
#[derive(Debug, Clone)]
pub struct Auditor {
    params: Params,
    l2_u0: f64,
    l1_k0: f64,
    omega_env: OdeEnvelope,
    omega_low: OdeEnvelope,
    k_env: OdeEnvelope,
    energy_int: TimeIntegral,
    mass_int: TimeIntegral,
    cont_int: TimeIntegral,
}

impl Auditor {
    /// Takes the envelope data (`omega_*`, `omega^*`, `k_*`) from `s0`.
    pub fn new(s0: &State, p: &Params) -> Result<Self> {
        p.validate()?;
        let w = s0.omega.extrema();
        let kmin = s0.k().extrema().min.max(0.0);
        Ok(Self {
            params: *p,
            l2_u0: s0.u.l2_sq(),
            l1_k0: s0.k().quadrature(),
            omega_env: OdeEnvelope::new(w.max, 0.0, p.alpha2)?,
            omega_low: OdeEnvelope::new(w.min, 0.0, p.alpha2)?,
            k_env: OdeEnvelope::new(w.max, kmin, p.alpha2)?,
            energy_int: TimeIntegral::new(),
            mass_int: TimeIntegral::new(),
            cont_int: TimeIntegral::new(),
        })
    }

    /// Time integral of `cont_integrand` up to the last audited state.
    pub fn cont_integral(&self) -> f64 {
        self.cont_int.value()
    }

    /// Audits the next state of the trajectory; `dt` is the step that led to
    /// it (`0` for the initial state).
    pub fn audit(&mut self, s: &State, dt: f64) -> DiagnosticsRow {
        let p = &self.params;
        let k = s.k();
        let du = s.u.deriv1();
        let dw = s.omega.deriv1();
        let db = s.beta.deriv1();
        let coef = s.beta.zip_map(&s.omega, |b, w| b * b / w);

        let transport =
            -s.u.zip_map(&db, |u, d| u * d)
                .zip_map(&s.beta, |ud, b| 2.0 * b * ud)
                .quadrature();
        let production = coef.zip_map(&du, |c, d| c * d * d).quadrature();
        let eps_diss_int = k.zip_map(&s.omega, |k, w| k * w).quadrature();
        // 2 nu int (k/omega) u_x^2 and alpha4 int (k/omega) u_x^2 - int k omega - int u k_x
        self.energy_int
            .push_step(dt, 2.0 * p.nu * face_dissipation(&coef, &s.u));
        self.mass_int
            .push_step(dt, p.alpha4 * production - eps_diss_int + transport);

        let l2_u_sq = s.u.l2_sq();
        let l1_k = k.quadrature();
        let l2_omega_sq = s.omega.l2_sq();
        let l2_beta_sq = s.beta.l2_sq();
        let e0 = l2_u_sq + l2_omega_sq + l2_beta_sq;
        let e2 = s.u.deriv2().l2_sq() + s.omega.deriv2().l2_sq() + s.beta.deriv2().l2_sq();

        let beta_inf = s.beta.norm(Norm::Linf);
        let bundle = du
            .norm(Norm::Linf)
            .max(dw.norm(Norm::Linf))
            .max(db.norm(Norm::Linf));
        let cont_integrand = (1.0 + beta_inf * beta_inf) * bundle * bundle;
        let a_cont = (1.0 + s.time).powi(3) * (1.0 + beta_inf * beta_inf) * (1.0 + bundle * bundle);
        self.cont_int.push_step(dt, cont_integrand);

        let w = s.omega.extrema();
        let ke = k.extrema();
        let envelope_violation = (lambda_exact(&self.omega_low, s.time) - w.min)
            .max(w.max - lambda_exact(&self.omega_env, s.time))
            .max(mu_exact(&self.k_env, s.time) - ke.min);

        let zero = s.grid().zero_index();
        let a_ricc = k.deriv2().at(zero) / s.omega.at(zero);

        DiagnosticsRow {
            t: s.time,
            dt,
            omega_min: w.min,
            omega_max: w.max,
            k_min: ke.min,
            k_max: ke.max,
            beta_min: s.beta.extrema().min,
            l2_u_sq,
            l1_k,
            l2_omega_sq,
            l2_beta_sq,
            e0,
            e2,
            e_total: e0 + e2,
            a_cont,
            cont_integrand,
            xi: du.at(zero),
            a_ricc,
            eps_diss_int,
            mean_u: s.u.mean(),
            energy_residual_u: l2_u_sq + self.energy_int.value() - self.l2_u0,
            mass_residual_k: l1_k - self.l1_k0 - self.mass_int.value(),
            envelope_violation,
            odd_even_drift: odd_even_drift(s),
        }
    }
}

/// Largest deviation from odd `u`, even `omega` and `beta` about `x = 0`.
pub fn odd_even_drift(s: &State) -> f64 {
    s.u.even_part()
        .norm(Norm::Linf)
        .max(s.omega.odd_part().norm(Norm::Linf))
        .max(s.beta.odd_part().norm(Norm::Linf))
}

/// `E = ||u||_{H^2}^2 + ||omega||_{H^2}^2 + ||beta||_{H^2}^2` of a state.
pub fn energy_h2(s: &State) -> f64 {
    s.u.sobolev_h2_sq() + s.omega.sobolev_h2_sq() + s.beta.sobolev_h2_sq()
}

/// `min(1, c_cal / max(1, E(0))^2)`.
pub fn lifespan_lower_bound(s0: &State, c_cal: f64) -> f64 {
    let e = energy_h2(s0).max(1.0);
    (c_cal / (e * e)).min(1.0)
}

/// Stability quantities for a pair of solutions at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub t: f64,
    pub e_stab: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub gronwall_ratio: f64,
}

impl StabilityRow {
    pub const COLUMNS: [&'static str; 6] = [
        "t",
        "e_stab",
        "theta1",
        "theta2",
        "theta3",
        "gronwall_ratio",
    ];

    pub fn values(&self) -> [f64; 6] {
        [
            self.t,
            self.e_stab,
            self.theta1,
            self.theta2,
            self.theta3,
            self.gronwall_ratio,
        ]
    }
}

fn sup(f: impl Iterator<Item = f64>) -> f64 {
    f.fold(0.0, |m, v| {
        if v.abs() > m || v.is_nan() {
            v.abs()
        } else {
            m
        }
    })
}

/// Difference energy and the three rate functions of the stability estimate.
/// `gronwall_ratio` is left at `0`; [`PairAuditor`] fills it in.
pub fn audit_pair(s1: &State, s2: &State) -> Result<StabilityRow> {
    s1.u.check_same_grid(&s2.u)?;
    if s1.time != s2.time {
        return Err(Error::TimeMismatch(s1.time, s2.time));
    }
    let diff = |a: &Field, b: &Field| a.zip_map(b, |x, y| x - y).l2_sq();
    let e_stab = diff(&s1.u, &s2.u) + diff(&s1.omega, &s2.omega) + diff(&s1.beta, &s2.beta);

    let (du1, du2) = (s1.u.deriv1(), s2.u.deriv1());
    let (dw1, dw2) = (s1.omega.deriv1(), s2.omega.deriv1());
    let (db1, db2) = (s1.beta.deriv1(), s2.beta.deriv1());
    let (w1, w2) = (s1.omega.values(), s2.omega.values());
    let b1 = s1.beta.values();
    let n = w1.len();

    let grad_u = du1.norm(Norm::Linf).max(du2.norm(Norm::Linf));
    let grad_w = dw1.norm(Norm::Linf).max(dw2.norm(Norm::Linf));
    let grad_ub = grad_u.max(db1.norm(Norm::Linf)).max(db2.norm(Norm::Linf));
    let beta_sup = s1.beta.norm(Norm::Linf).max(s2.beta.norm(Norm::Linf));

    let r1 = sup((0..n).map(|j| b1[j] / (w1[j].sqrt() * w2[j])));
    let r2 = sup((0..n).map(|j| w1[j].sqrt() / w2[j]));
    let inv2 = sup(w2.iter().map(|w| 1.0 / w));
    let inv12 = inv2.max(sup(w1.iter().map(|w| 1.0 / w)));
    let r3 = sup((0..n).map(|j| b1[j] / (w1[j] * w2[j])));

    let weight = r1 * r1 + r2 * r2 + inv2;
    Ok(StabilityRow {
        t: s1.time,
        e_stab,
        theta1: grad_u + grad_u * grad_u * weight,
        theta2: grad_u + grad_w * grad_w * weight,
        theta3: grad_ub + beta_sup + grad_ub * grad_ub * (r1 * r1 + r2 * r2 + inv12 + r3),
        gronwall_ratio: 0.0,
    })
}

/// Accumulates `int (theta1 + theta2 + theta3)` along a twin run.
#[derive(Debug, Clone)]
pub struct PairAuditor {
    k_fit: f64,
    e_stab0: Option<f64>,
    theta_int: TimeIntegral,
}

impl PairAuditor {
    pub fn new(k_fit: f64) -> Self {
        Self {
            k_fit,
            e_stab0: None,
            theta_int: TimeIntegral::new(),
        }
    }

    pub fn theta_integral(&self) -> f64 {
        self.theta_int.value()
    }

    pub fn audit(&mut self, s1: &State, s2: &State) -> Result<StabilityRow> {
        let mut row = audit_pair(s1, s2)?;
        self.theta_int
            .push(row.t, row.theta1 + row.theta2 + row.theta3);
        let e0 = *self.e_stab0.get_or_insert(row.e_stab);
        row.gronwall_ratio = if row.e_stab == 0.0 {
            0.0
        } else {
            row.e_stab / (e0 * (self.k_fit * self.theta_int.value()).exp())
        };
        Ok(row)
    }
}

/// Smallest `K` for which `e_stab(t) <= e_stab(0) exp(K int_0^t theta)` holds
/// along the recorded series `(e_stab, int theta)`.
pub fn fit_gronwall_constant(series: &[(f64, f64)]) -> f64 {
    let Some(&(e0, _)) = series.first() else {
        return 0.0;
    };
    if e0 <= 0.0 {
        return 0.0;
    }
    series
        .iter()
        .filter(|(_, int)| *int > 0.0)
        .map(|&(e, int)| (e / e0).ln() / int)
        .fold(0.0, f64::max)
}
