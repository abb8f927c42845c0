//! Parameters, states and right-hand sides of the 1-D Kolmogorov system.
//!
//! The primary formulation evolves `(u, omega, beta)` with `beta = sqrt(k)`.
//! The `k` form is kept for cross-validation and the toy model
//! `(u, gamma)` isolates the degenerate-viscosity mechanism.
//!
//! Discretization choices that matter for the diagnostics:
//!
//! * `u` advection is the conservative form `d/dx(u^2/2)` with the
//!   energy-preserving face flux `(u_j^2 + u_j u_{j+1} + u_{j+1}^2) / 6`, so
//!   both the mean of `u` and the semi-discrete `L^2` balance close exactly.
//! * `omega`, `beta` advection is `u * deriv1(.)`, which vanishes wherever
//!   `u` does (in particular at `x = 0` for odd `u`).
//! * The `alpha3 (beta/omega) (beta')^2` source uses the mean of the two
//!   squared face gradients. Paired with the arithmetic-mean face
//!   coefficient of [`flux_div`] it makes the `alpha3` terms drop out of the
//!   discrete `L^1` budget of `k = beta^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{flux_div, Field, Grid};

/// Strictly positive model coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub nu: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
    /// The constant `c` in the mixing length `ell = c sqrt(k) / omega`.
    pub ell_constant: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            nu: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            alpha3: 1.0,
            alpha4: 1.0,
            ell_constant: 1.0,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let entries = [
            ("nu", self.nu),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("alpha3", self.alpha3),
            ("alpha4", self.alpha4),
            ("ell_constant", self.ell_constant),
        ];
        for (name, value) in entries {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParam {
                    name,
                    value,
                    reason: "model coefficients must be strictly positive",
                });
            }
        }
        Ok(())
    }

    /// Largest diffusion prefactor among the three equations.
    pub fn max_diffusion_prefactor(&self) -> f64 {
        self.nu.max(self.alpha1).max(self.alpha3)
    }
}

/// Snapshot `(u, omega, beta)` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub time: f64,
    pub u: Field,
    pub omega: Field,
    pub beta: Field,
}

impl State {
    pub fn new(time: f64, u: Field, omega: Field, beta: Field) -> Result<Self> {
        u.check_same_grid(&omega)?;
        u.check_same_grid(&beta)?;
        Ok(Self {
            time,
            u,
            omega,
            beta,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    /// `k = beta^2`.
    pub fn k(&self) -> Field {
        self.beta.map(|b| b * b)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.omega.is_finite() && self.beta.is_finite()
    }

    /// Replace `u` by its odd part and `omega`, `beta` by their even parts.
    pub fn project_symmetric(&mut self) {
        self.u = self.u.odd_part();
        self.omega = self.omega.even_part();
        self.beta = self.beta.even_part();
    }
}

/// Snapshot `(u, gamma)` of the toy model.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyState {
    pub time: f64,
    pub u: Field,
    pub gamma: Field,
}

/// Time derivatives of the `beta` formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaRates {
    pub du: Field,
    pub domega: Field,
    pub dbeta: Field,
}

/// Time derivatives of the `k` formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct KRates {
    pub du: Field,
    pub domega: Field,
    pub dk: Field,
}

/// Time derivatives of the toy model.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyRates {
    pub du: Field,
    pub dgamma: Field,
}

fn check_omega(omega: &Field) -> Result<()> {
    match omega.values().iter().position(|&w| !(w > 0.0)) {
        Some(index) => Err(Error::NonPositiveOmega {
            index,
            value: omega.at(index),
        }),
        None => Ok(()),
    }
}

fn check_finite(fields: &[&Field]) -> Result<()> {
    if fields.iter().all(|f| f.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Eddy diffusivity `beta^2 / omega`.
pub fn diffusivity(s: &State) -> Result<Field> {
    check_omega(&s.omega)?;
    Ok(s.beta.zip_map(&s.omega, |b, w| b * b / w))
}

/// Energy-preserving discretization of `d/dx (u^2 / 2)`.
///
/// Face flux `((a^2 + b^2) + a b) / 6`; written symmetrically in `(a, b)` so
/// that odd data produce a bitwise odd result.
pub fn burgers_flux_div(u: &Field) -> Field {
    let g = *u.grid();
    let inv = 1.0 / g.spacing();
    let v = u.values();
    let flux = |a: f64, b: f64| ((a * a + b * b) + a * b) / 6.0;
    Field::new(
        g,
        (0..g.n_points())
            .map(|j| {
                let (jp, jm) = (g.next(j), g.prev(j));
                (flux(v[j], v[jp]) - flux(v[jm], v[j])) * inv
            })
            .collect(),
    )
}

/// Right-hand side of the `(u, omega, beta)` system.
pub fn rhs_beta_form(s: &State, p: &Params) -> Result<BetaRates> {
    let coef = diffusivity(s)?;
    let (u, omega, beta) = (&s.u, &s.omega, &s.beta);

    let mut du = burgers_flux_div(u);
    du.values_mut().iter_mut().for_each(|v| *v = -*v);
    du.axpy(p.nu, &flux_div(&coef, u));

    let du_dx = u.deriv1();
    let uv = u.values();
    let wv = omega.values();
    let bv = beta.values();

    let dw_dx = omega.deriv1();
    let diff_w = flux_div(&coef, omega);
    let domega = Field::new(
        *s.grid(),
        (0..uv.len())
            .map(|j| -uv[j] * dw_dx.at(j) + p.alpha1 * diff_w.at(j) - p.alpha2 * wv[j] * wv[j])
            .collect(),
    );

    let db_dx = beta.deriv1();
    let db_sq = beta.face_mean_sq_gradient();
    let diff_b = flux_div(&coef, beta);
    let dbeta = Field::new(
        *s.grid(),
        (0..uv.len())
            .map(|j| {
                let ratio = bv[j] / wv[j];
                let ux = du_dx.at(j);
                -uv[j] * db_dx.at(j) + p.alpha3 * diff_b.at(j) - 0.5 * bv[j] * wv[j]
                    + 0.5 * p.alpha4 * ratio * ux * ux
                    + p.alpha3 * ratio * db_sq.at(j)
            })
            .collect(),
    );

    check_finite(&[&du, &domega, &dbeta])?;
    Ok(BetaRates { du, domega, dbeta })
}

/// Right-hand side of the original `(u, omega, k)` system with diffusivity `k / omega`.
pub fn rhs_k_form(u: &Field, omega: &Field, k: &Field, p: &Params) -> Result<KRates> {
    u.check_same_grid(omega)?;
    u.check_same_grid(k)?;
    check_omega(omega)?;
    let coef = k.zip_map(omega, |k, w| k / w);

    let mut du = burgers_flux_div(u);
    du.values_mut().iter_mut().for_each(|v| *v = -*v);
    du.axpy(p.nu, &flux_div(&coef, u));

    let du_dx = u.deriv1();
    let dw_dx = omega.deriv1();
    let dk_dx = k.deriv1();
    let diff_w = flux_div(&coef, omega);
    let diff_k = flux_div(&coef, k);
    let (uv, wv, kv) = (u.values(), omega.values(), k.values());

    let domega = Field::new(
        *u.grid(),
        (0..uv.len())
            .map(|j| -uv[j] * dw_dx.at(j) + p.alpha1 * diff_w.at(j) - p.alpha2 * wv[j] * wv[j])
            .collect(),
    );
    let dk = Field::new(
        *u.grid(),
        (0..uv.len())
            .map(|j| {
                let ux = du_dx.at(j);
                -uv[j] * dk_dx.at(j) + p.alpha3 * diff_k.at(j) - kv[j] * wv[j]
                    + p.alpha4 * kv[j] / wv[j] * ux * ux
            })
            .collect(),
    );

    check_finite(&[&du, &domega, &dk])?;
    Ok(KRates { du, domega, dk })
}

/// Right-hand side of the toy model with viscosity `gamma`.
pub fn rhs_toy(s: &ToyState) -> Result<ToyRates> {
    s.u.check_same_grid(&s.gamma)?;
    let (u, gamma) = (&s.u, &s.gamma);

    let mut du = burgers_flux_div(u);
    du.values_mut().iter_mut().for_each(|v| *v = -*v);
    du.axpy(1.0, &flux_div(gamma, u));

    let du_dx = u.deriv1();
    let dg_dx = gamma.deriv1();
    let diff_g = flux_div(gamma, gamma);
    let (uv, gv) = (u.values(), gamma.values());
    let dgamma = Field::new(
        *u.grid(),
        (0..uv.len())
            .map(|j| {
                let ux = du_dx.at(j);
                -uv[j] * dg_dx.at(j) + diff_g.at(j) + gv[j] * ux * ux
            })
            .collect(),
    );

    check_finite(&[&du, &dgamma])?;
    Ok(ToyRates { du, dgamma })
}

/// Dissipation rate `epsilon = k omega` and mixing length `ell = c sqrt(k) / omega`.
pub fn turbulence_quantities(s: &State, p: &Params) -> Result<(Field, Field)> {
    check_omega(&s.omega)?;
    let epsilon = s.beta.zip_map(&s.omega, |b, w| b * b * w);
    let ell = s.beta.zip_map(&s.omega, |b, w| p.ell_constant * b / w);
    Ok((epsilon, ell))
}
