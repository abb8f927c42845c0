//! Closed-form and reference solutions used to check the solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Params;

/// Data of the spatially uniform ODE system `lambda' = -alpha2 lambda^2`,
/// `mu' = -lambda mu`.
///
/// `lambda` tracks `omega` and `mu` tracks `k` when the data are constant in
/// space; for general data the same formulas give the pointwise envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeEnvelope {
    pub lambda0: f64,
    pub mu0: f64,
    pub alpha2: f64,
}

impl OdeEnvelope {
    pub fn new(lambda0: f64, mu0: f64, alpha2: f64) -> Result<Self> {
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(Error::InvalidParam {
                name: "lambda0",
                value: lambda0,
                reason: "must be strictly positive",
            });
        }
        if !(mu0 >= 0.0 && mu0.is_finite()) {
            return Err(Error::InvalidParam {
                name: "mu0",
                value: mu0,
                reason: "must be nonnegative",
            });
        }
        if !(alpha2 > 0.0 && alpha2.is_finite()) {
            return Err(Error::InvalidParam {
                name: "alpha2",
                value: alpha2,
                reason: "must be strictly positive",
            });
        }
        Ok(Self {
            lambda0,
            mu0,
            alpha2,
        })
    }
}

pub fn lambda_exact(e: &OdeEnvelope, t: f64) -> f64 {
    e.lambda0 / (e.lambda0 * e.alpha2 * t + 1.0)
}

pub fn mu_exact(e: &OdeEnvelope, t: f64) -> f64 {
    if e.mu0 == 0.0 {
        return 0.0;
    }
    e.mu0 / (e.lambda0 * e.alpha2 * t + 1.0).powf(1.0 / e.alpha2)
}

/// Exact solution for constant-in-space data: `(u, omega, k)` at time `t`.
pub fn uniform_exact(u0: f64, omega0: f64, k0: f64, p: &Params, t: f64) -> Result<(f64, f64, f64)> {
    let e = OdeEnvelope::new(omega0, k0, p.alpha2)?;
    Ok((u0, lambda_exact(&e, t), mu_exact(&e, t)))
}

/// Solution of `xi' = -xi^2` from `xi0 < 0`, an upper bound for the slope
/// at the origin in the symmetric setting.
pub fn riccati_bound(xi0: f64, t: f64) -> Result<f64> {
    if !(xi0 < 0.0) {
        return Err(Error::InvalidParam {
            name: "xi0",
            value: xi0,
            reason: "comparison bound needs a negative initial slope",
        });
    }
    let pole = 1.0 / xi0.abs();
    if t >= pole {
        return Err(Error::RiccatiDomain { t, pole });
    }
    Ok(xi0 / (1.0 + xi0 * t))
}

/// Divergence threshold for [`riccati_solve`].
pub const RICCATI_CAP: f64 = 1e9;

/// Integrates `xi' = -xi^2 + a(t) xi` with one classical RK4 step per sample
/// interval, `a` interpolated linearly.
///
/// `a_samples` holds `(t, a)` pairs with increasing times. The output has one
/// `(t, xi)` entry per sample reached; integration stops after the first
/// value with `|xi| > RICCATI_CAP`.
pub fn riccati_solve(xi0: f64, a_samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(a_samples.len());
    let Some(&(t0, _)) = a_samples.first() else {
        return out;
    };
    let mut xi = xi0;
    out.push((t0, xi));
    let f = |xi: f64, a: f64| -xi * xi + a * xi;
    for w in a_samples.windows(2) {
        let (ta, aa) = w[0];
        let (tb, ab) = w[1];
        let dt = tb - ta;
        let am = 0.5 * (aa + ab);
        let k1 = f(xi, aa);
        let k2 = f(xi + 0.5 * dt * k1, am);
        let k3 = f(xi + 0.5 * dt * k2, am);
        let k4 = f(xi + dt * k3, ab);
        xi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((tb, xi));
        if !(xi.abs() <= RICCATI_CAP) {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn lambda_closed_form() {
        let e = OdeEnvelope::new(2.0, 0.0, 1.0).unwrap();
        assert!(close(lambda_exact(&e, 1.0), 2.0 / 3.0, 1e-15));
        assert_eq!(lambda_exact(&e, 0.0), 2.0);
        let t = 1e6;
        assert!(close(lambda_exact(&e, t), 1.0 / t, 1e-4));
    }

    #[test]
    fn mu_closed_form() {
        let e = OdeEnvelope::new(1.0, 1.0, 2.0).unwrap();
        assert!(close(mu_exact(&e, 3.0), 1.0 / 7f64.sqrt(), 1e-15));
        let z = OdeEnvelope::new(1.0, 0.0, 2.0).unwrap();
        assert_eq!(mu_exact(&z, 5.0), 0.0);
        let one = OdeEnvelope::new(3.0, 2.0, 1.0).unwrap();
        for t in [0.0, 0.3, 4.0] {
            assert!(close(
                mu_exact(&one, t),
                2.0 * lambda_exact(&one, t) / 3.0,
                1e-14
            ));
        }
    }

    #[test]
    fn envelope_rejects_bad_data() {
        assert!(OdeEnvelope::new(0.0, 1.0, 1.0).is_err());
        assert!(OdeEnvelope::new(1.0, -1.0, 1.0).is_err());
        assert!(OdeEnvelope::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn uniform_examples() {
        let p = Params::default();
        for t in [0.0, 1.0, 7.0] {
            assert_eq!(uniform_exact(0.3, 1.0, 0.0, &p, t).unwrap().2, 0.0);
        }
        let (u, w, k) = uniform_exact(0.5, 1.0, 3.0, &p, 1.0).unwrap();
        assert_eq!(u, 0.5);
        assert!(close(w, 0.5, 1e-15));
        assert!(close(k, 1.5, 1e-15));
    }

    #[test]
    fn uniform_satisfies_ode() {
        let p = Params {
            alpha2: 1.7,
            ..Params::default()
        };
        let h = 1e-5;
        for t in [0.1, 0.9, 3.0] {
            let (_, w, k) = uniform_exact(0.0, 1.3, 2.0, &p, t).unwrap();
            let (_, _, kp) = uniform_exact(0.0, 1.3, 2.0, &p, t + h).unwrap();
            let (_, _, km) = uniform_exact(0.0, 1.3, 2.0, &p, t - h).unwrap();
            let (_, wp, _) = uniform_exact(0.0, 1.3, 2.0, &p, t + h).unwrap();
            let (_, wm, _) = uniform_exact(0.0, 1.3, 2.0, &p, t - h).unwrap();
            assert!(((kp - km) / (2.0 * h) + k * w).abs() < 1e-6);
            assert!(((wp - wm) / (2.0 * h) + p.alpha2 * w * w).abs() < 1e-6);
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(riccati_bound(-1.0, 0.5).unwrap(), -2.0);
        assert_eq!(riccati_bound(-1.0, 0.0).unwrap(), -1.0);
        assert!(close(riccati_bound(-2.0, 0.49).unwrap(), -100.0, 1e-12));
        assert!(close(riccati_bound(-2.0, 0.495).unwrap(), -200.0, 1e-12));
        assert!(matches!(
            riccati_bound(-2.0, 0.5),
            Err(Error::RiccatiDomain { .. })
        ));
        assert!(riccati_bound(0.5, 0.1).is_err());
    }

    /// Sample times clustered toward the pole at 1.
    fn clustered(n: usize, t_max: f64) -> Vec<f64> {
        let s_max = -(1.0 - t_max).ln();
        (0..=n)
            .map(|i| 1.0 - (-(s_max * i as f64 / n as f64)).exp())
            .collect()
    }

    #[test]
    fn solve_matches_bound_without_forcing() {
        let ts = clustered(200_000, 0.999);
        let samples: Vec<_> = ts.iter().map(|&t| (t, 0.0)).collect();
        let out = riccati_solve(-1.0, &samples);
        assert_eq!(out.len(), samples.len());
        for &(t, xi) in &out {
            let b = riccati_bound(-1.0, t).unwrap();
            assert!(close(xi, b, 1e-6), "t={t} xi={xi} bound={b}");
        }
        assert!(out.last().unwrap().1 <= -999.0);
    }

    #[test]
    fn solve_equilibrium() {
        let samples: Vec<_> = (0..100).map(|i| (i as f64 * 0.1, 2.0)).collect();
        assert!(riccati_solve(0.0, &samples)
            .iter()
            .all(|&(_, xi)| xi == 0.0));
    }

    #[test]
    fn solve_with_positive_forcing() {
        // a = 1: exact solution xi = xi0 e^t / (1 + xi0 (e^t - 1)), pole at ln 3.
        let run = |n: usize| {
            let samples: Vec<_> = (0..=n).map(|i| (1.0 * i as f64 / n as f64, 1.0)).collect();
            riccati_solve(-0.5, &samples)
        };
        let coarse = run(1000);
        let fine = run(2000);
        let exact = |t: f64| -0.5 * t.exp() / (1.0 - 0.5 * (t.exp() - 1.0));
        let mut prev = 0.0;
        for (i, &(t, xi)) in coarse.iter().enumerate() {
            assert!((xi - fine[2 * i].1).abs() <= 1e-9 * xi.abs());
            assert!(close(xi, exact(t), 1e-9));
            assert!(xi < prev);
            assert!(xi <= riccati_bound(-0.5, t).unwrap());
            prev = xi;
        }
        let dense: Vec<_> = clustered(100_000, 1.0 - 1e-9)
            .into_iter()
            .map(|t| (3f64.ln() * t, 1.0))
            .collect();
        let out = riccati_solve(-0.5, &dense);
        assert!(out.last().unwrap().1 < -1e3);
    }

    #[test]
    fn solve_stops_at_cap() {
        let samples: Vec<_> = (0..=1000).map(|i| (i as f64 * 1e-3, 0.0)).collect();
        let out = riccati_solve(-1e8, &samples);
        assert!(out.len() < samples.len());
        assert!(out.last().unwrap().1.abs() > RICCATI_CAP);
    }
}
