//! Uniform periodic grid on the torus `[-pi, pi)` and the discrete calculus
//! used by every other module.
//!
//! All stencils are second-order central differences with periodic wrap.
//! Reductions sum left to right so results are bit-reproducible.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid with an even number of nodes, so that `x = 0` is
/// node `n_points / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_points: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 8 || n_points % 2 != 0 {
            return Err(Error::InvalidGrid(n_points));
        }
        Ok(Self {
            n_points,
            spacing: 2.0 * PI / n_points as f64,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Node `x_j = -pi + j h`, evaluated as `(j - n/2) h` so that the zero
    /// node is exactly `0.0` and mirrored nodes are exact negatives.
    pub fn node(&self, j: usize) -> f64 {
        (j as f64 - (self.n_points / 2) as f64) * self.spacing
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.node(j))
    }

    /// Index of the node sitting exactly at `x = 0`.
    pub fn zero_index(&self) -> usize {
        self.n_points / 2
    }

    /// Index of the mirror node of `j` under `x -> -x`.
    pub fn mirror(&self, j: usize) -> usize {
        (self.n_points - j) % self.n_points
    }

    #[inline]
    pub(crate) fn next(&self, j: usize) -> usize {
        if j + 1 == self.n_points {
            0
        } else {
            j + 1
        }
    }

    #[inline]
    pub(crate) fn prev(&self, j: usize) -> usize {
        if j == 0 {
            self.n_points - 1
        } else {
            j - 1
        }
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Field {
        Field::new(*self, self.nodes().map(f).collect())
    }

    pub fn constant(&self, value: f64) -> Field {
        Field::new(*self, vec![value; self.n_points])
    }

    pub fn zeros(&self) -> Field {
        self.constant(0.0)
    }
}

/// Which discrete norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    L3,
    L4,
    Linf,
}

/// Node values of a scalar function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

/// Node-wise minimum and maximum with their (smallest) indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub argmin: usize,
    pub max: f64,
    pub argmax: usize,
}

impl Field {
    /// Panics if `values.len()` differs from the grid size.
    pub fn new(grid: Grid, values: Vec<f64>) -> Self {
        assert_eq!(
            values.len(),
            grid.n_points(),
            "field length must match the grid"
        );
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// Value at the `x = 0` node.
    pub fn at_zero(&self) -> f64 {
        self.values[self.grid.zero_index()]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Field {
        Field::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Node-wise combination of two fields on the same grid.
    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &Field, f: F) -> Field {
        debug_assert_eq!(self.grid, other.grid);
        Field::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.grid.n_points(),
                right: other.grid.n_points(),
            });
        }
        Ok(())
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Field) {
        for (v, w) in self.values.iter_mut().zip(&other.values) {
            *v += a * w;
        }
    }

    /// Central first derivative `(f_{j+1} - f_{j-1}) / 2h`.
    pub fn deriv1(&self) -> Field {
        let g = &self.grid;
        let inv = 0.5 / g.spacing();
        let f = &self.values;
        Field::new(
            *g,
            (0..g.n_points())
                .map(|j| (f[g.next(j)] - f[g.prev(j)]) * inv)
                .collect(),
        )
    }

    /// Three-point second derivative `(f_{j+1} - 2 f_j + f_{j-1}) / h^2`.
    pub fn deriv2(&self) -> Field {
        let g = &self.grid;
        let inv = 1.0 / (g.spacing() * g.spacing());
        let f = &self.values;
        Field::new(
            *g,
            (0..g.n_points())
                .map(|j| (f[g.next(j)] - 2.0 * f[j] + f[g.prev(j)]) * inv)
                .collect(),
        )
    }

    /// Forward difference `(f_{j+1} - f_j) / h`, i.e. the gradient on face `j + 1/2`.
    pub fn face_gradient(&self) -> Field {
        let g = &self.grid;
        let inv = 1.0 / g.spacing();
        let f = &self.values;
        Field::new(
            *g,
            (0..g.n_points())
                .map(|j| (f[g.next(j)] - f[j]) * inv)
                .collect(),
        )
    }

    /// Node value of `(f')^2` taken as the mean of the two adjacent squared
    /// face gradients. Pairs with [`flux_div`] under summation by parts.
    pub fn face_mean_sq_gradient(&self) -> Field {
        let g = &self.grid;
        let grad = self.face_gradient();
        let gv = grad.values();
        Field::new(
            *g,
            (0..g.n_points())
                .map(|j| 0.5 * (gv[j] * gv[j] + gv[g.prev(j)] * gv[g.prev(j)]))
                .collect(),
        )
    }

    /// Periodic rectangle rule `h * sum f_j`.
    pub fn quadrature(&self) -> f64 {
        self.grid.spacing() * self.values.iter().sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.quadrature() / (2.0 * PI)
    }

    pub fn norm(&self, p: Norm) -> f64 {
        let h = self.grid.spacing();
        match p {
            Norm::L1 => h * self.values.iter().map(|v| v.abs()).sum::<f64>(),
            Norm::L2 => (h * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt(),
            Norm::L3 => (h * self.values.iter().map(|v| v.abs().powi(3)).sum::<f64>()).cbrt(),
            Norm::L4 => (h * self.values.iter().map(|v| v.powi(4)).sum::<f64>())
                .sqrt()
                .sqrt(),
            Norm::Linf => self.values.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        }
    }

    /// `||f||_2^2`, avoiding the square root round trip.
    pub fn l2_sq(&self) -> f64 {
        self.grid.spacing() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    /// Equivalent H^2 norm squared: `||f||_2^2 + ||f''||_2^2`.
    pub fn sobolev_h2_sq(&self) -> f64 {
        self.l2_sq() + self.deriv2().l2_sq()
    }

    /// Node-wise extrema; ties resolve to the smallest index.
    pub fn extrema(&self) -> Extrema {
        let mut ext = Extrema {
            min: self.values[0],
            argmin: 0,
            max: self.values[0],
            argmax: 0,
        };
        for (j, &v) in self.values.iter().enumerate().skip(1) {
            if v < ext.min {
                ext.min = v;
                ext.argmin = j;
            }
            if v > ext.max {
                ext.max = v;
                ext.argmax = j;
            }
        }
        ext
    }

    /// Odd part `(f(x) - f(-x)) / 2`.
    pub fn odd_part(&self) -> Field {
        let g = self.grid;
        Field::new(
            g,
            (0..g.n_points())
                .map(|j| 0.5 * (self.values[j] - self.values[g.mirror(j)]))
                .collect(),
        )
    }

    /// Even part `(f(x) + f(-x)) / 2`.
    pub fn even_part(&self) -> Field {
        let g = self.grid;
        Field::new(
            g,
            (0..g.n_points())
                .map(|j| 0.5 * (self.values[j] + self.values[g.mirror(j)]))
                .collect(),
        )
    }

    /// Derivative of order `order` of the trigonometric interpolant.
    ///
    /// Only used for verification of identities; the solver itself never
    /// differentiates spectrally. The Nyquist mode is dropped for odd orders.
    pub fn spectral_deriv(&self, order: u32) -> Field {
        let n = self.grid.n_points();
        let mut buf: Vec<Complex<f64>> =
            self.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(n).process(&mut buf);
        let half = (n / 2) as i64;
        for (m, c) in buf.iter_mut().enumerate() {
            let mut wave = m as i64;
            if wave > half {
                wave -= n as i64;
            }
            if wave == half && order % 2 == 1 {
                *c = Complex::new(0.0, 0.0);
                continue;
            }
            // x_j = -pi + j h, so the shift contributes only a phase that
            // cancels between the forward and inverse transforms.
            let ik = Complex::new(0.0, wave as f64);
            *c *= ik.powu(order);
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        Field::new(self.grid, buf.iter().map(|c| c.re * scale).collect())
    }
}

/// Conservative discretization of `d/dx (coef df/dx)`:
/// `[c_{j+1/2} (f_{j+1} - f_j) - c_{j-1/2} (f_j - f_{j-1})] / h^2` with
/// arithmetic-mean face coefficients. Its quadrature telescopes to zero.
pub fn flux_div(coef: &Field, f: &Field) -> Field {
    debug_assert_eq!(coef.grid(), f.grid());
    let g = *f.grid();
    let inv = 1.0 / (g.spacing() * g.spacing());
    let c = coef.values();
    let v = f.values();
    Field::new(
        g,
        (0..g.n_points())
            .map(|j| {
                let (jp, jm) = (g.next(j), g.prev(j));
                let cp = 0.5 * (c[j] + c[jp]);
                let cm = 0.5 * (c[j] + c[jm]);
                (cp * (v[jp] - v[j]) - cm * (v[j] - v[jm])) * inv
            })
            .collect(),
    )
}

/// Face-based quadrature of `coef (df/dx)^2`: `h * sum c_{j+1/2} g_{j+1/2}^2`.
///
/// This is exactly `-quadrature(f * flux_div(coef, f))`, so budgets built on
/// it close to roundoff at the semi-discrete level.
pub fn face_dissipation(coef: &Field, f: &Field) -> f64 {
    debug_assert_eq!(coef.grid(), f.grid());
    let g = *f.grid();
    let h = g.spacing();
    let c = coef.values();
    let v = f.values();
    let mut acc = 0.0;
    for j in 0..g.n_points() {
        let jp = g.next(j);
        let grad = (v[jp] - v[j]) / h;
        acc += 0.5 * (c[j] + c[jp]) * grad * grad;
    }
    h * acc
}
