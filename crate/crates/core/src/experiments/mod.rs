//! Scenario execution: single runs, refinement ladders and parameter sweeps,
//! with CSV/JSON output.

pub mod config;
pub mod output;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    parse_config, InitialData, Scenario, ScenarioConfig, TrigPoly, TurbulenceData, GRAMMAR,
};

use crate::diagnostics::{
    fit_gronwall_constant, lifespan_lower_bound, Auditor, DiagnosticsRow, PairAuditor, StabilityRow,
};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Norm};
use crate::model::{Params, State, ToyState};
use crate::oracles::{self, lambda_exact, mu_exact, riccati_bound, riccati_solve, OdeEnvelope};
use crate::timestepper::{integrate_toy, integrate_with_stops, RunReport, RunStatus, StepControl};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// End time of the uniform-data temporal ladder in the convergence scenario.
pub const TEMPORAL_HORIZON: f64 = 1.0;

/// Columns of the toy-model CSV.
pub const TOY_COLUMNS: [&str; 8] = [
    "t",
    "dt",
    "gamma_min",
    "gamma_max",
    "l2_u_sq",
    "l1_gamma",
    "xi",
    "mean_u",
];

/// Digest of one sweep member.
#[derive(Debug, Clone, Serialize)]
pub struct MemberSummary {
    pub label: String,
    pub parameter: f64,
    pub n_points: usize,
    pub status: String,
    pub t_end: f64,
    pub reason: String,
    pub steps: usize,
    /// `||u_x||_inf` at the end, where it sits, and the signed slope at `x = 0`.
    pub max_gradient: f64,
    pub max_gradient_x: f64,
    pub xi: f64,
    pub lifespan_bound: f64,
    /// False when a detector fired before the lifespan bound.
    pub lifespan_consistent: bool,
    pub cont_integral: f64,
    pub max_abs_mean_drift: f64,
    pub max_k_origin: f64,
    pub min_a_ricc: f64,
    /// `max(xi - riccati_bound)` over steps before 95% of the comparison pole.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riccati_excess: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal: Option<DiagnosticsRow>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Richardson {
    pub estimates: Vec<f64>,
    pub differences: Vec<f64>,
    /// Ratio of the last two successive differences.
    pub ratio: f64,
    pub order: f64,
    pub extrapolated: f64,
    /// Successive differences shrink by at least 2x.
    pub stabilized: bool,
}

impl Richardson {
    /// Needs at least three estimates from a ladder refined by 2x each time.
    pub fn from_estimates(estimates: &[f64]) -> Option<Self> {
        if estimates.len() < 3 {
            return None;
        }
        let differences: Vec<f64> = estimates.windows(2).map(|w| w[1] - w[0]).collect();
        let n = differences.len();
        let (d1, d2) = (differences[n - 2], differences[n - 1]);
        let ratio = d1 / d2;
        let last = estimates[estimates.len() - 1];
        let extrapolated = if ratio.abs() > 1.0 {
            last + d2 / (ratio - 1.0)
        } else {
            last
        };
        let stabilized = differences
            .windows(2)
            .all(|w| w[1].abs() * 2.0 <= w[0].abs());
        Some(Self {
            estimates: estimates.to_vec(),
            differences,
            ratio,
            order: ratio.abs().log2(),
            extrapolated,
            stabilized,
        })
    }
}

/// Least-squares slope of `log y` against `log x`, with the RMS residual.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub rate: f64,
    pub residual: f64,
}

impl RateFit {
    pub fn fit(xs: &[f64], ys: &[f64]) -> Option<Self> {
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .zip(ys)
            .filter(|(x, y)| **x > 0.0 && **y > 0.0)
            .map(|(x, y)| (x.ln(), y.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let rate = sxy / sxx;
        let residual = (pts
            .iter()
            .map(|p| (p.1 - my - rate * (p.0 - mx)).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        Some(Self { rate, residual })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformCheck {
    pub t: f64,
    pub omega: f64,
    pub omega_exact: f64,
    pub omega_rel_err: f64,
    pub k: f64,
    pub k_exact: f64,
    pub k_rel_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapEntry {
    pub epsilon: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzEntry {
    pub delta: f64,
    /// `sqrt(E(T)) / delta`.
    pub ratio: f64,
    pub max_gronwall_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderEntry {
    pub parameter: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub expected: f64,
    pub got: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Quantities computed across members.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CrossMember {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform: Option<UniformCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup_time: Option<Richardson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub epsilon_gaps: Vec<GapEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_rate: Option<RateFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_fit: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lipschitz: Vec<LipschitzEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub spatial_ladder: Vec<LadderEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub spatial_orders: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub temporal_ladder: Vec<LadderEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub temporal_orders: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle_checks: Vec<OracleCheck>,
}

/// Scenario-level result, serialized as the JSON summary.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub artifact_version: String,
    pub scenario: String,
    pub status: String,
    pub t_end: f64,
    pub reason: String,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal: Option<DiagnosticsRow>,
    pub members: Vec<MemberSummary>,
    pub cross: CrossMember,
    pub config: ScenarioConfig,
}

/// Full trajectory data of one member, kept in memory.
#[derive(Debug, Clone)]
pub struct MemberRun {
    pub summary: MemberSummary,
    pub report: Option<RunReport>,
    pub rows: Vec<DiagnosticsRow>,
    /// States at `t = 0` and at every sample time reached.
    pub samples: Vec<State>,
    pub toy_rows: Vec<Vec<f64>>,
}

/// Everything a scenario produced.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub summary: SweepSummary,
    pub runs: Vec<MemberRun>,
    pub stability: Vec<(String, Vec<StabilityRow>)>,
}

/// Samples the initial data on a grid.
pub fn initial_state(d: &InitialData, g: &Grid) -> Result<State> {
    State::new(0.0, d.u0.sample(g), d.omega0.sample(g), d.sample_beta(g))
}

fn sample_times(t_final: f64, samples: usize) -> Vec<f64> {
    if t_final <= 0.0 {
        return vec![0.0];
    }
    (1..=samples)
        .map(|i| t_final * i as f64 / samples as f64)
        .collect()
}

struct RunSpec {
    label: String,
    parameter: f64,
    state: State,
    control: StepControl,
    t_final: f64,
    keep_samples: bool,
}

fn fmt_param(v: f64) -> String {
    format!("{v:e}")
}

fn simulate(spec: RunSpec, cfg: &ScenarioConfig, out: Option<&Path>) -> Result<MemberRun> {
    let s0 = &spec.state;
    let p = &cfg.params;
    let stops = if spec.keep_samples {
        sample_times(spec.t_final, cfg.samples)
    } else {
        vec![spec.t_final]
    };
    let mut auditor = Auditor::new(s0, p)?;
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let mut next_sample = 0;
    let mean0 = s0.u.mean();
    let mut mean_drift: f64 = 0.0;
    let mut max_k_origin: f64 = 0.0;
    let report = integrate_with_stops(s0, p, &spec.control, &stops, |s, dt| {
        rows.push(auditor.audit(s, dt));
        mean_drift = mean_drift.max((s.u.mean() - mean0).abs());
        max_k_origin = max_k_origin.max(s.beta.at_zero().powi(2));
        if spec.keep_samples {
            if s.time == 0.0 && samples.is_empty() {
                samples.push(s.clone());
            } else if next_sample < stops.len() && s.time == stops[next_sample] {
                samples.push(s.clone());
                next_sample += 1;
            }
        }
    });

    let xi0 = rows.first().map(|r| r.xi).unwrap_or(0.0);
    let riccati_excess = (xi0 < 0.0).then(|| {
        let horizon = 0.95 / xi0.abs();
        rows.iter()
            .filter(|r| r.t <= horizon)
            .map(|r| r.xi - riccati_bound(xi0, r.t).expect("inside horizon"))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let bound = lifespan_lower_bound(s0, cfg.c_cal);
    let mut summary = MemberSummary {
        label: spec.label.clone(),
        parameter: spec.parameter,
        n_points: s0.grid().n_points(),
        status: report.status.as_str().to_string(),
        t_end: report.t_end,
        reason: report.reason.clone(),
        steps: report.steps_taken,
        max_gradient: report.max_gradient,
        max_gradient_x: report.max_gradient_x,
        xi: report.xi,
        lifespan_bound: bound,
        lifespan_consistent: report.status == RunStatus::Completed || report.t_end >= bound,
        cont_integral: auditor.cont_integral(),
        max_abs_mean_drift: mean_drift,
        max_k_origin,
        min_a_ricc: rows.iter().map(|r| r.a_ricc).fold(f64::INFINITY, f64::min),
        riccati_excess,
        min_gamma: None,
        terminal: rows.last().copied(),
        files: Vec::new(),
    };
    if let Some(dir) = out {
        summary.files = write_member_files(dir, &spec.label, s0, p, &rows, cfg.csv_stride)?;
    }
    Ok(MemberRun {
        summary,
        report: Some(report),
        rows,
        samples,
        toy_rows: Vec::new(),
    })
}

fn write_member_files(
    dir: &Path,
    label: &str,
    s0: &State,
    p: &Params,
    rows: &[DiagnosticsRow],
    stride: usize,
) -> Result<Vec<String>> {
    let csv = format!("{label}.csv");
    output::write_diagnostics_csv(&dir.join(&csv), rows, stride)?;

    let xi0 = rows.first().map(|r| r.xi).unwrap_or(0.0);
    let xi_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let b = if xi0 < 0.0 {
                riccati_bound(xi0, r.t).unwrap_or(f64::NAN)
            } else {
                f64::NAN
            };
            vec![r.t, r.xi, b]
        })
        .collect();
    let xi_file = format!("{label}_xi.dat");
    output::write_columns(&dir.join(&xi_file), &["t", "xi", "riccati_bound"], &xi_rows)?;

    let w = s0.omega.extrema();
    let k_star = s0.k().extrema().min.max(0.0);
    let hi = OdeEnvelope::new(w.max, k_star, p.alpha2)?;
    let lo = OdeEnvelope::new(w.min, 0.0, p.alpha2)?;
    let env_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            vec![
                r.t,
                r.omega_min,
                r.omega_max,
                lambda_exact(&lo, r.t),
                lambda_exact(&hi, r.t),
                r.k_min,
                mu_exact(&hi, r.t),
            ]
        })
        .collect();
    let env_file = format!("{label}_envelopes.dat");
    output::write_columns(
        &dir.join(&env_file),
        &[
            "t",
            "omega_min",
            "omega_max",
            "omega_lower",
            "omega_upper",
            "k_min",
            "k_lower",
        ],
        &env_rows,
    )?;
    Ok(vec![csv, xi_file, env_file])
}

fn simulate_toy(
    label: String,
    n: usize,
    cfg: &ScenarioConfig,
    out: Option<&Path>,
) -> Result<MemberRun> {
    let g = Grid::new(n)?;
    let d = &cfg.initial_data;
    let s0 = ToyState {
        time: 0.0,
        u: d.u0.sample(&g),
        gamma: d.gamma0.sample(&g),
    };
    let mean0 = s0.u.mean();
    let mut rows = Vec::new();
    let mut min_gamma = f64::INFINITY;
    let mut drift: f64 = 0.0;
    let report = integrate_toy(&s0, &cfg.step_control, cfg.t_final, |s, dt| {
        let e = s.gamma.extrema();
        min_gamma = min_gamma.min(e.min);
        drift = drift.max((s.u.mean() - mean0).abs());
        rows.push(vec![
            s.time,
            dt,
            e.min,
            e.max,
            s.u.l2_sq(),
            s.gamma.quadrature(),
            s.u.deriv1().at_zero(),
            s.u.mean(),
        ]);
    });
    let mut files = Vec::new();
    if let Some(dir) = out {
        let name = format!("{label}.csv");
        let kept: Vec<Vec<f64>> = rows
            .iter()
            .enumerate()
            .filter(|(i, _)| i % cfg.csv_stride == 0 || *i + 1 == rows.len())
            .map(|(_, r)| r.clone())
            .collect();
        output::write_csv(&dir.join(&name), &TOY_COLUMNS, &kept)?;
        files.push(name);
    }
    let summary = MemberSummary {
        label,
        parameter: n as f64,
        n_points: n,
        status: report.status.as_str().to_string(),
        t_end: report.t_end,
        reason: report.reason.clone(),
        steps: report.steps_taken,
        max_gradient: report.max_gradient,
        max_gradient_x: report.max_gradient_x,
        xi: report.xi,
        lifespan_bound: f64::NAN,
        lifespan_consistent: true,
        cont_integral: f64::NAN,
        max_abs_mean_drift: drift,
        max_k_origin: f64::NAN,
        min_a_ricc: f64::NAN,
        riccati_excess: None,
        min_gamma: Some(min_gamma),
        terminal: None,
        files,
    };
    Ok(MemberRun {
        summary,
        report: None,
        rows: Vec::new(),
        samples: Vec::new(),
        toy_rows: rows,
    })
}

fn run_members(
    specs: Vec<RunSpec>,
    cfg: &ScenarioConfig,
    out: Option<&Path>,
    workers: usize,
) -> Result<Vec<MemberRun>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::ConfigInvalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        specs
            .into_par_iter()
            .map(|spec| simulate(spec, cfg, out))
            .collect()
    })
}

fn single_specs(cfg: &ScenarioConfig) -> Result<Vec<RunSpec>> {
    cfg.n_list
        .iter()
        .map(|&n| {
            let g = Grid::new(n)?;
            Ok(RunSpec {
                label: if cfg.n_list.len() == 1 {
                    "run".into()
                } else {
                    format!("n{n}")
                },
                parameter: n as f64,
                state: initial_state(&cfg.initial_data, &g)?,
                control: cfg.step_control,
                t_final: cfg.t_final,
                keep_samples: false,
            })
        })
        .collect()
}

fn l2_diff(a: &Field, b: &Field) -> f64 {
    a.zip_map(b, |x, y| x - y).l2_sq().sqrt()
}

/// Fine-grid field restricted to the nodes of a grid half as fine.
fn restrict(f: &Field) -> Field {
    let g = Grid::new(f.len() / 2).expect("even ladder");
    Field::new(g, f.values().iter().step_by(2).copied().collect())
}

fn oracle_checks() -> Vec<OracleCheck> {
    let mut out = Vec::new();
    let mut check = |name: &str, expected: f64, got: f64, tolerance: f64| {
        let err = (got - expected).abs() / expected.abs().max(1e-300);
        out.push(OracleCheck {
            name: name.into(),
            expected,
            got,
            tolerance,
            pass: if expected == 0.0 {
                got.abs() <= tolerance
            } else {
                err <= tolerance
            },
        });
    };
    let e = OdeEnvelope::new(2.0, 0.0, 1.0).expect("valid");
    check(
        "lambda_exact(2, alpha2=1, t=1)",
        2.0 / 3.0,
        lambda_exact(&e, 1.0),
        1e-15,
    );
    let e = OdeEnvelope::new(1.0, 1.0, 2.0).expect("valid");
    check(
        "mu_exact(mu0=1, lambda0=1, alpha2=2, t=3)",
        1.0 / 7f64.sqrt(),
        mu_exact(&e, 3.0),
        1e-15,
    );
    let e = OdeEnvelope::new(2.0, 0.0, 1.0).expect("valid");
    check(
        "lambda_exact(t=1e6) ~ 1/(alpha2 t)",
        1e-6,
        lambda_exact(&e, 1e6),
        1e-4,
    );
    let p = Params::default();
    let (_, w, k) = oracles::uniform_exact(0.0, 1.0, 2.0, &p, 1.0).expect("valid");
    check("uniform_exact omega(1), omega0=1", 0.5, w, 1e-15);
    check("uniform_exact k(1) = k0/2", 1.0, k, 1e-15);
    let (_, _, k) = oracles::uniform_exact(0.0, 1.0, 0.0, &p, 3.0).expect("valid");
    check("uniform_exact k0=0 stays 0", 0.0, k, 0.0);
    check(
        "riccati_bound(-1, 0.5)",
        -2.0,
        riccati_bound(-1.0, 0.5).unwrap_or(f64::NAN),
        1e-15,
    );
    check(
        "riccati_bound(-1, 0)",
        -1.0,
        riccati_bound(-1.0, 0.0).unwrap_or(f64::NAN),
        1e-15,
    );
    check(
        "riccati_bound(-2, 0.495)",
        -200.0,
        riccati_bound(-2.0, 0.495).unwrap_or(f64::NAN),
        1e-12,
    );

    // a = 0 reproduces the bound until |xi| = 1e3
    let n = 200_000;
    let s_max = 1e3f64.ln();
    let samples: Vec<(f64, f64)> = (0..=n)
        .map(|i| (1.0 - (-(s_max * i as f64 / n as f64)).exp(), 0.0))
        .collect();
    let sol = riccati_solve(-1.0, &samples);
    let worst = sol
        .iter()
        .map(|&(t, xi)| {
            let b = riccati_bound(-1.0, t).unwrap_or(f64::NAN);
            ((xi - b) / b).abs()
        })
        .fold(0.0, f64::max);
    check("riccati_solve a=0 vs bound, max rel err", 0.0, worst, 1e-6);
    let zero: Vec<(f64, f64)> = (0..100).map(|i| (i as f64 * 0.01, 1.0)).collect();
    let sol = riccati_solve(0.0, &zero);
    check(
        "riccati_solve xi0=0 stays 0",
        0.0,
        sol.last().map(|s| s.1).unwrap_or(f64::NAN),
        0.0,
    );
    let one: Vec<(f64, f64)> = (0..=1000).map(|i| (i as f64 * 1e-3, 1.0)).collect();
    let sol = riccati_solve(-0.5, &one);
    let exact = -0.5 * 1f64.exp() / (1.0 - 0.5 * (1f64.exp() - 1.0));
    check(
        "riccati_solve a=1, xi0=-0.5 at t=1",
        exact,
        sol.last().map(|s| s.1).unwrap_or(f64::NAN),
        1e-9,
    );
    out
}

/// Runs a validated scenario. Files are written when `out` is given;
/// `workers = 0` uses all cores.
pub fn execute(
    cfg: &ScenarioConfig,
    out: Option<&Path>,
    workers: usize,
) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
    }
    let mut cross = CrossMember::default();
    let mut stability = Vec::new();
    let runs: Vec<MemberRun> = match cfg.scenario {
        Scenario::Uniform | Scenario::Generic | Scenario::Blowup => {
            let runs = run_members(single_specs(cfg)?, cfg, out, workers)?;
            if cfg.scenario == Scenario::Uniform {
                let r = &runs[0];
                if let Some(rep) = &r.report {
                    let s = &rep.final_state;
                    let d = &cfg.initial_data;
                    let k0 = match &d.turbulence {
                        TurbulenceData::K(k) => k.eval(0.0),
                        TurbulenceData::Beta(b) => b.eval(0.0).powi(2),
                    };
                    let (_, we, ke) = oracles::uniform_exact(
                        d.u0.eval(0.0),
                        d.omega0.eval(0.0),
                        k0,
                        &cfg.params,
                        rep.t_end,
                    )?;
                    let (w, k) = (s.omega.at_zero(), s.beta.at_zero().powi(2));
                    cross.uniform = Some(UniformCheck {
                        t: rep.t_end,
                        omega: w,
                        omega_exact: we,
                        omega_rel_err: (w - we).abs() / we,
                        k,
                        k_exact: ke,
                        k_rel_err: if ke > 0.0 {
                            (k - ke).abs() / ke
                        } else {
                            k.abs()
                        },
                    });
                }
            }
            if cfg.scenario == Scenario::Blowup
                && runs.iter().all(|r| r.summary.status == "blowup_detected")
            {
                let ts: Vec<f64> = runs.iter().map(|r| r.summary.t_end).collect();
                cross.blowup_time = Richardson::from_estimates(&ts);
            }
            runs
        }
        Scenario::EpsilonSweep => {
            let n = cfg.n_list[0];
            let g = Grid::new(n)?;
            let base = initial_state(&cfg.initial_data, &g)?;
            let mut specs = vec![RunSpec {
                label: "eps0".into(),
                parameter: 0.0,
                state: base.clone(),
                control: cfg.step_control,
                t_final: cfg.t_final,
                keep_samples: true,
            }];
            for &eps in &cfg.epsilon_list {
                let mut s = base.clone();
                s.beta = s.beta.map(|b| b + eps);
                specs.push(RunSpec {
                    label: format!("eps_{}", fmt_param(eps)),
                    parameter: eps,
                    state: s,
                    control: cfg.step_control,
                    t_final: cfg.t_final,
                    keep_samples: true,
                });
            }
            let runs = run_members(specs, cfg, out, workers)?;
            let base_samples = &runs[0].samples;
            let mut eps = Vec::new();
            let mut gaps = Vec::new();
            for r in &runs[1..] {
                let gap = r
                    .samples
                    .iter()
                    .zip(base_samples)
                    .map(|(a, b)| l2_diff(&a.k(), &b.k()))
                    .fold(0.0, f64::max);
                eps.push(r.summary.parameter);
                gaps.push(gap);
                cross.epsilon_gaps.push(GapEntry {
                    epsilon: r.summary.parameter,
                    gap,
                });
            }
            cross
                .epsilon_gaps
                .sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
            cross.epsilon_rate = RateFit::fit(&eps, &gaps);
            runs
        }
        Scenario::Stability => {
            let n = cfg.n_list[0];
            let g = Grid::new(n)?;
            let base = initial_state(&cfg.initial_data, &g)?;
            let mut specs = vec![RunSpec {
                label: "base".into(),
                parameter: 0.0,
                state: base.clone(),
                control: cfg.step_control,
                t_final: cfg.t_final,
                keep_samples: true,
            }];
            for &delta in &cfg.delta_list {
                let mut s = base.clone();
                let bump = g.sample(f64::sin);
                s.u.axpy(delta, &bump);
                specs.push(RunSpec {
                    label: format!("delta_{}", fmt_param(delta)),
                    parameter: delta,
                    state: s,
                    control: cfg.step_control,
                    t_final: cfg.t_final,
                    keep_samples: true,
                });
            }
            let runs = run_members(specs, cfg, out, workers)?;
            let base_samples = &runs[0].samples;
            let audit = |r: &MemberRun, k: f64| -> Result<(Vec<StabilityRow>, Vec<(f64, f64)>)> {
                let mut pa = PairAuditor::new(k);
                let mut rows = Vec::new();
                let mut series = Vec::new();
                for (a, b) in base_samples.iter().zip(&r.samples) {
                    let row = pa.audit(a, b)?;
                    series.push((row.e_stab, pa.theta_integral()));
                    rows.push(row);
                }
                Ok((rows, series))
            };
            let k_fit = match cfg.k_fit {
                Some(k) => k,
                None => {
                    let mut k: f64 = 0.0;
                    for r in &runs[1..] {
                        k = k.max(fit_gronwall_constant(&audit(r, 0.0)?.1));
                    }
                    k
                }
            };
            cross.k_fit = Some(k_fit);
            for r in &runs[1..] {
                let (rows, _) = audit(r, k_fit)?;
                let last = rows.last().map(|x| x.e_stab).unwrap_or(f64::NAN);
                cross.lipschitz.push(LipschitzEntry {
                    delta: r.summary.parameter,
                    ratio: last.sqrt() / r.summary.parameter,
                    max_gronwall_ratio: rows.iter().map(|x| x.gronwall_ratio).fold(0.0, f64::max),
                });
                if let Some(dir) = out {
                    output::write_stability_csv(
                        &dir.join(format!("{}_stability.csv", r.summary.label)),
                        &rows,
                    )?;
                }
                stability.push((r.summary.label.clone(), rows));
            }
            cross.lipschitz.sort_by(|a, b| b.delta.total_cmp(&a.delta));
            runs
        }
        Scenario::Convergence => {
            let mut ns = cfg.n_list.clone();
            ns.sort_unstable();
            let specs = ns
                .iter()
                .map(|&n| {
                    let g = Grid::new(n)?;
                    Ok(RunSpec {
                        label: format!("n{n}"),
                        parameter: n as f64,
                        state: initial_state(&cfg.initial_data, &g)?,
                        control: cfg.step_control,
                        t_final: cfg.t_final,
                        keep_samples: false,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut runs = run_members(specs, cfg, out, workers)?;
            for pair in runs.windows(2) {
                let (coarse, fine) = (&pair[0], &pair[1]);
                let (Some(a), Some(b)) = (&coarse.report, &fine.report) else {
                    continue;
                };
                if fine.summary.n_points != 2 * coarse.summary.n_points || a.t_end != b.t_end {
                    continue;
                }
                let (sa, sb) = (&a.final_state, &b.final_state);
                let err = [(&sa.u, &sb.u), (&sa.omega, &sb.omega), (&sa.beta, &sb.beta)]
                    .iter()
                    .map(|(x, y)| x.zip_map(&restrict(y), |p, q| p - q).norm(Norm::Linf))
                    .fold(0.0, f64::max);
                cross.spatial_ladder.push(LadderEntry {
                    parameter: coarse.summary.n_points as f64,
                    error: err,
                });
            }
            cross.spatial_orders = cross
                .spatial_ladder
                .windows(2)
                .map(|w| (w[0].error / w[1].error).log2())
                .collect();

            let uni = InitialData::preset("uniform").expect("built-in preset");
            let g = Grid::new(8)?;
            let s0 = initial_state(&uni, &g)?;
            let specs = cfg
                .dt_list
                .iter()
                .map(|&dt| RunSpec {
                    label: format!("dt_{}", fmt_param(dt)),
                    parameter: dt,
                    state: s0.clone(),
                    control: StepControl {
                        dt_max: dt,
                        dt_min: cfg.step_control.dt_min.min(dt * 1e-3),
                        ..cfg.step_control
                    },
                    t_final: TEMPORAL_HORIZON,
                    keep_samples: false,
                })
                .collect();
            let temporal = run_members(specs, cfg, out, workers)?;
            for r in &temporal {
                if let Some(rep) = &r.report {
                    let (_, we, _) = oracles::uniform_exact(0.0, 1.0, 1.0, &cfg.params, rep.t_end)?;
                    cross.temporal_ladder.push(LadderEntry {
                        parameter: r.summary.parameter,
                        error: (rep.final_state.omega.at_zero() - we).abs(),
                    });
                }
            }
            cross
                .temporal_ladder
                .sort_by(|a, b| b.parameter.total_cmp(&a.parameter));
            cross.temporal_orders = cross
                .temporal_ladder
                .windows(2)
                .map(|w| {
                    (w[0].error / w[1].error).log2() / (w[0].parameter / w[1].parameter).log2()
                })
                .collect();
            runs.extend(temporal);
            runs
        }
        Scenario::Toy => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::ConfigInvalid(format!("cannot start worker pool: {e}")))?;
            pool.install(|| {
                cfg.n_list
                    .par_iter()
                    .map(|&n| simulate_toy(format!("toy_n{n}"), n, cfg, out))
                    .collect::<Result<Vec<_>>>()
            })?
        }
        Scenario::OracleCheck => {
            cross.oracle_checks = oracle_checks();
            Vec::new()
        }
    };

    let summary = assemble(cfg, runs.iter().map(|r| r.summary.clone()).collect(), cross);
    if let Some(dir) = out {
        output::write_json(&dir.join("summary.json"), &summary)?;
    }
    Ok(ScenarioOutcome {
        summary,
        runs,
        stability,
    })
}

fn assemble(
    cfg: &ScenarioConfig,
    mut members: Vec<MemberSummary>,
    cross: CrossMember,
) -> SweepSummary {
    // the convergence members form two ladders and keep their own order
    if cfg.scenario != Scenario::Convergence {
        members.sort_by(|a, b| a.parameter.total_cmp(&b.parameter));
    }
    let (status, t_end, reason, steps, terminal) = match members.first() {
        Some(first) => {
            let status = if members.iter().all(|m| m.status == first.status) {
                first.status.clone()
            } else {
                "mixed".to_string()
            };
            (
                status,
                first.t_end,
                first.reason.clone(),
                first.steps,
                first.terminal,
            )
        }
        None => {
            let ok = cross.oracle_checks.iter().all(|c| c.pass);
            let failed = cross.oracle_checks.iter().filter(|c| !c.pass).count();
            (
                if ok { "completed" } else { "failed" }.to_string(),
                0.0,
                format!(
                    "{} oracle checks, {failed} failed",
                    cross.oracle_checks.len()
                ),
                0,
                None,
            )
        }
    };
    SweepSummary {
        artifact_version: ARTIFACT_VERSION.to_string(),
        scenario: cfg.scenario.as_str().to_string(),
        status,
        t_end,
        reason,
        steps,
        terminal,
        members,
        cross,
        config: cfg.clone(),
    }
}

/// Runs a scenario and writes its files under `out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path, workers: usize) -> Result<SweepSummary> {
    Ok(execute(cfg, Some(out_dir), workers)?.summary)
}

/// Human-readable description of the CSV and JSON outputs.
pub fn schema() -> String {
    let mut s = String::new();
    s.push_str("diagnostics CSV columns (17 significant digits):\n  ");
    s.push_str(&DiagnosticsRow::COLUMNS.join(","));
    s.push_str("\nstability CSV columns:\n  ");
    s.push_str(&StabilityRow::COLUMNS.join(","));
    s.push_str("\ntoy CSV columns:\n  ");
    s.push_str(&TOY_COLUMNS.join(","));
    s.push_str("\ncolumn files: <label>_xi.dat (t xi riccati_bound), <label>_envelopes.dat (t omega_min omega_max omega_lower omega_upper k_min k_lower)\n");
    s.push_str("summary.json keys: artifact_version, scenario, status, t_end, reason, steps, terminal, members[], cross, config\n");
    s.push_str("member keys: label, parameter, n_points, status, t_end, reason, steps, max_gradient, max_gradient_x, xi, lifespan_bound, lifespan_consistent, cont_integral, max_abs_mean_drift, max_k_origin, min_a_ricc, riccati_excess?, min_gamma?, terminal?, files\n");
    s.push_str("\nconfiguration grammar:\n");
    s.push_str(GRAMMAR);
    s
}
