//! Line-oriented scenario configuration.
//!
//! ```text
//! # comment
//! scenario = blowup
//! n_list = 256, 512, 1024
//! t_final = 1.2
//! alpha2 = 1
//! ```
//!
//! One `key = value` pair per line; blank lines and `#` comments are ignored,
//! keys may not repeat and unknown keys are rejected. The full key list with
//! defaults is in [`GRAMMAR`].
//!
//! Trigonometric initial data (`u0`, `omega0`, `beta0`, `k0`, `gamma0`) are
//! whitespace-separated terms: a bare number is a constant, `cN:a` adds
//! `a cos(N x)` and `sN:b` adds `b sin(N x)`. Example: `omega0 = 2 c1:1`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::model::Params;
use crate::timestepper::StepControl;

/// Documentation of every key, printed by the `schema` command.
pub const GRAMMAR: &str = "\
# key = value, one per line; '#' starts a comment
scenario              uniform | blowup | generic | epsilon_sweep | stability | convergence | toy | oracle_check  (generic)
n_points              even integer >= 8                                   (256)
n_list                comma list of grid sizes; overrides n_points        (n_points)
t_final               final time >= 0                                     (1)
nu alpha1 alpha2 alpha3 alpha4 ell_constant   positive reals              (1)
cfl_advective cfl_diffusive                   in (0, 1]                   (0.4)
dt_min                                                                    (1e-12)
dt_max                                                                    (1e-3)
blowup_grad_threshold                                                     (1e6)
omega_floor                                                               (1e-10)
beta_tol                                                                  (1e-8)
degeneracy_tol        k level at x = 0 that ends a degenerate start; 0 = off   (1e-10)
symmetry_projection   true | false                                        (false)
initial_data          generic | blowup | uniform | toy | custom           (per scenario)
u0 omega0 beta0 k0 gamma0   trigonometric terms: 2 c1:0.5 s3:-1; set any to use custom data
                      (beta0 and k0 are exclusive)
epsilon_list          comma list of beta shifts                           (0.1, 0.01, 0.001)
delta_list            comma list of u0 perturbation sizes                 (0.01, 0.001, 0.0001)
dt_list               dt_max values of the uniform-data ladder on [0, 1]  (0.1, 0.05, 0.025)
samples               number of common sample times in sweeps             (200)
csv_stride            write every n-th diagnostics row                    (1)
k_fit                 Gronwall audit constant; fitted when absent
c_cal                 lifespan bound constant                             (0.01)
output_dir            directory for CSV/JSON output                       (out)
workers               concurrent sweep members; 0 = all cores             (0)
seed                  reserved, echoed only                               (0)
";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Uniform,
    Blowup,
    Generic,
    EpsilonSweep,
    Stability,
    Convergence,
    Toy,
    OracleCheck,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Uniform => "uniform",
            Scenario::Blowup => "blowup",
            Scenario::Generic => "generic",
            Scenario::EpsilonSweep => "epsilon_sweep",
            Scenario::Stability => "stability",
            Scenario::Convergence => "convergence",
            Scenario::Toy => "toy",
            Scenario::OracleCheck => "oracle_check",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "uniform" => Scenario::Uniform,
            "blowup" => Scenario::Blowup,
            "generic" => Scenario::Generic,
            "epsilon_sweep" => Scenario::EpsilonSweep,
            "stability" => Scenario::Stability,
            "convergence" => Scenario::Convergence,
            "toy" => Scenario::Toy,
            "oracle_check" => Scenario::OracleCheck,
            other => return Err(format!("unknown scenario '{other}'")),
        })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Finite trigonometric sum `c + sum a_n cos(n x) + sum b_n sin(n x)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub constant: f64,
    pub cos: Vec<(u32, f64)>,
    pub sin: Vec<(u32, f64)>,
}

impl TrigPoly {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            ..Self::default()
        }
    }

    pub fn with_cos(mut self, n: u32, a: f64) -> Self {
        self.cos.push((n, a));
        self
    }

    pub fn with_sin(mut self, n: u32, b: f64) -> Self {
        self.sin.push((n, b));
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        let c: f64 = self
            .cos
            .iter()
            .map(|&(n, a)| a * (n as f64 * x).cos())
            .sum();
        let s: f64 = self
            .sin
            .iter()
            .map(|&(n, b)| b * (n as f64 * x).sin())
            .sum();
        self.constant + c + s
    }

    /// Derivative at `x = 0`.
    pub fn slope_at_zero(&self) -> f64 {
        self.sin.iter().map(|&(n, b)| n as f64 * b).sum()
    }

    pub fn is_odd(&self) -> bool {
        self.constant == 0.0 && self.cos.iter().all(|&(_, a)| a == 0.0)
    }

    pub fn is_even(&self) -> bool {
        self.sin.iter().all(|&(n, b)| b == 0.0 || n == 0)
    }

    pub fn sample(&self, g: &Grid) -> Field {
        g.sample(|x| self.eval(x))
    }

    fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut p = TrigPoly::default();
        for tok in text.split_whitespace() {
            let (head, coef) = match tok.split_once(':') {
                Some((h, c)) => (Some(h), c),
                None => (None, tok),
            };
            let value: f64 = coef
                .parse()
                .map_err(|_| format!("bad coefficient '{coef}' in term '{tok}'"))?;
            match head {
                None => p.constant += value,
                Some(h) => {
                    let (kind, n) = h.split_at(1);
                    let n: u32 = n
                        .parse()
                        .map_err(|_| format!("bad wave number in term '{tok}'"))?;
                    match kind {
                        "c" => p.cos.push((n, value)),
                        "s" => p.sin.push((n, value)),
                        _ => return Err(format!("term '{tok}' must start with c or s")),
                    }
                }
            }
        }
        if p.constant == 0.0 && p.cos.is_empty() && p.sin.is_empty() && text.trim().is_empty() {
            return Err("empty trigonometric expression".into());
        }
        Ok(p)
    }
}

/// Second field of the initial data: either `beta = sqrt(k)` or `k` itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurbulenceData {
    Beta(TrigPoly),
    K(TrigPoly),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub preset: String,
    pub u0: TrigPoly,
    pub omega0: TrigPoly,
    pub turbulence: TurbulenceData,
    pub gamma0: TrigPoly,
}

impl InitialData {
    /// Named presets. `blowup` is `u = -sin x`, `omega = 1`,
    /// `k = (1 - cos x)^2`, given through `beta = 1 - cos x`.
    pub fn preset(name: &str) -> Option<Self> {
        let d = match name {
            "generic" => Self {
                preset: name.into(),
                u0: TrigPoly::default().with_sin(1, 1.0),
                omega0: TrigPoly::constant(2.0).with_cos(1, 1.0),
                turbulence: TurbulenceData::Beta(TrigPoly::constant(1.0).with_cos(1, 0.5)),
                gamma0: TrigPoly::constant(1.0).with_cos(1, 0.5),
            },
            "blowup" => Self {
                preset: name.into(),
                u0: TrigPoly::default().with_sin(1, -1.0),
                omega0: TrigPoly::constant(1.0),
                turbulence: TurbulenceData::Beta(TrigPoly::constant(1.0).with_cos(1, -1.0)),
                gamma0: TrigPoly::constant(1.0).with_cos(1, -1.0),
            },
            "uniform" => Self {
                preset: name.into(),
                u0: TrigPoly::constant(0.0),
                omega0: TrigPoly::constant(1.0),
                turbulence: TurbulenceData::K(TrigPoly::constant(1.0)),
                gamma0: TrigPoly::constant(1.0),
            },
            "toy" => Self {
                preset: name.into(),
                u0: TrigPoly::default().with_sin(1, -1.0),
                omega0: TrigPoly::constant(1.0),
                turbulence: TurbulenceData::Beta(TrigPoly::constant(1.0)),
                gamma0: TrigPoly::constant(1.0).with_cos(1, -1.0),
            },
            _ => return None,
        };
        Some(d)
    }

    pub fn sample_beta(&self, g: &Grid) -> Field {
        match &self.turbulence {
            TurbulenceData::Beta(b) => b.sample(g),
            TurbulenceData::K(k) => g.sample(|x| k.eval(x).max(0.0).sqrt()),
        }
    }

    fn turbulence_poly(&self) -> &TrigPoly {
        match &self.turbulence {
            TurbulenceData::Beta(p) | TurbulenceData::K(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n_list: Vec<usize>,
    pub t_final: f64,
    pub params: Params,
    pub step_control: StepControl,
    pub initial_data: InitialData,
    pub epsilon_list: Vec<f64>,
    pub delta_list: Vec<f64>,
    pub dt_list: Vec<f64>,
    pub samples: usize,
    pub csv_stride: usize,
    pub k_fit: Option<f64>,
    pub c_cal: f64,
    pub output_dir: String,
    pub workers: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::for_scenario(Scenario::Generic)
    }
}

impl ScenarioConfig {
    /// Defaults for a scenario, including its initial-data preset.
    pub fn for_scenario(scenario: Scenario) -> Self {
        let preset = match scenario {
            Scenario::Uniform => "uniform",
            Scenario::Blowup | Scenario::EpsilonSweep => "blowup",
            Scenario::Toy => "toy",
            _ => "generic",
        };
        let n_list = match scenario {
            Scenario::Convergence => vec![64, 128, 256, 512],
            _ => vec![256],
        };
        Self {
            scenario,
            n_list,
            t_final: 1.0,
            params: Params::default(),
            step_control: StepControl::default(),
            initial_data: InitialData::preset(preset).expect("built-in preset"),
            epsilon_list: vec![1e-1, 1e-2, 1e-3],
            delta_list: vec![1e-2, 1e-3, 1e-4],
            dt_list: vec![0.1, 0.05, 0.025],
            samples: 200,
            csv_stride: 1,
            k_fit: None,
            c_cal: crate::diagnostics::DEFAULT_C_CAL,
            output_dir: "out".into(),
            workers: 0,
            seed: 0,
        }
    }

    /// Checks every invariant; violations of the model hypotheses are named.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ConfigInvalid(msg));
        self.params
            .validate()
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        self.step_control
            .validate()
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        if self.n_list.is_empty() {
            return bad("n_list is empty".into());
        }
        for &n in &self.n_list {
            Grid::new(n).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!(
                "t_final must be finite and >= 0, got {}",
                self.t_final
            ));
        }
        if self.samples == 0 || self.csv_stride == 0 {
            return bad("samples and csv_stride must be positive".into());
        }
        if !(self.c_cal > 0.0) {
            return bad(format!("c_cal must be positive, got {}", self.c_cal));
        }
        if let Some(k) = self.k_fit {
            if !(k >= 0.0 && k.is_finite()) {
                return bad(format!("k_fit must be finite and >= 0, got {k}"));
            }
        }
        for (name, list) in [
            ("epsilon_list", &self.epsilon_list),
            ("delta_list", &self.delta_list),
            ("dt_list", &self.dt_list),
        ] {
            if list.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return bad(format!("{name} entries must be positive"));
            }
        }

        let d = &self.initial_data;
        for &n in &self.n_list {
            let g = Grid::new(n)?;
            let w = d.omega0.sample(&g).extrema();
            if !(w.min > 0.0) {
                return bad(format!(
                    "initial data: 0 < omega_* <= omega0 requires omega0 > 0, found {} at x = {}",
                    w.min,
                    g.node(w.argmin)
                ));
            }
            match &d.turbulence {
                TurbulenceData::Beta(b) => {
                    let e = b.sample(&g).extrema();
                    if e.min < 0.0 {
                        return bad(format!(
                            "initial data: beta0 >= 0 violated, found {} at x = {}",
                            e.min,
                            g.node(e.argmin)
                        ));
                    }
                }
                TurbulenceData::K(k) => {
                    let e = k.sample(&g).extrema();
                    if e.min < 0.0 {
                        return bad(format!(
                            "initial data: k0 >= 0 violated, found {} at x = {}",
                            e.min,
                            g.node(e.argmin)
                        ));
                    }
                }
            }
            if self.scenario == Scenario::Toy && d.gamma0.sample(&g).extrema().min < 0.0 {
                return bad("initial data: gamma0 >= 0 violated".into());
            }
        }

        if self.scenario == Scenario::Blowup {
            let turb = d.turbulence_poly();
            if turb.eval(0.0).abs() > 1e-14 {
                return bad(format!(
                    "blow-up hypothesis (i) violated: k0(0) must vanish, got {}",
                    turb.eval(0.0)
                ));
            }
            if !d.u0.is_odd() {
                return bad("blow-up hypothesis (ii) violated: u0 must be odd about 0".into());
            }
            if !(d.omega0.is_even() && turb.is_even()) {
                return bad(
                    "blow-up hypothesis (ii) violated: omega0 and k0 must be even about 0".into(),
                );
            }
            let slope = d.u0.slope_at_zero();
            if !(slope < 0.0) {
                return bad(format!(
                    "blow-up hypothesis (iii) violated: u0'(0) must be negative, got {slope}"
                ));
            }
        }
        Ok(())
    }
}

fn parse_list<T: FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
    v.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| format!("bad list entry '{s}'")))
        .collect()
}

fn parse_num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse::<T>()
        .map_err(|_| format!("cannot parse '{v}' as a number"))
}

/// Parses a configuration document and validates it.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: format!("expected 'key = value', got '{line}'"),
            });
        };
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if key.is_empty() {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: "missing key".into(),
            });
        }
        if !seen.insert(key.clone()) {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: format!("duplicate key '{key}'"),
            });
        }
        entries.push((line_no, key, value));
    }

    let scenario = match entries.iter().find(|(_, k, _)| k == "scenario") {
        Some((line, _, v)) => v
            .parse::<Scenario>()
            .map_err(|message| Error::ConfigSyntax {
                line: *line,
                message,
            })?,
        None => Scenario::Generic,
    };
    let mut cfg = ScenarioConfig::for_scenario(scenario);
    let mut n_points: Option<usize> = None;
    let mut custom: Vec<(usize, String, String)> = Vec::new();

    for (line, key, value) in entries {
        let v = value.as_str();
        let res: std::result::Result<(), String> = (|| {
            let p = &mut cfg.params;
            let c = &mut cfg.step_control;
            match key.as_str() {
                "scenario" => {}
                "n_points" => n_points = Some(parse_num(v)?),
                "n_list" => cfg.n_list = parse_list(v)?,
                "t_final" => cfg.t_final = parse_num(v)?,
                "nu" => p.nu = parse_num(v)?,
                "alpha1" => p.alpha1 = parse_num(v)?,
                "alpha2" => p.alpha2 = parse_num(v)?,
                "alpha3" => p.alpha3 = parse_num(v)?,
                "alpha4" => p.alpha4 = parse_num(v)?,
                "ell_constant" => p.ell_constant = parse_num(v)?,
                "cfl_advective" => c.cfl_advective = parse_num(v)?,
                "cfl_diffusive" => c.cfl_diffusive = parse_num(v)?,
                "dt_min" => c.dt_min = parse_num(v)?,
                "dt_max" => c.dt_max = parse_num(v)?,
                "blowup_grad_threshold" => c.blowup_grad_threshold = parse_num(v)?,
                "omega_floor" => c.omega_floor = parse_num(v)?,
                "beta_tol" => c.beta_tol = parse_num(v)?,
                "degeneracy_tol" => c.degeneracy_tol = parse_num(v)?,
                "symmetry_projection" => {
                    c.symmetry_projection = match v {
                        "true" => true,
                        "false" => false,
                        _ => return Err(format!("expected true or false, got '{v}'")),
                    }
                }
                "initial_data" => {
                    if v != "custom" {
                        cfg.initial_data = InitialData::preset(v)
                            .ok_or_else(|| format!("unknown initial_data preset '{v}'"))?;
                    }
                }
                "u0" | "omega0" | "beta0" | "k0" | "gamma0" => {
                    TrigPoly::parse(v)?;
                    custom.push((line, key.clone(), value.clone()));
                }
                "epsilon_list" => cfg.epsilon_list = parse_list(v)?,
                "delta_list" => cfg.delta_list = parse_list(v)?,
                "dt_list" => cfg.dt_list = parse_list(v)?,
                "samples" => cfg.samples = parse_num(v)?,
                "csv_stride" => cfg.csv_stride = parse_num(v)?,
                "k_fit" => cfg.k_fit = Some(parse_num(v)?),
                "c_cal" => cfg.c_cal = parse_num(v)?,
                "output_dir" => cfg.output_dir = v.to_string(),
                "workers" => cfg.workers = parse_num(v)?,
                "seed" => cfg.seed = parse_num(v)?,
                other => return Err(format!("unknown key '{other}'")),
            }
            Ok(())
        })();
        res.map_err(|message| Error::ConfigSyntax { line, message })?;
    }

    if let Some(n) = n_points {
        if !seen.contains("n_list") {
            cfg.n_list = vec![n];
        }
    }
    if !custom.is_empty() {
        if seen.contains("beta0") && seen.contains("k0") {
            let line = custom.iter().map(|c| c.0).max().unwrap_or(0);
            return Err(Error::ConfigSyntax {
                line,
                message: "beta0 and k0 are mutually exclusive".into(),
            });
        }
        let d = &mut cfg.initial_data;
        d.preset = "custom".into();
        for (_, key, value) in custom {
            let poly = TrigPoly::parse(&value).expect("checked above");
            match key.as_str() {
                "u0" => d.u0 = poly,
                "omega0" => d.omega0 = poly,
                "beta0" => d.turbulence = TurbulenceData::Beta(poly),
                "k0" => d.turbulence = TurbulenceData::K(poly),
                _ => d.gamma0 = poly,
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.scenario, Scenario::Generic);
        let cfg = parse_config("# only a comment\n\n   \n").unwrap();
        assert_eq!(cfg.scenario, Scenario::Generic);
    }

    #[test]
    fn negative_alpha2_is_rejected() {
        let err = parse_config("alpha2 = -1").unwrap_err().to_string();
        assert!(err.contains("alpha2"), "{err}");
        assert!(err.contains("strictly positive"), "{err}");
    }

    #[test]
    fn blowup_with_wrong_slope_names_hypothesis() {
        let err = parse_config("scenario = blowup\nu0 = s1:1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("hypothesis (iii)"), "{err}");
        let err = parse_config("scenario = blowup\nbeta0 = 1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("hypothesis (i)"), "{err}");
        let err = parse_config("scenario = blowup\nu0 = s1:-1 c2:0.1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("hypothesis (ii)"), "{err}");
        assert!(parse_config("scenario = blowup").is_ok());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        match parse_config("t_final = 1\n\nbogus = 3\n") {
            Err(Error::ConfigSyntax { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_config("t_final 1"),
            Err(Error::ConfigSyntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("t_final = 1\nt_final = 2"),
            Err(Error::ConfigSyntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("n_points = x"),
            Err(Error::ConfigSyntax { line: 1, .. })
        ));
    }

    #[test]
    fn keys_are_applied() {
        let text =
            "scenario = epsilon_sweep\nn_points = 128\nt_final = 0.5\nepsilon_list = 0.1, 0.05\n\
                    dt_max = 1e-4\nsymmetry_projection = true\nk_fit = 2\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.scenario, Scenario::EpsilonSweep);
        assert_eq!(cfg.n_list, vec![128]);
        assert_eq!(cfg.t_final, 0.5);
        assert_eq!(cfg.epsilon_list, vec![0.1, 0.05]);
        assert_eq!(cfg.step_control.dt_max, 1e-4);
        assert!(cfg.step_control.symmetry_projection);
        assert_eq!(cfg.k_fit, Some(2.0));
        assert_eq!(cfg.initial_data.preset, "blowup");
    }

    #[test]
    fn custom_trig_data() {
        let cfg = parse_config("u0 = 0.5 s1:2 c3:-1\nomega0 = 2 c1:1\nk0 = 1").unwrap();
        let d = &cfg.initial_data;
        assert_eq!(d.preset, "custom");
        assert!((d.u0.eval(0.3) - (0.5 + 2.0 * 0.3f64.sin() - (0.9f64).cos())).abs() < 1e-15);
        assert_eq!(d.u0.slope_at_zero(), 2.0);
        assert!(matches!(d.turbulence, TurbulenceData::K(_)));
        assert!(parse_config("omega0 = c1:1").is_err());
        assert!(parse_config("beta0 = 1\nk0 = 1").is_err());
        assert!(parse_config("u0 = q1:1").is_err());
    }

    #[test]
    fn presets_satisfy_their_hypotheses() {
        for s in [
            Scenario::Uniform,
            Scenario::Blowup,
            Scenario::Generic,
            Scenario::EpsilonSweep,
            Scenario::Stability,
            Scenario::Convergence,
            Scenario::Toy,
            Scenario::OracleCheck,
        ] {
            ScenarioConfig::for_scenario(s).validate().unwrap();
            assert_eq!(s.as_str().parse::<Scenario>().unwrap(), s);
        }
        let g = Grid::new(64).unwrap();
        let b = InitialData::preset("blowup").unwrap();
        let k = b.sample_beta(&g).map(|v| v * v);
        for (j, x) in g.nodes().enumerate() {
            assert!((k.at(j) - (1.0 - x.cos()).powi(2)).abs() < 1e-15);
        }
    }
}
