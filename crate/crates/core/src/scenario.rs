//! Scenario files, time sweeps and CSV output.
//!
//! A scenario file is flat `key = value` text. Blank lines and anything after
//! `#` are ignored. Recognised keys:
//!
//! | key            | value                                           | default     |
//! |----------------|-------------------------------------------------|-------------|
//! | `configuration`| `V`, `Xi` or `Lambda`                           | required    |
//! | `g`            | positive real                                   | `1`         |
//! | `gamma`        | nonnegative real, `λ/g` (exclusive with lambda) | one of them |
//! | `lambda`       | nonnegative real                                | one of them |
//! | `alpha`        | nonnegative real                                | required    |
//! | `n_max`        | integer                                         | automatic   |
//! | `gt_max`       | positive real                                   | `25`        |
//! | `steps`        | integer ≥ 2                                     | `1001`      |
//! | `measures`     | comma list of `entropy`, `negativity`, `mandel`, `squeezing`, or `all` | `all` |
//! | `oracle_check` | `true` / `false`                                | `false`     |

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::amplitudes::assemble_state;
use crate::density::rho_atoms;
use crate::error::Error;
use crate::measures::{negativity, von_neumann_entropy, FieldMoments, MeasureSample};
use crate::model::{ConfigKind, SystemParams};
use crate::oracle::{build_h2, integrate, IntegratorOptions};

/// Largest closed-form versus integrator amplitude deviation accepted by an
/// oracle check.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

/// γ values of the three panels of each figure.
pub const FIGURE_GAMMAS: [f64; 3] = [0.0, 2.0, 6.0];

pub const CSV_HEADER: &str = "gt,entropy,negativity,mandel_q,s_x,s_y";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid scenario: {0}")]
    Config(String),

    #[error(transparent)]
    Numerical(#[from] Error),

    #[error("oracle deviation {deviation:e} exceeds {tolerance:e}")]
    OracleMismatch { deviation: f64, tolerance: f64 },

    #[error("figure {figure} is missing the series for {configuration} at gamma = {gamma}")]
    MissingSeries { figure: u8, configuration: ConfigKind, gamma: f64 },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ScenarioError {
    /// Process exit status: 1 for configuration problems, 2 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse { .. } | ScenarioError::Config(_) | ScenarioError::Io { .. } => 1,
            ScenarioError::MissingSeries { .. } => 1,
            ScenarioError::Numerical(Error::InvalidParameter(_)) => 1,
            ScenarioError::Numerical(_) | ScenarioError::OracleMismatch { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Entropy,
    Negativity,
    Mandel,
    Squeezing,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Entropy, Measure::Negativity, Measure::Mandel, Measure::Squeezing];

    fn parse(s: &str) -> Option<Measure> {
        match s {
            "entropy" => Some(Measure::Entropy),
            "negativity" => Some(Measure::Negativity),
            "mandel" | "mandel_q" => Some(Measure::Mandel),
            "squeezing" => Some(Measure::Squeezing),
            _ => None,
        }
    }
}

/// How the drive strength was given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    Gamma(f64),
    Lambda(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub configuration: ConfigKind,
    pub g: f64,
    pub drive: Drive,
    pub alpha: f64,
    pub n_max: Option<usize>,
    pub gt_max: f64,
    pub steps: usize,
    pub measures: Vec<Measure>,
    pub oracle_check: bool,
}

impl ScenarioConfig {
    pub fn new(configuration: ConfigKind, gamma: f64, alpha: f64) -> Self {
        ScenarioConfig {
            configuration,
            g: 1.0,
            drive: Drive::Gamma(gamma),
            alpha,
            n_max: None,
            gt_max: 25.0,
            steps: 1001,
            measures: Measure::ALL.to_vec(),
            oracle_check: false,
        }
    }

    pub fn gamma(&self) -> f64 {
        match self.drive {
            Drive::Gamma(gamma) => gamma,
            Drive::Lambda(lambda) => lambda / self.g,
        }
    }

    pub fn wants(&self, m: Measure) -> bool {
        self.measures.contains(&m)
    }

    pub fn from_file(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_owned(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut configuration = None;
        let mut g = None;
        let mut gamma = None;
        let mut lambda = None;
        let mut alpha = None;
        let mut n_max = None;
        let mut gt_max = None;
        let mut steps = None;
        let mut measures = None;
        let mut oracle_check = None;
        let mut seen = HashSet::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ScenarioError::Parse { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_owned()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            let real = || value.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| err(format!("`{key}` expects a number, got `{value}`")));
            let int = || value.parse::<usize>().map_err(|_| err(format!("`{key}` expects a nonnegative integer, got `{value}`")));
            match key {
                "configuration" => configuration = Some(value.parse::<ConfigKind>().map_err(err)?),
                "g" => g = Some(real()?),
                "gamma" => gamma = Some(real()?),
                "lambda" => lambda = Some(real()?),
                "alpha" => alpha = Some(real()?),
                "n_max" => n_max = Some(int()?),
                "gt_max" => gt_max = Some(real()?),
                "steps" => steps = Some(int()?),
                "measures" => {
                    let list = if value == "all" {
                        Measure::ALL.to_vec()
                    } else {
                        value
                            .split(',')
                            .map(|s| Measure::parse(s.trim()).ok_or_else(|| err(format!("unknown measure `{}`", s.trim()))))
                            .collect::<Result<Vec<_>, _>>()?
                    };
                    measures = Some(list);
                }
                "oracle_check" => {
                    oracle_check = Some(match value {
                        "true" | "yes" | "1" => true,
                        "false" | "no" | "0" => false,
                        _ => return Err(err(format!("`oracle_check` expects true or false, got `{value}`"))),
                    })
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }

        let configuration = configuration.ok_or_else(|| ScenarioError::Config("missing `configuration`".into()))?;
        let alpha = alpha.ok_or_else(|| ScenarioError::Config("missing `alpha`".into()))?;
        let drive = match (gamma, lambda) {
            (Some(x), None) => Drive::Gamma(x),
            (None, Some(x)) => Drive::Lambda(x),
            _ => return Err(ScenarioError::Config("exactly one of `gamma` and `lambda` is required".into())),
        };
        let config = ScenarioConfig {
            configuration,
            g: g.unwrap_or(1.0),
            drive,
            alpha,
            n_max,
            gt_max: gt_max.unwrap_or(25.0),
            steps: steps.unwrap_or(1001),
            measures: measures.unwrap_or_else(|| Measure::ALL.to_vec()),
            oracle_check: oracle_check.unwrap_or(false),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        if self.steps < 2 {
            return Err(ScenarioError::Config(format!("steps must be at least 2, got {}", self.steps)));
        }
        if !(self.gt_max > 0.0) {
            return Err(ScenarioError::Config(format!("gt_max must be positive, got {}", self.gt_max)));
        }
        if self.measures.is_empty() {
            return Err(ScenarioError::Config("no measures requested".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<SystemParams, ScenarioError> {
        self.validate()?;
        let p = match self.drive {
            Drive::Gamma(gamma) => SystemParams::with_gamma(self.configuration, self.g, gamma, self.alpha),
            Drive::Lambda(lambda) => SystemParams::new(self.configuration, self.g, lambda, self.alpha),
        };
        let p = p.map_err(|e| ScenarioError::Config(e.to_string()))?;
        let p = match self.n_max {
            Some(n) => p.with_n_max(n)?,
            None => p,
        };
        Ok(p.with_uniform_grid(self.gt_max, self.steps)?)
    }
}

/// One row of a sweep; measures that were not requested are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub gt: f64,
    pub entropy: Option<f64>,
    pub negativity: Option<f64>,
    /// `Some(NAN)` when requested but undefined.
    pub mandel_q: Option<f64>,
    pub squeezing: Option<(f64, f64)>,
}

impl SeriesRow {
    pub fn from_sample(s: &MeasureSample) -> Self {
        SeriesRow {
            gt: s.gt,
            entropy: Some(s.entropy),
            negativity: Some(s.negativity),
            mandel_q: Some(s.mandel_q.unwrap_or(f64::NAN)),
            squeezing: Some((s.s_x, s.s_y)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub configuration: ConfigKind,
    pub gamma: f64,
    pub alpha: f64,
    pub n_max: usize,
    pub rows: usize,
    /// Largest `|‖ψ₂‖² − 1|` over the grid.
    pub norm_deviation: f64,
    pub max_entropy: Option<(f64, f64)>,
    pub oracle_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSeries {
    pub rows: Vec<SeriesRow>,
    pub summary: Summary,
}

impl MeasureSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cell = |x: Option<f64>| x.map(format_g12).unwrap_or_default();
            let (sx, sy) = (r.squeezing.map(|s| s.0), r.squeezing.map(|s| s.1));
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                format_g12(r.gt),
                cell(r.entropy),
                cell(r.negativity),
                cell(r.mandel_q),
                cell(sx),
                cell(sy)
            );
        }
        out
    }
}

/// Runs the sweep described by `config`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<MeasureSeries, ScenarioError> {
    let params = config.params()?;
    let gamma = params.gamma;
    let results: Vec<(SeriesRow, f64)> = params
        .t_grid
        .par_iter()
        .map(|&gt| -> Result<(SeriesRow, f64), Error> {
            let state = assemble_state(params.time(gt), &params)?;
            let needs_rho = config.wants(Measure::Entropy) || config.wants(Measure::Negativity);
            let rho = needs_rho.then(|| rho_atoms(&state));
            let entropy = match (&rho, config.wants(Measure::Entropy)) {
                (Some(rho), true) => Some(von_neumann_entropy(rho)?),
                _ => None,
            };
            let negativity = match (&rho, config.wants(Measure::Negativity)) {
                (Some(rho), true) => Some(negativity(rho)?),
                _ => None,
            };
            let needs_moments = config.wants(Measure::Mandel) || config.wants(Measure::Squeezing);
            let moments = needs_moments.then(|| FieldMoments::compute(&state, gamma));
            let mandel_q = match (&moments, config.wants(Measure::Mandel)) {
                (Some(m), true) => Some(m.mandel_q().unwrap_or(f64::NAN)),
                _ => None,
            };
            let squeezing = match (&moments, config.wants(Measure::Squeezing)) {
                (Some(m), true) => Some(m.squeezing()),
                _ => None,
            };
            Ok((SeriesRow { gt, entropy, negativity, mandel_q, squeezing }, (state.norm_sqr() - 1.0).abs()))
        })
        .collect::<Result<_, _>>()?;

    let norm_deviation = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let rows: Vec<SeriesRow> = results.into_iter().map(|r| r.0).collect();
    let max_entropy = rows
        .iter()
        .filter_map(|r| r.entropy.map(|s| (r.gt, s)))
        .fold(None, |best: Option<(f64, f64)>, x| match best {
            Some(b) if b.1 >= x.1 => Some(b),
            _ => Some(x),
        });
    let oracle_deviation = if config.oracle_check { Some(oracle_deviation(&params)?) } else { None };
    let summary = Summary {
        configuration: config.configuration,
        gamma,
        alpha: config.alpha,
        n_max: params.n_max,
        rows: rows.len(),
        norm_deviation,
        max_entropy,
        oracle_deviation,
    };
    if let Some(deviation) = oracle_deviation {
        if deviation > ORACLE_TOLERANCE {
            return Err(ScenarioError::OracleMismatch { deviation, tolerance: ORACLE_TOLERANCE });
        }
    }
    Ok(MeasureSeries { rows, summary })
}

/// Largest amplitude deviation between the closed-form state and a direct
/// integration of the transformed-frame Hamiltonian over the scenario grid.
///
/// The integrator runs on a space padded by the largest photon offset so the
/// manifolds kept by the closed form evolve without truncation.
pub fn oracle_deviation(params: &SystemParams) -> Result<f64, Error> {
    let n_max = params.n_max;
    let padded = n_max + params.config.max_offset();
    let psi0 = assemble_state(0.0, params)?.resized(padded);
    let h = build_h2(&params.config, params.g, padded);
    let times: Vec<f64> = params.t_grid.iter().map(|&gt| params.time(gt)).collect();
    let traj = integrate(&h, &psi0, &times, IntegratorOptions::for_coupling(params.g))?;
    let mut worst: f64 = 0.0;
    for (&t, integrated) in times.iter().zip(&traj.states) {
        let closed = assemble_state(t, params)?.resized(padded);
        worst = worst.max(closed.max_abs_diff(integrated)?);
    }
    Ok(worst)
}

/// The CSV column(s) a figure plots.
pub fn figure_columns(figure: u8) -> Option<&'static [&'static str]> {
    match figure {
        2 => Some(&["entropy"]),
        3 => Some(&["negativity"]),
        4 => Some(&["mandel_q"]),
        5 => Some(&["s_x", "s_y"]),
        _ => None,
    }
}

fn figure_measure(figure: u8) -> Measure {
    match figure {
        2 => Measure::Entropy,
        3 => Measure::Negativity,
        4 => Measure::Mandel,
        _ => Measure::Squeezing,
    }
}

/// `<fig>_<config>_<gamma>.csv`.
pub fn figure_file_name(figure: u8, kind: ConfigKind, gamma: f64) -> String {
    format!("{figure}_{}_{}.csv", kind.name(), format_g12(gamma))
}

/// Computes the nine series (three configurations times γ ∈ {0, 2, 6}) of a
/// figure. `template` supplies g, α, the grid and the oracle flag; its
/// configuration, drive and measure list are replaced.
pub fn figure_series(figure: u8, template: &ScenarioConfig) -> Result<Vec<MeasureSeries>, ScenarioError> {
    if figure_columns(figure).is_none() {
        return Err(ScenarioError::Config(format!("figure must be 2, 3, 4 or 5, got {figure}")));
    }
    let mut out = Vec::with_capacity(9);
    for kind in ConfigKind::ALL {
        for gamma in FIGURE_GAMMAS {
            let config = ScenarioConfig {
                configuration: kind,
                drive: Drive::Gamma(gamma),
                n_max: None,
                measures: vec![figure_measure(figure)],
                ..template.clone()
            };
            out.push(run_scenario(&config)?);
        }
    }
    Ok(out)
}

/// Writes one `(gt, value…)` file per configuration and γ into `dir` and
/// returns the paths in configuration-then-γ order.
pub fn emit_figure_data(series: &[MeasureSeries], figure: u8, dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    let columns = figure_columns(figure).ok_or_else(|| ScenarioError::Config(format!("figure must be 2, 3, 4 or 5, got {figure}")))?;
    fs::create_dir_all(dir).map_err(|source| ScenarioError::Io { path: dir.to_owned(), source })?;
    let mut paths = Vec::with_capacity(9);
    for kind in ConfigKind::ALL {
        for gamma in FIGURE_GAMMAS {
            let s = series
                .iter()
                .find(|s| s.summary.configuration == kind && s.summary.gamma == gamma)
                .ok_or(ScenarioError::MissingSeries { figure, configuration: kind, gamma })?;
            let mut text = format!("gt,{}\n", columns.join(","));
            for r in &s.rows {
                let values: Option<Vec<f64>> = match figure {
                    2 => r.entropy.map(|x| vec![x]),
                    3 => r.negativity.map(|x| vec![x]),
                    4 => r.mandel_q.map(|x| vec![x]),
                    _ => r.squeezing.map(|(x, y)| vec![x, y]),
                };
                let values = values.ok_or(ScenarioError::MissingSeries { figure, configuration: kind, gamma })?;
                text.push_str(&format_g12(r.gt));
                for v in values {
                    text.push(',');
                    text.push_str(&format_g12(v));
                }
                text.push('\n');
            }
            let path = dir.join(figure_file_name(figure, kind, gamma));
            fs::write(&path, text).map_err(|source| ScenarioError::Io { path: path.clone(), source })?;
            paths.push(path);
        }
    }
    Ok(paths)
}

/// C-style `%.12g`: twelve significant digits, trailing zeros removed,
/// exponent form outside `[1e-4, 1e12)`. Non-finite values print as `nan`,
/// `inf`, `-inf`.
pub fn format_g12(x: f64) -> String {
    const P: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // exponent after rounding to P significant digits
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_owned()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
