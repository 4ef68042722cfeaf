//! Run configuration: a flat `key = value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bellrand::tol::Tolerances;
use bellrand::Angle;
use clap::ValueEnum;

use crate::CliError;

pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_SEED: u64 = 0;
/// Lower end (excluded) of every `--theta-grid`.
pub const GRID_START: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Scenario {
    LocalPovm,
    GlobalProjective,
    GlobalPovm,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::LocalPovm => "local_povm",
            Scenario::GlobalProjective => "global_projective",
            Scenario::GlobalPovm => "global_povm",
        }
    }
}

/// Flags shared by every subcommand; `None` means "not given".
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// Schmidt angle in radians, in (0, π/2]. Repeatable; comma lists accepted.
    #[arg(long, value_delimiter = ',')]
    pub theta: Vec<f64>,
    /// Use N evenly spaced angles over (0.01, π/2] instead of --theta.
    #[arg(long = "theta-grid", value_name = "N")]
    pub theta_grid: Option<usize>,
    /// Distance of the near-Y POVM from ±Y, in (0, 1).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pub scenario: Option<Scenario>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance override, e.g. `--tol check=1e-9`. Repeatable.
    #[arg(long = "tol", value_name = "KEY=VAL")]
    pub tol: Vec<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat `key = value` file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub thetas: Vec<Angle>,
    pub epsilon: f64,
    pub scenario: Option<Scenario>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    v.trim()
        .parse()
        .map_err(|_| usage(format!("{key}: not a number: {v:?}")))
}

fn parse_thetas(values: &[f64]) -> Result<Vec<Angle>, CliError> {
    values
        .iter()
        .map(|&t| Angle::new(t).map_err(|e| usage(format!("--theta {t}: {e}"))))
        .collect()
}

fn apply_tol(tol: &mut Tolerances, spec: &str) -> Result<(), CliError> {
    let (k, v) = spec
        .split_once('=')
        .ok_or_else(|| usage(format!("--tol expects KEY=VAL, got {spec:?}")))?;
    let value = parse_f64(k, v)?;
    if !(value.is_finite() && value > 0.0) {
        return Err(usage(format!("tolerance {k} must be positive")));
    }
    if !tol.set(k.trim(), value) {
        return Err(usage(format!(
            "unknown tolerance {k:?} (herm, reconstruction, null_space, psd, check)"
        )));
    }
    Ok(())
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", n + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// File values first, then flags on top. `default_grid` applies when neither
/// source names any angle.
pub fn resolve(o: &Overrides, default_grid: Option<usize>) -> Result<RunConfig, CliError> {
    let file = match &o.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };

    let mut tolerances = Tolerances::default();
    let mut file_thetas = Vec::new();
    let mut file_grid = None;
    let mut epsilon = DEFAULT_EPSILON;
    let mut scenario = None;
    let mut seed = DEFAULT_SEED;
    let mut out = None;
    let mut format = Format::Json;

    for (k, v) in &file {
        match k.as_str() {
            "theta" => {
                for t in v.split(',') {
                    file_thetas.push(parse_f64("theta", t)?);
                }
            }
            "theta_grid" | "theta-grid" => {
                file_grid = Some(
                    v.parse()
                        .map_err(|_| usage(format!("theta_grid: not a count: {v:?}")))?,
                )
            }
            "epsilon" => epsilon = parse_f64("epsilon", v)?,
            "scenario" => {
                scenario = Some(
                    Scenario::from_str(v, true)
                        .map_err(|_| usage(format!("unknown scenario {v:?}")))?,
                )
            }
            "seed" => {
                seed = v
                    .parse()
                    .map_err(|_| usage(format!("seed: not an integer: {v:?}")))?
            }
            "out" => out = Some(PathBuf::from(v)),
            "format" => {
                format =
                    Format::from_str(v, true).map_err(|_| usage(format!("unknown format {v:?}")))?
            }
            "tol" => apply_tol(&mut tolerances, v)?,
            other => match other.strip_prefix("tol.") {
                Some(key) => apply_tol(&mut tolerances, &format!("{key}={v}"))?,
                None => return Err(usage(format!("unknown config key {other:?}"))),
            },
        }
    }

    let grid = o
        .theta_grid
        .or(if o.theta.is_empty() { file_grid } else { None });
    let thetas = if let Some(n) = grid {
        if n == 0 {
            return Err(usage("--theta-grid must be at least 1"));
        }
        Angle::grid(GRID_START, n)
    } else if !o.theta.is_empty() {
        parse_thetas(&o.theta)?
    } else if !file_thetas.is_empty() {
        parse_thetas(&file_thetas)?
    } else if let Some(n) = default_grid {
        Angle::grid(GRID_START, n)
    } else {
        vec![Angle::max_entangled()]
    };

    if let Some(e) = o.epsilon {
        epsilon = e;
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(usage(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    for t in &o.tol {
        apply_tol(&mut tolerances, t)?;
    }

    Ok(RunConfig {
        thetas,
        epsilon,
        scenario: o.scenario.or(scenario),
        seed: o.seed.unwrap_or(seed),
        tolerances,
        out: o.out.clone().or(out),
        format: o.format.unwrap_or(format),
    })
}
