//! Run configuration: command-line flags layered over an optional TOML file,
//! resolved against per-command defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use kslab::calculus::DerivativeEngine;
use kslab::hk::Endpoint;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// KS^p, L^p and WS^{k,p} norms of an expression (one-row table).
    Norm,
    /// Dump of the first R cubes of the family.
    Cubes,
    /// L^2 and KS^2 norms of sin(2 pi n x) over a list of n.
    Weakstrong,
    /// KS^p norms of mollified fields and their distance to the field.
    Mollify,
    /// KS^p Cauchy table of difference quotients along a step schedule.
    Strong,
    /// Per-multi-index terms of the WS^{k,p} norm.
    Wsnorm,
    /// Bessel potential norms with inversion and semigroup errors.
    Bessel,
    /// Solves div F = f on the torus and reports the residual.
    Divergence,
    /// Deviation of the mean operator from the identity over a t schedule.
    Meanop,
    /// Improper integral of a one-dimensional integrand.
    Hk,
    /// Runs every acceptance criterion.
    Suite,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Norm => "norm",
            Command::Cubes => "cubes",
            Command::Weakstrong => "weakstrong",
            Command::Mollify => "mollify",
            Command::Strong => "strong",
            Command::Wsnorm => "wsnorm",
            Command::Bessel => "bessel",
            Command::Divergence => "divergence",
            Command::Meanop => "meanop",
            Command::Hk => "hk",
            Command::Suite => "suite",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Fd,
    Spectral,
}

impl From<Engine> for DerivativeEngine {
    fn from(e: Engine) -> Self {
        match e {
            Engine::Fd => DerivativeEngine::FiniteDifference,
            Engine::Spectral => DerivativeEngine::Spectral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

impl From<Side> for Endpoint {
    fn from(s: Side) -> Self {
        match s {
            Side::Lower => Endpoint::Lower,
            Side::Upper => Endpoint::Upper,
        }
    }
}

/// Options shared by the flags and the config file; unset fields fall back
/// to the file, then to the command's defaults.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Field expression in x1..xn, e.g. "sin(2*pi*x1)".
    #[arg(long, global = true)]
    pub expr: Option<String>,
    /// Dimension n (inferred from the box or the expression when omitted).
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Lower box corner, one value per axis or one value for all.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub lower: Option<Vec<f64>>,
    /// Upper box corner.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub upper: Option<Vec<f64>>,
    /// Cells per axis.
    #[arg(long, global = true, value_delimiter = ',')]
    pub counts: Option<Vec<usize>>,
    /// Treat the field as periodic on its box.
    #[arg(long, global = true)]
    pub periodic: Option<bool>,
    /// Truncation depth R of the KS series.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Center window M: cube centers lie in [-M, M]^n.
    #[arg(long, global = true)]
    pub window: Option<u64>,
    /// Exponent p (">= 1" or "inf").
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Sobolev order k.
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Bessel orders s.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub s: Option<Vec<f64>>,
    /// Difference-quotient steps, strictly decreasing.
    #[arg(long, global = true, value_delimiter = ',')]
    pub h: Option<Vec<f64>>,
    /// Mollifier radii.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Frequencies n for the weak-to-strong table.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ns: Option<Vec<u32>>,
    /// Mean-operator scales t.
    #[arg(long, global = true, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    /// Direction v for difference quotients.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub direction: Option<Vec<f64>>,
    /// Atoms of a one-dimensional discrete measure.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub atoms: Option<Vec<f64>>,
    /// Weights of the measure's atoms.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Option<Vec<f64>>,
    /// Derivative engine for Sobolev norms.
    #[arg(long, global = true, value_enum)]
    pub engine: Option<Engine>,
    /// Left end of the improper integral.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub from: Option<f64>,
    /// Right end of the improper integral.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Which end is singular.
    #[arg(long, global = true, value_enum)]
    pub singular: Option<Side>,
    /// Absolute tolerance of the improper integral.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; tables go to stdout when omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),*) => {
        Params { $($field: $flags.$field.or($file.$field),)* }
    };
}

impl Params {
    /// Flags win over the file.
    pub fn over(self, file: Params) -> Params {
        overlay!(
            self, file, expr, dim, lower, upper, counts, periodic, depth, window, p, k, s, h, eps, ns, t,
            direction, atoms, weights, engine, from, to, singular, tol, seed, output
        )
    }

    pub fn from_file(path: &Path) -> Result<Params> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved configuration, echoed into every output header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub expr: String,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub counts: Vec<usize>,
    pub periodic: bool,
    pub depth: usize,
    pub window: u64,
    pub p: f64,
    pub k: u32,
    pub s: Vec<f64>,
    pub h: Vec<f64>,
    pub eps: Vec<f64>,
    pub ns: Vec<u32>,
    pub t: Vec<f64>,
    pub direction: Vec<f64>,
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
    pub engine: Engine,
    pub from: f64,
    pub to: f64,
    pub singular: Side,
    pub tol: f64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 20_240_917;

struct Defaults {
    expr: &'static str,
    dim: usize,
    lower: f64,
    upper: f64,
    counts: usize,
    periodic: bool,
}

fn defaults(command: Command) -> Defaults {
    let d = |expr, dim, lower, upper, counts, periodic| Defaults {
        expr,
        dim,
        lower,
        upper,
        counts,
        periodic,
    };
    match command {
        Command::Norm | Command::Cubes | Command::Suite => d("abs(x1)", 1, -1.0, 1.0, 512, false),
        Command::Weakstrong => d("sin(2*pi*x1)", 1, 0.0, 1.0, 4096, false),
        Command::Mollify => d("abs(x1)", 1, -1.0, 1.0, 2048, false),
        Command::Strong => d("sin(2*pi*x1)", 1, 0.0, 1.0, 1000, true),
        Command::Wsnorm => d("sin(2*pi*x1)", 1, 0.0, 1.0, 512, true),
        Command::Bessel => d("cos(2*pi*x1)", 1, 0.0, 1.0, 256, true),
        Command::Divergence => d("sin(2*pi*x1)*cos(2*pi*x2)", 2, 0.0, 1.0, 64, true),
        Command::Meanop => d("sin(2*pi*x1)", 1, 0.0, 1.0, 1000, true),
        Command::Hk => d("2*x1*sin(1/x1^2) - (2/x1)*cos(1/x1^2)", 1, 0.0, 1.0, 2, false),
    }
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn broadcast<T: Copy>(name: &str, values: Vec<T>, dim: usize) -> Result<Vec<T>> {
    match values.len() {
        1 => Ok(vec![values[0]; dim]),
        n if n == dim => Ok(values),
        n => Err(config_error(format!("--{name} has {n} entries for dimension {dim}"))),
    }
}

fn non_empty<T>(name: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        Err(config_error(format!("--{name} must not be empty")))
    } else {
        Ok(())
    }
}

impl RunConfig {
    pub fn resolve(command: Command, params: Params) -> Result<RunConfig> {
        let d = defaults(command);
        let expr = params.expr.unwrap_or_else(|| d.expr.to_string());
        let list_dim = [&params.lower, &params.upper]
            .iter()
            .filter_map(|v| v.as_ref().map(Vec::len))
            .chain(params.counts.as_ref().map(Vec::len))
            .max()
            .filter(|&n| n > 1);
        let expr_dim = kslab::expr::parse(&expr, usize::MAX)
            .map(|e| e.max_variable())
            .unwrap_or(0);
        let dim = params
            .dim
            .or(list_dim)
            .unwrap_or(d.dim.max(expr_dim));
        if dim == 0 {
            return Err(config_error("--dim must be at least 1"));
        }
        kslab::expr::parse(&expr, dim).map_err(|e| config_error(format!("--expr {expr:?}: {e}")))?;

        let lower = broadcast("lower", params.lower.unwrap_or(vec![d.lower]), dim)?;
        let upper = broadcast("upper", params.upper.unwrap_or(vec![d.upper]), dim)?;
        let counts = broadcast("counts", params.counts.unwrap_or(vec![d.counts]), dim)?;
        for j in 0..dim {
            if !(lower[j].is_finite() && upper[j].is_finite() && lower[j] < upper[j]) {
                return Err(config_error(format!(
                    "axis {}: need finite lower < upper, got [{}, {}]",
                    j + 1,
                    lower[j],
                    upper[j]
                )));
            }
            if counts[j] < 2 {
                return Err(config_error(format!("axis {}: need at least 2 cells", j + 1)));
            }
        }

        let mut direction = vec![0.0; dim];
        direction[0] = 1.0;
        let direction = params.direction.unwrap_or(direction);
        if direction.len() != dim {
            return Err(config_error(format!(
                "--direction has {} components for dimension {dim}",
                direction.len()
            )));
        }

        let config = RunConfig {
            command: command.to_string(),
            seed: params.seed.unwrap_or(DEFAULT_SEED),
            expr,
            lower,
            upper,
            counts,
            periodic: params.periodic.unwrap_or(d.periodic),
            depth: params.depth.unwrap_or(kslab::ks::DEFAULT_DEPTH),
            window: params.window.unwrap_or(kslab::ks::DEFAULT_WINDOW),
            p: params.p.unwrap_or(2.0),
            k: params.k.unwrap_or(1),
            s: params.s.unwrap_or(vec![-2.0, -1.0, 0.0, 1.0, 2.0]),
            h: params.h.unwrap_or(vec![0.016, 0.008, 0.004, 0.002]),
            eps: params.eps.unwrap_or(vec![0.4, 0.2, 0.1, 0.05]),
            ns: params.ns.unwrap_or(vec![1, 2, 4, 8, 16]),
            t: params.t.unwrap_or(vec![0.02, 0.01, 0.005]),
            direction,
            atoms: params.atoms.unwrap_or(vec![1.0, -1.0]),
            weights: params.weights.unwrap_or(vec![0.5, 0.5]),
            engine: params.engine.unwrap_or(Engine::Fd),
            from: params.from.unwrap_or(0.0),
            to: params.to.unwrap_or(1.0),
            singular: params.singular.unwrap_or(Side::Lower),
            tol: params.tol.unwrap_or(1e-6),
            output: params.output,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        non_empty("s", &self.s)?;
        non_empty("h", &self.h)?;
        non_empty("eps", &self.eps)?;
        non_empty("ns", &self.ns)?;
        non_empty("t", &self.t)?;
        non_empty("atoms", &self.atoms)?;
        if !(self.p >= 1.0) {
            return Err(config_error(format!("--p must be >= 1 or inf, got {}", self.p)));
        }
        if self.depth == 0 || self.window == 0 {
            return Err(config_error("--depth and --window must be at least 1"));
        }
        if self.atoms.len() != self.weights.len() {
            return Err(config_error(format!(
                "{} atoms but {} weights",
                self.atoms.len(),
                self.weights.len()
            )));
        }
        if self.eps.iter().any(|e| !(*e > 0.0)) {
            return Err(config_error("--eps entries must be positive"));
        }
        if self.ns.contains(&0) {
            return Err(config_error("--ns entries must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(config_error("--tol must be positive"));
        }
        if !(self.from < self.to) {
            return Err(config_error(format!("need --from < --to, got {} and {}", self.from, self.to)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// The config as commented TOML lines.
    pub fn header_lines(&self) -> Vec<String> {
        let text = toml::to_string(self).expect("config serializes to TOML");
        text.lines().map(|l| format!("# {l}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: Params = toml::from_str("expr = \"x1\"\np = 3.0\ncounts = [64]\n").unwrap();
        let flags = Params {
            p: Some(1.5),
            ..Params::default()
        };
        let cfg = RunConfig::resolve(Command::Norm, flags.over(file)).unwrap();
        assert_eq!(cfg.expr, "x1");
        assert_eq!(cfg.p, 1.5);
        assert_eq!(cfg.counts, vec![64]);
    }

    #[test]
    fn dimension_inference_and_broadcast() {
        let params = Params {
            expr: Some("x1 * x3".into()),
            ..Params::default()
        };
        let cfg = RunConfig::resolve(Command::Norm, params).unwrap();
        assert_eq!(cfg.dim(), 3);
        assert_eq!(cfg.lower, vec![-1.0; 3]);
        assert_eq!(cfg.counts, vec![512; 3]);

        let params = Params {
            lower: Some(vec![0.0, 0.0]),
            ..Params::default()
        };
        assert_eq!(RunConfig::resolve(Command::Norm, params).unwrap().dim(), 2);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            Params {
                expr: Some("x2".into()),
                dim: Some(1),
                ..Params::default()
            },
            Params {
                lower: Some(vec![1.0]),
                upper: Some(vec![0.0]),
                ..Params::default()
            },
            Params {
                eps: Some(vec![]),
                ..Params::default()
            },
            Params {
                p: Some(0.5),
                ..Params::default()
            },
            Params {
                atoms: Some(vec![1.0]),
                ..Params::default()
            },
            Params {
                counts: Some(vec![1]),
                ..Params::default()
            },
        ];
        for params in cases {
            let err = RunConfig::resolve(Command::Norm, params).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{err}");
        }
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        assert!(toml::from_str::<Params>("exprr = \"x1\"").is_err());
    }

    #[test]
    fn header_is_commented_toml_that_reparses() {
        let cfg = RunConfig::resolve(
            Command::Mollify,
            Params {
                p: Some(f64::INFINITY),
                ..Params::default()
            },
        )
        .unwrap();
        let lines = cfg.header_lines();
        assert!(lines.iter().all(|l| l.starts_with("# ")));
        let body: String = lines.iter().map(|l| format!("{}\n", &l[2..])).collect();
        let table: toml::Table = toml::from_str(&body).unwrap();
        assert_eq!(table["command"].as_str(), Some("mollify"));
        assert_eq!(table["p"].as_float(), Some(f64::INFINITY));
    }
}
