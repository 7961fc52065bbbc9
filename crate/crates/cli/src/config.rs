// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use pmoments::invariants::BORDERLINE_TOL;
use pmoments::numeric::{parse_rational, Rational};
use pmoments::toric::ToricModel;

use crate::Failure;

#[derive(Parser, Debug)]
#[command(name = "pmoments", version, about = "Moment invariants of polarized toric models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate δ^(p) and α upper bounds over a p-grid, with K-stability verdicts.
    Invariants(InvariantsArgs),
    /// Run the inequality suite on a model and a seeded corpus.
    Verify(VerifyArgs),
    /// Emit plot-ready grids; never asserts.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Model JSON file ({"dim", "vertices"}) or a built-in name: p2,
    /// p2-anticanonical, p1xp1, pn:<n>, hirzebruch-<a>.
    #[arg(long, default_value = "p2")]
    pub model: String,
    /// Replace the polarization by the anticanonical one.
    #[arg(long)]
    pub anticanonical: bool,
    /// Candidate valuations have coordinates in [-bound, bound].
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub bound: u32,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma list or `start:stop:step`; entries must be ≥ 1.
    #[arg(long, default_value = "1,2,4")]
    pub p: String,
    /// Relative tolerance for float threshold comparisons.
    #[arg(long, default_value_t = BORDERLINE_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Float grid for the H-monotonicity check.
    #[arg(long, default_value = "1:10:0.5")]
    pub p: String,
    /// Largest level of the jumping-number tables.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    pub m: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Extra volume curve JSON ({"n", "curve"}) to include.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// p-grid for the H and beta-normalized series.
    #[arg(long, default_value = "1:10:0.5")]
    pub p: String,
    /// Valuation for the curve series; defaults to the first ray.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Option<Vec<i64>>,
    /// Scan this volume curve JSON instead of a model valuation.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Rational t-grid for the continuity series.
    #[arg(long, default_value = "0,1/4,1/2,3/4,1")]
    pub t: String,
    /// Ray whose support number moves along the t-grid.
    #[arg(long, default_value_t = 0)]
    pub ray: usize,
    /// Exponent of the continuity series.
    #[arg(long, default_value_t = 1.0)]
    pub continuity_p: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `"1,2,4"`, `"1:10:0.5"` (inclusive) or empty.
pub fn parse_p_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let bad = || Failure::input(format!("bad p-grid {text:?}"));
    let grid: Vec<f64> = if let [a, b, step] = text.split(':').collect::<Vec<_>>()[..] {
        let (a, b, step): (f64, f64, f64) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
            step.trim().parse().map_err(|_| bad())?,
        );
        if !(step > 0.0) || b < a {
            return Err(bad());
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        (0..=count).map(|k| a + step * k as f64).collect()
    } else {
        text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if let Some(p) = grid.iter().find(|p| !(**p >= 1.0) || !p.is_finite()) {
        return Err(Failure::input(format!("p-grid entries must be >= 1, got {p}")));
    }
    Ok(grid)
}

pub fn parse_t_grid(text: &str) -> Result<Vec<Rational>, Failure> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|s| parse_rational(s).map_err(Failure::from)).collect()
}

pub fn load_model(args: &ModelArgs) -> Result<ToricModel, Failure> {
    let path = Path::new(&args.model);
    let model = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        ToricModel::from_json(&text)?
    } else {
        match ToricModel::builtin(&args.model) {
            Ok(m) => m,
            Err(pmoments::Error::Argument(_)) => {
                return Err(Failure::input(format!(
                    "model {:?} is neither a readable file nor a built-in name",
                    args.model
                )))
            }
            Err(e) => return Err(e.into()),
        }
    };
    if args.anticanonical {
        Ok(model.anticanonical()?)
    } else {
        Ok(model)
    }
}

pub fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}
