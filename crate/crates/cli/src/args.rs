//! Command-line flags and their translation into a [`RunConfig`].

use std::path::PathBuf;

use capq_core::experiments::{default_eps_grid, Family};
use capq_core::{QuadratureConfig, SearchConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{At, CliError};
use crate::run::{Command, OutputFormat, RunConfig, SearchMode};
use crate::spec::{parse_body, parse_eps_grid, parse_params};

const OUTPUT_HELP: &str = "\
Output:
  JSON (default) carries `schema_version` and `command` at the top level.
  CSV numbers have 12 significant digits. Columns:
    cap-bounds, torsion-bounds, g-eval, search:  quantity,value
    experiment:  family,eps,g_lo,g_hi,label,<aux columns sorted by name>
    acceptance:  id,name,passed,elapsed_s,budget_s,detail

Exit codes: 0 ok, 1 usage error, 2 numerical failure, 3 acceptance failure.
CAPQ_THREADS caps the worker threads used by parallel sweeps.";

#[derive(Debug, Parser)]
#[command(name = "capq", version, about = "Bounds for p-capacity, q-torsion and the capacity-torsion functional G on convex bodies", after_help = OUTPUT_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format
    #[arg(long = "out", value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write output to this file instead of stdout
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    /// Seed recorded in the search configuration
    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,

    /// Relative tolerance of adaptive quadrature
    #[arg(long, default_value_t = QuadratureConfig::default().rel_tol, global = true)]
    pub rel_tol: f64,

    /// Absolute tolerance of adaptive quadrature
    #[arg(long, default_value_t = QuadratureConfig::default().abs_tol, global = true)]
    pub abs_tol: f64,

    /// Subdivision budget of adaptive quadrature
    #[arg(long, default_value_t = QuadratureConfig::default().max_subdivisions, global = true)]
    pub max_subdivisions: usize,

    /// Tolerance of golden-section and Nelder–Mead searches
    #[arg(long, default_value_t = SearchConfig::default().tol, global = true)]
    pub search_tol: f64,

    /// Iteration budget of the searches
    #[arg(long, default_value_t = SearchConfig::default().max_iters, global = true)]
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Max,
    Min,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Lower and upper bounds for the p-capacity of a body
    CapBounds {
        /// ball:d=3,r=1 | ellipsoid:2,1,1 | cuboid:4,1,1
        #[arg(long)]
        body: String,
        #[arg(long)]
        p: f64,
    },
    /// Enclosures of the q-torsional rigidity and of its r-th power
    TorsionBounds {
        #[arg(long)]
        body: String,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        r: f64,
    },
    /// Certified interval for G on one body, with the ball value and the
    /// right-hand sides of the applicable extremal bounds
    GEval {
        #[arg(long)]
        body: String,
        /// d=3,p=2,q=2,r=1,beta=0 (or alpha=...)
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        /// Accept parameters whose constraint forces alpha < 0
        #[arg(long)]
        signed_alpha: bool,
    },
    /// Sweep a degenerating body family over an eps grid
    Experiment {
        /// thin_Ec | elongated_Ea | disconnected_Omega | ellipsoid_aspect | cuboid_aspect
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        /// Strictly decreasing values in (0, 1); default 10^-1 ... 10^-4 in half decades
        #[arg(long)]
        eps_grid: Option<String>,
        #[arg(long)]
        signed_alpha: bool,
    },
    /// Nelder–Mead shape search over ellipsoids or boxes
    Search {
        /// ellipsoid_aspect | cuboid_aspect
        #[arg(long, default_value = "ellipsoid_aspect")]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        /// max searches the certified lower bound, min the certified upper bound
        #[arg(long, value_enum, default_value_t = Mode::Max)]
        mode: Mode,
        #[arg(long)]
        signed_alpha: bool,
    },
    /// Run the acceptance suite
    Acceptance {
        /// Run only these criteria (1-10)
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn family(tag: &str) -> Result<Family, CliError> {
    Family::from_tag(tag).at("experiments", "Family::from_tag")
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let command = match self.command {
            Sub::CapBounds { body, p } => Command::CapBounds { body: parse_body(&body)?, p },
            Sub::TorsionBounds { body, q, r } => Command::TorsionBounds { body: parse_body(&body)?, q, r },
            Sub::GEval { body, params, signed_alpha } => Command::GEval {
                body: parse_body(&body)?,
                params: parse_params(&params, signed_alpha)?,
            },
            Sub::Experiment { family: f, params, eps_grid, signed_alpha } => Command::Experiment {
                family: family(&f)?,
                params: parse_params(&params, signed_alpha)?,
                eps_grid: match eps_grid {
                    Some(s) => parse_eps_grid(&s)?,
                    None => default_eps_grid(),
                },
            },
            Sub::Search { family: f, params, mode, signed_alpha } => Command::Search {
                family: family(&f)?,
                params: parse_params(&params, signed_alpha)?,
                mode: match mode {
                    Mode::Max => SearchMode::Max,
                    Mode::Min => SearchMode::Min,
                },
            },
            Sub::Acceptance { only } => Command::Acceptance { only },
        };
        let c = self.common;
        Ok(RunConfig {
            command,
            output_format: match c.format {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
            },
            output_path: c.output,
            seed: c.seed,
            quadrature: QuadratureConfig { rel_tol: c.rel_tol, abs_tol: c.abs_tol, max_subdivisions: c.max_subdivisions },
            search: SearchConfig { tol: c.search_tol, max_iters: c.max_iters, seed: c.seed },
        })
    }
}

/// Reads `CAPQ_THREADS`; `None` when unset.
pub fn threads_from_env(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::usage("cli", "CAPQ_THREADS", format!("expected a positive integer, found '{s}'"))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> Result<RunConfig, CliError> {
        Cli::try_parse_from(args).unwrap().into_config()
    }

    #[test]
    fn flags_map_to_a_config() {
        let c = config(&["capq", "g-eval", "--body", "ball:d=3,r=1", "--params", "d=3,p=2,q=2,r=1,beta=0", "--out", "csv"]).unwrap();
        assert_eq!(c.output_format, OutputFormat::Csv);
        assert_eq!(c.seed, 42);
        assert!(matches!(c.command, Command::GEval { .. }));
        let c = config(&["capq", "acceptance", "--only", "2,5"]).unwrap();
        assert_eq!(c.command, Command::Acceptance { only: vec![2, 5] });
        let c = config(&["capq", "experiment", "--family", "thin_Ec", "--params", "d=3,p=2,q=2,r=1,beta=0"]).unwrap();
        let Command::Experiment { eps_grid, .. } = c.command else { panic!() };
        assert_eq!(eps_grid.len(), 7);
    }

    #[test]
    fn bad_specs_are_usage_errors() {
        let e = config(&["capq", "cap-bounds", "--body", "ellipsoid:1", "--p", "2"]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let e = config(&["capq", "experiment", "--family", "nope", "--params", "d=3,p=2,q=2,r=1,beta=0"]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn thread_counts() {
        assert_eq!(threads_from_env(None).unwrap(), None);
        assert_eq!(threads_from_env(Some("3")).unwrap(), Some(3));
        assert!(threads_from_env(Some("0")).is_err());
        assert!(threads_from_env(Some("many")).is_err());
    }
}
