//! Library side of the `capq` binary: spec grammars, dispatch and output.

pub mod args;
pub mod error;
pub mod output;
pub mod run;
pub mod spec;

pub use error::{CliError, ErrorKind};
pub use run::{run, Command, Outcome, OutputFormat, RunConfig, SearchMode};
pub use spec::{body_spec, params_spec, parse_body, parse_eps_grid, parse_params};
