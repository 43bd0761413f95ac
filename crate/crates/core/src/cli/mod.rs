//! Command-line front end. `run` parses arguments, executes one subcommand and
//! writes JSON or CSV; errors go to stderr as a JSON object.
//!
//! Exit codes: 0 success, 2 usage, 3 invalid configuration, 4 numerical failure.

mod commands;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::GeoError;
use crate::geometry::SensorConfig;

pub use output::{format_csv_float, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rangeloc", version, about = "Range and range-difference localization with two or three receivers")]
pub struct Cli {
    /// Receiver configuration: a path to a JSON file or an inline JSON object
    #[arg(long, global = true)]
    pub config: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sources with the given ranges
    LocalizeToa {
        /// Comma-separated ranges, one per receiver
        #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
        toa: Values,
    },
    /// Sources with the given range differences `d_i - d_3`
    LocalizeTdoa {
        /// `tau1,tau2`
        #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
        tdoa: Values,
    },
    /// Feasibility of a range vector or region of a range-difference pair
    Classify(ClassifyArgs),
    /// Range surface sampled over a square grid of sources, with Gaussian curvature
    SurfaceSample {
        /// `lo:hi`, applied to both axes
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: (f64, f64),
        /// Grid points per axis
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        resolution: u32,
    },
    /// Nodes, tropes, conic arcs, Q3 facets and hull components of the range surface
    Features,
    /// Conversions between shape parameters `(a, c, scale)` and triangles
    Params {
        /// `a,c[,scale]`; without it the configuration is converted instead
        #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
        abc: Option<Values>,
    },
    /// Noisy range batches
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ClassifyArgs {
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub toa: Option<Values>,
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub tdoa: Option<Values>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Source position, `x,y` or `x,y,z`
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub source: Values,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub bias: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
}

/// Comma-separated numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Values(pub Vec<f64>);

fn parse_list(s: &str) -> Result<Values, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<Vec<f64>, String>>()
        .map(Values)
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let lo = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("empty or non-finite range `{s}`"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    receivers: Vec<Vec<f64>>,
    dimension: Option<usize>,
}

/// Failure of a subcommand, with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, kind: "usage".into(), message: message.into() }
    }

    fn config(message: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, kind: "invalid_config".into(), message: message.into() }
    }
}

impl From<GeoError> for CliError {
    fn from(e: GeoError) -> Self {
        let code = if e.is_config_error() {
            EXIT_CONFIG
        } else if matches!(e, GeoError::InvalidParam(_) | GeoError::UnknownLabel(_)) {
            EXIT_USAGE
        } else {
            EXIT_NUMERICAL
        };
        CliError { code, kind: e.kind().into(), message: e.to_string() }
    }
}

/// Reads a configuration from a file path or an inline JSON object.
pub fn load_config(source: &str) -> Result<SensorConfig, CliError> {
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else {
        std::fs::read_to_string(PathBuf::from(source))
            .map_err(|e| CliError::config(format!("cannot read `{source}`: {e}")))?
    };
    let raw: ConfigFile = serde_json::from_str(&text).map_err(|e| CliError::config(e.to_string()))?;
    SensorConfig::validate(raw.dimension, &raw.receivers).map_err(|e| CliError::config(e.to_string()))
}

fn write_error(err: &mut dyn Write, e: &CliError) {
    let v = serde_json::json!({ "error": { "kind": e.kind, "message": e.message, "exit_code": e.code } });
    let _ = writeln!(err, "{v}");
}

/// Runs the program on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            write_error(err, &CliError::usage(e.to_string().trim_end()));
            return EXIT_USAGE;
        }
    };
    match commands::execute(&cli) {
        Ok(doc) => {
            let text = match cli.format {
                Format::Json => doc.to_json(),
                Format::Csv => doc.to_csv(),
            };
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return EXIT_NUMERICAL;
            }
            EXIT_OK
        }
        Err(e) => {
            write_error(err, &e);
            e.code
        }
    }
}
