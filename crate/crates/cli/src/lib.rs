//! Command-line front end: config parsing, subcommand dispatch and the
//! output layout.

pub mod config;
pub mod run;

use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches, Parser};

pub use config::{keys_help, parse_config, ConfigError, RunConfig, Subcommand};
pub use run::{dispatch, CliError, Outcome};

/// Environment variable used as output directory when neither `--out` nor
/// the `out` key is set.
pub const OUT_ENV: &str = "TEMPWAVE_OUT";
/// Output directory when nothing else is set.
pub const DEFAULT_OUT: &str = "tempwave-out";

#[derive(Debug, Parser)]
#[command(
    name = "tempwave",
    version,
    about = "Wave propagation through time-modulated step media"
)]
pub struct Cli {
    /// Subcommand to run (same as --subcommand).
    #[arg(value_enum)]
    pub command: Option<Subcommand>,

    /// Subcommand to run.
    #[arg(long = "subcommand", value_enum)]
    pub subcommand: Option<Subcommand>,

    /// Plain `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory; overrides the `out` key and TEMPWAVE_OUT.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Cli {
    /// Parses arguments with the config-key table appended to `--help`.
    pub fn parse_with_keys<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let matches = Self::command()
            .after_help(keys_help())
            .try_get_matches_from(args)?;
        Self::from_arg_matches(&matches)
    }
}

/// Output directory: `--out`, then the `out` key, then `env`, then
/// [`DEFAULT_OUT`].
pub fn resolve_out(flag: Option<&Path>, cfg: &RunConfig, env: Option<PathBuf>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.out.clone())
        .or(env)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Loads the config, resolves subcommand and output directory, and runs.
pub fn execute(cli: &Cli, env_out: Option<PathBuf>) -> Result<(PathBuf, Outcome), CliError> {
    let cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    let subcommand = match (cli.command, cli.subcommand) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Conflict(a.as_str(), b.as_str()));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => cfg.subcommand.ok_or(CliError::NoSubcommand)?,
    };
    let out = resolve_out(cli.out.as_deref(), &cfg, env_out);
    let outcome = dispatch(&cfg, subcommand, &out)?;
    Ok((out, outcome))
}
