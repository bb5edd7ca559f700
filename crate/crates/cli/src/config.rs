//! Plain `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use tempwave_core::experiments::{Metric, Reference};
use tempwave_core::foldy_lax::DEFAULT_CAPACITY;
use tempwave_core::{Error as CoreError, Prefactor, RegimeParams};
use thiserror::Error;

/// Pipeline selected by the `subcommand` key or flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    /// Step profile `ω_p²(t)` and step centers.
    Profile,
    /// Exact transfer-matrix field and `(R, τ)`.
    Oracle,
    /// Foldy–Lax charges and reconstructed field.
    FoldyLax,
    /// Closed-form effective field, coefficients and regime.
    Effective,
    /// All traces on one grid with pairwise distances.
    Compare,
    /// Convergence sweep over `deltas` with a log-log slope fit.
    Sweep,
    /// Recomputes both published parameter tables.
    Tables,
    /// Full default reproduction suite.
    Suite,
}

impl Subcommand {
    pub fn as_str(self) -> &'static str {
        match self {
            Subcommand::Profile => "profile",
            Subcommand::Oracle => "oracle",
            Subcommand::FoldyLax => "foldy-lax",
            Subcommand::Effective => "effective",
            Subcommand::Compare => "compare",
            Subcommand::Sweep => "sweep",
            Subcommand::Tables => "tables",
            Subcommand::Suite => "suite",
        }
    }
}

impl FromStr for Subcommand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as clap::ValueEnum>::from_str(s, false)
    }
}

/// One documented configuration key.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub unit: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

/// Every accepted key, in help order.
pub const KEYS: &[KeySpec] = &[
    KeySpec {
        name: "T",
        unit: "time",
        default: "10",
        help: "window length; steps lie in (0, T)",
    },
    KeySpec {
        name: "delta",
        unit: "time",
        default: "1e-3",
        help: "step width, in (0, 1)",
    },
    KeySpec {
        name: "h",
        unit: "1",
        default: "0.1",
        help: "contrast exponent, amplitude C*delta^-h, in (0, 1]",
    },
    KeySpec {
        name: "l",
        unit: "1",
        default: "0.1",
        help: "spacing exponent, step spacing delta^l, in (0, 1]",
    },
    KeySpec {
        name: "C",
        unit: "1/time^2",
        default: "1",
        help: "amplitude constant, >= 0",
    },
    KeySpec {
        name: "kappa",
        unit: "1/time",
        default: "1",
        help: "incident wavenumber, > 0",
    },
    KeySpec {
        name: "background",
        unit: "1/time^2",
        default: "0",
        help: "constant omega_p^2 outside the steps, >= 0",
    },
    KeySpec {
        name: "t_min",
        unit: "time",
        default: "-T/2",
        help: "first output grid point",
    },
    KeySpec {
        name: "t_max",
        unit: "time",
        default: "3T/2",
        help: "last output grid point, > t_min",
    },
    KeySpec {
        name: "samples",
        unit: "count",
        default: "400",
        help: "output grid points, >= 2",
    },
    KeySpec {
        name: "n_cap",
        unit: "count",
        default: "none",
        help: "keep at most this many steps (truncation is reported)",
    },
    KeySpec {
        name: "c",
        unit: "rad",
        default: "1.0",
        help: "resonance threshold constant: near when |lambda*T - n*pi| <= c/n",
    },
    KeySpec {
        name: "capacity",
        unit: "count",
        default: "6000",
        help: "largest Foldy-Lax (or Nystrom) system solved; larger exits 2",
    },
    KeySpec {
        name: "dense_limit",
        unit: "count",
        default: "1500",
        help: "largest N solved by dense LU; above it the O(N) route is used",
    },
    KeySpec {
        name: "prefactor",
        unit: "-",
        default: "kernel",
        help: "field reconstruction: kernel or as-printed (diagnostic)",
    },
    KeySpec {
        name: "nodes_per_step",
        unit: "count",
        default: "0",
        help: "Gauss-Legendre nodes per step for the Nystrom check; 0 disables",
    },
    KeySpec {
        name: "deltas",
        unit: "time",
        default: "1e-2, 1e-3, 1e-4",
        help: "sweep step widths, strictly decreasing, at least 3",
    },
    KeySpec {
        name: "metric",
        unit: "-",
        default: "abs-c2",
        help: "sweep metric: abs-c2 or sup-norm",
    },
    KeySpec {
        name: "reference",
        unit: "-",
        default: "oracle",
        help: "sup-norm sweep reference: oracle or effective",
    },
    KeySpec {
        name: "out",
        unit: "path",
        default: "tempwave-out",
        help: "output directory (--out and TEMPWAVE_OUT also apply)",
    },
    KeySpec {
        name: "subcommand",
        unit: "-",
        default: "none",
        help: "profile, oracle, foldy-lax, effective, compare, sweep, tables or suite",
    },
];

/// Help text listing every key with its unit and default.
pub fn keys_help() -> String {
    let mut out = String::from("Config keys (key = value, # starts a comment):\n");
    for k in KEYS {
        let _ = writeln!(
            out,
            "  {:<15} [{}] default {}: {}",
            k.name, k.unit, k.default, k.help
        );
    }
    out
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key `{key}` already set on line {first}")]
    Duplicate {
        line: usize,
        key: String,
        first: usize,
    },

    #[error("line {line}: cannot parse `{key}` from `{value}`: {reason}")]
    Value {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },

    #[error("{}`{key}` out of range: {reason}", line_prefix(*.line))]
    Constraint {
        line: Option<usize>,
        key: String,
        reason: String,
    },

    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: RegimeParams,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub n_cap: Option<usize>,
    pub resonance_constant: f64,
    pub capacity: usize,
    pub dense_limit: usize,
    pub prefactor: Prefactor,
    pub nodes_per_step: usize,
    pub deltas: Vec<f64>,
    pub metric: Metric,
    pub reference: Reference,
    pub out: Option<PathBuf>,
    pub subcommand: Option<Subcommand>,
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

struct Entries {
    map: BTreeMap<&'static str, (usize, String)>,
}

impl Entries {
    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(l, _)| *l)
    }

    fn get<T>(
        &self,
        key: &'static str,
        default: T,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, ConfigError> {
        match self.map.get(key) {
            None => Ok(default),
            Some((line, raw)) => parse(raw).map_err(|reason| ConfigError::Value {
                line: *line,
                key: key.to_string(),
                value: raw.clone(),
                reason,
            }),
        }
    }

    fn constraint(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Constraint {
            line: self.line(key),
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn count(s: &str) -> Result<usize, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn prefactor(s: &str) -> Result<Prefactor, String> {
    match s {
        "kernel" => Ok(Prefactor::Kernel),
        "as-printed" => Ok(Prefactor::AsPrinted),
        _ => Err("expected kernel or as-printed".into()),
    }
}

fn metric(s: &str) -> Result<Metric, String> {
    match s {
        "abs-c2" => Ok(Metric::AbsC2),
        "sup-norm" => Ok(Metric::SupNorm),
        _ => Err("expected abs-c2 or sup-norm".into()),
    }
}

fn reference(s: &str) -> Result<Reference, String> {
    match s {
        "oracle" => Ok(Reference::Oracle),
        "effective" => Ok(Reference::Effective),
        _ => Err("expected oracle or effective".into()),
    }
}

fn number_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| number(x.trim())).collect()
}

/// Parses config text; missing keys take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut map: BTreeMap<&'static str, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(spec) = KEYS.iter().find(|k| k.name == key) else {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        };
        if let Some((first, _)) = map.get(spec.name) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
                first: *first,
            });
        }
        map.insert(spec.name, (line, value.to_string()));
    }
    let e = Entries { map };

    let t_final = e.get("T", 10.0, number)?;
    let delta = e.get("delta", 1e-3, number)?;
    let h = e.get("h", 0.1, number)?;
    let l = e.get("l", 0.1, number)?;
    let c = e.get("C", 1.0, number)?;
    let kappa = e.get("kappa", 1.0, number)?;
    let background = e.get("background", 0.0, number)?;
    let params = RegimeParams::with_background(t_final, delta, h, l, c, kappa, background)
        .map_err(|err| match err {
            CoreError::InvalidParameter { name, reason } => e.constraint(name, reason),
            other => e.constraint("T", other.to_string()),
        })?;

    let t_min = e.get("t_min", -t_final / 2.0, number)?;
    let t_max = e.get("t_max", 1.5 * t_final, number)?;
    if t_max <= t_min {
        return Err(e.constraint("t_max", format!("must exceed t_min = {t_min}, got {t_max}")));
    }
    let samples = e.get("samples", 400, count)?;
    if samples < 2 {
        return Err(e.constraint("samples", format!("must be >= 2, got {samples}")));
    }
    let n_cap = e.get("n_cap", None, |s| count(s).map(Some))?;
    if n_cap == Some(0) {
        return Err(e.constraint("n_cap", "must be >= 1"));
    }
    let resonance_constant = e.get("c", 1.0, number)?;
    if resonance_constant <= 0.0 {
        return Err(e.constraint("c", format!("must be > 0, got {resonance_constant}")));
    }
    let capacity = e.get("capacity", DEFAULT_CAPACITY, count)?;
    if capacity == 0 {
        return Err(e.constraint("capacity", "must be >= 1"));
    }
    let dense_limit = e.get(
        "dense_limit",
        tempwave_core::experiments::compare::DEFAULT_DENSE_LIMIT,
        count,
    )?;
    let prefactor = e.get("prefactor", Prefactor::Kernel, prefactor)?;
    let nodes_per_step = e.get("nodes_per_step", 0, count)?;
    let deltas = e.get("deltas", vec![1e-2, 1e-3, 1e-4], number_list)?;
    if deltas.len() < 3 {
        return Err(e.constraint("deltas", "need at least 3 values"));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(e.constraint("deltas", "every value must lie in (0, 1)"));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(e.constraint("deltas", "must be strictly decreasing"));
    }
    let metric = e.get("metric", Metric::AbsC2, metric)?;
    let reference = e.get("reference", Reference::Oracle, reference)?;
    let out = e.get("out", None, |s| {
        if s.is_empty() {
            Err("empty path".into())
        } else {
            Ok(Some(PathBuf::from(s)))
        }
    })?;
    let subcommand = e.get("subcommand", None, |s| s.parse().map(Some))?;

    Ok(RunConfig {
        params,
        t_min,
        t_max,
        samples,
        n_cap,
        resonance_constant,
        capacity,
        dense_limit,
        prefactor,
        nodes_per_step,
        deltas,
        metric,
        reference,
        out,
        subcommand,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse_config("").unwrap();
        let p = cfg.params;
        assert_eq!(
            (p.t_final(), p.kappa(), p.c(), p.delta(), p.h(), p.l()),
            (10.0, 1.0, 1.0, 1e-3, 0.1, 0.1)
        );
        assert_eq!((cfg.t_min, cfg.t_max, cfg.samples), (-5.0, 15.0, 400));
        assert_eq!(cfg.resonance_constant, 1.0);
        assert_eq!(cfg.capacity, DEFAULT_CAPACITY);
        assert!(cfg.subcommand.is_none() && cfg.out.is_none() && cfg.n_cap.is_none());
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = parse_config("# header\n\n  h = 0.342 # inline\nl=0.9\n").unwrap();
        assert_eq!((cfg.params.h(), cfg.params.l()), (0.342, 0.9));
    }

    #[test]
    fn range_error_cites_bounds_and_line() {
        let err = parse_config("T = 10\nh = 1.5\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, ConfigError::Constraint { line: Some(2), .. }));
        assert!(msg.contains("(0, 1]") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn unknown_duplicate_and_syntax_errors() {
        assert!(matches!(
            parse_config("\nfoo = 1").unwrap_err(),
            ConfigError::UnknownKey { line: 2, .. }
        ));
        assert!(matches!(
            parse_config("h = 0.2\nh = 0.3").unwrap_err(),
            ConfigError::Duplicate {
                line: 2,
                first: 1,
                ..
            }
        ));
        assert!(matches!(
            parse_config("h 0.2").unwrap_err(),
            ConfigError::Syntax { line: 1, .. }
        ));
        assert!(matches!(
            parse_config("samples = many").unwrap_err(),
            ConfigError::Value { line: 1, .. }
        ));
    }

    #[test]
    fn table2_row3_alpha() {
        let cfg = parse_config("h = 0.342\nl = 0.9\n").unwrap();
        assert!((cfg.params.alpha() - 0.242).abs() < 1e-12);
    }

    #[test]
    fn list_and_enum_keys() {
        let cfg = parse_config(
            "deltas = 4e-3, 2e-3, 1e-3\nmetric = sup-norm\nreference = effective\n\
             prefactor = as-printed\nsubcommand = foldy-lax\n",
        )
        .unwrap();
        assert_eq!(cfg.deltas, vec![4e-3, 2e-3, 1e-3]);
        assert_eq!(cfg.metric, Metric::SupNorm);
        assert_eq!(cfg.reference, Reference::Effective);
        assert_eq!(cfg.prefactor, Prefactor::AsPrinted);
        assert_eq!(cfg.subcommand, Some(Subcommand::FoldyLax));
        assert!(parse_config("deltas = 1e-3, 1e-2, 1e-4").is_err());
    }

    #[test]
    fn help_lists_every_key() {
        let help = keys_help();
        for k in KEYS {
            assert!(help.contains(k.name) && help.contains(k.default));
        }
    }
}
