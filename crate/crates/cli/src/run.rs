//! Subcommand pipelines and exit-code mapping.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use tempwave_core::experiments::emit::{
    profile_csv, render_svg, trace_csv, traces_csv, write_file, Series,
};
use tempwave_core::experiments::sweep::fits_table;
use tempwave_core::experiments::tables::{table1_csv, table2_csv, tables_reproduced};
use tempwave_core::experiments::{
    convergence_sweep, emit_svg, fmt_g12, reproduce_table1, reproduce_table2, run_default_suite,
    solve_foldy_lax, trace_compare, CompareOptions, Component, SweepSpec, Table,
};
use tempwave_core::{
    build_profile, classify, uniform_grid, EffectiveSolution, Error as CoreError, ExactSolution,
    NystromSolution, SpacingRule, TraceLabel,
};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, Subcommand};

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("reproduction mismatch: {0}")]
    Mismatch(String),

    #[error("conflicting subcommands `{0}` and `{1}`")]
    Conflict(&'static str, &'static str),

    #[error("no subcommand given (use --subcommand, a positional name or the `subcommand` key)")]
    NoSubcommand,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Conflict(..) | CliError::NoSubcommand => EXIT_CONFIG,
            CliError::Core(CoreError::Capacity { .. }) => EXIT_CAPACITY,
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Core(_) => EXIT_CONFIG,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }
}

/// What a successful run produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Human-readable summary lines for stdout.
    pub lines: Vec<String>,
}

struct Out<'a> {
    dir: &'a Path,
    outcome: Outcome,
}

impl Out<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_file(&path, contents)?;
        self.outcome.files.push(path);
        Ok(())
    }

    fn say(&mut self, line: impl Into<String>) {
        self.outcome.lines.push(line.into());
    }
}

/// Runs `subcommand` with `cfg`, writing into `out_dir`.
pub fn dispatch(
    cfg: &RunConfig,
    subcommand: Subcommand,
    out_dir: &Path,
) -> Result<Outcome, CliError> {
    let mut out = Out {
        dir: out_dir,
        outcome: Outcome::default(),
    };
    match subcommand {
        Subcommand::Profile => profile(cfg, &mut out)?,
        Subcommand::Oracle => oracle(cfg, &mut out)?,
        Subcommand::FoldyLax => foldy_lax(cfg, &mut out)?,
        Subcommand::Effective => effective(cfg, &mut out)?,
        Subcommand::Compare => compare(cfg, &mut out)?,
        Subcommand::Sweep => sweep(cfg, &mut out)?,
        Subcommand::Tables => tables(&mut out)?,
        Subcommand::Suite => suite(&mut out)?,
    }
    Ok(out.outcome)
}

fn grid(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    Ok(uniform_grid(cfg.t_min, cfg.t_max, cfg.samples)?)
}

fn complex_row(name: &str, z: Complex64) -> [String; 4] {
    [
        name.to_string(),
        fmt_g12(z.re),
        fmt_g12(z.im),
        fmt_g12(z.norm()),
    ]
}

fn profile(cfg: &RunConfig, out: &mut Out) -> Result<(), CliError> {
    let profile = build_profile(&cfg.params, SpacingRule::Uniform, cfg.n_cap)?;
    let csv = profile_csv(&profile, cfg.t_min, cfg.t_max, cfg.samples)?;
    let points = grid(cfg)?
        .into_iter()
        .map(|t| (t, profile.omega_p_squared(t)))
        .collect();
    let svg = render_svg(
        &[Series {
            name: "omega_p^2".into(),
            points,
            dashed: false,
        }],
        "step profile",
        "t",
        "omega_p^2(t)",
    )?;
    let mut centers = Table::new(["index", "center", "start", "end"]);
    for (j, (&c, (a, b))) in profile
        .centers()
        .iter()
        .zip(profile.intervals())
        .enumerate()
    {
        centers.push([j.to_string(), fmt_g12(c), fmt_g12(a), fmt_g12(b)]);
    }
    out.write("profile.csv", &csv)?;
    out.write("profile.svg", &svg)?;
    out.write("centers.csv", &centers.to_csv())?;
    out.say(format!(
        "N = {} steps, spacing {}, amplitude {}{}",
        profile.len(),
        fmt_g12(cfg.params.spacing()),
        fmt_g12(profile.amplitude()),
        if profile.truncated() {
            " (truncated by n_cap)"
        } else {
            ""
        }
    ));
    Ok(())
}

fn oracle(cfg: &RunConfig, out: &mut Out) -> Result<(), CliError> {
    let profile = build_profile(&cfg.params, SpacingRule::Uniform, cfg.n_cap)?;
    let exact = ExactSolution::from_profile(&profile, cfg.params.wavenumber())?;
    let trace = exact.trace(&grid(cfg)?)?;
    let co = exact.coeffs();
    let mut t = Table::new(["quantity", "re", "im", "abs"]);
    t.push(complex_row("R", co.r));
    t.push(complex_row("tau", co.tau));
    t.push([
        "flux".to_string(),
        fmt_g12(co.flux()),
        "0".into(),
        fmt_g12(co.flux()),
    ]);
    out.write("oracle.csv", &trace_csv(&trace)?)?;
    emit_svg(
        &[&trace],
        Component::Both,
        "oracle field",
        &out.dir.join("oracle.svg"),
    )?;
    out.outcome.files.push(out.dir.join("oracle.svg"));
    out.write("oracle_coefficients.csv", &t.to_csv())?;
    out.say(format!(
        "N = {}, |R| = {}, |tau| = {}, flux = {}",
        profile.len(),
        fmt_g12(co.r.norm()),
        fmt_g12(co.tau.norm()),
        fmt_g12(co.flux())
    ));
    Ok(())
}

fn foldy_lax(cfg: &RunConfig, out: &mut Out) -> Result<(), CliError> {
    let profile = build_profile(&cfg.params, SpacingRule::Uniform, cfg.n_cap)?;
    let sol = solve_foldy_lax(&profile, &cfg.params, cfg.capacity, cfg.dense_limit)?;
    let grid = grid(cfg)?;
    let trace = sol.trace_with(&grid, cfg.prefactor)?;

    let mut charges = Table::new(["index", "center", "re", "im", "abs"]);
    for (j, (&c, q)) in profile.centers().iter().zip(sol.charges()).enumerate() {
        charges.push([
            j.to_string(),
            fmt_g12(c),
            fmt_g12(q.re),
            fmt_g12(q.im),
            fmt_g12(q.norm()),
        ]);
    }
    let mut summary = Table::new(["quantity", "value"]);
    summary.push(["n_steps".to_string(), profile.len().to_string()]);
    summary.push(["residual".to_string(), fmt_g12(sol.residual())]);
    summary.push([
        "inverse_norm_estimate".to_string(),
        sol.condition_estimate()
            .map(fmt_g12)
            .unwrap_or_else(|| "NA".into()),
    ]);
    summary.push([
        "prefactor".to_string(),
        match cfg.prefactor {
            tempwave_core::Prefactor::Kernel => "kernel",
            tempwave_core::Prefactor::AsPrinted => "as-printed",
        }
        .into(),
    ]);

    let mut traces = vec![trace];
    if cfg.nodes_per_step > 0 {
        let ny = NystromSolution::solve(&profile, &cfg.params, cfg.nodes_per_step, cfg.capacity)?;
        let ny_trace = ny.trace(&grid)?;
        summary.push(["nystrom_residual".to_string(), fmt_g12(ny.residual())]);
        summary.push([
            "sup_foldy_lax_vs_nystrom".to_string(),
            fmt_g12(traces[0].sup_distance(&ny_trace)?),
        ]);
        traces.push(ny_trace);
    }
    let refs: Vec<_> = traces.iter().collect();
    out.write("foldy_lax.csv", &traces_csv(&refs)?)?;
    emit_svg(
        &refs,
        Component::Both,
        "Foldy-Lax field",
        &out.dir.join("foldy_lax.svg"),
    )?;
    out.outcome.files.push(out.dir.join("foldy_lax.svg"));
    out.write("charges.csv", &charges.to_csv())?;
    out.write("foldy_lax_summary.csv", &summary.to_csv())?;
    out.say(format!(
        "N = {}, residual = {}",
        profile.len(),
        fmt_g12(sol.residual())
    ));
    Ok(())
}

fn effective(cfg: &RunConfig, out: &mut Out) -> Result<(), CliError> {
    let sol = EffectiveSolution::from_params(&cfg.params)?;
    let trace = sol.trace(&grid(cfg)?)?;
    let co = sol.coefficients();
    let mut coeffs = Table::new(["name", "re", "im", "abs"]);
    for (name, z) in [
        ("C1", co.c1),
        ("C2", co.c2),
        ("C3", co.c3),
        ("C4", co.c4),
        ("C5", co.c5),
        ("C6", co.c6),
    ] {
        coeffs.push(complex_row(name, z));
    }
    let class = classify(&cfg.params, cfg.resonance_constant);
    let lt_pi = class.lambda_t / std::f64::consts::PI;
    let mut regime = Table::new(["quantity", "value"]);
    let rows = [
        ("lambda", fmt_g12(sol.lambda())),
        ("lambdaT_over_pi", fmt_g12(lt_pi)),
        ("tan_lambdaT", fmt_g12(class.lambda_t.tan())),
        (
            "one_minus_h_minus_l",
            fmt_g12(1.0 - cfg.params.h() - cfg.params.l()),
        ),
        ("regime", class.kind.as_str().into()),
        (
            "resonance",
            match class.resonance {
                tempwave_core::effective::Resonance::Near => "near",
                tempwave_core::effective::Resonance::Off => "off",
            }
            .into(),
        ),
        ("n", class.n.to_string()),
        ("offset", fmt_g12(class.offset)),
        ("threshold", fmt_g12(class.threshold)),
        ("behavior", class.behavior.as_str().into()),
        ("flux", fmt_g12(co.flux())),
    ];
    for (k, v) in rows {
        regime.push([k.to_string(), v]);
    }
    out.write("effective.csv", &trace_csv(&trace)?)?;
    emit_svg(
        &[&trace],
        Component::Both,
        "effective field",
        &out.dir.join("effective.svg"),
    )?;
    out.outcome.files.push(out.dir.join("effective.svg"));
    out.write("effective_coefficients.csv", &coeffs.to_csv())?;
    out.write("regime.csv", &regime.to_csv())?;
    out.say(format!(
        "lambda = {}, lambdaT/pi = {}, |C2| = {}, |C5| = {}, {} ({})",
        fmt_g12(sol.lambda()),
        fmt_g12(lt_pi),
        fmt_g12(co.c2.norm()),
        fmt_g12(co.c5.norm()),
        class.kind.as_str(),
        class.behavior.as_str()
    ));
    Ok(())
}

fn compare(cfg: &RunConfig, out: &mut Out) -> Result<(), CliError> {
    let opts = CompareOptions {
        capacity: cfg.capacity,
        dense_limit: cfg.dense_limit,
        n_cap: cfg.n_cap,
        resonance_constant: cfg.resonance_constant,
        prefactor: cfg.prefactor,
    };
    let cmp = trace_compare(&cfg.params, &grid(cfg)?, &opts)?;
    let traces = cmp.traces();
    out.write("compare.csv", &traces_csv(&traces)?)?;
    emit_svg(
        &traces,
        Component::Real,
        "field comparison",
        &out.dir.join("compare.svg"),
    )?;
    out.outcome.files.push(out.dir.join("compare.svg"));
    out.write("compare_summary.csv", &cmp.summary().to_csv())?;
    let mut line = format!("N = {}", cmp.n_steps);
    for d in &cmp.differences {
        let _ = write!(line, ", {}-{} = {}", d.a, d.b, fmt_g12(d.sup));
    }
    out.say(line);
    for w in &cmp.warnings {
        out.say(format!("warning: {w}"));
    }
    if cmp.foldy_lax.is_none() {
        out.say(format!("{} trace omitted", TraceLabel::FoldyLax));
    }
    Ok(())
}

fn sweep(cfg: &RunConfig, out: &mut Out) -> Result<(), CliError> {
    let mut spec = SweepSpec::new(
        "sweep",
        cfg.params,
        cfg.deltas.clone(),
        cfg.metric,
        cfg.reference,
    );
    spec.samples = cfg.samples;
    spec.capacity = cfg.capacity;
    spec.dense_limit = cfg.dense_limit;
    spec.resonance_constant = cfg.resonance_constant;
    let result = convergence_sweep(&spec)?;
    out.write("sweep.csv", &result.to_table().to_csv())?;
    out.write(
        "sweep_fit.csv",
        &fits_table(std::slice::from_ref(&result)).to_csv(),
    )?;
    let fit = &result.fit;
    out.say(format!(
        "slope = {}, predicted = {}, R^2 = {}, verdict = {}",
        fmt_g12(fit.slope),
        fit.predicted.map(fmt_g12).unwrap_or_else(|| "NA".into()),
        fmt_g12(fit.r_squared),
        fit.verdict
    ));
    Ok(())
}

fn tables(out: &mut Out) -> Result<(), CliError> {
    let t1 = reproduce_table1()?;
    let t2 = reproduce_table2()?;
    out.write("table1.csv", &table1_csv(&t1).to_csv())?;
    out.write("table2.csv", &table2_csv(&t2).to_csv())?;
    for (k, r) in t1.iter().enumerate() {
        out.say(format!("table 1 row {}: {}", k + 1, r.status()));
    }
    for (k, r) in t2.iter().enumerate() {
        out.say(format!(
            "table 2 row {}: {}",
            k + 1,
            if r.matches() { "match" } else { "mismatch" }
        ));
    }
    if !tables_reproduced(&t1, &t2) {
        return Err(CliError::Mismatch(
            "table 1 rows 1-4 or table 2 not reproduced".into(),
        ));
    }
    Ok(())
}

fn suite(out: &mut Out) -> Result<(), CliError> {
    let report = run_default_suite(out.dir)?;
    out.outcome.files.extend(report.files.iter().cloned());
    for c in &report.checks {
        out.say(format!(
            "{} {}: {} (requires {})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            fmt_g12(c.value),
            c.requirement
        ));
    }
    for s in &report.sweeps {
        out.say(format!(
            "sweep {}: slope {} verdict {}",
            s.name,
            fmt_g12(s.fit.slope),
            s.fit.verdict
        ));
    }
    if !report.required_passed() {
        return Err(CliError::Mismatch("required suite checks failed".into()));
    }
    Ok(())
}
