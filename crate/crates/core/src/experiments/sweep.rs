//! δ-convergence sweeps and log-log slope fits.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use super::compare::{solve_foldy_lax, DEFAULT_DENSE_LIMIT};
use super::emit::{fmt_g12, Table};
use crate::effective::{
    classify, lambda_of, EffectiveSolution, RegimeKind, Resonance, DEFAULT_RESONANCE_CONSTANT,
};
use crate::error::{Error, Result};
use crate::foldy_lax::DEFAULT_CAPACITY;
use crate::model::{build_profile, RegimeParams, SpacingRule};
use crate::oracle::ExactSolution;
use crate::trace::uniform_grid;

/// Error measured at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Sup-norm of the Foldy–Lax field minus the reference on a uniform grid
    /// over `[-T/2, 3T/2]`.
    SupNorm,
    /// `|C2|` of the effective slab.
    AbsC2,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::SupNorm => "sup-norm",
            Metric::AbsC2 => "abs-c2",
        }
    }
}

/// Reference field for [`Metric::SupNorm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Oracle,
    Effective,
}

impl Reference {
    pub fn as_str(self) -> &'static str {
        match self {
            Reference::Oracle => "oracle",
            Reference::Effective => "effective",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Errors at or below this are treated as exact.
pub const ERROR_FLOOR: f64 = 1e-12;
/// Allowed growth between consecutive points before a sequence counts as
/// non-monotone.
pub const MONOTONE_SLACK: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub base: RegimeParams,
    /// Strictly decreasing step widths, at least three.
    pub deltas: Vec<f64>,
    pub metric: Metric,
    pub reference: Reference,
    pub samples: usize,
    pub tolerance: f64,
    pub min_r_squared: f64,
    /// Overrides [`predicted_slope`] when set.
    pub predicted: Option<f64>,
    pub capacity: usize,
    pub dense_limit: usize,
    pub resonance_constant: f64,
}

impl SweepSpec {
    pub fn new(
        name: &str,
        base: RegimeParams,
        deltas: Vec<f64>,
        metric: Metric,
        reference: Reference,
    ) -> Self {
        Self {
            name: name.to_string(),
            base,
            deltas,
            metric,
            reference,
            samples: 400,
            tolerance: 0.3,
            min_r_squared: 0.9,
            predicted: None,
            capacity: DEFAULT_CAPACITY,
            dense_limit: DEFAULT_DENSE_LIMIT,
            resonance_constant: DEFAULT_RESONANCE_CONSTANT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.deltas.len() < 3 {
            return Err(Error::param(
                "deltas",
                format!("need at least 3 values, got {}", self.deltas.len()),
            ));
        }
        if self.deltas.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::param("deltas", "values must be strictly decreasing"));
        }
        if self.metric == Metric::SupNorm && self.samples < 2 {
            return Err(Error::param("samples", "need at least 2 grid points"));
        }
        for &d in &self.deltas {
            self.base.with_delta(d)?;
        }
        Ok(())
    }
}

/// Predicted slope of log error against log δ.
///
/// * `|C2|` with `1 - h - l > 0`: `1 - h - l`.
/// * Foldy–Lax against the oracle: `(3 - h - l) / 2`.
/// * Foldy–Lax against the effective field: `min((1 - h + 2l)/2, 1 - h)` when
///   `1 - h - l >= 0`, `2 - 2h - l` near resonance, `(3 - 3h - l)/2` off it.
pub fn predicted_slope(
    params: &RegimeParams,
    metric: Metric,
    reference: Reference,
    c: f64,
) -> Option<f64> {
    let (h, l) = (params.h(), params.l());
    let e = params.contrast_sign_exponent();
    match (metric, reference) {
        (Metric::AbsC2, _) => (e > 0.0).then_some(e),
        (Metric::SupNorm, Reference::Oracle) => Some((3.0 - h - l) / 2.0),
        (Metric::SupNorm, Reference::Effective) => {
            if e >= 0.0 {
                Some(((1.0 - h + 2.0 * l) / 2.0).min(1.0 - h))
            } else if classify(params, c).resonance == Resonance::Near {
                Some(2.0 - 2.0 * h - l)
            } else {
                Some((3.0 - 3.0 * h - l) / 2.0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub predicted: Option<f64>,
    pub tolerance: f64,
    pub min_r_squared: f64,
    /// No error exceeds its predecessor by more than [`MONOTONE_SLACK`].
    pub monotone: bool,
    pub verdict: Verdict,
}

/// Least-squares fit of `log error = slope·log δ + intercept`.
///
/// Verdict: pass when every error is at the floor; inconclusive when the
/// sequence is non-monotone, `R²` is below `min_r_squared`, or no slope is
/// predicted; otherwise pass iff `|slope - predicted| <= tolerance`.
pub fn fit_slope(
    deltas: &[f64],
    errors: &[f64],
    predicted: Option<f64>,
    tolerance: f64,
    min_r_squared: f64,
) -> SlopeFit {
    assert_eq!(deltas.len(), errors.len());
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors
        .iter()
        .map(|e| e.max(f64::MIN_POSITIVE).ln())
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        1.0
    };
    let monotone = errors
        .windows(2)
        .all(|w| w[1] <= ERROR_FLOOR || w[1] <= (1.0 + MONOTONE_SLACK) * w[0]);

    let verdict = if errors.iter().all(|&e| e <= ERROR_FLOOR) {
        Verdict::Pass
    } else if !monotone || r_squared < min_r_squared {
        Verdict::Inconclusive
    } else {
        match predicted {
            None => Verdict::Inconclusive,
            Some(p) if (slope - p).abs() <= tolerance => Verdict::Pass,
            Some(_) => Verdict::Fail,
        }
    };
    SlopeFit {
        slope,
        intercept,
        r_squared,
        predicted,
        tolerance,
        min_r_squared,
        monotone,
        verdict,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub delta: f64,
    pub n_steps: Option<usize>,
    pub error: f64,
    pub residual: Option<f64>,
    pub condition: Option<f64>,
    pub lambda_t_over_pi: f64,
    pub regime: RegimeKind,
    pub resonance: Resonance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub name: String,
    pub metric: Metric,
    pub reference: Reference,
    pub points: Vec<SweepPoint>,
    pub fit: SlopeFit,
}

impl SweepResult {
    pub fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.error).collect()
    }

    /// `delta,n_steps,error,residual,inverse_norm_estimate,lambdaT_over_pi,regime,resonance`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "delta",
            "n_steps",
            "error",
            "residual",
            "inverse_norm_estimate",
            "lambdaT_over_pi",
            "regime",
            "resonance",
        ]);
        let opt = |v: Option<f64>| v.map(fmt_g12).unwrap_or_else(|| "NA".into());
        for p in &self.points {
            t.push([
                fmt_g12(p.delta),
                p.n_steps
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| "NA".into()),
                fmt_g12(p.error),
                opt(p.residual),
                opt(p.condition),
                fmt_g12(p.lambda_t_over_pi),
                p.regime.as_str().to_string(),
                match p.resonance {
                    Resonance::Near => "near",
                    Resonance::Off => "off",
                }
                .to_string(),
            ]);
        }
        t
    }
}

/// `name,metric,reference,points,predicted,slope,intercept,r_squared,monotone,verdict`.
pub fn fits_table(results: &[SweepResult]) -> Table {
    let mut t = Table::new([
        "name",
        "metric",
        "reference",
        "points",
        "predicted",
        "slope",
        "intercept",
        "r_squared",
        "monotone",
        "verdict",
    ]);
    for r in results {
        t.push([
            r.name.clone(),
            r.metric.as_str().to_string(),
            r.reference.as_str().to_string(),
            r.points.len().to_string(),
            r.fit.predicted.map(fmt_g12).unwrap_or_else(|| "NA".into()),
            fmt_g12(r.fit.slope),
            fmt_g12(r.fit.intercept),
            fmt_g12(r.fit.r_squared),
            r.fit.monotone.to_string(),
            r.fit.verdict.to_string(),
        ]);
    }
    t
}

fn sweep_point(spec: &SweepSpec, delta: f64) -> Result<SweepPoint> {
    let params = spec.base.with_delta(delta)?;
    let class = classify(&params, spec.resonance_constant);
    let mut point = SweepPoint {
        delta,
        n_steps: None,
        error: 0.0,
        residual: None,
        condition: None,
        lambda_t_over_pi: class.lambda_t / PI,
        regime: class.kind,
        resonance: class.resonance,
    };
    match spec.metric {
        Metric::AbsC2 => {
            point.error = EffectiveSolution::from_params(&params)?
                .coefficients()
                .c2
                .norm();
        }
        Metric::SupNorm => {
            let t = params.t_final();
            let grid = uniform_grid(-0.5 * t, 1.5 * t, spec.samples)?;
            let profile = build_profile(&params, SpacingRule::Uniform, None)?;
            let sol = solve_foldy_lax(&profile, &params, spec.capacity, spec.dense_limit)?;
            let fl = sol.trace(&grid)?;
            let reference = match spec.reference {
                Reference::Oracle => {
                    ExactSolution::from_profile(&profile, params.wavenumber())?.trace(&grid)?
                }
                Reference::Effective => EffectiveSolution::from_params(&params)?.trace(&grid)?,
            };
            point.n_steps = Some(profile.len());
            point.error = fl.sup_distance(&reference)?;
            point.residual = Some(sol.residual());
            point.condition = sol.condition_estimate();
        }
    }
    Ok(point)
}

/// Runs every point of `spec` (in parallel, merged in input order) and fits
/// the slope.
pub fn convergence_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let points = spec
        .deltas
        .par_iter()
        .map(|&d| sweep_point(spec, d))
        .collect::<Result<Vec<_>>>()?;
    let deltas: Vec<f64> = points.iter().map(|p| p.delta).collect();
    let errors: Vec<f64> = points.iter().map(|p| p.error).collect();
    let first = spec.base.with_delta(spec.deltas[0])?;
    let predicted = spec
        .predicted
        .or_else(|| predicted_slope(&first, spec.metric, spec.reference, spec.resonance_constant));
    Ok(SweepResult {
        name: spec.name.clone(),
        metric: spec.metric,
        reference: spec.reference,
        fit: fit_slope(
            &deltas,
            &errors,
            predicted,
            spec.tolerance,
            spec.min_r_squared,
        ),
        points,
    })
}

/// Step width at which the uniform layout holds exactly `n_steps` steps,
/// with the trailing gap just above the spacing: `T / δ^l = n + 1 + 1e-6`.
///
/// Pinning the layout this way removes the jitter that the trailing gap
/// otherwise adds to sup-norm errors.
pub fn delta_for_step_count(params: &RegimeParams, n_steps: usize) -> Result<f64> {
    if n_steps == 0 {
        return Err(Error::param("n_steps", "must be >= 1"));
    }
    let spacing = params.t_final() / (n_steps as f64 + 1.0 + 1e-6);
    let delta = spacing.powf(1.0 / params.l());
    params.with_delta(delta)?;
    Ok(delta)
}

/// Step width at which the effective slab has wavenumber `lambda`:
/// `δ = ((λ² - κ²) / C)^{-1/α}`. Needs `α != 0` and `C > 0`.
pub fn delta_for_lambda(params: &RegimeParams, lambda: f64) -> Result<f64> {
    let k = params.wavenumber();
    let alpha = params.alpha();
    if alpha.abs() < 1e-12 {
        return Err(Error::param("alpha", "λ does not depend on δ when α = 0"));
    }
    if !(params.c() > 0.0) {
        return Err(Error::param("C", "λ does not depend on δ when C = 0"));
    }
    if !(lambda > k) {
        return Err(Error::param(
            "lambda",
            format!("must exceed κ = {k}, got {lambda}"),
        ));
    }
    let delta = ((lambda * lambda - k * k) / params.c()).powf(-1.0 / alpha);
    params.with_delta(delta)?;
    Ok(delta)
}

/// Moves `params` to the nearest `δ` where `λT = (n + ½)π`, with
/// `n = floor(λT/π)` at the original `δ`: the point furthest from resonance.
pub fn off_resonance_params(params: &RegimeParams) -> Result<RegimeParams> {
    let t = params.t_final();
    let n = (lambda_of(params) * t / PI).floor();
    params.with_delta(delta_for_lambda(params, (n + 0.5) * PI / t)?)
}

/// Moves `params` to the `δ` where `λT = nπ` with `n` the nearest integer.
pub fn resonance_params(params: &RegimeParams) -> Result<RegimeParams> {
    let t = params.t_final();
    let n = (lambda_of(params) * t / PI).round().max(1.0);
    params.with_delta(delta_for_lambda(params, n * PI / t)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_fits() {
        let deltas = [1e-2, 1e-3, 1e-4];
        let errors: Vec<f64> = deltas.iter().map(|d: &f64| 3.0 * d.powf(0.8)).collect();
        let fit = fit_slope(&deltas, &errors, Some(0.8), 0.3, 0.9);
        assert!((fit.slope - 0.8).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.verdict, Verdict::Pass);
        assert_eq!(
            fit_slope(&deltas, &errors, Some(1.5), 0.3, 0.9).verdict,
            Verdict::Fail
        );
        assert_eq!(
            fit_slope(&deltas, &errors, None, 0.3, 0.9).verdict,
            Verdict::Inconclusive
        );
    }

    #[test]
    fn growth_is_inconclusive() {
        let fit = fit_slope(
            &[1e-2, 1e-3, 1e-4],
            &[1e-3, 1e-2, 1e-4],
            Some(0.5),
            0.3,
            0.9,
        );
        assert!(!fit.monotone);
        assert_eq!(fit.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn floor_passes() {
        let fit = fit_slope(&[1e-2, 1e-3, 1e-4], &[0.0, 1e-16, 0.0], Some(0.5), 0.3, 0.9);
        assert_eq!(fit.verdict, Verdict::Pass);
    }

    #[test]
    fn spec_validation() {
        let p = RegimeParams::new(10.0, 1e-2, 0.1, 0.1, 1.0, 1.0).unwrap();
        let short = SweepSpec::new(
            "x",
            p,
            vec![1e-2, 1e-3],
            Metric::AbsC2,
            Reference::Effective,
        );
        assert!(short.validate().is_err());
        let up = SweepSpec::new(
            "x",
            p,
            vec![1e-3, 1e-2, 1e-4],
            Metric::AbsC2,
            Reference::Effective,
        );
        assert!(up.validate().is_err());
    }

    #[test]
    fn transparent_c2_slope() {
        let p = RegimeParams::new(10.0, 1e-2, 0.1, 0.1, 1.0, 1.0).unwrap();
        let spec = SweepSpec::new(
            "c2",
            p,
            vec![1e-2, 1e-3, 1e-4],
            Metric::AbsC2,
            Reference::Effective,
        );
        let r = convergence_sweep(&spec).unwrap();
        assert!((r.fit.slope - 0.8).abs() < 0.1, "{:?}", r.fit);
        assert_eq!(r.fit.verdict, Verdict::Pass);
    }

    #[test]
    fn zero_amplitude_sweep_passes_trivially() {
        let p = RegimeParams::new(10.0, 4e-3, 0.1, 0.1, 0.0, 1.0).unwrap();
        let spec = SweepSpec::new(
            "c0",
            p,
            vec![4e-3, 2e-3, 1e-3],
            Metric::SupNorm,
            Reference::Oracle,
        );
        let r = convergence_sweep(&spec).unwrap();
        assert!(r.errors().iter().all(|&e| e <= ERROR_FLOOR));
        assert_eq!(r.fit.verdict, Verdict::Pass);
    }

    #[test]
    fn step_count_tuning() {
        let p = RegimeParams::new(10.0, 1e-2, 0.3, 0.8, 1.0, 1.0).unwrap();
        for n in [20, 40, 160] {
            let d = delta_for_step_count(&p, n).unwrap();
            let profile =
                build_profile(&p.with_delta(d).unwrap(), SpacingRule::Uniform, None).unwrap();
            assert_eq!(profile.len(), n);
        }
    }

    #[test]
    fn lambda_tuning_hits_targets() {
        let p = RegimeParams::new(10.0, 1e-7, 0.538, 0.9, 1.0, 1.0).unwrap();
        let wall = off_resonance_params(&p).unwrap();
        let c = classify(&wall, 1.0);
        assert!(c.n == 108 || c.n == 109, "{}", c.n);
        assert!((c.offset.abs() - 0.5 * PI).abs() < 1e-6);
        assert_eq!(c.kind, RegimeKind::OffResonance);

        let well = resonance_params(&p).unwrap();
        assert!(classify(&well, 1.0).offset.abs() < 1e-6);

        let flat = RegimeParams::new(10.0, 1e-3, 0.1, 0.9, 1.0, 1.0).unwrap();
        assert!(delta_for_lambda(&flat, 2.0).is_err());
    }
}
