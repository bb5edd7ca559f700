//! Side-by-side traces of every solver on one grid.

use num_complex::Complex64;

use super::emit::{fmt_g12, Table};
use crate::effective::{classify, EffectiveSolution, RegimeClass, DEFAULT_RESONANCE_CONSTANT};
use crate::error::{Error, Result};
use crate::foldy_lax::{FoldyLaxSolution, FoldyLaxSystem, Prefactor, DEFAULT_CAPACITY};
use crate::model::{build_profile, RegimeParams, SpacingRule, StepProfile};
use crate::oracle::ExactSolution;
use crate::quadrature::GaussLegendre;
use crate::trace::{FieldTrace, TraceLabel};

/// Default largest `N` solved by dense LU; larger systems use the `O(N)`
/// structured route.
pub const DEFAULT_DENSE_LIMIT: usize = 1500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    /// Largest `N` for which a Foldy–Lax trace is produced.
    pub capacity: usize,
    /// Largest `N` solved densely (with a condition estimate).
    pub dense_limit: usize,
    pub n_cap: Option<usize>,
    pub resonance_constant: f64,
    pub prefactor: Prefactor,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            capacity: DEFAULT_CAPACITY,
            dense_limit: DEFAULT_DENSE_LIMIT,
            n_cap: None,
            resonance_constant: DEFAULT_RESONANCE_CONSTANT,
            prefactor: Prefactor::Kernel,
        }
    }
}

/// Solves the Foldy–Lax system for `profile`: dense up to `dense_limit`,
/// structured above, capacity error beyond `capacity`.
pub fn solve_foldy_lax(
    profile: &StepProfile,
    params: &RegimeParams,
    capacity: usize,
    dense_limit: usize,
) -> Result<FoldyLaxSolution> {
    let n = profile.len();
    if n > capacity {
        return Err(Error::Capacity {
            requested: n,
            limit: capacity,
        });
    }
    if n <= dense_limit {
        FoldyLaxSystem::assemble_with_capacity(profile, params, capacity)?.solve()
    } else {
        FoldyLaxSystem::matrix_free(profile, params)?.solve_structured()
    }
}

/// Sup-norm distance between two traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDifference {
    pub a: TraceLabel,
    pub b: TraceLabel,
    pub sup: f64,
}

#[derive(Debug, Clone)]
pub struct TraceComparison {
    pub incident: FieldTrace,
    pub oracle: FieldTrace,
    pub foldy_lax: Option<FieldTrace>,
    pub effective: FieldTrace,
    pub differences: Vec<PairDifference>,
    pub n_steps: usize,
    pub truncated: bool,
    pub residual: Option<f64>,
    /// Estimate of `‖Ā^{-1}‖₂`, dense route only.
    pub condition: Option<f64>,
    /// `Σ_j ‖E‖_{L²(I_j)} / (δ^{1/2} N)` for the exact field.
    pub norm_ratio: f64,
    pub class: RegimeClass,
    pub warnings: Vec<String>,
}

impl TraceComparison {
    pub fn traces(&self) -> Vec<&FieldTrace> {
        let mut out = vec![&self.incident, &self.oracle];
        if let Some(fl) = &self.foldy_lax {
            out.push(fl);
        }
        out.push(&self.effective);
        out
    }

    pub fn difference(&self, a: TraceLabel, b: TraceLabel) -> Option<f64> {
        self.differences
            .iter()
            .find(|d| (d.a == a && d.b == b) || (d.a == b && d.b == a))
            .map(|d| d.sup)
    }

    /// `quantity,value` summary of the comparison.
    pub fn summary(&self) -> Table {
        let mut t = Table::new(["quantity", "value"]);
        t.push(["n_steps".to_string(), self.n_steps.to_string()]);
        t.push(["truncated".to_string(), self.truncated.to_string()]);
        t.push(["regime".to_string(), self.class.kind.as_str().to_string()]);
        t.push([
            "behavior".to_string(),
            self.class.behavior.as_str().to_string(),
        ]);
        t.push([
            "lambdaT_over_pi".to_string(),
            fmt_g12(self.class.lambda_t / std::f64::consts::PI),
        ]);
        t.push(["resonance_n".to_string(), self.class.n.to_string()]);
        for d in &self.differences {
            t.push([format!("sup_{}_vs_{}", d.a, d.b), fmt_g12(d.sup)]);
        }
        let opt = |v: Option<f64>| v.map(fmt_g12).unwrap_or_else(|| "NA".into());
        t.push(["residual".to_string(), opt(self.residual)]);
        t.push(["inverse_norm_estimate".to_string(), opt(self.condition)]);
        t.push(["norm_ratio".to_string(), fmt_g12(self.norm_ratio)]);
        for w in &self.warnings {
            t.push(["warning".to_string(), w.replace(',', ";")]);
        }
        t
    }
}

/// `Σ_j ‖E‖_{L²(I_j)} / (δ^{1/2} N)` with a 4-point Gauss rule per step.
pub fn norm_ratio(profile: &StepProfile, exact: &ExactSolution) -> f64 {
    let rule = GaussLegendre::new(4);
    let sum: f64 = profile
        .intervals()
        .map(|(a, b)| {
            rule.integrate(a, b, |t| exact.field_at(t).norm_sqr())
                .sqrt()
        })
        .sum();
    sum / (profile.delta().sqrt() * profile.len() as f64)
}

/// Incident, oracle, Foldy–Lax and effective traces of `params` on `grid`.
///
/// A Foldy–Lax system over capacity is skipped with a warning; the other
/// traces are still produced.
pub fn trace_compare(
    params: &RegimeParams,
    grid: &[f64],
    options: &CompareOptions,
) -> Result<TraceComparison> {
    let kappa = params.wavenumber();
    let profile = build_profile(params, SpacingRule::Uniform, options.n_cap)?;
    let mut warnings = Vec::new();
    if profile.truncated() {
        warnings.push(format!("profile truncated to {} steps", profile.len()));
    }

    let incident = FieldTrace::incident(grid, kappa)?;
    let exact = ExactSolution::from_profile(&profile, kappa)?;
    let oracle = exact.trace(grid)?;
    let effective = EffectiveSolution::from_params(params)?.trace(grid)?;

    let (foldy_lax, residual, condition) =
        match solve_foldy_lax(&profile, params, options.capacity, options.dense_limit) {
            Ok(sol) => {
                if sol.condition_estimate().is_none() {
                    warnings.push(format!(
                        "N = {} above dense limit {}; structured solve, no condition estimate",
                        profile.len(),
                        options.dense_limit
                    ));
                }
                let tr = sol.trace_with(grid, options.prefactor)?;
                (Some(tr), Some(sol.residual()), sol.condition_estimate())
            }
            Err(Error::Capacity { requested, limit }) => {
                warnings.push(format!(
                    "foldy_lax omitted: N = {requested} exceeds capacity {limit}"
                ));
                (None, None, None)
            }
            Err(e) => return Err(e),
        };

    let mut named: Vec<&FieldTrace> = vec![&incident, &oracle];
    if let Some(fl) = &foldy_lax {
        named.push(fl);
    }
    named.push(&effective);
    let mut differences = Vec::new();
    for i in 0..named.len() {
        for j in i + 1..named.len() {
            differences.push(PairDifference {
                a: named[i].label(),
                b: named[j].label(),
                sup: named[i].sup_distance(named[j])?,
            });
        }
    }

    Ok(TraceComparison {
        norm_ratio: norm_ratio(&profile, &exact),
        n_steps: profile.len(),
        truncated: profile.truncated(),
        class: classify(params, options.resonance_constant),
        incident,
        oracle,
        foldy_lax,
        effective,
        differences,
        residual,
        condition,
        warnings,
    })
}

/// Largest pointwise modulus of `values` minus the incident wave.
pub fn scattered_sup(trace: &FieldTrace, kappa: f64) -> f64 {
    trace
        .grid()
        .iter()
        .zip(trace.values())
        .map(|(&t, v)| (v - Complex64::cis(kappa * t)).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::uniform_grid;

    #[test]
    fn zero_amplitude_traces_coincide() {
        let p = RegimeParams::new(10.0, 1e-3, 0.1, 0.1, 0.0, 1.0).unwrap();
        let grid = uniform_grid(-5.0, 15.0, 400).unwrap();
        let cmp = trace_compare(&p, &grid, &CompareOptions::default()).unwrap();
        assert!(cmp.foldy_lax.is_some());
        assert_eq!(cmp.differences.len(), 6);
        for d in &cmp.differences {
            assert!(d.sup < 1e-12, "{d:?}");
        }
    }

    #[test]
    fn capacity_skips_foldy_lax_only() {
        let p = RegimeParams::new(10.0, 1e-3, 0.1, 0.1, 1.0, 1.0).unwrap();
        let grid = uniform_grid(-5.0, 15.0, 50).unwrap();
        let opts = CompareOptions {
            capacity: 5,
            ..CompareOptions::default()
        };
        let cmp = trace_compare(&p, &grid, &opts).unwrap();
        assert!(cmp.foldy_lax.is_none());
        assert_eq!(cmp.differences.len(), 3);
        assert!(cmp.warnings.iter().any(|w| w.contains("capacity")));
    }

    #[test]
    fn transparent_row_stays_near_incident() {
        let p = RegimeParams::new(10.0, 1e-3, 0.1, 0.1, 1.0, 1.0).unwrap();
        let grid = uniform_grid(-5.0, 15.0, 400).unwrap();
        let cmp = trace_compare(&p, &grid, &CompareOptions::default()).unwrap();
        assert!(
            cmp.difference(TraceLabel::Effective, TraceLabel::Incident)
                .unwrap()
                < 0.05
        );
        assert!(
            cmp.difference(TraceLabel::FoldyLax, TraceLabel::Oracle)
                .unwrap()
                < 1e-7
        );
        assert!(cmp.condition.unwrap() < 10.0);
        assert!(cmp.norm_ratio < 10.0 && cmp.norm_ratio > 0.5);
    }

    #[test]
    fn structured_route_above_dense_limit() {
        let p = RegimeParams::new(10.0, 1e-3, 0.1, 0.1, 1.0, 1.0).unwrap();
        let grid = uniform_grid(-5.0, 15.0, 100).unwrap();
        let dense = trace_compare(&p, &grid, &CompareOptions::default()).unwrap();
        let opts = CompareOptions {
            dense_limit: 4,
            ..CompareOptions::default()
        };
        let structured = trace_compare(&p, &grid, &opts).unwrap();
        assert!(structured.condition.is_none());
        let d = dense
            .foldy_lax
            .unwrap()
            .sup_distance(structured.foldy_lax.as_ref().unwrap())
            .unwrap();
        assert!(d < 1e-12, "{d}");
    }
}
