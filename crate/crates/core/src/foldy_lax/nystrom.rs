//! Nyström discretization of the Lippmann–Schwinger equation restricted to
//! the steps, with Gauss–Legendre collocation inside every interval.

use num_complex::Complex64;
use rayon::prelude::*;

use super::Kernel;
use crate::error::{Error, Result};
use crate::linalg::{norm2, ComplexMatrix, LuFactorization};
use crate::model::{RegimeParams, StepProfile};
use crate::quadrature::GaussLegendre;
use crate::trace::{validate_grid, FieldTrace, TraceLabel};

#[derive(Debug, Clone)]
pub struct NystromSolution {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<Complex64>,
    kappa: f64,
    amplitude: f64,
    residual: f64,
}

impl NystromSolution {
    /// Solves `E(t_a) - Cδ^{-h} Σ_b w_b Φ(t_a, t_b) E(t_b) = e^{iκt_a}` on
    /// `nodes_per_step` Gauss–Legendre nodes per step.
    pub fn solve(
        profile: &StepProfile,
        params: &RegimeParams,
        nodes_per_step: usize,
        capacity: usize,
    ) -> Result<Self> {
        if nodes_per_step == 0 {
            return Err(Error::param("nodes_per_step", "must be >= 1"));
        }
        if profile.is_empty() {
            return Err(Error::Empty("step profile"));
        }
        let unknowns = profile.len() * nodes_per_step;
        if unknowns > capacity {
            return Err(Error::Capacity {
                requested: unknowns,
                limit: capacity,
            });
        }

        let rule = GaussLegendre::new(nodes_per_step);
        let mut nodes = Vec::with_capacity(unknowns);
        let mut weights = Vec::with_capacity(unknowns);
        for (a, b) in profile.intervals() {
            for (x, w) in rule.mapped(a, b) {
                nodes.push(x);
                weights.push(w);
            }
        }

        let kappa = params.wavenumber();
        let kernel = Kernel { kappa };
        let amplitude = profile.amplitude();
        let n = unknowns;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
            for (b, entry) in row.iter_mut().enumerate() {
                let coupling = kernel.phi(nodes[a], nodes[b]) * (amplitude * weights[b]);
                *entry = if a == b {
                    Complex64::new(1.0, 0.0) - coupling
                } else {
                    -coupling
                };
            }
        });
        let matrix = ComplexMatrix::from_rows(n, data)?;
        let rhs: Vec<Complex64> = nodes.iter().map(|&t| Complex64::cis(kappa * t)).collect();
        let lu = LuFactorization::new(matrix.clone())?;
        let values = lu.solve(&rhs);
        let r: Vec<Complex64> = matrix
            .matvec(&values)
            .iter()
            .zip(&rhs)
            .map(|(x, y)| x - y)
            .collect();
        let residual = norm2(&r) / norm2(&rhs);
        if !(residual < super::RESIDUAL_TOLERANCE) {
            return Err(Error::Numerical(format!(
                "Nystrom residual {residual:e} exceeds {:e}",
                super::RESIDUAL_TOLERANCE
            )));
        }
        Ok(Self {
            nodes,
            weights,
            values,
            kappa,
            amplitude,
            residual,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Field values at the collocation nodes.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Nyström interpolant `e^{iκt} + Cδ^{-h} Σ_b w_b Φ(t, t_b) E_b`.
    pub fn field_at(&self, t: f64) -> Complex64 {
        let kernel = Kernel { kappa: self.kappa };
        let sum: Complex64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((&s, &w), e)| kernel.phi(t, s) * e * w)
            .sum();
        Complex64::cis(self.kappa * t) + sum * self.amplitude
    }

    pub fn trace(&self, grid: &[f64]) -> Result<FieldTrace> {
        validate_grid(grid)?;
        let values = grid.par_iter().map(|&t| self.field_at(t)).collect();
        FieldTrace::new(grid.to_vec(), values, TraceLabel::Nystrom)
    }
}

/// Nyström field on `grid` with `nodes_per_step` collocation nodes per step.
pub fn nystrom_solve(
    profile: &StepProfile,
    params: &RegimeParams,
    nodes_per_step: usize,
    grid: &[f64],
    capacity: usize,
) -> Result<FieldTrace> {
    validate_grid(grid)?;
    NystromSolution::solve(profile, params, nodes_per_step, capacity)?.trace(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foldy_lax::{FoldyLaxSystem, DEFAULT_CAPACITY};
    use crate::model::{build_profile, SpacingRule};
    use crate::oracle::ExactSolution;
    use crate::trace::uniform_grid;

    #[test]
    fn midpoint_rule_reproduces_foldy_lax_matrix() {
        let p = RegimeParams::new(10.0, 1e-3, 0.1, 0.1, 1.0, 1.0).unwrap();
        let profile = build_profile(&p, SpacingRule::Uniform, None).unwrap();
        let ny = NystromSolution::solve(&profile, &p, 1, DEFAULT_CAPACITY).unwrap();
        for (x, c) in ny.nodes().iter().zip(profile.centers()) {
            assert!((x - c).abs() < 1e-15);
        }

        // With rhs δ E^{in} the Foldy–Lax charges are δ times the midpoint values.
        let sys = FoldyLaxSystem::assemble(&profile, &p).unwrap();
        let lu = LuFactorization::new(sys.matrix().unwrap().clone()).unwrap();
        let rhs: Vec<Complex64> = sys.incident().iter().map(|e| e * p.delta()).collect();
        let q = lu.solve(&rhs);
        for (qm, em) in q.iter().zip(ny.values()) {
            assert!((qm - em * p.delta()).norm() < 1e-12 * qm.norm());
        }
    }

    #[test]
    fn zero_amplitude_is_incident() {
        let p = RegimeParams::new(10.0, 1e-2, 0.5, 0.5, 0.0, 1.0).unwrap();
        let profile = build_profile(&p, SpacingRule::Uniform, None).unwrap();
        let grid = uniform_grid(-5.0, 15.0, 50).unwrap();
        let tr = nystrom_solve(&profile, &p, 3, &grid, DEFAULT_CAPACITY).unwrap();
        for (&t, v) in tr.grid().iter().zip(tr.values()) {
            assert_eq!(*v, Complex64::cis(t));
        }
    }

    #[test]
    fn capacity_counts_all_nodes() {
        let p = RegimeParams::new(10.0, 1e-3, 0.1, 0.1, 1.0, 1.0).unwrap();
        let profile = build_profile(&p, SpacingRule::Uniform, None).unwrap();
        assert!(matches!(
            NystromSolution::solve(&profile, &p, 4, 50),
            Err(Error::Capacity {
                requested: 72,
                limit: 50
            })
        ));
    }

    #[test]
    fn refinement_converges_to_oracle() {
        // Wide, strong steps so the midpoint error is far above round-off.
        let profile = StepProfile::from_centers(vec![1.0, 2.5, 4.0], 0.6, 4.0, 5.0).unwrap();
        let p = RegimeParams::new(5.0, 0.6, 0.5, 1.0, 4.0 * 0.6f64.sqrt(), 1.0).unwrap();
        assert!((p.amplitude() - 4.0).abs() < 1e-12);
        let grid = uniform_grid(-2.5, 7.5, 200).unwrap();
        let exact = ExactSolution::from_profile(&profile, 1.0)
            .unwrap()
            .trace(&grid)
            .unwrap();
        let mut previous = f64::INFINITY;
        for m in [1, 2, 4, 8, 16] {
            let tr = nystrom_solve(&profile, &p, m, &grid, DEFAULT_CAPACITY).unwrap();
            let err = tr.sup_distance(&exact).unwrap();
            assert!(err <= 0.5 * previous, "M={m}: {err} vs {previous}");
            previous = err;
        }
    }
}
