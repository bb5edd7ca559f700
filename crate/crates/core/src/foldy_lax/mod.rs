//! Foldy–Lax algebraic system for many short steps.
//!
//! Integrating the Lippmann–Schwinger equation over each step and freezing
//! the kernel at the step centers gives `Ā q̃ = d̃`, where `q̃_m` is the
//! integral of the total field over `I_m`, `d̃_m` the same integral of the
//! incident wave, and
//!
//! ```text
//! Ā_mm = 1 - β,    Ā_mj = -β e^{iκ|T_m - T_j|},    β = iCδ^{1-h} / (2κ).
//! ```
//!
//! The field is rebuilt as `E(t) = e^{iκt} + Cδ^{-h} Σ_m Φ(t, T_m) q̃_m` with
//! `Φ(t, s) = (i / 2κ) e^{iκ|t-s|}`.
//!
//! Two solve routes are provided. [`FoldyLaxSystem::solve`] factors the
//! dense matrix. [`FoldyLaxSystem::solve_structured`] uses the fact that the
//! same system describes point scatterers of strength `Cδ^{1-h}` at the
//! centers, whose exact field follows from `O(N)` transfer matrices.

mod nystrom;

pub use nystrom::{nystrom_solve, NystromSolution};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{norm2, ComplexMatrix, LuFactorization};
use crate::model::{RegimeParams, StepProfile};
use crate::oracle::{piece_propagator, TransferMatrix};
use crate::trace::{validate_grid, FieldTrace, TraceLabel};

/// Default limit on dense unknowns (`N`, or `N·M` for Nyström).
pub const DEFAULT_CAPACITY: usize = 6000;

/// Relative residual every solve must meet.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const POWER_ITERATIONS: usize = 20;
const POWER_STAGNATION: f64 = 1e-3;

/// 1D Helmholtz fundamental solution and its phase part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub kappa: f64,
}

impl Kernel {
    /// `Φ(t, s) = (i / 2κ) e^{iκ|t-s|}`.
    pub fn phi(&self, t: f64, s: f64) -> Complex64 {
        Complex64::new(0.0, 0.5 / self.kappa) * self.phi_tilde(t, s)
    }

    /// `Φ̃(t, s) = e^{iκ|t-s|}`.
    pub fn phi_tilde(&self, t: f64, s: f64) -> Complex64 {
        Complex64::cis(self.kappa * (t - s).abs())
    }
}

/// Prefactor on the scattered sum when rebuilding the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Prefactor {
    /// `Cδ^{-h}·i/(2κ)`, the full kernel.
    #[default]
    Kernel,
    /// `Cδ^{1-h}` applied to `Ā^{-1} E^{in}`, omitting `i/(2κ)`.
    /// Diagnostic only.
    AsPrinted,
}

/// Exact step integrals of the incident wave:
/// `d̃_m = (e^{iκ(T_m+δ/2)} - e^{iκ(T_m-δ/2)}) / (iκ) = δ e^{iκT_m} sinc(κδ/2)`.
pub fn assemble_rhs(profile: &StepProfile, kappa: f64) -> Vec<Complex64> {
    let weight = step_weight(kappa, profile.delta());
    profile
        .centers()
        .iter()
        .map(|&c| Complex64::cis(kappa * c) * weight)
        .collect()
}

/// `2 sin(κδ/2) / κ`, the common factor `δ·sinc(κδ/2)` of the rhs.
fn step_weight(kappa: f64, delta: f64) -> f64 {
    2.0 * (0.5 * kappa * delta).sin() / kappa
}

/// Dense `Ā` for the profile's centers. Rows are filled in parallel; every
/// entry is computed independently, so the result does not depend on the
/// thread count.
pub fn assemble_matrix(
    profile: &StepProfile,
    params: &RegimeParams,
    capacity: usize,
) -> Result<ComplexMatrix> {
    let n = profile.len();
    if n == 0 {
        return Err(Error::Empty("step profile"));
    }
    if n > capacity {
        return Err(Error::Capacity {
            requested: n,
            limit: capacity,
        });
    }
    let beta = params.beta();
    let kernel = Kernel {
        kappa: params.wavenumber(),
    };
    let centers = profile.centers();
    let diag = Complex64::new(1.0, 0.0) - beta;
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(m, row)| {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = if j == m {
                diag
            } else {
                -beta * kernel.phi_tilde(centers[m], centers[j])
            };
        }
    });
    ComplexMatrix::from_rows(n, data)
}

/// Assembled Foldy–Lax system.
#[derive(Debug, Clone)]
pub struct FoldyLaxSystem {
    matrix: Option<ComplexMatrix>,
    beta: Complex64,
    incident: Vec<Complex64>,
    rhs: Vec<Complex64>,
    centers: Vec<f64>,
    kappa: f64,
    amplitude: f64,
    delta: f64,
}

impl FoldyLaxSystem {
    /// Dense assembly with the default capacity.
    pub fn assemble(profile: &StepProfile, params: &RegimeParams) -> Result<Self> {
        Self::assemble_with_capacity(profile, params, DEFAULT_CAPACITY)
    }

    pub fn assemble_with_capacity(
        profile: &StepProfile,
        params: &RegimeParams,
        capacity: usize,
    ) -> Result<Self> {
        let matrix = assemble_matrix(profile, params, capacity)?;
        let mut system = Self::matrix_free(profile, params)?;
        system.matrix = Some(matrix);
        Ok(system)
    }

    /// System without the dense matrix; only the structured solve applies.
    pub fn matrix_free(profile: &StepProfile, params: &RegimeParams) -> Result<Self> {
        if profile.is_empty() {
            return Err(Error::Empty("step profile"));
        }
        let kappa = params.wavenumber();
        Ok(Self {
            matrix: None,
            beta: params.beta(),
            incident: profile
                .centers()
                .iter()
                .map(|&c| Complex64::cis(kappa * c))
                .collect(),
            rhs: assemble_rhs(profile, kappa),
            centers: profile.centers().to_vec(),
            kappa,
            amplitude: profile.amplitude(),
            delta: profile.delta(),
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn matrix(&self) -> Option<&ComplexMatrix> {
        self.matrix.as_ref()
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `E^{in} = (e^{iκT_1}, …, e^{iκT_N})`.
    pub fn incident(&self) -> &[Complex64] {
        &self.incident
    }

    /// `d̃`.
    pub fn rhs(&self) -> &[Complex64] {
        &self.rhs
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `Φ̃(T_m, T_j)`.
    pub fn kernel_value(&self, m: usize, j: usize) -> Complex64 {
        Kernel { kappa: self.kappa }.phi_tilde(self.centers[m], self.centers[j])
    }

    /// `Ā q` in `O(N)` from the separable form of `e^{iκ|T_m - T_j|}`.
    pub fn apply(&self, q: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        assert_eq!(q.len(), n);
        let k = self.kappa;
        // below[m] = Σ_{j<=m} e^{-iκT_j} q_j, above[m] = Σ_{j>m} e^{iκT_j} q_j
        let mut below = vec![Complex64::new(0.0, 0.0); n];
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            acc += Complex64::cis(-k * self.centers[m]) * q[m];
            below[m] = acc;
        }
        let mut above = vec![Complex64::new(0.0, 0.0); n];
        let mut acc = Complex64::new(0.0, 0.0);
        for m in (0..n).rev() {
            above[m] = acc;
            acc += Complex64::cis(k * self.centers[m]) * q[m];
        }
        (0..n)
            .map(|m| {
                let tm = self.centers[m];
                let coupled =
                    Complex64::cis(k * tm) * below[m] + Complex64::cis(-k * tm) * above[m];
                q[m] - self.beta * coupled
            })
            .collect()
    }

    fn relative_residual(&self, q: &[Complex64]) -> f64 {
        let aq = match &self.matrix {
            Some(m) => m.matvec(q),
            None => self.apply(q),
        };
        let r: Vec<Complex64> = aq.iter().zip(&self.rhs).map(|(a, b)| a - b).collect();
        norm2(&r) / norm2(&self.rhs)
    }

    fn finish(
        self,
        charges: Vec<Complex64>,
        lu: Option<LuFactorization>,
    ) -> Result<FoldyLaxSolution> {
        let residual = self.relative_residual(&charges);
        if !(residual < RESIDUAL_TOLERANCE) {
            return Err(Error::Numerical(format!(
                "Foldy-Lax residual {residual:e} exceeds {RESIDUAL_TOLERANCE:e}"
            )));
        }
        Ok(FoldyLaxSolution {
            system: self,
            lu,
            charges,
            residual,
        })
    }

    /// Dense LU with partial pivoting. Requires an assembled matrix.
    pub fn solve(self) -> Result<FoldyLaxSolution> {
        let matrix = self
            .matrix
            .clone()
            .ok_or_else(|| Error::Numerical("dense solve needs an assembled matrix".into()))?;
        let lu = LuFactorization::new(matrix)?;
        let charges = lu.solve(&self.rhs);
        self.finish(charges, Some(lu))
    }

    /// `O(N)` solve through the equivalent point-scatterer problem: the
    /// field `u` of scatterers of strength `Cδ^{1-h}` at the centers gives
    /// `q̃_m = δ·sinc(κδ/2)·u(T_m)`.
    pub fn solve_structured(self) -> Result<FoldyLaxSolution> {
        let values =
            point_scatterer_values(&self.centers, self.amplitude * self.delta, self.kappa)?;
        let weight = step_weight(self.kappa, self.delta);
        let charges = values.into_iter().map(|u| u * weight).collect();
        self.finish(charges, None)
    }
}

/// Field of point scatterers `E'' + κ²E + s Σ δ(t - T_m) E = 0` at the
/// centers, for incident `e^{iκt}` and outgoing conditions.
///
/// The transmitted wave is carried backward from the last center, so strong
/// scatterers with a tiny transmission cause no cancellation.
fn point_scatterer_values(centers: &[f64], strength: f64, kappa: f64) -> Result<Vec<Complex64>> {
    let k2 = kappa * kappa;
    let unkick = TransferMatrix {
        m11: 1.0,
        m12: 0.0,
        m21: strength,
        m22: 1.0,
    };
    let last = *centers.last().ok_or(Error::Empty("centers"))?;

    let out = Complex64::cis(kappa * last);
    let mut state = [out, Complex64::i() * kappa * out];
    let mut values = vec![Complex64::default(); centers.len()];
    for (m, &c) in centers.iter().enumerate().rev() {
        values[m] = state[0];
        state = unkick.apply(state);
        let previous = if m == 0 { 0.0 } else { centers[m - 1] };
        state = piece_propagator(k2, c - previous)
            .matrix
            .inverse()
            .apply(state);
        if !(state[0].norm().max(state[1].norm()) < 1e150) {
            return Err(Error::Numerical(
                "point-scatterer field growth overflowed".into(),
            ));
        }
    }

    // At t = 0 the field is A e^{iκt} + B e^{-iκt}; normalize A to one.
    let a = 0.5 * (state[0] + state[1] / Complex64::new(0.0, kappa));
    let scale = a.inv();
    Ok(values.into_iter().map(|u| u * scale).collect())
}

/// Solved system: charges, residual and (for the dense route) the factors.
#[derive(Debug, Clone)]
pub struct FoldyLaxSolution {
    system: FoldyLaxSystem,
    lu: Option<LuFactorization>,
    charges: Vec<Complex64>,
    residual: f64,
}

impl FoldyLaxSolution {
    pub fn system(&self) -> &FoldyLaxSystem {
        &self.system
    }

    /// `q̃`.
    pub fn charges(&self) -> &[Complex64] {
        &self.charges
    }

    /// `‖Ā q̃ - d̃‖₂ / ‖d̃‖₂`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Power-iteration estimate of `‖Ā^{-1}‖₂`; `None` for the structured
    /// route, which keeps no factorization.
    pub fn condition_estimate(&self) -> Option<f64> {
        self.lu
            .as_ref()
            .map(|lu| lu.inverse_norm_estimate(POWER_ITERATIONS, POWER_STAGNATION))
    }

    /// Total field with the kernel prefactor.
    pub fn field_at(&self, t: f64) -> Complex64 {
        self.field_at_with(t, Prefactor::Kernel)
    }

    pub fn field_at_with(&self, t: f64, prefactor: Prefactor) -> Complex64 {
        let s = &self.system;
        let kernel = Kernel { kappa: s.kappa };
        let sum: Complex64 = s
            .centers
            .iter()
            .zip(&self.charges)
            .map(|(&c, q)| kernel.phi_tilde(t, c) * q)
            .sum();
        let scattered = match prefactor {
            Prefactor::Kernel => Complex64::new(0.0, 0.5 * s.amplitude / s.kappa) * sum,
            // Ā^{-1} E^{in} = q̃ / (δ sinc(κδ/2)), since d̃ = δ sinc(κδ/2) E^{in}.
            Prefactor::AsPrinted => sum * (s.amplitude * s.delta / step_weight(s.kappa, s.delta)),
        };
        Complex64::cis(s.kappa * t) + scattered
    }

    pub fn trace(&self, grid: &[f64]) -> Result<FieldTrace> {
        self.trace_with(grid, Prefactor::Kernel)
    }

    pub fn trace_with(&self, grid: &[f64], prefactor: Prefactor) -> Result<FieldTrace> {
        validate_grid(grid)?;
        let values = grid
            .par_iter()
            .map(|&t| self.field_at_with(t, prefactor))
            .collect();
        FieldTrace::new(grid.to_vec(), values, TraceLabel::FoldyLax)
    }
}
