//! Exact solver for `E'' + (κ² + ω_p²(t)) E = 0` with a piecewise-constant
//! coefficient.
//!
//! The state `(E, E')` is carried across each constant piece by a real 2×2
//! propagator with unit determinant. Scattering data are fixed by
//! `E = e^{iκt} + R e^{-iκt}` for `t <= 0` and `E = τ e^{iκt}` for `t >= T`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::StepProfile;
use crate::trace::{validate_grid, FieldTrace, TraceLabel};

/// Largest state modulus tolerated by the backward sweep.
const STATE_LIMIT: f64 = 1e150;

/// Real 2×2 map of `(E, E')` between two times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl TransferMatrix {
    pub const IDENTITY: Self = Self {
        m11: 1.0,
        m12: 0.0,
        m21: 0.0,
        m22: 1.0,
    };

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Product `later · self`: first `self`, then `later`.
    #[must_use]
    pub fn then(&self, later: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: later.m11 * self.m11 + later.m12 * self.m21,
            m12: later.m11 * self.m12 + later.m12 * self.m22,
            m21: later.m21 * self.m11 + later.m22 * self.m21,
            m22: later.m21 * self.m12 + later.m22 * self.m22,
        }
    }

    pub fn apply(&self, state: [Complex64; 2]) -> [Complex64; 2] {
        [
            state[0] * self.m11 + state[1] * self.m12,
            state[0] * self.m21 + state[1] * self.m22,
        ]
    }

    /// Inverse of a unit-determinant matrix.
    #[must_use]
    pub fn inverse(&self) -> TransferMatrix {
        TransferMatrix {
            m11: self.m22,
            m12: -self.m12,
            m21: -self.m21,
            m22: self.m11,
        }
    }

    pub fn max_entry(&self) -> f64 {
        self.m11
            .abs()
            .max(self.m12.abs())
            .max(self.m21.abs())
            .max(self.m22.abs())
    }
}

/// Propagator across one constant-coefficient piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PieceTransferMatrix {
    pub matrix: TransferMatrix,
    /// Local wavenumber `sqrt(κ² + q)`.
    pub mu: f64,
    pub duration: f64,
}

/// Propagator for `E'' + coefficient·E = 0` over `dt`.
///
/// `coefficient` is the full `κ² + q`; the caller adds `κ²`.
pub fn piece_propagator(coefficient: f64, dt: f64) -> PieceTransferMatrix {
    debug_assert!(coefficient >= 0.0 && dt >= 0.0);
    let mu = coefficient.sqrt();
    let (s, c) = (mu * dt).sin_cos();
    let sinc_term = if mu == 0.0 { dt } else { s / mu };
    PieceTransferMatrix {
        matrix: TransferMatrix {
            m11: c,
            m12: sinc_term,
            m21: -mu * s,
            m22: c,
        },
        mu,
        duration: dt,
    }
}

/// One constant-amplitude slab `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slab {
    pub start: f64,
    pub end: f64,
    pub amplitude: f64,
}

/// Piecewise-constant squared plasma frequency on `[0, T]`, zero between
/// slabs and outside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    t_final: f64,
    slabs: Vec<Slab>,
}

impl Medium {
    pub fn new(t_final: f64, slabs: Vec<Slab>) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::param(
                "T",
                format!("must be finite and > 0, got {t_final}"),
            ));
        }
        let mut cursor = 0.0;
        for s in &slabs {
            if !(s.start >= cursor && s.end > s.start && s.end <= t_final) {
                return Err(Error::Profile(format!(
                    "slab [{}, {}] is out of order or outside [0, {t_final}]",
                    s.start, s.end
                )));
            }
            if !(s.amplitude >= 0.0 && s.amplitude.is_finite()) {
                return Err(Error::Profile(format!(
                    "slab amplitude {} must be >= 0",
                    s.amplitude
                )));
            }
            cursor = s.end;
        }
        Ok(Self { t_final, slabs })
    }

    /// A single slab filling the whole window `[0, T]`.
    pub fn slab(t_final: f64, amplitude: f64) -> Result<Self> {
        Self::new(
            t_final,
            vec![Slab {
                start: 0.0,
                end: t_final,
                amplitude,
            }],
        )
    }

    /// Free propagation over `[0, T]`.
    pub fn empty(t_final: f64) -> Result<Self> {
        Self::new(t_final, Vec::new())
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn slabs(&self) -> &[Slab] {
        &self.slabs
    }

    /// Constant pieces `(start, end, q)` covering `[0, T]`, gaps included.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let mut cursor = 0.0;
        let mut out = Vec::with_capacity(2 * self.slabs.len() + 1);
        for s in &self.slabs {
            if s.start > cursor {
                out.push((cursor, s.start, 0.0));
            }
            out.push((s.start, s.end, s.amplitude));
            cursor = s.end;
        }
        if self.t_final > cursor {
            out.push((cursor, self.t_final, 0.0));
        }
        out.into_iter()
    }
}

impl From<&StepProfile> for Medium {
    fn from(profile: &StepProfile) -> Self {
        let amplitude = profile.amplitude();
        Medium {
            t_final: profile.t_final(),
            slabs: profile
                .intervals()
                .map(|(start, end)| Slab {
                    start,
                    end,
                    amplitude,
                })
                .collect(),
        }
    }
}

/// Reflection and transmission coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoeffs {
    /// Multiplies `e^{-iκt}` below all steps.
    pub r: Complex64,
    /// Multiplies `e^{iκt}` above all steps.
    pub tau: Complex64,
}

impl ScatteringCoeffs {
    /// `|R|² + |τ|²`, equal to one for real potentials.
    pub fn flux(&self) -> f64 {
        self.r.norm_sqr() + self.tau.norm_sqr()
    }
}

/// Carries the purely transmitted state `E = e^{iκt}` from `T` back to `0`
/// and returns it together with the state at every piece start, in time
/// order. Backward propagation keeps `(R, τ)` free of cancellation even when
/// the layout localizes the field and `τ` is tiny.
fn backward_sweep(medium: &Medium, kappa: f64) -> Result<([Complex64; 2], Vec<[Complex64; 2]>)> {
    let k2 = kappa * kappa;
    let pieces: Vec<_> = medium.pieces().collect();
    let out = Complex64::cis(kappa * medium.t_final());
    let mut state = [out, Complex64::i() * kappa * out];
    let mut starts = vec![[Complex64::default(); 2]; pieces.len()];
    for (k, &(a, b, q)) in pieces.iter().enumerate().rev() {
        state = piece_propagator(k2 + q, b - a)
            .matrix
            .inverse()
            .apply(state);
        if !(state[0].norm().max(state[1].norm()) < STATE_LIMIT) {
            return Err(Error::Numerical(format!(
                "field growth exceeded {STATE_LIMIT:e} at t = {a}"
            )));
        }
        starts[k] = state;
    }
    Ok((state, starts))
}

/// `(R, τ)` from the state at `t = 0` of the solution normalized to `τ = 1`.
fn coefficients_at_origin(state: [Complex64; 2], kappa: f64) -> ScatteringCoeffs {
    // E = A e^{iκt} + B e^{-iκt}; the Wronskian gives |A|² = 1 + |B|² >= 1.
    let ratio = state[1] / Complex64::new(0.0, kappa);
    let a = 0.5 * (state[0] + ratio);
    let b = 0.5 * (state[0] - ratio);
    ScatteringCoeffs {
        r: b / a,
        tau: a.inv(),
    }
}

/// Reflection and transmission coefficients of `medium` at wavenumber `kappa`.
pub fn solve_scattering(medium: &Medium, kappa: f64) -> Result<ScatteringCoeffs> {
    let (origin, _) = backward_sweep(medium, kappa)?;
    Ok(coefficients_at_origin(origin, kappa))
}

/// Exact field of a medium, with the state cached at every piece start for
/// evaluation anywhere on the line.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    kappa: f64,
    t_final: f64,
    coeffs: ScatteringCoeffs,
    starts: Vec<f64>,
    coefficients: Vec<f64>,
    states: Vec<[Complex64; 2]>,
}

impl ExactSolution {
    pub fn new(medium: &Medium, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::param(
                "kappa",
                format!("must be finite and > 0, got {kappa}"),
            ));
        }
        let (origin, unscaled) = backward_sweep(medium, kappa)?;
        let coeffs = coefficients_at_origin(origin, kappa);
        let k2 = kappa * kappa;
        let (starts, coefficients) = medium.pieces().map(|(a, _, q)| (a, k2 + q)).unzip();
        let states = unscaled
            .into_iter()
            .map(|[e, de]| [coeffs.tau * e, coeffs.tau * de])
            .collect();
        Ok(Self {
            kappa,
            t_final: medium.t_final(),
            coeffs,
            starts,
            coefficients,
            states,
        })
    }

    pub fn from_profile(profile: &StepProfile, kappa: f64) -> Result<Self> {
        Self::new(&Medium::from(profile), kappa)
    }

    pub fn coeffs(&self) -> ScatteringCoeffs {
        self.coeffs
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `(E(t), E'(t))`.
    pub fn state_at(&self, t: f64) -> [Complex64; 2] {
        let k = self.kappa;
        let i = Complex64::i();
        if t <= 0.0 {
            let fwd = Complex64::cis(k * t);
            let bwd = self.coeffs.r * Complex64::cis(-k * t);
            return [fwd + bwd, i * k * (fwd - bwd)];
        }
        if t >= self.t_final {
            let out = self.coeffs.tau * Complex64::cis(k * t);
            return [out, i * k * out];
        }
        let idx = self.starts.partition_point(|&s| s <= t).saturating_sub(1);
        let dt = t - self.starts[idx];
        piece_propagator(self.coefficients[idx], dt)
            .matrix
            .apply(self.states[idx])
    }

    pub fn field_at(&self, t: f64) -> Complex64 {
        self.state_at(t)[0]
    }

    pub fn derivative_at(&self, t: f64) -> Complex64 {
        self.state_at(t)[1]
    }

    pub fn trace(&self, grid: &[f64]) -> Result<FieldTrace> {
        validate_grid(grid)?;
        FieldTrace::from_fn(grid, TraceLabel::Oracle, |t| self.field_at(t))
    }
}

/// Exact field of a step profile on `grid`.
pub fn trace(profile: &StepProfile, kappa: f64, grid: &[f64]) -> Result<FieldTrace> {
    validate_grid(grid)?;
    ExactSolution::from_profile(profile, kappa)?.trace(grid)
}
