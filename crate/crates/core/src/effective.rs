//! Closed-form effective field of the equivalent slab on `[0, T]`.
//!
//! With `λ = sqrt(κ² + A)` for slab amplitude `A`, the field is
//!
//! ```text
//! t < 0:      e^{iκt} + C2 e^{-iκt}
//! 0 ≤ t ≤ T:  C3 e^{iλt} + C4 e^{-iλt}
//! t > T:      C5 e^{iκt}
//! ```
//!
//! Regime classification looks at how close `λT` is to a multiple of `π`
//! and at the sign of `1 - h - l`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::foldy_lax::Kernel;
use crate::model::RegimeParams;
use crate::quadrature::GaussLegendre;
use crate::trace::{validate_grid, FieldTrace, TraceLabel};

/// `C1..C6` of the piecewise field; `C1 = 1` and `C6 = 0` always.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
    pub c4: Complex64,
    pub c5: Complex64,
    pub c6: Complex64,
}

impl Coefficients {
    /// `|C2|² + |C5|²`.
    pub fn flux(&self) -> f64 {
        self.c2.norm_sqr() + self.c5.norm_sqr()
    }
}

/// `λ = sqrt(κ² + C·δ^{-α})`, using the solver wavenumber.
pub fn lambda_of(params: &RegimeParams) -> f64 {
    let k = params.wavenumber();
    (k * k + params.effective_amplitude()).sqrt()
}

/// Coefficients of the slab field for wavenumbers `lambda` inside and
/// `kappa` outside `[0, t_final]`.
pub fn coefficients(lambda: f64, kappa: f64, t_final: f64) -> Result<Coefficients> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::param(
            "kappa",
            format!("must be finite and > 0, got {kappa}"),
        ));
    }
    if !(lambda.is_finite() && lambda >= kappa * (1.0 - 1e-15)) {
        return Err(Error::param(
            "lambda",
            format!("must be finite and >= kappa, got {lambda}"),
        ));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::param(
            "T",
            format!("must be finite and > 0, got {t_final}"),
        ));
    }
    let lambda = lambda.max(kappa);
    let fwd = Complex64::cis(lambda * t_final);
    let bwd = fwd.conj();
    let sum = lambda + kappa;
    let diff = lambda - kappa;
    let d = bwd * (sum * sum) - fwd * (diff * diff);
    if !(d.norm() >= 1e-14) {
        return Err(Error::Numerical(format!(
            "coefficient denominator |D| = {:e}",
            d.norm()
        )));
    }
    Ok(Coefficients {
        c1: Complex64::new(1.0, 0.0),
        c2: (fwd - bwd) * (sum * diff) / d,
        c3: bwd * (2.0 * kappa * sum) / d,
        c4: fwd * (2.0 * kappa * diff) / d,
        c5: Complex64::cis(-kappa * t_final) * (4.0 * lambda * kappa) / d,
        c6: Complex64::new(0.0, 0.0),
    })
}

/// Effective field of a constant slab on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveSolution {
    lambda: f64,
    slab_amplitude: f64,
    kappa: f64,
    t_final: f64,
    coeffs: Coefficients,
}

impl EffectiveSolution {
    /// Slab of amplitude `slab_amplitude` on `[0, t_final]`.
    pub fn new(kappa: f64, slab_amplitude: f64, t_final: f64) -> Result<Self> {
        if !(slab_amplitude >= 0.0 && slab_amplitude.is_finite()) {
            return Err(Error::param(
                "slab_amplitude",
                format!("must be finite and >= 0, got {slab_amplitude}"),
            ));
        }
        let lambda = (kappa * kappa + slab_amplitude).sqrt();
        let coeffs = coefficients(lambda, kappa, t_final)?;
        Ok(Self {
            lambda,
            slab_amplitude,
            kappa,
            t_final,
            coeffs,
        })
    }

    /// Effective slab `C·δ^{-α}`.
    pub fn from_params(params: &RegimeParams) -> Result<Self> {
        Self::new(
            params.wavenumber(),
            params.effective_amplitude(),
            params.t_final(),
        )
    }

    /// Slab carrying the full step amplitude `C·δ^{-h}` on `[0, T]`.
    pub fn single_slab(params: &RegimeParams) -> Result<Self> {
        Self::new(params.wavenumber(), params.amplitude(), params.t_final())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn slab_amplitude(&self) -> f64 {
        self.slab_amplitude
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn field_at(&self, t: f64) -> Complex64 {
        let (k, l, c) = (self.kappa, self.lambda, &self.coeffs);
        if t < 0.0 {
            Complex64::cis(k * t) + c.c2 * Complex64::cis(-k * t)
        } else if t <= self.t_final {
            c.c3 * Complex64::cis(l * t) + c.c4 * Complex64::cis(-l * t)
        } else {
            c.c5 * Complex64::cis(k * t)
        }
    }

    pub fn derivative_at(&self, t: f64) -> Complex64 {
        let (k, l, c) = (self.kappa, self.lambda, &self.coeffs);
        let i = Complex64::i();
        if t < 0.0 {
            i * k * (Complex64::cis(k * t) - c.c2 * Complex64::cis(-k * t))
        } else if t <= self.t_final {
            i * l * (c.c3 * Complex64::cis(l * t) - c.c4 * Complex64::cis(-l * t))
        } else {
            i * k * c.c5 * Complex64::cis(k * t)
        }
    }

    /// Middle-branch formula evaluated at any `t`.
    pub fn interior_at(&self, t: f64) -> Complex64 {
        let c = &self.coeffs;
        c.c3 * Complex64::cis(self.lambda * t) + c.c4 * Complex64::cis(-self.lambda * t)
    }

    pub fn trace(&self, grid: &[f64]) -> Result<FieldTrace> {
        validate_grid(grid)?;
        FieldTrace::from_fn(grid, TraceLabel::Effective, |t| self.field_at(t))
    }
}

/// Coarse regime from the sign of `1 - h - l` and the resonance test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    TransparentLimit,
    NearResonance,
    OffResonance,
}

impl RegimeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeKind::TransparentLimit => "transparent-limit",
            RegimeKind::NearResonance => "near-resonance",
            RegimeKind::OffResonance => "off-resonance",
        }
    }
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resonance {
    Near,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// Expected physical behavior of the effective slab.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Behavior {
    /// `1 - h - l > 0`: the field stays close to the incident wave.
    Transparent,
    /// Near resonance with `1 - h - l <= 0`: full transmission.
    Well,
    /// Off resonance with `1 - h - l < 0`: full reflection.
    Wall,
    /// Off resonance with `1 - h - l = 0`: reflection and transmission both O(1).
    Moderate,
}

impl Behavior {
    pub fn as_str(self) -> &'static str {
        match self {
            Behavior::Transparent => "transparent",
            Behavior::Well => "well (full transmission)",
            Behavior::Wall => "wall (full reflection)",
            Behavior::Moderate => "moderate",
        }
    }
}

/// Result of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeClass {
    /// `TransparentLimit` iff `1 - h - l > 0`; otherwise the resonance test.
    pub kind: RegimeKind,
    /// Resonance test, reported in every regime.
    pub resonance: Resonance,
    /// Nearest integer to `λT / π`.
    pub n: u64,
    pub parity: Parity,
    /// Sign of `1 - h - l` as -1, 0 or 1.
    pub sign_1hl: i8,
    pub lambda_t: f64,
    /// `λT - nπ`.
    pub offset: f64,
    /// Threshold `c / n` of the resonance test; zero when `n = 0`, which is
    /// never near.
    pub threshold: f64,
    pub behavior: Behavior,
}

/// Default constant `c` in the resonance threshold `c / n`.
pub const DEFAULT_RESONANCE_CONSTANT: f64 = 1.0;

/// Classifies `params` with resonance threshold `c / n` radians.
pub fn classify(params: &RegimeParams, c: f64) -> RegimeClass {
    classify_lambda_t(
        lambda_of(params) * params.t_final(),
        params.contrast_sign_exponent(),
        c,
    )
}

/// Classification from `λT` and `1 - h - l` directly.
pub fn classify_lambda_t(lambda_t: f64, exponent: f64, c: f64) -> RegimeClass {
    let n = (lambda_t / PI).round().max(0.0);
    let offset = lambda_t - n * PI;
    let n = n as u64;
    let threshold = if n == 0 { 0.0 } else { c / n as f64 };
    let resonance = if n > 0 && offset.abs() <= threshold {
        Resonance::Near
    } else {
        Resonance::Off
    };
    let sign_1hl = if exponent > 0.0 {
        1
    } else if exponent < 0.0 {
        -1
    } else {
        0
    };
    let kind = match (sign_1hl, resonance) {
        (1, _) => RegimeKind::TransparentLimit,
        (_, Resonance::Near) => RegimeKind::NearResonance,
        (_, Resonance::Off) => RegimeKind::OffResonance,
    };
    let behavior = match (sign_1hl, resonance) {
        (1, _) => Behavior::Transparent,
        (_, Resonance::Near) => Behavior::Well,
        (0, Resonance::Off) => Behavior::Moderate,
        (_, Resonance::Off) => Behavior::Wall,
    };
    RegimeClass {
        kind,
        resonance,
        n,
        parity: if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        },
        sign_1hl,
        lambda_t,
        offset,
        threshold,
        behavior,
    }
}

/// Leading-order prediction for a coefficient modulus as `δ → 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Magnitude {
    /// `|C| → limit`, with correction `O(δ^rate)` when known.
    Tends { limit: f64, rate: Option<f64> },
    /// `|C| = O(δ^rate)`, or `o(1)` when `rate` is `None`.
    Vanishes { rate: Option<f64> },
    /// `O(1)`, no limit claimed.
    Bounded,
}

/// Predicted magnitudes of `C2..C5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticMagnitudes {
    pub c2: Magnitude,
    pub c3: Magnitude,
    pub c4: Magnitude,
    pub c5: Magnitude,
}

/// Leading orders of `|C2|..|C5|` for the regime of `params`.
pub fn asymptotic_magnitudes(params: &RegimeParams, c: f64) -> AsymptoticMagnitudes {
    let class = classify(params, c);
    let half_alpha = 0.5 * params.alpha();
    match (class.sign_1hl, class.resonance) {
        (1, _) => {
            let r = Some(1.0 - params.h() - params.l());
            AsymptoticMagnitudes {
                c2: Magnitude::Vanishes { rate: r },
                c3: Magnitude::Tends {
                    limit: 1.0,
                    rate: r,
                },
                c4: Magnitude::Vanishes { rate: r },
                c5: Magnitude::Tends {
                    limit: 1.0,
                    rate: r,
                },
            }
        }
        (0, Resonance::Near) => AsymptoticMagnitudes {
            c2: Magnitude::Vanishes { rate: None },
            c3: Magnitude::Tends {
                limit: 1.0,
                rate: None,
            },
            c4: Magnitude::Vanishes { rate: None },
            c5: Magnitude::Tends {
                limit: 1.0,
                rate: None,
            },
        },
        (0, Resonance::Off) => AsymptoticMagnitudes {
            c2: Magnitude::Bounded,
            c3: Magnitude::Bounded,
            c4: Magnitude::Bounded,
            c5: Magnitude::Bounded,
        },
        (_, Resonance::Near) => AsymptoticMagnitudes {
            c2: Magnitude::Vanishes { rate: None },
            c3: Magnitude::Tends {
                limit: 0.5,
                rate: Some(half_alpha),
            },
            c4: Magnitude::Tends {
                limit: 0.5,
                rate: Some(half_alpha),
            },
            c5: Magnitude::Tends {
                limit: 1.0,
                rate: None,
            },
        },
        (_, Resonance::Off) => AsymptoticMagnitudes {
            c2: Magnitude::Tends {
                limit: 1.0,
                rate: Some(half_alpha),
            },
            c3: Magnitude::Vanishes {
                rate: Some(half_alpha),
            },
            c4: Magnitude::Vanishes {
                rate: Some(half_alpha),
            },
            c5: Magnitude::Vanishes {
                rate: Some(half_alpha),
            },
        },
    }
}

/// Smallest `quad_points` accepted by [`integral_residual`] for `sol`:
/// 64, and at least 10 points per period of `λ` on `[0, T]`.
pub fn required_quad_points(sol: &EffectiveSolution) -> usize {
    let periods = sol.lambda * sol.t_final / (2.0 * PI);
    64usize.max((10.0 * periods).ceil() as usize)
}

const PANEL_ORDER: usize = 8;

/// `sup_t |E(t) - e^{iκt} - A ∫_0^T Φ(t, s) E(s) ds|` over a 201-point grid
/// on `[-T/2, 3T/2]`.
pub fn integral_residual(sol: &EffectiveSolution, quad_points: usize) -> Result<f64> {
    let t = sol.t_final;
    let grid: Vec<f64> = (0..=200)
        .map(|k| -0.5 * t + 2.0 * t * k as f64 / 200.0)
        .collect();
    integral_residual_on(sol, quad_points, &grid)
}

/// [`integral_residual`] on a caller-supplied grid.
///
/// The integral uses composite 8-point Gauss–Legendre panels, split at
/// `s = t` where the kernel has a kink.
pub fn integral_residual_on(
    sol: &EffectiveSolution,
    quad_points: usize,
    grid: &[f64],
) -> Result<f64> {
    validate_grid(grid)?;
    let required = required_quad_points(sol);
    if quad_points < required {
        return Err(Error::Resolution {
            points: quad_points,
            required,
        });
    }
    let rule = GaussLegendre::new(PANEL_ORDER);
    let panels = (quad_points / PANEL_ORDER).max(2);
    let big_t = sol.t_final;
    let kernel = Kernel { kappa: sol.kappa };
    let mut worst: f64 = 0.0;
    for &tp in grid {
        let integrand = |s: f64| kernel.phi(tp, s) * sol.interior_at(s);
        let integral = if tp > 0.0 && tp < big_t {
            let left = ((panels as f64 * tp / big_t).round() as usize).clamp(1, panels - 1);
            rule.integrate_composite(0.0, tp, left, integrand)
                + rule.integrate_composite(tp, big_t, panels - left, integrand)
        } else {
            rule.integrate_composite(0.0, big_t, panels, integrand)
        };
        let r = sol.field_at(tp) - Complex64::cis(sol.kappa * tp) - integral * sol.slab_amplitude;
        worst = worst.max(r.norm());
    }
    Ok(worst)
}
