//! Regime parameters, step profiles and the plane-wave scalar reduction.
//!
//! A profile is `N` closed intervals `I_j = [T_j - δ/2, T_j + δ/2]` inside
//! `(0, T)` on which the squared plasma frequency equals `C·δ^{-h}`; it is
//! zero elsewhere. Step spacing scales as `δ^l`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar parameters of a step-modulated medium and the quantities derived
/// from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    t_final: f64,
    delta: f64,
    h: f64,
    l: f64,
    c: f64,
    kappa: f64,
    background: f64,
    alpha: f64,
    amplitude: f64,
    effective_amplitude: f64,
    beta: Complex64,
}

impl RegimeParams {
    /// Validates and builds a parameter set with zero background.
    ///
    /// `t_final` is the window `T`, `c` the amplitude constant `C` and
    /// `kappa` the background wavenumber.
    pub fn new(t_final: f64, delta: f64, h: f64, l: f64, c: f64, kappa: f64) -> Result<Self> {
        Self::with_background(t_final, delta, h, l, c, kappa, 0.0)
    }

    /// Like [`RegimeParams::new`], with a constant squared plasma frequency
    /// `background` outside the steps. Every solver then propagates with
    /// the shifted wavenumber `sqrt(κ² + background)`.
    pub fn with_background(
        t_final: f64,
        delta: f64,
        h: f64,
        l: f64,
        c: f64,
        kappa: f64,
        background: f64,
    ) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::param(
                "T",
                format!("must be finite and > 0, got {t_final}"),
            ));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(
                "delta",
                format!("must lie in (0, 1), got {delta}"),
            ));
        }
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::param("h", format!("must lie in (0, 1], got {h}")));
        }
        if !(l > 0.0 && l <= 1.0) {
            return Err(Error::param("l", format!("must lie in (0, 1], got {l}")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::param(
                "C",
                format!("must be finite and >= 0, got {c}"),
            ));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::param(
                "kappa",
                format!("must be finite and > 0, got {kappa}"),
            ));
        }
        if !(background.is_finite() && background >= 0.0) {
            return Err(Error::param(
                "background",
                format!("must be finite and >= 0, got {background}"),
            ));
        }

        let alpha = -1.0 + h + l;
        let wavenumber = (kappa * kappa + background).sqrt();
        Ok(Self {
            t_final,
            delta,
            h,
            l,
            c,
            kappa,
            background,
            alpha,
            amplitude: c * delta.powf(-h),
            effective_amplitude: c * delta.powf(-alpha),
            beta: Complex64::new(0.0, c * delta.powf(1.0 - h) / (2.0 * wavenumber)),
        })
    }

    /// Same parameters with a different step width.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::with_background(
            self.t_final,
            delta,
            self.h,
            self.l,
            self.c,
            self.kappa,
            self.background,
        )
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Background wavenumber as given, before any background shift.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    /// Wavenumber used by the solvers: `sqrt(κ² + background)`.
    pub fn wavenumber(&self) -> f64 {
        (self.kappa * self.kappa + self.background).sqrt()
    }

    /// Effective contrast exponent `α = -1 + h + l`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// In-step squared plasma frequency `C·δ^{-h}`.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Amplitude of the equivalent slab on `[0, T]`: `C·δ^{-α}`.
    pub fn effective_amplitude(&self) -> f64 {
        self.effective_amplitude
    }

    /// Coupling scalar `β = i·C·δ^{1-h} / (2κ)` of the Foldy–Lax matrix.
    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Default step spacing `δ^l`.
    pub fn spacing(&self) -> f64 {
        self.delta.powf(self.l)
    }

    /// `1 - h - l`, with values within 1e-12 of zero snapped to zero.
    pub fn contrast_sign_exponent(&self) -> f64 {
        let v = 1.0 - self.h - self.l;
        if v.abs() < 1e-12 {
            0.0
        } else {
            v
        }
    }
}

/// How step centers are laid out inside the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpacingRule {
    /// `T_j = j·δ^l`.
    #[default]
    Uniform,
}

/// Realized layout of the step intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct StepProfile {
    centers: Vec<f64>,
    half_width: f64,
    amplitude: f64,
    t_final: f64,
    min_gap: f64,
    truncated: bool,
}

impl StepProfile {
    /// Builds a profile from explicit centers, checking that the intervals
    /// sit inside `(0, T)` and do not overlap.
    pub fn from_centers(
        centers: Vec<f64>,
        delta: f64,
        amplitude: f64,
        t_final: f64,
    ) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::Profile("no step centers".into()));
        }
        if !(delta > 0.0) || !(amplitude >= 0.0) || !(t_final > 0.0) {
            return Err(Error::Profile(format!(
                "need delta > 0, amplitude >= 0, T > 0 (got {delta}, {amplitude}, {t_final})"
            )));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::Profile("non-finite center".into()));
        }
        let half_width = 0.5 * delta;
        let first = centers[0];
        let last = centers[centers.len() - 1];
        if first - half_width <= 0.0 || last + half_width >= t_final {
            return Err(Error::Profile(format!(
                "steps [{}, {}] must lie strictly inside (0, {t_final})",
                first - half_width,
                last + half_width
            )));
        }

        let mut min_gap = first;
        for w in centers.windows(2) {
            let gap = w[1] - w[0];
            if gap <= 0.0 {
                return Err(Error::Profile("centers must be strictly increasing".into()));
            }
            min_gap = min_gap.min(gap);
        }
        min_gap = min_gap.min(t_final - last);
        // Touching steps (d = δ) are allowed; tolerate rounding in j·d.
        if min_gap < delta * (1.0 - 1e-12) {
            return Err(Error::Profile(format!(
                "minimum gap {min_gap} is smaller than the step width {delta}"
            )));
        }

        Ok(Self {
            centers,
            half_width,
            amplitude,
            t_final,
            min_gap,
            truncated: false,
        })
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn delta(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Minimum of `T_{i+1} - T_i` over `0 <= i <= N`, with `T_0 = 0` and
    /// `T_{N+1} = T`.
    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    /// Whether `n_cap` cut the layout short.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Closed step intervals in increasing order.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let hw = self.half_width;
        self.centers.iter().map(move |&c| (c - hw, c + hw))
    }

    /// Squared plasma frequency at `t`: the step amplitude on any closed
    /// interval, zero elsewhere.
    pub fn omega_p_squared(&self, t: f64) -> f64 {
        let hw = self.half_width;
        let idx = self.centers.partition_point(|&c| c + hw < t);
        match self.centers.get(idx) {
            Some(&c) if c - hw <= t => self.amplitude,
            _ => 0.0,
        }
    }

    /// Total time covered by steps, `N·δ`.
    pub fn coverage(&self) -> f64 {
        self.len() as f64 * self.delta()
    }
}

/// Lays out the steps for `params`.
///
/// Centers are `T_j = j·d` with `d = δ^l`; `N` is the largest count with
/// `(N + 1)·d < T`, so the trailing gap `T - T_N` also respects `d`.
/// With `n_cap`, longer layouts keep only their first `n_cap` steps and are
/// flagged as truncated.
pub fn build_profile(
    params: &RegimeParams,
    rule: SpacingRule,
    n_cap: Option<usize>,
) -> Result<StepProfile> {
    let SpacingRule::Uniform = rule;
    let delta = params.delta();
    let t_final = params.t_final();
    let d = params.spacing();
    if d < delta {
        return Err(Error::Profile(format!(
            "spacing {d} is smaller than the step width {delta}; steps would overlap"
        )));
    }

    let mut n = (t_final / d).floor() as i64 - 1;
    while n >= 0 && (n + 1) as f64 * d >= t_final {
        n -= 1;
    }
    while (n + 2) as f64 * d < t_final {
        n += 1;
    }
    if n <= 0 {
        return Err(Error::Profile(format!(
            "window T = {t_final} holds no step of width {delta} at spacing {d}"
        )));
    }

    let mut count = n as usize;
    let mut truncated = false;
    if let Some(cap) = n_cap {
        if cap == 0 {
            return Err(Error::param("n_cap", "must be >= 1"));
        }
        if count > cap {
            count = cap;
            truncated = true;
        }
    }

    let centers = (1..=count).map(|j| j as f64 * d).collect();
    let mut profile = StepProfile::from_centers(centers, delta, params.amplitude(), t_final)?;
    profile.truncated = truncated;
    Ok(profile)
}

/// Wave vector, background constants and polarization of a guided plane wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVectorSetup {
    pub k: [f64; 3],
    pub eps0: f64,
    pub mu0: f64,
    pub k_perp: [f64; 3],
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Projects the vector wave equation onto `k_perp` and returns the scalar
/// wavenumber `κ = |k| / sqrt(ε₀ μ₀)`.
pub fn scalar_reduction(setup: &WaveVectorSetup) -> Result<f64> {
    const TOL: f64 = 1e-12;
    if !(setup.eps0 > 0.0 && setup.mu0 > 0.0) {
        return Err(Error::param("eps0/mu0", "must both be > 0"));
    }
    let k_norm = dot(setup.k, setup.k).sqrt();
    if !(k_norm > 0.0 && k_norm.is_finite()) {
        return Err(Error::param("k", "must be a finite non-zero vector"));
    }
    let perp_norm = dot(setup.k_perp, setup.k_perp).sqrt();
    if (perp_norm - 1.0).abs() > TOL {
        return Err(Error::param(
            "k_perp",
            format!("must be a unit vector, |k_perp| = {perp_norm}"),
        ));
    }
    let cross = dot(setup.k_perp, setup.k) / k_norm;
    if cross.abs() > TOL {
        return Err(Error::param(
            "k_perp",
            format!("must be orthogonal to k, cos = {cross:e}"),
        ));
    }
    Ok(k_norm * (1.0 / (setup.eps0 * setup.mu0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(t: f64, delta: f64, h: f64, l: f64) -> RegimeParams {
        RegimeParams::new(t, delta, h, l, 1.0, 1.0).unwrap()
    }

    #[test]
    fn scalar_reduction_examples() {
        let unit = WaveVectorSetup {
            k: [1.0, 0.0, 0.0],
            eps0: 1.0,
            mu0: 1.0,
            k_perp: [0.0, 1.0, 0.0],
        };
        assert_eq!(scalar_reduction(&unit).unwrap(), 1.0);

        let pyth = WaveVectorSetup {
            k: [3.0, 4.0, 0.0],
            k_perp: [0.0, 0.0, 1.0],
            ..unit
        };
        assert!((scalar_reduction(&pyth).unwrap() - 5.0).abs() < 1e-15);

        let slow = WaveVectorSetup { eps0: 4.0, ..unit };
        assert!((scalar_reduction(&slow).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scalar_reduction_rejects_bad_polarization() {
        let base = WaveVectorSetup {
            k: [1.0, 0.0, 0.0],
            eps0: 1.0,
            mu0: 1.0,
            k_perp: [0.0, 1.0, 0.0],
        };
        let tilted = WaveVectorSetup {
            k_perp: [0.6, 0.8, 0.0],
            ..base
        };
        assert!(scalar_reduction(&tilted).is_err());
        let long = WaveVectorSetup {
            k_perp: [0.0, 2.0, 0.0],
            ..base
        };
        assert!(scalar_reduction(&long).is_err());
    }

    #[test]
    fn profile_counts_match_enumeration() {
        // Brute-force: count j >= 1 with (j + 1)·d < T.
        fn enumerate(t: f64, d: f64) -> usize {
            (1..).take_while(|&j| (j as f64 + 1.0) * d < t).count()
        }

        let p = build_profile(&params(10.0, 0.05, 0.5, 0.5), SpacingRule::Uniform, None).unwrap();
        assert!((p.min_gap() - 0.223_606_797_749_979).abs() < 1e-12);
        assert_eq!(p.len(), 43);
        assert_eq!(p.len(), enumerate(10.0, 0.05f64.powf(0.5)));

        let p = build_profile(&params(10.0, 1e-3, 0.1, 0.1), SpacingRule::Uniform, None).unwrap();
        assert!((p.centers()[0] - 0.501_187).abs() < 1e-6);
        assert_eq!(p.len(), 18);
        assert_eq!(p.len(), enumerate(10.0, 1e-3f64.powf(0.1)));
    }

    #[test]
    fn degenerate_window_is_rejected() {
        let err = build_profile(&params(1.0, 0.5, 0.5, 1.0), SpacingRule::Uniform, None);
        assert!(matches!(err, Err(Error::Profile(_))));
    }

    #[test]
    fn n_cap_truncates_and_flags() {
        let p = params(10.0, 1e-3, 0.1, 0.1);
        let full = build_profile(&p, SpacingRule::Uniform, None).unwrap();
        assert!(!full.truncated());
        let capped = build_profile(&p, SpacingRule::Uniform, Some(5)).unwrap();
        assert_eq!(capped.len(), 5);
        assert!(capped.truncated());
        assert_eq!(capped.centers(), &full.centers()[..5]);
        let loose = build_profile(&p, SpacingRule::Uniform, Some(100)).unwrap();
        assert!(!loose.truncated());
    }

    #[test]
    fn omega_p_squared_table2_values() {
        let row1 = params(10.0, 1e-3, 0.1, 0.1);
        let p = build_profile(&row1, SpacingRule::Uniform, None).unwrap();
        let t1 = p.centers()[0];
        assert!((p.omega_p_squared(t1) - 1.9953).abs() < 5e-5);

        let row3 = params(10.0, 1e-3, 0.342, 0.9);
        let p = build_profile(&row3, SpacingRule::Uniform, None).unwrap();
        assert!((p.omega_p_squared(p.centers()[0]) - 10.6170).abs() < 5e-5);
        assert_eq!(p.omega_p_squared(-1.0), 0.0);
    }

    #[test]
    fn omega_p_squared_boundaries_are_closed() {
        let p = StepProfile::from_centers(vec![1.0, 2.0], 0.5, 3.0, 4.0).unwrap();
        assert_eq!(p.omega_p_squared(0.75), 3.0);
        assert_eq!(p.omega_p_squared(1.25), 3.0);
        assert_eq!(p.omega_p_squared(1.5), 0.0);
        assert_eq!(p.omega_p_squared(2.25), 3.0);
        assert_eq!(p.omega_p_squared(2.2500001), 0.0);
    }

    #[test]
    fn from_centers_rejects_bad_layouts() {
        assert!(StepProfile::from_centers(vec![], 0.1, 1.0, 1.0).is_err());
        assert!(StepProfile::from_centers(vec![0.04], 0.1, 1.0, 1.0).is_err());
        assert!(StepProfile::from_centers(vec![0.5, 0.55], 0.1, 1.0, 1.0).is_err());
        assert!(StepProfile::from_centers(vec![0.5, 0.4], 0.1, 1.0, 1.0).is_err());
        assert!(StepProfile::from_centers(vec![0.97], 0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn parameter_ranges_are_enforced() {
        assert!(RegimeParams::new(10.0, 1e-3, 1.5, 0.1, 1.0, 1.0).is_err());
        assert!(RegimeParams::new(10.0, 1e-3, 0.1, 0.0, 1.0, 1.0).is_err());
        assert!(RegimeParams::new(10.0, 1.0, 0.1, 0.1, 1.0, 1.0).is_err());
        assert!(RegimeParams::new(0.0, 1e-3, 0.1, 0.1, 1.0, 1.0).is_err());
        assert!(RegimeParams::new(10.0, 1e-3, 0.1, 0.1, 1.0, 0.0).is_err());
        assert!(RegimeParams::new(10.0, 1e-3, 0.1, 0.1, -1.0, 1.0).is_err());
        assert!(RegimeParams::new(10.0, 1e-3, 1.0, 1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn derived_quantities() {
        let p = RegimeParams::new(10.0, 1e-2, 0.5, 0.3, 1.0, 1.0).unwrap();
        assert!((p.beta() - Complex64::new(0.0, 0.05)).norm() < 1e-15);
        assert!((p.alpha() - (-0.2)).abs() < 1e-15);

        let shifted = RegimeParams::with_background(10.0, 1e-2, 0.5, 0.3, 1.0, 1.0, 3.0).unwrap();
        assert!((shifted.wavenumber() - 2.0).abs() < 1e-15);
        assert!((shifted.beta().im - 0.025).abs() < 1e-15);
    }

    #[test]
    fn zero_contrast_exponent_is_snapped() {
        let p = RegimeParams::new(10.0, 1e-3, 0.1, 0.9, 1.0, 1.0).unwrap();
        assert_eq!(p.contrast_sign_exponent(), 0.0);
        assert!(p.effective_amplitude() > 0.999_999 && p.effective_amplitude() < 1.000_001);
    }
}
