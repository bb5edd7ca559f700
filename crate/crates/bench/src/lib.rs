//! Shared fixtures for the solver benchmarks.

use num_complex::Complex64;
use tempwave_core::linalg::ComplexMatrix;
use tempwave_core::{build_profile, RegimeParams, SpacingRule, StepProfile};

/// Profile with `n` uniform steps at `δ = 1e-3`, `h = 0.1`, `l = 0.5`,
/// `κ = C = 1`; the window is sized so that exactly `n` steps fit.
pub fn profile_with_steps(n: usize) -> (RegimeParams, StepProfile) {
    let delta: f64 = 1e-3;
    let l = 0.5;
    let t_final = (n as f64 + 1.5) * delta.powf(l);
    let params = RegimeParams::new(t_final, delta, 0.1, l, 1.0, 1.0).expect("valid params");
    let profile = build_profile(&params, SpacingRule::Uniform, None).expect("valid profile");
    assert_eq!(profile.len(), n);
    (params, profile)
}

/// Diagonally dominant `n×n` complex matrix with deterministic entries.
pub fn dominant_matrix(n: usize) -> ComplexMatrix {
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let phase = ((i * 31 + j * 17) % 97) as f64 * 0.1;
            let z = Complex64::from_polar(1.0 / (1.0 + (i as f64 - j as f64).abs()), phase);
            data.push(if i == j { z + 2.0 * n as f64 } else { z });
        }
    }
    ComplexMatrix::from_rows(n, data).expect("square data")
}
