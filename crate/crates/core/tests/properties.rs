use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempwave_core::effective::{classify_lambda_t, RegimeKind};
use tempwave_core::experiments::sweep::{fit_slope, Verdict, ERROR_FLOOR};
use tempwave_core::foldy_lax::Kernel;
use tempwave_core::oracle::{piece_propagator, Slab};
use tempwave_core::{
    build_profile, classify, coefficients, solve_scattering, uniform_grid, EffectiveSolution,
    ExactSolution, FoldyLaxSystem, Medium, RegimeParams, SpacingRule, StepProfile,
};

fn params() -> impl Strategy<Value = RegimeParams> {
    (
        2.0..20.0f64,
        1e-3..5e-2f64,
        0.05..=1.0f64,
        0.05..=1.0f64,
        0.0..5.0f64,
        0.3..5.0f64,
    )
        .prop_filter_map("valid parameters", |(t, d, h, l, c, k)| {
            RegimeParams::new(t, d, h, l, c, k).ok()
        })
}

/// Params whose uniform layout exists, with at most 200 steps kept.
fn layout() -> impl Strategy<Value = (RegimeParams, StepProfile)> {
    params().prop_filter_map("layout exists", |p| {
        build_profile(&p, SpacingRule::Uniform, Some(200))
            .ok()
            .map(|prof| (p, prof))
    })
}

/// Up to 50 disjoint slabs with amplitudes in [0, 100] on [0, T].
fn medium() -> impl Strategy<Value = Medium> {
    (1.0..20.0f64, 1..=50usize).prop_flat_map(|(t, n)| {
        (
            prop::collection::vec(0.0..1.0f64, 2 * n),
            prop::collection::vec(0.0..=100.0f64, n),
        )
            .prop_map(move |(mut cuts, amps)| {
                cuts.sort_by(f64::total_cmp);
                let slabs = cuts
                    .chunks(2)
                    .zip(amps)
                    .filter(|(c, _)| c[1] > c[0])
                    .map(|(c, amplitude)| Slab {
                        start: c[0] * t,
                        end: c[1] * t,
                        amplitude,
                    })
                    .collect();
                Medium::new(t, slabs).expect("sorted disjoint slabs")
            })
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

#[test]
fn propagator_determinant_over_a_million_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..1_000_000 {
        let q: f64 = rng.random_range(0.0..1e4);
        let dt: f64 = rng.random_range(0.0..10.0);
        worst = worst.max((piece_propagator(q, dt).matrix.det() - 1.0).abs());
    }
    assert!(worst < 1e-12, "{worst}");
}

proptest! {
    #[test]
    fn propagator_composes(q in 0.0..400.0f64, dt1 in 0.0..3.0f64, dt2 in 0.0..3.0f64) {
        let whole = piece_propagator(q, dt1 + dt2).matrix;
        let parts = piece_propagator(q, dt1)
            .matrix
            .then(&piece_propagator(q, dt2).matrix);
        let scale = 1.0 + whole.max_entry();
        for (a, b) in [
            (whole.m11, parts.m11),
            (whole.m12, parts.m12),
            (whole.m21, parts.m21),
            (whole.m22, parts.m22),
        ] {
            prop_assert!((a - b).abs() < 1e-12 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn oracle_conserves_flux(m in medium(), kappa in 0.5..5.0f64) {
        let c = solve_scattering(&m, kappa).unwrap();
        prop_assert!((c.flux() - 1.0).abs() < 1e-10, "{}", c.flux());
    }

    #[test]
    fn closed_form_conserves_flux(
        kappa in 0.1..10.0f64,
        excess in 0.0..100.0f64,
        t in 0.1..50.0f64,
    ) {
        let c = coefficients(kappa + excess, kappa, t).unwrap();
        prop_assert!((c.flux() - 1.0).abs() < 1e-12);
        prop_assert_eq!(c.c1, Complex64::new(1.0, 0.0));
        prop_assert_eq!(c.c6, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn oracle_matches_single_slab_closed_form(
        kappa in 0.5..5.0f64,
        t in 1.0..20.0f64,
        a in 0.0..100.0f64,
    ) {
        let sol = EffectiveSolution::new(kappa, a, t).unwrap();
        let o = solve_scattering(&Medium::slab(t, a).unwrap(), kappa).unwrap();
        let c = sol.coefficients();
        let err = ((o.r - c.c2).norm_sqr() + (o.tau - c.c5).norm_sqr()).sqrt();
        let scale = (c.c2.norm_sqr() + c.c5.norm_sqr()).sqrt();
        prop_assert!(err <= 1e-10 * scale, "{err}");
    }

    #[test]
    fn profile_is_two_valued_and_deterministic((p, prof) in layout()) {
        let again = build_profile(&p, SpacingRule::Uniform, Some(200)).unwrap();
        prop_assert_eq!(prof.centers(), again.centers());
        let n = prof.len() as f64;
        prop_assert!(n * prof.delta() <= p.t_final());
        prop_assert!(prof.coverage() / p.t_final() < 1.0);
        let a = p.amplitude();
        for t in uniform_grid(-1.0, p.t_final() + 1.0, 997).unwrap() {
            let w = prof.omega_p_squared(t);
            prop_assert!(w == 0.0 || w == a, "{w} at {t}");
        }
        for (lo, hi) in prof.intervals() {
            prop_assert!(lo > 0.0 && hi < p.t_final());
            prop_assert_eq!(prof.omega_p_squared(0.5 * (lo + hi)), a);
        }
        prop_assert!(prof.centers().windows(2).all(|w| w[1] > w[0]));
        prop_assert!(prof.min_gap() >= prof.delta());
    }

    #[test]
    fn derived_values_match_definitions(p in params()) {
        let (d, h, l, c, k) = (p.delta(), p.h(), p.l(), p.c(), p.kappa());
        let alpha = -1.0 + h + l;
        prop_assert!((p.alpha() - alpha).abs() <= 1e-15 * (1.0 + alpha.abs()));
        prop_assert!(close(p.amplitude(), c * d.powf(-h), 1e-15));
        prop_assert!(close(p.effective_amplitude(), c * d.powf(-alpha), 1e-15));
        prop_assert_eq!(p.beta().re, 0.0);
        prop_assert!(close(p.beta().im, c * d.powf(1.0 - h) / (2.0 * k), 1e-15));
        prop_assert!(close(p.spacing(), d.powf(l), 1e-15));
    }

    #[test]
    fn oracle_field_is_c1((p, prof) in layout()) {
        let kappa = p.wavenumber();
        let sol = ExactSolution::from_profile(&prof, kappa).unwrap();
        let mut interfaces = vec![0.0, p.t_final()];
        for (a, b) in prof.intervals().take(20) {
            interfaces.push(a);
            interfaces.push(b);
        }
        let eps = 1e-12;
        let scale = 1.0 + sol.field_at(0.0).norm();
        for &t in &interfaces {
            let jump = (sol.field_at(t + eps) - sol.field_at(t - eps)).norm();
            let djump = (sol.derivative_at(t + eps) - sol.derivative_at(t - eps)).norm();
            prop_assert!(jump < 1e-9 * scale, "E jump {jump} at {t}");
            prop_assert!(djump < 1e-9 * scale * (1.0 + p.amplitude().sqrt()), "E' jump {djump} at {t}");
        }
        // 4th-order central differences away from interfaces.
        let h = 1e-5;
        let fd = |t: f64| {
            (sol.field_at(t - 2.0 * h) - 8.0 * sol.field_at(t - h) + 8.0 * sol.field_at(t + h)
                - sol.field_at(t + 2.0 * h))
                / (12.0 * h)
        };
        let mut probes = vec![-0.5, p.t_final() + 0.5];
        if let Some(&c) = prof.centers().first() {
            probes.push(c);
            probes.push(0.5 * (c + prof.delta() / 2.0 + prof.centers().get(1).map_or(p.t_final(), |n| n - prof.delta() / 2.0)));
        }
        for t in probes {
            let e = (fd(t) - sol.derivative_at(t)).norm();
            prop_assert!(e < 1e-7 * scale * (1.0 + p.amplitude()), "FD mismatch {e} at {t}");
        }
    }

    #[test]
    fn foldy_lax_matrix_structure((p, prof) in layout()) {
        let sys = FoldyLaxSystem::assemble(&prof, &p).unwrap();
        let a = sys.matrix().unwrap();
        let t = a.transpose();
        prop_assert_eq!(t.as_slice(), a.as_slice());
        let beta = p.beta();
        let kappa = p.wavenumber();
        let centers = prof.centers();
        for m in 0..centers.len().min(30) {
            prop_assert_eq!(a.row(m)[m], Complex64::new(1.0, 0.0) - beta);
            for j in 0..centers.len().min(30) {
                if j != m {
                    let expected = -beta * Complex64::cis(kappa * (centers[m] - centers[j]).abs());
                    prop_assert!((a.row(m)[j] - expected).norm() <= 1e-15 * beta.norm());
                }
            }
        }
    }

    #[test]
    fn kernel_relation(kappa in 0.1..10.0f64, t in -20.0..20.0f64, s in -20.0..20.0f64) {
        let k = Kernel { kappa };
        let lhs = k.phi(t, s);
        let rhs = Complex64::new(0.0, 0.5 / kappa) * k.phi_tilde(t, s);
        prop_assert!((lhs - rhs).norm() <= 1e-15 * rhs.norm());
        prop_assert_eq!(k.phi_tilde(t, s), k.phi_tilde(s, t));
    }

    #[test]
    fn structured_route_matches_dense((p, prof) in layout()) {
        let dense = FoldyLaxSystem::assemble(&prof, &p).unwrap().solve().unwrap();
        let fast = FoldyLaxSystem::matrix_free(&prof, &p)
            .unwrap()
            .solve_structured()
            .unwrap();
        let scale = dense.charges().iter().map(|q| q.norm()).fold(0.0, f64::max);
        for (a, b) in dense.charges().iter().zip(fast.charges()) {
            prop_assert!((a - b).norm() <= 1e-9 * scale, "{a} vs {b}");
        }
        prop_assert!(dense.residual() < 1e-10);
    }

    #[test]
    fn foldy_lax_scattered_field_is_left_moving((p, prof) in layout()) {
        let kappa = p.wavenumber();
        let sol = FoldyLaxSystem::assemble(&prof, &p).unwrap().solve().unwrap();
        let first = prof.intervals().next().unwrap().0;
        let grid = uniform_grid(first - 10.0, first - 1e-3, 100).unwrap();
        let sigma: Vec<_> = grid
            .iter()
            .map(|&t| (sol.field_at(t) - Complex64::cis(kappa * t)) * Complex64::cis(kappa * t))
            .collect();
        let reference = sigma[0];
        for s in &sigma {
            prop_assert!((s - reference).norm() <= 1e-10 * reference.norm().max(1e-300));
        }
    }

    #[test]
    fn effective_field_matches_at_interfaces(
        kappa in 0.3..5.0f64,
        a in 0.0..200.0f64,
        t in 0.5..30.0f64,
    ) {
        let sol = EffectiveSolution::new(kappa, a, t).unwrap();
        let eps = 1e-13;
        for edge in [0.0, t] {
            let scale = 1.0 + sol.lambda();
            prop_assert!((sol.field_at(edge + eps) - sol.field_at(edge - eps)).norm() < 1e-10 * scale);
            prop_assert!(
                (sol.derivative_at(edge + eps) - sol.derivative_at(edge - eps)).norm()
                    < 1e-10 * scale * scale
            );
        }
    }

    #[test]
    fn classification_is_scale_invariant(p in params(), s in 0.1..10.0f64) {
        let scaled = RegimeParams::new(
            p.t_final() * s,
            p.delta(),
            p.h(),
            p.l(),
            p.c() / (s * s),
            p.kappa() / s,
        )
        .unwrap();
        let a = classify(&p, 1.0);
        let b = classify(&scaled, 1.0);
        // Skip knife edges where rounding of λT can flip the decision.
        prop_assume!((a.offset.abs() - a.threshold).abs() > 1e-9);
        prop_assume!(((a.lambda_t / PI).fract() - 0.5).abs() > 1e-9);
        prop_assert!(close(a.lambda_t, b.lambda_t, 1e-12));
        prop_assert_eq!(a.kind, b.kind);
        prop_assert_eq!(a.resonance, b.resonance);
        prop_assert_eq!(a.n, b.n);
        prop_assert_eq!(a.behavior, b.behavior);
    }

    #[test]
    fn transparent_iff_positive_exponent(lt in 0.0..500.0f64, e in -1.0..1.0f64) {
        let class = classify_lambda_t(lt, e, 1.0);
        prop_assert_eq!(class.kind == RegimeKind::TransparentLimit, e > 0.0);
    }

    #[test]
    fn verdict_rule(
        slope in 0.1..3.0f64,
        predicted in 0.1..3.0f64,
        noise in prop::collection::vec(-0.05..0.05f64, 4),
    ) {
        let deltas: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
        let errors: Vec<f64> = deltas
            .iter()
            .zip(&noise)
            .map(|(d, n)| (d.ln() * slope + n).exp())
            .collect();
        prop_assume!(errors.iter().any(|&e| e > ERROR_FLOOR));
        let fit = fit_slope(&deltas, &errors, Some(predicted), 0.3, 0.9);
        prop_assert!(fit.monotone);
        let expected = if (fit.slope - predicted).abs() <= 0.3 && fit.r_squared >= 0.9 {
            Verdict::Pass
        } else if fit.r_squared < 0.9 {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
        prop_assert_eq!(fit.verdict, expected);
    }

    #[test]
    fn grids_are_strictly_increasing(a in -50.0..50.0f64, len in 1e-3..100.0f64, n in 2..2000usize) {
        let g = uniform_grid(a, a + len, n).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
