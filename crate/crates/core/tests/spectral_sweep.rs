use std::f64::consts::PI;

use num_complex::Complex;
use proptest::prelude::*;
use quartic_core::bvp::{BcFamily, ProblemSpec};
use quartic_core::grid::Grid;
use quartic_core::linalg::diag;
use quartic_core::operator::make_operator;
use quartic_core::oracle::collocation_solve;
use quartic_core::spectral::{
    classify_direct, classify_lambda, lemma45_angle_check, lemma_estimate_checks, resolvent_norm, run_sweep, Region,
    SweepGrid,
};
use quartic_core::Error;

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn scalar_spec(family: BcFamily, n: usize) -> ProblemSpec<f64> {
    let grid = Grid::chebyshev(0.0, PI, n).unwrap();
    ProblemSpec::homogeneous(make_operator(diag(&[c(-1.0, 0.0)])).unwrap(), 0.0, family, grid).unwrap()
}

#[test]
fn resolvent_norm_at_minus_one_is_one_fifth() {
    // sine modes: spectrum {(m^2 + 1)^2} = {4, 25, ...}, distance from -1 is 5
    let norm = resolvent_norm(&scalar_spec(BcFamily::Bc1, 32), c(-1.0, 0.0)).unwrap();
    assert!((norm - 0.2).abs() < 1e-8, "{norm}");
}

#[test]
fn resolvent_norm_tracks_distance_to_spectrum() {
    let spec = scalar_spec(BcFamily::Bc1, 32);
    for lam in [c(4.0, 1.0), c(25.0, -2.0), c(-10.0, 3.0)] {
        let dist = [4.0, 25.0, 100.0, 289.0].iter().map(|&e| (lam - c(e, 0.0)).norm()).fold(f64::INFINITY, f64::min);
        let norm = resolvent_norm(&spec, lam).unwrap();
        assert!((norm * dist - 1.0).abs() < 1e-6, "{lam}: {}", norm * dist);
    }
}

#[test]
fn small_sweep_is_bounded_without_failures() {
    let spec = scalar_spec(BcFamily::Bc1, 24);
    let grid = SweepGrid::standard(0.0, 0.0, 1e-2, 1e3, 10, 4, 0.0).unwrap();
    let report = run_sweep(&spec, &grid).unwrap();
    assert_eq!(report.records.len(), 40);
    assert!(report.failures.is_empty());
    assert!(report.c_empirical.is_finite() && report.c_empirical > 1.0);
    assert!(report.upward_trend.is_empty());
}

#[test]
fn exclusion_families_need_a_ball() {
    let spec = scalar_spec(BcFamily::Bc3, 16);
    let grid = SweepGrid::standard(0.0, 0.0, 1e-2, 1.0, 3, 2, 0.0).unwrap();
    assert!(matches!(run_sweep(&spec, &grid), Err(Error::Invalid(_))));
    let grid = SweepGrid::standard(0.0, 0.0, 1e-2, 1.0, 3, 2, 1e-3).unwrap();
    assert!(run_sweep(&spec, &grid).is_ok());
}

#[test]
fn sweep_grid_rejects_sector_points() {
    assert!(SweepGrid::new(0.0, 0.2, vec![1.0], vec![0.3], 0.0).is_err());
    assert!(SweepGrid::new(0.0, 0.2, vec![1.0], vec![0.5], 0.0).is_ok());
    assert!(SweepGrid::new(0.0, 0.0, vec![0.5], vec![1.0], 1.0).is_err());
}

#[test]
fn origin_is_resolvent_point_for_clamped_families() {
    // negative self-adjoint A: lambda = 0 is regular for BC3 and BC4
    let grid = Grid::chebyshev(0.0, PI, 32).unwrap();
    let a = make_operator(diag(&[c(-1.0, 0.0), c(-4.0, 0.0)])).unwrap();
    for family in [BcFamily::Bc3, BcFamily::Bc4] {
        let spec = ProblemSpec::homogeneous(a.clone(), 0.5, family, grid.clone()).unwrap();
        assert!(collocation_solve(&spec, c(0.0, 0.0)).is_ok(), "{family:?}");
    }
}

#[test]
fn region_examples() {
    assert_eq!(classify_lambda(c(-1.0, 0.0), 0.0, 0.0), Region::OutsideSector);
    assert_eq!(classify_lambda(c(1.0, 0.0), 0.0, 0.0), Region::InsideSector);
    assert_eq!(classify_lambda(c(-1.0, 0.0), 2.0, 0.0), Region::Vertex);
}

#[test]
fn angle_check_examples() {
    let a = lemma45_angle_check(c(-2.0, 0.0), 1.0, 0.0);
    assert!((a.theta1 - PI / 2.0).abs() < 1e-15 && (a.theta2 - PI / 2.0).abs() < 1e-15);
    assert!(a.parabolic);
    let theta_a = 0.2;
    let lam = c(-0.25, 0.0) + C::from_polar(1.0, PI - 0.01);
    let b = lemma45_angle_check(lam, 1.0, theta_a);
    let arg = (-lam - c(0.25, 0.0)).arg();
    assert!((b.theta1 - theta_a.max((arg + PI).abs() / 2.0)).abs() < 1e-15);
    assert!((b.theta2 - theta_a.max((arg - PI).abs() / 2.0)).abs() < 1e-15);
    assert_eq!(b.parabolic, theta_a + b.shift_args[0] < PI && theta_a + b.shift_args[1] < PI);
    // approaching the sector edge the inequality degenerates
    let mut last = 0.0;
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let l = c(-0.25, 0.0) + C::from_polar(1.0, 2.0 * theta_a + eps);
        let r = lemma45_angle_check(l, 1.0, theta_a);
        let worst = theta_a + r.shift_args[0].max(r.shift_args[1]);
        assert!(r.parabolic && worst > last && worst < PI);
        last = worst;
    }
    assert!(PI - last < 1e-3);
}

#[test]
fn estimate_diagnostics_scalar() {
    let grid = Grid::chebyshev(0.0, PI, 32).unwrap();
    let spec = ProblemSpec::homogeneous(make_operator(diag(&[c(-1.0, 0.0)])).unwrap(), 0.0, BcFamily::Bc1, grid).unwrap();
    let samples: Vec<C> = (0..9).map(|j| c(-10f64.powf(1.0 + 0.25 * j as f64), 0.0)).collect();
    let d = lemma_estimate_checks(&spec, &samples).unwrap();
    // |M L^-1| = |sqrt((1 - i s) / (1 + i s))| = 1 on the negative axis
    for r in &d.rows {
        let s = (r.distance).sqrt();
        let exact = ((c(1.0, -s) / c(1.0, s)).sqrt()).norm();
        assert!((r.ml_inv - exact).abs() < 1e-12 && (r.lm_inv - 1.0).abs() < 1e-12);
    }
    assert!(d.pair_bounded && d.pair_bound < 1.0 + 1e-12);
    assert!(d.ecm_monotone && d.v0_monotone);
    // ||v0|| / ||f|| ~ |lambda|^{-1/2} within a factor 3 over two decades
    let ratios: Vec<f64> = d.rows.iter().map(|r| r.v0_ratio * r.distance.sqrt()).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(hi / lo < 3.0, "{ratios:?}");
    assert!((d.v0_slope + 0.5).abs() < 0.15, "{}", d.v0_slope);
    assert!(d.fprime_slope < 0.0);
    assert!(d.omega_fit > 0.0);
    assert!(d.rows.iter().all(|r| r.m2_ecm_scaled.is_finite()));
}

#[test]
fn estimates_reject_sector_samples() {
    let spec = scalar_spec(BcFamily::Bc1, 16);
    assert!(lemma_estimate_checks(&spec, &[c(1.0, 0.0)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]
    #[test]
    fn arg_and_direct_tests_agree(
        r in -3.0f64..3.0,
        phi in -PI..PI,
        k in 0.0f64..3.0,
        theta in 0.0f64..1.5,
    ) {
        let lam = C::from_polar(10f64.powf(r), phi) + c(-k * k / 4.0, 0.0);
        prop_assert_eq!(classify_lambda(lam, k, theta), classify_direct(lam, k, theta));
    }

    #[test]
    fn outside_points_are_parabolic(r in -2.0f64..3.0, t in 0.01f64..0.99, theta in 0.0f64..0.7, k in 0.0f64..2.0) {
        let lo = 2.0 * theta;
        let phi = lo + t * (PI - lo);
        let lam = C::from_polar(10f64.powf(r), phi) + c(-k * k / 4.0, 0.0);
        let a = lemma45_angle_check(lam, k, theta);
        prop_assert!(a.parabolic);
        prop_assert!(a.theta1 < PI - theta + 1e-12 && a.theta2 < PI - theta + 1e-12);
    }
}
