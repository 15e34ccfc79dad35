//! Acceptance criteria, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use quartic_core::bvp::{lambda_frame, solve, BcFamily, BoundaryData, BvpSolution, PreparedResolvent, ProblemSpec};
use quartic_core::evolution::{
    evolve, growth_bound_probe, semigroup_apply_contour, semigroup_apply_contour_with, ContourParams, EvolutionSpec,
    Scheme,
};
use quartic_core::grid::{Grid, GridFunction};
use quartic_core::linalg::{diag, eye, CVec};
use quartic_core::operator::{make_operator, OperatorHandle};
use quartic_core::oracle::{
    characteristic_root_solve, collocation_solve, dense_expm, dense_generator, ScalarForcing, ScalarProblem,
};
use quartic_core::spectral::{run_sweep, SweepGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn scalar_op(a: C) -> OperatorHandle<f64> {
    make_operator(diag(&[a])).unwrap()
}

fn diag_op(entries: &[f64]) -> OperatorHandle<f64> {
    make_operator(diag(&entries.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())).unwrap()
}

fn sine(g: &Arc<Grid<f64>>) -> GridFunction<f64> {
    GridFunction::from_fn(g.clone(), 1, |x| CVec::from_element(1, c(x.sin(), 0.0)))
}

fn random_c(rng: &mut ChaCha8Rng) -> C {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Homogeneous conditions of the operator domain, read off the solver's
/// `u, u', u''` at both ends: (first at a, first at b, second at a, second at b).
fn domain_residuals(family: BcFamily, a: &OperatorHandle<f64>, sol: &BvpSolution<f64>) -> f64 {
    let am = a.matrix();
    let end_values = |g: &GridFunction<f64>| (g.first(), g.last());
    let (u, du, d2u) = (end_values(&sol.u), end_values(&sol.du), end_values(&sol.d2u));
    let trace_a = (&d2u.0 + am * &u.0, &d2u.1 + am * &u.1);
    let (first, second) = match family {
        BcFamily::Bc1 => (u, d2u),
        BcFamily::Bc2 => (du, trace_a),
        BcFamily::Bc3 => (u, du),
        BcFamily::Bc4 => (du, d2u),
        BcFamily::Bc5 => (u, trace_a),
    };
    [first.0, first.1, second.0, second.1].iter().map(|v| v.camax()).fold(0.0, f64::max)
}

// 1: formula solution vs characteristic roots for the scalar problem.
fn scalar_closed_form() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let grid = Grid::chebyshev(0.0, PI, 64).unwrap();
    let a = scalar_op(c(-1.0, 0.0));
    let mut worst = 0.0f64;
    let mut count = 0;
    for k in [0.0, 1.0] {
        for family in BcFamily::ALL {
            for _ in 0..20 {
                let lambda = c(-k * k / 4.0 - 10f64.powf(rng.gen_range(-1.0..2.0)), 0.0);
                let phi = [random_c(&mut rng), random_c(&mut rng), random_c(&mut rng), random_c(&mut rng)];
                let poly: Vec<C> = (0..3).map(|_| random_c(&mut rng)).collect();
                let exps = vec![(random_c(&mut rng), c(0.0, rng.gen_range(-2.0..2.0)))];
                let forcing = ScalarForcing::ExpPoly { poly: poly.clone(), exps: exps.clone() };
                let f = GridFunction::from_fn(grid.clone(), 1, |x| CVec::from_element(1, forcing.eval(x)));
                // A = -1: P, Q = -1 - k/2 +- i sqrt(-lambda - k^2/4)
                let root = (-lambda - c(k * k / 4.0, 0.0)).sqrt();
                let p = c(-1.0 - k / 2.0, 0.0) + c(0.0, 1.0) * root;
                let q = c(-1.0 - k / 2.0, 0.0) - c(0.0, 1.0) * root;
                let frame = match lambda_frame(&a, k, lambda, PI, family.has_exclusion_ball()) {
                    Ok(fr) => fr,
                    Err(e) => return outcome(false, format!("{family:?} lambda={lambda}: {e}")),
                };
                let data = BoundaryData::new(
                    CVec::from_element(1, phi[0]),
                    CVec::from_element(1, phi[1]),
                    CVec::from_element(1, phi[2]),
                    CVec::from_element(1, phi[3]),
                );
                let sol = match solve(family, &frame.on_grid(grid.clone()), &f, &data) {
                    Ok(s) => s,
                    Err(e) => return outcome(false, format!("{family:?} lambda={lambda}: {e}")),
                };
                let exact = characteristic_root_solve(&ScalarProblem {
                    p,
                    q,
                    a: 0.0,
                    b: PI,
                    family,
                    beta: p,
                    phi,
                    forcing: ScalarForcing::ExpPoly { poly, exps },
                })
                .unwrap();
                for (j, &x) in grid.nodes().iter().enumerate() {
                    worst = worst.max((sol.u.values[(0, j)] - exact.eval(x, 0)).norm());
                }
                count += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-6 && secs < 10.0, format!("{count} instances, max gap {worst:.3e}, {secs:.2} s"))
}

// 2: resolvent formulas vs collocation for diag(-1, -4, -9).
fn oracle_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = Grid::chebyshev(0.0, PI, 64).unwrap();
    let a = diag_op(&[-1.0, -4.0, -9.0]);
    let f = GridFunction::from_fn(grid.clone(), 3, |x| {
        CVec::from_vec(vec![c(x.cos(), 0.0), c(1.0 + x * x, 0.3), c((0.5 * x).exp(), -x)])
    });
    let (mut gap, mut bc) = (0.0f64, 0.0f64);
    for family in BcFamily::ALL {
        let spec = ProblemSpec::new(a.clone(), 0.0, family, BoundaryData::zeros(3), f.clone()).unwrap();
        for _ in 0..10 {
            // outside the sector around the positive axis, |lambda| in [0.5, 200]
            let r = 10f64.powf(rng.gen_range(-0.3..2.3));
            let phi = rng.gen_range(0.3..PI) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let lambda = C::from_polar(r, phi);
            let prepared = match PreparedResolvent::new(&a, 0.0, family, lambda, grid.clone()) {
                Ok(p) => p,
                Err(e) => return outcome(false, format!("{family:?} lambda={lambda}: {e}")),
            };
            let sol = prepared.apply(&f).unwrap();
            let v = collocation_solve(&spec, lambda).unwrap();
            gap = gap.max((sol.u.values.clone() - v.values.clone()).camax() / v.values.camax());
            bc = bc.max(domain_residuals(family, &a, &sol) / f.max_norm());
        }
    }
    outcome(gap <= 1e-6 && bc <= 1e-8, format!("50 solves, relative gap {gap:.3e}, boundary residual {bc:.3e}"))
}

// 3: lowest eigenvalues of the dense BC1 generator.
fn spectrum_reproduction() -> Outcome {
    let grid = Grid::chebyshev(0.0, PI, 64).unwrap();
    let spec = ProblemSpec::homogeneous(scalar_op(c(-1.0, 0.0)), 0.0, BcFamily::Bc1, grid).unwrap();
    let g = dense_generator(&spec).unwrap();
    let h = make_operator(-g.g.clone()).unwrap();
    let mut ev = h.spectrum().to_vec();
    ev.sort_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap());
    let mut worst = 0.0f64;
    for (z, exact) in ev.iter().zip([4.0, 25.0, 100.0]) {
        worst = worst.max((z - c(exact, 0.0)).norm() / exact);
    }
    let shown: Vec<String> = ev[..3].iter().map(|z| format!("{:.8}", z.re)).collect();
    outcome(worst <= 1e-5, format!("[{}], max relative error {worst:.3e}", shown.join(", ")))
}

// 4: (1 + |lambda + k^2/4|) ||R(lambda)|| on the 500-point grid and with doubled radii.
fn resolvent_bound() -> Outcome {
    let grid = Grid::chebyshev(0.0, PI, 24).unwrap();
    let a = scalar_op(c(-1.0, 0.0));
    let mut parts = Vec::new();
    let mut ok = true;
    for family in BcFamily::ALL {
        let spec = ProblemSpec::homogeneous(a.clone(), 0.0, family, grid.clone()).unwrap();
        let excl = if family.has_exclusion_ball() { 5e-3 } else { 0.0 };
        let base = SweepGrid::standard(0.0, spec.theta_a(), 1e-2, 1e4, 50, 10, excl).unwrap();
        let doubled = SweepGrid::new(
            0.0,
            spec.theta_a(),
            base.radii.iter().map(|r| 2.0 * r).collect(),
            base.angles.clone(),
            excl,
        )
        .unwrap();
        let (r1, r2) = match (run_sweep(&spec, &base), run_sweep(&spec, &doubled)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) => return outcome(false, format!("{family:?}: {e}")),
        };
        let change = (r2.c_empirical - r1.c_empirical).abs() / r1.c_empirical;
        let failures_inside = r1
            .failures
            .iter()
            .chain(&r2.failures)
            .all(|&(re, im)| c(re, im).norm() <= r1.r_observed.max(r2.r_observed));
        let good = base.len() == 500
            && r1.c_empirical.is_finite()
            && r2.c_empirical.is_finite()
            && change < 0.1
            && r1.r_observed.is_finite()
            && failures_inside;
        ok &= good;
        parts.push(format!(
            "{}: C={:.4} change={:.2}% failures={} r_obs={:.1e}",
            family.index(),
            r1.c_empirical,
            100.0 * change,
            r1.failures.len() + r2.failures.len(),
            r1.r_observed.max(r2.r_observed)
        ));
    }
    outcome(ok, parts.join("; "))
}

// 5: resolved spectrum of -G + k^2/4 inside the doubled sector.
fn sector_containment() -> Outcome {
    let grid = Grid::chebyshev(0.0, PI, 40).unwrap();
    let rot = |r: f64, t: f64| -C::from_polar(r, t);
    let cases: Vec<(&str, OperatorHandle<f64>, f64)> = vec![
        ("diag(-1,-4) k=0.5", diag_op(&[-1.0, -4.0]), 0.5),
        ("rotated theta=0.3 k=1", make_operator(diag(&[rot(1.0, 0.3), rot(2.0, -0.3)])).unwrap(), 1.0),
    ];
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_imag = 0.0f64;
    let mut checked = 0;
    for (_, a, k) in &cases {
        for family in [BcFamily::Bc1, BcFamily::Bc2, BcFamily::Bc5] {
            let spec = ProblemSpec::homogeneous(a.clone(), *k, family, grid.clone()).unwrap();
            let theta = spec.theta_a();
            let g = dense_generator(&spec).unwrap();
            let shifted = eye::<f64>(g.g.nrows()) * c(k * k / 4.0, 0.0) - &g.g;
            let h = make_operator(shifted).unwrap();
            let mut ev = h.spectrum().to_vec();
            ev.sort_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap());
            for z in &ev[..ev.len() / 2] {
                checked += 1;
                worst_excess = worst_excess.max(z.arg().abs() - (2.0 * theta + 0.05));
                if theta == 0.0 {
                    worst_imag = worst_imag.max(z.im.abs() / z.norm());
                }
            }
        }
    }
    outcome(
        worst_excess <= 0.0 && worst_imag <= 1e-6,
        format!("{checked} eigenvalues, max |arg| - (2 theta_A + 0.05) = {worst_excess:.3e}, diagonal case max |Im|/|z| = {worst_imag:.3e}"),
    )
}

// 6: contour vs dense exponential, semigroup law, growth fit stability, sine decay.
fn semigroup_checks() -> Outcome {
    let g28 = Grid::chebyshev(0.0, PI, 28).unwrap();
    let a2 = diag_op(&[-1.0, -4.0]);
    let w0 = GridFunction::from_fn(g28.clone(), 2, |x| {
        CVec::from_vec(vec![c((x * (PI - x)).powi(2), 0.0), c(x.sin().powi(3), 0.2 * (2.0 * x).sin())])
    });
    let mut contour_gap = 0.0f64;
    let mut law_gap = 0.0f64;
    for family in BcFamily::ALL {
        let spec = ProblemSpec::homogeneous(a2.clone(), 0.0, family, g28.clone()).unwrap();
        let mut params = ContourParams::default();
        if family.has_exclusion_ball() {
            params.ball_radius = 1.0;
        }
        let dense = dense_generator(&spec).unwrap();
        let expected = dense_expm(&dense.g, 0.5, &dense.restrict(&w0)).unwrap();
        let got = dense.restrict(&semigroup_apply_contour_with(&spec, 0.5, &w0, &params).unwrap());
        contour_gap = contour_gap.max((&got - &expected).norm() / expected.norm());
        let s1 = semigroup_apply_contour_with(&spec, 0.3, &w0, &params).unwrap();
        let s2 = semigroup_apply_contour_with(&spec, 0.7, &s1, &params).unwrap();
        let s3 = semigroup_apply_contour_with(&spec, 1.0, &w0, &params).unwrap();
        law_gap = law_gap.max(s2.sub(&s3).norm() / s3.norm());
    }

    let g20 = Grid::chebyshev(0.0, PI, 20).unwrap();
    let mut m_change = 0.0f64;
    for family in [BcFamily::Bc1, BcFamily::Bc2, BcFamily::Bc5] {
        let spec = ProblemSpec::homogeneous(scalar_op(c(-1.0, 0.0)), 1.0, family, g20.clone()).unwrap();
        let coarse: Vec<f64> = (0..=10).map(|j| j as f64 * 0.2).collect();
        let fine: Vec<f64> = (0..=20).map(|j| j as f64 * 0.1).collect();
        let (r1, r2) = (growth_bound_probe(&spec, &coarse).unwrap(), growth_bound_probe(&spec, &fine).unwrap());
        m_change = m_change.max((r2.m_fit - r1.m_fit).abs() / r2.m_fit);
    }

    let g32 = Grid::chebyshev(0.0, PI, 32).unwrap();
    let spec = ProblemSpec::homogeneous(scalar_op(c(-1.0, 0.0)), 0.0, BcFamily::Bc1, g32.clone()).unwrap();
    let v0 = sine(&g32);
    let tr = evolve(&EvolutionSpec::new(spec.clone(), 1.0, 1e-3, v0.clone(), Scheme::CrankNicolson)).unwrap();
    let decay = tr
        .times
        .iter()
        .zip(&tr.states)
        .map(|(t, s)| s.sub(&v0.scale(c((-4.0 * t).exp(), 0.0))).max_norm())
        .fold(0.0, f64::max);
    let contour_decay = semigroup_apply_contour(&spec, 1.0, &v0).unwrap().sub(&v0.scale(c((-4.0f64).exp(), 0.0))).max_norm();

    outcome(
        contour_gap <= 1e-6 && law_gap <= 1e-5 && m_change < 0.05 && decay <= 1e-4,
        format!(
            "contour vs dense {contour_gap:.3e}, semigroup law {law_gap:.3e}, M change {:.3}%, CN decay {decay:.3e} (contour {contour_decay:.1e})",
            100.0 * m_change
        ),
    )
}

// 7: identity suite through the verify command, single-threaded.
fn identity_suite() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/verify.ini");
    let start = Instant::now();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_quartic"))
        .args(["verify", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--threads", "1"])
        .output()
        .map(|o| o.status.code().unwrap_or(-1));
    let code = status.unwrap_or(-1);
    let secs = start.elapsed().as_secs_f64();
    let text = fs::read_to_string(dir.path().join("verify.txt")).unwrap_or_default();
    let value = |name: &str| -> Option<f64> {
        let line = text.lines().find(|l| l.split_whitespace().nth(1) == Some(name))?;
        line.split_whitespace().find_map(|w| w.strip_prefix("value=")).and_then(|v| v.parse().ok())
    };
    let named = [
        "frame_l_minus_m_identity",
        "resolvent_product_identity",
        "neumann_identity",
        "sector_geometry_equivalence",
        "variation_of_constants",
    ];
    let values: Vec<Option<f64>> = named.iter().map(|n| value(n)).collect();
    let all_pass = !text.is_empty() && text.lines().all(|l| l.starts_with("PASS "));
    let within = values.iter().all(|v| matches!(v, Some(x) if *x <= 1e-8));
    let shown: Vec<String> =
        named.iter().zip(&values).map(|(n, v)| format!("{n}={}", v.map_or("missing".into(), |x| format!("{x:.1e}")))).collect();
    outcome(
        code == 0 && all_pass && within && secs < 60.0,
        format!("exit {code}, {} properties, {}, {secs:.2} s", text.lines().count(), shown.join(" ")),
    )
}

// 8: observed order of implicit Euler and Crank-Nicolson on the sine mode.
fn scheme_order() -> Outcome {
    let g = Grid::chebyshev(0.0, PI, 24).unwrap();
    let spec = ProblemSpec::homogeneous(scalar_op(c(-1.0, 0.0)), 0.0, BcFamily::Bc1, g.clone()).unwrap();
    let v0 = sine(&g);
    let dts = [1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3];
    let slope = |scheme: Scheme| {
        let pts: Vec<(f64, f64)> = dts
            .iter()
            .map(|&dt| {
                let tr = evolve(&EvolutionSpec::new(spec.clone(), 1.0, dt, v0.clone(), scheme)).unwrap();
                let err = tr.states.last().unwrap().sub(&v0.scale(c((-4.0f64).exp(), 0.0))).max_norm();
                (dt.ln(), err.ln())
            })
            .collect();
        // least-squares slope of log error against log dt
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    let (ie, cn) = (slope(Scheme::ImplicitEuler), slope(Scheme::CrankNicolson));
    outcome((ie - 1.0).abs() <= 0.1 && (cn - 2.0).abs() <= 0.1, format!("implicit Euler {ie:.4}, Crank-Nicolson {cn:.4}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("scalar closed-form equivalence", scalar_closed_form),
        ("oracle cross-validation", oracle_cross_validation),
        ("spectrum reproduction", spectrum_reproduction),
        ("resolvent bound", resolvent_bound),
        ("sector containment", sector_containment),
        ("semigroup checks", semigroup_checks),
        ("identity suite", identity_suite),
        ("scheme order", scheme_order),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("{} {}. {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
