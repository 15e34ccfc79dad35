use std::f64::consts::PI;

use num_complex::Complex;
use quartic_core::bvp::{resolvent_ai, BcFamily, BoundaryData, ProblemSpec};
use quartic_core::grid::{Grid, GridFunction};
use quartic_core::linalg::{diag, CVec};
use quartic_core::operator::make_operator;
use quartic_core::oracle::{collocation_solve, dense_generator};

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[test]
fn sine_mode_scaling() {
    let grid = Grid::chebyshev(0.0, PI, 40).unwrap();
    let a = make_operator(diag(&[c(-1.0, 0.0)])).unwrap();
    let f = GridFunction::from_fn(grid.clone(), 1, |x| CVec::from_element(1, c(x.sin(), 0.0)));
    let spec = ProblemSpec::new(a, 0.0, BcFamily::Bc1, BoundaryData::zeros(1), f.clone()).unwrap();
    let u = resolvent_ai(&spec, c(-1.0, 0.0), &f).unwrap();
    let err = (u.values.clone() - f.values.clone() / c(5.0, 0.0)).camax();
    assert!(err < 1e-12, "{err}");
    let v = collocation_solve(&spec, c(-1.0, 0.0)).unwrap();
    let err = (v.values - f.values / c(5.0, 0.0)).camax();
    assert!(err < 1e-10, "{err}");
}

#[test]
fn all_families_diag3() {
    let grid = Grid::chebyshev(0.0, PI, 64).unwrap();
    let a = make_operator(diag(&[c(-1.0, 0.0), c(-4.0, 0.0), c(-9.0, 0.0)])).unwrap();
    let f = GridFunction::from_fn(grid.clone(), 3, |x| {
        CVec::from_vec(vec![c(x.cos(), 0.0), c(1.0 + x * x, 0.3), c((0.5 * x).exp(), -x)])
    });
    for family in BcFamily::ALL {
        let spec = ProblemSpec::new(a.clone(), 0.0, family, BoundaryData::zeros(3), f.clone()).unwrap();
        for lam in [c(-3.0, 0.5), c(2.0, 7.0), c(-40.0, -10.0)] {
            let u = resolvent_ai(&spec, lam, &f).unwrap();
            let v = collocation_solve(&spec, lam).unwrap();
            let rel = (u.values.clone() - v.values.clone()).camax() / v.values.camax();
            assert!(rel < 1e-8, "{family:?} {lam}: {rel:e}");
        }
    }
}

#[test]
fn generator_spectrum() {
    let grid = Grid::chebyshev(0.0, PI, 64).unwrap();
    let a = make_operator(diag(&[c(-1.0, 0.0)])).unwrap();
    for family in BcFamily::ALL {
        let spec = ProblemSpec::homogeneous(a.clone(), 0.0, family, grid.clone()).unwrap();
        let g = dense_generator(&spec).unwrap();
        let h = make_operator(-g.g.clone()).unwrap();
        let mut ev: Vec<C> = h.spectrum().to_vec();
        ev.sort_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap());
        // the lower half of the discrete spectrum is resolved: real and non-negative
        for z in &ev[..ev.len() / 2] {
            assert!(z.im.abs() <= 1e-6 * z.norm().max(1.0) && z.re > -1e-8, "{family:?}: {z}");
        }
        if matches!(family, BcFamily::Bc1 | BcFamily::Bc5) {
            // sine modes: (m^2 + 1)^2
            for (z, m) in ev.iter().zip(1..=4) {
                let exact = ((m * m + 1) as f64).powi(2);
                assert!((z.re - exact).abs() < 1e-5 * exact, "{family:?}: {z} vs {exact}");
            }
        }
    }
}
