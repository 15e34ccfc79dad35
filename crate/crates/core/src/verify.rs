//! Seeded property suite over the whole engine: frame identities, resolvent
//! identities, the sector-geometry equivalence, oracle cross-checks and
//! semigroup laws. Each property yields one pass/fail line.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bvp::{
    assemble_frame, build_pq_lambda, lambda_frame, solve, BcFamily, BoundaryData, PreparedResolvent, ProblemSpec,
};
use crate::error::Result;
use crate::evolution::{semigroup_apply_contour, variation_of_constants_check, ContourParams, ContourPropagator};
use crate::grid::{Grid, GridFunction};
use crate::linalg::{diag, eye, fro, inverse_guarded, CMat, CVec};
use crate::operator::{expm, guarded_inverse_i_minus, make_operator, sqrt_principal, OperatorHandle};
use crate::oracle::{
    characteristic_root_solve, collocation_solve, dense_expm, dense_generator, ScalarForcing, ScalarProblem,
};
use crate::spectral::{classify_direct, classify_lambda};

type C = num_complex::Complex<f64>;

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} value={:.3e} tol={:.3e}{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.tol,
            if self.detail.is_empty() { String::new() } else { format!(" ({})", self.detail) }
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    /// Random samples for the sector-geometry equivalence.
    pub geometry_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 20240917, tol_scale: 1.0, geometry_samples: 10_000 }
    }
}

fn record(name: &'static str, value: f64, tol: f64, detail: impl Into<String>) -> PropertyResult {
    PropertyResult { name, value, tol, passed: value.is_finite() && value <= tol, detail: detail.into() }
}

fn failed(name: &'static str, tol: f64, e: crate::Error) -> PropertyResult {
    PropertyResult { name, value: f64::INFINITY, tol, passed: false, detail: e.to_string() }
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Diagonal `A` with spectrum in `-S_theta`.
fn random_sectorial_diag(rng: &mut ChaCha8Rng, dim: usize, theta: f64) -> OperatorHandle<f64> {
    let vals: Vec<C> = (0..dim)
        .map(|_| {
            let r = 10f64.powf(rng.gen_range(-0.3..1.3));
            let psi = rng.gen_range(-theta..=theta);
            -C::from_polar(r, psi)
        })
        .collect();
    make_operator(diag(&vals)).expect("diagonal operator")
}

/// `lambda` outside `-k^2/4 + S_{2 theta_A}` with margin.
fn random_outside(rng: &mut ChaCha8Rng, k: f64, theta_a: f64) -> C {
    let r = 10f64.powf(rng.gen_range(-1.0..3.0));
    let lo = 2.0 * theta_a + 0.05;
    let phi = rng.gen_range(lo..PI) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    c(-k * k / 4.0, 0.0) + C::from_polar(r, phi)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat<f64> {
    CMat::<f64>::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn rel(x: &CMat<f64>, s: &CMat<f64>) -> f64 {
    fro(x) / fro(s).max(1.0)
}

fn frame_properties(rng: &mut ChaCha8Rng, ts: f64) -> Vec<PropertyResult> {
    let mut lm = 0.0f64;
    let mut defs = 0.0f64;
    let mut comm = 0.0f64;
    let mut resolv = 0.0f64;
    let mut err = None;
    for _ in 0..40 {
        let theta = rng.gen_range(0.0..0.35);
        let a = random_sectorial_diag(rng, 3, theta);
        let k = rng.gen_range(0.0..2.0);
        let lambda = random_outside(rng, k, crate::bvp::theta_of(&a));
        let frame = match lambda_frame(&a, k, lambda, PI, false) {
            Ok(f) => f,
            Err(e) => {
                err = Some(e);
                continue;
            }
        };
        let r = frame.residuals();
        lm = lm.max(r.l_minus_m);
        defs = defs.max(r.max());
        comm = comm.max(r.max_commutator);

        // B (-Q - z)^-1 (-P - z)^-1 = (-P - z)^-1 - (-Q - z)^-1
        let n = frame.dim();
        for _ in 0..3 {
            let z = C::from_polar(10f64.powf(rng.gen_range(-1.0..2.0)), rng.gen_range(-PI..PI));
            let rp = inverse_guarded(&(-frame.p.matrix() - eye::<f64>(n) * z), 1e10);
            let rq = inverse_guarded(&(-frame.q.matrix() - eye::<f64>(n) * z), 1e10);
            if let (Ok((rp, _)), Ok((rq, _))) = (rp, rq) {
                let lhs = frame.b.matrix() * &rq * &rp;
                let rhs = &rp - &rq;
                resolv = resolv.max(rel(&(lhs - &rhs), &rhs));
            }
        }
    }
    let detail = err.map(|e| format!("skipped frame: {e}")).unwrap_or_default();
    vec![
        record("frame_l_minus_m_identity", lm, 1e-8 * ts, detail.clone()),
        record("frame_definitions", defs, 1e-8 * ts, detail.clone()),
        record("frame_commutation", comm, 1e-10 * ts, detail),
        record("resolvent_product_identity", resolv, 1e-8 * ts, ""),
    ]
}

fn neumann_properties(rng: &mut ChaCha8Rng, ts: f64) -> Vec<PropertyResult> {
    let mut worst = 0.0f64;
    let mut transport = 0.0f64;
    for trial in 0..20 {
        let n = 2 + trial % 5;
        let mut v = random_matrix(rng, n);
        let scale = rng.gen_range(0.1..3.0) / fro(&v);
        v *= c(scale, 0.0);
        let Ok(op) = make_operator(-v.clone()) else { continue };
        let Ok(g) = guarded_inverse_i_minus(&op) else { continue };
        let inv = g.inverse.matrix().clone();
        let id = eye::<f64>(n);
        worst = worst.max(rel(&(&inv - (&id - &v * &inv)), &inv));

        // V (I + V)^-1 T psi = T V (I + V)^-1 psi for commuting diagonal V, T
        let dv: Vec<C> = (0..n).map(|_| c(rng.gen_range(-0.9..0.9), rng.gen_range(-0.5..0.5))).collect();
        let dt: Vec<C> = (0..n).map(|_| c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))).collect();
        let (vd, td) = (diag(&dv), diag(&dt));
        if let Ok((ivd, _)) = inverse_guarded(&(&id + &vd), 1e10) {
            let psi = CVec::<f64>::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let lhs = &vd * &ivd * &td * &psi;
            let rhs = &td * &vd * &ivd * &psi;
            transport = transport.max((lhs - &rhs).norm() / rhs.norm().max(1.0));
        }
    }
    vec![
        record("neumann_identity", worst, 1e-10 * ts, ""),
        record("neumann_commutation_transport", transport, 1e-12 * ts, ""),
    ]
}

fn geometry_property(rng: &mut ChaCha8Rng, samples: usize) -> PropertyResult {
    let mut disagree = 0usize;
    for _ in 0..samples {
        let k = rng.gen_range(0.0..3.0);
        let theta = rng.gen_range(0.0..(PI / 2.0));
        let lambda = C::from_polar(10f64.powf(rng.gen_range(-3.0..3.0)), rng.gen_range(-PI..PI)) + c(-k * k / 4.0, 0.0);
        if classify_lambda(lambda, k, theta) != classify_direct(lambda, k, theta) {
            disagree += 1;
        }
    }
    record("sector_geometry_equivalence", disagree as f64, 0.0, format!("{samples} samples"))
}

fn voc_property(rng: &mut ChaCha8Rng, ts: f64) -> PropertyResult {
    let xs: Vec<f64> = (0..=10).map(|j| j as f64 * 0.2).collect();
    let mut worst = 0.0f64;
    let scalar = (|| -> Result<f64> {
        let l1 = make_operator(diag(&[c(-1.0, 0.0)]))?;
        let l2 = make_operator(diag(&[c(-2.0, 0.0)]))?;
        let b = make_operator(diag(&[c(-1.0, 0.0)]))?;
        variation_of_constants_check(&l1, &l2, &b, &CVec::from_element(1, c(1.0, 0.0)), &xs)
    })();
    match scalar {
        Ok(v) => worst = worst.max(v),
        Err(e) => return failed("variation_of_constants", 1e-8 * ts, e),
    }
    for _ in 0..5 {
        let d1: Vec<C> = (0..5).map(|_| c(-rng.gen_range(0.1..6.0), rng.gen_range(-2.0..2.0))).collect();
        let db: Vec<C> = (0..5).map(|_| c(-rng.gen_range(0.0..3.0), rng.gen_range(-1.0..1.0))).collect();
        let d2: Vec<C> = d1.iter().zip(&db).map(|(x, y)| x + y).collect();
        let psi = CVec::<f64>::from_fn(5, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let r = (|| -> Result<f64> {
            variation_of_constants_check(
                &make_operator(diag(&d1))?,
                &make_operator(diag(&d2))?,
                &make_operator(diag(&db))?,
                &psi,
                &xs,
            )
        })();
        match r {
            Ok(v) => worst = worst.max(v),
            Err(e) => return failed("variation_of_constants", 1e-8 * ts, e),
        }
    }
    record("variation_of_constants", worst, 1e-8 * ts, "")
}

fn sqrt_expm_properties(rng: &mut ChaCha8Rng, ts: f64) -> Vec<PropertyResult> {
    let mut sq = 0.0f64;
    let mut law = 0.0f64;
    for trial in 0..20 {
        let n = 2 + trial % 6;
        // shift right to keep the spectrum off the cut
        let m = random_matrix(rng, n) + eye::<f64>(n) * c(3.0, 0.0);
        if let Ok(op) = make_operator(m.clone()) {
            if let Ok(s) = sqrt_principal(&op) {
                sq = sq.max(rel(&(s.matrix() * s.matrix() - &m), &m));
            }
        }
        let x = random_matrix(rng, n) * c(2.0, 0.0);
        let (s, t) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let whole = expm(&(&x * c(s + t, 0.0)));
        let split = expm(&(&x * c(s, 0.0))) * expm(&(&x * c(t, 0.0)));
        law = law.max(rel(&(whole.clone() - split), &whole));
    }
    vec![record("principal_sqrt_squares_back", sq, 1e-10 * ts, ""), record("expm_semigroup_law", law, 1e-10 * ts, "")]
}

fn oracle_properties(rng: &mut ChaCha8Rng, ts: f64) -> Vec<PropertyResult> {
    let mut out = Vec::new();
    // characteristic roots vs the formula path, scalar P, Q
    let grid = Grid::<f64>::chebyshev(0.0, PI, 40).expect("grid");
    let mut gap = 0.0f64;
    let mut error = None;
    for family in BcFamily::ALL {
        let lambda = c(-rng.gen_range(1.5..30.0), 0.0);
        let pq = match build_pq_lambda(&make_operator(diag(&[c(-1.0, 0.0)])).expect("op"), 0.0, lambda) {
            Ok(pq) => pq,
            Err(e) => {
                error = Some(e);
                continue;
            }
        };
        let (p, q) = (pq.p.matrix()[(0, 0)], pq.q.matrix()[(0, 0)]);
        let phi = [0; 4].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let amp = c(rng.gen_range(-1.0..1.0), 0.0);
        let rate = c(rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0));
        let f = GridFunction::from_fn(grid.clone(), 1, |x| CVec::from_element(1, c(1.0, 0.0) + amp * (rate * x).exp()));
        let data = BoundaryData::new(
            CVec::from_element(1, phi[0]),
            CVec::from_element(1, phi[1]),
            CVec::from_element(1, phi[2]),
            CVec::from_element(1, phi[3]),
        );
        let run = || -> Result<f64> {
            let frame = assemble_frame(&pq.p, &pq.q, &pq.b, PI)?;
            let sol = solve(family, &frame.on_grid(grid.clone()), &f, &data)?;
            let exact = characteristic_root_solve(&ScalarProblem {
                p,
                q,
                a: 0.0,
                b: PI,
                family,
                beta: p,
                phi,
                forcing: ScalarForcing::ExpPoly { poly: vec![c(1.0, 0.0)], exps: vec![(amp, rate)] },
            })?;
            let mut g = 0.0f64;
            for (j, &x) in grid.nodes().iter().enumerate() {
                g = g.max((sol.u.values[(0, j)] - exact.eval(x, 0)).norm());
            }
            Ok(g)
        };
        match run() {
            Ok(g) => gap = gap.max(g),
            Err(e) => error = Some(e),
        }
    }
    let detail = error.map(|e| e.to_string()).unwrap_or_default();
    let mut r = record("formula_vs_characteristic", gap, 1e-8 * ts, detail.clone());
    if !detail.is_empty() {
        r.passed = false;
    }
    out.push(r);

    // resolvent vs collocation, diagonal three-mode operator
    let grid = Grid::<f64>::chebyshev(0.0, PI, 48).expect("grid");
    let a = make_operator(diag(&[c(-1.0, 0.0), c(-4.0, 0.0), c(-9.0, 0.0)])).expect("op");
    let f = GridFunction::from_fn(grid.clone(), 3, |x| {
        CVec::from_vec(vec![c(x.cos(), 0.0), c(1.0 + x * x, 0.3), c((0.5 * x).exp(), -x)])
    });
    let mut worst = 0.0f64;
    let mut lin = 0.0f64;
    let mut error = None;
    for family in BcFamily::ALL {
        let lambda = random_outside(rng, 0.0, 0.0);
        let run = || -> Result<(f64, f64)> {
            let spec = ProblemSpec::new(a.clone(), 0.0, family, BoundaryData::zeros(3), f.clone())?;
            let pr = PreparedResolvent::new(&a, 0.0, family, lambda, grid.clone())?;
            let u = pr.apply(&f)?.u;
            let v = collocation_solve(&spec, lambda)?;
            let g = (u.values.clone() - &v.values).camax() / v.values.camax();
            let h = GridFunction::from_fn(grid.clone(), 3, |x| CVec::from_element(3, c(x.sin(), x)));
            let sum = pr.apply(&f.add(&h))?.u;
            let parts = u.add(&pr.apply(&h)?.u);
            let scale = parts.values.camax().max(1e-300);
            Ok((g, (sum.values - parts.values).camax() / scale))
        };
        match run() {
            Ok((g, l)) => {
                worst = worst.max(g);
                lin = lin.max(l);
            }
            Err(e) => error = Some(e),
        }
    }
    let detail = error.map(|e| e.to_string()).unwrap_or_default();
    let mut r = record("resolvent_vs_collocation", worst, 1e-6 * ts, detail.clone());
    let mut l = record("resolvent_linearity", lin, 1e-10 * ts, detail.clone());
    if !detail.is_empty() {
        r.passed = false;
        l.passed = false;
    }
    out.push(r);
    out.push(l);
    out
}

fn semigroup_properties(ts: f64) -> Vec<PropertyResult> {
    let run = || -> Result<(f64, f64, f64)> {
        let grid = Grid::<f64>::chebyshev(0.0, PI, 24)?;
        let a = make_operator(diag(&[c(-1.0, 0.0)]))?;
        let spec = ProblemSpec::homogeneous(a, 0.0, BcFamily::Bc1, grid.clone())?;
        let v0 = GridFunction::from_fn(grid.clone(), 1, |x| CVec::from_element(1, c(x.sin() + 0.3 * (3.0 * x).sin(), 0.0)));
        let g = dense_generator(&spec)?;
        let w = g.restrict(&v0);
        let whole = dense_expm(&g.g, 1.0, &w)?;
        let split = dense_expm(&g.g, 0.7, &dense_expm(&g.g, 0.3, &w)?)?;
        let dense_law = (&whole - split).norm() / whole.norm();
        let c1 = semigroup_apply_contour(&spec, 1.0, &v0)?;
        let c2 = semigroup_apply_contour(&spec, 0.7, &semigroup_apply_contour(&spec, 0.3, &v0)?)?;
        let contour_law = c1.sub(&c2).norm() / c1.norm();
        let prop = ContourPropagator::build(&spec, 1.0, &v0, &ContourParams::default())?;
        let cw = g.restrict(&prop.apply(&v0)?);
        let vs_dense = (&cw - &whole).norm() / whole.norm();
        Ok((dense_law, contour_law, vs_dense))
    };
    match run() {
        Ok((d, c, v)) => vec![
            record("semigroup_law_dense", d, 1e-10 * ts, ""),
            record("semigroup_law_contour", c, 1e-5 * ts, ""),
            record("contour_vs_dense_expm", v, 1e-6 * ts, ""),
        ],
        Err(e) => vec![
            failed("semigroup_law_dense", 1e-10 * ts, e.clone()),
            failed("semigroup_law_contour", 1e-5 * ts, e.clone()),
            failed("contour_vs_dense_expm", 1e-6 * ts, e),
        ],
    }
}

/// Runs the full suite; deterministic for a fixed seed.
pub fn run_verify(opts: &VerifyOptions) -> Vec<PropertyResult> {
    let ts = opts.tol_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    out.extend(frame_properties(&mut rng, ts));
    out.extend(neumann_properties(&mut rng, ts));
    out.push(geometry_property(&mut rng, opts.geometry_samples));
    out.push(voc_property(&mut rng, ts));
    out.extend(sqrt_expm_properties(&mut rng, ts));
    out.extend(oracle_properties(&mut rng, ts));
    out.extend(semigroup_properties(ts));
    out
}
