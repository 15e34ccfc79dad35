use super::stepping::{EvolutionSpec, Forcing};
use crate::bvp::BcFamily;
use crate::linalg::{real_matrix, CMat, CVec};
use crate::oracle::diff_matrix;
use crate::scalar::{cabs, to_f64, Real};

/// Relative tolerance on the homogeneous boundary rows.
pub const COMPAT_TOL: f64 = 1e-8;

pub const NOT_DISCRIMINATING: &str =
    "interpolation-space membership is not discriminating at this scale (all such spaces coincide with X)";

#[derive(Debug, Clone)]
pub struct CompatReport {
    pub compatible: bool,
    /// `(row name, residual)` for the four homogeneous boundary rows.
    pub rows: Vec<(String, f64)>,
    pub violated: Vec<String>,
    /// `f(0) + A_i v0` evaluates to finite values.
    pub forcing_finite: bool,
    pub note: &'static str,
}

/// Checks that `v0` lies in the discrete domain of `A_i` and that
/// `f(0) + A_i v0` is finite.
pub fn compatibility_check<T: Real>(spec: &EvolutionSpec<T>) -> CompatReport {
    let p = &spec.problem;
    let grid = p.grid();
    let n = grid.len();
    let d1 = real_matrix::<T>(&diff_matrix(grid)).transpose();
    let u = &spec.v0.values;
    let du = u * &d1;
    let d2u = &du * &d1;
    let d4u = &d2u * &d1 * &d1;
    let a = p.op_a.matrix();
    let au = a * u;
    let col = |m: &CMat<T>, j: usize| -> CVec<T> { m.column(j).into_owned() };
    let max_abs = |m: &CMat<T>| m.iter().map(|z| to_f64(cabs(*z))).fold(0.0, f64::max);
    let (su, sdu, sd2) = (max_abs(u), max_abs(&du), max_abs(&d2u));
    let rel = |v: CVec<T>, s: f64| v.iter().map(|z| to_f64(cabs(*z))).fold(0.0, f64::max) / (1.0 + s);
    let mixed = &d2u + &au;
    let smix = max_abs(&mixed).max(sd2);
    let rows: Vec<(String, f64)> = match p.family {
        BcFamily::Bc1 => vec![
            ("u(a)".into(), rel(col(u, 0), su)),
            ("u(b)".into(), rel(col(u, n - 1), su)),
            ("u''(a)".into(), rel(col(&d2u, 0), sd2)),
            ("u''(b)".into(), rel(col(&d2u, n - 1), sd2)),
        ],
        BcFamily::Bc2 => vec![
            ("u'(a)".into(), rel(col(&du, 0), sdu)),
            ("u'(b)".into(), rel(col(&du, n - 1), sdu)),
            ("u''(a)+Au(a)".into(), rel(col(&mixed, 0), smix)),
            ("u''(b)+Au(b)".into(), rel(col(&mixed, n - 1), smix)),
        ],
        BcFamily::Bc3 => vec![
            ("u(a)".into(), rel(col(u, 0), su)),
            ("u(b)".into(), rel(col(u, n - 1), su)),
            ("u'(a)".into(), rel(col(&du, 0), sdu)),
            ("u'(b)".into(), rel(col(&du, n - 1), sdu)),
        ],
        BcFamily::Bc4 => vec![
            ("u'(a)".into(), rel(col(&du, 0), sdu)),
            ("u'(b)".into(), rel(col(&du, n - 1), sdu)),
            ("u''(a)".into(), rel(col(&d2u, 0), sd2)),
            ("u''(b)".into(), rel(col(&d2u, n - 1), sd2)),
        ],
        BcFamily::Bc5 => vec![
            ("u(a)".into(), rel(col(u, 0), su)),
            ("u(b)".into(), rel(col(u, n - 1), su)),
            ("u''(a)+Au(a)".into(), rel(col(&mixed, 0), smix)),
            ("u''(b)+Au(b)".into(), rel(col(&mixed, n - 1), smix)),
        ],
    };
    let violated: Vec<String> =
        rows.iter().filter(|(_, r)| !(*r <= COMPAT_TOL)).map(|(name, _)| format!("{name} = 0")).collect();

    // -A_i u = u'''' + (2A - k) u'' + (A^2 - k A) u
    let k = crate::scalar::cr(p.k);
    let minus_au = &d4u + (a * &d2u) * crate::scalar::cr(T::one() + T::one()) - &d2u * k + a * &au - &au * k;
    let f0 = match &spec.forcing {
        Forcing::Zero => None,
        Forcing::Constant(g) => Some(g.values.clone()),
        Forcing::Sampled(v) => v.first().map(|g| g.values.clone()),
        Forcing::Callable(g) => Some(g(0.0).values),
    };
    let total = match f0 {
        Some(f) => f - minus_au,
        None => -minus_au,
    };
    let forcing_finite = total.iter().all(|z| to_f64(z.re).is_finite() && to_f64(z.im).is_finite());
    CompatReport { compatible: violated.is_empty() && forcing_finite, rows, violated, forcing_finite, note: NOT_DISCRIMINATING }
}
