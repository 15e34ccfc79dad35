use rayon::prelude::*;
use std::f64::consts::PI;

use crate::bvp::{PreparedResolvent, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::CMat;
use crate::scalar::{cr, real, to_f64, Cx, Real};

/// Hyperbola parameters for `z(u) = sigma + mu (1 - sin(alpha - i u))`,
/// `u_j = j h`, `|j| <= N`.
#[derive(Debug, Clone)]
pub struct ContourParams {
    /// Starting half-count `N`; doubled until the self-error is met.
    pub n_start: usize,
    pub n_max: usize,
    /// Relative N vs 2N gap accepted.
    pub tol: f64,
    /// Radius of the ball around `k^2/4` that may hold spectrum (BC3/BC4).
    pub ball_radius: f64,
}

impl Default for ContourParams {
    fn default() -> Self {
        ContourParams { n_start: 16, n_max: 256, tol: 1e-6, ball_radius: 0.0 }
    }
}

/// Default opening parameter with its asymptotic half-angle `pi/2 - alpha`
/// around the negative axis.
const ALPHA: f64 = 1.1721;
const H_SCALE: f64 = 1.0818;
const MU_SCALE: f64 = 4.4921;

/// Opening parameter for a spectrum in `k^2/4 - S_{2 theta_A}`: the default
/// unless its asymptotes fall inside the sector, otherwise the asymptotes
/// bisect the sector edge and the imaginary axis.
pub fn opening_angle(theta_a: f64) -> f64 {
    if PI / 2.0 - ALPHA > 2.0 * theta_a + 0.1 {
        ALPHA
    } else {
        PI / 4.0 - theta_a
    }
}

/// Quadrature nodes `z_j` and weights `h z'(u_j) e^{t z_j} / (2 pi i)`.
pub fn contour_nodes(t: f64, n: usize, sigma: f64, theta_a: f64) -> Vec<((f64, f64), (f64, f64))> {
    let alpha = opening_angle(theta_a);
    let h = H_SCALE / n as f64;
    let mu = MU_SCALE * n as f64 / t;
    let nn = n as i64;
    (-nn..=nn)
        .map(|j| {
            let u = j as f64 * h;
            let z = num_complex::Complex::new(
                sigma + mu * (1.0 - alpha.sin() * u.cosh()),
                mu * alpha.cos() * u.sinh(),
            );
            let dz = num_complex::Complex::new(-mu * alpha.sin() * u.sinh(), mu * alpha.cos() * u.cosh());
            let w = (z * t).exp() * dz * h / num_complex::Complex::new(0.0, 2.0 * PI);
            ((z.re, z.im), (w.re, w.im))
        })
        .collect()
}

/// `e^{t A_i}` as a weighted sum of prepared resolvents.
#[derive(Debug, Clone)]
pub struct ContourPropagator<T: Real> {
    pub t: f64,
    pub n: usize,
    pub self_error: f64,
    points: Vec<(Cx<T>, PreparedResolvent<T>)>,
    nodes: Vec<Cx<T>>,
}

type Points<T> = (Vec<(Cx<T>, PreparedResolvent<T>)>, Vec<Cx<T>>);

fn prepare<T: Real>(spec: &ProblemSpec<T>, t: f64, n: usize, sigma: f64) -> Result<Points<T>> {
    let theta_a = spec.theta_a();
    let raw = contour_nodes(t, n, sigma, theta_a);
    let nodes = raw.iter().map(|(z, _)| Cx::new(real::<T>(z.0), real::<T>(z.1))).collect();
    let points = raw
        .into_par_iter()
        .map(|(z, w)| {
            // (z - A_i)^-1 = (-A_i - lambda)^-1 at lambda = -z
            let lambda = Cx::new(real::<T>(-z.0), real::<T>(-z.1));
            let pr = PreparedResolvent::new(&spec.op_a, spec.k, spec.family, lambda, spec.grid().clone()).map_err(
                |e| Error::ContourTooClose(format!("resolvent at lambda = {:.6e}{:+.6e}i: {e}", -z.0, -z.1)),
            )?;
            Ok((Cx::new(real::<T>(w.0), real::<T>(w.1)), pr))
        })
        .collect::<Result<_>>()?;
    Ok((points, nodes))
}

fn apply_points<T: Real>(points: &[(Cx<T>, PreparedResolvent<T>)], v: &GridFunction<T>) -> Result<GridFunction<T>> {
    let parts: Vec<CMat<T>> = points
        .par_iter()
        .map(|(w, pr)| {
            pr.apply(v)
                .map(|s| s.u.values * *w)
                .map_err(|e| Error::ContourTooClose(e.to_string()))
        })
        .collect::<Result<_>>()?;
    // fixed-order reduction keeps runs bit-stable across thread counts
    let mut acc = CMat::<T>::zeros(v.dim(), v.len());
    for p in &parts {
        acc += p;
    }
    GridFunction::new(v.grid.clone(), acc)
}

/// Real shift `sigma` of the hyperbola: right of every spectral point of
/// `A_i` and of the origin.
pub fn contour_shift<T: Real>(spec: &ProblemSpec<T>, params: &ContourParams) -> f64 {
    let k = to_f64(spec.k);
    let ball = if spec.family.has_exclusion_ball() { params.ball_radius } else { 0.0 };
    (k * k / 4.0 + ball).max(0.0)
}

/// Relative gap between two grid functions in the weighted norm.
fn rel_gap<T: Real>(a: &GridFunction<T>, b: &GridFunction<T>) -> f64 {
    let d = to_f64(a.sub(b).norm());
    let s = to_f64(a.norm()).max(to_f64(b.norm()));
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

impl<T: Real> ContourPropagator<T> {
    /// Builds the propagator for time `t`, doubling `N` until applying it
    /// to `probe` changes by less than `params.tol`.
    pub fn build(spec: &ProblemSpec<T>, t: f64, probe: &GridFunction<T>, params: &ContourParams) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Invalid(format!("contour time must be positive, got {t}")));
        }
        let sigma = contour_shift(spec, params);
        let mut n = params.n_start.max(2);
        let (points, _) = prepare(spec, t, n, sigma)?;
        let mut value = apply_points(&points, probe)?;
        drop(points);
        let mut last_gap = f64::INFINITY;
        while 2 * n <= params.n_max {
            let (next_points, next_nodes) = prepare(spec, t, 2 * n, sigma)?;
            let next_value = apply_points(&next_points, probe)?;
            let gap = rel_gap(&next_value, &value);
            n *= 2;
            if gap <= params.tol {
                return Ok(ContourPropagator { t, n, self_error: gap, points: next_points, nodes: next_nodes });
            }
            value = next_value;
            last_gap = gap;
        }
        Err(Error::QuadratureNotConverged { self_error: last_gap })
    }

    pub fn apply(&self, v: &GridFunction<T>) -> Result<GridFunction<T>> {
        apply_points(&self.points, v)
    }

    /// `int_0^t e^{(t-s) A_i} (f0 + s g / t) ds` from the Laplace transform
    /// `f0 / z + g / (t z^2)` of the linear forcing; the contour encloses
    /// `z = 0`, so the same nodes integrate it.
    pub fn apply_duhamel(&self, f0: &GridFunction<T>, g: &GridFunction<T>) -> Result<GridFunction<T>> {
        let tt = cr(real::<T>(self.t));
        let parts: Vec<CMat<T>> = self
            .points
            .par_iter()
            .zip(self.nodes.par_iter())
            .map(|((w, pr), z)| {
                let zi = z.inv();
                let rhs = f0.scale(zi).add(&g.scale(zi * zi / tt));
                pr.apply(&rhs).map(|s| s.u.values * *w).map_err(|e| Error::ContourTooClose(e.to_string()))
            })
            .collect::<Result<_>>()?;
        let mut acc = CMat::<T>::zeros(f0.dim(), f0.len());
        for p in &parts {
            acc += p;
        }
        GridFunction::new(f0.grid.clone(), acc)
    }

    /// The propagator as a node-major `(dim n)^2` matrix.
    pub fn materialize(&self) -> Result<CMat<T>> {
        let parts: Vec<CMat<T>> = self
            .points
            .par_iter()
            .map(|(w, pr)| pr.materialize().map(|m| m * *w).map_err(|e| Error::ContourTooClose(e.to_string())))
            .collect::<Result<_>>()?;
        let size = parts.first().map(|p| p.nrows()).unwrap_or(0);
        let mut acc = CMat::<T>::zeros(size, size);
        for p in &parts {
            acc += p;
        }
        Ok(acc)
    }
}

/// `e^{t A_i} v0` by hyperbolic-contour quadrature of the resolvent.
pub fn semigroup_apply_contour<T: Real>(spec: &ProblemSpec<T>, t: f64, v0: &GridFunction<T>) -> Result<GridFunction<T>> {
    semigroup_apply_contour_with(spec, t, v0, &ContourParams::default())
}

pub fn semigroup_apply_contour_with<T: Real>(
    spec: &ProblemSpec<T>,
    t: f64,
    v0: &GridFunction<T>,
    params: &ContourParams,
) -> Result<GridFunction<T>> {
    if t == 0.0 {
        return Ok(v0.clone());
    }
    let prop = ContourPropagator::build(spec, t, v0, params)?;
    prop.apply(v0)
}
