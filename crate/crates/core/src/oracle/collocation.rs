//! Chebyshev collocation for `u'''' + (2A - kI) u'' + (A^2 - kA - lambda I) u = f`.

use std::sync::Arc;

use crate::bvp::{BcFamily, BoundaryData, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, GridKind};
use crate::linalg::{eye, inverse_guarded, kron, real_matrix, scaled_eye, CMat};
use crate::scalar::{cr, real, to_f64, Cx, Real};
use crate::tolerance::{CONDITION_CAP, GENERATOR_CAP};
use nalgebra::DMatrix;

/// First-derivative matrix on the grid nodes (barycentric formula).
pub fn diff_matrix<T: Real>(grid: &Grid<T>) -> DMatrix<f64> {
    let x: Vec<f64> = grid.nodes().iter().map(|v| to_f64(*v)).collect();
    let n = x.len();
    let pi = std::f64::consts::PI;
    let nn = (n - 1) as f64;
    // barycentric weights of the Chebyshev-Lobatto points
    let w: Vec<f64> = (0..n)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                s * 0.5
            } else {
                s
            }
        })
        .collect();
    // exact node differences from the cosine parametrisation (less rounding)
    let half = (x[n - 1] - x[0]) / 2.0;
    let theta: Vec<f64> = (0..n).map(|j| pi * j as f64 / nn).collect();
    let diff = |i: usize, j: usize| 2.0 * half * ((theta[i] + theta[j]) / 2.0).sin() * ((theta[i] - theta[j]) / 2.0).sin();
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / diff(i, j);
                d[(i, j)] = v;
                s += v;
            }
        }
        d[(i, i)] = -s;
    }
    d
}

/// Assembled collocation system for one `(spec, lambda)`.
#[derive(Debug, Clone)]
pub struct CollocationSystem<T: Real> {
    pub n_nodes: usize,
    pub dim: usize,
    pub d1: CMat<T>,
    pub d2: CMat<T>,
    pub d4: CMat<T>,
    /// `(dim n) x (dim n)` matrix, node-major unknowns.
    pub matrix: CMat<T>,
    /// Rows replaced by boundary conditions (node-major).
    pub boundary_rows: Vec<usize>,
    grid: Arc<Grid<T>>,
    family: BcFamily,
}

/// Nodes whose equations are replaced: (first condition at a, second at a,
/// second at b, first at b).
fn boundary_nodes(n: usize) -> [usize; 4] {
    [0, 1, n - 2, n - 1]
}

impl<T: Real> CollocationSystem<T> {
    pub fn assemble(
        op_a: &crate::operator::OperatorHandle<T>,
        k: T,
        family: BcFamily,
        lambda: Cx<T>,
        grid: Arc<Grid<T>>,
    ) -> Result<Self> {
        if grid.kind() != GridKind::Chebyshev {
            return Err(Error::Invalid("collocation requires a Chebyshev grid".into()));
        }
        let n = grid.len();
        let dim = op_a.dim();
        let d1f = diff_matrix(&grid);
        let d2f = &d1f * &d1f;
        let d4f = &d2f * &d2f;
        let (d1, d2, d4) = (real_matrix::<T>(&d1f), real_matrix::<T>(&d2f), real_matrix::<T>(&d4f));
        let a = op_a.matrix();
        let id = eye::<T>(dim);
        let c2 = a * cr(real::<T>(2.0)) - &id * cr(k);
        let c0 = a * a - a * cr(k) - scaled_eye(dim, lambda);
        let mut m = kron(&d4, &id) + kron(&d2, &c2) + kron(&eye::<T>(n), &c0);
        let nodes = boundary_nodes(n);
        let mut rows = Vec::with_capacity(4 * dim);
        for (slot, &node) in nodes.iter().enumerate() {
            let at_b = node >= n - 2;
            let end = if at_b { n - 1 } else { 0 };
            let first = slot == 0 || slot == 3;
            let (order, add_a) = condition(family, first);
            for i in 0..dim {
                let r = node * dim + i;
                rows.push(r);
                for col in 0..(n * dim) {
                    m[(r, col)] = cr(T::zero());
                }
                for j in 0..n {
                    let coef = match order {
                        0 => {
                            if j == end {
                                T::one()
                            } else {
                                T::zero()
                            }
                        }
                        1 => d1[(end, j)].re,
                        _ => d2[(end, j)].re,
                    };
                    if coef != T::zero() {
                        m[(r, j * dim + i)] += cr(coef);
                    }
                }
                if add_a {
                    for i2 in 0..dim {
                        m[(r, end * dim + i2)] += a[(i, i2)];
                    }
                }
            }
        }
        Ok(CollocationSystem { n_nodes: n, dim, d1, d2, d4, matrix: m, boundary_rows: rows, grid, family })
    }

    pub fn family(&self) -> BcFamily {
        self.family
    }
}

/// `(derivative order, adds A u)` of the first or second condition.
fn condition(family: BcFamily, first: bool) -> (usize, bool) {
    match (family, first) {
        (BcFamily::Bc1, true) | (BcFamily::Bc3, true) | (BcFamily::Bc5, true) => (0, false),
        (BcFamily::Bc2, true) | (BcFamily::Bc4, true) | (BcFamily::Bc3, false) => (1, false),
        (BcFamily::Bc1, false) | (BcFamily::Bc4, false) => (2, false),
        (BcFamily::Bc2, false) | (BcFamily::Bc5, false) => (2, true),
    }
}

/// Scales every row to unit max-norm; returns the scale factors.
fn equilibrate<T: Real>(m: &mut CMat<T>) -> Vec<T> {
    let mut s = Vec::with_capacity(m.nrows());
    for i in 0..m.nrows() {
        let mut mx = T::zero();
        for j in 0..m.ncols() {
            mx = mx.max(crate::scalar::cabs(m[(i, j)]));
        }
        let f = if mx > T::zero() { T::one() / mx } else { T::one() };
        for j in 0..m.ncols() {
            m[(i, j)] *= cr(f);
        }
        s.push(f);
    }
    s
}

/// Solves the collocation system with the spec's boundary data and forcing.
pub fn collocation_solve<T: Real>(spec: &ProblemSpec<T>, lambda: Cx<T>) -> Result<GridFunction<T>> {
    let grid = spec.grid().clone();
    let sys = CollocationSystem::assemble(&spec.op_a, spec.k, spec.family, lambda, grid.clone())?;
    collocation_solve_system(&sys, &spec.f, &spec.phi)
}

pub fn collocation_solve_system<T: Real>(
    sys: &CollocationSystem<T>,
    f: &GridFunction<T>,
    phi: &BoundaryData<T>,
) -> Result<GridFunction<T>> {
    let (n, dim) = (sys.n_nodes, sys.dim);
    let mut rhs = CMat::<T>::from_column_slice(n * dim, 1, f.values.as_slice());
    let nodes = boundary_nodes(n);
    let slot_phi = [0usize, 2, 3, 1];
    for (slot, &node) in nodes.iter().enumerate() {
        for i in 0..dim {
            rhs[(node * dim + i, 0)] = phi.phi[slot_phi[slot]][i];
        }
    }
    let mut m = sys.matrix.clone();
    let scale = equilibrate(&mut m);
    for (i, s) in scale.iter().enumerate() {
        rhs[(i, 0)] *= cr(*s);
    }
    let (inv, _) = inverse_guarded(&m, CONDITION_CAP).map_err(|e| match e {
        Error::NearSpectrum { cond } => Error::SingularSystem { cond },
        other => other,
    })?;
    let u = inv * rhs;
    GridFunction::new(sys.grid.clone(), CMat::<T>::from_column_slice(dim, n, u.as_slice()))
}

/// Dense surrogate `G` of the generator on interior nodes.
#[derive(Debug, Clone)]
pub struct DenseGenerator<T: Real> {
    pub g: CMat<T>,
    /// Node indices carried by `g` (all but the four boundary nodes).
    pub interior: Vec<usize>,
    /// Boundary values from interior values: `u_B = lift u_I`.
    pub lift: CMat<T>,
    pub dim: usize,
    pub grid: Arc<Grid<T>>,
}

pub fn dense_generator<T: Real>(spec: &ProblemSpec<T>) -> Result<DenseGenerator<T>> {
    let grid = spec.grid().clone();
    let n = grid.len();
    let dim = spec.dim();
    if n * dim > GENERATOR_CAP {
        return Err(Error::CapExceeded { size: n * dim, cap: GENERATOR_CAP });
    }
    let sys = CollocationSystem::assemble(&spec.op_a, spec.k, spec.family, Cx::new(T::zero(), T::zero()), grid.clone())?;
    let bnodes = boundary_nodes(n);
    let interior: Vec<usize> = (0..n).filter(|j| !bnodes.contains(j)).collect();
    let idx = |nodes: &[usize]| -> Vec<usize> {
        let mut v = Vec::with_capacity(nodes.len() * dim);
        for &j in nodes {
            for i in 0..dim {
                v.push(j * dim + i);
            }
        }
        v
    };
    let bi = idx(&bnodes);
    let ii = idx(&interior);
    let sub = |r: &[usize], c: &[usize]| CMat::<T>::from_fn(r.len(), c.len(), |i, j| sys.matrix[(r[i], c[j])]);
    let c_bb = sub(&bi, &bi);
    let c_bi = sub(&bi, &ii);
    let op_ii = sub(&ii, &ii);
    let op_ib = sub(&ii, &bi);
    let (c_bb_inv, _) = inverse_guarded(&c_bb, CONDITION_CAP).map_err(|e| match e {
        Error::NearSpectrum { cond } => Error::SingularSystem { cond },
        other => other,
    })?;
    let lift = -(c_bb_inv * c_bi);
    let k = op_ii + op_ib * &lift;
    Ok(DenseGenerator { g: -k, interior, lift, dim, grid })
}

impl<T: Real> DenseGenerator<T> {
    /// Interior values (node-major) of a grid function.
    pub fn restrict(&self, f: &GridFunction<T>) -> crate::linalg::CVec<T> {
        let mut v = crate::linalg::CVec::<T>::zeros(self.interior.len() * self.dim);
        for (r, &j) in self.interior.iter().enumerate() {
            for i in 0..self.dim {
                v[r * self.dim + i] = f.values[(i, j)];
            }
        }
        v
    }

    /// Full grid function from interior values, boundary nodes by `lift`.
    pub fn extend(&self, v: &crate::linalg::CVec<T>) -> GridFunction<T> {
        let n = self.grid.len();
        let mut out = GridFunction::zeros(self.grid.clone(), self.dim);
        for (r, &j) in self.interior.iter().enumerate() {
            for i in 0..self.dim {
                out.values[(i, j)] = v[r * self.dim + i];
            }
        }
        let ub = &self.lift * v;
        for (s, &j) in boundary_nodes(n).iter().enumerate() {
            for i in 0..self.dim {
                out.values[(i, j)] = ub[s * self.dim + i];
            }
        }
        out
    }

    /// Quadrature weights of the interior unknowns (node-major).
    pub fn weights(&self) -> Vec<T> {
        let w = self.grid.weights();
        let mut out = Vec::with_capacity(self.interior.len() * self.dim);
        for &j in &self.interior {
            for _ in 0..self.dim {
                out.push(w[j]);
            }
        }
        out
    }
}

/// Interior residual `D2 u'' + S1 u'' + S0 u - f`, using the supplied second
/// derivative so that only one collocation differentiation is applied.
pub fn ode_residual<T: Real>(
    grid: &Grid<T>,
    s1: &CMat<T>,
    s0: &CMat<T>,
    u: &CMat<T>,
    d2u: &CMat<T>,
    f: &CMat<T>,
) -> f64 {
    let d2 = real_matrix::<T>(&{
        let d1 = diff_matrix(grid);
        &d1 * &d1
    });
    let u4 = d2u * d2.transpose();
    let r = u4 + s1 * d2u + s0 * u - f;
    let n = grid.len();
    let mut worst = 0.0f64;
    for j in 2..(n - 2) {
        for i in 0..r.nrows() {
            worst = worst.max(to_f64(crate::scalar::cabs(r[(i, j)])));
        }
    }
    worst
}
