//! Convolution of grid functions against `x -> e^{xX}` kernels.
//!
//! For a generator `X` with spectrum in the open left half-plane:
//!
//! * `left(g)(x)  = int_a^x e^{(x-s)X} g(s) ds`
//! * `right(g)(x) = int_x^b e^{(s-x)X} g(s) ds`
//!
//! `g` is replaced by its barycentric interpolant on the grid and each panel
//! between consecutive nodes is integrated by Gauss-Legendre rules, split so
//! that `h |mu| <= 1` for every eigenvalue `mu`. Both sweeps then run by
//! recurrence from the panel contributions.

use std::sync::Arc;

use crate::grid::{gauss_legendre, Grid};
use crate::linalg::{CMat, CVec};
use crate::operator::OperatorHandle;
use crate::scalar::{cabs, cr, real, to_f64, Real};

const GL_POINTS: usize = 8;
const MAX_SUBPANELS: usize = 256;

#[derive(Debug, Clone)]
struct Panel<T: Real> {
    /// Range of quadrature points in the global point list.
    start: usize,
    len: usize,
    /// `w_q e^{(x_{j+1} - s_q) X}`
    left_w: Vec<CMat<T>>,
    /// `w_q e^{(s_q - x_j) X}`
    right_w: Vec<CMat<T>>,
}

#[derive(Debug, Clone)]
pub struct SemigroupKernel<T: Real> {
    grid: Arc<Grid<T>>,
    dim: usize,
    from_a: Vec<CMat<T>>,
    from_b: Vec<CMat<T>>,
    step: Vec<CMat<T>>,
    panels: Vec<Panel<T>>,
    /// Interpolation from nodes to quadrature points, transposed (n x npts).
    interp_t: CMat<T>,
}

impl<T: Real> SemigroupKernel<T> {
    pub fn new(op: &OperatorHandle<T>, grid: Arc<Grid<T>>) -> Self {
        let dim = op.dim();
        let x = grid.nodes();
        let n = x.len();
        let (a, b) = (grid.a(), grid.b());
        let rho = op.spectrum().iter().map(|z| to_f64(cabs(*z))).fold(0.0, f64::max);
        let (gx, gw) = gauss_legendre(GL_POINTS);
        let from_a: Vec<CMat<T>> = x.iter().map(|&xj| op.exp_matrix(xj - a)).collect();
        let from_b: Vec<CMat<T>> = x.iter().map(|&xj| op.exp_matrix(b - xj)).collect();
        let mut step = Vec::with_capacity(n - 1);
        let mut panels = Vec::with_capacity(n - 1);
        let mut points: Vec<T> = Vec::new();
        for j in 0..(n - 1) {
            let (x0, x1) = (x[j], x[j + 1]);
            let h = x1 - x0;
            step.push(op.exp_matrix(h));
            let m = ((to_f64(h) * rho).ceil() as usize).clamp(1, MAX_SUBPANELS);
            let sub = h / real(m as f64);
            let start = points.len();
            let mut left_w = Vec::with_capacity(m * GL_POINTS);
            let mut right_w = Vec::with_capacity(m * GL_POINTS);
            for p in 0..m {
                let lo = x0 + sub * real(p as f64);
                for q in 0..GL_POINTS {
                    let s = lo + sub * real((gx[q] + 1.0) / 2.0);
                    let w = cr(sub * real(gw[q] / 2.0));
                    points.push(s);
                    left_w.push(op.exp_matrix(x1 - s) * w);
                    right_w.push(op.exp_matrix(s - x0) * w);
                }
            }
            panels.push(Panel { start, len: points.len() - start, left_w, right_w });
        }
        let interp_t = grid.interp_matrix(&points).map(cr).transpose();
        SemigroupKernel { grid, dim, from_a, from_b, step, panels, interp_t }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    /// `e^{(x_j - a) X}`
    pub fn from_a(&self, j: usize) -> &CMat<T> {
        &self.from_a[j]
    }
    /// `e^{(b - x_j) X}`
    pub fn from_b(&self, j: usize) -> &CMat<T> {
        &self.from_b[j]
    }
    /// `e^{cX}` with `c = b - a`.
    pub fn full(&self) -> &CMat<T> {
        &self.from_a[self.from_a.len() - 1]
    }

    /// `(left(g), right(g))` at every node, for `g` given as `dim x n` values.
    pub fn convolve(&self, g: &CMat<T>) -> (CMat<T>, CMat<T>) {
        let n = self.grid.len();
        let gs = g * &self.interp_t;
        let mut left = CMat::<T>::zeros(self.dim, n);
        let mut right = CMat::<T>::zeros(self.dim, n);
        for j in 0..(n - 1) {
            let p = &self.panels[j];
            let mut acc = &self.step[j] * left.column(j);
            for q in 0..p.len {
                acc += &p.left_w[q] * gs.column(p.start + q);
            }
            left.set_column(j + 1, &acc);
        }
        for j in (0..(n - 1)).rev() {
            let p = &self.panels[j];
            let mut acc = &self.step[j] * right.column(j + 1);
            for q in 0..p.len {
                acc += &p.right_w[q] * gs.column(p.start + q);
            }
            right.set_column(j, &acc);
        }
        (left, right)
    }

    /// Applies `e^{(x_j - a) X}` to `v` at every node.
    pub fn sweep_from_a(&self, v: &CVec<T>) -> CMat<T> {
        let n = self.grid.len();
        let mut out = CMat::<T>::zeros(self.dim, n);
        for j in 0..n {
            out.set_column(j, &(&self.from_a[j] * v));
        }
        out
    }

    /// Applies `e^{(b - x_j) X}` to `v` at every node.
    pub fn sweep_from_b(&self, v: &CVec<T>) -> CMat<T> {
        let n = self.grid.len();
        let mut out = CMat::<T>::zeros(self.dim, n);
        for j in 0..n {
            out.set_column(j, &(&self.from_b[j] * v));
        }
        out
    }
}
