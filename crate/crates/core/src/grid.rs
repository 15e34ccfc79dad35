//! Sample grids on `[a, b]` and functions with values in `X = C^dim`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::scalar::{cabs, real, to_f64, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Chebyshev-Gauss-Lobatto nodes with Clenshaw-Curtis weights.
    Chebyshev,
    /// Equispaced nodes with trapezoid weights.
    Uniform,
}

#[derive(Debug, Clone)]
pub struct Grid<T: Real> {
    kind: GridKind,
    a: T,
    b: T,
    nodes: Vec<T>,
    weights: Vec<T>,
    bary: Vec<T>,
}

/// Blending degree of the Floater-Hormann interpolant on uniform grids.
const FH_DEGREE: usize = 4;

impl<T: Real> Grid<T> {
    pub fn new(kind: GridKind, a: T, b: T, n: usize) -> Result<Arc<Self>> {
        if !(a < b) {
            return Err(Error::Invalid("grid interval requires a < b".into()));
        }
        if n < 5 {
            return Err(Error::Invalid("grid needs at least 5 nodes".into()));
        }
        let (af, bf) = (to_f64(a), to_f64(b));
        let half = (bf - af) / 2.0;
        let (nodes, weights, bary) = match kind {
            GridKind::Chebyshev => {
                let nn = n - 1;
                let pi = std::f64::consts::PI;
                let nodes: Vec<f64> =
                    (0..n).map(|j| af + half * (1.0 - (pi * j as f64 / nn as f64).cos())).collect();
                let w = clenshaw_curtis(nn);
                let weights: Vec<f64> = w.iter().map(|x| x * half).collect();
                let bary: Vec<f64> = (0..n)
                    .map(|j| {
                        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                        if j == 0 || j == nn {
                            s * 0.5
                        } else {
                            s
                        }
                    })
                    .collect();
                (nodes, weights, bary)
            }
            GridKind::Uniform => {
                let h = (bf - af) / (n - 1) as f64;
                let nodes: Vec<f64> = (0..n).map(|j| af + h * j as f64).collect();
                let weights: Vec<f64> =
                    (0..n).map(|j| if j == 0 || j == n - 1 { h / 2.0 } else { h }).collect();
                (nodes, weights, floater_hormann(n, FH_DEGREE.min(n - 1)))
            }
        };
        let mut nodes: Vec<T> = nodes.into_iter().map(real).collect();
        nodes[0] = a;
        nodes[n - 1] = b;
        Ok(Arc::new(Grid {
            kind,
            a,
            b,
            nodes,
            weights: weights.into_iter().map(real).collect(),
            bary: bary.into_iter().map(real).collect(),
        }))
    }

    pub fn chebyshev(a: T, b: T, n: usize) -> Result<Arc<Self>> {
        Self::new(GridKind::Chebyshev, a, b, n)
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }
    pub fn a(&self) -> T {
        self.a
    }
    pub fn b(&self) -> T {
        self.b
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Rows of barycentric interpolation weights: `f(points[i]) ~ sum_j E[i,j] f(x_j)`.
    pub fn interp_matrix(&self, points: &[T]) -> DMatrix<T> {
        let n = self.len();
        let mut e = DMatrix::<T>::zeros(points.len(), n);
        for (i, &x) in points.iter().enumerate() {
            if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
                e[(i, j)] = T::one();
                continue;
            }
            let mut denom = T::zero();
            for j in 0..n {
                let t = self.bary[j] / (x - self.nodes[j]);
                e[(i, j)] = t;
                denom += t;
            }
            for j in 0..n {
                e[(i, j)] /= denom;
            }
        }
        e
    }
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`, `q >= 2`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 2, "gauss_legendre needs at least two points");
    let legendre = |z: f64| {
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=q {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = q as f64 * (z * p1 - p0) / (z * z - 1.0);
        (p1, dp)
    };
    let pi = std::f64::consts::PI;
    let mut x = vec![0.0; q];
    let mut w = vec![0.0; q];
    for i in 0..q {
        let mut z = (pi * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(z);
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn clenshaw_curtis(nn: usize) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    let mut w = vec![0.0; nn + 1];
    let nf = nn as f64;
    let mut v = vec![1.0; nn.saturating_sub(1)];
    if nn % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[nn] = w[0];
        for k in 1..(nn / 2) {
            let kf = k as f64;
            for (idx, vi) in v.iter_mut().enumerate() {
                let th = pi * (idx + 1) as f64 / nf;
                *vi -= 2.0 * (2.0 * kf * th).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for (idx, vi) in v.iter_mut().enumerate() {
            let th = pi * (idx + 1) as f64 / nf;
            *vi -= (nf * th).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[nn] = w[0];
        for k in 1..=((nn - 1) / 2) {
            let kf = k as f64;
            for (idx, vi) in v.iter_mut().enumerate() {
                let th = pi * (idx + 1) as f64 / nf;
                *vi -= 2.0 * (2.0 * kf * th).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for (idx, vi) in v.iter().enumerate() {
        w[idx + 1] = 2.0 * vi / nf;
    }
    w
}

fn floater_hormann(n: usize, d: usize) -> Vec<f64> {
    let binom = |n: usize, k: usize| -> f64 {
        let mut r = 1.0;
        for i in 0..k {
            r = r * (n - i) as f64 / (i + 1) as f64;
        }
        r
    };
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(d);
            let hi = k.min(n - 1 - d);
            let mut s = 0.0;
            for i in lo..=hi {
                s += binom(d, k - i);
            }
            let sign = if (k as i64 - d as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign * s
        })
        .collect()
}

/// `X`-valued function sampled on a grid; column `j` is the value at node `j`.
#[derive(Debug, Clone)]
pub struct GridFunction<T: Real> {
    pub grid: Arc<Grid<T>>,
    pub values: CMat<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(grid: Arc<Grid<T>>, values: CMat<T>) -> Result<Self> {
        if values.ncols() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.ncols() });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Arc<Grid<T>>, dim: usize) -> Self {
        let n = grid.len();
        GridFunction { grid, values: CMat::<T>::zeros(dim, n) }
    }

    pub fn from_fn(grid: Arc<Grid<T>>, dim: usize, f: impl Fn(T) -> CVec<T>) -> Self {
        let n = grid.len();
        let mut values = CMat::<T>::zeros(dim, n);
        for j in 0..n {
            let v = f(grid.nodes()[j]);
            values.set_column(j, &v);
        }
        GridFunction { grid, values }
    }

    /// Scalar profile `g(x)` times a fixed vector.
    pub fn separable(grid: Arc<Grid<T>>, vector: &CVec<T>, g: impl Fn(T) -> Cx<T>) -> Self {
        Self::from_fn(grid, vector.len(), |x| vector * g(x))
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }
    pub fn len(&self) -> usize {
        self.values.ncols()
    }
    pub fn is_empty(&self) -> bool {
        self.values.ncols() == 0
    }
    pub fn at(&self, j: usize) -> CVec<T> {
        self.values.column(j).into_owned()
    }
    pub fn first(&self) -> CVec<T> {
        self.at(0)
    }
    pub fn last(&self) -> CVec<T> {
        self.at(self.len() - 1)
    }

    /// Discrete `L^2(a, b; X)` norm with the grid quadrature weights.
    pub fn norm(&self) -> T {
        let w = self.grid.weights();
        let mut s = T::zero();
        for j in 0..self.len() {
            for i in 0..self.dim() {
                s += w[j] * self.values[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn max_norm(&self) -> T {
        let mut s = T::zero();
        for z in self.values.iter() {
            s = s.max(cabs(*z));
        }
        s
    }

    /// Node-major flattening: index `j * dim + i`.
    pub fn flatten(&self) -> CVec<T> {
        CVec::<T>::from_column_slice(self.values.as_slice())
    }

    pub fn from_flat(grid: Arc<Grid<T>>, dim: usize, flat: &CVec<T>) -> Result<Self> {
        let n = grid.len();
        if flat.len() != n * dim {
            return Err(Error::DimensionMismatch { expected: n * dim, got: flat.len() });
        }
        Ok(GridFunction { grid, values: CMat::<T>::from_column_slice(dim, n, flat.as_slice()) })
    }

    /// Quadrature weights repeated per component, matching [`Self::flatten`].
    pub fn flat_weights(grid: &Grid<T>, dim: usize) -> Vec<T> {
        let mut w = Vec::with_capacity(grid.len() * dim);
        for &wj in grid.weights() {
            for _ in 0..dim {
                w.push(wj);
            }
        }
        w
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        GridFunction { grid: self.grid.clone(), values: &self.values * s }
    }

    pub fn add(&self, other: &Self) -> Self {
        GridFunction { grid: self.grid.clone(), values: &self.values + &other.values }
    }

    pub fn sub(&self, other: &Self) -> Self {
        GridFunction { grid: self.grid.clone(), values: &self.values - &other.values }
    }

    /// Values at arbitrary points by barycentric interpolation.
    pub fn interpolate(&self, points: &[T]) -> CMat<T> {
        let e = self.grid.interp_matrix(points).map(|x| Cx::new(x, T::zero()));
        &self.values * e.transpose()
    }

    /// Ratio of the trailing Chebyshev coefficients to the largest one
    /// (per component, maximised); `None` on uniform grids.
    pub fn chebyshev_tail(&self) -> Option<f64> {
        if self.grid.kind() != GridKind::Chebyshev {
            return None;
        }
        let n = self.len();
        let nn = n - 1;
        let pi = std::f64::consts::PI;
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            let mut coef = vec![0.0f64; n];
            for (k, ck) in coef.iter_mut().enumerate() {
                let mut s = num_complex::Complex::new(0.0, 0.0);
                for j in 0..n {
                    let wj = if j == 0 || j == nn { 0.5 } else { 1.0 };
                    let v = self.values[(i, j)];
                    let c = (pi * (j * k) as f64 / nn as f64).cos();
                    s += num_complex::Complex::new(to_f64(v.re), to_f64(v.im)) * (wj * c);
                }
                *ck = s.norm() * 2.0 / nn as f64;
            }
            let top = coef.iter().cloned().fold(0.0, f64::max);
            if top == 0.0 {
                continue;
            }
            let tail_start = n - (n / 8).max(2);
            let tail = coef[tail_start..].iter().cloned().fold(0.0, f64::max);
            worst = worst.max(tail / top);
        }
        Some(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn clenshaw_curtis_integrates_polynomials() {
        let g = Grid::<f64>::chebyshev(0.0, 2.0, 17).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let cubic: f64 = g.nodes().iter().zip(g.weights()).map(|(x, w)| w * x.powi(7)).sum();
        assert!((cubic - 2f64.powi(8) / 8.0).abs() < 1e-12);
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.nodes()[16], 2.0);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // degree 14 is integrated exactly
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m - 2.0 / 15.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn uniform_grid_weights_sum() {
        let g = Grid::<f64>::new(GridKind::Uniform, 1.0, 4.0, 31).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 3.0).abs() < 1e-14);
        let f = GridFunction::separable(g.clone(), &CVec::from_element(1, cx(1.0, 0.0)), |x| cx(x.sin(), 0.0));
        let v = f.interpolate(&[2.345]);
        assert!((v[(0, 0)].re - 2.345f64.sin()).abs() < 1e-6);
    }

    #[test]
    fn barycentric_is_exact_on_polynomials() {
        let g = Grid::<f64>::chebyshev(-1.0, 3.0, 12).unwrap();
        let f = GridFunction::separable(g, &CVec::from_element(1, cx(1.0, 0.0)), |x| cx(x.powi(5) - 2.0 * x, 0.0));
        let pts = [0.123, 2.9, -0.99];
        let v = f.interpolate(&pts);
        for (i, x) in pts.iter().enumerate() {
            assert!((v[(0, i)].re - (x.powi(5) - 2.0 * x)).abs() < 1e-11);
        }
    }

    #[test]
    fn flatten_round_trip_is_node_major() {
        let g = Grid::<f64>::chebyshev(0.0, 1.0, 6).unwrap();
        let f = GridFunction::from_fn(g.clone(), 2, |x| CVec::from_vec(vec![cx(x, 0.0), cx(0.0, x)]));
        let flat = f.flatten();
        assert_eq!(flat[3], f.values[(1, 1)]);
        let back = GridFunction::from_flat(g, 2, &flat).unwrap();
        assert_eq!(back.values, f.values);
    }

    #[test]
    fn chebyshev_tail_detects_underresolution() {
        let g = Grid::<f64>::chebyshev(0.0, 1.0, 16).unwrap();
        let one = CVec::from_element(1, cx(1.0, 0.0));
        let smooth = GridFunction::separable(g.clone(), &one, |x| cx(x.exp(), 0.0));
        assert!(smooth.chebyshev_tail().unwrap() < 1e-10);
        let rough = GridFunction::separable(g, &one, |x| cx((80.0 * x).sin(), 0.0));
        assert!(rough.chebyshev_tail().unwrap() > 1e-2);
    }
}
