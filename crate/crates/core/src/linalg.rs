//! Dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{cabs, cone, cr, czero, is_finite_c, real, to_f64, Cx, Real};

pub type CMat<T> = DMatrix<Cx<T>>;
pub type CVec<T> = DVector<Cx<T>>;

pub fn eye<T: Real>(n: usize) -> CMat<T> {
    CMat::<T>::identity(n, n)
}

pub fn scaled_eye<T: Real>(n: usize, s: Cx<T>) -> CMat<T> {
    CMat::<T>::from_diagonal_element(n, n, s)
}

pub fn diag<T: Real>(d: &[Cx<T>]) -> CMat<T> {
    CMat::<T>::from_diagonal(&CVec::<T>::from_column_slice(d))
}

pub fn all_finite<T: Real>(m: &CMat<T>) -> bool {
    m.iter().all(|z| is_finite_c(*z))
}

/// Maximum absolute column sum.
pub fn norm1<T: Real>(m: &CMat<T>) -> T {
    let mut best = T::zero();
    for j in 0..m.ncols() {
        let mut s = T::zero();
        for i in 0..m.nrows() {
            s += cabs(m[(i, j)]);
        }
        if s > best {
            best = s;
        }
    }
    best
}

pub fn fro<T: Real>(m: &CMat<T>) -> T {
    let mut s = T::zero();
    for z in m.iter() {
        s += z.re * z.re + z.im * z.im;
    }
    s.sqrt()
}

pub fn vnorm<T: Real>(v: &CVec<T>) -> T {
    let mut s = T::zero();
    for z in v.iter() {
        s += z.re * z.re + z.im * z.im;
    }
    s.sqrt()
}

pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    let mut s = T::zero();
    for z in m.iter() {
        let a = cabs(*z);
        if a > s {
            s = a;
        }
    }
    s
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(m: &CMat<T>) -> T {
    if m.nrows() == 0 || m.ncols() == 0 {
        return T::zero();
    }
    let svd = m.clone().svd(false, false);
    let mut s = T::zero();
    for v in svd.singular_values.iter() {
        if *v > s {
            s = *v;
        }
    }
    s
}

pub fn is_diagonal<T: Real>(m: &CMat<T>) -> bool {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j && m[(i, j)] != czero() {
                return false;
            }
        }
    }
    true
}

pub fn commutator_norm<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    fro(&(a * b - b * a))
}

/// Inverse together with the 1-norm condition number `||A||_1 ||A^-1||_1`.
///
/// Fails with `Error::NearSpectrum` when the matrix is singular or the
/// condition number exceeds `cap`; callers remap the error as needed.
pub fn inverse_guarded<T: Real>(a: &CMat<T>, cap: f64) -> Result<(CMat<T>, f64)> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    let inv = match a.clone().lu().try_inverse() {
        Some(inv) if all_finite(&inv) => inv,
        _ => return Err(Error::NearSpectrum { cond: f64::INFINITY }),
    };
    let cond = to_f64(norm1(a)) * to_f64(norm1(&inv));
    if !(cond <= cap) {
        return Err(Error::NearSpectrum { cond });
    }
    Ok((inv, cond))
}

/// Solves `A X = B` by partial-pivot LU, guarded by a condition estimate.
pub fn solve_guarded<T: Real>(a: &CMat<T>, b: &CMat<T>, cap: f64) -> Result<(CMat<T>, f64)> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    let (inv, cond) = inverse_guarded(a, cap)?;
    let lu = a.clone().lu();
    let x = lu.solve(b).unwrap_or_else(|| &inv * b);
    Ok((x, cond))
}

/// `sum_k c_k A^k` by Horner's rule.
pub fn matrix_poly<T: Real>(a: &CMat<T>, coeffs: &[Cx<T>]) -> CMat<T> {
    let n = a.nrows();
    let mut acc = CMat::<T>::zeros(n, n);
    for c in coeffs.iter().rev() {
        acc = a * acc + scaled_eye(n, *c);
    }
    acc
}

/// Relative distance `||A - B||_F / max(||B||_F, 1)`.
pub fn rel_gap<T: Real>(a: &CMat<T>, b: &CMat<T>) -> f64 {
    let d = to_f64(fro(&(a - b)));
    let s = to_f64(fro(b)).max(1.0);
    d / s
}

/// Kronecker product `A (x) B`.
pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::<T>::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == czero() {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[(i * br + p, j * bc + q)] = s * b[(p, q)];
                }
            }
        }
    }
    out
}

pub fn real_matrix<T: Real>(m: &DMatrix<f64>) -> CMat<T> {
    m.map(|x| cr(real::<T>(x)))
}

pub fn one_hot<T: Real>(n: usize, i: usize) -> CVec<T> {
    let mut v = CVec::<T>::zeros(n);
    v[i] = cone();
    v
}
