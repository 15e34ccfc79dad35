//! Finite-dimensional surrogate operators and their functional calculus.

mod expm;
mod norm;
mod sector;
mod sqrt;

pub use expm::expm;
pub use norm::{operator_norm, power_norm, weighted_matrix};
pub use sector::{log_space, sector_angle_probe, ProbeGrid, ProbeSample, SectorProbe};
pub use sqrt::sqrt_principal;

use crate::error::{Error, Result};
use crate::linalg::{all_finite, eye, fro, inverse_guarded, is_diagonal, scaled_eye, spectral_norm, CMat, CVec};
use crate::scalar::{cabs, cexp, cr, czero, eps, real, to_f64, Cx, Real};
use crate::tolerance::{floor_tol, CONDITION_CAP, EIGVEC_CONDITION_MAX, FACTORIZATION_RESIDUAL};

/// Eigenvector basis `A = V diag(spectrum) V^-1`.
#[derive(Debug, Clone)]
pub struct EigenBasis<T: Real> {
    pub vectors: CMat<T>,
    pub inverse: CMat<T>,
    /// 2-norm condition number of `vectors`.
    pub condition: f64,
}

/// Dense complex square matrix with a validated Schur factorization.
#[derive(Debug, Clone)]
pub struct OperatorHandle<T: Real> {
    matrix: CMat<T>,
    schur_q: CMat<T>,
    schur_t: CMat<T>,
    spectrum: Vec<Cx<T>>,
    eigen: Option<EigenBasis<T>>,
    diagonal: bool,
    normal: bool,
    norm2: T,
    residual: f64,
    label: String,
}

impl<T: Real> OperatorHandle<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }
    pub fn spectrum(&self) -> &[Cx<T>] {
        &self.spectrum
    }
    pub fn schur(&self) -> (&CMat<T>, &CMat<T>) {
        (&self.schur_q, &self.schur_t)
    }
    /// Eigenvector basis when its condition number is at most 1e6.
    pub fn eigen(&self) -> Option<&EigenBasis<T>> {
        self.eigen.as_ref()
    }
    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }
    /// Schur form is diagonal to working precision.
    pub fn is_normal(&self) -> bool {
        self.normal
    }
    pub fn norm(&self) -> T {
        self.norm2
    }
    /// Relative Schur reconstruction residual measured at construction.
    pub fn factorization_residual(&self) -> f64 {
        self.residual
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `f(A)` for a scalar function `f` through the eigenbasis, when one
    /// with acceptable conditioning exists.
    pub fn map_spectral(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> Option<CMat<T>> {
        let n = self.dim();
        if self.diagonal {
            let mut out = CMat::<T>::zeros(n, n);
            for i in 0..n {
                out[(i, i)] = f(self.matrix[(i, i)]);
            }
            return Some(out);
        }
        if self.normal {
            let q = &self.schur_q;
            let mut d = CMat::<T>::zeros(n, n);
            for i in 0..n {
                d[(i, i)] = f(self.schur_t[(i, i)]);
            }
            return Some(q * d * q.adjoint());
        }
        let e = self.eigen.as_ref()?;
        let mut scaled = e.vectors.clone();
        for j in 0..n {
            let fj = f(self.spectrum[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        Some(scaled * &e.inverse)
    }

    /// `exp(tA)` as a matrix.
    pub fn exp_matrix(&self, t: T) -> CMat<T> {
        let n = self.dim();
        if t == T::zero() {
            return eye(n);
        }
        if self.diagonal || self.normal {
            return self.map_spectral(|z| cexp(z * cr(t))).expect("normal operators diagonalize");
        }
        expm(&(&self.matrix * cr(t)))
    }
}

fn eigvecs_from_schur<T: Real>(q: &CMat<T>, t: &CMat<T>) -> CMat<T> {
    let n = t.nrows();
    let small = eps::<T>() * (fro(t) + T::one());
    let mut y = CMat::<T>::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = cr(T::one());
        for i in (0..k).rev() {
            let mut s = czero::<T>();
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lam;
            if cabs(d) < small {
                if cabs(s) < small {
                    continue;
                }
                d = cr(small);
            }
            y[(i, k)] = -s / d;
        }
    }
    let mut v = q * y;
    for j in 0..n {
        let mut s = T::zero();
        for i in 0..n {
            s += v[(i, j)].norm_sqr();
        }
        let s = s.sqrt();
        if s > T::zero() {
            for i in 0..n {
                v[(i, j)] = v[(i, j)] / cr(s);
            }
        }
    }
    v
}

fn condition_2<T: Real>(v: &CMat<T>) -> f64 {
    let svd = v.clone().svd(false, false);
    let sv = &svd.singular_values;
    let mut hi = 0.0f64;
    let mut lo = f64::INFINITY;
    for s in sv.iter() {
        let s = to_f64(*s);
        hi = hi.max(s);
        lo = lo.min(s);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Validates and factorizes a dense complex matrix.
pub fn make_operator<T: Real>(matrix: CMat<T>) -> Result<OperatorHandle<T>> {
    let (rows, cols) = matrix.shape();
    if rows != cols || rows == 0 {
        return Err(Error::NotSquare { rows, cols });
    }
    if !all_finite(&matrix) {
        return Err(Error::NonFinite);
    }
    let n = rows;
    let diagonal = is_diagonal(&matrix);
    let norm2 = if diagonal {
        let mut s = T::zero();
        for i in 0..n {
            s = s.max(cabs(matrix[(i, i)]));
        }
        s
    } else {
        spectral_norm(&matrix)
    };
    let (q, t, residual) = if diagonal {
        (eye::<T>(n), matrix.clone(), 0.0)
    } else {
        let schur = matrix
            .clone()
            .try_schur(eps::<T>(), 0)
            .ok_or_else(|| Error::FactorizationFailure("Schur iteration did not converge".into()))?;
        let (q, t) = schur.unpack();
        let recon = &q * &t * q.adjoint();
        let scale = to_f64(fro(&matrix)).max(f64::MIN_POSITIVE);
        let res = to_f64(fro(&(recon - &matrix))) / scale;
        (q, t, res)
    };
    let tol: T = floor_tol(FACTORIZATION_RESIDUAL);
    if !(residual <= to_f64(tol)) {
        return Err(Error::FactorizationFailure(format!("Schur residual {residual:.3e} exceeds tolerance")));
    }
    let spectrum: Vec<Cx<T>> = (0..n).map(|i| t[(i, i)]).collect();
    let mut off = T::zero();
    for j in 0..n {
        for i in 0..j {
            off = off.max(cabs(t[(i, j)]));
        }
    }
    let normal = diagonal || off <= eps::<T>() * real(16.0) * (norm2 + T::one());
    let eigen = if diagonal {
        Some(EigenBasis { vectors: eye(n), inverse: eye(n), condition: 1.0 })
    } else if normal {
        Some(EigenBasis { vectors: q.clone(), inverse: q.adjoint(), condition: 1.0 })
    } else {
        let v = eigvecs_from_schur(&q, &t);
        let cond = condition_2(&v);
        if cond <= EIGVEC_CONDITION_MAX {
            v.clone().lu().try_inverse().map(|inv| EigenBasis { vectors: v, inverse: inv, condition: cond })
        } else {
            None
        }
    };
    Ok(OperatorHandle {
        matrix,
        schur_q: q,
        schur_t: t,
        spectrum,
        eigen,
        diagonal,
        normal,
        norm2,
        residual,
        label: String::new(),
    })
}

/// `A_0 = d^2/dy^2` on `(0, pi)` with Dirichlet ends, in the sine basis.
pub fn dirichlet_laplacian_modes<T: Real>(n_modes: usize) -> OperatorHandle<T> {
    let n = n_modes.max(1);
    let mut m = CMat::<T>::zeros(n, n);
    for j in 0..n {
        let k = (j + 1) as f64;
        m[(j, j)] = cr(real(-k * k));
    }
    make_operator(m).expect("diagonal operator").with_label("A0")
}

/// Solves `(lambda I - T) x = v`.
pub fn resolvent_apply<T: Real>(op: &OperatorHandle<T>, lambda: Cx<T>, v: &CVec<T>) -> Result<CVec<T>> {
    let n = op.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    if op.diagonal {
        let mut x = v.clone();
        let mut worst = 0.0f64;
        let tn = to_f64(op.norm2) + to_f64(cabs(lambda));
        for i in 0..n {
            let d = lambda - op.matrix[(i, i)];
            let ad = to_f64(cabs(d));
            worst = worst.max(if ad == 0.0 { f64::INFINITY } else { tn / ad });
            x[i] = x[i] / d;
        }
        if !(worst <= CONDITION_CAP) {
            return Err(Error::NearSpectrum { cond: worst });
        }
        return Ok(x);
    }
    let shifted = scaled_eye(n, lambda) - &op.matrix;
    let (inv, _) = inverse_guarded(&shifted, CONDITION_CAP)?;
    Ok(inv * v)
}

/// `(I - T)^-1` with its diagnostics.
#[derive(Debug, Clone)]
pub struct GuardedInverse<T: Real> {
    pub inverse: OperatorHandle<T>,
    /// `||T|| < 1`, the regime where the Neumann series converges.
    pub neumann_safe: bool,
    pub t_norm: f64,
    pub condition: f64,
}

pub fn guarded_inverse_i_minus<T: Real>(op: &OperatorHandle<T>) -> Result<GuardedInverse<T>> {
    let n = op.dim();
    let m = eye::<T>(n) - &op.matrix;
    let (inv, cond) = inverse_guarded(&m, CONDITION_CAP).map_err(|e| match e {
        Error::NearSpectrum { cond } => Error::SingularOrIllConditioned { cond },
        other => other,
    })?;
    let t_norm = to_f64(op.norm2);
    Ok(GuardedInverse { inverse: make_operator(inv)?, neumann_safe: t_norm < 1.0, t_norm, condition: cond })
}

/// `exp(tT) v` for `t >= 0`.
pub fn expm_apply<T: Real>(op: &OperatorHandle<T>, t: T, v: &CVec<T>) -> Result<CVec<T>> {
    let n = op.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    if t < T::zero() {
        return Err(Error::Invalid("expm_apply requires t >= 0".into()));
    }
    if t == T::zero() {
        return Ok(v.clone());
    }
    Ok(op.exp_matrix(t) * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag;
    use crate::scalar::cx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_matrix(n: usize, seed: u64) -> CMat<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMat::<f64>::from_fn(n, n, |_, _| cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn scalar_and_diagonal_spectra() {
        let h = make_operator(diag(&[cx::<f64>(-1.0, 0.0)])).unwrap();
        assert_eq!(h.spectrum(), &[cx(-1.0, 0.0)]);
        let h = dirichlet_laplacian_modes::<f64>(3);
        let s: Vec<f64> = h.spectrum().iter().map(|z| z.re).collect();
        assert_eq!(s, vec![-1.0, -4.0, -9.0]);
        assert!(h.spectrum().iter().all(|z| z.re <= -1.0));
    }

    #[test]
    fn random_schur_residual() {
        let a = random_matrix(8, 11);
        let h = make_operator(a.clone()).unwrap();
        let (q, t) = h.schur();
        let rel = fro(&(q * t * q.adjoint() - &a)) / fro(&a);
        assert!(rel <= 1e-12, "{rel}");
    }

    #[test]
    fn rejects_nonfinite() {
        let a = diag(&[cx::<f64>(f64::NAN, 0.0)]);
        assert_eq!(make_operator(a).unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn expm_apply_examples() {
        let h = make_operator(diag(&[cx::<f64>(-1.0, 0.0)])).unwrap();
        let r = expm_apply(&h, 1.0, &CVec::from_element(1, cx(1.0, 0.0))).unwrap();
        assert!((r[0].re - (-1.0f64).exp()).abs() < 1e-15);
        let h = make_operator(diag(&[cx::<f64>(-1.0, 0.0), cx(-4.0, 0.0)])).unwrap();
        let v = CVec::from_element(2, cx(1.0, 0.0));
        let r = expm_apply(&h, 0.5, &v).unwrap();
        assert!((r[0].re - (-0.5f64).exp()).abs() < 1e-15);
        assert!((r[1].re - (-2.0f64).exp()).abs() < 1e-15);
        let g = make_operator(random_matrix(5, 3)).unwrap();
        let v = CVec::from_fn(5, |i, _| cx(i as f64, 1.0));
        assert_eq!(expm_apply(&g, 0.0, &v).unwrap(), v);
        assert!(matches!(expm_apply(&g, 0.0, &CVec::zeros(4)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn resolvent_examples() {
        let h = make_operator(diag(&[cx::<f64>(-1.0, 0.0)])).unwrap();
        let x = resolvent_apply(&h, cx(1.0, 0.0), &CVec::from_element(1, cx(1.0, 0.0))).unwrap();
        assert!((x[0] - cx(0.5, 0.0)).norm() < 1e-16);
        let h = make_operator(diag(&[cx::<f64>(-1.0, 0.0), cx(-4.0, 0.0)])).unwrap();
        let x = resolvent_apply(&h, cx(0.0, 0.0), &CVec::from_element(2, cx(1.0, 0.0))).unwrap();
        assert!((x[0] - cx(1.0, 0.0)).norm() < 1e-16);
        assert!((x[1] - cx(0.25, 0.0)).norm() < 1e-16);
        // random dense case: recompute the residual independently
        let a = random_matrix(6, 5);
        let g = make_operator(a.clone()).unwrap();
        let lam = cx(2.5, -1.5);
        let v = CVec::from_fn(6, |i, _| cx(1.0, i as f64));
        let x = resolvent_apply(&g, lam, &v).unwrap();
        let r = (scaled_eye(6, lam) - &a) * &x - &v;
        let bound = 1e-10 * (lam.norm() + g.norm()) * x.norm();
        assert!(r.norm() <= bound);
        assert!(matches!(resolvent_apply(&h, cx(-4.0, 0.0), &CVec::from_element(2, cx(1.0, 0.0))), Err(Error::NearSpectrum { .. })));
    }

    #[test]
    fn guarded_inverse_examples() {
        let z = make_operator(diag(&[cx::<f64>(0.0, 0.0)])).unwrap();
        let g = guarded_inverse_i_minus(&z).unwrap();
        assert_eq!(g.inverse.matrix()[(0, 0)], cx(1.0, 0.0));
        assert!(g.neumann_safe);
        let h = make_operator(diag(&[cx::<f64>(0.5, 0.0)])).unwrap();
        assert!((guarded_inverse_i_minus(&h).unwrap().inverse.matrix()[(0, 0)] - cx(2.0, 0.0)).norm() < 1e-15);
        let mut a = random_matrix(7, 9);
        let s = spectral_norm(&a);
        a *= cx(0.9 / s, 0.0);
        let t = make_operator(a.clone()).unwrap();
        let g = guarded_inverse_i_minus(&t).unwrap();
        assert!(g.neumann_safe);
        let id = eye::<f64>(7);
        let back = (&id - &a) * g.inverse.matrix() - &id;
        assert!(fro(&back) <= 1e-10);
        let one = make_operator(diag(&[cx::<f64>(1.0, 0.0)])).unwrap();
        assert!(matches!(guarded_inverse_i_minus(&one), Err(Error::SingularOrIllConditioned { .. })));
    }

    #[test]
    fn eigen_basis_reconstructs_nonnormal() {
        let a = CMat::<f64>::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(3.0, 0.0), cx(0.0, 0.0), cx(2.0, 0.0)]);
        let h = make_operator(a.clone()).unwrap();
        assert!(!h.is_normal());
        let back = h.map_spectral(|z| z).unwrap();
        assert!(fro(&(back - a)) < 1e-13);
    }
}
