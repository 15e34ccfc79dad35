use super::{make_operator, OperatorHandle};
use crate::error::{Error, Result};
use crate::linalg::{fro, CMat};
use crate::scalar::{cabs, csqrt, czero, eps, to_f64, Real};
use crate::tolerance::{floor_tol, CUT_MARGIN, IDENTITY};

/// Principal square root: `S^2 = T` with spectrum of `S` in the open right
/// half-plane.
///
/// Uses the eigenbasis when it is well conditioned and the Schur form with
/// the Bjorck-Hammarling recurrence otherwise.
pub fn sqrt_principal<T: Real>(op: &OperatorHandle<T>) -> Result<OperatorHandle<T>> {
    let scale = op.norm() * floor_tol::<T>(CUT_MARGIN) + eps::<T>();
    for z in op.spectrum() {
        if z.re <= T::zero() && z.im.abs() <= scale.max(cabs(*z) * floor_tol::<T>(CUT_MARGIN)) {
            return Err(Error::SpectrumOnCut { re: to_f64(z.re), im: to_f64(z.im) });
        }
    }
    let tol = to_f64(floor_tol::<T>(IDENTITY));
    let a = op.matrix();
    let denom = to_f64(fro(a)).max(f64::MIN_POSITIVE);
    if let Some(s) = op.map_spectral(csqrt) {
        let res = to_f64(fro(&(&s * &s - a))) / denom;
        if res <= tol {
            return make_operator(s);
        }
    }
    let (q, t) = op.schur();
    let r = schur_sqrt_upper(t);
    let s = q * r * q.adjoint();
    make_operator(s)
}

/// Square root of an upper-triangular matrix with no eigenvalues on the cut.
pub(crate) fn schur_sqrt_upper<T: Real>(t: &CMat<T>) -> CMat<T> {
    let n = t.nrows();
    let mut r = CMat::<T>::zeros(n, n);
    for i in 0..n {
        r[(i, i)] = csqrt(t[(i, i)]);
    }
    for d in 1..n {
        for i in 0..(n - d) {
            let j = i + d;
            let mut s = czero::<T>();
            for k in (i + 1)..j {
                s += r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = (t[(i, j)] - s) / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag;
    use crate::scalar::cx;

    #[test]
    fn examples() {
        let s = sqrt_principal(&make_operator(diag(&[cx::<f64>(4.0, 0.0)])).unwrap()).unwrap();
        assert!((s.matrix()[(0, 0)] - cx(2.0, 0.0)).norm() < 1e-15);
        let s = sqrt_principal(&make_operator(diag(&[cx::<f64>(1.0, 2.0)])).unwrap()).unwrap();
        let z = s.matrix()[(0, 0)];
        assert!((z * z - cx(1.0, 2.0)).norm() < 1e-12);
        assert!((z - cx(1.27202, 0.78615)).norm() < 1e-5);
        let s = sqrt_principal(&make_operator(diag(&[cx::<f64>(4.0, 0.0), cx(9.0, 0.0)])).unwrap()).unwrap();
        assert!((s.matrix()[(1, 1)] - cx(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_cut() {
        let h = make_operator(diag(&[cx::<f64>(-1.0, 0.0)])).unwrap();
        assert!(matches!(sqrt_principal(&h), Err(Error::SpectrumOnCut { .. })));
        let h = make_operator(diag(&[cx::<f64>(0.0, 0.0), cx(1.0, 0.0)])).unwrap();
        assert!(matches!(sqrt_principal(&h), Err(Error::SpectrumOnCut { .. })));
    }

    #[test]
    fn jordan_block_uses_schur_route() {
        // [[4, 1], [0, 4]] has an ill-conditioned (defective) eigenbasis.
        let a = CMat::<f64>::from_row_slice(2, 2, &[cx(4.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(4.0, 0.0)]);
        let h = make_operator(a.clone()).unwrap();
        assert!(h.eigen().is_none());
        let s = sqrt_principal(&h).unwrap();
        assert!(fro(&(s.matrix() * s.matrix() - a)) < 1e-13);
        assert!((s.matrix()[(0, 1)] - cx(0.25, 0.0)).norm() < 1e-13);
    }
}
