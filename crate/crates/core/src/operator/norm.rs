use crate::linalg::{spectral_norm, CMat, CVec};
use crate::scalar::{cr, real, to_f64, Real};
use crate::tolerance::DENSE_MAP_CAP;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `D^{1/2} M D^{-1/2}` for `D = diag(weights)`.
pub fn weighted_matrix<T: Real>(m: &CMat<T>, weights: &[T]) -> CMat<T> {
    let mut out = m.clone();
    for j in 0..m.ncols() {
        let wj = weights[j].sqrt();
        for i in 0..m.nrows() {
            let wi = weights[i].sqrt();
            out[(i, j)] = out[(i, j)] * cr(wi / wj);
        }
    }
    out
}

/// Weighted l2 operator norm `sigma_max(D^{1/2} M D^{-1/2})`.
///
/// Full SVD up to the dense cap, power iteration beyond.
pub fn operator_norm<T: Real>(m: &CMat<T>, weights: Option<&[T]>) -> T {
    let w = match weights {
        Some(w) => weighted_matrix(m, w),
        None => m.clone(),
    };
    if w.nrows().max(w.ncols()) <= DENSE_MAP_CAP {
        spectral_norm(&w)
    } else {
        power_norm(&w, 1e-6, 500, 7)
    }
}

/// Largest singular value by power iteration on `M^* M`.
pub fn power_norm<T: Real>(m: &CMat<T>, rel_tol: f64, max_iter: usize, seed: u64) -> T {
    let n = m.ncols();
    if n == 0 {
        return T::zero();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = CVec::<T>::from_fn(n, |_, _| {
        num_complex::Complex::new(real(rng.gen_range(-1.0..1.0)), real(rng.gen_range(-1.0..1.0)))
    });
    let mut sigma = 0.0f64;
    for _ in 0..max_iter {
        let nv = v.norm();
        if nv == T::zero() {
            return T::zero();
        }
        v /= cr(nv);
        let mv = m * &v;
        let next = to_f64(mv.norm());
        v = m.adjoint() * mv;
        let done = (next - sigma).abs() <= rel_tol * 1e-3 * next.max(f64::MIN_POSITIVE);
        sigma = next;
        if done {
            break;
        }
    }
    real(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, eye};
    use crate::scalar::cx;

    #[test]
    fn examples() {
        assert!((operator_norm(&eye::<f64>(4), Some(&[1.0; 4])) - 1.0).abs() < 1e-15);
        let d = diag(&[cx::<f64>(3.0, 0.0), cx(-4.0, 0.0)]);
        assert!((operator_norm(&d, None) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn weights_are_a_similarity() {
        // diagonal matrices are unaffected by the weighting
        let d = diag(&[cx::<f64>(3.0, 1.0), cx(-1.0, 0.0), cx(0.5, 0.0)]);
        let w = [0.1, 2.0, 7.0];
        assert!((operator_norm(&d, Some(&w)) - 10f64.sqrt()).abs() < 1e-14);
    }
}
