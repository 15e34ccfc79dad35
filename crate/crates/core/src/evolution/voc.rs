use crate::error::{Error, Result};
use crate::grid::gauss_legendre;
use crate::linalg::{fro, vnorm, CMat, CVec};
use crate::operator::OperatorHandle;
use crate::scalar::{cr, real, to_f64, Real};

/// Gap between `(e^{x L2} - e^{x L1}) psi` and the Duhamel form
/// `int_0^x e^{(x-s) L1} B e^{s L2} psi ds` over the points `xs`, with the
/// integral by composite Gauss-Legendre quadrature.
pub fn variation_of_constants_check<T: Real>(
    l1: &OperatorHandle<T>,
    l2: &OperatorHandle<T>,
    b: &OperatorHandle<T>,
    psi: &CVec<T>,
    xs: &[T],
) -> Result<f64> {
    let n = l1.dim();
    if l2.dim() != n || b.dim() != n || psi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: psi.len() });
    }
    let split = l2.matrix() - l1.matrix() - b.matrix();
    let scale = to_f64(fro(l2.matrix())).max(1.0);
    if to_f64(fro(&split)) > 1e-12 * scale {
        return Err(Error::Invalid("L2 = L1 + B does not hold".into()));
    }
    let (gx, gw) = gauss_legendre(8);
    let rho = to_f64(l1.norm()).max(to_f64(l2.norm()));
    let mut worst = 0.0f64;
    for &x in xs {
        let direct: CVec<T> = (l2.exp_matrix(x) - l1.exp_matrix(x)) * psi;
        let xf = to_f64(x);
        let panels = ((xf.abs() * rho).ceil() as usize).max(1) * 2;
        let h = xf / panels as f64;
        let bpsi = b.matrix();
        let mut acc = CVec::<T>::zeros(n);
        for p in 0..panels {
            let lo = p as f64 * h;
            for (node, weight) in gx.iter().zip(&gw) {
                let s = lo + 0.5 * h * (node + 1.0);
                let left: CMat<T> = l1.exp_matrix(real::<T>(xf - s));
                let right: CVec<T> = l2.exp_matrix(real::<T>(s)) * psi;
                acc += (left * (bpsi * right)) * cr(real::<T>(0.5 * h * weight));
            }
        }
        worst = worst.max(to_f64(vnorm(&(direct - acc))));
    }
    Ok(worst)
}
