use super::frame::GridFrame;
use super::problem::BoundaryData;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::{CMat, CVec};
use crate::scalar::{cr, real, Real};

/// Largest trailing-coefficient ratio accepted for the forcing before the
/// grid is declared too coarse.
pub const RESOLUTION_LIMIT: f64 = 1e-6;

/// `F_{Phi,f}` with its first two derivatives and the intermediate `v_0`.
#[derive(Debug, Clone)]
pub struct ParticularParts<T: Real> {
    pub value: CMat<T>,
    pub d1: CMat<T>,
    pub d2: CMat<T>,
    pub v0: CMat<T>,
}

impl<T: Real> ParticularParts<T> {
    pub fn fprime_a(&self) -> CVec<T> {
        self.d1.column(0).into_owned()
    }
    pub fn fprime_b(&self) -> CVec<T> {
        self.d1.column(self.d1.ncols() - 1).into_owned()
    }
}

/// Solves `y'' - X^2 y = g` with `y(a) = ya`, `y(b) = yb` for `X` one of the
/// frame generators: returns `(y, y')` at the nodes.
fn dirichlet_pass<T: Real>(
    kernel: &crate::kernel::SemigroupKernel<T>,
    x: &CMat<T>,
    x_inv: &CMat<T>,
    inv_one_minus_e2: &CMat<T>,
    g: &CMat<T>,
    ya: &CVec<T>,
    yb: &CVec<T>,
) -> (CMat<T>, CMat<T>) {
    let n = g.ncols();
    let half = cr::<T>(real(0.5));
    let (lg, rg) = kernel.convolve(g);
    let i1 = rg.column(0).into_owned();
    let i2 = lg.column(n - 1).into_owned();
    let ec = kernel.full();
    let da = ya - x_inv * &i1 * half;
    let db = yb - x_inv * &i2 * half;
    let ka = inv_one_minus_e2 * (&da - ec * &db);
    let kb = inv_one_minus_e2 * (&db - ec * &da);
    let left = kernel.sweep_from_a(&ka);
    let right = kernel.sweep_from_b(&kb);
    let y = &left + &right + x_inv * (&lg + &rg) * half;
    let dy = x * (&left - &right) + (&lg - &rg) * half;
    (y, dy)
}

/// Particular solution for BC1-type data: `u(a) = phi_1`, `u(b) = phi_2`,
/// `u''(a) = phi_3`, `u''(b) = phi_4`.
pub fn particular_parts<T: Real>(gf: &GridFrame<T>, f: &CMat<T>, phi: &BoundaryData<T>) -> ParticularParts<T> {
    let fr = &gf.frame;
    let p = fr.p.matrix();
    let d3 = &phi.phi[2] + p * &phi.phi[0];
    let d4 = &phi.phi[3] + p * &phi.phi[1];
    let (v0, _) = dirichlet_pass(&gf.kl, fr.l.matrix(), &fr.l_inv, fr.w.matrix(), f, &d3, &d4);
    let (value, d1) = dirichlet_pass(&gf.km, fr.m.matrix(), &fr.m_inv, fr.z.matrix(), &v0, &phi.phi[0], &phi.phi[1]);
    let d2 = &v0 - p * &value;
    ParticularParts { value, d1, d2, v0 }
}

fn check_forcing<T: Real>(f: &GridFunction<T>) -> Result<()> {
    if let Some(tail) = f.chebyshev_tail() {
        if tail > RESOLUTION_LIMIT {
            return Err(Error::QuadratureBreakdown(format!(
                "forcing is under-resolved on {} nodes (trailing coefficient ratio {tail:.3e})",
                f.len()
            )));
        }
    }
    Ok(())
}

/// `F_{Phi,f}` sampled on the grid.
#[allow(non_snake_case)]
pub fn particular_solution_F<T: Real>(
    gf: &GridFrame<T>,
    f: &GridFunction<T>,
    phi: &BoundaryData<T>,
) -> Result<GridFunction<T>> {
    check_dims(gf, f, phi)?;
    check_forcing(f)?;
    let parts = particular_parts(gf, &f.values, phi);
    GridFunction::new(gf.grid.clone(), parts.value)
}

/// `(F'_{0,f}(a), F'_{0,f}(b))` from the closed-form derivative.
pub fn fprime_boundary<T: Real>(gf: &GridFrame<T>, f: &GridFunction<T>) -> Result<(CVec<T>, CVec<T>)> {
    let zero = BoundaryData::zeros(gf.frame.dim());
    check_dims(gf, f, &zero)?;
    let parts = particular_parts(gf, &f.values, &zero);
    Ok((parts.fprime_a(), parts.fprime_b()))
}

pub(crate) fn check_dims<T: Real>(gf: &GridFrame<T>, f: &GridFunction<T>, phi: &BoundaryData<T>) -> Result<()> {
    let d = gf.frame.dim();
    if f.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: f.dim() });
    }
    if f.len() != gf.grid.len() {
        return Err(Error::DimensionMismatch { expected: gf.grid.len(), got: f.len() });
    }
    if phi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: phi.dim() });
    }
    Ok(())
}
