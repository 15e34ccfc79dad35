use std::sync::Arc;

use super::frame::{lambda_frame, GridFrame};
use super::problem::{BcFamily, BoundaryData, ProblemSpec};
use super::solvers::{solve, BvpSolution};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::linalg::{eye, inverse_guarded, CMat, CVec};
use crate::operator::OperatorHandle;
use crate::scalar::{ci, cr, to_f64, Cx, Real};
use crate::tolerance::CONDITION_CAP;

/// Affine correction turning the frame's `u'' + P_lambda u` conditions into
/// the operator's `u'' + A u = 0` for BC2.
#[derive(Debug, Clone)]
struct TraceCorrection<T: Real> {
    /// `P_lambda - A = (-k/2 + i sqrt(w)) I`
    s: Cx<T>,
    /// `(I - s S)^-1` with `S` the trace map `(phi_3, phi_4) -> (u(a), u(b))`.
    inv: CMat<T>,
    /// Homogeneous responses to unit `phi_3` (first `dim`) and `phi_4` data.
    responses: Vec<BvpSolution<T>>,
}

/// `(-A_i - lambda I)^-1` on a fixed grid, prepared once per `lambda`.
#[derive(Debug, Clone)]
pub struct PreparedResolvent<T: Real> {
    pub family: BcFamily,
    pub lambda: Cx<T>,
    pub gf: GridFrame<T>,
    correction: Option<TraceCorrection<T>>,
}

fn not_in_resolvent<T: Real>(lambda: Cx<T>, e: Error) -> Error {
    match e {
        Error::BranchCut { .. } => e,
        other => Error::NotInResolventSet { re: to_f64(lambda.re), im: to_f64(lambda.im), reason: other.to_string() },
    }
}

impl<T: Real> PreparedResolvent<T> {
    pub fn new(
        op_a: &OperatorHandle<T>,
        k: T,
        family: BcFamily,
        lambda: Cx<T>,
        grid: Arc<Grid<T>>,
    ) -> Result<Self> {
        let c = grid.b() - grid.a();
        let frame =
            lambda_frame(op_a, k, lambda, c, family.has_exclusion_ball()).map_err(|e| not_in_resolvent(lambda, e))?;
        let gf = frame.on_grid(grid.clone());
        let dim = op_a.dim();
        let correction = if family == BcFamily::Bc2 {
            let w = super::frame::shifted_parameter(k, lambda);
            let s = ci::<T>() * crate::scalar::csqrt(w) - cr(k / (T::one() + T::one()));
            let zero_f = GridFunction::zeros(grid, dim);
            let mut responses = Vec::with_capacity(2 * dim);
            let mut trace = CMat::<T>::zeros(2 * dim, 2 * dim);
            for col in 0..(2 * dim) {
                let mut phi = BoundaryData::zeros(dim);
                let slot = if col < dim { 2 } else { 3 };
                phi.phi[slot][col % dim] = cr(T::one());
                let r = solve(family, &gf, &zero_f, &phi).map_err(|e| not_in_resolvent(lambda, e))?;
                let (ua, ub) = (r.u.first(), r.u.last());
                for i in 0..dim {
                    trace[(i, col)] = ua[i];
                    trace[(dim + i, col)] = ub[i];
                }
                responses.push(r);
            }
            let m = eye::<T>(2 * dim) - trace * s;
            let (inv, _) = inverse_guarded(&m, CONDITION_CAP).map_err(|e| not_in_resolvent(lambda, e))?;
            Some(TraceCorrection { s, inv, responses })
        } else {
            None
        };
        Ok(PreparedResolvent { family, lambda, gf, correction })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.gf.grid
    }

    pub fn dim(&self) -> usize {
        self.gf.frame.dim()
    }

    /// `u = (-A_i - lambda I)^-1 f` with derivatives.
    pub fn apply(&self, f: &GridFunction<T>) -> Result<BvpSolution<T>> {
        let dim = self.dim();
        let zero = BoundaryData::zeros(dim);
        let mut sol = solve(self.family, &self.gf, f, &zero).map_err(|e| not_in_resolvent(self.lambda, e))?;
        if let Some(corr) = &self.correction {
            let mut t0 = CVec::<T>::zeros(2 * dim);
            let (ua, ub) = (sol.u.first(), sol.u.last());
            for i in 0..dim {
                t0[i] = ua[i];
                t0[dim + i] = ub[i];
            }
            let tau = &corr.inv * t0;
            for (col, r) in corr.responses.iter().enumerate() {
                let coeff = tau[col] * corr.s;
                sol.u.values += &r.u.values * coeff;
                sol.du.values += &r.du.values * coeff;
                sol.d2u.values += &r.d2u.values * coeff;
            }
            sol.coefficients = None;
        }
        Ok(sol)
    }

    /// The resolvent as a `(dim n) x (dim n)` matrix on node-major vectors.
    pub fn materialize(&self) -> Result<CMat<T>> {
        let dim = self.dim();
        let n = self.gf.grid.len();
        let size = dim * n;
        let mut out = CMat::<T>::zeros(size, size);
        for col in 0..size {
            let mut e = GridFunction::zeros(self.gf.grid.clone(), dim);
            e.values[(col % dim, col / dim)] = cr(T::one());
            let sol = self.apply(&e)?;
            out.set_column(col, &sol.u.flatten());
        }
        Ok(out)
    }
}

/// `(-A_i - lambda I)^-1 f` for the operator of `spec` (its boundary data
/// are ignored: the operator carries homogeneous conditions).
pub fn resolvent_ai<T: Real>(spec: &ProblemSpec<T>, lambda: Cx<T>, f: &GridFunction<T>) -> Result<GridFunction<T>> {
    let r = PreparedResolvent::new(&spec.op_a, spec.k, spec.family, lambda, f.grid.clone())?;
    Ok(r.apply(f)?.u)
}
