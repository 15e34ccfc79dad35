//! Independent brute-force solvers used to validate the formula path.

mod characteristic;
mod collocation;

pub use characteristic::{characteristic_root_solve, sample, CharacteristicSolution, ScalarForcing, ScalarProblem};
pub use collocation::{
    collocation_solve, collocation_solve_system, dense_generator, diff_matrix, ode_residual, CollocationSystem,
    DenseGenerator,
};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::operator::expm;
use crate::scalar::{cr, Real};
use crate::tolerance::GENERATOR_CAP;

/// `e^{tG} v0` by scaling and squaring.
pub fn dense_expm<T: Real>(g: &CMat<T>, t: T, v0: &CVec<T>) -> Result<CVec<T>> {
    if g.nrows() > GENERATOR_CAP {
        return Err(Error::CapExceeded { size: g.nrows(), cap: GENERATOR_CAP });
    }
    if g.nrows() != v0.len() {
        return Err(Error::DimensionMismatch { expected: g.nrows(), got: v0.len() });
    }
    if t == T::zero() {
        return Ok(v0.clone());
    }
    Ok(expm(&(g * cr(t))) * v0)
}
