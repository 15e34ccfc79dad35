//! Fourth-order abstract boundary-value problems
//! `u'''' + (P + Q) u'' + P Q u = f` on `(a, b)` with values in `X = C^dim`,
//! solved through explicit operator formulas, together with the spectral
//! sweep of the induced operators `A_i` and the Cauchy problem they generate.
//!
//! Everything is generic over the real scalar (`f32`, `f64`); the aliases
//! below fix `f64`.

pub mod bvp;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod kernel;
pub mod linalg;
pub mod operator;
pub mod oracle;
pub mod scalar;
pub mod spectral;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};

pub type Complex64 = scalar::Cx<f64>;
pub type Matrix = linalg::CMat<f64>;
pub type Vector = linalg::CVec<f64>;
pub type Operator = operator::OperatorHandle<f64>;
pub type Grid = grid::Grid<f64>;
pub type GridFunction = grid::GridFunction<f64>;
pub type Problem = bvp::ProblemSpec<f64>;
pub type Frame = bvp::BcFrame<f64>;
pub type Resolvent = bvp::PreparedResolvent<f64>;
pub type Solution = bvp::BvpSolution<f64>;
pub type Evolution = evolution::EvolutionSpec<f64>;
pub type Propagator = evolution::ContourPropagator<f64>;
