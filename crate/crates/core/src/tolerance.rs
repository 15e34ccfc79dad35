//! Numerical thresholds used across the crate.
//!
//! | name                    | value  | used for                                      |
//! |-------------------------|--------|-----------------------------------------------|
//! | `FACTORIZATION_RESIDUAL`| 1e-12  | Schur/eigen residual, back-substitution        |
//! | `IDENTITY`              | 1e-10  | operator identities in property checks         |
//! | `CONDITION_CAP`         | 1e12   | resolvent / inversion guards                   |
//! | `EIGVEC_CONDITION_MAX`  | 1e6    | eigen route vs Schur route for matrix functions|
//! | `CUT_MARGIN`            | 1e-12  | relative distance of a spectrum to `(-inf, 0]` |
//! | `PROBE_MARGIN`          | 0.05   | angular margin around a closed sector (rad)    |
//! | `BLOWUP_CAP`            | 1e10   | sector probe values treated as unbounded       |
//!
//! For scalar types coarser than `f64` the residual-type thresholds are
//! floored at a small multiple of machine epsilon (see [`floor_tol`]).

use crate::scalar::{eps, real, Real};

pub const FACTORIZATION_RESIDUAL: f64 = 1e-12;
pub const IDENTITY: f64 = 1e-10;
pub const CONDITION_CAP: f64 = 1e12;
pub const EIGVEC_CONDITION_MAX: f64 = 1e6;
pub const CUT_MARGIN: f64 = 1e-12;
pub const PROBE_MARGIN: f64 = 0.05;
pub const BLOWUP_CAP: f64 = 1e10;
/// Largest `dim * n_nodes` for which maps on grid functions are materialized
/// and normed by a full SVD.
pub const DENSE_MAP_CAP: usize = 2000;
/// Largest `dim * n_nodes` accepted by the dense reference generator.
pub const GENERATOR_CAP: usize = 4000;

/// `max(tol, 64 eps_T)` expressed in `T`.
pub fn floor_tol<T: Real>(tol: f64) -> T {
    let t: T = real(tol);
    let floor = eps::<T>() * real(64.0);
    if t > floor {
        t
    } else {
        floor
    }
}
