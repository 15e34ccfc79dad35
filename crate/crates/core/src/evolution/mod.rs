//! The Cauchy problem `v' = A_i v + f`, `v(0) = v0`, through the resolvent:
//! hyperbolic-contour semigroup quadrature and implicit one-step schemes.

pub mod compat;
pub mod contour;
pub mod growth;
pub mod stepping;
pub mod voc;

pub use compat::{compatibility_check, CompatReport};
pub use contour::{
    contour_nodes, opening_angle, semigroup_apply_contour, semigroup_apply_contour_with, ContourParams,
    ContourPropagator,
};
pub use growth::{growth_bound_probe, GrowthReport};
pub use stepping::{check_analytic, evolve, EvolutionSpec, Forcing, Scheme, Trajectory};
pub use voc::variation_of_constants_check;
