//! Representation-formula solvers for `u'''' + (P+Q) u'' + PQ u = f`.

mod frame;
mod particular;
mod problem;
mod resolvent;
mod solvers;

pub use frame::{
    assemble_frame, assemble_frame_lenient, build_pq_lambda, lambda_frame, on_branch_cut, shifted_parameter, BcFrame,
    FrameResiduals, GridFrame, PqLambda,
};
pub use particular::{fprime_boundary, particular_parts, particular_solution_F, ParticularParts, RESOLUTION_LIMIT};
pub use problem::{theta_of, BcFamily, BoundaryData, ProblemSpec};
pub use resolvent::{resolvent_ai, PreparedResolvent};
pub use solvers::{boundary_residuals, solve, solve_bc1, solve_bc2, solve_bc3, solve_bc4, solve_bc5, BvpSolution};
