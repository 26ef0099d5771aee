//! Upper bounds on the stability number and lower bounds on the chromatic
//! number from the Lovász theta SDP, tightened by rounds of separated
//! cutting planes.
//!
//! The pipeline is [`compute_bounds`]: solve theta, add nonnegativity and
//! triangle cuts (BOUND 1), then clique and odd-cycle cuts (BOUND 2). The
//! interior-point solver, separation oracles and exact enumeration oracles
//! are all in this crate.

pub mod cutloop;
pub mod dimacs;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod matrix;
pub mod model;
pub mod reference;
pub mod report;
mod rng;
pub mod separation;
pub mod solver;

pub use cutloop::{
    compute_bounds, compute_bounds_observed, integer_bound, run_phase1, run_phase2, BoundReport,
    FamilyToggles, IterationRecord, LoopConfig, LoopError, Phase, PhaseOutcome, StopReason,
};
pub use dimacs::{parse_dimacs, read_dimacs, write_dimacs};
pub use exact::{check_cut_validity, exact_alpha, exact_alpha_with_limit, exact_chi, ExactError};
pub use generators::GenSpec;
pub use graph::{Cycle, Graph, GraphError, VertexSet};
pub use model::{Cut, CutFamily, Problem, SdpModel};
pub use separation::{CandidateConfig, Candidates};
pub use solver::{certify, solve, PrimalSolution, SolveStatus, SolverConfig};
