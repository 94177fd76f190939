//! Minimum task-completion-time resource allocation for NOMA uplink
//! mobile-edge computing.
//!
//! The core solver ([`solve_bss`]) minimizes the worst per-user completion
//! time over offload fractions and transmit powers by bisection on the
//! deadline, checking a convex feasibility subproblem at each midpoint. For
//! two users a Lambert-W closed form ([`solve_two_user`]) gives the same
//! answer analytically. [`grid_search`] is an independent brute-force oracle,
//! and [`baselines`] holds the local-only, full-offload and OFDMA comparison
//! schemes.

pub mod baselines;
pub mod bisection;
pub mod error;
pub mod experiment;
pub mod feasibility;
pub mod lambert;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod two_user;

pub use bisection::{initial_bounds, iteration_count, solve_bss, SolveResult, SolverTag, TraceRow};
pub use error::{Error, Result};
pub use feasibility::{check_feasible, FeasibilityConfig, FeasibilityOutcome};
pub use lambert::lambert_w0;
pub use model::{Allocation, Scenario, UserProfile};
pub use oracle::grid_search;
pub use scenario::{generate, noise_power_w, DistanceModel, GenParams};
pub use two_user::{solve_two_user, ClosedFormSolution, KktCase};
