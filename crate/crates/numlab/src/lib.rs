//! Finite-difference laboratory for the anisotropic nonlinear heat equation
//! and discrete verification of conservation balance laws.
//!
//! The solver is an explicit conservative scheme in flux form: every face
//! carries the flux f(u_face)·Δu/Δx with u_face the arithmetic mean of the
//! neighboring cells (a harmonic-mean toggle exists), so the sum of interior
//! flux differences telescopes exactly. The time step obeys an adaptive
//! diffusive stability clamp re-evaluated every step.
//!
//! Balance checking evaluates a conserved vector's density and fluxes on the
//! grid (central differences inside, one-sided second-order at the walls,
//! flux values extrapolated to the faces) and accumulates the per-step
//! residual
//!
//! ```text
//! r(t) = [Σ C¹ ΔV](t+Δt) − [Σ C¹ ΔV](t) + Δt·(boundary outflow of C²,C³,C⁴)
//! ```
//!
//! For an exact conservation law, r/Δt shrinks at the scheme's order under
//! grid refinement; a broken law stalls. Refinement levels of a study run in
//! parallel, capped by `CONSLAW_FORGE_THREADS`.

pub mod balance;
pub mod config;
pub mod convergence;
pub mod grid;
pub mod output;
pub mod solver;

pub use balance::{
    discrete_balance, run_balance, run_balance_with_trajectory, BalanceReport, BalanceVector,
};
pub use config::{BoundaryKind, FaceAverage, InitialCondition, SimulationConfig};
pub use convergence::{convergence_study, ConvergenceReport, Reference, StudyError};
pub use grid::Grid;
pub use solver::{solve, SimulationState, SolverError, Trajectory};

/// Thread cap for embarrassingly parallel studies.
pub fn thread_cap() -> usize {
    std::env::var("CONSLAW_FORGE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}
