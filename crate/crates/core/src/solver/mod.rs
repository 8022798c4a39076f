//! Navier-Stokes/Euler and transport-diffusion time integration.

mod analytic;
mod config;
mod integrator;
mod job;
mod ns;
mod trajectory;
mod transport;

pub use analytic::{shear, taylor_green};
pub use config::{default_diag_index, SolverConfig};
pub use job::{read_field, InitialData, SolveJob};
pub use ns::{pressure_gradient, pressure_gradient_pair, solve_ns, NsStepper, DIVERGENCE_TOLERANCE};
pub use trajectory::{Trajectory, TrajectoryDiagnostics};
pub use transport::{solve_transport_diffusion, Forcing, TimeField, Velocity, MAX_SAMPLE_SPACING_IN_STEPS};
