//! Time propagation of amplitude vectors through pulse schedules.

mod frame;
mod operator;
mod oracle;
mod run;
mod state;

pub use frame::PhaseFrame;
pub use operator::{free_evolve, propagate_pulse, IntegratorConfig, SystemOperator};
pub use oracle::{dense_hamiltonian, oracle_propagate, ORACLE_MAX_LEVELS};
pub use run::{run_schedule, RecordPolicy, Sample, Trajectory};
pub use state::QuantumState;
