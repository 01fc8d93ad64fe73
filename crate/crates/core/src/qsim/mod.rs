//! Exact quantum simulation of the pause-point Hamiltonian
//! `H(s_p) = -(A/2) sum_i X_i + (B/2) H_P`, with energies in GHz.

pub mod gibbs;
pub mod hamiltonian;
pub mod lindblad;
pub mod propagate;
pub mod schedule;
pub mod state;

pub use gibbs::{conditional_quantum_marginal, quantum_gibbs_diag, unconditional_quantum_marginal, MAX_GIBBS_QUBITS};
pub use hamiltonian::{build_pause_hamiltonian, PauseHamiltonian, MAX_PAUSE_QUBITS};
pub use lindblad::{
    bath_beta, lindblad_evolve, lindblad_evolve_operator, DensityMatrix, LindbladSettings, LindbladStats,
    MAX_LINDBLAD_QUBITS,
};
pub use propagate::{evolve, evolve_with, natural_time, PropagationSettings, PropagationStats, Propagator};
pub use schedule::{ScheduleSpec, ScheduleTable};
pub use state::{z_marginal, StateVector};

pub type C64 = num_complex::Complex64;
