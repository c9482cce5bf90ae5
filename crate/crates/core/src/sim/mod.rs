//! Classical and quantum simulators used to verify circuits and to run the
//! period-finding loop.

pub mod bootstrap;
pub mod classical;
pub mod semiclassical;
pub mod statevector;

pub use bootstrap::{quantum_increment_bootstrap, QuantumGate};
pub use classical::{
    check_contract, extract_permutation, run_classical, Contract, Counterexample, Parity, Permutation, Verdict,
    MAX_SWEEP_WIDTH,
};
pub use semiclassical::{run_semiclassical, run_semiclassical_from, Instruction, Program, Record};
pub use statevector::{StateVector, MAX_STATE_WIDTH};
