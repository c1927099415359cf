//! Quantum side of the chain: observables, states, models and correlator
//! evaluation.

pub mod eval;
pub mod layout;
pub mod linalg;
pub mod model;
pub mod observable;
pub mod state;

pub use eval::{
    beta_from_terms, beta_quantum, correlator_contracted, correlator_dense, correlator_terms,
    BetaValue, Evaluator,
};
pub use layout::{ChainLayout, Party, Slot};
pub use model::{ObservableSlot, QuantumModel};
pub use observable::{anticommutator_report, jordan_wigner_set, max_anticommutator, Observable};
pub use state::{bell_chain_state, NetworkState, StateKind, DENSE_MAX_QUBITS};
