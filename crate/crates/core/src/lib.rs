//! Numerical laboratory for n-locality inequalities in linear-chain quantum
//! networks.
//!
//! A chain has `n` independent sources and `n + 1` parties: Alice and Charlie
//! at the ends (each with `n` dichotomic inputs) and `n - 1` central Bobs with
//! two inputs each. The nonlinear functional
//!
//! ```text
//! beta_n = sum_i sqrt(|J_{n,i}|),   i = 1..2^(n-1)
//! J_{n,i} = sum_{x,z} s_i[x] s_i[z] <A_x B^1_{y_1} ... B^{n-1}_{y_{n-1}} C_z>
//! ```
//!
//! is bounded by `alpha(n) = sum_l C(n,l)(n - 2l)` for every n-local model, and
//! by `2^(n-1) sqrt(n)` for every quantum model.
//!
//! Modules:
//!
//! * [`scenario`]: sign encoding and Bob input combinatorics.
//! * [`nlocal`]: classical bounds (closed form, edge brute force, exhaustive
//!   deterministic strategies).
//! * [`qcore`]: observables, Bell-chain states, dense and chain-contracted
//!   correlator evaluators.
//! * [`constructions`]: explicit and condition-solved quantum models.
//! * [`seesaw`]: variational maximization over observables.
//! * [`soscert`]: omega values, SOS gap and optimality residuals.
//! * [`cli`]: the `chainlock` command-line front end.

pub mod cli;
pub mod constructions;
pub mod error;
pub mod nlocal;
pub mod qcore;
pub mod scenario;
pub mod seesaw;
pub mod soscert;

pub use error::{Error, Result};
pub use scenario::{bob_inputs_for_term, build_encoding, BobInputMap, ChainScenario, SignEncoding};
