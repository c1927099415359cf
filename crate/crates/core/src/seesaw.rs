//! Seesaw maximization of `beta_n` over observables on the Bell chain.
//!
//! One sweep visits every observable in turn (`A_x`, Bob inputs, `C_z`).
//! For the visited observable `O` the functional is linearized around the
//! current correlators,
//!
//! ```text
//! beta ≈ const + sum_i c_i J_i,   c_i = sign(J_i) / (2 sqrt(max(|J_i|, 1e-12)))
//! ```
//!
//! and `O` is replaced by the sign of the resulting effective operator, which
//! maximizes the linearization exactly. Because `sqrt(|J|)` is concave the
//! linear model can overshoot; an update that lowers `beta` is rejected, so
//! every trace is non-decreasing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::eval::{self, slot_gradient, Evaluator};
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::{ChainLayout, NetworkState, Observable, ObservableSlot, Party, QuantumModel};
use crate::scenario::{build_encoding, BobInputMap, SignEncoding};

/// Largest `n` accepted by [`seesaw_optimize`].
pub const SEESAW_MAX_N: usize = 5;

const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub max_iterations: usize,
    /// Stop once a sweep improves `beta` by less than this.
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
    pub optimize_edges: bool,
    /// Bell pairs per source; `None` uses the default layout.
    pub qubits_per_half: Option<usize>,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-7,
            restarts: 10,
            seed: 0,
            optimize_edges: true,
            qubits_per_half: None,
        }
    }
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.restarts == 0 || self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Validation(format!(
                "seesaw needs max_iterations >= 1, restarts >= 1 and tolerance > 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub restart: usize,
    pub iteration: usize,
    pub beta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeesawReport {
    pub n: usize,
    pub best_beta: f64,
    pub best_restart: usize,
    pub best_model: QuantumModel,
    /// `beta` after every sweep of every restart, iteration 0 being the start.
    pub trace: Vec<TracePoint>,
    /// Whether the best restart met the tolerance before `max_iterations`.
    pub converged: bool,
    pub restart_betas: Vec<f64>,
}

impl SeesawReport {
    pub fn restart_trace(&self, restart: usize) -> impl Iterator<Item = &TracePoint> {
        self.trace.iter().filter(move |p| p.restart == restart)
    }
}

/// Dichotomic observable from the sign of a random Hermitian matrix with
/// standard complex normal entries.
pub fn random_observable<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Observable {
    let s = 0.5f64.sqrt();
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        num_complex::Complex64::new(re * s, im * s)
    });
    Observable::project(&linalg::hermitian_part(&g))
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_model_from(layout: ChainLayout, rng: &mut ChaCha8Rng) -> Result<QuantumModel> {
    let n = layout.n();
    let edge = layout.slot(Party::Alice).dim();
    let bob = edge * edge;
    let alice = (0..n).map(|_| random_observable(rng, edge)).collect();
    let charlie = (0..n).map(|_| random_observable(rng, edge)).collect();
    let bobs = (0..n - 1)
        .map(|_| [random_observable(rng, bob), random_observable(rng, bob)])
        .collect();
    QuantumModel::new(NetworkState::bell_chain(layout)?, alice, charlie, bobs)
}

/// Random model on the default Bell chain; the same seed gives the same model.
pub fn random_model(n: usize, seed: u64) -> Result<QuantumModel> {
    random_model_in(ChainLayout::new(n)?, seed)
}

pub fn random_model_in(layout: ChainLayout, seed: u64) -> Result<QuantumModel> {
    random_model_from(layout, &mut rng_for(seed, 0))
}

fn weights(terms: &[f64]) -> Vec<f64> {
    terms
        .iter()
        .map(|j| {
            let sigma = if *j < 0.0 { -1.0 } else { 1.0 };
            sigma / (2.0 * j.abs().max(WEIGHT_FLOOR).sqrt())
        })
        .collect()
}

struct RestartResult {
    model: QuantumModel,
    beta: f64,
    trace: Vec<TracePoint>,
    converged: bool,
}

fn run_restart(
    layout: ChainLayout,
    config: &SeesawConfig,
    enc: &SignEncoding,
    map: &BobInputMap,
    restart: usize,
) -> Result<RestartResult> {
    let n = layout.n();
    let mut model = random_model_from(layout, &mut rng_for(config.seed, restart as u64))?;
    let evaluate = |m: &QuantumModel| eval::beta_quantum(m, enc, map, Evaluator::Contracted);
    let mut current = evaluate(&model)?;
    let mut trace = vec![TracePoint {
        restart,
        iteration: 0,
        beta: current.beta,
    }];
    let slots = ObservableSlot::sweep_order(n, config.optimize_edges);
    let mut converged = false;
    for iteration in 1..=config.max_iterations {
        let before = current.beta;
        for &slot in &slots {
            let g = slot_gradient(&model, enc, map, &weights(&current.terms), slot);
            let old = model.replace(slot, Observable::project(&g));
            let candidate = evaluate(&model)?;
            if candidate.beta >= current.beta {
                current = candidate;
            } else {
                model.replace(slot, old);
            }
        }
        trace.push(TracePoint {
            restart,
            iteration,
            beta: current.beta,
        });
        if current.beta - before < config.tolerance {
            converged = true;
            break;
        }
    }
    log::debug!("seesaw restart {restart}: beta {}", current.beta);
    Ok(RestartResult {
        model,
        beta: current.beta,
        trace,
        converged,
    })
}

/// Best of `config.restarts` seesaw runs from seeded random models. Restarts
/// run in parallel; the result does not depend on the thread count.
pub fn seesaw_optimize(n: usize, config: &SeesawConfig) -> Result<SeesawReport> {
    config.validate()?;
    if n > SEESAW_MAX_N {
        return Err(Error::Capacity {
            what: "n for the seesaw",
            requested: n,
            limit: SEESAW_MAX_N,
        });
    }
    let layout = match config.qubits_per_half {
        Some(m) => ChainLayout::with_qubits_per_half(n, m)?,
        None => ChainLayout::new(n)?,
    };
    let enc = build_encoding(n)?;
    let map = BobInputMap::new(n)?;
    let runs = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(layout, config, &enc, &map, r))
        .collect::<Result<Vec<_>>>()?;
    let restart_betas: Vec<f64> = runs.iter().map(|r| r.beta).collect();
    let best_restart = restart_betas
        .iter()
        .enumerate()
        .fold(0, |best, (i, b)| if *b > restart_betas[best] { i } else { best });
    let trace = runs.iter().flat_map(|r| r.trace.iter().copied()).collect();
    let best = runs.into_iter().nth(best_restart).expect("restarts >= 1");
    Ok(SeesawReport {
        n,
        best_beta: best.beta,
        best_restart,
        best_model: best.model,
        trace,
        converged: best.converged,
        restart_betas,
    })
}
