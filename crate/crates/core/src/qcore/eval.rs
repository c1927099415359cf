//! Correlator evaluation.
//!
//! Two independent routes compute `<psi| A ⊗ B^1 ⊗ .. ⊗ B^{n-1} ⊗ C |psi>`:
//!
//! * **dense**: each local operator is applied to the state vector on its own
//!   slot; the global operator is never formed.
//! * **contracted**: for a chain of maximally entangled links of dimension
//!   `d`, the expectation reduces to a product of transfer matrices. With
//!   `|psi> = d^{-n/2} sum |i_1 i_1 i_2 i_2 ..>`,
//!
//!   ```text
//!   <psi|O|psi> = d^-n sum A[i1',i1] B1[(i1' i2'),(i1 i2)] .. C[in',in]
//!   ```
//!
//!   so Alice's operator becomes a row vector over pairs `(i', i)`, every Bob
//!   becomes a `d^2 x d^2` transfer matrix, and Charlie closes the chain.
//!   Cost is `O(n d^4)` per correlator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::layout::{ChainLayout, Party};
use super::linalg::{CMatrix, ZERO};
use super::model::{ObservableSlot, QuantumModel};
use super::state::{self, NetworkState, DENSE_MAX_QUBITS};
use crate::error::{Error, Result};
use crate::scenario::{BobInputMap, SignEncoding};

/// Imaginary parts below this are dropped.
pub const IMAG_TOL: f64 = 1e-10;
/// `Evaluator::Auto` switches to contraction above this many qubits.
pub const AUTO_DENSE_MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluator {
    Dense,
    Contracted,
    #[default]
    Auto,
}

impl Evaluator {
    /// Concrete evaluator for a state: dense up to 12 qubits, contraction above
    /// (dense if the state is not a Bell chain).
    pub fn resolve(self, state: &NetworkState) -> Evaluator {
        match self {
            Evaluator::Auto => {
                if state.layout().total_qubits() <= AUTO_DENSE_MAX_QUBITS || !state.is_bell_chain() {
                    Evaluator::Dense
                } else {
                    Evaluator::Contracted
                }
            }
            other => other,
        }
    }
}

impl std::str::FromStr for Evaluator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Self::Dense),
            "contracted" => Ok(Self::Contracted),
            "auto" => Ok(Self::Auto),
            other => Err(Error::Usage(format!(
                "unknown evaluator '{other}' (expected dense, contracted or auto)"
            ))),
        }
    }
}

/// Operators for one full-chain expectation value. Matrices need not be
/// Hermitian or dichotomic.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ChainOps<'a> {
    pub alice: &'a CMatrix,
    pub bobs: &'a [&'a CMatrix],
    pub charlie: &'a CMatrix,
}

impl ChainOps<'_> {
    fn check(&self, layout: &ChainLayout) -> Result<()> {
        let n = layout.n();
        if self.bobs.len() != n - 1 {
            return Err(Error::Shape(format!(
                "{} Bob operators for n = {n}",
                self.bobs.len()
            )));
        }
        let check = |m: &CMatrix, party: Party| -> Result<()> {
            let dim = layout.slot(party).dim();
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Shape(format!(
                    "{party:?} operator is {}x{}, slot dimension is {dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            Ok(())
        };
        check(self.alice, Party::Alice)?;
        check(self.charlie, Party::Charlie)?;
        for (t, b) in self.bobs.iter().enumerate() {
            check(b, Party::Bob(t))?;
        }
        Ok(())
    }
}

/// `(A ⊗ B.. ⊗ C)|psi>` as a dense vector.
pub(crate) fn apply_dense(state: &NetworkState, ops: ChainOps<'_>) -> Result<Vec<Complex64>> {
    let layout = state.layout();
    if layout.total_qubits() > DENSE_MAX_QUBITS {
        return Err(Error::Capacity {
            what: "total qubits for dense evaluation",
            requested: layout.total_qubits(),
            limit: DENSE_MAX_QUBITS,
        });
    }
    ops.check(layout)?;
    let total = layout.total_qubits();
    let mut v = state::apply_local(&state.amplitudes(), total, layout.slot(Party::Alice), ops.alice);
    for (t, b) in ops.bobs.iter().enumerate() {
        v = state::apply_local(&v, total, layout.slot(Party::Bob(t)), b);
    }
    Ok(state::apply_local(&v, total, layout.slot(Party::Charlie), ops.charlie))
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn expectation_dense(state: &NetworkState, ops: ChainOps<'_>) -> Result<Complex64> {
    let v = apply_dense(state, ops)?;
    Ok(inner(&state.amplitudes(), &v))
}

/// Alice's operator as a vector over index pairs `(i', i)`.
pub(crate) fn edge_vector(m: &CMatrix) -> Vec<Complex64> {
    let d = m.nrows();
    let mut v = Vec::with_capacity(d * d);
    for ip in 0..d {
        for i in 0..d {
            v.push(m[(ip, i)]);
        }
    }
    v
}

/// `v' = v T_B` for the Bob transfer matrix `T_B[(i',i),(j',j)] = B[(i'j'),(ij)]`.
pub(crate) fn push_left(v: &[Complex64], bob: &CMatrix, d: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; d * d];
    for ip in 0..d {
        for i in 0..d {
            let coeff = v[ip * d + i];
            if coeff == ZERO {
                continue;
            }
            for jp in 0..d {
                for j in 0..d {
                    out[jp * d + j] += coeff * bob[(ip * d + jp, i * d + j)];
                }
            }
        }
    }
    out
}

/// `w' = T_B w`.
pub(crate) fn push_right(bob: &CMatrix, w: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; d * d];
    for ip in 0..d {
        for i in 0..d {
            let mut acc = ZERO;
            for jp in 0..d {
                for j in 0..d {
                    acc += bob[(ip * d + jp, i * d + j)] * w[jp * d + j];
                }
            }
            out[ip * d + i] = acc;
        }
    }
    out
}

pub(crate) fn dot(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    v.iter().zip(w).map(|(a, b)| a * b).sum()
}

pub(crate) fn chain_norm(layout: &ChainLayout) -> f64 {
    (layout.link_dim() as f64).powi(-(layout.n() as i32))
}

pub(crate) fn expectation_contracted(
    state: &NetworkState,
    ops: ChainOps<'_>,
) -> Result<Complex64> {
    if !state.is_bell_chain() {
        return Err(Error::UnsupportedState(
            "chain contraction needs a product of maximally entangled links; use the dense evaluator"
                .into(),
        ));
    }
    let layout = state.layout();
    ops.check(layout)?;
    let d = layout.link_dim();
    let mut v = edge_vector(ops.alice);
    for b in ops.bobs {
        v = push_left(&v, b, d);
    }
    Ok(dot(&v, &edge_vector(ops.charlie)) * chain_norm(layout))
}

pub(crate) fn expectation(
    state: &NetworkState,
    ops: ChainOps<'_>,
    evaluator: Evaluator,
) -> Result<Complex64> {
    match evaluator.resolve(state) {
        Evaluator::Contracted => expectation_contracted(state, ops),
        _ => expectation_dense(state, ops),
    }
}

pub(crate) fn real_part(value: Complex64) -> Result<f64> {
    if value.im.abs() > IMAG_TOL {
        return Err(Error::NumericalConsistency { imag: value.im });
    }
    Ok(value.re)
}

fn correlator_ops<'m>(
    model: &'m QuantumModel,
    x: usize,
    bob_inputs: &[u8],
    z: usize,
) -> Result<(usize, Vec<&'m CMatrix>, usize)> {
    let n = model.n();
    if !(1..=n).contains(&x) || !(1..=n).contains(&z) {
        return Err(Error::Shape(format!("inputs x = {x}, z = {z} outside 1..={n}")));
    }
    if bob_inputs.len() != n - 1 || bob_inputs.iter().any(|y| !(1..=2).contains(y)) {
        return Err(Error::Shape(format!(
            "Bob inputs {bob_inputs:?} are not {} values in {{1, 2}}",
            n - 1
        )));
    }
    let bobs = model
        .bobs()
        .iter()
        .zip(bob_inputs)
        .map(|(pair, y)| pair[usize::from(*y - 1)].matrix())
        .collect();
    Ok((x - 1, bobs, z - 1))
}

/// `<A_x B^1_{y_1} .. C_z>` by local application on the state vector.
/// Inputs are 1-based.
pub fn correlator_dense(model: &QuantumModel, x: usize, bob_inputs: &[u8], z: usize) -> Result<f64> {
    let (x, bobs, z) = correlator_ops(model, x, bob_inputs, z)?;
    let ops = ChainOps {
        alice: model.alice()[x].matrix(),
        bobs: &bobs,
        charlie: model.charlie()[z].matrix(),
    };
    real_part(expectation_dense(model.state(), ops)?)
}

/// Same value as [`correlator_dense`], by transfer-matrix contraction.
pub fn correlator_contracted(
    model: &QuantumModel,
    x: usize,
    bob_inputs: &[u8],
    z: usize,
) -> Result<f64> {
    let (x, bobs, z) = correlator_ops(model, x, bob_inputs, z)?;
    let ops = ChainOps {
        alice: model.alice()[x].matrix(),
        bobs: &bobs,
        charlie: model.charlie()[z].matrix(),
    };
    real_part(expectation_contracted(model.state(), ops)?)
}

/// `Y_i = sum_x s_i[x] O_x`.
pub(crate) fn signed_sum(enc: &SignEncoding, term: usize, obs: &[super::Observable]) -> CMatrix {
    let dim = obs[0].dim();
    obs.iter()
        .enumerate()
        .fold(CMatrix::zeros(dim, dim), |acc, (x, o)| acc + o.matrix().scale(enc.sign(term, x)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaValue {
    pub beta: f64,
    /// `J_{n,i}` in term order.
    pub terms: Vec<f64>,
}

pub(crate) fn check_encoding(model: &QuantumModel, enc: &SignEncoding, map: &BobInputMap) -> Result<()> {
    if enc.n() != model.n() || map.n() != model.n() {
        return Err(Error::Shape(format!(
            "model for n = {} with encoding for n = {} and input map for n = {}",
            model.n(),
            enc.n(),
            map.n()
        )));
    }
    Ok(())
}

/// `J_{n,i}` for every term. Each term is evaluated as one expectation of
/// `Y^A_i ⊗ B_i ⊗ Y^C_i`, which equals the signed sum of the `n^2`
/// correlators by linearity.
pub fn correlator_terms(
    model: &QuantumModel,
    enc: &SignEncoding,
    map: &BobInputMap,
    evaluator: Evaluator,
) -> Result<Vec<f64>> {
    check_encoding(model, enc, map)?;
    (0..enc.terms())
        .map(|i| real_part(expectation(model.state(), term_ops(model, enc, map, i).ops(), evaluator)?))
        .collect()
}

pub fn beta_quantum(
    model: &QuantumModel,
    enc: &SignEncoding,
    map: &BobInputMap,
    evaluator: Evaluator,
) -> Result<BetaValue> {
    let terms = correlator_terms(model, enc, map, evaluator)?;
    Ok(BetaValue {
        beta: beta_from_terms(&terms),
        terms,
    })
}

/// `sum_i sqrt(|J_i|)`, summed in term order.
pub fn beta_from_terms(terms: &[f64]) -> f64 {
    terms.iter().map(|j| j.abs().sqrt()).sum()
}

/// Operator `G` with `<psi|ops|psi> = Tr(O G)` when the operator at `open` is
/// replaced by `O`. Contracts the Bell chain from both ends towards the open
/// slot; the entry of `ops` at `open` is ignored.
pub(crate) fn effective_contracted(layout: &ChainLayout, ops: ChainOps<'_>, open: Party) -> CMatrix {
    let d = layout.link_dim();
    let norm = chain_norm(layout);
    let reshape_t = |v: &[Complex64]| CMatrix::from_fn(d, d, |r, c| v[c * d + r] * norm);
    match open {
        Party::Alice => {
            let mut w = edge_vector(ops.charlie);
            for b in ops.bobs.iter().rev() {
                w = push_right(b, &w, d);
            }
            reshape_t(&w)
        }
        Party::Charlie => {
            let mut v = edge_vector(ops.alice);
            for b in ops.bobs {
                v = push_left(&v, b, d);
            }
            reshape_t(&v)
        }
        Party::Bob(t) => {
            let mut v = edge_vector(ops.alice);
            for b in &ops.bobs[..t] {
                v = push_left(&v, b, d);
            }
            let mut w = edge_vector(ops.charlie);
            for b in ops.bobs[t + 1..].iter().rev() {
                w = push_right(b, &w, d);
            }
            // G[(i d + j), (i' d + j')] = v[(i', i)] w[(j', j)]
            let mut g = CMatrix::zeros(d * d, d * d);
            for ip in 0..d {
                for i in 0..d {
                    let l = v[ip * d + i] * norm;
                    for jp in 0..d {
                        for j in 0..d {
                            g[(i * d + j, ip * d + jp)] = l * w[jp * d + j];
                        }
                    }
                }
            }
            g
        }
    }
}

/// Dense counterpart of [`effective_contracted`] for arbitrary states:
/// `G[c, r] = sum_q conj(psi[r, q]) phi[c, q]` with `phi` the state after
/// applying every operator except the open one.
#[cfg(test)]
pub(crate) fn effective_dense(state: &NetworkState, ops: ChainOps<'_>, open: Party) -> Result<CMatrix> {
    let layout = state.layout();
    let slot = layout.slot(open);
    let id = super::linalg::identity(slot.dim());
    let bobs: Vec<&CMatrix> = ops
        .bobs
        .iter()
        .enumerate()
        .map(|(t, b)| if open == Party::Bob(t) { &id } else { *b })
        .collect();
    let opened = ChainOps {
        alice: if open == Party::Alice { &id } else { ops.alice },
        bobs: &bobs,
        charlie: if open == Party::Charlie { &id } else { ops.charlie },
    };
    let phi = apply_dense(state, opened)?;
    let psi = state.amplitudes();
    let dim = slot.dim();
    let post = 1usize << (layout.total_qubits() - slot.offset - slot.qubits);
    let pre = 1usize << slot.offset;
    let mut g = CMatrix::zeros(dim, dim);
    for p in 0..pre {
        for q in 0..post {
            for r in 0..dim {
                let a = psi[(p * dim + r) * post + q].conj();
                if a == ZERO {
                    continue;
                }
                for c in 0..dim {
                    g[(c, r)] += a * phi[(p * dim + c) * post + q];
                }
            }
        }
    }
    Ok(g)
}

/// Per-term operators of a model: `Y^A_i`, the selected Bob observables and
/// `Y^C_i`.
pub(crate) struct TermOps<'m> {
    pub alice: CMatrix,
    pub bobs: Vec<&'m CMatrix>,
    pub charlie: CMatrix,
}

impl TermOps<'_> {
    pub fn ops(&self) -> ChainOps<'_> {
        ChainOps {
            alice: &self.alice,
            bobs: &self.bobs,
            charlie: &self.charlie,
        }
    }
}

pub(crate) fn term_ops<'m>(model: &'m QuantumModel, enc: &SignEncoding, map: &BobInputMap, i: usize) -> TermOps<'m> {
    TermOps {
        alice: signed_sum(enc, i, model.alice()),
        bobs: model
            .bobs()
            .iter()
            .enumerate()
            .map(|(t, pair)| pair[map.slot(i, t)].matrix())
            .collect(),
        charlie: signed_sum(enc, i, model.charlie()),
    }
}

/// Hermitian `G` such that `sum_i weights[i] J_i = Tr(O G) + const` as a
/// function of the observable `O` in `slot` (Bell-chain states only).
pub(crate) fn slot_gradient(
    model: &QuantumModel,
    enc: &SignEncoding,
    map: &BobInputMap,
    weights: &[f64],
    slot: ObservableSlot,
) -> CMatrix {
    let layout = model.layout();
    let dim = layout.slot(slot.party()).dim();
    let mut g = CMatrix::zeros(dim, dim);
    for (i, w) in weights.iter().enumerate() {
        let coeff = match slot {
            ObservableSlot::Alice(x) => w * enc.sign(i, x),
            ObservableSlot::Charlie(z) => w * enc.sign(i, z),
            ObservableSlot::Bob(t, y) if map.slot(i, t) == y => *w,
            ObservableSlot::Bob(..) => continue,
        };
        if coeff == 0.0 {
            continue;
        }
        let t = term_ops(model, enc, map, i);
        g += effective_contracted(layout, t.ops(), slot.party()).scale(coeff);
    }
    super::linalg::hermitian_part(&g)
}
