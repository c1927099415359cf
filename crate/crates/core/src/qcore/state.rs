use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layout::{ChainLayout, Party, Slot};
use super::linalg::{self, CMatrix, ZERO};
use crate::error::{Error, Result};

/// Largest register the dense representation will materialize.
pub const DENSE_MAX_QUBITS: usize = 24;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// Product of maximally entangled links, amplitudes materialized on demand.
    BellChain,
    Dense,
}

/// Pure state of the whole chain.
#[derive(Debug, Clone)]
pub struct NetworkState {
    layout: ChainLayout,
    kind: StateKind,
    amplitudes: OnceLock<Arc<Vec<Complex64>>>,
}

impl PartialEq for NetworkState {
    fn eq(&self, other: &Self) -> bool {
        if self.layout != other.layout || self.kind != other.kind {
            return false;
        }
        match self.kind {
            StateKind::BellChain => true,
            StateKind::Dense => self.amplitudes.get() == other.amplitudes.get(),
        }
    }
}

fn check_capacity(layout: &ChainLayout) -> Result<()> {
    if layout.total_qubits() > DENSE_MAX_QUBITS {
        return Err(Error::Capacity {
            what: "total qubits",
            requested: layout.total_qubits(),
            limit: DENSE_MAX_QUBITS,
        });
    }
    Ok(())
}

/// Tensor product of `(|00> + |11>)/sqrt(2)` over all `m * n` links.
pub fn bell_chain_state(n: usize) -> Result<NetworkState> {
    NetworkState::bell_chain(ChainLayout::new(n)?)
}

impl NetworkState {
    pub fn bell_chain(layout: ChainLayout) -> Result<Self> {
        check_capacity(&layout)?;
        Ok(Self {
            layout,
            kind: StateKind::BellChain,
            amplitudes: OnceLock::new(),
        })
    }

    pub fn from_amplitudes(layout: ChainLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_capacity(&layout)?;
        if amplitudes.len() != 1 << layout.total_qubits() {
            return Err(Error::Shape(format!(
                "state has {} amplitudes, layout needs 2^{}",
                amplitudes.len(),
                layout.total_qubits()
            )));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!("state norm is {norm}, not 1")));
        }
        Ok(Self::dense_unchecked(layout, amplitudes))
    }

    fn dense_unchecked(layout: ChainLayout, amplitudes: Vec<Complex64>) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(Arc::new(amplitudes));
        Self {
            layout,
            kind: StateKind::Dense,
            amplitudes: cell,
        }
    }

    pub fn layout(&self) -> &ChainLayout {
        &self.layout
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn is_bell_chain(&self) -> bool {
        self.kind == StateKind::BellChain
    }

    pub fn amplitudes(&self) -> Arc<Vec<Complex64>> {
        self.amplitudes
            .get_or_init(|| Arc::new(bell_chain_amplitudes(&self.layout)))
            .clone()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes())
    }

    /// Applies `u` to one party's slot; the result is a dense state.
    pub fn apply_local_unitary(&self, party: Party, u: &CMatrix) -> Result<Self> {
        self.layout.check_party(party)?;
        let slot = self.layout.slot(party);
        if u.nrows() != slot.dim() || u.ncols() != slot.dim() {
            return Err(Error::Shape(format!(
                "unitary is {}x{}, slot has dimension {}",
                u.nrows(),
                u.ncols(),
                slot.dim()
            )));
        }
        let unitarity = linalg::max_abs(&(u * u.adjoint() - linalg::identity(slot.dim())));
        if unitarity > 1e-10 {
            return Err(Error::Validation(format!("matrix is not unitary ({unitarity:e})")));
        }
        let out = apply_local(&self.amplitudes(), self.layout.total_qubits(), slot, u);
        Ok(Self::dense_unchecked(self.layout, out))
    }

    /// Reduced density matrix of one party.
    pub fn reduced_density(&self, party: Party) -> Result<CMatrix> {
        self.layout.check_party(party)?;
        let slot = self.layout.slot(party);
        let dim = slot.dim();
        if self.is_bell_chain() {
            // every half-link is maximally mixed
            return Ok(linalg::identity(dim).scale(1.0 / dim as f64));
        }
        let amps = self.amplitudes();
        let post = 1usize << (self.layout.total_qubits() - slot.offset - slot.qubits);
        let pre = 1usize << slot.offset;
        let mut rho = CMatrix::zeros(dim, dim);
        for p in 0..pre {
            for q in 0..post {
                for r in 0..dim {
                    let a = amps[(p * dim + r) * post + q];
                    if a == ZERO {
                        continue;
                    }
                    for c in 0..dim {
                        rho[(r, c)] += a * amps[(p * dim + c) * post + q].conj();
                    }
                }
            }
        }
        Ok(rho)
    }
}

fn norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn bell_chain_amplitudes(layout: &ChainLayout) -> Vec<Complex64> {
    let d = layout.link_dim();
    let n = layout.n();
    let mut out = vec![ZERO; 1 << layout.total_qubits()];
    let value = Complex64::new((d as f64).powf(-(n as f64) / 2.0), 0.0);
    let links = d.pow(n as u32);
    for mut k in 0..links {
        let mut index = 0usize;
        let mut digits = Vec::with_capacity(n);
        for _ in 0..n {
            digits.push(k % d);
            k /= d;
        }
        for &digit in digits.iter().rev() {
            index = index * d * d + digit * d + digit;
        }
        out[index] = value;
    }
    out
}

/// `(I ⊗ op ⊗ I) |amps>` with `op` acting on `slot`.
pub(crate) fn apply_local(
    amps: &[Complex64],
    total_qubits: usize,
    slot: Slot,
    op: &CMatrix,
) -> Vec<Complex64> {
    let dim = slot.dim();
    let post = 1usize << (total_qubits - slot.offset - slot.qubits);
    let block = dim * post;
    let mut out = vec![ZERO; amps.len()];
    out.par_chunks_mut(block)
        .zip(amps.par_chunks(block))
        .for_each(|(dst, src)| {
            for r in 0..dim {
                let row = &mut dst[r * post..(r + 1) * post];
                for c in 0..dim {
                    let coeff = op[(r, c)];
                    if coeff == ZERO {
                        continue;
                    }
                    let col = &src[c * post..(c + 1) * post];
                    for (o, s) in row.iter_mut().zip(col) {
                        *o += coeff * s;
                    }
                }
            }
        });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilocal_chain_amplitudes() {
        let s = bell_chain_state(2).unwrap();
        let amps = s.amplitudes();
        assert_eq!(amps.len(), 16);
        for (idx, a) in amps.iter().enumerate() {
            let expected = if [0b0000, 0b0011, 0b1100, 0b1111].contains(&idx) {
                0.5
            } else {
                0.0
            };
            assert!((a.re - expected).abs() < 1e-15 && a.im == 0.0, "index {idx}");
        }
    }

    #[test]
    fn norms_and_capacity() {
        assert!((bell_chain_state(3).unwrap().norm() - 1.0).abs() < 1e-12);
        let s4 = bell_chain_state(4).unwrap();
        assert_eq!(s4.layout().total_qubits(), 16);
        assert!((s4.norm() - 1.0).abs() < 1e-12);
        assert!(matches!(bell_chain_state(6), Err(Error::Capacity { .. })));
    }

    #[test]
    fn four_source_links_have_full_schmidt_rank() {
        let s4 = bell_chain_state(4).unwrap();
        let dense = NetworkState::from_amplitudes(*s4.layout(), s4.amplitudes().to_vec()).unwrap();
        let rho = dense.reduced_density(Party::Alice).unwrap();
        let (values, _) = linalg::hermitian_eigen(&rho);
        assert_eq!(values.len(), 4);
        assert!(values.iter().all(|v| (v - 0.25).abs() < 1e-12));
        let rho_bob = dense.reduced_density(Party::Bob(1)).unwrap();
        assert!(linalg::max_abs(&(rho_bob - linalg::identity(16).scale(1.0 / 16.0))) < 1e-12);
    }

    #[test]
    fn rejects_bad_amplitudes() {
        let l = ChainLayout::new(2).unwrap();
        assert!(matches!(
            NetworkState::from_amplitudes(l, vec![ZERO; 16]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            NetworkState::from_amplitudes(l, vec![ZERO; 8]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn local_unitary_keeps_norm() {
        let s = bell_chain_state(2).unwrap();
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[linalg::ONE, linalg::ONE, linalg::ONE, -linalg::ONE],
        )
        .scale(0.5f64.sqrt());
        let t = s.apply_local_unitary(Party::Charlie, &h).unwrap();
        assert_eq!(t.kind(), StateKind::Dense);
        assert!((t.norm() - 1.0).abs() < 1e-12);
        assert!(s.apply_local_unitary(Party::Bob(0), &h).is_err());
        assert!(s.apply_local_unitary(Party::Alice, &linalg::pauli_x().scale(2.0)).is_err());
    }
}
