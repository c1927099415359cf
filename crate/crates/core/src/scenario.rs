//! Linear-chain combinatorics.
//!
//! Term `i` (1-based) of the functional pairs the sign row `s_i` with the Bob
//! input combination `y^i`. Sign rows come from length-`n` bit strings with a
//! leading zero, in ascending binary order; Bob rows are the length-`(n-1)`
//! binary expansion of `i - 1`, most-significant bit first, with bit 0 mapped
//! to input 1 and bit 1 to input 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Network description: `n` sources, Alice, `n - 1` Bobs, Charlie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainScenario {
    n: usize,
}

impl ChainScenario {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::ScenarioTooSmall { n });
        }
        Ok(Self { n })
    }

    /// Number of independent sources.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Inputs available to Alice and to Charlie.
    pub fn edge_inputs(&self) -> usize {
        self.n
    }

    pub fn central_parties(&self) -> usize {
        self.n - 1
    }

    pub fn central_inputs(&self) -> usize {
        2
    }

    pub fn outcomes(&self) -> usize {
        2
    }

    /// Number of correlator terms, `2^(n-1)`.
    pub fn terms(&self) -> usize {
        1 << (self.n - 1)
    }
}

/// The `2^(n-1) x n` matrix of signs `(-1)^{y^i_x}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignEncoding {
    n: usize,
    signs: Vec<Vec<i8>>,
    bitstrings: Vec<Vec<u8>>,
}

impl SignEncoding {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> usize {
        self.signs.len()
    }

    /// Sign rows, indexed from 0 (term `i` is row `i - 1`).
    pub fn rows(&self) -> &[Vec<i8>] {
        &self.signs
    }

    pub fn row(&self, term: usize) -> &[i8] {
        &self.signs[term]
    }

    pub fn sign(&self, term: usize, input: usize) -> f64 {
        f64::from(self.signs[term][input])
    }

    pub fn bitstrings(&self) -> &[Vec<u8>] {
        &self.bitstrings
    }
}

/// Bob input combinations per term, entries in `{1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BobInputMap {
    n: usize,
    rows: Vec<Vec<u8>>,
}

impl BobInputMap {
    pub fn new(n: usize) -> Result<Self> {
        ChainScenario::new(n)?;
        let terms = 1usize << (n - 1);
        let rows = (0..terms).map(|k| bob_row(n, k)).collect();
        Ok(Self { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Inputs (1 or 2) for 0-based term index `term`.
    pub fn row(&self, term: usize) -> &[u8] {
        &self.rows[term]
    }

    /// 0-based input slot used by Bob `bob` in term `term`.
    pub fn slot(&self, term: usize, bob: usize) -> usize {
        usize::from(self.rows[term][bob] - 1)
    }
}

fn bob_row(n: usize, k: usize) -> Vec<u8> {
    (0..n - 1)
        .map(|t| if (k >> (n - 2 - t)) & 1 == 1 { 2 } else { 1 })
        .collect()
}

pub fn build_encoding(n: usize) -> Result<SignEncoding> {
    ChainScenario::new(n)?;
    let terms = 1usize << (n - 1);
    let mut signs = Vec::with_capacity(terms);
    let mut bitstrings = Vec::with_capacity(terms);
    for v in 0..terms {
        // first bit is always 0, remaining n - 1 bits are the binary expansion of v
        let bits: Vec<u8> = (0..n).map(|x| ((v >> (n - 1 - x)) & 1) as u8).collect();
        signs.push(bits.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect());
        bitstrings.push(bits);
    }
    Ok(SignEncoding {
        n,
        signs,
        bitstrings,
    })
}

/// Central inputs for 1-based term `i`.
pub fn bob_inputs_for_term(n: usize, i: usize) -> Result<Vec<u8>> {
    ChainScenario::new(n)?;
    let terms = 1usize << (n - 1);
    if i == 0 || i > terms {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: terms,
        });
    }
    Ok(bob_row(n, i - 1))
}

/// JSON form used by `--dump-scenario`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDump {
    pub n: usize,
    pub signs: Vec<Vec<i8>>,
    pub bob_inputs: Vec<Vec<u8>>,
}

impl ScenarioDump {
    pub fn new(n: usize) -> Result<Self> {
        let enc = build_encoding(n)?;
        let map = BobInputMap::new(n)?;
        Ok(Self {
            n,
            signs: enc.signs,
            bob_inputs: map.rows,
        })
    }
}
