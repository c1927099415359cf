use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A party of the chain. Bobs are indexed from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob(usize),
    Charlie,
}

/// Contiguous range of qubits held by one party (0-based offset).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub offset: usize,
    pub qubits: usize,
}

impl Slot {
    pub fn dim(&self) -> usize {
        1 << self.qubits
    }
}

/// Qubit layout of the chain.
///
/// Qubits are ordered source-major: source `t` owns `2m` consecutive qubits,
/// the first `m` go to the upstream party and the last `m` to the downstream
/// party, and qubit `j` of one half is paired with qubit `j` of the other. Each
/// party's qubits are therefore contiguous: Alice `[0, m)`, Bob `t` (0-based)
/// `[m + 2mt, 3m + 2mt)`, Charlie `[2mn - m, 2mn)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainLayout {
    n: usize,
    qubits_per_half: usize,
}

impl ChainLayout {
    /// `m = floor(n/2)` Bell pairs per source, with `m = 1` for `n` = 2 and 3.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_qubits_per_half(n, (n / 2).max(1))
    }

    pub fn with_qubits_per_half(n: usize, m: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::ScenarioTooSmall { n });
        }
        if m == 0 || m > 16 {
            return Err(Error::Validation(format!(
                "qubits per half must be in 1..=16, got {m}"
            )));
        }
        Ok(Self {
            n,
            qubits_per_half: m,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn qubits_per_half(&self) -> usize {
        self.qubits_per_half
    }

    /// Local dimension `d = 2^m` of one half of a link.
    pub fn link_dim(&self) -> usize {
        1 << self.qubits_per_half
    }

    pub fn total_qubits(&self) -> usize {
        2 * self.qubits_per_half * self.n
    }

    pub fn slot(&self, party: Party) -> Slot {
        let m = self.qubits_per_half;
        match party {
            Party::Alice => Slot {
                offset: 0,
                qubits: m,
            },
            Party::Bob(t) => Slot {
                offset: m + 2 * m * t,
                qubits: 2 * m,
            },
            Party::Charlie => Slot {
                offset: self.total_qubits() - m,
                qubits: m,
            },
        }
    }

    /// All parties in chain order.
    pub fn parties(&self) -> impl Iterator<Item = Party> {
        std::iter::once(Party::Alice)
            .chain((0..self.n - 1).map(Party::Bob))
            .chain(std::iter::once(Party::Charlie))
    }

    /// 1-based qubit indices of a party's slot.
    pub fn qubit_indices(&self, party: Party) -> Vec<usize> {
        let s = self.slot(party);
        (s.offset + 1..=s.offset + s.qubits).collect()
    }

    pub fn check_party(&self, party: Party) -> Result<()> {
        match party {
            Party::Bob(t) if t + 1 >= self.n => Err(Error::Shape(format!(
                "Bob {t} does not exist for n = {}",
                self.n
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LayoutRepr {
    n: usize,
    qubits_per_half: usize,
    total_qubits: usize,
    alice: Vec<usize>,
    bobs: Vec<Vec<usize>>,
    charlie: Vec<usize>,
}

impl Serialize for ChainLayout {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LayoutRepr {
            n: self.n,
            qubits_per_half: self.qubits_per_half,
            total_qubits: self.total_qubits(),
            alice: self.qubit_indices(Party::Alice),
            bobs: (0..self.n - 1)
                .map(|t| self.qubit_indices(Party::Bob(t)))
                .collect(),
            charlie: self.qubit_indices(Party::Charlie),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChainLayout {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = LayoutRepr::deserialize(deserializer)?;
        let layout = ChainLayout::with_qubits_per_half(repr.n, repr.qubits_per_half)
            .map_err(D::Error::custom)?;
        let consistent = repr.total_qubits == layout.total_qubits()
            && repr.alice == layout.qubit_indices(Party::Alice)
            && repr.charlie == layout.qubit_indices(Party::Charlie)
            && repr.bobs.len() == layout.n - 1
            && repr
                .bobs
                .iter()
                .enumerate()
                .all(|(t, q)| *q == layout.qubit_indices(Party::Bob(t)));
        if !consistent {
            return Err(D::Error::custom("layout descriptor is not a chain layout"));
        }
        Ok(layout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_pairs_per_source() {
        let m: Vec<usize> = (2..=8)
            .map(|n| ChainLayout::new(n).unwrap().qubits_per_half())
            .collect();
        assert_eq!(m, vec![1, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn slots_partition_the_register() {
        for n in 2..=6 {
            for m in 1..=3 {
                let layout = ChainLayout::with_qubits_per_half(n, m).unwrap();
                let mut all: Vec<usize> = layout
                    .parties()
                    .flat_map(|p| layout.qubit_indices(p))
                    .collect();
                let len = all.len();
                all.dedup();
                assert_eq!(all.len(), len);
                assert_eq!(all, (1..=2 * m * n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn trilocal_slots() {
        let l = ChainLayout::new(3).unwrap();
        assert_eq!(l.qubit_indices(Party::Alice), vec![1]);
        assert_eq!(l.qubit_indices(Party::Bob(0)), vec![2, 3]);
        assert_eq!(l.qubit_indices(Party::Bob(1)), vec![4, 5]);
        assert_eq!(l.qubit_indices(Party::Charlie), vec![6]);
        assert!(l.check_party(Party::Bob(2)).is_err());
    }

    #[test]
    fn serde_rejects_inconsistent_descriptor() {
        let l = ChainLayout::new(4).unwrap();
        let mut v = serde_json::to_value(l).unwrap();
        let back: ChainLayout = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(back, l);
        v["total_qubits"] = serde_json::json!(3);
        assert!(serde_json::from_value::<ChainLayout>(v).is_err());
    }
}
