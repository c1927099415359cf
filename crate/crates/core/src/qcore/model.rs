use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::layout::{ChainLayout, Party};
use super::observable::Observable;
use super::state::{NetworkState, StateKind};
use crate::error::{Error, Result};
use crate::scenario::ChainScenario;

/// One observable of a model; all indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableSlot {
    Alice(usize),
    /// `(bob, input)`.
    Bob(usize, usize),
    Charlie(usize),
}

impl ObservableSlot {
    pub fn party(self) -> Party {
        match self {
            Self::Alice(_) => Party::Alice,
            Self::Bob(t, _) => Party::Bob(t),
            Self::Charlie(_) => Party::Charlie,
        }
    }

    /// Update order of one sweep: every `A_x`, then every Bob input, then
    /// every `C_z`. Edge slots are skipped when `edges` is false.
    pub fn sweep_order(n: usize, edges: bool) -> Vec<Self> {
        let mut out = Vec::with_capacity(4 * n);
        if edges {
            out.extend((0..n).map(Self::Alice));
        }
        out.extend((0..n.saturating_sub(1)).flat_map(|t| [Self::Bob(t, 0), Self::Bob(t, 1)]));
        if edges {
            out.extend((0..n).map(Self::Charlie));
        }
        out
    }
}

/// State plus observables for every party.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumModel {
    scenario: ChainScenario,
    state: NetworkState,
    alice: Vec<Observable>,
    charlie: Vec<Observable>,
    bobs: Vec<[Observable; 2]>,
}

impl QuantumModel {
    pub fn new(
        state: NetworkState,
        alice: Vec<Observable>,
        charlie: Vec<Observable>,
        bobs: Vec<[Observable; 2]>,
    ) -> Result<Self> {
        let layout = *state.layout();
        let scenario = ChainScenario::new(layout.n())?;
        let n = scenario.n();
        if alice.len() != n || charlie.len() != n || bobs.len() != n - 1 {
            return Err(Error::Shape(format!(
                "model has {}/{}/{} observables, n = {n} needs {n}/{n}/{}",
                alice.len(),
                charlie.len(),
                bobs.len(),
                n - 1
            )));
        }
        let check = |obs: &Observable, party: Party| -> Result<()> {
            let dim = layout.slot(party).dim();
            if obs.dim() != dim {
                return Err(Error::Shape(format!(
                    "{party:?} observable has dimension {}, slot has {dim}",
                    obs.dim()
                )));
            }
            Ok(())
        };
        for o in &alice {
            check(o, Party::Alice)?;
        }
        for o in &charlie {
            check(o, Party::Charlie)?;
        }
        for (t, pair) in bobs.iter().enumerate() {
            for o in pair {
                check(o, Party::Bob(t))?;
            }
        }
        Ok(Self {
            scenario,
            state,
            alice,
            charlie,
            bobs,
        })
    }

    pub fn n(&self) -> usize {
        self.scenario.n()
    }

    pub fn scenario(&self) -> &ChainScenario {
        &self.scenario
    }

    pub fn layout(&self) -> &ChainLayout {
        self.state.layout()
    }

    pub fn state(&self) -> &NetworkState {
        &self.state
    }

    pub fn alice(&self) -> &[Observable] {
        &self.alice
    }

    pub fn charlie(&self) -> &[Observable] {
        &self.charlie
    }

    pub fn bobs(&self) -> &[[Observable; 2]] {
        &self.bobs
    }

    /// Every observable in (Alice, Bobs, Charlie) order.
    pub fn observables(&self) -> impl Iterator<Item = &Observable> {
        self.alice
            .iter()
            .chain(self.bobs.iter().flatten())
            .chain(self.charlie.iter())
    }

    pub fn observable(&self, slot: ObservableSlot) -> &Observable {
        match slot {
            ObservableSlot::Alice(x) => &self.alice[x],
            ObservableSlot::Bob(t, y) => &self.bobs[t][y],
            ObservableSlot::Charlie(z) => &self.charlie[z],
        }
    }

    /// Swaps in `o` and returns the previous observable. Dimensions are the
    /// caller's responsibility.
    pub(crate) fn replace(&mut self, slot: ObservableSlot, o: Observable) -> Observable {
        let target = match slot {
            ObservableSlot::Alice(x) => &mut self.alice[x],
            ObservableSlot::Bob(t, y) => &mut self.bobs[t][y],
            ObservableSlot::Charlie(z) => &mut self.charlie[z],
        };
        std::mem::replace(target, o)
    }

    pub fn with_bobs(&self, bobs: Vec<[Observable; 2]>) -> Result<Self> {
        Self::new(
            self.state.clone(),
            self.alice.clone(),
            self.charlie.clone(),
            bobs,
        )
    }

    /// Conjugates one party's observables by `u` and applies `u` to its slot.
    /// Every correlator is unchanged.
    pub fn locally_rotated(&self, party: Party, u: &super::linalg::CMatrix) -> Result<Self> {
        let state = self.state.apply_local_unitary(party, u)?;
        let rotate = |obs: &[Observable]| -> Result<Vec<Observable>> {
            obs.iter().map(|o| o.conjugate(u)).collect()
        };
        let (mut alice, mut charlie, mut bobs) =
            (self.alice.clone(), self.charlie.clone(), self.bobs.clone());
        match party {
            Party::Alice => alice = rotate(&self.alice)?,
            Party::Charlie => charlie = rotate(&self.charlie)?,
            Party::Bob(t) => bobs[t] = [self.bobs[t][0].conjugate(u)?, self.bobs[t][1].conjugate(u)?],
        }
        Self::new(state, alice, charlie, bobs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Serialize for QuantumModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ModelFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuantumModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        ModelFile::deserialize(deserializer)?
            .into_model()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum StateRepr {
    BellChain,
    Dense { amplitudes: Vec<[f64; 2]> },
}

/// On-disk model: layout descriptor, state, and every matrix as rows of
/// `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    n: usize,
    layout: ChainLayout,
    state: StateRepr,
    alice: Vec<Observable>,
    charlie: Vec<Observable>,
    bobs: Vec<[Observable; 2]>,
}

impl From<&QuantumModel> for ModelFile {
    fn from(m: &QuantumModel) -> Self {
        let state = match m.state.kind() {
            StateKind::BellChain => StateRepr::BellChain,
            StateKind::Dense => StateRepr::Dense {
                amplitudes: m.state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
            },
        };
        Self {
            n: m.n(),
            layout: *m.layout(),
            state,
            alice: m.alice.clone(),
            charlie: m.charlie.clone(),
            bobs: m.bobs.clone(),
        }
    }
}

impl ModelFile {
    fn into_model(self) -> Result<QuantumModel> {
        if self.n != self.layout.n() {
            return Err(Error::Validation(format!(
                "model n = {} but layout n = {}",
                self.n,
                self.layout.n()
            )));
        }
        let state = match self.state {
            StateRepr::BellChain => NetworkState::bell_chain(self.layout)?,
            StateRepr::Dense { amplitudes } => NetworkState::from_amplitudes(
                self.layout,
                amplitudes
                    .into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect(),
            )?,
        };
        QuantumModel::new(state, self.alice, self.charlie, self.bobs)
    }
}
