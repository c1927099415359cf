//! Classical (n-local) bounds on the chain functional.
//!
//! Three routes to the same number:
//!
//! * [`alpha_closed_form`]: `sum_{l=0}^{floor(n/2)} C(n,l) (n - 2l)`.
//! * [`alpha_bruteforce`]: maximize `sum_i |<s_i, a>|` over every edge
//!   assignment `a in {+1,-1}^n`.
//! * [`lhv_exhaustive_max`]: maximize the functional over every
//!   deterministic strategy of all `n + 1` parties, evaluated at the behavior
//!   level.
//!
//! Only deterministic strategies are enumerated. Every n-local behavior obeys
//! the analytic bound `alpha`, and deterministic strategies attain it. Whether
//! stochastic strategies could exceed the deterministic maximum of this
//! nonlinear functional is not examined by the search itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{build_encoding, BobInputMap, ChainScenario, SignEncoding};

/// Largest `n` accepted by [`alpha_bruteforce`].
pub const EDGE_BRUTEFORCE_MAX_N: usize = 24;
/// Largest `n` accepted by [`lhv_exhaustive_max`].
pub const EXHAUSTIVE_MAX_N: usize = 4;
/// Largest `n` for which the closed form fits in a `u64`.
pub const CLOSED_FORM_MAX_N: usize = 60;

const NORMALIZATION_TOL: f64 = 1e-12;

/// One classical assignment of `+1`/`-1` outputs per party and input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub alice_outputs: Vec<i8>,
    pub charlie_outputs: Vec<i8>,
    /// `bob_outputs[m][y - 1]` for central party `m`.
    pub bob_outputs: Vec<[i8; 2]>,
}

impl DeterministicStrategy {
    /// The strategy where every party always outputs `+1`.
    pub fn all_plus(n: usize) -> Self {
        Self {
            alice_outputs: vec![1; n],
            charlie_outputs: vec![1; n],
            bob_outputs: vec![[1, 1]; n.saturating_sub(1)],
        }
    }

    /// Strategy number `index` in lexicographic order over the bits of
    /// (alice, charlie, bobs), most significant first; bit 0 means `+1`.
    pub fn from_index(n: usize, index: u64) -> Self {
        let total_bits = 2 * n + 2 * (n - 1);
        let bit = |pos: usize| -> i8 {
            if (index >> (total_bits - 1 - pos)) & 1 == 0 {
                1
            } else {
                -1
            }
        };
        let alice_outputs = (0..n).map(bit).collect();
        let charlie_outputs = (0..n).map(|z| bit(n + z)).collect();
        let bob_outputs = (0..n - 1)
            .map(|m| [bit(2 * n + 2 * m), bit(2 * n + 2 * m + 1)])
            .collect();
        Self {
            alice_outputs,
            charlie_outputs,
            bob_outputs,
        }
    }

    /// Number of deterministic strategies for a chain of `n` sources.
    pub fn count(n: usize) -> u64 {
        1u64 << (2 * n + 2 * (n - 1))
    }

    fn check(&self, scenario: &ChainScenario) -> Result<()> {
        let n = scenario.n();
        if self.alice_outputs.len() != n
            || self.charlie_outputs.len() != n
            || self.bob_outputs.len() != n - 1
        {
            return Err(Error::Shape(format!(
                "strategy has {}/{}/{} entries, scenario needs {n}/{n}/{}",
                self.alice_outputs.len(),
                self.charlie_outputs.len(),
                self.bob_outputs.len(),
                n - 1
            )));
        }
        let all = self
            .alice_outputs
            .iter()
            .chain(&self.charlie_outputs)
            .chain(self.bob_outputs.iter().flatten());
        for &v in all {
            if v != 1 && v != -1 {
                return Err(Error::Validation(format!("strategy output {v} is not +-1")));
            }
        }
        Ok(())
    }
}

/// Conditional distribution `P(a, b_1..b_{n-1}, c | x, y_1..y_{n-1}, z)`.
///
/// Inputs `x`, `z` are 1-based in `1..=n`, Bob inputs are in `{1, 2}`,
/// outcomes are bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    n: usize,
    probs: Vec<f64>,
}

impl Behavior {
    fn input_count(n: usize) -> usize {
        (n * n) << (n - 1)
    }

    fn outcome_count(n: usize) -> usize {
        1 << (n + 1)
    }

    fn input_index(&self, x: usize, ys: usize, z: usize) -> usize {
        ((x << (self.n - 1)) + ys) * self.n + z
    }

    /// Wraps a raw table laid out as `[input][outcome]`, where the input index
    /// is `(x, y-bits, z)` and the outcome index is the bit string
    /// `a b_1 .. b_{n-1} c` (most significant first).
    pub fn from_table(n: usize, probs: Vec<f64>) -> Result<Self> {
        ChainScenario::new(n)?;
        let expected = Self::input_count(n) * Self::outcome_count(n);
        if probs.len() != expected {
            return Err(Error::Shape(format!(
                "behavior table has {} entries, expected {expected}",
                probs.len()
            )));
        }
        Ok(Self { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, outcome: &[u8], x: usize, ys: &[u8], z: usize) -> f64 {
        let n = self.n;
        assert_eq!(outcome.len(), n + 1, "outcome tuple length");
        assert_eq!(ys.len(), n - 1, "bob input tuple length");
        let o = outcome.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        let y = ys.iter().fold(0usize, |acc, &v| (acc << 1) | usize::from(v - 1));
        let row = self.input_index(x - 1, y, z - 1);
        self.probs[row * Self::outcome_count(n) + o]
    }

    /// Checks non-negativity and per-input normalization.
    pub fn validate(&self) -> Result<()> {
        let oc = Self::outcome_count(self.n);
        for (row, chunk) in self.probs.chunks(oc).enumerate() {
            if let Some(p) = chunk.iter().find(|p| **p < -NORMALIZATION_TOL || !p.is_finite()) {
                return Err(Error::Validation(format!(
                    "negative probability {p} in input row {row}"
                )));
            }
            let total: f64 = chunk.iter().sum();
            if (total - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::Validation(format!(
                    "input row {row} sums to {total}, not 1"
                )));
            }
        }
        Ok(())
    }

    /// Full correlator `sum (-1)^{a + b_1 + .. + c} P(..)` with 0-based inputs.
    fn correlator(&self, x: usize, ys: usize, z: usize) -> f64 {
        let oc = Self::outcome_count(self.n);
        let row = self.input_index(x, ys, z) * oc;
        self.probs[row..row + oc]
            .iter()
            .enumerate()
            .map(|(o, p)| if o.count_ones() % 2 == 0 { *p } else { -*p })
            .sum()
    }
}

pub fn behavior_from_strategy(
    strategy: &DeterministicStrategy,
    scenario: &ChainScenario,
) -> Result<Behavior> {
    strategy.check(scenario)?;
    let n = scenario.n();
    let oc = Behavior::outcome_count(n);
    let mut probs = vec![0.0; Behavior::input_count(n) * oc];
    let bit = |v: i8| usize::from(v == -1);
    for x in 0..n {
        for ys in 0..1usize << (n - 1) {
            for z in 0..n {
                let mut o = bit(strategy.alice_outputs[x]);
                for (m, outs) in strategy.bob_outputs.iter().enumerate() {
                    let y = (ys >> (n - 2 - m)) & 1;
                    o = (o << 1) | bit(outs[y]);
                }
                o = (o << 1) | bit(strategy.charlie_outputs[z]);
                let row = ((x << (n - 1)) + ys) * n + z;
                probs[row * oc + o] = 1.0;
            }
        }
    }
    Ok(Behavior { n, probs })
}

/// Correlator terms `J_{n,i}` of a behavior, in term order.
pub fn behavior_terms(b: &Behavior, enc: &SignEncoding, map: &BobInputMap) -> Result<Vec<f64>> {
    if enc.n() != b.n || map.n() != b.n {
        return Err(Error::Shape(format!(
            "behavior for n = {} evaluated with encoding for n = {}",
            b.n,
            enc.n()
        )));
    }
    b.validate()?;
    let n = b.n;
    Ok((0..enc.terms())
        .map(|i| {
            let ys = map
                .row(i)
                .iter()
                .fold(0usize, |acc, &v| (acc << 1) | usize::from(v - 1));
            let mut total = 0.0;
            for x in 0..n {
                for z in 0..n {
                    total += enc.sign(i, x) * enc.sign(i, z) * b.correlator(x, ys, z);
                }
            }
            total
        })
        .collect())
}

/// `sum_i sqrt(|J_{n,i}|)` for a normalized behavior.
pub fn beta_of_behavior(b: &Behavior, enc: &SignEncoding, map: &BobInputMap) -> Result<f64> {
    Ok(behavior_terms(b, enc, map)?
        .iter()
        .map(|j| j.abs().sqrt())
        .sum())
}

pub fn alpha_closed_form(n: usize) -> Result<u64> {
    ChainScenario::new(n)?;
    if n > CLOSED_FORM_MAX_N {
        return Err(Error::Capacity {
            what: "n for closed-form alpha",
            requested: n,
            limit: CLOSED_FORM_MAX_N,
        });
    }
    let mut binom: u128 = 1;
    let mut total: u128 = 0;
    for l in 0..=n / 2 {
        if l > 0 {
            binom = binom * (n - l + 1) as u128 / l as u128;
        }
        total += binom * (n - 2 * l) as u128;
    }
    Ok(total as u64)
}

/// Result of the edge-assignment scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBound {
    pub value: u64,
    /// Lexicographically first maximizing assignment.
    pub witness: Vec<i8>,
}

/// `sum_i |sum_x s_i[x] a_x|` evaluated row by row.
pub fn edge_value(enc: &SignEncoding, assignment: &[i8]) -> u64 {
    enc.rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(assignment)
                .map(|(s, a)| i64::from(*s) * i64::from(*a))
                .sum::<i64>()
                .unsigned_abs()
        })
        .sum()
}

/// Same quantity as [`edge_value`], from the histogram of signed sums.
///
/// Rows fix the first sign to `+1` and leave the rest free, so the histogram
/// is built one coordinate at a time in `O(n^2)`.
fn edge_value_by_histogram(assignment: &[i8]) -> u64 {
    let n = assignment.len();
    let offset = n as i64;
    let mut counts = vec![0u64; 2 * n + 1];
    counts[(offset + i64::from(assignment[0])) as usize] = 1;
    for &a in &assignment[1..] {
        let mut next = vec![0u64; 2 * n + 1];
        for (idx, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let v = idx as i64;
            for s in [1i64, -1] {
                next[(v + s * i64::from(a)) as usize] += c;
            }
        }
        counts = next;
    }
    counts
        .iter()
        .enumerate()
        .map(|(idx, &c)| c * (idx as i64 - offset).unsigned_abs())
        .sum()
}

fn assignment_from_index(n: usize, index: u64) -> Vec<i8> {
    (0..n)
        .map(|x| if (index >> (n - 1 - x)) & 1 == 0 { 1 } else { -1 })
        .collect()
}

/// Exhaustive maximum over all `2^n` edge assignments.
pub fn alpha_bruteforce(n: usize) -> Result<EdgeBound> {
    ChainScenario::new(n)?;
    if n > EDGE_BRUTEFORCE_MAX_N {
        return Err(Error::Capacity {
            what: "n for edge brute force",
            requested: n,
            limit: EDGE_BRUTEFORCE_MAX_N,
        });
    }
    let (value, index) = (0..1u64 << n)
        .into_par_iter()
        .map(|idx| (edge_value_by_histogram(&assignment_from_index(n, idx)), idx))
        .reduce(
            || (0, u64::MAX),
            |a, b| match a.0.cmp(&b.0) {
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Equal => (a.0, a.1.min(b.1)),
            },
        );
    Ok(EdgeBound {
        value,
        witness: assignment_from_index(n, index),
    })
}

/// How [`BoundReport::alpha_bruteforce`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    EdgeAssignment,
    BehaviorExhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub alpha_closed: u64,
    pub alpha_bruteforce: f64,
    pub witness: DeterministicStrategy,
    #[serde(rename = "match")]
    pub matches: bool,
    pub method: BoundMethod,
}

/// Closed form next to the edge-assignment scan.
pub fn bound_report(n: usize) -> Result<BoundReport> {
    let alpha = alpha_closed_form(n)?;
    let edge = alpha_bruteforce(n)?;
    // Alice and Charlie on the witness, Bobs at +1: every J_i = <s_i, a>^2.
    let witness = DeterministicStrategy {
        alice_outputs: edge.witness.clone(),
        charlie_outputs: edge.witness,
        bob_outputs: vec![[1, 1]; n - 1],
    };
    Ok(BoundReport {
        n,
        alpha_closed: alpha,
        alpha_bruteforce: edge.value as f64,
        witness,
        matches: edge.value == alpha,
        method: BoundMethod::EdgeAssignment,
    })
}

/// Maximum of the functional over every deterministic strategy, `n <= 4`.
pub fn lhv_exhaustive_max(n: usize) -> Result<BoundReport> {
    let scenario = ChainScenario::new(n)?;
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::Capacity {
            what: "n for exhaustive strategy search",
            requested: n,
            limit: EXHAUSTIVE_MAX_N,
        });
    }
    let alpha = alpha_closed_form(n)?;
    let enc = build_encoding(n)?;
    let map = BobInputMap::new(n)?;
    let values: Vec<f64> = (0..DeterministicStrategy::count(n))
        .into_par_iter()
        .map(|idx| {
            let s = DeterministicStrategy::from_index(n, idx);
            let behavior = behavior_from_strategy(&s, &scenario)?;
            beta_of_behavior(&behavior, &enc, &map)
        })
        .collect::<Result<_>>()?;
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // ties within rounding go to the lowest index
    let index = values.iter().position(|v| *v >= best - 1e-9).unwrap_or(0);
    let rounded = best.round();
    Ok(BoundReport {
        n,
        alpha_closed: alpha,
        alpha_bruteforce: best,
        witness: DeterministicStrategy::from_index(n, index as u64),
        matches: (best - rounded).abs() < 1e-9 && rounded as u64 == alpha,
        method: BoundMethod::BehaviorExhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(alpha_closed_form(2).unwrap(), 2);
        assert_eq!(alpha_closed_form(3).unwrap(), 6);
        assert_eq!(alpha_closed_form(4).unwrap(), 12);
        assert_eq!(alpha_closed_form(5).unwrap(), 30);
        assert!(alpha_closed_form(1).is_err());
        assert!(matches!(alpha_closed_form(61), Err(Error::Capacity { .. })));
        for n in (2..=20).step_by(2) {
            assert_eq!(alpha_closed_form(n).unwrap() % 2, 0);
        }
    }

    #[test]
    fn edge_scan_examples() {
        let b3 = alpha_bruteforce(3).unwrap();
        assert_eq!(b3.value, 6);
        assert_eq!(b3.witness, vec![1, 1, 1]);
        let b2 = alpha_bruteforce(2).unwrap();
        assert_eq!((b2.value, b2.witness), (2, vec![1, 1]));
        assert_eq!(alpha_bruteforce(4).unwrap().value, 12);
        assert!(matches!(alpha_bruteforce(25), Err(Error::Capacity { limit: 24, .. })));
    }

    #[test]
    fn trilocal_edge_terms() {
        // all <A> = +1: |3| + |1| + |1| + |1|
        let enc = build_encoding(3).unwrap();
        assert_eq!(edge_value(&enc, &[1, 1, 1]), 6);
    }

    #[test]
    fn histogram_agrees_with_row_sum() {
        for n in 2..=10 {
            let enc = build_encoding(n).unwrap();
            for idx in 0..1u64 << n {
                let a = assignment_from_index(n, idx);
                assert_eq!(edge_value_by_histogram(&a), edge_value(&enc, &a));
            }
        }
    }

    #[test]
    fn deterministic_behaviors() {
        let sc = ChainScenario::new(2).unwrap();
        let b = behavior_from_strategy(&DeterministicStrategy::all_plus(2), &sc).unwrap();
        for x in 1..=2 {
            for y in 1..=2 {
                for z in 1..=2 {
                    assert_eq!(b.probability(&[0, 0, 0], x, &[y], z), 1.0);
                }
            }
        }
        b.validate().unwrap();

        let mut s = DeterministicStrategy::all_plus(2);
        s.alice_outputs = vec![1, -1];
        let b = behavior_from_strategy(&s, &sc).unwrap();
        assert_eq!(b.probability(&[1, 0, 0], 2, &[1], 1), 1.0);
        assert_eq!(b.probability(&[0, 0, 0], 2, &[2], 2), 0.0);
        assert_eq!(b.probability(&[0, 0, 0], 1, &[2], 2), 1.0);

        let bad = DeterministicStrategy::all_plus(3);
        assert!(matches!(behavior_from_strategy(&bad, &sc), Err(Error::Shape(_))));
    }

    #[test]
    fn beta_of_all_plus() {
        let enc = build_encoding(2).unwrap();
        let map = BobInputMap::new(2).unwrap();
        let sc = ChainScenario::new(2).unwrap();
        let b = behavior_from_strategy(&DeterministicStrategy::all_plus(2), &sc).unwrap();
        assert_eq!(behavior_terms(&b, &enc, &map).unwrap(), vec![4.0, 0.0]);
        assert_eq!(beta_of_behavior(&b, &enc, &map).unwrap(), 2.0);

        let enc = build_encoding(3).unwrap();
        let map = BobInputMap::new(3).unwrap();
        let sc = ChainScenario::new(3).unwrap();
        let b = behavior_from_strategy(&DeterministicStrategy::all_plus(3), &sc).unwrap();
        assert_eq!(behavior_terms(&b, &enc, &map).unwrap(), vec![9.0, 1.0, 1.0, 1.0]);
        assert_eq!(beta_of_behavior(&b, &enc, &map).unwrap(), 6.0);
    }

    #[test]
    fn uncorrelated_behavior_has_zero_beta() {
        let n = 2;
        let rows = Behavior::input_count(n);
        let oc = Behavior::outcome_count(n);
        let b = Behavior::from_table(n, vec![1.0 / oc as f64; rows * oc]).unwrap();
        let enc = build_encoding(n).unwrap();
        let map = BobInputMap::new(n).unwrap();
        assert_eq!(beta_of_behavior(&b, &enc, &map).unwrap(), 0.0);
    }

    #[test]
    fn unnormalized_behavior_is_rejected() {
        let n = 2;
        let len = Behavior::input_count(n) * Behavior::outcome_count(n);
        let b = Behavior::from_table(n, vec![0.0; len]).unwrap();
        let enc = build_encoding(n).unwrap();
        let map = BobInputMap::new(n).unwrap();
        assert!(matches!(beta_of_behavior(&b, &enc, &map), Err(Error::Validation(_))));
        assert!(Behavior::from_table(n, vec![0.0; 3]).is_err());
    }

    #[test]
    fn exhaustive_search_small() {
        let r2 = lhv_exhaustive_max(2).unwrap();
        assert_eq!(r2.alpha_bruteforce, 2.0);
        assert!(r2.matches);
        let r3 = lhv_exhaustive_max(3).unwrap();
        assert!((r3.alpha_bruteforce - 6.0).abs() < 1e-12);
        assert!(r3.matches);
        assert_eq!(r3.witness, DeterministicStrategy::all_plus(3));
        assert!(matches!(lhv_exhaustive_max(5), Err(Error::Capacity { .. })));
    }

    #[test]
    fn strategy_index_roundtrip_order() {
        let first = DeterministicStrategy::from_index(2, 0);
        assert_eq!(first, DeterministicStrategy::all_plus(2));
        let last = DeterministicStrategy::from_index(2, DeterministicStrategy::count(2) - 1);
        assert_eq!(last.alice_outputs, vec![-1, -1]);
        assert_eq!(last.bob_outputs, vec![[-1, -1]]);
        // lowest bit is Bob's last input
        let one = DeterministicStrategy::from_index(3, 1);
        assert_eq!(one.bob_outputs, vec![[1, 1], [1, -1]]);
    }

    fn strategy(n: usize) -> impl Strategy<Value = DeterministicStrategy> {
        (0..DeterministicStrategy::count(n)).prop_map(move |i| DeterministicStrategy::from_index(n, i))
    }

    proptest! {
        #[test]
        fn deterministic_beta_never_exceeds_alpha(n in 2usize..=4, seed in any::<u64>()) {
            let idx = seed % DeterministicStrategy::count(n);
            let s = DeterministicStrategy::from_index(n, idx);
            let sc = ChainScenario::new(n).unwrap();
            let b = behavior_from_strategy(&s, &sc).unwrap();
            let enc = build_encoding(n).unwrap();
            let map = BobInputMap::new(n).unwrap();
            let beta = beta_of_behavior(&b, &enc, &map).unwrap();
            prop_assert!(beta <= alpha_closed_form(n).unwrap() as f64 + 1e-9);
        }

        #[test]
        fn negating_one_party_keeps_beta(s in strategy(3), party in 0usize..4) {
            let sc = ChainScenario::new(3).unwrap();
            let enc = build_encoding(3).unwrap();
            let map = BobInputMap::new(3).unwrap();
            let before = beta_of_behavior(&behavior_from_strategy(&s, &sc).unwrap(), &enc, &map).unwrap();
            let mut t = s.clone();
            match party {
                0 => t.alice_outputs.iter_mut().for_each(|v| *v = -*v),
                3 => t.charlie_outputs.iter_mut().for_each(|v| *v = -*v),
                m => t.bob_outputs[m - 1].iter_mut().for_each(|v| *v = -*v),
            }
            let after = beta_of_behavior(&behavior_from_strategy(&t, &sc).unwrap(), &enc, &map).unwrap();
            prop_assert!((before - after).abs() < 1e-12);
        }
    }
}
