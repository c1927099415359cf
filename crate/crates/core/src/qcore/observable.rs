use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::linalg::{self, CMatrix};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const DICHOTOMIC_TOL: f64 = 1e-10;

/// Hermitian operator with eigenvalues `+1`/`-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::Shape(format!(
                "observable must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = linalg::max_abs(&(&matrix - matrix.adjoint()));
        if asym > HERMITIAN_TOL {
            return Err(Error::Validation(format!(
                "observable is not Hermitian (deviation {asym:e})"
            )));
        }
        let dim = matrix.nrows();
        let square_gap = linalg::hermitian_norm(&(&matrix * &matrix - linalg::identity(dim)));
        if square_gap > DICHOTOMIC_TOL {
            return Err(Error::Validation(format!(
                "observable does not square to identity (deviation {square_gap:e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: linalg::identity(dim),
        }
    }

    /// Dichotomic projection of an arbitrary square matrix.
    pub fn project(w: &CMatrix) -> Self {
        Self::project_counting(w).0
    }

    /// [`Observable::project`] plus the number of zero eigenvalues that were
    /// rounded to `+1`.
    pub fn project_counting(w: &CMatrix) -> (Self, usize) {
        let (matrix, ties) = linalg::dichotomic_projection(w);
        (Self { matrix }, ties)
    }

    pub fn x() -> Self {
        Self {
            matrix: linalg::pauli_x(),
        }
    }

    pub fn y() -> Self {
        Self {
            matrix: linalg::pauli_y(),
        }
    }

    pub fn z() -> Self {
        Self {
            matrix: linalg::pauli_z(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn neg(&self) -> Self {
        Self {
            matrix: -&self.matrix,
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// `U O U^dagger` for a unitary `u`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        Self::new(linalg::hermitian_part(&(u * &self.matrix * u.adjoint())))
    }
}

/// Matrix as rows of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
pub(crate) struct MatrixRepr(pub Vec<Vec<[f64; 2]>>);

impl From<&CMatrix> for MatrixRepr {
    fn from(m: &CMatrix) -> Self {
        Self(
            m.row_iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        )
    }
}

impl MatrixRepr {
    pub(crate) fn into_matrix(self) -> Result<CMatrix> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        if self.0.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        let data: Vec<Complex64> = self
            .0
            .into_iter()
            .flatten()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        Ok(CMatrix::from_row_slice(rows, cols, &data))
    }
}

impl Serialize for Observable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr::from(&self.matrix).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        repr.into_matrix()
            .and_then(Observable::new)
            .map_err(serde::de::Error::custom)
    }
}

/// Qubits needed for `n_obs` pairwise anticommuting observables.
pub fn anticommuting_qubits(n_obs: usize) -> usize {
    n_obs.saturating_sub(1).div_ceil(2).max(1)
}

/// `n_obs` pairwise anticommuting dichotomic observables on
/// `ceil((n_obs - 1) / 2)` qubits (at least one).
///
/// Generators are `Z^(j) X I..`, `Z^(j) Y I..` for each qubit `j`, then
/// `Z^m`. For even `n_obs` the last `Y`-type generator is dropped, so two
/// observables come out as `{X, Z}`.
pub fn jordan_wigner_set(n_obs: usize) -> Vec<Observable> {
    let m = anticommuting_qubits(n_obs);
    let (x, y, z, id) = (
        linalg::pauli_x(),
        linalg::pauli_y(),
        linalg::pauli_z(),
        linalg::identity(2),
    );
    let string = |j: usize, head: &CMatrix| -> CMatrix {
        let mut factors = vec![&z; j];
        factors.push(head);
        factors.extend(std::iter::repeat_n(&id, m - j - 1));
        linalg::kron_all(factors)
    };
    let mut gens: Vec<CMatrix> = Vec::with_capacity(2 * m + 1);
    for j in 0..m {
        gens.push(string(j, &x));
        gens.push(string(j, &y));
    }
    gens.push(linalg::kron_all(std::iter::repeat_n(&z, m)));
    if n_obs.is_multiple_of(2) && gens.len() >= 2 {
        gens.remove(gens.len() - 2);
    }
    gens.truncate(n_obs);
    gens.into_iter().map(|matrix| Observable { matrix }).collect()
}

/// Operator norms of pairwise anticommutators; the diagonal holds
/// `||{O_j, O_j}|| = 2`.
pub fn anticommutator_report(observables: &[Observable]) -> Result<Vec<Vec<f64>>> {
    if let Some(first) = observables.first() {
        if let Some(bad) = observables.iter().find(|o| o.dim() != first.dim()) {
            return Err(Error::Shape(format!(
                "anticommutator report mixes dimensions {} and {}",
                first.dim(),
                bad.dim()
            )));
        }
    }
    let k = observables.len();
    let mut out = vec![vec![0.0; k]; k];
    for j in 0..k {
        out[j][j] = 2.0;
        for l in j + 1..k {
            let (a, b) = (observables[j].matrix(), observables[l].matrix());
            let norm = linalg::hermitian_norm(&(a * b + b * a));
            out[j][l] = norm;
            out[l][j] = norm;
        }
    }
    Ok(out)
}

/// Largest off-diagonal entry of [`anticommutator_report`].
pub fn max_anticommutator(observables: &[Observable]) -> Result<f64> {
    let report = anticommutator_report(observables)?;
    Ok(report
        .iter()
        .enumerate()
        .flat_map(|(j, row)| row.iter().enumerate().filter(move |(l, _)| *l != j))
        .fold(0.0f64, |acc, (_, v)| acc.max(*v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Observable::new(linalg::pauli_x() + linalg::pauli_z()).is_err());
        assert!(Observable::new(CMatrix::zeros(2, 3)).is_err());
        let non_herm = CMatrix::from_row_slice(
            2,
            2,
            &[linalg::ZERO, linalg::ONE, linalg::ZERO, linalg::ZERO],
        );
        assert!(matches!(Observable::new(non_herm), Err(Error::Validation(_))));
        assert!(Observable::new(linalg::pauli_y()).is_ok());
    }

    #[test]
    fn small_sets() {
        let two = jordan_wigner_set(2);
        assert_eq!(two, vec![Observable::x(), Observable::z()]);
        let three = jordan_wigner_set(3);
        assert_eq!(three, vec![Observable::x(), Observable::y(), Observable::z()]);
        assert_eq!(jordan_wigner_set(1), vec![Observable::x()]);
    }

    #[test]
    fn sets_anticommute() {
        for n_obs in 1..=9 {
            let set = jordan_wigner_set(n_obs);
            assert_eq!(set.len(), n_obs);
            let m = anticommuting_qubits(n_obs);
            assert!(set.iter().all(|o| o.dim() == 1 << m));
            for o in &set {
                Observable::new(o.matrix().clone()).unwrap();
            }
            assert!(max_anticommutator(&set).unwrap() < 1e-12, "n_obs = {n_obs}");
        }
        assert_eq!(jordan_wigner_set(5)[0].dim(), 4);
    }

    #[test]
    fn report_examples() {
        let r = anticommutator_report(&[Observable::x(), Observable::y(), Observable::z()]).unwrap();
        for (j, row) in r.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                let expected = if j == l { 2.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-12);
            }
        }
        let r = anticommutator_report(&[Observable::x(), Observable::x()]).unwrap();
        assert!((r[0][1] - 2.0).abs() < 1e-12);
        let mixed = [Observable::x(), jordan_wigner_set(4)[0].clone()];
        assert!(matches!(anticommutator_report(&mixed), Err(Error::Shape(_))));
    }

    #[test]
    fn serde_roundtrip_validates() {
        let json = serde_json::to_string(&Observable::y()).unwrap();
        assert_eq!(json, "[[[0.0,0.0],[-0.0,-1.0]],[[0.0,1.0],[0.0,0.0]]]");
        let back: Observable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Observable::y());
        assert!(serde_json::from_str::<Observable>("[[[1.0,0.0],[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]]").is_err());
    }
}
