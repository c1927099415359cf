//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors
        .into_iter()
        .fold(identity(1), |acc, f| acc.kronecker(f))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix (only the Hermitian part is used).
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Largest absolute eigenvalue of the Hermitian part of `m`.
pub fn hermitian_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    hermitian_eigen(m)
        .0
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Largest entry-wise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Closest dichotomic operator to the Hermitian part of `w`: eigenvalues are
/// replaced by their signs. Returns the projection and the number of
/// eigenvalues that were numerically zero (mapped to `+1`).
pub fn dichotomic_projection(w: &CMatrix) -> (CMatrix, usize) {
    let (values, vectors) = hermitian_eigen(w);
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let zero_tol = 1e-13 * scale;
    let mut ties = 0;
    let signs: Vec<f64> = values
        .iter()
        .map(|&v| {
            if v.abs() <= zero_tol {
                ties += 1;
                1.0
            } else {
                v.signum()
            }
        })
        .collect();
    let mut scaled = vectors.clone();
    for (j, s) in signs.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*s);
    }
    let projected = &scaled * vectors.adjoint();
    (hermitian_part(&projected), ties)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_of_dichotomic_is_identity_map() {
        let (p, ties) = dichotomic_projection(&pauli_y().scale(3.0));
        assert_eq!(ties, 0);
        assert!(max_abs(&(p - pauli_y())) < 1e-14);
    }

    #[test]
    fn zero_eigenvalues_round_up() {
        let w = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ZERO]));
        let (p, ties) = dichotomic_projection(&w);
        assert_eq!(ties, 1);
        assert!(max_abs(&(p - identity(2))) < 1e-14);
    }

    #[test]
    fn norms() {
        assert!((hermitian_norm(&(pauli_x() + pauli_z())) - 2f64.sqrt()).abs() < 1e-14);
        let k = kron_all([&pauli_x(), &pauli_z()]);
        assert_eq!(k.nrows(), 4);
        assert_eq!(k[(0, 2)], ONE);
        assert_eq!(k[(1, 3)], -ONE);
    }
}
