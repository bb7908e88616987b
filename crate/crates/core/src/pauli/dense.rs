//! Dense density-matrix helpers for small registers.
//!
//! These back the independent oracles used to check the Pauli-basis engine.
//! Full matrices use the little-endian state-vector convention: qubit `q` is
//! bit `q` of the basis index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{PauliState, PauliString};
use crate::error::{Error, Result};

/// Largest register for which the dense helpers are allowed.
pub const MAX_DENSE_QUBITS: usize = 8;

fn guard(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::Unsupported(format!(
            "dense representation of {n_qubits} qubits"
        )));
    }
    Ok(())
}

/// Full `2^n x 2^n` matrix of a Pauli string.
pub fn pauli_matrix(pauli: &PauliString) -> DMatrix<Complex64> {
    let dim = 1usize << pauli.len();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut row = col;
        let mut amp = Complex64::new(1.0, 0.0);
        for (q, p) in pauli.ops().iter().enumerate() {
            let bit = (col >> q) & 1;
            let sm = p.matrix();
            // Column `bit` of the single-qubit matrix has one nonzero entry.
            let out_bit = if sm[bit] != Complex64::new(0.0, 0.0) { 0 } else { 1 };
            amp *= sm[out_bit * 2 + bit];
            row = (row & !(1 << q)) | (out_bit << q);
        }
        m[(row, col)] = amp;
    }
    m
}

pub fn density_from_state(state: &PauliState) -> Result<DMatrix<Complex64>> {
    let n = state.n_qubits();
    guard(n)?;
    let dim = 1usize << n;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, &c) in state.coeffs().iter().enumerate() {
        if c != 0.0 {
            rho += pauli_matrix(&PauliString::from_index(n, i)) * Complex64::new(c / dim as f64, 0.0);
        }
    }
    Ok(rho)
}

pub fn state_from_density(rho: &DMatrix<Complex64>) -> Result<PauliState> {
    let dim = rho.nrows();
    if !dim.is_power_of_two() || rho.ncols() != dim {
        return Err(Error::BadShape(format!("{}x{} density matrix", rho.nrows(), rho.ncols())));
    }
    let n = dim.trailing_zeros() as usize;
    guard(n)?;
    let coeffs = (0..1usize << (2 * n))
        .map(|i| (pauli_matrix(&PauliString::from_index(n, i)) * rho).trace().re)
        .collect();
    PauliState::from_coeffs(n, coeffs)
}

/// Lift a local operator on `sites` into the full `n_qubits` space.
/// The first listed site is the most significant local tensor factor.
pub fn embed_operator(local: &DMatrix<Complex64>, sites: &[usize], n_qubits: usize) -> Result<DMatrix<Complex64>> {
    guard(n_qubits)?;
    super::check_sites(sites, n_qubits)?;
    let k = sites.len();
    if local.nrows() != 1 << k || local.ncols() != 1 << k {
        return Err(Error::BadShape("local operator size does not match sites".into()));
    }
    let dim = 1usize << n_qubits;
    let mask: usize = sites.iter().map(|&s| 1 << s).sum();
    let local_index = |idx: usize| -> usize {
        sites
            .iter()
            .enumerate()
            .map(|(j, &s)| ((idx >> s) & 1) << (k - 1 - j))
            .sum()
    };
    let mut full = DMatrix::<Complex64>::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            if r & !mask == c & !mask {
                full[(r, c)] = local[(local_index(r), local_index(c))];
            }
        }
    }
    Ok(full)
}

/// `sum_k E_k rho E_k^dagger`.
pub fn kraus_evolve(rho: &DMatrix<Complex64>, kraus: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    kraus
        .iter()
        .fold(DMatrix::zeros(rho.nrows(), rho.ncols()), |acc, e| acc + e * rho * e.adjoint())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(rho: &DMatrix<Complex64>) -> f64 {
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_matrices_match_kronecker_products() {
        let p: PauliString = "XZ".parse().unwrap();
        // qubit 0 is the least significant bit, so the kron order is Z (x) X.
        let z = DMatrix::from_row_slice(2, 2, &super::super::Pauli::Z.matrix());
        let x = DMatrix::from_row_slice(2, 2, &super::super::Pauli::X.matrix());
        assert_eq!(pauli_matrix(&p), z.kronecker(&x));
    }

    #[test]
    fn density_round_trip() {
        let s = PauliState::new(3, "101").unwrap();
        let rho = density_from_state(&s).unwrap();
        assert!((rho[(0b101, 0b101)].re - 1.0).abs() < 1e-15);
        let back = state_from_density(&rho).unwrap();
        assert!(back.coeffs().iter().zip(s.coeffs()).all(|(a, b)| (a - b).abs() < 1e-14));
    }
}
