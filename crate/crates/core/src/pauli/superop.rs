use nalgebra::DMatrix;
use num_complex::Complex64;

use super::kernel::LocalKernel;
use super::Pauli;
use crate::error::{Error, Result};

/// Pauli transfer matrix of a channel on one or two qubits.
///
/// For arity two the local basis index is `4 * p0 + p1`, where `p0` is the
/// Pauli on the first listed site. Matrices built from unitaries use the same
/// ordering: the first site is the most significant tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    arity: usize,
    matrix: Vec<f64>,
}

impl Superoperator {
    pub fn identity(arity: usize) -> Self {
        let dim = 1 << (2 * arity);
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = 1.0;
        }
        Self { arity, matrix }
    }

    pub fn from_matrix(arity: usize, matrix: Vec<f64>) -> Result<Self> {
        if arity == 0 || arity > 2 {
            return Err(Error::BadShape(format!("unsupported arity {arity}")));
        }
        let dim = 1 << (2 * arity);
        if matrix.len() != dim * dim {
            return Err(Error::BadShape(format!(
                "expected {} entries for arity {arity}, got {}",
                dim * dim,
                matrix.len()
            )));
        }
        Ok(Self { arity, matrix })
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let arity = match entries.len() {
            4 => 1,
            16 => 2,
            n => return Err(Error::BadShape(format!("diagonal of length {n}"))),
        };
        let dim = entries.len();
        let mut matrix = vec![0.0; dim * dim];
        for (i, &v) in entries.iter().enumerate() {
            matrix[i * dim + i] = v;
        }
        Ok(Self { arity, matrix })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.arity)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Matrix product `self * rhs`: `rhs` acts first.
    pub fn product(&self, rhs: &Superoperator) -> Result<Superoperator> {
        if self.arity != rhs.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: rhs.arity,
            });
        }
        let dim = self.dim();
        let mut out = vec![0.0; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.matrix[i * dim + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    out[i * dim + j] += a * rhs.matrix[k * dim + j];
                }
            }
        }
        Ok(Self {
            arity: self.arity,
            matrix: out,
        })
    }

    /// Product of a sequence written left to right as in `R_a R_b R_c`.
    pub fn chain(factors: &[&Superoperator]) -> Result<Superoperator> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::BadShape("empty product".into()))?;
        rest.iter()
            .try_fold((*first).clone(), |acc, f| acc.product(f))
    }

    /// Two-qubit channel `first (x) second` acting independently on each site.
    pub fn tensor(first: &Superoperator, second: &Superoperator) -> Result<Superoperator> {
        if first.arity != 1 || second.arity != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                got: first.arity.max(second.arity),
            });
        }
        let mut m = vec![0.0; 256];
        for i0 in 0..4 {
            for j0 in 0..4 {
                let a = first.get(i0, j0);
                if a == 0.0 {
                    continue;
                }
                for i1 in 0..4 {
                    for j1 in 0..4 {
                        m[(4 * i0 + i1) * 16 + 4 * j0 + j1] = a * second.get(i1, j1);
                    }
                }
            }
        }
        Ok(Self {
            arity: 2,
            matrix: m,
        })
    }

    pub fn transpose(&self) -> Superoperator {
        let dim = self.dim();
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                m[j * dim + i] = self.matrix[i * dim + j];
            }
        }
        Self {
            arity: self.arity,
            matrix: m,
        }
    }

    /// `Tr(self^T other)`.
    pub fn overlap(&self, other: &Superoperator) -> Result<f64> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        Ok(self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        self.matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        (self.matrix[0] - 1.0).abs() <= tol && self.matrix[1..self.dim()].iter().all(|v| v.abs() <= tol)
    }

    pub fn is_orthogonal(&self, tol: f64) -> bool {
        let rtr = self.transpose().product(self).expect("same arity");
        rtr.max_abs_diff(&Superoperator::identity(self.arity)) <= tol
    }

    pub(crate) fn kernel(&self, sites: &[usize]) -> LocalKernel {
        LocalKernel::new(&self.matrix, sites)
    }
}

fn pauli_basis(arity: usize) -> Vec<DMatrix<Complex64>> {
    let single: Vec<DMatrix<Complex64>> = Pauli::ALL
        .iter()
        .map(|p| DMatrix::from_row_slice(2, 2, &p.matrix()))
        .collect();
    let mut basis = vec![DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0))];
    for _ in 0..arity {
        basis = basis
            .iter()
            .flat_map(|b| single.iter().map(move |s| b.kronecker(s)))
            .collect();
    }
    basis
}

fn arity_of(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        _ => Err(Error::BadShape(format!("{dim}x{dim} operator"))),
    }
}

/// Transfer matrix `R_ij = Tr(P_i E(P_j)) / 2^arity` of the channel
/// `E(rho) = sum_k E_k rho E_k^dagger`.
pub fn ptm_from_kraus(kraus: &[DMatrix<Complex64>]) -> Result<Superoperator> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::BadShape("empty Kraus set".into()))?;
    let d = first.nrows();
    if kraus.iter().any(|k| k.nrows() != d || k.ncols() != d) {
        return Err(Error::BadShape("Kraus operators differ in shape".into()));
    }
    let arity = arity_of(d)?;

    let completeness = kraus
        .iter()
        .fold(DMatrix::<Complex64>::zeros(d, d), |acc, k| acc + k.adjoint() * k);
    let deviation = (completeness - DMatrix::<Complex64>::identity(d, d))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if deviation > 1e-10 {
        return Err(Error::NotComplete { deviation });
    }

    let basis = pauli_basis(arity);
    let dim = basis.len();
    let norm = d as f64;
    let images: Vec<DMatrix<Complex64>> = basis
        .iter()
        .map(|p| {
            kraus
                .iter()
                .fold(DMatrix::<Complex64>::zeros(d, d), |acc, k| acc + k * p * k.adjoint())
        })
        .collect();
    let mut matrix = vec![0.0; dim * dim];
    for (i, pi) in basis.iter().enumerate() {
        for (j, img) in images.iter().enumerate() {
            matrix[i * dim + j] = (pi * img).trace().re / norm;
        }
    }
    Superoperator::from_matrix(arity, matrix)
}

pub fn ptm_from_unitary(u: &DMatrix<Complex64>) -> Result<Superoperator> {
    let d = u.nrows();
    if u.ncols() != d {
        return Err(Error::BadShape("non-square unitary".into()));
    }
    let deviation = (u.adjoint() * u - DMatrix::<Complex64>::identity(d, d))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    ptm_from_kraus(std::slice::from_ref(u))
}
