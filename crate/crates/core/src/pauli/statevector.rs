//! Exact pure-state backend for noiseless circuit verification.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_sites, parse_bitstring, PauliState, PauliString};
use crate::error::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, bits: &str) -> Result<Self> {
        let bits = parse_bitstring(n_qubits, bits)?;
        let index: usize = bits.iter().enumerate().map(|(q, &b)| (b as usize) << q).sum();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn ground(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::BadShape(format!("{} amplitudes for {n_qubits} qubits", amps.len())));
        }
        let s = Self { n_qubits, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!("state norm {norm} is not 1")));
        }
        Ok(s)
    }

    /// Product state with qubit 0 in `alpha|0> + beta|1>` and the rest in `|0>`.
    pub fn single_qubit_product(n_qubits: usize, alpha: Complex64, beta: Complex64) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = alpha;
        amps[1] = beta;
        Self::from_amplitudes(n_qubits, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &str) -> Result<Complex64> {
        let bits = parse_bitstring(self.n_qubits, bits)?;
        let index: usize = bits.iter().enumerate().map(|(q, &b)| (b as usize) << q).sum();
        Ok(self.amps[index])
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let norm = self.norm();
        if norm < 1e-12 {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(norm)
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Apply a `2^k x 2^k` matrix to `sites`; the first site is the most significant factor.
    pub fn apply_matrix(&mut self, u: &DMatrix<Complex64>, sites: &[usize]) -> Result<()> {
        check_sites(sites, self.n_qubits)?;
        let k = sites.len();
        let d = 1usize << k;
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::BadShape(format!("{}x{} matrix on {k} sites", u.nrows(), u.ncols())));
        }
        let offsets: Vec<usize> = (0..d)
            .map(|local| {
                sites
                    .iter()
                    .enumerate()
                    .map(|(j, &s)| ((local >> (k - 1 - j)) & 1) << s)
                    .sum()
            })
            .collect();
        let mask: usize = sites.iter().map(|&s| 1 << s).sum();
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (slot, &off) in buf.iter_mut().zip(&offsets) {
                *slot = self.amps[base + off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                self.amps[base + off] = (0..d).map(|c| u[(r, c)] * buf[c]).sum();
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, pauli: &PauliString) -> Result<()> {
        if pauli.len() != self.n_qubits {
            return Err(Error::MalformedPauli(pauli.to_string()));
        }
        for (q, p) in pauli.ops().iter().enumerate() {
            if *p != super::Pauli::I {
                let m = DMatrix::from_row_slice(2, 2, &p.matrix());
                self.apply_matrix(&m, &[q])?;
            }
        }
        Ok(())
    }

    /// `<psi| P |psi>`.
    pub fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        let mut image = self.clone();
        image.apply_pauli(pauli)?;
        Ok(self.inner(&image).re)
    }

    pub fn expectation_str(&self, label: &str) -> Result<f64> {
        self.expectation(&label.parse()?)
    }

    /// Probability that `site` reads `|1>`.
    pub fn probability_one(&self, site: usize) -> Result<f64> {
        check_sites(&[site], self.n_qubits)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> site & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Project `site` onto `|outcome>` and renormalize; returns the outcome probability.
    pub fn project(&mut self, site: usize, outcome: u8) -> Result<f64> {
        check_sites(&[site], self.n_qubits)?;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i >> site & 1) as u8 != outcome {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let norm = self.normalize()?;
        Ok(norm * norm)
    }

    /// Apply the projector `(I + P) / 2` without renormalizing.
    pub fn project_onto_eigenspace(&mut self, pauli: &PauliString) -> Result<()> {
        let mut image = self.clone();
        image.apply_pauli(pauli)?;
        for (a, b) in self.amps.iter_mut().zip(&image.amps) {
            *a = (*a + b) * 0.5;
        }
        Ok(())
    }

    /// Pauli-basis coefficients `<psi|P|psi>` of the pure state.
    pub fn to_pauli_state(&self) -> Result<PauliState> {
        let n = self.n_qubits;
        if n > super::dense::MAX_DENSE_QUBITS {
            return Err(Error::Unsupported(format!("Pauli expansion of {n} qubits")));
        }
        let coeffs = (0..1usize << (2 * n))
            .map(|i| self.expectation(&PauliString::from_index(n, i)))
            .collect::<Result<Vec<_>>>()?;
        PauliState::from_coeffs(n, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_state_of_plus() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(1, vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap();
        let p = s.to_pauli_state().unwrap();
        assert!((p.coeffs()[1] - 1.0).abs() < 1e-15);
        assert!(p.coeffs()[3].abs() < 1e-15);
    }

    #[test]
    fn non_normalized_rejected() {
        assert!(StateVector::from_amplitudes(1, vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).is_err());
    }
}
