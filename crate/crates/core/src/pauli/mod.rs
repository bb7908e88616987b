//! Pauli-basis representation of multi-qubit density matrices.
//!
//! A density matrix on `n` qubits is stored as the real vector of its Pauli
//! expectation values `c_P = Tr(P rho)`, so that `rho = sum_P c_P P / 2^n`.
//! The identity coefficient of a normalized state is exactly one and any
//! expectation value is a direct read.
//!
//! Pauli strings are indexed in base four, little-endian: qubit `q` owns the
//! digit of weight `4^q`, with digits `0..4` standing for `I, X, Y, Z`. Text
//! labels are written with character `q` describing qubit `q`.

pub mod dense;
mod kernel;
mod state;
pub mod statevector;
mod superop;

pub(crate) use kernel::LocalKernel;
pub(crate) use state::checked_probability;
pub use state::PauliState;
pub use statevector::StateVector;
pub use superop::{ptm_from_kraus, ptm_from_unitary, Superoperator};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_index(index: usize) -> Pauli {
        Pauli::ALL[index & 3]
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | '_' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        ['I', 'X', 'Y', 'Z'][self.index()]
    }

    /// 2x2 matrix, row-major.
    pub fn matrix(self) -> [Complex64; 4] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        }
    }

    /// `self * other = i^phase * result`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }
}

/// Tensor product of single-qubit Paulis; entry `q` acts on qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self { ops }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { ops: vec![Pauli::I; n_qubits] }
    }

    /// String with `pauli` on each of `sites` and identity elsewhere.
    pub fn on_sites(n_qubits: usize, pauli: Pauli, sites: &[usize]) -> Result<Self> {
        let mut ops = vec![Pauli::I; n_qubits];
        for &s in sites {
            if s >= n_qubits {
                return Err(Error::SiteOutOfRange { site: s, n_qubits });
            }
            ops[s] = pauli;
        }
        Ok(Self { ops })
    }

    pub fn from_index(n_qubits: usize, mut index: usize) -> Self {
        let ops = (0..n_qubits)
            .map(|_| {
                let p = Pauli::from_index(index);
                index >>= 2;
                p
            })
            .collect();
        Self { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        self.ops[qubit]
    }

    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Base-4 index into a [`PauliState`] coefficient vector.
    pub fn index(&self) -> usize {
        self.ops
            .iter()
            .enumerate()
            .map(|(q, p)| p.index() << (2 * q))
            .sum()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(a, b)| !a.commutes_with(**b))
            .count();
        anti % 2 == 0
    }

    /// Product `self * other = i^phase * result`.
    pub fn mul(&self, other: &PauliString) -> Result<(u8, PauliString)> {
        if self.len() != other.len() {
            return Err(Error::ArityMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let mut phase = 0u8;
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(a, b)| {
                let (ph, p) = a.mul(*b);
                phase = (phase + ph) % 4;
                p
            })
            .collect();
        Ok((phase, PauliString { ops }))
    }

    /// Restriction to the listed qubits, in the listed order.
    pub fn restrict(&self, sites: &[usize]) -> PauliString {
        PauliString {
            ops: sites.iter().map(|&s| self.ops[s]).collect(),
        }
    }

    /// Spread this string over `sites` of an `n_qubits` register.
    pub fn embed(&self, sites: &[usize], n_qubits: usize) -> Result<PauliString> {
        if sites.len() != self.len() {
            return Err(Error::ArityMismatch {
                expected: self.len(),
                got: sites.len(),
            });
        }
        let mut ops = vec![Pauli::I; n_qubits];
        for (p, &s) in self.ops.iter().zip(sites) {
            if s >= n_qubits {
                return Err(Error::SiteOutOfRange { site: s, n_qubits });
            }
            ops[s] = *p;
        }
        Ok(PauliString { ops })
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::MalformedPauli(s.to_string()));
        }
        let ops = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::MalformedPauli(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString { ops })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// Parse a computational-basis label such as `"0110"` (character `q` is qubit `q`).
pub(crate) fn parse_bitstring(n_qubits: usize, bits: &str) -> Result<Vec<u8>> {
    let parsed: Vec<u8> = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::MalformedBitstring(bits.to_string())),
        })
        .collect::<Result<_>>()?;
    if parsed.len() != n_qubits {
        return Err(Error::MalformedBitstring(bits.to_string()));
    }
    Ok(parsed)
}

pub(crate) fn check_sites(sites: &[usize], n_qubits: usize) -> Result<()> {
    for (k, &s) in sites.iter().enumerate() {
        if s >= n_qubits {
            return Err(Error::SiteOutOfRange { site: s, n_qubits });
        }
        if sites[..k].contains(&s) {
            return Err(Error::DuplicateSites(sites.to_vec()));
        }
    }
    Ok(())
}
