use rand::Rng;

use super::{check_sites, parse_bitstring, PauliString, Superoperator};
use crate::error::{Error, Result};
use crate::noise::MeasurementErrorTable;

/// Tolerance used when validating probabilities read off a state.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// Density matrix in the Pauli basis, `c_P = Tr(P rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliState {
    n_qubits: usize,
    coeffs: Vec<f64>,
}

impl PauliState {
    /// Pure computational basis state `|b><b|`; character `q` of `bits` is qubit `q`.
    pub fn new(n_qubits: usize, bits: &str) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("at least one qubit required".into()));
        }
        let bits = parse_bitstring(n_qubits, bits)?;
        let mut coeffs = vec![0.0; 1 << (2 * n_qubits)];
        // Only I/Z strings survive; sign is the parity of Z's on |1> qubits.
        for mask in 0..(1usize << n_qubits) {
            let mut index = 0;
            let mut sign = 1.0;
            for (q, &b) in bits.iter().enumerate() {
                if mask >> q & 1 == 1 {
                    index |= 3 << (2 * q);
                    if b == 1 {
                        sign = -sign;
                    }
                }
            }
            coeffs[index] = sign;
        }
        Ok(Self { n_qubits, coeffs })
    }

    pub fn ground(n_qubits: usize) -> Self {
        Self::new(n_qubits, &"0".repeat(n_qubits)).expect("valid label")
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let mut coeffs = vec![0.0; 1 << (2 * n_qubits)];
        coeffs[0] = 1.0;
        Self { n_qubits, coeffs }
    }

    pub fn from_coeffs(n_qubits: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != 1 << (2 * n_qubits) {
            return Err(Error::BadShape(format!(
                "{} coefficients for {n_qubits} qubits",
                coeffs.len()
            )));
        }
        Ok(Self { n_qubits, coeffs })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn trace(&self) -> f64 {
        self.coeffs[0]
    }

    /// `Tr(P rho)` for a Pauli string over all qubits.
    pub fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        if pauli.len() != self.n_qubits {
            return Err(Error::MalformedPauli(format!(
                "{pauli} has {} qubits, state has {}",
                pauli.len(),
                self.n_qubits
            )));
        }
        Ok(self.coeffs[pauli.index()])
    }

    pub fn expectation_str(&self, label: &str) -> Result<f64> {
        self.expectation(&label.parse()?)
    }

    /// Contract `op` over the Pauli axes of `sites`; other axes are untouched.
    pub fn apply_local(&mut self, op: &Superoperator, sites: &[usize]) -> Result<()> {
        if sites.len() != op.arity() {
            return Err(Error::ArityMismatch {
                expected: op.arity(),
                got: sites.len(),
            });
        }
        check_sites(sites, self.n_qubits)?;
        op.kernel(sites).apply(&mut self.coeffs);
        Ok(())
    }

    /// Probability of finding `site` in `|0>`.
    pub fn probability_zero(&self, site: usize) -> Result<f64> {
        check_sites(&[site], self.n_qubits)?;
        Ok(0.5 * (self.coeffs[0] + self.coeffs[3 << (2 * site)]))
    }

    /// Project `site` onto `|outcome>` and renormalize. Returns the outcome probability.
    pub fn project(&mut self, site: usize, outcome: u8) -> Result<f64> {
        check_sites(&[site], self.n_qubits)?;
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let stride = 1usize << (2 * site);
        let block = stride << 2;
        for hi in (0..self.coeffs.len()).step_by(block) {
            for lo in 0..stride {
                let b = hi + lo;
                let v = 0.5 * (self.coeffs[b] + sign * self.coeffs[b + 3 * stride]);
                self.coeffs[b] = v;
                self.coeffs[b + stride] = 0.0;
                self.coeffs[b + 2 * stride] = 0.0;
                self.coeffs[b + 3 * stride] = sign * v;
            }
        }
        let p = self.coeffs[0];
        if p <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / p;
        self.coeffs.iter_mut().for_each(|c| *c *= inv);
        Ok(p)
    }

    /// Ideal Pauli X on `site`.
    pub fn bit_flip(&mut self, site: usize) -> Result<()> {
        check_sites(&[site], self.n_qubits)?;
        let stride = 1usize << (2 * site);
        let block = stride << 2;
        for hi in (0..self.coeffs.len()).step_by(block) {
            for lo in 0..stride {
                let b = hi + lo;
                self.coeffs[b + 2 * stride] = -self.coeffs[b + 2 * stride];
                self.coeffs[b + 3 * stride] = -self.coeffs[b + 3 * stride];
            }
        }
        Ok(())
    }

    /// Ideal reset: trace out `site` and replace it with `|0>`.
    pub fn reset(&mut self, site: usize) -> Result<()> {
        check_sites(&[site], self.n_qubits)?;
        let stride = 1usize << (2 * site);
        let block = stride << 2;
        for hi in (0..self.coeffs.len()).step_by(block) {
            for lo in 0..stride {
                let b = hi + lo;
                let v = self.coeffs[b];
                self.coeffs[b + stride] = 0.0;
                self.coeffs[b + 2 * stride] = 0.0;
                self.coeffs[b + 3 * stride] = v;
            }
        }
        Ok(())
    }

    /// Back-to-back measurement of `site`.
    ///
    /// Samples the projected state `i` from the Born rule, projects, then draws
    /// the reported result `m` and outcome state `o` from `table`; a bit flip is
    /// applied when `o != i`. Returns `m` as `+1` or `-1`.
    pub fn sample_measurement<R: Rng + ?Sized>(
        &mut self,
        site: usize,
        table: &MeasurementErrorTable,
        rng: &mut R,
    ) -> Result<i8> {
        let p0 = checked_probability(self.probability_zero(site)? / self.trace())?;
        let projected = if rng.random::<f64>() < p0 { 0u8 } else { 1u8 };
        self.project(site, projected)?;
        let (result, outcome) = table.sample(projected, rng);
        if outcome != projected {
            self.bit_flip(site)?;
        }
        Ok(result)
    }

    /// Partial trace onto `sites`; qubit `k` of the result is `sites[k]`.
    pub fn reduce(&self, sites: &[usize]) -> Result<PauliState> {
        check_sites(sites, self.n_qubits)?;
        let m = sites.len();
        let coeffs = (0..1usize << (2 * m))
            .map(|k| {
                let full: usize = sites
                    .iter()
                    .enumerate()
                    .map(|(j, &s)| ((k >> (2 * j)) & 3) << (2 * s))
                    .sum();
                self.coeffs[full]
            })
            .collect();
        Ok(PauliState { n_qubits: m, coeffs })
    }

    /// `self` placed on `sites` of an `n_qubits` register, every other qubit in `|0>`.
    pub fn embed(&self, sites: &[usize], n_qubits: usize) -> Result<PauliState> {
        if sites.len() != self.n_qubits {
            return Err(Error::ArityMismatch {
                expected: self.n_qubits,
                got: sites.len(),
            });
        }
        check_sites(sites, n_qubits)?;
        let others: Vec<usize> = (0..n_qubits).filter(|q| !sites.contains(q)).collect();
        let mut coeffs = vec![0.0; 1 << (2 * n_qubits)];
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let base: usize = sites
                .iter()
                .enumerate()
                .map(|(j, &s)| ((k >> (2 * j)) & 3) << (2 * s))
                .sum();
            for mask in 0..(1usize << others.len()) {
                let z: usize = others
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask >> j & 1 == 1)
                    .map(|(_, &s)| 3 << (2 * s))
                    .sum();
                coeffs[base | z] = c;
            }
        }
        Ok(PauliState { n_qubits, coeffs })
    }

    /// Checks `c_I = 1` and `|c_P| <= 1` within `tol`.
    pub fn check_health(&self, tol: f64) -> Result<()> {
        if (self.coeffs[0] - 1.0).abs() > tol {
            return Err(Error::NumericalHealth(format!(
                "identity coefficient drifted to {}",
                self.coeffs[0]
            )));
        }
        if let Some((i, c)) = self
            .coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| c.abs() > 1.0 + tol || !c.is_finite())
        {
            return Err(Error::NumericalHealth(format!(
                "coefficient {} = {c} out of range",
                PauliString::from_index(self.n_qubits, i)
            )));
        }
        Ok(())
    }
}

/// Validates a probability against [`PROBABILITY_TOLERANCE`] and clips it to `[0, 1]`.
pub(crate) fn checked_probability(p: f64) -> Result<f64> {
    if !p.is_finite() || p < -PROBABILITY_TOLERANCE || p > 1.0 + PROBABILITY_TOLERANCE {
        return Err(Error::NumericalHealth(format!("probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn nonzero(state: &PauliState) -> Vec<(String, f64)> {
        state
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > 0.0)
            .map(|(i, &c)| (PauliString::from_index(state.n_qubits(), i).to_string(), c))
            .collect()
    }

    #[test]
    fn basis_states() {
        let s0 = PauliState::new(1, "0").unwrap();
        assert_eq!(s0.coeffs(), &[1.0, 0.0, 0.0, 1.0]);
        let s1 = PauliState::new(1, "1").unwrap();
        assert_eq!(s1.coeffs(), &[1.0, 0.0, 0.0, -1.0]);
        let mut two = nonzero(&PauliState::new(2, "01").unwrap());
        two.sort_by(|a, b| a.0.cmp(&b.0));
        let expect: Vec<(String, f64)> = vec![("II".into(), 1.0), ("IZ".into(), -1.0), ("ZI".into(), 1.0), ("ZZ".into(), -1.0)];
        assert_eq!(two, expect);
        assert!(PauliState::new(2, "012").is_err());
        assert!(PauliState::new(0, "").is_err());
    }

    #[test]
    fn expectation_reads_coefficients() {
        let s = PauliState::new(1, "0").unwrap();
        assert_eq!(s.expectation_str("Z").unwrap(), 1.0);
        assert_eq!(s.expectation_str("X").unwrap(), 0.0);
        assert!(s.expectation_str("ZZ").is_err());
        assert!(s.expectation_str("Q").is_err());
    }

    #[test]
    fn identity_leaves_state_unchanged_and_bad_sites_rejected() {
        let mut s = PauliState::new(3, "011").unwrap();
        let before = s.clone();
        s.apply_local(&Superoperator::identity(2), &[2, 0]).unwrap();
        assert_eq!(s, before);
        assert!(s.apply_local(&Superoperator::identity(1), &[3]).is_err());
        assert!(s.apply_local(&Superoperator::identity(2), &[1, 1]).is_err());
        assert!(s.apply_local(&Superoperator::identity(2), &[1]).is_err());
    }

    #[test]
    fn reduce_and_embed_are_consistent() {
        let s = PauliState::new(2, "10").unwrap();
        let big = s.embed(&[3, 1], 4).unwrap();
        assert_eq!(big, PauliState::new(4, "0001").unwrap());
        assert_eq!(big.reduce(&[3, 1]).unwrap(), s);
    }

    #[test]
    fn ideal_measurement_of_zero_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let table = MeasurementErrorTable::ideal();
        let mut s = PauliState::new(1, "0").unwrap();
        for _ in 0..20 {
            assert_eq!(s.sample_measurement(0, &table, &mut rng).unwrap(), 1);
            assert_eq!(s, PauliState::new(1, "0").unwrap());
        }
    }

    #[test]
    fn reset_returns_to_ground() {
        let mut s = PauliState::new(2, "11").unwrap();
        s.reset(1).unwrap();
        assert_eq!(s, PauliState::new(2, "10").unwrap());
    }

    #[test]
    fn degenerate_probability_is_a_health_error() {
        let mut s = PauliState::maximally_mixed(1);
        s.coeffs_mut()[3] = 1.5;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = s
            .sample_measurement(0, &MeasurementErrorTable::ideal(), &mut rng)
            .unwrap_err();
        assert!(err.is_numerical());
    }
}
