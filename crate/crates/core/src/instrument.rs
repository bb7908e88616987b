//! The ring cycle compiled into a quantum instrument on the data qubits.
//!
//! Ancillas enter every cycle in `|0>` and leave it reset, so one cycle acts
//! on the five data qubits as a family of 32 linear maps `M_r`, one per
//! reported syndrome `r`: `p(r) = (M_r c)_I` and the post-measurement state is
//! `M_r c / p(r)`. The maps are built once per noise model by pushing every
//! data Pauli through the ten-qubit circuit, and each trajectory step then
//! costs one 1024x1024 matrix-vector product instead of a full ten-qubit
//! simulation.

use rand::Rng;

use crate::circuit::{Moment, Schedule, FIVE_QUBIT_ANCILLAS, FIVE_QUBIT_DATA, RING_QUBITS};
use crate::compile::{Channel, CompileOptions, GateLibrary, Program, Step};
use crate::error::{Error, Result};
use crate::noise::MeasurementErrorTable;
use crate::parallel::{map_indexed, Parallelism};
use crate::pauli::checked_probability;

/// Data-register dimension, `4^5`.
pub const DATA_DIM: usize = 1024;
/// Number of syndrome outcomes, `2^5`.
pub const OUTCOMES: usize = 32;

/// Bit `t` of an outcome index is set when ancilla `t` reported `-1`.
pub fn outcome_bits(r: usize) -> [i8; 5] {
    std::array::from_fn(|t| if r >> t & 1 == 1 { -1 } else { 1 })
}

/// Move data slot `j` to slot `j + shift` (two ring sites per slot).
fn rotate_pauli(index: usize, shift: usize) -> usize {
    (0..5).fold(0, |acc, j| acc | ((index >> (2 * j) & 3) << (2 * ((j + shift) % 5))))
}

fn rotate_outcome(r: usize, shift: usize) -> usize {
    (0..5).fold(0, |acc, t| acc | ((r >> t & 1) << ((t + shift) % 5)))
}

/// Whether translating every moment by two ring sites gives the same schedule.
pub fn is_ring_symmetric(schedule: &Schedule) -> bool {
    let key = |m: &Moment, shift: usize| {
        let sites: Vec<usize> = m.sites.iter().map(|s| (s + shift) % RING_QUBITS).collect();
        (m.start_ns.to_bits(), m.duration_ns.to_bits(), format!("{:?}", m.kind), sites)
    };
    let mut a: Vec<_> = schedule.moments().iter().map(|m| key(m, 0)).collect();
    let mut b: Vec<_> = schedule.moments().iter().map(|m| key(m, 2)).collect();
    a.sort();
    b.sort();
    schedule.n_qubits() == RING_QUBITS && a == b
}

#[derive(Debug, Clone)]
pub struct CycleInstrument {
    /// `maps[r * DATA_DIM * DATA_DIM + row * DATA_DIM + col]`.
    maps: Vec<f64>,
}

struct SplitCycle {
    pre: Vec<Channel>,
    /// Post-measurement data channels, on data-register sites.
    post: Vec<Channel>,
}

fn split_cycle(program: &Program) -> Result<SplitCycle> {
    let data_slot = |site: usize| FIVE_QUBIT_DATA.iter().position(|&d| d == site);
    let mut pre = Vec::new();
    let mut post = Vec::new();
    let mut measured = Vec::new();
    let mut reset = Vec::new();
    for step in program.steps() {
        match step {
            Step::Apply(c) => {
                let slots: Option<Vec<usize>> = c.sites().iter().map(|&s| data_slot(s)).collect();
                let touches_measured = c.sites().iter().any(|s| measured.contains(s));
                match slots {
                    Some(slots) if !measured.is_empty() => post.push(Channel::new(slots, c.op().clone())),
                    _ if !touches_measured && post.is_empty() => pre.push(c.clone()),
                    _ => {
                        return Err(Error::Unsupported(format!(
                            "operation on sites {:?} interleaved with the ancilla measurements",
                            c.sites()
                        )))
                    }
                }
            }
            Step::Measure(q) => measured.push(*q),
            Step::Reset(q) => {
                if !measured.contains(q) {
                    return Err(Error::Unsupported(format!("reset of qubit {q} before its measurement")));
                }
                reset.push(*q);
            }
        }
    }
    measured.sort();
    reset.sort();
    if measured != FIVE_QUBIT_ANCILLAS || reset != FIVE_QUBIT_ANCILLAS {
        return Err(Error::Unsupported(
            "the cycle must measure and then reset every ancilla exactly once".into(),
        ));
    }
    Ok(SplitCycle { pre, post })
}

/// Index offset of a data Pauli in the ten-qubit register.
fn spread_data(index: usize) -> usize {
    (0..5).fold(0, |acc, j| acc | ((index >> (2 * j) & 3) << (2 * FIVE_QUBIT_DATA[j])))
}

/// Index offset of an ancilla pattern in `{I, Z}^5`; bit `t` selects `Z`.
fn spread_ancilla(pattern: usize) -> usize {
    (0..5).fold(0, |acc, t| acc | ((pattern >> t & 1) * 3) << (2 * FIVE_QUBIT_ANCILLAS[t]))
}

/// Outcome-resolved images `out[r * DATA_DIM + row]` of data Pauli `input`.
fn column(input: usize, split: &SplitCycle, table: &MeasurementErrorTable) -> Vec<f64> {
    let mut v = vec![0.0; 1usize << (2 * RING_QUBITS)];
    let base = spread_data(input);
    let anc: Vec<usize> = (0..OUTCOMES).map(spread_ancilla).collect();
    for &a in &anc {
        v[base + a] = 1.0;
    }
    for c in &split.pre {
        c.apply_to(&mut v);
    }
    // Effect of result r on a qubit with Pauli components (c_I, c_Z).
    let u = |r: usize| {
        let m = if r == 0 { 1 } else { -1 };
        let (p0, p1) = (table.result_probability(0, m), table.result_probability(1, m));
        (0.5 * (p0 + p1), 0.5 * (p0 - p1))
    };
    let (u0, u1) = (u(0), u(1));
    let mut out = vec![0.0; OUTCOMES * DATA_DIM];
    let mut w = [0.0f64; OUTCOMES];
    for d in 0..DATA_DIM {
        let db = spread_data(d);
        for (slot, &a) in w.iter_mut().zip(&anc) {
            *slot = v[db + a];
        }
        for t in 0..5 {
            let bit = 1 << t;
            for a in (0..OUTCOMES).filter(|a| a & bit == 0) {
                let (x, z) = (w[a], w[a | bit]);
                w[a] = u0.0 * x + u0.1 * z;
                w[a | bit] = u1.0 * x + u1.1 * z;
            }
        }
        for r in 0..OUTCOMES {
            out[r * DATA_DIM + d] = w[r];
        }
    }
    for chunk in out.chunks_mut(DATA_DIM) {
        for c in &split.post {
            c.apply_to(chunk);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

impl CycleInstrument {
    /// Compile `cycle` (a ring cycle with ancillas measured then reset) under
    /// the library's noise and the given measurement model.
    pub fn build(
        cycle: &Schedule,
        library: &mut GateLibrary,
        table: &MeasurementErrorTable,
        parallelism: Parallelism,
    ) -> Result<Self> {
        table.validate()?;
        let program = Program::compile(cycle, library, CompileOptions::default())?;
        let split = split_cycle(&program)?;
        let symmetric = is_ring_symmetric(cycle);
        let inputs: Vec<usize> = (0..DATA_DIM)
            .filter(|&p| !symmetric || (1..5).all(|s| rotate_pauli(p, s) >= p))
            .collect();
        log::debug!(
            "building cycle instrument from {} inputs (ring symmetry {})",
            inputs.len(),
            if symmetric { "used" } else { "absent" }
        );
        let columns = map_indexed(parallelism, inputs.len(), |i| column(inputs[i], &split, table))?;

        let mut maps = vec![0.0; OUTCOMES * DATA_DIM * DATA_DIM];
        for (&p, out) in inputs.iter().zip(&columns) {
            let shifts = if symmetric { 5 } else { 1 };
            for s in 0..shifts {
                let ps = rotate_pauli(p, s);
                for r in 0..OUTCOMES {
                    let rs = rotate_outcome(r, s);
                    let block = &mut maps[rs * DATA_DIM * DATA_DIM..(rs + 1) * DATA_DIM * DATA_DIM];
                    for d in 0..DATA_DIM {
                        block[rotate_pauli(d, s) * DATA_DIM + ps] = out[r * DATA_DIM + d];
                    }
                }
            }
        }
        Ok(Self { maps })
    }

    pub fn map(&self, r: usize) -> &[f64] {
        &self.maps[r * DATA_DIM * DATA_DIM..(r + 1) * DATA_DIM * DATA_DIM]
    }

    /// `p(r)` for every outcome.
    pub fn probabilities(&self, coeffs: &[f64]) -> [f64; OUTCOMES] {
        std::array::from_fn(|r| dot(&self.map(r)[..DATA_DIM], coeffs))
    }

    /// Post-measurement state for outcome `r`, written to `out`. Returns `p(r)`.
    pub fn apply(&self, r: usize, coeffs: &[f64], out: &mut [f64]) -> Result<f64> {
        let m = self.map(r);
        for (row, o) in m.chunks_exact(DATA_DIM).zip(out.iter_mut()) {
            *o = dot(row, coeffs);
        }
        let p = out[0];
        if !(p > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / p;
        out.iter_mut().for_each(|x| *x *= inv);
        out[0] = 1.0;
        Ok(p)
    }

    /// Sample an outcome and update `coeffs` in place.
    pub fn step<R: Rng + ?Sized>(&self, coeffs: &mut Vec<f64>, scratch: &mut Vec<f64>, rng: &mut R) -> Result<usize> {
        let probs = self.probabilities(coeffs);
        let total: f64 = probs.iter().sum();
        checked_probability(total)?;
        for &p in &probs {
            checked_probability(p)?;
        }
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (r, &p) in probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            chosen = Some(r);
            acc += p;
            if u < acc {
                break;
            }
        }
        let r = chosen.ok_or(Error::ZeroNorm)?;
        scratch.resize(DATA_DIM, 0.0);
        self.apply(r, coeffs, scratch)?;
        std::mem::swap(coeffs, scratch);
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{five_qubit_cycle, CycleOptions};
    use crate::noise::NoiseParams;

    #[test]
    fn rotations_are_cyclic() {
        for p in [0, 1, 7, 341, 1000] {
            assert_eq!(rotate_pauli(rotate_pauli(p, 2), 3), p);
        }
        assert_eq!(rotate_pauli(1, 1), 4);
        assert_eq!(rotate_outcome(0b10000, 1), 1);
    }

    #[test]
    fn ring_cycle_is_symmetric() {
        let s = five_qubit_cycle(&NoiseParams::default(), &CycleOptions::default()).unwrap();
        assert!(is_ring_symmetric(&s));
    }
}
