//! Noiseless checks of the cycle circuits against a code descriptor.
//!
//! Every check runs the circuit on a state vector: unitary part, then
//! projective ancilla measurement and reset. Predictions come from the
//! descriptor alone, so a wrong generator table shows up as failures.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{
    five_qubit_ancilla_generator, five_qubit_cycle, five_qubit_data_site, statevector_run, surface17_cycle,
    CodeDescriptor, CycleOptions, Gate, PrepGate, Schedule, FIVE_QUBIT_ANCILLAS, RING_QUBITS, SURFACE17_QUBITS,
};
use crate::error::{Error, Result};
use crate::noise::{NoiseModel, NoiseParams};
use crate::parallel::Parallelism;
use crate::pauli::{Pauli, PauliString, StateVector};
use crate::runner::{Engine, FiveQubitSimulator, InitialState, SimulatorOptions};

const DETERMINISM_TOL: f64 = 1e-10;
const EXPECTATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub code: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &str, problems: Vec<String>, ok_detail: String) {
        let passed = problems.is_empty();
        let detail = if passed {
            ok_detail
        } else {
            let shown: Vec<&str> = problems.iter().take(5).map(String::as_str).collect();
            let more = problems.len().saturating_sub(shown.len());
            let mut d = shown.join("; ");
            if more > 0 {
                d.push_str(&format!("; and {more} more"));
            }
            d
        };
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        let failed = self.failures().count();
        write!(f, "{}: {} checks, {} failed", self.code, self.checks.len(), failed)
    }
}

/// A noiseless cycle on a state-vector register.
struct Cycle {
    unitary: Schedule,
    ancillas: Vec<usize>,
}

impl Cycle {
    /// Run once; returns each ancilla's result, `None` when it was random.
    fn run(&self, psi: &mut StateVector) -> Result<Vec<Option<i8>>> {
        *psi = statevector_run(&self.unitary, psi)?;
        let x = Gate::X.unitary();
        let mut out = Vec::with_capacity(self.ancillas.len());
        for &a in &self.ancillas {
            let p1 = psi.probability_one(a)?;
            let outcome = u8::from(p1 > 0.5);
            out.push(if p1 < DETERMINISM_TOL {
                Some(1)
            } else if p1 > 1.0 - DETERMINISM_TOL {
                Some(-1)
            } else {
                None
            });
            psi.project(a, outcome)?;
            if outcome == 1 {
                psi.apply_matrix(&x, &[a])?;
            }
        }
        Ok(out)
    }
}

/// Joint `+1` eigenstate of `generators` (placed on `sites`) reached from `seed`.
fn code_state(seed: &StateVector, generators: &[PauliString], sites: &[usize]) -> Option<StateVector> {
    let mut psi = seed.clone();
    for g in generators {
        psi.project_onto_eigenspace(&g.embed(sites, seed.n_qubits()).ok()?).ok()?;
    }
    psi.normalize().ok()?;
    Some(psi)
}

fn single_error(n: usize, pauli: Pauli, qubit: usize) -> PauliString {
    PauliString::on_sites(n, pauli, &[qubit]).expect("qubit in range")
}

fn fmt_bits(bits: &[Option<i8>]) -> String {
    bits.iter()
        .map(|b| match b {
            Some(1) => "+",
            Some(_) => "-",
            None => "?",
        })
        .collect()
}

fn fmt_expected(bits: &[i8]) -> String {
    bits.iter().map(|&b| if b > 0 { '+' } else { '-' }).collect()
}

fn commutation(report: &mut VerifyReport, code: &CodeDescriptor) {
    let failures = code.commutation_failures();
    let n = code.all_generators().len();
    report.push("commutation", failures, format!("{n} generators and 3 logicals commute"));
}

/// Checks of the ring cycle against `code`.
pub fn verify_five_qubit(code: &CodeDescriptor) -> Result<VerifyReport> {
    if code.n_data != 5 {
        return Err(Error::InvalidParameter(format!("{} is not a five-qubit code", code.name)));
    }
    let mut report = VerifyReport {
        code: code.name.clone(),
        checks: Vec::new(),
    };
    commutation(&mut report, code);
    let gens = code.all_generators();
    if gens.len() != 5 {
        return Err(Error::InvalidParameter("the ring measures five generators".into()));
    }

    let redundant = gens[..4].iter().try_fold((0u8, PauliString::identity(5)), |(phase, acc), g| {
        acc.mul(g).map(|(p, s)| ((phase + p) % 4, s))
    })?;
    let mut problems = Vec::new();
    if redundant.0 != 0 || redundant.1 != gens[4] {
        problems.push(format!("g0 g1 g2 g3 = i^{} {} but g4 = {}", redundant.0, redundant.1, gens[4]));
    }
    report.push("redundant generator", problems, format!("g4 = g0 g1 g2 g3 = {}", gens[4]));

    let cycle = Cycle {
        unitary: five_qubit_cycle(&NoiseParams::noiseless(), &CycleOptions::default())?.unitary_part(),
        ancillas: FIVE_QUBIT_ANCILLAS.to_vec(),
    };
    let slots_at = |c: usize| -> Vec<usize> { (0..5).map(|j| five_qubit_data_site(c, j)).collect() };
    let expected_at = |c: usize, error: &PauliString| -> Vec<i8> {
        let syndrome = code.syndrome_of(error);
        (0..5).map(|t| syndrome[five_qubit_ancilla_generator(c, t)]).collect()
    };
    let ground = StateVector::ground(RING_QUBITS);
    let zero_l = code_state(&ground, &gens, &slots_at(0));

    // Deterministic syndromes and preserved logicals on code states.
    let mut problems = Vec::new();
    let mut seeds = Vec::new();
    if let Some(z) = &zero_l {
        let xl = code.logicals[0].embed(&slots_at(0), RING_QUBITS)?;
        let mut one = z.clone();
        one.apply_pauli(&xl)?;
        let mut plus = z.clone();
        plus.project_onto_eigenspace(&xl)?;
        plus.normalize()?;
        seeds = vec![("|0>_L", z.clone()), ("|1>_L", one), ("|+>_L", plus)];
    } else {
        problems.push("the generators have no common +1 eigenstate reachable from |00000>".into());
    }
    const CYCLES: usize = 5;
    for (name, start) in &seeds {
        let mut psi = start.clone();
        let logical_before: Vec<f64> = code
            .logicals
            .iter()
            .map(|l| psi.expectation(&l.embed(&slots_at(0), RING_QUBITS).expect("in range")))
            .collect::<Result<_>>()?;
        for c in 0..CYCLES {
            let bits = cycle.run(&mut psi)?;
            if bits.iter().any(|b| *b != Some(1)) {
                problems.push(format!("{name} cycle {c}: ancillas {} instead of +++++", fmt_bits(&bits)));
            }
            for (l, before) in code.logicals.iter().zip(&logical_before) {
                let after = psi.expectation(&l.embed(&slots_at(c + 1), RING_QUBITS)?)?;
                if (after - before).abs() > EXPECTATION_TOL {
                    problems.push(format!("{name} cycle {c}: <{l}> moved from {before:.6} to {after:.6}"));
                }
            }
        }
    }
    report.push(
        "deterministic syndromes",
        problems,
        format!("{} code states, {CYCLES} cycles: every ancilla +1, logicals preserved", seeds.len()),
    );

    // Every single-qubit error, injected at the start of each cycle of the rotation period.
    let mut problems = Vec::new();
    let mut redundancy = Vec::new();
    let mut patterns = std::collections::BTreeSet::new();
    let mut count = 0;
    if let Some(z) = &zero_l {
        let mut state = z.clone();
        for c in 0..5 {
            for slot in 0..5 {
                for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
                    let error = single_error(5, pauli, slot);
                    let mut psi = state.clone();
                    psi.apply_pauli(&error.embed(&slots_at(c), RING_QUBITS)?)?;
                    let bits = cycle.run(&mut psi)?;
                    let expected = expected_at(c, &error);
                    count += 1;
                    if bits.iter().zip(&expected).any(|(b, e)| *b != Some(*e)) {
                        problems.push(format!(
                            "{error} before cycle {c}: ancillas {} but predicted {}",
                            fmt_bits(&bits),
                            fmt_expected(&expected)
                        ));
                    }
                    if bits.iter().all(Option::is_some) {
                        let by_gen: Vec<i8> = (0..5)
                            .map(|g| {
                                let t = (0..5).find(|&t| five_qubit_ancilla_generator(c, t) == g).expect("bijection");
                                bits[t].expect("checked")
                            })
                            .collect();
                        if by_gen[..4].iter().product::<i8>() != by_gen[4] {
                            redundancy.push(format!("{error} before cycle {c}: g4 result disagrees with g0 g1 g2 g3"));
                        }
                        patterns.insert(by_gen);
                    }
                }
            }
            cycle.run(&mut state)?;
        }
    }
    if patterns.len() != 15 {
        problems.push(format!("{} distinct syndrome patterns for 15 single-qubit errors", patterns.len()));
    }
    report.push(
        "single-error syndromes",
        problems,
        format!("{count} injected errors match the anticommutation pattern; 15 distinct syndromes"),
    );
    report.push(
        "redundant syndrome",
        redundancy,
        "the fifth result equals the product of the other four in every run".into(),
    );

    // The iSWAP as swap, CZ and S on both qubits.
    let swap = {
        let mut m = nalgebra::DMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m[(r, c)] = num_complex::Complex64::new(1.0, 0.0);
        }
        m
    };
    let s = Gate::S.unitary();
    let ss = s.kronecker(&s);
    let composed = swap * Gate::Cz.unitary() * ss;
    let diff = (composed - Gate::ISwap.unitary()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let problems = if diff > 1e-12 {
        vec![format!("SWAP CZ (S x S) differs from iSWAP by {diff:e}")]
    } else {
        Vec::new()
    };
    report.push("iSWAP decomposition", problems, "iSWAP = SWAP CZ (S x S)".into());

    // End-to-end: prep gates, noiseless cycles, readout.
    let mut problems = Vec::new();
    let sim = FiveQubitSimulator::new(
        NoiseModel::noiseless(),
        SimulatorOptions {
            engine: Engine::Full,
            build_parallelism: Parallelism::Sequential,
            ..SimulatorOptions::default()
        },
    )?;
    let mut rng = crate::runner::trajectory_rng(0x5eed, 0);
    for prep in PrepGate::ALL {
        for k in 1..=3 {
            let init = InitialState::Cardinal(prep);
            let rec = sim.run_trajectory(&init, k, true, &mut rng)?;
            let target = prep.bloch();
            let dev = rec.bloch.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if (rec.ub_fidelity - 1.0).abs() > 1e-9 || dev > 1e-9 {
                problems.push(format!("{prep} k={k}: Bloch {:?}, fidelity {}", rec.bloch, rec.ub_fidelity));
            }
            if rec.readout.as_ref().and_then(|r| r.parity) != Some(1) {
                problems.push(format!("{prep} k={k}: final readout parity {:?}", rec.readout));
            }
            // After the first cycle the state is a code state: results repeat.
            for (c, bits) in rec.ancilla_bits.iter().enumerate().skip(1) {
                for t in 0..5 {
                    let g = five_qubit_ancilla_generator(c, t);
                    let t0 = (0..5).find(|&u| five_qubit_ancilla_generator(0, u) == g).expect("bijection");
                    if bits[t] != rec.ancilla_bits[0][t0] {
                        problems.push(format!("{prep} k={k}: generator g{g} changed value in cycle {c}"));
                    }
                }
            }
        }
    }
    report.push(
        "noiseless round trip",
        problems,
        "six prep gates, k = 1..3: Bloch vector recovered, readout parity +1".into(),
    );
    Ok(report)
}

/// Checks of the Surface-17 cycle against `code`.
pub fn verify_surface17(code: &CodeDescriptor) -> Result<VerifyReport> {
    if code.n_data != 9 || code.n_ancilla != 8 {
        return Err(Error::InvalidParameter(format!("{} is not a Surface-17 layout", code.name)));
    }
    let mut report = VerifyReport {
        code: code.name.clone(),
        checks: Vec::new(),
    };
    commutation(&mut report, code);
    let gens = code.all_generators();
    let data: Vec<usize> = (0..9).collect();
    let cycle = Cycle {
        unitary: surface17_cycle().unitary_part(),
        ancillas: (9..SURFACE17_QUBITS).collect(),
    };
    let eigen = code_state(&StateVector::ground(SURFACE17_QUBITS), &gens, &data);

    let mut problems = Vec::new();
    const CYCLES: usize = 3;
    match &eigen {
        Some(start) => {
            let mut psi = start.clone();
            let before: Vec<f64> = code
                .logicals
                .iter()
                .map(|l| psi.expectation(&l.embed(&data, SURFACE17_QUBITS).expect("in range")))
                .collect::<Result<_>>()?;
            for c in 0..CYCLES {
                let bits = cycle.run(&mut psi)?;
                if bits.iter().any(|b| *b != Some(1)) {
                    problems.push(format!("cycle {c}: ancillas {} instead of all +", fmt_bits(&bits)));
                }
                for (l, b) in code.logicals.iter().zip(&before) {
                    let after = psi.expectation(&l.embed(&data, SURFACE17_QUBITS)?)?;
                    if (after - b).abs() > EXPECTATION_TOL {
                        problems.push(format!("cycle {c}: <{l}> moved from {b:.6} to {after:.6}"));
                    }
                }
            }
        }
        None => problems.push("the generators have no common +1 eigenstate reachable from |0...0>".into()),
    }
    report.push(
        "deterministic syndromes",
        problems,
        format!("{CYCLES} cycles on a code state: all eight ancillas +1, logicals preserved"),
    );

    let mut problems = Vec::new();
    let mut count = 0;
    if let Some(start) = &eigen {
        for q in 0..9 {
            for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
                let error = single_error(9, pauli, q);
                let mut psi = start.clone();
                psi.apply_pauli(&error.embed(&data, SURFACE17_QUBITS)?)?;
                let bits = cycle.run(&mut psi)?;
                let expected = code.syndrome_of(&error);
                count += 1;
                if bits.iter().zip(&expected).any(|(b, e)| *b != Some(*e)) {
                    problems.push(format!(
                        "{error}: ancillas {} but predicted {}",
                        fmt_bits(&bits),
                        fmt_expected(&expected)
                    ));
                }
            }
        }
    }
    report.push(
        "single-error syndromes",
        problems,
        format!("{count} injected errors match the anticommutation pattern"),
    );
    Ok(report)
}

/// Run the suite for a code by name: `five_qubit` or `surface17`.
pub fn verify_code(name: &str) -> Result<VerifyReport> {
    match name {
        "five_qubit" | "five-qubit" | "5" => verify_five_qubit(&CodeDescriptor::five_qubit()),
        "surface17" | "surface-17" | "surface17_verify" | "17" => verify_surface17(&CodeDescriptor::surface17()),
        other => Err(Error::Config(format!("unknown code {other:?}; expected five_qubit or surface17"))),
    }
}
