//! Monte Carlo memory experiments on the five-qubit ring.
//!
//! A trajectory prepares a logical state, runs `k` stabilizer cycles with
//! sampled ancilla results, and records the logical Bloch vector of the data
//! qubits after every cycle. The upper-bound fidelity is the largest
//! eigenvalue of the logical density matrix, `(1 + |r|) / 2`.

use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    encoding_circuit, five_qubit_cycle, prep_stage, readout_stage, CodeDescriptor, CycleOptions, PrepGate,
    FIVE_QUBIT_DATA, RING_QUBITS,
};
use crate::compile::{CompileOptions, GateLibrary, Program};
use crate::error::{Error, Result};
use crate::instrument::{outcome_bits, CycleInstrument, DATA_DIM};
use crate::noise::NoiseModel;
use crate::parallel::{map_indexed, Parallelism};
use crate::pauli::{PauliState, StateVector};

/// Coefficient indices of `XXXXX`, `YYYYY` and `ZZZZZ` in a five-qubit state.
const LOGICAL_INDEX: [usize; 3] = [341, 682, 1023];

/// How far `|r|` may exceed one before the state is declared unphysical.
const BLOCH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Product state prepared by the same single-qubit gate on every data qubit.
    Cardinal(PrepGate),
    /// Exact code eigenstate, `|1>_L` when `true`.
    Exact(bool),
    /// `alpha |00000> + beta |11111>` from the encoding circuit.
    Amplitudes(Complex64, Complex64),
}

impl InitialState {
    pub fn label(&self) -> String {
        match self {
            InitialState::Cardinal(p) => p.label().into(),
            InitialState::Exact(one) => if *one { "1L" } else { "0L" }.into(),
            InitialState::Amplitudes(..) => "amplitudes".into(),
        }
    }

    pub fn amplitudes(&self) -> Option<[[f64; 2]; 2]> {
        match self {
            InitialState::Amplitudes(a, b) => Some([[a.re, a.im], [b.re, b.im]]),
            _ => None,
        }
    }

    /// Gate whose inverse precedes the final readout.
    fn readout_gate(&self) -> PrepGate {
        match self {
            InitialState::Cardinal(p) => *p,
            _ => PrepGate::I,
        }
    }

    /// Ideal logical value of the read-out axis, when it is deterministic.
    pub fn expected_readout(&self) -> Option<i8> {
        match self {
            InitialState::Cardinal(p) => Some(p.sign()),
            InitialState::Exact(one) => Some(if *one { -1 } else { 1 }),
            InitialState::Amplitudes(..) => None,
        }
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0L" | "0l" => Ok(InitialState::Exact(false)),
            "1L" | "1l" => Ok(InitialState::Exact(true)),
            _ => s.parse().map(InitialState::Cardinal),
        }
    }
}

/// `(Tr X_L rho, Tr Y_L rho, Tr Z_L rho)` of a five-qubit state.
pub fn logical_bloch(state: &PauliState) -> Result<[f64; 3]> {
    if state.n_qubits() != 5 {
        return Err(Error::BadShape(format!("logical Bloch vector of a {}-qubit state", state.n_qubits())));
    }
    Ok(bloch_of(state.coeffs()))
}

fn bloch_of(coeffs: &[f64]) -> [f64; 3] {
    LOGICAL_INDEX.map(|i| coeffs[i])
}

/// Largest eigenvalue of the logical density matrix.
pub fn upper_bound_fidelity(state: &PauliState) -> Result<f64> {
    fidelity_from_bloch(logical_bloch(state)?)
}

pub fn fidelity_from_bloch(r: [f64; 3]) -> Result<f64> {
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm <= 1.0 + BLOCH_TOLERANCE) {
        return Err(Error::NumericalHealth(format!("logical Bloch vector of length {norm}")));
    }
    Ok((0.5 * (1.0 + norm)).min(1.0))
}

/// Code eigenstate with all generators `+1` and `Z_L = +1` (or `-1`).
pub fn exact_logical_init(one: bool) -> Result<PauliState> {
    let code = CodeDescriptor::five_qubit();
    let mut psi = StateVector::new(5, if one { "11111" } else { "00000" })?;
    for g in &code.generators {
        psi.project_onto_eigenspace(g)?;
    }
    psi.normalize()?;
    psi.to_pauli_state()
}

/// Independent RNG stream for trajectory `index` of a seeded ensemble.
pub fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Precompiled per-outcome maps on the data register.
    #[default]
    Instrument,
    /// Step-by-step simulation of all ten qubits.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatorOptions {
    pub cycle: CycleOptions,
    /// Apply gate noise to the basis change before the final readout.
    pub noisy_final_gates: bool,
    pub engine: Engine,
    /// Used while building the cycle instrument.
    pub build_parallelism: Parallelism,
}

impl Default for SimulatorOptions {
    fn default() -> Self {
        Self {
            cycle: CycleOptions::default(),
            noisy_final_gates: true,
            engine: Engine::Instrument,
            build_parallelism: Parallelism::Auto,
        }
    }
}

enum Backend {
    Instrument(Box<CycleInstrument>),
    Full(Program),
}

struct Stages {
    gate: PrepGate,
    prep: Program,
    readout: Program,
}

/// One trajectory, cycle by cycle.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub ancilla_bits: Vec<[i8; 5]>,
    /// Logical Bloch vector after each cycle.
    pub bloch: Vec<[f64; 3]>,
    /// Data-qubit results of the final readout, by data register slot.
    pub final_data_bits: Option<[i8; 5]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicalReadout {
    /// `"X"`, `"Y"` or `"Z"`.
    pub axis: String,
    /// Logical value inferred from the product of the final data bits.
    pub value: i8,
    /// `value` times the ideal value; `+1` when no logical error is seen.
    /// Absent for states without a deterministic readout.
    pub parity: Option<i8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub initial_state: String,
    pub amplitudes: Option<[[f64; 2]; 2]>,
    pub k: usize,
    pub ancilla_bits: Vec<[i8; 5]>,
    pub final_data_bits: Option<[i8; 5]>,
    pub readout: Option<LogicalReadout>,
    pub bloch: [f64; 3],
    pub ub_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub k: usize,
    pub time_us: f64,
    pub mean_fidelity: f64,
    pub stderr: f64,
    pub n_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub initial_state: String,
    pub rows: Vec<SummaryRow>,
    pub wall_time_s: f64,
}

/// The five-qubit memory experiment under one noise model.
pub struct FiveQubitSimulator {
    model: NoiseModel,
    options: SimulatorOptions,
    backend: Backend,
    stages: Vec<Stages>,
}

impl FiveQubitSimulator {
    pub fn new(model: NoiseModel, options: SimulatorOptions) -> Result<Self> {
        model.validate()?;
        let params = model.params;
        let mut lib = GateLibrary::new(params, false)?;
        let mut final_lib = GateLibrary::new(params, !options.noisy_final_gates)?;
        let cycle = five_qubit_cycle(&params, &options.cycle)?;
        let started = Instant::now();
        let backend = match options.engine {
            Engine::Instrument => Backend::Instrument(Box::new(CycleInstrument::build(
                &cycle,
                &mut lib,
                &model.measurement,
                options.build_parallelism,
            )?)),
            Engine::Full => Backend::Full(Program::compile(&cycle, &mut lib, CompileOptions::default())?),
        };
        log::debug!("cycle compiled in {:.2?}", started.elapsed());
        let narrow = |p: Program| match options.engine {
            Engine::Instrument => p.restrict(&FIVE_QUBIT_DATA),
            Engine::Full => Ok(p),
        };
        let stages = PrepGate::ALL
            .iter()
            .map(|&gate| {
                let prep = Program::compile(&prep_stage(gate, &params)?, &mut lib, CompileOptions::default())?;
                let readout =
                    Program::compile(&readout_stage(gate, &params)?, &mut final_lib, CompileOptions::default())?;
                Ok(Stages {
                    gate,
                    prep: narrow(prep)?,
                    readout: narrow(readout)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model,
            options,
            backend,
            stages,
        })
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    pub fn options(&self) -> &SimulatorOptions {
        &self.options
    }

    pub fn cycle_time_us(&self) -> f64 {
        self.model.params.t_cycle_ns / 1000.0
    }

    pub fn instrument(&self) -> Option<&CycleInstrument> {
        match &self.backend {
            Backend::Instrument(i) => Some(i),
            Backend::Full(_) => None,
        }
    }

    fn stages(&self, gate: PrepGate) -> &Stages {
        self.stages.iter().find(|s| s.gate == gate).expect("every prep gate is compiled")
    }

    /// Data-register state right after initialization.
    pub fn initial_data_state(&self, init: &InitialState) -> Result<PauliState> {
        match *init {
            InitialState::Cardinal(gate) => {
                let mut s = PauliState::ground(5);
                let prep = match &self.backend {
                    Backend::Instrument(_) => self.stages(gate).prep.clone(),
                    Backend::Full(_) => self.stages(gate).prep.restrict(&FIVE_QUBIT_DATA)?,
                };
                prep.run_channels(&mut s)?;
                Ok(s)
            }
            InitialState::Exact(one) => exact_logical_init(one),
            InitialState::Amplitudes(a, b) => {
                let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
                if !(norm > 0.0) || !norm.is_finite() {
                    return Err(Error::InvalidParameter("amplitudes must not both vanish".into()));
                }
                encoding_circuit(a / norm, b / norm)?.to_pauli_state()
            }
        }
    }

    /// Run `k` cycles, optionally followed by a sampled readout of the data qubits.
    pub fn trajectory<R: Rng + ?Sized>(
        &self,
        init: &InitialState,
        k: usize,
        readout: bool,
        rng: &mut R,
    ) -> Result<Trajectory> {
        let mut ancilla_bits = Vec::with_capacity(k);
        let mut bloch = Vec::with_capacity(k);
        let stages = self.stages(init.readout_gate());
        let final_data_bits = match &self.backend {
            Backend::Instrument(inst) => {
                let mut coeffs = self.initial_data_state(init)?.into_coeffs();
                let mut scratch = vec![0.0; DATA_DIM];
                for _ in 0..k {
                    let r = inst.step(&mut coeffs, &mut scratch, rng)?;
                    ancilla_bits.push(outcome_bits(r));
                    bloch.push(bloch_of(&coeffs));
                }
                if readout {
                    let mut state = PauliState::from_coeffs(5, coeffs)?;
                    Some(sorted_bits(stages.readout.run(&mut state, &self.model.measurement, rng)?))
                } else {
                    None
                }
            }
            Backend::Full(cycle) => {
                let mut state = match init {
                    InitialState::Cardinal(gate) => {
                        let mut s = PauliState::ground(RING_QUBITS);
                        self.stages(*gate).prep.run_channels(&mut s)?;
                        s
                    }
                    _ => self.initial_data_state(init)?.embed(&FIVE_QUBIT_DATA, RING_QUBITS)?,
                };
                for _ in 0..k {
                    let results = cycle.run(&mut state, &self.model.measurement, rng)?;
                    ancilla_bits.push(sorted_bits(results));
                    bloch.push(logical_bloch(&state.reduce(&FIVE_QUBIT_DATA)?)?);
                }
                if readout {
                    Some(sorted_bits(stages.readout.run(&mut state, &self.model.measurement, rng)?))
                } else {
                    None
                }
            }
        };
        Ok(Trajectory {
            ancilla_bits,
            bloch,
            final_data_bits,
        })
    }

    pub fn run_trajectory<R: Rng + ?Sized>(
        &self,
        init: &InitialState,
        k: usize,
        readout: bool,
        rng: &mut R,
    ) -> Result<TrajectoryRecord> {
        let t = self.trajectory(init, k, readout, rng)?;
        let bloch = match t.bloch.last() {
            Some(b) => *b,
            None => logical_bloch(&self.initial_data_state(init)?)?,
        };
        let readout = t.final_data_bits.map(|bits| {
            let gate = init.readout_gate();
            let product: i8 = bits.iter().product();
            let value = gate.sign() * product;
            LogicalReadout {
                axis: gate.axis_name().into(),
                value,
                parity: init.expected_readout().map(|e| e * value),
            }
        });
        Ok(TrajectoryRecord {
            initial_state: init.label(),
            amplitudes: init.amplitudes(),
            k,
            ancilla_bits: t.ancilla_bits,
            final_data_bits: t.final_data_bits,
            readout,
            bloch,
            ub_fidelity: fidelity_from_bloch(bloch)?,
        })
    }

    /// `n_runs` seeded trajectories of `k` cycles each, in index order.
    pub fn run_records(
        &self,
        init: &InitialState,
        n_runs: usize,
        k: usize,
        seed: u64,
        readout: bool,
        parallelism: Parallelism,
    ) -> Result<Vec<TrajectoryRecord>> {
        map_indexed(parallelism, n_runs, |i| {
            self.run_trajectory(init, k, readout, &mut trajectory_rng(seed, i))
        })?
        .into_iter()
        .collect()
    }

    /// Upper-bound fidelity after each cycle `1..=k_max`, one curve per
    /// trajectory, in trajectory order.
    ///
    /// Each trajectory runs `k_max` cycles once and contributes its fidelity
    /// at every intermediate `k`, so points of one curve are correlated.
    pub fn run_fidelity_curves(
        &self,
        init: &InitialState,
        n_runs: usize,
        k_max: usize,
        seed: u64,
        parallelism: Parallelism,
    ) -> Result<Vec<Vec<f64>>> {
        if n_runs == 0 || k_max == 0 {
            return Err(Error::InvalidParameter("an ensemble needs at least one run and one cycle".into()));
        }
        map_indexed(parallelism, n_runs, |i| -> Result<Vec<f64>> {
            let t = self.trajectory(init, k_max, false, &mut trajectory_rng(seed, i))?;
            t.bloch.into_iter().map(fidelity_from_bloch).collect()
        })?
        .into_iter()
        .collect()
    }

    /// Mean upper-bound fidelity after every cycle count `1..=k_max`.
    ///
    /// Sums run in trajectory order, so the summary does not depend on the
    /// worker count.
    pub fn run_ensemble(
        &self,
        init: &InitialState,
        n_runs: usize,
        k_max: usize,
        seed: u64,
        parallelism: Parallelism,
    ) -> Result<EnsembleSummary> {
        let started = Instant::now();
        let curves = self.run_fidelity_curves(init, n_runs, k_max, seed, parallelism)?;
        Ok(EnsembleSummary {
            initial_state: init.label(),
            rows: summarize_curves(&curves, self.cycle_time_us())?,
            wall_time_s: started.elapsed().as_secs_f64(),
        })
    }
}

/// Per-cycle mean and standard error of equally long fidelity curves.
pub fn summarize_curves(curves: &[Vec<f64>], cycle_time_us: f64) -> Result<Vec<SummaryRow>> {
    let k_max = curves.first().map_or(0, Vec::len);
    if k_max == 0 || curves.iter().any(|c| c.len() != k_max) {
        return Err(Error::BadShape("fidelity curves must be non-empty and equally long".into()));
    }
    let n_runs = curves.len();
    let n = n_runs as f64;
    Ok((0..k_max)
        .map(|c| {
            let mean = curves.iter().map(|f| f[c]).sum::<f64>() / n;
            let var = if n_runs > 1 {
                curves.iter().map(|f| (f[c] - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            SummaryRow {
                k: c + 1,
                time_us: (c + 1) as f64 * cycle_time_us,
                mean_fidelity: mean,
                stderr: (var / n).sqrt(),
                n_runs,
            }
        })
        .collect())
}

/// Results ordered by site, as `+1 / -1`.
fn sorted_bits(mut results: Vec<(usize, i8)>) -> [i8; 5] {
    results.sort_by_key(|r| r.0);
    let mut out = [1; 5];
    for (o, r) in out.iter_mut().zip(results) {
        *o = r.1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bloch_of_simple_states() {
        assert_eq!(logical_bloch(&PauliState::ground(5)).unwrap(), [0.0, 0.0, 1.0]);
        let mixed = PauliState::maximally_mixed(5);
        assert_eq!(upper_bound_fidelity(&mixed).unwrap(), 0.5);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = encoding_circuit(Complex64::new(h, 0.0), Complex64::new(h, 0.0)).unwrap();
        let r = logical_bloch(&plus.to_pauli_state().unwrap()).unwrap();
        assert_abs_diff_eq!(r[0], 1.0, epsilon = 1e-12);
        assert!(logical_bloch(&PauliState::ground(4)).is_err());
        assert_abs_diff_eq!(fidelity_from_bloch([0.6, 0.0, 0.0]).unwrap(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn exact_states_are_code_states() {
        let code = CodeDescriptor::five_qubit();
        for (one, z) in [(false, 1.0), (true, -1.0)] {
            let s = exact_logical_init(one).unwrap();
            for g in &code.generators {
                assert_abs_diff_eq!(s.expectation(g).unwrap(), 1.0, epsilon = 1e-12);
            }
            assert_abs_diff_eq!(s.expectation_str("ZZZZZ").unwrap(), z, epsilon = 1e-12);
            assert_abs_diff_eq!(upper_bound_fidelity(&s).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn labels_parse() {
        for s in ["0", "1", "+", "-", "i+", "i-", "0L", "1L"] {
            assert_eq!(s.parse::<InitialState>().unwrap().label(), s);
        }
        assert!("2".parse::<InitialState>().is_err());
    }

    #[test]
    fn streams_differ() {
        let a: u64 = trajectory_rng(1, 0).random();
        let b: u64 = trajectory_rng(1, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, trajectory_rng(1, 0).random::<u64>());
    }
}
