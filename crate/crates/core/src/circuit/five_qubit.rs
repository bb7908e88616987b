//! The five-qubit code on a ten-qubit ring.
//!
//! Data qubits start on the even sites and ancillas sit on the odd sites.
//! Each iSWAP exchanges the two qubits' states, so the data move around the
//! ring: logical slot `j` starts cycle `c` on site `(2j + 4c) mod 10`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{statevector_run, Gate, OpKind, Schedule};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::pauli::StateVector;

pub const RING_QUBITS: usize = 10;
pub const FIVE_QUBIT_DATA: [usize; 5] = [0, 2, 4, 6, 8];
pub const FIVE_QUBIT_ANCILLAS: [usize; 5] = [1, 3, 5, 7, 9];

/// Where the difference between the cycle time and the busy time goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaddingPlacement {
    #[default]
    BeforeMeasurement,
    AfterReset,
    CycleStart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CycleOptions {
    pub padding: PaddingPlacement,
}

/// Single-qubit preparation gate applied to every data qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrepGate {
    I,
    X,
    H,
    ZH,
    SH,
    ZSH,
}

impl PrepGate {
    pub const ALL: [PrepGate; 6] = [PrepGate::I, PrepGate::X, PrepGate::H, PrepGate::ZH, PrepGate::SH, PrepGate::ZSH];

    /// Cardinal-state label: `0`, `1`, `+`, `-`, `i+`, `i-`.
    pub fn label(self) -> &'static str {
        match self {
            PrepGate::I => "0",
            PrepGate::X => "1",
            PrepGate::H => "+",
            PrepGate::ZH => "-",
            PrepGate::SH => "i+",
            PrepGate::ZSH => "i-",
        }
    }

    /// Gates in time order.
    pub fn gates(self) -> Vec<Gate> {
        match self {
            PrepGate::I => vec![],
            PrepGate::X => vec![Gate::X],
            PrepGate::H => vec![Gate::H],
            PrepGate::ZH => vec![Gate::H, Gate::Z],
            PrepGate::SH => vec![Gate::H, Gate::S],
            PrepGate::ZSH => vec![Gate::H, Gate::S, Gate::Z],
        }
    }

    /// Gates undoing [`PrepGate::gates`], in time order.
    pub fn inverse_gates(self) -> Vec<Gate> {
        match self {
            PrepGate::I => vec![],
            PrepGate::X => vec![Gate::X],
            PrepGate::H => vec![Gate::H],
            PrepGate::ZH => vec![Gate::Z, Gate::H],
            PrepGate::SH => vec![Gate::Sdg, Gate::H],
            PrepGate::ZSH => vec![Gate::Z, Gate::Sdg, Gate::H],
        }
    }

    /// Index of the prepared Bloch axis: 0 for X, 1 for Y, 2 for Z.
    pub fn axis(self) -> usize {
        match self {
            PrepGate::I | PrepGate::X => 2,
            PrepGate::H | PrepGate::ZH => 0,
            PrepGate::SH | PrepGate::ZSH => 1,
        }
    }

    pub fn axis_name(self) -> &'static str {
        ["X", "Y", "Z"][self.axis()]
    }

    /// Eigenvalue of the prepared axis: the sign relating the product of the
    /// final readouts to the logical operator.
    pub fn sign(self) -> i8 {
        match self {
            PrepGate::I | PrepGate::H | PrepGate::SH => 1,
            _ => -1,
        }
    }

    pub fn bloch(self) -> [f64; 3] {
        let mut r = [0.0; 3];
        r[self.axis()] = self.sign() as f64;
        r
    }
}

impl fmt::Display for PrepGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PrepGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().trim_start_matches('|').trim_end_matches('>') {
            "0" | "I" | "identity" => PrepGate::I,
            "1" | "X" => PrepGate::X,
            "+" | "H" => PrepGate::H,
            "-" | "ZH" => PrepGate::ZH,
            "i+" | "+i" | "SH" => PrepGate::SH,
            "i-" | "-i" | "ZSH" => PrepGate::ZSH,
            other => return Err(Error::Config(format!("unknown cardinal state {other:?}"))),
        })
    }
}

/// Physical site of logical slot `slot` at the start of cycle `cycle`.
pub fn five_qubit_data_site(cycle: usize, slot: usize) -> usize {
    (2 * slot + 4 * cycle) % RING_QUBITS
}

/// Generator index measured by ancilla `t` (site `2t + 1`) during cycle `cycle`.
pub fn five_qubit_ancilla_generator(cycle: usize, ancilla: usize) -> usize {
    (ancilla + 4 + 3 * (cycle % 5)) % 5
}

/// One error-correction cycle on the ring.
///
/// Ancilla Hadamards, four series of simultaneous iSWAPs each followed by
/// virtual `S^dagger` on both partners (together a SWAP and a CZ), more
/// Hadamards where the parity information sits on odd sites, then ancilla
/// measurement and reset. Every qubit idles whenever it is not busy.
pub fn five_qubit_cycle(params: &NoiseParams, options: &CycleOptions) -> Result<Schedule> {
    let (t1, t2) = (params.tau1_ns, params.tau2_ns);
    let busy = 4.0 * t1 + 4.0 * t2 + params.t_meas_ns + params.t_reset_ns;
    let pad = params.t_cycle_ns - busy;
    if pad < -1e-9 {
        return Err(Error::InvalidParameter(format!(
            "cycle time {} ns is shorter than the {busy} ns of scheduled operations",
            params.t_cycle_ns
        )));
    }
    let pad = pad.max(0.0);
    let mut s = Schedule::new(RING_QUBITS, params.t_cycle_ns);
    let mut t = if options.padding == PaddingPlacement::CycleStart { pad } else { 0.0 };
    s.push_each(t, t1, OpKind::Gate(Gate::H), &FIVE_QUBIT_ANCILLAS)?;
    t += t1;
    for series in 0..4 {
        let offset = series % 2;
        for i in 0..5 {
            let pair = [(2 * i + offset) % RING_QUBITS, (2 * i + offset + 1) % RING_QUBITS];
            s.push(t, t2, OpKind::Gate(Gate::ISwap), &pair)?;
            s.push_each(t + t2, 0.0, OpKind::Gate(Gate::Sdg), &pair)?;
        }
        t += t2;
        if series != 1 {
            s.push_each(t, t1, OpKind::Gate(Gate::H), &FIVE_QUBIT_ANCILLAS)?;
            t += t1;
        }
    }
    if options.padding == PaddingPlacement::BeforeMeasurement {
        t += pad;
    }
    s.push_each(t, params.t_meas_ns, OpKind::Measure, &FIVE_QUBIT_ANCILLAS)?;
    s.push_each(t + params.t_meas_ns, params.t_reset_ns, OpKind::Reset, &FIVE_QUBIT_ANCILLAS)?;
    s.fill_idles();
    s.validate(true)?;
    Ok(s)
}

/// Gates of `gates` on every data site: physical gates take `tau1` starting at
/// 0, virtual gates act instantaneously before or after them in order.
fn single_qubit_stage(gates: &[Gate], tau1: f64, measure: Option<f64>) -> Result<Schedule> {
    let total = tau1 + measure.unwrap_or(0.0);
    let mut s = Schedule::new(RING_QUBITS, total);
    let mut seen_physical = false;
    for &g in gates {
        if g.is_virtual() {
            let at = if seen_physical { tau1 } else { 0.0 };
            s.push_each(at, 0.0, OpKind::Gate(g), &FIVE_QUBIT_DATA)?;
        } else {
            if seen_physical {
                return Err(Error::Unsupported("two physical gates in one stage".into()));
            }
            seen_physical = true;
            s.push_each(0.0, tau1, OpKind::Gate(g), &FIVE_QUBIT_DATA)?;
        }
    }
    if let Some(t_m) = measure {
        s.push_each(tau1, t_m, OpKind::Measure, &FIVE_QUBIT_DATA)?;
    }
    s.fill_idles();
    s.validate(true)?;
    Ok(s)
}

/// `prep` on every data qubit; ancillas idle in `|0>`.
pub fn prep_stage(prep: PrepGate, params: &NoiseParams) -> Result<Schedule> {
    single_qubit_stage(&prep.gates(), params.tau1_ns, None)
}

/// Inverse of `prep` on every data qubit, then data-qubit measurement.
pub fn readout_stage(prep: PrepGate, params: &NoiseParams) -> Result<Schedule> {
    single_qubit_stage(&prep.inverse_gates(), params.tau1_ns, Some(params.t_meas_ns))
}

/// Initialization with `prep` on every data qubit, `k` cycles, and the final
/// stage: the inverse preparation followed by data-qubit measurement.
pub fn five_qubit_experiment(prep: PrepGate, k: usize, params: &NoiseParams, options: &CycleOptions) -> Result<Schedule> {
    if k == 0 {
        return Err(Error::InvalidParameter("the experiment needs at least one cycle".into()));
    }
    let mut s = prep_stage(prep, params)?;
    let cycle = five_qubit_cycle(params, options)?;
    for _ in 0..k {
        s.append(&cycle)?;
    }
    s.append(&readout_stage(prep, params)?)?;
    s.validate(true)?;
    Ok(s)
}

/// Noiseless circuit taking `(a|0> + b|1>) |0000>` to `a|00000> + b|11111>`.
pub fn encoding_schedule() -> Schedule {
    let mut s = Schedule::new(5, 160.0);
    for (i, target) in (1..5).enumerate() {
        s.push(40.0 * i as f64, 40.0, OpKind::Gate(Gate::Cnot), &[0, target]).expect("static circuit");
    }
    s
}

pub fn encoding_circuit(alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    let input = StateVector::single_qubit_product(5, alpha, beta)?;
    statevector_run(&encoding_schedule(), &input)
}
