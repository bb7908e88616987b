//! Lowering of a timed schedule to a flat list of transfer-matrix steps.
//!
//! Single-qubit channels are folded into the next two-qubit channel on the
//! same site, so a ring cycle becomes little more than its twenty iSWAPs.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::Rng;

use crate::circuit::{Gate, OpKind, Schedule};
use crate::error::{Error, Result};
use crate::noise::{
    hadamard_ptm, idle_ptm, physical_rotation_ptm, two_qubit_ptm, MeasurementErrorTable, NoiseParams, TwoQubitKind,
};
use crate::pauli::{ptm_from_unitary, LocalKernel, PauliState, Superoperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    /// Merge single-qubit channels into neighbouring two-qubit channels.
    pub fuse: bool,
    /// Use ideal transfer matrices for physical gates. Idling noise is kept.
    pub ideal_gates: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            fuse: true,
            ideal_gates: false,
        }
    }
}

/// A transfer matrix bound to its sites.
#[derive(Debug, Clone)]
pub struct Channel {
    sites: Vec<usize>,
    op: Superoperator,
    kernel: LocalKernel,
}

impl Channel {
    pub fn new(sites: Vec<usize>, op: Superoperator) -> Channel {
        let kernel = op.kernel(&sites);
        Channel { sites, op, kernel }
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn op(&self) -> &Superoperator {
        &self.op
    }

    /// Apply to a raw coefficient vector of a register containing the sites.
    pub(crate) fn apply_to(&self, coeffs: &mut [f64]) {
        self.kernel.apply(coeffs);
    }
}

#[derive(Debug, Clone)]
pub enum Step {
    Apply(Channel),
    Measure(usize),
    Reset(usize),
}

impl Step {
    fn apply(sites: Vec<usize>, op: Superoperator) -> Step {
        Step::Apply(Channel::new(sites, op))
    }
}

/// Noise-aware transfer matrices for schedule operations, memoized.
#[derive(Debug)]
pub struct GateLibrary {
    params: NoiseParams,
    ideal_gates: bool,
    cache: HashMap<String, Superoperator>,
}

impl GateLibrary {
    pub fn new(params: NoiseParams, ideal_gates: bool) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            ideal_gates,
            cache: HashMap::new(),
        })
    }

    pub fn params(&self) -> &NoiseParams {
        &self.params
    }

    fn build(&self, kind: OpKind, duration_ns: f64) -> Result<Superoperator> {
        let p = &self.params;
        match kind {
            OpKind::Idle => idle_ptm(duration_ns, p),
            OpKind::Gate(g) if g.is_virtual() || self.ideal_gates => ptm_from_unitary(&g.unitary()),
            OpKind::Gate(Gate::H) => hadamard_ptm(p),
            OpKind::Gate(Gate::X) => physical_rotation_ptm(PI, true, p),
            OpKind::Gate(Gate::Ry(a)) => physical_rotation_ptm(a, false, p),
            OpKind::Gate(Gate::ISwap) => two_qubit_ptm(TwoQubitKind::ISwap, p),
            OpKind::Gate(Gate::Cz) => two_qubit_ptm(TwoQubitKind::Cz, p),
            OpKind::Gate(g) => Err(Error::Unsupported(format!("no noise model for {}", g.name()))),
            OpKind::Measure | OpKind::Reset => Err(Error::Unsupported("not a channel".into())),
        }
    }

    pub fn get(&mut self, kind: OpKind, duration_ns: f64) -> Result<Superoperator> {
        let key = match kind {
            OpKind::Idle => format!("IDLE {}", duration_ns.to_bits()),
            OpKind::Gate(Gate::Ry(a)) => format!("RY {}", a.to_bits()),
            _ => format!("{kind:?}"),
        };
        if let Some(op) = self.cache.get(&key) {
            return Ok(op.clone());
        }
        let op = self.build(kind, duration_ns)?;
        self.cache.insert(key, op.clone());
        Ok(op)
    }
}

/// Flat, executable form of a schedule.
#[derive(Debug, Clone)]
pub struct Program {
    n_qubits: usize,
    steps: Vec<Step>,
}

impl Program {
    pub fn compile(schedule: &Schedule, library: &mut GateLibrary, options: CompileOptions) -> Result<Program> {
        let n = schedule.n_qubits();
        let mut steps = Vec::new();
        let mut pending: Vec<Option<Superoperator>> = vec![None; n];

        fn flush(q: usize, pending: &mut [Option<Superoperator>], steps: &mut Vec<Step>) {
            if let Some(op) = pending[q].take() {
                steps.push(Step::apply(vec![q], op));
            }
        }

        for m in schedule.ordered() {
            match m.kind {
                OpKind::Measure | OpKind::Reset => {
                    let q = m.sites[0];
                    flush(q, &mut pending, &mut steps);
                    steps.push(if m.kind == OpKind::Measure { Step::Measure(q) } else { Step::Reset(q) });
                }
                kind => {
                    if kind == OpKind::Idle && m.duration_ns == 0.0 {
                        continue;
                    }
                    let op = library.get(kind, m.duration_ns)?;
                    if !options.fuse {
                        steps.push(Step::apply(m.sites.clone(), op));
                    } else if m.sites.len() == 1 {
                        let q = m.sites[0];
                        pending[q] = Some(match pending[q].take() {
                            Some(prev) => op.product(&prev)?,
                            None => op,
                        });
                    } else {
                        let (a, b) = (m.sites[0], m.sites[1]);
                        let id = Superoperator::identity(1);
                        let pa = pending[a].take().unwrap_or_else(|| id.clone());
                        let pb = pending[b].take().unwrap_or(id);
                        let fused = op.product(&Superoperator::tensor(&pa, &pb)?)?;
                        steps.push(Step::apply(m.sites.clone(), fused));
                    }
                }
            }
        }
        for q in 0..n {
            flush(q, &mut pending, &mut steps);
        }
        Ok(Program { n_qubits: n, steps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    fn check(&self, state: &PauliState) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::BadShape(format!(
                "{}-qubit state for a {}-qubit program",
                state.n_qubits(),
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Apply only the channel steps. Measurements are an error.
    pub fn run_channels(&self, state: &mut PauliState) -> Result<()> {
        self.check(state)?;
        for step in &self.steps {
            match step {
                Step::Apply(c) => c.apply_to(state.coeffs_mut()),
                Step::Reset(q) => state.reset(*q)?,
                Step::Measure(q) => return Err(Error::Unsupported(format!("measurement of qubit {q}"))),
            }
        }
        Ok(())
    }

    /// Execute with sampled measurements. Results are returned in program order
    /// as `(site, +1 | -1)`.
    pub fn run<R: Rng + ?Sized>(
        &self,
        state: &mut PauliState,
        table: &MeasurementErrorTable,
        rng: &mut R,
    ) -> Result<Vec<(usize, i8)>> {
        self.check(state)?;
        let mut results = Vec::new();
        for step in &self.steps {
            match step {
                Step::Apply(c) => c.apply_to(state.coeffs_mut()),
                Step::Reset(q) => state.reset(*q)?,
                Step::Measure(q) => results.push((*q, state.sample_measurement(*q, table, rng)?)),
            }
        }
        Ok(results)
    }

    /// Execute with every measurement projected onto the given outcome states,
    /// in program order. Returns the joint probability; the state is
    /// renormalized.
    pub fn run_projected(&self, state: &mut PauliState, outcomes: &[u8]) -> Result<f64> {
        self.check(state)?;
        let mut next = outcomes.iter();
        let mut prob = 1.0;
        for step in &self.steps {
            match step {
                Step::Apply(c) => c.apply_to(state.coeffs_mut()),
                Step::Reset(q) => state.reset(*q)?,
                Step::Measure(q) => {
                    let o = next
                        .next()
                        .ok_or_else(|| Error::InvalidParameter("too few outcomes".into()))?;
                    prob *= state.project(*q, *o)?;
                }
            }
        }
        Ok(prob)
    }

    /// The sub-program acting on `keep`, relabelled so `keep[i]` becomes
    /// qubit `i`. Steps touching only other qubits are dropped, which is exact
    /// when those qubits stay in a product state that the dropped steps leave
    /// unchanged (idle ancillas in `|0>`).
    pub fn restrict(&self, keep: &[usize]) -> Result<Program> {
        let map = |q: usize| keep.iter().position(|&k| k == q);
        let mut steps = Vec::new();
        for step in &self.steps {
            let sites: Vec<usize> = match step {
                Step::Apply(c) => c.sites().to_vec(),
                Step::Measure(q) | Step::Reset(q) => vec![*q],
            };
            let mapped: Vec<Option<usize>> = sites.iter().map(|&q| map(q)).collect();
            if mapped.iter().all(Option::is_none) {
                continue;
            }
            let mapped: Vec<usize> = mapped
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Unsupported(format!("step on {sites:?} crosses the kept register")))?;
            steps.push(match step {
                Step::Apply(c) => Step::apply(mapped, c.op().clone()),
                Step::Measure(_) => Step::Measure(mapped[0]),
                Step::Reset(_) => Step::Reset(mapped[0]),
            });
        }
        Ok(Program {
            n_qubits: keep.len(),
            steps,
        })
    }

    /// Number of transfer-matrix applications.
    pub fn apply_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Apply(_))).count()
    }
}
