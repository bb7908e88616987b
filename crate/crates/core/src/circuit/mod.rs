//! Timed circuit schedules and the code descriptors they implement.

mod codes;
mod five_qubit;
mod surface17;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{rotation_unitary, RotationAxis};
use crate::pauli::StateVector;

pub use codes::CodeDescriptor;
pub use five_qubit::{
    encoding_circuit, encoding_schedule, five_qubit_ancilla_generator, five_qubit_cycle, five_qubit_data_site,
    five_qubit_experiment, prep_stage, readout_stage, CycleOptions, PaddingPlacement, PrepGate, FIVE_QUBIT_ANCILLAS, FIVE_QUBIT_DATA,
    RING_QUBITS,
};
pub use surface17::{surface17_cycle, SURFACE17_CYCLE_NS, SURFACE17_QUBITS};

/// Tolerance for comparing schedule times, nanoseconds.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H,
    X,
    /// Physical `y` rotation by the given angle.
    Ry(f64),
    S,
    Sdg,
    Z,
    ISwap,
    Cz,
    /// Control on the first site. Only for noiseless state-vector runs.
    Cnot,
}

impl Gate {
    pub fn arity(self) -> usize {
        match self {
            Gate::ISwap | Gate::Cz | Gate::Cnot => 2,
            _ => 1,
        }
    }

    /// Virtual gates are implemented in software: exact and instantaneous.
    pub fn is_virtual(self) -> bool {
        matches!(self, Gate::S | Gate::Sdg | Gate::Z)
    }

    pub fn name(self) -> String {
        match self {
            Gate::H => "H".into(),
            Gate::X => "X".into(),
            Gate::Ry(a) => format!("RY({a})"),
            Gate::S => "S".into(),
            Gate::Sdg => "SDG".into(),
            Gate::Z => "Z".into(),
            Gate::ISwap => "ISWAP".into(),
            Gate::Cz => "CZ".into(),
            Gate::Cnot => "CNOT".into(),
        }
    }

    fn parse(name: &str) -> Result<Gate> {
        let upper = name.to_ascii_uppercase();
        Ok(match upper.as_str() {
            "H" => Gate::H,
            "X" => Gate::X,
            "S" => Gate::S,
            "SDG" => Gate::Sdg,
            "Z" => Gate::Z,
            "ISWAP" => Gate::ISwap,
            "CZ" => Gate::Cz,
            "CNOT" => Gate::Cnot,
            _ => {
                let angle = upper
                    .strip_prefix("RY(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| Error::Format(format!("unknown gate {name:?}")))?;
                Gate::Ry(angle)
            }
        })
    }

    pub fn unitary(self) -> DMatrix<Complex64> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let h = FRAC_1_SQRT_2;
        match self {
            Gate::H => DMatrix::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]),
            Gate::X => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
            Gate::Ry(a) => rotation_unitary(RotationAxis::Y, a),
            Gate::S => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.)]),
            Gate::Sdg => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., -1.)]),
            Gate::Z => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
            Gate::ISwap => crate::noise::xy_unitary(PI, 0.0, 0.0),
            Gate::Cz => crate::noise::xy_unitary(0.0, 0.0, PI),
            Gate::Cnot => {
                let mut m = DMatrix::zeros(4, 4);
                m[(0, 0)] = c(1., 0.);
                m[(1, 1)] = c(1., 0.);
                m[(2, 3)] = c(1., 0.);
                m[(3, 2)] = c(1., 0.);
                m
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OpKind {
    Gate(Gate),
    /// Z-basis measurement.
    Measure,
    /// Reset to `|0>` at the end of the interval.
    Reset,
    Idle,
}

impl OpKind {
    fn label(&self) -> String {
        match self {
            OpKind::Gate(g) => g.name(),
            OpKind::Measure => "MEASURE".into(),
            OpKind::Reset => "RESET".into(),
            OpKind::Idle => "IDLE".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub start_ns: f64,
    pub duration_ns: f64,
    pub kind: OpKind,
    pub sites: Vec<usize>,
}

impl Moment {
    pub fn end_ns(&self) -> f64 {
        self.start_ns + self.duration_ns
    }
}

/// A timed sequence of operations. Moments are executed in order of start
/// time; operations starting together run in insertion order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    n_qubits: usize,
    total_ns: f64,
    /// Intervals past `total_ns` wrap around (pipelined cycles).
    periodic: bool,
    moments: Vec<Moment>,
}

impl Schedule {
    pub fn new(n_qubits: usize, total_ns: f64) -> Self {
        Self {
            n_qubits,
            total_ns,
            periodic: false,
            moments: Vec::new(),
        }
    }

    pub fn periodic(mut self) -> Self {
        self.periodic = true;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn total_ns(&self) -> f64 {
        self.total_ns
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn moments(&self) -> &[Moment] {
        &self.moments
    }

    pub fn push(&mut self, start_ns: f64, duration_ns: f64, kind: OpKind, sites: &[usize]) -> Result<()> {
        crate::pauli::check_sites(sites, self.n_qubits)?;
        if let OpKind::Gate(g) = kind {
            if g.arity() != sites.len() {
                return Err(Error::ArityMismatch {
                    expected: g.arity(),
                    got: sites.len(),
                });
            }
        } else if sites.len() != 1 {
            return Err(Error::InvalidSchedule(format!("{} acts on one site", kind.label())));
        }
        if !(start_ns >= 0.0) || !(duration_ns >= 0.0) {
            return Err(Error::InvalidSchedule(format!("bad interval at {start_ns} ns")));
        }
        self.moments.push(Moment {
            start_ns,
            duration_ns,
            kind,
            sites: sites.to_vec(),
        });
        Ok(())
    }

    /// Push the same single-site operation on every listed site.
    pub fn push_each(&mut self, start_ns: f64, duration_ns: f64, kind: OpKind, sites: &[usize]) -> Result<()> {
        sites.iter().try_for_each(|&s| self.push(start_ns, duration_ns, kind, &[s]))
    }

    /// Append `other` shifted by this schedule's total time.
    pub fn append(&mut self, other: &Schedule) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::InvalidSchedule("qubit counts differ".into()));
        }
        let offset = self.total_ns;
        self.moments.extend(other.moments.iter().map(|m| Moment {
            start_ns: m.start_ns + offset,
            ..m.clone()
        }));
        self.total_ns += other.total_ns;
        Ok(())
    }

    /// Busy intervals of one qubit, unwrapped onto `[0, total)` for periodic schedules.
    fn busy(&self, q: usize) -> Vec<(f64, f64)> {
        let mut spans = Vec::new();
        for m in self.moments.iter().filter(|m| m.sites.contains(&q) && m.duration_ns > 0.0) {
            let (s, e) = (m.start_ns, m.end_ns());
            if self.periodic && e > self.total_ns + TIME_EPS {
                spans.push((s, self.total_ns));
                spans.push((0.0, e - self.total_ns));
            } else {
                spans.push((s, e));
            }
        }
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        spans
    }

    /// Fill every unoccupied interval of every qubit with an idle.
    pub fn fill_idles(&mut self) {
        for q in 0..self.n_qubits {
            let mut cursor = 0.0;
            let mut gaps = Vec::new();
            for (s, e) in self.busy(q) {
                if s > cursor + TIME_EPS {
                    gaps.push((cursor, s));
                }
                cursor = f64::max(cursor, e);
            }
            if self.total_ns > cursor + TIME_EPS {
                gaps.push((cursor, self.total_ns));
            }
            for (s, e) in gaps {
                self.moments.push(Moment {
                    start_ns: s,
                    duration_ns: e - s,
                    kind: OpKind::Idle,
                    sites: vec![q],
                });
            }
        }
    }

    /// Check that no qubit is used by overlapping operations and, if
    /// `require_gap_free`, that every qubit timeline covers `[0, total]`.
    pub fn validate(&self, require_gap_free: bool) -> Result<()> {
        for m in &self.moments {
            if !self.periodic && m.end_ns() > self.total_ns + TIME_EPS {
                return Err(Error::InvalidSchedule(format!(
                    "{} on {:?} ends at {} ns, after the schedule end {} ns",
                    m.kind.label(),
                    m.sites,
                    m.end_ns(),
                    self.total_ns
                )));
            }
        }
        for q in 0..self.n_qubits {
            let mut cursor = 0.0;
            for (s, e) in self.busy(q) {
                if s < cursor - TIME_EPS {
                    return Err(Error::InvalidSchedule(format!("qubit {q} is double-booked at {s} ns")));
                }
                if require_gap_free && s > cursor + TIME_EPS {
                    return Err(Error::InvalidSchedule(format!("qubit {q} has no operation in [{cursor}, {s}) ns")));
                }
                cursor = e;
            }
            if require_gap_free && (cursor - self.total_ns).abs() > TIME_EPS {
                return Err(Error::InvalidSchedule(format!("qubit {q} timeline ends at {cursor} ns")));
            }
        }
        Ok(())
    }

    /// Moments in execution order.
    pub fn ordered(&self) -> Vec<&Moment> {
        let mut v: Vec<&Moment> = self.moments.iter().collect();
        v.sort_by(|a, b| a.start_ns.total_cmp(&b.start_ns));
        v
    }

    /// The gates only, in execution order.
    pub fn unitary_part(&self) -> Schedule {
        Schedule {
            moments: self
                .ordered()
                .into_iter()
                .filter(|m| matches!(m.kind, OpKind::Gate(_)))
                .cloned()
                .collect(),
            ..self.clone_empty()
        }
    }

    fn clone_empty(&self) -> Schedule {
        Schedule {
            n_qubits: self.n_qubits,
            total_ns: self.total_ns,
            periodic: self.periodic,
            moments: Vec::new(),
        }
    }

    /// Parse the text form written by `Display`.
    pub fn parse(text: &str) -> Result<Schedule> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Format("empty schedule".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad = || Error::Format(format!("bad schedule header {header:?}"));
        if fields.len() < 3 || fields[0] != "schedule" {
            return Err(bad());
        }
        let value = |key: &str| -> Result<&str> {
            fields
                .iter()
                .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .ok_or_else(bad)
        };
        let n: usize = value("qubits")?.parse().map_err(|_| bad())?;
        let total: f64 = value("total_ns")?.parse().map_err(|_| bad())?;
        let mut sched = Schedule::new(n, total);
        if fields.contains(&"periodic") {
            sched = sched.periodic();
        }
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Format(format!("bad schedule line {line:?}"));
            if f.len() != 4 {
                return Err(bad());
            }
            let start: f64 = f[0].parse().map_err(|_| bad())?;
            let dur: f64 = f[1].parse().map_err(|_| bad())?;
            let kind = match f[2] {
                "MEASURE" => OpKind::Measure,
                "RESET" => OpKind::Reset,
                "IDLE" => OpKind::Idle,
                g => OpKind::Gate(Gate::parse(g)?),
            };
            let sites = f[3]
                .split(',')
                .map(|s| s.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            sched.push(start, dur, kind, &sites)?;
        }
        Ok(sched)
    }
}

impl fmt::Display for Schedule {
    /// One moment per line: `start duration op sites`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "schedule qubits={} total_ns={}", self.n_qubits, self.total_ns)?;
        if self.periodic {
            write!(f, " periodic")?;
        }
        writeln!(f)?;
        for m in self.ordered() {
            let sites: Vec<String> = m.sites.iter().map(|s| s.to_string()).collect();
            writeln!(f, "{} {} {} {}", m.start_ns, m.duration_ns, m.kind.label(), sites.join(","))?;
        }
        Ok(())
    }
}

/// Run the gates of `circuit` on a pure state.
pub fn statevector_run(circuit: &Schedule, input: &StateVector) -> Result<StateVector> {
    if input.n_qubits() != circuit.n_qubits() {
        return Err(Error::BadShape(format!(
            "{}-qubit state for a {}-qubit circuit",
            input.n_qubits(),
            circuit.n_qubits()
        )));
    }
    let mut state = input.clone();
    for m in circuit.ordered() {
        match m.kind {
            OpKind::Gate(g) => state.apply_matrix(&g.unitary(), &m.sites)?,
            OpKind::Idle => {}
            OpKind::Measure | OpKind::Reset => {
                return Err(Error::Unsupported(format!(
                    "{} in a state-vector run",
                    m.kind.label()
                )))
            }
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::ptm_from_unitary;

    #[test]
    fn overlap_is_rejected() {
        let mut s = Schedule::new(2, 100.0);
        s.push(0.0, 40.0, OpKind::Gate(Gate::ISwap), &[0, 1]).unwrap();
        s.push(20.0, 20.0, OpKind::Gate(Gate::H), &[1]).unwrap();
        assert!(s.validate(false).is_err());
    }

    #[test]
    fn idles_fill_gaps() {
        let mut s = Schedule::new(2, 100.0);
        s.push(10.0, 20.0, OpKind::Gate(Gate::H), &[0]).unwrap();
        assert!(s.validate(true).is_err());
        s.fill_idles();
        s.validate(true).unwrap();
        assert_eq!(s.moments().len(), 4);
    }

    #[test]
    fn text_round_trip() {
        let mut s = Schedule::new(3, 60.0);
        s.push(0.0, 20.0, OpKind::Gate(Gate::Ry(-PI / 2.0)), &[2]).unwrap();
        s.push(20.0, 40.0, OpKind::Gate(Gate::Cz), &[0, 2]).unwrap();
        s.push(20.0, 0.0, OpKind::Gate(Gate::Sdg), &[1]).unwrap();
        s.push(0.0, 60.0, OpKind::Measure, &[1]).unwrap();
        let text = s.to_string();
        let back = Schedule::parse(&text).unwrap();
        assert_eq!(back.to_string(), text);
    }

    #[test]
    fn statevector_rejects_measurement() {
        let mut s = Schedule::new(1, 300.0);
        s.push(0.0, 300.0, OpKind::Measure, &[0]).unwrap();
        assert!(matches!(
            statevector_run(&s, &StateVector::ground(1)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn hadamard_is_z_times_ry() {
        let ry = Gate::Ry(-PI / 2.0).unitary();
        let z = Gate::Z.unitary();
        let diff = (&z * &ry - Gate::H.unitary()).norm();
        assert!(diff < 1e-15);
        assert!(ptm_from_unitary(&Gate::Cnot.unitary()).is_ok());
    }
}
