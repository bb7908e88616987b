//! Surface-17 cycle, used for noiseless verification only.
//!
//! Data qubits `0..9` sit on a 3x3 grid (`q = 3 row + col`) and ancilla `A_j`
//! is site `9 + j`. X-type parities are collected first; the Z-type CZ
//! series overlap the X-ancilla measurement.

use std::f64::consts::FRAC_PI_2;

use super::{Gate, OpKind, Schedule};

pub const SURFACE17_QUBITS: usize = 17;
pub const SURFACE17_CYCLE_NS: f64 = 800.0;

const TAU1: f64 = 20.0;
const TAU2: f64 = 40.0;
const T_MEAS: f64 = 300.0;
const T_RESET: f64 = 300.0;

/// Stabilizer type and data support of ancilla `A_j`.
pub(crate) const STABILIZERS: [(char, &[usize]); 8] = [
    ('X', &[1, 2]),
    ('Z', &[0, 3]),
    ('X', &[0, 1, 3, 4]),
    ('Z', &[1, 2, 4, 5]),
    ('Z', &[3, 4, 6, 7]),
    ('X', &[4, 5, 7, 8]),
    ('Z', &[5, 8]),
    ('X', &[6, 7]),
];

/// `(ancilla index, data qubit)` pairs per CZ series, X-type then Z-type.
const X_SERIES: [[(usize, usize); 3]; 4] = [
    [(2, 0), (5, 4), (7, 6)],
    [(2, 1), (5, 5), (7, 7)],
    [(2, 3), (5, 7), (0, 1)],
    [(2, 4), (5, 8), (0, 2)],
];
const Z_SERIES: [[(usize, usize); 3]; 4] = [
    [(3, 1), (4, 3), (6, 5)],
    [(3, 4), (4, 6), (6, 8)],
    [(3, 2), (4, 4), (1, 0)],
    [(3, 5), (4, 7), (1, 3)],
];

fn ancilla_site(j: usize) -> usize {
    9 + j
}

fn ancillas_of(kind: char) -> Vec<usize> {
    (0..8).filter(|&j| STABILIZERS[j].0 == kind).map(ancilla_site).collect()
}

/// One pipelined 800 ns cycle. The Z-ancilla reset wraps into the next cycle.
pub fn surface17_cycle() -> Schedule {
    let mut s = Schedule::new(SURFACE17_QUBITS, SURFACE17_CYCLE_NS).periodic();
    let data: Vec<usize> = (0..9).collect();
    let xa = ancillas_of('X');
    let za = ancillas_of('Z');
    let data_and_x: Vec<usize> = data.iter().chain(&xa).copied().collect();
    let ok = "static schedule";

    s.push_each(0.0, TAU1, OpKind::Gate(Gate::Ry(-FRAC_PI_2)), &data_and_x).expect(ok);
    for (i, series) in X_SERIES.iter().enumerate() {
        for &(a, d) in series {
            s.push(TAU1 + TAU2 * i as f64, TAU2, OpKind::Gate(Gate::Cz), &[ancilla_site(a), d]).expect(ok);
        }
    }
    let x_done = TAU1 + 4.0 * TAU2;
    s.push_each(x_done, TAU1, OpKind::Gate(Gate::Ry(FRAC_PI_2)), &data_and_x).expect(ok);
    s.push_each(x_done, TAU1, OpKind::Gate(Gate::Ry(-FRAC_PI_2)), &za).expect(ok);
    let x_meas = x_done + TAU1;
    s.push_each(x_meas, T_MEAS, OpKind::Measure, &xa).expect(ok);
    s.push_each(x_meas + T_MEAS, T_RESET, OpKind::Reset, &xa).expect(ok);

    for (i, series) in Z_SERIES.iter().enumerate() {
        for &(a, d) in series {
            s.push(x_meas + TAU2 * i as f64, TAU2, OpKind::Gate(Gate::Cz), &[ancilla_site(a), d]).expect(ok);
        }
    }
    let z_done = x_meas + 4.0 * TAU2;
    s.push_each(z_done, TAU1, OpKind::Gate(Gate::Ry(FRAC_PI_2)), &za).expect(ok);
    s.push_each(z_done + TAU1, T_MEAS, OpKind::Measure, &za).expect(ok);
    s.push_each(z_done + TAU1 + T_MEAS, T_RESET, OpKind::Reset, &za).expect(ok);
    s.fill_idles();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_is_well_formed() {
        let s = surface17_cycle();
        s.validate(true).unwrap();
        let czs = s.moments().iter().filter(|m| m.kind == OpKind::Gate(Gate::Cz)).count();
        assert_eq!(czs, 24);
    }

    #[test]
    fn series_cover_each_support_once() {
        for (j, (_, support)) in STABILIZERS.iter().enumerate() {
            let mut touched: Vec<usize> = X_SERIES
                .iter()
                .chain(&Z_SERIES)
                .flatten()
                .filter(|(a, _)| *a == j)
                .map(|(_, d)| *d)
                .collect();
            touched.sort();
            assert_eq!(touched, *support, "ancilla {j}");
        }
    }
}
