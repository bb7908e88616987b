use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringqec::circuit::{five_qubit_ancilla_generator, PrepGate};
use ringqec::io::{write_summary, SummaryMeta};
use ringqec::noise::NoiseModel;
use ringqec::parallel::Parallelism;
use ringqec::runner::{logical_bloch, upper_bound_fidelity, Engine, FiveQubitSimulator, InitialState, SimulatorOptions};
use ringqec::pauli::PauliState;

fn noiseless() -> &'static FiveQubitSimulator {
    static SIM: OnceLock<FiveQubitSimulator> = OnceLock::new();
    SIM.get_or_init(|| FiveQubitSimulator::new(NoiseModel::noiseless(), SimulatorOptions::default()).unwrap())
}

fn all_states() -> Vec<InitialState> {
    PrepGate::ALL
        .iter()
        .map(|&g| InitialState::Cardinal(g))
        .chain([InitialState::Exact(false), InitialState::Exact(true)])
        .collect()
}

/// Syndrome rows reordered by generator.
fn by_generator(rows: &[[i8; 5]]) -> Vec<[i8; 5]> {
    rows.iter()
        .enumerate()
        .map(|(c, row)| {
            let mut g = [0; 5];
            for (t, &b) in row.iter().enumerate() {
                g[five_qubit_ancilla_generator(c, t)] = b;
            }
            g
        })
        .collect()
}

#[test]
fn every_state_survives_noiseless_cycles() {
    let sim = noiseless();
    for init in all_states() {
        for k in 1..=5 {
            let records = sim.run_records(&init, 3, k, 17, true, Parallelism::Sequential).unwrap();
            for r in &records {
                assert!((r.ub_fidelity - 1.0).abs() < 1e-9, "{} k={k}: {}", init.label(), r.ub_fidelity);
                let readout = r.readout.as_ref().unwrap();
                assert_eq!(readout.parity, Some(1), "{} k={k}", init.label());
                let syndromes = by_generator(&r.ancilla_bits);
                for g in &syndromes {
                    assert_eq!(g.iter().map(|&b| i32::from(b)).product::<i32>(), 1, "redundant generator");
                    assert_eq!(g, &syndromes[0], "{} k={k}: syndrome changed", init.label());
                }
                if matches!(init, InitialState::Exact(_)) {
                    assert_eq!(syndromes[0], [1; 5]);
                }
            }
        }
    }
}

#[test]
fn exact_zero_stays_an_eigenstate() {
    let sim = noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = sim.trajectory(&InitialState::Exact(false), 6, false, &mut rng).unwrap();
    assert!(t.ancilla_bits.iter().all(|row| row == &[1; 5]));
    assert!(t.bloch.iter().all(|b| (b[2] - 1.0).abs() < 1e-9 && b[0].abs() < 1e-9));
}

#[test]
fn amplitudes_set_the_logical_bloch_vector() {
    let sim = noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let mut draw = || Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let (a, b) = (draw(), draw());
        let norm = a.norm_sqr() + b.norm_sqr();
        let init = InitialState::Amplitudes(a, b);
        let state = sim.initial_data_state(&init).unwrap();
        let r = logical_bloch(&state).unwrap();
        let z = (a.norm_sqr() - b.norm_sqr()) / norm;
        let x = 2.0 * (a.conj() * b).re / norm;
        let y = 2.0 * (a.conj() * b).im / norm;
        assert!((r[2] - z).abs() < 1e-12 && (r[0] - x).abs() < 1e-12 && (r[1] - y).abs() < 1e-12);

        let rec = sim.run_trajectory(&init, 3, true, &mut rng).unwrap();
        assert!((rec.ub_fidelity - 1.0).abs() < 1e-9);
        assert!(rec.bloch.iter().zip(&r).all(|(p, q)| (p - q).abs() < 1e-9));
        assert_eq!(rec.readout.unwrap().parity, None);
    }
    let plus = InitialState::Amplitudes(Complex64::new(0.5f64.sqrt(), 0.0), Complex64::new(0.5f64.sqrt(), 0.0));
    let r = logical_bloch(&sim.initial_data_state(&plus).unwrap()).unwrap();
    assert!((r[0] - 1.0).abs() < 1e-12 && r[1].abs() < 1e-12 && r[2].abs() < 1e-12);
}

#[test]
fn maximally_mixed_has_half_fidelity() {
    let mixed = PauliState::maximally_mixed(5);
    assert_eq!(logical_bloch(&mixed).unwrap(), [0.0; 3]);
    assert!((upper_bound_fidelity(&mixed).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn noiseless_ensemble_is_flat() {
    let s = noiseless()
        .run_ensemble(&InitialState::Cardinal(PrepGate::SH), 7, 4, 1, Parallelism::Auto)
        .unwrap();
    assert_eq!(s.rows.len(), 4);
    for (i, row) in s.rows.iter().enumerate() {
        assert_eq!(row.k, i + 1);
        assert!((row.mean_fidelity - 1.0).abs() < 1e-12 && row.stderr == 0.0);
    }
}

/// Small noisy runs on the ten-qubit engine, which needs no precompilation.
fn full_engine() -> FiveQubitSimulator {
    let options = SimulatorOptions {
        engine: Engine::Full,
        ..SimulatorOptions::default()
    };
    FiveQubitSimulator::new(NoiseModel::default(), options).unwrap()
}

fn csv_bytes(rows: &[ringqec::runner::SummaryRow]) -> Vec<u8> {
    let mut out = Vec::new();
    write_summary(&mut out, &SummaryMeta::new(), rows).unwrap();
    out
}

#[test]
fn summaries_do_not_depend_on_the_worker_count() {
    let sim = full_engine();
    let init = InitialState::Cardinal(PrepGate::H);
    let reference = sim.run_ensemble(&init, 6, 3, 21, Parallelism::Sequential).unwrap();
    for p in [Parallelism::Threads(2), Parallelism::Threads(5), Parallelism::Auto] {
        let other = sim.run_ensemble(&init, 6, 3, 21, p).unwrap();
        assert_eq!(csv_bytes(&other.rows), csv_bytes(&reference.rows), "{p:?}");
    }
    let records_a = sim.run_records(&init, 4, 2, 21, true, Parallelism::Sequential).unwrap();
    let records_b = sim.run_records(&init, 4, 2, 21, true, Parallelism::Threads(3)).unwrap();
    assert_eq!(records_a, records_b);
}

#[test]
fn single_run_summary_is_the_record() {
    let sim = full_engine();
    let init = InitialState::Cardinal(PrepGate::X);
    let summary = sim.run_ensemble(&init, 1, 3, 5, Parallelism::Sequential).unwrap();
    let t = sim
        .trajectory(&init, 3, false, &mut ringqec::runner::trajectory_rng(5, 0))
        .unwrap();
    for (row, b) in summary.rows.iter().zip(&t.bloch) {
        let f = ringqec::runner::fidelity_from_bloch(*b).unwrap();
        assert_eq!(row.mean_fidelity, f);
        assert_eq!(row.stderr, 0.0);
        assert_eq!(row.n_runs, 1);
    }
    assert!(sim.run_ensemble(&init, 0, 3, 5, Parallelism::Sequential).is_err());
    assert!(sim.run_ensemble(&init, 2, 0, 5, Parallelism::Sequential).is_err());
}
