//! Every noise channel's transfer matrix against direct operator-sum
//! evolution of dense density matrices.

mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ringqec::noise::{
    amplitude_damping_ptm, depolarization_ptm, hadamard_ptm, idle_ptm, noisy_rotation_ptm, phase_damping_ptm,
    physical_rotation_ptm, rotation_ptm, two_qubit_ptm, NoiseParams, RotationAxis, TwoQubitKind,
};
use ringqec::pauli::{ptm_from_kraus, PauliState, Superoperator};

const TOL: f64 = 1e-9;

/// Apply `op` on `sites` of a random `n`-qubit state both ways and return the
/// largest coefficient difference.
fn discrepancy(seed: u64, n: usize, op: &Superoperator, sites: &[usize], kraus: &[CMat]) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = random_density(&mut rng, n);
    let mut state = PauliState::from_coeffs(n, coefficients(&rho)).unwrap();
    state.apply_local(op, sites).unwrap();
    let full: Vec<CMat> = kraus.iter().map(|k| embed(k, sites, n)).collect();
    max_diff(state.coeffs(), &coefficients(&evolve(&rho, &full)))
}

fn one_site(n: usize) -> impl Strategy<Value = Vec<usize>> {
    (0..n).prop_map(|q| vec![q])
}

fn two_sites() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![Just(vec![0, 1]), Just(vec![1, 0])]
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn amplitude_damping(seed: u64, gamma in 0.0..=1.0f64, sites in one_site(2)) {
        let d = discrepancy(seed, 2, &amplitude_damping_ptm(gamma), &sites, &common::amplitude_damping(gamma));
        prop_assert!(d < TOL, "{d:e}");
    }

    #[test]
    fn phase_damping(seed: u64, gamma in 0.0..=1.0f64, sites in one_site(2)) {
        let d = discrepancy(seed, 2, &phase_damping_ptm(gamma), &sites, &common::phase_damping(gamma));
        prop_assert!(d < TOL, "{d:e}");
    }

    #[test]
    fn idling(seed: u64, t_ns in 0.0..5000.0f64, t1 in 5.0..200.0f64, ratio in 0.05..2.0f64, sites in one_site(2)) {
        let params = NoiseParams { t1_us: t1, t2_us: t1 * ratio, ..NoiseParams::default() };
        let op = idle_ptm(t_ns, &params).unwrap();
        let d = discrepancy(seed, 2, &op, &sites, &idle(t_ns * 1e-3, t1, t1 * ratio));
        prop_assert!(d < TOL, "{d:e}");
    }

    #[test]
    fn depolarizing(seed: u64, p_axis in 0.0..0.2f64, extra in 0.0..0.3f64, sites in one_site(2)) {
        let p_plane = p_axis / 2.0 + extra;
        let op = depolarization_ptm(p_plane, p_axis).unwrap();
        let d = discrepancy(seed, 2, &op, &sites, &depolarization(p_plane, p_axis));
        prop_assert!(d < TOL, "{d:e}");
    }

    #[test]
    fn rotations(seed: u64, angle in -2.0 * PI..2.0 * PI, y: bool, sites in one_site(2)) {
        let (axis, u) = if y { (RotationAxis::Y, ry(angle)) } else { (RotationAxis::Z, rz(angle)) };
        let d = discrepancy(seed, 2, &rotation_ptm(axis, angle), &sites, &[u]);
        prop_assert!(d < TOL, "{d:e}");
    }

    #[test]
    fn rotation_with_angle_noise(seed: u64, angle in -PI..PI, sd in 0.0..0.5f64, sites in one_site(2)) {
        let op = noisy_rotation_ptm(RotationAxis::Y, angle, sd).unwrap();
        let d = discrepancy(seed, 2, &op, &sites, &noisy_ry(angle, sd));
        prop_assert!(d < TOL, "{d:e}");
    }

    #[test]
    fn physical_gates(
        seed: u64,
        angle in -PI..PI,
        z: bool,
        t1 in 5.0..100.0f64,
        phi in 0.0..0.1f64,
        p_axis in 0.0..1e-2f64,
        sites in one_site(2),
    ) {
        let params = NoiseParams { t1_us: t1, t2_us: t1, phi_rms: phi, p_axis, p_plane: p_axis, ..NoiseParams::default() };
        let op = physical_rotation_ptm(angle, z, &params).unwrap();
        let d = discrepancy(seed, 2, &op, &sites, &physical_gate(angle, z, &params));
        prop_assert!(d < TOL, "{d:e}");
    }

    #[test]
    fn hadamard_at_default_noise(seed: u64, sites in one_site(2)) {
        let params = NoiseParams::default();
        let d = discrepancy(seed, 2, &hadamard_ptm(&params).unwrap(), &sites, &physical_gate(-PI / 2.0, true, &params));
        prop_assert!(d < TOL, "{d:e}");
    }

    #[test]
    fn arbitrary_kraus_sets(seed: u64, count in 1usize..5, sites in prop_oneof![
        Just(vec![0, 1]), Just(vec![1, 0]), Just(vec![0, 2]), Just(vec![2, 1]),
    ]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let kraus = random_kraus(&mut rng, 4, count);
        let op = ptm_from_kraus(&kraus).unwrap();
        let d = discrepancy(seed, 3, &op, &sites, &kraus);
        prop_assert!(d < TOL, "{d:e}");
    }
}

fn reference_gates() -> &'static [(Superoperator, CMat); 2] {
    static GATES: OnceLock<[(Superoperator, CMat); 2]> = OnceLock::new();
    GATES.get_or_init(|| {
        let p = NoiseParams::default();
        [
            (two_qubit_ptm(TwoQubitKind::ISwap, &p).unwrap(), two_qubit_gate(true, &p)),
            (two_qubit_ptm(TwoQubitKind::Cz, &p).unwrap(), two_qubit_gate(false, &p)),
        ]
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn two_qubit_gates_at_default_noise(seed: u64, iswap: bool, sites in two_sites()) {
        let (op, l) = &reference_gates()[usize::from(!iswap)];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&mut rng, 2);
        let mut state = PauliState::from_coeffs(2, coefficients(&rho)).unwrap();
        state.apply_local(op, &sites).unwrap();
        // The reference acts with site `sites[0]` as the high bit.
        let swap = embed(&CMat::identity(4, 4), &[1, 0], 2);
        let flip = sites == [0, 1];
        let local = if flip { &swap * &rho * &swap } else { rho.clone() };
        let out = apply_liouville(l, &local);
        let out = if flip { &swap * out * &swap } else { out };
        let d = max_diff(state.coeffs(), &coefficients(&out));
        prop_assert!(d < TOL, "{d:e}");
    }
}

#[test]
fn embedding_convention_puts_the_first_site_high() {
    // CNOT with control on the first listed site.
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let cnot = CMat::from_row_slice(4, 4, &[o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z]);
    let op = ptm_from_kraus(&[cnot]).unwrap();
    let mut state = PauliState::new(2, "10").unwrap();
    state.apply_local(&op, &[0, 1]).unwrap();
    assert_eq!(state.coeffs(), PauliState::new(2, "11").unwrap().coeffs());
    let mut state = PauliState::new(2, "10").unwrap();
    state.apply_local(&op, &[1, 0]).unwrap();
    assert_eq!(state.coeffs(), PauliState::new(2, "10").unwrap().coeffs());
}
