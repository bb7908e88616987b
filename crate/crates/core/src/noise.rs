//! Gate and noise transfer matrices for the superconducting-qubit error model.
//!
//! Idling is amplitude damping followed by phase damping. Physical
//! single-qubit gates are `y` rotations wrapped in a decoherence sandwich with
//! a depolarizing squeeze and a Gaussian-distributed rotation angle; `S` and
//! `Z` are virtual and exact. Two-qubit gates are members of the XY family
//! `U(theta, eta, zeta)` with Gaussian parameter noise, sandwiched the same way.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{ptm_from_kraus, Pauli, Superoperator};

/// Quadrature nodes per noisy two-qubit gate parameter.
pub const TWO_QUBIT_QUADRATURE_NODES: usize = 16;

mod finite_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str("inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity") => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }
}

/// Decoherence, timing and gate-error constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    /// Energy relaxation time, microseconds. `inf` disables relaxation.
    #[serde(with = "finite_or_inf")]
    pub t1_us: f64,
    /// Total dephasing time, microseconds.
    #[serde(with = "finite_or_inf")]
    pub t2_us: f64,
    /// Physical single-qubit gate duration, nanoseconds.
    pub tau1_ns: f64,
    /// Two-qubit gate duration, nanoseconds.
    pub tau2_ns: f64,
    pub t_meas_ns: f64,
    pub t_reset_ns: f64,
    /// Five-qubit code cycle time, nanoseconds.
    pub t_cycle_ns: f64,
    pub p_axis: f64,
    pub p_plane: f64,
    /// RMS of the rotation-angle noise, radians.
    pub phi_rms: f64,
    /// RMS of the conditional-phase noise of two-qubit gates, radians.
    pub sigma_zeta: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            t1_us: 30.0,
            t2_us: 40.0,
            tau1_ns: 20.0,
            tau2_ns: 40.0,
            t_meas_ns: 300.0,
            t_reset_ns: 300.0,
            t_cycle_ns: 840.0,
            p_axis: 1e-4,
            p_plane: 5e-4,
            phi_rms: 0.01,
            sigma_zeta: 0.005,
        }
    }
}

impl NoiseParams {
    /// Same timing as the defaults, every error source disabled.
    pub fn noiseless() -> Self {
        Self {
            t1_us: f64::INFINITY,
            t2_us: f64::INFINITY,
            p_axis: 0.0,
            p_plane: 0.0,
            phi_rms: 0.0,
            sigma_zeta: 0.0,
            ..Self::default()
        }
    }

    /// Relaxation and dephasing only, with `T2 = T1`.
    pub fn decoherence_only(t1_us: f64) -> Self {
        Self {
            t1_us,
            t2_us: t1_us,
            p_axis: 0.0,
            p_plane: 0.0,
            phi_rms: 0.0,
            sigma_zeta: 0.0,
            ..Self::default()
        }
    }

    /// Pure dephasing rate `1/T_phi = 1/T2 - 1/(2 T1)`, per microsecond.
    pub fn dephasing_rate(&self) -> f64 {
        (1.0 / self.t2_us - 0.5 / self.t1_us).max(0.0)
    }

    pub fn t_phi_us(&self) -> f64 {
        1.0 / self.dephasing_rate()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.t1_us > 0.0) || !(self.t2_us > 0.0) {
            return bad("T1 and T2 must be positive");
        }
        if self.t2_us > 2.0 * self.t1_us * (1.0 + 1e-12) {
            return bad("T2 must not exceed 2 T1");
        }
        for (name, v) in [
            ("tau1_ns", self.tau1_ns),
            ("tau2_ns", self.tau2_ns),
            ("t_meas_ns", self.t_meas_ns),
            ("t_reset_ns", self.t_reset_ns),
            ("t_cycle_ns", self.t_cycle_ns),
            ("phi_rms", self.phi_rms),
            ("sigma_zeta", self.sigma_zeta),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be a finite non-negative number")));
            }
        }
        for (name, p) in [("p_axis", self.p_axis), ("p_plane", self.p_plane)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Back-to-back measurement probabilities `eps[i][m][o]`: projected state `i`,
/// reported result `m` (index 0 is `+1`, index 1 is `-1`) and outcome state `o`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementErrorTable {
    pub eps: [[[f64; 2]; 2]; 2],
}

impl Default for MeasurementErrorTable {
    fn default() -> Self {
        Self {
            eps: [
                [[0.9985, 0.0000], [0.0015, 0.0000]],
                [[0.0050, 0.0015], [0.0149, 0.9786]],
            ],
        }
    }
}

impl MeasurementErrorTable {
    pub fn ideal() -> Self {
        Self {
            eps: [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, rows) in self.eps.iter().enumerate() {
            let total: f64 = rows.iter().flatten().sum();
            if rows.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) || (total - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidParameter(format!(
                    "measurement probabilities for initial state {i} must lie in [0, 1] and sum to 1 (sum {total})"
                )));
            }
        }
        Ok(())
    }

    /// `P(reported result | projected state)`, marginal over the outcome state.
    pub fn result_probability(&self, projected: u8, result: i8) -> f64 {
        let m = usize::from(result < 0);
        self.eps[projected as usize][m].iter().sum()
    }

    /// Draw `(result, outcome_state)` for a qubit projected onto `projected`.
    pub fn sample<R: Rng + ?Sized>(&self, projected: u8, rng: &mut R) -> (i8, u8) {
        let row = &self.eps[projected as usize];
        let u: f64 = rng.random::<f64>() * row.iter().flatten().sum::<f64>();
        let mut acc = 0.0;
        let mut last = (1, projected);
        for (m, probs) in row.iter().enumerate() {
            for (o, &p) in probs.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                let result = if m == 0 { 1 } else { -1 };
                last = (result, o as u8);
                acc += p;
                if u < acc {
                    return last;
                }
            }
        }
        last
    }
}

/// Complete noise configuration for a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub params: NoiseParams,
    pub measurement: MeasurementErrorTable,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            params: NoiseParams::noiseless(),
            measurement: MeasurementErrorTable::ideal(),
        }
    }

    pub fn decoherence_only(t1_us: f64) -> Self {
        Self {
            params: NoiseParams::decoherence_only(t1_us),
            measurement: MeasurementErrorTable::ideal(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.measurement.validate()
    }
}

/// Gauss-Hermite rule for the standard normal density: `E[f(X)] ~ sum w_k f(x_k)`.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    if n <= 1 {
        return vec![(0.0, 1.0)];
    }
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn amplitude_damping_kraus(gamma: f64) -> Vec<DMatrix<Complex64>> {
    vec![
        DMatrix::from_row_slice(2, 2, &[cplx(1., 0.), cplx(0., 0.), cplx(0., 0.), cplx((1. - gamma).sqrt(), 0.)]),
        DMatrix::from_row_slice(2, 2, &[cplx(0., 0.), cplx(gamma.sqrt(), 0.), cplx(0., 0.), cplx(0., 0.)]),
    ]
}

pub fn phase_damping_kraus(gamma: f64) -> Vec<DMatrix<Complex64>> {
    vec![
        DMatrix::from_row_slice(2, 2, &[cplx(1., 0.), cplx(0., 0.), cplx(0., 0.), cplx((1. - gamma).sqrt(), 0.)]),
        DMatrix::from_row_slice(2, 2, &[cplx(0., 0.), cplx(0., 0.), cplx(0., 0.), cplx(gamma.sqrt(), 0.)]),
    ]
}

#[rustfmt::skip]
pub fn amplitude_damping_ptm(gamma: f64) -> Superoperator {
    let s = (1.0 - gamma).sqrt();
    Superoperator::from_matrix(1, vec![
        1.0,   0.0, 0.0, 0.0,
        0.0,   s,   0.0, 0.0,
        0.0,   0.0, s,   0.0,
        gamma, 0.0, 0.0, 1.0 - gamma,
    ]).expect("4x4")
}

pub fn phase_damping_ptm(gamma: f64) -> Superoperator {
    let s = (1.0 - gamma).sqrt();
    Superoperator::diagonal(&[1.0, s, s, 1.0]).expect("4 entries")
}

/// Damping strengths `(gamma_1, gamma_phi)` for an idle of `t_ns`.
pub fn idle_gammas(t_ns: f64, params: &NoiseParams) -> (f64, f64) {
    let t_us = t_ns * 1e-3;
    let gamma1 = -(-t_us / params.t1_us).exp_m1();
    let gamma_phi = -(-2.0 * t_us * params.dephasing_rate()).exp_m1();
    (gamma1, gamma_phi)
}

/// `R_idle(t) = R_AD R_PD`.
pub fn idle_ptm(t_ns: f64, params: &NoiseParams) -> Result<Superoperator> {
    if !(t_ns >= 0.0) {
        return Err(Error::InvalidParameter(format!("idle duration {t_ns} ns")));
    }
    let (g1, gphi) = idle_gammas(t_ns, params);
    amplitude_damping_ptm(g1).product(&phase_damping_ptm(gphi))
}

/// Squeeze of the Bloch ball: `diag(1, 1 - p_plane, 1 - p_axis, 1 - p_plane)`.
pub fn depolarization_ptm(p_plane: f64, p_axis: f64) -> Result<Superoperator> {
    for p in [p_plane, p_axis] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("probability {p}")));
        }
    }
    Superoperator::diagonal(&[1.0, 1.0 - p_plane, 1.0 - p_axis, 1.0 - p_plane])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationAxis {
    Y,
    Z,
}

/// `exp(-i angle sigma / 2)`.
pub fn rotation_unitary(axis: RotationAxis, angle: f64) -> DMatrix<Complex64> {
    let (s, c) = (angle / 2.0).sin_cos();
    match axis {
        RotationAxis::Y => DMatrix::from_row_slice(2, 2, &[cplx(c, 0.), cplx(-s, 0.), cplx(s, 0.), cplx(c, 0.)]),
        RotationAxis::Z => DMatrix::from_row_slice(2, 2, &[cplx(c, -s), cplx(0., 0.), cplx(0., 0.), cplx(c, s)]),
    }
}

/// Rotation transfer matrix with its oscillating entries scaled by `damping`.
fn damped_rotation(axis: RotationAxis, angle: f64, damping: f64) -> Superoperator {
    let (s, c) = angle.sin_cos();
    let (s, c) = (s * damping, c * damping);
    let mut m = Superoperator::identity(1).matrix().to_vec();
    let (a, b) = match axis {
        // Bloch rotation in the z-x plane.
        RotationAxis::Y => (3, 1),
        // Bloch rotation in the x-y plane.
        RotationAxis::Z => (1, 2),
    };
    m[a * 4 + a] = c;
    m[b * 4 + b] = c;
    m[b * 4 + a] = s;
    m[a * 4 + b] = -s;
    Superoperator::from_matrix(1, m).expect("4x4")
}

pub fn rotation_ptm(axis: RotationAxis, angle: f64) -> Superoperator {
    damped_rotation(axis, angle, 1.0)
}

/// Rotation averaged over a normally distributed angle, `N(angle, sigma^2)`.
///
/// Every entry is affine in `cos` and `sin` of the angle, so averaging scales
/// the oscillating part by `exp(-sigma^2 / 2)`.
pub fn noisy_rotation_ptm(axis: RotationAxis, angle: f64, sigma: f64) -> Result<Superoperator> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma {sigma}")));
    }
    Ok(damped_rotation(axis, angle, (-0.5 * sigma * sigma).exp()))
}

/// Sandwiched physical rotation:
/// `R_idle(tau1/2) R_dep [R_Rz(pi)] R'_Ry(angle) R_idle(tau1/2)`.
pub fn physical_rotation_ptm(ry_angle: f64, virtual_z: bool, params: &NoiseParams) -> Result<Superoperator> {
    let half_idle = idle_ptm(params.tau1_ns / 2.0, params)?;
    let dep = depolarization_ptm(params.p_plane, params.p_axis)?;
    let rot = noisy_rotation_ptm(RotationAxis::Y, ry_angle, params.phi_rms)?;
    if virtual_z {
        let z = rotation_ptm(RotationAxis::Z, PI);
        Superoperator::chain(&[&half_idle, &dep, &z, &rot, &half_idle])
    } else {
        Superoperator::chain(&[&half_idle, &dep, &rot, &half_idle])
    }
}

/// Hadamard as `Z R_y(-pi/2)` with the full single-qubit error model.
pub fn hadamard_ptm(params: &NoiseParams) -> Result<Superoperator> {
    physical_rotation_ptm(-PI / 2.0, true, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoQubitKind {
    ISwap,
    Cz,
}

/// XY-interaction unitary `U(theta, eta, zeta)` on `|00>, |01>, |10>, |11>`.
pub fn xy_unitary(theta: f64, eta: f64, zeta: f64) -> DMatrix<Complex64> {
    let (s, c) = (theta / 2.0).sin_cos();
    let i = cplx(0.0, 1.0);
    let z = cplx(0.0, 0.0);
    let one = cplx(1.0, 0.0);
    let e_eta = Complex64::from_polar(1.0, eta);
    let e_zeta = Complex64::from_polar(1.0, zeta);
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        one, z,                       z,                       z,
        z,   cplx(c, 0.),             i * e_eta * s,           z,
        z,   i * e_eta.conj() * s,    cplx(c, 0.),             z,
        z,   z,                       z,                       e_zeta,
    ]);
    m
}

impl TwoQubitKind {
    /// Nominal `(theta, eta, zeta)`.
    pub fn nominal(self) -> (f64, f64, f64) {
        match self {
            TwoQubitKind::ISwap => (PI, 0.0, 0.0),
            TwoQubitKind::Cz => (0.0, 0.0, PI),
        }
    }

    /// Standard deviations of `(theta, eta, zeta)`.
    pub fn spreads(self, params: &NoiseParams) -> (f64, f64, f64) {
        match self {
            TwoQubitKind::ISwap => (params.phi_rms, params.phi_rms, params.sigma_zeta),
            TwoQubitKind::Cz => (0.0, 0.0, params.sigma_zeta),
        }
    }

    pub fn ideal_unitary(self) -> DMatrix<Complex64> {
        let (t, e, z) = self.nominal();
        xy_unitary(t, e, z)
    }
}

/// Change of basis from the column-stacked superoperator `S` to the transfer matrix.
fn ptm_from_liouville(liouville: &DMatrix<Complex64>, arity: usize) -> Result<Superoperator> {
    let d = 1usize << arity;
    let basis: Vec<DMatrix<Complex64>> = (0..d * d)
        .map(|idx| {
            (0..arity).fold(DMatrix::from_element(1, 1, cplx(1.0, 0.0)), |acc, k| {
                let p = Pauli::from_index(idx >> (2 * (arity - 1 - k)));
                acc.kronecker(&DMatrix::from_row_slice(2, 2, &p.matrix()))
            })
        })
        .collect();
    let vecs: Vec<DMatrix<Complex64>> = basis
        .iter()
        .map(|p| DMatrix::from_iterator(d * d, 1, p.iter().cloned()))
        .collect();
    let images: Vec<DMatrix<Complex64>> = vecs.iter().map(|v| liouville * v).collect();
    let mut m = vec![0.0; d * d * d * d];
    for (i, vi) in vecs.iter().enumerate() {
        for (j, img) in images.iter().enumerate() {
            m[i * d * d + j] = (vi.adjoint() * img)[(0, 0)].re / d as f64;
        }
    }
    Superoperator::from_matrix(arity, m)
}

/// Transfer matrix of `U(theta, eta, zeta)` averaged over independent Gaussian
/// parameter noise with a tensor-product Gauss-Hermite rule of `nodes` points
/// per noisy parameter.
pub fn averaged_xy_ptm(kind: TwoQubitKind, params: &NoiseParams, nodes: usize) -> Result<Superoperator> {
    let (t0, e0, z0) = kind.nominal();
    let (st, se, sz) = kind.spreads(params);
    let rule = |sigma: f64| if sigma > 0.0 { gauss_hermite(nodes) } else { vec![(0.0, 1.0)] };
    let (rt, re, rz) = (rule(st), rule(se), rule(sz));
    let mut liouville = DMatrix::<Complex64>::zeros(16, 16);
    for &(xt, wt) in &rt {
        for &(xe, we) in &re {
            for &(xz, wz) in &rz {
                let u = xy_unitary(t0 + st * xt, e0 + se * xe, z0 + sz * xz);
                liouville += u.conjugate().kronecker(&u) * cplx(wt * we * wz, 0.0);
            }
        }
    }
    ptm_from_liouville(&liouville, 2)
}

/// `R_G = R_idle(tau2/2)^{x2} R'_G R_idle(tau2/2)^{x2}`.
pub fn two_qubit_ptm(kind: TwoQubitKind, params: &NoiseParams) -> Result<Superoperator> {
    let half = idle_ptm(params.tau2_ns / 2.0, params)?;
    let idle2 = Superoperator::tensor(&half, &half)?;
    let core = averaged_xy_ptm(kind, params, TWO_QUBIT_QUADRATURE_NODES)?;
    Superoperator::chain(&[&idle2, &core, &idle2])
}

/// Average gate fidelity `(Tr(R_ideal^T R) + d) / (d (d + 1))`, `d = 2^arity`.
pub fn gate_fidelity(ideal: &Superoperator, actual: &Superoperator) -> Result<f64> {
    let d = (1usize << ideal.arity()) as f64;
    let overlap = ideal.overlap(actual)?;
    Ok((overlap + d) / (d * (d + 1.0)))
}

/// Transfer matrix of the amplitude- then phase-damping Kraus sets, built the slow way.
pub fn idle_ptm_from_kraus(t_ns: f64, params: &NoiseParams) -> Result<Superoperator> {
    let (g1, gphi) = idle_gammas(t_ns, params);
    ptm_from_kraus(&amplitude_damping_kraus(g1))?.product(&ptm_from_kraus(&phase_damping_kraus(gphi))?)
}
