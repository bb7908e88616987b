//! Dense-matrix reference implementations, written from the textbook
//! definitions and independent of the crate's own dense helpers.
//!
//! Full matrices use "qubit q is bit q of the basis index". A local operator
//! listed on sites `[a, b]` has `a` as its most significant tensor factor.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn mat2(a: [Complex64; 4]) -> CMat {
    CMat::from_row_slice(2, 2, &a)
}

pub fn sigma(p: usize) -> CMat {
    match p {
        0 => mat2([c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
        1 => mat2([c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        2 => mat2([c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        _ => mat2([c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    }
}

/// Pauli string with little-endian base-4 index: digit `q` acts on qubit `q`.
pub fn pauli(n: usize, index: usize) -> CMat {
    (0..n).rev().fold(CMat::identity(1, 1), |acc, q| acc.kronecker(&sigma((index >> (2 * q)) & 3)))
}

/// `c_P = Tr(P rho)` for every Pauli string.
pub fn coefficients(rho: &CMat) -> Vec<f64> {
    let n = rho.nrows().trailing_zeros() as usize;
    (0..1usize << (2 * n)).map(|i| (pauli(n, i) * rho).trace().re).collect()
}

pub fn density(coeffs: &[f64]) -> CMat {
    let n = (coeffs.len().trailing_zeros() / 2) as usize;
    let dim = (1usize << n) as f64;
    coeffs
        .iter()
        .enumerate()
        .fold(CMat::zeros(1 << n, 1 << n), |acc, (i, &x)| acc + pauli(n, i) * c(x / dim, 0.0))
}

/// Lift a local operator acting on `sites` to the whole register.
pub fn embed(local: &CMat, sites: &[usize], n: usize) -> CMat {
    let k = sites.len();
    let dim = 1usize << n;
    let mask: usize = sites.iter().map(|&s| 1 << s).sum();
    let loc = |i: usize| sites.iter().enumerate().map(|(j, &s)| ((i >> s) & 1) << (k - 1 - j)).sum::<usize>();
    CMat::from_fn(dim, dim, |r, col| {
        if r & !mask == col & !mask {
            local[(loc(r), loc(col))]
        } else {
            c(0.0, 0.0)
        }
    })
}

pub fn evolve(rho: &CMat, kraus: &[CMat]) -> CMat {
    kraus.iter().fold(CMat::zeros(rho.nrows(), rho.ncols()), |acc, k| acc + k * rho * k.adjoint())
}

/// Kraus set of `first` followed by `second`.
pub fn compose(first: &[CMat], second: &[CMat]) -> Vec<CMat> {
    second.iter().flat_map(|b| first.iter().map(move |a| b * a)).collect()
}

pub fn tensor_kraus(a: &[CMat], b: &[CMat]) -> Vec<CMat> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.kronecker(y))).collect()
}

pub fn random_matrix<R: Rng>(rng: &mut R, dim: usize) -> CMat {
    CMat::from_fn(dim, dim, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

/// Random full-rank density matrix on `n` qubits.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let a = random_matrix(rng, 1 << n);
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> CMat {
    random_matrix(rng, dim).qr().q()
}

/// Random channel with `count` Kraus operators, from a random isometry.
pub fn random_kraus<R: Rng>(rng: &mut R, dim: usize, count: usize) -> Vec<CMat> {
    let big = random_unitary(rng, dim * count);
    (0..count).map(|k| big.view((k * dim, 0), (dim, dim)).into_owned()).collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn amplitude_damping(gamma: f64) -> Vec<CMat> {
    vec![
        mat2([c(1., 0.), c(0., 0.), c(0., 0.), c((1. - gamma).sqrt(), 0.)]),
        mat2([c(0., 0.), c(gamma.sqrt(), 0.), c(0., 0.), c(0., 0.)]),
    ]
}

pub fn phase_damping(gamma: f64) -> Vec<CMat> {
    vec![
        mat2([c(1., 0.), c(0., 0.), c(0., 0.), c((1. - gamma).sqrt(), 0.)]),
        mat2([c(0., 0.), c(0., 0.), c(0., 0.), c(gamma.sqrt(), 0.)]),
    ]
}

/// Idle of `t_us` with `1/T2 = 1/(2 T1) + 1/T_phi`: phase damping, then amplitude damping.
pub fn idle(t_us: f64, t1: f64, t2: f64) -> Vec<CMat> {
    let rate_phi = 1.0 / t2 - 0.5 / t1;
    let g1 = 1.0 - (-t_us / t1).exp();
    let gphi = 1.0 - (-2.0 * t_us * rate_phi).exp();
    compose(&phase_damping(gphi), &amplitude_damping(g1))
}

/// Pauli channel with Bloch action `(x (1 - p_plane), y (1 - p_axis), z (1 - p_plane))`.
pub fn depolarization(p_plane: f64, p_axis: f64) -> Vec<CMat> {
    let px = p_axis / 4.0;
    let pz = p_axis / 4.0;
    let py = p_plane / 2.0 - p_axis / 4.0;
    assert!(py >= 0.0, "not a Pauli channel");
    [1.0 - px - py - pz, px, py, pz]
        .iter()
        .enumerate()
        .map(|(i, &p)| sigma(i) * c(p.sqrt(), 0.0))
        .collect()
}

pub fn ry(angle: f64) -> CMat {
    let (s, co) = (angle / 2.0).sin_cos();
    mat2([c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.)])
}

pub fn rz(angle: f64) -> CMat {
    let (s, co) = (angle / 2.0).sin_cos();
    mat2([c(co, -s), c(0., 0.), c(0., 0.), c(co, s)])
}

/// Trapezoid nodes and weights for a normal distribution, `+-10 sigma`.
pub fn normal_nodes(mean: f64, sd: f64, per_sd: usize) -> Vec<(f64, f64)> {
    if sd == 0.0 {
        return vec![(mean, 1.0)];
    }
    let m = 10 * per_sd;
    let h = 1.0 / per_sd as f64;
    let raw: Vec<(f64, f64)> = (0..=2 * m)
        .map(|i| {
            let x = (i as f64 - m as f64) * h;
            (mean + sd * x, (-0.5 * x * x).exp())
        })
        .collect();
    let total: f64 = raw.iter().map(|r| r.1).sum();
    raw.into_iter().map(|(x, w)| (x, w / total)).collect()
}

/// Mixture of unitaries as a Kraus set.
pub fn mixture(terms: impl IntoIterator<Item = (f64, CMat)>) -> Vec<CMat> {
    terms.into_iter().map(|(w, u)| u * c(w.sqrt(), 0.0)).collect()
}

/// `R_y` with a normally distributed angle.
pub fn noisy_ry(angle: f64, sd: f64) -> Vec<CMat> {
    mixture(normal_nodes(angle, sd, 4).into_iter().map(|(a, w)| (w, ry(a))))
}

/// Physical single-qubit gate: half idle, angle-noisy `R_y`, optional `Z`,
/// depolarization, half idle.
pub fn physical_gate(angle: f64, z: bool, p: &ringqec::noise::NoiseParams) -> Vec<CMat> {
    let half = idle(p.tau1_ns * 1e-3 / 2.0, p.t1_us, p.t2_us);
    let mut k = compose(&half, &noisy_ry(angle, p.phi_rms));
    if z {
        k = compose(&k, &[sigma(3)]);
    }
    k = compose(&k, &depolarization(p.p_plane, p.p_axis));
    compose(&k, &half)
}

/// XY interaction on `|00>, |01>, |10>, |11>`.
pub fn xy(theta: f64, eta: f64, zeta: f64) -> CMat {
    let (s, co) = (theta / 2.0).sin_cos();
    let i = c(0.0, 1.0);
    let e = Complex64::from_polar(1.0, eta);
    let z = c(0.0, 0.0);
    CMat::from_row_slice(
        4,
        4,
        &[
            c(1., 0.), z, z, z,
            z, c(co, 0.), i * e * s, z,
            z, i * e.conj() * s, c(co, 0.), z,
            z, z, z, Complex64::from_polar(1.0, zeta),
        ],
    )
}

/// Column-stacked superoperator `sum_k conj(K) (x) K`.
pub fn liouville(kraus: &[CMat]) -> CMat {
    let d = kraus[0].nrows();
    kraus.iter().fold(CMat::zeros(d * d, d * d), |acc, k| acc + k.conjugate().kronecker(k))
}

pub fn apply_liouville(l: &CMat, rho: &CMat) -> CMat {
    let d = rho.nrows();
    let v = CMat::from_iterator(d * d, 1, rho.iter().cloned());
    CMat::from_iterator(d, d, (l * v).iter().cloned())
}

/// Averaged two-qubit gate with idles, as a Liouville matrix on sites `[a, b]`.
pub fn two_qubit_gate(iswap: bool, p: &ringqec::noise::NoiseParams) -> CMat {
    use std::f64::consts::PI;
    let (t0, z0) = if iswap { (PI, 0.0) } else { (0.0, PI) };
    let (st, se) = if iswap { (p.phi_rms, p.phi_rms) } else { (0.0, 0.0) };
    let mut core = CMat::zeros(16, 16);
    for (t, wt) in normal_nodes(t0, st, 3) {
        for (e, we) in normal_nodes(0.0, se, 3) {
            for (z, wz) in normal_nodes(z0, p.sigma_zeta, 3) {
                let u = xy(t, e, z);
                core += u.conjugate().kronecker(&u) * c(wt * we * wz, 0.0);
            }
        }
    }
    let half = idle(p.tau2_ns * 1e-3 / 2.0, p.t1_us, p.t2_us);
    let idles = liouville(&tensor_kraus(&half, &half));
    &idles * core * &idles
}
