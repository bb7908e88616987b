//! Decay fits and the simple analytic reference models.

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 500;
/// Slack on the accepted fidelity range `[0.45, 1]`.
const FIDELITY_SLACK: f64 = 1e-9;

/// `F(t) = 1/2 + 1/2 (1 - 2 eps)^(t - t0)`.
pub fn decay_model(t: f64, epsilon: f64, t0: f64) -> f64 {
    0.5 + 0.5 * (1.0 - 2.0 * epsilon).powf(t - t0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Error rate per microsecond, as a fraction.
    pub epsilon: f64,
    pub t0: f64,
    /// Over `(epsilon, t0)`.
    pub covariance: [[f64; 2]; 2],
    pub excluded_first_point: bool,
    pub weighted: bool,
    /// Weighted residual sum of squares.
    pub rss: f64,
    /// `data - model` at each fitted point.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl FitResult {
    pub fn epsilon_stderr(&self) -> f64 {
        self.covariance[0][0].max(0.0).sqrt()
    }

    pub fn t0_stderr(&self) -> f64 {
        self.covariance[1][1].max(0.0).sqrt()
    }

    pub fn predict(&self, t: f64) -> f64 {
        decay_model(t, self.epsilon, self.t0)
    }
}

struct Points<'a> {
    t: &'a [f64],
    f: &'a [f64],
    w: Vec<f64>,
}

impl Points<'_> {
    fn rss(&self, eps: f64, t0: f64) -> f64 {
        (0..self.t.len())
            .map(|i| self.w[i] * (self.f[i] - decay_model(self.t[i], eps, t0)).powi(2))
            .sum()
    }

    /// `J^T W J` and `J^T W r` of the model at `(eps, t0)`.
    fn normal_equations(&self, eps: f64, t0: f64) -> (Matrix2<f64>, Vector2<f64>) {
        let q = 1.0 - 2.0 * eps;
        let mut jtj = Matrix2::zeros();
        let mut jtr = Vector2::zeros();
        for i in 0..self.t.len() {
            let dt = self.t[i] - t0;
            let qp = q.powf(dt);
            let d_eps = if dt == 0.0 { 0.0 } else { -dt * q.powf(dt - 1.0) };
            let d_t0 = -0.5 * qp * q.ln();
            let j = Vector2::new(d_eps, if d_t0.is_finite() { d_t0 } else { 0.0 });
            let r = self.f[i] - (0.5 + 0.5 * qp);
            jtj += self.w[i] * j * j.transpose();
            jtr += self.w[i] * r * j;
        }
        (jtj, jtr)
    }
}

/// Start from a straight line through `ln(2F - 1)`.
fn initial_guess(t: &[f64], f: &[f64]) -> (f64, f64) {
    let y: Vec<f64> = f.iter().map(|&x| (2.0 * x - 1.0).clamp(1e-12, 1.0).ln()).collect();
    let n = t.len() as f64;
    let (mt, my) = (t.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = t.iter().map(|x| (x - mt).powi(2)).sum();
    let sxy: f64 = t.iter().zip(&y).map(|(x, y)| (x - mt) * (y - my)).sum();
    let slope = if sxx > 0.0 { (sxy / sxx).min(0.0) } else { 0.0 };
    let eps = (0.5 * (1.0 - slope.exp())).clamp(0.0, 0.49);
    let t0 = if slope < 0.0 { mt - my / slope } else { 0.0 };
    (eps, t0)
}

/// Weighted least-squares fit of [`decay_model`] by damped Gauss-Newton.
///
/// `weights` are per-point (typically `1 / stderr^2`). Parameter errors are
/// the inverse normal matrix scaled by the reduced residual.
pub fn fit_error_rate(times: &[f64], fidelities: &[f64], weights: Option<&[f64]>, exclude_first: bool) -> Result<FitResult> {
    if times.len() != fidelities.len() || weights.is_some_and(|w| w.len() != times.len()) {
        return Err(Error::InvalidParameter("times, fidelities and weights differ in length".into()));
    }
    let skip = usize::from(exclude_first);
    let t = times.get(skip..).unwrap_or_default();
    let f = fidelities.get(skip..).unwrap_or_default();
    if t.len() < 3 {
        return Err(Error::InvalidParameter(format!("{} points to fit, need at least 3", t.len())));
    }
    if let Some(bad) = f.iter().find(|&&x| !(0.45 - FIDELITY_SLACK..=1.0 + FIDELITY_SLACK).contains(&x)) {
        return Err(Error::InvalidParameter(format!("fidelity {bad} outside [0.45, 1]")));
    }
    if t.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite time".into()));
    }
    let w: Vec<f64> = match weights {
        Some(w) => w[skip..].to_vec(),
        None => vec![1.0; t.len()],
    };
    if w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter("weights must be positive and finite".into()));
    }
    let pts = Points { t, f, w };

    let (mut eps, mut t0) = initial_guess(t, f);
    let mut rss = pts.rss(eps, t0);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = rss == 0.0;
    while !converged && iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = pts.normal_equations(eps, t0);
        let mut improved = false;
        while lambda < 1e12 {
            let damped = jtj + lambda * Matrix2::from_diagonal(&jtj.diagonal().map(|d| d.max(1e-12)));
            let Some(step) = damped.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let e = (eps + step[0]).clamp(0.0, 0.5 - 1e-12);
            let s = t0 + step[1];
            let trial = pts.rss(e, s);
            if trial.is_finite() && trial <= rss {
                let small = (e - eps).abs() <= 1e-14 + 1e-12 * eps.abs() && (s - t0).abs() <= 1e-12 * (1.0 + t0.abs());
                converged = small || rss - trial <= 1e-15 * rss.max(1e-300) || trial == 0.0;
                eps = e;
                t0 = s;
                rss = trial;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // No downhill step at any damping: a stationary point.
            converged = true;
        }
    }
    if !converged || !rss.is_finite() {
        return Err(Error::FitFailed {
            reason: format!("no convergence after {iterations} iterations"),
            rss,
        });
    }

    let (jtj, _) = pts.normal_equations(eps, t0);
    let dof = (t.len() - 2) as f64;
    let scale = rss / dof;
    let inv = jtj.pseudo_inverse(1e-12 * jtj.norm().max(1e-300)).unwrap_or_else(|_| Matrix2::zeros());
    let cov = inv * scale;
    let sym = 0.5 * (cov[(0, 1)] + cov[(1, 0)]);
    let residuals = t.iter().zip(f).map(|(&ti, &fi)| fi - decay_model(ti, eps, t0)).collect();
    Ok(FitResult {
        epsilon: eps,
        t0,
        covariance: [[cov[(0, 0)], sym], [sym, cov[(1, 1)]]],
        excluded_first_point: exclude_first,
        weighted: weights.is_some(),
        rss,
        residuals,
        iterations,
    })
}

/// A fit to the ensemble mean together with the spread of refits over
/// trajectories drawn with replacement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapFit {
    pub fit: FitResult,
    pub epsilon_stderr: f64,
    pub t0_stderr: f64,
    pub resamples: usize,
}

fn mean_curve(curves: &[Vec<f64>], pick: impl Iterator<Item = usize> + Clone) -> (Vec<f64>, Vec<f64>) {
    let k = curves[0].len();
    let n = pick.clone().count() as f64;
    let mut mean = vec![0.0; k];
    for i in pick.clone() {
        for (m, x) in mean.iter_mut().zip(&curves[i]) {
            *m += x / n;
        }
    }
    let mut var = vec![0.0; k];
    for i in pick {
        for ((v, x), m) in var.iter_mut().zip(&curves[i]).zip(&mean) {
            *v += (x - m).powi(2) / (n - 1.0);
        }
    }
    let stderr = var.iter().map(|v| (v / n).sqrt()).collect();
    (mean, stderr)
}

/// [`fit_error_rate`] on per-trajectory fidelity curves, weighted by the
/// per-cycle standard errors, with parameter errors from `resamples`
/// bootstrap refits.
///
/// Prefix trajectories make the points of one curve correlated, so the
/// covariance of a single fit understates the uncertainty; resampling whole
/// curves does not.
pub fn bootstrap_error_rate(
    times: &[f64],
    curves: &[Vec<f64>],
    exclude_first: bool,
    resamples: usize,
    seed: u64,
) -> Result<BootstrapFit> {
    if curves.len() < 2 || resamples < 2 {
        return Err(Error::InvalidParameter("bootstrap needs at least two curves and two resamples".into()));
    }
    if curves.iter().any(|c| c.len() != times.len()) {
        return Err(Error::BadShape("every curve needs one fidelity per time".into()));
    }
    let weighted_fit = |mean: &[f64], stderr: &[f64]| {
        let w: Option<Vec<f64>> = stderr.iter().all(|&s| s > 0.0).then(|| stderr.iter().map(|s| s.powi(-2)).collect());
        fit_error_rate(times, mean, w.as_deref(), exclude_first)
    };
    let n = curves.len();
    let (mean, stderr) = mean_curve(curves, 0..n);
    let fit = weighted_fit(&mean, &stderr)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let pick: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let (m, s) = mean_curve(curves, pick.iter().copied());
        let f = weighted_fit(&m, &s)?;
        params.push((f.epsilon, f.t0));
    }
    let sd = |get: fn(&(f64, f64)) -> f64| {
        let r = resamples as f64;
        let m = params.iter().map(get).sum::<f64>() / r;
        (params.iter().map(|p| (get(p) - m).powi(2)).sum::<f64>() / (r - 1.0)).sqrt()
    };
    Ok(BootstrapFit {
        epsilon_stderr: sd(|p| p.0),
        t0_stderr: sd(|p| p.1),
        fit,
        resamples,
    })
}

/// Fidelity of one physical qubit averaged over the six cardinal states.
pub fn single_qubit_fidelity(t_us: f64, t1_us: f64, t2_us: f64) -> f64 {
    (1.0 + (-t_us / t1_us).exp()) / 6.0 + (1.0 + (-t_us / t2_us).exp()) / 3.0
}

/// Probability of at least two errors among `n` qubits failing independently with `p`.
pub fn weight2_probability(p: f64, n: u32) -> f64 {
    // Summing the tail avoids the cancellation in 1 - (P0 + P1) at small p.
    let mut binom = 1.0;
    let mut total = 0.0;
    for k in 0..=n {
        if k >= 2 {
            total += binom * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
        }
        binom *= f64::from(n - k) / f64::from(k + 1);
    }
    total.clamp(0.0, 1.0)
}

/// How a single-qubit error probability per cycle depends on `T1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PForm {
    /// `p = beta exp(-t_c / T1)`.
    #[default]
    Exp,
    /// `p = beta (1 - exp(-t_c / T1))`.
    OneMinusExp,
}

impl PForm {
    pub fn factor(self, t1_us: f64, cycle_us: f64) -> f64 {
        match self {
            PForm::Exp => (-cycle_us / t1_us).exp(),
            PForm::OneMinusExp => -(-cycle_us / t1_us).exp_m1(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub beta: f64,
    pub p_form: PForm,
    pub rss: f64,
    /// `epsilon - P` for each input point.
    pub residuals: Vec<f64>,
}

/// One-parameter least squares of `epsilon(T1) ~ P(p(T1; beta), n)`.
pub fn fit_beta(t1_us: &[f64], epsilon: &[f64], p_form: PForm, cycle_us: f64, n: u32) -> Result<BetaFit> {
    if t1_us.len() != epsilon.len() || t1_us.len() < 3 {
        return Err(Error::InvalidParameter("need at least 3 matching (T1, epsilon) points".into()));
    }
    let factors: Vec<f64> = t1_us.iter().map(|&t| p_form.factor(t, cycle_us)).collect();
    let max_factor = factors.iter().cloned().fold(0.0, f64::max);
    if !(max_factor > 0.0) || !max_factor.is_finite() {
        return Err(Error::InvalidParameter("degenerate T1 values".into()));
    }
    let cost = |beta: f64| -> f64 {
        factors
            .iter()
            .zip(epsilon)
            .map(|(&a, &e)| (e - weight2_probability((beta * a).min(1.0), n)).powi(2))
            .sum()
    };
    // Coarse scan, then golden-section refinement around the best cell.
    let hi = 1.0 / max_factor;
    let cells: usize = 400;
    let h = hi / cells as f64;
    let best = (0..=cells)
        .map(|i| (i, cost(i as f64 * h)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (mut a, mut b) = (best.saturating_sub(1) as f64 * h, ((best + 1).min(cells)) as f64 * h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (cost(c), cost(d));
    let mut iterations = 0;
    while b - a > 1e-13 * (1.0 + b.abs()) {
        iterations += 1;
        if iterations > 400 {
            return Err(Error::FitFailed {
                reason: "golden-section search did not narrow".into(),
                rss: fc.min(fd),
            });
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d);
        }
    }
    let beta = 0.5 * (a + b);
    let residuals = factors
        .iter()
        .zip(epsilon)
        .map(|(&f, &e)| e - weight2_probability((beta * f).min(1.0), n))
        .collect();
    Ok(BetaFit {
        beta,
        p_form,
        rss: cost(beta),
        residuals,
    })
}

/// Physical error rate per microsecond of one qubit with `T1 = T2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhysicalRate {
    /// `(1 - exp(-1/T1)) / 2`, from equating the decay model with
    /// [`single_qubit_fidelity`].
    #[default]
    Derived,
    /// `exp(-1/T1) / 2`.
    HalfExp,
}

pub fn physical_error_rate(t1_us: f64, form: PhysicalRate) -> f64 {
    match form {
        PhysicalRate::Derived => -0.5 * (-1.0 / t1_us).exp_m1(),
        PhysicalRate::HalfExp => 0.5 * (-1.0 / t1_us).exp(),
    }
}
