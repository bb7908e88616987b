use serde::{Deserialize, Serialize};

use crate::analysis::FitResult;
use crate::runner::SummaryRow;

pub const FIT_FORMAT: &str = "ringqec-fit";
pub const FIT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub k: usize,
    pub time_us: f64,
    pub fidelity: f64,
    pub stderr: f64,
    /// `None` for a point left out of the fit.
    pub residual: Option<f64>,
}

/// JSON fit report. Rates are fractions per microsecond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub format: String,
    pub version: u32,
    pub source: String,
    pub initial_state: Option<String>,
    pub epsilon: f64,
    pub epsilon_stderr: f64,
    pub t0_us: f64,
    pub t0_stderr: f64,
    pub covariance: [[f64; 2]; 2],
    pub excluded_first_point: bool,
    pub weighted: bool,
    pub rss: f64,
    pub points: Vec<FitPoint>,
}

impl FitReport {
    pub fn new(source: &str, initial_state: Option<String>, rows: &[SummaryRow], fit: &FitResult) -> Self {
        let skip = usize::from(fit.excluded_first_point);
        let points = rows
            .iter()
            .enumerate()
            .map(|(i, r)| FitPoint {
                k: r.k,
                time_us: r.time_us,
                fidelity: r.mean_fidelity,
                stderr: r.stderr,
                residual: i.checked_sub(skip).and_then(|j| fit.residuals.get(j).copied()),
            })
            .collect();
        Self {
            format: FIT_FORMAT.into(),
            version: FIT_VERSION,
            source: source.into(),
            initial_state,
            epsilon: fit.epsilon,
            epsilon_stderr: fit.epsilon_stderr(),
            t0_us: fit.t0,
            t0_stderr: fit.t0_stderr(),
            covariance: fit.covariance,
            excluded_first_point: fit.excluded_first_point,
            weighted: fit.weighted,
            rss: fit.rss,
            points,
        }
    }
}
