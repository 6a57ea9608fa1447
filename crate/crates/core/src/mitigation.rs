//! Fit-based post-processing of noisy transfer sweeps.
//!
//! The noisy series at depth `N` is modelled as
//! `F_N(t) = c1^N · f(t - c2·N) + α·(1 - c1^N)` where `f` is the error-free
//! series. All parameters are estimated from the observed sweep alone:
//! `α` from the deepest series, `c1` from the peak decay, `c2` from the drift
//! of the hitting time. Nothing here depends on the noise model.

use serde::{Deserialize, Serialize};

use crate::analysis::{SweepResult, TransferRecord};
use crate::error::{Error, Result};

/// Smallest `c1^N` accepted by [`rescale`].
pub const RETENTION_FLOOR: f64 = 1e-6;

/// Points whose excess `F - α` is at or below this are left out of the `c1` fit.
pub const EXCESS_FLOOR: f64 = 1e-4;

/// Depth range used by the `c1` and `c2` fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub n_min: usize,
    /// Inclusive; `None` means up to the deepest record.
    #[serde(default)]
    pub n_max: Option<usize>,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            n_min: 6,
            n_max: None,
        }
    }
}

impl FitWindow {
    pub fn contains(&self, n: usize) -> bool {
        n >= self.n_min && self.n_max.is_none_or(|m| n <= m)
    }
}

/// Whether the log-linear `c1` fit pins its intercept at `ln(1 - α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum C1Intercept {
    #[default]
    Pinned,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MitigationOptions {
    #[serde(default)]
    pub window: FitWindow,
    #[serde(default)]
    pub c1_intercept: C1Intercept,
}

/// Outcome of a least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in the fitted coordinates.
    pub residual: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    /// Intercept of the hitting-time line: the estimated error-free hitting time.
    pub t_ideal: f64,
    /// Depths actually used, `[first, last]`.
    pub fit_window: [usize; 2],
    pub c1_residual: f64,
    pub c2_residual: f64,
    pub c1_points: usize,
    pub c2_points: usize,
}

/// Mean of the series over its grid.
pub fn estimate_alpha(series: &[f64]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::input(
            "cannot estimate a stationary value from an empty series",
        ));
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    if !(0.0..=1.0).contains(&mean) {
        return Err(Error::input(format!(
            "stationary value {mean} lies outside [0, 1]"
        )));
    }
    Ok(mean)
}

fn ols(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    LineFit {
        slope,
        intercept,
        residual: rms(xs, ys, slope, intercept),
        points: xs.len(),
    }
}

fn rms(xs: &[f64], ys: &[f64], slope: f64, intercept: f64) -> f64 {
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    (ss / xs.len() as f64).sqrt()
}

/// Fit `ln(F - α) = N·ln c1 + b` over the window; returns `c1` and the fit.
///
/// With [`C1Intercept::Pinned`], `b = ln(1 - α)`.
pub fn fit_c1(
    peaks: &[(usize, f64)],
    alpha: f64,
    window: FitWindow,
    intercept: C1Intercept,
) -> Result<(f64, LineFit)> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::input(format!(
            "stationary value must lie in [0, 1), got {alpha}"
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = peaks
        .iter()
        .filter(|(n, f)| window.contains(*n) && f - alpha > EXCESS_FLOOR)
        .map(|&(n, f)| (n as f64, (f - alpha).ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::Fit(format!(
            "c1 needs at least 3 depths in the window with fidelity above the stationary value, found {}",
            xs.len()
        )));
    }
    let fit = match intercept {
        C1Intercept::Free => ols(&xs, &ys),
        C1Intercept::Pinned => {
            let b = (1.0 - alpha).ln();
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * (y - b)).sum();
            let sxx: f64 = xs.iter().map(|x| x * x).sum();
            let slope = sxy / sxx;
            LineFit {
                slope,
                intercept: b,
                residual: rms(&xs, &ys, slope, b),
                points: xs.len(),
            }
        }
    };
    let c1 = fit.slope.exp();
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::Fit(format!(
            "fitted c1 = {c1} is not a valid retention factor"
        )));
    }
    Ok((c1, fit))
}

/// Rescaled series and the number of points clamped into `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rescaled {
    pub values: Vec<f64>,
    pub clamped: usize,
}

/// Invert the affine noise model at depth `n_steps`.
pub fn rescale(series: &[f64], c1: f64, alpha: f64, n_steps: usize) -> Result<Rescaled> {
    if !(c1 > 0.0) {
        return Err(Error::input(format!("c1 must be positive, got {c1}")));
    }
    let a = c1.powi(n_steps as i32);
    if a < RETENTION_FLOOR {
        return Err(Error::Unmitigatable {
            n_steps,
            retention: a,
            floor: RETENTION_FLOOR,
        });
    }
    let b = alpha * (1.0 - a);
    let mut clamped = 0;
    let values = series
        .iter()
        .map(|&n| {
            let v = (n - b) / a;
            if (0.0..=1.0).contains(&v) {
                v
            } else {
                clamped += 1;
                v.clamp(0.0, 1.0)
            }
        })
        .collect();
    Ok(Rescaled { values, clamped })
}

/// Ordinary least-squares line `T(N) = T_ideal + c2·N` over the window.
pub fn fit_c2(hitting_times: &[(usize, f64)], window: FitWindow) -> Result<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = hitting_times
        .iter()
        .filter(|(n, _)| window.contains(*n))
        .map(|&(n, t)| (n as f64, t))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::Fit(format!(
            "c2 needs at least 3 depths in the window, found {}",
            xs.len()
        )));
    }
    Ok(ols(&xs, &ys))
}

/// Relabel the grid `t -> t - c2·N`.
pub fn shift_time(record: &TransferRecord, c2: f64) -> Result<TransferRecord> {
    let offset = c2 * record.n_steps as f64;
    let grid = record.t_grid.iter().map(|t| t - offset).collect();
    TransferRecord::new(record.n_steps, grid, record.fidelity.clone())
}

/// Corrected sweeps produced by [`mitigate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Mitigated {
    pub fit: FitResult,
    /// Rescaled on the original grids.
    pub rescaled: SweepResult,
    /// Rescaled and moved onto shifted grids.
    pub shifted: SweepResult,
    pub clamp_events: usize,
    /// Depths skipped because `c1^N` fell below [`RETENTION_FLOOR`].
    pub unmitigatable: Vec<usize>,
}

/// Fit `α`, `c1`, `c2` from the sweep and apply the corrections to every depth.
pub fn mitigate(sweep: &SweepResult, options: &MitigationOptions) -> Result<Mitigated> {
    let deepest = sweep
        .deepest()
        .ok_or_else(|| Error::input("cannot mitigate an empty sweep"))?;
    let alpha = estimate_alpha(&deepest.fidelity)?;
    let (c1, c1_fit) = fit_c1(&sweep.peaks(), alpha, options.window, options.c1_intercept)?;
    let c2_fit = fit_c2(&sweep.hitting_times(), options.window)?;
    let c2 = c2_fit.slope;

    let mut rescaled = Vec::new();
    let mut shifted = Vec::new();
    let mut clamp_events = 0;
    let mut unmitigatable = Vec::new();
    for record in &sweep.records {
        let r = match rescale(&record.fidelity, c1, alpha, record.n_steps) {
            Ok(r) => r,
            Err(Error::Unmitigatable { n_steps, .. }) => {
                unmitigatable.push(n_steps);
                continue;
            }
            Err(e) => return Err(e),
        };
        clamp_events += r.clamped;
        let rec = TransferRecord::new(record.n_steps, record.t_grid.clone(), r.values)?;
        shifted.push(shift_time(&rec, c2)?);
        rescaled.push(rec);
    }

    let in_window: Vec<usize> = sweep
        .depths()
        .into_iter()
        .filter(|n| options.window.contains(*n))
        .collect();
    let fit = FitResult {
        alpha,
        c1,
        c2,
        t_ideal: c2_fit.intercept,
        fit_window: [
            in_window[0],
            *in_window.last().expect("c2 fit saw at least 3 depths"),
        ],
        c1_residual: c1_fit.residual,
        c2_residual: c2_fit.residual,
        c1_points: c1_fit.points,
        c2_points: c2_fit.points,
    };
    Ok(Mitigated {
        fit,
        rescaled: SweepResult::new(format!("{}:rescaled", sweep.label), rescaled)?,
        shifted: SweepResult::new(format!("{}:mitigated", sweep.label), shifted)?,
        clamp_events,
        unmitigatable,
    })
}
