//! Hitting times and comparison metrics over fidelity series and sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fidelity series of one circuit depth over a model-time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRecord {
    pub n_steps: usize,
    pub t_grid: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub hitting_time: f64,
    pub peak_fidelity: f64,
}

impl TransferRecord {
    pub fn new(n_steps: usize, t_grid: Vec<f64>, fidelity: Vec<f64>) -> Result<Self> {
        if t_grid.len() != fidelity.len() {
            return Err(Error::input(format!(
                "grid has {} points but series has {}",
                t_grid.len(),
                fidelity.len()
            )));
        }
        check_grid(&t_grid)?;
        let (hitting_time, peak_fidelity) = hitting_time(&t_grid, &fidelity)?;
        Ok(Self {
            n_steps,
            t_grid,
            fidelity,
            hitting_time,
            peak_fidelity,
        })
    }
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::input("time grid is empty"));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::input("time grid has non-finite points"));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::input("time grid must be sorted ascending"));
    }
    Ok(())
}

/// Uniform grid of `points` values on `[t_min, t_max]`.
pub fn uniform_grid(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::input("a grid needs at least two points"));
    }
    if !(t_max > t_min) {
        return Err(Error::input(format!(
            "empty time window [{t_min}, {t_max}]"
        )));
    }
    let step = (t_max - t_min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                t_max
            } else {
                t_min + step * i as f64
            }
        })
        .collect())
}

/// Grid time of the largest fidelity, ties resolved toward the earliest time.
pub fn hitting_time(t_grid: &[f64], fidelity: &[f64]) -> Result<(f64, f64)> {
    if fidelity.is_empty() || t_grid.len() != fidelity.len() {
        return Err(Error::input(
            "hitting time needs a non-empty series on a matching grid",
        ));
    }
    let mut best = 0;
    for (i, &f) in fidelity.iter().enumerate().skip(1) {
        if f > fidelity[best] {
            best = i;
        }
    }
    Ok((t_grid[best], fidelity[best]))
}

/// Records for a range of circuit depths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub label: String,
    pub records: Vec<TransferRecord>,
}

impl SweepResult {
    pub fn new(label: impl Into<String>, records: Vec<TransferRecord>) -> Result<Self> {
        if records.windows(2).any(|w| w[1].n_steps <= w[0].n_steps) {
            return Err(Error::input("sweep depths must be strictly increasing"));
        }
        Ok(Self {
            label: label.into(),
            records,
        })
    }

    pub fn depths(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.n_steps).collect()
    }

    pub fn peaks(&self) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .map(|r| (r.n_steps, r.peak_fidelity))
            .collect()
    }

    pub fn hitting_times(&self) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .map(|r| (r.n_steps, r.hitting_time))
            .collect()
    }

    pub fn record(&self, n_steps: usize) -> Option<&TransferRecord> {
        self.records.iter().find(|r| r.n_steps == n_steps)
    }

    pub fn deepest(&self) -> Option<&TransferRecord> {
        self.records.last()
    }
}

fn check_same_depths(a: &SweepResult, b: &SweepResult) -> Result<()> {
    if a.records.is_empty() {
        return Err(Error::input("sweeps are empty"));
    }
    if a.depths() != b.depths() {
        return Err(Error::input(format!(
            "sweeps `{}` and `{}` cover different depth ranges",
            a.label, b.label
        )));
    }
    Ok(())
}

/// Depth-averaged absolute difference of peak fidelities.
pub fn delta_fidelity(a: &SweepResult, b: &SweepResult) -> Result<f64> {
    check_same_depths(a, b)?;
    let total: f64 = a
        .records
        .iter()
        .zip(&b.records)
        .map(|(ra, rb)| (ra.peak_fidelity - rb.peak_fidelity).abs())
        .sum();
    Ok(total / a.records.len() as f64)
}

/// `|Σ_N (T_a(N) - T_b(N))| / 𝒩`; the absolute value wraps the whole sum.
pub fn delta_hitting(a: &SweepResult, b: &SweepResult) -> Result<f64> {
    check_same_depths(a, b)?;
    let total: f64 = a
        .records
        .iter()
        .zip(&b.records)
        .map(|(ra, rb)| ra.hitting_time - rb.hitting_time)
        .sum();
    Ok(total.abs() / a.records.len() as f64)
}

/// Unnormalised L1 distance between two series sampled on the same grid.
pub fn dynamics_error(reference: &[f64], noisy: &[f64]) -> Result<f64> {
    if reference.len() != noisy.len() {
        return Err(Error::input(format!(
            "series lengths differ ({} vs {})",
            reference.len(),
            noisy.len()
        )));
    }
    Ok(reference
        .iter()
        .zip(noisy)
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// L1 distance after resampling `candidate` (on its own, possibly shifted, grid)
/// onto the reference grid; reference points outside the candidate's range are
/// dropped from the sum for both series.
pub fn dynamics_error_resampled(
    reference_grid: &[f64],
    reference: &[f64],
    candidate_grid: &[f64],
    candidate: &[f64],
) -> Result<f64> {
    if reference_grid.len() != reference.len() {
        return Err(Error::input("reference grid and series lengths differ"));
    }
    let resampled = resample(candidate_grid, candidate, reference_grid)?;
    Ok(reference
        .iter()
        .zip(&resampled)
        .filter_map(|(r, c)| c.map(|c| (r - c).abs()))
        .sum())
}

/// Linear interpolation of `(grid, values)` at each query point; `None` outside
/// the grid's range.
pub fn resample(grid: &[f64], values: &[f64], queries: &[f64]) -> Result<Vec<Option<f64>>> {
    if grid.len() != values.len() {
        return Err(Error::input("grid and series lengths differ"));
    }
    check_grid(grid)?;
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let tol = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
    Ok(queries
        .iter()
        .map(|&x| {
            if x < lo - tol || x > hi + tol {
                return None;
            }
            let x = x.clamp(lo, hi);
            let j = grid.partition_point(|&g| g <= x);
            if j == 0 {
                return Some(values[0]);
            }
            if j >= grid.len() {
                return Some(values[grid.len() - 1]);
            }
            let (x0, x1) = (grid[j - 1], grid[j]);
            if x1 == x0 {
                return Some(values[j - 1]);
            }
            let w = (x - x0) / (x1 - x0);
            Some(values[j - 1] * (1.0 - w) + values[j] * w)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sweep(label: &str, rows: &[(usize, f64, f64)]) -> SweepResult {
        let records = rows
            .iter()
            .map(|&(n, t, f)| {
                let grid = vec![0.0, t, t + 1.0];
                TransferRecord::new(n, grid, vec![0.0, f, 0.0]).unwrap()
            })
            .collect();
        SweepResult::new(label, records).unwrap()
    }

    #[test]
    fn constant_series_hits_at_first_point() {
        let grid = uniform_grid(0.0, 1.0, 5).unwrap();
        assert_eq!(hitting_time(&grid, &[0.3; 5]).unwrap(), (0.0, 0.3));
        assert_eq!(
            hitting_time(&grid, &[0.1, 0.5, 0.2, 0.5, 0.0]).unwrap(),
            (0.25, 0.5)
        );
    }

    #[test]
    fn uniform_grid_endpoints() {
        let g = uniform_grid(0.0, std::f64::consts::PI, 101).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[100], std::f64::consts::PI);
        assert!((g[1] - std::f64::consts::PI / 100.0).abs() < 1e-15);
        assert!(uniform_grid(1.0, 1.0, 3).is_err());
        assert!(uniform_grid(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn record_validation() {
        assert!(TransferRecord::new(1, vec![], vec![]).is_err());
        assert!(TransferRecord::new(1, vec![0.0, 1.0], vec![0.5]).is_err());
        assert!(TransferRecord::new(1, vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn sweep_depths_must_increase() {
        let r = TransferRecord::new(2, vec![0.0], vec![1.0]).unwrap();
        assert!(SweepResult::new("x", vec![r.clone(), r]).is_err());
    }

    #[test]
    fn identical_sweeps_have_zero_deltas() {
        let a = sweep("a", &[(1, 0.5, 0.9), (2, 0.6, 0.8)]);
        assert_eq!(delta_fidelity(&a, &a).unwrap(), 0.0);
        assert_eq!(delta_hitting(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn delta_hitting_wraps_sum_in_abs() {
        let a = sweep("a", &[(1, 0.5, 0.9), (2, 0.7, 0.8)]);
        let b = sweep("b", &[(1, 0.6, 0.9), (2, 0.6, 0.8)]);
        assert!(delta_hitting(&a, &b).unwrap().abs() < 1e-15);
        let c = sweep("c", &[(1, 0.4, 0.7), (2, 0.5, 0.5)]);
        assert!((delta_fidelity(&a, &c).unwrap() - 0.25).abs() < 1e-15);
        assert!((delta_hitting(&a, &c).unwrap() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn mismatched_depths_are_rejected() {
        let a = sweep("a", &[(1, 0.5, 0.9), (2, 0.7, 0.8)]);
        let b = sweep("b", &[(1, 0.5, 0.9), (3, 0.7, 0.8)]);
        assert!(delta_fidelity(&a, &b).is_err());
        assert!(delta_hitting(&a, &b).is_err());
    }

    #[test]
    fn dynamics_error_examples() {
        let f = vec![0.25; 101];
        assert_eq!(dynamics_error(&f, &f).unwrap(), 0.0);
        let g: Vec<f64> = f.iter().map(|x| x + 0.1).collect();
        assert!((dynamics_error(&f, &g).unwrap() - 10.1).abs() < 1e-12);
        assert!(dynamics_error(&f, &g[1..]).is_err());
    }

    #[test]
    fn resampling_drops_out_of_range_points() {
        let grid = [0.0, 1.0, 2.0];
        let vals = [0.0, 1.0, 0.0];
        let shifted: Vec<f64> = grid.iter().map(|t| t - 0.5).collect();
        let r = resample(&shifted, &vals, &grid).unwrap();
        assert_eq!(r[0], Some(0.5));
        assert_eq!(r[1], Some(0.5));
        assert_eq!(r[2], None);
        let err = dynamics_error_resampled(&grid, &[0.5, 0.5, 100.0], &shifted, &vals).unwrap();
        assert_eq!(err, 0.0);
    }

    fn arb_sweep() -> impl Strategy<Value = SweepResult> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..3.0), 5).prop_map(|rows| {
            let records = rows
                .into_iter()
                .enumerate()
                .map(|(i, (f, t))| TransferRecord::new(i + 1, vec![t], vec![f]).unwrap())
                .collect();
            SweepResult::new("s", records).unwrap()
        })
    }

    proptest! {
        #[test]
        fn delta_fidelity_is_a_pseudometric(a in arb_sweep(), b in arb_sweep(), c in arb_sweep()) {
            let ab = delta_fidelity(&a, &b).unwrap();
            prop_assert!((ab - delta_fidelity(&b, &a).unwrap()).abs() < 1e-15);
            prop_assert!(ab <= delta_fidelity(&a, &c).unwrap() + delta_fidelity(&c, &b).unwrap() + 1e-12);
            prop_assert_eq!(delta_fidelity(&a, &a).unwrap(), 0.0);
        }

        #[test]
        fn delta_hitting_bounded_by_mean_abs(a in arb_sweep(), b in arb_sweep()) {
            let mean_abs: f64 = a.records.iter().zip(&b.records)
                .map(|(x, y)| (x.hitting_time - y.hitting_time).abs()).sum::<f64>() / 5.0;
            prop_assert!(delta_hitting(&a, &b).unwrap() <= mean_abs + 1e-12);
        }

        #[test]
        fn hitting_time_invariant_under_monotone_maps(f in prop::collection::vec(0.0f64..1.0, 2..40)) {
            let grid: Vec<f64> = (0..f.len()).map(|i| i as f64 * 0.1).collect();
            let mapped: Vec<f64> = f.iter().map(|x| 3.0 * x.powi(3) + 0.2).collect();
            let (t1, _) = hitting_time(&grid, &f).unwrap();
            let (t2, _) = hitting_time(&grid, &mapped).unwrap();
            prop_assert_eq!(t1, t2);
        }
    }
}
