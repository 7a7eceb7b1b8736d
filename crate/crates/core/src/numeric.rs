//! Small numerical kernels shared by the entropy, Pansu and fitting code:
//! compensated summation, Richardson extrapolation on halving steps and a
//! straight-line least-squares fit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Highest column kept in the Richardson tableau. Deeper columns amplify
/// rounding noise faster than they remove truncation error.
const MAX_TABLEAU_ORDER: usize = 6;

/// Neville-style Richardson tableau for estimates taken at steps h, h/2, h/4, ...
/// with an error expansion in integer powers of h.
#[derive(Debug, Clone, Default)]
pub struct Richardson {
    rows: Vec<Vec<f64>>,
}

impl Richardson {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the estimate for the next (halved) step and returns the current best extrapolant.
    pub fn push(&mut self, estimate: f64) -> f64 {
        let mut row = Vec::with_capacity(MAX_TABLEAU_ORDER + 1);
        row.push(estimate);
        if let Some(prev) = self.rows.last() {
            let depth = prev.len().min(MAX_TABLEAU_ORDER);
            for j in 1..=depth {
                let factor = (1u64 << j) as f64 - 1.0;
                let value = row[j - 1] + (row[j - 1] - prev[j - 1]) / factor;
                row.push(value);
            }
        }
        let best = *row.last().unwrap();
        self.rows.push(row);
        best
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Outcome of an extrapolated limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limit {
    pub value: f64,
    /// |difference| between the last two extrapolants.
    pub spread: f64,
    /// Number of schedule points consumed.
    pub steps: usize,
}

/// Drives a Richardson tableau over `estimates` (taken at halving steps) until two
/// successive extrapolants agree to `tol * max(1, |value|)`.
pub fn extrapolate_limit<I>(estimates: I, tol: f64, what: &str) -> Result<Limit>
where
    I: IntoIterator<Item = f64>,
{
    let mut tableau = Richardson::new();
    let mut previous: Option<f64> = None;
    let mut spread = f64::INFINITY;
    for (i, estimate) in estimates.into_iter().enumerate() {
        if !estimate.is_finite() {
            return Err(Error::Convergence {
                what: what.to_string(),
                spread: f64::INFINITY,
            });
        }
        let best = tableau.push(estimate);
        if let Some(prev) = previous {
            spread = (best - prev).abs();
            if spread <= tol * best.abs().max(1.0) {
                return Ok(Limit {
                    value: best,
                    spread,
                    steps: i + 1,
                });
            }
        }
        previous = Some(best);
    }
    Err(Error::Convergence {
        what: what.to_string(),
        spread,
    })
}

/// Least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual over the fitted points.
    pub max_residual: f64,
    /// Standard error of the slope (zero for fewer than three points).
    pub slope_stderr: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::Input(format!(
            "fit needs paired samples, got {} x and {} y",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Input("fit needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx <= f64::EPSILON * mean_x.abs().max(1.0) {
        return Err(Error::Input("degenerate fit: abscissae have zero variance".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let max_residual = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let slope_stderr = if xs.len() > 2 {
        let sse: f64 = residuals.iter().map(|r| r * r).sum();
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        max_residual,
        slope_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1.0, 1e-16, 1e-16, 1e-16, 1e-16, -1.0];
        assert!((compensated_sum(values) - 4e-16).abs() < 1e-30);
    }

    #[test]
    fn richardson_kills_polynomial_error() {
        // exact limit 3 with error 2h - 5h^2 + h^3
        let estimates = (0..8).map(|k| {
            let h = 0.5_f64.powi(k);
            3.0 + 2.0 * h - 5.0 * h * h + h * h * h
        });
        let limit = extrapolate_limit(estimates, 1e-12, "poly").unwrap();
        assert!((limit.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn divergent_sequence_reports_convergence_error() {
        let estimates = (0..10).map(|k| 2.0_f64.powi(k));
        assert!(matches!(
            extrapolate_limit(estimates, 1e-9, "blowup"),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn fit_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 2.0 * x).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-14);
        assert!((fit.intercept - 1.5).abs() < 1e-14);
        assert!(fit.max_residual < 1e-14);
    }

    #[test]
    fn fit_rejects_constant_abscissa() {
        assert!(matches!(fit_line(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]), Err(Error::Input(_))));
    }
}
